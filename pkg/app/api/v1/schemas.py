# schemas.py
"""Reports printed by the CLI; `--json` dumps them with their field aliases."""
from typing import List, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from app.config.settings import settings


def sig(value: Optional[float]) -> Optional[float]:
    """Round to settings.FLOAT_DIGITS significant digits."""
    if value is None:
        return None
    return float(f"{value:.{settings.FLOAT_DIGITS}g}")


class Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)

    def render(self) -> str:
        return "\n".join(f"{name}: {value}" for name, value in self.model_dump(by_alias=True).items())


class CheckReport(Report):
    d: int
    free_generators: List[int]
    finite: bool
    xi: Optional[List[int]] = None
    vertices: Optional[int] = None
    warning: Optional[str] = None

    def render(self) -> str:
        free = "{" + ",".join(str(s) for s in self.free_generators) + "}"
        line = f"d={self.d}, S_R={free}, finite: {'yes' if self.finite else 'no'}"
        if self.xi is not None:
            line += f", xi={self.xi}, |V_F|={self.vertices}"
        if self.warning:
            line += f"\nwarning: {self.warning}"
        return line


class CharPolyReport(Report):
    xi: List[int]
    from_xi: str
    from_traces: str
    coefficients: List[int]
    match: bool

    def render(self) -> str:
        verdict = "MATCH" if self.match else "MISMATCH"
        return f"xi={self.xi}\nfrom xi:     {self.from_xi}\nfrom traces: {self.from_traces}\n{verdict}"


class PartitionReport(Report):
    n: int
    trace: int
    translates: int
    insertions: List[int]
    total: int
    numeric: bool
    sets: Optional[bool] = None

    def render(self) -> str:
        terms = " + ".join(str(t) for t in [self.translates] + self.insertions)
        line = f"tr(A^{self.n}) = {self.trace} = {terms} = {self.total}: {'ok' if self.numeric else 'FAILED'}"
        if self.sets is not None:
            line += f"\nset partition of P_{self.n}: {'ok' if self.sets else 'FAILED'}"
        return line


class CountReport(Report):
    n: int
    recurrence: List[int]
    oracle: Optional[List[int]] = None
    verdict: Optional[str] = None

    def render(self) -> str:
        table = {"recurrence": self.recurrence}
        if self.oracle is not None:
            table["oracle"] = self.oracle
        frame = pd.DataFrame(table, index=pd.Index(range(1, len(self.recurrence) + 1), name="symbol"))
        text = f"n={self.n}\n{frame.to_string()}"
        return text + (f"\n{self.verdict}" if self.verdict else "")


class EssentialReport(Report):
    essential: List[int]
    alive: List[int]
    persistent: List[int]
    steps: int


class DegreeReport(Report):
    degree: float
    lambda_: float = Field(alias="lambda")
    essential: List[int]
    # essential symbols that recur at >= 2; these index the witness rows
    live: List[int] = []
    full_degree: bool
    witness: List[List[int]]
    witness_labels: List[str] = []
    ell: int = 0
    xi: Optional[List[int]] = None
    subsystem_count: int = 0
    reference_radius: Optional[float] = None
    case: Optional[str] = None
    residual: Optional[float] = None

    def render(self) -> str:
        lines = [
            f"essential: {self.essential}, live: {self.live}",
            f"ell={self.ell}, xi={self.xi}",
            f"subsystems: {self.subsystem_count}",
            f"degree: {self.degree}",
            f"rho: {self.lambda_}",
        ]
        if self.witness:
            frame = pd.DataFrame(self.witness)
            if self.witness_labels and len(self.witness_labels) == len(self.witness):
                frame.index = self.witness_labels
            lines.append(f"witness:\n{frame.to_string(header=False)}")
        lines.append(f"full degree: {'yes' if self.full_degree else 'no'}")
        if self.case:
            lines.append(f"case: {self.case}")
        return "\n".join(lines)


class SpectrumItem(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    degree: float
    lambda_: float = Field(alias="lambda")
    witness: list


class SpectrumReport(Report):
    k: int
    general: bool
    entries: List[SpectrumItem]

    def render(self) -> str:
        frame = pd.DataFrame(
            [{"degree": e.degree, "lambda": e.lambda_, "witness": e.witness} for e in self.entries]
        )
        return f"k={self.k}, {'general' if self.general else 'two-symbol'} spectrum\n{frame.to_string(index=False)}"
