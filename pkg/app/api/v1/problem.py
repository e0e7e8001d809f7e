# problem.py
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from app.business.cayley import FollowerAutomaton, Source
from app.business.presentation import MonoidPresentation
from app.business.sft import SftRules
from app.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)


class PresentationSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    d: Optional[int] = None
    A: List[List[int]]


class AutomatonSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    d: Optional[int] = None
    states: List[str]
    initial: str
    transitions: Dict[str, Dict[int, str]]


class SftSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: int
    rules: List[List[List[int]]]


class ProblemFile(BaseModel):
    """One monoid (matrix presentation or follower automaton) and an optional SFT on it."""
    model_config = ConfigDict(extra="forbid")

    presentation: Optional[PresentationSpec] = None
    automaton: Optional[AutomatonSpec] = None
    sft: Optional[SftSpec] = None

    @model_validator(mode="after")
    def _exactly_one_monoid(self):
        if (self.presentation is None) == (self.automaton is None):
            raise ValueError("exactly one of 'presentation' and 'automaton' is required")
        return self

    def monoid(self) -> Source:
        try:
            if self.presentation is not None:
                d = self.presentation.d if self.presentation.d is not None else len(self.presentation.A)
                return MonoidPresentation(d=d, A=self.presentation.A)
            return FollowerAutomaton(**self.automaton.model_dump())
        except ValidationError as e:
            raise InvalidInputError(_describe(e)) from e

    def presentation_only(self, command: str) -> MonoidPresentation:
        monoid = self.monoid()
        if not isinstance(monoid, MonoidPresentation):
            raise InvalidInputError(f"'{command}' needs a matrix presentation")
        return monoid

    def rules(self) -> SftRules:
        if self.sft is None:
            raise InvalidInputError("this command needs an 'sft' section")
        try:
            return SftRules(k=self.sft.k, rules=self.sft.rules)
        except ValidationError as e:
            raise InvalidInputError(_describe(e)) from e


def _describe(e: ValidationError) -> str:
    first = e.errors()[0]
    where = ".".join(str(part) for part in first["loc"]) or "<root>"
    return f"{where}: {first['msg']}"


def load_problem(path) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InvalidInputError(f"cannot read {path}: {e.strerror}") from e
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        problem = ProblemFile.model_validate(payload)
    except ValidationError as e:
        raise InvalidInputError(f"{path}: {_describe(e)}") from e
    logger.debug(f"Loaded {path}")
    return problem
