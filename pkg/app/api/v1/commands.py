# commands.py
import logging
from pathlib import Path

import numpy as np

from app.api.v1.problem import load_problem
from app.api.v1.schemas import (
    CharPolyReport,
    CheckReport,
    CountReport,
    DegreeReport,
    EssentialReport,
    PartitionReport,
    SpectrumItem,
    SpectrumReport,
    sig,
)
from app.business.cayley import build_ball, export_dot, finite_representation, is_finite_representation
from app.business.combinatorics import (
    char_poly_from_xi,
    char_poly_trace_recursion,
    partition_check,
    partition_terms,
    trace_sequence,
    xi_from_traces,
    xi_sequence,
)
from app.business.degree import DegreeResult, classify_full_degree_k2, degree, eigen_identity_residual
from app.business.followers import degree_on_automaton, follower_classes
from app.business.presentation import MonoidPresentation, right_free_generators
from app.business.sft import count_blocks_oracle, count_blocks_recurrence, essential_symbols
from app.business.spectrum import spectrum_general, spectrum_k2

logger = logging.getLogger(__name__)


def _write_dot(args, monoid, radius=None):
    """F when it exists and no radius is asked for, otherwise the ball of that radius (default 2)."""
    if not args.dot:
        return
    if radius is None and isinstance(monoid, MonoidPresentation) and is_finite_representation(monoid):
        graph = finite_representation(monoid)
    else:
        graph = build_ball(monoid, 2 if radius is None else radius)
    Path(args.dot).write_text(export_dot(graph))
    logger.info(f"Wrote {args.dot}")


def cmd_check(args) -> CheckReport:
    p = load_problem(args.file).presentation_only("check")
    _write_dot(args, p)
    free = sorted(right_free_generators(p))
    if not is_finite_representation(p):
        logger.warning("Presentation has no finite representation")
        return CheckReport(d=p.d, free_generators=free, finite=False,
                           warning="non-free generators form a cycle; F is infinite")
    F = finite_representation(p)
    return CheckReport(d=p.d, free_generators=free, finite=True, xi=list(xi_sequence(p).xi), vertices=len(F.vertices))


def cmd_charpoly(args) -> CharPolyReport:
    p = load_problem(args.file).presentation_only("charpoly")
    _write_dot(args, p)
    xi = xi_sequence(p)
    from_xi = char_poly_from_xi(xi)
    from_traces = char_poly_trace_recursion(p.A)
    inverted = xi_from_traces(trace_sequence(p.A, p.d), p.d)
    return CharPolyReport(
        xi=list(xi.xi),
        from_xi=str(from_xi),
        from_traces=str(from_traces),
        coefficients=list(from_traces.coeffs),
        match=from_xi == from_traces and inverted == xi,
    )


def cmd_partition(args) -> PartitionReport:
    p = load_problem(args.file).presentation_only("partition")
    _write_dot(args, p)
    terms = partition_terms(p, args.n)
    sets = partition_check(p, args.n, enumerate_sets=True, cap=args.cap) if args.enumerate else None
    return PartitionReport(n=args.n, numeric=terms["trace"] == terms["total"], sets=sets, **terms)


def cmd_count(args) -> CountReport:
    problem = load_problem(args.file)
    monoid, r = problem.monoid(), problem.rules()
    _write_dot(args, monoid, radius=args.n)
    recurrence = count_blocks_recurrence(monoid, r, args.n)
    report = CountReport(n=args.n, recurrence=list(recurrence.counts))
    if args.oracle:
        oracle = count_blocks_oracle(monoid, r, args.n, cap=args.cap)
        report.oracle = list(oracle.counts)
        report.verdict = "MATCH" if oracle.counts == recurrence.counts else "MISMATCH"
    return report


def cmd_essential(args) -> EssentialReport:
    problem = load_problem(args.file)
    monoid, r = problem.monoid(), problem.rules()
    _write_dot(args, monoid)
    result = essential_symbols(monoid, r)
    return EssentialReport(
        essential=sorted(result.essential),
        alive=sorted(result.alive),
        persistent=sorted(result.persistent),
        steps=result.steps,
    )


def _residual(result: DegreeResult):
    """Eigen-identity residual when the witness rows all sum to xi at every lag."""
    if not result.full_degree or result.matrix is None or result.xi is None or result.reference_radius is None:
        return None
    blocks = result.matrix.blocks
    if not all(np.all(B.sum(axis=1) == result.xi.term(m)) for m, B in enumerate(blocks, start=1)):
        return None
    return eigen_identity_residual(result.matrix.entries, result.reference_radius, result.matrix.ell,
                                   result.matrix.block_size)


def cmd_degree(args) -> DegreeReport:
    problem = load_problem(args.file)
    monoid, r = problem.monoid(), problem.rules()
    _write_dot(args, monoid)
    if args.automaton and isinstance(monoid, MonoidPresentation):
        result = degree_on_automaton(follower_classes(monoid), r, threads=args.threads, cap=args.cap)
    else:
        result = degree(monoid, r, threads=args.threads, cap=args.cap)
    matrix = result.matrix
    return DegreeReport(
        degree=sig(result.degree),
        lambda_=sig(result.spectral_radius),
        essential=sorted(result.essential.essential),
        live=list(result.essential.live),
        full_degree=result.full_degree,
        witness=matrix.entries.tolist() if matrix is not None else [],
        witness_labels=[str(label) for label in matrix.labels] if matrix is not None else [],
        ell=matrix.ell if matrix is not None else 0,
        xi=list(result.xi.xi) if result.xi is not None else None,
        subsystem_count=result.subsystem_count,
        reference_radius=sig(result.reference_radius),
        case=classify_full_degree_k2(result),
        residual=sig(_residual(result)),
    )


def cmd_spectrum(args) -> SpectrumReport:
    p = load_problem(args.file).presentation_only("spectrum")
    _write_dot(args, p)
    if args.general:
        spectrum = spectrum_general(p, args.k, cap=args.cap, threads=args.threads)
    else:
        spectrum = spectrum_k2(p)
    entries = [SpectrumItem(degree=sig(e.degree), lambda_=sig(e.lam), witness=list(e.witness)) for e in spectrum.entries]
    return SpectrumReport(k=args.k if args.general else 2, general=args.general, entries=entries)


def _common(parser):
    parser.add_argument("file", help="problem JSON file")
    parser.add_argument("--json", action="store_true", help="print the report as JSON")
    parser.add_argument("--dot", metavar="PATH", help="write the finite representation (or a ball) as DOT")
    parser.add_argument("--threads", type=int, default=None, help="worker threads for enumeration")
    parser.add_argument("--cap", type=int, default=None, help="override the enumeration cap")
    parser.add_argument("-v", "--verbose", action="count", default=0)


def register(subparsers):
    check = subparsers.add_parser("check", help="generators, finite representation and xi")
    _common(check)
    check.set_defaults(handler=cmd_check)

    charpoly = subparsers.add_parser("charpoly", help="characteristic polynomial from xi and from traces")
    _common(charpoly)
    charpoly.set_defaults(handler=cmd_charpoly)

    partition = subparsers.add_parser("partition", help="periodic-word partition of P_n")
    _common(partition)
    partition.add_argument("--n", type=int, required=True)
    partition.add_argument("--enumerate", action="store_true", help="also check the partition set by set")
    partition.set_defaults(handler=cmd_partition)

    count = subparsers.add_parser("count", help="block counts gamma_{i,n}")
    _common(count)
    count.add_argument("--n", type=int, required=True)
    count.add_argument("--oracle", action="store_true", help="compare against brute-force enumeration")
    count.set_defaults(handler=cmd_count)

    essential = subparsers.add_parser("essential", help="essential, alive and persistent symbols")
    _common(essential)
    essential.set_defaults(handler=cmd_essential)

    deg = subparsers.add_parser("degree", help="topological degree with a witness subsystem")
    _common(deg)
    deg.add_argument("--automaton", action="store_true", help="use the follower-automaton algorithm")
    deg.set_defaults(handler=cmd_degree)

    spectrum = subparsers.add_parser("spectrum", help="attainable degrees")
    _common(spectrum)
    spectrum.add_argument("--k", type=int, default=2)
    spectrum.add_argument("--general", action="store_true", help="block-matrix family for alphabets up to k")
    spectrum.set_defaults(handler=cmd_spectrum)
