"""
Named verification suites. Each suite turns a seed and a case count into a
list of cases, checks every case (possibly on a thread pool) and reports
one verdict per check in case order.

```python
report = run_suite("localization", seed=0, cases=100)
assert not report.failed
```
"""
import logging
import math
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .complexes import ChainMap, random_chain_map, random_complex
from .concurrency import run_cases
from .derived import check_base_change, check_localization, check_purity
from .equivariant import (
    ChernDatum,
    LevelSystem,
    categorical_lemma_check,
    chern_colimit,
    matrix_order,
    regular_system,
    triv,
)
from .exceptions import EngineError, NotStabilized, UnknownSuite
from .formats import model_document
from .linalg import PrimeField
from .nearby import (
    GmModel,
    ayoub_nearby,
    compare_mi_vs_fixed,
    fixed_points_identity,
    identity_model,
    kunneth_morphism,
    nth_level,
    stabilized,
    tame_nearby_cycles,
    tame_vanishing,
    wrap_model,
)
from .posets import (
    ORIGIN,
    FinitePoset,
    MonotoneMap,
    OpenClosedDecomposition,
    product_poset,
    pseudocircle,
    random_poset,
)
from .recollement import EquivariantRecollement, EquivariantTriple, SheafRecollement
from .reports import Report, tables_document, table_document, verdict
from .sheaves import SheafComplex, SheafMap, random_sheaf, unit_sheaf
from .simplicial import (
    assemble_d,
    check_minimal_path,
    constant_tower,
    doubled_closed_level,
    grid_chains,
    grid_leq,
    nerve,
    pseudodisk_tower,
)
from .typing import Final, Verdict
from .utils import divisors, lcm

logger = logging.getLogger(__name__)

__all__ = ["CaseResult", "Suite", "SUITES", "suite_names", "run_suite", "DEFAULT_SEED"]

DEFAULT_SEED: Final = 0
PRIMES: Final = (2, 3, 5)
WRAP_DEGREES: Final = (1, 2, 3)
DISK: Final = 2


class CaseResult(NamedTuple):
    name: str
    verdict: Verdict
    details: Dict[str, Any]
    # enough to re-run the case on its own
    counterexample: Optional[Dict[str, Any]] = None


class Suite(NamedTuple):
    name: str
    description: str
    cases: Callable[[int, int], List[Any]]
    check: Callable[[Any], List[CaseResult]]
    default_cases: int


SUITES: Dict[str, Suite] = {}


def suite(
    name: str, description: str, cases: Callable[[int, int], List[Any]], default_cases: int
) -> Callable[[Callable[[Any], List[CaseResult]]], Callable[[Any], List[CaseResult]]]:
    """
    Registers the decorated check under `name`. `cases` turns a seed and a
    count into the cases it is run on.
    """

    def decorator(check: Callable[[Any], List[CaseResult]]) -> Callable[[Any], List[CaseResult]]:
        SUITES[name] = Suite(name, description, cases, check, default_cases)
        return check

    return decorator


def suite_names() -> List[str]:
    return sorted(SUITES)


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _names(xs: Sequence[Any]) -> List[str]:
    return sorted(x if isinstance(x, str) else repr(x) for x in xs)


class RandomCase(NamedTuple):
    seed: int
    index: int


def _seeded(seed: int, count: int) -> List[RandomCase]:
    return [RandomCase(seed, i) for i in range(count)]


def _random_setup(case: RandomCase, max_size: int = 6) -> Tuple[PrimeField, FinitePoset, Any, SheafComplex]:
    rng = _rng(*case)
    field = PrimeField(PRIMES[int(rng.integers(0, len(PRIMES)))])
    P = random_poset(rng, int(rng.integers(2, max_size + 1)))
    chosen = [x for x in P if rng.random() < 0.3] or [P.elements[0]]
    closed = P.down_closure(chosen)
    if len(closed) == len(P):
        closed = frozenset(P.minimal_elements[:1])
    F = random_sheaf(field, P, rng, generators=2, max_dim=2)
    return field, P, closed, F


def _random_counterexample(
    case: RandomCase, field: PrimeField, P: FinitePoset, closed: Any, F: SheafComplex
) -> Dict[str, Any]:
    return {"seed": case.seed, "index": case.index, "model": model_document(field, P, F), "closed": _names(closed)}


# ################################################################
# finite spaces and recollements
# ################################################################


@suite("recollement-roundtrip", "reconstruct(decompose(F)) is F through a certified map", _seeded, 200)
def recollement_roundtrip(case: RandomCase) -> List[CaseResult]:
    field, P, closed, F = _random_setup(case, 8)
    recollement = SheafRecollement(OpenClosedDecomposition(P, closed))
    result = recollement.round_trip(F, recollement.decompose(F))
    holds = result.ambient and result.triple
    return [
        CaseResult(
            f"round trip #{case.index}",
            verdict(holds),
            {"ambient": result.ambient, "triple": result.triple, "ell": field.ell, "points": len(P)},
            None if holds else _random_counterexample(case, field, P, closed, F),
        )
    ]


@suite("localization", "both localization triangles are stalkwise exact", _seeded, 100)
def localization(case: RandomCase) -> List[CaseResult]:
    field, P, closed, F = _random_setup(case)
    report = check_localization(OpenClosedDecomposition(P, closed), F)
    holds = report.open_closed and report.closed_open
    return [
        CaseResult(
            f"localization #{case.index}",
            verdict(holds),
            {"open_closed": report.open_closed, "closed_open": report.closed_open, "failures": report.failures},
            None if holds else _random_counterexample(case, field, P, closed, F),
        )
    ]


@suite("base-change", "g* Rf_* is Rf'_* g'* through the chain pullback", _seeded, 50)
def base_change(case: RandomCase) -> List[CaseResult]:
    rng = _rng(*case)
    field = PrimeField(PRIMES[int(rng.integers(0, len(PRIMES)))])
    Y = random_poset(rng, int(rng.integers(2, 6)))
    sheets = FinitePoset(["a", "b"][: int(rng.integers(1, 3))], (), "sheets")
    square = product_poset(Y, sheets)
    f = square.left
    y = Y.elements[int(rng.integers(0, len(Y)))]
    piece = Y.up(y) if rng.random() < 0.5 else Y.down(y)
    sub = Y.subposet(piece, "piece")
    g = MonotoneMap.inclusion(sub, Y)
    F = random_sheaf(field, square.poset, rng, generators=2, max_dim=2)
    result = check_base_change(f, g, F)
    return [
        CaseResult(
            f"base change #{case.index}",
            verdict(result.holds),
            {"failing": _names(result.failing), "ell": field.ell},
            None if result.holds else {"seed": case.seed, "index": case.index, "base": model_document(field, Y)},
        )
    ]


def _purity_cases(seed: int, count: int) -> List[Tuple[int, int]]:
    return [(k, ell) for k in (2, 3, 4) for ell in (2, 3)][:count]


@suite("purity", "i^! of the constant sheaf at the origin of D_k is Λ[-2] with twist -1", _purity_cases, 6)
def purity(case: Tuple[int, int]) -> List[CaseResult]:
    k, ell = case
    table, twist = check_purity(k, PrimeField(ell))
    clean = {d: v for d, v in table.items() if v}
    holds = clean == {2: 1} and twist == -1
    return [CaseResult(f"purity D_{k} ell={ell}", verdict(holds), {"table": table_document(clean), "twist": twist})]


def _adjunction_instance(case: RandomCase) -> Tuple[PrimeField, FinitePoset, MonotoneMap, Any, Any]:
    rng = _rng(*case)
    field = PrimeField(PRIMES[int(rng.integers(0, len(PRIMES)))])
    X = random_poset(rng, int(rng.integers(2, 5)))
    minima = X.minimal_elements
    closed = [x for x in minima if rng.random() < 0.5] or [minima[0]]
    if len(closed) == len(X):
        closed = closed[:-1]
    sheets = FinitePoset(["a", "b"][: int(rng.integers(1, 3))], (), "sheets")
    square = product_poset(X, sheets)
    return field, X, square.left, closed, rng


@suite("adjunction-gluing", "glued (f*, Rf_*) satisfies the triangle identities", _seeded, 20)
def adjunction_gluing(case: RandomCase) -> List[CaseResult]:
    field, X, f, closed, rng = _adjunction_instance(case)
    source_space = f.source
    target = SheafRecollement(OpenClosedDecomposition(X, closed))
    source = SheafRecollement(OpenClosedDecomposition(source_space, f.preimage(closed)))
    xs = [random_sheaf(field, X, rng, generators=2, max_dim=1)]
    ys = [random_sheaf(field, source_space, rng, generators=2, max_dim=1)]
    sheaf_check = target.check_glued_adjunction(source, f, xs, ys)
    results = [
        CaseResult(
            f"sheaf adjunction #{case.index}",
            verdict(sheaf_check.holds),
            dict(sheaf_check._asdict()),
            (
                None
                if sheaf_check.holds
                else {"seed": case.seed, "index": case.index, "base": model_document(field, X, xs[0])}
            ),
        )
    ]
    levels = (1, 2)
    A, B = xs[0], ys[0]
    regular = regular_system(B, levels)
    first = regular.obj(1)
    theta = SheafMap(
        B, first, {y: ChainMap.identity(B[y]).with_endpoints(B[y], first[y]) for y in source_space}, check=False
    )
    x_triple = EquivariantTriple(A, triv(A, levels), SheafMap.identity(A))
    y_triple = EquivariantTriple(B, regular, theta)
    equivariant = EquivariantRecollement(X, levels).check_glued_adjunction(
        EquivariantRecollement(source_space, levels), f, [x_triple], [y_triple]
    )
    results.append(
        CaseResult(
            f"equivariant adjunction #{case.index}",
            verdict(equivariant.holds),
            dict(equivariant._asdict()),
            None if equivariant.holds else {"seed": case.seed, "index": case.index},
        )
    )
    return results


# ################################################################
# equivariant
# ################################################################


@suite("chern-colimit", "the colimit of cone(n c) is B once an ell-divisible level is present", _seeded, 50)
def chern_colimits(case: RandomCase) -> List[CaseResult]:
    rng = _rng(*case)
    ell = PRIMES[int(rng.integers(0, len(PRIMES)))]
    field = PrimeField(ell)
    A = random_complex(field, rng, 2, [int(d) for d in rng.integers(0, 3, size=2)], twist=-1)
    B = random_complex(field, rng, 0, [int(d) for d in rng.integers(0, 3, size=3)], twist=0)
    datum = ChernDatum(random_chain_map(A, B, rng))
    result = chern_colimit(datum, [1, ell, 2 * ell])
    holds = result.quasi_iso and result.complex.cohomology_table() == B.cohomology_table()
    try:
        chern_colimit(datum, [n for n in (1, 2, 3, 6) if n % ell])
        raised = False
    except NotStabilized:
        raised = True
    counterexample = {"seed": case.seed, "index": case.index, "ell": ell}
    return [
        CaseResult(
            f"chern colimit #{case.index}",
            verdict(holds),
            {"table": table_document(result.complex.cohomology_table())},
            None if holds else counterexample,
        ),
        CaseResult(
            f"chern colimit without divisible level #{case.index}",
            verdict(raised),
            {},
            None if raised else counterexample,
        ),
    ]


class WrapCase(NamedTuple):
    n: int
    ell: int


def _wrap_cases(seed: int, count: int) -> List[WrapCase]:
    return [WrapCase(n, ell) for n in WRAP_DEGREES for ell in (2, 3)][:count]


def _wrap_levels(case: WrapCase) -> List[int]:
    return divisors(case.n * case.ell)


def _wrap(case: WrapCase) -> Tuple[GmModel, PrimeField, SheafComplex, List[int]]:
    model = identity_model(DISK) if case.n == 1 else wrap_model(DISK, case.n)
    field = PrimeField(case.ell)
    return model, field, unit_sheaf(model.total, field), _wrap_levels(case)


def _case_document(case: WrapCase) -> Dict[str, Any]:
    return {"preset": {"kind": "wrap", "k": DISK, "n": case.n}, "ell": case.ell, "levels": _wrap_levels(case)}


def _inject_fault(system: LevelSystem) -> LevelSystem:
    """
    `system` with its first inflation replaced by zero.
    """
    inflations = dict(system.inflations)
    pair = min(inflations)
    inflations[pair] = ChainMap.zero(inflations[pair].source, inflations[pair].target)
    return LevelSystem(system.levels, {n: system.level(n) for n in system.levels}, inflations, check=False)


@suite("categorical-lemma", "finite colimits of inflated levels are the top level", _wrap_cases, 6)
def categorical_lemma(case: WrapCase) -> List[CaseResult]:
    model, field, F, levels = _wrap(case)
    system = tame_nearby_cycles(model, F, levels)
    results = []
    for x in model.closed:
        stalk = system.stalk(x)
        check = categorical_lemma_check(stalk)
        results.append(
            CaseResult(
                f"lemma n={case.n} ell={case.ell} at {x}",
                verdict(check.passes),
                {
                    "cocone": check.cocone,
                    "equivariant": check.equivariant,
                    "descent": check.descent,
                    "quasi_iso": check.quasi_iso,
                },
                None if check.passes else _case_document(case),
            )
        )
        if len(stalk.inflations) and any(not m.is_zero() for m in stalk.inflations.values()):
            caught = not categorical_lemma_check(_inject_fault(stalk)).passes
            results.append(
                CaseResult(
                    f"lemma negative control n={case.n} ell={case.ell} at {x}",
                    verdict(caught),
                    {},
                    None if caught else _case_document(case),
                )
            )
    return results


# ################################################################
# nearby and vanishing cycles
# ################################################################


def _component_oracle(model: GmModel, x: Any, N: int) -> int:
    """
    Connected components of the punctured neighbourhood of ``(x, 0)`` at
    level N, counted on the enumerated pullback.
    """
    level = nth_level(model, N)
    punctured = [e for e in level.space.up(level.origin(x)) if e in level.decomposition.open]
    return len(level.space.subposet(punctured).components)


@suite("nearby-stalks", "stabilized Ψ is Λ^n with cyclic monodromy and Φ is Λ^(n-1)", _wrap_cases, 6)
def nearby_stalks(case: WrapCase) -> List[CaseResult]:
    model, field, F, levels = _wrap(case)
    nearby = stabilized(tame_nearby_cycles(model, F, levels), ORIGIN, model.degree)
    vanishing = stabilized(tame_vanishing(model, F, levels), ORIGIN, model.degree)
    oracle = _component_oracle(model, ORIGIN, nearby.pair[1])
    monodromy = nearby.monodromy.get(0)
    order = matrix_order(field, monodromy, nearby.pair[1]) if monodromy is not None else 0
    psi = nearby.table == {0: case.n} and oracle == case.n and order == case.n
    phi = vanishing.table == ({0: case.n - 1} if case.n > 1 else {})
    details = {"pair": list(nearby.pair), "oracle": oracle, "order": order}
    return [
        CaseResult(
            f"Ψ n={case.n} ell={case.ell}",
            verdict(psi),
            dict(details, table=table_document(nearby.table)),
            None if psi else _case_document(case),
        ),
        CaseResult(
            f"Φ n={case.n} ell={case.ell}",
            verdict(phi),
            {"table": table_document(vanishing.table)},
            None if phi else _case_document(case),
        ),
    ]


@suite("fixed-points", "μ∞-invariants of Ψ are i* Rj_* j*", _wrap_cases, 6)
def fixed_points(case: WrapCase) -> List[CaseResult]:
    model, field, F, levels = _wrap(case)
    report = fixed_points_identity(model, F, levels)
    return [
        CaseResult(
            f"fixed points n={case.n} ell={case.ell}",
            verdict(report.holds),
            {"level_one": report.level_one, "tower": report.tower, "failures": report.failures},
            None if report.holds else _case_document(case),
        )
    ]


@suite("ayoub-forget", "forgetting the action of Ψ gives the cover pushforward", _wrap_cases, 6)
def ayoub_forget(case: WrapCase) -> List[CaseResult]:
    model, field, F, levels = _wrap(case)
    result = ayoub_nearby(model, F, levels)
    return [
        CaseResult(
            f"ayoub n={case.n} ell={case.ell}",
            verdict(result.agrees),
            {"pair": list(result.pair), "tables": tables_document(result.tables)},
            None if result.agrees else _case_document(case),
        )
    ]


@suite("monodromy-invariant", "invariants of Φ are the monodromy invariant vanishing cycles", _wrap_cases, 6)
def monodromy_invariant(case: WrapCase) -> List[CaseResult]:
    model, field, F, levels = _wrap(case)
    result = compare_mi_vs_fixed(model, field, levels)
    outcome: Verdict = result.verdict
    if math.gcd(case.n, case.ell) == 1 and outcome != "PASS":
        outcome = "FAIL"
    return [
        CaseResult(
            f"Φ^mi n={case.n} ell={case.ell}",
            outcome,
            {
                "tame": result.tame,
                "window": list(result.window),
                "invariants": tables_document(result.invariants),
                "monodromy_invariant": tables_document(result.monodromy_invariant),
            },
            None if outcome != "FAIL" else _case_document(case),
        )
    ]


def _kunneth_cases(seed: int, count: int) -> List[Tuple[int, int]]:
    return [(1, 1), (1, 2), (2, 2)][:count]


@suite("kunneth", "the Künneth morphism exists; identity factors give an equivalence", _kunneth_cases, 3)
def kunneth(case: Tuple[int, int]) -> List[CaseResult]:
    field = PrimeField(3)
    models = [identity_model(DISK) if n == 1 else wrap_model(DISK, n) for n in case]
    levels = divisors(lcm(*case) * field.ell)
    X, Y = models
    report = kunneth_morphism(X, unit_sheaf(X.total, field), Y, unit_sheaf(Y.total, field), levels)
    outcome: Verdict = verdict(report.stabilized) if case == (1, 1) else "RECORDED"
    return [
        CaseResult(
            f"künneth {case[0]} x {case[1]}",
            outcome,
            {"stabilized": report.stabilized, "levelwise": {str(n): ok for n, ok in sorted(report.levelwise.items())}},
        )
    ]


# ################################################################
# correspondences
# ################################################################


def _minimal_paths(n: int) -> bool:
    points = [(i, j) for i in range(n + 1) for j in range(n + 1)]
    return all(
        check_minimal_path(chain)
        for x in points
        for y in points
        if grid_leq(x, y)
        for chain in grid_chains(n, x, y)
    )


def _appendix_cases(seed: int, count: int) -> List[str]:
    return ["nerve", "minimal-paths", "constant", "pseudodisk", "negative"][:count]


@suite("corr-appendix", "correspondence diagrams assemble into a simplicial map", _appendix_cases, 5)
def corr_appendix(case: str) -> List[CaseResult]:
    if case == "nerve":
        N = nerve(pseudocircle(2), 3)
        failures = N.check_identities()
        holds = not failures and N.euler_characteristic() == 0
        details = {"failures": failures[:10], "euler": N.euler_characteristic()}
        return [CaseResult("nerve of S_2", verdict(holds), details)]
    if case == "minimal-paths":
        return [CaseResult(f"minimal paths on [{n}]x[{n}]^op", verdict(_minimal_paths(n)), {}) for n in range(4)]
    if case == "constant":
        report = assemble_d(constant_tower(pseudocircle(2), ["s0"], [1, 2]), 2)
        details = {"simplices": report.simplices, "failures": report.failures[:10]}
        return [CaseResult("constant tower", verdict(report.holds), details)]
    if case == "pseudodisk":
        report = assemble_d(pseudodisk_tower(DISK, [1, 2, 4]), 3)
        details = {"simplices": report.simplices, "failures": report.failures[:10]}
        return [CaseResult("pseudodisk tower {1,2,4}", verdict(report.holds), details)]
    report = assemble_d(doubled_closed_level(pseudodisk_tower(DISK, [1, 2]), 2), 2)
    caught = not report.holds and any("pullback" in f for f in report.failures)
    return [CaseResult("doubled closed level is caught", verdict(caught), {"failures": len(report.failures)})]


# ################################################################
# running
# ################################################################


def _guarded(
    check: Callable[[Any], List[CaseResult]], name: str, seed: int
) -> Callable[[Tuple[int, Any]], List[CaseResult]]:
    def run(indexed: Tuple[int, Any]) -> List[CaseResult]:
        index, case = indexed
        try:
            return check(case)
        except EngineError as exc:
            logger.warning("%s case %d raised %s", name, index, exc.message)
            return [
                CaseResult(
                    f"{name} #{index}",
                    "FAIL",
                    {"error": type(exc).__name__, "message": exc.message},
                    {"suite": name, "seed": seed, "index": index, "case": repr(case)},
                )
            ]

    return run


def run_suite(
    name: str, seed: int = DEFAULT_SEED, cases: Optional[int] = None, workers: Optional[int] = None
) -> Report:
    if name not in SUITES:
        raise UnknownSuite(name, suite_names())
    chosen = SUITES[name]
    count = chosen.default_cases if cases is None else cases
    report = Report(f"verify {name}", {"suite": name, "seed": seed, "cases": count})
    with report.timed(name):
        generated = chosen.cases(seed, count)
        results = run_cases(_guarded(chosen.check, name, seed), list(enumerate(generated)), workers)
    for batch in results:
        for result in batch:
            extra = {} if result.counterexample is None else {"counterexample": result.counterexample}
            report.add(result.name, result.verdict, **result.details, **extra)
    logger.info("suite %s: %s", name, report.counts())
    return report
