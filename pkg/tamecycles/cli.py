"""
``tamecycles`` command line.

    tamecycles cohomology model.json
    tamecycles nearby model.json --levels 1,2,3,6
    tamecycles vanishing model.json
    tamecycles compare-mi model.json --window 0,4
    tamecycles verify localization --seed 0 --cases 100
    tamecycles verify --list

Reports go to standard output (or ``--out``), logs to standard error. The
exit code is 0 when no check fails, 1 when one does and 2 on bad input.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .__version__ import __version__
from .derived import global_sections
from .exceptions import EngineError, MalformedModel
from .formats import ModelFile, load_model
from .nearby import (
    GmModel,
    check_tower_localization,
    compare_mi_vs_fixed,
    fixed_points_identity,
    stabilized,
    tame_nearby_cycles,
    tame_vanishing,
)
from .reports import Report, matrix_document, table_document, tables_document, verdict
from .sheaves import unit_sheaf
from .suites import DEFAULT_SEED, SUITES, run_suite, suite_names
from .typing import Final
from .utils import divisors, sort_key

logger = logging.getLogger(__name__)

__all__ = ["main", "build_parser"]

DEFAULT_WINDOW: Final = (0, 4)


def _integers(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _window(text: str) -> Tuple[int, int]:
    values = _integers(text)
    if len(values) != 2 or values[0] > values[1]:
        raise argparse.ArgumentTypeError(f"expected a window 'a,b' with a <= b, got {text!r}")
    return values[0], values[1]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="write the report to this file")
    common.add_argument("--timing", action="store_true", help="include wall-clock durations")
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging level on standard error",
    )

    parser = argparse.ArgumentParser(
        prog="tamecycles", description="Exact nearby and vanishing cycles on finite spaces."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    cohomology = commands.add_parser("cohomology", parents=[common], help="global sections and stalks")
    cohomology.add_argument("file", type=Path)

    for name, text in (
        ("nearby", "tame nearby cycles and their monodromy"),
        ("vanishing", "tame vanishing cycles"),
        ("compare-mi", "invariants of vanishing cycles against the monodromy invariant ones"),
    ):
        command = commands.add_parser(name, parents=[common], help=text)
        command.add_argument("file", type=Path)
        command.add_argument("--levels", type=_integers, help="comma separated levels, containing 1")
        if name == "compare-mi":
            command.add_argument("--window", type=_window, default=DEFAULT_WINDOW, help="degree window 'a,b'")
        else:
            command.add_argument(
                "--sheaf",
                choices=["file", "constant"],
                default="file",
                help="use the sheaf of the file or the constant sheaf",
            )

    verify = commands.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("suite", nargs="?", help="suite name")
    verify.add_argument("--list", action="store_true", help="print the suite names")
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    verify.add_argument("--cases", type=int, help="number of cases (default per suite)")
    verify.add_argument("--workers", type=int, help="worker threads (default TAMECYCLES_MAX_WORKERS or 1)")
    return parser


# ################################################################
# commands
# ################################################################


def _model(loaded: ModelFile) -> GmModel:
    if loaded.model is None:
        raise MalformedModel("The file has no structure map", "$.map")
    return loaded.model


def _levels(loaded: ModelFile, model: GmModel, requested: Optional[List[int]]) -> List[int]:
    if requested is not None:
        return requested
    if loaded.levels is not None:
        return list(loaded.levels)
    return divisors(model.degree * loaded.field.ell)


def _name(x: Any) -> str:
    return x if isinstance(x, str) else repr(x)


def cohomology(args: argparse.Namespace) -> Report:
    loaded = load_model(args.file)
    report = Report("cohomology", loaded.document)
    with report.timed("cohomology"):
        table = global_sections(loaded.sheaf).cohomology_table()
        stalks = loaded.sheaf.stalk_tables()
    report.add("global sections", "RECORDED", table=table_document(table))
    report.add("stalks", "RECORDED", tables=tables_document(stalks))
    return report


def _stable_details(system: Any, x: Any, degree: int) -> Dict[str, Any]:
    stable = stabilized(system, x, degree)
    return {
        "point": _name(x),
        "pair": list(stable.pair),
        "pre_stable": stable.pre_stable,
        "table": table_document(stable.table),
        "monodromy": {str(k): matrix_document(m) for k, m in sorted(stable.monodromy.items())},
        "order": stable.order,
    }


def nearby(args: argparse.Namespace) -> Report:
    loaded = load_model(args.file)
    model = _model(loaded)
    F = loaded.sheaf if args.sheaf == "file" else unit_sheaf(model.total, loaded.field)
    levels = _levels(loaded, model, args.levels)
    report = Report("nearby", {"model": loaded.document, "levels": levels, "sheaf": args.sheaf})
    with report.timed("nearby"):
        system = tame_nearby_cycles(model, F, levels)
    for n in system.levels:
        report.add(f"level {n}", "RECORDED", tables=tables_document(system.obj(n).stalk_tables()))
    for x in sorted(model.closed, key=sort_key):
        report.add(f"stabilized at {_name(x)}", "RECORDED", **_stable_details(system, x, model.degree))
    with report.timed("fixed points"):
        fixed = fixed_points_identity(model, F, levels)
    report.add("fixed points identity", verdict(fixed.holds), failures=fixed.failures)
    return report


def vanishing(args: argparse.Namespace) -> Report:
    loaded = load_model(args.file)
    model = _model(loaded)
    F = loaded.sheaf if args.sheaf == "file" else unit_sheaf(model.total, loaded.field)
    levels = _levels(loaded, model, args.levels)
    report = Report("vanishing", {"model": loaded.document, "levels": levels, "sheaf": args.sheaf})
    with report.timed("vanishing"):
        system = tame_vanishing(model, F, levels)
    for n in system.levels:
        report.add(f"level {n}", "RECORDED", tables=tables_document(system.obj(n).stalk_tables()))
    for x in sorted(model.closed, key=sort_key):
        report.add(f"stabilized at {_name(x)}", "RECORDED", **_stable_details(system, x, model.degree))
    failing = check_tower_localization(model, F, levels)
    report.add("localization on every level", verdict(not failing), failing=failing)
    return report


def compare_mi(args: argparse.Namespace) -> Report:
    loaded = load_model(args.file)
    model = _model(loaded)
    levels = _levels(loaded, model, args.levels)
    report = Report("compare-mi", {"model": loaded.document, "levels": levels, "window": list(args.window)})
    with report.timed("compare-mi"):
        result = compare_mi_vs_fixed(model, loaded.field, levels, args.window)
    report.add(
        "invariants of Φ against Φ^mi",
        result.verdict,
        tame=result.tame,
        window=list(result.window),
        pre_stable=result.pre_stable,
        invariants=tables_document(result.invariants),
        monodromy_invariant=tables_document(result.monodromy_invariant),
    )
    return report


def verify(args: argparse.Namespace) -> Optional[Report]:
    if args.list:
        for name in suite_names():
            print(f"{name}\t{SUITES[name].description}")
        return None
    if args.suite is None:
        raise MalformedModel("Name a suite or pass --list", "suite")
    return run_suite(args.suite, args.seed, args.cases, args.workers)


COMMANDS: Final = {
    "cohomology": cohomology,
    "nearby": nearby,
    "vanishing": vanishing,
    "compare-mi": compare_mi,
    "verify": verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        report = COMMANDS[args.command](args)
    except EngineError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if report is None:
        return 0
    text = report.dumps(args.timing)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return report.exit_code()
