import contextlib
import hashlib
import json
import time
from typing import Any, Dict, Iterator, List, Mapping

from .formats import canonical_json
from .linalg import Matrix
from .typing import CheckRecord, CohomologyTable, Element, JSONValue, Verdict
from .utils import sort_key

__all__ = ["Report", "digest", "verdict", "table_document", "tables_document", "matrix_document"]


def digest(document: JSONValue) -> str:
    """
    sha256 of the canonical JSON text of `document`.
    """
    return hashlib.sha256(canonical_json(document).encode("utf-8")).hexdigest()


def verdict(holds: bool) -> Verdict:
    return "PASS" if holds else "FAIL"


def table_document(table: CohomologyTable) -> Dict[str, int]:
    return {str(k): int(v) for k, v in sorted(table.items()) if v}


def tables_document(tables: Mapping[Element, CohomologyTable]) -> Dict[str, Dict[str, int]]:
    return {
        (x if isinstance(x, str) else repr(x)): table_document(t)
        for x, t in sorted(tables.items(), key=lambda item: sort_key(item[0]))
    }


def matrix_document(m: Matrix) -> List[List[int]]:
    return [[int(v) for v in row] for row in m.tolist()]


class Report:
    """
    The outcome of one command. Identical inputs give byte-identical text
    unless timings are requested.

    ```python
    report = Report("cohomology", document)
    report.add("global sections", "PASS", table={"0": 1})
    print(report.dumps())
    ```
    """

    def __init__(self, command: str, inputs: JSONValue) -> None:
        self.command = command
        self.inputs = digest(inputs)
        self.checks: List[CheckRecord] = []
        self.timings: Dict[str, float] = {}

    def __repr__(self) -> str:
        return f"<Report {self.command} with {len(self.checks)} checks>"

    def add(self, name: str, outcome: Verdict, **details: Any) -> CheckRecord:
        record: CheckRecord = {"name": name, "verdict": outcome, "details": details}
        self.checks.append(record)
        return record

    @contextlib.contextmanager
    def timed(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(time.perf_counter() - start, 6)

    @property
    def failed(self) -> bool:
        return any(check["verdict"] == "FAIL" for check in self.checks)

    def counts(self) -> Dict[str, int]:
        counts = {"PASS": 0, "FAIL": 0, "RECORDED": 0}
        for check in self.checks:
            counts[check["verdict"]] += 1
        return counts

    def document(self, timing: bool = False) -> Dict[str, Any]:
        document: Dict[str, Any] = {
            "command": self.command,
            "inputs": self.inputs,
            "summary": self.counts(),
            "checks": self.checks,
        }
        if timing:
            document["timing"] = self.timings
        return document

    def dumps(self, timing: bool = False) -> str:
        return json.dumps(self.document(timing), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def exit_code(self) -> int:
        return 1 if self.failed else 0
