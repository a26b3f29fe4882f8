import sys
from typing import Any, Dict, Hashable, List, Tuple, Union

if sys.version_info[:2] < (3, 8):
    from typing_extensions import (
        Final,
        Literal,
        Protocol,
        TypedDict,
        final,
        runtime_checkable,
    )
else:
    from typing import Final, Literal, Protocol, TypedDict, final, runtime_checkable

__all__ = [
    "Element",
    "Chain",
    "Degree",
    "Verdict",
    "CohomologyTable",
    "JSONValue",
    "MatrixRows",
    "CheckRecord",
    # built-in types
    "TypedDict",
    "Literal",
    "Final",
    "final",
    "Protocol",
    "runtime_checkable",
]

# Points of a finite poset
Element = Hashable

# Strictly increasing sequence of poset elements
Chain = Tuple[Element, ...]

Degree = int

Verdict = Literal["PASS", "FAIL", "RECORDED"]

# degree -> dimension
CohomologyTable = Dict[int, int]

MatrixRows = List[List[int]]

JSONValue = Union[None, bool, int, str, List[Any], Dict[str, Any]]

CheckRecord = TypedDict(
    "CheckRecord",
    {"name": str, "verdict": str, "details": Dict[str, Any]},
    total=False,
)
