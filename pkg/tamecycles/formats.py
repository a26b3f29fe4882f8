"""
JSON model files.

```json
{
  "ell": 3,
  "residue_characteristic": 0,
  "space": {"elements": ["0", "s0", "s1", "s2", "s3"], "covers": [["0", "s0"], ...]},
  "map": {"k": 2, "values": {"0": "0", "s0": "s0", ...}},
  "sheaf": {
    "stalks": {"0": {"lo": 0, "dims": [1]}, ...},
    "restrictions": [{"from": "0", "to": "s0", "components": {"0": [[1]]}}, ...]
  },
  "levels": [1, 2, 3, 6],
  "chern": {"source": {...}, "target": {...}, "components": {"2": [[0]]}}
}
```

``space`` may be replaced by ``"preset": {"kind": "wrap", "k": 2, "n": 3}``
(kinds ``identity``, ``wrap``, ``point``, ``pseudocircle``, ``pseudodisk``).
Matrices are row-major; elements are referenced by name. Every invariant of
the objects built is re-checked on load.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from .complexes import ChainMap, CochainComplex
from .equivariant import ChernDatum
from .exceptions import EngineError, MalformedModel, NotPrime
from .linalg import PrimeField
from .nearby import GmModel, identity_model, point_model, wrap_model
from .posets import FinitePoset, MonotoneMap, pseudocircle, pseudodisk
from .sheaves import SheafComplex, unit_sheaf
from .typing import Element, JSONValue, MatrixRows
from .utils import sort_key

logger = logging.getLogger(__name__)

__all__ = [
    "ModelFile",
    "load_model",
    "parse_model",
    "canonical_json",
    "complex_document",
    "poset_document",
    "sheaf_document",
    "chain_map_document",
    "model_document",
]

PRESETS = ("identity", "wrap", "point", "pseudocircle", "pseudodisk")


class ModelFile(NamedTuple):
    field: PrimeField
    residue_characteristic: int
    space: FinitePoset
    # None when the file carries no structure map
    model: Optional[GmModel]
    # the constant sheaf when the file carries none
    sheaf: SheafComplex
    levels: Optional[Tuple[int, ...]]
    datum: Optional[ChernDatum]
    document: Dict[str, Any]


def _get(data: Mapping[str, Any], key: str, kind: Union[type, Tuple[type, ...]], path: str) -> Any:
    if key not in data:
        raise MalformedModel(f"Missing key {key!r}", path)
    value = data[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is int:
        raise MalformedModel(f"Key {key!r} has the wrong type", f"{path}.{key}")
    return value


def _matrix(field: PrimeField, rows: Any, shape: Tuple[int, int], path: str) -> Any:
    if not isinstance(rows, list) or any(not isinstance(row, list) for row in rows):
        raise MalformedModel("A matrix is a list of rows", path)
    try:
        return field.matrix(rows, shape)
    except (ValueError, EngineError) as exc:
        raise MalformedModel(f"Bad matrix: {exc}", path) from exc


def _complex(field: PrimeField, data: Any, path: str) -> CochainComplex:
    if not isinstance(data, dict):
        raise MalformedModel("A complex is an object", path)
    lo = _get(data, "lo", int, path)
    dims = _get(data, "dims", list, path)
    if any(not isinstance(d, int) or d < 0 for d in dims):
        raise MalformedModel("Dimensions are non-negative integers", f"{path}.dims")
    differentials = None
    if "differentials" in data:
        rows = _get(data, "differentials", list, path)
        if len(rows) != max(len(dims) - 1, 0):
            raise MalformedModel("One differential per adjacent pair of degrees", f"{path}.differentials")
        differentials = [
            _matrix(field, m, (dims[i + 1], dims[i]), f"{path}.differentials[{i}]") for i, m in enumerate(rows)
        ]
    twist = data.get("twist", 0)
    return CochainComplex(field, lo, dims, differentials, twist=twist)


def _components(field: PrimeField, source: CochainComplex, target: CochainComplex, data: Any, path: str) -> ChainMap:
    if not isinstance(data, dict):
        raise MalformedModel("Components are an object keyed by degree", path)
    maps = {}
    for key, rows in data.items():
        try:
            k = int(key)
        except ValueError:
            raise MalformedModel(f"Degree {key!r} is not an integer", path) from None
        maps[k] = _matrix(field, rows, (target.dim(k), source.dim(k)), f"{path}.{key}")
    return ChainMap(source, target, maps)


def _preset(data: Any, path: str) -> Tuple[FinitePoset, Optional[GmModel]]:
    kind = _get(data, "kind", str, path)
    if kind not in PRESETS:
        raise MalformedModel(f"Unknown preset {kind!r}; known: {', '.join(PRESETS)}", f"{path}.kind")
    k = _get(data, "k", int, path)
    if k < 2:
        raise MalformedModel("Pseudocircles need k >= 2", f"{path}.k")
    if kind == "pseudocircle":
        return pseudocircle(k), None
    if kind == "pseudodisk":
        return pseudodisk(k), None
    if kind == "identity":
        model = identity_model(k)
    elif kind == "point":
        model = point_model(k)
    else:
        model = wrap_model(k, _get(data, "n", int, path))
    return model.total, model


def _space(data: Any, path: str) -> FinitePoset:
    elements = _get(data, "elements", list, path)
    if any(not isinstance(x, str) for x in elements):
        raise MalformedModel("Elements are referenced by name", f"{path}.elements")
    covers = _get(data, "covers", list, path)
    relations = []
    for i, pair in enumerate(covers):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise MalformedModel("A relation is a pair of names", f"{path}.covers[{i}]")
        relations.append((pair[0], pair[1]))
    return FinitePoset(sorted(elements), relations, data.get("name", ""))


def _sheaf(field: PrimeField, base: FinitePoset, data: Any, path: str) -> SheafComplex:
    stalk_data = _get(data, "stalks", dict, path)
    stalks = {}
    for x in base:
        if x not in stalk_data:
            raise MalformedModel(f"Missing stalk at {x!r}", f"{path}.stalks")
        stalks[x] = _complex(field, stalk_data[x], f"{path}.stalks.{x}")
    restrictions = {}
    for i, entry in enumerate(data.get("restrictions", [])):
        where = f"{path}.restrictions[{i}]"
        x, y = _get(entry, "from", str, where), _get(entry, "to", str, where)
        if x not in base or y not in base:
            raise MalformedModel(f"Unknown element in {x!r} -> {y!r}", where)
        restrictions[(x, y)] = _components(
            field, stalks[x], stalks[y], entry.get("components", {}), f"{where}.components"
        )
    return SheafComplex(base, stalks, restrictions)


def parse_model(document: Dict[str, Any]) -> ModelFile:
    if not isinstance(document, dict):
        raise MalformedModel("A model file is a JSON object")
    ell = _get(document, "ell", int, "$")
    try:
        field = PrimeField(ell)
    except NotPrime as exc:
        raise MalformedModel(str(exc), "$.ell") from exc
    residue = document.get("residue_characteristic", 0)
    model: Optional[GmModel] = None
    if "preset" in document:
        space, model = _preset(document["preset"], "$.preset")
    else:
        space = _space(_get(document, "space", dict, "$"), "$.space")
    if "map" in document:
        if model is not None:
            raise MalformedModel("A preset already fixes the structure map", "$.map")
        mapping = _get(document, "map", dict, "$")
        disk = pseudodisk(_get(mapping, "k", int, "$.map"))
        values = _get(mapping, "values", dict, "$.map")
        missing = [x for x in space if x not in values]
        if missing:
            raise MalformedModel(f"No value for {missing[0]!r}", "$.map.values")
        model = GmModel(space, MonotoneMap(space, disk, values), document.get("name", ""))
    sheaf = _sheaf(field, space, document["sheaf"], "$.sheaf") if "sheaf" in document else unit_sheaf(space, field)
    levels = None
    if "levels" in document:
        raw = _get(document, "levels", list, "$")
        if any(not isinstance(n, int) or n < 1 for n in raw):
            raise MalformedModel("Levels are positive integers", "$.levels")
        levels = tuple(sorted(set(raw)))
    datum = None
    if "chern" in document:
        chern = _get(document, "chern", dict, "$")
        source = _complex(field, _get(chern, "source", dict, "$.chern"), "$.chern.source")
        target = _complex(field, _get(chern, "target", dict, "$.chern"), "$.chern.target")
        datum = ChernDatum(_components(field, source, target, chern.get("components", {}), "$.chern.components"))
    logger.debug("parsed model over %r with %d points", field, len(space))
    return ModelFile(field, residue, space, model, sheaf, levels, datum, document)


def load_model(path: Union[str, Path]) -> ModelFile:
    text = Path(path).read_text(encoding="utf-8")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedModel(f"Not JSON: {exc.msg}", f"$ (line {exc.lineno})") from exc
    return parse_model(document)


def canonical_json(value: JSONValue) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


# ################################################################
# writing
# ################################################################


def _name(x: Element) -> str:
    return x if isinstance(x, str) else repr(x)


def _rows(m: Any) -> MatrixRows:
    return [[int(v) for v in row] for row in m.tolist()]


def complex_document(C: CochainComplex) -> Dict[str, Any]:
    document: Dict[str, Any] = {"lo": C.lo, "dims": list(C.dims)}
    if any(d.size for d in C.diffs):
        document["differentials"] = [_rows(d) for d in C.diffs]
    if C.twist:
        document["twist"] = C.twist
    return document


def chain_map_document(f: ChainMap) -> Dict[str, Any]:
    return {str(k): _rows(m) for k, m in sorted(f.maps.items()) if m.size}


def poset_document(P: FinitePoset) -> Dict[str, Any]:
    elements = sorted(P.elements, key=sort_key)
    covers: List[List[str]] = sorted([_name(x), _name(y)] for x, y in P.covers)
    return {"elements": [_name(x) for x in elements], "covers": covers}


def sheaf_document(F: SheafComplex) -> Dict[str, Any]:
    """
    Enough to rebuild `F` with `parse_model`.
    """
    restrictions = [
        {"from": _name(x), "to": _name(y), "components": chain_map_document(F.restriction(x, y))}
        for x, y in sorted(F.base.covers, key=lambda pair: (sort_key(pair[0]), sort_key(pair[1])))
    ]
    return {
        "stalks": {_name(x): complex_document(F.stalk(x)) for x in F.base},
        "restrictions": restrictions,
    }


def model_document(
    field: PrimeField, P: FinitePoset, sheaf: Optional[SheafComplex] = None, levels: Sequence[int] = ()
) -> Dict[str, Any]:
    document: Dict[str, Any] = {"ell": field.ell, "space": poset_document(P)}
    if sheaf is not None:
        document["sheaf"] = sheaf_document(sheaf)
    if levels:
        document["levels"] = list(levels)
    return document
