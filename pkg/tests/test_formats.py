import json

import numpy as np
import pytest

from tamecycles.exceptions import MalformedModel, NotAPartialOrder
from tamecycles.formats import (
    canonical_json,
    complex_document,
    load_model,
    model_document,
    parse_model,
    poset_document,
)
from tamecycles.complexes import CochainComplex
from tamecycles.linalg import PrimeField
from tamecycles.posets import pseudodisk, random_poset
from tamecycles.sheaves import random_sheaf

F3 = PrimeField(3)


def test_wrap_preset():
    loaded = parse_model({"ell": 3, "preset": {"kind": "wrap", "k": 2, "n": 3}})
    assert loaded.field == F3
    assert loaded.model is not None and loaded.model.degree == 3
    assert len(loaded.space) == 13
    assert loaded.sheaf.stalk_table("0") == {0: 1}
    assert loaded.levels is None
    assert loaded.datum is None


@pytest.mark.parametrize("kind", ["pseudocircle", "pseudodisk"])
def test_space_presets_have_no_model(kind):
    assert parse_model({"ell": 2, "preset": {"kind": kind, "k": 2}}).model is None


@pytest.mark.parametrize(
    "document",
    [
        [],
        {},
        {"ell": 4, "preset": {"kind": "identity", "k": 2}},
        {"ell": True, "preset": {"kind": "identity", "k": 2}},
        {"ell": 3, "preset": {"kind": "annulus", "k": 2}},
        {"ell": 3, "preset": {"kind": "identity", "k": 1}},
        {"ell": 3, "preset": {"kind": "identity", "k": 2}, "levels": [0, 1]},
        {"ell": 3, "space": {"elements": ["a", 1], "covers": []}},
        {"ell": 3, "space": {"elements": ["a", "b"], "covers": [["a"]]}},
        {"ell": 3, "preset": {"kind": "identity", "k": 2}, "map": {"k": 2, "values": {}}},
    ],
)
def test_malformed_documents(document):
    with pytest.raises(MalformedModel):
        parse_model(document)


def test_explicit_space_and_map():
    D = pseudodisk(2)
    document = {
        "ell": 3,
        "space": poset_document(D),
        "map": {"k": 2, "values": {x: x for x in D}},
        "levels": [3, 1, 3],
    }
    loaded = parse_model(document)
    assert loaded.space == D
    assert loaded.model is not None and loaded.model.degree == 1
    assert loaded.levels == (1, 3)
    del document["map"]["values"]["s3"]
    with pytest.raises(MalformedModel):
        parse_model(document)


def test_order_errors_surface_as_engine_errors():
    document = {"ell": 3, "space": {"elements": ["a", "b"], "covers": [["a", "b"], ["b", "a"]]}}
    with pytest.raises(NotAPartialOrder):
        parse_model(document)


def test_sheaf_documents_rebuild_the_sheaf():
    rng = np.random.default_rng(7)
    P = random_poset(rng, 4)
    F = random_sheaf(F3, P, rng)
    loaded = parse_model(json.loads(json.dumps(model_document(F3, P, F, levels=[1, 2]))))
    assert loaded.space == P
    assert loaded.sheaf.stalk_tables() == F.stalk_tables()
    for x, y in P.covers:
        assert loaded.sheaf.restriction(x, y) == F.restriction(x, y)
    assert loaded.levels == (1, 2)


def test_sheaf_needs_every_stalk():
    D = pseudodisk(2)
    document = {"ell": 3, "space": poset_document(D), "sheaf": {"stalks": {"0": {"lo": 0, "dims": [1]}}}}
    with pytest.raises(MalformedModel):
        parse_model(document)


def test_bad_differential_shape():
    document = {
        "ell": 3,
        "preset": {"kind": "pseudocircle", "k": 2},
        "chern": {
            "source": {"lo": 0, "dims": [1, 1], "differentials": [[[1, 0]]]},
            "target": {"lo": 0, "dims": [1]},
        },
    }
    with pytest.raises(MalformedModel):
        parse_model(document)


def test_chern_datum():
    document = {
        "ell": 3,
        "preset": {"kind": "identity", "k": 2},
        "chern": {
            "source": {"lo": 2, "dims": [1], "twist": -1},
            "target": {"lo": 2, "dims": [1]},
            "components": {"2": [[1]]},
        },
    }
    datum = parse_model(document).datum
    assert datum is not None
    assert datum.source.twist == -1
    assert datum.c.induced_rank(2) == 1


def test_complex_documents():
    C = CochainComplex(F3, -1, [1, 1], [F3.matrix([[1]])], twist=2)
    assert complex_document(C) == {"lo": -1, "dims": [1, 1], "differentials": [[[1]]], "twist": 2}
    assert complex_document(CochainComplex(F3, 0, [2])) == {"lo": 0, "dims": [2]}


def test_load_model(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps({"ell": 5, "preset": {"kind": "point", "k": 2}}))
    loaded = load_model(path)
    assert loaded.field.ell == 5
    assert len(loaded.model.open) == 0
    path.write_text("{not json")
    with pytest.raises(MalformedModel):
        load_model(path)


def test_canonical_json():
    assert canonical_json({"b": 1, "a": [1, "é"]}) == '{"a":[1,"é"],"b":1}'
