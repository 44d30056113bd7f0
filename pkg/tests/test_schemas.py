import random

import jsonschema
import pytest

from schema_check import SCHEMAS, validate
from syllog.decider import decide_sat
from syllog.formulas import parse
from syllog.generators import random_model_and_conjunction
from syllog.relativizer import build_d_star
from syllog.restriction import is_3lqsr
from syllog.semantics import Interpretation


@pytest.mark.parametrize("name", sorted(SCHEMAS))
def test_schema_well_formed(name):
    jsonschema.validators.validator_for(SCHEMAS[name]).check_schema(SCHEMAS[name])


def test_interpretation_doc():
    M = Interpretation.build(3, {"x": 1}, {"X": {0, 2}}, {"A": [set(), {1}]})
    validate("interpretation", M.to_json())
    assert Interpretation.from_json(M.to_json()) == M


@pytest.mark.parametrize("text", ["x in X & (forall Z)(Z in A -> Z in B)", "x in X & !(x in X)"])
def test_verdict_doc(text):
    validate("verdict", decide_sat(parse(text)).to_json())


def test_verdict_rejects_sat_without_witness():
    doc = decide_sat(parse("x in X")).to_json()
    doc["witness"] = None
    with pytest.raises(jsonschema.ValidationError):
        validate("verdict", doc)


def test_report_doc():
    f = parse("(forall Z)(Z in A <-> (forall z)(z in Z -> z in X)) & (forall Z)(Z in A <-> (forall z)(z in X -> z in Y))")
    doc = is_3lqsr(f).to_json()
    validate("report", doc)
    assert [e["verdict"] for e in doc["entries"]] == ["certified-by-schema", "violated"]


@pytest.mark.parametrize("seed", range(20))
def test_domain_witness_set_doc(seed):
    M, psi = random_model_and_conjunction(random.Random(seed))
    validate("domain_witness_set", build_d_star(M, psi).to_json())
