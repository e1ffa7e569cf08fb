"""
End-to-end tests of the mcgroupoid command line through JSON documents.
"""
import json
from fractions import Fraction

import pytest

from app.main import run
from app.models import AlgebraDocument, SimplexDocument
from app.services.forms import PolyForm
from app.services.mc import MCSimplex, integrate_edge, stub_of
from app.services.slie import Element
from conftest import gauge_algebra, vec

QUADRATIC = {
    "schema_version": 1,
    "name": "quadratic",
    "truncation": 2,
    "max_arity": 2,
    "basis": [{"name": "x", "degree": 0, "weight": 1}, {"name": "y", "degree": 1, "weight": 2}],
    "brackets": [{"inputs": ["x", "x"], "output": [{"coef": "1", "basis": "y"}]}],
}

GAUGE_BASIS = [
    {"name": "e", "degree": -1, "weight": 1},
    {"name": "x", "degree": 0, "weight": 1},
    {"name": "z", "degree": 0, "weight": 2},
    {"name": "y", "degree": 1, "weight": 2},
]

GAUGE = {
    "schema_version": 1,
    "name": "gauge",
    "truncation": 2,
    "max_arity": 2,
    "basis": GAUGE_BASIS,
    "differential": {"e": [{"coef": "1", "basis": "x"}], "z": [{"coef": "1", "basis": "y"}]},
    "brackets": [
        {"inputs": ["x", "x"], "output": [{"coef": "2", "basis": "y"}]},
        {"inputs": ["e", "x"], "output": [{"coef": "-2", "basis": "z"}]},
    ],
}

GAUGE_PLUS = {
    **GAUGE,
    "name": "gauge_plus",
    "basis": GAUGE_BASIS + [{"name": "v", "degree": -1, "weight": 2}, {"name": "w", "degree": 0, "weight": 2}],
    "differential": {**GAUGE["differential"], "v": [{"coef": "1", "basis": "w"}]},
}

QUADRATIC_MORPHISM = {
    "schema_version": 1,
    "name": "U",
    "source": "gauge",
    "target": "gauge_plus",
    "max_arity": 2,
    "taylor": [{"inputs": [n], "output": [{"coef": "1", "basis": n}]} for n in ("e", "x", "z", "y")] + [
        {"inputs": ["x", "x"], "output": [{"coef": "1", "basis": "w"}]},
        {"inputs": ["e", "x"], "output": [{"coef": "1", "basis": "v"}]},
    ],
}


def line_document(name):
    return {"schema_version": 1, "name": name, "truncation": 1, "max_arity": 0,
            "basis": [{"name": "u", "degree": 0, "weight": 1}]}


ZERO_MAP = {"schema_version": 1, "name": "zero", "source": "line", "target": "line2", "max_arity": 1, "taylor": []}


def inline(**coefficients):
    return json.dumps({"terms": [{"coef": str(c), "basis": b} for b, c in coefficients.items()]})


@pytest.fixture
def write(tmp_path):
    def _write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture
def invoke(tmp_path):
    """Run the command line and return (exit status, emitted document)."""
    counter = {"n": 0}

    def _invoke(*argv):
        counter["n"] += 1
        out = tmp_path / f"out{counter['n']}.json"
        status = run(list(argv) + ["--output", str(out)])
        return status, json.loads(out.read_text(encoding="utf-8"))
    return _invoke


class TestAlgebraCommands:
    def test_validate_passes(self, write, invoke):
        status, doc = invoke("validate", "--input", write("gauge.json", GAUGE))
        assert status == 0
        assert doc["status"] == "pass"
        assert doc["reports"][0]["check"] == "slie"

    def test_validate_morphism_with_qiso(self, write, invoke):
        paths = [write("g.json", GAUGE), write("gp.json", GAUGE_PLUS), write("u.json", QUADRATIC_MORPHISM)]
        argv = ["validate", "--qiso"]
        for p in paths:
            argv += ["--input", p]
        status, doc = invoke(*argv)
        assert status == 0
        assert [r["check"] for r in doc["reports"]] == ["slie", "slie", "morphism", "qiso"]

    def test_validate_reports_failure(self, write, invoke):
        broken = {**QUADRATIC, "name": "broken", "differential": {"x": [{"coef": "1", "basis": "x"}]}}
        status, doc = invoke("validate", "--input", write("broken.json", broken))
        assert status == 1
        assert doc["status"] == "fail"
        assert doc["reports"][0]["violations"][0]["rule"] == "differential-degree"

    def test_curv(self, write, invoke):
        status, doc = invoke("curv", "--input", write("q.json", QUADRATIC), "--element", inline(x=1))
        assert status == 0
        assert doc["elements"]["curvature"]["terms"] == [{"coef": "1/2", "basis": "y"}]
        assert doc["numbers"]["is_mc"] == 0

    def test_twist(self, write, invoke):
        status, doc = invoke("twist", "--input", write("g.json", GAUGE), "--element", inline(x=1, z=-1),
                             "--name", "gauge_twisted")
        assert status == 0
        algebra = doc["algebra"]
        assert algebra["name"] == "gauge_twisted"
        assert algebra["differential"]["x"] == [{"coef": "2", "basis": "y"}]

    def test_twist_by_non_mc(self, write, invoke):
        status, doc = invoke("twist", "--input", write("g.json", GAUGE), "--element", inline(x=1))
        assert status == 1
        assert doc["error"] == "PreconditionError"
        assert doc["residual"] == [{"coef": "1", "basis": "y"}]

    def test_pushforward(self, write, invoke):
        paths = [write("g.json", GAUGE), write("gp.json", GAUGE_PLUS), write("u.json", QUADRATIC_MORPHISM)]
        status, doc = invoke("pushforward", "--input", paths[0], "--input", paths[1], "--input", paths[2],
                             "--element", inline(x=1, z=-1))
        assert status == 0
        assert doc["elements"]["pushforward"]["terms"] == [
            {"coef": "1/2", "basis": "w"}, {"coef": "1", "basis": "x"}, {"coef": "-1", "basis": "z"}]

    def test_shift_to_ordinary(self, write, invoke):
        status, doc = invoke("shift", "--input", write("q.json", QUADRATIC), "--to", "ordinary")
        assert status == 0
        algebra = doc["algebra"]
        assert algebra["convention"] == "ordinary"
        assert [b["degree"] for b in algebra["basis"]] == [1, 2]


class TestGroupoidCommands:
    def test_rectify(self, write, invoke):
        gauge = Element.tensor({"e": Fraction(1)}, PolyForm.coordinate(1, 0))
        edge = integrate_edge(gauge_algebra(), Element(), gauge)
        status, doc = invoke("rectify", "--input", write("g.json", GAUGE),
                             "--input", write("edge.json", SimplexDocument.from_simplex(edge).model_dump()))
        assert status == 0
        rectified = doc["simplices"]["edge"]
        assert rectified["certified"] is True
        assert {"coef": "1/2", "basis": "e", "t": [0], "dt": [1]} in rectified["terms"]

    def test_compose(self, write, invoke):
        algebra = gauge_algebra()
        left = integrate_edge(algebra, Element(), vec(e=1))
        right = integrate_edge(algebra, vec(x=1, z=-1), vec(e=1))
        status, doc = invoke("compose", "--input", write("g.json", GAUGE),
                             "--input", write("left.json", SimplexDocument.from_simplex(left).model_dump()),
                             "--input", write("right.json", SimplexDocument.from_simplex(right).model_dump()))
        assert status == 0
        assert doc["simplices"]["triangle"]["dim"] == 2
        assert doc["simplices"]["composite"]["dim"] == 1

    def test_reconstruct_from_zero_stub(self, write, invoke):
        stub = {"schema_version": 1, "algebra": "gauge", "dim": 1, "terms": []}
        status, doc = invoke("reconstruct", "--input", write("g.json", GAUGE), "--input", write("s.json", stub),
                             "--element", inline(x=1, z=-1), "--vertex", "1")
        assert status == 0
        terms = doc["simplices"]["simplex"]["terms"]
        assert terms == [{"coef": "1", "basis": "x", "t": [0], "dt": []},
                         {"coef": "-1", "basis": "z", "t": [0], "dt": []}]

    def test_reconstruct_from_edge_stub(self, write, invoke):
        algebra = gauge_algebra()
        edge = integrate_edge(algebra, Element(), vec(e=1))
        stub = SimplexDocument.from_simplex(MCSimplex(algebra, stub_of(edge, 1).nu))
        status, doc = invoke("reconstruct", "--input", write("g.json", GAUGE),
                             "--input", write("s.json", stub.model_dump()), "--element", inline(), "--vertex", "1")
        assert status == 0
        rebuilt = doc["simplices"]["simplex"]
        assert rebuilt["certified"] is True
        assert rebuilt["terms"] == SimplexDocument.from_simplex(edge).model_dump()["terms"]

    def test_reconstruct_rejects_a_non_stub(self, write, invoke):
        not_a_stub = {"schema_version": 1, "algebra": "gauge", "dim": 1,
                      "terms": [{"coef": "1", "basis": "x", "t": [1], "dt": []}]}
        status, doc = invoke("reconstruct", "--input", write("g.json", GAUGE),
                             "--input", write("s.json", not_a_stub), "--element", inline(), "--vertex", "1")
        assert status == 1
        assert doc["error"] == "PreconditionError"

    def test_concatenate(self, write, invoke):
        algebra = AlgebraDocument(**GAUGE_PLUS).to_algebra()
        first = integrate_edge(algebra, Element(), vec(e=1))
        second = integrate_edge(algebra, vec(x=1, z=-1), vec(v=1))
        status, doc = invoke("concatenate", "--input", write("gp.json", GAUGE_PLUS),
                             "--input", write("first.json", SimplexDocument.from_simplex(first).model_dump()),
                             "--input", write("second.json", SimplexDocument.from_simplex(second).model_dump()))
        assert status == 0
        assert doc["numbers"]["edges"] == 2
        joined = SimplexDocument(**doc["simplices"]["edge"]).to_simplex(algebra)
        assert joined.start == Element()
        assert joined.end == vec(x=1, z=-1, w=1)

    def test_concatenate_rejects_low_weight(self, write, invoke):
        algebra = gauge_algebra()
        first = integrate_edge(algebra, Element(), vec(e=1))
        second = integrate_edge(algebra, vec(x=1, z=-1), vec(e=1))
        status, doc = invoke("concatenate", "--input", write("g.json", GAUGE),
                             "--input", write("first.json", SimplexDocument.from_simplex(first).model_dump()),
                             "--input", write("second.json", SimplexDocument.from_simplex(second).model_dump()))
        assert status == 1
        assert doc["error"] == "PreconditionError"


class TestTransferCommands:
    @pytest.fixture
    def transfer_inputs(self, write):
        paths = [write("g.json", GAUGE), write("gp.json", GAUGE_PLUS), write("u.json", QUADRATIC_MORPHISM)]
        argv = []
        for p in paths:
            argv += ["--input", p]
        return argv

    def test_preimage_and_verify(self, write, invoke, transfer_inputs):
        status, doc = invoke("preimage", *transfer_inputs, "--element", inline(x=1, z=-1))
        assert status == 0
        certificate = doc["certificate"]
        assert certificate["kind"] == "preimage"
        assert certificate["result"]["alpha"] == [{"coef": "1", "basis": "x"}, {"coef": "-1", "basis": "z"}]

        status, report = invoke("verify", *transfer_inputs, "--input", write("cert.json", certificate))
        assert status == 0
        assert report["reports"][0]["check"] == "certificate"
        assert report["reports"][0]["status"] == "pass"

    def test_tampered_certificate(self, write, invoke, transfer_inputs):
        _, doc = invoke("preimage", *transfer_inputs, "--element", inline(x=1, z=-1))
        certificate = doc["certificate"]
        certificate["result"]["alpha"] = [{"coef": "1", "basis": "x"}]
        status, report = invoke("verify", *transfer_inputs, "--input", write("cert.json", certificate))
        assert status == 1
        assert report["status"] == "fail"

    def test_transfer_connect(self, write, invoke, transfer_inputs):
        edge = _gauge_plus_edge()
        status, doc = invoke("transfer-connect", *transfer_inputs,
                             "--input", write("edge.json", SimplexDocument.from_simplex(edge).model_dump()),
                             "--element2", inline(x=1, z=-1))
        assert status == 0
        assert doc["certificate"]["kind"] == "connect"

    def test_preimage_along_non_qiso(self, write, invoke):
        status, doc = invoke("preimage", "--input", write("l.json", line_document("line")),
                             "--input", write("l2.json", line_document("line2")),
                             "--input", write("z.json", ZERO_MAP), "--element", inline(u=1))
        assert status == 1
        assert doc["status"] == "fail"
        assert doc["error"] == "HypothesisRefuted"
        assert (doc["weight"], doc["degree"]) == (1, 0)


class TestHomotopyCommands:
    def test_pi_abelian(self, write, invoke):
        status, doc = invoke("pi-abelian", "--input", write("l.json", line_document("line")), "--cross-check")
        assert status == 0
        assert doc["numbers"] == {"degree": 0, "dimension": 1, "moore_dimension": 1}

    def test_pi_abelian_rejects_brackets(self, write, invoke):
        status, doc = invoke("pi-abelian", "--input", write("q.json", QUADRATIC))
        assert status == 2
        assert doc["status"] == "error"

    def test_moore_homology_of_constant_space(self, invoke):
        status, doc = invoke("moore-homology", "--constant", "2", "--degree", "0")
        assert status == 0
        assert doc["numbers"]["dimension"] == 2
        assert doc["numbers"]["levels"] == 2
        assert doc["vectors"]["basis"] == [["1", "0"], ["0", "1"]]


class TestErrors:
    def test_bad_json(self, tmp_path, invoke):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        status, doc = invoke("validate", "--input", str(path))
        assert status == 2
        assert doc["error"] == "InputError"

    def test_input_not_utf8(self, tmp_path, invoke):
        path = tmp_path / "latin.json"
        path.write_bytes(b'{"basis": "\xff\xfe"}')
        status, doc = invoke("validate", "--input", str(path))
        assert status == 2
        assert doc["status"] == "error"
        assert doc["error"] == "InputError"

    def test_bad_rational(self, write, invoke):
        status, doc = invoke("curv", "--input", write("q.json", QUADRATIC),
                             "--element", json.dumps({"terms": [{"coef": "1/0", "basis": "x"}]}))
        assert status == 2

    def test_unknown_basis_name(self, write, invoke):
        status, _ = invoke("curv", "--input", write("q.json", QUADRATIC), "--element", inline(q=1))
        assert status == 2

    def test_wrong_schema_version(self, write, invoke):
        status, _ = invoke("validate", "--input", write("q.json", {**QUADRATIC, "schema_version": 99}))
        assert status == 2

    def test_unknown_subcommand(self):
        assert run(["frobnicate"]) == 2

    def test_nothing_to_validate(self, invoke):
        status, _ = invoke("validate")
        assert status == 2


def test_output_is_deterministic(write, tmp_path):
    path = write("g.json", GAUGE)
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["twist", "--input", path, "--element", inline(x=1, z=-1), "--output", str(first)]) == 0
    assert run(["twist", "--input", path, "--element", inline(x=1, z=-1), "--output", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def _gauge_plus_edge():
    """0 → x - z + ½w in gauge_plus along e + ½v."""
    algebra = AlgebraDocument(**GAUGE_PLUS).to_algebra()
    return integrate_edge(algebra, Element(), vec(e=1, v=Fraction(1, 2)))
