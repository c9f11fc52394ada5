import json

import pytest
from gmpy2 import mpq

from uqfoel.cli import main, read_matrix_json, read_triplet, write_matrix_json, write_triplet
from uqfoel.hamiltonian import ChainSpec, build_hamiltonian
from uqfoel.sparse import SparseOperator

SPIN_ONE = {"weights": [2, 2, 2], "couplings": [[0, -1], [0, -1]], "q": "1"}
VIOLATOR = {"weights": [2, 2], "couplings": [[0, 0, 1]], "q": "1"}
MIXTURE = {"L": 3, "n": 2, "rates": [1], "mixing": [{"type": "hypergeometric_mixture", "weights": ["1/3", "1/3", "1/3"]}]}
EXPLICIT = {"L": 3, "n": 2, "rates": [1], "mixing": [{"type": "explicit", "probs": [0, 0, 1]}]}


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)
    return _write


def test_identities_pass(capsys):
    assert main(["identities", "--max-n", "4"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] and report["checks"]


def test_identities_empty(capsys):
    assert main(["identities", "--max-n", "0"]) == 0
    assert json.loads(capsys.readouterr().out)["checks"] == []


def test_identities_fault(capsys):
    assert main(["identities", "--max-n", "3", "--fault", "idempotency"]) == 1
    err = capsys.readouterr().err
    assert "FAILED idempotency[n=1,diagram]" in err


def test_identities_cap():
    assert main(["identities", "--max-n", "9"]) == 2


def test_foel_exit_codes(write, capsys):
    assert main(["foel", write("a.json", SPIN_ONE)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("spin,E0") and "foel_holds=true" in out
    assert main(["foel", write("b.json", VIOLATOR)]) == 1
    assert main(["foel", write("c.json", "{not json")]) == 2
    assert main(["foel", "/nonexistent/spec.json"]) == 2


def test_bad_flags(write):
    path = write("a.json", SPIN_ONE)
    assert main(["foel", path, "--tol", "0"]) == 2
    assert main(["foel", path, "--q", "-1"]) == 2
    assert main(["bogus"]) == 2


def test_export_spin_half_pair(write, tmp_path):
    out = tmp_path / "m.txt"
    spec = {"weights": [1, 1], "couplings": [[0, -1]], "q": "1"}
    assert main(["export", write("s.json", spec), "--sector", "1", "--out", str(out)]) == 0
    M = read_triplet(out.read_text())
    assert M.shape == (1, 1)


def test_export_triplet_roundtrip(write, tmp_path):
    out = tmp_path / "m.txt"
    assert main(["export", write("s.json", SPIN_ONE), "--sector", "1", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.splitlines()[0] == "%%matrix coordinate real symmetric-general"
    H = build_hamiltonian(ChainSpec.from_json(json.dumps(SPIN_ONE)), ("hw_sector", 1))
    assert H.shape == (2, 2)
    assert read_triplet(text) == H.to_float()


def test_export_json_exact(write, tmp_path):
    out = tmp_path / "m.json"
    spec = dict(SPIN_ONE, q="1/3")
    assert main(["export", write("s.json", spec), "--sector", "1", "--format", "json", "--out", str(out)]) == 0
    H = build_hamiltonian(ChainSpec.from_json(json.dumps(spec)), ("hw_sector", 1))
    assert read_matrix_json(out.read_text()) == H
    assert json.loads(out.read_text())["sector_k"] == 1


def test_export_invalid_sector(write):
    assert main(["export", write("s.json", SPIN_ONE), "--sector", "4"]) == 2


def test_matrix_writers_roundtrip():
    M = SparseOperator((2, 3), {0: {2: mpq(-7, 3)}, 1: {0: mpq(5)}})
    assert read_matrix_json(write_matrix_json(M)) == M
    assert read_triplet(write_triplet(M)) == M.to_float()


def test_urn(write, capsys):
    assert main(["urn", write("m.json", MIXTURE)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("k,gamma") and len(out.splitlines()) == 7
    assert main(["urn", write("e.json", EXPLICIT)]) == 0
    assert main(["urn", write("bad.json", {"L": 3})]) == 2


def test_urn_zero_rates(write, capsys):
    assert main(["urn", write("z.json", dict(EXPLICIT, rates=[0]))]) == 0
    rows = capsys.readouterr().out.splitlines()[1:-1]
    assert all(float(r.split(",")[1]) == 0 for r in rows)


def test_sweep_needs_seed():
    assert main(["sweep", "--count", "1"]) == 2


def test_sweep_small(capsys):
    assert main(["sweep", "--seed", "1", "--count", "3", "--q", "1/2"]) == 0
    first = capsys.readouterr().out
    main(["sweep", "--seed", "1", "--count", "3", "--q", "1/2"])
    second = capsys.readouterr().out
    strip = lambda s: [l for l in s.splitlines() if not l.startswith("#")]  # noqa: E731
    assert strip(first) == strip(second)
