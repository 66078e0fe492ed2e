import json

import pytest

from cpcert.cli import EXIT_GUARD, EXIT_INPUT, EXIT_OK, EXIT_REJECT, main

SMALL_QBF = "p cnf 2 1\na 2 0\n-1 2 0\n"
SMALL = """c small instance
p cnf 5 6
a 4 0
e 5 0
1 2 -3 0
-1 3 4 0
2 -4 5 0
-2 -5 0
1 5 0
3 -4 0
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.fixture
def small_qbf(tmp_path):
    return write(tmp_path, "small_qbf.qdimacs", SMALL_QBF)


@pytest.fixture
def small(tmp_path):
    return write(tmp_path, "small.qdimacs", SMALL)


def qbf_count(text):
    """Count free assignments by direct quantifier expansion."""
    prefix, clauses, n = [], [], 0
    for line in text.splitlines():
        tok = line.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "p":
            n = int(tok[2])
        elif tok[0] in "ae":
            prefix.append((tok[0], [int(x) for x in tok[1:-1]]))
        else:
            clauses.append([int(x) for x in tok[:-1]])
    bound = {v for _, vs in prefix for v in vs}
    free = [v for v in range(1, n + 1) if v not in bound]
    seq = [(q, v) for q, vs in prefix for v in vs]

    def holds(val, i):
        if i == len(seq):
            return all(any(val[abs(x)] == (x > 0) for x in c) for c in clauses)
        q, v = seq[i]
        res = []
        for b in (False, True):
            val[v] = b
            res.append(holds(val, i + 1))
        return all(res) if q == "a" else any(res)

    total = 0
    for mask in range(1 << len(free)):
        val = {v: bool(mask >> k & 1) for k, v in enumerate(free)}
        total += holds(val, 0)
    return total


def small_count():
    return qbf_count(SMALL)


class TestSolve:
    def test_small_qbf(self, small_qbf, capsys):
        assert main(["solve", small_qbf]) == EXIT_OK
        out = capsys.readouterr().out.split()
        assert out == ["count", "1", "SAT"]

    def test_small(self, small, capsys):
        assert main(["solve", small, "--json"]) == EXIT_OK
        rep = json.loads(capsys.readouterr().out)
        assert rep["count"] == small_count()
        assert rep["free_vars"] == 3

    def test_brute_agrees(self, small, capsys):
        assert main(["brute", small]) == EXIT_OK
        assert capsys.readouterr().out.split()[1] == str(small_count())

    def test_unsat(self, tmp_path, capsys):
        path = write(tmp_path, "u.q", "p cnf 1 2\n1 0\n-1 0\n")
        assert main(["solve", path]) == EXIT_OK
        assert "UNSAT" in capsys.readouterr().out

    def test_missing_file(self, tmp_path, capsys):
        assert main(["solve", str(tmp_path / "nope")]) == EXIT_INPUT
        assert "error" in capsys.readouterr().err

    def test_bad_file(self, tmp_path, capsys):
        path = write(tmp_path, "bad.q", "p cnf x y\n")
        assert main(["solve", path]) == EXIT_INPUT

    def test_brute_guard(self, tmp_path, capsys):
        path = write(tmp_path, "big.q", "p cnf 26 1\n1 2 0\n")
        assert main(["brute", path]) == EXIT_GUARD


class TestCertify:
    def test_accept(self, small, capsys):
        assert main(["certify", small, "--seed", "7"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "seed 7" in out
        assert "count %d" % small_count() in out

    def test_seed_from_env(self, small, capsys, monkeypatch):
        monkeypatch.setenv("CPCERT_SEED", "0x10")
        assert main(["certify", small]) == EXIT_OK
        assert "seed 16" in capsys.readouterr().out

    def test_bad_env_seed(self, small, capsys, monkeypatch):
        monkeypatch.setenv("CPCERT_SEED", "abc")
        assert main(["certify", small]) == EXIT_INPUT

    def test_random_seed_printed(self, small, capsys, monkeypatch):
        monkeypatch.delenv("CPCERT_SEED", raising=False)
        assert main(["certify", small]) == EXIT_OK
        assert capsys.readouterr().out.startswith("seed ")

    def test_bad_seed(self, small):
        with pytest.raises(SystemExit):
            main(["certify", small, "--seed", "-1"])

    @pytest.mark.parametrize("mode", ["flip-initial-K", "add-one", "random-poly"])
    def test_inject(self, small, capsys, mode):
        code = main(["certify", small, "--seed", "3", "--inject", mode, "--inject-target", "2"])
        assert code == EXIT_REJECT
        assert "REJECT" in capsys.readouterr().out

    def test_json(self, small, capsys):
        assert main(["certify", small, "--seed", "1", "--json", "--opt-eval"]) == EXIT_OK
        cap = capsys.readouterr()
        rep = json.loads(cap.out)
        assert rep["verdict"] == "ACCEPT"
        assert rep["count"] == small_count()
        assert "seed 1" in cap.err

    def test_stats(self, small, capsys):
        assert main(["stats", small, "--seed", "1"]) == EXIT_OK
        rep = json.loads(capsys.readouterr().out)
        assert rep["seed"] == 1 and rep["rounds"] > 0

    def test_guard(self, tmp_path, capsys):
        path = write(tmp_path, "wide.q", "p cnf 61 1\n1 2 0\n")
        assert main(["certify", path, "--seed", "1"]) == EXIT_GUARD
        path = write(tmp_path, "mid.q", "p cnf 5 1\n1 2 0\n")
        assert main(["certify", path, "--seed", "1", "--max-vars", "4"]) == EXIT_GUARD

    def test_pipe(self, small_qbf, capsys):
        assert main(["certify", small_qbf, "--seed", "5", "--pipe"]) == EXIT_OK
        assert "count 1" in capsys.readouterr().out


class TestVerifyTranscript:
    @pytest.fixture
    def recorded(self, small, tmp_path, capsys):
        out = str(tmp_path / "t.bin")
        assert main(["certify", small, "--seed", "42", "--transcript", out]) == EXIT_OK
        capsys.readouterr()
        return out

    def test_deterministic(self, small, recorded, tmp_path):
        again = str(tmp_path / "t2.bin")
        main(["certify", small, "--seed", "42", "--transcript", again])
        with open(recorded, "rb") as a, open(again, "rb") as b:
            assert a.read() == b.read()

    def test_accept(self, small, recorded, capsys):
        assert main(["verify-transcript", recorded, "--instance", small]) == EXIT_OK
        assert "ACCEPT" in capsys.readouterr().out

    def test_other_instance(self, recorded, tmp_path, capsys):
        other = write(tmp_path, "o.q", SMALL.replace("1 5 0", "-1 5 0"))
        assert main(["verify-transcript", recorded, "--instance", other]) == EXIT_REJECT

    def test_truncated(self, small, recorded, capsys):
        with open(recorded, "rb") as fh:
            data = fh.read()
        with open(recorded, "wb") as fh:
            fh.write(data[:-5])
        assert main(["verify-transcript", recorded, "--instance", small]) == EXIT_INPUT

    def test_garbage(self, small, tmp_path):
        path = tmp_path / "g.bin"
        path.write_bytes(b"hello")
        assert main(["verify-transcript", str(path), "--instance", small]) == EXIT_INPUT
