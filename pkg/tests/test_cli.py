import io as _io
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from focusjet import io, moduli
from focusjet.cli import run
from focusjet.config import TOL_ENV
from focusjet.jetcalc import Jet2, compose

DATA = Path(__file__).resolve().parent.parent / "examples_data"


def cli(*argv):
    out = _io.StringIO()
    code = run([str(a) for a in argv], out)
    return code, out.getvalue()


def table(text):
    rows = [ln.split("\t") for ln in text.splitlines() if ln and not ln.startswith("#")]
    return rows[0], rows[1:]


def test_invariants_example():
    code, text = cli("orbit", "invariants", DATA / "tuple_n2.txt")
    assert code == 0
    head, rows = table(text)
    row = dict(zip(head, rows[0]))
    assert float(row["re"]) == pytest.approx(0.5) and float(row["im"]) == 0
    assert float(row["raw_im"]) == pytest.approx(0.5)


def test_liftable_examples():
    assert cli("germ", "liftable", DATA / "not_liftable.txt") == (0, "NOT_LIFTABLE\n")
    assert cli("germ", "liftable", DATA / "liftable.txt") == (0, "DIVISIBLE_BY_Z\n")


def test_profile_example():
    code, text = cli("lab", "profile", DATA / "family_varying.txt")
    assert code == 0
    head, rows = table(text)
    assert head[:4] == ["t", "trace", "mu", "status"]
    assert len(rows) == 11
    for t, _, mu, status, _ in rows:
        oracle = moduli.mu_double(Jet2.z(1) + Jet2.zbar(1) * (0.2 + 0.5 * float(t)))
        assert status == "ok" and float(mu) == pytest.approx(oracle, abs=1e-6)
    assert [float(r[2]) for r in (rows[0], rows[-1])] == pytest.approx([0.2, 0.7])


def test_obstruction_from_family_and_from_profile(tmp_path):
    code, text = cli("lab", "obstruction", DATA / "family_varying.txt")
    assert code == 0 and "verdict\tNotAlmostDirectProduct" in text
    _, prof = cli("lab", "profile", DATA / "family_constant.txt")
    path = tmp_path / "p.tsv"
    path.write_text(prof)
    code, text = cli("lab", "obstruction", path)
    assert code == 0 and "verdict\tProductConsistent" in text


def test_emitted_jets_reparse(tmp_path):
    _, text = cli("jet", "invert", DATA / "phi_a.txt")
    inv = io.parse_jet(text)
    phi = io.parse_jet((DATA / "phi_a.txt").read_text())
    assert (compose(phi, inv) - Jet2.z(3)).max_abs() < 1e-14
    _, text = cli("orbit", "act", DATA / "gauge_n3.txt", DATA / "tuple_n3.txt")
    assert len(io.parse_tuple(text)) == 2
    _, text = cli("orbit", "equiv", DATA / "phi_a.txt", DATA / "phi_b.txt")
    body = text.split("= phi_other\n", 1)[1]
    assert len(io.parse_gauge(body)) == 2


def test_other_commands_succeed():
    for argv in (("jet", "compose", DATA / "phi_a.txt", DATA / "phi_b.txt"),
                 ("jet", "conj", DATA / "phi_a.txt"),
                 ("germ", "lift", DATA / "liftable.txt"),
                 ("orbit", "normalize", DATA / "phi_a.txt"),
                 ("orbit", "rank", "--order", "3", "--n", "2"),
                 ("orbit", "rank", DATA / "tuple_n3.txt"),
                 ("geom", "trace", DATA / "phi_b.txt"),
                 ("geom", "trace", DATA / "phi_b.txt", DATA / "phi_c.txt"),
                 ("geom", "hessian-j", DATA / "hessian_normal.txt"),
                 ("geom", "eigen-mu", "1+1i", "2+3i")):
        code, text = cli(*argv)
        assert code == 0 and text, argv


def test_trace_example_value():
    _, text = cli("geom", "trace", DATA / "phi_b.txt")
    head, rows = table(text)
    assert float(rows[0][0]) == pytest.approx(10 / 3)


def test_order_flag_truncates():
    _, text = cli("jet", "conj", DATA / "phi_a.txt", "--order", "2")
    assert io.parse_jet(text).order == 2
    assert cli("jet", "conj", DATA / "phi_a.txt", "--order", "9")[0] == 2


@pytest.mark.parametrize("argv", [
    ("orbit", "invariants", DATA / "tuple_n3.txt"),
    ("orbit", "equiv", DATA / "phi_a.txt", DATA / "phi_b.txt"),
    ("lab", "profile", DATA / "family_varying.txt", "--route", "suspended"),
    ("geom", "hessian-j", DATA / "hessian_normal.txt", "--seed", "17"),
])
def test_deterministic(argv):
    first, second = cli(*argv), cli(*argv)
    assert first == second


def test_exit_codes(tmp_path, capsys):
    assert cli("germ", "lift", DATA / "not_liftable.txt")[0] == 2
    assert capsys.readouterr().err.startswith("ERR not_liftable: ")
    assert cli("jet", "invert", tmp_path / "missing.txt")[0] == 3
    assert capsys.readouterr().err.startswith("ERR io: ")
    bad = tmp_path / "bad.txt"
    bad.write_text("order 1\n1 0 x 0\n")
    assert cli("jet", "invert", bad)[0] == 4
    err = capsys.readouterr().err
    assert err.startswith("ERR parse: ") and err.count("\n") == 1
    assert cli("jet", "invert")[0] == 2
    assert cli("orbit", "equiv", DATA / "phi_a.txt")[0] == 2
    assert cli("geom", "trace", DATA / "phi_b.txt", "--tol", "-1")[0] == 2


@pytest.mark.parametrize("argv", [("jet", "bogus"), ("nope",), ("jet", "conj", "x", "--frobnicate")])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        run(list(argv), _io.StringIO())
    assert exc.value.code == 2


def test_tol_flag_does_not_leak():
    before = os.environ.get(TOL_ENV)
    cli("germ", "liftable", DATA / "liftable.txt", "--tol", "1e-3")
    assert os.environ.get(TOL_ENV) == before


def test_tol_env_override(monkeypatch, tmp_path):
    path = tmp_path / "almost.txt"
    path.write_text(io.format_jet(Jet2.z(2) + Jet2.z(2) ** 2 * 1e-6))
    monkeypatch.setenv(TOL_ENV, "1e-9")
    assert cli("germ", "liftable", path)[1].startswith("DIVISIBLE_BY_Z")
    path.write_text(io.format_jet(Jet2.z(2) + Jet2.zbar(2) ** 2 * 1e-6))
    assert cli("germ", "liftable", path)[1] == "NOT_LIFTABLE\n"
    monkeypatch.setenv(TOL_ENV, "1e-3")
    assert cli("germ", "liftable", path)[1].startswith("DIVISIBLE_BY_Z")


def test_selftest_subset():
    code, text = cli("selftest", "4", "5")
    assert code == 0
    lines = text.splitlines()
    assert len(lines) == 2 and all(ln.startswith("PASS [") for ln in lines)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "focusjet", "germ", "liftable",
                          str(DATA / "not_liftable.txt")], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "NOT_LIFTABLE\n"
