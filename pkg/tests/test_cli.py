import os

import numpy as np
import pytest

from weakkam.cli import main


def _cfg(tmp_path, body, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(body)
    return str(path)


SMALL_RUN = """
preset = example1
grid.n = 128
discount.a = cos2pix
discount.A = 1.0
discount.class_index = 0
discount.lambda_schedule = 1e-1,1e-2,1e-3
"""


def test_run_success_writes_artifacts(tmp_path, capsys):
    cfg = _cfg(tmp_path, SMALL_RUN)
    out = str(tmp_path / "out")
    assert main(["run", cfg, "--out", out]) == 0
    for name in ("profiles.csv", "convergence.csv", "report.txt"):
        assert os.path.exists(os.path.join(out, name))
    report = open(os.path.join(out, "report.txt")).read()
    assert "grid.n = 128" in report
    assert "selection constant C" in report
    # every resolved default appears in the report
    for key in ("grid.dt", "hamiltonian.v_max", "tolerances.tol_aubry",
                "discount.max_iters"):
        assert key in report
    with open(os.path.join(out, "convergence.csv")) as fh:
        header = fh.readline().strip()
    assert header == "lambda,sup_error,residual,iterations"
    with open(os.path.join(out, "profiles.csv")) as fh:
        header = fh.readline().strip()
    assert header == "x,U,a,v0,h_inf_target,u_lambda_min_lambda"


def test_run_deterministic_csvs(tmp_path):
    cfg = _cfg(tmp_path, SMALL_RUN)
    out1, out2 = str(tmp_path / "o1"), str(tmp_path / "o2")
    assert main(["run", cfg, "--out", out1]) == 0
    assert main(["run", cfg, "--out", out2]) == 0
    for name in ("profiles.csv", "convergence.csv", "report.txt"):
        b1 = open(os.path.join(out1, name), "rb").read()
        b2 = open(os.path.join(out2, name), "rb").read()
        if name == "report.txt":
            b1 = b1.replace(out1.encode(), b"OUT")
            b2 = b2.replace(out2.encode(), b"OUT")
        assert b1 == b2


def test_run_final_error_small(tmp_path):
    cfg = _cfg(tmp_path, SMALL_RUN)
    out = str(tmp_path / "out")
    assert main(["run", cfg, "--out", out]) == 0
    with open(os.path.join(out, "convergence.csv")) as fh:
        fh.readline()
        rows = [line.strip().split(",") for line in fh]
    assert float(rows[-1][1]) <= 0.1


def test_run_config_error_exit_2(tmp_path, capsys):
    cfg = _cfg(tmp_path, "grid.n = 3\n")
    assert main(["run", cfg]) == 2
    cfg = _cfg(tmp_path, "bogus = 1\n", name="bad.cfg")
    assert main(["run", cfg]) == 2


def test_run_missing_config_exit_2(tmp_path):
    assert main(["run", str(tmp_path / "nope.cfg")]) == 2


def test_run_class_index_out_of_range_exit_2(tmp_path):
    cfg = _cfg(tmp_path, SMALL_RUN + "discount.class_index = 5\n")
    assert main(["run", cfg, "--out", str(tmp_path / "out")]) == 2


def test_run_condition_a_failure_exit_3(tmp_path):
    cfg = _cfg(tmp_path, """
preset = example1
grid.n = 128
discount.a = const(1.0)
""")
    out = str(tmp_path / "out")
    assert main(["run", cfg, "--out", out]) == 3
    report = open(os.path.join(out, "report.txt")).read()
    assert "offending node" in report


def test_run_single_class_refused_exit_3(tmp_path, monkeypatch):
    # a flat potential has a single static class, which cannot carry the
    # required sign pattern
    import weakkam.grid as grid_mod
    cfg = _cfg(tmp_path, """
preset = example2
grid.n = 64
hamiltonian.v_max = 6.0
discount.a = cos2pix
""")
    monkeypatch.setattr(grid_mod, "_default_potential_example2",
                        lambda c: (lambda x: np.zeros_like(np.asarray(x, float))))
    assert main(["run", cfg, "--out", str(tmp_path / "out")]) == 3


def test_run_solver_nonconvergence_exit_4(tmp_path):
    cfg = _cfg(tmp_path, SMALL_RUN + "discount.max_iters = 3\n")
    assert main(["run", cfg, "--out", str(tmp_path / "out")]) == 4


def test_oracle_command(capsys):
    assert main(["oracle", "--seed", "0"]) == 0
    outp = capsys.readouterr().out
    assert "PASS" in outp and "FAIL" not in outp


def test_figures_rendered(tmp_path):
    cfg = _cfg(tmp_path, SMALL_RUN)
    out = str(tmp_path / "out")
    assert main(["run", cfg, "--out", out, "--figures"]) == 0
    assert os.path.exists(os.path.join(out, "profiles.png"))
    assert os.path.exists(os.path.join(out, "convergence.png"))


def test_plot_command_on_existing_output(tmp_path):
    cfg = _cfg(tmp_path, SMALL_RUN)
    out = str(tmp_path / "out")
    assert main(["run", cfg, "--out", out]) == 0
    assert main(["plot", out]) == 0
    assert os.path.exists(os.path.join(out, "profiles.png"))


def test_example2_flipped_run(tmp_path):
    cfg = _cfg(tmp_path, """
preset = example2
grid.n = 128
discount.a = neg_cos2pix
discount.class_index = 1
discount.lambda_schedule = 1e-2,1e-3
""")
    out = str(tmp_path / "out")
    assert main(["run", cfg, "--out", out]) == 0
    with open(os.path.join(out, "convergence.csv")) as fh:
        fh.readline()
        rows = [line.strip().split(",") for line in fh]
    assert float(rows[-1][1]) <= 0.1
