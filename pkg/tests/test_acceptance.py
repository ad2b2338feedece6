"""Acceptance run: one test group per criterion, each at its stated tolerance.

A per-criterion PASS/FAIL summary is printed at the end of the pytest run.
"""

import json
import math
import time

import numpy as np
import pytest

from oracles import omega_grid
from schattenrad import matrix as mx
from schattenrad.cli import main
from schattenrad.harness import DEFAULT_P_GRID
from schattenrad.laws import WITNESS, get_law
from schattenrad.radius import OptimizerConfig, omega
from schattenrad.spectral import gauge, schatten, singular_values

EQUALITY_LAWS = ["EQ1", "EQ2", "EQ3", "EQ4", "L14", "L21", "L31A", "L31B", "R34", "R41A"]
INEQUALITY_LAWS = ["BK-UPPER", "BK-LOWER", "P22", "T23-HI", "T23-LO", "T32", "C33", "R35", "T36",
                   "R41B", "T42"]
DIMS = [1, 2, 3, 5]
MIN_TRIALS = 200


def cells(law_id):
    law = get_law(law_id)
    return sum(p in law.p_domain for p in DEFAULT_P_GRID) * len(DIMS)


def suite_run(tmp_path_factory, name, laws, workers=1):
    # one trial count for the whole config, large enough that every law gets MIN_TRIALS
    trials = max(math.ceil(MIN_TRIALS / cells(law_id)) for law_id in laws)
    d = tmp_path_factory.mktemp(name)
    cfg = d / "suite.json"
    cfg.write_text(json.dumps({"laws": laws, "dims": DIMS, "trials": trials, "master_seed": 2024}))
    out = d / "report.json"
    code = main(["suite", "--config", str(cfg), "--out", str(out), "--workers", str(workers)])
    return code, json.loads(out.read_text())


# -- 1 --------------------------------------------------------------------------

@pytest.mark.criterion(1, "closed-form spot checks")
def test_closed_forms():
    tol = 1e-6 + 1e-8
    cases = [(np.diag([1.0, -2.0]), 1, 3.0)]
    j = np.array([[0, 1], [0, 0]], dtype=complex)
    cases += [(j, p, 2 ** (1 / p - 1)) for p in (1, 2, 4)] + [(j, math.inf, 0.5)]
    cases += [(np.eye(3), p, 3 ** (1 / p)) for p in (1, 2)]
    start = time.perf_counter()
    for a, p, expect in cases:
        cv = omega(a, p)
        assert abs(cv.value - expect) <= tol, (p, cv, expect)
        assert cv.value <= expect + 1e-8 <= cv.value + cv.eps + 2e-8
    elapsed = time.perf_counter() - start
    print(f"criterion 1: {len(cases)} closed forms in {elapsed:.3f}s")
    assert elapsed < 1.0


# -- 2 --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def equality_run(tmp_path_factory):
    return suite_run(tmp_path_factory, "equalities", EQUALITY_LAWS)


@pytest.mark.criterion(2, "equality suite")
@pytest.mark.parametrize("law_id", EQUALITY_LAWS)
def test_equality_law(equality_run, law_id):
    _, rep = equality_run
    law = next(x for x in rep["laws"] if x["law_id"] == law_id)
    print(f"criterion 2 {law_id}: trials={law['trials']} failures={law['failures']} "
          f"uncertified={law['uncertified']} max|slack|={law['max_abs_slack']:.3e}")
    assert law["trials"] >= MIN_TRIALS
    assert law["failures"] == 0 and law["uncertified"] == 0
    assert {c["dim"] for c in law["cells"]} == set(DIMS)


@pytest.mark.criterion(2, "equality suite")
def test_equality_suite_exit_code(equality_run):
    code, rep = equality_run
    assert code == 0 and not rep["failures"]


# -- 3 --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def inequality_run(tmp_path_factory):
    return suite_run(tmp_path_factory, "inequalities", INEQUALITY_LAWS)


@pytest.mark.criterion(3, "inequality suite")
@pytest.mark.parametrize("law_id", INEQUALITY_LAWS)
def test_inequality_law(inequality_run, law_id):
    _, rep = inequality_run
    law = next(x for x in rep["laws"] if x["law_id"] == law_id)
    print(f"criterion 3 {law_id}: trials={law['trials']} failures={law['failures']} "
          f"witnesses={law['witnesses']} min_slack={law['min_slack']:.3e}")
    domain = get_law(law_id).p_domain
    assert {c["p"] for c in law["cells"]} == {p for p in DEFAULT_P_GRID if p in domain}
    assert law["trials"] >= MIN_TRIALS
    assert law["uncertified"] == 0
    assert law["failures"] == 0, [f["reproduce"] for f in rep["failures"] if f["law_id"] == law_id][:3]


@pytest.mark.criterion(3, "inequality suite")
def test_inequality_suite_exit_code(inequality_run):
    code, rep = inequality_run
    assert code == 0, f"{len(rep['failures'])} failing trial(s) in laws " \
                      f"{sorted({f['law_id'] for f in rep['failures']})}"


# -- 4 --------------------------------------------------------------------------

def _check(tmp_path, law, p, mats):
    files = []
    for k, m in enumerate(mats):
        files += ["--input", str(tmp_path / f"in{k}.json")]
        mx.save_matrix(m, tmp_path / f"in{k}.json")
    out = tmp_path / "check.json"
    code = main(["check", "--law", law, "--p", str(p), *files, "--out", str(out)])
    return code, json.loads(out.read_text())


@pytest.mark.criterion(4, "sharpness witnesses")
@pytest.mark.parametrize("p", [1, 2, 3, "inf"])
def test_t32_lower_bound_tight_at_equal_inputs(tmp_path, p):
    a = mx.random_matrix("ginibre", 3, 404)
    code, chk = _check(tmp_path, "T32", p, [a, a])
    low = chk["links"][0]
    assert code == 0 and chk["verdict"] == WITNESS
    assert abs(low["slack"]) <= low["budget"]


@pytest.mark.criterion(4, "sharpness witnesses")
@pytest.mark.parametrize("p", [1, 2, 3, "inf"])
def test_t42_both_links_tight_at_zero_b(tmp_path, p):
    a = mx.random_matrix("ginibre", 3, 405)
    code, chk = _check(tmp_path, "T42", p, [a, np.zeros((3, 3))])
    assert code == 0 and chk["verdict"] == WITNESS
    assert chk["tight_links"] == [0, 1]
    assert all(abs(k["slack"]) <= k["budget"] for k in chk["links"])


@pytest.mark.criterion(4, "sharpness witnesses")
@pytest.mark.parametrize("p", [1, 2, 3, "inf"])
def test_l14_exact(tmp_path, p):
    b = mx.random_matrix("ginibre", 3, 406)
    code, chk = _check(tmp_path, "L14", p, [b])
    assert code == 0 and chk["verdict"] == "PASS"
    assert abs(chk["slack"]) <= chk["eps_budget"]


# -- 5 --------------------------------------------------------------------------

@pytest.mark.criterion(5, "optimizer oracle")
def test_certificates_contain_dense_grid_maximum():
    fine_cfg = OptimizerConfig(eps=1e-7)
    outside, unstable, checked = [], [], 0
    for k in range(50):
        a = mx.random_matrix("ginibre", 1 + k % 5, 5000 + k)
        for p in (1, 2, math.inf):
            cv = omega(a, p)
            grid = omega_grid(a, p)
            if not cv.value <= grid <= cv.value + cv.eps:
                outside.append((k, p, cv.value - grid))
            fine = omega(a, p, fine_cfg)
            if not cv.value <= fine.value <= cv.value + cv.eps:
                unstable.append((k, p))
            checked += 1
    print(f"criterion 5: {checked - len(outside)}/{checked} intervals contain the 1e5-point grid "
          f"maximum; {checked - len(unstable)}/{checked} refined values inside the coarse interval")
    for k, p, excess in outside:
        print(f"criterion 5: matrix {k}, p={p}: value exceeds grid maximum by {excess:.3e}")
    assert not unstable, unstable
    assert not outside, outside


# -- 6 --------------------------------------------------------------------------

@pytest.mark.criterion(6, "Schatten oracle")
def test_schatten_oracle():
    for k in range(100):
        n = 1 + k % 8
        a = mx.random_matrix(["ginibre", "hermitian", "unitary", "nilpotent_upper"][k % 4], n, 6000 + k)
        fro = math.sqrt(sum(abs(z) ** 2 for z in a.ravel()))
        assert abs(schatten(a, 2) - fro) <= 1e-10 * max(fro, 1e-300)
        # the singular-value route as well
        assert abs(float(gauge(singular_values(a), 2)) - fro) <= 1e-10 * max(fro, 1e-300)
        u = mx.random_matrix("unitary", n, 7000 + k)
        v = mx.random_matrix("unitary", n, 8000 + k)
        for p in DEFAULT_P_GRID:
            ref = schatten(a, p)
            assert abs(schatten(u @ a @ v, p) - ref) <= 1e-8 * ref


# -- 7 --------------------------------------------------------------------------

@pytest.mark.criterion(7, "determinism")
def test_suite_reports_byte_identical(tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text(json.dumps({"laws": ["L21", "T32", "T36", "BK-LOWER"], "dims": [1, 2, 3],
                               "p_grid": [1, 2, 3, "inf"], "trials": 4, "master_seed": 99}))
    outputs = []
    for run, workers in enumerate((1, 1, 3)):
        out, csv_out = tmp_path / f"r{run}.json", tmp_path / f"r{run}.csv"
        assert main(["suite", "--config", str(cfg), "--out", str(out), "--csv", str(csv_out),
                     "--workers", str(workers)]) == 0
        text = "\n".join(line for line in out.read_text().splitlines()
                         if '"wall_clock_seconds"' not in line)
        outputs.append((text, csv_out.read_bytes()))
    assert outputs[0] == outputs[1] == outputs[2]
