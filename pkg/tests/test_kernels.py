import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cogrelay import _kernels_py, kernels

compiled = pytest.importorskip("cogrelay._kernels")

pos = st.floats(0.05, 10.0)


@given(pos, pos, st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.sampled_from([0.5, 1.0, 2.0]),
       st.floats(0.1, 100.0))
def test_canonical_backends_agree(n1, n2, rho2, frac, c, p):
    gamma1 = frac * 1.2 * p * n1
    a = _kernels_py.canonical_gamma2(n1, n2, rho2, gamma1, c, p)
    b = compiled.canonical_gamma2(n1, n2, rho2, gamma1, c, p)
    assert b[1] == pytest.approx(a[1], rel=1e-13, abs=1e-300)
    if math.isnan(a[0]):
        assert math.isnan(b[0])
    else:
        assert b[0] == pytest.approx(a[0], rel=1e-13, abs=1e-300)


def test_canonical_infeasible_marker():
    lam, g2 = _kernels_py.canonical_gamma2(1.0, 1.0, 0.2, 11.0, 1.0, 10.0)
    assert math.isnan(lam) and g2 == -1.0


def test_phi_backends_agree():
    ps = np.linspace(0.0, 60.0, 301)
    args = (4.0, 4.0, 0.3, 5.0, 0.088, 0.088, 2.0, 3.5, 2e-2, 3.0)
    np.testing.assert_allclose(compiled.phi_curve(ps, *args), _kernels_py.phi_curve(ps, *args),
                               rtol=1e-13)


@pytest.mark.parametrize("gamma1", [0.0, 0.7, 2.5])
def test_oracle_backends_agree(gamma1):
    lo = [0.0, 0.0, 0.0, 0.0]
    hi = [math.pi / 2, 2 * math.pi, math.pi / 2, 2 * math.pi]
    a = _kernels_py.oracle_grid(1.2, 0.5, 0.8, 1.5, gamma1, 4.0, lo, hi, 12)
    b = compiled.oracle_grid(1.2, 0.5, 0.8, 1.5, gamma1, 4.0, lo, hi, 12)
    assert b[0] == pytest.approx(a[0], rel=1e-12)


def test_oracle_grid_no_feasible_pair():
    lo, hi = [0.0] * 4, [1.0] * 4
    best = _kernels_py.oracle_grid(1.0, 0.5, 0.5, 1.0, 100.0, 1.0, lo, hi, 5)
    assert best[0] == 0.0 and math.isnan(best[1])


def test_backend_selection():
    assert kernels.BACKEND == "cython"
    env = dict(os.environ, COGRELAY_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import cogrelay.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_solver_runs_on_fallback():
    code = ("from cogrelay import *; import numpy as np;"
            "p = CanonicalProblem(np.array([1, 1j]), np.array([1, 0.5]), 1.0, 0.5, 3.0);"
            "s = solve_canonical(p); print(repr(s.gamma2))")
    env = dict(os.environ, COGRELAY_PURE_PYTHON="1")
    slow = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                          text=True, check=True)
    fast = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                          check=True)
    assert float(slow.stdout) == pytest.approx(float(fast.stdout), rel=1e-12)
