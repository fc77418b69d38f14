import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from stlsq import kernels
from stlsq.solver import support_masks

backends = kernels.available_backends()


def test_python_backend_always_available():
    assert "python" in backends
    assert kernels.BACKEND in backends


def test_env_var_forces_fallback():
    code = "from stlsq import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, STLSQ_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("name", ["rk4_lorenz", "rk4_thomas"])
def test_rk4_backends_agree(name):
    out = {}
    for key, mod in backends.items():
        buf = np.empty((401, 3))
        assert getattr(mod, name)(np.array([1.0, 1.0, 0.0]), 0.025, 400, buf) == -1
        out[key] = buf
    ref = out["python"]
    for key, buf in out.items():
        np.testing.assert_allclose(buf, ref, rtol=1e-13, atol=1e-13, err_msg=key)


def test_rk4_nonfinite_row_reported():
    for mod in backends.values():
        buf = np.empty((201, 3))
        bad = mod.rk4_lorenz(np.array([1e200, 1e200, 1e200]), 0.025, 200, buf)
        assert bad > 0


def test_best_subset_backends_agree():
    rng = np.random.default_rng(4)
    for _ in range(30):
        n = int(rng.integers(1, 9))
        A = rng.standard_normal((int(rng.integers(n, 15)), n))
        b = rng.standard_normal(A.shape[0])
        masks = support_masks(n)
        lam2 = float(rng.uniform(0.01, 1.0))
        res = {k: mod.best_subset(A, b, masks, 0.5, lam2, 1e-12, 1e-12) for k, mod in backends.items()}
        pos, F, x = res["python"]
        for k, (p, f, y) in res.items():
            assert p == pos, k
            assert f == pytest.approx(F, rel=1e-12, abs=1e-14)
            np.testing.assert_allclose(np.asarray(y), x, rtol=1e-10, atol=1e-12)


def test_reload_keeps_selection():
    mod = importlib.reload(kernels)
    assert mod.BACKEND in ("python", "cython")
