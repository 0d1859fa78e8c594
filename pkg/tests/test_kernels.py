import os
import subprocess
import sys

import numpy as np
import pytest

from otsconn.constraints import assemble
from otsconn.fixtures import make_fixture
from otsconn.solver import active_kernel, available_kernels, solve, solve_lp, use_kernel

from oracles import random_mini_model

needs_ext = pytest.mark.skipif("compiled" not in available_kernels(),
                               reason="compiled kernel not built")


@pytest.fixture
def restore_kernel():
    before = active_kernel()
    yield
    use_kernel(before)


def _both(fn):
    out = {}
    for k in ("compiled", "python"):
        use_kernel(k)
        out[k] = fn()
    return out["compiled"], out["python"]


@needs_ext
@pytest.mark.parametrize("rule", ["dantzig", "bland"])
def test_kernels_agree_on_random_lps(restore_kernel, rule):
    rng = np.random.default_rng(11)
    for _ in range(60):
        c, A, senses, b, lo, up = random_mini_model(rng).dense()
        a, p = _both(lambda: solve_lp(c, A, senses, b, lo, up, rule=rule))
        assert a.status == p.status
        assert a.iterations == p.iterations
        if a.status == "optimal":
            assert np.allclose(a.x, p.x, atol=1e-9)


@needs_ext
@pytest.mark.parametrize("name, variant", [("fig1", "N3"), ("nis-demo", "M4"), ("cycle3", "N4")])
def test_kernels_agree_on_fixture_models(restore_kernel, name, variant):
    model = assemble(variant, make_fixture(name))
    a, p = _both(lambda: solve(model))
    assert a.objective == pytest.approx(p.objective, abs=1e-9)
    assert a.z == p.z
    assert a.stats["nodes"] == p.stats["nodes"]


def test_unknown_kernel(restore_kernel):
    with pytest.raises(ValueError):
        use_kernel("fortran")


def test_pure_python_fallback_selected_by_environment():
    env = dict(os.environ, OTSCONN_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c",
                          "from otsconn.solver import active_kernel; print(active_kernel())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
