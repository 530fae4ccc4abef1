"""The numba kernels and the numpy fallbacks must walk the same trajectory.

Probe problems use small-integer features so every dot product is exact in
float64 regardless of summation order; any divergence between the paths is
then a real decision-sequence difference, not rounding noise.
"""

import subprocess
import sys

import numpy as np
import pytest

from pairnet import _kernels
from pairnet._kernels import (
    build_visit_order,
    lm_loop_numpy,
    pocket_loop_numpy,
)

needs_numba = pytest.mark.skipif(
    not _kernels.HAVE_NUMBA, reason="numba not installed"
)


def integer_problem(seed, n=60, m=3):
    rng = np.random.default_rng(seed)
    X = rng.integers(-4, 5, size=(n, m)).astype(np.float64)
    xb = np.ascontiguousarray(np.hstack([np.ones((n, 1)), X]))
    targets = rng.choice([-1.0, 1.0], size=n)
    targets[0], targets[1] = 1.0, -1.0
    order = build_visit_order(n, 5000, np.random.default_rng(seed + 1), True)
    return xb, targets, order


def integer_lm_problem(seed, n=60, m=3, r=4):
    rng = np.random.default_rng(seed)
    X = rng.integers(-4, 5, size=(n, m)).astype(np.float64)
    xb = np.ascontiguousarray(np.hstack([np.ones((n, 1)), X]))
    y0 = rng.integers(0, r, size=n).astype(np.int64)
    y0[:r] = np.arange(r)
    order = build_visit_order(n, 5000, np.random.default_rng(seed + 1), True)
    return xb, y0, order


class TestVisitOrder:
    def test_cyclic_without_shuffle(self):
        order = build_visit_order(3, 8, np.random.default_rng(0), shuffle=False)
        np.testing.assert_array_equal(order, [0, 1, 2, 0, 1, 2, 0, 1])

    def test_shuffled_epochs_are_permutations(self):
        order = build_visit_order(5, 12, np.random.default_rng(0), shuffle=True)
        assert sorted(order[:5]) == [0, 1, 2, 3, 4]
        assert sorted(order[5:10]) == [0, 1, 2, 3, 4]
        assert len(order) == 12

    def test_deterministic(self):
        a = build_visit_order(7, 40, np.random.default_rng(5), True)
        b = build_visit_order(7, 40, np.random.default_rng(5), True)
        np.testing.assert_array_equal(a, b)


@needs_numba
class TestPathEquivalence:
    def test_pocket_paths_identical(self):
        for seed in range(5):
            xb, targets, order = integer_problem(seed)
            res_nb = _kernels.pocket_loop_numba(xb, targets, order, 1.0, 5000)
            res_np = pocket_loop_numpy(xb, targets, order, 1.0, 5000)
            np.testing.assert_array_equal(res_nb[0], res_np[0])  # pocket weights
            assert res_nb[1] == res_np[1]  # accuracy
            assert res_nb[2] == res_np[2]  # iterations used
            np.testing.assert_array_equal(res_nb[3], res_np[3])  # history iters
            np.testing.assert_array_equal(res_nb[4], res_np[4])  # history accs

    def test_lm_paths_identical(self):
        for seed in range(5):
            xb, y0, order = integer_lm_problem(seed)
            res_nb = _kernels.lm_loop_numba(xb, y0, 4, order, 1.0, 5000)
            res_np = lm_loop_numpy(xb, y0, 4, order, 1.0, 5000)
            np.testing.assert_array_equal(res_nb[0], res_np[0])
            assert res_nb[1] == res_np[1]
            assert res_nb[2] == res_np[2]
            np.testing.assert_array_equal(res_nb[3], res_np[3])

    def test_fractional_correction_paths_identical(self):
        # c = 0.5 keeps all arithmetic exact on the integer grid too
        xb, targets, order = integer_problem(11)
        res_nb = _kernels.pocket_loop_numba(xb, targets, order, 0.5, 5000)
        res_np = pocket_loop_numpy(xb, targets, order, 0.5, 5000)
        np.testing.assert_array_equal(res_nb[0], res_np[0])


class TestPathSelection:
    def test_active_path_is_consistent(self):
        assert _kernels.ACTIVE_PATH in ("numba", "numpy")
        if _kernels.NUMBA_DISABLED or not _kernels.HAVE_NUMBA:
            assert _kernels.pocket_loop is pocket_loop_numpy
        else:
            assert _kernels.pocket_loop is _kernels.pocket_loop_numba

    def test_env_flag_selects_numpy_path(self):
        code = (
            "from pairnet import _kernels\n"
            "assert _kernels.ACTIVE_PATH == 'numpy', _kernels.ACTIVE_PATH\n"
            "assert _kernels.pocket_loop is _kernels.pocket_loop_numpy\n"
        )
        proc = subprocess.run(
            [sys.executable, "-c", code],
            env={"PATH": "/usr/bin:/bin", "PAIRNET_DISABLE_NUMBA": "1"},
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr

    def test_warm_kernels_smoke(self):
        _kernels.warm_kernels()
