"""Backend-agreement contract: the compiled kernel and the numpy fallback
must produce identical results (up to rounding) on the same inputs."""

import numpy as np
import pytest

import subspec
from subspec.cocycle import _encoding
from subspec.substitution import substitution_matrix
from subspec._kernels import _cocycle_np

cy = pytest.importorskip(
    "subspec._kernels._cocycle_cy", reason="compiled kernel not built")


def _args(zeta):
    pops, rows, cols = _encoding(zeta)
    st = substitution_matrix(zeta).T.astype(np.float64)
    return pops, rows, cols, zeta.d, st


class TestMatrices:
    def test_agreement_on_fixtures(self, tm, fib, rs, bij3, rng):
        for z in (tm, fib, rs, bij3):
            pops, rows, cols, d, _ = _args(z)
            xi = rng.random((50, d))
            a = _cocycle_np.cocycle_matrices(pops, rows, cols, d, xi)
            b = cy.cocycle_matrices(pops, rows, cols, d, xi)
            assert np.abs(a - b).max() < 1e-14

    def test_zero_point_is_transpose_matrix(self, rs):
        pops, rows, cols, d, st = _args(rs)
        out = cy.cocycle_matrices(pops, rows, cols, d, np.zeros((1, d)))
        assert np.abs(out[0] - st).max() < 1e-14


class TestProducts:
    def test_agreement_generic(self, fib, np0111, rng):
        # the torus orbit xi -> S^T xi (mod 1) is chaotic, so rounding-order
        # differences between backends grow like theta^n; depth 12 is where
        # bit-level agreement is still meaningful
        for z in (fib, np0111):
            pops, rows, cols, d, st = _args(z)
            xi = rng.random((40, d))
            pa, la, ta = _cocycle_np.cocycle_products(
                pops, rows, cols, d, st, xi, 12, want_traj=True)
            pb, lb, tb = cy.cocycle_products(
                pops, rows, cols, d, st, xi, 12, want_traj=True)
            assert np.abs(pa - pb).max() < 1e-10
            assert np.abs(la - lb).max() < 1e-10
            assert np.abs(ta - tb).max() < 1e-10

    def test_agreement_deep_loose(self, np0111, rng):
        pops, rows, cols, d, st = _args(np0111)
        xi = rng.random((40, d))
        _, la, _ = _cocycle_np.cocycle_products(pops, rows, cols, d, st, xi, 30)
        _, lb, _ = cy.cocycle_products(pops, rows, cols, d, st, xi, 30)
        assert np.abs(la - lb).max() < 1e-3

    def test_agreement_degenerate(self, tm):
        # Thue-Morse at (1/2, 1/2): the product cancels exactly; both
        # backends must mark the sample dead the same way
        pops, rows, cols, d, st = _args(tm)
        xi = np.array([[0.5, 0.5], [0.1, 0.2]])
        pa, la, _ = _cocycle_np.cocycle_products(pops, rows, cols, d, st, xi, 8)
        pb, lb, _ = cy.cocycle_products(pops, rows, cols, d, st, xi, 8)
        assert np.isneginf(la[0]) and np.isneginf(lb[0])
        assert np.abs(pa[0]).max() == 0.0 and np.abs(pb[0]).max() == 0.0
        assert abs(la[1] - lb[1]) < 1e-10

    def test_unit_max_norm_contract(self, np0111, rng):
        pops, rows, cols, d, st = _args(np0111)
        xi = rng.random((20, d))
        for impl in (_cocycle_np, cy):
            prod, logscale, _ = impl.cocycle_products(
                pops, rows, cols, d, st, xi, 25)
            assert np.abs(np.abs(prod).max(axis=(1, 2)) - 1.0).max() < 1e-12
            assert np.isfinite(logscale).all()

    def test_traj_none_when_not_requested(self, fib, rng):
        pops, rows, cols, d, st = _args(fib)
        xi = rng.random((3, d))
        for impl in (_cocycle_np, cy):
            _, _, traj = impl.cocycle_products(pops, rows, cols, d, st, xi, 5)
            assert traj is None


class TestSelection:
    def test_active_backend_reported(self):
        assert subspec.kernel_backend in {"numpy", "cython"}

    def test_env_override_numpy(self):
        import os, subprocess, sys
        env = dict(os.environ, SUBSPEC_KERNEL="numpy")
        out = subprocess.run(
            [sys.executable, "-c",
             "import subspec; print(subspec.kernel_backend)"],
            capture_output=True, text=True, env=env)
        assert out.stdout.strip() == "numpy"
