import numpy as np
import pytest

from specmax.generators import builtin
from specmax.stabilize import spectral_subgradient, stabilize

ABSC = builtin("abscissa")
RAD = builtin("radius")


class TestSpectralSubgradient:
    def test_matches_finite_differences_on_generic_matrices(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            X = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            for f in (ABSC, RAD):
                val, Y = spectral_subgradient(X, f)
                for _ in range(3):
                    D = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
                    D /= np.linalg.norm(D)
                    t = 1e-6
                    v1, _ = spectral_subgradient(X + t * D, f)
                    v0, _ = spectral_subgradient(X - t * D, f)
                    fd = (v1 - v0) / (2 * t)
                    pairing = float(np.real(np.trace(Y.conj().T @ D)))
                    assert pairing == pytest.approx(fd, rel=1e-4, abs=1e-6)

    def test_value_is_the_spectral_max(self):
        X = np.diag([1.0, -3.0]).astype(complex)
        val, _ = spectral_subgradient(X, ABSC)
        assert val == pytest.approx(1.0)
        val, _ = spectral_subgradient(X, RAD)
        assert val == pytest.approx(3.0)


class TestStabilize:
    def test_zero_directions_keep_the_trajectory_constant(self):
        A0 = np.array([[1.0, 2.0], [0.0, 0.5]])
        traj = stabilize(A0, [np.zeros((2, 2))], ABSC, iters=10)
        assert np.allclose(traj.values, traj.values[0])

    def test_abscissa_envelope_decreases(self):
        A0 = np.array([[1.0, 2.0], [0.0, 0.5]])
        dirs = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
        traj = stabilize(A0, dirs, ABSC, iters=200, step=0.5)
        env = traj.monotone_envelope()
        assert env[-1] < env[0] - 0.5
        assert np.all(np.diff(env) <= 1e-12)

    def test_radius_driven_below_one(self):
        A0 = np.array([[1.2, 0.5], [0.1, 0.9]])
        dirs = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
        traj = stabilize(A0, dirs, RAD, iters=200, step=0.5)
        assert traj.values[0] > 1.0
        assert traj.monotone_envelope()[-1] < 1.0

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            stabilize(np.eye(2), [np.eye(3)], ABSC)

    def test_rows_format(self):
        A0 = np.eye(2)
        traj = stabilize(A0, [np.eye(2)], ABSC, iters=3)
        rows = list(traj.rows())
        assert len(rows) == 3 and len(rows[0]) == 3
