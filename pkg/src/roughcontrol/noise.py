"""Fractional Brownian motion sampling on fixed grids.

Exact Gaussian sampling: the covariance matrix of the grid values is
Cholesky-factored once and every path is L @ z with an i.i.d. standard
normal vector drawn from a counter-based stream keyed by (seed, path index).
Identical (seed, index) pairs give identical paths regardless of batch
splits, so train/test sets stay disjoint by index range.
"""

import numpy as np

from .errors import FactorizationError, GridError


def fbm_covariance(grid, hurst):
    """Covariance matrix R(s,t) = (s^2H + t^2H - |t-s|^2H) / 2 on the grid."""
    t = np.asarray(grid, dtype=np.float64)
    h2 = 2.0 * hurst
    return 0.5 * (t[:, None] ** h2 + t[None, :] ** h2
                  - np.abs(t[:, None] - t[None, :]) ** h2)


class FbmSampler:
    """Samples fBM paths with Hurst parameter H in (0, 1] on a fixed grid.

    The grid excludes 0 (the value at 0 is 0 by definition).  H = 1 is the
    degenerate straight-line case xi_t = t * Z and needs no factorization.
    """

    def __init__(self, grid, hurst, seed=0, jitter=0.0):
        grid = np.asarray(grid, dtype=np.float64)
        if grid.ndim != 1 or len(grid) == 0:
            raise GridError("sampling grid must be a nonempty 1-d array")
        if grid[0] <= 0 or np.any(np.diff(grid) <= 0):
            raise GridError("sampling grid must be strictly increasing and start after 0")
        if not 0.0 < hurst <= 1.0:
            raise ValueError("Hurst parameter must lie in (0, 1]")
        self.grid = grid
        self.hurst = hurst
        self.seed = seed
        if hurst == 1.0:
            self.cholesky = None
        else:
            cov = fbm_covariance(grid, hurst)
            if jitter > 0.0:
                cov = cov + jitter * np.eye(len(grid))
            try:
                self.cholesky = np.linalg.cholesky(cov)
            except np.linalg.LinAlgError:
                scale = float(np.trace(cov)) / len(grid)
                suggestion = 1e-12 * scale
                raise FactorizationError(
                    f"fBM covariance not positive definite at H={hurst} on a "
                    f"{len(grid)}-point grid; retry with jitter={suggestion:g}",
                    suggested_jitter=suggestion)

    def _normals(self, n, path_index):
        key = (int(self.seed) << 64) | int(path_index)
        rng = np.random.Generator(np.random.Philox(key=key))
        return rng.standard_normal(n)

    def sample_paths(self, n_paths, first_path_index=0):
        """Sample paths as an (n_paths, len(grid)) array of values (no t=0 column)."""
        if n_paths < 1:
            raise ValueError("n_paths must be at least 1")
        n = len(self.grid)
        if self.hurst == 1.0:
            z = np.empty(n_paths)
            for i in range(n_paths):
                z[i] = self._normals(1, first_path_index + i)[0]
            return z[:, None] * self.grid[None, :]
        z = np.empty((n_paths, n))
        for i in range(n_paths):
            z[i] = self._normals(n, first_path_index + i)
        return z @ self.cholesky.T

    def sample_paths_with_origin(self, n_paths, first_path_index=0):
        """Same as sample_paths but with the xi_0 = 0 column prepended."""
        vals = self.sample_paths(n_paths, first_path_index)
        return np.concatenate([np.zeros((n_paths, 1)), vals], axis=1)


def scale_shift(paths, sigma, x0):
    """Affine driver transform X = x0 + sigma * xi, path-wise."""
    return x0 + sigma * np.asarray(paths, dtype=np.float64)
