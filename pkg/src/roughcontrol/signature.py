"""Signatures of time-augmented piecewise-linear paths.

Driver paths live in R^d; they are lifted to R^(d+1) by prepending time as
coordinate 0, so the tensor alphabet has dim = d + 1 letters.  Signatures are
computed per linear segment as exp of the augmented increment and chained by
Chen's identity; streaming computations store them only on the coarse
experiment grid, folding refined-grid detail into the per-interval factors.
"""

import numpy as np

from . import _kernels as kernels
from .errors import GridError
from .tensor import total_words, word_to_index


def segment_signature(delta, level):
    """Signature of one linear segment with augmented increment delta.

    delta has shape (..., dim) with delta[..., 0] the time increment; the
    result is exact (exp of a level-1 element).
    """
    delta = np.asarray(delta, dtype=np.float64)
    return kernels.exp_increment(delta, delta.shape[-1], level)


def path_signature(increments, level):
    """Signature of the piecewise-linear path with the given segment increments.

    increments has shape (n, dim) or (batch, n, dim); returns the terminal
    signature (the ordered product of segment signatures).
    """
    increments = np.asarray(increments, dtype=np.float64)
    if increments.size == 0:
        raise ValueError("path_signature needs at least one segment")
    squeeze = increments.ndim == 2
    if squeeze:
        increments = increments[None]
    dim = increments.shape[-1]
    sig = kernels.sig_chain(increments, dim, level, stride=increments.shape[1])
    out = sig[:, -1]
    return out[0] if squeeze else out


class SignatureStream:
    """Stopped signatures of a batch of time-augmented paths on a coarse grid.

    sigs has shape (nPaths, n+1, P) with sigs[:, j] = Sig over [0, t_j];
    grid holds t_0..t_n.
    """

    def __init__(self, grid, sigs, level):
        self.grid = np.asarray(grid, dtype=np.float64)
        self.sigs = sigs
        self.level = level
        self.dim = _infer_dim(sigs.shape[-1], level)

    @property
    def n_paths(self):
        return self.sigs.shape[0]

    @property
    def n_steps(self):
        return len(self.grid) - 1

    def terminal(self):
        """Terminal signatures, shape (nPaths, P)."""
        return self.sigs[:, -1]

    def time_coordinate(self):
        """Level-1 time entries, shape (nPaths, n+1); should equal the grid."""
        return self.sigs[..., word_to_index((0,), self.dim)]

    def save(self, path):
        np.savez_compressed(path, grid=self.grid, sigs=self.sigs,
                            level=self.level)

    @classmethod
    def load(cls, path):
        data = np.load(path)
        return cls(data["grid"], data["sigs"], int(data["level"]))

    def to_csv(self, path):
        """Flat CSV dump: one row per (path, grid point), columns t then coefficients."""
        m, npts, p = self.sigs.shape
        flat = np.empty((m * npts, p + 2))
        flat[:, 0] = np.repeat(np.arange(m), npts)
        flat[:, 1] = np.tile(self.grid, m)
        flat[:, 2:] = self.sigs.reshape(m * npts, p)
        header = "path,t," + ",".join(f"c{i}" for i in range(p))
        np.savetxt(path, flat, delimiter=",", header=header, comments="")


def _infer_dim(p, level):
    for dim in range(1, 64):
        if total_words(dim, level) == p:
            return dim
    raise ValueError(f"flat length {p} matches no alphabet size at level {level}")


def stream_signatures(fine_grid, driver_values, coarse_grid, level):
    """Signature stream of time-augmented drivers sampled on a refined grid.

    fine_grid has n_fine+1 points including 0; driver_values has shape
    (nPaths, n_fine+1, d) (values, starting at the path's initial value).
    coarse_grid must be a subset of fine_grid sharing both endpoints; the
    sub-segments of each coarse interval are folded into its Chen factor.
    """
    fine_grid = np.asarray(fine_grid, dtype=np.float64)
    coarse_grid = np.asarray(coarse_grid, dtype=np.float64)
    driver_values = np.asarray(driver_values, dtype=np.float64)
    if driver_values.ndim == 2:
        driver_values = driver_values[..., None]
    m, npts, d = driver_values.shape
    if npts != len(fine_grid):
        raise GridError("driver values and refined grid have different lengths")
    n_fine = len(fine_grid) - 1
    n_coarse = len(coarse_grid) - 1
    if n_coarse < 1 or n_fine % n_coarse != 0:
        raise GridError("coarse grid does not evenly subdivide the refined grid")
    stride = n_fine // n_coarse
    if not np.allclose(fine_grid[::stride], coarse_grid, atol=1e-12):
        raise GridError("coarse grid points are not a subset of the refined grid")
    incr = np.empty((m, n_fine, d + 1))
    incr[:, :, 0] = np.diff(fine_grid)[None, :]
    incr[:, :, 1:] = np.diff(driver_values, axis=1)
    sigs = kernels.sig_chain(incr, d + 1, level, stride=stride)
    return SignatureStream(coarse_grid, sigs, level)
