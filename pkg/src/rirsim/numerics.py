"""Complex dense linear algebra and seeded CN(0,1) sampling.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; every
public routine here validates shapes and finiteness and never mutates its
inputs. Factorisations go through LAPACK (``scipy.linalg.lu_factor``, which
is Gaussian elimination with partial row pivoting).
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg as sla

#: Pivot-ratio condition estimate above which a matrix is treated as singular.
COND_LIMIT = 1e12

ComplexMatrix = np.ndarray


class ShapeError(ValueError):
    """Operand dimensions violate an operation's contract."""


class Singular(np.linalg.LinAlgError):
    """Raised when a matrix is numerically singular.

    Attributes
    ----------
    cond : float
        The pivot-based condition estimate that tripped the limit
        (``inf`` for an exactly zero pivot).
    """

    def __init__(self, cond: float):
        super().__init__(f"matrix is numerically singular (pivot condition estimate {cond:.3g})")
        self.cond = cond


def rng_stream(seed: int, stream: int = 0, *substreams: int) -> np.random.Generator:
    """Return an independent generator for ``(seed, stream, *substreams)``.

    Identical keys give identical sequences across runs and platforms
    (PCG64 seeded through ``SeedSequence``).
    """
    key = [int(seed), int(stream), *map(int, substreams)]
    if min(key) < 0:
        raise ValueError("seed and stream ids must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))


def sample_cn01(rng: np.random.Generator, rows: int, cols: int) -> ComplexMatrix:
    """Draw a ``rows x cols`` matrix of i.i.d. circularly-symmetric CN(0,1).

    Real and imaginary parts each have variance 1/2.
    """
    if rows < 1 or cols < 1:
        raise ShapeError(f"sample_cn01 needs rows, cols >= 1, got {rows}x{cols}")
    z = rng.standard_normal((rows, cols, 2))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def as_matrix(a) -> ComplexMatrix:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(a: ComplexMatrix, op: str) -> None:
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{op} needs a square matrix, got {a.shape[0]}x{a.shape[1]}")


def mat_mul(a, b) -> ComplexMatrix:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return a @ b


def lu_factor(a) -> tuple[tuple[np.ndarray, np.ndarray], float]:
    """LU-factorise a square matrix with partial pivoting.

    Returns the scipy factor tuple together with the pivot condition
    estimate ``max|u_ii| / min|u_ii|``. Raises :class:`Singular` when the
    estimate exceeds :data:`COND_LIMIT`.
    """
    a = as_matrix(a)
    _square(a, "LU factorisation")
    if a.shape[0] == 0:
        return (a.copy(), np.zeros(0, dtype=np.int32)), 1.0
    # LAPACK reports exact zero pivots through a warning; the ratio below
    # catches them as well.
    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    small = pivots.min()
    cond = np.inf if small == 0.0 else float(pivots.max() / small)
    if not cond <= COND_LIMIT:
        raise Singular(cond)
    return (lu, piv), cond


def pivot_condition(a) -> float:
    """Pivot-ratio condition estimate of a square matrix (``inf`` if singular)."""
    try:
        return lu_factor(a)[1]
    except Singular as exc:
        return exc.cond


def mat_solve(a, b) -> ComplexMatrix:
    """Solve ``A X = B`` for square ``A``."""
    a, b = as_matrix(a), as_matrix(b)
    _square(a, "mat_solve")
    if a.shape[0] != b.shape[0]:
        raise ShapeError(f"mat_solve: A has {a.shape[0]} rows but B has {b.shape[0]}")
    factor, _ = lu_factor(a)
    return sla.lu_solve(factor, b, check_finite=False)


def mat_inverse(a) -> ComplexMatrix:
    a = as_matrix(a)
    _square(a, "mat_inverse")
    return mat_solve(a, np.eye(a.shape[0], dtype=np.complex128))


def mat_rank(a, tol: float = 1e-10) -> int:
    """Numerical rank by Gaussian elimination with complete pivoting.

    A pivot counts when its magnitude exceeds ``tol`` times the first
    (largest) pivot.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    w = as_matrix(a).copy()
    rows, cols = w.shape
    if w.size == 0:
        return 0
    first = np.abs(w).max()
    if first == 0.0:
        return 0
    rank = 0
    for k in range(min(rows, cols)):
        sub = np.abs(w[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= tol * first:
            break
        i += k
        j += k
        w[[k, i], :] = w[[i, k], :]
        w[:, [k, j]] = w[:, [j, k]]
        factors = w[k + 1:, k] / w[k, k]
        w[k + 1:, k:] -= np.outer(factors, w[k, k:])
        rank += 1
    return rank
