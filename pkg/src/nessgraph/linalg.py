"""
Dense matrix kernel for spin operators.

Matrices are plain numpy arrays.  Integer-valued operators are kept in an
integer dtype so that sums, products and Kronecker products stay exact;
everything else is ``complex128``.

Basis convention: the excited state comes first, so ``sigma_minus`` has its
single nonzero entry in row 2, column 1 and every sum of embedded lowering
operators is strictly lower triangular.
"""

import enum
from functools import reduce

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import NumericalError, ShapeError, ValidationError

__all__ = [
    "LocalOperatorKind",
    "local_operator",
    "identity",
    "is_exact",
    "kron",
    "kron_power",
    "embed_site",
    "dagger",
    "default_tol",
    "singular_values",
    "numerical_rank",
    "nullspace_basis",
]


class LocalOperatorKind(str, enum.Enum):
    IDENTITY = "identity"
    SIGMA_X = "sigma_x"
    SIGMA_Y = "sigma_y"
    SIGMA_Z = "sigma_z"
    SIGMA_PLUS = "sigma_plus"
    SIGMA_MINUS = "sigma_minus"


_SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=np.int64)
_SIGMA_PLUS = _SIGMA_MINUS.T.copy()

_LOCAL = {
    LocalOperatorKind.IDENTITY: np.eye(2, dtype=np.int64),
    LocalOperatorKind.SIGMA_MINUS: _SIGMA_MINUS,
    LocalOperatorKind.SIGMA_PLUS: _SIGMA_PLUS,
    LocalOperatorKind.SIGMA_X: _SIGMA_PLUS + _SIGMA_MINUS,
    LocalOperatorKind.SIGMA_Y: -1j * _SIGMA_PLUS + 1j * _SIGMA_MINUS,
    LocalOperatorKind.SIGMA_Z: _SIGMA_PLUS @ _SIGMA_MINUS - _SIGMA_MINUS @ _SIGMA_PLUS,
}


def local_operator(kind):
    """Return the 2x2 matrix of a single-spin operator.

    ``kind`` is a :class:`LocalOperatorKind` or its string value.  All kinds
    except ``sigma_y`` come back with an integer dtype.
    """
    kind = LocalOperatorKind(kind)
    return _LOCAL[kind].copy()


def identity(dim, dtype=np.int64):
    return np.eye(dim, dtype=dtype)


def is_exact(m):
    """True if ``m`` holds integer values with no imaginary part."""
    m = np.asarray(m)
    if m.dtype.kind in "iub" or m.dtype == object:
        return True
    if m.dtype.kind == "c":
        if np.any(m.imag != 0):
            return False
        m = m.real
    return bool(np.all(np.isfinite(m)) and np.all(m == np.round(m)))


def _check_square(m, name="matrix"):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {m.shape}")


def kron(a, b):
    """Kronecker product of two square matrices (dense or scipy.sparse)."""
    if sp.issparse(a) or sp.issparse(b):
        _check_square(a, "a")
        _check_square(b, "b")
        return sp.kron(a, b, format="csr")
    a = np.asarray(a)
    b = np.asarray(b)
    _check_square(a, "a")
    _check_square(b, "b")
    return np.kron(a, b)


def kron_power(m, n, sparse=False):
    """n-fold Kronecker power of ``m`` (n >= 1)."""
    if n < 1:
        raise ValidationError(f"Kronecker power needs n >= 1, got {n}")
    if sparse:
        m = sp.csr_matrix(m)
    return reduce(kron, [m] * n)


def embed_site(op, site, total_sites, sparse=False):
    """Place a 2x2 operator at ``site`` (1-based) of a chain of spins.

    Returns ``I^(site-1) (x) op (x) I^(total_sites-site)``.  With
    ``sparse=True`` the result is a CSR matrix, which is what pattern-scale
    callers (thousands of basis states) should ask for.
    """
    op = np.asarray(op)
    if op.shape != (2, 2):
        raise ShapeError(f"embed_site expects a 2x2 operator, got {op.shape}")
    if total_sites < 1 or not 1 <= site <= total_sites:
        raise ValidationError(
            f"site must lie in [1, {total_sites}], got {site}")
    left = 2 ** (site - 1)
    right = 2 ** (total_sites - site)
    if sparse:
        out = sp.kron(sp.identity(left, dtype=op.dtype, format="csr"),
                      sp.csr_matrix(op), format="csr")
        return sp.kron(out, sp.identity(right, dtype=op.dtype, format="csr"),
                       format="csr")
    return np.kron(np.kron(np.eye(left, dtype=op.dtype), op),
                   np.eye(right, dtype=op.dtype))


def dagger(m):
    return m.conj().T


def singular_values(m):
    return _svd(np.asarray(m), compute_uv=False)


def _svd(m, compute_uv=True):
    if not np.all(np.isfinite(m)):
        raise NumericalError("matrix contains non-finite entries",
                             {"shape": m.shape})
    for driver in ("gesdd", "gesvd"):
        try:
            return scipy.linalg.svd(m, compute_uv=compute_uv,
                                    full_matrices=True,
                                    lapack_driver=driver)
        except (np.linalg.LinAlgError, ValueError) as exc:
            last = exc
    raise NumericalError(
        "singular value decomposition did not converge",
        {"shape": m.shape, "norm": float(np.linalg.norm(m)),
         "error": str(last)})


def default_tol(m, s=None):
    """Relative rank threshold ``max(shape) * eps * sigma_max``."""
    m = np.asarray(m)
    if s is None:
        s = singular_values(m)
    smax = s[0] if len(s) else 0.0
    eps = np.finfo(np.float64).eps
    return max(m.shape) * eps * smax


def numerical_rank(m, tol=None):
    """Number of singular values strictly above ``tol``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0
    s = singular_values(m)
    if tol is None:
        tol = default_tol(m, s)
    elif tol < 0:
        raise ValidationError("tol must be nonnegative")
    return int(np.count_nonzero(s > tol))


def nullspace_basis(m, tol=None):
    """Orthonormal basis of the (numerical) null space of ``m``.

    Returns an array of shape ``(ncols, nullity)`` whose columns span every
    right-singular direction with singular value at or below ``tol``.
    """
    m = np.asarray(m)
    if tol is not None and tol < 0:
        raise ValidationError("tol must be nonnegative")
    _, s, vh = _svd(m)
    if tol is None:
        tol = default_tol(m, s)
    rank = int(np.count_nonzero(s > tol))
    return vh[rank:].conj().T
