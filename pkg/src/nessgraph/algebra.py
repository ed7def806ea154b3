"""
Operator-algebra computations: generated algebras, Lie closures, commutants,
the Kossakowski matrix and cyclic-vector (nonderogatory) tests.

Operator spaces are handled as vectors in C^(d*d) (column stacking); span
growth keeps an orthonormal basis and only adds candidates whose residual
after projection exceeds ``tol`` relative to their norm.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, ValidationError
from .linalg import dagger, nullspace_basis, numerical_rank, singular_values

__all__ = [
    "OperatorSet",
    "KossakowskiMatrix",
    "generated_algebra_dim",
    "lie_closure_dim",
    "commutant_dim",
    "gell_mann_basis",
    "kossakowski_from_jumps",
    "criterion1",
    "krylov_dim",
    "nonderogatory_check",
    "cyclic_vector",
    "span_has_nonderogatory",
    "simple_spectrum_witness",
]

SPAN_TOL = 1e-9


@dataclass(frozen=True)
class OperatorSet:
    members: tuple
    star_closed: bool = False
    dim: int = field(init=False)

    def __post_init__(self):
        ms = tuple(np.asarray(m, dtype=np.complex128) for m in self.members)
        if not ms:
            raise ValidationError("operator set must be nonempty")
        d = ms[0].shape[0]
        for m in ms:
            if m.shape != (d, d):
                raise ShapeError(f"operator of shape {m.shape} in a set of "
                                 f"{d}x{d} operators")
        object.__setattr__(self, "members", ms)
        object.__setattr__(self, "dim", d)

    @classmethod
    def of(cls, members, with_adjoints=False):
        ms = [np.asarray(m, dtype=np.complex128) for m in members]
        if with_adjoints:
            ms = ms + [dagger(m) for m in ms]
        return cls(tuple(ms), star_closed=with_adjoints)


def _as_set(s):
    return s if isinstance(s, OperatorSet) else OperatorSet.of(s)


class _Span:
    """Orthonormal basis of a growing subspace of C^n."""

    def __init__(self, n, tol):
        self.q = np.zeros((n, 0), dtype=np.complex128)
        self.tol = tol

    def add(self, cands, normalize=False):
        """Add the columns of ``cands``; return the new orthonormal columns.

        Columns are compared against ``tol`` as given, so callers must
        scale them; ``normalize`` rescales each column to unit norm first.
        """
        if cands.shape[1] == 0:
            return cands
        if normalize:
            norms = np.linalg.norm(cands, axis=0)
            cands = cands[:, norms > 0] / norms[norms > 0]
            if cands.shape[1] == 0:
                return cands
        for _ in range(2):
            cands = cands - self.q @ (self.q.conj().T @ cands)
        # rank-revealing step on the residual block
        u, s, _ = np.linalg.svd(cands, full_matrices=False)
        keep = s > self.tol
        if not keep.any():
            return np.zeros((cands.shape[0], 0), dtype=np.complex128)
        new = u[:, keep]
        new = new - self.q @ (self.q.conj().T @ new)
        new, _ = np.linalg.qr(new)
        self.q = np.hstack([self.q, new])
        return new

    @property
    def dim(self):
        return self.q.shape[1]


def _vec(m):
    return m.reshape(-1, order="F")


def _unvec(v, d):
    return v.reshape(d, d, order="F")


def _closure(gens, product, tol):
    d = gens[0].shape[0]
    span = _Span(d * d, tol)
    fresh = span.add(np.stack([_vec(g) for g in gens], axis=1),
                     normalize=True)
    # products with a unit basis element are scaled by the generator norm
    # only, so rounding noise in a vanishing product stays below tol
    gens = [g / np.linalg.norm(g) for g in gens if np.linalg.norm(g) > 0]
    while fresh.shape[1]:
        cands = [_vec(product(g, _unvec(fresh[:, k], d)))
                 for k in range(fresh.shape[1]) for g in gens]
        fresh = span.add(np.stack(cands, axis=1))
    return span.dim


def generated_algebra_dim(s, tol=SPAN_TOL):
    """Dimension of the (non-unital) associative algebra generated by ``s``.

    The algebra is the span of all nonempty words in the generators; it is
    grown by left-multiplying freshly added basis elements by every generator
    until the span stops growing.  Adjoin the identity to ``s`` explicitly
    for the unital algebra.
    """
    s = _as_set(s)
    return _closure(list(s.members), lambda g, b: g @ b, tol)


def lie_closure_dim(s, tol=SPAN_TOL):
    """Dimension of the Lie algebra generated by ``s`` under commutators."""
    s = _as_set(s)
    return _closure(list(s.members), lambda g, b: g @ b - b @ g, tol)


def commutant_dim(s, tol=None):
    """Dimension of ``{X : [X, g] = 0 for all g in s}``.

    Solved as the null space of the stacked maps ``X -> gX - Xg``; with
    column stacking each map is ``I (x) g - g^T (x) I``.  ``tol`` is relative
    to the largest singular value.
    """
    s = _as_set(s)
    d = s.dim
    eye = np.eye(d)
    if d <= 16:
        m = np.vstack([np.kron(eye, g) - np.kron(g.T, eye)
                       for g in s.members])
        sv = singular_values(m)
    else:
        # Gram matrix sum_g B_g^* B_g in closed form, with
        # B_g^* B_g = I(x)g^*g + conj(g)g^T (x) I - g^T(x)g^* - conj(g)(x)g
        gram = np.zeros((d * d, d * d), dtype=np.complex128)
        left = np.zeros((d, d), dtype=np.complex128)
        right = np.zeros((d, d), dtype=np.complex128)
        for g in s.members:
            left += dagger(g) @ g
            right += g.conj() @ g.T
            gram -= np.kron(g.T, dagger(g))
            gram -= np.kron(g.conj(), g)
        gram += np.kron(eye, left) + np.kron(right, eye)
        ev = np.linalg.eigvalsh(gram)[::-1]
        sv = np.sqrt(np.clip(ev, 0.0, None))
    smax = sv[0] if sv.size else 0.0
    if smax == 0.0:
        return d * d
    if tol is None:
        tol = 1e-7 if d > 16 else 1e-10
    return int(d * d - np.count_nonzero(sv > tol * smax))


def gell_mann_basis(d):
    """Traceless Hermitian basis of d x d matrices, orthonormal under
    ``<A, B> = tr(A^* B)``.

    Order: for each pair ``j < k`` the symmetric then antisymmetric element,
    followed by the diagonal elements.  For d = 2 this is
    ``(sigma_x, sigma_y, sigma_z) / sqrt(2)``.
    """
    basis = []
    r2 = np.sqrt(2.0)
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=np.complex128)
            sym[j, k] = sym[k, j] = 1 / r2
            anti = np.zeros((d, d), dtype=np.complex128)
            anti[j, k] = -1j / r2
            anti[k, j] = 1j / r2
            basis.extend([sym, anti])
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        basis.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(np.complex128))
    return basis


@dataclass(frozen=True)
class KossakowskiMatrix:
    entries: np.ndarray

    @property
    def size(self):
        return self.entries.shape[0]

    def kernel_dim(self, tol=None):
        return self.size - numerical_rank(self.entries, tol)


def kossakowski_from_jumps(jumps):
    """Coefficient matrix ``C = sum_l v_l v_l^*`` of the jumps in the
    traceless Gell-Mann basis (trace parts are discarded)."""
    jumps = [np.asarray(l, dtype=np.complex128) for l in jumps]
    if not jumps:
        raise ValidationError("need at least one jump operator")
    d = jumps[0].shape[0]
    basis = gell_mann_basis(d)
    # v[k] = tr(F_k^* L)
    fmat = np.stack([_vec(f) for f in basis], axis=0).conj()
    c = np.zeros((d * d - 1, d * d - 1), dtype=np.complex128)
    for l in jumps:
        if l.shape != (d, d):
            raise ShapeError("jump operators must share one dimension")
        v = fmat @ _vec(l)
        c += np.outer(v, v.conj())
    return KossakowskiMatrix(c)


def criterion1(k, hilbert_dim, tol=None):
    """Kernel dimension of C strictly below half the Hilbert dimension."""
    return k.kernel_dim(tol) < hilbert_dim / 2


def krylov_dim(m, c, tol=1e-8):
    """Dimension of the Krylov space of ``m`` started at ``c``.

    Arnoldi with full reorthogonalization; the iteration stops when the new
    direction is below ``tol`` times ``max(|m|, 1)`` in norm.
    """
    m = np.asarray(m, dtype=np.complex128)
    d = m.shape[0]
    scale = max(np.linalg.norm(m, 2), 1.0)
    q = np.zeros((d, 0), dtype=np.complex128)
    v = np.asarray(c, dtype=np.complex128)
    nv = np.linalg.norm(v)
    if nv == 0:
        return 0
    v = v / nv
    while q.shape[1] < d:
        q = np.hstack([q, v[:, None]])
        w = m @ v
        for _ in range(2):
            w = w - q @ (q.conj().T @ w)
        nw = np.linalg.norm(w)
        if nw <= tol * scale:
            break
        v = w / nw
    return q.shape[1]


def _basis_vector(d, k):
    e = np.zeros(d, dtype=np.complex128)
    e[k] = 1.0
    return e


def cyclic_vector(m, trials=8, seed=0, tol=1e-8):
    """A vector whose Krylov orbit under ``m`` spans everything, or None.

    Standard basis vectors are tried first, in order, so that simple
    witnesses come back in their simplest form; then ``trials`` random
    complex Gaussian vectors.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"matrix must be square, got {m.shape}")
    d = m.shape[0]
    for k in range(d):
        e = _basis_vector(d, k)
        if krylov_dim(m, e, tol) == d:
            return e
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        c = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        if krylov_dim(m, c, tol) == d:
            return c
    return None


def nonderogatory_check(m, trials=8, seed=0, tol=1e-8):
    """Randomized test that minimal and characteristic polynomials agree.

    A nonderogatory matrix has a cyclic vector and generic random vectors are
    cyclic, so a miss on every one of ``trials`` draws is reported as False.
    This can be a false negative only with probability zero in exact
    arithmetic; numerically it needs well-separated eigenvalues relative to
    ``tol``.  A True answer is always backed by an explicit witness.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"matrix must be square, got {m.shape}")
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    d = m.shape[0]
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        c = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        if krylov_dim(m, c, tol) == d:
            return True
    return False


def _members(gs):
    if hasattr(gs, "yoshida_set"):
        return gs.yoshida_set
    if isinstance(gs, OperatorSet):
        return list(gs.members)
    return [np.asarray(m, dtype=np.complex128) for m in gs]


def _random_combinations(members, trials, seed):
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        coeffs = rng.standard_normal(len(members))
        yield coeffs, sum(c * m for c, m in zip(coeffs, members))


def span_has_nonderogatory(gs, trials=8, seed=0, tol=1e-8):
    """Does a random real combination of the generators pass
    :func:`nonderogatory_check`?  Accepts a GeneratorSet (uses
    ``{K, L_1, ..., L_m}``) or any sequence of matrices."""
    members = _members(gs)
    for k, (_, w) in enumerate(_random_combinations(members, trials, seed)):
        if nonderogatory_check(w, trials=1, seed=seed + k, tol=tol):
            return True
    return False


def simple_spectrum_witness(gs, trials=8, seed=0, gap_tol=1e-6,
                            cond_limit=1e8):
    """Find a combination of the generators with pairwise distinct
    eigenvalues and a well-conditioned eigenbasis.

    Returns ``(coefficients, eigenvalues, eigenvectors)`` or None.  Such a
    matrix is nonderogatory and diagonalizable, and every subspace invariant
    under the generator set is spanned by some of its eigenvectors.
    """
    members = _members(gs)
    for coeffs, w in _random_combinations(members, trials, seed):
        scale = max(np.linalg.norm(w, 2), 1e-300)
        vals, vecs = np.linalg.eig(w)
        if len(vals) > 1:
            gaps = np.abs(vals[:, None] - vals[None, :])
            np.fill_diagonal(gaps, np.inf)
            if gaps.min() <= gap_tol * scale:
                continue
        if np.linalg.cond(vecs) > cond_limit:
            continue
        return coeffs, vals, vecs
    return None
