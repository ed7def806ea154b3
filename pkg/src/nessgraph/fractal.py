"""
The self-similar adjacency matrices of the spin-loss lattice.

``A_N`` is the sum of the lowering operators of N spins (the support of the
jump set), ``B_N = (sigma^+)^(x)N`` has its single entry in row 1, column
2^N, and ``C_N = A_N + B_N`` is the deformed adjacency matrix whose digraph
is strongly connected.  Identities such as ``A_N^N = N! (sigma^-)^(x)N`` are
checked with Python integers (object arrays), never floats.
"""

from dataclasses import asdict, dataclass, field
from math import factorial

import numpy as np
import scipy.sparse as sp

from .errors import LimitError, ValidationError
from .graph import (
    is_entrywise_positive,
    reachability_closure,
    scc,
    support_digraph,
)
from .lattice import REFERENCE_PARAMETERS, build_hamiltonian, build_jumps, chain
from .linalg import embed_site, kron_power, local_operator

__all__ = [
    "PATTERN_LIMIT",
    "EXACT_LIMIT",
    "FractalFamily",
    "CensusResult",
    "build_family",
    "exact_power",
    "boolean_power",
    "verify_nilpotency",
    "verify_block_recursion",
    "verify_hamiltonian_self_similarity",
    "verify_reachability_positivity",
    "reduced_reachability_support",
    "census",
    "ring_missing_links",
]

PATTERN_LIMIT = 12
# object-dtype integer matrices beyond 2^7 rows get slow
EXACT_LIMIT = 7


@dataclass(frozen=True)
class FractalFamily:
    sites: int
    a: sp.csr_matrix = field(repr=False)
    b: sp.csr_matrix = field(repr=False)
    c: sp.csr_matrix = field(repr=False)
    hamiltonian_part: sp.csr_matrix = field(repr=False)
    parameters: dict = field(default_factory=dict)

    @property
    def dim(self):
        return 2 ** self.sites


def _check_sites(n, limit):
    if not 1 <= n <= limit:
        raise LimitError(f"number of sites must lie in [1, {limit}], got {n}")


def lowering_sum(n):
    """``A_n`` as an exact sparse integer matrix."""
    minus = local_operator("sigma_minus")
    a = embed_site(minus, 1, n, sparse=True)
    for k in range(2, n + 1):
        a = a + embed_site(minus, k, n, sparse=True)
    return a.tocsr()


def build_family(n, limit=PATTERN_LIMIT):
    """Exact ``A_n, B_n, C_n`` plus the effective generator of the reference
    chain (J=1, dx=1/2, dz=3/10, gamma=1), all sparse."""
    _check_sites(n, limit)
    a = lowering_sum(n)
    b = kron_power(local_operator("sigma_plus"), n, sparse=True).tocsr()
    spec = chain(n)
    h = build_hamiltonian(spec, sparse=True)
    k_eff = h
    for l in build_jumps(spec, sparse=True):
        k_eff = k_eff - 0.5j * (l.conj().T @ l)
    return FractalFamily(sites=n, a=a, b=b, c=(a + b).tocsr(),
                         hamiltonian_part=sp.csr_matrix(k_eff),
                         parameters=dict(REFERENCE_PARAMETERS))


def _to_object(m):
    m = m.toarray() if sp.issparse(m) else np.asarray(m)
    return np.vectorize(int, otypes=[object])(m) if m.size else m.astype(object)


def exact_power(m, p):
    """``m**p`` with arbitrary-precision integer entries (p >= 0)."""
    m = _to_object(m)
    out = np.identity(m.shape[0], dtype=np.int64).astype(object)
    for _ in range(p):
        out = out.dot(m)
    return out


def boolean_power(m, p):
    """Support of ``m**p`` computed in the boolean semiring (sparse)."""
    base = sp.csr_matrix(m, dtype=np.int64)
    base.data = (base.data != 0).astype(np.int64)
    out = sp.identity(base.shape[0], dtype=np.int64, format="csr")
    for _ in range(p):
        out = (out @ base).tocsr()
        out.data = (out.data != 0).astype(np.int64)
        out.eliminate_zeros()
    return out


def _exact_guard(n):
    if n > EXACT_LIMIT:
        raise LimitError(
            f"exact integer checks are limited to {EXACT_LIMIT} sites")


def verify_nilpotency(fam):
    """``A^(N+1) = 0``, ``A^N = N! (sigma^-)^(x)N`` and no path in D(A_N)
    has more than N edges."""
    n = fam.sites
    _exact_guard(n)
    a = _to_object(fam.a)
    top = np.identity(a.shape[0], dtype=np.int64).astype(object)
    for _ in range(n):
        top = top.dot(a)
    target = factorial(n) * _to_object(
        kron_power(local_operator("sigma_minus"), n))
    exact_ok = (np.array_equal(top, target)
                and not np.any(top.dot(a) != 0))
    paths_ok = (boolean_power(fam.a, n).nnz > 0
                and boolean_power(fam.a, n + 1).nnz == 0)
    return bool(exact_ok and paths_ok)


def _blocks(m):
    h = m.shape[0] // 2
    return m[:h, :h], m[:h, h:], m[h:, :h], m[h:, h:]


def verify_block_recursion(n, max_power=None):
    """``A_(n+1)^P = [[A_n^P, 0], [P A_n^(P-1), A_n^P]]`` for P = 1..max_power.

    The lower-left block must also have the same support as ``A_n^(P-1)``.
    """
    _exact_guard(n + 1)
    if max_power is None:
        max_power = n + 1
    small = _to_object(lowering_sum(n))
    big = _to_object(lowering_sum(n + 1))
    eye = np.identity(small.shape[0], dtype=np.int64).astype(object)
    zero = np.zeros_like(small)
    for blk, want in zip(_blocks(big), (small, zero, eye, small)):
        if not np.array_equal(blk, want):
            return False
    big_p = np.identity(big.shape[0], dtype=np.int64).astype(object)
    small_prev = eye
    for p in range(1, max_power + 1):
        big_p = big_p.dot(big)
        small_p = small_prev.dot(small)
        tl, tr, bl, br = _blocks(big_p)
        ok = (np.array_equal(tl, small_p) and np.array_equal(br, small_p)
              and not np.any(tr != 0)
              and np.array_equal(bl, p * small_prev)
              and np.array_equal(bl != 0, small_prev != 0))
        if not ok:
            return False
        small_prev = small_p
    return True


def verify_hamiltonian_self_similarity(n, limit=PATTERN_LIMIT):
    """Support-level recursion of the effective generator K.

    Splitting K_(n+1) by the state of site 1, both diagonal blocks have the
    off-diagonal support of K_n, and the upper-right block is
    ``delta_x I + J sigma^-`` on the first remaining site (lower-left is its
    transpose).  Only supports are compared.
    """
    _check_sites(n + 1, limit)
    small = build_family(n, limit).hamiltonian_part.toarray() != 0
    big = build_family(n + 1, limit).hamiltonian_part.toarray() != 0
    np.fill_diagonal(small, False)
    coupling = (np.eye(2 ** n, dtype=bool)
                | (embed_site(local_operator("sigma_minus"), 1, n) != 0))
    tl, tr, bl, br = _blocks(big)
    np.fill_diagonal(tl, False)
    np.fill_diagonal(br, False)
    return bool(np.array_equal(tl, small) and np.array_equal(br, small)
                and np.array_equal(tr, coupling)
                and np.array_equal(bl, coupling.T))


def reduced_reachability_support(fam):
    """Support of ``I + sum_{k<=2N} sum_{j<=k} A^(k-j) B A^(j-1)
    + sum_{k<=N} A^k``, the nilpotency-reduced reachability sum."""
    n = fam.sites
    a = fam.a.toarray().astype(bool).astype(np.int64)
    b = fam.b.toarray().astype(bool).astype(np.int64)
    dim = a.shape[0]
    powers = [np.eye(dim, dtype=np.int64)]
    for _ in range(2 * n):
        nxt = powers[-1] @ a
        powers.append((nxt != 0).astype(np.int64))
    out = np.eye(dim, dtype=bool)
    for k in range(1, 2 * n + 1):
        for j in range(1, k + 1):
            out |= (powers[k - j] @ b @ powers[j - 1]) != 0
    for k in range(1, n + 1):
        out |= powers[k] != 0
    return out


def verify_reachability_positivity(n, limit=PATTERN_LIMIT):
    """The boolean closure of D(C_n) is all-true; for n <= 4 the reduced
    double sum has the same support."""
    fam = build_family(n, limit)
    closure = reachability_closure(support_digraph([fam.c]))
    ok = is_entrywise_positive(closure)
    if n <= 4:
        ok = ok and np.array_equal(reduced_reachability_support(fam), closure)
    return bool(ok)


def ring_missing_links(g, step=1):
    """Ring pairs ``(v, v + step mod V)`` with no edge in either direction."""
    n = g.vertex_count
    edges = g.edges
    missing = 0
    for v in range(1, n + 1):
        w = (v - 1 + step) % n + 1
        if (v, w) not in edges and (w, v) not in edges:
            missing += 1
    return missing


@dataclass
class CensusResult:
    sites: int
    lindblad_missing: int
    hamiltonian_missing: int
    lindblad_missing_second: int
    hamiltonian_missing_second: int
    lindblad_unidirectional: bool
    hamiltonian_symmetric: bool
    lindblad_antipodal: bool
    hamiltonian_antipodal: bool

    @property
    def matches_pattern(self):
        n = self.sites
        return (self.lindblad_missing == 2 ** (n - 1)
                and self.hamiltonian_missing == 2 ** (n - 2)
                and self.lindblad_unidirectional
                and self.hamiltonian_symmetric
                and self.lindblad_antipodal
                and self.hamiltonian_antipodal)

    def to_dict(self):
        d = asdict(self)
        d["matches_pattern"] = self.matches_pattern
        return d


def census(n, limit=PATTERN_LIMIT):
    """Missing ring links, directionality and antipodal links of the jump
    part (support of A_n) and the Hamiltonian part (support of K)."""
    if n < 2:
        raise ValidationError("the census is defined for n >= 2 sites")
    fam = build_family(n, limit)
    lind = support_digraph([fam.a])
    ham = support_digraph([fam.hamiltonian_part])
    le, he = lind.edges, ham.edges
    half = 2 ** (n - 1)
    return CensusResult(
        sites=n,
        lindblad_missing=ring_missing_links(lind, 1),
        hamiltonian_missing=ring_missing_links(ham, 1),
        lindblad_missing_second=ring_missing_links(lind, 2),
        hamiltonian_missing_second=ring_missing_links(ham, 2),
        lindblad_unidirectional=not any((j, i) in le for i, j in le),
        hamiltonian_symmetric=all((j, i) in he for i, j in he),
        lindblad_antipodal=all((v, v + half) in le or (v + half, v) in le
                               for v in range(1, half + 1)),
        hamiltonian_antipodal=all((v, v + half) in he and (v + half, v) in he
                                  for v in range(1, half + 1)),
    )


def scc_counts(n, limit=PATTERN_LIMIT):
    """SCC counts of D(A_n) and D(C_n)."""
    fam = build_family(n, limit)
    return (scc(support_digraph([fam.a])).component_count,
            scc(support_digraph([fam.c])).component_count)
