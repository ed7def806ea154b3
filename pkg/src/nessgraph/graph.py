"""
Support digraphs of matrices and their connectivity.

A matrix ``g`` induces a digraph with an edge ``i -> j`` whenever
``g[i, j] != 0``; a set of matrices induces the union of those edge sets.
Vertices are 1-based in the public API and 0-based in the arrays.

Strong connectivity, positivity of the reachability closure, primitivity of
the loop-augmented adjacency matrix and irreducibility all coincide; each has
its own implementation here so that they can be checked against each other.
"""

from collections import namedtuple
from dataclasses import dataclass
import re

import numpy as np
import scipy.sparse as sp

from .errors import ModelFormatError, ShapeError, ValidationError

__all__ = [
    "Digraph",
    "SccPartition",
    "support_digraph",
    "scc",
    "is_strongly_connected",
    "reachability_closure",
    "is_entrywise_positive",
    "primitivity_index",
    "condensation",
    "is_irreducible",
    "equivalence_suite",
    "EquivalenceResult",
    "to_dot",
    "parse_dot",
]

SUPPORT_TOL = 1e-12


class Digraph:
    """Immutable directed graph without self-loops."""

    __slots__ = ("vertex_count", "src", "dst", "_csr")

    def __init__(self, vertex_count, src=(), dst=()):
        if vertex_count < 1:
            raise ValidationError("a digraph needs at least one vertex")
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValidationError("src and dst must have equal length")
        if src.size and (min(src.min(), dst.min()) < 0
                         or max(src.max(), dst.max()) >= vertex_count):
            raise ValidationError("edge endpoint out of range")
        keep = src != dst
        codes = np.unique(src[keep] * vertex_count + dst[keep])
        self.vertex_count = int(vertex_count)
        self.src, self.dst = np.divmod(codes, vertex_count)
        self.src.flags.writeable = False
        self.dst.flags.writeable = False
        self._csr = None

    @classmethod
    def from_edges(cls, vertex_count, edges):
        """Build from 1-based ``(i, j)`` pairs; self-loops are dropped."""
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2) - 1
        return cls(vertex_count, e[:, 0], e[:, 1])

    @classmethod
    def from_adjacency(cls, adj):
        adj = sp.coo_matrix(adj) if sp.issparse(adj) else np.asarray(adj)
        if adj.shape[0] != adj.shape[1]:
            raise ShapeError(f"adjacency must be square, got {adj.shape}")
        if sp.issparse(adj):
            nz = adj.data != 0
            return cls(adj.shape[0], adj.row[nz], adj.col[nz])
        i, j = np.nonzero(adj)
        return cls(adj.shape[0], i, j)

    @property
    def edge_count(self):
        return int(self.src.size)

    @property
    def edges(self):
        return frozenset(zip((self.src + 1).tolist(), (self.dst + 1).tolist()))

    def successors(self):
        """CSR ``(indptr, indices)`` of out-neighbours."""
        if self._csr is None:
            order = np.lexsort((self.dst, self.src))
            counts = np.bincount(self.src, minlength=self.vertex_count)
            indptr = np.concatenate([[0], np.cumsum(counts)])
            self._csr = (indptr, self.dst[order])
        return self._csr

    def reversed(self):
        return Digraph(self.vertex_count, self.dst, self.src)

    def adjacency(self, loops=False):
        a = np.zeros((self.vertex_count, self.vertex_count), dtype=bool)
        a[self.src, self.dst] = True
        if loops:
            np.fill_diagonal(a, True)
        return a

    def permuted(self, perm):
        """Relabel vertex ``v`` (0-based) as ``perm[v]``."""
        perm = np.asarray(perm)
        return Digraph(self.vertex_count, perm[self.src], perm[self.dst])

    def __eq__(self, other):
        return (isinstance(other, Digraph)
                and self.vertex_count == other.vertex_count
                and np.array_equal(self.src, other.src)
                and np.array_equal(self.dst, other.dst))

    def __hash__(self):
        return hash((self.vertex_count, self.src.tobytes(), self.dst.tobytes()))

    def __repr__(self):
        return f"Digraph(vertices={self.vertex_count}, edges={self.edge_count})"


@dataclass(frozen=True)
class SccPartition:
    component_ids: np.ndarray
    component_count: int

    def components(self):
        """Vertex sets (1-based) grouped by component id."""
        groups = [[] for _ in range(self.component_count)]
        for v, c in enumerate(self.component_ids.tolist()):
            groups[c].append(v + 1)
        return [frozenset(g) for g in groups]


def _matrix_support(m, tol):
    if sp.issparse(m):
        m = sp.coo_matrix(m)
        vals = np.abs(m.data)
        scale = vals.max(initial=0.0)
        keep = (vals > tol * scale) & (vals > 0)
        return m.shape[0], m.row[keep], m.col[keep]
    m = np.asarray(m)
    a = np.abs(m)
    scale = a.max(initial=0.0)
    i, j = np.nonzero((a > tol * scale) & (a > 0))
    return m.shape[0], i, j


def support_digraph(matrices, tol=SUPPORT_TOL):
    """Union of the off-diagonal supports of a set of square matrices.

    An entry counts as nonzero when its modulus exceeds ``tol`` times the
    largest modulus in its own matrix.  The union is taken matrix by matrix,
    never on the sum, so cancellations cannot delete edges.
    """
    if sp.issparse(matrices) or isinstance(matrices, np.ndarray):
        matrices = [matrices]
    matrices = list(matrices)
    if not matrices:
        raise ValidationError("support_digraph needs at least one matrix")
    if tol < 0:
        raise ValidationError("tol must be nonnegative")
    dim = None
    srcs, dsts = [], []
    for k, m in enumerate(matrices):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"matrix {k} is not square: {m.shape}")
        n, i, j = _matrix_support(m, tol)
        if dim is None:
            dim = n
        elif n != dim:
            raise ShapeError(
                f"matrix {k} has dimension {n}, expected {dim}")
        srcs.append(i)
        dsts.append(j)
    return Digraph(dim, np.concatenate(srcs), np.concatenate(dsts))


def scc(g):
    """Tarjan's strongly connected components, iterative, O(V + E).

    Component ids are assigned in the order components are completed, which
    is a reverse topological order of the condensation.
    """
    n = g.vertex_count
    indptr, indices = g.successors()
    indptr = indptr.tolist()
    indices = indices.tolist()
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, indptr[root])]
        while work:
            v, ptr = work[-1]
            end = indptr[v + 1]
            descended = False
            while ptr < end:
                w = indices[ptr]
                ptr += 1
                if index[w] == -1:
                    work[-1] = (v, ptr)
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, indptr[w]))
                    descended = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
    return SccPartition(np.asarray(comp, dtype=np.int64), ncomp)


def is_strongly_connected(g):
    return scc(g).component_count == 1


def _reach_bitsets(g):
    # reach[v] is a Python int bitset of vertices reachable from v (itself
    # included); relaxation in reverse-index order until nothing changes.
    n = g.vertex_count
    indptr, indices = g.successors()
    indptr = indptr.tolist()
    indices = indices.tolist()
    reach = [1 << v for v in range(n)]
    changed = True
    while changed:
        changed = False
        for v in range(n - 1, -1, -1):
            r = reach[v]
            for w in indices[indptr[v]:indptr[v + 1]]:
                r |= reach[w]
            if r != reach[v]:
                reach[v] = r
                changed = True
    return reach


def reachability_closure(g, include_identity=True):
    """Boolean matrix ``R[u, v]``: is there a walk from u to v.

    With ``include_identity`` walks of length zero count, so this is the
    support of ``sum_{k>=0} A^k`` over the boolean semiring; otherwise only
    ``k >= 1``.  Path counts are never formed.
    """
    n = g.vertex_count
    nbytes = (n + 7) // 8
    reach = _reach_bitsets(g)
    if not include_identity:
        indptr, indices = g.successors()
        strict = []
        for v in range(n):
            r = 0
            for w in indices[indptr[v]:indptr[v + 1]].tolist():
                r |= reach[w]
            strict.append(r)
        reach = strict
    rows = [r.to_bytes(nbytes, "little") for r in reach]
    packed = np.frombuffer(b"".join(rows), dtype=np.uint8).reshape(n, nbytes)
    return np.unpackbits(packed, axis=1, count=n, bitorder="little").astype(bool)


def is_entrywise_positive(closure, with_identity=True):
    """True if every entry of the closure is set.

    With ``with_identity=True`` the identity is added first (the ``k = 0``
    term of the reachability sum); otherwise the closure is taken as is.
    """
    c = np.asarray(closure, dtype=bool)
    if not with_identity:
        return bool(c.all())
    c = c.copy()
    np.fill_diagonal(c, True)
    return bool(c.all())


def primitivity_index(g):
    """Smallest K with ``(I + A)^K > 0`` entrywise, or None.

    Boolean powers of the loop-augmented adjacency matrix are monotone, so
    the search stops as soon as a power repeats.  K never exceeds
    ``vertex_count ** 2``.
    """
    n = g.vertex_count
    d = g.adjacency(loops=True).astype(np.float32)
    p = d.copy()
    for k in range(1, n * n + 1):
        if p.all():
            return k
        nxt = (p @ d > 0).astype(np.float32)
        if np.array_equal(nxt, p):
            return None
        p = nxt
    return None


def condensation(g):
    """Kosaraju's two-pass DFS; returns (component ids, condensation edges).

    Kept independent of :func:`scc` so the two can cross-check each other.
    """
    n = g.vertex_count
    fwd_ptr, fwd_idx = (a.tolist() for a in g.successors())
    rev_ptr, rev_idx = (a.tolist() for a in g.reversed().successors())
    seen = [False] * n
    order = []
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        work = [(root, fwd_ptr[root])]
        while work:
            v, ptr = work.pop()
            if ptr < fwd_ptr[v + 1]:
                work.append((v, ptr + 1))
                w = fwd_idx[ptr]
                if not seen[w]:
                    seen[w] = True
                    work.append((w, fwd_ptr[w]))
            else:
                order.append(v)
    comp = [-1] * n
    c = 0
    for root in reversed(order):
        if comp[root] != -1:
            continue
        comp[root] = c
        todo = [root]
        while todo:
            v = todo.pop()
            for w in rev_idx[rev_ptr[v]:rev_ptr[v + 1]]:
                if comp[w] == -1:
                    comp[w] = c
                    todo.append(w)
        c += 1
    comp = np.asarray(comp, dtype=np.int64)
    cs, cd = comp[g.src], comp[g.dst]
    cross = cs != cd
    cedges = set(zip(cs[cross].tolist(), cd[cross].tolist()))
    return comp, cedges


def is_irreducible(g):
    """No simultaneous permutation brings the adjacency to block-triangular
    form, i.e. the condensation is a single node."""
    comp, _ = condensation(g)
    return int(comp.max()) == 0


EquivalenceResult = namedtuple(
    "EquivalenceResult",
    ["strongly_connected", "closure_positive", "primitive", "irreducible"])


def equivalence_suite(matrix, tol=SUPPORT_TOL):
    """Evaluate the four equivalent connectivity predicates of a matrix."""
    g = support_digraph([matrix], tol)
    res = EquivalenceResult(
        strongly_connected=is_strongly_connected(g),
        closure_positive=is_entrywise_positive(reachability_closure(g)),
        primitive=primitivity_index(g) is not None,
        irreducible=is_irreducible(g),
    )
    return res


def to_dot(g, name="G", positions=None, attrs=None):
    """Graphviz text, one ``i -> j;`` line per edge in sorted order.

    ``positions`` maps 1-based vertices to ``(x, y)`` and becomes neato
    ``pos`` pins.
    """
    lines = [f"digraph {name} {{"]
    for key, val in (attrs or {}).items():
        lines.append(f"  {key}={val};")
    if positions is not None:
        for v in range(1, g.vertex_count + 1):
            x, y = positions[v]
            lines.append(f'  {v} [pos="{x:.6f},{y:.6f}!"];')
    else:
        for v in range(1, g.vertex_count + 1):
            lines.append(f"  {v};")
    for i, j in sorted(g.edges):
        lines.append(f"  {i} -> {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_NODE = re.compile(r"^\s*(\d+)\s*(\[.*\])?\s*;\s*$")
_EDGE = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*(\[.*\])?\s*;\s*$")


def parse_dot(text):
    """Read back the subset of the dot language written by :func:`to_dot`."""
    vertices = set()
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        m = _EDGE.match(line)
        if m:
            i, j = int(m.group(1)), int(m.group(2))
            edges.append((i, j))
            vertices.update((i, j))
            continue
        m = _NODE.match(line)
        if m:
            vertices.add(int(m.group(1)))
    if not vertices:
        raise ModelFormatError("no vertices found in dot text")
    return Digraph.from_edges(max(vertices), edges)
