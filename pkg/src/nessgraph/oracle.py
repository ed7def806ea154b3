"""
Brute-force Liouvillian oracle.

The Lindbladian ``L(rho) = -i[H, rho] + sum_l (L_l rho L_l^* - {L_l^* L_l, rho}/2)``
is written as a d^2 x d^2 matrix acting on column-stacked density matrices,
``vec(A X B) = (B^T (x) A) vec(X)``.  Its kernel is the space of stationary
states.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InconsistencyError, LimitError, NumericalError
from .linalg import dagger, nullspace_basis, singular_values

__all__ = [
    "ORACLE_DIM_LIMIT",
    "LiouvillianMatrix",
    "SteadyStateResult",
    "ConsistencyRecord",
    "vectorize_liouvillian",
    "steady_states",
    "verify_against_criteria",
    "vec",
    "unvec",
]

ORACLE_DIM_LIMIT = 32
KERNEL_TOL = 1e-9
STATE_TOL = 1e-8


def vec(m):
    return np.asarray(m).reshape(-1, order="F")


def unvec(v, d):
    return np.asarray(v).reshape(d, d, order="F")


@dataclass(frozen=True)
class LiouvillianMatrix:
    """``scale`` bounds the norm of the exact superoperator (from the
    generator norms); tolerances are taken relative to it so that a matrix
    that is zero up to rounding is recognized as zero."""
    dim: int
    matrix: np.ndarray = field(repr=False)
    scale: float = 0.0

    def __post_init__(self):
        if not self.scale:
            object.__setattr__(self, "scale",
                               float(np.linalg.norm(self.matrix, 2)))

    def apply(self, rho):
        return unvec(self.matrix @ vec(rho), self.dim)

    def trace_erasure_residual(self):
        """Norm of ``vec(I)^T L`` relative to the matrix norm."""
        row = vec(np.eye(self.dim)) @ self.matrix
        norm = max(np.linalg.norm(self.matrix), self.scale)
        return float(np.linalg.norm(row) / norm) if norm else 0.0


def vectorize_liouvillian(gs, limit=ORACLE_DIM_LIMIT):
    d = gs.dim
    if d > limit:
        raise LimitError(
            f"Hilbert dimension {d} exceeds the oracle limit {limit}; the "
            f"superoperator would be {d * d}x{d * d}.  Raise the limit "
            f"explicitly or skip the oracle.")
    eye = np.eye(d)
    h = gs.hamiltonian
    m = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    scale = 2 * np.linalg.norm(h, 2)
    for l in gs.jumps:
        ldl = dagger(l) @ l
        m = m + np.kron(l.conj(), l) - 0.5 * np.kron(eye, ldl) \
            - 0.5 * np.kron(ldl.T, eye)
        scale += 2 * np.linalg.norm(l, 2) ** 2
    return LiouvillianMatrix(d, m, float(scale))


@dataclass
class SteadyStateResult:
    """Stationary states found in the Liouvillian kernel.

    ``states[0]`` is the canonical state: the image of the maximally mixed
    state under the spectral projection onto the kernel, which has the
    largest support of any stationary state.  ``faithful`` is decided on it.
    """
    kernel_dim: int
    states: list
    faithful: bool
    min_eigenvalue: float
    residual: float
    singular_gap: Optional[float] = None

    @property
    def state(self):
        return self.states[0]


def _hermitize(m):
    return 0.5 * (m + dagger(m))


def steady_states(lm, tol=KERNEL_TOL, state_tol=STATE_TOL):
    """Kernel dimension, a basis of stationary states and faithfulness.

    ``tol`` is the null-space threshold relative to the largest singular
    value of the superoperator.  ``state_tol`` is the eigenvalue a state
    needs to exceed to count as full rank.
    """
    d = lm.dim
    m = lm.matrix
    s = singular_values(m)
    smax = max(s[0], lm.scale) if s.size else lm.scale
    right = nullspace_basis(m, tol * smax)
    left = nullspace_basis(dagger(m), tol * smax)
    k = right.shape[1]
    if k == 0 or left.shape[1] != k:
        raise NumericalError(
            "left and right kernels of the Liouvillian disagree",
            {"right": k, "left": left.shape[1],
             "smallest_singular_values": s[-4:].tolist()})
    gap = float(s[-k - 1] / smax) if k < s.size and smax else None

    # Spectral projection P = R (L^* R)^{-1} L^*; zero is a semisimple
    # eigenvalue of any Lindbladian, so L^* R is invertible.
    overlap = dagger(left) @ right
    try:
        coeffs = np.linalg.solve(overlap, dagger(left) @ vec(np.eye(d) / d))
    except np.linalg.LinAlgError as exc:
        raise NumericalError("kernel projection is singular",
                             {"kernel_dim": k}) from exc
    canonical = _hermitize(unvec(right @ coeffs, d))
    canonical = canonical / np.trace(canonical).real
    evals = np.linalg.eigvalsh(canonical)
    min_eig = float(evals[0])
    faithful = min_eig > state_tol

    states = [canonical]
    if k > 1:
        states.extend(_extra_states(right, canonical, d, k, state_tol))
    residual = max(float(np.linalg.norm(lm.apply(r)) / max(smax, 1e-300))
                   for r in states)
    return SteadyStateResult(kernel_dim=k, states=states, faithful=faithful,
                             min_eigenvalue=min_eig, residual=residual,
                             singular_gap=gap)


def _real_span(mats, d, rank):
    # Orthonormal (over the reals) basis of a span of Hermitian matrices.
    real = np.stack([np.concatenate([vec(h).real, vec(h).imag])
                     for h in mats], axis=1)
    u, _, _ = np.linalg.svd(real, full_matrices=False)
    n = d * d
    return [_hermitize(unvec(u[:n, j] + 1j * u[n:, j], d))
            for j in range(rank)]


def _extra_states(right, canonical, d, k, state_tol):
    # The kernel is closed under the adjoint, so it has a Hermitian basis.
    # Its traceless directions x keep canonical + eps * x positive for small
    # eps because the canonical state has maximal support.
    herm = []
    for col in right.T:
        x = unvec(col, d)
        herm += [_hermitize(x), _hermitize(-1j * x)]
    basis = _real_span(herm, d, k)
    traceless = [x - np.trace(x).real * canonical for x in basis]
    dirs = _real_span(traceless, d, k - 1)
    ev, vecs = np.linalg.eigh(canonical)
    support = vecs[:, ev > state_tol]
    pos = ev[ev > state_tol].min()
    out = []
    for x in dirs:
        x = support @ (dagger(support) @ x @ support) @ dagger(support)
        eps = 0.5 * pos / max(np.linalg.norm(x, 2), 1e-300)
        rho = canonical + eps * x
        out.append(rho / np.trace(rho).real)
    return out


@dataclass
class ConsistencyRecord:
    consistent: bool
    checks: list

    def to_dict(self):
        return {"consistent": self.consistent, "checks": self.checks}

    @classmethod
    def from_dict(cls, d):
        return cls(consistent=d["consistent"], checks=list(d["checks"]))


def verify_against_criteria(result, verdicts, strict=False):
    """Check every implication a satisfied criterion makes about the oracle.

    ``verdicts`` is an iterable of objects with ``name``, ``status``,
    ``implies_uniqueness`` and ``implies_faithful_uniqueness``.  A satisfied
    sufficient criterion needs kernel dimension 1; criteria that promise a
    faithful state also need the canonical state to be full rank.
    """
    checks = []
    for v in verdicts:
        if v.status != "satisfied":
            checks.append({"criterion": v.name, "status": v.status,
                           "passed": True,
                           "detail": "criterion not satisfied; no claim"})
            continue
        ok = True
        detail = []
        if v.implies_uniqueness and result.kernel_dim != 1:
            ok = False
            detail.append(f"claims uniqueness but kernel_dim="
                          f"{result.kernel_dim}")
        if v.implies_faithful_uniqueness and not result.faithful:
            ok = False
            detail.append(f"claims a faithful state but min eigenvalue is "
                          f"{result.min_eigenvalue:.3e}")
        checks.append({"criterion": v.name, "status": v.status,
                       "passed": ok,
                       "detail": "; ".join(detail) or "confirmed by oracle"})
    record = ConsistencyRecord(all(c["passed"] for c in checks), checks)
    if strict and not record.consistent:
        bad = [c for c in checks if not c["passed"]]
        raise InconsistencyError(
            "criteria contradict the Liouvillian kernel: "
            + "; ".join(f"{c['criterion']}: {c['detail']}" for c in bad),
            record)
    return record
