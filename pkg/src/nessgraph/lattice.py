"""
Driven-dissipative spin lattice and generic Lindblad generator sets.

Sites of a hypercubic lattice are linearized in row-major order over
``axis_lengths``; site ``k`` (1-based) is the ``k``-th tensor factor.
"""

from dataclasses import dataclass, field
import itertools
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ShapeError, ValidationError
from .linalg import dagger, embed_site, local_operator

__all__ = [
    "LatticeSpec",
    "GeneratorSet",
    "REFERENCE_PARAMETERS",
    "chain",
    "bonds",
    "build_hamiltonian",
    "build_jumps",
    "effective_generator",
    "generator_set",
    "apply_gauge",
    "mix_jumps",
]

HERMITIAN_TOL = 1e-10

# Generic nonzero couplings used wherever a concrete instance of the lattice
# model is needed for pattern work.
REFERENCE_PARAMETERS = {"J": 1.0, "delta_x": 0.5, "delta_z": 0.3, "gamma": 1.0}


@dataclass(frozen=True)
class LatticeSpec:
    axis_lengths: tuple
    J: float = 1.0
    delta_x: float = 0.0
    delta_z: float = 0.0
    gammas: tuple = ()
    boundary: str = "open"

    def __post_init__(self):
        axes = tuple(int(a) for a in self.axis_lengths)
        object.__setattr__(self, "axis_lengths", axes)
        if not axes or any(a < 1 for a in axes):
            raise ValidationError(
                f"axis lengths must be positive integers, got {axes}")
        n = self.sites
        gammas = tuple(float(g) for g in self.gammas) or (1.0,) * n
        object.__setattr__(self, "gammas", gammas)
        if len(gammas) != n:
            raise ValidationError(
                f"expected {n} decay rates, got {len(gammas)}")
        if any(g < 0 for g in gammas):
            raise ValidationError("decay rates must be nonnegative")
        if self.boundary not in ("open", "periodic"):
            raise ValidationError(
                f"boundary must be 'open' or 'periodic', got {self.boundary!r}")

    @property
    def sites(self):
        return int(np.prod(self.axis_lengths))

    @property
    def dim(self):
        return 2 ** self.sites

    def to_dict(self):
        return {
            "axis_lengths": list(self.axis_lengths),
            "J": self.J,
            "delta_x": self.delta_x,
            "delta_z": self.delta_z,
            "gammas": list(self.gammas),
            "boundary": self.boundary,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(axis_lengths=tuple(d["axis_lengths"]), J=d["J"],
                   delta_x=d["delta_x"], delta_z=d["delta_z"],
                   gammas=tuple(d["gammas"]),
                   boundary=d.get("boundary", "open"))


def chain(n, J=None, delta_x=None, delta_z=None, gamma=None,
          boundary="open"):
    """One-dimensional chain of ``n`` sites, reference parameters by default."""
    ref = REFERENCE_PARAMETERS
    g = ref["gamma"] if gamma is None else gamma
    return LatticeSpec(
        axis_lengths=(n,),
        J=ref["J"] if J is None else J,
        delta_x=ref["delta_x"] if delta_x is None else delta_x,
        delta_z=ref["delta_z"] if delta_z is None else delta_z,
        gammas=(g,) * n,
        boundary=boundary,
    )


def bonds(spec):
    """Nearest-neighbour pairs ``(i, j)`` with ``i < j``, 1-based sites.

    Periodic wraparound is only added on axes of length >= 3; on an axis of
    length 2 the wrapped bond coincides with the direct one.
    """
    axes = spec.axis_lengths
    out = set()
    for coords in itertools.product(*(range(a) for a in axes)):
        i = int(np.ravel_multi_index(coords, axes))
        for ax, length in enumerate(axes):
            nxt = list(coords)
            if coords[ax] + 1 < length:
                nxt[ax] += 1
            elif spec.boundary == "periodic" and length >= 3:
                nxt[ax] = 0
            else:
                continue
            j = int(np.ravel_multi_index(nxt, axes))
            out.add((min(i, j) + 1, max(i, j) + 1))
    return sorted(out)


def _site_ops(n, sparse):
    plus = local_operator("sigma_plus")
    minus = local_operator("sigma_minus")
    x = local_operator("sigma_x")
    z = local_operator("sigma_z")
    emb = lambda op, k: embed_site(op, k, n, sparse=sparse)  # noqa: E731
    return ([emb(plus, k) for k in range(1, n + 1)],
            [emb(minus, k) for k in range(1, n + 1)],
            [emb(x, k) for k in range(1, n + 1)],
            [emb(z, k) for k in range(1, n + 1)])


def build_hamiltonian(spec, sparse=False):
    """Flip-flop hopping on lattice bonds plus on-site detuning and drive."""
    n = spec.sites
    plus, minus, x, z = _site_ops(n, sparse)
    if sparse:
        h = sp.csr_matrix((spec.dim, spec.dim), dtype=np.complex128)
    else:
        h = np.zeros((spec.dim, spec.dim), dtype=np.complex128)
    for i, j in bonds(spec):
        h = h + spec.J * (plus[i - 1] @ minus[j - 1]
                          + plus[j - 1] @ minus[i - 1])
    for k in range(n):
        h = h + spec.delta_z * z[k] + spec.delta_x * x[k]
    return h


def build_jumps(spec, sparse=False):
    """Spin-loss jumps ``sqrt(gamma_k)`` times the lowering operator at k."""
    n = spec.sites
    minus = local_operator("sigma_minus")
    return [np.sqrt(g) * embed_site(minus, k + 1, n, sparse=sparse).astype(
                np.complex128)
            for k, g in enumerate(spec.gammas)]


@dataclass(frozen=True)
class GeneratorSet:
    """Hamiltonian, jump operators and the effective generator.

    ``effective`` is ``H - (i/2) sum_l L_l^* L_l``.
    """
    hamiltonian: np.ndarray
    jumps: tuple
    effective: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    @property
    def yoshida_set(self):
        return [self.effective, *self.jumps]


def effective_generator(h, jumps, tol=HERMITIAN_TOL):
    """Assemble a :class:`GeneratorSet`, validating shapes and hermiticity."""
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ShapeError(f"Hamiltonian must be square, got {h.shape}")
    d = h.shape[0]
    js = []
    for k, l in enumerate(jumps):
        l = np.asarray(l, dtype=np.complex128)
        if l.shape != (d, d):
            raise ShapeError(
                f"jump {k} has shape {l.shape}, expected {(d, d)}")
        js.append(l)
    if not all(np.isfinite(m).all() for m in (h, *js)):
        raise ValidationError("generator entries must be finite")
    scale = max(1.0, float(np.abs(h).max(initial=0.0)))
    if np.abs(h - dagger(h)).max(initial=0.0) > tol * scale:
        raise ValidationError("Hamiltonian is not Hermitian within tolerance")
    k_eff = h.copy()
    for l in js:
        k_eff = k_eff - 0.5j * (dagger(l) @ l)
    return GeneratorSet(hamiltonian=h, jumps=tuple(js), effective=k_eff)


def generator_set(spec):
    """Dense generator set of the lattice model."""
    return effective_generator(build_hamiltonian(spec), build_jumps(spec))


def apply_gauge(gs, alphas: Sequence[complex], beta: float = 0.0):
    """Shift jumps by multiples of the identity, compensating in H.

    ``L_k -> L_k + alpha_k I`` and
    ``H -> H - (i/2) sum_k (conj(alpha_k) L_k - alpha_k L_k^*) + beta I``.
    The Liouvillian is unchanged.
    """
    alphas = list(alphas)
    if len(alphas) != len(gs.jumps):
        raise ValidationError(
            f"need {len(gs.jumps)} gauge parameters, got {len(alphas)}")
    d = gs.dim
    eye = np.eye(d, dtype=np.complex128)
    h = gs.hamiltonian + beta * eye
    for a, l in zip(alphas, gs.jumps):
        h = h - 0.5j * (np.conj(a) * l - a * dagger(l))
    h = 0.5 * (h + dagger(h))
    jumps = [l + a * eye for a, l in zip(alphas, gs.jumps)]
    return effective_generator(h, jumps)


def mix_jumps(gs, u, tol=1e-10):
    """Replace jumps by ``L_l -> sum_m u[l, m] L_m`` for unitary ``u``."""
    u = np.asarray(u, dtype=np.complex128)
    m = len(gs.jumps)
    if u.shape != (m, m):
        raise ShapeError(f"mixing matrix must be {m}x{m}, got {u.shape}")
    if m and np.abs(u @ dagger(u) - np.eye(m)).max() > tol:
        raise ValidationError("mixing matrix is not unitary")
    stacked = np.stack(gs.jumps) if m else np.zeros((0, gs.dim, gs.dim))
    mixed = np.einsum("lm,mij->lij", u, stacked)
    return GeneratorSet(hamiltonian=gs.hamiltonian, jumps=tuple(mixed),
                        effective=gs.effective)
