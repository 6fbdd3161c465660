"""Heisenberg-Weyl displacement operators over GF(q).

The computational basis |x> is indexed by the integer encoding of x.
Displacements are labelled by PhasePoints u = (u1, u2) and stored densely;
the flat label index of u is u1 * q + u2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf import Field, FieldMismatchError, PhasePoint, Ray


@dataclass(frozen=True)
class PhaseRing:
    """Roots of unity for characteristic p.

    Phases are tracked as exponents of the primitive 2p-th root e^{i pi/p};
    omega = e^{2 pi i/p} has exponent 2 and tau = -e^{i pi/p} has exponent p + 1.
    """

    p: int

    @property
    def omega(self) -> complex:
        return complex(np.exp(2j * np.pi / self.p))

    @property
    def tau(self) -> complex:
        return complex(-np.exp(1j * np.pi / self.p))

    def root(self, k) -> np.ndarray | complex:
        """e^{i pi k / p}, exact on the table of 2p-th roots."""
        table = np.exp(1j * np.pi * np.arange(2 * self.p) / self.p)
        # snap the obvious ones so that +-1 and +-i are exact
        table = np.where(np.abs(table.real) < 1e-15, 1j * table.imag, table)
        table = np.where(np.abs(table.imag) < 1e-15, table.real + 0j, table)
        return table[np.asarray(k) % (2 * self.p)]

    def tau_exp(self, k):
        """Exponent of e^{i pi/p} representing tau**k."""
        return (np.asarray(k) * (self.p + 1)) % (2 * self.p)

    def omega_exp(self, k):
        return (2 * np.asarray(k)) % (2 * self.p)


@dataclass(frozen=True, eq=False)
class Displacement:
    point: PhasePoint
    matrix: np.ndarray
    phase_exp: int  # tau exponent tr(u1 u2), lifted to [0, p)


def shift_and_phase(f: Field):
    """Return the builders (X(u), Z(u)) for X_u|x> = |x+u>, Z_u|x> = w^tr(ux)|x>."""
    ring = PhaseRing(f.p)
    xs = np.arange(f.q)

    def X(u: int) -> np.ndarray:
        m = np.zeros((f.q, f.q), dtype=complex)
        m[f.add_table[u, xs], xs] = 1.0
        return m

    def Z(u: int) -> np.ndarray:
        return np.diag(ring.root(ring.omega_exp(f.trace_table[f.mul_table[u, xs]])))

    return X, Z


class HeisenbergWeyl:
    """All q^2 displacement operators of GF(q), built once per field."""

    def __init__(self, f: Field):
        self.field = f
        self.q = q = f.q
        self.ring = ring = PhaseRing(f.p)
        X, Z = shift_and_phase(f)
        Xs = np.stack([X(u) for u in range(q)])
        Zs = np.stack([Z(u) for u in range(q)])
        u1, u2 = np.divmod(np.arange(q * q), q)
        self.labels = np.stack([u1, u2], axis=1)
        self.phase_exps = f.trace_table[f.mul_table[u1, u2]]
        phases = ring.root(ring.tau_exp(self.phase_exps))
        self.matrices = phases[:, None, None] * (Xs[u1] @ Zs[u2])
        self.matrices.setflags(write=False)
        # symplectic form table over flat labels: tr(u2 v1 - u1 v2)
        a = f.mul_table[u2[:, None], u1[None, :]]
        b = f.mul_table[u1[:, None], u2[None, :]]
        self.form = f.trace_table[f.add_table[a, f.neg_table[b]]]
        self.form.setflags(write=False)

    def index(self, u) -> int:
        u1, u2 = u.as_tuple() if isinstance(u, PhasePoint) else u
        return int(u1) * self.q + int(u2)

    def point(self, k: int) -> PhasePoint:
        return PhasePoint(int(self.labels[k, 0]), int(self.labels[k, 1]))

    def D(self, u) -> np.ndarray:
        return self.matrices[self.index(u)]

    def displacement(self, u) -> Displacement:
        k = self.index(u)
        return Displacement(self.point(k), self.matrices[k], int(self.phase_exps[k]))

    def symplectic_form(self, u, v) -> int:
        return int(self.form[self.index(u), self.index(v)])

    def basis_labels(self) -> list[int]:
        """Flat labels of an F_p-basis of F_q^2: (p^k, 0) and (0, p^k)."""
        p, n, q = self.field.p, self.field.n, self.q
        return [p**k * q for k in range(n)] + [p**k for k in range(n)]

    def match(self, W: np.ndarray, tol: float = 1e-8):
        """Identify W as c * D_v; return (flat label v, unit phase c) or None."""
        # |tr(D_v^dag W)| = q iff W is proportional to D_v (both unitary)
        overlaps = np.einsum("kij,ij->k", self.matrices.conj(), W) / self.q
        k = int(np.argmax(np.abs(overlaps)))
        c = overlaps[k]
        if abs(abs(c) - 1.0) > tol or np.max(np.abs(W - c * self.matrices[k])) > tol:
            return None
        return k, c


@lru_cache(maxsize=None)
def hw_group(f: Field) -> HeisenbergWeyl:
    return HeisenbergWeyl(f)


def displacement(f: Field, u: PhasePoint) -> Displacement:
    return hw_group(f).displacement(u)


def symplectic_form(f: Field, u: PhasePoint, v: PhasePoint, g: Field | None = None) -> int:
    if g is not None and g != f:
        raise FieldMismatchError(f"{f} vs {g}")
    return hw_group(f).symplectic_form(u, v)


@dataclass(frozen=True, eq=False)
class AbelianSubgroup:
    ray: PhasePoint
    elements: tuple[Displacement, ...]

    def matrices(self) -> list[np.ndarray]:
        return [d.matrix for d in self.elements]


def maximal_abelian_subgroup(f: Field, r: Ray) -> AbelianSubgroup:
    hw = hw_group(f)
    return AbelianSubgroup(r.representative, tuple(hw.displacement(u) for u in r.points))
