"""Canonical MUB, Hesse SIC, and state sets modulo global phase."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np
import scipy.linalg

from .clifford import fingerprints
from .gf import Field, field_for_q, field_from_json, rays
from .hw import hw_group, maximal_abelian_subgroup

EIG_TOL = 1e-8
GAUGE_EPS = 1e-9


class DegeneracyUnresolvedError(RuntimeError):
    pass


def gauge_fix(psi: np.ndarray) -> np.ndarray:
    """Normalize and make the first entry with modulus > 1e-9 real positive."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    k = int(np.argmax(np.abs(psi) > GAUGE_EPS))
    return psi * (np.abs(psi[k]) / psi[k])


def gauge_fix_rows(batch: np.ndarray) -> np.ndarray:
    batch = batch / np.linalg.norm(batch, axis=1, keepdims=True)
    k = np.argmax(np.abs(batch) > GAUGE_EPS, axis=1)
    ref = batch[np.arange(len(batch)), k]
    return batch * (np.abs(ref) / ref)[:, None]


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    q: int

    @classmethod
    def from_vector(cls, v) -> "PureState":
        v = gauge_fix(v)
        return cls(v, len(v))

    def fingerprint(self) -> bytes:
        return fingerprint(self.amplitudes)


def fingerprint(psi) -> bytes:
    """Token equal for two unit vectors iff they agree up to a global phase (1e-6 grid)."""
    if isinstance(psi, PureState):
        psi = psi.amplitudes
    return fingerprints(np.asarray(psi, dtype=complex)[None])[0]


@dataclass(eq=False)
class StateSet:
    """An ordered set of pure states, optionally grouped into bases.

    ``states`` is an (N, d) complex array of gauge-fixed rows; ``grouping`` is
    a list of index lists (one per basis) or None.
    """

    states: np.ndarray
    q: int
    field: Field | None = None
    grouping: list[list[int]] | None = None
    labels: list = dc_field(default_factory=list)
    metadata: dict = dc_field(default_factory=dict)

    def __len__(self):
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def bases(self) -> list[np.ndarray]:
        if self.grouping is None:
            raise ValueError("state set is not grouped into bases")
        return [self.states[g] for g in self.grouping]

    def fingerprints(self) -> list[bytes]:
        return fingerprints(self.states)

    def fingerprint_set(self) -> set[bytes]:
        return set(self.fingerprints())

    def projectors(self) -> np.ndarray:
        return np.einsum("ni,nj->nij", self.states, self.states.conj())

    # -- JSON ---------------------------------------------------------------
    def to_json(self) -> dict:
        def enc(v):
            return [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in v]

        out = {"q": self.q, "field": self.field.to_json() if self.field else None}
        if self.grouping is not None and all(len(g) == self.dim for g in self.grouping) \
                and sum(len(g) for g in self.grouping) == len(self) \
                and [i for g in self.grouping for i in g] == list(range(len(self))):
            out["bases"] = [[enc(v) for v in self.states[g]] for g in self.grouping]
        else:
            out["states"] = [enc(v) for v in self.states]
            out["grouping"] = self.grouping
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "StateSet":
        def dec(rows):
            return np.array([[complex(re, im) for re, im in v] for v in rows], dtype=complex)

        fld = field_from_json(obj["field"]) if obj.get("field") else None
        if "bases" in obj:
            blocks = [dec(b) for b in obj["bases"]]
            states = np.concatenate(blocks) if blocks else np.zeros((0, 0), complex)
            grouping, start = [], 0
            for b in blocks:
                grouping.append(list(range(start, start + len(b))))
                start += len(b)
        elif "states" in obj:
            states = dec(obj["states"])
            grouping = obj.get("grouping")
        else:
            raise ValueError("StateSet JSON needs a 'bases' or 'states' key")
        q = int(obj.get("q") or states.shape[1])
        if states.ndim != 2 or states.shape[1] != q:
            raise ValueError(f"state vectors do not have dimension q={q}")
        return cls(states, q, fld, grouping, metadata=obj.get("metadata", {}))


def dedup(states: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Drop repeats modulo phase, keeping first occurrences in order."""
    seen, keep = set(), []
    for i, k in enumerate(fingerprints(states)):
        if k not in seen:
            seen.add(k)
            keep.append(i)
    return states[keep], keep


# -- joint diagonalization ------------------------------------------------------

def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        for g in groups:
            if abs(values[g[0]] - v) < tol:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def joint_eigenbasis(mats: Sequence[np.ndarray], tol: float = EIG_TOL) -> np.ndarray:
    """Common eigenvectors of commuting normal matrices, as columns.

    The matrix with most distinct eigenvalues is diagonalized first; each
    degenerate eigenspace is then refined by the remaining matrices.
    """
    d = mats[0].shape[0]
    distinct = [len(_cluster(np.linalg.eigvals(m), 1e-6)) for m in mats]
    order = sorted(range(len(mats)), key=lambda i: -distinct[i])
    blocks = [np.eye(d, dtype=complex)]
    for i in order:
        M = mats[i]
        refined = []
        for B in blocks:
            if B.shape[1] == 1:
                refined.append(B)
                continue
            T, Q = scipy.linalg.schur(B.conj().T @ M @ B, output="complex")
            for g in _cluster(np.diag(T), 1e-6):
                refined.append(B @ Q[:, g])
        blocks = refined
        if all(B.shape[1] == 1 for B in blocks):
            break
    if any(B.shape[1] > 1 for B in blocks):
        raise DegeneracyUnresolvedError(f"joint eigenspace of dim {max(B.shape[1] for B in blocks)}")
    vecs = np.concatenate(blocks, axis=1)
    for M in mats:
        lam = np.einsum("ij,ik,kj->j", vecs.conj(), M, vecs)
        if np.max(np.linalg.norm(M @ vecs - vecs * lam, axis=0)) > tol * 10:
            raise DegeneracyUnresolvedError("refined vectors are not joint eigenvectors")
    return vecs


def _eigen_key(vecs: np.ndarray, mats: Sequence[np.ndarray]) -> list[tuple]:
    keys = []
    for j in range(vecs.shape[1]):
        v = vecs[:, j]
        angles = []
        for M in mats:
            lam = np.vdot(v, M @ v)
            a = (np.angle(lam) / (2 * np.pi)) % 1.0
            a = round(a, 6) % 1.0
            angles.append(a)
        keys.append(tuple(angles))
    return keys


def stabilizer_basis(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Rows: joint eigenbasis of a maximal abelian subgroup, in eigenvalue order."""
    vecs = joint_eigenbasis(mats)
    keys = _eigen_key(vecs, mats)
    perm = sorted(range(len(keys)), key=lambda j: keys[j])
    return gauge_fix_rows(vecs[:, perm].T)


def canonical_mub(f: Field, element_order: Sequence[int] | None = None) -> StateSet:
    """The q+1 stabilizer bases attached to the rays of F_q^2.

    ``element_order`` optionally permutes the subgroup elements fed to the
    diagonalizer; the output is independent of it.
    """
    q = f.q
    bases, labels, grouping = [], [], []
    for b, r in enumerate(rays(f)):
        mats = maximal_abelian_subgroup(f, r).matrices()
        if element_order is not None:
            fed = [mats[i] for i in element_order]
            vecs = joint_eigenbasis(fed)
            keys = _eigen_key(vecs, mats)
            perm = sorted(range(len(keys)), key=lambda j: keys[j])
            basis = gauge_fix_rows(vecs[:, perm].T)
        else:
            basis = stabilizer_basis(mats)
        grouping.append(list(range(b * q, (b + 1) * q)))
        labels.extend((b, j) for j in range(q))
        bases.append(basis)
    return StateSet(np.concatenate(bases), q, f, grouping, labels,
                    {"kind": "canonical_mub",
                     "rays": [list(r.representative.as_tuple()) for r in rays(f)]})


HESSE_FIDUCIAL = np.array([0.0, 1.0, -1.0], dtype=complex) / np.sqrt(2)


def hesse_sic() -> StateSet:
    f = field_for_q(3)
    hw = hw_group(f)
    raw = np.einsum("kij,j->ki", hw.matrices, HESSE_FIDUCIAL)
    states, keep = dedup(gauge_fix_rows(raw))
    return StateSet(states, 3, f, None, [hw.point(k).as_tuple() for k in keep],
                    {"kind": "hesse_sic", "fiducial": [[0.0, 0.0], [float(1 / np.sqrt(2)), 0.0],
                                                       [float(-1 / np.sqrt(2)), 0.0]]})


def mub_seed(f: Field) -> PureState:
    """First state of the first canonical basis, i.e. |0>."""
    mub = canonical_mub(f)
    return PureState(mub.states[0], f.q)


def haar_state(q: int, rng: np.random.Generator) -> PureState:
    v = rng.normal(size=q) + 1j * rng.normal(size=q)
    return PureState.from_vector(v)
