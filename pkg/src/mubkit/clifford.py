"""SL(2,q), Clifford unitaries and the restricted Clifford collineation group."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf import Field, FieldMismatchError, PhasePoint, primitive_element
from .hw import HeisenbergWeyl, PhaseRing, hw_group

log = logging.getLogger(__name__)

FP_DECIMALS = 6
TIE_TOL = 1e-6


class CliffordError(RuntimeError):
    pass


class NotSL2Error(CliffordError, ValueError):
    pass


class EvenCharacteristicError(CliffordError, ValueError):
    pass


class SynthesisFailedError(CliffordError):
    pass


class NotCliffordError(CliffordError, ValueError):
    pass


class BudgetExceededError(CliffordError):
    pass


@dataclass(frozen=True)
class SL2Matrix:
    """[[alpha, beta], [gamma, delta]] over GF(q), entries as element indices."""

    field: Field
    alpha: int
    beta: int
    gamma: int
    delta: int

    def __post_init__(self):
        if self.det() != 1:
            raise NotSL2Error(f"determinant {self.det()} != 1 for {self.entries()}")

    def det(self) -> int:
        f = self.field
        return int(f.sub(f.mul(self.alpha, self.delta), f.mul(self.beta, self.gamma)))

    def entries(self) -> tuple[int, int, int, int]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def __matmul__(self, other: "SL2Matrix") -> "SL2Matrix":
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        f = self.field
        a, b, c, d = self.entries()
        e, g, h, k = other.entries()
        return SL2Matrix(f, int(f.add(f.mul(a, e), f.mul(b, h))), int(f.add(f.mul(a, g), f.mul(b, k))),
                         int(f.add(f.mul(c, e), f.mul(d, h))), int(f.add(f.mul(c, g), f.mul(d, k))))

    def inverse(self) -> "SL2Matrix":
        f = self.field
        return SL2Matrix(f, self.delta, int(f.neg(self.beta)), int(f.neg(self.gamma)), self.alpha)

    def apply(self, u) -> PhasePoint:
        f = self.field
        u1, u2 = u.as_tuple() if isinstance(u, PhasePoint) else u
        return PhasePoint(int(f.add(f.mul(self.alpha, u1), f.mul(self.beta, u2))),
                          int(f.add(f.mul(self.gamma, u1), f.mul(self.delta, u2))))

    @classmethod
    def identity(cls, f: Field) -> "SL2Matrix":
        return cls(f, 1, 0, 0, 1)

    def to_json(self) -> list[list[int]]:
        return [[self.alpha, self.beta], [self.gamma, self.delta]]


def sl2_generators(f: Field) -> tuple[SL2Matrix, SL2Matrix]:
    minus_one = int(f.neg(1))
    if f.q <= 3:
        return SL2Matrix(f, 1, 1, 0, 1), SL2Matrix(f, 0, 1, minus_one, 0)
    nu = primitive_element(f).index
    return (SL2Matrix(f, nu, 0, 0, int(f.inv(nu))),
            SL2Matrix(f, minus_one, 1, minus_one, 0))


def sl2_elements(f: Field) -> list[SL2Matrix]:
    """Every determinant-one matrix, by direct enumeration."""
    out = []
    for a, b, c, d in itertools.product(range(f.q), repeat=4):
        if f.sub(f.mul(a, d), f.mul(b, c)) == 1:
            out.append(SL2Matrix(f, a, b, c, d))
    return out


def sl2_closure(gens) -> set[SL2Matrix]:
    seen = {SL2Matrix.identity(gens[0].field)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for g in gens:
            for h in frontier:
                gh = g @ h
                if gh not in seen:
                    seen.add(gh)
                    nxt.append(gh)
        frontier = nxt
    return seen


def random_sl2(f: Field, rng: np.random.Generator) -> SL2Matrix:
    while True:
        a, b, c = (int(x) for x in rng.integers(0, f.q, size=3))
        if a != 0:
            # delta = (1 + b c) / a
            d = int(f.mul(f.add(1, f.mul(b, c)), f.inv(a)))
            return SL2Matrix(f, a, b, c, d)


def appleby_unitary(F: SL2Matrix) -> np.ndarray:
    """Closed-form U_F with U_F D_u U_F^dag = D_{Fu}, odd characteristic only."""
    f = F.field
    if f.p == 2:
        raise EvenCharacteristicError("closed form needs odd q; use synthesize_unitary")
    q, ring = f.q, PhaseRing(f.p)
    M, A, N, T = f.mul_table, f.add_table, f.neg_table, f.trace_table
    a, b, c, d = F.entries()
    xs = np.arange(q)
    U = np.zeros((q, q), dtype=complex)
    if b == 0:
        expo = T[M[M[a, c], M[xs, xs]]]
        U[M[a, xs], xs] = ring.root(ring.tau_exp(expo))
        return U
    x, y = np.meshgrid(xs, xs, indexing="ij")
    two = A[1, 1]
    inner = A[A[M[a, M[y, y]], N[M[two, M[x, y]]]], M[d, M[x, x]]]
    expo = T[M[f.inv(b), inner]]
    return ring.root(ring.tau_exp(expo)) / np.sqrt(q)


def _nullspace(A: np.ndarray, cutoff: float = 1e-8) -> np.ndarray:
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > cutoff * max(1.0, s[0] if s.size else 1.0)))
    return vh[rank:].conj().T


def synthesize_unitary(F: SL2Matrix) -> np.ndarray:
    """Solve U D_e = c_e D_{Fe} U for an F_p-basis of labels, searching the phases c_e.

    Phases range over the 2p-th roots of unity; the search backtracks as soon
    as the partial intertwiner space becomes empty.  The result is gauge-fixed
    so its first largest entry is real positive.
    """
    f = F.field
    hw = hw_group(f)
    q = f.q
    eye = np.eye(q)
    roots = hw.ring.root(np.arange(2 * f.p))
    blocks = []
    for k in hw.basis_labels():
        D = hw.matrices[k]
        Dp = hw.D(F.apply(hw.point(k)))
        blocks.append((np.kron(eye, D.T), np.kron(Dp, eye)))

    def search(i, stacked):
        if i == len(blocks):
            ns = _nullspace(stacked)
            return ns if ns.shape[1] == 1 else None
        left, right = blocks[i]
        for c in roots:
            rows = left - c * right
            trial = rows if stacked is None else np.vstack([stacked, rows])
            if _nullspace(trial).shape[1] == 0:
                continue
            found = search(i + 1, trial)
            if found is not None:
                return found
        return None

    ns = search(0, None)
    if ns is None:
        raise SynthesisFailedError(f"no intertwiner for {F.entries()}")
    U = ns[:, 0].reshape(q, q) * np.sqrt(q)
    return gauge_fix_matrix(U)


def clifford_unitary(F: SL2Matrix) -> np.ndarray:
    if F.field.p == 2:
        return _synth_cached(F)
    return appleby_unitary(F)


@lru_cache(maxsize=4096)
def _synth_cached(F: SL2Matrix) -> np.ndarray:
    U = synthesize_unitary(F)
    U.setflags(write=False)
    return U


# -- fingerprints modulo global phase -----------------------------------------

def _gauge_rows(flat: np.ndarray) -> np.ndarray:
    """Phase of the first entry (row-major) whose modulus ties the row maximum."""
    mod = np.abs(flat)
    pick = np.argmax(mod >= mod.max(axis=1, keepdims=True) - TIE_TOL, axis=1)
    ref = flat[np.arange(flat.shape[0]), pick]
    return ref / np.abs(ref)


def gauge_fix_matrix(U: np.ndarray) -> np.ndarray:
    flat = U.reshape(1, -1)
    return U * np.conj(_gauge_rows(flat))[0]


def fingerprints(batch: np.ndarray) -> list[bytes]:
    """Phase-insensitive keys for a stack of arrays (leading axis = items)."""
    flat = batch.reshape(batch.shape[0], -1)
    fixed = flat * np.conj(_gauge_rows(flat))[:, None]
    r = np.round(fixed, FP_DECIMALS) + (0.0 + 0.0j)
    r = np.ascontiguousarray(r)
    return [row.tobytes() for row in r]


def fingerprint_unitary(U: np.ndarray) -> bytes:
    return fingerprints(U[None])[0]


# -- induced symplectic map ----------------------------------------------------

def induced_fp_map(U: np.ndarray, hw: HeisenbergWeyl | None = None, tol: float = 1e-8) -> np.ndarray:
    """The 2n x 2n F_p matrix of u -> f(u); columns indexed by hw.basis_labels()."""
    if hw is None:
        hw = hw_group(_field_for_dim(U.shape[0]))
    f = hw.field
    cols = []
    for k in hw.basis_labels():
        m = hw.match(U @ hw.matrices[k] @ U.conj().T, tol)
        if m is None:
            raise NotCliffordError(f"conjugate of D_{hw.point(k).as_tuple()} is not a displacement")
        v = hw.point(m[0])
        digits = []
        for comp in (v.u1, v.u2):
            for _ in range(f.n):
                digits.append(comp % f.p)
                comp //= f.p
        cols.append(digits)
    return np.array(cols, dtype=np.int64).T


def induced_symplectic(U: np.ndarray, f: Field | None = None, tol: float = 1e-8):
    """Recover F from the conjugation action of a Clifford unitary.

    Returns an SL2Matrix when the induced map is F_q-linear, otherwise the raw
    F_p matrix from induced_fp_map.
    """
    f = f or _field_for_dim(U.shape[0])
    hw = hw_group(f)
    cols = {}
    for k in hw.basis_labels():
        m = hw.match(U @ hw.matrices[k] @ U.conj().T, tol)
        if m is None:
            raise NotCliffordError(f"conjugate of D_{hw.point(k).as_tuple()} is not a displacement")
        cols[k] = hw.point(m[0])
    img1, img2 = cols[1 * f.q], cols[1]
    a, c = img1.u1, img1.u2
    b, d = img2.u1, img2.u2
    linear = True
    for j in range(f.n):
        s = f.p**j
        e1, e2 = cols[s * f.q], cols[s]
        if (e1.u1, e1.u2) != (int(f.mul(s, a)), int(f.mul(s, c))) or \
           (e2.u1, e2.u2) != (int(f.mul(s, b)), int(f.mul(s, d))):
            linear = False
    if linear and f.sub(f.mul(a, d), f.mul(b, c)) == 1:
        return SL2Matrix(f, a, b, c, d)
    return induced_fp_map(U, hw, tol)


_DIM_FIELDS: dict[int, Field] = {}


def _field_for_dim(q: int) -> Field:
    from .gf import field_for_q
    if q not in _DIM_FIELDS:
        _DIM_FIELDS[q] = field_for_q(q)
    return _DIM_FIELDS[q]


# -- group enumeration ----------------------------------------------------------

GENERATOR_NAMES = ("A", "B", "X", "Z")


@dataclass(frozen=True, eq=False)
class CliffordElement:
    symplectic: SL2Matrix
    displacement_part: PhasePoint
    unitary: np.ndarray
    word: str


class GroupTable:
    """Restricted Clifford collineation group, one unitary per phase class.

    Elements are stored in BFS order from the identity; within each BFS layer
    new elements are sorted by fingerprint, so the table is reproducible.
    words[i] spells unitaries[i] as a left-to-right product of generators.
    """

    def __init__(self, field: Field, generators: np.ndarray, unitaries: np.ndarray,
                 words: list[str], keys: list[bytes]):
        self.field = field
        self.generators = generators
        self.unitaries = unitaries
        self.words = words
        self.keys = keys
        self.index = {k: i for i, k in enumerate(keys)}

    def __len__(self):
        return len(self.words)

    @property
    def expected_order(self) -> int:
        q = self.field.q
        return q**3 * (q * q - 1)

    def lookup(self, U: np.ndarray) -> int | None:
        return self.index.get(fingerprint_unitary(U))

    def symplectic(self, i: int) -> SL2Matrix:
        return induced_symplectic(self.unitaries[i], self.field)

    def element(self, i: int) -> CliffordElement:
        U = self.unitaries[i]
        F = self.symplectic(i)
        hw = hw_group(self.field)
        m = hw.match(U @ clifford_unitary(F).conj().T)
        if m is None:
            raise NotCliffordError(f"element {i} does not factor as D_v U_F")
        return CliffordElement(F, hw.point(m[0]), U, self.words[i])

    def symplectic_labels(self) -> np.ndarray:
        """(K, 4) array of (alpha, beta, gamma, delta), computed in one batch."""
        hw = hw_group(self.field)
        q = self.field.q
        U = self.unitaries
        Ud = U.conj().transpose(0, 2, 1)
        out = np.zeros((len(self), 4), dtype=np.int64)
        for col, k in ((0, q), (1, 1)):
            W = U @ hw.matrices[k] @ Ud
            ov = np.abs(np.einsum("kij,nij->nk", hw.matrices.conj(), W, optimize=True))
            v = np.argmax(ov, axis=1)
            if np.any(np.abs(ov[np.arange(len(v)), v] - q) > 1e-6):
                raise NotCliffordError("table element fails the displacement match")
            out[:, col] = v // q
            out[:, col + 2] = v % q
        return out

    def to_json(self, matrices: bool = False) -> dict:
        labels = self.symplectic_labels()
        elems = []
        for i in range(len(self)):
            a, b, c, d = labels[i]
            e = {"symplectic": [[int(a), int(b)], [int(c), int(d)]], "word": self.words[i]}
            if matrices:
                e["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.unitaries[i]]
            elems.append(e)
        return {"q": self.field.q, "field": self.field.to_json(), "order": len(self),
                "expected_order": self.expected_order, "generators": list(GENERATOR_NAMES),
                "elements": elems}


def group_generators(f: Field) -> np.ndarray:
    hw = hw_group(f)
    g1, g2 = sl2_generators(f)
    return np.stack([clifford_unitary(g1), clifford_unitary(g2),
                     hw.D((1, 0)), hw.D((0, 1))])


@lru_cache(maxsize=None)
def enumerate_group(f: Field) -> GroupTable:
    q = f.q
    order = q**3 * (q * q - 1)
    gens = group_generators(f)
    ident = np.eye(q, dtype=complex)[None]
    keys = fingerprints(ident)
    index = {keys[0]: 0}
    mats = [ident]
    words = [""]
    frontier = ident
    frontier_words = [""]
    while len(frontier):
        prods = np.einsum("gij,njk->gnik", gens, frontier).reshape(-1, q, q)
        pkeys = fingerprints(prods)
        fresh: dict[bytes, int] = {}
        for j, k in enumerate(pkeys):
            if k not in index and k not in fresh:
                fresh[k] = j
        order_keys = sorted(fresh)
        sel = [fresh[k] for k in order_keys]
        nf = len(frontier)
        new_words = [GENERATOR_NAMES[j // nf] + frontier_words[j % nf] for j in sel]
        for k in order_keys:
            index[k] = len(index)
        frontier = prods[sel]
        frontier_words = new_words
        mats.append(frontier)
        words.extend(new_words)
        keys.extend(order_keys)
        if len(index) > 2 * order:
            raise BudgetExceededError(f"{len(index)} classes exceeds 2 * {order}")
        log.debug("q=%d layer: +%d -> %d", q, len(sel), len(index))
    unitaries = np.concatenate(mats)
    unitaries.setflags(write=False)
    return GroupTable(f, gens, unitaries, words, keys)


def hw_table(f: Field) -> np.ndarray:
    """The q^2 displacement operators as a collineation group (one per class)."""
    return np.array(hw_group(f).matrices)
