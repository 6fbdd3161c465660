"""Certification of 2-designs, SICs, MUBs, tight frames and unitary 2-designs.

Every check returns a DesignReport whose residual is an entrywise max-norm
deviation; ``passed`` is exactly ``residual <= tolerance`` (plus any count or
grouping condition the check states).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .states import StateSet

DEFAULT_TOL = 1e-8
MAX_DETAILS = 10


class DimensionMismatchError(ValueError):
    pass


class BadGroupingError(ValueError):
    pass


class TooLargeError(ValueError):
    pass


@dataclass
class DesignReport:
    test: str
    passed: bool
    residual: float
    tolerance: float
    details: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _as_array(S) -> np.ndarray:
    arr = S.states if isinstance(S, StateSet) else np.asarray(S, dtype=complex)
    if arr.ndim != 2:
        raise DimensionMismatchError("expected an (N, d) array of state vectors")
    return arr


def symmetric_projector(d: int) -> np.ndarray:
    swap = np.eye(d * d).reshape(d, d, d, d).transpose(0, 1, 3, 2).reshape(d * d, d * d)
    return (np.eye(d * d) + swap) / 2


def check_2design(S, tol: float = DEFAULT_TOL) -> DesignReport:
    psi = _as_array(S)
    N, d = psi.shape
    if N < 1:
        raise DimensionMismatchError("empty state set")
    W = np.einsum("ni,nj->nij", psi, psi).reshape(N, d * d)
    T = W.T @ W.conj()
    const = 2 * N / (d * (d + 1))
    dev = np.abs(T - const * symmetric_projector(d))
    residual = float(dev.max())
    return DesignReport("design2", residual <= tol, residual, tol,
                        info={"N": N, "d": d, "constant": const})


def gram_squared(psi: np.ndarray) -> np.ndarray:
    G = psi.conj() @ psi.T
    return np.abs(G) ** 2


def check_sic(S, tol: float = DEFAULT_TOL) -> DesignReport:
    psi = _as_array(S)
    N, d = psi.shape
    P = gram_squared(psi)
    target = (d * np.eye(N) + 1) / (d + 1)
    dev = np.abs(P - target)
    residual = float(dev.max()) if N else 0.0
    details = []
    if N != d * d:
        details.append({"reason": "CountMismatch", "N": N, "expected": d * d})
    bad = np.argwhere(dev > tol)
    details += [{"pair": [int(i), int(j)], "overlap": float(P[i, j])} for i, j in bad[:MAX_DETAILS]]
    return DesignReport("sic", N == d * d and residual <= tol, residual, tol, details,
                        {"N": N, "d": d, "off_diagonal_target": 1 / (d + 1)})


def check_mub(S: StateSet, tol: float = DEFAULT_TOL) -> DesignReport:
    psi = _as_array(S)
    d = psi.shape[1]
    grouping = S.grouping if isinstance(S, StateSet) else None
    if not grouping or any(len(g) != d for g in grouping):
        raise BadGroupingError(f"states must be grouped into bases of size {d}")
    residual, details = 0.0, []
    bases = [psi[g] for g in grouping]
    for b, B in enumerate(bases):
        r = float(np.abs(B.conj() @ B.T - np.eye(d)).max())
        residual = max(residual, r)
        if r > tol and len(details) < MAX_DETAILS:
            details.append({"basis": b, "orthonormality_residual": r})
    for a in range(len(bases)):
        for b in range(a + 1, len(bases)):
            P = np.abs(bases[a].conj() @ bases[b].T) ** 2
            r = float(np.abs(P - 1 / d).max())
            residual = max(residual, r)
            if r > tol and len(details) < MAX_DETAILS:
                details.append({"bases": [a, b], "unbiasedness_residual": r})
    return DesignReport("mub", residual <= tol, residual, tol, details,
                        {"bases": len(bases), "d": d, "complete": len(bases) == d + 1})


def check_tight_frame(S, tol: float = DEFAULT_TOL) -> DesignReport:
    psi = _as_array(S)
    N, d = psi.shape
    frame_op = psi.T @ psi.conj()
    residual = float(np.abs(frame_op - (N / d) * np.eye(d)).max())
    return DesignReport("frame", residual <= tol, residual, tol,
                        info={"N": N, "d": d, "frame_constant": N / d, "povm_scale": d / N})


CHECKS = {
    "design2": check_2design,
    "sic": check_sic,
    "mub": check_mub,
    "frame": check_tight_frame,
}


# -- unitary designs -------------------------------------------------------------

def _unitaries(G) -> np.ndarray:
    return np.asarray(getattr(G, "unitaries", G))


def frame_potential(G, block: int = 2048) -> float:
    """(1/K^2) sum_{i,j} |tr(U_i^dag U_j)|^4 over all ordered pairs."""
    U = _unitaries(G)
    K = len(U)
    M = U.reshape(K, -1)
    total = 0.0
    for s in range(0, K, block):
        tr = M[s:s + block].conj() @ M.T
        total += float(np.sum(np.abs(tr) ** 4))
    return total / K**2


def frame_potential_sampled(G, pairs: int = 10**6, rng: np.random.Generator | None = None,
                            chunk: int = 200_000) -> tuple[float, float]:
    """Monte Carlo frame potential from uniform ordered pairs: (mean, standard error)."""
    U = _unitaries(G)
    K = len(U)
    M = U.reshape(K, -1)
    rng = rng if rng is not None else np.random.default_rng(0)
    vals = []
    for s in range(0, pairs, chunk):
        n = min(chunk, pairs - s)
        i = rng.integers(0, K, size=n)
        j = rng.integers(0, K, size=n)
        tr = np.einsum("nk,nk->n", M[i].conj(), M[j])
        vals.append(np.abs(tr) ** 4)
    v = np.concatenate(vals)
    return float(v.mean()), float(v.std(ddof=1) / np.sqrt(len(v)))


def unitary_2design_potential(G, sampled: bool = False, pairs: int = 10**6,
                              rng: np.random.Generator | None = None, max_exhaustive_q: int = 5):
    """Frame potential of a unitary set; the Haar value is 2 for d >= 2.

    Exhaustive for q <= max_exhaustive_q; returns (value, standard error) with
    standard error 0.0 in exhaustive mode.
    """
    U = _unitaries(G)
    q = U.shape[1]
    if not sampled:
        if q > max_exhaustive_q:
            raise TooLargeError(f"exhaustive frame potential at q={q}; use sampled mode")
        return frame_potential(U), 0.0
    return frame_potential_sampled(U, pairs, rng)


def twirl_superoperator(G) -> np.ndarray:
    """(1/K) sum_j (U_j x U_j) . (U_j x U_j)^dag as a d^4 x d^4 matrix on row-major vec(A)."""
    U = _unitaries(G)
    K, d, _ = U.shape
    V = np.einsum("kab,kcd->kacbd", U, U).reshape(K, d * d, d * d)
    # vec(V A V^dag) = (V kron conj(V)) vec(A) for row-major vec
    flat = V.reshape(K, -1)
    S = (flat.T @ flat.conj()) / K  # index ((a,b),(c,e)) = mean V[a,b] conj(V[c,e])
    D2 = d * d
    return S.reshape(D2, D2, D2, D2).transpose(0, 2, 1, 3).reshape(D2 * D2, D2 * D2)


def haar_twirl_superoperator(d: int) -> np.ndarray:
    """Haar twirl A -> alpha I + beta SWAP with alpha, beta fixed by tr(A), tr(A SWAP)."""
    D2 = d * d
    I = np.eye(D2)
    swap = symmetric_projector(d) * 2 - I
    trA = I.reshape(-1)  # tr(A) = <vec(I), vec(A)>
    trAS = swap.T.reshape(-1)  # tr(A SWAP) = sum_ij A_ij SWAP_ji
    alpha = (trA - trAS / d) / (D2 - 1)
    beta = (trAS - trA / d) / (D2 - 1)
    return np.outer(I.reshape(-1), alpha) + np.outer(swap.reshape(-1), beta)


def check_unitary_2design(G, tol: float = 1e-8) -> DesignReport:
    U = _unitaries(G)
    d = U.shape[1]
    residual = float(np.abs(twirl_superoperator(U) - haar_twirl_superoperator(d)).max())
    return DesignReport("unitary_design2", residual <= tol, residual, tol, info={"K": len(U), "d": d})
