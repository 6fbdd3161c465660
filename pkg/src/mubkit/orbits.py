"""Orbits of pure states under the restricted Clifford group."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .clifford import GroupTable, enumerate_group, fingerprints
from .designs import DesignReport, check_2design
from .gf import Field
from .states import PureState, StateSet, canonical_mub, gauge_fix_rows, haar_state, hesse_sic

FIX_TOL = 1e-8
SVD_CUTOFF = 1e-8
DESIGN_TOL = 1e-7


class BudgetExceededError(RuntimeError):
    pass


@dataclass(eq=False)
class Orbit:
    seed: PureState
    states: StateSet
    words: list[str]
    group_order: int

    def __len__(self):
        return len(self.states)


@dataclass(eq=False)
class Stabilizer:
    members: np.ndarray  # indices into the GroupTable
    table: GroupTable = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.members)

    def unitaries(self) -> np.ndarray:
        return self.table.unitaries[self.members]


def _as_vector(seed) -> np.ndarray:
    return seed.amplitudes if isinstance(seed, PureState) else np.asarray(seed, dtype=complex)


def _orbit_from_table(psi, G: GroupTable):
    images = gauge_fix_rows(G.unitaries @ psi)
    first: dict[bytes, int] = {}
    for i, k in enumerate(fingerprints(images)):
        first.setdefault(k, i)
    if len(first) > len(G):
        raise BudgetExceededError(f"{len(first)} states from a group of order {len(G)}")
    keys = sorted(first)
    return images[[first[k] for k in keys]], [G.words[first[k]] for k in keys]


def _orbit_from_generators(psi, gens, budget):
    start = gauge_fix_rows(psi[None])
    k0 = fingerprints(start)[0]
    words, vecs = {k0: ""}, {k0: start[0]}
    frontier = [k0]
    while frontier:
        batch = np.stack([vecs[k] for k in frontier])
        new: dict[bytes, tuple[str, np.ndarray]] = {}
        for g_idx, g in enumerate(gens):
            imgs = gauge_fix_rows(batch @ g.T)
            for src, k, v in zip(frontier, fingerprints(imgs), imgs):
                if k not in words and k not in new:
                    new[k] = ((f"g{g_idx} " + words[src]).strip(), v)
        frontier = sorted(new)
        for k in frontier:
            words[k], vecs[k] = new[k]
        if budget is not None and len(words) > budget:
            raise BudgetExceededError(f"orbit exceeded {budget} states")
    keys = sorted(words)
    return np.stack([vecs[k] for k in keys]), [words[k] for k in keys]


def orbit(seed, G, field: Field | None = None, budget: int | None = None) -> Orbit:
    """Orbit of ``seed`` modulo phase, states sorted by fingerprint.

    ``G`` is either a GroupTable (every element applied at once; words are the
    table's generator words) or a stack of generator unitaries (BFS closure,
    words over g0, g1, ... read left to right as a matrix product).
    """
    psi = _as_vector(seed)
    q = len(psi)
    if isinstance(G, GroupTable):
        states, words = _orbit_from_table(psi, G)
        order, field = len(G), field or G.field
    else:
        states, words = _orbit_from_generators(psi, np.asarray(G), budget)
        order = budget or 0
    ss = StateSet(states, q, field, None, list(words), {"kind": "orbit"})
    return Orbit(PureState(gauge_fix_rows(psi[None])[0], q), ss, words, order)


def stabilizer(s, G: GroupTable, tol: float = FIX_TOL) -> Stabilizer:
    """All table elements U with ||U psi - lambda psi|| <= tol for the best unit lambda."""
    psi = _as_vector(s)
    psi = psi / np.linalg.norm(psi)
    images = G.unitaries @ psi
    lam = images @ psi.conj()
    resid = np.linalg.norm(images - lam[:, None] * psi[None, :], axis=1)
    return Stabilizer(np.flatnonzero(resid <= tol), G)


def _nullspace(A: np.ndarray) -> np.ndarray:
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > SVD_CUTOFF))
    return vh[rank:].conj().T


def _distinct(values, tol=1e-6):
    out = []
    for v in values:
        if all(abs(v - w) > tol for w in out):
            out.append(v)
    return out


def fixed_points(H, tol: float = FIX_TOL) -> StateSet:
    """Pure states fixed up to phase by every element of ``H``.

    Joint eigenspaces are found by intersecting, one element at a time, each
    current subspace with the eigenspaces of the next element.  One-dimensional
    survivors are returned as states; larger ones (a continuum of fixed states)
    are reported in ``metadata["fixed_subspace_dims"]``.
    """
    mats = H.unitaries() if isinstance(H, Stabilizer) else np.asarray(H)
    if len(mats) == 0:
        raise ValueError("empty group")
    q = mats.shape[1]
    eye = np.eye(q)
    nontrivial = [U for U in mats if np.abs(U - U[0, 0] * eye).max() > 1e-9]
    if not nontrivial:
        raise ValueError("fixed points of the trivial group are all states")
    spaces = [np.eye(q, dtype=complex)]
    for U in nontrivial:
        nxt = []
        for B in spaces:
            UB = U @ B
            if B.shape[1] == 1:
                lam = np.vdot(B[:, 0], UB[:, 0])
                if np.linalg.norm(UB[:, 0] - lam * B[:, 0]) <= tol:
                    nxt.append(B)
                continue
            for mu in _distinct(np.linalg.eigvals(U)):
                ns = _nullspace(UB - mu * B)
                if ns.shape[1]:
                    nxt.append(B @ ns)
        spaces = nxt
    isolated = [B[:, 0] for B in spaces if B.shape[1] == 1]
    higher = sorted(B.shape[1] for B in spaces if B.shape[1] > 1)
    states = gauge_fix_rows(np.array(isolated)) if isolated else np.zeros((0, q), complex)
    order = np.argsort(fingerprints(states)) if len(states) else []
    return StateSet(states[order] if len(states) else states, q, None, None,
                    metadata={"fixed_subspace_dims": higher})


def highly_symmetric_check(O: Orbit, G: GroupTable, tol: float = FIX_TOL) -> DesignReport:
    """Frame built on an orbit is highly symmetric if the stabilizer's fixed points stay in it.

    The group acts transitively on the orbit, so one representative suffices.
    """
    rep = O.states.states[0]
    stab = stabilizer(rep, G, tol)
    info = {"orbit_size": len(O), "stabilizer_order": stab.order}
    if stab.order == 1:
        info["flag"] = "trivial stabilizer"
        return DesignReport("highly_symmetric", True, 0.0, tol, [], info)
    fps = fixed_points(stab, tol)
    orbit_keys = O.states.fingerprint_set()
    outside = [i for i, k in enumerate(fps.fingerprints()) if k not in orbit_keys]
    higher = fps.metadata["fixed_subspace_dims"]
    info.update(fixed_points=len(fps), outside_orbit=len(outside), fixed_subspace_dims=higher)
    passed = not outside and not higher
    residual = float(len(outside) + sum(higher))
    return DesignReport("highly_symmetric", passed, residual, tol,
                        [{"fixed_point_outside_orbit": i} for i in outside[:10]], info)


def _round(x: float) -> float:
    # residuals are reported at 4 significant digits so reports are byte-stable
    return float(f"{x:.4g}")


def _orbit_record(name, seed, G: GroupTable, with_words=False):
    O = orbit(seed, G)
    stab = stabilizer(O.states.states[0], G)
    design = check_2design(O.states, DESIGN_TOL)
    rec = {
        "seed": name,
        "orbit_size": len(O),
        "stabilizer_order": stab.order,
        "orbit_stabilizer_ok": len(O) * stab.order == len(G),
        "divides_group_order": len(G) % len(O) == 0,
        "design2_residual": _round(design.residual),
        "design2_pass": design.passed,
    }
    return O, rec


def theorem1_experiment(f: Field, samples: int = 20, seed: int = 0, threads: int = 1,
                        G: GroupTable | None = None) -> dict:
    """Constructive and sampled evidence that the minimal orbit is the canonical MUB.

    The minimal orbits are computed exactly; random orbits only show that no
    smaller orbit turned up among the samples.
    """
    q = f.q
    G = G or enumerate_group(f)
    mub = canonical_mub(f)
    mub_keys = mub.fingerprint_set()
    O_mub, mub_rec = _orbit_record("mub0", mub.states[0], G)
    mub_rec["equals_canonical_mub"] = O_mub.states.fingerprint_set() == mub_keys
    mub_rec["expected_size"] = q * (q + 1)
    mub_rec["expected_stabilizer_order"] = q * q * (q - 1)

    report = {
        "q": q,
        "field": f.to_json(),
        "group_order": len(G),
        "expected_group_order": q**3 * (q * q - 1),
        "rng": {"generator": "numpy.random.PCG64", "seed": seed},
        "mub_orbit": mub_rec,
    }
    if q == 3:
        sic = hesse_sic()
        O_h, h_rec = _orbit_record("hesse", sic.states[0], G)
        h_rec["equals_hesse_sic"] = O_h.states.fingerprint_set() == sic.fingerprint_set()
        report["hesse_orbit"] = h_rec

    rng = np.random.default_rng(seed)
    seeds = [haar_state(q, rng) for _ in range(samples)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        recs = list(pool.map(lambda s: _orbit_record("haar", s.amplitudes, G)[1], seeds))
    for i, r in enumerate(recs):
        r["seed"] = f"haar[{i}]"
        r["exceeds_mub_size"] = r["orbit_size"] > q * (q + 1)
        r["exceeds_q_squared"] = r["orbit_size"] > q * q
    report["random_orbits"] = recs

    records = [mub_rec] + recs + ([report["hesse_orbit"]] if q == 3 else [])
    minimal = min(r["orbit_size"] for r in records)
    checks = {
        "group_order": len(G) == q**3 * (q * q - 1),
        "mub_orbit_size": mub_rec["orbit_size"] == q * (q + 1),
        "mub_orbit_is_canonical_mub": mub_rec["equals_canonical_mub"],
        "mub_stabilizer_order": mub_rec["stabilizer_order"] == q * q * (q - 1),
        "random_orbits_exceed_mub": all(r["exceeds_mub_size"] for r in recs),
        "random_orbits_exceed_q_squared": all(r["exceeds_q_squared"] for r in recs),
        "all_orbits_design2": all(r["design2_pass"] for r in records),
        "orbit_sizes_divide_group_order": all(r["divides_group_order"] for r in records),
        "orbit_stabilizer": all(r["orbit_stabilizer_ok"] for r in records),
    }
    if q == 3:
        h = report["hesse_orbit"]
        checks["hesse_orbit_size_9"] = h["orbit_size"] == 9 and h["equals_hesse_sic"]
        characteristic = "hesse_sic"
    else:
        characteristic = "canonical_mub"
    report["smallest_orbit_found"] = {"size": minimal, "identified_as": characteristic}
    report["checks"] = checks
    report["all_pass"] = all(checks.values())
    report["note"] = ("orbit sizes of sampled seeds are evidence, not proof, that no orbit "
                      "smaller than the reported minimal one exists")
    return report
