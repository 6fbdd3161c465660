import json

import numpy as np
import pytest

from mubkit.gf import field_for_q, rays
from mubkit.hw import maximal_abelian_subgroup
from mubkit.orbits import fixed_points, highly_symmetric_check, orbit, stabilizer, theorem1_experiment
from mubkit.states import canonical_mub, fingerprint, haar_state, hesse_sic


def brute_stabilizer_order(psi, G):
    count = 0
    for U in G.unitaries:
        v = U @ psi
        if abs(abs(np.vdot(psi, v)) - 1) < 1e-9:
            count += 1
    return count


def test_hesse_orbit(groups):
    O = orbit(hesse_sic().states[0], groups[3])
    assert len(O) == 9
    assert O.states.fingerprint_set() == hesse_sic().fingerprint_set()


@pytest.mark.parametrize("q", (2, 3))
def test_zero_ket_orbit_is_mub(q, groups):
    e0 = np.eye(q, dtype=complex)[0]
    O = orbit(e0, groups[q])
    assert len(O) == q * (q + 1)
    assert O.states.fingerprint_set() == canonical_mub(field_for_q(q)).fingerprint_set()


@pytest.mark.parametrize("q", (2, 3, 4, 5))
def test_mub_orbit_transitive_from_any_state(q, groups, rng):
    S = canonical_mub(field_for_q(q))
    keys = S.fingerprint_set()
    for i in rng.choice(len(S), 3, replace=False):
        assert orbit(S.states[i], groups[q]).states.fingerprint_set() == keys


@pytest.mark.parametrize("q", (2, 3, 4))
def test_generator_bfs_matches_table(q, groups, rng):
    G = groups[q]
    for psi in (canonical_mub(field_for_q(q)).states[0], haar_state(q, rng).amplitudes):
        a = orbit(psi, G)
        b = orbit(psi, G.generators, budget=len(G))
        assert a.states.fingerprints() == b.states.fingerprints()


def test_orbit_words_are_witnesses(groups):
    G = groups[3]
    psi = hesse_sic().states[0]
    O = orbit(psi, G)
    gens = dict(zip("ABXZ", G.generators))
    for w, target in zip(O.words, O.states.states):
        v = psi.copy()
        for ch in reversed(w):
            v = gens[ch] @ v
        assert fingerprint(v) == fingerprint(target)


def test_stabilizer_examples(groups, rng):
    G = groups[3]
    mub = canonical_mub(field_for_q(3))
    st = stabilizer(mub.states[5], G)
    assert st.order == 18 == 216 // 12 == brute_stabilizer_order(mub.states[5], G)
    hesse = hesse_sic().states[0]
    assert stabilizer(hesse, G).order == 24 == brute_stabilizer_order(hesse, G)
    assert stabilizer(haar_state(3, rng), G).order == 1


def test_stabilizer_is_subgroup(groups):
    G = groups[4]
    st = stabilizer(canonical_mub(field_for_q(4)).states[7], G)
    members = set(st.members.tolist())
    assert 0 in members  # identity is table element 0
    U = st.unitaries()
    for a in U[:12]:
        for b in U[:12]:
            assert G.lookup(a @ b) in members


@pytest.mark.parametrize("q", (2, 3, 4, 5))
def test_orbit_stabilizer_identity(q, groups, rng):
    G = groups[q]
    seeds = [canonical_mub(field_for_q(q)).states[0], haar_state(q, rng).amplitudes]
    for psi in seeds:
        O = orbit(psi, G)
        assert len(O) * stabilizer(psi, G).order == len(G)
        assert len(G) % len(O) == 0


def test_fixed_points_of_mub_stabilizer(groups):
    G = groups[3]
    mub = canonical_mub(field_for_q(3))
    psi = mub.states[4]
    fps = fixed_points(stabilizer(psi, G))
    keys = fps.fingerprints()
    assert fps.metadata["fixed_subspace_dims"] == []
    assert fingerprint(psi) in keys
    assert set(keys) <= mub.fingerprint_set()


def test_fixed_points_identity_rejected():
    with pytest.raises(ValueError):
        fixed_points(np.eye(3, dtype=complex)[None])


@pytest.mark.parametrize("q", (2, 3, 4, 5))
def test_fixed_points_of_z_subgroup(q):
    f = field_for_q(q)
    z_ray = rays(f)[0]
    assert z_ray.representative.as_tuple() == (0, 1)
    mats = np.stack(maximal_abelian_subgroup(f, z_ray).matrices())
    fps = fixed_points(mats)
    assert len(fps) == q
    assert fps.fingerprint_set() == {fingerprint(e) for e in np.eye(q, dtype=complex)}


def test_fixed_subspace_flagged():
    # diag(1, 1, -1): every state in span(e0, e1) is fixed
    fps = fixed_points(np.diag([1, 1, -1]).astype(complex)[None])
    assert fps.metadata["fixed_subspace_dims"] == [2]
    assert len(fps) == 1


@pytest.mark.parametrize("q", (2, 3, 4, 5))
def test_mub_highly_symmetric(q, groups):
    O = orbit(canonical_mub(field_for_q(q)).states[0], groups[q])
    assert highly_symmetric_check(O, groups[q]).passed


def test_hesse_highly_symmetric(groups):
    O = orbit(hesse_sic().states[0], groups[3])
    r = highly_symmetric_check(O, groups[3])
    assert r.passed and r.info["stabilizer_order"] == 24


def test_random_orbit_vacuous(groups, rng):
    O = orbit(haar_state(3, rng), groups[3])
    r = highly_symmetric_check(O, groups[3])
    assert r.passed and r.info["flag"] == "trivial stabilizer"


def test_theorem1_q2(groups):
    r = theorem1_experiment(field_for_q(2), samples=5, seed=1, G=groups[2])
    assert r["mub_orbit"]["orbit_size"] == 6
    for rec in r["random_orbits"]:
        assert rec["orbit_size"] > 6 and 24 % rec["orbit_size"] == 0 and rec["design2_pass"]
    assert r["all_pass"]


def test_theorem1_q3(groups):
    r = theorem1_experiment(field_for_q(3), samples=3, seed=2, G=groups[3])
    assert r["hesse_orbit"]["orbit_size"] == 9 and r["mub_orbit"]["orbit_size"] == 12
    assert r["hesse_orbit"]["design2_pass"] and r["mub_orbit"]["design2_pass"]
    assert r["smallest_orbit_found"] == {"size": 9, "identified_as": "hesse_sic"}
    assert r["all_pass"]


def test_theorem1_q4(groups):
    r = theorem1_experiment(field_for_q(4), samples=5, seed=3, G=groups[4])
    assert r["mub_orbit"]["orbit_size"] == 20
    assert all(rec["orbit_size"] > 16 for rec in r["random_orbits"])
    assert r["smallest_orbit_found"]["size"] == 20 and r["all_pass"]


def test_theorem1_reproducible(groups):
    a = theorem1_experiment(field_for_q(4), samples=4, seed=7, G=groups[4], threads=1)
    b = theorem1_experiment(field_for_q(4), samples=4, seed=7, G=groups[4], threads=3)
    assert json.dumps(a) == json.dumps(b)
