import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mubkit.gf import field_for_q, rays
from mubkit.hw import hw_group, maximal_abelian_subgroup
from mubkit.states import (
    HESSE_FIDUCIAL, PureState, StateSet, canonical_mub, fingerprint, hesse_sic, joint_eigenbasis,
)

ALL_Q = (2, 3, 4, 5, 7, 8, 9)


def test_mub_q2_bases():
    S = canonical_mub(field_for_q(2))
    Z, X, Y = S.bases()
    s = 1 / np.sqrt(2)
    assert np.allclose(Z, np.eye(2))
    assert {fingerprint(v) for v in X} == {fingerprint([s, s]), fingerprint([s, -s])}
    assert {fingerprint(v) for v in Y} == {fingerprint([s, 1j * s]), fingerprint([s, -1j * s])}
    P = np.abs(np.concatenate([Z, X, Y]).conj() @ np.concatenate([Z, X, Y]).T) ** 2
    cross = [P[i, j] for i in range(6) for j in range(6) if i // 2 != j // 2]
    assert len(cross) == 24 and np.allclose(cross, 0.5)


def test_mub_q3_counts():
    S = canonical_mub(field_for_q(3))
    assert len(S) == 12 and len(S.grouping) == 4


@pytest.mark.parametrize("q", ALL_Q)
def test_first_basis_is_computational(q):
    S = canonical_mub(field_for_q(q))
    B = np.abs(S.bases()[0])
    assert np.allclose(np.sort(B, axis=1)[:, -1], 1, atol=1e-12)
    assert sorted(np.argmax(B, axis=1)) == list(range(q))
    assert np.allclose(S.states[0], np.eye(q)[0])


@pytest.mark.parametrize("q", ALL_Q)
def test_eigenvector_and_unbiasedness(q):
    f = field_for_q(q)
    S = canonical_mub(f)
    bases = S.bases()
    for b, r in enumerate(rays(f)):
        for D in maximal_abelian_subgroup(f, r).matrices():
            V = bases[b].T
            lam = np.einsum("ij,ik,kj->j", V.conj(), D, V)
            assert np.linalg.norm(D @ V - V * lam, axis=0).max() <= 1e-9
            assert np.allclose(np.abs(lam), 1)
        assert np.abs(bases[b].conj() @ bases[b].T - np.eye(q)).max() <= 1e-10
    for a, b in itertools.combinations(range(q + 1), 2):
        P = np.abs(bases[a].conj() @ bases[b].T) ** 2
        assert np.abs(P - 1 / q).max() <= 1e-9


@pytest.mark.parametrize("q", (2, 3, 4, 5, 7, 8, 9))
def test_gauge_invariant(q):
    S = canonical_mub(field_for_q(q))
    for v in S.states:
        k = int(np.argmax(np.abs(v) > 1e-9))
        assert abs(v[k].imag) < 1e-12 and v[k].real > 0
        assert abs(np.linalg.norm(v) - 1) < 1e-12


@pytest.mark.parametrize("q", (3, 4, 5, 9))
def test_recomputed_with_permuted_elements(q, rng):
    f = field_for_q(q)
    a = canonical_mub(f)
    perm = rng.permutation(q)
    b = canonical_mub(f, element_order=perm)
    assert a.fingerprints() == b.fingerprints()


@pytest.mark.parametrize("q", (2, 3, 4, 5, 8))
def test_hw_transitive_on_each_basis(q):
    f = field_for_q(q)
    hw = hw_group(f)
    S = canonical_mub(f)
    for basis in S.bases():
        keys = {fingerprint(v) for v in basis}
        images = {fingerprint(D @ basis[0]) for D in hw.matrices}
        assert images == keys


def test_hesse_sic():
    S = hesse_sic()
    assert np.allclose(HESSE_FIDUCIAL, [0, 1 / np.sqrt(2), -1 / np.sqrt(2)])
    assert np.allclose(S.states[0], HESSE_FIDUCIAL)
    assert len(S) == 9
    P = np.abs(S.states.conj() @ S.states.T) ** 2
    off = P[~np.eye(9, dtype=bool)]
    assert np.abs(off - 0.25).max() <= 1e-10


def test_fingerprint_basics():
    e0, e1 = np.array([1, 0], complex), np.array([0, 1], complex)
    assert fingerprint(e0) != fingerprint(e1)
    assert PureState.from_vector(e0).fingerprint() == fingerprint(e0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 2 * np.pi), st.integers(0, 2**31 - 1))
def test_fingerprint_phase_insensitive(theta, seed):
    r = np.random.default_rng(seed)
    v = r.normal(size=5) + 1j * r.normal(size=5)
    v /= np.linalg.norm(v)
    assert fingerprint(np.exp(1j * theta) * v) == fingerprint(v)


def test_joint_eigenbasis_degenerate(rng):
    # commuting pair with degenerate spectra, resolved only jointly
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    Q, _ = np.linalg.qr(A)
    M1 = Q @ np.diag([1, 1, -1, -1]) @ Q.conj().T
    M2 = Q @ np.diag([1, -1, 1, -1]) @ Q.conj().T
    V = joint_eigenbasis([M1, M2])
    for M in (M1, M2):
        lam = np.einsum("ij,ik,kj->j", V.conj(), M, V)
        assert np.linalg.norm(M @ V - V * lam, axis=0).max() < 1e-10


@pytest.mark.parametrize("make", [lambda: canonical_mub(field_for_q(4)), hesse_sic])
def test_json_round_trip(make):
    S = make()
    text = json.dumps(S.to_json())
    T = StateSet.from_json(json.loads(text))
    assert np.array_equal(S.states, T.states)
    assert S.grouping == T.grouping
    assert T.field == S.field
