import math

import numpy as np
import pytest

from rabidft.dicke import (
    census_distance,
    irregular_faces,
    is_regular,
    lifted_pauli_z,
    polarization,
    regularity_rank,
    support_on_face,
)
from rabidft.params import ParameterError, UnsupportedSizeError


def test_lifted_pauli():
    assert np.array_equal(lifted_pauli_z(2, 1), [1, 1, -1, -1])
    assert np.array_equal(lifted_pauli_z(2, 2), [1, -1, 1, -1])
    assert np.array_equal(lifted_pauli_z(1, 1), [1, -1])
    with pytest.raises(UnsupportedSizeError):
        lifted_pauli_z(4, 1)


def test_rank_examples():
    assert regularity_rank([1.0, 0.0]).rank == 1
    rep = regularity_rank([math.sqrt(0.5)] * 2)
    assert rep.rank == 2 and rep.regular_witnessed
    rep = regularity_rank([math.sqrt(0.5), math.sqrt(0.5), 0, 0])
    assert rep.rank == 2 and not rep.regular_witnessed
    assert rep.polarization[0] == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        regularity_rank([0.5, -0.5])


def test_census_counts():
    assert irregular_faces(1).counts() == (2,)
    assert irregular_faces(2).counts() == (4, 6)
    c3 = irregular_faces(3)
    assert c3.counts() == (8, 28, 20)
    kinds = [f.kind for f in c3.planes]
    assert (kinds.count("face"), kinds.count("diagonal"), kinds.count("triangle")) == (6, 6, 8)
    with pytest.raises(UnsupportedSizeError):
        irregular_faces(4)


def test_census_json_shape():
    d = irregular_faces(2).to_dict()
    assert d["counts"] == [4, 6]
    assert all(len(s["corners"]) == 2 for s in d["segments"])


def test_membership_examples():
    assert not is_regular([0.0, 0.0], 2)
    assert is_regular([0.5, 0.2], 2)
    assert not is_regular([1.0, 1.0, 1.0], 3)
    assert is_regular([0.3], 1) and not is_regular([-1.0], 1)
    assert census_distance([0.5, 0.2], 2) == pytest.approx(0.3 / math.sqrt(2))
    with pytest.raises(ParameterError):
        is_regular([1.5, 0.0], 2)


def test_regular_point_has_only_full_rank_witnesses():
    target = np.array([0.5, 0.2])
    corners = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
    found = 0
    for s in np.linspace(0, 0.4, 401):
        # non-negative weights with the prescribed polarization, free parameter s = w3
        w2 = (1 - target[0]) / 2 - s
        w0 = (1 + target[1]) / 2 - w2
        w1 = (1 + target[0]) / 2 - w0
        w = np.array([w0, w1, w2, s])
        if np.any(w < 0):
            continue
        found += 1
        assert np.allclose(corners.T @ w, target)
        assert regularity_rank(np.sqrt(w)).rank == 3
    assert found > 100


@pytest.mark.parametrize("n_sites", [1, 2, 3])
def test_random_rank_oracle_agrees_with_census(n_sites):
    rng = np.random.default_rng(100 + n_sites)
    for _ in range(2000):
        chi = rng.random(2**n_sites)
        chi[rng.random(2**n_sites) < 0.45] = 0.0
        if not chi.any():
            continue
        chi /= np.linalg.norm(chi)
        rep = regularity_rank(chi)
        dist = census_distance(rep.polarization, n_sites)
        if rep.rank < n_sites + 1:
            assert dist <= 1e-9 and support_on_face(chi, n_sites)
        if dist >= 1e-3:
            assert rep.rank == n_sites + 1
        if support_on_face(chi, n_sites):
            assert rep.rank < n_sites + 1
