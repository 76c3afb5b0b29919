import numpy as np
import pytest

from drivenosc import LatticeParams, PathState, neighbor_indices


@pytest.mark.parametrize(
    "site, expected",
    [(1, (120, 2)), (120, (119, 1)), (5, (4, 6))],
)
def test_neighbor_indices(site, expected, lattice):
    assert neighbor_indices(site, lattice) == expected


@pytest.mark.parametrize("n", [3, 4, 7, 120])
def test_neighbors_compose_to_identity(n):
    lat = LatticeParams(n)
    for site in range(1, n + 1):
        prev, nxt = neighbor_indices(site, lat)
        assert neighbor_indices(nxt, lat)[0] == site
        assert neighbor_indices(prev, lat)[1] == site
        assert prev != site and nxt != site


@pytest.mark.parametrize("site", [0, 121, -1])
def test_neighbor_out_of_range(site, lattice):
    with pytest.raises(IndexError):
        neighbor_indices(site, lattice)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_sites=2),
        dict(n_sites=3.5),
        dict(m_tilde=0.0),
        dict(m_tilde=-1.0),
        dict(omega_tilde=0.0),
        dict(omega_tilde=float("inf")),
        dict(m_tilde=float("nan")),
    ],
)
def test_lattice_params_invariants(kwargs):
    with pytest.raises(ValueError):
        LatticeParams(**kwargs)


def test_lattice_defaults():
    lat = LatticeParams()
    assert (lat.n_sites, lat.m_tilde, lat.omega_tilde) == (120, 1.0, 1.0)
    assert lat.spring == 1.0
    np.testing.assert_array_equal(lat.sites(), np.arange(1, 121))


def test_path_state_is_read_only_copy():
    src = np.zeros(5)
    path = PathState(src)
    src[0] = 3.0
    assert path[1] == 0.0
    with pytest.raises(ValueError):
        path.positions[0] = 1.0


def test_path_state_rejects_non_finite():
    with pytest.raises(ValueError):
        PathState([0.0, np.nan, 1.0])


def test_path_replace_and_check(lattice):
    path = PathState.zeros(lattice)
    moved = path.replace(120, 2.5)
    assert moved[120] == 2.5 and path[120] == 0.0
    moved.check(lattice)
    with pytest.raises(ValueError):
        PathState(np.zeros(7)).check(lattice)
