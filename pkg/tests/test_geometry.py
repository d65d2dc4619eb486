import pytest

from spamcal.errors import ValidationError
from spamcal.geometry import (
    RegisterGeometry,
    full_size,
    layers_for_size,
    moore_neighborhood,
)


def test_chain_neighborhood_interior():
    g = RegisterGeometry.chain(4)
    nb = moore_neighborhood(g, 2, 2)
    assert set(nb.members) == {1, 3}


def test_chain_neighborhood_boundary_truncated():
    g = RegisterGeometry.chain(4)
    nb = moore_neighborhood(g, 1, 2)
    assert set(nb.members) == {2}
    assert len(nb.members) < nb.k_bulk


def test_grid_center_k8():
    g = RegisterGeometry.grid(5, 5)
    center = 13  # row 2, col 2 (1-based index into row-major order)
    nb = moore_neighborhood(g, center, 8)
    assert set(nb.members) == {7, 8, 9, 12, 14, 17, 18, 19}


def test_invalid_k_names_admissible_set():
    g = RegisterGeometry.chain(4)
    with pytest.raises(ValidationError, match="admissible"):
        moore_neighborhood(g, 2, 3)
    g2 = RegisterGeometry.grid(3, 3)
    with pytest.raises(ValidationError, match="admissible"):
        moore_neighborhood(g2, 5, 4)


def test_unknown_qubit_rejected():
    g = RegisterGeometry.chain(4)
    with pytest.raises(ValidationError):
        moore_neighborhood(g, 5, 2)
    with pytest.raises(ValidationError):
        moore_neighborhood(g, 0, 2)


def test_bulk_size_exact():
    # far from the boundary the neighborhood has exactly k members
    g = RegisterGeometry.chain(20)
    for k in (0, 2, 4, 6):
        nb = moore_neighborhood(g, 10, k)
        assert len(nb.members) == k
    g2 = RegisterGeometry.grid(9, 9)
    for k in (0, 8, 24):
        nb = moore_neighborhood(g2, 41, k)  # center of the grid
        assert len(nb.members) == k


def test_k0_everywhere_empty():
    g = RegisterGeometry.chain(5)
    for i in range(1, 6):
        assert moore_neighborhood(g, i, 0).members == frozenset()


def test_layers_for_size():
    assert layers_for_size(0, 1) == 0
    assert layers_for_size(6, 1) == 3
    assert layers_for_size(8, 2) == 1
    assert layers_for_size(24, 2) == 2


def test_full_size_covers_register():
    g = RegisterGeometry.chain(6)
    k = full_size(g)
    for i in range(1, 7):
        nb = moore_neighborhood(g, i, k)
        assert set(nb.members) == set(range(1, 7)) - {i}


def test_geometry_validation():
    with pytest.raises(ValidationError):
        RegisterGeometry(2, 1, ((0,), (0,)))  # duplicate positions
    with pytest.raises(ValidationError):
        RegisterGeometry(2, 3, ((0, 0, 0), (1, 1, 1)))  # only 1D/2D
    with pytest.raises(ValidationError):
        RegisterGeometry(2, 1, ((0, 1), (1, 0)))  # wrong coordinate length
