import pytest

from certsobol.model_full import Discretization
from certsobol.reduced_basis import ReducedBasis, SnapshotSet, build_basis, collect_snapshots, training_grid

NU_RANGE = (1.0, 20.0)
U0M_RANGE = (-0.3, 0.3)


@pytest.fixture(scope="session")
def disc() -> Discretization:
    return Discretization()


@pytest.fixture(scope="session")
def snapshots(disc: Discretization) -> SnapshotSet:
    return collect_snapshots(training_grid(NU_RANGE, U0M_RANGE, 8, 5), disc)


@pytest.fixture(scope="session")
def basis(snapshots: SnapshotSet) -> ReducedBasis:
    return build_basis(snapshots, 6)
