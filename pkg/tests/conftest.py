import numpy as np
import pytest

from tasep2 import (
    Sector,
    build_hamiltonian_tasep,
    dense_spectrum,
    solve_gap_chain,
)

# ten local exponents for L = 6..33 from the published gap table
PAPER_EXTRAPOLANTS = {
    6: -1.6336892192762,
    9: -1.6252314332778,
    12: -1.6092183117219,
    15: -1.5952666540982,
    18: -1.5839870664789,
    21: -1.5749003909369,
    24: -1.5674968193872,
    27: -1.5613778750522,
    30: -1.5562495252464,
    33: -1.5518961566109,
}


@pytest.fixture(scope="session")
def gap_chain_36():
    """Gap-branch root sets for L = 6, 9, ..., 36."""
    return solve_gap_chain(36)


@pytest.fixture(scope="session")
def spectrum_l6_equal():
    """Dense spectrum of the L=6 equal-density sector (dimension 90)."""
    gen = build_hamiltonian_tasep(6, Sector(6, 2, 2))
    return dense_spectrum(gen)


@pytest.fixture(scope="session")
def spectrum_l9_equal():
    """Dense spectrum of the L=9 equal-density sector (dimension 1680)."""
    gen = build_hamiltonian_tasep(9, Sector(9, 3, 3))
    return dense_spectrum(gen)


def closest(values, target):
    values = np.asarray(values)
    return values[np.argmin(np.abs(values - target))]
