import math

import numpy as np
import pytest

from billiardlab.billiard import (
    SectorGeometry,
    frequency_to_wavevector,
    sector_eigenvalues,
    sector_weyl_params,
)


@pytest.fixture(scope="session")
def sector():
    return SectorGeometry(radius=0.8, angle=math.pi / 3.0)


@pytest.fixture(scope="session")
def sector_spectrum_46(sector):
    """Sector spectrum of the 60-degree, R=0.8 m billiard up to 4.6 GHz."""
    return sector_eigenvalues(sector, frequency_to_wavevector(4.6e9))


@pytest.fixture(scope="session")
def sector_weyl_46(sector, sector_spectrum_46):
    return sector_weyl_params(sector, sector_spectrum_46)
