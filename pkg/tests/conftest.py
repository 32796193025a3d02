import numpy as np
import pytest

from odfprobe.catalog import load_shipped_catalog
from odfprobe.crystal import TwoIonCrystal
from odfprobe.quantities import intensity_from_core_anchor
from odfprobe.readout import ReadoutPipeline, build_calibration


@pytest.fixture(scope="session")
def catalog():
    return load_shipped_catalog()


@pytest.fixture(scope="session")
def anchor_intensity():
    return intensity_from_core_anchor()


@pytest.fixture(scope="session")
def crystal():
    return TwoIonCrystal.from_lattice_periods(28, 40, 19, 789.0)


@pytest.fixture(scope="session")
def pipeline(crystal):
    return ReadoutPipeline(crystal)


@pytest.fixture(scope="session")
def six_shift_calibration(pipeline):
    return build_calibration(np.linspace(800.0, 4600.0, 6), pipeline)


@pytest.fixture(scope="session")
def wide_calibration(pipeline):
    # Nodes covering the SP/OP projections of molecular shifts up to ~5 kHz,
    # so extractions in the round-trip tests never extrapolate.
    return build_calibration(np.geomspace(150.0, 5200.0, 12), pipeline)
