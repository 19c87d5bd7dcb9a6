import numpy as np
import pytest

from blcbands import BandSpec, Sample, build_grid, ks_band, massart_kappa, refine_blc


@pytest.fixture(scope="session")
def normal_ks_refined():
    """A refined KS band on a fixed standard normal sample (n = 100)."""
    rng = np.random.default_rng(20251101)
    sample = Sample(rng.standard_normal(100))
    grid = build_grid(sample, n_fill=128)
    spec = BandSpec("KS", 0.1, massart_kappa(0.1))
    raw = ks_band(sample, spec, grid)
    res = refine_blc(raw)
    assert res.feasible
    return raw, res
