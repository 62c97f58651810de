import numpy as np

from losarray.channel import LinkScenario, build_channel, wavelength
from losarray.geometry import ArrayLayout
from losarray.uniform import build_ula, ula_spacing

FC = 62e9
SNR_DB = 20.0
RHO = 100.0


def random_channel(rng, q, m, n):
    """Random unit-modulus channel stack of shape (q, m, n)."""
    return np.exp(2j * np.pi * rng.uniform(size=(q, m, n)))


def random_weights(rng, size, margin=0.0):
    """Random interior point of a capped simplex (raw array)."""
    w = rng.uniform(0.1 + margin, 0.9 - margin, size=size)
    return w


def random_line(rng, n, span=1.0, min_gap=0.01):
    """Random non-uniform linear layout along x with a minimum gap."""
    free = span - min_gap * (n - 1)
    x = np.sort(rng.uniform(0, free, n)) + min_gap * np.arange(n)
    return ArrayLayout(np.c_[x - x.mean(), np.zeros((n, 2))])


def section4_stack(step=5.0, aperture=1.0, n_grid=16):
    g = build_ula(n_grid, aperture / (n_grid - 1), label="grid")
    return build_channel(LinkScenario.from_range(FC, SNR_DB, g, g, 10, 100, step)), g


def section4_ula(distances):
    u = build_ula(4, ula_spacing(wavelength(FC), 92, 4))
    return build_channel(LinkScenario(FC, SNR_DB, u, u, distances))
