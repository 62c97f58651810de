"""LoS channel matrices and capacity evaluation.

Capacities are in bits per channel use (bpcu). All log-determinants are taken
of Hermitian positive-definite matrices through a Cholesky factor, so results
are real by construction.

Matrix arguments may carry leading batch axes (typically the distance axis of
a :class:`ChannelStack`); the capacity functions then return one value per
batch entry.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from losarray.geometry import ArrayLayout

__all__ = [
    "SPEED_OF_LIGHT",
    "ChannelStack",
    "LinkScenario",
    "PowerNorm",
    "SelectionWeights",
    "WeightError",
    "build_channel",
    "capacity_gradient",
    "capacity_relaxed",
    "capacity_selected",
    "db_to_linear",
    "min_capacity",
    "quantize_range",
    "wavelength",
]

SPEED_OF_LIGHT = 299_792_458.0
_LN2 = np.log(2.0)


class WeightError(ValueError):
    """Selection weights violate their box/sum invariants."""


class PowerNorm(str, enum.Enum):
    """Divisor of the SNR in the relaxed capacity.

    ``PAPER_NF`` divides by the candidate grid size, ``SELECTED_N`` by the
    number of selected transmit antennas (the reporting convention).
    """

    PAPER_NF = "paper_Nf"
    SELECTED_N = "selected_N"


def wavelength(carrier_frequency: float) -> float:
    return SPEED_OF_LIGHT / carrier_frequency


def db_to_linear(db: float) -> float:
    return float(10.0 ** (db / 10.0))


def quantize_range(d_min: float, d_max: float, step: float) -> np.ndarray:
    """Equally spaced distances ``d_min, d_min + step, ..., d_max``.

    Raises
    ------
    ValueError
        If the span is not an integral multiple of ``step`` (within 1e-9).
    """
    if not (step > 0):
        raise ValueError(f"step must be positive, got {step}")
    if not (d_min < d_max):
        raise ValueError(f"need d_min < d_max, got [{d_min}, {d_max}]")
    ratio = (d_max - d_min) / step
    n = round(ratio)
    if abs(ratio - n) > 1e-9:
        raise ValueError(
            f"range [{d_min}, {d_max}] is not an integral number of {step} m steps"
        )
    d = d_min + step * np.arange(n + 1, dtype=float)
    d[-1] = d_max
    return d


@dataclass(frozen=True)
class LinkScenario:
    """Carrier, SNR, candidate grids and the quantized distance range.

    The Tx grid is used as given; the Rx grid is translated along +z by each
    distance in turn.
    """

    carrier_frequency: float
    snr_db: float
    tx_grid: ArrayLayout
    rx_grid: ArrayLayout
    distances: np.ndarray

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.distances, dtype=float)).copy()
        if d.ndim != 1 or d.size < 1:
            raise ValueError("need at least one transmit distance")
        if not np.all(np.isfinite(d)) or np.any(np.diff(d) <= 0):
            raise ValueError("distances must be finite and strictly increasing")
        if not (self.carrier_frequency > 0):
            raise ValueError("carrier frequency must be positive")
        if not np.isfinite(self.snr_db):
            raise ValueError("SNR must be finite")
        d.setflags(write=False)
        object.__setattr__(self, "distances", d)

    @classmethod
    def from_range(cls, carrier_frequency, snr_db, tx_grid, rx_grid, d_min, d_max, step):
        return cls(carrier_frequency, snr_db, tx_grid, rx_grid, quantize_range(d_min, d_max, step))

    @property
    def wavelength(self) -> float:
        return wavelength(self.carrier_frequency)

    @property
    def rho(self) -> float:
        return db_to_linear(self.snr_db)


@dataclass(frozen=True)
class ChannelStack:
    """Full-grid channel matrices, shape ``(Q, M_f, N_f)``."""

    matrices: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.matrices, dtype=complex)
        if h.ndim == 2:
            h = h[None]
        if h.ndim != 3:
            raise ValueError(f"channel stack must be (Q, M_f, N_f), got {h.shape}")
        d = np.atleast_1d(np.asarray(self.distances, dtype=float))
        if d.shape != (h.shape[0],):
            raise ValueError("one distance per channel matrix required")
        h.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "matrices", h)
        object.__setattr__(self, "distances", d)

    def __len__(self) -> int:
        return self.matrices.shape[0]

    def __getitem__(self, q) -> np.ndarray:
        return self.matrices[q]

    @property
    def n_rx(self) -> int:
        return self.matrices.shape[1]

    @property
    def n_tx(self) -> int:
        return self.matrices.shape[2]

    def select(self, tx_indices, rx_indices) -> np.ndarray:
        """Submatrices for the given Rx rows and Tx columns, shape ``(Q, M, N)``."""
        rows = np.asarray(rx_indices, dtype=int)
        cols = np.asarray(tx_indices, dtype=int)
        return self.matrices[:, rows[:, None], cols[None, :]]


@dataclass(frozen=True)
class SelectionWeights:
    """Relaxed diagonal of a selection matrix: ``0 <= w <= 1``, ``sum(w) = k``."""

    w: np.ndarray
    target_sum: int

    def __post_init__(self):
        w = np.array(self.w, dtype=float, copy=True).ravel()
        k = int(self.target_sum)
        if k < 1 or k > w.size:
            raise WeightError(f"target sum {k} outside [1, {w.size}]")
        if not np.all(np.isfinite(w)):
            raise WeightError("weights must be finite")
        if w.min() < -1e-12 or w.max() > 1 + 1e-12:
            raise WeightError("weights must lie in [0, 1]")
        if abs(w.sum() - k) > 1e-8:
            raise WeightError(f"weights sum to {w.sum():.12g}, expected {k}")
        w = np.clip(w, 0.0, 1.0)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "target_sum", k)

    def __len__(self) -> int:
        return self.w.size

    @classmethod
    def uniform(cls, size: int, k: int) -> "SelectionWeights":
        return cls(np.full(size, k / size), k)

    @classmethod
    def from_indices(cls, indices, size: int) -> "SelectionWeights":
        w = np.zeros(size)
        w[np.asarray(indices, dtype=int)] = 1.0
        return cls(w, len(indices))

    @property
    def is_binary(self) -> bool:
        return bool(np.all(np.minimum(np.abs(self.w), np.abs(self.w - 1.0)) <= 1e-9))

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.w > 0.5)


def build_channel(scenario: LinkScenario) -> ChannelStack:
    """Unit-modulus LoS channel ``exp(-j 2 pi / lambda * |r_m - t_n|)`` per distance."""
    k = 2.0 * np.pi / scenario.wavelength
    t = scenario.tx_grid.points
    r = scenario.rx_grid.points
    base = r[:, None, :] - t[None, :, :]  # (M_f, N_f, 3)
    lateral = base[..., 0] ** 2 + base[..., 1] ** 2
    dz = base[..., 2][None] + scenario.distances[:, None, None]
    dist = np.sqrt(lateral[None] + dz**2)
    return ChannelStack(np.exp(-1j * k * dist), scenario.distances)


def _hpd_logdet2(k: np.ndarray) -> np.ndarray:
    """log2 det of Hermitian PD matrices via Cholesky; batched over leading axes."""
    chol = np.linalg.cholesky(k)
    diag = np.diagonal(chol, axis1=-2, axis2=-1).real
    return 2.0 * np.log(diag).sum(axis=-1) / _LN2


def _gram(a: np.ndarray) -> np.ndarray:
    return a @ np.swapaxes(a, -1, -2).conj()


def capacity_selected(h, rho: float):
    """``log2 det(I_M + rho/N H H^H)`` for an ``M x N`` channel (or a batch)."""
    h = np.asarray(h, dtype=complex)
    if h.ndim < 2:
        h = np.atleast_2d(h)
    m, n = h.shape[-2:]
    kmat = np.eye(m) + (rho / n) * _gram(h)
    out = _hpd_logdet2(kmat)
    return float(out) if out.ndim == 0 else out


def _weights(w, name: str) -> tuple[np.ndarray, float]:
    if isinstance(w, SelectionWeights):
        return w.w, float(w.target_sum)
    arr = np.asarray(w, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise WeightError(f"{name} weights must be finite")
    if arr.min() < -1e-12:
        raise WeightError(f"{name} weights must be nonnegative")
    total = float(arr.sum())
    if total <= 0:
        raise WeightError(f"{name} weights are identically zero")
    return np.clip(arr, 0.0, None), total


def snr_scale(rho: float, wt, power_norm) -> float:
    """SNR factor ``c = rho / divisor`` for the given normalization."""
    w, total = _weights(wt, "tx")
    if PowerNorm(power_norm) is PowerNorm.PAPER_NF:
        return rho / w.size
    return rho / total


def relaxed_capacity_raw(h: np.ndarray, wt: np.ndarray, wr: np.ndarray, c: float) -> np.ndarray:
    """Relaxed capacity for raw weight arrays and a fixed SNR factor ``c``."""
    a = np.sqrt(wr)[:, None] * h
    kmat = np.eye(h.shape[-2]) + c * ((a * wt) @ np.swapaxes(a, -1, -2).conj())
    return _hpd_logdet2(kmat)


def relaxed_value_and_gradient(h, wt, wr, c, side):
    """Per-distance relaxed capacity and its gradient w.r.t. one side's weights.

    Returns arrays of shape ``(...,)`` and ``(..., n_side)``.
    """
    if side == "tx":
        # K = I_M + c A diag(wt) A^H, A = diag(sqrt(wr)) H
        a = np.sqrt(wr)[:, None] * h
        n_out = h.shape[-2]
        w_in = wt
    elif side == "rx":
        # Sylvester-swapped: K = I_N + c B diag(wr) B^H, B = diag(sqrt(wt)) H^H
        a = np.sqrt(wt)[:, None] * np.swapaxes(h, -1, -2).conj()
        n_out = h.shape[-1]
        w_in = wr
    else:
        raise ValueError(f"side must be 'tx' or 'rx', got {side!r}")
    kmat = np.eye(n_out) + c * ((a * w_in) @ np.swapaxes(a, -1, -2).conj())
    chol = np.linalg.cholesky(kmat)
    value = 2.0 * np.log(np.diagonal(chol, axis1=-2, axis2=-1).real).sum(axis=-1) / _LN2
    # [A^H K^-1 A]_nn = || L^-1 a_n ||^2
    x = np.linalg.solve(chol, a)
    grad = (c / _LN2) * (x.real**2 + x.imag**2).sum(axis=-2)
    return value, grad


def capacity_relaxed(hq, wt, wr, rho: float, power_norm=PowerNorm.PAPER_NF):
    """Relaxed capacity ``log2 det(I + c S_r H diag(wt) H^H S_r)``, ``S_r = diag(sqrt(wr))``.

    Parameters
    ----------
    hq : (..., M_f, N_f) array_like
        Full-grid channel matrix (or stack).
    wt, wr : SelectionWeights or array_like
        Tx and Rx weights. Raw arrays are accepted (only nonnegativity is
        checked) and then ``selected_N`` uses their sum as the divisor.
    rho : float
        Linear SNR.
    power_norm : PowerNorm
        ``paper_Nf`` divides ``rho`` by ``N_f``, ``selected_N`` by the Tx
        target sum.
    """
    h = np.asarray(hq, dtype=complex)
    w_t, _ = _weights(wt, "tx")
    w_r, _ = _weights(wr, "rx")
    if h.shape[-1] != w_t.size or h.shape[-2] != w_r.size:
        raise ValueError(f"weights ({w_r.size}, {w_t.size}) do not match channel {h.shape[-2:]}")
    out = relaxed_capacity_raw(h, w_t, w_r, snr_scale(rho, wt, power_norm))
    return float(out) if out.ndim == 0 else out


def capacity_gradient(hq, wt, wr, rho: float, power_norm=PowerNorm.PAPER_NF, side: str = "tx"):
    """Gradient of :func:`capacity_relaxed` w.r.t. the ``side`` weights.

    The SNR factor is held fixed (it depends on the target sum, not on the
    weights themselves). Every component is nonnegative.
    """
    h = np.asarray(hq, dtype=complex)
    w_t, _ = _weights(wt, "tx")
    w_r, _ = _weights(wr, "rx")
    _, grad = relaxed_value_and_gradient(h, w_t, w_r, snr_scale(rho, wt, power_norm), side)
    return grad


def min_capacity(stack: ChannelStack, wt, wr, rho: float, power_norm=PowerNorm.PAPER_NF):
    """Worst-case relaxed capacity over distances and its (first) index."""
    caps = capacity_relaxed(stack.matrices, wt, wr, rho, power_norm)
    caps = np.atleast_1d(caps)
    q = int(np.argmin(caps))
    return float(caps[q]), q
