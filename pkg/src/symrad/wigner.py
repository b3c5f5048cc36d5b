"""Wigner transform of grid wavefunctions, closed-form Gaussian Wigner
functions and position/momentum marginals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._parallel import map_chunks
from .errors import DimensionMismatch, GridTooCoarse, InvalidState, RankDeficient
from .states import Axis, GaussianState, WaveFunction, cell_volume, cubic_sample, grid_points
from .symplectic import spd_sqrt

IMAG_TOL = 1e-10
ALIAS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WignerFunction:
    """Real samples of W psi on the phase-space grid x-axes x p-axes."""

    x_axes: tuple[Axis, ...]
    p_axes: tuple[Axis, ...]
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        x_axes, p_axes = tuple(self.x_axes), tuple(self.p_axes)
        if len(x_axes) != len(p_axes):
            raise DimensionMismatch("need as many p-axes as x-axes")
        vals = np.asarray(self.values, dtype=float)
        shape = tuple(ax.count for ax in x_axes + p_axes)
        if vals.size != int(np.prod(shape)):
            raise DimensionMismatch(f"{vals.size} samples for grid {shape}")
        vals = vals.reshape(shape)
        vals.setflags(write=False)
        object.__setattr__(self, "x_axes", x_axes)
        object.__setattr__(self, "p_axes", p_axes)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def n(self) -> int:
        return len(self.x_axes)

    @property
    def axes(self) -> tuple[Axis, ...]:
        return self.x_axes + self.p_axes

    def __call__(self, z: np.ndarray, *, strict: bool = True) -> np.ndarray:
        """Cubic interpolation at phase-space points ``z`` of shape (2n, ...)."""
        return cubic_sample(self.values, self.axes, z, strict=strict)

    def integral(self) -> float:
        return float(self.values.sum() * cell_volume(self.axes))


@dataclass(frozen=True, eq=False)
class Density:
    axes: tuple[Axis, ...]
    values: np.ndarray

    def integral(self) -> float:
        return float(self.values.sum() * cell_volume(self.axes))

    @property
    def min(self) -> float:
        return float(self.values.min())


def default_p_axes(psi: WaveFunction) -> tuple[Axis, ...]:
    """p-axes conjugate to the y = 2s lag grid: period pi hbar / h, same count.

    On these axes the position marginal is exact: the p-sum collapses to the
    zero-lag term.
    """
    return tuple(Axis(-0.5 * math.pi * psi.hbar / ax.h, 0.5 * math.pi * psi.hbar / ax.h, ax.count)
                 for ax in psi.axes)


def _check_band(psi: WaveFunction) -> None:
    """Lag products alias unless momentum content sits inside half the Nyquist band."""
    spec = np.abs(np.fft.fftn(psi.values)) ** 2
    total = spec.sum()
    if total == 0:
        return
    mask = np.zeros(spec.shape, dtype=bool)
    for d, ax in enumerate(psi.axes):
        f = np.abs(np.fft.fftfreq(ax.count))
        sl = [None] * psi.n
        sl[d] = slice(None)
        mask |= (f >= 0.25)[tuple(sl)]
    frac = spec[mask].sum() / total
    if frac > ALIAS_TOL:
        raise GridTooCoarse(
            f"{frac:.2e} of the spectral weight lies beyond half the Nyquist band; "
            "refine the x-grid"
        )


def _lag_kernel(ax: Axis, p_ax: Axis, hbar: float) -> np.ndarray:
    """E[l, k] = exp(-2 i p_l s_k / hbar) for lags s_k = k h, |k| < count."""
    s = np.arange(-(ax.count - 1), ax.count) * ax.h
    return np.exp(-2j * np.outer(p_ax.points, s) / hbar)


def wigner(psi: WaveFunction, p_axes: Sequence[Axis] | None = None, *, chunk: int = 64) -> WignerFunction:
    """W psi(x, p) = (pi hbar)^-n int e^{-2i p.s/hbar} psi(x+s) psi*(x-s) ds.

    The lag s runs over integer multiples of the grid step, so psi(x +- s) are
    grid samples and the quadrature is exact for states band-limited to half
    the Nyquist band (checked; GridTooCoarse otherwise). The default p-axes are
    from :func:`default_p_axes`; any other uniform p-axes may be requested.
    """
    n, hbar = psi.n, psi.hbar
    p_axes = tuple(p_axes) if p_axes is not None else default_p_axes(psi)
    if len(p_axes) != n:
        raise DimensionMismatch(f"{len(p_axes)} p-axes for an n={n} state")
    _check_band(psi)

    counts = psi.shape
    pad = np.zeros(tuple(3 * c for c in counts), dtype=complex)
    pad[tuple(slice(c, 2 * c) for c in counts)] = psi.values
    kernels = [_lag_kernel(ax, pax, hbar) for ax, pax in zip(psi.axes, p_axes)]
    lag_idx = [np.arange(-(c - 1), c) for c in counts]
    pref = (math.pi * hbar) ** (-n) * cell_volume(psi.axes)
    flat_x = np.array(np.unravel_index(np.arange(int(np.prod(counts))), counts))

    def block(lo: int, hi: int) -> np.ndarray:
        m = hi - lo
        plus, minus = [], []
        for d in range(n):
            shape = [1] * (n + 1)
            shape[d + 1] = lag_idx[d].size
            j = flat_x[d, lo:hi].reshape([m] + [1] * n) + counts[d]
            k = lag_idx[d].reshape(shape)
            plus.append(j + k)
            minus.append(j - k)
        prod = pad[tuple(plus)] * np.conj(pad[tuple(minus)])
        for d in range(n):
            prod = np.moveaxis(np.tensordot(prod, kernels[d], axes=([d + 1], [1])), -1, d + 1)
        return prod

    parts = map_chunks(block, flat_x.shape[1], chunk)
    full = pref * np.concatenate(parts, axis=0)
    resid = np.abs(full.imag).max()
    if resid > IMAG_TOL:
        raise GridTooCoarse(f"Wigner imaginary residue {resid:.2e} exceeds {IMAG_TOL}")
    shape = counts + tuple(ax.count for ax in p_axes)
    return WignerFunction(psi.axes, p_axes, full.real.reshape(shape), hbar)


def marginal_position(Wf: WignerFunction) -> Density:
    n = Wf.n
    vals = Wf.values.sum(axis=tuple(range(n, 2 * n))) * cell_volume(Wf.p_axes)
    return Density(Wf.x_axes, vals)


def marginal_momentum(Wf: WignerFunction) -> Density:
    n = Wf.n
    vals = Wf.values.sum(axis=tuple(range(n))) * cell_volume(Wf.x_axes)
    return Density(Wf.p_axes, vals)


def gaussian_G(g: GaussianState) -> np.ndarray:
    Vi = np.linalg.inv(g.V)
    W = g.W
    return np.block([[g.V + W @ Vi @ W, W @ Vi], [Vi @ W, Vi]])


def gaussian_wigner(g: GaussianState) -> tuple[Callable[..., np.ndarray], np.ndarray]:
    """Closed form (pi hbar)^-n exp(-G z.z / hbar) and the matrix G.

    The evaluator takes 2n broadcastable coordinate arrays x_1..x_n, p_1..p_n.
    """
    G = gaussian_G(g)
    n, hbar = g.n, g.hbar

    def evaluate(*z):
        if len(z) != 2 * n:
            raise DimensionMismatch(f"expected {2 * n} phase-space coordinates")
        q = sum(G[i, j] * z[i] * z[j] for i in range(2 * n) for j in range(2 * n))
        return (math.pi * hbar) ** (-n) * np.exp(-q / hbar)

    return evaluate, G


def gaussian_symplectic_factor(g: GaussianState) -> np.ndarray:
    """S = [[V^1/2, 0], [V^-1/2 W, V^-1/2]], so that S^T S = G."""
    try:
        root = spd_sqrt(g.V)
    except RankDeficient as exc:  # pragma: no cover - GaussianState already checks V > 0
        raise InvalidState(str(exc)) from None
    iroot = np.linalg.inv(root)
    return np.block([[root, np.zeros_like(root)], [iroot @ g.W, iroot]])


def sample_wigner(evaluate: Callable[..., np.ndarray], x_axes, p_axes, hbar: float = 1.0) -> WignerFunction:
    """Tabulate a closed-form phase-space function on a grid."""
    axes = tuple(x_axes) + tuple(p_axes)
    vals = evaluate(*grid_points(axes))
    vals = np.broadcast_to(vals, tuple(ax.count for ax in axes))
    return WignerFunction(tuple(x_axes), tuple(p_axes), np.array(vals), hbar)
