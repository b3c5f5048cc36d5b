"""Grid wavefunctions, the hbar-scaled Fourier transform and Gaussian states.

All grids are uniform with the midpoint convention: an :class:`Axis` with
``count`` cells on ``[min, max]`` samples at ``min + (k + 1/2) h``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy import fft as sfft
from scipy.ndimage import map_coordinates

from .errors import (
    BadCoverage,
    DimensionMismatch,
    InterpolationOutOfRange,
    InvalidState,
    ValidationError,
)
from .symplectic import as_square

MIN_COUNT = 8


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or self.max <= self.min:
            raise ValidationError(f"axis needs finite max > min, got [{self.min}, {self.max}]")
        if int(self.count) != self.count or self.count < MIN_COUNT:
            raise ValidationError(f"axis count must be an integer >= {MIN_COUNT}, got {self.count}")
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        object.__setattr__(self, "count", int(self.count))

    @property
    def h(self) -> float:
        return (self.max - self.min) / self.count

    @property
    def points(self) -> np.ndarray:
        return self.min + (np.arange(self.count) + 0.5) * self.h

    @property
    def first(self) -> float:
        return self.min + 0.5 * self.h

    @property
    def last(self) -> float:
        return self.max - 0.5 * self.h

    def conjugate(self, hbar: float) -> "Axis":
        """Momentum axis paired with this one by the discrete Fourier transform.

        Same count, spacing 2 pi hbar / (count h), centred on zero.
        """
        half = math.pi * hbar / self.h
        return Axis(-half, half, self.count)

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``min:max:count``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"axis spec must be min:max:count, got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise ValidationError(f"bad axis spec {text!r}: {exc}") from None

    def __str__(self) -> str:
        return f"{self.min:g}:{self.max:g}:{self.count}"


def grid_points(axes: Sequence[Axis]) -> list[np.ndarray]:
    """Broadcastable coordinate arrays, one per axis (``indexing='ij'``)."""
    return np.meshgrid(*[ax.points for ax in axes], indexing="ij", sparse=True)


def cell_volume(axes: Sequence[Axis]) -> float:
    return float(np.prod([ax.h for ax in axes]))


def quadratic_form(M: np.ndarray, axes: Sequence[Axis]) -> np.ndarray:
    """Evaluate M x . x on the grid."""
    xs = grid_points(axes)
    n = len(axes)
    out = np.zeros(tuple(ax.count for ax in axes))
    for i in range(n):
        for j in range(n):
            if M[i, j] != 0.0:
                out = out + M[i, j] * xs[i] * xs[j]
    return out


def cubic_sample(
    values: np.ndarray, axes: Sequence[Axis], points: np.ndarray, *, strict: bool = True
) -> np.ndarray:
    """Separable cubic-spline interpolation of grid samples.

    ``points`` has shape (d, ...) with d = len(axes). With ``strict`` a point
    outside the sampled range raises InterpolationOutOfRange; otherwise such
    points read as zero.
    """
    points = np.asarray(points, dtype=float)
    if points.shape[0] != len(axes):
        raise DimensionMismatch(f"points have {points.shape[0]} coordinates, grid has {len(axes)}")
    coords = []
    outside = np.zeros(points.shape[1:], dtype=bool)
    for d, ax in enumerate(axes):
        c = (points[d] - ax.first) / ax.h
        bad = (c < -1e-9) | (c > ax.count - 1 + 1e-9)
        outside |= bad
        coords.append(c)
    if strict and outside.any():
        raise InterpolationOutOfRange(
            f"{int(outside.sum())} evaluation points fall outside the sampled grid"
        )
    out = map_coordinates(np.asarray(values), coords, order=3, mode="nearest", prefilter=True)
    if not strict:
        out = np.where(outside, 0.0, out)
    return out


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex samples of psi on a uniform grid."""

    axes: tuple[Axis, ...]
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        axes = tuple(self.axes)
        vals = np.asarray(self.values, dtype=complex)
        shape = tuple(ax.count for ax in axes)
        if vals.size != int(np.prod(shape)):
            raise DimensionMismatch(f"{vals.size} samples for grid {shape}")
        vals = vals.reshape(shape)
        if not np.all(np.isfinite(vals)):
            raise InvalidState("wavefunction has non-finite samples")
        if not self.hbar > 0:
            raise ValidationError(f"hbar must be positive, got {self.hbar}")
        vals.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def with_values(self, values: np.ndarray) -> "WaveFunction":
        return WaveFunction(self.axes, values, self.hbar)

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Centred generalized Gaussian psi_{V,W}."""

    V: np.ndarray
    W: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        try:
            V = as_square(self.V, "V")
            W = as_square(self.W, "W")
        except ValidationError as exc:
            raise InvalidState(str(exc)) from None
        if V.shape != W.shape:
            raise InvalidState(f"V is {V.shape} but W is {W.shape}")
        if np.abs(V - V.T).max() > 1e-12 or np.abs(W - W.T).max() > 1e-12:
            raise InvalidState("V and W must be symmetric")
        if np.linalg.eigvalsh(V)[0] <= 0:
            raise InvalidState("V must be positive definite")
        if not self.hbar > 0:
            raise InvalidState(f"hbar must be positive, got {self.hbar}")
        for a in (V, W):
            a.setflags(write=False)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def n(self) -> int:
        return self.V.shape[0]

    def to_json(self) -> dict:
        return {"V": self.V.tolist(), "W": self.W.tolist(), "hbar": self.hbar}

    @classmethod
    def from_json(cls, obj: dict) -> "GaussianState":
        return cls(obj["V"], obj["W"], float(obj.get("hbar", 1.0)))

    def position_std(self) -> np.ndarray:
        """Per-coordinate standard deviation of |psi|^2."""
        return np.sqrt(0.5 * self.hbar * np.diag(np.linalg.inv(self.V)))

    def __call__(self, *x: np.ndarray) -> np.ndarray:
        """Closed-form psi_{V,W} at broadcastable coordinates."""
        n, hbar = self.n, self.hbar
        if len(x) != n:
            raise DimensionMismatch(f"expected {n} coordinates, got {len(x)}")
        K = self.V + 1j * self.W
        q = sum(K[i, j] * x[i] * x[j] for i in range(n) for j in range(n))
        norm = (math.pi * hbar) ** (-n / 4) * np.linalg.det(self.V) ** 0.25
        return norm * np.exp(-q / (2 * hbar))


State = Union[WaveFunction, GaussianState]


@dataclass(frozen=True)
class MixedState:
    components: tuple[tuple[float, State], ...] = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        if not comps:
            raise InvalidState("mixed state needs at least one component")
        weights = np.array([w for w, _ in comps])
        if np.any(weights < 0):
            raise InvalidState(f"negative weight in {weights}")
        if abs(weights.sum() - 1.0) > 1e-10:
            raise InvalidState(f"weights sum to {weights.sum()!r}, not 1")
        object.__setattr__(self, "components", comps)


def sample_function(f: Callable[..., np.ndarray], axes: Sequence[Axis], hbar: float = 1.0) -> WaveFunction:
    axes = tuple(axes)
    return WaveFunction(axes, f(*grid_points(axes)), hbar)


def check_coverage(g: GaussianState, axes: Sequence[Axis]) -> list[str]:
    """Reasons the grid is inadequate for g (empty when adequate)."""
    problems = []
    for d, (ax, s) in enumerate(zip(axes, g.position_std())):
        if ax.min > -5 * s or ax.max < 5 * s:
            problems.append(f"axis {d} [{ax.min:g}, {ax.max:g}] does not cover +-5 sigma ({5 * s:.3g})")
        if 2 * s / ax.h < 16:
            problems.append(f"axis {d} has {2 * s / ax.h:.1f} < 16 points within +-1 sigma")
    return problems


def sample_gaussian(g: GaussianState, axes: Sequence[Axis]) -> WaveFunction:
    axes = tuple(axes)
    if len(axes) != g.n:
        raise DimensionMismatch(f"state has n={g.n} but {len(axes)} axes were given")
    problems = check_coverage(g, axes)
    if problems:
        warnings.warn("; ".join(problems), BadCoverage, stacklevel=2)
    return WaveFunction(axes, g(*grid_points(axes)), g.hbar)


def hermite_state(axes: Sequence[Axis], hbar: float = 1.0, order: int = 1) -> WaveFunction:
    """Harmonic-oscillator eigenstate of the given order (0 or 1), frequency one."""
    axes = tuple(axes)
    if len(axes) != 1 or order not in (0, 1):
        raise ValidationError("hermite_state supports n=1 and order 0 or 1")
    x = axes[0].points
    ground = (math.pi * hbar) ** -0.25 * np.exp(-(x**2) / (2 * hbar))
    vals = ground if order == 0 else math.sqrt(2 / hbar) * x * ground
    return WaveFunction(axes, vals, hbar)


def l2_norm(psi: WaveFunction) -> float:
    return float(np.sqrt(np.sum(np.abs(psi.values) ** 2) * cell_volume(psi.axes)))


def _fft_compatible(src: Axis, dst: Axis, hbar: float) -> bool:
    return dst.count == src.count and abs(src.h * dst.h * src.count / (2 * math.pi * hbar) - 1) < 1e-12


def _axis_fourier(values, axis: int, src: Axis, dst: Axis, hbar: float, sign: int) -> np.ndarray:
    """(2 pi hbar)^-1/2 sum_k exp(-sign i p x_k / hbar) f_k h along one axis."""
    scale = src.h / math.sqrt(2 * math.pi * hbar)
    if _fft_compatible(src, dst, hbar):
        # p_l x_k = c a + c k h + a l dp + 2 pi hbar l k / N
        a, c = src.first, dst.first
        k = np.arange(src.count)
        shape = [1] * values.ndim
        shape[axis] = src.count
        ramp_in = np.exp(-sign * 1j * c * k * src.h / hbar).reshape(shape)
        ramp_out = np.exp(-sign * 1j * a * (c + k * dst.h) / hbar).reshape(shape)
        tr = sfft.fft if sign > 0 else sfft.ifft
        out = tr(values * ramp_in, axis=axis, norm="forward" if sign < 0 else "backward")
        return scale * ramp_out * out
    kern = np.exp(-sign * 1j * np.outer(dst.points, src.points) / hbar) * scale
    return np.moveaxis(np.tensordot(kern, values, axes=([1], [axis])), 0, axis)


def fourier_transform(
    psi: WaveFunction, sign: str = "forward", axes: Sequence[Axis] | None = None
) -> WaveFunction:
    """hbar-scaled Fourier transform F psi(p) = (2 pi hbar)^{-n/2} int e^{-i p.x/hbar} psi(x) dx.

    Parameters
    ----------
    psi : WaveFunction
    sign : {"forward", "inverse"}
        ``inverse`` flips the exponent sign.
    axes : sequence of Axis, optional
        Output axes. Default: :meth:`Axis.conjugate` of each input axis. Any
        output axis with the conjugate spacing and count goes through the FFT
        (offsets handled by phase ramps); other axes use dense quadrature.
    """
    if sign not in ("forward", "inverse"):
        raise ValidationError(f"sign must be 'forward' or 'inverse', got {sign!r}")
    s = 1 if sign == "forward" else -1
    out_axes = tuple(axes) if axes is not None else tuple(ax.conjugate(psi.hbar) for ax in psi.axes)
    if len(out_axes) != psi.n:
        raise DimensionMismatch(f"{len(out_axes)} output axes for an n={psi.n} state")
    vals = np.asarray(psi.values)
    for d, (src, dst) in enumerate(zip(psi.axes, out_axes)):
        vals = _axis_fourier(vals, d, src, dst, psi.hbar, s)
    return WaveFunction(out_axes, vals, psi.hbar)
