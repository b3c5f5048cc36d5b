"""Symplectic Radon transform.

Three routes compute the same density R(X, A, B) = int W(z) delta(X - Ax - Bp) dz:

* :func:`radon_profile`: det(Lambda)^-1 |U_{A,B} psi(Lambda^-1 X)|^2 through the
  metaplectic operator;
* :func:`radon_line_integral` (n = 1) and :func:`radon_surface_integral`:
  integrals of a tabulated Wigner function over the affine plane Ax + Bp = X.

:func:`inverse_radon` reconstructs an n = 1 Wigner function from a sinogram
by filtered backprojection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.interpolate import make_interp_spline

from ._parallel import map_chunks
from .errors import (
    DegenerateDirection,
    DimensionGuard,
    DimensionMismatch,
    DimensionNotOne,
    InvalidState,
    NyquistViolation,
    TooFewAngles,
)
from .metaplectic import MetaplecticPlan, metaplectic_apply, plan_metaplectic
from .states import (
    Axis,
    GaussianState,
    MixedState,
    WaveFunction,
    cell_volume,
    cubic_sample,
    grid_points,
    sample_gaussian,
)
from .symplectic import RadonFrame, make_frame, polar_frame
from .wigner import WignerFunction

MIN_ANGLES = 60
# normalisation of the backprojection sum; see inverse_radon
INVERSION_CONSTANT = 1.0
WIGNER_CUTOFF = 1e-14


@dataclass(frozen=True, eq=False)
class RadonProfile:
    frame: RadonFrame
    X_axes: tuple[Axis, ...]
    values: np.ndarray
    hbar: float = 1.0

    def integral(self) -> float:
        return float(self.values.sum() * cell_volume(self.X_axes))


@dataclass(frozen=True, eq=False)
class Sinogram:
    """n = 1 profiles R(X_i, theta_j) for frames (cos theta_j, sin theta_j).

    ``values`` has shape (len(angles), X_axis.count).
    """

    X_axis: Axis
    angles: np.ndarray
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (angles.size, self.X_axis.count):
            raise DimensionMismatch(f"sinogram values {vals.shape} vs {angles.size} angles x {self.X_axis.count} X")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "values", vals)


def _resolve_state(psi, axes: Sequence[Axis] | None) -> WaveFunction:
    if isinstance(psi, WaveFunction):
        return psi
    if isinstance(psi, GaussianState):
        if axes is None:
            raise InvalidState("sampling a GaussianState needs grid axes")
        return sample_gaussian(psi, axes)
    raise InvalidState(f"unsupported state type {type(psi).__name__}")


def radon_profile(
    psi: WaveFunction,
    f: RadonFrame | MetaplecticPlan,
    X_axes: Sequence[Axis] | None = None,
) -> RadonProfile:
    """R_psi(X, A, B) = det(Lambda)^-1 |U_{A,B} psi(Lambda^-1 X)|^2 on the X grid.

    The default X grid is psi's grid. Frames with B = 0 skip the metaplectic
    step. When Lambda^-1 X does not land on psi's grid, |U psi|^2 is
    interpolated with cubic splines (InterpolationOutOfRange if it leaves the
    grid).
    """
    plan = f if isinstance(f, MetaplecticPlan) else plan_metaplectic(f)
    frame = plan.frame
    X_axes = tuple(X_axes) if X_axes is not None else psi.axes
    if len(X_axes) != psi.n:
        raise DimensionMismatch(f"{len(X_axes)} X-axes for an n={psi.n} state")
    if not frame.B.any():
        # position frame: U psi(y) = psi(a^T y) up to phase, so R(X) = |psi(A^-1 X)|^2 / det Lambda
        phi, to_grid = psi, np.linalg.inv(frame.A)
    else:
        phi, to_grid = metaplectic_apply(plan, psi), frame.lam_inv
    dens = np.abs(phi.values) ** 2
    same_grid = X_axes == psi.axes and np.array_equal(to_grid, np.eye(psi.n))
    if same_grid:
        vals = dens
    else:
        X = np.stack(np.broadcast_arrays(*grid_points(X_axes)))
        Y = np.tensordot(to_grid, X, axes=([1], [0]))
        vals = cubic_sample(dens, phi.axes, Y)
    return RadonProfile(frame, X_axes, vals / frame.det_lam, psi.hbar)


def sinogram(psi: WaveFunction, n_angles: int, X_axis: Axis | None = None) -> Sinogram:
    """Profiles at theta_j = j pi / n_angles; columns are independent."""
    if psi.n != 1:
        raise DimensionNotOne(f"sinograms are defined for n = 1, got n = {psi.n}")
    if n_angles < 1:
        raise TooFewAngles("need at least one angle")
    X_axis = X_axis or psi.axes[0]
    angles = np.arange(n_angles) * math.pi / n_angles

    def cols(lo: int, hi: int) -> list[np.ndarray]:
        return [radon_profile(psi, polar_frame(th), (X_axis,)).values for th in angles[lo:hi]]

    rows = [c for part in map_chunks(cols, n_angles, 8) for c in part]
    return Sinogram(X_axis, angles, np.array(rows), psi.hbar)


def _line_parametrization(X: float, a: float, b: float, t: np.ndarray):
    lam = math.hypot(a, b)
    x = a * X / lam**2 - b * t / lam
    p = b * X / lam**2 + a * t / lam
    return x, p


def radon_line_integral(Wf: WignerFunction, X: float, a: float, b: float, *, dt: float | None = None) -> float:
    """R(X, a, b) as lambda^-1 times the arc-length integral of W over ax + bp = X.

    Unit-speed parametrization x(t) = a X / lam^2 - b t / lam,
    p(t) = b X / lam^2 + a t / lam, midpoint quadrature on the part of the line
    inside the grid, tails where |W| < 1e-14 dropped.
    """
    if Wf.n != 1:
        raise DimensionNotOne(f"line integrals need n = 1, got n = {Wf.n}")
    lam = math.hypot(a, b)
    if lam == 0.0 or not math.isfinite(lam):
        raise DegenerateDirection(f"direction (a, b) = ({a}, {b}) is degenerate")
    xa, pa = Wf.x_axes[0], Wf.p_axes[0]
    dt = dt or 0.5 * min(xa.h, pa.h)
    # t-range where the line is inside the grid rectangle
    x0, p0 = _line_parametrization(X, a, b, np.zeros(1))
    lo, hi = -np.inf, np.inf
    for c0, slope, ax in ((x0[0], -b / lam, xa), (p0[0], a / lam, pa)):
        if abs(slope) < 1e-15:
            if not ax.first <= c0 <= ax.last:
                return 0.0
            continue
        t1, t2 = (ax.first - c0) / slope, (ax.last - c0) / slope
        lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
    if not hi > lo:
        return 0.0
    n = max(int(math.ceil((hi - lo) / dt)), 1)
    step = (hi - lo) / n
    t = lo + (np.arange(n) + 0.5) * step
    x, p = _line_parametrization(X, a, b, t)
    vals = Wf(np.stack([x, p]))
    vals = np.where(np.abs(vals) < WIGNER_CUTOFF, 0.0, vals)
    return float(vals.sum() * step / lam)


def surface_points(f: RadonFrame, X, q: np.ndarray) -> np.ndarray:
    """Points (X'(q), P'(q)) of the plane A x + B p = X.

    X' = A^T Lam^-2 X - B^T Lam^-1 q, P' = B^T Lam^-2 X + A^T Lam^-1 q, i.e.
    U^T (Lam^-1 X, q); ``q`` has shape (n, ...) and the result (2n, ...).
    """
    n = f.n
    X = np.atleast_1d(np.asarray(X, dtype=float))
    y = f.lam_inv @ X
    Ut = f.U.T
    flat = q.reshape(n, -1)
    z = Ut[:, :n] @ y[:, None] + Ut[:, n:] @ flat
    return z.reshape((2 * n,) + q.shape[1:])


def radon_surface_integral(
    Wf: WignerFunction,
    f: RadonFrame,
    X,
    q_axes: Sequence[Axis] | None = None,
) -> float:
    """det(Lam)^-1 int W(U^T (Lam^-1 X, q)) dq over a q-grid (n <= 2).

    The map q -> U^T (Lam^-1 X, q) is an isometry onto the plane Ax + Bp = X,
    so this is the Lebesgue surface integral scaled by det(Lam)^-1. The
    default q-grid spans the phase-space box diagonal at the finest grid step.
    """
    if Wf.n != f.n:
        raise DimensionMismatch(f"Wigner function has n={Wf.n}, frame has n={f.n}")
    if f.n > 2:
        raise DimensionGuard(f"surface integrals are limited to n <= 2 (got {f.n})")
    if q_axes is None:
        reach = math.sqrt(sum(max(abs(ax.min), abs(ax.max)) ** 2 for ax in Wf.axes))
        step = 0.5 * min(ax.h for ax in Wf.axes)
        count = max(int(math.ceil(2 * reach / step)), 8)
        q_axes = (Axis(-reach, reach, count),) * f.n
    q_axes = tuple(q_axes)
    q = np.stack(np.broadcast_arrays(*grid_points(q_axes)))
    z = surface_points(f, X, q)
    vals = Wf(z, strict=False)
    vals = np.where(np.abs(vals) < WIGNER_CUTOFF, 0.0, vals)
    return float(vals.sum() * cell_volume(q_axes) / f.det_lam)


def ramp_filter(count: int, h: float, hbar: float, window: str = "hann") -> np.ndarray:
    """Frequency response of convolution with the band-limited ramp kernel.

    The kernel k(t) = (1 / 2 pi hbar) int_{|r| < r_N} |r| e^{-i r t / hbar} dr is
    sampled exactly at t = j h (r_N = pi hbar / h is the grid Nyquist); taking
    its DFT, rather than sampling |r| directly, keeps the zero-frequency
    response right on a finite grid. ``window="hann"`` apodizes at r_N.
    """
    j = np.rint(np.fft.fftfreq(count, 1.0 / count)).astype(int)
    kern = np.zeros(count)
    kern[j == 0] = math.pi * hbar / (2 * h * h)
    odd = j % 2 != 0
    kern[odd] = -2 * hbar / (math.pi * (j[odd] * h) ** 2)
    resp = np.fft.fft(kern).real * h
    if window == "hann":
        r = 2 * math.pi * hbar * np.fft.fftfreq(count, d=h)
        r_nyq = math.pi * hbar / h
        resp = resp * 0.5 * (1 + np.cos(math.pi * r / r_nyq))
    elif window not in ("none", None):
        raise ValueError(f"unknown window {window!r}")
    return resp


def filtered_projections(s: Sinogram, window: str = "hann") -> np.ndarray:
    """Q_theta(X) = (1 / 2 pi hbar) int |r| R~_theta(r) e^{-i r X / hbar} dr for each angle."""
    count = s.X_axis.count
    padded = 2 * count
    resp = ramp_filter(padded, s.X_axis.h, s.hbar, window)
    buf = np.zeros((s.angles.size, padded))
    buf[:, :count] = s.values
    spec = np.fft.fft(buf, axis=1)
    # sampled profile must be band-limited well inside the Nyquist band
    peak = np.abs(spec).max()
    high = np.abs(np.fft.fftfreq(padded)) >= 0.25
    if peak > 0 and np.abs(spec[:, high]).max() > 1e-6 * peak:
        raise NyquistViolation("sinogram profiles carry content near the X-grid Nyquist limit")
    return np.fft.ifft(spec * resp, axis=1).real[:, :count]


def inverse_radon(
    s: Sinogram,
    x_axis: Axis,
    p_axis: Axis,
    *,
    window: str = "hann",
    constant: float = INVERSION_CONSTANT,
) -> WignerFunction:
    """Filtered backprojection W(x, p) = c / (2 pi hbar) int_0^pi Q_theta(x cos theta + p sin theta) dtheta.

    With a, b = r cos theta, r sin theta the flat (a, b) inversion integral
    becomes a ramp-filtered angular integral. Under the normalisation of
    :func:`filtered_projections` the constant c is exactly 1; the isotropic
    Gaussian calibration test checks it.
    """
    if s.angles.size < MIN_ANGLES:
        raise TooFewAngles(f"{s.angles.size} angles < {MIN_ANGLES}")
    expected = np.arange(s.angles.size) * math.pi / s.angles.size
    if not np.allclose(s.angles, expected, rtol=0, atol=1e-9):
        raise TooFewAngles("angles must be uniform on [0, pi) starting at 0")
    filt = filtered_projections(s, window)
    X = s.X_axis.points
    xs, ps = np.meshgrid(x_axis.points, p_axis.points, indexing="ij")
    cos, sin = np.cos(s.angles), np.sin(s.angles)

    def partial(lo: int, hi: int) -> np.ndarray:
        acc = np.zeros_like(xs)
        for j in range(lo, hi):
            spline = make_interp_spline(X, filt[j], k=3)
            t = xs * cos[j] + ps * sin[j]
            inside = (t >= X[0]) & (t <= X[-1])
            acc += np.where(inside, spline(t), 0.0)
        return acc

    # fixed chunking and ordered summation keep the result thread-count independent
    acc = np.zeros_like(xs)
    for part in map_chunks(partial, s.angles.size, 16):
        acc += part
    dtheta = math.pi / s.angles.size
    W = constant * acc * dtheta / (2 * math.pi * s.hbar)
    return WignerFunction((x_axis,), (p_axis,), W, s.hbar)


def radon_mixed(m: MixedState, f: RadonFrame, X_axes: Sequence[Axis] | None = None,
                grid: Sequence[Axis] | None = None) -> RadonProfile:
    """Convex combination of the components' profiles.

    GaussianState components are sampled on ``grid`` (default: ``X_axes``).
    """
    plan = plan_metaplectic(f)
    total = None
    out_axes = None
    for weight, state in m.components:
        psi = _resolve_state(state, grid or X_axes)
        prof = radon_profile(psi, plan, X_axes)
        out_axes = prof.X_axes
        total = weight * prof.values if total is None else total + weight * prof.values
    return RadonProfile(f, out_axes, total, m.components[0][1].hbar)


def frame_from_ab(a: float, b: float) -> RadonFrame:
    return make_frame([[a]], [[b]])
