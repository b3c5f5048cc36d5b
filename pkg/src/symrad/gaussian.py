"""Closed-form Radon transforms of centred Gaussians and the Pauli problem.

For psi_{V,W} and a frame (A, B), U_{A,B} psi_{V,W} is again a centred Gaussian
and its Radon transform is the normalized density

    R(X) = (pi hbar)^{-n/2} det(M)^{-1/2} exp(-M^{-1} X.X / hbar),
    M = B V B^T + (A - B W) V^{-1} (A - B W)^T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .errors import (
    BracketFailure,
    DimensionMismatch,
    InvalidState,
    MinimumMismatch,
    NotSaturated,
    SingularM,
)
from .states import Axis, GaussianState, grid_points
from .symplectic import RadonFrame, make_frame


def radon_matrix(g: GaussianState, f: RadonFrame) -> np.ndarray:
    """M = B V B^T + (A - B W) V^-1 (A - B W)^T."""
    if g.n != f.n:
        raise DimensionMismatch(f"state has n={g.n}, frame has n={f.n}")
    A, B, V, W = f.A, f.B, g.V, g.W
    K = A - B @ W
    M = B @ V @ B.T + K @ np.linalg.solve(V, K.T)
    M = 0.5 * (M + M.T)
    ev = np.linalg.eigvalsh(M)
    if ev[0] <= 1e-12 * max(ev[-1], 1.0):
        raise SingularM(f"M is numerically singular (eigenvalues {ev})")
    return M


def transformed_V(g: GaussianState, f: RadonFrame) -> np.ndarray:
    """Width matrix V' of U_{A,B} psi_{V,W}: Lambda M^-1 Lambda."""
    M = radon_matrix(g, f)
    Vp = f.lam @ np.linalg.solve(M, f.lam)
    return 0.5 * (Vp + Vp.T)


@dataclass(frozen=True, eq=False)
class GaussianRadonForm:
    frame: RadonFrame
    M: np.ndarray
    hbar: float = 1.0

    @property
    def normalization(self) -> float:
        n = self.M.shape[0]
        return (math.pi * self.hbar) ** (-n / 2) / math.sqrt(np.linalg.det(self.M))

    def __call__(self, *X: np.ndarray) -> np.ndarray:
        n = self.M.shape[0]
        if len(X) != n:
            raise DimensionMismatch(f"expected {n} coordinates, got {len(X)}")
        Mi = np.linalg.inv(self.M)
        q = sum(Mi[i, j] * X[i] * X[j] for i in range(n) for j in range(n))
        return self.normalization * np.exp(-q / self.hbar)

    def on_grid(self, axes: Sequence[Axis]) -> np.ndarray:
        vals = self(*grid_points(axes))
        return np.broadcast_to(vals, tuple(ax.count for ax in axes)).copy()


def gaussian_radon_closed_form(g: GaussianState, f: RadonFrame) -> GaussianRadonForm:
    return GaussianRadonForm(f, radon_matrix(g, f), g.hbar)


@dataclass(frozen=True)
class MomentTriple:
    sigma_xx: float
    sigma_pp: float
    sigma_xp: float
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.sigma_xx > 0 and self.sigma_pp > 0 and self.hbar > 0):
            raise InvalidState("sigma_xx, sigma_pp and hbar must be positive")

    @classmethod
    def saturated(cls, sigma_xx: float, sigma_xp: float, hbar: float = 1.0) -> "MomentTriple":
        """Fill in sigma_pp from sigma_xx sigma_pp - sigma_xp^2 = hbar^2 / 4."""
        return cls(sigma_xx, (hbar**2 / 4 + sigma_xp**2) / sigma_xx, sigma_xp, hbar)

    @property
    def saturation_defect(self) -> float:
        return self.sigma_xx * self.sigma_pp - self.sigma_xp**2 - self.hbar**2 / 4

    def to_json(self) -> dict:
        return {"sxx": self.sigma_xx, "spp": self.sigma_pp, "sxp": self.sigma_xp, "hbar": self.hbar}

    @classmethod
    def from_json(cls, obj: dict) -> "MomentTriple":
        return cls(float(obj["sxx"]), float(obj["spp"]), float(obj["sxp"]), float(obj.get("hbar", 1.0)))


def wavepacket_from_moments(m: MomentTriple, tol: float = 1e-6) -> GaussianState:
    """v = hbar / (2 sigma_xx), w = -sigma_xp / sigma_xx for a saturated triple."""
    if abs(m.saturation_defect) > tol:
        raise NotSaturated(
            f"sigma_xx sigma_pp - sigma_xp^2 = {m.sigma_xx * m.sigma_pp - m.sigma_xp**2:.6g}, "
            f"not hbar^2/4 = {m.hbar**2 / 4:.6g}"
        )
    return GaussianState([[m.hbar / (2 * m.sigma_xx)]], [[-m.sigma_xp / m.sigma_xx]], m.hbar)


def pauli_K(m: MomentTriple, a: float, b: float) -> float:
    sxx, sxp, hbar = m.sigma_xx, m.sigma_xp, m.hbar
    return b * b * hbar / (2 * sxx) + (a + b * sxp / sxx) ** 2 * (2 * sxx / hbar)


def fit_K(X: np.ndarray, values: np.ndarray, hbar: float = 1.0) -> float:
    """Width K of a profile c exp(-X^2 / (hbar K)) by least squares of log R on X^2.

    Uses the samples in the central 50% of the probability mass.
    """
    X = np.asarray(X, dtype=float).ravel()
    values = np.asarray(values, dtype=float).ravel()
    order = np.argsort(X)
    X, values = X[order], values[order]
    cdf = np.cumsum(np.clip(values, 0, None))
    if cdf[-1] <= 0:
        raise InvalidState("profile has no positive mass")
    cdf /= cdf[-1]
    keep = (cdf >= 0.25) & (cdf <= 0.75) & (values > 0)
    if keep.sum() < 3:
        raise InvalidState("too few samples in the central half of the profile")
    slope, _ = np.polyfit(X[keep] ** 2, np.log(values[keep]), 1)
    return -1.0 / (hbar * slope)


def profile_K_oracle(psi, X_axis: Axis | None = None) -> Callable[[float, float], float]:
    """(a, b) -> K fitted from radon_profile(psi, frame(a, b))."""
    from .radon import radon_profile

    axis = X_axis or psi.axes[0]

    def oracle(a: float, b: float) -> float:
        prof = radon_profile(psi, make_frame([[a]], [[b]]), (axis,))
        return fit_K(axis.points, prof.values, psi.hbar)

    return oracle


def pauli_recover(
    oracle: Callable[[float, float], float],
    sigma_xx: float,
    hbar: float = 1.0,
    *,
    a_max: float = 8.0,
    scan: int = 33,
    rel_tol: float = 0.05,
) -> float:
    """Recover sigma_xp from K-measurements at b = 1.

    K(a, 1) is minimal at a* = -sigma_xp / sigma_xx with value hbar / (2 sigma_xx).
    A coarse scan over [-a_max, a_max] brackets the minimum, golden-section
    search refines it.
    """
    grid = np.linspace(-a_max, a_max, scan)
    vals = np.array([oracle(a, 1.0) for a in grid])
    i = int(np.argmin(vals))
    if i == 0 or i == scan - 1:
        raise BracketFailure(f"K(a, 1) has no interior minimum on [-{a_max}, {a_max}]")
    a_star = optimize.golden(lambda a: oracle(a, 1.0), brack=(grid[i - 1], grid[i], grid[i + 1]), tol=1e-10)
    k_min = oracle(a_star, 1.0)
    expected = hbar / (2 * sigma_xx)
    if abs(k_min - expected) > rel_tol * expected:
        raise MinimumMismatch(f"minimum K = {k_min:.6g}, expected hbar / (2 sigma_xx) = {expected:.6g}")
    return float(-a_star * sigma_xx)
