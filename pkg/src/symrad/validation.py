"""Cross-route invariant suite behind ``symrad validate``.

Each check compares two independent computations of the same quantity and
returns the observed discrepancy together with its tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gaussian import (
    MomentTriple,
    gaussian_radon_closed_form,
    pauli_recover,
    profile_K_oracle,
    wavepacket_from_moments,
)
from .metaplectic import make_spec, metaplectic_apply, quadratic_fourier
from .radon import inverse_radon, radon_line_integral, radon_profile, radon_surface_integral, sinogram
from .states import Axis, GaussianState, fourier_transform, hermite_state, l2_norm, sample_gaussian
from .symplectic import (
    free_generating_function,
    is_symplectic,
    make_frame,
    polar_frame,
    symplectic_from_generating,
)
from .wigner import gaussian_wigner, marginal_momentum, marginal_position, sample_wigner, wigner

GRID = Axis(-8.0, 8.0, 256)


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: error={self.error:.3e} tol={self.tol:.0e}"


def _frames():
    return [polar_frame(math.pi / 5), polar_frame(math.pi / 2), make_frame([[2.0]], [[1.0]]),
            make_frame([[1.0]], [[0.0]]), make_frame([[-1.0]], [[0.0]])]


def check_marginals() -> CheckResult:
    err = 0.0
    for V, W in ((0.5, -1.0), (1.0, 0.0), (2.0, 1.0)):
        psi = sample_gaussian(GaussianState([[V]], [[W]]), (GRID,))
        Wf = wigner(psi)
        Fpsi = fourier_transform(psi, axes=Wf.p_axes)
        err = max(err,
                  np.abs(marginal_position(Wf).values - psi.density()).max(),
                  np.abs(marginal_momentum(Wf).values - Fpsi.density()).max())
    return CheckResult("wigner marginals = |psi|^2, |F psi|^2", err, 1e-6)


def check_covariance() -> CheckResult:
    psi = sample_gaussian(GaussianState([[2.0]], [[0.7]]), (GRID,))
    W0 = wigner(psi, (GRID,))
    r = np.linspace(0.0, 4.0, 41)
    t = np.linspace(0.0, 2 * math.pi, 48, endpoint=False)
    rr, tt = np.meshgrid(r, t)
    z = np.stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])
    err = 0.0
    for f in _frames():
        W1 = wigner(metaplectic_apply(f, psi), (GRID,))
        err = max(err, np.abs(W1(z) - W0(f.U.T @ z)).max())
    return CheckResult("symplectic covariance W(U psi)(z) = W psi(U^-1 z)", err, 1e-5)


def check_unitarity() -> CheckResult:
    psi = hermite_state((GRID,), order=1)
    err = 0.0
    for f in _frames():
        err = max(err, abs(l2_norm(metaplectic_apply(f, psi)) - l2_norm(psi)))
    spec = make_spec(polar_frame(math.pi / 3).U)
    a = quadratic_fourier(spec, psi).values
    b = quadratic_fourier(make_spec(spec.S, spec.m + 2), psi).values
    err = max(err, np.abs(b + a).max())
    return CheckResult("metaplectic unitarity and m+2 sign flip", err, 1e-6)


def check_routes() -> CheckResult:
    psi = hermite_state((GRID,), order=1)
    Wf = wigner(psi, (GRID,))
    err = 0.0
    for th in (0.3, 1.2, 2.5):
        f = polar_frame(th)
        prof = radon_profile(psi, f)
        for i in (110, 128, 150):
            X = GRID.points[i]
            ref = prof.values[i]
            err = max(err,
                      abs(radon_line_integral(Wf, X, math.cos(th), math.sin(th)) - ref),
                      abs(radon_surface_integral(Wf, f, X) - ref))
    return CheckResult("radon profile = line integral = surface integral", err, 1e-4)


def check_closed_form() -> CheckResult:
    err = 0.0
    for V, W in ((1.0, 0.0), (2.0, -1.0)):
        g = GaussianState([[V]], [[W]])
        psi = sample_gaussian(g, (GRID,))
        for f in _frames():
            cf = gaussian_radon_closed_form(g, f).on_grid((GRID,))
            err = max(err, np.abs(radon_profile(psi, f).values - cf).max())
    return CheckResult("closed-form Gaussian radon = metaplectic route", err, 1e-5)


def check_inversion() -> CheckResult:
    g = GaussianState([[1.0]], [[0.0]])
    s = sinogram(sample_gaussian(g, (GRID,)), 180)
    grid = Axis(-5.0, 5.0, 128)
    rec = inverse_radon(s, grid, grid)
    ref = sample_wigner(gaussian_wigner(g)[0], (grid,), (grid,)).values
    err = float(np.linalg.norm(rec.values - ref) / np.linalg.norm(ref))
    return CheckResult("filtered backprojection vs closed-form Wigner (rel L2)", err, 1e-2)


def check_pauli() -> CheckResult:
    m = MomentTriple.saturated(1.0, 0.5)
    psi = sample_gaussian(wavepacket_from_moments(m), (GRID,))
    got = pauli_recover(profile_K_oracle(psi), m.sigma_xx, m.hbar)
    return CheckResult("pauli recovery of sigma_xp from profiles", abs(got - m.sigma_xp), 1e-4)


def check_structure() -> CheckResult:
    err = 0.0
    for f in _frames():
        err = max(err, 0.0 if is_symplectic(f.U) else np.inf, np.abs(f.U.T @ f.U - np.eye(2)).max())
    S = polar_frame(0.7, 1.0).U
    gen = free_generating_function(S)
    err = max(err, np.abs(symplectic_from_generating(*gen) - S).max())
    return CheckResult("frame rotations symplectic-orthogonal, generating round trip", err, 1e-10)


CHECKS: list[Callable[[], CheckResult]] = [
    check_structure,
    check_marginals,
    check_unitarity,
    check_covariance,
    check_routes,
    check_closed_form,
    check_inversion,
    check_pauli,
]


def run_all() -> list[CheckResult]:
    return [check() for check in CHECKS]
