"""Quadratic Fourier transforms and metaplectic operators covering frame rotations.

A free symplectic matrix S (invertible upper-right block) is generated by
A(x, x') = 1/2 P x.x - Q x.x' + 1/2 R x'.x', and the operator

    S_m psi(x) = (2 pi hbar)^{-n/2} i^{m - n/2} |det Q|^{1/2}
                 int exp(i A(x, x') / hbar) psi(x') dx'

covers S: W(S_m psi)(z) = W psi(S^-1 z). Rotations whose B-block is singular
or badly conditioned are split as U = (U R_-theta) R_theta.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._parallel import map_chunks
from .errors import BadCoverage, DimensionMismatch, GridTooCoarse, PlanFailure, ValidationError
from .states import Axis, WaveFunction, cell_volume, quadratic_form
from .symplectic import (
    STRUCT_TOL,
    GeneratingFunction,
    RadonFrame,
    blocks,
    free_generating_function,
    rotation,
)

# single-factor plans need sigma_min(B-block) at least this large
FREE_THRESHOLD = 0.5
DENSE_LIMIT = 2**28
# relative edge amplitude of a pre-rotated intermediate state that triggers a warning
EDGE_TOL = 1e-5
_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def default_theta_candidates(depth: int = 5) -> list[float]:
    """pi/2, pi/4, 3pi/4, pi/8, 3pi/8, ... in that order."""
    out = []
    for j in range(1, depth + 1):
        for k in range(1, 2**j, 2):
            out.append(k * math.pi / 2**j)
    return out


@dataclass(frozen=True, eq=False)
class QuadraticFourierSpec:
    S: np.ndarray
    m: int
    gen: GeneratingFunction

    @property
    def n(self) -> int:
        return self.S.shape[0] // 2

    def to_json(self) -> dict:
        return {"m": self.m, "P": self.gen.P.tolist(), "Q": self.gen.Q.tolist(), "R": self.gen.R.tolist()}


def make_spec(S: np.ndarray, m: int | None = None) -> QuadraticFourierSpec:
    """Spec for a free symplectic S; m defaults to the parity rule on det B^-1."""
    S = np.array(S, dtype=float)
    gen = free_generating_function(S)
    positive = np.linalg.det(gen.Q) > 0
    if m is None:
        m = 0 if positive else 1
    m = int(m) % 4
    if (m % 2 == 0) != positive:
        raise ValidationError(f"Maslov index {m} has the wrong parity for sign(det B^-1)")
    S.setflags(write=False)
    return QuadraticFourierSpec(S, m, gen)


def _prefactor(spec: QuadraticFourierSpec, hbar: float) -> complex:
    n = spec.n
    # i^m from a table so that m and m+2 give exactly opposite prefactors
    phase = _I_POWERS[spec.m] * complex(math.cos(-math.pi * n / 4), math.sin(-math.pi * n / 4))
    return phase * (2 * math.pi * hbar) ** (-n / 2) * math.sqrt(abs(np.linalg.det(spec.gen.Q)))


def _max_step_phase(M: np.ndarray, axes_for_x: Sequence[Axis], step_axes: Sequence[Axis], hbar: float) -> float:
    """max over the box of |(M x)_d| h_d / hbar, d over step_axes."""
    reach = np.array([max(abs(ax.min), abs(ax.max)) for ax in axes_for_x])
    grad = np.abs(M) @ reach
    steps = np.array([ax.h for ax in step_axes])
    return float(np.max(grad * steps) / hbar)


def chirp_phase_increments(spec: QuadraticFourierSpec, in_axes, out_axes, hbar: float) -> dict[str, float]:
    P, Q, R = spec.gen
    return {
        "input_chirp": _max_step_phase(R, in_axes, in_axes, hbar),
        "kernel": _max_step_phase(Q, out_axes, in_axes, hbar),
        "output_chirp": _max_step_phase(P, out_axes, out_axes, hbar),
    }


def _is_diagonal(M: np.ndarray) -> bool:
    off = M - np.diag(np.diag(M))
    return np.abs(off).max() <= 1e-14 * max(np.abs(M).max(), 1.0)


def quadratic_fourier(
    spec: QuadraticFourierSpec,
    psi: WaveFunction,
    out_axes: Sequence[Axis] | None = None,
    *,
    check: bool = True,
) -> WaveFunction:
    """Apply the quadratic Fourier transform of ``spec`` to ``psi``.

    Chirp by R, integrate against exp(-i Q x.x' / hbar), chirp by P, scale.
    Diagonal Q runs as one dense quadrature matrix per axis; any other Q as a
    dense kernel over the flattened grids (size-guarded).
    """
    if spec.n != psi.n:
        raise DimensionMismatch(f"spec has n={spec.n}, state has n={psi.n}")
    hbar = psi.hbar
    out_axes = tuple(out_axes) if out_axes is not None else psi.axes
    if len(out_axes) != psi.n:
        raise DimensionMismatch("output axes do not match the state dimension")
    if check:
        inc = chirp_phase_increments(spec, psi.axes, out_axes, hbar)
        worst = max(inc, key=inc.get)
        if inc[worst] >= math.pi:
            raise GridTooCoarse(
                f"{worst} phase advances {inc[worst]:.3f} rad per grid step (>= pi); refine the grid"
            )

    P, Q, R = spec.gen
    phi = np.asarray(psi.values) * np.exp(1j * quadratic_form(R, psi.axes) / (2 * hbar))

    if _is_diagonal(Q):
        g = phi
        for d, (src, dst) in enumerate(zip(psi.axes, out_axes)):
            kern = np.exp(-1j * Q[d, d] * np.outer(dst.points, src.points) / hbar) * src.h
            g = np.moveaxis(np.tensordot(kern, g, axes=([1], [d])), 0, d)
    else:
        n_in = phi.size
        n_out = int(np.prod([ax.count for ax in out_axes]))
        if n_in * n_out > DENSE_LIMIT:
            raise GridTooCoarse(
                f"dense quadrature of {n_out} x {n_in} points exceeds the {DENSE_LIMIT} kernel limit"
            )
        xin = np.stack([c.ravel() for c in np.meshgrid(*[a.points for a in psi.axes], indexing="ij")])
        xout = np.stack([c.ravel() for c in np.meshgrid(*[a.points for a in out_axes], indexing="ij")])
        qx = Q @ xout  # (n, n_out); phase (Q x).x'
        flat = phi.ravel()
        vol = cell_volume(psi.axes)

        def rows(lo: int, hi: int) -> np.ndarray:
            kern = np.exp(-1j * (qx[:, lo:hi].T @ xin) / hbar)
            return kern @ flat * vol

        g = np.concatenate(map_chunks(rows, n_out, 1024)).reshape([ax.count for ax in out_axes])

    out = _prefactor(spec, hbar) * np.exp(1j * quadratic_form(P, out_axes) / (2 * hbar)) * g
    return WaveFunction(out_axes, out, hbar)


@dataclass(frozen=True, eq=False)
class MetaplecticPlan:
    """Factors applied right-to-left in matrix terms: ``factors[0]`` acts first.

    With a pre-rotation, ``factors = (spec(R_theta), spec(U R_-theta))``.
    """

    frame: RadonFrame
    factors: tuple[QuadraticFourierSpec, ...]
    theta: float | None = None

    def covered_matrix(self) -> np.ndarray:
        out = np.eye(2 * self.frame.n)
        for f in self.factors:
            out = f.S @ out
        return out

    def to_json(self) -> dict:
        return {"theta": self.theta, "factors": [f.to_json() for f in self.factors]}


def _shifted(S: np.ndarray, shift: int) -> QuadraticFourierSpec:
    base = make_spec(S)
    return base if shift == 0 else make_spec(S, base.m + shift)


def _bblock_smin(S: np.ndarray) -> float:
    return float(np.linalg.svd(blocks(S)[1], compute_uv=False)[-1])


def plan_metaplectic(
    f: RadonFrame,
    *,
    threshold: float = FREE_THRESHOLD,
    candidates: Sequence[float] | None = None,
    maslov_shift: int = 0,
) -> MetaplecticPlan:
    """Factor U_{A,B} into at most two well-conditioned free symplectic matrices.

    A single factor is used when the smallest singular value of the B-block of
    U is at least ``threshold``. Otherwise the candidate pre-rotation angle
    maximising the worse of the two B-block conditionings is chosen.
    ``maslov_shift`` (0 or 2) is added to the default Maslov index of the last
    factor, selecting the other operator over the same rotation.
    """
    if maslov_shift not in (0, 2):
        raise ValidationError(f"maslov_shift must be 0 or 2, got {maslov_shift}")
    U = np.asarray(f.U)
    n = f.n
    if _bblock_smin(U) >= threshold:
        plan = MetaplecticPlan(f, (_shifted(U, maslov_shift),))
    else:
        cands = list(candidates) if candidates is not None else default_theta_candidates()
        scored = []
        for th in cands:
            first = rotation(th, n)
            second = U @ rotation(-th, n)
            scored.append((min(_bblock_smin(first), _bblock_smin(second)), th))
        best, theta = max(scored, key=lambda t: t[0])
        if best <= 1e-6:
            raise PlanFailure(f"no candidate pre-rotation gives free factors: {scored}")
        first = rotation(theta, n)
        second = U @ rotation(-theta, n)
        plan = MetaplecticPlan(f, (make_spec(first), _shifted(second, maslov_shift)), theta)
    resid = np.abs(plan.covered_matrix() - U).max()
    if resid > STRUCT_TOL:
        raise PlanFailure(f"plan covers a matrix {resid:.2e} away from U_(A,B)")
    return plan


def metaplectic_apply(
    f: RadonFrame | MetaplecticPlan,
    psi: WaveFunction,
    out_axes: Sequence[Axis] | None = None,
) -> WaveFunction:
    """Apply an operator covering U_{A,B}; intermediate results stay on psi's grid."""
    plan = f if isinstance(f, MetaplecticPlan) else plan_metaplectic(f)
    if plan.frame.n != psi.n:
        raise DimensionMismatch(f"frame has n={plan.frame.n}, state has n={psi.n}")
    out = psi
    last = len(plan.factors) - 1
    for i, spec in enumerate(plan.factors):
        out = quadratic_fourier(spec, out, out_axes if i == last else None)
        if i < last:
            _warn_truncated(out)
    return out


def _edge_ratio(values: np.ndarray) -> float:
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0:
        return 0.0
    edge = 0.0
    for d in range(mag.ndim):
        edge = max(edge, np.take(mag, [0, -1], axis=d).max())
    return float(edge / peak)


def _warn_truncated(phi: WaveFunction) -> None:
    """The intermediate state must fit on the grid, or the next factor integrates a truncated state."""
    ratio = _edge_ratio(phi.values)
    if ratio > EDGE_TOL:
        warnings.warn(BadCoverage(f"intermediate state reaches the grid edge (|phi| ratio {ratio:.1e}); "
                                  "widen the grid to cover the momentum spread"), stacklevel=3)
