"""Symplectic linear algebra: the standard form J, symplecticity tests,
tomographic frames (A, B) with their symplectic rotation, affine Lagrangian
planes and generating functions of free symplectic matrices.

Matrices are plain ``numpy`` float arrays. A ``2n x 2n`` matrix is split in
``n x n`` blocks ``[[A, B], [C, D]]`` by :func:`blocks`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    NotCommuting,
    NotFree,
    NotRotation,
    OddDimension,
    RankDeficient,
    ValidationError,
)

STRUCT_TOL = 1e-10
EIG_FLOOR = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def as_square(M, name: str = "matrix") -> np.ndarray:
    """Coerce scalars, vectors of length 1 and nested lists to a finite square array."""
    a = np.atleast_2d(np.asarray(M, dtype=float))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def standard_form(n: int) -> np.ndarray:
    """The matrix J = [[0, I], [-I, 0]] of size 2n."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def blocks(S: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    S = np.asarray(S, dtype=float)
    m = S.shape[0]
    if S.ndim != 2 or S.shape[1] != m:
        raise DimensionMismatch(f"expected a square matrix, got shape {S.shape}")
    if m % 2:
        raise OddDimension(f"dimension {m} is odd")
    n = m // 2
    return S[:n, :n], S[:n, n:], S[n:, :n], S[n:, n:]


def symplectic_residual(M: np.ndarray) -> float:
    """max-entry residual of S J S^T - J and S^T J S - J."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2:
        raise OddDimension(f"dimension {M.shape[0]} is odd")
    J = standard_form(M.shape[0] // 2)
    r1 = np.abs(M @ J @ M.T - J).max()
    r2 = np.abs(M.T @ J @ M - J).max()
    return float(max(r1, r2))


def is_symplectic(M: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    return symplectic_residual(M) <= tol


def spd_sqrt(M: np.ndarray) -> np.ndarray:
    """Symmetric positive-definite square root by eigendecomposition.

    Raises RankDeficient if an eigenvalue falls below ``EIG_FLOOR`` times the largest.
    """
    M = 0.5 * (M + M.T)
    w, Q = np.linalg.eigh(M)
    top = max(abs(w[-1]), np.finfo(float).tiny)
    if w[0] <= EIG_FLOOR * top:
        raise RankDeficient(f"matrix not positive definite: eigenvalues {w}")
    return (Q * np.sqrt(w)) @ Q.T


@dataclass(frozen=True)
class RadonFrame:
    """Direction of a tomographic projection.

    ``lam`` is the SPD root of A^T A + B^T B and ``U`` the symplectic rotation
    ``[[lam^-1 A, lam^-1 B], [-lam^-1 B, lam^-1 A]]``.
    """

    A: np.ndarray
    B: np.ndarray
    lam: np.ndarray
    U: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def det_lam(self) -> float:
        return float(np.linalg.det(self.lam))

    @property
    def lam_inv(self) -> np.ndarray:
        return np.linalg.inv(self.lam)

    def to_json(self) -> dict:
        return {"n": self.n, "A": self.A.tolist(), "B": self.B.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "RadonFrame":
        frame = make_frame(obj["A"], obj["B"])
        if "n" in obj and int(obj["n"]) != frame.n:
            raise DimensionMismatch(f"declared n={obj['n']} but matrices have n={frame.n}")
        return frame


def make_frame(A, B) -> RadonFrame:
    """Validate (A, B) and build Lambda and the rotation U_{A,B}.

    Raises
    ------
    RankDeficient
        rank [A B] < n.
    NotCommuting
        A^T B is not symmetric.
    NotRotation
        the resulting U is not orthogonal and symplectic; happens when
        A A^T + B B^T differs from A^T A + B^T B or A B^T is not symmetric.
    """
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        raise DimensionMismatch(f"A is {A.shape} but B is {B.shape}")
    n = A.shape[0]

    sv = np.linalg.svd(np.hstack([A, B]), compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= STRUCT_TOL * sv[0]:
        raise RankDeficient(f"rank [A B] < {n}: singular values {sv}")
    scale = sv[0] ** 2

    comm = np.abs(A.T @ B - B.T @ A).max()
    if comm > STRUCT_TOL * max(scale, 1.0):
        raise NotCommuting(f"A^T B is not symmetric (residual {comm:.3e})")

    lam = spd_sqrt(A.T @ A + B.T @ B)
    # Lambda^-1 [A B] as the polar factor of [A B]: orthonormal rows without
    # inverting a possibly ill-conditioned Lambda
    Y, _, Zt = np.linalg.svd(np.hstack([A, B]), full_matrices=False)
    ab = Y @ Zt
    a, b = ab[:, :n], ab[:, n:]
    U = np.block([[a, b], [-b, a]])

    # the polar factor equals Lambda^-1 [A B] only if A A^T + B B^T = A^T A + B^T B
    mismatch = np.abs(lam @ ab - np.hstack([A, B])).max()
    orth = np.abs(U.T @ U - np.eye(2 * n)).max()
    symp = symplectic_residual(U)
    if mismatch > STRUCT_TOL * max(sv[0], 1.0) or orth > STRUCT_TOL or symp > STRUCT_TOL:
        raise NotRotation(
            f"U_(A,B) is not a symplectic rotation (Lambda mismatch {mismatch:.3e}, "
            f"orthogonality residual {orth:.3e}, symplectic residual {symp:.3e})"
        )
    return RadonFrame(_frozen(A), _frozen(B), _frozen(lam), _frozen(U))


def polar_frame(theta: float, r: float = 1.0) -> RadonFrame:
    """n=1 frame (a, b) = (r cos theta, r sin theta)."""
    return make_frame([[r * np.cos(theta)]], [[r * np.sin(theta)]])


def frame_inverse_rotation(f: RadonFrame) -> np.ndarray:
    """Inverse of ``f.U``; U is orthogonal so this is its transpose."""
    return f.U.T.copy()


@dataclass(frozen=True)
class AffineLagrangianPlane:
    """The plane {(x, p) : A x + B p = X}."""

    frame: RadonFrame
    X: np.ndarray

    def __post_init__(self):
        X = np.atleast_1d(np.asarray(self.X, dtype=float))
        if X.shape != (self.frame.n,):
            raise DimensionMismatch(f"offset has shape {X.shape}, expected ({self.frame.n},)")
        object.__setattr__(self, "X", _frozen(X))

    def residual(self, z) -> float:
        z = np.asarray(z, dtype=float)
        n = self.frame.n
        if z.shape != (2 * n,):
            raise DimensionMismatch(f"point has shape {z.shape}, expected ({2 * n},)")
        r = self.frame.A @ z[:n] + self.frame.B @ z[n:] - self.X
        return float(np.abs(r).max())


def plane_contains(pl: AffineLagrangianPlane, z, tol: float = 1e-9) -> bool:
    return pl.residual(z) <= tol


class GeneratingFunction(NamedTuple):
    """Coefficients of A(x, x') = 1/2 P x.x - Q x.x' + 1/2 R x'.x'."""

    P: np.ndarray
    Q: np.ndarray
    R: np.ndarray


def free_generating_function(S: np.ndarray) -> GeneratingFunction:
    """P = D B^-1, Q = B^-1, R = B^-1 A for a free symplectic S."""
    A, B, _, D = blocks(S)
    scale = max(np.abs(S).max(), 1.0)
    n = B.shape[0]
    if abs(np.linalg.det(B)) <= 1e-12 * scale**n:
        raise NotFree(f"upper-right block is singular (det {np.linalg.det(B):.3e})")
    Binv = np.linalg.inv(B)
    P = D @ Binv
    R = Binv @ A
    # symmetric by symplecticity; symmetrize away rounding
    return GeneratingFunction(0.5 * (P + P.T), Binv, 0.5 * (R + R.T))


def symplectic_from_generating(P, Q, R) -> np.ndarray:
    """Rebuild the free symplectic matrix generated by (P, Q, R)."""
    P, Q, R = (np.atleast_2d(np.asarray(m, dtype=float)) for m in (P, Q, R))
    B = np.linalg.inv(Q)
    A = B @ R
    D = P @ B
    C = Q.T @ (D.T @ A - np.eye(B.shape[0]))
    return np.block([[A, B], [C, D]])


def rotation(theta: float, n: int = 1) -> np.ndarray:
    """R_theta = [[cos I, sin I], [-sin I, cos I]]."""
    c, s = np.cos(theta), np.sin(theta)
    eye = np.eye(n)
    return np.block([[c * eye, s * eye], [-s * eye, c * eye]])
