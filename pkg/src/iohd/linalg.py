"""Dense real-matrix kernels used by every other module.

Symmetric/skew decomposition, definiteness tests, Lyapunov-inequality
checks, Schur complements and symmetric eigen-extrema, all over plain
``numpy`` arrays.  Matrices are copied and frozen (read-only) on entry so
results never alias caller data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AsymmetryError, DimensionError, SingularMatrixError

# Inversions above this condition-number estimate are refused.
COND_CAP = 1e12


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a read-only 2-D float64 array, rejecting NaN/Inf entries."""
    m = np.array(a, dtype=float, order="C")
    if m.ndim == 1:
        m = m.reshape(1, -1) if m.size else m.reshape(0, 0)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise DimensionError(f"{name} contains non-finite entries")
    m.flags.writeable = False
    return m


def as_vector(a, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-D float64 array with finite entries."""
    v = np.array(a, dtype=float).reshape(-1)
    if v.size and not np.all(np.isfinite(v)):
        raise DimensionError(f"{name} contains non-finite entries")
    return v


def inf_norm(m: np.ndarray) -> float:
    """Largest absolute entry (0 for empty arrays)."""
    return float(np.max(np.abs(m))) if m.size else 0.0


@dataclass(frozen=True)
class Tolerances:
    """Absolute thresholds for symmetry, semidefiniteness and equality checks."""

    sym_tol: float
    psd_tol: float
    eq_tol: float

    def __post_init__(self):
        for f in ("sym_tol", "psd_tol", "eq_tol"):
            if getattr(self, f) < 0:
                raise ValueError(f"{f} must be nonnegative")


def default_tolerances(*mats: np.ndarray) -> Tolerances:
    """Scale-relative default thresholds for the given operands.

    sym_tol = 1e-10 * s, psd_tol = eq_tol = 1e-9 * max(1, s) with s the
    largest entry magnitude over all operands, so thresholds survive unit
    changes.
    """
    scale = max((inf_norm(m) for m in mats), default=1.0)
    return Tolerances(
        sym_tol=1e-10 * scale,
        psd_tol=1e-9 * max(1.0, scale),
        eq_tol=1e-9 * max(1.0, scale),
    )


def sym_tol_for(m: np.ndarray, tol: Tolerances | None) -> float:
    return tol.sym_tol if tol is not None else 1e-10 * inf_norm(m)


def psd_tol_for(m: np.ndarray, tol: Tolerances | None) -> float:
    return tol.psd_tol if tol is not None else 1e-9 * max(1.0, inf_norm(m))


def eq_tol_for(scale: float, tol: Tolerances | None) -> float:
    return tol.eq_tol if tol is not None else 1e-9 * max(1.0, scale)


def require_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def asymmetry(m: np.ndarray) -> float:
    """Largest entry of M - M^T."""
    return inf_norm(m - m.T)


def require_symmetric(m: np.ndarray, tol: Tolerances | None, name: str = "matrix") -> np.ndarray:
    require_square(m, name)
    gap = asymmetry(m)
    if gap > sym_tol_for(m, tol):
        raise AsymmetryError(f"{name} is asymmetric: max |M - M^T| = {gap:.3e}")
    return m


def sym_part(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


def sym_skew_split(m) -> tuple[np.ndarray, np.ndarray]:
    """Split a square matrix into symmetric and skew-symmetric parts.

    Returns (S, K) with S = (M + M^T)/2, K = (M - M^T)/2, so S + K = M
    up to floating round-off.
    """
    a = as_matrix(m)
    require_square(a)
    return (a + a.T) / 2.0, (a - a.T) / 2.0


def is_psd(m, tol: Tolerances | None = None) -> tuple[bool, float]:
    """Test positive semidefiniteness of a symmetric matrix.

    Returns (passed, lambda_min) where the minimum eigenvalue of the
    symmetrized input serves as the witness.  Raises AsymmetryError when
    the input is asymmetric beyond tolerance.
    """
    a = as_matrix(m)
    require_symmetric(a, tol)
    lam_min = float(np.linalg.eigvalsh(sym_part(a))[0]) if a.size else 0.0
    return lam_min >= -psd_tol_for(a, tol), lam_min


def max_eig_sym(m, tol: Tolerances | None = None) -> float:
    """Largest eigenvalue of a symmetric matrix (symmetrized before solving)."""
    a = as_matrix(m)
    require_symmetric(a, tol)
    return float(np.linalg.eigvalsh(sym_part(a))[-1]) if a.size else 0.0


def lyapunov_check(a_mat, p_mat, tol: Tolerances | None = None) -> bool:
    """True iff P A^T + A P <= 0 within tolerance, for symmetric P."""
    a = as_matrix(a_mat, "A")
    p = as_matrix(p_mat, "P")
    require_square(a, "A")
    require_symmetric(p, tol, "P")
    if a.shape != p.shape:
        raise DimensionError(f"A and P must have equal shape, got {a.shape} vs {p.shape}")
    resid = p @ a.T + a @ p
    lam_max = float(np.linalg.eigvalsh(sym_part(resid))[-1]) if resid.size else 0.0
    return lam_max <= psd_tol_for(resid, tol)


def capped_inv(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Inverse with a condition-number guard at COND_CAP."""
    require_square(m, name)
    cond = float(np.linalg.cond(m)) if m.size else 1.0
    if not np.isfinite(cond) or cond > COND_CAP:
        raise SingularMatrixError(
            f"{name} is singular or too ill-conditioned (cond ~ {cond:.3e})", cond
        )
    return np.linalg.inv(m)


def capped_solve(m: np.ndarray, rhs: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Solve M X = rhs with the same condition guard as capped_inv."""
    require_square(m, name)
    cond = float(np.linalg.cond(m)) if m.size else 1.0
    if not np.isfinite(cond) or cond > COND_CAP:
        raise SingularMatrixError(
            f"{name} is singular or too ill-conditioned (cond ~ {cond:.3e})", cond
        )
    return np.linalg.solve(m, rhs)


def schur_complement(p11, p12, p22, c2, tol: Tolerances | None = None) -> np.ndarray:
    """P11 - P12 C2^T (C2 P22 C2^T)^{-1} C2 P12^T.

    Blocks must be conformable; C2 P22 C2^T must be invertible below the
    condition cap.  When the partitioned matrix is symmetric the result is
    symmetrized, preserving the exact symmetry of the underlying formula.
    """
    a11 = as_matrix(p11, "P11")
    a12 = as_matrix(p12, "P12")
    a22 = as_matrix(p22, "P22")
    c = as_matrix(c2, "C2")
    require_square(a11, "P11")
    require_square(a22, "P22")
    if a12.shape != (a11.shape[0], a22.shape[0]):
        raise DimensionError(
            f"P12 must be {a11.shape[0]}x{a22.shape[0]}, got {a12.shape}"
        )
    if c.shape[1] != a22.shape[0]:
        raise DimensionError(f"C2 must have {a22.shape[0]} columns, got {c.shape}")
    w = c @ a22 @ c.T
    symmetric_input = (
        asymmetry(a11) <= sym_tol_for(a11, tol) and asymmetry(a22) <= sym_tol_for(a22, tol)
    )
    if symmetric_input:
        w = sym_part(w)
    x = a12 @ c.T
    correction = x @ capped_solve(w, c @ a12.T, "C2 P22 C2^T")
    if symmetric_input:
        correction = sym_part(correction)
    return a11 - correction


def blkdiag(*mats: np.ndarray) -> np.ndarray:
    """Block-diagonal assembly of 2-D arrays."""
    arrs = [np.atleast_2d(np.asarray(m, dtype=float)) for m in mats]
    rows = sum(a.shape[0] for a in arrs)
    cols = sum(a.shape[1] for a in arrs)
    out = np.zeros((rows, cols))
    r = c = 0
    for a in arrs:
        out[r : r + a.shape[0], c : c + a.shape[1]] = a
        r += a.shape[0]
        c += a.shape[1]
    return out
