"""Linear IOHD models: validation, state-space conversion, certificates.

A linear IOHD system is

    xdot = [J - R](Q x - C^T u),    y = C x + D u

with J skew-symmetric, R symmetric positive semidefinite, Q and D
symmetric.  Q need not be positive definite; Q > 0 is exactly the
negative-imaginary grade.  Its state-space form is A = (J - R) Q,
B = -(J - R) C^T, and a symmetric P = Q^{-1} with

    P A^T + A P <= 0,    B = -A P C^T

certifies the property from the (A, B, C) side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    CertificateInfeasibleError,
    DimensionError,
    GridError,
    NotIohdError,
    PreconditionError,
    ValidationError,
)
from .linalg import Tolerances, as_matrix, inf_norm


@dataclass(frozen=True, eq=False)
class ComponentBlock:
    """Provenance of one component inside an interconnected model."""

    name: str
    n: int
    m: int


@dataclass(frozen=True, eq=False)
class LinearIohd:
    """Validated-by-shape linear IOHD model (J, R, Q, C, D).

    Numeric invariants (J skew, R PSD, Q and D symmetric) are checked by
    :func:`validate`; construction only enforces conformability and
    finiteness.  ``blocks`` records component provenance for interconnected
    models so they can be sliced apart again.
    """

    J: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    C: np.ndarray
    D: np.ndarray | None = None
    name: str | None = None
    blocks: tuple[ComponentBlock, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "J", as_matrix(self.J, "J"))
        object.__setattr__(self, "R", as_matrix(self.R, "R"))
        object.__setattr__(self, "Q", as_matrix(self.Q, "Q"))
        object.__setattr__(self, "C", as_matrix(self.C, "C"))
        n = self.J.shape[0]
        linalg.require_square(self.J, "J")
        for nm in ("R", "Q"):
            m = getattr(self, nm)
            if m.shape != (n, n):
                raise DimensionError(f"{nm} must be {n}x{n}, got {m.shape}")
        if self.C.shape[1] != n:
            raise DimensionError(f"C must have {n} columns, got {self.C.shape}")
        m = self.C.shape[0]
        d = self.D if self.D is not None else np.zeros((m, m))
        object.__setattr__(self, "D", as_matrix(d, "D"))
        if self.D.shape != (m, m):
            raise DimensionError(f"D must be {m}x{m}, got {self.D.shape}")

    @property
    def n(self) -> int:
        return self.J.shape[0]

    @property
    def m(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Plain linear system (A, B, C, D)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "A", as_matrix(self.A, "A"))
        object.__setattr__(self, "B", as_matrix(self.B, "B"))
        object.__setattr__(self, "C", as_matrix(self.C, "C"))
        linalg.require_square(self.A, "A")
        n = self.A.shape[0]
        if self.B.shape[0] != n:
            raise DimensionError(f"B must have {n} rows, got {self.B.shape}")
        if self.C.shape[1] != n:
            raise DimensionError(f"C must have {n} columns, got {self.C.shape}")
        p, m = self.C.shape[0], self.B.shape[1]
        d = self.D if self.D is not None else np.zeros((p, m))
        object.__setattr__(self, "D", as_matrix(d, "D"))
        if self.D.shape != (p, m):
            raise DimensionError(f"D must be {p}x{m}, got {self.D.shape}")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True, eq=False)
class Certificate:
    """Symmetric witness P (a Q^{-1} candidate) for the IOHD property.

    lyapunov_margin is -lambda_max(P A^T + A P); equality_residual is
    max |B + A P C^T|; positive_definite marks the negative-imaginary
    grade (P > 0); invertible marks the plain IOHD grade.
    """

    P: np.ndarray
    lyapunov_margin: float
    equality_residual: float
    positive_definite: bool
    invertible: bool = True


@dataclass(frozen=True, eq=False)
class ValidationReport:
    """Successful validation outcome: the model plus per-invariant residuals."""

    model: LinearIohd
    residuals: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class FrequencyCheck:
    """Outcome of the positive-real sampling oracle.

    A True ``passed`` is evidence (sampled), not proof.  When the stability
    precondition fails, ``unstable_pole`` holds the offending eigenvalue and
    the grid was never evaluated.
    """

    passed: bool
    worst_omega: float | None
    worst_min_eig: float | None
    unstable_pole: complex | None = None


def validate(model: LinearIohd, tol: Tolerances | None = None) -> ValidationReport:
    """Check the structure conditions J = -J^T, R = R^T >= 0, Q = Q^T, D = D^T.

    Returns the model with every invariant's residual; raises
    ValidationError enumerating all violations (not just the first).
    """
    violations: list[tuple[str, float]] = []
    residuals: dict[str, float] = {}

    skew_gap = inf_norm(model.J + model.J.T)
    residuals["J_skew"] = skew_gap
    if skew_gap > linalg.sym_tol_for(model.J, tol):
        violations.append((f"J not skew-symmetric, max |J + J^T| = {skew_gap:.3e}", skew_gap))

    r_sym = linalg.asymmetry(model.R)
    residuals["R_sym"] = r_sym
    if r_sym > linalg.sym_tol_for(model.R, tol):
        violations.append((f"R not symmetric, max |R - R^T| = {r_sym:.3e}", r_sym))
    else:
        lam_min = (
            float(np.linalg.eigvalsh(linalg.sym_part(model.R))[0]) if model.R.size else 0.0
        )
        residuals["R_min_eig"] = lam_min
        if lam_min < -linalg.psd_tol_for(model.R, tol):
            violations.append((f"R not PSD, lambda_min = {lam_min:.6g}", -lam_min))

    q_sym = linalg.asymmetry(model.Q)
    residuals["Q_sym"] = q_sym
    if q_sym > linalg.sym_tol_for(model.Q, tol):
        violations.append((f"Q not symmetric, max |Q - Q^T| = {q_sym:.3e}", q_sym))

    d_sym = linalg.asymmetry(model.D)
    residuals["D_sym"] = d_sym
    if d_sym > linalg.sym_tol_for(model.D, tol):
        violations.append((f"D not symmetric, max |D - D^T| = {d_sym:.3e}", d_sym))

    if violations:
        raise ValidationError(violations)
    return ValidationReport(model=model, residuals=residuals)


def to_state_space(model: LinearIohd, tol: Tolerances | None = None) -> StateSpace:
    """Expand the IOHD form: A = (J - R) Q, B = -(J - R) C^T, C and D copied."""
    validate(model, tol)
    jr = model.J - model.R
    return StateSpace(A=jr @ model.Q, B=-(jr @ model.C.T), C=model.C, D=model.D)


def from_state_space(ss: StateSpace, q, tol: Tolerances | None = None) -> LinearIohd:
    """Recover the IOHD form of (A, B, C, D) for a given symmetric invertible Q.

    A Q^{-1} is split into skew and symmetric parts, J = skew(A Q^{-1}) and
    R = -sym(A Q^{-1}); the attempt succeeds iff R is PSD and
    B = -A Q^{-1} C^T holds within tolerance.
    """
    q_mat = as_matrix(q, "Q")
    linalg.require_symmetric(q_mat, tol, "Q")
    if q_mat.shape != ss.A.shape:
        raise DimensionError(f"Q must be {ss.A.shape}, got {q_mat.shape}")
    if linalg.asymmetry(ss.D) > linalg.sym_tol_for(ss.D, tol):
        raise PreconditionError("D must be symmetric for an IOHD realization")
    p = linalg.capped_inv(q_mat, "Q")
    ap = ss.A @ p
    s, k = linalg.sym_skew_split(ap)
    r = -s
    lam_min = float(np.linalg.eigvalsh(linalg.sym_part(r))[0]) if r.size else 0.0
    if lam_min < -linalg.psd_tol_for(r, tol):
        raise NotIohdError(
            f"not IOHD for this Q: resistive part has lambda_min = {lam_min:.6g}"
        )
    resid = inf_norm(ss.B + ap @ ss.C.T)
    scale = max(inf_norm(ss.B), inf_norm(ap @ ss.C.T))
    if resid > linalg.eq_tol_for(scale, tol):
        raise NotIohdError(
            f"B incompatible with Q: max |B + A Q^-1 C^T| = {resid:.6g}"
        )
    return LinearIohd(J=k, R=r, Q=q_mat, C=ss.C, D=ss.D)


def _sym_basis(n: int) -> list[np.ndarray]:
    """Basis of the n(n+1)/2-dimensional space of symmetric matrices."""
    basis = []
    for i in range(n):
        for j in range(i, n):
            e = np.zeros((n, n))
            e[i, j] = 1.0
            e[j, i] = 1.0
            basis.append(e)
    return basis


def find_certificate(
    ss: StateSpace,
    tol: Tolerances | None = None,
    search_budget: int = 200,
    seed: int = 0,
) -> Certificate | None:
    """Search for a symmetric P with B = -A P C^T and P A^T + A P <= 0.

    The equality constraint is linear in P: its least-squares solution plus
    the nullspace of the constraint map give an affine family, which is
    scanned deterministically (particular solution first, then seeded random
    combinations, up to ``search_budget`` trials).  Returns None when the
    budget is exhausted -- "not found", never a proof of nonexistence.
    Raises CertificateInfeasibleError when the equality itself has no
    symmetric solution; that *is* a disproof.
    """
    if linalg.asymmetry(ss.D) > linalg.sym_tol_for(ss.D, tol):
        raise PreconditionError("D must be symmetric for a certificate search")
    n = ss.n
    basis = _sym_basis(n)
    cols = [(ss.A @ e @ ss.C.T).reshape(-1) for e in basis]
    coeff = np.column_stack(cols) if cols else np.zeros((ss.B.size, 0))
    rhs = -ss.B.reshape(-1)
    sol, *_ = np.linalg.lstsq(coeff, rhs, rcond=None)
    resid = inf_norm(coeff @ sol - rhs) if rhs.size else 0.0
    if resid > linalg.eq_tol_for(max(1.0, inf_norm(ss.B)), tol):
        raise CertificateInfeasibleError(
            f"no symmetric P satisfies B = -A P C^T (residual {resid:.6g})", resid
        )

    # Nullspace of the constraint map spans the remaining freedom.
    if coeff.size:
        _, sv, vt = np.linalg.svd(coeff, full_matrices=True)
        rank_tol = (sv[0] if sv.size else 0.0) * max(coeff.shape) * np.finfo(float).eps
        rank = int(np.sum(sv > rank_tol))
        null_basis = vt[rank:]
    else:
        null_basis = np.eye(len(basis))

    def assemble(vec: np.ndarray) -> np.ndarray:
        p = np.zeros((n, n))
        for c, e in zip(vec, basis):
            p += c * e
        return p

    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.max(np.abs(sol))) if sol.size else 1.0)
    fallback: Certificate | None = None
    for trial in range(max(1, search_budget)):
        if trial == 0:
            vec = sol
        elif null_basis.shape[0] == 0:
            break
        else:
            mag = scale * float(10.0 ** rng.uniform(-1.0, 1.0))
            vec = sol + mag * (rng.standard_normal(null_basis.shape[0]) @ null_basis)
        p = assemble(vec)
        resid_p = p @ ss.A.T + ss.A @ p
        lam_max = (
            float(np.linalg.eigvalsh(linalg.sym_part(resid_p))[-1]) if resid_p.size else 0.0
        )
        if lam_max > linalg.psd_tol_for(resid_p, tol):
            continue
        sv_p = np.linalg.svd(p, compute_uv=False) if p.size else np.array([1.0])
        invertible = bool(sv_p[-1] > 0 and sv_p[0] / sv_p[-1] < linalg.COND_CAP)
        if not invertible:
            continue
        eq_resid = inf_norm(ss.B + ss.A @ p @ ss.C.T)
        lam_min_p = float(np.linalg.eigvalsh(linalg.sym_part(p))[0]) if p.size else 0.0
        cert = Certificate(
            P=as_matrix(p, "P"),
            lyapunov_margin=-lam_max,
            equality_residual=eq_resid,
            positive_definite=lam_min_p > linalg.psd_tol_for(p, tol),
            invertible=invertible,
        )
        if cert.positive_definite:
            return cert
        if fallback is None:
            fallback = cert
    return fallback


def dc_gain(model: LinearIohd, tol: Tolerances | None = None) -> np.ndarray:
    """Zero-frequency gain C Q^{-1} C^T, cross-checked against -C A^{-1} B.

    Requires D = 0 and invertible A = (J - R) Q.  The two expressions are
    equal for any IOHD system; disagreement beyond tolerance signals a
    numerically broken model and raises.
    """
    validate(model, tol)
    if inf_norm(model.D) > linalg.eq_tol_for(1.0, tol):
        raise PreconditionError("dc gain is defined for D = 0 models only")
    ss = to_state_space(model, tol)
    q_inv = linalg.capped_inv(model.Q, "Q")
    gain = model.C @ q_inv @ model.C.T
    alt = -model.C @ linalg.capped_solve(ss.A, ss.B, "A")
    resid = inf_norm(gain - alt)
    if resid > linalg.eq_tol_for(max(1.0, inf_norm(gain)), tol):
        from .errors import ConsistencyError

        raise ConsistencyError(
            f"dc-gain identity violated: |C Q^-1 C^T + C A^-1 B| = {resid:.6g}",
            {"dc_gain": resid},
        )
    return linalg.sym_part(gain)


def default_frequency_grid(num: int = 50) -> np.ndarray:
    """Logarithmic default grid, 50 points in [1e-3, 1e3] rad/s."""
    return np.logspace(-3.0, 3.0, num)


def ni_frequency_check(
    ss: StateSpace,
    omega_grid=None,
    tol: Tolerances | None = None,
) -> FrequencyCheck:
    """Sample H(jw) = jw (G(jw) - D) on a grid and test its Hermitian part >= 0.

    The stability precondition (no eigenvalue of A in the open right half
    plane) is checked first; a violation returns False immediately with the
    offending eigenvalue as witness -- the sampled Hermitian parts alone
    could pass misleadingly for an unstable system.  A True result is
    sampling evidence, not a proof.
    """
    grid = np.asarray(
        default_frequency_grid() if omega_grid is None else omega_grid, dtype=float
    ).reshape(-1)
    if grid.size == 0 or np.any(grid <= 0):
        raise PreconditionError("frequency grid must contain positive frequencies")
    eigs = np.linalg.eigvals(ss.A) if ss.n else np.array([])
    stab_tol = linalg.psd_tol_for(ss.A, tol)
    if eigs.size:
        worst = eigs[np.argmax(eigs.real)]
        if worst.real > stab_tol:
            return FrequencyCheck(
                passed=False, worst_omega=None, worst_min_eig=None,
                unstable_pole=complex(worst),
            )
    eye = np.eye(ss.n)
    worst_omega = float(grid[0])
    worst_min = np.inf
    for omega in grid:
        if eigs.size:
            gap = np.min(np.abs(eigs - 1j * omega))
            if gap <= 1e-10 * max(1.0, float(np.max(np.abs(eigs)))):
                raise GridError(
                    f"grid frequency {omega:.6g} coincides with a system pole",
                    float(omega),
                )
        resolvent = np.linalg.solve(1j * omega * eye - ss.A, ss.B)
        h = 1j * omega * (ss.C @ resolvent)
        herm = h + h.conj().T
        lam_min = float(np.linalg.eigvalsh(herm)[0]) if herm.size else 0.0
        if lam_min < worst_min:
            worst_min = lam_min
            worst_omega = float(omega)
        threshold = (
            tol.psd_tol if tol is not None
            else 1e-9 * max(1.0, float(np.max(np.abs(herm))) if herm.size else 0.0)
        )
        if lam_min < -threshold:
            return FrequencyCheck(
                passed=False, worst_omega=float(omega), worst_min_eig=lam_min
            )
    return FrequencyCheck(
        passed=True, worst_omega=worst_omega,
        worst_min_eig=float(worst_min) if np.isfinite(worst_min) else 0.0,
    )


def mass_spring_chain(
    m1: float = 1.0,
    m2: float = 1.0,
    k1: float = 1.0,
    k2: float = 1.0,
    d1: float = 0.0,
    d2: float = 0.0,
) -> LinearIohd:
    """Alternating mass-spring-mass-spring chain with dampers across the springs.

    State (q12, q20, p1, p2): spring elongations and mass momenta.  Input 1
    is the velocity of the free end of the second spring, input 2 the force
    on the first mass; y1 = p1 + p2 - d2*q20, y2 = q12 + q20.
    """
    if m1 <= 0 or m2 <= 0:
        raise PreconditionError("masses must be positive")
    if d1 < 0 or d2 < 0:
        raise PreconditionError("damping coefficients must be nonnegative")
    j = np.array(
        [
            [0.0, 0.0, 1.0, -1.0],
            [0.0, 0.0, 0.0, 1.0],
            [-1.0, 0.0, 0.0, 0.0],
            [1.0, -1.0, 0.0, 0.0],
        ]
    )
    r = np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, d1, -d1],
            [0.0, 0.0, -d1, d1 + d2],
        ]
    )
    q = np.diag([k1, k2, 1.0 / m1, 1.0 / m2])
    c = np.array([[0.0, -d2, 1.0, 1.0], [1.0, 1.0, 0.0, 0.0]])
    return LinearIohd(J=j, R=r, Q=q, C=c, name="mass_spring_2dof")
