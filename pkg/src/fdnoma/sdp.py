"""Small dense SDP solver over the Hermitian PSD cone.

Solves::

    minimize    tr(C X)
    subject to  tr(A_i X) <= b_i   or   tr(A_i X) >= b_i,   X >= 0 (PSD)

for Hermitian ``C``, ``A_i`` of modest size.  Complex data are mapped to
real symmetric matrices through ``T(M) = [[Re M, -Im M], [Im M, Re M]]``;
with ``tr(T(A) T(X)) = 2 tr(A X)`` a real PSD solution of the embedded
problem folds back to a Hermitian PSD one with identical objective and
constraint values.

The embedded problem is solved by an infeasible-start primal-dual
path-following method on the homogeneous self-dual model, with the HKM
search direction and a fixed centering parameter.  The homogeneous model
yields either an optimal pair or a Farkas certificate of infeasibility
without a separate phase I.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

__all__ = [
    "Status", "Constraint", "SdpProblem", "SdpSolution", "Feasibility",
    "solve", "feasibility", "real_embed", "fold_embedded",
    "dump_problem", "dump_solution", "load_problem",
]


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True)
class Constraint:
    A: np.ndarray
    sense: str
    b: float

    def __post_init__(self):
        if self.sense not in ("<=", ">="):
            raise ValueError(f"sense must be '<=' or '>=', got {self.sense!r}")
        if not np.isfinite(self.b):
            raise ValueError(f"bound must be finite, got {self.b!r}")


@dataclass
class SdpProblem:
    C: np.ndarray
    constraints: list = field(default_factory=list)

    def __post_init__(self):
        self.C = np.asarray(self.C, dtype=complex)
        if self.C.ndim != 2 or self.C.shape[0] != self.C.shape[1]:
            raise ValueError(f"C must be square, got {self.C.shape}")
        self.constraints = [
            Constraint(np.asarray(c.A, dtype=complex), c.sense, float(c.b))
            if isinstance(c, Constraint) else Constraint(np.asarray(c[0], dtype=complex), c[1], float(c[2]))
            for c in self.constraints
        ]
        for c in self.constraints:
            if c.A.shape != self.C.shape:
                raise ValueError(f"constraint matrix shape {c.A.shape} != {self.C.shape}")
        for M in [self.C] + [c.A for c in self.constraints]:
            scale = max(np.max(np.abs(M)), 1e-300)
            if np.max(np.abs(M - M.conj().T)) > 1e-12 * scale:
                raise ValueError("SDP data matrices must be Hermitian")

    @property
    def n(self):
        return self.C.shape[0]

    def values(self, X):
        """``tr(A_i X)`` for every constraint."""
        return np.array([np.real(np.sum(c.A * X.T)) for c in self.constraints])

    def violations(self, X):
        """Relative violation of each constraint at ``X`` (0 when satisfied)."""
        out = []
        xnorm = np.linalg.norm(X)
        for c, val in zip(self.constraints, self.values(X)):
            excess = val - c.b if c.sense == "<=" else c.b - val
            ref = max(abs(c.b), np.linalg.norm(c.A) * xnorm, 1e-300)
            out.append(max(excess, 0.0) / ref)
        return np.array(out)


@dataclass
class SdpSolution:
    status: Status
    X: np.ndarray
    objective: float
    iterations: int
    max_constraint_violation: float
    dual_objective: float = math.nan
    gap: float = math.nan
    y: np.ndarray = None
    message: str = ""

    @property
    def optimal(self):
        return self.status is Status.OPTIMAL


@dataclass
class Feasibility:
    feasible: bool
    X: np.ndarray = None
    solution: SdpSolution = None

    def __bool__(self):
        return self.feasible


# ---------------------------------------------------------------------------
# real embedding
# ---------------------------------------------------------------------------

def real_embed(M):
    M = np.asarray(M, dtype=complex)
    re, im = M.real, M.imag
    return np.block([[re, -im], [im, re]])


def fold_embedded(Y):
    """Hermitian matrix whose embedding is the structured part of ``Y``."""
    n = Y.shape[0] // 2
    S = 0.5 * (Y[:n, :n] + Y[n:, n:])
    K = 0.5 * (Y[n:, :n] - Y[:n, n:])
    X = S + 1j * K
    return 0.5 * (X + X.conj().T)


def _project(Y):
    # nearest matrix with the [[S, -K], [K, S]] structure, symmetrised
    n = Y.shape[0] // 2
    Y11, Y12, Y21, Y22 = Y[:n, :n], Y[:n, n:], Y[n:, :n], Y[n:, n:]
    S = 0.25 * (Y11 + Y22 + Y11.T + Y22.T)
    K = 0.25 * (Y21 - Y12 - Y21.T + Y12.T)
    out = np.empty_like(Y)
    out[:n, :n] = S
    out[n:, n:] = S
    out[n:, :n] = K
    out[:n, n:] = -K
    return out


def _max_step(X, dX):
    """Largest ``a`` with ``X + a dX`` PSD (``inf`` if unbounded)."""
    try:
        lam = sla.eigh(dX, X, eigvals_only=True, subset_by_index=[0, 0], check_finite=False)[0]
    except (sla.LinAlgError, ValueError):
        return 0.0
    return -1.0 / lam if lam < 0 else math.inf


def _ratio(x, dx):
    neg = dx < 0
    return float(np.min(-x[neg] / dx[neg])) if np.any(neg) else math.inf


def _scalar_ratio(x, dx):
    return -x / dx if dx < 0 else math.inf


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------

def _psd_kind(A, tol=1e-12):
    # +1 if A is PSD, -1 if NSD, 0 otherwise
    lam = np.linalg.eigvalsh(A)
    scale = max(np.abs(lam).max(), 1e-300)
    if lam.min() >= -tol * scale:
        return 1
    if lam.max() <= tol * scale:
        return -1
    return 0


def _facial_reduction(prob):
    """Restrict ``X`` to the null space forced by ``tr(A X) <= 0`` with ``A`` PSD.

    Returns ``(reduced_problem, basis)`` with ``X = basis @ X_red @ basis^H``.
    Such constraints leave no strictly feasible point, which path-following
    methods cannot handle; on the reduced face they are vacuous and dropped.
    """
    basis = np.eye(prob.n, dtype=complex)
    cons = list(prob.constraints)
    while True:
        pick = None
        for k, c in enumerate(cons):
            norm = np.linalg.norm(c.A)
            if norm == 0 or abs(c.b) > 1e-13 * norm:
                continue
            kind = _psd_kind(c.A)
            if (kind == 1 and c.sense == "<=") or (kind == -1 and c.sense == ">="):
                pick = k
                break
        if pick is None:
            break
        A = cons.pop(pick).A
        lam, V = np.linalg.eigh(A)
        keep = np.abs(lam) <= 1e-12 * np.abs(lam).max()
        N = V[:, keep]
        basis = basis @ N
        cons = [Constraint(N.conj().T @ c.A @ N, c.sense, c.b) for c in cons]
        C = N.conj().T @ prob.C @ N
        if N.shape[1] == 0:
            return None, basis
        prob = SdpProblem(0.5 * (C + C.conj().T),
                          [Constraint(0.5 * (c.A + c.A.conj().T), c.sense, c.b) for c in cons])
    return prob, basis


def solve(prob, tol=1e-8, max_iter=200, sigma=0.5, step_fraction=0.95):
    """Solve an :class:`SdpProblem`.

    Parameters
    ----------
    prob : SdpProblem
    tol : float
        Relative tolerance on primal/dual residuals and the duality gap
        (``1e-10 <= tol <= 1e-4``).
    max_iter : int
        Iteration cap; hitting it yields ``NumericalFailure``.
    sigma : float
        Fixed centering parameter.

    Returns
    -------
    SdpSolution
        ``Optimal`` with ``X`` Hermitian PSD, ``Infeasible`` when a Farkas
        certificate is found, ``Unbounded`` when the objective is unbounded
        below, or ``NumericalFailure`` when progress stalls.
    """
    if not 1e-10 <= tol <= 1e-4:
        raise ValueError(f"tol must lie in [1e-10, 1e-4], got {tol}")
    n = prob.n
    for k, c in enumerate(prob.constraints):
        # tr(A X) >= 0 for PSD A and X, whatever the solver tolerance
        kind = _psd_kind(c.A) if np.any(c.A) else 0
        if (kind == 1 and c.sense == "<=" and c.b < 0) or (kind == -1 and c.sense == ">=" and c.b > 0):
            X = np.zeros((n, n), dtype=complex)
            return SdpSolution(Status.INFEASIBLE, X, math.nan, 0, float(prob.violations(X).max()),
                               message=f"constraint {k} is semidefinite with a bound of the wrong sign")
    red, basis = _facial_reduction(prob)
    if red is None:
        # only X = 0 remains
        X = np.zeros((n, n), dtype=complex)
        viol = prob.violations(X)
        if viol.max(initial=0.0) > 0:
            return SdpSolution(Status.INFEASIBLE, X, math.nan, 0, float(viol.max()),
                               message="facial reduction left only X = 0, which is infeasible")
        return SdpSolution(Status.OPTIMAL, X, 0.0, 0, 0.0, dual_objective=0.0, gap=0.0,
                           message="facial reduction left only X = 0")
    sol = _solve_core(red, tol, max_iter, sigma, step_fraction)
    if basis.shape[1] == n:
        return sol
    X = basis @ sol.X @ basis.conj().T
    X = 0.5 * (X + X.conj().T)
    obj = float(np.real(np.sum(prob.C * X.T))) if sol.status is Status.OPTIMAL else math.nan
    sol.X = X
    sol.objective = obj
    sol.max_constraint_violation = float(prob.violations(X).max(initial=0.0))
    sol.message += f" (on a face of dimension {basis.shape[1]})"
    return sol


def _solve_core(prob, tol, max_iter, sigma, step_fraction):
    # prob is already facially reduced
    n = prob.n
    Xzero = np.zeros((n, n), dtype=complex)

    rows, rhs = [], []
    for c in prob.constraints:
        A, b = (c.A, c.b) if c.sense == "<=" else (-c.A, -c.b)
        scale = max(np.linalg.norm(A), abs(b))
        if np.linalg.norm(A) <= 1e-14 * max(scale, 1e-300):
            if b < -tol * max(abs(b), 1.0):
                return SdpSolution(Status.INFEASIBLE, Xzero, math.nan, 0, math.inf,
                                   message="constraint with zero matrix and negative bound")
            continue
        rows.append(A / scale)
        rhs.append(b / scale)

    cnorm = np.linalg.norm(prob.C)
    C = prob.C / cnorm if cnorm > 0 else prob.C

    if not rows:
        lam_min = np.linalg.eigvalsh(C).min() if cnorm > 0 else 0.0
        if lam_min < -tol:
            return SdpSolution(Status.UNBOUNDED, Xzero, -math.inf, 0, 0.0,
                               message="objective has a negative direction and no constraints")
        return SdpSolution(Status.OPTIMAL, Xzero, 0.0, 0, 0.0, dual_objective=0.0, gap=0.0,
                           y=np.zeros(0))

    m = len(rows)
    N = 2 * n
    Ah = np.stack([real_embed(A) / 2.0 for A in rows])
    Ch = real_embed(C) / 2.0
    Abar = np.concatenate([Ah, Ch[None]], axis=0)
    b = np.asarray(rhs)
    bnorm = np.linalg.norm(b)
    chnorm = np.linalg.norm(Ch)

    X = np.eye(N)
    Z = np.eye(N)
    s = np.ones(m)
    w = np.ones(m)
    y = np.zeros(m)
    tau = kappa = 1.0
    nu = N + m + 1
    eta = 1.0 - sigma

    status, message = Status.NUMERICAL_FAILURE, "iteration cap reached"
    it = 0
    for it in range(1, max_iter + 1):
        AX = np.einsum("kij,ij->k", Ah, X)
        r_p = AX + s - b * tau
        R_d = Ch * tau - np.einsum("k,kij->ij", y, Ah) - Z
        r_dw = -y - w
        cx = float(np.sum(Ch * X))
        by = float(b @ y)
        r_g = cx - by + kappa
        mu = (float(np.sum(X * Z)) + s @ w + tau * kappa) / nu

        pres = math.hypot(np.linalg.norm(r_p), 0.0) / tau / (1.0 + bnorm)
        dres = math.hypot(np.linalg.norm(R_d), np.linalg.norm(r_dw)) / tau / (1.0 + chnorm)
        pobj, dobj = cx / tau, by / tau
        gap = abs(pobj - dobj)
        if pres <= tol and dres <= tol and gap <= tol * (1.0 + abs(pobj) + abs(dobj)):
            status, message = Status.OPTIMAL, "converged"
            break
        # Farkas certificates
        if by > 0:
            cert = math.hypot(np.linalg.norm(np.einsum("k,kij->ij", y, Ah) + Z),
                              np.linalg.norm(y + w)) / by
            if cert <= tol:
                status, message = Status.INFEASIBLE, f"primal infeasibility certificate {cert:.2e}"
                break
        if cx < 0:
            cert = np.linalg.norm(AX + s) / -cx
            if cert <= tol:
                status, message = Status.UNBOUNDED, f"dual infeasibility certificate {cert:.2e}"
                break
        if tau < 1e-8 * kappa and mu < 1e-12:
            message = "homogeneous model collapsed without a certificate"
            break

        try:
            Lz = np.linalg.cholesky(Z)
        except np.linalg.LinAlgError:
            message = "dual slack lost definiteness"
            break
        Zi = sla.cho_solve((Lz, True), np.eye(N))
        Zi = 0.5 * (Zi + Zi.T)
        P = Zi @ Abar @ X
        G = np.einsum("kij,lji->kl", Abar, P)
        G = 0.5 * (G + G.T)

        T = Zi @ (eta * R_d) @ X
        D0 = sigma * mu * Zi - X - 0.5 * (T + T.T)
        K = np.empty((m + 1, m + 1))
        K[:m, :m] = G[:m, :m] + np.diag(s / w)
        K[:m, m] = -(G[:m, m] + b)
        K[m, :m] = G[m, :m] - b
        K[m, m] = -(G[m, m] + kappa / tau)
        rhs1 = (-eta * r_p - np.einsum("kij,ij->k", Ah, D0)
                - (sigma * mu - s * w - eta * s * r_dw) / w)
        rhs2 = -eta * r_g - float(np.sum(Ch * D0)) - (sigma * mu - tau * kappa) / tau
        kr = np.append(rhs1, rhs2)
        try:
            sol = np.linalg.solve(K, kr)
        except np.linalg.LinAlgError:
            sol = np.linalg.lstsq(K, kr, rcond=None)[0]
        if not np.all(np.isfinite(sol)):
            message = "singular Newton system"
            break
        dy, dtau = sol[:m], sol[m]

        dZ = eta * R_d + Ch * dtau - np.einsum("k,kij->ij", dy, Ah)
        U = Zi @ dZ @ X
        dX = sigma * mu * Zi - X - 0.5 * (U + U.T)
        dZ = _project(dZ)
        dX = _project(dX)
        dw = eta * r_dw - dy
        ds = (sigma * mu - s * w - s * dw) / w
        dkappa = (sigma * mu - tau * kappa - kappa * dtau) / tau

        amax = min(_max_step(X, dX), _max_step(Z, dZ), _ratio(s, ds), _ratio(w, dw),
                   _scalar_ratio(tau, dtau), _scalar_ratio(kappa, dkappa))
        alpha = min(1.0, step_fraction * amax)
        if alpha < 1e-12:
            message = f"step length {alpha:.1e} stalled"
            break
        X = _project(X + alpha * dX)
        Z = _project(Z + alpha * dZ)
        s = s + alpha * ds
        w = w + alpha * dw
        y = y + alpha * dy
        tau += alpha * dtau
        kappa += alpha * dkappa

    if status is Status.OPTIMAL:
        Xc = fold_embedded(X / tau)
        obj = float(np.real(np.sum(prob.C * Xc.T)))
        viol = prob.violations(Xc)
        return SdpSolution(status, Xc, obj, it, float(viol.max(initial=0.0)),
                           dual_objective=dobj * cnorm if cnorm > 0 else dobj, gap=gap,
                           y=y / tau, message=message)
    Xc = fold_embedded(X / tau) if tau > 0 else Xzero
    return SdpSolution(status, Xc, math.nan, it,
                       float(prob.violations(Xc).max(initial=0.0)), message=message)


def feasibility(prob, tol=1e-8, **kwargs):
    """Decide whether the constraint set of ``prob`` is non-empty."""
    probe = SdpProblem(np.zeros_like(prob.C), prob.constraints)
    sol = solve(probe, tol=tol, **kwargs)
    if sol.status is Status.OPTIMAL:
        return Feasibility(True, sol.X, sol)
    return Feasibility(False, None, sol)


# ---------------------------------------------------------------------------
# plain-text dumps for cross-checking against external solvers
# ---------------------------------------------------------------------------

def _fmt_matrix(M):
    return "\n".join(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row) for row in M)


def _parse_matrix(lines, n):
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        toks = lines[i].split()
        if len(toks) != n:
            raise ValueError(f"row {i}: expected {n} entries, got {len(toks)}")
        for j, tok in enumerate(toks):
            re, im = tok.split(",")
            out[i, j] = complex(float(re), float(im))
    return out


def dump_problem(prob):
    """Serialise a problem as text; matrices row-major with ``re,im`` pairs."""
    parts = [f"sdp n={prob.n} m={len(prob.constraints)}", "C", _fmt_matrix(prob.C)]
    for k, c in enumerate(prob.constraints):
        parts += [f"A {k} {c.sense} {c.b!r}", _fmt_matrix(c.A)]
    return "\n".join(parts) + "\n"


def load_problem(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "sdp":
        raise ValueError("not an sdp dump")
    n = int(head[1].split("=")[1])
    m = int(head[2].split("=")[1])
    pos = 1
    if lines[pos].strip() != "C":
        raise ValueError("expected 'C' block")
    C = _parse_matrix(lines[pos + 1:pos + 1 + n], n)
    pos += 1 + n
    cons = []
    for _ in range(m):
        tag, _k, sense, bval = lines[pos].split()
        if tag != "A":
            raise ValueError(f"expected constraint header, got {lines[pos]!r}")
        A = _parse_matrix(lines[pos + 1:pos + 1 + n], n)
        cons.append(Constraint(A, sense, float(bval)))
        pos += 1 + n
    return SdpProblem(C, cons)


def dump_solution(sol):
    head = (f"solution status={sol.status.value} iterations={sol.iterations} "
            f"objective={float(sol.objective)!r} "
            f"max_violation={float(sol.max_constraint_violation)!r}")
    return head + "\nX\n" + _fmt_matrix(sol.X) + "\n"
