"""One-step integrators in formal (exact h-series) and numeric (float) mode.

Formal mode is the verification path: a step is expanded as a truncated
power series in h with exact coefficients, either at a rational point or
symbolically in ``y0``. Implicit stages are solved by fixed-point iteration
in series arithmetic; N sweeps give N correct orders, so no tolerance is
involved.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .fields import (
    augment,
    directional,
    is_chi_related,
    lie_derivative_form,
    series_as_field,
    tangent_lift,
)
from .hseries import (
    HSeries,
    coefficient_field,
    compose_state,
    exact_flow_symbolic,
    flow_formal,
    modified_field_terms,
)
from .poly import Poly, PolyMap, PolyVectorField, to_field, variables
from .series import ButcherTableau, PartitionSpec, SeriesMap

log = logging.getLogger(__name__)

__all__ = [
    "ExactFlow",
    "SplittingScheme",
    "PartitionedMethod",
    "DiagramResidual",
    "ConvergenceError",
    "step_formal",
    "flow_formal",
    "step_numeric",
    "modified_field_polynomials",
    "fe_diagram_residual",
    "fe_diagram_residual_additive",
    "check_closure_under_differentiation",
    "check_chi_related_modified",
    "check_symplectic_modified",
    "splitting_modified_field",
    "check_exact_flow_rigidity",
    "hamiltonian_field",
    "canonical_form",
]


@dataclass(frozen=True)
class ExactFlow:
    """Pseudo-method whose step is the exact flow of the field (oracle use)."""

    name: str = "exact"


@dataclass(frozen=True)
class SplittingScheme:
    """Composition of exact part flows; stage ``(nu, c)`` applies ``exp(c h f^[nu])``.

    Stages run in the listed order. Parts are numbered from 1.
    """

    stages: tuple
    parts: int
    name: str = ""

    def __post_init__(self):
        stages = tuple((int(nu), Fraction(c) if isinstance(c, (int, str)) else c) for nu, c in self.stages)
        for nu, _ in stages:
            if not 1 <= nu <= self.parts:
                raise ValueError(f"stage part {nu} outside [1, {self.parts}]")
        object.__setattr__(self, "stages", stages)

    def weight(self, nu: int):
        return sum((c for m, c in self.stages if m == nu), Fraction(0))

    def is_consistent(self) -> bool:
        return all(self.weight(nu) == 1 for nu in range(1, self.parts + 1))


@dataclass(frozen=True)
class PartitionedMethod:
    """Partitioned Runge-Kutta method: block ``nu`` of the state uses ``tableaux[nu]``."""

    tableaux: tuple
    partition: PartitionSpec
    name: str = ""

    def __post_init__(self):
        tabs = tuple(self.tableaux)
        if len(tabs) != self.partition.parts:
            raise ValueError("one tableau per partition block is required")
        if len({t.stages for t in tabs}) != 1:
            raise ValueError("all tableaux must have the same number of stages")
        object.__setattr__(self, "tableaux", tabs)

    @property
    def stages(self) -> int:
        return self.tableaux[0].stages


class ConvergenceError(RuntimeError):
    def __init__(self, msg: str, iterations: int):
        super().__init__(f"{msg} after {iterations} iterations")
        self.iterations = iterations


# ---------------------------------------------------------------- formal mode


def _zero_coeff(y0: Sequence):
    for v in y0:
        c = v.coeffs[0] if isinstance(v, HSeries) else v
        if isinstance(c, Poly):
            return Poly.zero(c.nvars)
    return Fraction(0)


def _as_state(y0: Sequence, N: int) -> list[HSeries]:
    zero = _zero_coeff(y0)
    return [v.truncate(N) if isinstance(v, HSeries) else HSeries([v] + [zero] * N) for v in y0]


def symbolic_point(d: int) -> list[Poly]:
    return variables(d)


def _linear_combination(coeffs, vectors, zero: HSeries, d: int) -> list[HSeries]:
    out = [zero] * d
    for a, vec in zip(coeffs, vectors):
        if not a:
            continue
        out = [o + v * a for o, v in zip(out, vec)]
    return out


def _rk_formal(tab: ButcherTableau, f: PolyVectorField, Y0: list[HSeries], N: int) -> list[HSeries]:
    s, d = tab.stages, f.dim
    zero = HSeries.zero(N, _zero_coeff(Y0))
    K = [[zero] * d for _ in range(s)]
    if tab.is_explicit():
        for i in range(s):
            inc = _linear_combination(tab.A[i][:i], K[:i], zero, d)
            K[i] = f.evaluate([y + dy.shift(1) for y, dy in zip(Y0, inc)], zero)
    else:
        for _ in range(N):
            K = [
                f.evaluate([y + dy.shift(1) for y, dy in zip(Y0, _linear_combination(tab.A[i], K, zero, d))], zero)
                for i in range(s)
            ]
    inc = _linear_combination(tab.b, K, zero, d)
    return [y + dy.shift(1) for y, dy in zip(Y0, inc)]


def _prk_formal(m: PartitionedMethod, f: PolyVectorField, Y0: list[HSeries], N: int) -> list[HSeries]:
    if m.partition.dim != f.dim:
        raise ValueError(f"partition covers {m.partition.dim} components, field has {f.dim}")
    s, d = m.stages, f.dim
    zero = HSeries.zero(N, _zero_coeff(Y0))
    block = [m.tableaux[m.partition.block_of(k)] for k in range(d)]

    def stage_value(i: int, K) -> list[HSeries]:
        out = []
        for k in range(d):
            acc = zero
            for j in range(s):
                a = block[k].A[i][j]
                if a:
                    acc = acc + K[j][k] * a
            out.append(Y0[k] + acc.shift(1))
        return out

    K = [[zero] * d for _ in range(s)]
    for _ in range(N):
        K = [f.evaluate(stage_value(i, K), zero) for i in range(s)]
    out = []
    for k in range(d):
        acc = zero
        for i in range(s):
            b = block[k].b[i]
            if b:
                acc = acc + K[i][k] * b
        out.append(Y0[k] + acc.shift(1))
    return out


def _splitting_formal(scheme: SplittingScheme, parts, Y0: list[HSeries], N: int) -> list[HSeries]:
    parts = [to_field(p) for p in parts]
    if len(parts) != scheme.parts:
        raise ValueError(f"scheme expects {scheme.parts} parts, got {len(parts)}")
    Y = Y0
    for nu, c in scheme.stages:
        if not c:
            continue
        Y = compose_state(exact_flow_symbolic(parts[nu - 1], N, c), Y)
    return Y


def step_formal(method, f, y0: Sequence | None, N: int) -> list[HSeries]:
    """Exact h-expansion of one step of ``method`` from ``y0`` through h^N.

    ``f`` is a field, or a list of parts for a :class:`SplittingScheme`.
    ``y0=None`` means a symbolic start (coefficients polynomial in ``y0``).
    """
    if N < 1:
        raise ValueError("truncation order must be >= 1")
    if isinstance(method, SplittingScheme):
        parts = [to_field(p) for p in f]
        d = parts[0].dim
    else:
        f = to_field(f)
        d = f.dim
    if y0 is None:
        y0 = symbolic_point(d)
    if len(y0) != d:
        raise ValueError(f"start point has {len(y0)} entries, field dimension is {d}")
    Y0 = _as_state(y0, N)
    if isinstance(method, ButcherTableau):
        return _rk_formal(method, f, Y0, N)
    if isinstance(method, PartitionedMethod):
        return _prk_formal(method, f, Y0, N)
    if isinstance(method, SplittingScheme):
        return _splitting_formal(method, parts, Y0, N)
    if isinstance(method, ExactFlow):
        return flow_formal(f, Y0, N)
    raise TypeError(f"unsupported method {method!r}")


def total_field(method, f) -> PolyVectorField:
    if isinstance(method, SplittingScheme):
        parts = [to_field(p) for p in f]
        out = parts[0]
        for p in parts[1:]:
            out = out + p
        return out
    return to_field(f)


def modified_field_polynomials(method, f, N: int) -> list[PolyVectorField]:
    """``[f2, ..., fN]`` with ``Phi_{hf} = exp(h (f + h f2 + ... + h^(N-1) fN)) + O(h^(N+1))``."""
    base = total_field(method, f)
    state = step_formal(method, f, None, N)
    steps = [PolyVectorField.zero(base.dim)] + [coefficient_field(state, j) for j in range(1, N + 1)]
    if steps[1] != base:
        raise ValueError("inconsistent method: the h^1 term of the step is not f")
    if N == 1:
        return []
    return modified_field_terms(steps, N)


def splitting_modified_field(scheme: SplittingScheme, parts, N: int) -> list[PolyVectorField]:
    if not scheme.is_consistent():
        raise ValueError("inconsistent splitting: stage weights of some part do not sum to 1")
    return modified_field_polynomials(scheme, parts, N)


# ---------------------------------------------------------------- numeric mode


def _numeric_field(f) -> tuple[Callable, Callable]:
    if isinstance(f, PolyMap):
        f = to_field(f)
        jac = f.jacobian()

        def fun(y):
            yl = [float(v) for v in y]
            return np.array([float(p.evaluate(yl)) for p in f.components])

        def dfun(y):
            yl = [float(v) for v in y]
            return np.array([[float(p.evaluate(yl)) for p in row] for row in jac])

        return fun, dfun

    def fd_jac(y, eps=1e-7):
        y = np.asarray(y, dtype=float)
        f0 = np.asarray(f(y), dtype=float)
        J = np.empty((f0.size, y.size))
        for j in range(y.size):
            e = np.zeros_like(y)
            e[j] = eps * max(1.0, abs(y[j]))
            J[:, j] = (np.asarray(f(y + e), dtype=float) - f0) / e[j]
        return J

    return (lambda y: np.asarray(f(y), dtype=float)), fd_jac


def step_numeric(method, f, y, h: float, tol: float = 1e-12, max_iter: int = 50) -> np.ndarray:
    """One float step of a Runge-Kutta or partitioned Runge-Kutta method.

    Implicit stages: fixed-point iteration up to ``max_iter`` sweeps, then a
    Newton fallback with the exact (or finite-difference) Jacobian.
    """
    if h == 0:
        raise ValueError("step size must be nonzero")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    y = np.asarray(y, dtype=float)
    d = y.size
    if isinstance(method, ButcherTableau):
        A = [np.array([[float(x) for x in row] for row in method.A])] * d
        b = [np.array([float(x) for x in method.b])] * d
    elif isinstance(method, PartitionedMethod):
        if method.partition.dim != d:
            raise ValueError("partition does not match the state dimension")
        tabs = [method.tableaux[method.partition.block_of(k)] for k in range(d)]
        A = [np.array([[float(x) for x in row] for row in t.A]) for t in tabs]
        b = [np.array([float(x) for x in t.b]) for t in tabs]
    else:
        raise TypeError(f"numeric mode supports Runge-Kutta and partitioned RK methods, not {method!r}")
    fun, dfun = _numeric_field(f)
    s = b[0].size
    Acomp = np.stack(A)  # (d, s, s): component k uses Acomp[k]

    def stage_values(K):  # K: (s, d)
        return y[None, :] + h * np.einsum("kij,jk->ik", Acomp, K)

    def residual(K):
        Y = stage_values(K)
        return K - np.array([fun(Y[i]) for i in range(s)])

    K0 = np.tile(fun(y), (s, 1))
    K = K0.copy()
    explicit = all(not Acomp[k][i][j] for k in range(d) for i in range(s) for j in range(i, s))
    if explicit:
        for i in range(s):
            K[i] = fun(stage_values(K)[i])
    else:
        K = _solve_stages(K0, stage_values, residual, fun, dfun, Acomp, h, s, d, tol, max_iter)
    bcomp = np.stack(b)  # (d, s)
    return y + h * np.einsum("ks,sk->k", bcomp, K)


def _small(x: np.ndarray, tol: float) -> bool:
    return bool(np.all(np.isfinite(x))) and float(np.max(np.abs(x), initial=0.0)) <= tol


def _solve_stages(K0, stage_values, residual, fun, dfun, Acomp, h, s, d, tol, max_iter):
    """Fixed-point sweeps, then Newton from the last finite iterate."""
    K = K0
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            Y = stage_values(K)
            K_new = np.array([fun(Y[i]) for i in range(s)])
            if not np.all(np.isfinite(K_new)):
                break
            step = K_new - K
            K = K_new
            if _small(step, tol):
                return K
        log.debug("fixed point did not converge, switching to Newton")
        if not np.all(np.isfinite(K)):
            K = K0
        for _ in range(max_iter):
            R = residual(K)
            if not np.all(np.isfinite(R)):
                break
            if _small(R, tol):
                return K
            Y = stage_values(K)
            J = np.eye(s * d)
            for i in range(s):
                Ji = dfun(Y[i])
                for j in range(s):
                    # block dR_i/dK_j = delta_ij I - h f'(Y_i) diag(A[k][i][j])
                    J[i * d : (i + 1) * d, j * d : (j + 1) * d] -= h * Ji * Acomp[:, i, j][None, :]
            try:
                K = K - np.linalg.solve(J, R.reshape(-1)).reshape(s, d)
            except np.linalg.LinAlgError:
                break
    raise ConvergenceError("implicit stage solve did not converge", 2 * max_iter)


# ----------------------------------------------------------- diagram residuals


@dataclass
class DiagramResidual:
    """``(id, F) o Phi_f(y0) - Phi_g o (id, F)(y0)``, z-components only."""

    mode: str
    residual: list
    first_nonzero: int | None = None
    tol: float | None = None

    @property
    def is_zero(self) -> bool:
        if self.mode == "formal":
            return all(r.is_zero() for r in self.residual)
        return bool(self.magnitude() <= 10 * self.tol)

    def magnitude(self) -> float:
        if self.mode == "numeric":
            return float(max((abs(r) for r in self.residual), default=0.0))
        raise ValueError("magnitude is only defined in numeric mode")


def _first_nonzero(res: list[HSeries]) -> int | None:
    orders = [r.first_nonzero() for r in res]
    orders = [k for k in orders if k is not None]
    return min(orders) if orders else None


def _augmented_method(method, m: int):
    if not isinstance(method, PartitionedMethod):
        return method
    # blocks are contiguous, so the observable components join the trailing block
    sizes = [b - a for a, b in method.partition.blocks]
    sizes[-1] += m
    return PartitionedMethod(method.tableaux, PartitionSpec.from_sizes(sizes), method.name)


def fe_diagram_residual(
    method,
    f: PolyVectorField,
    F: PolyMap,
    y0: Sequence,
    N: int | None = None,
    h: float | None = None,
    mode: str = "formal",
    tol: float = 1e-12,
) -> DiagramResidual:
    """Residual of the functional-equivariance square for one step from ``y0``."""
    f = to_field(f)
    if F.dim_in != f.dim:
        raise ValueError("observable and field dimensions differ")
    g = augment(f, F)
    d = f.dim
    m_aug = _augmented_method(method, F.dim_out)
    if mode == "formal":
        if N is None:
            raise ValueError("formal mode needs the truncation order N")
        y0 = [Fraction(v) if isinstance(v, (int, str)) else v for v in y0]
        left_y = step_formal(method, f, y0, N)
        zero = HSeries.zero(N, _zero_coeff(left_y))
        left_z = F.evaluate(left_y, zero)
        z0 = F.evaluate(y0)
        right = step_formal(m_aug, g, list(y0) + z0, N)
        res = [a - b for a, b in zip(left_z, right[d:])]
        return DiagramResidual("formal", res, _first_nonzero(res))
    if mode == "numeric":
        if h is None:
            raise ValueError("numeric mode needs a step size h")
        yv = np.array([float(v) for v in y0])
        y1 = step_numeric(method, f, yv, h, tol)
        z1 = [float(p.evaluate(list(y1))) for p in F.components]
        z0 = [float(p.evaluate(list(yv))) for p in F.components]
        w1 = step_numeric(m_aug, g, np.concatenate([yv, z0]), h, tol)
        res = [a - b for a, b in zip(z1, w1[d:])]
        return DiagramResidual("numeric", res, None, tol)
    raise ValueError(f"mode must be 'formal' or 'numeric', got {mode!r}")


def fe_diagram_residual_additive(
    scheme: SplittingScheme, parts, F: PolyMap, y0: Sequence, N: int
) -> DiagramResidual:
    """Additive version: each part is augmented separately, ``g^[nu] = (f^[nu], F' f^[nu])``."""
    parts = [to_field(p) for p in parts]
    d = parts[0].dim
    if any(p.dim != d for p in parts):
        raise ValueError("parts must share a dimension")
    y0 = [Fraction(v) if isinstance(v, (int, str)) else v for v in y0]
    aug = [augment(p, F) for p in parts]
    left_y = step_formal(scheme, parts, y0, N)
    zero = HSeries.zero(N, _zero_coeff(left_y))
    left_z = F.evaluate(left_y, zero)
    right = step_formal(scheme, aug, list(y0) + F.evaluate(y0), N)
    res = [a - b for a, b in zip(left_z, right[d:])]
    return DiagramResidual("formal", res, _first_nonzero(res))


# ----------------------------------------------------------- structural checks


@dataclass
class ClosureReport:
    holds: bool
    defect: PolyVectorField

    def __iter__(self):
        return iter((self.holds, self.defect))


def check_closure_under_differentiation(phi: SeriesMap, f, N: int | None = None) -> ClosureReport:
    """Compare ``phi(delta f)`` with ``delta phi(f)`` as exact polynomial fields."""
    if N is not None:
        phi = phi.truncate(N)
    if phi.colors == 1:
        f = to_field(f)
        lhs = series_as_field(phi, tangent_lift(f))
        rhs = tangent_lift(series_as_field(phi, f))
    else:
        parts = [to_field(p) for p in f]
        lhs = series_as_field(phi, [tangent_lift(p) for p in parts])
        rhs = tangent_lift(series_as_field(phi, parts))
    defect = lhs - rhs
    return ClosureReport(defect.is_zero(), defect)


def check_chi_related_modified(method, f, g, chi: PolyMap, N: int) -> list[int]:
    """Orders j at which ``f_j ~_chi g_j`` fails (empty when all modified terms are related).

    For splitting schemes ``f`` and ``g`` are lists of parts related part by part.
    """
    if isinstance(method, SplittingScheme):
        pairs = list(zip(f, g))
        if len(pairs) != method.parts or not all(is_chi_related(a, b, chi) for a, b in pairs):
            raise ValueError("parts are not chi-related")
    elif not is_chi_related(to_field(f), to_field(g), chi):
        raise ValueError("f and g are not chi-related")
    fs = modified_field_polynomials(method, f, N)
    gs = modified_field_polynomials(method, g, N)
    return [j for j, (a, b) in enumerate(zip(fs, gs), start=2) if not is_chi_related(a, b, chi)]


def hamiltonian_field(H: Poly) -> PolyVectorField:
    """Canonical Hamiltonian field on ``(q, p)``: ``q' = dH/dp``, ``p' = -dH/dq``."""
    n = H.nvars
    if n % 2:
        raise ValueError("a canonical Hamiltonian needs an even number of variables")
    m = n // 2
    grad = H.gradient()
    return PolyVectorField(n, grad[m:] + [-g for g in grad[:m]])


def canonical_form(m: int) -> PolyMap:
    """``omega(xi, eta) = sum_i xi_qi eta_pi - xi_pi eta_qi`` on ``R^(2m) x R^(2m)``."""
    n = 2 * m
    xs = variables(2 * n)
    xi, eta = xs[:n], xs[n:]
    acc = Poly.zero(2 * n)
    for i in range(m):
        acc = acc + xi[i] * eta[m + i] - xi[m + i] * eta[i]
    return PolyMap(2 * n, [acc])


@dataclass
class OrderCheck:
    order: int
    holds: bool
    defect: PolyMap


@dataclass
class SymplecticReport:
    checks: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks)

    def failing_orders(self) -> list[int]:
        return [c.order for c in self.checks if not c.holds]


def check_symplectic_modified(method, H: Poly, N: int) -> SymplecticReport:
    """``L_{f_j} omega == 0`` for every term of the modified field of ``f = J grad H``."""
    f = hamiltonian_field(H)
    omega = canonical_form(H.nvars // 2)
    fs = [f] + modified_field_polynomials(method, f, N)
    report = SymplecticReport()
    for j, fj in enumerate(fs, start=1):
        defect = lie_derivative_form(fj, omega)
        report.checks.append(OrderCheck(j, defect.is_zero(), defect))
    return report


@dataclass
class RigidityReport:
    first_order: int | None
    defect: PolyMap | None
    N: int

    @property
    def exact_through_N(self) -> bool:
        return self.first_order is None


def check_exact_flow_rigidity(scheme: SplittingScheme, parts, A: PolyMap, N: int) -> RigidityReport:
    """First order j with ``A' f_j != 0`` for an affine invariant ``A`` of the summed field."""
    parts = [to_field(p) for p in parts]
    if not A.is_affine():
        raise ValueError("A must be affine")
    f = total_field(scheme, parts)
    if not directional(A, f).is_zero():
        raise ValueError("A is not an invariant of the summed field")
    fs = splitting_modified_field(scheme, parts, N)
    for j, fj in enumerate(fs, start=2):
        defect = directional(A, fj)
        if not defect.is_zero():
            return RigidityReport(j, defect, N)
    return RigidityReport(None, None, N)
