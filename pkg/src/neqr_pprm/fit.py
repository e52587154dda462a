"""Exponential regression models fitted by Levenberg-Marquardt.

Two families describe how cost reductions scale with the control count m:

* growth: ``f(m) = b**m + c``
* decay:  ``f(m) = s * b**(-(c*m - d)) + e`` with sign ``s`` in {+1, -1}

The decay family is over-parameterised (only ``c*ln b`` and ``d*ln b`` are
identifiable); the damping keeps the normal equations solvable anyway.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

MAX_ITERATIONS = 200
REL_TOL = 1e-10
LAMBDA0 = 1e-3
LAMBDA_MAX = 1e12
# Residual counts as orthogonal to every Jacobian column below this cosine.
GRADIENT_COS_TOL = 1e-8
# Per-point residual treated as exact, relative to the data scale.
EXACT_RESIDUAL = 1e-13


class FitError(ValueError):
    pass


class InvalidParams(FitError):
    pass


class InsufficientPoints(FitError):
    pass


class NonFiniteInput(FitError):
    pass


class SingularNormalEquations(FitError):
    pass


class Family(enum.Enum):
    GROWTH = "growth"
    DECAY = "decay"

    @property
    def n_params(self) -> int:
        return 2 if self is Family.GROWTH else 4


@dataclass(frozen=True)
class FitModel:
    family: Family
    params: tuple[float, ...]
    sign: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        check_params(self.family, self.params)
        if self.sign not in (1.0, -1.0):
            raise InvalidParams(f"sign must be +1 or -1, got {self.sign}")


def check_params(family: Family, params) -> None:
    if len(params) != family.n_params:
        raise InvalidParams(f"{family.value} takes {family.n_params} parameters, got {len(params)}")
    if not all(math.isfinite(p) for p in params):
        raise InvalidParams(f"non-finite parameter in {params}")
    b = params[0]
    if family is Family.GROWTH and b < 1:
        raise InvalidParams(f"growth base must be >= 1, got {b}")
    if family is Family.DECAY and (b <= 1 or params[1] <= 0):
        raise InvalidParams(f"decay needs base > 1 and rate > 0, got {params[:2]}")


def _feasible(family: Family, params) -> bool:
    # Strict bounds for steps; b == 1 is only reachable as a user-given model.
    if family is Family.GROWTH:
        return params[0] > 1
    return params[0] > 1 and params[1] > 0


def _evaluate(family: Family, params, sign: float, m):
    m = np.asarray(m, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        if family is Family.GROWTH:
            b, c = params
            return np.power(b, m) + c
        b, c, d, e = params
        return sign * np.exp(-(c * m - d) * math.log(b)) + e


def model_eval(model: FitModel, m):
    """Evaluate ``model`` at ``m`` (scalar or array)."""
    out = _evaluate(model.family, model.params, model.sign, m)
    return float(out) if np.ndim(out) == 0 else out


def default_initial(family: Family, ys) -> tuple[float, ...]:
    if family is Family.GROWTH:
        return (1.5, 0.0)
    return (1.5, 0.5, 0.0, float(ys[-1]))


@dataclass(frozen=True)
class FitResult:
    model: FitModel
    residual_sum_squares: float
    iterations: int
    converged: bool
    history: tuple[float, ...] = field(default=(), repr=False)

    def to_json(self) -> str:
        return json.dumps(
            {
                "family": self.model.family.value,
                "sign": int(self.model.sign),
                "params": list(self.model.params),
                "rss": self.residual_sum_squares,
                "iterations": self.iterations,
                "converged": self.converged,
            }
        )


def _jacobian(family, params, sign, ms):
    """Central differences with step 1e-6 * max(|p|, 1)."""
    cols = []
    for i, p in enumerate(params):
        h = 1e-6 * max(abs(p), 1.0)
        up = list(params)
        dn = list(params)
        up[i] = p + h
        dn[i] = p - h
        cols.append((_evaluate(family, up, sign, ms) - _evaluate(family, dn, sign, ms)) / (2 * h))
    return np.stack(cols, axis=1)


def fit(points, family: Family, initial_params=None, sign: float = 1.0) -> FitResult:
    """Least-squares fit of ``family`` to ``(m, y)`` points.

    Damping starts at 1e-3 and moves by a factor of 10 on each rejected
    (x10) or accepted (/10) step. Stops once an accepted step lowers the
    cost by less than 1e-10 relative, the residual is orthogonal to the
    Jacobian, or after 200 iterations.
    """
    pts = sorted((float(m), float(y)) for m, y in points)
    if len(pts) < family.n_params + 1:
        raise InsufficientPoints(
            f"{family.value} needs at least {family.n_params + 1} points, got {len(pts)}"
        )
    ms = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if not (np.all(np.isfinite(ms)) and np.all(np.isfinite(ys))):
        raise NonFiniteInput("points must be finite")
    params = np.array(
        initial_params if initial_params is not None else default_initial(family, ys), dtype=float
    )
    check_params(family, params)

    def cost_of(p):
        r = ys - _evaluate(family, p, sign, ms)
        c = float(r @ r)
        return (c if math.isfinite(c) else math.inf), r

    cost, resid = cost_of(params)
    if not math.isfinite(cost):
        raise NonFiniteInput(f"model overflows at the initial parameters {tuple(params)}")
    floor = len(ys) * (EXACT_RESIDUAL * max(1.0, float(np.max(np.abs(ys))))) ** 2
    lam = LAMBDA0
    history = [cost]
    converged = False
    accepted_any = False
    iterations = 0

    while iterations < MAX_ITERATIONS:
        if cost <= floor:
            converged = True
            break
        jac = _jacobian(family, params, sign, ms)
        grad = jac.T @ resid
        col_norms = np.linalg.norm(jac, axis=0)
        scale = col_norms * math.sqrt(cost)
        if np.all(np.abs(grad) <= GRADIENT_COS_TOL * np.where(scale > 0, scale, 1.0)):
            converged = True
            break
        iterations += 1
        jtj = jac.T @ jac
        diag = np.diag(jtj).copy()
        diag[diag <= 0] = 1.0
        stalled = False
        while True:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), grad)
            except np.linalg.LinAlgError:
                step = None
            if step is not None and np.all(np.isfinite(step)):
                trial = params + step
                if _feasible(family, trial):
                    new_cost, new_resid = cost_of(trial)
                    if new_cost < cost:
                        break
            lam *= 10
            if lam > LAMBDA_MAX:
                stalled = True
                break
        if stalled:
            if not accepted_any:
                raise SingularNormalEquations(
                    f"damping exceeded {LAMBDA_MAX:g} without an accepted step"
                )
            # No representable improvement left around the accepted minimum.
            converged = True
            break
        accepted_any = True
        rel_drop = (cost - new_cost) / cost
        assert new_cost <= cost
        params, cost, resid = trial, new_cost, new_resid
        history.append(cost)
        lam = max(lam / 10, 1e-15)
        if rel_drop < REL_TOL:
            converged = True
            break

    return FitResult(
        FitModel(family, tuple(params), sign), cost, iterations, converged, tuple(history)
    )
