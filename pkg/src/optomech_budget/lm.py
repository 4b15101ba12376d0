"""Bounded Levenberg-Marquardt for small dense least-squares problems.

Damping follows the classic multiplicative schedule: start at ``lam0``,
divide by 10 after an accepted step, multiply by 10 after a rejected
one. Bounds are enforced by projecting each trial point onto the box.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

_DIAG_FLOOR = 1e-300
_LAM_MAX = 1e20


@dataclass
class LMResult:
    params: np.ndarray
    residual: np.ndarray
    jacobian: np.ndarray
    cost: float
    iterations: int
    converged: bool
    message: str
    # cost after every accepted step, starting with the initial point
    cost_history: List[float] = field(default_factory=list)

    @property
    def rms(self) -> float:
        return float(np.sqrt(self.cost / self.residual.size))

    def covariance(self) -> np.ndarray:
        """Parameter covariance scaled by the reduced chi-square of the residuals."""
        n, p = self.jacobian.shape
        dof = max(n - p, 1)
        s2 = self.cost / dof
        try:
            inv = np.linalg.inv(self.jacobian.T @ self.jacobian)
        except np.linalg.LinAlgError:
            return np.full((p, p), np.inf)
        return inv * s2


def levenberg_marquardt(
    residual_fn: Callable[[np.ndarray], np.ndarray],
    jacobian_fn: Callable[[np.ndarray], np.ndarray],
    p0,
    lower,
    upper,
    max_iter: int = 200,
    lam0: float = 1e-3,
    ftol: float = 1e-9,
    xtol: float = 1e-10,
) -> LMResult:
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    p = np.clip(np.asarray(p0, dtype=float), lower, upper)
    r = residual_fn(p)
    cost = float(r @ r)
    history = [cost]
    lam = lam0
    J = jacobian_fn(p)
    converged = False
    message = "maximum number of iterations reached"
    it = 0
    while it < max_iter:
        it += 1
        if cost == 0.0:
            converged, message = True, "exact fit"
            break
        A = J.T @ J
        grad = J.T @ r
        damp = np.maximum(np.diag(A), _DIAG_FLOOR)
        try:
            step = np.linalg.solve(A + lam * np.diag(damp), -grad)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        trial = np.clip(p + step, lower, upper)
        if np.linalg.norm(trial - p) < xtol:
            converged, message = True, "step norm below tolerance"
            break
        r_trial = residual_fn(trial)
        cost_trial = float(r_trial @ r_trial)
        if np.isfinite(cost_trial) and cost_trial < cost:
            rel = (cost - cost_trial) / cost
            p, r, cost = trial, r_trial, cost_trial
            history.append(cost)
            J = jacobian_fn(p)
            lam = max(lam / 10.0, 1e-12)
            if rel < ftol:
                converged, message = True, "relative cost change below tolerance"
                break
        else:
            lam *= 10.0
            if lam > _LAM_MAX:
                message = "damping diverged without an acceptable step"
                break
    return LMResult(params=p, residual=r, jacobian=J, cost=cost, iterations=it,
                    converged=converged, message=message, cost_history=history)
