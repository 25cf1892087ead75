"""A small bounded Levenberg-Marquardt solver for weighted residual vectors."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class LMError(RuntimeError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


@dataclass
class LMResult:
    x: np.ndarray
    cost: float
    cov: np.ndarray | None
    jac: np.ndarray
    converged: bool
    n_iter: int
    history: list[float] = field(default_factory=list)
    message: str = ""


def numeric_jacobian(fun, x, lower=None, upper=None, rel_step=6e-6):
    """Central-difference Jacobian, one-sided next to a bound."""
    x = np.asarray(x, dtype=float)
    f0 = fun(x)
    jac = np.empty((f0.size, x.size))
    for i in range(x.size):
        h = rel_step * max(abs(x[i]), 1.0)
        up_ok = upper is None or x[i] + h <= upper[i]
        lo_ok = lower is None or x[i] - h >= lower[i]
        xp, xm = x.copy(), x.copy()
        if up_ok and lo_ok:
            xp[i] += h
            xm[i] -= h
            jac[:, i] = (fun(xp) - fun(xm)) / (2 * h)
        elif up_ok:
            xp[i] += h
            jac[:, i] = (fun(xp) - f0) / h
        else:
            xm[i] -= h
            jac[:, i] = (f0 - fun(xm)) / h
    return jac


def levenberg_marquardt(fun, x0, lower=None, upper=None, jac=None, max_iter=200,
                        ftol=1e-12, xtol=1e-10, gtol=1e-10, lam0=1e-3):
    """Minimise ``sum(fun(x)**2)`` subject to box bounds.

    Trial points are projected onto the box; a step is accepted only if it
    lowers the cost, so the recorded ``history`` is non-increasing.
    ``jac`` defaults to central differences. The covariance is the inverse
    of ``J^T J`` at the optimum; a singular normal matrix raises
    :class:`LMError`.
    """
    x = np.array(x0, dtype=float)
    n = x.size
    lower = None if lower is None else np.broadcast_to(np.asarray(lower, dtype=float), (n,))
    upper = None if upper is None else np.broadcast_to(np.asarray(upper, dtype=float), (n,))

    def project(v):
        if lower is not None:
            v = np.maximum(v, lower)
        if upper is not None:
            v = np.minimum(v, upper)
        return v

    def jacobian(v):
        return jac(v) if jac is not None else numeric_jacobian(fun, v, lower, upper)

    x = project(x)
    r = fun(x)
    if not np.all(np.isfinite(r)):
        raise LMError("residuals are not finite at the initial point")
    cost = float(r @ r)
    history = [cost]
    lam = lam0
    converged = False
    message = "maximum iterations reached"
    it = 0
    for it in range(1, max_iter + 1):
        J = jacobian(x)
        g = J.T @ r
        A = J.T @ J
        if np.max(np.abs(g)) <= gtol:
            converged, message = True, "gradient below tolerance"
            break
        diag = np.diag(A).copy()
        diag[diag <= 0] = 1.0
        accepted = False
        for _ in range(40):
            try:
                step = np.linalg.solve(A + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            x_new = project(x + step)
            r_new = fun(x_new)
            cost_new = float(r_new @ r_new) if np.all(np.isfinite(r_new)) else np.inf
            if cost_new < cost:
                accepted = True
                break
            lam *= 10
        if not accepted:
            converged, message = True, "no further decrease possible"
            break
        dx = x_new - x
        rel_drop = (cost - cost_new) / max(cost, 1e-300)
        x, r, cost = x_new, r_new, cost_new
        history.append(cost)
        lam = max(lam / 10, 1e-12)
        if rel_drop < ftol or np.all(np.abs(dx) <= xtol * (np.abs(x) + xtol)):
            converged, message = True, "converged"
            break

    J = jacobian(x)
    A = J.T @ J
    best = LMResult(x, cost, None, J, converged, it, history, message)
    if not converged:
        raise LMError(f"no convergence after {max_iter} iterations", best=best)
    try:
        cond = np.linalg.cond(A)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond > 1e14:
        raise LMError("singular normal matrix: parameters are not identifiable from the data", best=best)
    best.cov = np.linalg.inv(A)
    best.cov = 0.5 * (best.cov + best.cov.T)
    return best
