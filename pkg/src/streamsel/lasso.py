"""L1-penalized least squares by cyclic coordinate descent.

Minimizes (1/2)||y - Z b||^2 + lam * ||b||_1 with soft-threshold coordinate
updates, optional column centering and unit-norm scaling (coefficients are
reported on the original column scale), and a KKT residual as the
convergence certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput


@dataclass(frozen=True)
class LassoConfig:
    lam: float = 0.1
    tol: float = 1e-7
    max_sweeps: int = 10000
    center: bool = True
    standardize: bool = True

    def __post_init__(self):
        if self.lam < 0:
            raise InvalidInput("lam must be nonnegative")
        if not self.tol > 0:
            raise InvalidInput("tol must be positive")
        if self.max_sweeps < 1:
            raise InvalidInput("max_sweeps must be at least 1")


@dataclass
class LassoModel:
    """Fit result.  `beta` is on the original column scale; `kkt_residual`
    is the maximum violation of the subgradient optimality conditions in the
    solver's working (centered/scaled) space."""

    beta: np.ndarray
    sweeps_used: int
    converged: bool
    kkt_residual: float
    objective_history: list[float] | None = None


def soft_threshold(z: float, t: float) -> float:
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def _prepare(design, target, cfg: LassoConfig):
    Z = np.array(design, dtype=float, order="F")
    y = np.asarray(target, dtype=float).copy()
    if Z.ndim != 2:
        raise InvalidInput("design must be a 2-D matrix")
    n, p = Z.shape
    if n < 1 or p < 1:
        raise InvalidInput("design must have at least one row and one column")
    if y.shape != (n,):
        raise InvalidInput(f"target length {y.shape} does not match n={n}")
    if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(y))):
        raise InvalidInput("non-finite values in design or target")
    if cfg.center:
        Z -= Z.mean(axis=0)
        y -= y.mean()
    norms = np.sqrt((Z**2).sum(axis=0))
    if cfg.standardize:
        nonzero = norms > 0
        Z[:, nonzero] /= norms[nonzero]
    return Z, y, norms


def _kkt_residual(Z: np.ndarray, y: np.ndarray, beta: np.ndarray, lam: float) -> float:
    grad = Z.T @ (Z @ beta - y)
    zero = beta == 0.0
    viol_zero = np.maximum(np.abs(grad[zero]) - lam, 0.0)
    viol_active = np.abs(grad[~zero] + np.sign(beta[~zero]) * lam)
    worst = 0.0
    if viol_zero.size:
        worst = max(worst, float(viol_zero.max()))
    if viol_active.size:
        worst = max(worst, float(viol_active.max()))
    return worst


def _objective(Z, y, beta, lam) -> float:
    r = y - Z @ beta
    return 0.5 * float(r @ r) + lam * float(np.abs(beta).sum())


def lasso_fit(design, target, cfg: LassoConfig, collect_objective: bool = False) -> LassoModel:
    """Fit the penalized model; returns coefficients on the input scale.

    Columns that are identically zero after centering (constant columns)
    keep a zero coefficient.  The fit is declared converged only when a full
    sweep moves no coefficient by more than tol AND the KKT residual is
    within 10 * tol * max(1, ||Z^T y||_inf); otherwise the model comes back
    with converged=False after max_sweeps.
    """
    Z, y, norms = _prepare(design, target, cfg)
    n, p = Z.shape
    lam = cfg.lam
    sq_norms = (Z**2).sum(axis=0)
    active_mask = sq_norms > 0

    beta = np.zeros(p)
    resid = y.copy()
    kkt_gate = 10.0 * cfg.tol * max(1.0, float(np.abs(Z.T @ y).max()))
    history: list[float] | None = [] if collect_objective else None

    def sweep(indices) -> float:
        max_change = 0.0
        for j in indices:
            old = beta[j]
            col = Z[:, j]
            if old != 0.0:
                resid += col * old
            zj = float(col @ resid)
            new = soft_threshold(zj, lam) / sq_norms[j]
            if new != 0.0:
                resid -= col * new
            beta[j] = new
            change = abs(new - old)
            if change > max_change:
                max_change = change
        return max_change

    all_idx = np.flatnonzero(active_mask)
    sweeps_used = 0
    converged = False
    kkt = float("inf")
    while sweeps_used < cfg.max_sweeps:
        max_change = sweep(all_idx)
        sweeps_used += 1
        if history is not None:
            history.append(_objective(Z, y, beta, lam))
        if max_change <= cfg.tol:
            kkt = _kkt_residual(Z, y, beta, lam)
            if kkt <= kkt_gate:
                converged = True
                break
            continue
        # Iterate the current support until it stabilizes, then re-check all.
        support = np.flatnonzero(beta != 0.0)
        while support.size and sweeps_used < cfg.max_sweeps:
            inner_change = sweep(support)
            sweeps_used += 1
            if history is not None:
                history.append(_objective(Z, y, beta, lam))
            if inner_change <= cfg.tol:
                break
    if not converged:
        kkt = _kkt_residual(Z, y, beta, lam)

    beta_out = beta.copy()
    if cfg.standardize:
        nz = norms > 0
        beta_out[nz] /= norms[nz]
    return LassoModel(
        beta=beta_out,
        sweeps_used=sweeps_used,
        converged=converged,
        kkt_residual=kkt,
        objective_history=history,
    )


def lambda_max(design, target, cfg: LassoConfig) -> float:
    """Smallest penalty for which the fitted coefficients are all zero,
    under the config's centering/scaling."""
    Z, y, _ = _prepare(design, target, cfg)
    corr = np.abs(Z.T @ y)
    return float(corr.max()) if corr.size else 0.0


def support(model: LassoModel, zero_tol: float = 1e-10) -> list[int]:
    """Indices of coefficients larger than zero_tol in magnitude, ascending."""
    return np.flatnonzero(np.abs(model.beta) > zero_tol).tolist()
