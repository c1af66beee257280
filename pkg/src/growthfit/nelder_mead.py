"""Nelder-Mead downhill simplex minimizer."""

from dataclasses import dataclass, field

import numpy as np

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    converged: bool
    n_iter: int
    n_fev: int
    best_history: list = field(default_factory=list, repr=False)


def initial_simplex(x0, scale=0.05, floor=0.1):
    """Axis-aligned simplex with edge ``scale * max(|x0_i|, floor)`` along each axis."""
    x0 = np.asarray(x0, dtype=float)
    steps = scale * np.maximum(np.abs(x0), floor)
    return np.vstack([x0, x0 + np.diag(steps)])


def nelder_mead(objective, x0, f_tol=1e-10, x_tol=1e-8, max_iters=5000, simplex=None, track=False):
    """Minimize ``objective`` starting from ``x0``.

    Converges when the spread of objective values across the simplex is below
    ``f_tol`` and every vertex is within ``x_tol`` of the best one (max-norm).
    Non-finite objective values are treated as ``+inf``.

    Returns
    -------
    SimplexResult
        ``converged`` is False when ``max_iters`` was exhausted.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    n = x0.size
    n_fev = 0

    def f(x):
        nonlocal n_fev
        n_fev += 1
        value = objective(x)
        return float(value) if np.isfinite(value) else np.inf

    sim = initial_simplex(x0) if simplex is None else np.array(simplex, dtype=float)
    fsim = np.array([f(v) for v in sim])
    if not np.isfinite(fsim[0]):
        raise ValueError("objective is not finite at the starting point")
    history = []
    converged = False
    it = 0
    while it < max_iters:
        order = np.argsort(fsim, kind="stable")
        sim, fsim = sim[order], fsim[order]
        if track:
            history.append(fsim[0])
        if (np.max(np.abs(fsim[1:] - fsim[0])) <= f_tol
                and np.max(np.abs(sim[1:] - sim[0])) <= x_tol):
            converged = True
            break
        it += 1
        centroid = sim[:-1].mean(axis=0)
        worst = sim[-1]
        xr = centroid + REFLECT * (centroid - worst)
        fr = f(xr)
        if fr < fsim[0]:
            xe = centroid + EXPAND * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                sim[-1], fsim[-1] = xe, fe
            else:
                sim[-1], fsim[-1] = xr, fr
            continue
        if fr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fr
            continue
        if fr < fsim[-1]:
            xc = centroid + CONTRACT * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                sim[-1], fsim[-1] = xc, fc
                continue
        else:
            xc = centroid + CONTRACT * (worst - centroid)
            fc = f(xc)
            if fc < fsim[-1]:
                sim[-1], fsim[-1] = xc, fc
                continue
        best = sim[0]
        for i in range(1, n + 1):
            sim[i] = best + SHRINK * (sim[i] - best)
            fsim[i] = f(sim[i])
    else:
        order = np.argsort(fsim, kind="stable")
        sim, fsim = sim[order], fsim[order]
        if track:
            history.append(fsim[0])
    return SimplexResult(sim[0].copy(), float(fsim[0]), converged, it, n_fev, history)
