"""Batched damped Newton (Levenberg-Marquardt) for many small square systems at once."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

CONVERGED, DIVERGED, STALLED, MAXITER = 1, 2, 3, 4


@dataclass
class BatchResult:
    u: np.ndarray
    residual: np.ndarray     # final residual norms
    status: np.ndarray       # one of the codes above
    iterations: np.ndarray


def levenberg_marquardt(fun: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]],
                        u0: np.ndarray, max_iter: int = 100, ftol: float = 1e-14,
                        free: np.ndarray | None = None, bound: float = 1e3,
                        stall_window: int = 10) -> BatchResult:
    """Drive ``|r(u)|`` to zero row by row.

    ``fun(U, rows)`` returns residuals ``(n, m)`` and Jacobians ``(n, m, k)`` for the
    rows ``rows`` of the batch.  ``free`` restricts the update to a subset of the
    unknowns (the others stay pinned).  Rows leave the active set when converged,
    diverged beyond ``bound`` or when the damping blows up.
    """
    u = np.array(u0, dtype=float, copy=True)
    n, k = u.shape
    cols = np.arange(k) if free is None else np.asarray(free)
    status = np.zeros(n, dtype=np.int8)
    iters = np.zeros(n, dtype=np.int32)
    res = np.full(n, np.inf)

    active = np.arange(n)
    R, J = fun(u[active], active)
    J = J[:, :, cols]
    nr = np.sqrt(np.einsum("ij,ij->i", R, R))
    res[active] = nr
    lam = np.full(active.size, 1e-3)
    ref = nr.copy()
    eye = np.eye(len(cols))

    for it in range(max_iter):
        done = nr < ftol
        if done.any():
            status[active[done]] = CONVERGED
            keep = ~done
            active, R, J, nr, lam, ref = (active[keep], R[keep], J[keep], nr[keep], lam[keep],
                                          ref[keep])
        if active.size == 0:
            break
        Jt = J.transpose(0, 2, 1)
        H = Jt @ J
        g = (Jt @ R[:, :, None])[:, :, 0]
        diag = np.einsum("nii->ni", H)
        damp = diag + 1e-9 * diag.mean(axis=1, keepdims=True) + 1e-30
        A = H + lam[:, None, None] * eye * damp[:, None, :]
        try:
            step = -np.linalg.solve(A, g[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = -np.stack([np.linalg.lstsq(a, b, rcond=None)[0] for a, b in zip(A, g)])
        cand = u[active].copy()
        cand[:, cols] += step
        Rn, Jn = fun(cand, active)
        Jn = Jn[:, :, cols]
        nn = np.sqrt(np.einsum("ij,ij->i", Rn, Rn))
        ok = np.isfinite(nn) & (nn < nr)
        iters[active] += 1
        # accepted rows move and relax the damping, rejected rows stiffen it
        acc = active[ok]
        u[acc] = cand[ok]
        R[ok], J[ok], nr[ok] = Rn[ok], Jn[ok], nn[ok]
        lam = np.where(ok, np.maximum(lam / 5.0, 1e-12), lam * 4.0)
        res[active] = nr
        far = np.abs(u[active]).max(axis=1) > bound
        stuck = lam > 1e10
        if (it + 1) % stall_window == 0:
            # sublinear progress means a creeping approach to a degenerate limit
            stuck |= nr > 0.5 * ref
            ref = nr.copy()
        drop = far | stuck
        if drop.any():
            status[active[far]] = DIVERGED
            status[active[stuck & ~far]] = STALLED
            keep = ~drop
            active, R, J, nr, lam, ref = (active[keep], R[keep], J[keep], nr[keep], lam[keep],
                                          ref[keep])
    status[active] = np.where(nr < ftol, CONVERGED, MAXITER)
    res[active] = nr
    return BatchResult(u, res, status, iters)
