"""
Adaptive Gauss–Legendre quadrature engines.

Both engines keep a list of panels (1D) or cells (2D), estimate each one's error
as the difference of two Gauss–Legendre rules of different order, and split the
panels whose error exceeds their share of the global tolerance. All pending
panels are evaluated in one vectorized call, so integrands must accept arrays.
"""

import logging
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

from .errors import NumericError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point rule on [-1, 1]"""
    x, w = roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel_rules(func, lo: np.ndarray, hi: np.ndarray, n_hi: int, n_lo: int):
    """Evaluate both rules on every panel; returns values and errors with the panel axis first"""
    xh, wh = gauss_legendre(n_hi)
    xl, wl = gauss_legendre(n_lo)
    mid = 0.5 * (lo + hi)[:, None]
    half = 0.5 * (hi - lo)[:, None]
    nodes = np.concatenate([mid + half * xh, mid + half * xl], axis=1)
    n_pan = lo.size
    out = np.asarray(func(nodes.ravel()))
    out = out.reshape(out.shape[:-1] + (n_pan, n_hi + n_lo))
    q_hi = np.sum(out[..., :n_hi] * wh, axis=-1) * half[:, 0]
    q_lo = np.sum(out[..., n_hi:] * wl, axis=-1) * half[:, 0]
    q_hi = np.moveaxis(q_hi, -1, 0)
    err = np.abs(q_hi - np.moveaxis(q_lo, -1, 0))
    return q_hi, err


def integrate(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    breakpoints: Optional[Sequence[float]] = None,
    atol: float = 1e-13,
    rtol: float = 1e-10,
    order: int = 20,
    max_panels: int = 20000,
) -> Tuple[np.ndarray, np.ndarray]:
    """Integrate func over [a, b].

    func maps a 1-D array of nodes to an array whose last axis runs over the
    nodes; leading axes are independent integrands sharing the panel mesh.
    Returns (value, error_estimate) with the leading-axes shape.
    """
    if b < a:
        value, err = integrate(func, b, a, breakpoints, atol, rtol, order, max_panels)
        return -value, err
    edges = [a]
    for p in sorted(breakpoints or ()):
        if a < p < b and p > edges[-1]:
            edges.append(float(p))
    edges.append(b)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    n_lo = max(order // 2, 2)
    vals, errs = _panel_rules(func, lo, hi, order, n_lo)

    while True:
        total = vals.sum(axis=0)
        err_total = errs.sum(axis=0)
        tol = np.maximum(atol, rtol * np.abs(total))
        if np.all(err_total <= tol):
            return total, err_total
        if lo.size >= max_panels:
            raise NumericError(
                f"adaptive quadrature on [{a}, {b}] did not converge within {max_panels} panels",
                {"error": float(np.max(err_total)), "tolerance": float(np.min(tol)), "panels": int(lo.size)},
            )
        share = tol / lo.size
        over = errs > share
        flag = over.reshape(lo.size, -1).any(axis=1)
        if not flag.any():
            flag[np.argmax(errs.reshape(lo.size, -1).max(axis=1))] = True
        mid = 0.5 * (lo[flag] + hi[flag])
        new_lo = np.concatenate([lo[flag], mid])
        new_hi = np.concatenate([mid, hi[flag]])
        new_vals, new_errs = _panel_rules(func, new_lo, new_hi, order, n_lo)
        keep = ~flag
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])


def integrate_scalar(func, a: float, b: float, **kwargs) -> float:
    """Convenience wrapper returning only the value of a scalar integrand"""
    value, _ = integrate(func, a, b, **kwargs)
    return float(value)


def _cell_rules(func, x0, x1, y0, y1, n_hi: int, n_lo: int):
    def rule(n):
        t, w = gauss_legendre(n)
        cx = 0.5 * (x0 + x1)[:, None, None]
        hx = 0.5 * (x1 - x0)[:, None, None]
        cy = 0.5 * (y0 + y1)[:, None, None]
        hy = 0.5 * (y1 - y0)[:, None, None]
        X = cx + hx * t[None, :, None]
        Y = cy + hy * t[None, None, :]
        X, Y = np.broadcast_arrays(X, Y)
        vals = np.asarray(func(X.ravel(), Y.ravel())).reshape(X.shape)
        return np.einsum("cij,i,j->c", vals, w, w) * (hx * hy)[:, 0, 0]

    q_hi = rule(n_hi)
    q_lo = rule(n_lo)
    return q_hi, np.abs(q_hi - q_lo)


def integrate_2d(
    func: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x_edges: Sequence[float],
    y_edges: Sequence[float],
    atol: float = 1e-13,
    rtol: float = 1e-9,
    n_hi: int = 12,
    n_lo: int = 7,
    max_cells: int = 200000,
) -> Tuple[float, float]:
    """Integrate a real scalar func(x, y) over the tensor grid of initial cells.

    Cells split into four when their error exceeds their share of the
    global tolerance. Returns (value, error_estimate).
    """
    xe = np.asarray(x_edges, dtype=float)
    ye = np.asarray(y_edges, dtype=float)
    X0, Y0 = np.meshgrid(xe[:-1], ye[:-1], indexing="ij")
    X1, Y1 = np.meshgrid(xe[1:], ye[1:], indexing="ij")
    x0, x1, y0, y1 = X0.ravel(), X1.ravel(), Y0.ravel(), Y1.ravel()
    vals, errs = _cell_rules(func, x0, x1, y0, y1, n_hi, n_lo)
    rounds = 0

    while True:
        total = float(vals.sum())
        err_total = float(errs.sum())
        tol = max(atol, rtol * abs(total))
        if err_total <= tol:
            logger.debug(f"2D quadrature converged: {x0.size} cells, {rounds} refinement rounds")
            return total, err_total
        if x0.size >= max_cells:
            raise NumericError(
                "2D adaptive quadrature did not converge",
                {"error": err_total, "tolerance": tol, "cells": int(x0.size)},
            )
        flag = errs > tol / x0.size
        if not flag.any():
            flag[np.argmax(errs)] = True
        xm = 0.5 * (x0[flag] + x1[flag])
        ym = 0.5 * (y0[flag] + y1[flag])
        nx0 = np.concatenate([x0[flag], xm, x0[flag], xm])
        nx1 = np.concatenate([xm, x1[flag], xm, x1[flag]])
        ny0 = np.concatenate([y0[flag], y0[flag], ym, ym])
        ny1 = np.concatenate([ym, ym, y1[flag], y1[flag]])
        new_vals, new_errs = _cell_rules(func, nx0, nx1, ny0, ny1, n_hi, n_lo)
        keep = ~flag
        x0 = np.concatenate([x0[keep], nx0])
        x1 = np.concatenate([x1[keep], nx1])
        y0 = np.concatenate([y0[keep], ny0])
        y1 = np.concatenate([y1[keep], ny1])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])
        rounds += 1


def periodic_trapezoid(func: Callable[[np.ndarray], np.ndarray], n: int) -> np.ndarray:
    """Mean of a 2π-periodic func over n equispaced angles (last axis)"""
    theta = 2.0 * np.pi * np.arange(n) / n
    return np.mean(func(theta), axis=-1)
