"""Independent oracles for the test suite.

Everything here works from the defining relations only: the weight is
evaluated by peeling IFS digits, moments come from midpoint quadrature on
the subdivision cells, and matrix counts come from dense LAPACK factor-
izations.  No closed-form shortcut from the package is reused.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg


def _sup_bound(params) -> float:
    """Bound for sup|P| via sup|P| <= max|beta| + max|d| sup|P|."""
    dmax = max(abs(dk) for dk in params.d)
    if dmax >= 1.0:
        raise ValueError("digit peeling needs max|d| < 1")
    bmax = max(abs(bk) for bk in params.beta)
    return bmax / (1.0 - dmax)


def weight_values(params, x, depth: int = 40) -> np.ndarray:
    """P(x) by digit peeling, right-continuous at subdivision nodes.

    After `depth` digits the remainder is dropped; the error is below
    (max|d|)^depth * sup|P|.
    """
    sup = _sup_bound(params)
    a = np.asarray(params.a)
    d = np.asarray(params.d)
    beta = np.asarray(params.beta)
    alpha = params.alpha
    n = params.n_pieces

    x = np.array(x, dtype=float, copy=True)
    acc_beta = np.zeros_like(x)
    acc_d = np.ones_like(x)
    for _ in range(depth):
        k = np.minimum(np.searchsorted(alpha, x, side="right") - 1, n - 1)
        acc_beta += acc_d * beta[k]
        acc_d *= d[k]
        x = np.clip((x - alpha[k]) / a[k], 0.0, 1.0)
    assert np.max(np.abs(acc_d)) * sup < 1e-10
    return acc_beta


def subdivision(params, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """(lefts, widths) of the depth-m cells, rebuilt from the definition."""
    a = np.asarray(params.a)
    alpha_left = params.alpha[:-1]
    lefts = np.zeros(1)
    widths = np.ones(1)
    for _ in range(depth):
        m = lefts.shape[0]
        lefts = np.repeat(lefts, a.size) + np.repeat(widths, a.size) * np.tile(alpha_left, m)
        widths = np.repeat(widths, a.size) * np.tile(a, m)
    return lefts, widths


def midpoint_moments(params, depth: int, lo: float = 0.0, hi: float = 1.0):
    """(int P, int x P) over [lo, hi] by cell-midpoint quadrature.

    [lo, hi] must be a union of depth-m cells.  On each cell the quadrature
    error is width * d_w * (P(1/2) - M0), so the total contracts like
    (sum a_k d_k)^m.
    """
    lefts, widths = subdivision(params, depth)
    mask = (lefts >= lo - 1e-12) & (lefts + widths <= hi + 1e-12)
    lefts, widths = lefts[mask], widths[mask]
    mids = lefts + 0.5 * widths
    vals = weight_values(params, mids)
    i0 = math.fsum(widths * vals)
    i1 = math.fsum(widths * mids * vals)
    return i0, i1


def iterate_on_grid(params, n_grid: int, iters: int):
    """Fixed-point iteration of the IFS operator from the zero function.

    Returns (grid, values, sup_diffs).  Off-grid pullbacks use linear
    interpolation; grids aligned with the subdivision (equal a_k, n_grid-1
    a power of N) make every pullback exact.
    """
    a = np.asarray(params.a)
    d = np.asarray(params.d)
    beta = np.asarray(params.beta)
    alpha = params.alpha
    n = params.n_pieces

    grid = np.linspace(0.0, 1.0, n_grid)
    k = np.minimum(np.searchsorted(alpha, grid, side="right") - 1, n - 1)
    t = np.clip((grid - alpha[k]) / a[k], 0.0, 1.0)

    vals = np.zeros(n_grid)
    diffs = []
    for _ in range(iters):
        new = beta[k] + d[k] * np.interp(t, grid, vals)
        diffs.append(float(np.max(np.abs(new - vals))))
        vals = new
    return grid, vals, diffs


def dense_matrices(pencil) -> tuple[np.ndarray, np.ndarray]:
    a = np.diag(pencil.adiag) + np.diag(pencil.aoff, 1) + np.diag(pencil.aoff, -1)
    b = np.diag(pencil.bdiag) + np.diag(pencil.boff, 1) + np.diag(pencil.boff, -1)
    return a, b


def dense_negative_count(pencil, lam: float) -> int:
    """Negative eigenvalues of A + lam B via a dense symmetric solve."""
    a, b = dense_matrices(pencil)
    w = np.linalg.eigvalsh(a + lam * b)
    return int(np.sum(w < 0.0))


def dense_pencil_eigenvalues(pencil, side: str, count: int) -> np.ndarray:
    """Pencil eigenvalues by the dense QZ solver on A v = lam (-B) v."""
    a, b = dense_matrices(pencil)
    w = scipy.linalg.eig(a, -b, right=False)
    real = w.real[np.abs(w.imag) <= 1e-8 * (1.0 + np.abs(w.real))]
    real = real[np.isfinite(real)]
    if side in ("+", "pos", "positive"):
        ray = real[real > 0.0]
    else:
        ray = real[real < 0.0]
    ray = ray[np.argsort(np.abs(ray))]
    return ray[:count]


def random_parity_coefficients(rng: np.random.Generator, n_max: int = 6):
    """Random degenerate-parity integer-lag weights (u even lags, v odd).

    v_1 is always active, which settles both sum(v) > 0 and the gcd
    condition; every active weight stays >= 0.05 so the renewal mixing is
    uniformly geometric.
    """
    n = int(rng.integers(2, n_max + 1))
    u = np.zeros(n)
    v = np.zeros(n)
    v[0] = 1.0
    for lag in range(2, n + 1):
        if rng.random() < 0.6:
            continue
        if lag % 2 == 0:
            u[lag - 1] = 0.05 + rng.random()
        else:
            v[lag - 1] = 0.05 + rng.random()
    total = u.sum() + v.sum()
    u /= total
    v /= total
    if min(x for x in np.concatenate((u, v)) if x > 0.0) < 0.05:
        return random_parity_coefficients(rng, n_max)
    return tuple(u), tuple(v)
