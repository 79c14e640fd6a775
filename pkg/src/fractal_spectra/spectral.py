"""Generalized eigenvalue pencils for the weighted string on [0, 1].

The boundary value problem -y'' = lambda rho y, y(0) = y(1) = 0, with
rho = P' taken distributionally, discretizes on hat functions into the
pencil A + lambda B, where A is the Dirichlet stiffness matrix and

    B_ij = int_0^1 P (phi_i phi_j)' dx

absorbs the weight through integration by parts.  On a refinement cell
[x_j, x_j+1] where P(x_j + w t) = beta + d P(t), the three per-cell
contributions are exact in the moments M0 = int P dt, M1 = int t P dt:

    node j+1 diagonal:  beta + 2 d M1
    node j   diagonal:  -(beta + 2 d (M0 - M1))
    off-diagonal:       d (M0 - 2 M1)

For P(x) = x this reproduces minus the mass matrix; for constant P the
cell contributes nothing, as the telescoping of beta along the partition
must.

Eigenvalues are located through the inertia function ind(lam) =
n_-(A + lambda B), computed by a guarded Sturm LDL^T sweep.  Along each
ray from the origin ind is nondecreasing (for mu = lambda / s with s > 1,
A + lambda B = s (A / s + lambda/s B) and A/s < A), so eigenvalues are the
jump locations of ind and bisection on ind >= k converges to the k-th one
counted with multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .errors import NumericalError, RayExhausted, ValidationError
from .selfsim import (
    DEFAULT_CELL_BUDGET,
    Refinement,
    SelfSimilarParams,
    SimilarityMeta,
    compute_meta,
    refine,
    validate_params,
)

DEFAULT_EIGEN_RTOL = 1e-8
RAY_CAP = 1e18


@dataclass(frozen=True, eq=False)
class Pencil:
    """Symmetric tridiagonal pencil A + lambda B on the interior nodes."""

    adiag: np.ndarray
    aoff: np.ndarray
    bdiag: np.ndarray
    boff: np.ndarray
    nodes: np.ndarray
    depth: int
    params: SelfSimilarParams
    meta: SimilarityMeta

    @property
    def size(self) -> int:
        return self.adiag.shape[0]

    def inertia(self, lam: float) -> int:
        return inertia(self, lam)


def assemble_pencil(refinement: Refinement, meta: SimilarityMeta) -> Pencil:
    """Assemble stiffness and weight matrices over one refinement level."""
    widths = refinement.widths
    m = widths.shape[0] - 1  # interior nodes
    if m < 1:
        raise ValidationError("refinement too coarse to carry interior nodes")

    inv = 1.0 / widths
    adiag = inv[:-1] + inv[1:]
    aoff = -inv[1:-1]

    rising = refinement.betas + 2.0 * refinement.ds * meta.M1
    falling = refinement.betas + 2.0 * refinement.ds * (meta.M0 - meta.M1)
    cross = refinement.ds * (meta.M0 - 2.0 * meta.M1)

    bfull = np.zeros(widths.shape[0] + 1)
    bfull[1:] += rising
    bfull[:-1] -= falling
    return Pencil(
        adiag=np.ascontiguousarray(adiag),
        aoff=np.ascontiguousarray(aoff),
        bdiag=np.ascontiguousarray(bfull[1:-1]),
        boff=np.ascontiguousarray(cross[1:-1]),
        nodes=refinement.nodes,
        depth=refinement.depth,
        params=refinement.params,
        meta=meta,
    )


def build_pencil(params, depth: int, cell_budget: int = DEFAULT_CELL_BUDGET) -> Pencil:
    """Validate parameters, refine to the given depth and assemble."""
    p = validate_params(params)
    meta = compute_meta(p)
    return assemble_pencil(refine(p, depth, cell_budget=cell_budget), meta)


@njit(cache=True)
def _sturm_negcount(adiag, aoff, bdiag, boff, lam):  # pragma: no cover - jitted
    m = adiag.shape[0]
    maxe2 = 1.0
    for i in range(m - 1):
        e = aoff[i] + lam * boff[i]
        e2 = e * e
        if e2 > maxe2:
            maxe2 = e2
    pivmin = 1e-300 * maxe2

    count = 0
    singular = False
    q = 1.0
    for i in range(m):
        d = adiag[i] + lam * bdiag[i]
        if i > 0:
            e = aoff[i - 1] + lam * boff[i - 1]
            d = d - (e * e) / q
        if abs(d) <= pivmin:
            singular = True
            d = -pivmin
        if d < 0.0:
            count += 1
        q = d
    return count, singular


def inertia(pencil: Pencil, lam: float) -> int:
    """Number of negative eigenvalues of A + lam B."""
    count, _ = _sturm_negcount(pencil.adiag, pencil.aoff,
                               pencil.bdiag, pencil.boff, float(lam))
    return int(count)


def inertia_with_flag(pencil: Pencil, lam: float) -> tuple[int, bool]:
    """Inertia count plus a flag marking a near-singular sweep."""
    count, singular = _sturm_negcount(pencil.adiag, pencil.aoff,
                                      pencil.bdiag, pencil.boff, float(lam))
    return int(count), bool(singular)


def _signed(side: str) -> float:
    if side in ("+", "pos", "positive"):
        return 1.0
    if side in ("-", "neg", "negative"):
        return -1.0
    raise ValidationError(f"side must be 'pos' or 'neg', got {side!r}")


def eigenvalues(
    pencil: Pencil,
    side: str,
    count: int,
    rtol: float = DEFAULT_EIGEN_RTOL,
) -> np.ndarray:
    """First `count` pencil eigenvalues on one ray, multiplicity included.

    Returns signed values ordered by increasing magnitude.  Raises
    RayExhausted when the ray does not carry `count` eigenvalues (within
    the magnitude cap RAY_CAP; beyond it the discretization carries no
    trustworthy information anyway).
    """
    sign = _signed(side)
    if count < 1:
        raise ValidationError("count must be positive")
    if count > pencil.size:
        raise RayExhausted(
            f"pencil of size {pencil.size} carries at most {pencil.size} eigenvalues"
        )

    def ind(mag: float) -> int:
        return inertia(pencil, sign * mag)

    hi = 1.0
    while ind(hi) < count:
        hi *= 8.0
        if hi > RAY_CAP:
            raise RayExhausted(
                f"fewer than {count} eigenvalues on the {side} ray below {RAY_CAP:.0e}"
            )

    out = np.empty(count)
    lo = 0.0
    for k in range(1, count + 1):
        a, b = lo, hi
        if ind(a) >= k:
            out[k - 1] = sign * a
            continue
        while b - a > rtol * b:
            mid = 0.5 * (a + b)
            if ind(mid) >= k:
                b = mid
            else:
                a = mid
        out[k - 1] = sign * b
        lo = b
    return out


@dataclass(frozen=True, eq=False)
class ConvergedEigenvalues:
    """Eigenvalues refined in depth until they stop moving.

    rel_gap holds the per-eigenvalue relative change between the last two
    depths; converged reports whether it dropped below the tolerance
    before depth_max was reached.
    """

    lam: np.ndarray
    rel_gap: np.ndarray
    depth: int
    converged: bool


def eigenvalues_converged(
    params,
    side: str,
    count: int,
    depth_max: int = 12,
    tol: float = 0.005,
    depth_start: int = 4,
    rtol: float = DEFAULT_EIGEN_RTOL,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> ConvergedEigenvalues:
    """Deepen the mesh until the first `count` eigenvalues settle.

    Stops at the first depth where every eigenvalue moved by less than
    `tol` relative to the previous depth; otherwise returns the depth_max
    result with converged=False.  Coarse depths that cannot carry `count`
    eigenvalues on the ray are skipped; if even depth_max cannot, the
    RayExhausted from the final attempt propagates.
    """
    if depth_start < 1 or depth_start > depth_max:
        raise ValidationError("need 1 <= depth_start <= depth_max")
    p = validate_params(params)
    meta = compute_meta(p)
    prev = None
    lam = None
    gap = None
    for depth in range(depth_start, depth_max + 1):
        pencil = assemble_pencil(refine(p, depth, cell_budget=cell_budget), meta)
        try:
            lam = eigenvalues(pencil, side, count, rtol=rtol)
        except RayExhausted:
            if depth == depth_max:
                raise
            prev = None
            lam = None
            continue
        if prev is not None:
            gap = np.abs(lam - prev) / np.abs(lam)
            if float(np.max(gap)) < tol:
                return ConvergedEigenvalues(lam=lam, rel_gap=gap,
                                            depth=depth, converged=True)
        prev = lam
    if lam is None or gap is None:
        raise NumericalError("no two consecutive depths produced eigenvalues")
    return ConvergedEigenvalues(lam=lam, rel_gap=gap, depth=depth_max,
                                converged=False)


@dataclass(frozen=True, eq=False)
class CountingSeries:
    """Inertia counts sampled along one ray, with the model metadata.

    depth is -1 when the series was rehydrated from serialized output and
    the mesh depth is unknown.
    """

    lam: np.ndarray
    counts: np.ndarray
    side: str
    depth: int
    meta: SimilarityMeta
    singular_any: bool


def counting_series(pencil: Pencil, magnitudes: Sequence[float], side: str) -> CountingSeries:
    """ind(sign * magnitude) over an increasing magnitude grid.

    Monotonicity of the counts is validated; a violation means the sweep
    lost accuracy and the result cannot be trusted.
    """
    sign = _signed(side)
    mags = np.asarray(magnitudes, dtype=float).ravel()
    if mags.size == 0:
        raise ValidationError("need at least one magnitude")
    if np.any(mags <= 0.0) or np.any(np.diff(mags) <= 0.0):
        raise ValidationError("magnitudes must be positive and strictly increasing")

    counts = np.empty(mags.size, dtype=np.int64)
    singular_any = False
    for i, mag in enumerate(mags):
        c, s = inertia_with_flag(pencil, sign * mag)
        counts[i] = c
        singular_any = singular_any or s
    if np.any(np.diff(counts) < 0):
        raise NumericalError("inertia counts decreased along a ray")
    return CountingSeries(
        lam=sign * mags,
        counts=counts,
        side="+" if sign > 0 else "-",
        depth=pencil.depth,
        meta=pencil.meta,
        singular_any=singular_any,
    )


def series_from_arrays(
    lam: Sequence[float],
    counts: Sequence[float],
    meta: SimilarityMeta,
    depth: int = -1,
) -> CountingSeries:
    """Rehydrate a counting series from stored (lambda, count) columns."""
    lam = np.asarray(lam, dtype=float).ravel()
    counts = np.asarray(counts, dtype=float).ravel()
    if lam.shape != counts.shape or lam.size == 0:
        raise ValidationError("lambda and count columns must match and be nonempty")
    if np.any(lam == 0.0) or (np.any(lam > 0) and np.any(lam < 0)):
        raise ValidationError("a counting series lives on a single open ray")
    order = np.argsort(np.abs(lam))
    lam = lam[order]
    counts_i = np.asarray(np.rint(counts), dtype=np.int64)
    if np.max(np.abs(counts - counts_i)) > 1e-9:
        raise ValidationError("counts must be integers")
    counts_i = counts_i[order]
    if np.any(np.diff(counts_i) < 0):
        raise NumericalError("inertia counts decreased along a ray")
    return CountingSeries(
        lam=lam,
        counts=counts_i,
        side="+" if lam[0] > 0 else "-",
        depth=depth,
        meta=meta,
        singular_any=False,
    )
