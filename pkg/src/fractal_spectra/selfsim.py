"""Self-similar weight primitives on [0, 1].

A self-similar function P is the fixed point of the affine refinement
operator that rescales the whole graph of P into the k-th subinterval
[alpha_{k-1}, alpha_k] of width a_k (alpha_0 = 0, alpha_k = a_1 + ... + a_k):

    P(alpha_{k-1} + a_k * t) = beta_k + d_k * P(t),    0 <= t <= 1.

The operator contracts in L2[0, 1] when sum(a_k * d_k^2) < 1, so P exists
and is unique up to null sets.  It need not be continuous; discontinuities
put point masses into the distributional weight rho = P'.

Everything downstream needs only closed-form data about P:

* boundary values p0 = P(0), p1 = P(1), fixed points of the first and last
  affine pieces;
* moments M0 = int_0^1 P dx and M1 = int_0^1 x P dx, solving linear
  equations obtained by substituting the self-similarity into the integral;
* the spectral order D, the unique positive root of
  sum_{d_k != 0} (a_k |d_k|)^{D/2} = 1;
* an arithmetic classification of the logarithms ln(a_k |d_k|): whether
  they sit on a common lattice nu * Z, and if so whether the lattice
  indices have even parity exactly on the pieces with d_k > 0 and odd
  parity exactly on the pieces with d_k < 0 (the degenerate arithmetic
  case, which drives period-2 oscillations in the eigenvalue counting).

Words w = (k_1, ..., k_m) index cells of the depth-m refinement; the
restriction of P to a cell is again affine in P with

    beta_{w k} = beta_w + d_w * beta_k,    d_{w k} = d_w * d_k,

so cell integrals of P and x*P reduce exactly to (M0, M1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    ContractionViolation,
    FixedPointSingular,
    LengthMismatch,
    NonPositiveScale,
    NoSpectralOrder,
    ScaleSumMismatch,
    ValidationError,
)

DEFAULT_CELL_BUDGET = 2_000_000

# tolerances, kept in one place
SCALE_SUM_TOL = 1e-12
RATIO_RATIONAL_TOL = 1e-9
RATIO_MAX_DENOMINATOR = 64
ORDER_BISECTION_TOL = 1e-14
CONTINUITY_TOL = 1e-12


def _as_float(value) -> float:
    """Parse a number given as float, int or decimal string ('1/3' allowed)."""
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    if isinstance(value, bool):
        raise ValidationError(f"expected a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class SelfSimilarParams:
    """Validated parameter triple (a, d, beta) of a self-similar function."""

    a: tuple[float, ...]
    d: tuple[float, ...]
    beta: tuple[float, ...]

    @property
    def n_pieces(self) -> int:
        return len(self.a)

    @property
    def alpha(self) -> np.ndarray:
        """Breakpoints alpha_0 = 0 <= ... <= alpha_N = 1."""
        return np.concatenate(([0.0], np.cumsum(self.a)))

    @property
    def active(self) -> tuple[bool, ...]:
        """Pieces with d_k != 0; only these carry self-similar mass."""
        return tuple(dk != 0.0 for dk in self.d)

    @property
    def is_flat(self) -> bool:
        """True when every d_k = 0, so P is a plain step function."""
        return not any(self.active)


def validate_params(raw: Mapping | SelfSimilarParams) -> SelfSimilarParams:
    """Check and freeze a parameter triple.

    Accepts a mapping with keys 'a', 'd', 'beta' (entries may be floats or
    decimal strings).  Widths are never normalized; a wrong sum is an error.
    """
    if isinstance(raw, SelfSimilarParams):
        raw = {"a": raw.a, "d": raw.d, "beta": raw.beta}
    for key in ("a", "d", "beta"):
        if key not in raw:
            raise ValidationError(f"missing parameter vector {key!r}")
    try:
        a = tuple(_as_float(x) for x in raw["a"])
        d = tuple(_as_float(x) for x in raw["d"])
        beta = tuple(_as_float(x) for x in raw["beta"])
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"unparsable parameter entry: {exc}") from exc

    if not (len(a) == len(d) == len(beta)):
        raise LengthMismatch(
            f"length mismatch: a has {len(a)}, d has {len(d)}, beta has {len(beta)}"
        )
    if len(a) < 2:
        raise LengthMismatch("need at least two pieces")
    if min(a) <= 0.0:
        raise NonPositiveScale(f"widths must be positive, got {a}")
    total = math.fsum(a)
    if abs(total - 1.0) > SCALE_SUM_TOL:
        raise ScaleSumMismatch(f"widths sum to {total!r}, expected 1")
    contraction = math.fsum(ai * di * di for ai, di in zip(a, d))
    if contraction >= 1.0:
        raise ContractionViolation(
            f"sum(a_k d_k^2) = {contraction!r} >= 1, no L2 fixed point"
        )
    return SelfSimilarParams(a=a, d=d, beta=beta)


@dataclass(frozen=True)
class SimilarityMeta:
    """Closed-form similarity data of P.

    classification is one of 'nonarithmetic', 'arithmetic',
    'degenerate_arithmetic'.  nu is the maximal lattice step of the
    logarithms -ln(a_k |d_k|) in the arithmetic cases, None otherwise.
    parity holds 'even'/'odd' per piece (None for inactive pieces).
    """

    p0: float
    p1: float
    M0: float
    M1: float
    D: float
    classification: str
    nu: float | None
    parity: tuple[str | None, ...]

    @property
    def D_half(self) -> float:
        return 0.5 * self.D


def _spectral_order(weights: Sequence[float]) -> float:
    """Positive root s of sum(w_k^s) = 1 for weights w_k in (0, 1)."""

    def f(s: float) -> float:
        return math.fsum(w**s for w in weights) - 1.0

    lo, hi = 0.0, 1.0
    while f(hi) > 0.0:
        hi *= 2.0
        if hi > 1e6:  # unreachable for valid weights, guards fp surprises
            raise NoSpectralOrder("order equation root escaped to infinity")
    while hi - lo > ORDER_BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _classify(a: Sequence[float], d: Sequence[float]):
    """Lattice structure of {-ln(a_k |d_k|) : d_k != 0}.

    Tests rationality of the log ratios against the first active piece with
    denominators up to RATIO_MAX_DENOMINATOR, then extracts the maximal
    lattice step nu and the per-piece parity of the lattice index.
    """
    active = [k for k, dk in enumerate(d) if dk != 0.0]
    logs = [-math.log(a[k] * abs(d[k])) for k in active]
    base = logs[0]
    fracs = []
    for m in logs:
        r = m / base
        fr = Fraction(r).limit_denominator(RATIO_MAX_DENOMINATOR)
        if abs(r - float(fr)) > RATIO_RATIONAL_TOL:
            return "nonarithmetic", None, tuple(None for _ in d)
        fracs.append(fr)
    denom_lcm = math.lcm(*(fr.denominator for fr in fracs))
    ints = [fr.numerator * (denom_lcm // fr.denominator) for fr in fracs]
    g = math.gcd(*ints)
    ints = [n // g for n in ints]
    nu = base * g / denom_lcm

    parity: list[str | None] = [None] * len(d)
    degenerate = True
    for k, m_int in zip(active, ints):
        parity[k] = "even" if m_int % 2 == 0 else "odd"
        want = "even" if d[k] > 0 else "odd"
        if parity[k] != want:
            degenerate = False
    label = "degenerate_arithmetic" if degenerate else "arithmetic"
    return label, nu, tuple(parity)


def compute_meta(params: SelfSimilarParams) -> SimilarityMeta:
    """Boundary values, moments, spectral order and classification of P."""
    a = np.asarray(params.a)
    d = np.asarray(params.d)
    beta = np.asarray(params.beta)

    if params.is_flat:
        raise NoSpectralOrder("all multipliers d_k vanish, weight is flat")

    if abs(1.0 - d[0]) < 1e-12:
        raise FixedPointSingular("d_1 = 1, P(0) is undetermined")
    if abs(1.0 - d[-1]) < 1e-12:
        raise FixedPointSingular("d_N = 1, P(1) is undetermined")
    p0 = beta[0] / (1.0 - d[0])
    p1 = beta[-1] / (1.0 - d[-1])

    # int P over the k-th cell is a_k (beta_k + d_k M0); summing gives M0.
    m0 = float(np.sum(a * beta) / (1.0 - np.sum(a * d)))
    # likewise for int x P with x = alpha_{k-1} + a_k t.
    alpha_left = params.alpha[:-1]
    m1_num = np.sum(a * (alpha_left * (beta + d * m0) + 0.5 * a * beta))
    m1 = float(m1_num / (1.0 - np.sum(a * a * d)))

    weights = [params.a[k] * abs(params.d[k]) for k in range(params.n_pieces)
               if params.d[k] != 0.0]
    if len(weights) < 2:
        # a single active piece drives logarithmic counting; the order
        # equation has no positive root, so there is no power-law order.
        raise NoSpectralOrder(
            "need at least two pieces with d_k != 0 for a positive order"
        )
    d_half = _spectral_order(weights)

    classification, nu, parity = _classify(params.a, params.d)
    return SimilarityMeta(
        p0=float(p0),
        p1=float(p1),
        M0=m0,
        M1=m1,
        D=2.0 * d_half,
        classification=classification,
        nu=nu,
        parity=parity,
    )


@dataclass(frozen=True)
class CellData:
    """One cell of a refinement: P restricted to it is beta_w + d_w P(t)."""

    word: tuple[int, ...]
    left: float
    width: float
    beta_w: float
    d_w: float

    @property
    def right(self) -> float:
        return self.left + self.width


@dataclass(frozen=True, eq=False)
class Refinement:
    """Depth-m refinement of [0, 1] into N^m ordered cells.

    Cell data is kept as flat arrays (cells in left-to-right order, word =
    base-N digits of the index).  Endpoint values are the one-sided limits
    of P taken from inside each cell; they disagree at a shared node exactly
    where P jumps.
    """

    params: SelfSimilarParams
    depth: int
    lefts: np.ndarray
    widths: np.ndarray
    betas: np.ndarray
    ds: np.ndarray
    left_values: np.ndarray
    right_values: np.ndarray
    p0: float
    p1: float

    @property
    def n_cells(self) -> int:
        return self.lefts.shape[0]

    @property
    def nodes(self) -> np.ndarray:
        return np.concatenate((self.lefts, [1.0]))

    @property
    def continuity_mismatch(self) -> float:
        """Largest jump of P across interior nodes of the mesh."""
        if self.n_cells < 2:
            return 0.0
        return float(np.max(np.abs(self.right_values[:-1] - self.left_values[1:])))

    @property
    def is_continuous(self) -> bool:
        return self.continuity_mismatch <= CONTINUITY_TOL

    def word(self, index: int) -> tuple[int, ...]:
        """Base-N digits (0-based piece indices) of a cell index."""
        n = self.params.n_pieces
        digits = []
        for _ in range(self.depth):
            index, r = divmod(index, n)
            digits.append(r)
        return tuple(reversed(digits))

    def cell(self, index: int) -> CellData:
        return CellData(
            word=self.word(index),
            left=float(self.lefts[index]),
            width=float(self.widths[index]),
            beta_w=float(self.betas[index]),
            d_w=float(self.ds[index]),
        )

    def cells(self) -> Iterator[CellData]:
        for i in range(self.n_cells):
            yield self.cell(i)


def refine(
    params: SelfSimilarParams,
    depth: int,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> Refinement:
    """Subdivide [0, 1] to the given depth and tabulate cell affine data."""
    if depth < 0:
        raise ValidationError("depth must be nonnegative")
    n = params.n_pieces
    if n**depth > cell_budget:
        raise BudgetExceeded(
            f"{n}^{depth} cells exceed the budget of {cell_budget}"
        )

    a = np.asarray(params.a)
    d = np.asarray(params.d)
    beta = np.asarray(params.beta)
    alpha_left = params.alpha[:-1]

    lefts = np.zeros(1)
    widths = np.ones(1)
    betas = np.zeros(1)
    ds = np.ones(1)
    for _ in range(depth):
        m = lefts.shape[0]
        lefts = np.repeat(lefts, n) + np.repeat(widths, n) * np.tile(alpha_left, m)
        widths = np.repeat(widths, n) * np.tile(a, m)
        betas = np.repeat(betas, n) + np.repeat(ds, n) * np.tile(beta, m)
        ds = np.repeat(ds, n) * np.tile(d, m)

    if abs(1.0 - d[0]) < 1e-12 or abs(1.0 - d[-1]) < 1e-12:
        raise FixedPointSingular("boundary multiplier equals 1")
    p0 = float(beta[0] / (1.0 - d[0]))
    p1 = float(beta[-1] / (1.0 - d[-1]))

    return Refinement(
        params=params,
        depth=depth,
        lefts=lefts,
        widths=widths,
        betas=betas,
        ds=ds,
        left_values=betas + ds * p0,
        right_values=betas + ds * p1,
        p0=p0,
        p1=p1,
    )


def meta_to_mapping(meta: SimilarityMeta) -> dict:
    """JSON-ready dictionary of the similarity data."""
    return {
        "p0": meta.p0,
        "p1": meta.p1,
        "M0": meta.M0,
        "M1": meta.M1,
        "D": meta.D,
        "D_half": meta.D_half,
        "classification": meta.classification,
        "nu": meta.nu,
        "parity": list(meta.parity),
    }


def meta_from_mapping(obj: Mapping) -> SimilarityMeta:
    """Rebuild similarity data from its serialized form."""
    try:
        return SimilarityMeta(
            p0=float(obj["p0"]),
            p1=float(obj["p1"]),
            M0=float(obj["M0"]),
            M1=float(obj["M1"]),
            D=float(obj["D"]),
            classification=str(obj["classification"]),
            nu=None if obj.get("nu") is None else float(obj["nu"]),
            parity=tuple(obj.get("parity", ())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed similarity metadata: {exc}") from exc


def reference_params() -> SelfSimilarParams:
    """Built-in three-piece reference weight.

    Two active pieces with multiplier -1/2 around an inactive middle step;
    P jumps at x = 1/3, the weight is degenerate arithmetic with nu = ln 6
    and spectral order D = 2 ln 2 / ln 6.
    """
    third = 1.0 / 3.0
    return validate_params({
        "a": (third, third, third),
        "d": (-0.5, 0.0, -0.5),
        "beta": (0.0, 0.5, 0.5),
    })


def cell_moments(cell: CellData, meta: SimilarityMeta) -> tuple[float, float]:
    """Exact (int_cell P dx, int_cell x P dx).

    Substituting x = left + width * t turns both integrals into affine
    combinations of the global moments:

        int_cell P dx     = width * (beta_w + d_w M0)
        int_cell x P dx   = left * int_cell P dx
                            + width^2 * (beta_w / 2 + d_w M1)
    """
    i0 = cell.width * (cell.beta_w + cell.d_w * meta.M0)
    i1 = cell.left * i0 + cell.width**2 * (0.5 * cell.beta_w + cell.d_w * meta.M1)
    return float(i0), float(i1)
