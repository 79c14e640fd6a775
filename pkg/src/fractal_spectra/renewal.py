"""Two-component renewal systems and their long-time limits.

The systems solved here couple two unknowns through delayed self and cross
terms.  In the integer-lag (discrete) form,

    z_{j,n} = x_{j,n} + sum_{k=1}^{min(N,n)} (u_k z_{j,n-k} + v_k z_{3-j,n-k}),

with j in {1, 2}, nonnegative weights, total mass sum(u_k + v_k) = 1 and the
degenerate lag split: u lives on even lags only, v on odd lags only.  Under
gcd(active lags) = 1 and summable forcing the two sequences approach
2-periodic limits

    z_{j,n} -> (omega - (-1)^{n+j} chi) / J,

    omega = (1/2) sum_k (x_{1,k} + x_{2,k}),
    chi   = (1/2) sum_k (-1)^k (x_{1,k} - x_{2,k}),
    J     = sum_k k (u_k + v_k).

The continuous lattice form replaces sequences by functions on the real
line sampled along fibers t = theta + n; each fiber obeys the discrete
recursion exactly, and the solution tracks the 2-periodic profile

    s(t) = (1/J) sum_{k in Z} (X_1(t - 2k) + X_2(t - 2k - 1)),

with Z_j(t) - s(t - j + 1) -> 0.

The non-arithmetic form uses real delays l_k,

    Z_j(t) = X_j(t) + sum_k (u_k Z_j(t - l_k) + v_k Z_{3-j}(t - l_k)),

with Z_j -> 0 at -infinity.  For delays independent over the rationals the
solution flattens to the constant (1/(2J)) int (X_1 + X_2) dt with
J = sum_k (u_k + v_k) l_k; when v = 0 the components decouple and each
tends to (1/J) int X_j dt.  The a priori bound used for error control is
built from

    eta(t) = sum_k (u_k + v_k) (arctan t - arctan(t - l_k)) > 0,

which behaves like J / t^2 at infinity: forcing bounded by Pi / (t^2 + 1)
gives |Z_j| <= C Pi with C = sup_t pi / (eta(t) (t^2 + 1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from numba import njit
from scipy.integrate import quad

from .errors import (
    CoefficientInvariantViolation,
    EnvelopeTooWide,
    ForcingOnNegativeAxis,
    NonDegenerateParity,
    NumericalError,
    SeriesDivergence,
    UnstableStep,
    ValidationError,
)

MASS_TOL = 1e-12
SERIES_TERM_TOL = 1e-14
DEFAULT_TAIL_MASS_TOL = 1e-9


# ---------------------------------------------------------------------------
# coefficients


@dataclass(frozen=True)
class RenewalCoefficients:
    """Weights (u_k, v_k) with integer lags k = 1..N or real delays.

    delays is None in integer-lag mode.  Use the factory classmethods; they
    enforce the invariants (nonnegativity, unit total mass, and in integer
    mode the degenerate parity split and gcd condition).
    """

    u: tuple[float, ...]
    v: tuple[float, ...]
    delays: tuple[float, ...] | None = None

    @property
    def n_lags(self) -> int:
        return len(self.u)

    @property
    def total_v(self) -> float:
        return math.fsum(self.v)

    @property
    def lag_values(self) -> np.ndarray:
        if self.delays is not None:
            return np.asarray(self.delays)
        return np.arange(1, self.n_lags + 1, dtype=float)

    @property
    def J(self) -> float:
        """First moment sum_k l_k (u_k + v_k) of the renewal weights."""
        lags = self.lag_values
        return float(np.sum(lags * (np.asarray(self.u) + np.asarray(self.v))))

    @classmethod
    def integer_lags(cls, u: Sequence[float], v: Sequence[float]) -> "RenewalCoefficients":
        u = tuple(float(x) for x in u)
        v = tuple(float(x) for x in v)
        if len(u) != len(v) or len(u) == 0:
            raise CoefficientInvariantViolation("u and v must have equal positive length")
        if min(u) < 0.0 or min(v) < 0.0:
            raise CoefficientInvariantViolation("weights must be nonnegative")
        total = math.fsum(u) + math.fsum(v)
        if abs(total - 1.0) > MASS_TOL:
            raise CoefficientInvariantViolation(f"total mass {total!r}, expected 1")
        if math.fsum(v) <= 0.0:
            raise CoefficientInvariantViolation("two-component mode needs sum(v) > 0")
        for i, (uk, vk) in enumerate(zip(u, v)):
            lag = i + 1
            if lag % 2 == 1 and uk != 0.0:
                raise NonDegenerateParity(f"u_{lag} = {uk} on an odd lag")
            if lag % 2 == 0 and vk != 0.0:
                raise NonDegenerateParity(f"v_{lag} = {vk} on an even lag")
        active = [i + 1 for i, (uk, vk) in enumerate(zip(u, v)) if uk + vk > 0.0]
        if math.gcd(*active) != 1:
            raise CoefficientInvariantViolation(
                f"active lags {active} share the factor {math.gcd(*active)}"
            )
        return cls(u=u, v=v, delays=None)

    @classmethod
    def real_delays(
        cls,
        u: Sequence[float],
        v: Sequence[float],
        delays: Sequence[float],
    ) -> "RenewalCoefficients":
        u = [float(x) for x in u]
        v = [float(x) for x in v]
        delays = [float(x) for x in delays]
        if not (len(u) == len(v) == len(delays)) or len(u) == 0:
            raise CoefficientInvariantViolation("u, v, delays must have equal positive length")
        if min(u) < 0.0 or min(v) < 0.0:
            raise CoefficientInvariantViolation("weights must be nonnegative")
        if min(delays) <= 0.0:
            raise CoefficientInvariantViolation("delays must be positive")
        total = math.fsum(u) + math.fsum(v)
        if abs(total - 1.0) > MASS_TOL:
            raise CoefficientInvariantViolation(f"total mass {total!r}, expected 1")
        keep = [i for i in range(len(u)) if u[i] + v[i] > 0.0]
        if not keep:
            raise CoefficientInvariantViolation("all delays carry zero mass")
        return cls(
            u=tuple(u[i] for i in keep),
            v=tuple(v[i] for i in keep),
            delays=tuple(delays[i] for i in keep),
        )


# ---------------------------------------------------------------------------
# forcing


@dataclass(frozen=True)
class DecayCertificate:
    """Claimed decay envelope of a forcing pair (trusted, lightly checked).

    kind 'compact':        X_j = 0 outside support, |X_j| <= bounds_j.
    kind 'exponential':    |X_j(t)| <= bounds_j exp(-rate |t - center|);
                           one_sided additionally claims X_j = 0 for
                           t < center.
    kind 'inverse_square': |X_j(t)| <= bounds_j / (t^2 + 1).
    """

    kind: str
    bounds: tuple[float, float]
    support: tuple[float, float] | None = None
    rate: float | None = None
    center: float = 0.0
    one_sided: bool = False

    def envelope(self, t: np.ndarray, j: int) -> np.ndarray:
        b = self.bounds[j - 1]
        t = np.asarray(t, dtype=float)
        if self.kind == "compact":
            lo, hi = self.support
            return np.where((t >= lo) & (t <= hi), b, 0.0)
        if self.kind == "exponential":
            env = b * np.exp(-self.rate * np.abs(t - self.center))
            if self.one_sided:
                env = np.where(t < self.center, 0.0, env)
            return env
        if self.kind == "inverse_square":
            return b / (t * t + 1.0)
        raise ValidationError(f"unknown certificate kind {self.kind!r}")

    def tail_mass_left_of(self, t0: float) -> float:
        """Upper bound for int_{-inf}^{t0} of the summed envelopes."""
        b = self.bounds[0] + self.bounds[1]
        if self.kind == "compact":
            lo, hi = self.support
            if t0 <= lo:
                return 0.0
            return b * (min(t0, hi) - lo)
        if self.kind == "exponential":
            if self.one_sided and t0 <= self.center:
                return 0.0
            if t0 <= self.center:
                return b / self.rate * math.exp(-self.rate * (self.center - t0))
            return 2.0 * b / self.rate
        if self.kind == "inverse_square":
            return b * (0.5 * math.pi + math.atan(t0))
        raise ValidationError(f"unknown certificate kind {self.kind!r}")

    def vanishing_left_edge(self) -> float | None:
        """Point left of which the forcing is identically zero, if claimed."""
        if self.kind == "compact":
            return self.support[0]
        if self.kind == "exponential" and self.one_sided:
            return self.center
        return None


@dataclass(frozen=True, eq=False)
class ForcingComponent:
    """One scalar forcing function with shape metadata for certificates."""

    fn: Callable[[np.ndarray], np.ndarray]
    kind: str
    sup: float
    support: tuple[float, float] | None = None
    center: float = 0.0
    width: float = 0.0  # gaussian scale or 1/rate, used to derive envelopes

    def __call__(self, t) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(t, dtype=float)), dtype=float)


def zero_component() -> ForcingComponent:
    return ForcingComponent(fn=lambda t: np.zeros_like(t), kind="zero",
                            sup=0.0, support=(0.0, 0.0))


def gaussian_component(center: float, width: float, mass: float) -> ForcingComponent:
    if width <= 0.0:
        raise ValidationError("gaussian width must be positive")
    peak = mass / (width * math.sqrt(2.0 * math.pi))

    def fn(t):
        z = (t - center) / width
        return peak * np.exp(-0.5 * z * z)

    return ForcingComponent(fn=fn, kind="gaussian", sup=abs(peak), support=None,
                            center=center, width=width)


def triangle_component(lo: float, hi: float, mass: float) -> ForcingComponent:
    if hi <= lo:
        raise ValidationError("triangle needs lo < hi")
    half = 0.5 * (hi - lo)
    mid = 0.5 * (lo + hi)
    peak = mass / half

    def fn(t):
        return peak * np.clip(1.0 - np.abs(t - mid) / half, 0.0, None)

    return ForcingComponent(fn=fn, kind="triangle", sup=abs(peak),
                            support=(lo, hi), center=mid)


def exponential_cut_component(rate: float, mass: float) -> ForcingComponent:
    if rate <= 0.0:
        raise ValidationError("cut rate must be positive")
    amp = mass * rate

    def fn(t):
        return np.where(t >= 0.0, amp * np.exp(-rate * np.clip(t, 0.0, 700.0 / rate)), 0.0)

    return ForcingComponent(fn=fn, kind="exponential_cut", sup=abs(amp),
                            support=None, width=1.0 / rate)


def table_component(t: Sequence[float], x: Sequence[float]) -> ForcingComponent:
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if t.ndim != 1 or t.shape != x.shape or t.shape[0] < 2:
        raise ValidationError("table needs matching 1-d t and x with >= 2 rows")
    if np.any(np.diff(t) <= 0.0):
        raise ValidationError("table abscissae must increase")
    if not np.all(np.isfinite(x)):
        raise ValidationError("table values must be finite")

    def fn(tt):
        return np.interp(tt, t, x, left=0.0, right=0.0)

    return ForcingComponent(fn=fn, kind="table", sup=float(np.max(np.abs(x))),
                            support=(float(t[0]), float(t[-1])),
                            center=0.5 * float(t[0] + t[-1]))


_COMPACT_KINDS = {"zero", "triangle", "table"}


def _exponential_bound(comp: ForcingComponent, rate: float, center: float) -> float:
    """Valid Pi with |X(t)| <= Pi exp(-rate |t - center|) on the whole line."""
    if comp.sup == 0.0:
        return 0.0
    if comp.kind == "gaussian":
        # exp(-x^2 / 2w^2 + rate x) <= exp(rate^2 w^2 / 2) with x = |t - c|,
        # plus the shift penalty |t - center| <= |t - c| + |c - center|
        return comp.sup * math.exp(0.5 * (rate * comp.width) ** 2
                                   + rate * abs(comp.center - center))
    if comp.kind == "exponential_cut":
        # supported on t >= 0 with rate 1/width >= rate, so the ratio peaks
        # where |t - center| stops growing against the cut decay
        return comp.sup * math.exp(rate * abs(center))
    lo, hi = comp.support
    reach = max(abs(lo - center), abs(hi - center))
    return comp.sup * math.exp(rate * reach)


@dataclass(frozen=True, eq=False)
class Forcing:
    """Forcing pair (X_1, X_2) with a decay certificate."""

    x1: ForcingComponent
    x2: ForcingComponent
    certificate: DecayCertificate

    def __post_init__(self):
        self._spot_check()

    def _spot_check(self, n: int = 257) -> None:
        """Sampled consistency of the certificate against the components."""
        cert = self.certificate
        if cert.kind == "compact":
            lo, hi = cert.support
            t = np.linspace(lo - 5.0, hi + 5.0, n)
        elif cert.kind == "exponential":
            span = 40.0 / cert.rate + 5.0
            t = np.linspace(cert.center - span, cert.center + span, n)
        else:
            t = np.linspace(-100.0, 100.0, n)
        for j, comp in ((1, self.x1), (2, self.x2)):
            slack = 1e-9 * (1.0 + cert.bounds[j - 1])
            if np.any(np.abs(comp(t)) > cert.envelope(t, j) + slack):
                raise ValidationError(
                    f"component X{j} exceeds its certified {cert.kind} envelope"
                )

    @classmethod
    def from_components(
        cls,
        x1: ForcingComponent,
        x2: ForcingComponent,
        certificate: DecayCertificate | None = None,
    ) -> "Forcing":
        if certificate is None:
            certificate = _auto_certificate(x1, x2)
        return cls(x1=x1, x2=x2, certificate=certificate)


def _auto_certificate(x1: ForcingComponent, x2: ForcingComponent) -> DecayCertificate:
    comps = (x1, x2)
    actives = [c for c in comps if c.sup > 0.0]
    if all(c.kind in _COMPACT_KINDS for c in comps):
        if not actives:
            return DecayCertificate(kind="compact", bounds=(0.0, 0.0), support=(0.0, 0.0))
        lo = min(c.support[0] for c in actives)
        hi = max(c.support[1] for c in actives)
        return DecayCertificate(kind="compact", bounds=(x1.sup, x2.sup), support=(lo, hi))

    if all(c.kind in _COMPACT_KINDS | {"exponential_cut"} for c in comps):
        rate = min(1.0 / c.width for c in actives if c.kind == "exponential_cut")
        if all(c.kind == "exponential_cut" or c.support[0] >= 0.0 for c in actives):
            # everything lives on t >= 0; a cut's own rate dominates
            bounds = tuple(
                c.sup * (1.0 if c.kind == "exponential_cut"
                         else math.exp(rate * c.support[1]))
                if c.sup > 0.0 else 0.0
                for c in comps
            )
            return DecayCertificate(kind="exponential", bounds=bounds, rate=rate,
                                    center=0.0, one_sided=True)
        bounds = tuple(_exponential_bound(c, rate, 0.0) for c in comps)
        return DecayCertificate(kind="exponential", bounds=bounds, rate=rate, center=0.0)

    gaussians = [c for c in actives if c.kind == "gaussian"]
    if not gaussians:
        raise ValidationError("cannot derive a certificate; pass one explicitly")
    center = gaussians[0].center
    rate = min(
        [2.0 / c.width for c in gaussians]
        + [1.0 / c.width for c in actives if c.kind == "exponential_cut"]
    )
    bounds = tuple(_exponential_bound(c, rate, center) for c in comps)
    return DecayCertificate(kind="exponential", bounds=bounds, rate=rate, center=center)


def forcing_from_spec(obj: Mapping) -> Forcing:
    """Build a forcing pair from its JSON-style description."""
    comps = []
    for key in ("x1", "x2"):
        spec = obj.get(key, {"kind": "zero"})
        comps.append(component_from_spec(spec))
    cert = None
    if "certificate" in obj:
        c = dict(obj["certificate"])
        cert = DecayCertificate(
            kind=c["kind"],
            bounds=tuple(float(b) for b in c.get("bounds", (0.0, 0.0))),
            support=tuple(float(s) for s in c["support"]) if "support" in c else None,
            rate=float(c["rate"]) if "rate" in c else None,
            center=float(c.get("center", 0.0)),
            one_sided=bool(c.get("one_sided", False)),
        )
    return Forcing.from_components(comps[0], comps[1], certificate=cert)


def component_from_spec(spec: Mapping) -> ForcingComponent:
    kind = spec.get("kind")
    if kind == "zero":
        return zero_component()
    if kind == "gaussian":
        return gaussian_component(float(spec["center"]), float(spec["width"]),
                                  float(spec.get("mass", 1.0)))
    if kind == "triangle":
        return triangle_component(float(spec["lo"]), float(spec["hi"]),
                                  float(spec.get("mass", 1.0)))
    if kind == "exponential_cut":
        return exponential_cut_component(float(spec["rate"]), float(spec.get("mass", 1.0)))
    if kind == "table":
        return table_component(spec["t"], spec["x"])
    raise ValidationError(f"unknown forcing kind {kind!r}")


def component_mass(comp: ForcingComponent, certificate: DecayCertificate) -> float:
    """int X dt by adaptive quadrature, split at the certificate center."""
    if comp.kind == "zero":
        return 0.0
    if comp.support is not None:
        val, _ = quad(lambda s: float(comp(s)), comp.support[0], comp.support[1], limit=200)
        return val
    c = certificate.center
    left, _ = quad(lambda s: float(comp(s)), -np.inf, c, limit=200)
    right, _ = quad(lambda s: float(comp(s)), c, np.inf, limit=200)
    return left + right


# ---------------------------------------------------------------------------
# discrete recursion and limits


def _discrete_run(u: np.ndarray, v: np.ndarray, x1: np.ndarray, x2: np.ndarray):
    n_lags = u.shape[0]
    n = x1.shape[0]
    z1 = np.zeros(n)
    z2 = np.zeros(n)
    for i in range(n):
        acc1 = x1[i]
        acc2 = x2[i]
        for k in range(1, min(n_lags, i) + 1):
            acc1 += u[k - 1] * z1[i - k] + v[k - 1] * z2[i - k]
            acc2 += u[k - 1] * z2[i - k] + v[k - 1] * z1[i - k]
        z1[i] = acc1
        z2[i] = acc2
    return z1, z2


def solve_discrete(
    coeffs: RenewalCoefficients,
    x1: Sequence[float],
    x2: Sequence[float],
    n_max: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Run the two-component recursion for n = 0..n_max.

    Forcing sequences shorter than n_max + 1 are zero-padded.
    """
    if coeffs.delays is not None:
        raise CoefficientInvariantViolation("integer-lag coefficients required")
    if n_max < 0:
        raise ValidationError("n_max must be nonnegative")

    def prep(x):
        x = np.asarray(x, dtype=float).ravel()
        out = np.zeros(n_max + 1)
        m = min(x.shape[0], n_max + 1)
        out[:m] = x[:m]
        return out

    return _discrete_run(np.asarray(coeffs.u), np.asarray(coeffs.v), prep(x1), prep(x2))


@dataclass(frozen=True)
class DiscreteLimits:
    """Limit data (omega, chi, J) of the discrete system."""

    omega: float
    chi: float
    J: float

    def limit(self, j: int, n: int) -> float:
        """Limit of z_{j, n + 2m} as m grows (only the parity of n matters)."""
        if j not in (1, 2):
            raise ValidationError("component index must be 1 or 2")
        return (self.omega - (-1.0) ** ((n + j) % 2) * self.chi) / self.J


def discrete_limits(
    coeffs: RenewalCoefficients,
    x1: Sequence[float],
    x2: Sequence[float],
) -> DiscreteLimits:
    """omega, chi, J for summable forcing sequences."""
    if coeffs.delays is not None:
        raise CoefficientInvariantViolation("integer-lag coefficients required")
    x1 = np.asarray(x1, dtype=float).ravel()
    x2 = np.asarray(x2, dtype=float).ravel()
    m = max(x1.shape[0], x2.shape[0])
    a = np.zeros(m)
    b = np.zeros(m)
    a[: x1.shape[0]] = x1
    b[: x2.shape[0]] = x2
    signs = np.where(np.arange(m) % 2 == 0, 1.0, -1.0)
    omega = 0.5 * (math.fsum(a) + math.fsum(b))
    chi = 0.5 * math.fsum(signs * (a - b))
    return DiscreteLimits(omega=omega, chi=chi, J=coeffs.J)


# ---------------------------------------------------------------------------
# lattice solver


@dataclass(frozen=True)
class LimitReport:
    kind: str  # 'periodic' or 'constant'
    predicted: tuple[float, float] | None
    tail_window: tuple[float, float]
    tail_discrepancy: float


@dataclass(frozen=True, eq=False)
class RenewalSolution:
    grid: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    limit_report: LimitReport


def _require_one_sided(forcing: Forcing) -> None:
    cert = forcing.certificate
    ok = False
    if cert.kind == "compact":
        ok = cert.support[0] >= -1e-12
    elif cert.kind == "exponential":
        ok = cert.one_sided and cert.center >= -1e-12
    if not ok:
        raise ForcingOnNegativeAxis(
            "lattice solver needs forcing certified to vanish on t < 0"
        )
    t = np.linspace(-20.0, -1e-9, 64)
    if np.any(forcing.x1(t) != 0.0) or np.any(forcing.x2(t) != 0.0):
        raise ForcingOnNegativeAxis("forcing samples nonzero on t < 0")


def solve_lattice(
    coeffs: RenewalCoefficients,
    forcing: Forcing,
    phases: Sequence[float],
    horizon: float,
) -> RenewalSolution:
    """March the integer-lag system along the fibers t = theta + n.

    Each fiber satisfies the discrete recursion exactly, so no interpolation
    enters.  The limit report compares the tail against the 2-periodic
    profile s: sup over the last two time units of |Z_j(t) - s(t - j + 1)|.
    """
    if coeffs.delays is not None:
        raise NonDegenerateParity("lattice solver works on integer lags")
    _require_one_sided(forcing)
    phases = [float(p) for p in phases]
    if not phases:
        raise ValidationError("need at least one phase")
    if any(p < 0.0 or p >= 1.0 for p in phases):
        raise ValidationError("phases must lie in [0, 1)")
    if len(set(phases)) != len(phases):
        raise ValidationError("phases must be distinct")
    if horizon < 2.0:
        raise ValidationError("horizon must be at least 2")

    u = np.asarray(coeffs.u)
    v = np.asarray(coeffs.v)
    ts, z1s, z2s = [], [], []
    for theta in phases:
        n_fiber = int(math.floor(horizon - theta))
        t_fiber = theta + np.arange(n_fiber + 1, dtype=float)
        f1, f2 = _discrete_run(u, v, forcing.x1(t_fiber), forcing.x2(t_fiber))
        ts.append(t_fiber)
        z1s.append(f1)
        z2s.append(f2)
    t = np.concatenate(ts)
    order = np.argsort(t, kind="stable")
    t = t[order]
    z1 = np.concatenate(z1s)[order]
    z2 = np.concatenate(z2s)[order]

    window = (horizon - 2.0, horizon)
    mask = t >= window[0]
    disc = 0.0
    if np.any(mask):
        s1 = periodic_limit_s(coeffs, forcing, t[mask])
        s2 = periodic_limit_s(coeffs, forcing, t[mask] - 1.0)
        disc = float(max(np.max(np.abs(z1[mask] - s1)), np.max(np.abs(z2[mask] - s2))))
    report = LimitReport(kind="periodic", predicted=None,
                         tail_window=window, tail_discrepancy=disc)
    return RenewalSolution(grid=t, z1=z1, z2=z2, limit_report=report)


def periodic_limit_s(
    coeffs: RenewalCoefficients,
    forcing: Forcing,
    t,
) -> np.ndarray:
    """The 2-periodic profile s(t) = (1/J) sum_k (X1(t - 2k) + X2(t - 2k - 1)).

    The series is summed while the certified envelope of a term is above
    SERIES_TERM_TOL; certificates that cannot guarantee that the neglected
    tail is comparable raise SeriesDivergence.
    """
    if coeffs.delays is not None:
        raise NonDegenerateParity("the periodic profile needs integer lags")
    cert = forcing.certificate
    if cert.kind == "compact":
        lo, hi = cert.support
    elif cert.kind == "exponential":
        b = max(cert.bounds)
        if b == 0.0:
            lo, hi = 0.0, 0.0
        else:
            reach = math.log(max(b / SERIES_TERM_TOL, 1.0)) / cert.rate
            lo = cert.center if cert.one_sided else cert.center - reach
            hi = cert.center + reach
    else:
        raise SeriesDivergence(
            f"certificate kind {cert.kind!r} cannot certify the series tail"
        )

    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    tmin = float(np.min(t)) if t.size else 0.0
    tmax = float(np.max(t)) if t.size else 0.0
    for comp, shift in ((forcing.x1, 0.0), (forcing.x2, 1.0)):
        if comp.sup == 0.0:
            continue
        k_lo = int(math.floor((tmin - shift - hi) / 2.0)) - 1
        k_hi = int(math.ceil((tmax - shift - lo) / 2.0)) + 1
        for k in range(k_lo, k_hi + 1):
            out += comp(t - 2.0 * k - shift)
    return out / coeffs.J


# ---------------------------------------------------------------------------
# non-arithmetic solver


@njit(cache=True)
def _march(x1, x2, u, v, offs, exact, wmat):  # pragma: no cover - jitted
    n = x1.shape[0]
    n_delays = u.shape[0]
    z1 = np.zeros(n)
    z2 = np.zeros(n)
    for j in range(n):
        acc1 = x1[j]
        acc2 = x2[j]
        for k in range(n_delays):
            if exact[k]:
                idx = j - offs[k]
                if idx >= 0:
                    d1 = z1[idx]
                    d2 = z2[idx]
                else:
                    d1 = 0.0
                    d2 = 0.0
            else:
                i0 = j - offs[k] - 1
                d1 = 0.0
                d2 = 0.0
                for m in range(4):
                    ii = i0 - 1 + m
                    if ii >= 0:
                        d1 += wmat[k, m] * z1[ii]
                        d2 += wmat[k, m] * z2[ii]
            acc1 += u[k] * d1 + v[k] * d2
            acc2 += u[k] * d2 + v[k] * d1
        z1[j] = acc1
        z2[j] = acc2
    return z1, z2


def _cubic_weights(sigma: float) -> np.ndarray:
    """Lagrange weights on nodes {-1, 0, 1, 2} evaluated at sigma in (0, 1]."""
    s = sigma
    return np.array([
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s * s - 1.0) * (s - 2.0) / 2.0,
        -s * (s + 1.0) * (s - 2.0) / 2.0,
        s * (s * s - 1.0) / 6.0,
    ])


def solve_nonarithmetic(
    coeffs: RenewalCoefficients,
    forcing: Forcing,
    grid_step: float,
    horizon: tuple[float, float],
    tail_mass_tol: float | None = DEFAULT_TAIL_MASS_TOL,
) -> RenewalSolution:
    """Time-march the real-delay system on a uniform grid.

    The solution is seeded to zero left of horizon[0]; the forcing envelope
    integral beyond that point must stay below tail_mass_tol times the
    certified bound constants (pass None to skip the check, e.g. for
    envelope-bound experiments where the truncated problem is the object of
    interest).  Delayed values between grid points come from 4-point
    Lagrange interpolation on already computed history.
    """
    delays = coeffs.lag_values
    h = float(grid_step)
    if h <= 0.0:
        raise ValidationError("grid step must be positive")
    if h > float(np.min(delays)) / 4.0:
        raise UnstableStep(
            f"step {h} too coarse for smallest delay {np.min(delays)}"
        )
    t_lo, t_hi = float(horizon[0]), float(horizon[1])
    if not t_hi > t_lo + 10.0 * h:
        raise ValidationError("horizon too short for the grid step")

    cert = forcing.certificate
    if tail_mass_tol is not None:
        pi_total = cert.bounds[0] + cert.bounds[1]
        tail = cert.tail_mass_left_of(t_lo)
        if tail > tail_mass_tol * max(pi_total, 1e-300):
            raise EnvelopeTooWide(
                f"forcing tail mass {tail:.3e} beyond t = {t_lo} exceeds "
                f"{tail_mass_tol:.1e} of the certified scale"
            )

    n = int(round((t_hi - t_lo) / h)) + 1
    t = t_lo + h * np.arange(n)
    x1 = forcing.x1(t)
    x2 = forcing.x2(t)

    n_delays = delays.shape[0]
    offs = np.zeros(n_delays, dtype=np.int64)
    exact = np.zeros(n_delays, dtype=np.bool_)
    wmat = np.zeros((n_delays, 4))
    for k, ell in enumerate(delays):
        rho = ell / h
        g = math.floor(rho)
        frac = rho - g
        if frac < 1e-9:
            offs[k] = g
            exact[k] = True
        elif frac > 1.0 - 1e-9:
            offs[k] = g + 1
            exact[k] = True
        else:
            offs[k] = g
            wmat[k] = _cubic_weights(1.0 - frac)

    z1, z2 = _march(x1, x2, np.asarray(coeffs.u), np.asarray(coeffs.v),
                    offs, exact, wmat)

    lim1, lim2 = nonarithmetic_limit(coeffs, forcing)
    width = min(5.0 * float(np.max(delays)), 0.25 * (t_hi - t_lo))
    window = (t_hi - width, t_hi)
    mask = t >= window[0]
    disc = float(max(np.max(np.abs(z1[mask] - lim1)), np.max(np.abs(z2[mask] - lim2))))
    report = LimitReport(kind="constant", predicted=(lim1, lim2),
                         tail_window=window, tail_discrepancy=disc)
    return RenewalSolution(grid=t, z1=z1, z2=z2, limit_report=report)


def nonarithmetic_limit(coeffs: RenewalCoefficients, forcing: Forcing) -> tuple[float, float]:
    """Limit constants at t -> +infinity.

    Coupled components share (1/(2J)) int (X1 + X2); with v = 0 the system
    decouples and each component keeps its own (1/J) int X_j.
    """
    J = coeffs.J
    m1 = component_mass(forcing.x1, forcing.certificate)
    m2 = component_mass(forcing.x2, forcing.certificate)
    if coeffs.total_v > 0.0:
        shared = (m1 + m2) / (2.0 * J)
        return shared, shared
    return m1 / J, m2 / J


@dataclass(frozen=True)
class EtaBound:
    C: float
    bound: float
    J: float
    tail_deviation: float


def eta_bound(coeffs: RenewalCoefficients, pi_const: float) -> EtaBound:
    """A priori bound constant from eta(t) = sum (u+v)(arctan t - arctan(t-l)).

    Returns C = sup_t pi / (eta(t) (t^2 + 1)) found on a dense grid (the
    supremum sits either at a moderate |t| or at the window edge) together
    with the implied bound C * pi_const for forcing dominated by
    pi_const / (t^2 + 1).  The t^-2 tail of eta is certified by comparing
    eta * t^2 with J at large |t|.
    """
    delays = coeffs.lag_values
    w = np.asarray(coeffs.u) + np.asarray(coeffs.v)
    J = coeffs.J

    def eta(t: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(t)
        for wk, ell in zip(w, delays):
            acc += wk * (np.arctan(t) - np.arctan(t - ell))
        return acc

    t_edge = 50.0 * (1.0 + float(np.max(delays)))
    t = np.linspace(-t_edge, t_edge, 400001)
    g = eta(t) * (t * t + 1.0)
    if np.min(eta(np.linspace(-10.0, 10.0, 2001))) <= 0.0:
        raise NumericalError("eta must be positive")
    c = math.pi / float(np.min(g)) * (1.0 + 1e-4)

    far = np.array([-4.0 * t_edge, -2.0 * t_edge, 2.0 * t_edge, 4.0 * t_edge])
    dev = float(np.max(np.abs(eta(far) * far * far / J - 1.0)))
    if dev > 0.1:
        raise NumericalError("eta tail does not match J / t^2")
    return EtaBound(C=c, bound=c * pi_const, J=J, tail_deviation=dev)


# ---------------------------------------------------------------------------
# generating polynomials


def q_polynomial(coeffs: RenewalCoefficients) -> np.ndarray:
    """Ascending coefficients of Q(w) = (1 - U(w) - V(w)) / (1 - w).

    1 - U - V vanishes at w = 1 because the weights carry unit mass, so the
    synthetic division is exact up to roundoff.
    """
    if coeffs.delays is not None:
        raise CoefficientInvariantViolation("generating polynomials need integer lags")
    p = np.zeros(coeffs.n_lags + 1)
    p[0] = 1.0
    for k in range(1, coeffs.n_lags + 1):
        p[k] = -(coeffs.u[k - 1] + coeffs.v[k - 1])
    q = np.zeros(coeffs.n_lags)
    q[0] = p[0]
    for i in range(1, coeffs.n_lags):
        q[i] = p[i] + q[i - 1]
    return q
