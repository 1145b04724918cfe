"""Closed-form flow profiles for parallel-hypersurface families.

A mean-convex isoparametric hypersurface moves under the inverse mean
curvature flow by sliding through its own parallel family: the flow is
the scalar distance function mu(t) fixed by

    prod_j (C(mu) - k_j S(mu))**m_j = exp(t),        mu(0) = 0,

where (C, S) is the cosine/sine pair of the ambient space form.  This
module solves that equation in closed form for every catalog family:

* Euclidean spheres and spherical cylinders,
* horospheres (both normal orientations), umbilic hypersurfaces and
  equal-multiplicity product cylinders in hyperbolic space,
* spherical families with g in {1, 2, 3, 4, 6}, where the product of
  transported factors telescopes to cos(g mu) - a sin(g mu) with
  a = (sum of curvatures)/g.

Each solver returns a :class:`FlowProfile` whose ``mu``/``h``/``residual``
methods are vectorized and numerically stable across the whole maximal
interval of existence, including the collapse end of ancient spherical
flows where the mean curvature vanishes like sqrt(2 n g (t_star - t)).

Formulas avoid cancellation by rationalizing against expm1/log1p; two
clipped Newton corrections against the defining product equation then
pin the root to machine precision (the correction is bounded by 1e-6 so
it can never leave the closed-form branch).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    DomainError,
    NonMeanConvex,
    OutOfInterval,
    WrongSpaceForm,
)
from .isocatalog import (
    euclidean_spectrum,
    hyperbolic_spectrum,
    sphere_spectrum_from_k1,
)
from .spaceform import (
    PrincipalSpectrum,
    mean_curvature_mu,
    parallel_data,
    transport_pair,
    transport_product,
)

# Open-interval guard: times closer than this to a finite endpoint are
# rejected rather than evaluated in a regime the formulas cannot resolve.
ENDPOINT_GUARD = 1e-12

CASES = (
    "euclid_sphere",
    "euclid_cylinder",
    "horo",
    "hyp_umbilic",
    "hyp_cylinder",
    "sphere_g",
)

CLASSIFICATIONS = ("ancient", "immortal", "eternal")


@dataclass(frozen=True)
class FlowProfile:
    """Solved flow for one spectrum: distance, curvature and diagnostics.

    ``interval`` is the maximal existence interval; both endpoints are
    open (entries may be infinite).  ``params`` carries case-specific
    constants (radius, slope of the telescoped product, block
    multiplicity) so evaluation never re-derives them.
    """

    spectrum: PrincipalSpectrum
    case: str
    interval: tuple
    params: dict = field(compare=False, repr=False)

    def __post_init__(self):
        if self.case not in CASES:
            raise DomainError(f"unknown case {self.case!r}")

    # -- basic shape ----------------------------------------------------

    @property
    def classification(self) -> str:
        lo, hi = self.interval
        if math.isinf(lo) and math.isinf(hi):
            return "eternal"
        if math.isinf(lo):
            return "ancient"
        if math.isinf(hi):
            return "immortal"
        raise DomainError(f"interval {self.interval!r} bounded on both sides")

    @property
    def t_star(self):
        """The finite endpoint of the interval (either side), else None."""
        lo, hi = self.interval
        if math.isfinite(hi):
            return hi
        if math.isfinite(lo):
            return lo
        return None

    @property
    def a(self) -> float:
        """Initial mean curvature divided by the dimension."""
        return self.spectrum.mean_curvature / self.spectrum.n

    # -- evaluation -----------------------------------------------------

    def _check_t(self, t):
        scalar = isinstance(t, (int, float))
        t_arr = np.asarray(t, dtype=float)
        if t_arr.size and not np.all(np.isfinite(t_arr)):
            raise OutOfInterval(f"non-finite time in {t!r}")
        lo, hi = self.interval
        if np.any(t_arr <= lo + ENDPOINT_GUARD) or np.any(t_arr >= hi - ENDPOINT_GUARD):
            raise OutOfInterval(
                f"time outside the open existence interval ({lo!r}, {hi!r})"
            )
        return t_arr, scalar

    def _mu_raw(self, t):
        p = self.params
        if self.case in ("euclid_sphere", "euclid_cylinder"):
            return -p["r0"] * np.expm1(t / p["m"])
        if self.case == "horo":
            return -p["k"] * t / self.spectrum.n
        if self.case == "hyp_umbilic":
            k = p["k"]
            n = self.spectrum.n
            x = np.exp(t / n)
            if abs(k) < 1.0:
                # q > 0 is guaranteed by the endpoint guard; the clamp only
                # absorbs round-off in a ~1e-13 band next to the endpoint.
                q = (1.0 - k * k) * np.expm1(2.0 * (t - self.interval[0]) / n)
            else:
                q = x * x + (k * k - 1.0)
            q = np.maximum(q, 0.0)
            sinh_mu = -math.copysign(1.0, k) * np.expm1(2.0 * t / n) / (
                abs(k) * x + np.sqrt(q)
            )
            return np.arcsinh(sinh_mu)
        if self.case == "hyp_cylinder":
            a, m = p["a"], p["m"]
            x = np.exp(t / m)
            rq = np.sqrt(x * x + (a * a - 1.0))
            sinh2 = -np.expm1(2.0 * t / m) / (rq + a * x)
            cosh2 = (x * rq + a) / (a * x + rq)
            cosh_mu = np.sqrt(0.5 * (cosh2 + 1.0))
            return np.arcsinh(sinh2 / (2.0 * cosh_mu))
        # sphere_g
        a, m, g = p["a"], p["m"], self.spectrum.g
        t_star = self.interval[1]
        x = np.exp(t / m)
        q = np.maximum(-(a * a + 1.0) * np.expm1(2.0 * (t - t_star) / m), 0.0)
        rq = np.sqrt(q)
        sin_g = -np.expm1(2.0 * t / m) / (rq + a * x)
        cos_g = (x + a * rq) / (a * a + 1.0)
        return np.arctan2(sin_g, cos_g) / g

    def _polish(self, mu, t):
        """Clipped Newton corrections against the defining product equation.

        Newton on P(mu) - exp(t) with dP/dmu = -H*P; two passes land the
        computed product within its own rounding granularity of exp(t).
        Steps are clipped to 1e-6, and skipped where the mean curvature
        is too small or the evaluation overflows.
        """
        et = np.exp(t)
        for _ in range(2):
            prod = transport_product(self.spectrum, mu)
            hmu = mean_curvature_mu(self.spectrum, mu)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                step = (prod - et) / (hmu * prod)
                good = (
                    np.isfinite(step)
                    & (np.abs(hmu) > 1e-8)
                    & (prod > 0.0)
                    & np.isfinite(et)
                )
                step = np.where(good, step, 0.0)
            mu = mu + np.clip(step, -1e-6, 1e-6)
        return mu

    def mu(self, t):
        """Signed parallel distance at time(s) ``t``."""
        t_arr, scalar = self._check_t(t)
        out = self._polish(self._mu_raw(t_arr), t_arr)
        return float(out) if scalar else out

    def h(self, t):
        """Mean curvature of the flowing hypersurface at time(s) ``t``.

        Uses per-case cancellation-free expressions; near an ancient
        collapse the value decays like sqrt(2 n g (t_star - t)) and is
        resolved down to the endpoint guard.
        """
        t_arr, scalar = self._check_t(t)
        p = self.params
        n = self.spectrum.n
        if self.case in ("euclid_sphere", "euclid_cylinder"):
            out = (p["m"] / p["r0"]) * np.exp(-t_arr / p["m"])
        elif self.case == "horo":
            out = n * p["k"] * np.ones_like(t_arr)
        elif self.case == "hyp_umbilic":
            k = p["k"]
            mu = self._mu_raw(t_arr)
            x = np.exp(t_arr / n)
            out = n * (k * np.cosh(mu) - np.sinh(mu)) / x
        elif self.case == "hyp_cylinder":
            a, m = p["a"], p["m"]
            mu = self._mu_raw(t_arr)
            x = np.exp(t_arr / m)
            out = 2.0 * m * (a * np.cosh(2.0 * mu) - np.sinh(2.0 * mu)) / x
        else:  # sphere_g
            a, m = p["a"], p["m"]
            t_star = self.interval[1]
            x = np.exp(t_arr / m)
            q = np.maximum(-(a * a + 1.0) * np.expm1(2.0 * (t_arr - t_star) / m), 0.0)
            out = n * np.sqrt(q) / x
        return float(out) if scalar else out

    def residual(self, t):
        """Absolute defect of the product equation at mu(t).

        ``|prod_j (C - k_j S)**m_j - exp(t)|`` with the product taken
        directly over powers (not through logs), so the defect is
        meaningful down to a few ulp of exp(t).
        """
        t_arr, scalar = self._check_t(t)
        mu = self._polish(self._mu_raw(t_arr), t_arr)
        out = np.abs(transport_product(self.spectrum, mu) - np.exp(t_arr))
        return float(out) if scalar else out

    def transported(self, t: float):
        """Metric/shape/curvature factors of every block at scalar time t."""
        return parallel_data(self.spectrum, self.mu(float(t)))

    def metric_factor(self, t, entry: int = 0):
        """Squared transport factor (C - k S)**2 of one block, vectorized."""
        t_arr, scalar = self._check_t(t)
        mu = self._polish(self._mu_raw(t_arr), t_arr)
        k = self.spectrum.entries[entry][0]
        den, _ = transport_pair(self.spectrum.sf, k, mu)
        out = den * den
        return float(out) if scalar else out


def flow_curvatures(profile: FlowProfile, t: float):
    """Transported principal curvature pairs (k_j(t), m_j) at scalar t."""
    return tuple(
        (d.curvature, d.multiplicity) for d in profile.transported(t)
    )


# ---------------------------------------------------------------------------
# solvers


def _solve_euclidean_spectrum(spectrum: PrincipalSpectrum) -> FlowProfile:
    if spectrum.sf.epsilon != 0:
        raise WrongSpaceForm("spectrum is not Euclidean")
    ks = spectrum.curvatures
    if ks[0] <= 0.0 or len(ks) > 2 or (len(ks) == 2 and ks[1] != 0.0):
        raise DomainError(
            "Euclidean closed form needs one positive curvature block"
            f" plus an optional flat block, got {spectrum.entries!r}"
        )
    m = spectrum.multiplicities[0]
    case = "euclid_sphere" if m == spectrum.n else "euclid_cylinder"
    return FlowProfile(
        spectrum=spectrum,
        case=case,
        interval=(-math.inf, math.inf),
        params={"r0": 1.0 / ks[0], "m": m},
    )


def solve_euclidean(n: int, m: int, r0: float) -> FlowProfile:
    """Eternal flow of a round sphere (m = n) or spherical cylinder (m < n).

    The curved block has radius r0, curvature 1/r0 with multiplicity m;
    the remaining n - m directions are flat.  mu(t) = r0 (1 - e^{t/m}),
    so the curved radius obeys r(t) = r0 e^{t/m}.
    """
    return _solve_euclidean_spectrum(euclidean_spectrum(n=n, m=m, r0=r0))


def _solve_horosphere_spectrum(spectrum: PrincipalSpectrum) -> FlowProfile:
    if spectrum.sf.epsilon != -1:
        raise WrongSpaceForm("spectrum is not hyperbolic")
    ks = spectrum.curvatures
    if len(ks) != 1 or abs(abs(ks[0]) - 1.0) > 1e-12:
        raise DomainError(f"horosphere needs a single curvature +-1, got {ks!r}")
    return FlowProfile(
        spectrum=spectrum,
        case="horo",
        interval=(-math.inf, math.inf),
        params={"k": ks[0]},
    )


def solve_horosphere(n: int, k: float) -> FlowProfile:
    """Eternal flow of a horosphere; both normal orientations accepted.

    mu(t) = -k t / n exactly.  The mean curvature is the signed constant
    n*k and the metric factor grows like exp(2 t / n) for either sign;
    only k = +1 is mean-convex in the literal sense.
    """
    return _solve_horosphere_spectrum(hyperbolic_spectrum("horosphere", n=n, k=k))


def _solve_hyperbolic_umbilic_spectrum(
    spectrum: PrincipalSpectrum, allow_negative_k: bool = False
) -> FlowProfile:
    if spectrum.sf.epsilon != -1:
        raise WrongSpaceForm("spectrum is not hyperbolic")
    ks = spectrum.curvatures
    if len(ks) != 1 or abs(ks[0]) < 1e-12 or abs(abs(ks[0]) - 1.0) < 1e-12:
        raise DomainError(
            f"umbilic needs a single curvature outside {{-1,0,1}}, got {ks!r}"
        )
    k = ks[0]
    if k < 0.0 and not allow_negative_k:
        raise NonMeanConvex(
            f"initial mean curvature {spectrum.mean_curvature!r} is negative;"
            " pass allow_negative_k=True to flow anyway",
            required=0.0,
        )
    n = spectrum.n
    lo = 0.5 * n * math.log1p(-k * k) if abs(k) < 1.0 else -math.inf
    return FlowProfile(
        spectrum=spectrum,
        case="hyp_umbilic",
        interval=(lo, math.inf),
        params={"k": k},
    )


def solve_hyperbolic_umbilic(
    n: int, k: float, allow_negative_k: bool = False
) -> FlowProfile:
    """Flow of an umbilic hyperbolic hypersurface (|k| not 0 or 1).

    * |k| > 1: geodesic sphere, eternal flow;
    * |k| < 1: equidistant hypersurface, immortal flow born at
      t_lo = (n/2) log(1 - k**2) where it leaves a totally geodesic sheet.

    Negative k means the initial mean curvature is negative; this is
    rejected unless ``allow_negative_k`` (the formulas remain valid, only
    the mean-convexity convention is waived).
    """
    return _solve_hyperbolic_umbilic_spectrum(
        hyperbolic_spectrum("umbilic", n=n, k=k), allow_negative_k=allow_negative_k
    )


def _solve_hyperbolic_cylinder_spectrum(spectrum: PrincipalSpectrum) -> FlowProfile:
    if spectrum.sf.epsilon != -1:
        raise WrongSpaceForm("spectrum is not hyperbolic")
    ks = spectrum.curvatures
    ms = spectrum.multiplicities
    if len(ks) != 2 or ks[0] <= 1.0 or abs(ks[0] * ks[1] - 1.0) > 1e-9:
        raise DomainError(
            f"cylinder needs curvatures (k1, 1/k1) with k1 > 1, got {ks!r}"
        )
    if ms[0] != ms[1]:
        raise DomainError(
            f"closed form needs equal multiplicities, got {ms!r};"
            " use the numeric route for the unequal extension"
        )
    a = 0.5 * (ks[0] + ks[1])
    return FlowProfile(
        spectrum=spectrum,
        case="hyp_cylinder",
        interval=(-math.inf, math.inf),
        params={"a": a, "m": ms[0]},
    )


def solve_hyperbolic_cylinder(m: int, k1: float) -> FlowProfile:
    """Eternal flow of an equal-multiplicity hyperbolic product cylinder.

    Curvature pair (k1, 1/k1) with k1 > 1, each of multiplicity m, so
    n = 2m; the two blocks telescope to cosh(2 mu) - a sinh(2 mu) with
    a = (k1 + 1/k1)/2 > 1.
    """
    return _solve_hyperbolic_cylinder_spectrum(
        hyperbolic_spectrum("cylinder", n=2 * m, k1=k1, m=m)
    )


def mean_convex_bound(g: int) -> float:
    """Least admissible top curvature for a mean-convex spherical family."""
    return math.cos(math.pi / (2 * g)) / math.sin(math.pi / (2 * g))


def _solve_sphere_spectrum(spectrum: PrincipalSpectrum) -> FlowProfile:
    if spectrum.sf.epsilon != 1:
        raise WrongSpaceForm("spectrum is not spherical")
    ms = spectrum.multiplicities
    if len(set(ms)) != 1:
        raise DomainError(
            f"closed form needs equal multiplicities, got {ms!r};"
            " use the numeric route for the unequal extension"
        )
    g = spectrum.g
    ks = spectrum.curvatures
    from .isocatalog import _sphere_curvatures_from_k1  # chain consistency check

    expected = _sphere_curvatures_from_k1(g, ks[0])
    worst = max(
        abs(k - ek) / max(1.0, abs(ek)) for k, ek in zip(ks, expected)
    )
    if worst > 1e-8:
        raise DomainError(
            f"curvatures {ks!r} do not form an isoparametric chain for g={g}"
        )
    a = math.fsum(ks) / g
    if a <= 0.0:
        raise NonMeanConvex(
            f"initial mean curvature {spectrum.mean_curvature!r} is not positive;"
            f" the family is mean-convex only for k1 > {mean_convex_bound(g)!r}",
            required=mean_convex_bound(g),
        )
    m = ms[0]
    t_star = 0.5 * m * math.log1p(a * a)
    return FlowProfile(
        spectrum=spectrum,
        case="sphere_g",
        interval=(-math.inf, t_star),
        params={"a": a, "m": m},
    )


def solve_sphere(g: int, m: int, k1: float) -> FlowProfile:
    """Ancient flow of an equal-multiplicity spherical family.

    The product of transported factors telescopes to
    cos(g mu) - a sin(g mu) with a = (sum of curvatures)/g, so the flow
    exists on (-inf, t_star) with t_star = (m/2) log(1 + a**2) and
    collapses onto the minimal member as t -> t_star.
    """
    return _solve_sphere_spectrum(sphere_spectrum_from_k1(g=g, k1=k1, m=m))


def solve(spectrum: PrincipalSpectrum, allow_negative_k: bool = False) -> FlowProfile:
    """Dispatch a spectrum to the closed-form solver matching its shape."""
    eps = spectrum.sf.epsilon
    if eps == 0:
        return _solve_euclidean_spectrum(spectrum)
    if eps == 1:
        return _solve_sphere_spectrum(spectrum)
    ks = spectrum.curvatures
    if len(ks) == 1:
        if abs(abs(ks[0]) - 1.0) <= 1e-12:
            return _solve_horosphere_spectrum(spectrum)
        return _solve_hyperbolic_umbilic_spectrum(
            spectrum, allow_negative_k=allow_negative_k
        )
    return _solve_hyperbolic_cylinder_spectrum(spectrum)


# ---------------------------------------------------------------------------
# endpoint structure


class MinimalInvariants(NamedTuple):
    """Exact integer invariants of a minimal spherical limit object."""

    shape_norm_sq: int
    scalar_curvature: int
    kind: str


def minimal_invariants(g: int, m: int) -> MinimalInvariants:
    """Invariants of the minimal member of a spherical family (n = g*m).

    Squared shape-operator norm n(g-1) and scalar curvature n(n-g), both
    exact integers; the tag names the classical type.
    """
    if g not in (1, 2, 3, 4, 6):
        raise DomainError(f"need g in {{1,2,3,4,6}}, got g={g!r}")
    if not isinstance(m, int) or m < 1:
        raise DomainError(f"multiplicity must be a positive integer, got {m!r}")
    n = g * m
    if g == 1:
        kind = "totally_geodesic"
    elif g == 2:
        kind = "clifford"
    else:
        kind = "cartan_type"
    return MinimalInvariants(n * (g - 1), n * (n - g), kind)


@dataclass(frozen=True)
class EndpointLimit:
    """What the flow degenerates to at one end of its interval.

    ``kind`` is one of 'focal' (collapse onto a lower-dimensional focal
    set), 'minimal' (mean curvature reaches zero on a smooth limit),
    'ideal_point' (horospheres shrinking to their center at infinity) or
    'unbounded' (surfaces leave every compact set).  ``vanishing`` lists
    indices of transport factors that tend to zero.
    """

    t: float
    kind: str
    dimension: int
    vanishing: tuple = ()
    extras: dict = field(default_factory=dict, compare=False)


def limit_summary(profile: FlowProfile):
    """(lower, upper) endpoint limits of a closed-form flow."""
    spec = profile.spectrum
    n = spec.n
    ms = spec.multiplicities
    lo, hi = profile.interval
    if profile.case in ("euclid_sphere", "euclid_cylinder"):
        lower = EndpointLimit(lo, "focal", n - ms[0], (0,))
        upper = EndpointLimit(hi, "unbounded", n)
    elif profile.case == "horo":
        lower = EndpointLimit(lo, "ideal_point", 0, (0,))
        upper = EndpointLimit(hi, "unbounded", n)
    elif profile.case == "hyp_umbilic":
        k = profile.params["k"]
        if abs(k) > 1.0:
            lower = EndpointLimit(lo, "focal", 0, (0,))
        else:
            lower = EndpointLimit(
                lo,
                "minimal",
                n,
                (),
                {
                    "kind": "totally_geodesic",
                    "shape_norm_sq": 0,
                    "scalar_curvature": -n * (n - 1),
                },
            )
        upper = EndpointLimit(hi, "unbounded", n)
    elif profile.case == "hyp_cylinder":
        lower = EndpointLimit(lo, "focal", n - ms[0], (0,))
        upper = EndpointLimit(hi, "unbounded", n)
    else:  # sphere_g
        lower = EndpointLimit(lo, "focal", n - ms[0], (0,))
        upper = EndpointLimit(
            hi, "minimal", n, (), minimal_invariants(spec.g, ms[0])._asdict()
        )
    return lower, upper


# ---------------------------------------------------------------------------
# serialization


def profile_to_dict(profile: FlowProfile) -> dict:
    lo, hi = profile.interval
    spec = profile.spectrum
    return {
        "case": profile.case,
        "epsilon": spec.sf.epsilon,
        "n": spec.n,
        "g": spec.g,
        "multiplicities": list(spec.multiplicities),
        "k1": spec.curvatures[0],
        "a": profile.a,
        "t_star": profile.t_star,
        "interval": [
            lo if math.isfinite(lo) else None,
            hi if math.isfinite(hi) else None,
        ],
        "classification": profile.classification,
    }


def profile_from_dict(data: dict) -> FlowProfile:
    try:
        case = data["case"]
        n = int(data["n"])
        ms = [int(m) for m in data["multiplicities"]]
        k1 = float(data["k1"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed profile record: {exc}") from exc
    if case in ("euclid_sphere", "euclid_cylinder"):
        profile = solve_euclidean(n=n, m=ms[0], r0=1.0 / k1)
    elif case == "horo":
        profile = solve_horosphere(n=n, k=k1)
    elif case == "hyp_umbilic":
        profile = solve_hyperbolic_umbilic(n=n, k=k1, allow_negative_k=k1 < 0.0)
    elif case == "hyp_cylinder":
        profile = solve_hyperbolic_cylinder(m=ms[0], k1=k1)
    elif case == "sphere_g":
        profile = solve_sphere(g=len(ms), m=ms[0], k1=k1)
    else:
        raise DomainError(f"unknown case {case!r}")
    stored = data.get("classification")
    if stored is not None and stored != profile.classification:
        raise DomainError(
            f"stored classification {stored!r} does not match"
            f" solved {profile.classification!r}"
        )
    return profile
