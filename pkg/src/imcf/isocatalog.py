"""Catalog of isoparametric hypersurfaces and their curvature spectra.

Generators build :class:`PrincipalSpectrum` objects for the classical
families:

* spheres/cylinders in Euclidean space,
* horospheres, umbilic hypersurfaces and product cylinders in hyperbolic
  space,
* families in the round sphere with g in {1, 2, 3, 4, 6} distinct
  curvatures, parametrized either by the initial angle ``s`` (all
  curvatures are ``cot(s + (j-1)*pi/g)``) or by the largest curvature
  ``k1``.

``verify_identities`` evaluates the algebraic relations tying the tuple of
spherical curvatures to ``k1`` alone.  ``example_immersion`` returns
concrete parametrized hypersurfaces used by the visual and acceptance
layers, and ``check_isoparametric`` is an independent finite-difference
oracle: it estimates the mean curvature of parallel hypersurfaces from
second-order differences of the immersion itself and compares the field
against the transported spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSample,
    DomainError,
    FocalDegeneracy,
    UnknownName,
    WrongSpaceForm,
)
from .spaceform import (
    EUCLIDEAN,
    HYPERBOLIC,
    SPHERICAL,
    PrincipalSpectrum,
    SpaceForm,
    mean_curvature_parallel,
)

SQRT3 = math.sqrt(3.0)

# Lower bounds on k1 for the spherical families (strict, with a guard band
# so values within 1e-9 of the bound are rejected as numerically unsafe).
ADMISSIBLE_K1 = {2: 0.0, 3: SQRT3, 4: 1.0, 6: SQRT3}
K1_GUARD = 1e-9

SPHERE_G_VALUES = (1, 2, 3, 4, 6)


# ---------------------------------------------------------------------------
# generators


def sphere_spectrum_from_s(g: int, s: float, m: int) -> PrincipalSpectrum:
    """Spherical spectrum from the initial angle: k_j = cot(s + (j-1) pi/g).

    Requires ``0 < s < pi/g``; every curvature has multiplicity ``m`` and
    the hypersurface dimension is ``n = g*m``.
    """
    _check_sphere_args(g, m)
    if not (0.0 < s < math.pi / g):
        raise DomainError(f"angle s={s!r} outside (0, pi/{g})")
    ks = []
    for j in range(g):
        ang = s + j * math.pi / g
        ks.append(math.cos(ang) / math.sin(ang))
    return _sphere_spectrum(g, m, ks, s)


def sphere_spectrum_from_k1(g: int, k1: float, m: int) -> PrincipalSpectrum:
    """Spherical spectrum from its largest curvature.

    The remaining curvatures are rational expressions in ``k1``; the
    admissible ranges are k1 > 0 (g=2), k1 > 1 (g=4) and k1 > sqrt(3)
    (g=3, 6).  For g=1 any nonzero slope is allowed.
    """
    _check_sphere_args(g, m)
    k1 = float(k1)
    if g in ADMISSIBLE_K1 and k1 <= ADMISSIBLE_K1[g] + K1_GUARD:
        raise DomainError(
            f"k1={k1!r} not admissible for g={g}: need k1 > {ADMISSIBLE_K1[g]!r}"
        )
    ks = _sphere_curvatures_from_k1(g, k1)
    s = math.atan2(1.0, k1)
    return _sphere_spectrum(g, m, ks, s)


def _sphere_curvatures_from_k1(g: int, k1: float):
    if g == 1:
        return [k1]
    if g == 2:
        return [k1, -1.0 / k1]
    if g == 3:
        return [
            k1,
            (SQRT3 * k1 - 3.0) / (3.0 * k1 + SQRT3),
            (SQRT3 * k1 + 3.0) / (SQRT3 - 3.0 * k1),
        ]
    if g == 4:
        return [
            k1,
            (k1 - 1.0) / (k1 + 1.0),
            -1.0 / k1,
            (k1 + 1.0) / (1.0 - k1),
        ]
    # g == 6
    return [
        k1,
        (SQRT3 * k1 - 1.0) / (k1 + SQRT3),
        (SQRT3 * k1 - 3.0) / (3.0 * k1 + SQRT3),
        -1.0 / k1,
        (SQRT3 * k1 + 3.0) / (SQRT3 - 3.0 * k1),
        (SQRT3 * k1 + 1.0) / (SQRT3 - k1),
    ]


def _check_sphere_args(g: int, m: int) -> None:
    if g not in SPHERE_G_VALUES:
        raise DomainError(f"g={g!r} is not one of {SPHERE_G_VALUES}")
    if not isinstance(m, int) or m < 1:
        raise DomainError(f"multiplicity m={m!r} must be a positive integer")


def _sphere_spectrum(g, m, ks, s) -> PrincipalSpectrum:
    if g >= 2 and not all(a > b for a, b in zip(ks, ks[1:])):
        raise DomainError(f"curvatures not strictly decreasing: {ks}")
    meta = {"s": s, "tau": math.cos(g * s)}
    return PrincipalSpectrum(
        sf=SPHERICAL, n=g * m, entries=tuple((k, m) for k in ks), meta=meta
    )


def euclidean_spectrum(n: int, m: int, r0: float) -> PrincipalSpectrum:
    """Sphere (m = n) or spherical cylinder (m < n) of radius ``r0``.

    Curvature 1/r0 with multiplicity m, padded with a flat block of
    multiplicity n-m.
    """
    if not (isinstance(n, int) and isinstance(m, int) and 1 <= m <= n):
        raise DomainError(f"need integers 1 <= m <= n, got m={m!r}, n={n!r}")
    if not r0 > 0.0:
        raise DomainError(f"radius r0={r0!r} must be positive")
    entries = [(1.0 / r0, m)]
    if m < n:
        entries.append((0.0, n - m))
    return PrincipalSpectrum(sf=EUCLIDEAN, n=n, entries=tuple(entries))


def hyperbolic_spectrum(
    case: str, n: int, k: float | None = None, k1: float | None = None, m: int | None = None
) -> PrincipalSpectrum:
    """Hyperbolic catalog entry: 'horosphere', 'umbilic' or 'cylinder'.

    * horosphere: all curvatures equal to k with |k| = 1 (both sign
      conventions are accepted),
    * umbilic:    all curvatures equal to k with k not in {-1, 0, 1},
    * cylinder:   curvature pair (k1, 1/k1) with k1 > 1 and multiplicities
      (m, n - m).
    """
    if not (isinstance(n, int) and n >= 1):
        raise DomainError(f"dimension n={n!r} must be a positive integer")
    if case == "horosphere":
        if k is None or abs(abs(k) - 1.0) > 1e-12:
            raise DomainError(f"horosphere needs k = +1 or -1, got {k!r}")
        return PrincipalSpectrum(sf=HYPERBOLIC, n=n, entries=((float(k), n),))
    if case == "umbilic":
        if k is None or abs(k) < 1e-12 or abs(abs(k) - 1.0) < 1e-12:
            raise DomainError(
                f"umbilic needs k outside {{-1, 0, 1}}, got {k!r}"
                " (use case='horosphere' for |k| = 1)"
            )
        return PrincipalSpectrum(sf=HYPERBOLIC, n=n, entries=((float(k), n),))
    if case == "cylinder":
        if k1 is None or k1 <= 1.0 + K1_GUARD:
            raise DomainError(f"cylinder needs k1 > 1, got {k1!r}")
        if m is None or not isinstance(m, int) or not (1 <= m <= n - 1):
            raise DomainError(f"cylinder needs integer 1 <= m <= n-1, got {m!r}")
        k1 = float(k1)
        meta = {"equal_multiplicities": (2 * m == n)}
        return PrincipalSpectrum(
            sf=HYPERBOLIC, n=n, entries=((k1, m), (1.0 / k1, n - m)), meta=meta
        )
    raise UnknownName(f"unknown hyperbolic case {case!r}")


# ---------------------------------------------------------------------------
# curvature identities


@dataclass(frozen=True)
class IdentityReport:
    """Residuals of the k1-driven curvature relations for one spectrum."""

    g: int
    k1: float
    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def ok(self, tol: float = 1e-11) -> bool:
        return self.max_residual <= tol


def verify_identities(spectrum: PrincipalSpectrum) -> IdentityReport:
    """Evaluate the algebraic relations among spherical curvatures.

    Residuals are absolute values of expressions that vanish identically
    for a correctly generated spectrum.  g=1 has no relations and g=2 only
    the product relation k1*k2 = -1.
    """
    if spectrum.sf.epsilon != 1:
        raise WrongSpaceForm("curvature identities apply to spherical spectra")
    ks = spectrum.curvatures
    g = spectrum.g
    k1 = ks[0]
    res: dict = {}
    if g == 2:
        res["pair_product"] = abs(ks[0] * ks[1] + 1.0)
    elif g == 3:
        den = 3.0 * k1 * k1 - 1.0
        res["sum"] = abs(math.fsum(ks) - 3.0 * k1 * (k1 * k1 - 3.0) / den)
        pair = ks[0] * ks[1] + ks[0] * ks[2] + ks[1] * ks[2]
        res["pair_sum"] = abs(pair + 3.0)
        res["triple_product"] = abs(ks[0] * ks[1] * ks[2] + k1 * (k1 * k1 - 3.0) / den)
    elif g == 4:
        k2 = k1 * k1
        res["sum"] = abs(math.fsum(ks) - (k2 * k2 - 6.0 * k2 + 1.0) / (k1 * (k2 - 1.0)))
        res["cross_product_13"] = abs(ks[0] * ks[2] + 1.0)
        res["cross_product_24"] = abs(ks[1] * ks[3] + 1.0)
        res["bracket"] = abs((ks[0] + ks[2]) * (ks[1] + ks[3]) + 4.0)
        res["product"] = abs(ks[0] * ks[1] * ks[2] * ks[3] - 1.0)
    elif g == 6:
        k2 = k1 * k1
        num = 3.0 * (k2 * k2 * k2 - 15.0 * k2 * k2 + 15.0 * k2 - 1.0)
        den = 3.0 * k1 * k2 * k2 - 10.0 * k1 * k2 + 3.0 * k1
        res["sum"] = abs(math.fsum(ks) - num / den)
        res["opposite_14"] = abs(ks[0] * ks[3] + 1.0)
        res["opposite_25"] = abs(ks[1] * ks[4] + 1.0)
        res["opposite_36"] = abs(ks[2] * ks[5] + 1.0)
        prod = 1.0
        for k in ks:
            prod *= k
        res["product"] = abs(prod + 1.0)
    return IdentityReport(g=g, k1=k1, residuals=res)


# ---------------------------------------------------------------------------
# concrete immersions


@dataclass(frozen=True)
class Immersion:
    """A parametrized hypersurface with known curvature spectrum.

    ``point_fn`` and ``normal_fn`` map parameter arrays (broadcastable
    ``u, v``) to ambient coordinate arrays with a trailing coordinate
    axis.  ``param_domain`` holds ``(lo, hi, periodic)`` per parameter and
    drives mesh sampling; ``check_domain`` optionally restricts the region
    used by finite-difference curvature checks to where the
    parametrization is well conditioned.
    """

    name: str
    sf: SpaceForm
    spectrum: PrincipalSpectrum
    param_domain: tuple
    point_fn: object = field(repr=False)
    normal_fn: object = field(repr=False)
    check_domain: tuple | None = field(default=None, repr=False)

    def point(self, u, v):
        return self.point_fn(np.asarray(u, dtype=float), np.asarray(v, dtype=float))

    def normal(self, u, v):
        return self.normal_fn(np.asarray(u, dtype=float), np.asarray(v, dtype=float))


def _stack(*comps):
    return np.stack(np.broadcast_arrays(*comps), axis=-1)


def _horosphere_immersion() -> Immersion:
    def point(th, ph):
        c, s = np.cos(th), np.sin(th)
        w = 1.0 / (1.0 + c)
        return _stack(w * (1.5 + c), w * s * np.cos(ph), w * s * np.sin(ph), w * (-0.5 - c))

    def normal(th, ph):
        c, s = np.cos(th), np.sin(th)
        w = 1.0 / (1.0 + c)
        return _stack(w * (1.0 + 0.5 * c), w * s * np.cos(ph), w * s * np.sin(ph), w * (-1.0 - 1.5 * c))

    spec = hyperbolic_spectrum("horosphere", n=2, k=-1.0)
    return Immersion(
        name="horosphere",
        sf=HYPERBOLIC,
        spectrum=spec,
        param_domain=((0.0, 2.8, False), (0.0, 2.0 * math.pi, True)),
        point_fn=point,
        normal_fn=normal,
        check_domain=((0.3, 2.0), (0.0, 2.0 * math.pi)),
    )


def _hyperbolic_cylinder_immersion() -> Immersion:
    r2 = math.sqrt(2.0)

    def point(th, ph):
        return _stack(r2 * np.cosh(ph), np.cos(th), np.sin(th), r2 * np.sinh(ph))

    def normal(th, ph):
        return _stack(-np.cosh(ph), -r2 * np.cos(th), -r2 * np.sin(th), -np.sinh(ph))

    spec = hyperbolic_spectrum("cylinder", n=2, k1=r2, m=1)
    return Immersion(
        name="hyperbolic_cylinder",
        sf=HYPERBOLIC,
        spectrum=spec,
        param_domain=((0.0, 2.0 * math.pi, True), (-2.5, 2.5, False)),
        point_fn=point,
        normal_fn=normal,
        check_domain=((0.0, 2.0 * math.pi), (-2.0, 2.0)),
    )


def _hopf_torus_immersion() -> Immersion:
    r3 = math.sqrt(3.0) / 3.0
    r2 = math.sqrt(2.0)

    def point(th, ph):
        return _stack(r3 * r2 * np.cos(ph), r3 * r2 * np.sin(ph), r3 * np.cos(th), r3 * np.sin(th))

    def normal(th, ph):
        return _stack(r3 * np.cos(ph), r3 * np.sin(ph), -r3 * r2 * np.cos(th), -r3 * r2 * np.sin(th))

    spec = sphere_spectrum_from_k1(2, r2, 1)
    return Immersion(
        name="hopf_torus",
        sf=SPHERICAL,
        spectrum=spec,
        param_domain=((0.0, 2.0 * math.pi, True), (0.0, 2.0 * math.pi, True)),
        point_fn=point,
        normal_fn=normal,
    )


def _clifford_immersion() -> Immersion:
    w = 1.0 / math.sqrt(2.0)

    def point(th, ph):
        return _stack(w * np.cos(th), w * np.sin(th), w * np.cos(ph), w * np.sin(ph))

    def normal(th, ph):
        return _stack(-w * np.cos(th), -w * np.sin(th), w * np.cos(ph), w * np.sin(ph))

    spec = PrincipalSpectrum(sf=SPHERICAL, n=2, entries=((1.0, 1), (-1.0, 1)))
    return Immersion(
        name="clifford",
        sf=SPHERICAL,
        spectrum=spec,
        param_domain=((0.0, 2.0 * math.pi, True), (0.0, 2.0 * math.pi, True)),
        point_fn=point,
        normal_fn=normal,
    )


def _round_sphere_immersion(r0: float) -> Immersion:
    def point(th, ph):
        return _stack(r0 * np.sin(th) * np.cos(ph), r0 * np.sin(th) * np.sin(ph), r0 * np.cos(th))

    def normal(th, ph):
        # Inward normal: curvature 1/r0 is positive with this choice.
        return _stack(-np.sin(th) * np.cos(ph), -np.sin(th) * np.sin(ph), -np.cos(th))

    spec = euclidean_spectrum(n=2, m=2, r0=r0)
    return Immersion(
        name="round_sphere",
        sf=EUCLIDEAN,
        spectrum=spec,
        param_domain=((0.0, math.pi, False), (0.0, 2.0 * math.pi, True)),
        point_fn=point,
        normal_fn=normal,
        check_domain=((0.3, math.pi - 0.3), (0.0, 2.0 * math.pi)),
    )


def _euclidean_cylinder_immersion(r0: float) -> Immersion:
    def point(th, z):
        return _stack(r0 * np.cos(th), r0 * np.sin(th), z + np.zeros_like(th))

    def normal(th, z):
        return _stack(-np.cos(th), -np.sin(th), np.zeros_like(th + z))

    spec = euclidean_spectrum(n=2, m=1, r0=r0)
    return Immersion(
        name="euclidean_cylinder",
        sf=EUCLIDEAN,
        spectrum=spec,
        param_domain=((0.0, 2.0 * math.pi, True), (-2.0, 2.0, False)),
        point_fn=point,
        normal_fn=normal,
    )


EXAMPLE_NAMES = (
    "horosphere",
    "hyperbolic_cylinder",
    "hopf_torus",
    "round_sphere",
    "euclidean_cylinder",
    "clifford",
)


def example_immersion(name: str, r0: float = 1.0) -> Immersion:
    """Build a catalog immersion by name.

    ``r0`` only affects the Euclidean entries (sphere/cylinder radius).
    """
    if name == "horosphere":
        return _horosphere_immersion()
    if name == "hyperbolic_cylinder":
        return _hyperbolic_cylinder_immersion()
    if name == "hopf_torus":
        return _hopf_torus_immersion()
    if name == "round_sphere":
        return _round_sphere_immersion(r0)
    if name == "euclidean_cylinder":
        return _euclidean_cylinder_immersion(r0)
    if name == "clifford":
        return _clifford_immersion()
    raise UnknownName(f"unknown immersion {name!r}; choose from {EXAMPLE_NAMES}")


def _cross4(a, b, c):
    """Vector orthogonal to three 4-vectors (batched over leading axes)."""
    rows = np.stack([a, b, c], axis=-2)
    cols = [np.delete(rows, i, axis=-1) for i in range(4)]
    dets = [np.linalg.det(m) for m in cols]
    return np.stack([dets[0], -dets[1], dets[2], -dets[3]], axis=-1)


def perturbed_torus_immersion(scale: float = 1.1) -> Immersion:
    """Negative control: torus with one axis scaled, renormalized to the sphere.

    The scaling makes the curvature field depend on the parameter, so the
    surface is not isoparametric; the attached (deliberately stale)
    spectrum is the unscaled one and must fail ``check_isoparametric``.
    """
    w = 1.0 / math.sqrt(2.0)

    def _parts(th, ph):
        p = _stack(scale * w * np.cos(th), w * np.sin(th), w * np.cos(ph), w * np.sin(ph))
        p_th = _stack(-scale * w * np.sin(th), w * np.cos(th), np.zeros_like(th + ph), np.zeros_like(th + ph))
        p_ph = _stack(np.zeros_like(th + ph), np.zeros_like(th + ph), -w * np.sin(ph), w * np.cos(ph))
        rho = np.sqrt(np.sum(p * p, axis=-1, keepdims=True))
        f = p / rho
        # d(p/|p|) = dp/|p| - p (p . dp)/|p|^3
        f_th = p_th / rho - p * np.sum(p * p_th, axis=-1, keepdims=True) / rho**3
        f_ph = p_ph / rho - p * np.sum(p * p_ph, axis=-1, keepdims=True) / rho**3
        return f, f_th, f_ph

    def point(th, ph):
        return _parts(th, ph)[0]

    def normal(th, ph):
        f, f_th, f_ph = _parts(th, ph)
        raw = _cross4(f, f_th, f_ph)
        raw = raw - f * np.sum(raw * f, axis=-1, keepdims=True)
        raw = raw / np.sqrt(np.sum(raw * raw, axis=-1, keepdims=True))
        ref = _stack(-np.cos(th), -np.sin(th), np.cos(ph), np.sin(ph))
        sign = np.sign(np.sum(raw * ref, axis=-1, keepdims=True))
        return raw * sign

    spec = PrincipalSpectrum(sf=SPHERICAL, n=2, entries=((1.0, 1), (-1.0, 1)))
    return Immersion(
        name="perturbed_torus",
        sf=SPHERICAL,
        spectrum=spec,
        param_domain=((0.0, 2.0 * math.pi, True), (0.0, 2.0 * math.pi, True)),
        point_fn=point,
        normal_fn=normal,
    )


# ---------------------------------------------------------------------------
# finite-difference isoparametricity oracle


@dataclass(frozen=True)
class IsoparametricRow:
    mu: float
    h_transport: float
    h_fd_min: float
    h_fd_max: float
    agreement: float

    @property
    def spread(self) -> float:
        return self.h_fd_max - self.h_fd_min


@dataclass(frozen=True)
class IsoparametricReport:
    immersion: str
    rows: tuple
    spread_tol: float
    agree_tol: float

    @property
    def passed(self) -> bool:
        return all(
            r.spread <= self.spread_tol and r.agreement <= self.agree_tol
            for r in self.rows
        )


def _fd_mean_curvature(imm: Immersion, mu: float, uu, vv, step: float):
    """Mean curvature of the parallel surface from central differences.

    Builds first and second fundamental forms of the transported surface
    out of O(step**2)-accurate parameter derivatives and returns the trace
    of the shape operator.
    """
    sf = imm.sf
    c = sf.c(mu)
    s = sf.s(mu)

    def par_point(u, v):
        return c * imm.point(u, v) + s * imm.normal(u, v)

    def par_normal(u, v):
        return -sf.epsilon * s * imm.point(u, v) + c * imm.normal(u, v)

    fu = (par_point(uu + step, vv) - par_point(uu - step, vv)) / (2.0 * step)
    fv = (par_point(uu, vv + step) - par_point(uu, vv - step)) / (2.0 * step)
    nu = (par_normal(uu + step, vv) - par_normal(uu - step, vv)) / (2.0 * step)
    nv = (par_normal(uu, vv + step) - par_normal(uu, vv - step)) / (2.0 * step)

    e1 = sf.dot(fu, fu)
    f1 = sf.dot(fu, fv)
    g1 = sf.dot(fv, fv)
    e2 = -sf.dot(nu, fu)
    f2 = -0.5 * (sf.dot(nu, fv) + sf.dot(nv, fu))
    g2 = -sf.dot(nv, fv)

    det = e1 * g1 - f1 * f1
    if np.any(np.abs(det) < 1e-12 * np.maximum(1.0, (e1 + g1) ** 2)):
        raise DegenerateSample(
            f"first fundamental form degenerates on the grid at mu={mu!r}"
        )
    return (e2 * g1 - 2.0 * f2 * f1 + g2 * e1) / det


def check_isoparametric(
    imm: Immersion,
    mu_samples=(0.0, -0.2, 0.2),
    grid=(32, 32),
    step: float = 1e-4,
    spread_tol: float = 1e-6,
    agree_tol: float = 1e-5,
) -> IsoparametricReport:
    """Test constancy of the parallel mean curvature field.

    For each ``mu`` the mean curvature of the parallel surface is
    estimated on a parameter grid purely by finite differences; the spread
    (max - min) must vanish for an isoparametric immersion, and the field
    must match the value transported from the attached spectrum.
    """
    dom = imm.check_domain or tuple((lo, hi) for lo, hi, _ in imm.param_domain)
    (ulo, uhi), (vlo, vhi) = dom[0][:2], dom[1][:2]
    us = ulo + (np.arange(grid[0]) + 0.5) * (uhi - ulo) / grid[0]
    vs = vlo + (np.arange(grid[1]) + 0.5) * (vhi - vlo) / grid[1]
    uu, vv = np.meshgrid(us, vs, indexing="ij")

    rows = []
    for mu in mu_samples:
        try:
            h_ref = mean_curvature_parallel(imm.spectrum, float(mu))
        except FocalDegeneracy as exc:
            raise DegenerateSample(f"mu={mu!r} is a focal distance: {exc}") from exc
        h_fd = _fd_mean_curvature(imm, float(mu), uu, vv, step)
        rows.append(
            IsoparametricRow(
                mu=float(mu),
                h_transport=h_ref,
                h_fd_min=float(np.min(h_fd)),
                h_fd_max=float(np.max(h_fd)),
                agreement=float(np.max(np.abs(h_fd - h_ref))),
            )
        )
    return IsoparametricReport(
        immersion=imm.name, rows=tuple(rows), spread_tol=spread_tol, agree_tol=agree_tol
    )


# ---------------------------------------------------------------------------
# serialization


def spectrum_to_dict(spectrum: PrincipalSpectrum) -> dict:
    return {
        "epsilon": spectrum.sf.epsilon,
        "n": spectrum.n,
        "entries": [{"k": k, "m": m} for k, m in spectrum.entries],
    }


def spectrum_from_dict(data: dict) -> PrincipalSpectrum:
    try:
        sf = SpaceForm(int(data["epsilon"]))
        entries = tuple((float(e["k"]), int(e["m"])) for e in data["entries"])
        return PrincipalSpectrum(
            sf=sf, n=int(data["n"]), entries=entries, meta=dict(data.get("meta", {}))
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed spectrum record: {exc}") from exc
