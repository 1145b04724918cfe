"""Simply connected space forms and the parallel-hypersurface calculus.

The three models, selected by the curvature sign ``epsilon``:

* ``epsilon = +1``: unit sphere ``<x, x> = 1`` in Euclidean ambient space,
* ``epsilon =  0``: Euclidean space itself (no ambient quadric),
* ``epsilon = -1``: upper sheet of the hyperboloid ``<x, x> = -1``,
  ``x[0] >= 1``, inside Minkowski space whose first coordinate is timelike.

For a hypersurface with position ``F`` and unit normal ``N``, the parallel
hypersurface at signed distance ``mu`` is ``C(mu) F + S(mu) N`` where
``C,S`` are the curvature-adapted cosine/sine pair (``cos/sin``, ``1/mu``,
``cosh/sinh``).  Everything downstream rests on three scalar transport
factors per principal curvature ``k``:

* metric factor   ``(C - k S)**2``        (first fundamental form scaling),
* shape factor    ``(C - k S)(eps S + k C)``  (second fundamental form),
* curvature       ``(eps S + k C) / (C - k S)``.

Mean curvature is the *sum* (not average) of principal curvatures counted
with multiplicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    FactorNonPositive,
    FocalDegeneracy,
    NotOnQuadric,
    NotUnitNormal,
)

# Absolute floor under |C - k S| below which transport is meaningless.
FOCAL_TOL = 1e-14
# Default tolerance for membership/orthonormality validation, applied
# relative to max(1, squared Euclidean size) so large hyperboloid points
# are judged fairly.
VALIDATE_TOL = 1e-9


def _is_scalar(x) -> bool:
    return isinstance(x, (int, float))


@dataclass(frozen=True)
class SpaceForm:
    """A space form of constant curvature ``epsilon`` in {-1, 0, +1}."""

    epsilon: int

    def __post_init__(self):
        if self.epsilon not in (-1, 0, 1):
            raise DomainError(f"epsilon must be -1, 0 or +1, got {self.epsilon!r}")

    # -- trigonometric pair -------------------------------------------------

    def c(self, mu):
        """Curvature-adapted cosine: cos, 1, or cosh of ``mu``."""
        if _is_scalar(mu):
            if self.epsilon > 0:
                return math.cos(mu)
            if self.epsilon < 0:
                return math.cosh(mu)
            return 1.0
        mu = np.asarray(mu, dtype=float)
        if self.epsilon > 0:
            return np.cos(mu)
        if self.epsilon < 0:
            return np.cosh(mu)
        return np.ones_like(mu)

    def s(self, mu):
        """Curvature-adapted sine: sin, identity, or sinh of ``mu``."""
        if _is_scalar(mu):
            if self.epsilon > 0:
                return math.sin(mu)
            if self.epsilon < 0:
                return math.sinh(mu)
            return float(mu)
        mu = np.asarray(mu, dtype=float)
        if self.epsilon > 0:
            return np.sin(mu)
        if self.epsilon < 0:
            return np.sinh(mu)
        return mu

    # -- ambient bilinear form ----------------------------------------------

    def dot(self, x, y):
        """Ambient inner product; Minkowski (first coord timelike) if epsilon=-1."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        prod = x * y
        if self.epsilon < 0:
            return np.sum(prod[..., 1:], axis=-1) - prod[..., 0]
        return np.sum(prod, axis=-1)

    def quadric_defect(self, x):
        """|<x,x> - epsilon| for the curved models, 0 for Euclidean space."""
        if self.epsilon == 0:
            return np.zeros(np.shape(x)[:-1])
        return np.abs(self.dot(x, x) - self.epsilon)


EUCLIDEAN = SpaceForm(0)
SPHERICAL = SpaceForm(1)
HYPERBOLIC = SpaceForm(-1)


def c_eps(sf: SpaceForm, mu):
    return sf.c(mu)


def s_eps(sf: SpaceForm, mu):
    return sf.s(mu)


def transport_pair(sf: SpaceForm, k: float, mu):
    """The factor pair (C - k S, eps S + k C) without cancellation.

    In hyperbolic space both combinations are rewritten over exp(+-mu),
    where each coefficient is exact in k; the naive cosh/sinh difference
    loses exp(|mu|)/|C - k S| digits (all of them on a horosphere).
    Scalars in, scalars out; arrays broadcast.
    """
    if sf.epsilon == -1:
        if _is_scalar(mu):
            ep, em = math.exp(mu), math.exp(-mu)
        else:
            mu = np.asarray(mu, dtype=float)
            ep, em = np.exp(mu), np.exp(-mu)
        den = 0.5 * ((1.0 - k) * ep + (1.0 + k) * em)
        num = 0.5 * ((k - 1.0) * ep + (k + 1.0) * em)
        return den, num
    c = sf.c(mu)
    s = sf.s(mu)
    return c - k * s, sf.epsilon * s + k * c


def validate_point(sf: SpaceForm, point, tol: float = VALIDATE_TOL) -> None:
    """Check quadric membership (and the upper sheet for epsilon=-1).

    The defect is measured relative to max(1, squared Euclidean norm): a
    point with coordinates of size R carries round-off of order R**2 in
    the quadric equation, so an absolute test would reject legitimate
    far-out hyperboloid points.
    """
    if sf.epsilon == 0:
        return
    x = np.asarray(point, dtype=float)
    scale = np.maximum(1.0, np.sum(x * x, axis=-1))
    defect = sf.quadric_defect(x)
    if np.any(defect > tol * scale):
        raise NotOnQuadric(
            f"point defect {float(np.max(defect)):.3e} exceeds {tol:g} (scaled)"
        )
    if sf.epsilon < 0 and np.any(x[..., 0] < 1.0 - tol):
        raise NotOnQuadric("hyperboloid point not on the upper sheet (x[0] < 1)")


def validate_normal(sf: SpaceForm, point, normal, tol: float = VALIDATE_TOL) -> None:
    """Check that ``normal`` is unit and (for curved models) orthogonal to ``point``."""
    nrm = np.asarray(normal, dtype=float)
    scale = np.maximum(1.0, np.sum(nrm * nrm, axis=-1))
    unit_defect = np.abs(sf.dot(nrm, nrm) - 1.0)
    if np.any(unit_defect > tol * scale):
        raise NotUnitNormal(
            f"normal unit defect {float(np.max(unit_defect)):.3e} exceeds {tol:g}"
        )
    if sf.epsilon != 0:
        x = np.asarray(point, dtype=float)
        xscale = np.maximum(scale, np.sum(x * x, axis=-1))
        ortho = np.abs(sf.dot(x, nrm))
        if np.any(ortho > tol * xscale):
            raise NotUnitNormal(
                f"normal not orthogonal to position (defect {float(np.max(ortho)):.3e})"
            )


def parallel_point(point, normal, mu, sf: SpaceForm, validate: bool = True):
    """Position of the parallel hypersurface at distance ``mu``.

    ``C(mu) * point + S(mu) * normal`` for the curved models,
    ``point + mu * normal`` in Euclidean space.  Broadcasts over leading
    axes; the last axis holds ambient coordinates.
    """
    if validate:
        validate_point(sf, point)
        validate_normal(sf, point, normal)
    point = np.asarray(point, dtype=float)
    normal = np.asarray(normal, dtype=float)
    c = np.asarray(sf.c(mu), dtype=float)[..., None]
    s = np.asarray(sf.s(mu), dtype=float)[..., None]
    return c * point + s * normal


def parallel_normal(point, normal, mu, sf: SpaceForm, validate: bool = True):
    """Unit normal transported to the parallel hypersurface at ``mu``.

    ``-eps S(mu) * point + C(mu) * normal``; reduces to ``normal`` in the
    Euclidean model.  Transport preserves the ambient quadric, unit length
    and orthogonality exactly (up to round-off).
    """
    if validate:
        validate_point(sf, point)
        validate_normal(sf, point, normal)
    point = np.asarray(point, dtype=float)
    normal = np.asarray(normal, dtype=float)
    c = np.asarray(sf.c(mu), dtype=float)[..., None]
    s = np.asarray(sf.s(mu), dtype=float)[..., None]
    return -sf.epsilon * s * point + c * normal


def parallel_curvature(k: float, mu, sf: SpaceForm):
    """Principal curvature transported to distance ``mu``.

    ``(eps S + k C) / (C - k S)``.  Raises :class:`FocalDegeneracy` when the
    denominator is within ``FOCAL_TOL`` of zero (focal distance reached).
    """
    den, num = transport_pair(sf, k, mu)
    if _is_scalar(den):
        if abs(den) < FOCAL_TOL:
            raise FocalDegeneracy(f"focal distance at mu={mu!r} for k={k!r}")
    elif np.any(np.abs(den) < FOCAL_TOL):
        raise FocalDegeneracy(f"focal distance inside mu array for k={k!r}")
    return num / den


@dataclass(frozen=True)
class PrincipalSpectrum:
    """Constant principal curvatures of a hypersurface, with multiplicities.

    ``entries`` is a tuple of ``(curvature, multiplicity)`` pairs with
    pairwise distinct curvatures; multiplicities sum to the hypersurface
    dimension ``n``.  ``meta`` carries optional derived metadata (for
    example the generating angle of a spherical family) and takes no part
    in comparisons.
    """

    sf: SpaceForm
    n: int
    entries: tuple
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.entries:
            raise DomainError("spectrum needs at least one curvature entry")
        ks = [e[0] for e in self.entries]
        ms = [e[1] for e in self.entries]
        if any((not isinstance(m, int)) or m < 1 for m in ms):
            raise DomainError(f"multiplicities must be positive integers, got {ms}")
        if sum(ms) != self.n:
            raise DomainError(
                f"multiplicities {ms} sum to {sum(ms)}, expected n={self.n}"
            )
        if len(set(ks)) != len(ks):
            raise DomainError(f"principal curvatures must be distinct, got {ks}")
        if len(ks) > self.n:
            raise DomainError("more distinct curvatures than dimensions")
        object.__setattr__(self, "entries", tuple((float(k), int(m)) for k, m in self.entries))

    @property
    def g(self) -> int:
        """Number of distinct principal curvatures."""
        return len(self.entries)

    @property
    def curvatures(self):
        return tuple(k for k, _ in self.entries)

    @property
    def multiplicities(self):
        return tuple(m for _, m in self.entries)

    @property
    def mean_curvature(self) -> float:
        """Mean curvature (sum convention) of the base hypersurface."""
        return math.fsum(k * m for k, m in self.entries)


@dataclass(frozen=True)
class ParallelData:
    """Transport factors of one curvature entry at a fixed distance."""

    metric_factor: float
    shape_factor: float
    curvature: float
    multiplicity: int


def parallel_data(spectrum: PrincipalSpectrum, mu: float):
    """Metric/shape/curvature factors for every entry of ``spectrum`` at ``mu``."""
    sf = spectrum.sf
    out = []
    for j, (k, m) in enumerate(spectrum.entries):
        den, num = transport_pair(sf, k, mu)
        if abs(den) < FOCAL_TOL:
            raise FocalDegeneracy(
                f"focal distance at mu={mu!r} for curvature entry {j}", index=j
            )
        out.append(
            ParallelData(
                metric_factor=den * den,
                shape_factor=den * num,
                curvature=num / den,
                multiplicity=m,
            )
        )
    return tuple(out)


def mean_curvature_parallel(spectrum: PrincipalSpectrum, mu: float) -> float:
    """Mean curvature of the parallel hypersurface at distance ``mu``."""
    sf = spectrum.sf
    total = 0.0
    for j, (k, m) in enumerate(spectrum.entries):
        den, num = transport_pair(sf, k, mu)
        if abs(den) < FOCAL_TOL:
            raise FocalDegeneracy(
                f"focal distance at mu={mu!r} for curvature entry {j}", index=j
            )
        total += m * num / den
    return total


def log_product(spectrum: PrincipalSpectrum, mu):
    """Log of the product of transported factors: sum of m_j*log(C - k_j*S).

    This is the left-hand side of the flow's defining equation in log
    form.  Accepts scalars or arrays; raises :class:`FactorNonPositive` if
    any factor leaves the positive basin around mu = 0.
    """
    scalar = _is_scalar(mu)
    mu_arr = np.asarray(mu, dtype=float)
    total = np.zeros_like(mu_arr)
    for j, (k, m) in enumerate(spectrum.entries):
        den, _ = transport_pair(spectrum.sf, k, mu_arr)
        if np.any(den <= 0.0):
            raise FactorNonPositive(
                f"transport factor {j} (k={k!r}) is not positive at mu={mu!r}"
            )
        total = total + m * np.log(den)
    return float(total) if scalar else total


def transport_product(spectrum: PrincipalSpectrum, mu):
    """Product of transported factors, powered over multiplicities.

    Evaluated directly as a product of integer powers, not as
    exp(log_product): the direct form keeps the relative error at a few
    ulp, which the absolute residual against exp(t) needs at large t.
    Factors may be negative here; basin enforcement is the caller's job.
    """
    scalar = _is_scalar(mu)
    mu_arr = np.asarray(mu, dtype=float)
    total = np.ones_like(mu_arr)
    for k, m in spectrum.entries:
        den, _ = transport_pair(spectrum.sf, k, mu_arr)
        total = total * den**m
    return float(total) if scalar else total


def mean_curvature_mu(spectrum: PrincipalSpectrum, mu):
    """Vectorized mean curvature of the parallel hypersurface at ``mu``.

    Unlike :func:`mean_curvature_parallel` this does not guard focal
    crossings (division yields inf); intended for interior evaluation.
    """
    scalar = _is_scalar(mu)
    mu_arr = np.asarray(mu, dtype=float)
    total = np.zeros_like(mu_arr)
    for k, m in spectrum.entries:
        den, num = transport_pair(spectrum.sf, k, mu_arr)
        total = total + m * num / den
    return float(total) if scalar else total
