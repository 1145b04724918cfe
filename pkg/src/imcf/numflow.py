"""Numeric route for the parallel-hypersurface flow.

Two independent ways to recover the distance function mu(t) without the
closed forms:

* ``integrate_mu`` integrates the scalar law mu' = -1/H(mu) with an
  embedded Dormand-Prince 4/5 pair and a PI step controller.  The error
  norm controls both the distance itself and the induced drift of the
  defining log-product (the drift scales with H, which can grow like
  exp(|t|), so controlling mu alone would not keep the product residual
  near the tolerance).
* ``solve_product_equation`` / ``continuation_sweep`` solve the defining
  equation sum_j m_j log(C - k_j S) = t directly with a damped Newton
  iteration, warm-started along a time grid.

Both routes watch for the same boundary phenomena: the mean curvature
reaching zero, a transport factor degenerating (focal collapse) and step
underflow.  ``estimate_boundary`` refines a path's boundary event (or
tags an eventless end as unbounded) by marching and bisecting in mu,
where every boundary is a simple sign change.

Spectra whose initial mean curvature is negative are integrated with the
same formulas (the equation is orientation-symmetric); the iteration
then tracks the sign of H and refuses to cross zero, exactly as in the
mean-convex case.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    FactorNonPositive,
    NoConvergence,
    NoEvent,
    PreconditionError,
)
from .isocatalog import spectrum_from_dict, spectrum_to_dict
from .spaceform import (
    PrincipalSpectrum,
    log_product,
    mean_curvature_mu,
    transport_pair,
)

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
TOL_RANGE = (1e-13, 1e-6)
METRIC_FLOOR = 1e-10
ENDS = ("lower", "upper")


class BoundaryKind(str, enum.Enum):
    MEAN_CURVATURE_ZERO = "mean_curvature_zero"
    FOCAL_DEGENERACY = "focal_degeneracy"
    STEP_UNDERFLOW = "step_underflow"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class BoundaryEvent:
    t: float
    kind: BoundaryKind
    mu: float | None = None
    direction: int = 0
    detail: str = ""


@dataclass(frozen=True)
class NumericPath:
    """Sampled numeric solution: rows (t, mu, H) sorted by t.

    ``t_span`` is the requested time window; a direction with no
    boundary event ran through its whole half of the window.
    """

    spectrum: PrincipalSpectrum
    tol: float
    samples: tuple
    boundary_events: tuple = ()
    t_span: tuple = (0.0, 0.0)
    extension: bool = False

    @property
    def t(self):
        return np.array([r[0] for r in self.samples])

    @property
    def mu(self):
        return np.array([r[1] for r in self.samples])

    @property
    def h(self):
        return np.array([r[2] for r in self.samples])

    def residual(self):
        """Per-sample defect |log-product(mu_i) - t_i| (relative form)."""
        return np.abs(log_product(self.spectrum, self.mu) - self.t)

    def event(self, kind: BoundaryKind) -> BoundaryEvent:
        for ev in self.boundary_events:
            if ev.kind is kind:
                return ev
        raise NoEvent(f"no {kind.value!r} event on this path")

    def end_event(self, end: str):
        """The boundary event of one end ('lower'/'upper'), or None."""
        if end not in ENDS:
            raise DomainError(f"end must be one of {ENDS}, got {end!r}")
        want = -1 if end == "lower" else +1
        for ev in self.boundary_events:
            if ev.direction == want:
                return ev
        return None


def is_extension(spectrum: PrincipalSpectrum) -> bool:
    """True when the spectrum lies outside the closed-form catalog."""
    ms = spectrum.multiplicities
    if spectrum.sf.epsilon == 0:
        return False
    if spectrum.sf.epsilon == -1:
        return len(ms) == 2 and ms[0] != ms[1]
    return len(set(ms)) != 1


class _OutsideBasin(Exception):
    """Internal: an iterate left the positive-factor basin."""


def _orientation(spectrum: PrincipalSpectrum) -> float:
    h0 = spectrum.mean_curvature
    if h0 == 0.0:
        raise PreconditionError(
            "initial mean curvature is zero; the flow is undefined"
        )
    return math.copysign(1.0, h0)


def _factors_min(spectrum: PrincipalSpectrum, mu: float) -> float:
    return min(transport_pair(spectrum.sf, k, mu)[0] for k, _ in spectrum.entries)


def _h_strict(spectrum: PrincipalSpectrum, mu: float) -> float:
    """Mean curvature at mu, raising _OutsideBasin on nonpositive factors."""
    total = 0.0
    for k, m in spectrum.entries:
        den, num = transport_pair(spectrum.sf, k, mu)
        if den <= 0.0:
            raise _OutsideBasin(mu)
        total += m * num / den
    return total


# ---------------------------------------------------------------------------
# direct root solving


_EPS = 2.220446049250313e-16


def _in_basin(spectrum: PrincipalSpectrum, sign: float, mu: float) -> bool:
    """Inside the monotone basin: all factors positive, H keeps its sign."""
    try:
        h = _h_strict(spectrum, mu)
    except _OutsideBasin:
        return False
    return sign * h > 0.0


def _bracket_root(spectrum: PrincipalSpectrum, sign: float, t: float):
    """Bracket the root of f(mu) = log-product - t inside the basin.

    Marches from mu = 0 in the direction that shrinks f (f is monotone on
    the basin, so the first sign change brackets the unique root).  When
    the march leaves the basin first, the basin edge is bisected toward
    and checked for a sign change just inside; none means no root.
    """
    f0 = log_product(spectrum, 0.0) - t
    if f0 == 0.0:
        return 0.0, 0.0
    direction = sign if f0 > 0.0 else -sign
    prev, f_prev = 0.0, f0
    step = 1e-3
    for _ in range(120):
        cand = prev + direction * step
        if not _in_basin(spectrum, sign, cand):
            lo, hi = prev, cand
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                if mid == lo or mid == hi:
                    break
                if _in_basin(spectrum, sign, mid):
                    lo = mid
                else:
                    hi = mid
            f_edge = log_product(spectrum, lo) - t
            if f_edge == 0.0:
                return lo, lo
            if (f_edge > 0.0) != (f_prev > 0.0):
                return (prev, lo) if prev <= lo else (lo, prev)
            raise PreconditionError(
                f"t={t!r} has no solution inside the monotone basin"
                " (outside the existence interval)"
            )
        f_cand = log_product(spectrum, cand) - t
        if f_cand == 0.0:
            return cand, cand
        if (f_cand > 0.0) != (f_prev > 0.0):
            return (prev, cand) if prev <= cand else (cand, prev)
        prev, f_prev = cand, f_cand
        step *= 1.6
    raise NoConvergence(f"could not bracket the root for t={t!r}")


def solve_product_equation(
    spectrum: PrincipalSpectrum, t: float, mu_guess: float | None = None
) -> float:
    """Solve the defining equation for mu at one time.

    Works on f(mu) = sum_j m_j log(C - k_j S) - t, whose derivative is
    minus the mean curvature, so f is strictly monotone on the basin
    where all factors are positive and H keeps its initial sign.  The
    root is bracketed by an outward march (or taken near ``mu_guess``)
    and refined by Newton steps clipped to the bracket.  Converges to
    |f| <= 1e-12, or to the quantization floor of f where H is large.
    """
    t = float(t)
    sign = _orientation(spectrum)
    lo = hi = None
    if mu_guess is not None and _in_basin(spectrum, sign, float(mu_guess)):
        mu = float(mu_guess)
        f = log_product(spectrum, mu) - t
    else:
        lo, hi = _bracket_root(spectrum, sign, t)
        mu = 0.5 * (lo + hi)
        f = log_product(spectrum, mu) - t
    for _ in range(NEWTON_MAX_ITER + 100):
        hmu = mean_curvature_mu(spectrum, mu)
        # One ulp of mu moves f by about |H|*ulp, so |f| cannot be pushed
        # under that quantization floor where H is exponentially large.
        floor = 8.0 * _EPS * abs(hmu) * max(1.0, abs(mu))
        if abs(f) <= max(NEWTON_TOL, floor):
            break
        step = f / hmu  # Newton: mu - f/f' with f' = -H
        stalled = True
        for _ in range(60):
            cand = mu + step
            if lo is not None and not (lo <= cand <= hi):
                cand = 0.5 * (lo + hi)
            if _in_basin(spectrum, sign, cand):
                f_cand = log_product(spectrum, cand) - t
                if abs(f_cand) < abs(f) or (lo is not None and cand == 0.5 * (lo + hi)):
                    if lo is not None:
                        # f decreases in mu for sign>0 (increases for
                        # sign<0); shrink the bracket around the root.
                        if (f_cand > 0.0) == (sign > 0.0):
                            lo = cand
                        else:
                            hi = cand
                    mu, f = cand, f_cand
                    stalled = False
                    break
            step *= 0.5
        if stalled:
            if mu_guess is not None and lo is None:
                # Warm start trapped near a basin edge: restart cold.
                lo, hi = _bracket_root(spectrum, sign, t)
                mu = 0.5 * (lo + hi)
                f = log_product(spectrum, mu) - t
                mu_guess = None
                continue
            if abs(f) <= 64.0 * _EPS * abs(hmu) * max(1.0, abs(mu)):
                break  # pinned to the last representable mu near the root
            raise NoConvergence(f"root refinement stalled at mu={mu!r} for t={t!r}")
    else:
        raise NoConvergence(
            f"no root to |f|<={NEWTON_TOL} within {NEWTON_MAX_ITER + 100} iterations"
        )
    if not _in_basin(spectrum, sign, mu):
        raise PreconditionError(f"root mu={mu!r} lies outside the monotone basin")
    return mu


def continuation_sweep(spectrum: PrincipalSpectrum, t_grid) -> NumericPath:
    """Solve the defining equation along a time grid by warm-started Newton.

    The grid must contain t = 0 exactly (the anchor with mu = 0).  Each
    direction walks outward, predicting mu with the flow law
    mu' = -1/H; a grid point past the existence interval stops that
    direction and records the boundary located by the mu-march refiner.
    """
    grid = np.sort(np.asarray(t_grid, dtype=float))
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("t_grid must be a nonempty 1-d array of times")
    if not np.any(grid == 0.0):
        raise DomainError("t_grid must contain 0 exactly (the flow anchor)")
    _orientation(spectrum)
    h0 = spectrum.mean_curvature
    i0 = int(np.flatnonzero(grid == 0.0)[0])

    samples = [(0.0, 0.0, h0)]
    events = []

    def walk(ts, direction):
        t_prev, mu_prev, h_prev = 0.0, 0.0, h0
        for t in ts:
            pred = mu_prev - (t - t_prev) / h_prev
            try:
                try:
                    mu = solve_product_equation(spectrum, float(t), mu_guess=pred)
                except (PreconditionError, NoConvergence):
                    # Warm start overshot (steep end of the interval);
                    # retry from the anchor before declaring a boundary.
                    mu = solve_product_equation(spectrum, float(t))
            except (FactorNonPositive, NoConvergence, PreconditionError):
                events.append(_scan_boundary(spectrum, direction))
                return
            h = mean_curvature_mu(spectrum, mu)
            samples.append((float(t), mu, h))
            t_prev, mu_prev, h_prev = float(t), mu, h

    walk(grid[i0 + 1 :], +1)
    walk(grid[:i0][::-1], -1)
    samples.sort(key=lambda r: r[0])
    return NumericPath(
        spectrum=spectrum,
        tol=NEWTON_TOL,
        samples=tuple(samples),
        boundary_events=tuple(events),
        t_span=(float(grid[0]), float(grid[-1])),
        extension=is_extension(spectrum),
    )


# ---------------------------------------------------------------------------
# ODE integration

# Dormand-Prince 5(4) tableau.
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_ERR = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def integrate_mu(
    spectrum: PrincipalSpectrum,
    t_span,
    tol: float = 1e-9,
    t_eval=None,
    max_steps: int = 100_000,
) -> NumericPath:
    """Integrate mu' = -1/H(mu) over t_span = (t_min, t_max).

    Requires t_min <= 0 <= t_max and H(0) != 0; the seed sample
    (0, 0, H(0)) is exact.  With ``t_eval`` only the requested times are
    sampled (steps are clipped to land on them); otherwise every accepted
    step is recorded.  Integration in either direction stops early with a
    recorded :class:`BoundaryEvent` when |H| falls under
    sqrt(tol)*max(1, |H(0)|), a metric transport factor falls under
    1e-10, or the step size underflows.
    """
    t_min, t_max = (float(t_span[0]), float(t_span[1]))
    if not (TOL_RANGE[0] <= tol <= TOL_RANGE[1]):
        raise DomainError(f"tol={tol!r} outside {TOL_RANGE!r}")
    if not (t_min <= 0.0 <= t_max):
        raise DomainError(f"need t_min <= 0 <= t_max, got [{t_min!r}, {t_max!r}]")
    _orientation(spectrum)
    h0 = spectrum.mean_curvature
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if t_eval.size and (np.min(t_eval) < t_min or np.max(t_eval) > t_max):
            raise DomainError("t_eval contains times outside [t_min, t_max]")

    h_floor = math.sqrt(tol) * max(1.0, abs(h0))
    samples = [(0.0, 0.0, h0)]
    events = []

    def march(span: float, sign: int):
        """Integrate tau from 0 to span along t = sign*tau."""
        if span <= 0.0:
            return
        if t_eval is None:
            targets = None
        else:
            vals = sign * t_eval[sign * t_eval > 0.0]
            targets = sorted(set(float(v) for v in vals))

        def rhs(mu):
            return -sign / _h_strict(spectrum, mu)

        tau, mu = 0.0, 0.0
        h_ctrl = min(0.01, span)
        errold = 1e-4
        for _ in range(max_steps):
            if tau >= span * (1.0 - 1e-15) and not targets:
                return
            h_step = min(h_ctrl, span - tau)
            hit = None
            if targets and tau + h_step >= targets[0] - 1e-15 * max(1.0, targets[0]):
                hit = targets[0]
                h_step = hit - tau
                if h_step <= 0.0:
                    samples.append((sign * tau, mu, _h_strict(spectrum, mu)))
                    targets.pop(0)
                    continue
            try:
                ks = []
                for row in _DP_A:
                    y = mu + h_step * math.fsum(a * k for a, k in zip(row, ks))
                    ks.append(rhs(y))
                mu_new = mu + h_step * math.fsum(b * k for b, k in zip(_DP_B5, ks))
                err = abs(h_step * math.fsum(e * k for e, k in zip(_DP_ERR, ks)))
                h_curv = _h_strict(spectrum, mu_new)
            except _OutsideBasin:
                h_ctrl = 0.5 * h_step
                if h_ctrl < 1e-14 * max(1.0, tau):
                    events.append(
                        BoundaryEvent(
                            sign * tau, BoundaryKind.STEP_UNDERFLOW, mu, sign
                        )
                    )
                    return
                continue
            # Control both mu and the induced drift of the log-product
            # (whose mu-derivative is -H), so the product residual stays
            # proportional to tol even where H is exponentially large.
            sc_mu = 0.5 * tol * (1.0 + abs(mu_new))
            err_norm = max(err / sc_mu, abs(h_curv) * err / (0.5 * tol))
            if err_norm <= 1.0:
                tau = hit if hit is not None else tau + h_step
                mu = mu_new
                if targets is None:
                    samples.append((sign * tau, mu, h_curv))
                elif hit is not None:
                    samples.append((sign * tau, mu, h_curv))
                    targets.pop(0)
                if abs(h_curv) < h_floor:
                    events.append(
                        BoundaryEvent(
                            sign * tau,
                            BoundaryKind.MEAN_CURVATURE_ZERO,
                            mu,
                            sign,
                            detail=f"|H|={abs(h_curv)!r} under floor {h_floor!r}",
                        )
                    )
                    return
                if _metric_min(spectrum, mu) < METRIC_FLOOR:
                    events.append(
                        BoundaryEvent(
                            sign * tau,
                            BoundaryKind.FOCAL_DEGENERACY,
                            mu,
                            sign,
                            detail="metric transport factor under 1e-10",
                        )
                    )
                    return
                if err_norm > 0.0:
                    fac = 0.9 * err_norm**-0.14 * errold**0.08
                else:
                    fac = 5.0
                errold = max(err_norm, 1e-4)
            else:
                fac = 0.9 * err_norm**-0.2
            h_ctrl = h_step * min(5.0, max(0.2, fac))
            if h_ctrl < 1e-14 * max(1.0, tau):
                events.append(
                    BoundaryEvent(sign * tau, BoundaryKind.STEP_UNDERFLOW, mu, sign)
                )
                return
        raise NoConvergence(f"step budget {max_steps} exhausted at t={sign * tau!r}")

    march(t_max, +1)
    march(-t_min, -1)
    samples.sort(key=lambda r: r[0])
    return NumericPath(
        spectrum=spectrum,
        tol=tol,
        samples=tuple(samples),
        boundary_events=tuple(events),
        t_span=(t_min, t_max),
        extension=is_extension(spectrum),
    )


def _metric_min(spectrum: PrincipalSpectrum, mu: float) -> float:
    d = _factors_min(spectrum, mu)
    return d * d if d > 0.0 else 0.0


# ---------------------------------------------------------------------------
# boundary location


def _scan_boundary(spectrum: PrincipalSpectrum, direction: int) -> BoundaryEvent:
    """Locate the end of the existence interval in one time direction.

    Marches in mu (the flow moves mu opposite to t on mean-convex
    slices), looking for the first of: mean curvature crossing zero
    (finite collapse time, returned via the log-product at the crossing),
    or a transport factor crossing zero (focal collapse, approached only
    as t -> +-inf since the log-product diverges there).  Directions with
    neither event within any practical range come back as UNBOUNDED.
    """
    if direction not in (+1, -1):
        raise DomainError(f"direction must be +1 or -1, got {direction!r}")
    sign = _orientation(spectrum)
    mu_sign = -direction * sign

    def status(m: float) -> int:
        if _factors_min(spectrum, m) <= 0.0:
            return 2
        return 1 if sign * mean_curvature_mu(spectrum, m) <= 0.0 else 0

    prev = 0.0
    step = 1e-3
    while True:
        cur = prev + mu_sign * step
        st = status(cur)
        if st != 0:
            break
        if abs(log_product(spectrum, cur)) > 200.0 or abs(cur) > 1e6:
            return BoundaryEvent(
                direction * math.inf,
                BoundaryKind.UNBOUNDED,
                cur,
                direction,
                detail="no boundary within the marched range",
            )
        prev = cur
        step *= 1.6

    lo, hi = prev, cur
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if status(mid) == 0:
            lo = mid
        else:
            hi = mid
    if status(hi) == 1:
        t_b = log_product(spectrum, lo)
        return BoundaryEvent(
            t_b,
            BoundaryKind.MEAN_CURVATURE_ZERO,
            lo,
            direction,
            detail="mean curvature crosses zero",
        )
    # A factor reaches zero at finite mu, so the log-product diverges
    # there: the flow is eternal in this direction and the collapse is
    # only asymptotic.
    return BoundaryEvent(
        direction * math.inf,
        BoundaryKind.FOCAL_DEGENERACY,
        lo,
        direction,
        detail="transport factor crosses zero",
    )


def estimate_boundary(path: NumericPath, end: str):
    """Refined boundary time and kind at one end of a numeric path.

    For a path whose ``end`` ('lower'/'upper') stopped with a mean
    curvature or focal event, re-locates that boundary by bisection in mu
    and returns ``(t, kind)`` (the time is +-inf for focal ends, which
    are reached only asymptotically).  An end that ran through the whole
    requested span eventless is unbounded within it: returns
    (-inf or +inf, UNBOUNDED).  A path with no samples beyond t = 0 in
    that direction and no event raises NoEvent.
    """
    if end not in ENDS:
        raise DomainError(f"end must be one of {ENDS}, got {end!r}")
    direction = -1 if end == "lower" else +1
    ev = path.end_event(end)
    if ev is not None:
        if ev.kind in (
            BoundaryKind.MEAN_CURVATURE_ZERO,
            BoundaryKind.FOCAL_DEGENERACY,
        ):
            refined = _scan_boundary(path.spectrum, direction)
            return refined.t, refined.kind
        return ev.t, ev.kind
    span_end = path.t_span[0] if end == "lower" else path.t_span[1]
    if span_end == 0.0:
        raise NoEvent(f"path never left t=0 toward its {end} end")
    return direction * math.inf, BoundaryKind.UNBOUNDED


# ---------------------------------------------------------------------------
# serialization


def path_to_dict(path: NumericPath) -> dict:
    return {
        "tol": path.tol,
        "t_span": list(path.t_span),
        "extension": path.extension,
        "samples": [[t, mu, h] for t, mu, h in path.samples],
        "boundary_events": [
            {
                "t": ev.t,
                "kind": ev.kind.value,
                "mu": ev.mu,
                "direction": ev.direction,
                "detail": ev.detail,
            }
            for ev in path.boundary_events
        ],
        "spectrum": spectrum_to_dict(path.spectrum),
    }


def path_from_dict(data: dict) -> NumericPath:
    try:
        return NumericPath(
            spectrum=spectrum_from_dict(data["spectrum"]),
            tol=float(data["tol"]),
            samples=tuple(
                (float(t), float(m), float(h)) for t, m, h in data["samples"]
            ),
            boundary_events=tuple(
                BoundaryEvent(
                    t=float(ev["t"]),
                    kind=BoundaryKind(ev["kind"]),
                    mu=None if ev.get("mu") is None else float(ev["mu"]),
                    direction=int(ev.get("direction", 0)),
                    detail=ev.get("detail", ""),
                )
                for ev in data.get("boundary_events", ())
            ),
            t_span=tuple(float(v) for v in data.get("t_span", (0.0, 0.0))),
            extension=bool(data.get("extension", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed path record: {exc}") from exc
