"""Shared fixtures: the closed-form catalog and grid helpers."""

import math
import sys

import numpy as np
import pytest

from imcf import (
    solve_euclidean,
    solve_horosphere,
    solve_hyperbolic_cylinder,
    solve_hyperbolic_umbilic,
    solve_sphere,
)

ROOT2 = math.sqrt(2.0)

# One representative of every closed-form family, both normal orientations
# for the horosphere and both umbilic regimes included.
CATALOG_BUILDERS = (
    ("euclid_sphere", lambda: solve_euclidean(2, 2, 1.0)),
    ("euclid_cylinder", lambda: solve_euclidean(3, 2, 2.0)),
    ("horo_plus", lambda: solve_horosphere(2, 1.0)),
    ("horo_minus", lambda: solve_horosphere(3, -1.0)),
    ("hyp_umbilic_equidistant", lambda: solve_hyperbolic_umbilic(2, 0.5)),
    ("hyp_umbilic_ball", lambda: solve_hyperbolic_umbilic(2, 2.0)),
    ("hyp_cylinder", lambda: solve_hyperbolic_cylinder(1, ROOT2)),
    ("sphere_g1", lambda: solve_sphere(1, 2, 1.0)),
    ("sphere_g2", lambda: solve_sphere(2, 1, ROOT2)),
    ("sphere_g3", lambda: solve_sphere(3, 1, 2.0)),
    ("sphere_g4", lambda: solve_sphere(4, 1, 3.0)),
    ("sphere_g6", lambda: solve_sphere(6, 1, 4.0)),
)

CATALOG_NAMES = tuple(name for name, _ in CATALOG_BUILDERS)


def catalog_profiles():
    return [(name, build()) for name, build in CATALOG_BUILDERS]


def profile_grid(profile, t_lo=-10.0, t_hi=10.0, points=400, inset=1e-3):
    """Evaluation grid on the existence interval clipped to [t_lo, t_hi].

    Finite interval endpoints are inset (open interval; formulas live on
    the interior), infinite ones are replaced by the window edge.
    """
    lo, hi = profile.interval
    lo = t_lo if math.isinf(lo) else max(t_lo, lo + inset)
    hi = t_hi if math.isinf(hi) else min(t_hi, hi - inset)
    if not lo < hi:
        raise ValueError(f"window [{t_lo}, {t_hi}] misses interval {profile.interval}")
    return np.linspace(lo, hi, points)


@pytest.fixture(params=CATALOG_NAMES)
def catalog_profile(request):
    builders = dict(CATALOG_BUILDERS)
    return request.param, builders[request.param]()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance scoreboard into the terminal summary."""
    mod = None
    for name, m in sys.modules.items():
        if name.rsplit(".", 1)[-1] == "test_acceptance":
            mod = m
            break
    lines = getattr(mod, "LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
