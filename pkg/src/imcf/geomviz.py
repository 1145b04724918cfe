"""Meshes, projections and deterministic exports for flowing hypersurfaces.

Surfaces are sampled on parameter grids: periodic axes sample without the
duplicate seam and their faces wrap around (tori come out watertight),
non-periodic axes sample cell centers so parametrization endpoints (poles,
cusps) are never evaluated.  ``flow_surface`` produces ambient samples on
the model quadric; ``sample_to_mesh`` flattens them to an R^3 mesh, through

* ``poincare_ball``: the hyperboloid sheet onto the open unit ball,
* ``stereographic``: the unit 3-sphere minus a pole onto R^3,

or unchanged for Euclidean surfaces.  Exports (OBJ text, PLY binary
little-endian) are byte-deterministic for a given mesh.
"""

from __future__ import annotations

import hashlib
import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .closedform import FlowProfile
from .errors import (
    AtPole,
    DomainError,
    SpectrumMismatch,
    UnknownName,
    WrongSpaceForm,
)
from .isocatalog import Immersion, example_immersion, spectrum_to_dict
from .spaceform import PrincipalSpectrum, parallel_normal, parallel_point

BALL_LIMIT_THRESHOLD = 0.99


def spectra_close(a: PrincipalSpectrum, b: PrincipalSpectrum, tol: float = 1e-9) -> bool:
    """Same space form, dimension and curvature blocks within ``tol``."""
    if a.sf.epsilon != b.sf.epsilon or a.n != b.n or len(a.entries) != len(b.entries):
        return False
    return all(
        ma == mb and abs(ka - kb) <= tol * max(1.0, abs(ka))
        for (ka, ma), (kb, mb) in zip(a.entries, b.entries)
    )


@dataclass
class Mesh:
    """Sampled surface: vertices (N, 3), quad faces, named vertex scalars."""

    vertices: np.ndarray
    faces: tuple
    channels: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def triangles(self) -> tuple:
        """Faces split into triangles (quads fan from their first corner)."""
        tris = []
        for f in self.faces:
            for i in range(1, len(f) - 1):
                tris.append((f[0], f[i], f[i + 1]))
        return tuple(tris)


@dataclass(frozen=True)
class FlowSample:
    """One time slice of a flowing surface, sampled on a parameter grid.

    Points and normals are ambient (still on the model quadric), shaped
    (res_u, res_v, dim); the mean curvature is the slice constant.
    """

    points: np.ndarray
    normals: np.ndarray
    mean_curvature: float
    t: float
    mu: float
    case: str
    immersion_name: str
    spectrum: PrincipalSpectrum
    periodic: tuple


def _grid_axis(lo: float, hi: float, periodic: bool, count: int) -> np.ndarray:
    if count < 2:
        raise DomainError(f"grid axis needs at least 2 samples, got {count!r}")
    if periodic:
        return lo + np.arange(count) * (hi - lo) / count
    return lo + (np.arange(count) + 0.5) * (hi - lo) / count


def _grid_faces(nu: int, nv: int, per_u: bool, per_v: bool) -> tuple:
    faces = []
    iu = range(nu) if per_u else range(nu - 1)
    iv = range(nv) if per_v else range(nv - 1)
    for i in iu:
        i2 = (i + 1) % nu
        for j in iv:
            j2 = (j + 1) % nv
            faces.append((i * nv + j, i2 * nv + j, i2 * nv + j2, i * nv + j2))
    return tuple(faces)


def _spectrum_digest(spectrum: PrincipalSpectrum) -> str:
    blob = json.dumps(spectrum_to_dict(spectrum), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def flow_surface(
    immersion: Immersion,
    profile: FlowProfile,
    t: float,
    grid=(64, 64),
) -> FlowSample:
    """Sample the flowing hypersurface at time ``t`` on a parameter grid.

    The immersion supplies base points and normals; the profile supplies
    the parallel distance.  Their spectra must agree (the profile solved
    for a different family otherwise).  Output points stay on the model
    quadric; project with :func:`sample_to_mesh` to visualize.
    """
    if not spectra_close(immersion.spectrum, profile.spectrum):
        raise SpectrumMismatch(
            f"immersion {immersion.name!r} carries {immersion.spectrum.entries!r},"
            f" profile was solved for {profile.spectrum.entries!r}"
        )
    mu = profile.mu(float(t))
    (ulo, uhi, per_u), (vlo, vhi, per_v) = immersion.param_domain
    us = _grid_axis(ulo, uhi, per_u, grid[0])
    vs = _grid_axis(vlo, vhi, per_v, grid[1])
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    base = immersion.point(uu, vv)
    nrm = immersion.normal(uu, vv)
    return FlowSample(
        points=parallel_point(base, nrm, mu, immersion.sf, validate=False),
        normals=parallel_normal(base, nrm, mu, immersion.sf, validate=False),
        mean_curvature=profile.h(float(t)),
        t=float(t),
        mu=float(mu),
        case=profile.case,
        immersion_name=immersion.name,
        spectrum=profile.spectrum,
        periodic=(per_u, per_v),
    )


def sample_to_mesh(sample: FlowSample, projection=None) -> Mesh:
    """Flatten an ambient sample to an R^3 mesh.

    ``projection`` maps (N, dim) ambient points to (N, 3) and is required
    when the ambient dimension is not 3.  Hyperbolic samples get a
    ``ball_norm_sq`` vertex channel (their only shipped projection is the
    Poincare ball, where that norm measures progress to the boundary).
    """
    nu, nv = sample.points.shape[:2]
    pts = sample.points.reshape(nu * nv, -1)
    if projection is not None:
        verts = np.asarray(projection(pts), dtype=float)
    elif pts.shape[-1] == 3:
        verts = pts
    else:
        raise DomainError(
            f"ambient dimension {pts.shape[-1]} needs an explicit projection to R^3"
        )
    if verts.shape != (len(pts), 3):
        raise DomainError(f"projection returned shape {verts.shape!r}, wanted (N, 3)")
    channels = {"mean_curvature": np.full(len(verts), sample.mean_curvature)}
    if projection is not None and sample.spectrum.sf.epsilon == -1:
        channels["ball_norm_sq"] = np.sum(verts * verts, axis=-1)
    return Mesh(
        vertices=verts,
        faces=_grid_faces(nu, nv, *sample.periodic),
        channels=channels,
        metadata={
            "t": sample.t,
            "mu": sample.mu,
            "case": sample.case,
            "immersion": sample.immersion_name,
            "spectrum_digest": _spectrum_digest(sample.spectrum),
        },
    )


# ---------------------------------------------------------------------------
# projections


def poincare_ball(points) -> np.ndarray:
    """Project hyperboloid points (4 coordinates, first timelike) to the ball.

    (x0, x1, x2, x3) -> (x1, x2, -x3) / (1 + x0); the image norm satisfies
    |y|^2 = (x0 - 1)/(x0 + 1) < 1.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != 4:
        raise DomainError(f"expected 4 ambient coordinates, got {pts.shape[-1]}")
    w = 1.0 + pts[..., 0]
    if np.any(w <= 0.0):
        raise DomainError("points not on the upper hyperboloid sheet (x0 >= 1)")
    return np.stack(
        [pts[..., 1] / w, pts[..., 2] / w, -pts[..., 3] / w], axis=-1
    )


def stereographic(points, pole_axis: int = 3) -> np.ndarray:
    """Project unit-sphere points from the pole on ``pole_axis`` to R^3."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != 4:
        raise DomainError(f"expected 4 ambient coordinates, got {pts.shape[-1]}")
    if not 0 <= pole_axis < 4:
        raise DomainError(f"pole_axis must be in 0..3, got {pole_axis!r}")
    p = pts[..., pole_axis]
    if np.any(np.abs(p - 1.0) <= 1e-9):
        raise AtPole(f"a point lies within 1e-9 of the projection pole (axis {pole_axis})")
    rest = np.delete(pts, pole_axis, axis=-1)
    return rest / (1.0 - p)[..., None]


def stereographic_inverse(points, pole_axis: int = 3) -> np.ndarray:
    """Inverse of :func:`stereographic`: R^3 back onto the unit sphere."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != 3:
        raise DomainError(f"expected 3 coordinates, got {pts.shape[-1]}")
    r2 = np.sum(pts * pts, axis=-1)
    scale = 2.0 / (1.0 + r2)
    rest = pts * scale[..., None]
    pole = ((r2 - 1.0) / (r2 + 1.0))[..., None]
    return np.concatenate(
        [rest[..., :pole_axis], pole, rest[..., pole_axis:]], axis=-1
    )


@dataclass(frozen=True)
class BallNormReport:
    """Ball norms of a time-ordered projected family, and its verdict.

    The heuristic bound 1 - 10*exp(-|mu|) on the final minimum is
    informational; the enforced criterion (once the family is far out,
    cosh mu >= 100) is final minimum >= 0.99.
    """

    times: tuple
    mins: tuple
    maxes: tuple
    increasing: bool
    heuristic_bound: float
    heuristic_met: bool
    final_enforced: bool
    final_ok: bool

    @property
    def passed(self) -> bool:
        return self.increasing and (self.final_ok or not self.final_enforced)


def ball_norm_limit_check(
    immersion: Immersion,
    profile: FlowProfile,
    t_list,
    grid=(32, 32),
) -> BallNormReport:
    """Check that ball-projected slices march out to the ideal boundary.

    Samples the flow at the (strictly increasing) times, projects to the
    Poincare ball and records min/max squared norms per slice.  Passing
    means the minima increase strictly and, once the last slice is far
    out (cosh mu >= 100), its minimum clears 0.99.
    """
    if immersion.sf.epsilon != -1:
        raise WrongSpaceForm("ball norms are defined for hyperbolic ambients only")
    ts = [float(t) for t in t_list]
    if not ts:
        raise DomainError("t_list must be nonempty")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise DomainError("t_list must be strictly increasing")
    mins, maxes = [], []
    for t in ts:
        sample = flow_surface(immersion, profile, t, grid=grid)
        norm_sq = np.sum(poincare_ball(sample.points) ** 2, axis=-1)
        mins.append(float(np.min(norm_sq)))
        maxes.append(float(np.max(norm_sq)))
    mu_last = profile.mu(ts[-1])
    heuristic = 1.0 - 10.0 * math.exp(-abs(mu_last))
    return BallNormReport(
        times=tuple(ts),
        mins=tuple(mins),
        maxes=tuple(maxes),
        increasing=all(b > a for a, b in zip(mins, mins[1:])),
        heuristic_bound=heuristic,
        heuristic_met=mins[-1] >= heuristic,
        final_enforced=math.cosh(mu_last) >= 100.0,
        final_ok=mins[-1] >= BALL_LIMIT_THRESHOLD,
    )


# ---------------------------------------------------------------------------
# exports


def _meta_comment(mesh: Mesh) -> str:
    return json.dumps(mesh.metadata, sort_keys=True)


def export_obj(mesh: Mesh, path) -> None:
    lines = [f"# meta {_meta_comment(mesh)}"]
    for v in mesh.vertices:
        lines.append(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}")
    for tri in mesh.triangles():
        lines.append(f"f {tri[0] + 1} {tri[1] + 1} {tri[2] + 1}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def export_ply(mesh: Mesh, path) -> None:
    tris = mesh.triangles()
    channel_names = sorted(mesh.channels)
    header = ["ply", "format binary_little_endian 1.0"]
    header.append(f"comment meta {_meta_comment(mesh)}")
    header.append(f"element vertex {len(mesh.vertices)}")
    header += ["property float x", "property float y", "property float z"]
    header += [f"property float {name}" for name in channel_names]
    header.append(f"element face {len(tris)}")
    header.append("property list uchar int vertex_indices")
    header.append("end_header")
    cols = [np.asarray(mesh.vertices, dtype="<f4").reshape(-1, 3)]
    for name in channel_names:
        ch = np.asarray(mesh.channels[name], dtype="<f4").reshape(-1, 1)
        if len(ch) != len(mesh.vertices):
            raise DomainError(f"channel {name!r} length does not match vertices")
        cols.append(ch)
    vertex_block = np.hstack(cols).astype("<f4").tobytes()
    face_block = b"".join(
        struct.pack("<Biii", 3, int(a), int(b), int(c)) for a, b, c in tris
    )
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(vertex_block)
        fh.write(face_block)


def export_mesh(mesh: Mesh, path, format: str | None = None) -> None:
    """Write OBJ or PLY; inferred from the extension when not forced."""
    name = str(path)
    fmt = format.lower() if format else None
    if fmt is None:
        if name.endswith(".obj"):
            fmt = "obj"
        elif name.endswith(".ply"):
            fmt = "ply"
        else:
            raise DomainError(
                f"no format given and extension of {name!r} is not .obj/.ply"
            )
    if fmt == "obj":
        export_obj(mesh, path)
    elif fmt == "ply":
        export_ply(mesh, path)
    else:
        raise DomainError(f"unsupported mesh format {format!r} (use obj or ply)")


# ---------------------------------------------------------------------------
# scenes


SCENE_NAMES = ("figure1", "figure2", "figure3")


def figure_scene(name: str, grid=(64, 64)):
    """Meshes of one showcase scene as a list of (stem, Mesh) pairs.

    * figure1: horosphere family in the Poincare ball, t in {-2, 0, 2};
    * figure2: hyperbolic cylinder in the Poincare ball, t in {-2, 0, 2};
    * figure3: Hopf-type torus, stereographic, flowing almost to its
      ancient collapse time.
    """
    from .closedform import solve  # deferred: avoids import at module load for cli

    if name == "figure1":
        imm = example_immersion("horosphere")
        times = (-2.0, 0.0, 2.0)
        projection = poincare_ball
    elif name == "figure2":
        imm = example_immersion("hyperbolic_cylinder")
        times = (-2.0, 0.0, 2.0)
        projection = poincare_ball
    elif name == "figure3":
        imm = example_immersion("hopf_torus")
        profile = solve(imm.spectrum)
        times = (-1.0, 0.0, profile.interval[1] - 1e-3)
        projection = lambda pts: stereographic(pts, pole_axis=3)
    else:
        raise UnknownName(f"unknown scene {name!r}; choose from {SCENE_NAMES}")
    profile = solve(imm.spectrum, allow_negative_k=True)
    out = []
    for i, t in enumerate(times):
        sample = flow_surface(imm, profile, t, grid=grid)
        out.append((f"{name}_{i}_t{t:+.3f}", sample_to_mesh(sample, projection)))
    return out
