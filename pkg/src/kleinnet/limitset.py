"""Limit sets of one- and two-generator subgroups of SL(2,C) acting on the
Riemann sphere.

Points are sampled by a depth-first traversal of nonbacktracking words: at the
node for prefix M the candidates are M applied to the attracting fixed points
of the allowed next letters, and a branch is pruned once its candidate set has
diameter below epsilon.  Coordinates live in two charts (z and 1/z) so points
near infinity stay bounded; the traversal itself runs in a compiled kernel
when available, with a pure-Python twin producing the same floats.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import _kernel_py
from .errors import ElementaryGroupError, LimitSetError
from .sl2 import CLASSIFY_TOL, Matrix2C, check_unimodular, classify

_requested = os.environ.get("KLEINNET_BACKEND", "").strip().lower()
if _requested in ("py", "python"):
    _impl = _kernel_py
elif _requested in ("c", "cython"):
    from . import _kernel as _impl  # import error surfaces: explicit request
elif _requested:
    raise ImportError(
        f"KLEINNET_BACKEND must be 'c' or 'py', got {_requested!r}"
    )
else:
    try:
        from . import _kernel as _impl
    except ImportError:
        _impl = _kernel_py

kernel_backend = _impl.BACKEND

__all__ = [
    "SpherePoint",
    "GroupSpec",
    "LimitPointCloud",
    "kernel_backend",
    "mobius_fixed_points",
    "enumerate_limit_set",
    "circle_deviation",
    "box_dimension",
    "render",
    "cloud_group_invariance",
    "format_cloud_csv",
    "write_cloud_csv",
]

DEFAULT_EPSILON = 1e-3
DEFAULT_MAX_DEPTH = 30
DEFAULT_CAP = 1_000_000
MARKOV_TOL = 1e-8
SHARED_FIX_TOL = 1e-8
WINDOW_RADIUS = 4.0


@dataclass(frozen=True)
class SpherePoint:
    """A point of the Riemann sphere in one of two charts: the point is
    `value` in chart 0 and `1/value` in chart 1 (so chart 1, value 0 is the
    point at infinity)."""

    value: complex
    chart: int

    def __post_init__(self) -> None:
        if self.chart not in (0, 1):
            raise LimitSetError(f"chart must be 0 or 1, got {self.chart}")

    @classmethod
    def from_plane(cls, z: complex) -> "SpherePoint":
        z = complex(z)
        if abs(z) <= 1.0:
            return cls(z, 0)
        return cls(1.0 / z, 1)

    @classmethod
    def infinity(cls) -> "SpherePoint":
        return cls(0j, 1)

    @property
    def is_infinity(self) -> bool:
        return self.chart == 1 and self.value == 0

    def to_plane(self) -> complex:
        if self.chart == 0:
            return self.value
        if self.value == 0:
            raise LimitSetError("the point at infinity has no plane coordinate")
        return 1.0 / self.value

    def sphere3(self) -> tuple[float, float, float]:
        """Stereographic lift onto the radius-1/2 sphere; the chordal metric
        is the Euclidean distance between lifts."""
        v = self.value
        n2 = v.real * v.real + v.imag * v.imag
        den = 1.0 + n2
        if self.chart == 0:
            return (v.real / den, v.imag / den, (n2 - 1.0) / (2.0 * den))
        return (v.real / den, -v.imag / den, (1.0 - n2) / (2.0 * den))

    def chordal(self, other: "SpherePoint") -> float:
        ax, ay, az = self.sphere3()
        bx, by, bz = other.sphere3()
        return math.sqrt((ax - bx) ** 2 + (ay - by) ** 2 + (az - bz) ** 2)


def _point_key(p: SpherePoint) -> tuple[int, float, float]:
    return (p.chart, p.value.real, p.value.imag)


def mobius_fixed_points(m: Matrix2C, tol: float = CLASSIFY_TOL) -> list[SpherePoint]:
    """Fixed points on the sphere, attracting first for loxodromic input.

    The finite fixed points solve c z^2 + (d-a) z - b = 0; infinity is fixed
    exactly when c = 0.
    """
    kind = classify(m, tol).kind
    if kind == "identity":
        raise LimitSetError("every point is fixed: matrix is +/-identity")
    a, b, c, d = m.entries()
    if c == 0:
        if kind == "parabolic" or a == d:
            return [SpherePoint.infinity()]
        finite = SpherePoint.from_plane(b / (d - a))
        inf = SpherePoint.infinity()
        if kind == "loxodromic":
            # multiplier at infinity is d/a (chart w = 1/z)
            return [inf, finite] if abs(a) > abs(d) else [finite, inf]
        return sorted([finite, inf], key=_point_key)
    qa, qb, qc = c, d - a, -b
    if kind == "parabolic":
        return [SpherePoint.from_plane(-qb / (2.0 * qa))]
    sq = cmath.sqrt(qb * qb - 4.0 * qa * qc)
    s = sq if abs(qb + sq) >= abs(qb - sq) else -sq
    q = -(qb + s) / 2.0
    z1 = q / qa
    z2 = qc / q
    p1, p2 = SpherePoint.from_plane(z1), SpherePoint.from_plane(z2)
    if kind == "loxodromic":
        # |derivative| = |c z + d|^-2: attracting where |c z + d| is larger
        return [p1, p2] if abs(c * z1 + d) > abs(c * z2 + d) else [p2, p1]
    return sorted([p1, p2], key=_point_key)


def _attracting_eigvec(m: Matrix2C) -> tuple[complex, complex]:
    """Homogeneous attracting fixed point: the eigenvector of the eigenvalue
    of larger modulus, scaled so the larger component has modulus 1."""
    a, b, c, d = m.entries()
    tr = a + d
    sq = cmath.sqrt(tr * tr - 4.0)
    mu = (tr + sq) / 2.0
    alt = (tr - sq) / 2.0
    if abs(alt) > abs(mu):
        mu = alt
    u1, v1 = b, mu - a
    u2, v2 = mu - d, c
    if abs(u1) + abs(v1) >= abs(u2) + abs(v2):
        u, v = u1, v1
    else:
        u, v = u2, v2
    s = max(abs(u), abs(v))
    if s == 0.0:
        raise LimitSetError("no eigenvector: matrix is +/-identity")
    return (u / s, v / s)


@dataclass(frozen=True)
class GroupSpec:
    """One or two unimodular generators, none equal to +/-identity."""

    generators: tuple[Matrix2C, ...]

    def __post_init__(self) -> None:
        if len(self.generators) not in (1, 2):
            raise LimitSetError("a group spec takes one or two generators")
        ident = Matrix2C.identity()
        neg = Matrix2C(-1.0, 0.0, 0.0, -1.0)
        for i, g in enumerate(self.generators):
            check_unimodular(g)
            if min(g.max_abs_diff(ident), g.max_abs_diff(neg)) <= 1e-12:
                raise LimitSetError(f"generator {i + 1} is +/-identity")

    @classmethod
    def from_matrices(cls, matrices: Sequence[Matrix2C]) -> "GroupSpec":
        return cls(tuple(matrices))

    @classmethod
    def from_traces(
        cls,
        x: complex,
        y: complex,
        z: complex | None = None,
        other_root: bool = False,
    ) -> "GroupSpec":
        """Generators with traces (x, y, z) subject to the Markov relation
        x^2 + y^2 + z^2 = xyz.  When z is omitted it is solved from the
        relation; the root of larger modulus is used unless other_root."""
        x, y = complex(x), complex(y)
        if z is None:
            sq = cmath.sqrt(x * x * y * y - 4.0 * (x * x + y * y))
            r1 = (x * y + sq) / 2.0
            r2 = (x * y - sq) / 2.0
            big, small = (r1, r2) if abs(r1) >= abs(r2) else (r2, r1)
            z = small if other_root else big
        else:
            if other_root:
                raise LimitSetError("other_root applies only when z is solved")
            z = complex(z)
        residual = abs(x * x + y * y + z * z - x * y * z)
        if residual > MARKOV_TOL:
            raise LimitSetError(
                f"trace triple violates x^2+y^2+z^2 = xyz by {residual:.3g}"
            )
        sq = cmath.sqrt(z * z - 4.0)
        mu = (-z + sq) / 2.0
        alt = (-z - sq) / 2.0
        if abs(alt) > abs(mu):
            mu = alt
        a = Matrix2C(x, 1.0, -1.0, 0.0)
        b = Matrix2C(0.0, mu, -1.0 / mu, y)
        return cls((a, b))


@dataclass(frozen=True, eq=False)
class LimitPointCloud:
    """Sampled limit set: chart coordinates, chart flags, and the sampling
    parameters.  Points are sorted by (re, im, chart) so output is
    independent of traversal scheduling."""

    values: np.ndarray
    charts: np.ndarray
    epsilon: float
    max_depth: int
    truncated: bool = False

    def __len__(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_points(self) -> int:
        return len(self)

    def plane_values(self, radius: float = WINDOW_RADIUS) -> np.ndarray:
        """Plane coordinates of the points with |z| <= radius (points at or
        near infinity fall outside every finite window)."""
        vals = self.values
        charts = self.charts
        out = np.empty_like(vals)
        mask0 = charts == 0
        out[mask0] = vals[mask0]
        w = vals[~mask0]
        plane = np.full(w.shape, np.inf + 0j)
        nz = w != 0
        plane[nz] = 1.0 / w[nz]
        out[~mask0] = plane
        mag = np.abs(out)
        keep = np.isfinite(mag) & (mag <= radius)
        return out[keep]

    def sphere3(self) -> np.ndarray:
        return _lift(self.values, self.charts)


def _lift(values: np.ndarray, charts: np.ndarray) -> np.ndarray:
    """Radius-1/2 sphere lift of chart coordinates, one row per point."""
    re = values.real
    im = values.imag
    n2 = re * re + im * im
    den = 1.0 + n2
    sign = np.where(charts == 0, 1.0, -1.0)
    height = np.where(charts == 0, n2 - 1.0, 1.0 - n2)
    return np.column_stack([re / den, sign * im / den, height / (2.0 * den)])


def _n_threads() -> int:
    raw = os.environ.get("KLEINNET_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def _dedupe_points(points: list[SpherePoint], tol: float) -> list[SpherePoint]:
    out: list[SpherePoint] = []
    for p in points:
        if all(p.chordal(q) > tol for q in out):
            out.append(p)
    return out


def _make_cloud(
    triples: list[tuple[float, float, int]],
    epsilon: float,
    max_depth: int,
    truncated: bool,
) -> LimitPointCloud:
    triples = sorted(triples)
    values = np.array([complex(r, i) for r, i, _ in triples], dtype=np.complex128)
    charts = np.array([c for _, _, c in triples], dtype=np.int8)
    return LimitPointCloud(values, charts, epsilon, max_depth, truncated)


def enumerate_limit_set(
    spec: GroupSpec,
    epsilon: float = DEFAULT_EPSILON,
    max_depth: int = DEFAULT_MAX_DEPTH,
    cap: int = DEFAULT_CAP,
    backend: str | None = None,
) -> LimitPointCloud:
    """Sample the limit set by the pruned depth-first traversal.

    `backend` overrides the module-level kernel choice ("c" or "py"); the
    four first-letter subtrees run concurrently when KLEINNET_THREADS > 1,
    and the result is identical either way.
    """
    if not epsilon > 0.0:
        raise LimitSetError("epsilon must be positive")
    if max_depth < 1:
        raise LimitSetError("max_depth must be at least 1")
    if cap < 1:
        raise LimitSetError("point cap must be at least 1")
    fixed_sets = [mobius_fixed_points(g) for g in spec.generators]
    if len(spec.generators) == 1:
        raise ElementaryGroupError(
            "elementary: limit set has <= 2 points", fixed_sets[0]
        )
    if any(
        p.chordal(q) <= SHARED_FIX_TOL
        for p in fixed_sets[0]
        for q in fixed_sets[1]
    ):
        points = _dedupe_points(fixed_sets[0] + fixed_sets[1], SHARED_FIX_TOL)
        raise ElementaryGroupError(
            "elementary: limit set has <= 2 points", points
        )

    if backend is None:
        impl = _impl
    elif backend in ("py", "python"):
        impl = _kernel_py
    elif backend in ("c", "cython"):
        from . import _kernel as impl_mod

        impl = impl_mod
    else:
        raise LimitSetError(f"unknown backend {backend!r}")

    a, b = spec.generators
    mats = (a, a.inverse(), b, b.inverse())
    gens = tuple(m.entries() for m in mats)
    fixes = tuple(_attracting_eigvec(m) for m in mats)

    # depth-0 node: identity prefix, all four letters allowed
    root_out: list[tuple[float, float, int]] = []
    us = [f[0] for f in fixes]
    vs = [f[1] for f in fixes]
    if _kernel_py._emit_candidates(us, vs, epsilon * epsilon, False, root_out):
        return _make_cloud(root_out, epsilon, max_depth, False)

    def run(letter: int):
        return impl.run_subtree(gens, fixes, epsilon, max_depth, cap, letter)

    n = _n_threads()
    if n > 1:
        with ThreadPoolExecutor(max_workers=min(n, 4)) as pool:
            results = list(pool.map(run, range(4)))
    else:
        results = [run(letter) for letter in range(4)]

    merged: list[tuple[float, float, int]] = []
    truncated = False
    for pts, trunc in results:
        merged.extend(pts)
        truncated = truncated or trunc
    if len(merged) > cap:
        merged = merged[:cap]
        truncated = True
    return _make_cloud(merged, epsilon, max_depth, truncated)


def circle_deviation(
    cloud: LimitPointCloud, window_radius: float = WINDOW_RADIUS
) -> float:
    """Relative misfit of the best circle (or line, the infinite-radius case)
    through the cloud: max radial deviation over the radius, or max line
    offset over the cloud diameter."""
    if len(cloud) < 10:
        raise LimitSetError("circle fit needs at least 10 points")
    z = cloud.plane_values(window_radius)
    if z.shape[0] < 10:
        raise LimitSetError("circle fit needs at least 10 points in the window")
    x, y = z.real, z.imag
    centered = np.column_stack([x - x.mean(), y - y.mean()])
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    if sv[0] == 0.0:
        raise LimitSetError("degenerate cloud: all points coincide")
    if sv[1] / sv[0] < 1e-7:
        # collinear: fit the line through the mean along the top axis
        along = centered @ vt[0]
        offset = np.abs(centered @ vt[1])
        diameter = float(along.max() - along.min())
        return float(offset.max() / diameter)
    design = np.column_stack([2.0 * x, 2.0 * y, np.ones_like(x)])
    target = x * x + y * y
    (cx, cy, c0), *_ = np.linalg.lstsq(design, target, rcond=None)
    r2 = c0 + cx * cx + cy * cy
    if not r2 > 0.0:
        raise LimitSetError("circle fit is degenerate")
    radius = math.sqrt(r2)
    radial = np.hypot(x - cx, y - cy)
    return float(np.abs(radial - radius).max() / radius)


def box_dimension(
    cloud: LimitPointCloud,
    levels: int = 7,
    window_radius: float = WINDOW_RADIUS,
) -> float:
    """Box-counting slope over dyadic scales delta_0 / 2^k, k < levels, with
    delta_0 a quarter of the bounding-box size."""
    if len(cloud) < 1000:
        raise LimitSetError("box counting needs at least 1000 points")
    z = cloud.plane_values(window_radius)
    if z.shape[0] < 1000:
        raise LimitSetError("box counting needs at least 1000 points in the window")
    x, y = z.real, z.imag
    xmin, ymin = x.min(), y.min()
    size = max(float(x.max() - xmin), float(y.max() - ymin))
    if size == 0.0:
        raise LimitSetError("degenerate cloud: all points coincide")
    if levels < 2:
        raise LimitSetError("box counting needs at least two scales")
    log_inv_delta = []
    log_counts = []
    for k in range(levels):
        delta = size / 4.0 / (2.0**k)
        ix = np.floor((x - xmin) / delta).astype(np.int64)
        iy = np.floor((y - ymin) / delta).astype(np.int64)
        count = np.unique(ix << 32 | iy).size
        log_inv_delta.append(math.log(1.0 / delta))
        log_counts.append(math.log(count))
    slope = np.polyfit(log_inv_delta, log_counts, 1)[0]
    return float(slope)


def render(
    cloud: LimitPointCloud,
    width: int = 800,
    height: int = 800,
    window: tuple[float, float, float, float] = (-2.2, 2.2, -2.2, 2.2),
) -> bytes:
    """Binary PPM (P6): white background, one black pixel per cloud point
    inside the window (re_min, re_max, im_min, im_max)."""
    if width < 1 or height < 1:
        raise LimitSetError("image dimensions must be positive")
    re_min, re_max, im_min, im_max = (float(v) for v in window)
    if not (re_min < re_max and im_min < im_max):
        raise LimitSetError("window must be a nonempty rectangle")
    img = np.full((height, width, 3), 255, dtype=np.uint8)
    z = cloud.plane_values(radius=math.inf) if len(cloud) else np.empty(0, complex)
    if z.size:
        fx = (z.real - re_min) / (re_max - re_min)
        fy = (im_max - z.imag) / (im_max - im_min)
        keep = (fx >= 0.0) & (fx <= 1.0) & (fy >= 0.0) & (fy <= 1.0)
        px = np.minimum((fx[keep] * width).astype(np.int64), width - 1)
        py = np.minimum((fy[keep] * height).astype(np.int64), height - 1)
        img[py, px] = 0
    header = b"P6\n%d %d\n255\n" % (width, height)
    return header + img.tobytes()


def cloud_group_invariance(cloud: LimitPointCloud, spec: GroupSpec) -> float:
    """One-sided chordal distance from the generator-mapped cloud back to the
    cloud: small values witness invariance of the sampled set under the
    group."""
    if len(cloud) == 0:
        raise LimitSetError("empty cloud")
    tree = cKDTree(cloud.sphere3())
    vals = cloud.values
    charts = cloud.charts
    u = np.where(charts == 0, vals, np.ones_like(vals))
    v = np.where(charts == 0, np.ones_like(vals), vals)
    worst = 0.0
    mats = list(spec.generators) + [g.inverse() for g in spec.generators]
    for g in mats:
        a, b, c, d = g.entries()
        nu = a * u + b * v
        nv = c * u + d * v
        take0 = np.abs(nu) <= np.abs(nv)
        new_vals = np.empty_like(nu)
        # nv (resp. nu) is nonzero wherever take0 (resp. not): the images
        # are genuine sphere points
        new_vals[take0] = nu[take0] / nv[take0]
        new_vals[~take0] = nv[~take0] / nu[~take0]
        new_charts = np.where(take0, 0, 1).astype(np.int8)
        dists, _ = tree.query(_lift(new_vals, new_charts))
        worst = max(worst, float(dists.max()))
    return worst


def format_cloud_csv(cloud: LimitPointCloud) -> str:
    lines = ["re,im,chart"]
    for v, c in zip(cloud.values, cloud.charts):
        lines.append(f"{v.real:.9g},{v.imag:.9g},{int(c)}")
    return "\n".join(lines) + "\n"


def write_cloud_csv(path, cloud: LimitPointCloud) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_cloud_csv(cloud))
