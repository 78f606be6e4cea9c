"""Geometry of reliefs: paths, descent checks, level curves and domains.

A path *descends* a relief when the relief strictly decreases along it.
The set of points reachable from a seed by descending paths, intersected
over the two eigenvalue reliefs, approximates the domain on which a
trajectory entering at the seed stays near the slow curve.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order
from skimage.measure import find_contours

from .spectrum import CutLineAmbiguity, Relief

__all__ = [
    "ComplexPath", "DescentCheck", "DomainMask", "Reachability", "PathConstructionError",
    "is_descending", "level_curves", "descending_reachability", "xm_path", "approach_path",
    "path_floor", "BETA_MAX",
]

BETA_MAX = 8.0 / 9.0


class PathConstructionError(RuntimeError):
    """No strictly descending continuation was found."""


@dataclass(frozen=True)
class ComplexPath:
    """Polyline in the complex plane; ``max_step`` bounds sampling and quadrature steps."""

    nodes: tuple
    max_step: float = 0.01

    def __post_init__(self):
        nodes = tuple(complex(z) for z in self.nodes)
        if len(nodes) < 2:
            raise ValueError("a path needs at least two nodes")
        for a, b in zip(nodes[:-1], nodes[1:]):
            if a == b:
                raise ValueError(f"consecutive nodes coincide at {a}")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        object.__setattr__(self, "nodes", nodes)

    @property
    def start(self):
        return self.nodes[0]

    @property
    def end(self):
        return self.nodes[-1]

    def segments(self):
        return list(zip(self.nodes[:-1], self.nodes[1:]))

    @property
    def length(self):
        return float(sum(abs(b - a) for a, b in self.segments()))

    def conjugate(self):
        return ComplexPath(tuple(z.conjugate() for z in self.nodes), self.max_step)

    def reversed(self):
        return ComplexPath(self.nodes[::-1], self.max_step)

    def sample(self, step=None):
        """Points, unit tangents and segment indices at spacing <= ``step``."""
        step = self.max_step if step is None else step
        pts, tangents, index = [], [], []
        for k, (a, b) in enumerate(self.segments()):
            n = max(int(np.ceil(abs(b - a) / step)), 1)
            u = np.linspace(0.0, 1.0, n + 1)
            if k > 0:
                u = u[1:]
            pts.append(a + u * (b - a))
            tangents.append(np.full(u.shape, (b - a) / abs(b - a)))
            index.append(np.full(u.shape, k))
        return np.concatenate(pts), np.concatenate(tangents), np.concatenate(index)


@dataclass(frozen=True)
class DescentCheck:
    ok: bool
    first_violation: complex = None
    worst_rate: float = None
    level_at_violation: float = None

    def __bool__(self):
        return self.ok


def _guard_cut(relief, tau):
    on = relief.on_cut(tau)
    if np.any(on):
        t = complex(np.asarray(tau)[on][0])
        raise CutLineAmbiguity(t, complex(relief.F(t, "low")), complex(relief.F(t, "high")))


def is_descending(path, relief, tol=1e-9, segments=None):
    """Check that ``relief`` strictly decreases along ``path``.

    The rate ``d/ds R(path(s)) = Re(slope * unit tangent)`` must stay below
    ``-tol * scale`` at every sample, where ``scale`` is the largest
    ``|slope|`` met. ``segments`` restricts the check to those indices.
    """
    tau, tangent, index = path.sample()
    if segments is not None:
        keep = np.isin(index, list(segments))
        # a shared node belongs to the segment it starts
        tau, tangent = tau[keep], tangent[keep]
    _guard_cut(relief, tau)
    slope = relief.slope(tau)
    rate = np.real(slope * tangent)
    scale = max(float(np.max(np.abs(slope))), 1e-300)
    bad = rate >= -tol * scale
    worst = float(np.max(rate))
    if not bad.any():
        return DescentCheck(True, None, worst)
    k = int(np.argmax(bad))
    return DescentCheck(False, complex(tau[k]), worst, float(relief.R(tau[k])))


def path_floor(path, relief, target=None):
    """Largest ``R(target) - R(tau)`` over the path (<= 0 means no dip below the target)."""
    tau, _, _ = path.sample()
    target = path.end if target is None else target
    return float(np.max(relief.R(target) - relief.R(tau)))


def _grid(bbox, n):
    xmin, xmax, ymin, ymax = bbox
    if not (xmax > xmin and ymax > ymin):
        raise ValueError(f"degenerate bbox {bbox}")
    xs = np.linspace(xmin, xmax, n)
    ys = np.linspace(ymin, ymax, n)
    return xs, ys, xs[None, :] + 1j * ys[:, None]


def _cut_band(relief, xs, ys):
    """Grid nodes on, or one row/column next to, the relief's cut."""
    band = np.zeros((len(ys), len(xs)), dtype=bool)
    if relief.system == "hopf":
        return band
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]
    X, Y = np.meshgrid(xs, ys)
    b = relief.b
    if relief.branch.name == "POSITIVE":
        band |= (np.abs(Y) <= dy * (1 + 1e-9)) & (X > b)
    else:
        band |= (np.abs(X - b) <= dx * (1 + 1e-9)) & (Y < 0)
    return band


def level_curves(relief, level, bbox=(-1.5, 1.5, -1.5, 1.5), n=401):
    """Polylines where ``relief.R == level``, by marching squares.

    Cells touching the branch cut are masked so no contour bridges the two
    sheets. Returns a list of complex arrays (possibly empty).
    """
    if n < 16:
        raise ValueError("n must be at least 16")
    xs, ys, Z = _grid(bbox, n)
    with np.errstate(invalid="ignore"):
        R = relief.R(Z)
    mask = ~_cut_band(relief, xs, ys)
    if not (np.nanmin(R[mask]) <= level <= np.nanmax(R[mask])):
        return []
    curves = []
    for c in find_contours(R, level, mask=mask):
        iy, ix = c[:, 0], c[:, 1]
        x = np.interp(ix, np.arange(n), xs)
        y = np.interp(iy, np.arange(n), ys)
        curves.append(x + 1j * y)
    return curves


@dataclass
class DomainMask:
    """Nodes of a grid reachable from ``seed`` by strictly descending grid paths."""

    bbox: tuple
    n: int
    reachable: np.ndarray
    relief: object
    seed: complex
    predecessors: np.ndarray = None
    caveat: str = ""

    @property
    def xs(self):
        return np.linspace(self.bbox[0], self.bbox[1], self.n)

    @property
    def ys(self):
        return np.linspace(self.bbox[2], self.bbox[3], self.n)

    def node_of(self, t):
        xs, ys = self.xs, self.ys
        ix = int(np.clip(np.rint((t.real - xs[0]) / (xs[1] - xs[0])), 0, self.n - 1))
        iy = int(np.clip(np.rint((t.imag - ys[0]) / (ys[1] - ys[0])), 0, self.n - 1))
        return iy, ix

    def reachable_at(self, t):
        """Reachability of the grid node nearest ``t``."""
        return bool(self.reachable[self.node_of(complex(t))])

    def cell_reachable(self, t):
        """True when all four corners of the grid cell containing ``t`` are reachable."""
        t = complex(t)
        xs, ys = self.xs, self.ys
        ix = int(np.clip(np.floor((t.real - xs[0]) / (xs[1] - xs[0])), 0, self.n - 2))
        iy = int(np.clip(np.floor((t.imag - ys[0]) / (ys[1] - ys[0])), 0, self.n - 2))
        return bool(self.reachable[iy:iy + 2, ix:ix + 2].all())

    def real_axis(self):
        """(x values, reachability) along the grid row nearest the real axis."""
        iy = int(np.argmin(np.abs(self.ys)))
        return self.xs, self.reachable[iy].copy()

    def grid_path(self, t):
        """Grid polyline from the seed to the node nearest ``t``, or None."""
        if self.predecessors is None or not self.reachable_at(t):
            return None
        iy, ix = self.node_of(complex(t))
        k = iy * self.n + ix
        xs, ys = self.xs, self.ys
        out = []
        while k >= 0:
            out.append(xs[k % self.n] + 1j * ys[k // self.n])
            k = self.predecessors[k]
        return np.array(out[::-1])

    def __and__(self, other):
        if self.bbox != other.bbox or self.n != other.n:
            raise ValueError("masks live on different grids")
        caveat = "; ".join(c for c in (self.caveat, other.caveat) if c)
        return DomainMask(self.bbox, self.n, self.reachable & other.reachable,
                          (self.relief, other.relief), self.seed, None, caveat)


@dataclass
class Reachability:
    masks: list
    intersection: DomainMask
    critical_in_bbox: bool = True
    notes: list = field(default_factory=list)


def stencil(radius):
    """Primitive lattice steps ``(dy, dx)`` with ``max(|dy|, |dx|) <= radius``.

    ``radius = 1`` is the 8-neighbour stencil.
    """
    out = []
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if (dy, dx) != (0, 0) and math.gcd(dy, dx) == 1:
                out.append((dy, dx))
    return out


def _crosses_cut(relief, z1, z2):
    if relief.system == "hopf":
        return np.zeros(z1.shape, dtype=bool)
    b = relief.b
    if relief.branch.name == "POSITIVE":
        y1, y2 = z1.imag, z2.imag
        straddle = y1 * y2 <= 0
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(y1 != y2, y1 / (y1 - y2), 0.0)
        xc = z1.real + w * (z2.real - z1.real)
        return straddle & (xc > b) & ~((y1 == 0) & (y2 == 0) & (z1.real <= b) & (z2.real <= b))
    x1, x2 = z1.real - b, z2.real - b
    straddle = x1 * x2 <= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(x1 != x2, x1 / (x1 - x2), 0.0)
    yc = z1.imag + w * (z2.imag - z1.imag)
    return straddle & (yc < 0)


def _mask_for(relief, seed, bbox, n, tol_rel, radius):
    xs, ys, Z = _grid(bbox, n)
    with np.errstate(invalid="ignore"):
        R = relief.R(Z)
    valid = ~relief.on_cut(Z) & np.isfinite(R)
    span = float(np.nanmax(R[valid]) - np.nanmin(R[valid]))
    margin = tol_rel * span
    rows, cols = [], []
    idx = np.arange(n * n).reshape(n, n)
    for dy, dx in stencil(radius):
        sy = slice(max(0, -dy), n - max(0, dy))
        sx = slice(max(0, -dx), n - max(0, dx))
        ty = slice(max(0, dy), n - max(0, -dy))
        tx = slice(max(0, dx), n - max(0, -dx))
        ok = valid[sy, sx] & valid[ty, tx] & (R[ty, tx] < R[sy, sx] - margin)
        ok &= ~_crosses_cut(relief, Z[sy, sx], Z[ty, tx])
        rows.append(idx[sy, sx][ok])
        cols.append(idx[ty, tx][ok])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n * n, n * n)).tocsr()
    dm = DomainMask(bbox, n, np.zeros((n, n), dtype=bool), relief, complex(seed))
    iy, ix = dm.node_of(complex(seed))
    order, pred = breadth_first_order(graph, iy * n + ix, directed=True, return_predecessors=True)
    reach = np.zeros(n * n, dtype=bool)
    reach[order] = True
    dm.reachable = reach.reshape(n, n)
    dm.predecessors = pred
    return dm


def descending_reachability(seed, reliefs, bbox=(-1.5, 1.5, -1.5, 1.5), n=401, tol_rel=1e-9,
                            radius=5):
    """Grid approximation of the domain reachable from ``seed`` by descending paths.

    Each relief gets its own mask. Nodes are joined along the primitive
    lattice steps of ``stencil(radius)``; an edge is kept when the relief
    drops by more than ``tol_rel`` times its range over the bbox and the
    edge does not cross the cut. ``radius = 1`` is the 8-neighbour graph,
    which cannot follow shallow climbs (every diagonal step may ascend), so
    the default uses steps up to 5 cells. The intersection of the masks
    approximates the domain below ``seed``.
    """
    seed = complex(seed)
    xmin, xmax, ymin, ymax = bbox
    if not (xmin <= seed.real <= xmax and ymin <= seed.imag <= ymax):
        raise ValueError(f"seed {seed} outside bbox {bbox}")
    if isinstance(reliefs, Relief):
        reliefs = [reliefs]
    masks = [_mask_for(r, seed, bbox, n, tol_rel, radius) for r in reliefs]
    inter = masks[0]
    for m in masks[1:]:
        inter = inter & m
    notes = []
    crit = True
    first = reliefs[0]
    if first.system == "hfn" and first.b > 0.25:
        tc = complex(0.5, np.sqrt(first.b - 0.25))
        if first.which == "mu":
            tc = tc.conjugate()
        crit = xmin <= tc.real <= xmax and ymin <= tc.imag <= ymax
    if not crit:
        notes.append("no critical point in bbox")
    if any(r.system == "hfn" and r.branch.name != "POSITIVE" for r in reliefs):
        inter.caveat = "principal sheet only; the second-sheet extension is not computed"
    return Reachability(masks, inter, crit, notes)


def _polyline_check(nodes, relief, step, upto):
    path = ComplexPath(tuple(nodes), step)
    return path, is_descending(path, relief, segments=range(upto))


def approach_path(relief, start, target, beta, step=0.01, corners=None):
    """Polyline ``start -> corner -> target + i beta -> target``.

    The corner is taken from ``corners`` (real parts, tried in order) at
    height ``beta``; the first candidate whose leading part strictly
    descends ``relief`` is returned. The final vertical drop is not
    required to descend strictly.
    """
    start, target = complex(start), complex(target)
    top = target + 1j * beta
    if corners is None:
        corners = np.linspace(0.5 * start.real, min(target.real, 0.0) - 0.05, 8)
    worst = None
    for cx in corners:
        corner = complex(cx, beta)
        nodes = [start, corner, top, target]
        if abs(top - corner) < 1e-12:
            nodes = [start, top, target]
        path, check = _polyline_check(nodes, relief, step, len(nodes) - 2)
        if check:
            return path
        if worst is None or check.worst_rate < worst.worst_rate:
            worst = check
    level = "unknown" if worst is None else f"{worst.level_at_violation:.6g}"
    raise PathConstructionError(
        f"no descending approach to {target} at height {beta}; blocked at level R = {level}"
        f" near {None if worst is None else worst.first_violation}")


def xm_path(b, beta=0.5, pad=2.0, step=0.01):
    """Integration path from ``-(b + pad)`` to ``b`` for the distinguished solution X_-.

    The path strictly descends ``R_lambda`` until ``b + i beta`` and ends
    with the vertical segment ``b + i beta -> b``.
    """
    if not 0.0 < beta < BETA_MAX:
        raise ValueError(f"beta = {beta} must lie in (0, 8/9)")
    if not pad > 0:
        raise ValueError("pad must be positive")
    return approach_path(Relief("lambda", b), -(b + pad), b, beta, step)
