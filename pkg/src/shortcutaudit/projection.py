"""Statistics-space distance, 2D embedding, and glyph collision resolution
for the shortcut scatter.

The pairwise distance is |dProd|^2 + |dNormCover|^2 + [pred labels differ],
with coverage min-max normalized over the currently filtered node set. The
embedding is classical metric scaling (deterministic; no stochastic steps),
followed by iterative pairwise separation of the circle glyphs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mining import ShortcutNode

MAX_POINTS = 300
DEFAULT_R_MIN = 0.008
DEFAULT_R_MAX = 0.02
OVERLAP_EPSILON = 1e-6


class ProjectionLimitError(ValueError):
    """Raised when more nodes than the projection supports are requested."""

    def __init__(self, count: int):
        super().__init__(
            f"{count} shortcuts exceed the {MAX_POINTS}-point projection limit; tighten filters"
        )
        self.count = count


@dataclass(frozen=True)
class NormContext:
    min_coverage: int
    max_coverage: int

    @classmethod
    def from_nodes(cls, nodes: list[ShortcutNode]) -> NormContext:
        coverages = [n.whole.coverage for n in nodes]
        return cls(min(coverages), max(coverages)) if coverages else cls(0, 0)

    def scale(self, coverage: int) -> float:
        """Min-max to [0,1]; degenerate range maps to 0."""
        span = self.max_coverage - self.min_coverage
        if span == 0:
            return 0.0
        return (coverage - self.min_coverage) / span


@dataclass
class ProjectionPoint:
    id: str
    x: float
    y: float
    radius: float
    arc: float
    label: str | None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "x": round(self.x, 9),
            "y": round(self.y, 9),
            "radius": round(self.radius, 9),
            "arc": round(self.arc, 9) if self.arc is not None else None,
            "label": self.label,
        }


def shortcut_distance(a: ShortcutNode, b: ShortcutNode, norm: NormContext) -> float:
    pa, pb = a.whole.productivity or 0.0, b.whole.productivity or 0.0
    ca, cb = norm.scale(a.whole.coverage), norm.scale(b.whole.coverage)
    indicator = 1.0 if a.whole.prediction_label != b.whole.prediction_label else 0.0
    return abs(pa - pb) ** 2 + abs(ca - cb) ** 2 + indicator


def distance_matrix(nodes: list[ShortcutNode], norm: NormContext | None = None) -> np.ndarray:
    norm = norm or NormContext.from_nodes(nodes)
    n = len(nodes)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = shortcut_distance(nodes[i], nodes[j], norm)
    return out


def embed(dist: np.ndarray, margin: float = 0.05) -> np.ndarray:
    """Classical metric scaling into [0,1]^2 (uniform scale, centered).

    Deterministic: eigenvectors are sign-fixed by their largest-magnitude
    component, axes ordered by descending eigenvalue.
    """
    n = dist.shape[0]
    if n > MAX_POINTS:
        raise ProjectionLimitError(n)
    if n == 0:
        return np.zeros((0, 2))
    if n == 1:
        return np.array([[0.5, 0.5]])
    sq = dist.astype(float) ** 2
    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ sq @ j
    eigvals, eigvecs = np.linalg.eigh((b + b.T) / 2)
    order = np.argsort(eigvals)[::-1][:2]
    coords = np.zeros((n, 2))
    for axis, idx in enumerate(order):
        val = max(eigvals[idx], 0.0)
        vec = eigvecs[:, idx]
        pivot = int(np.argmax(np.abs(vec)))
        if vec[pivot] < 0:
            vec = -vec
        coords[:, axis] = vec * np.sqrt(val)
    extent = float(np.max(coords.max(axis=0) - coords.min(axis=0)))
    center = (coords.max(axis=0) + coords.min(axis=0)) / 2
    if extent > 0:
        coords = (coords - center) * (1.0 - 2 * margin) / extent
    else:
        coords = coords - center
    return coords + 0.5


def resolve_collisions(
    positions: np.ndarray,
    radii: np.ndarray,
    seed: int = 0,
    max_iter: int = 500,
    epsilon: float = OVERLAP_EPSILON,
) -> tuple[np.ndarray, float]:
    """Iteratively push overlapping circles apart inside [0,1]^2.

    Returns (adjusted positions, max residual overlap); the residual is 0.0
    when every pair satisfies center distance >= r_i + r_j - epsilon.
    """
    pos = positions.astype(float).copy()
    radii = np.asarray(radii, dtype=float)
    n = pos.shape[0]
    if n < 2:
        return pos, 0.0
    rng = np.random.default_rng(seed)
    need = radii[:, None] + radii[None, :]
    np.fill_diagonal(need, 0.0)
    lo = radii[:, None] * np.ones((n, 2))
    hi = 1.0 - lo
    residual = 0.0
    for _ in range(max_iter):
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        overlap = need - dist
        np.fill_diagonal(overlap, 0.0)
        residual = float(overlap.max())
        if residual <= epsilon:
            return pos, 0.0
        mask = overlap > epsilon
        coincident = mask & (dist < 1e-12)
        if coincident.any():
            jitter = rng.normal(size=diff.shape) * 1e-9
            diff = np.where(coincident[:, :, None], jitter, diff)
            dist = np.sqrt((diff**2).sum(axis=2))
            dist[dist < 1e-12] = 1e-12
        unit = diff / np.maximum(dist, 1e-12)[:, :, None]
        push = np.where(mask, overlap * 0.52, 0.0)
        pos += (unit * push[:, :, None]).sum(axis=1)
        pos = np.clip(pos, lo, hi)
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    overlap = need - dist
    np.fill_diagonal(overlap, 0.0)
    residual = float(overlap.max())
    return pos, (residual if residual > epsilon else 0.0)


def glyph_geometry(
    node: ShortcutNode,
    norm: NormContext,
    r_min: float = DEFAULT_R_MIN,
    r_max: float = DEFAULT_R_MAX,
) -> tuple[float, float | None, str | None]:
    """(radius, arc fraction, prediction label): radius grows with the square
    root of normalized coverage so glyph area tracks coverage."""
    radius = r_min + (r_max - r_min) * float(np.sqrt(norm.scale(node.whole.coverage)))
    return radius, node.whole.productivity, node.whole.prediction_label


def project(
    nodes: list[ShortcutNode],
    seed: int = 0,
    r_min: float = DEFAULT_R_MIN,
    r_max: float = DEFAULT_R_MAX,
) -> list[ProjectionPoint]:
    """Full layout for a filtered node list (caller orders it; id order keeps
    payloads reproducible). Raises ProjectionLimitError past 300 nodes."""
    if len(nodes) > MAX_POINTS:
        raise ProjectionLimitError(len(nodes))
    if not nodes:
        return []
    norm = NormContext.from_nodes(nodes)
    coords = embed(distance_matrix(nodes, norm))
    geoms = [glyph_geometry(node, norm, r_min, r_max) for node in nodes]
    radii = np.array([g[0] for g in geoms])
    coords, _ = resolve_collisions(coords, radii, seed=seed)
    points = []
    for node, (x, y), (radius, arc, label) in zip(nodes, coords, geoms):
        points.append(
            ProjectionPoint(id=node.id, x=float(x), y=float(y), radius=radius, arc=arc, label=label)
        )
    return points
