"""Point sets, distances and alpha-quasi unit ball graph (alpha-UBG) instances.

An alpha-UBG on points in R^d must contain every pair at distance <= alpha and
no pair at distance > 1.  Pairs in the band (alpha, 1] are decided by an
explicit policy recorded with the instance.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph_core import WeightedGraph, connected_components

TOL = 1e-9
MAX_RETRIES = 20
SHRINK = 0.9


class UsageError(ValueError):
    """Raised on malformed arguments (dimension mismatch, degenerate input)."""


class GenerationError(RuntimeError):
    """Raised when a connected instance could not be produced."""


def euclid(p: Sequence[float], q: Sequence[float]) -> float:
    if len(p) != len(q):
        raise UsageError(f"dimension mismatch: {len(p)} vs {len(q)}")
    return math.dist(p, q)


def angle_from_distances(d_uv: float, d_uz: float, d_vz: float) -> float:
    """Angle at u in the triangle (u, v, z), from side lengths only.

    Nodes know distances to neighbors but not coordinates, so angles are
    recovered with the law of cosines.
    """
    if d_uv <= 0.0 or d_uz <= 0.0:
        raise UsageError("degenerate triangle: zero-length side at the apex")
    if d_vz < 0.0:
        raise UsageError("negative length")
    if (d_vz > d_uv + d_uz + TOL or d_uv > d_uz + d_vz + TOL
            or d_uz > d_uv + d_vz + TOL):
        raise UsageError(
            f"lengths ({d_uv}, {d_uz}, {d_vz}) violate the triangle inequality")
    c = (d_uv * d_uv + d_uz * d_uz - d_vz * d_vz) / (2.0 * d_uv * d_uz)
    return math.acos(min(1.0, max(-1.0, c)))


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


# ---------------------------------------------------------------------------
# band-edge policy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BandPolicy:
    """Rule for pairs whose distance lies in (alpha, 1]."""

    kind: str = "all"
    p: float = 1.0

    def __post_init__(self):
        if self.kind not in ("all", "none", "bernoulli"):
            raise UsageError(f"unknown band policy {self.kind!r}")
        if self.kind == "bernoulli" and not 0.0 <= self.p <= 1.0:
            raise UsageError(f"bernoulli probability {self.p} not in [0, 1]")

    @classmethod
    def parse(cls, text: "str | BandPolicy") -> "BandPolicy":
        if isinstance(text, BandPolicy):
            return text
        text = text.strip()
        if text in ("all", "none"):
            return cls(text, 1.0 if text == "all" else 0.0)
        if text.startswith("bernoulli"):
            rest = text[len("bernoulli"):].strip()
            if rest.startswith(":"):
                value = rest[1:]
            elif rest.startswith("(") and rest.endswith(")"):
                value = rest[1:-1]
            else:
                raise UsageError(f"cannot parse band policy {text!r}")
            try:
                return cls("bernoulli", float(value))
            except ValueError:
                raise UsageError(f"cannot parse band policy {text!r}") from None
        raise UsageError(f"cannot parse band policy {text!r}")

    def __str__(self) -> str:
        if self.kind == "bernoulli":
            return f"bernoulli:{self.p:g}"
        return self.kind


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------

@dataclass
class UbgInstance:
    d: int
    alpha: float
    points: np.ndarray
    edges: list[tuple[int, int]]
    policy: BandPolicy = field(default_factory=BandPolicy)
    seed: int = 0
    _lengths: dict = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def lengths(self) -> dict[tuple[int, int], float]:
        """Euclidean length of every edge, keyed by (u, v) with u < v."""
        if self._lengths is None:
            self._lengths = {
                (u, v): math.dist(self.points[u], self.points[v])
                for u, v in self.edges
            }
        return self._lengths

    def length(self, u: int, v: int) -> float:
        return self.lengths[(u, v) if u < v else (v, u)]

    def graph(self) -> WeightedGraph:
        return WeightedGraph.from_edges(self.n, self.lengths.items())

    @classmethod
    def from_points(cls, points, alpha: float, policy="all", seed: int = 0
                    ) -> "UbgInstance":
        """Build the alpha-UBG on fixed coordinates.

        Band pairs are visited in lexicographic order and, under a bernoulli
        policy, each consumes one uniform draw from a generator seeded with
        ``seed``.
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] < 2:
            raise UsageError("points must be an (n, d) array with d >= 2")
        if not np.all(np.isfinite(pts)):
            raise UsageError("coordinates must be finite")
        if not 0.0 < alpha <= 1.0:
            raise UsageError(f"alpha={alpha} must lie in (0, 1]")
        policy = BandPolicy.parse(policy)
        n = len(pts)
        edges: list[tuple[int, int]] = []
        if n > 1:
            dist = pairwise_distances(pts)
            iu, ju = np.triu_indices(n, k=1)
            dd = dist[iu, ju]
            keep = dd <= 1.0
            iu, ju, dd = iu[keep], ju[keep], dd[keep]
            mandatory = dd <= alpha
            band = ~mandatory
            if policy.kind == "all":
                chosen = np.ones_like(band)
            elif policy.kind == "none":
                chosen = np.zeros_like(band)
            else:
                rng = np.random.default_rng([seed, 0x5EED])
                draws = rng.random(int(band.sum()))
                chosen = np.zeros_like(band)
                chosen[band] = draws < policy.p
            sel = mandatory | (band & chosen)
            edges = [(int(u), int(v)) for u, v in zip(iu[sel], ju[sel])]
        inst = cls(d=pts.shape[1], alpha=float(alpha), points=pts, edges=edges,
                   policy=policy, seed=int(seed))
        return inst

    # -- persistence --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "alpha": self.alpha,
            "seed": self.seed,
            "policy": str(self.policy),
            "points": [[float(x) for x in p] for p in self.points],
            "edges": [[u, v] for u, v in sorted(self.edges)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UbgInstance":
        pts = np.asarray(data["points"], dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, int(data["d"]))
        edges = sorted((min(u, v), max(u, v)) for u, v in data["edges"])
        return cls(d=int(data["d"]), alpha=float(data["alpha"]), points=pts,
                   edges=[(int(u), int(v)) for u, v in edges],
                   policy=BandPolicy.parse(data.get("policy", "all")),
                   seed=int(data.get("seed", 0)))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "UbgInstance":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _ball_volume(d: int, radius: float) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * radius ** d


def cube_side(n: int, d: int, alpha: float) -> float:
    """Side of the sampling cube giving about max(6, 2 ln n) mandatory
    neighbors per node, comfortably above the connectivity threshold."""
    target = max(6.0, 2.0 * math.log(max(n, 2)))
    return (n * _ball_volume(d, alpha) / target) ** (1.0 / d)


def generate_instance(n: int, d: int = 2, alpha: float = 1.0, policy="all",
                      seed: int = 0) -> UbgInstance:
    """Uniform points in a cube, resampled in a 10% smaller cube until the
    alpha-UBG is connected (at most 20 retries)."""
    if n < 1:
        raise UsageError("n must be >= 1")
    if d < 2:
        raise UsageError("d must be >= 2")
    if not 0.0 < alpha <= 1.0:
        raise UsageError(f"alpha={alpha} must lie in (0, 1]")
    policy = BandPolicy.parse(policy)
    side = cube_side(n, d, alpha)
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RETRIES + 1):
        pts = rng.random((n, d)) * side
        inst = UbgInstance.from_points(pts, alpha, policy, seed)
        comps = connected_components(inst.graph())
        if len(comps) == 1:
            return inst
        side *= SHRINK
    raise GenerationError(
        f"no connected instance for n={n}, d={d}, alpha={alpha}, "
        f"policy={policy}, seed={seed} after {MAX_RETRIES} retries")


def validate_instance(inst: UbgInstance) -> list[str]:
    """Every violated UBG constraint, as human-readable lines."""
    report: list[str] = []
    n = inst.n
    pts = np.asarray(inst.points, dtype=float)
    if pts.ndim != 2 or (n and pts.shape[1] != inst.d):
        report.append(f"points do not have dimension d={inst.d}")
        return report
    if inst.d < 2:
        report.append(f"dimension d={inst.d} < 2")
    if not np.all(np.isfinite(pts)):
        report.append("non-finite coordinates")
        return report
    if not 0.0 < inst.alpha <= 1.0:
        report.append(f"alpha={inst.alpha} outside (0, 1]")
    seen = set()
    for u, v in inst.edges:
        if u == v:
            report.append(f"self-loop at {u}")
            continue
        if not (0 <= u < n and 0 <= v < n):
            report.append(f"edge ({u}, {v}) references a missing node")
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            report.append(f"duplicate edge {key}")
        seen.add(key)
    if n > 1:
        dist = pairwise_distances(pts)
        for u, v in sorted(seen):
            if dist[u, v] > 1.0 + TOL:
                report.append(f"long edge ({u}, {v}) of length {dist[u, v]:.6g} > 1")
        iu, ju = np.triu_indices(n, k=1)
        short = dist[iu, ju] <= inst.alpha - TOL
        for u, v in zip(iu[short], ju[short]):
            if (int(u), int(v)) not in seen:
                report.append(
                    f"missing mandatory edge ({u}, {v}) of length "
                    f"{dist[u, v]:.6g} <= alpha={inst.alpha}")
    return report


def edges_from_pairs(pairs: Iterable) -> list[tuple[int, int]]:
    return sorted({(min(int(u), int(v)), max(int(u), int(v))) for u, v in pairs})
