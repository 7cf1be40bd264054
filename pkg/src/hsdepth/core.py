"""Instance construction for halfspace-depth solves.

A depth query (point set S, query point p) is translated into the row system
a_j = q_j - p.  Rows are unit-normalized, rows equal up to a positive scalar
are merged into one row with an integer weight, and rows with q_j = p (the
zero vector, unsatisfiable as a strict inequality) are pulled out into
``forced_count`` since they belong to every cover.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

ZERO_ROW_TOL = 1e-12
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class PointSet:
    """Labeled points in d-dimensional space; the statistical input."""

    dim: int
    points: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"points must be (n, {self.dim}), got {pts.shape}")
        if pts.shape[0] < 1:
            raise ValueError("point set must contain at least one point")
        if self.labels is not None and len(self.labels) != pts.shape[0]:
            raise ValueError("labels must match point count")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class DepthInstance:
    """Translated row system a_j = q_j - p with multiplicity weights.

    ``rows`` are unit vectors; ``weights[j]`` counts how many original points
    collapsed onto row j; ``forced_count`` counts points equal to the query
    point, which are members of every cover.  ``row_origin[j]`` lists the
    original point indices behind row j.
    """

    dim: int
    rows: np.ndarray
    weights: np.ndarray
    forced_count: int
    origin_point: np.ndarray
    row_origin: tuple[tuple[int, ...], ...]
    forced_indices: tuple[int, ...] = ()

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float).reshape(-1, self.dim)
        weights = np.asarray(self.weights, dtype=int).reshape(-1)
        if rows.shape[0] != weights.shape[0]:
            raise ValueError("rows and weights must have equal length")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        if self.forced_count < 0:
            raise ValueError("forced_count must be non-negative")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(
            self, "origin_point", np.asarray(self.origin_point, dtype=float)
        )

    @property
    def num_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def total_points(self) -> int:
        return int(self.weights.sum()) + self.forced_count


def build_instance(
    points: PointSet, p, merge_duplicates: bool = True
) -> DepthInstance:
    """Translate (S, p) into a DepthInstance.

    Rows are a_j = q_j - p normalized to unit length.  Rows equal up to a
    positive scalar multiple are merged with summed weights (the sign of
    x . a_j is invariant under positive scaling).  Rows with q_j = p are
    removed and counted in forced_count.

    Raises ValueError on dimension mismatch.
    """
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape[0] != points.dim:
        raise ValueError(
            f"query point has {p.shape[0]} coordinates, expected {points.dim}"
        )
    diffs = points.points - p[None, :]
    scale = max(1.0, float(np.abs(points.points).max()), float(np.abs(p).max()))
    norms = np.linalg.norm(diffs, axis=1)
    zero_mask = norms <= ZERO_ROW_TOL * scale

    forced_indices = tuple(int(i) for i in np.nonzero(zero_mask)[0])
    kept = np.nonzero(~zero_mask)[0]

    unit_rows: list[np.ndarray] = []
    weights: list[int] = []
    origin: list[list[int]] = []
    for i in kept:
        u = diffs[i] / norms[i]
        if merge_duplicates:
            hit = -1
            for k, v in enumerate(unit_rows):
                if np.max(np.abs(v - u)) < MERGE_TOL:
                    hit = k
                    break
            if hit >= 0:
                weights[hit] += 1
                origin[hit].append(int(i))
                continue
        unit_rows.append(u)
        weights.append(1)
        origin.append([int(i)])

    rows = (
        np.array(unit_rows, dtype=float)
        if unit_rows
        else np.zeros((0, points.dim), dtype=float)
    )
    return DepthInstance(
        dim=points.dim,
        rows=rows,
        weights=np.array(weights, dtype=int),
        forced_count=len(forced_indices),
        origin_point=p,
        row_origin=tuple(tuple(o) for o in origin),
        forced_indices=forced_indices,
    )


def compute_big_m(instance: DepthInstance, box_bound: float) -> np.ndarray:
    """Per-row big-M values: M_j = sqrt(d * c^2) * ||a_j||.

    For unit rows this is sqrt(d) * c.  The value bounds |a_j . x| over the
    box -c <= x_i <= c, so setting s_j = 1 always relaxes row j.
    """
    if box_bound <= 0:
        raise ValueError("box_bound must be positive")
    norms = np.linalg.norm(instance.rows, axis=1)
    return math.sqrt(instance.dim) * box_bound * norms


def lattice_epsilon_bound(m: int, d: int) -> float:
    """Lower bound (2 m sqrt(d))^-(d-1) on the distance from the origin to
    any affine hull of lattice points with coordinates bounded by m.

    Valid for integral data only.  The bound shrinks so fast with d that it
    is usually far too small to be usable as a working strictness value;
    prefer the default epsilon and the binary-search driver's reported value.
    """
    if m <= 0 or d < 2:
        raise ValueError("need m >= 1 and d >= 2")
    return float((2.0 * m * math.sqrt(d)) ** (-(d - 1)))


@dataclass
class SolverParams:
    """Solver configuration shared by the MIP, heuristic, and cut layers.

    epsilon is the strictness value replacing the strict inequalities
    a_j . x > 0 by a_j . x >= epsilon; big_m holds the per-row relaxation
    constants and must dominate epsilon or every binary is forced to 1.
    """

    epsilon: float = 1e-5
    box_bound: float = 1.0
    big_m: np.ndarray | None = None
    cut_rounds: int = 10
    improve_tol: float = 1e-3
    feas_tol: float = 1e-9
    int_tol: float = 1e-6
    time_limit: float = 600.0
    node_limit: int = 1_000_000

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.box_bound <= 0:
            raise ValueError("box_bound must be positive")
        for name in ("improve_tol", "feas_tol", "int_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.big_m is not None:
            self.big_m = np.asarray(self.big_m, dtype=float)
            if self.big_m.size and self.epsilon >= float(self.big_m.min()):
                raise ValueError("epsilon must stay below every big-M value")

    @classmethod
    def for_instance(cls, instance: DepthInstance, **kwargs) -> "SolverParams":
        params = cls(**kwargs)
        params.big_m = compute_big_m(instance, params.box_bound)
        if params.big_m.size and params.epsilon >= float(params.big_m.min()):
            raise ValueError("epsilon must stay below every big-M value")
        return params


def parse_points(text: str) -> PointSet:
    """Parse the point-set text format.

    First non-comment line: "n d".  Then n lines of d whitespace-separated
    decimal numbers.  Lines starting with '#' are comments.
    """
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines:
        raise ValueError("empty point-set file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"header must be 'n d', got {lines[0]!r}")
    try:
        n, d = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ValueError(f"header must be 'n d', got {lines[0]!r}") from exc
    if len(lines) - 1 != n:
        raise ValueError(f"expected {n} point lines, found {len(lines) - 1}")
    pts = np.zeros((n, d), dtype=float)
    for i, ln in enumerate(lines[1:]):
        parts = ln.split()
        if len(parts) != d:
            raise ValueError(f"point {i}: expected {d} coordinates, got {len(parts)}")
        try:
            pts[i] = [float(v) for v in parts]
        except ValueError as exc:
            raise ValueError(f"point {i}: non-numeric coordinate in {ln!r}") from exc
    return PointSet(dim=d, points=pts)


def format_points(points: PointSet) -> str:
    out = [f"{points.n} {points.dim}"]
    for row in points.points:
        out.append(" ".join(_fmt(v) for v in row))
    return "\n".join(out) + "\n"


def _fmt(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def load_points(path: str | Path) -> PointSet:
    return parse_points(Path(path).read_text())


def save_points(points: PointSet, path: str | Path) -> None:
    Path(path).write_text(format_points(points))
