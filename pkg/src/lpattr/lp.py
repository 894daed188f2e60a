"""Geometry of a fixed linear program.

The program is ``min c.x  s.t.  A x <= b, x >= 0`` with ``c``, ``A``, ``b``
held constant. Everything here is exact polytope arithmetic: feasibility,
constraint slacks, vertex enumeration, Euclidean projection onto the
feasible set, and optimizing ``c.x`` over the vertices.

Throughout, "constraints" means the rows of ``A x <= b``; the nonnegativity
bounds ``x >= 0`` are tracked separately and only enter feasibility and the
vertex/projection geometry, never the slack values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyVertexSetError,
    ProjectionFailureError,
    ValidationError,
)
from .serialize import digest_of, format_float

# Feasibility tolerance on slacks and nonnegativity (inclusive boundary).
FEAS_TOL = 1e-9
# Two candidate vertices closer than this (Euclidean) are duplicates.
VERTEX_DEDUP_TOL = 1e-7
# Projection accuracy target and sweep cap for the alternating method.
PROJ_TOL = 1e-8
PROJ_MAX_SWEEPS = 10_000


@dataclass(frozen=True)
class LinearProgram:
    """A fixed program ``min c.x  s.t.  A x <= b, x >= 0``.

    Attributes
    ----------
    c : (n,) cost vector
    A : (m, n) constraint matrix
    b : (m,) constraint bounds
    positivity_flag : True iff every entry of c, A and b is strictly positive.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    positivity_flag: bool = field(init=False)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2:
            raise ValidationError("A must be a 2-d matrix")
        m, n = A.shape
        if n < 1 or m < 1:
            raise ValidationError("need at least one variable and one constraint")
        if c.shape != (n,):
            raise ValidationError(f"c must have shape ({n},), got {c.shape}")
        if b.shape != (m,):
            raise ValidationError(f"b must have shape ({m},), got {b.shape}")
        if not (np.isfinite(c).all() and np.isfinite(A).all() and np.isfinite(b).all()):
            raise ValidationError("c, A, b must be finite")
        c.setflags(write=False)
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "positivity_flag", bool((c > 0).all() and (A > 0).all() and (b > 0).all()))

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    def digest(self) -> str:
        return digest_of({"n": self.n, "m": self.m, "c": self.c, "A": self.A, "b": self.b})


@dataclass(frozen=True)
class VertexSet:
    """Extreme points of the feasible polytope, one per row of ``vertices``."""

    vertices: np.ndarray  # (k, n), lexicographically sorted rows
    origin_included: bool

    def __len__(self) -> int:
        return self.vertices.shape[0]


def as_point(lp: LinearProgram, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (lp.n,):
        raise DimensionMismatchError(f"point must have shape ({lp.n},), got {x.shape}")
    return x


def _as_points(lp: LinearProgram, X) -> np.ndarray:
    """(N, n) view of one point or a batch of points."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != lp.n:
        raise DimensionMismatchError(f"points must have shape (N, {lp.n}), got {X.shape}")
    return X


def slack_values(lp: LinearProgram, X) -> np.ndarray:
    """Row slacks ``b - A x`` for a batch of points, shape (N, m)."""
    return lp.b[None, :] - _as_points(lp, X) @ lp.A.T


def min_slack_many(lp: LinearProgram, X) -> np.ndarray:
    return slack_values(lp, X).min(axis=1)


def feasible_mask(lp: LinearProgram, X) -> np.ndarray:
    X = _as_points(lp, X)
    return (min_slack_many(lp, X) >= -FEAS_TOL) & (X >= -FEAS_TOL).all(axis=1)


def is_feasible(lp: LinearProgram, x) -> bool:
    """True iff ``A x <= b`` and ``x >= 0``, both within FEAS_TOL (boundary inclusive)."""
    return bool(feasible_mask(lp, as_point(lp, x))[0])


def min_slack(lp: LinearProgram, x) -> float:
    """Minimum of ``b - A x`` over rows. Ignores the nonnegativity bounds."""
    return float(min_slack_many(lp, as_point(lp, x))[0])


def enumerate_vertices(lp: LinearProgram) -> VertexSet:
    """All extreme points of ``{A x <= b, x >= 0}``.

    Candidates come from every choice of ``n`` active hyperplanes among the
    ``m`` constraint rows and the ``n`` axis planes ``x_i = 0``; nonsingular
    systems are solved, infeasible or duplicate solutions dropped. The
    polytope must be bounded, otherwise the result is incomplete by nature
    and an empty result raises.
    """
    n, m = lp.n, lp.m
    normals = np.vstack([lp.A, np.eye(n)])
    offsets = np.concatenate([lp.b, np.zeros(n)])
    candidates = []
    for rows in combinations(range(m + n), n):
        M = normals[list(rows)]
        rhs = offsets[list(rows)]
        try:
            v = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            continue  # singular choice of hyperplanes, skip
        if np.isfinite(v).all():
            candidates.append(v)
    kept: list[np.ndarray] = []
    if candidates:
        cand = np.array(candidates)
        cand = cand[feasible_mask(lp, cand)]
        # lexicographic order makes dedup and downstream tie-breaks deterministic
        order = np.lexsort(cand.T[::-1])
        for v in cand[order]:
            if not kept or min(np.linalg.norm(v - w) for w in kept) > VERTEX_DEDUP_TOL:
                kept.append(v)
    if not kept:
        raise EmptyVertexSetError(
            "no feasible vertex found; the feasible set is empty or the enumeration is incomplete"
        )
    vertices = np.array(kept)
    origin_included = bool((np.linalg.norm(vertices, axis=1) <= VERTEX_DEDUP_TOL).any())
    return VertexSet(vertices=vertices, origin_included=origin_included)


def _halfspace_normals(lp: LinearProgram):
    """Rows (a, beta) describing all halfspaces a.x <= beta, including x >= 0."""
    normals = np.vstack([lp.A, -np.eye(lp.n)])
    offsets = np.concatenate([lp.b, np.zeros(lp.n)])
    sq = (normals**2).sum(axis=1)
    return normals, offsets, sq


def project_feasible_many(lp: LinearProgram, X) -> np.ndarray:
    """Euclidean projection of each row of ``X`` onto ``{A x <= b, x >= 0}``.

    Dykstra's alternating projections over the m + n halfspaces; each
    halfspace projection is closed form, and the correction vectors make the
    limit the exact projection onto the intersection, not merely a feasible
    point. Raises ProjectionFailureError when the sweep cap is hit.
    """
    X = _as_points(lp, X)
    normals, offsets, sq = _halfspace_normals(lp)
    k = normals.shape[0]
    x = X.copy()
    corrections = np.zeros((k, X.shape[0], lp.n))
    for _ in range(PROJ_MAX_SWEEPS):
        x_prev = x.copy()
        for i in range(k):
            y = x + corrections[i]
            viol = (y @ normals[i] - offsets[i]) / sq[i]
            step = np.maximum(viol, 0.0)
            x = y - step[:, None] * normals[i][None, :]
            corrections[i] = y - x
        if np.abs(x - x_prev).max() <= PROJ_TOL * 1e-2:
            if ((x @ normals.T - offsets[None, :]) <= PROJ_TOL).all():
                return x
    raise ProjectionFailureError(
        f"projection did not converge within {PROJ_MAX_SWEEPS} sweeps", best_iterate=x
    )


def project_feasible(lp: LinearProgram, x) -> np.ndarray:
    """Closest feasible point to ``x``; identity when ``x`` is already feasible."""
    x = as_point(lp, x)
    if is_feasible(lp, x):
        return x.copy()
    return project_feasible_many(lp, x)[0]


def solve_on_vertices(lp: LinearProgram, direction: str = "minimize"):
    """Optimize ``c.x`` over the vertices.

    Returns ``(vertex, objective)``. Exact objective ties go to the
    lexicographically smallest vertex.
    """
    if direction not in ("minimize", "maximize"):
        raise ValidationError("direction must be 'minimize' or 'maximize'")
    vs = enumerate_vertices(lp)
    if len(vs) == 0:
        raise EmptyVertexSetError("cannot optimize over an empty vertex set")
    values = vs.vertices @ lp.c
    best = None
    best_val = None
    for v, val in zip(vs.vertices, values):  # vertices are lexicographically sorted
        if best is None or (val < best_val if direction == "minimize" else val > best_val):
            best, best_val = v, val
    return best.copy(), float(best_val)


def vertex_bbox(lp: LinearProgram, margin: float = 1.5) -> np.ndarray:
    """Per-dimension sampling box [0, margin * max vertex coordinate], shape (n, 2)."""
    vs = enumerate_vertices(lp)
    hi = vs.vertices.max(axis=0) * margin
    if (hi <= 0).any():
        raise ValidationError("polytope is flat along some axis; supply an explicit box")
    return np.column_stack([np.zeros(lp.n), hi])


def save_lp(lp: LinearProgram, path) -> None:
    """Write the program as structured text (17 significant digits)."""

    def vec(v):
        return "[" + ", ".join(format_float(x) for x in v) + "]"

    rows = ",\n    ".join(vec(row) for row in lp.A)
    text = (
        "{\n"
        f'  "n": {lp.n},\n'
        f'  "m": {lp.m},\n'
        f'  "c": {vec(lp.c)},\n'
        f'  "A": [\n    {rows}\n  ],\n'
        f'  "b": {vec(lp.b)}\n'
        "}\n"
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def load_lp(path) -> LinearProgram:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    lp = LinearProgram(c=np.array(doc["c"], dtype=float),
                       A=np.array(doc["A"], dtype=float),
                       b=np.array(doc["b"], dtype=float))
    if lp.n != doc.get("n", lp.n) or lp.m != doc.get("m", lp.m):
        raise ValidationError("declared n/m do not match the array shapes")
    return lp
