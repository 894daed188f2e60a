"""Balanced sample generation over a box around the polytope.

Points are drawn uniformly in the box and routed into a feasible and an
infeasible pool until both reach half the requested count (stratified
rejection). If one region is too small to fill its pool within the draw
budget, the other pool tops it up and the imbalance is recorded. Sample
order is draw order, so the content is a pure function of
(lp, encoding, count, bbox, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .encodings import Encoding, make_encoding
from .errors import CoverageError, ValidationError
from .lp import LinearProgram, enumerate_vertices, feasible_mask, vertex_bbox
from .serialize import format_float

DRAW_CHUNK = 8192
DRAW_BUDGET_FACTOR = 50
VAL_FRACTION = 0.1


@dataclass
class Dataset:
    """Labeled samples plus everything needed to regenerate or audit them."""

    X: np.ndarray  # (count, n)
    y: np.ndarray  # (count,)
    lp_digest: str
    kind: str
    excluded_vertices: np.ndarray | None
    bbox: np.ndarray  # (n, 2)
    seed: int
    feasible_fraction: float
    balance_warning: bool
    train_indices: np.ndarray = field(repr=False)
    val_indices: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    def train_arrays(self):
        return self.X[self.train_indices], self.y[self.train_indices]

    def val_arrays(self):
        return self.X[self.val_indices], self.y[self.val_indices]


def _resolve_bbox(lp: LinearProgram, bbox) -> np.ndarray:
    if bbox is None:
        return vertex_bbox(lp)
    bbox = np.asarray(bbox, dtype=float)
    if bbox.shape != (lp.n, 2):
        raise ValidationError(f"bbox must have shape ({lp.n}, 2), got {bbox.shape}")
    if (bbox[:, 0] >= bbox[:, 1]).any():
        raise ValidationError("bbox lows must be below highs")
    if (bbox[:, 0] < 0).any():
        raise ValidationError("sampling is restricted to x >= 0; bbox lows must be >= 0")
    return bbox


def _split_indices(count: int, seed: int):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(1,))))
    perm = rng.permutation(count)
    n_val = int(count * VAL_FRACTION)
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def generate_dataset(lp: LinearProgram, encoding: Encoding, count: int, bbox=None, seed: int = 0) -> Dataset:
    """Draw ``count`` labeled points, half feasible and half infeasible when
    the box allows it. Raises CoverageError when the box never hits the
    feasible set."""
    if count < 0:
        raise ValidationError("count must be >= 0")
    if encoding.lp is not lp and encoding.lp.digest() != lp.digest():
        raise ValidationError("encoding was built for a different program")
    bbox = _resolve_bbox(lp, bbox)
    want_feas = (count + 1) // 2
    want_infeas = count // 2

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(0,))))
    draws = []
    classes = []
    n_feas = 0
    n_infeas = 0
    drawn = 0
    budget = DRAW_BUDGET_FACTOR * max(count, 1)
    while count > 0 and (n_feas < want_feas or n_infeas < want_infeas) and drawn < budget:
        chunk = rng.uniform(bbox[:, 0], bbox[:, 1], size=(DRAW_CHUNK, lp.n))
        mask = feasible_mask(lp, chunk)
        draws.append(chunk)
        classes.append(mask)
        n_feas += int(mask.sum())
        n_infeas += int((~mask).sum())
        drawn += DRAW_CHUNK

    if count == 0:
        X = np.zeros((0, lp.n))
        y = np.zeros(0)
        feas_sel = np.zeros(0, dtype=bool)
        balance_warning = False
    else:
        pool = np.concatenate(draws)
        mask = np.concatenate(classes)
        feas_idx = np.flatnonzero(mask)
        infeas_idx = np.flatnonzero(~mask)
        if len(feas_idx) == 0:
            raise CoverageError("no feasible point found in the sampling box")
        take_feas = min(want_feas, len(feas_idx))
        take_infeas = min(want_infeas, len(infeas_idx))
        balance_warning = take_feas < want_feas or take_infeas < want_infeas
        # top up the short pool from the other region, in draw order
        short = count - (take_feas + take_infeas)
        if short > 0:
            if take_feas < want_feas:
                take_infeas = min(take_infeas + short, len(infeas_idx))
            else:
                take_feas = min(take_feas + short, len(feas_idx))
        if take_feas + take_infeas < count:
            raise CoverageError(
                f"draw budget exhausted with only {take_feas + take_infeas} of {count} samples"
            )
        sel = np.sort(np.concatenate([feas_idx[:take_feas], infeas_idx[:take_infeas]]))
        X = pool[sel]
        feas_sel = mask[sel]
        y = encoding.values(X)

    train_idx, val_idx = _split_indices(count, seed)
    return Dataset(
        X=X,
        y=y,
        lp_digest=lp.digest(),
        kind=encoding.kind,
        excluded_vertices=encoding.excluded_vertices,
        bbox=bbox,
        seed=seed,
        feasible_fraction=float(feas_sel.mean()) if count > 0 else 0.0,
        balance_warning=balance_warning,
        train_indices=train_idx,
        val_indices=val_idx,
    )


def label_residual(ds: Dataset, lp: LinearProgram) -> float:
    """Max |phi(x) - y| when labels are recomputed from scratch."""
    if lp.digest() != ds.lp_digest:
        raise ValidationError("dataset was generated from a different program")
    if len(ds) == 0:
        return 0.0
    enc = make_encoding(lp, ds.kind, excluded_vertices=ds.excluded_vertices)
    return float(np.abs(enc.values(ds.X) - ds.y).max())


def save_dataset(ds: Dataset, csv_path) -> None:
    """CSV with header x1..xn,y (17 significant digits) plus a metadata
    sidecar at ``<csv_path>.meta.json``."""
    csv_path = str(csv_path)
    header = ",".join([f"x{i + 1}" for i in range(ds.n)] + ["y"])
    lines = [header]
    for row, target in zip(ds.X, ds.y):
        lines.append(",".join([format_float(v) for v in row] + [format_float(target)]))
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    meta = {
        "lp_digest": ds.lp_digest,
        "kind": ds.kind,
        "excluded_vertices": None
        if ds.excluded_vertices is None
        else [[format_float(v) for v in row] for row in ds.excluded_vertices],
        "bbox": [[format_float(lo), format_float(hi)] for lo, hi in ds.bbox],
        "seed": ds.seed,
        "count": len(ds),
        "feasible_fraction": format_float(ds.feasible_fraction),
        "balance_warning": ds.balance_warning,
        "train_indices": ds.train_indices.tolist(),
        "val_indices": ds.val_indices.tolist(),
    }
    with open(csv_path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_dataset(csv_path) -> Dataset:
    csv_path = str(csv_path)
    with open(csv_path, "r", encoding="utf-8") as fh:
        lines = fh.read().strip().split("\n")
    header = lines[0].split(",")
    n = len(header) - 1
    rows = [line.split(",") for line in lines[1:]] if len(lines) > 1 else []
    data = np.array([[float(v) for v in row] for row in rows], dtype=float).reshape(len(rows), n + 1)
    with open(csv_path + ".meta.json", "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    if meta["count"] != len(rows):
        raise ValidationError("metadata count does not match the CSV row count")
    ex = meta["excluded_vertices"]
    return Dataset(
        X=data[:, :n],
        y=data[:, n],
        lp_digest=meta["lp_digest"],
        kind=meta["kind"],
        excluded_vertices=None if ex is None else np.array([[float(v) for v in row] for row in ex]),
        bbox=np.array([[float(lo), float(hi)] for lo, hi in meta["bbox"]]),
        seed=meta["seed"],
        feasible_fraction=float(meta["feasible_fraction"]),
        balance_warning=meta["balance_warning"],
        train_indices=np.array(meta["train_indices"], dtype=int),
        val_indices=np.array(meta["val_indices"], dtype=int),
    )
