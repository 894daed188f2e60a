"""Sampled checkers for four observable properties of an encoding, plus an
empirical directedness test for attribution methods.

The four encoding properties, each reduced to a falsifiable sampled
predicate over a box around the polytope:

- continuity: the largest value jump over point pairs at distance h shrinks
  proportionally with h; a fixed-size jump across the constraint boundary
  fails the ratio test.
- distinguish_class: the value alone separates feasible from infeasible
  points; the emitted witness is a threshold plus orientation.
- distinguish_boundary: the value alone separates boundary points
  (min_slack = 0) from clearly-off-boundary points.
- boundary_extrema: at least one of the encoding's two extremes (max or
  min) is attained only near the constraint boundary.

The checkers are regression tests against known analysis, not proofs: they
sample at documented counts with documented margins and are deterministic
per seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attribution import PerturbConfig, feature_permutation, lime, saliency
from .encodings import ENCODING_KINDS, Encoding, make_encoding
from .errors import ConfigurationError, InconclusiveError, ValidationError
from .lp import FEAS_TOL, LinearProgram, enumerate_vertices, min_slack_many, vertex_bbox

# Expected property table, keyed by encoding kind. The vertex-distance row
# assumes the origin (an off-boundary vertex for all-positive programs) is
# excluded from the retained set; encoding_property_table applies that.
EXPECTED_ENCODING_TRAITS = {
    "feasibility": {
        "continuity": False,
        "distinguish_class": True,
        "distinguish_boundary": False,
        "boundary_extrema": False,
    },
    "gain-penalty": {
        "continuity": True,
        "distinguish_class": False,
        "distinguish_boundary": False,
        "boundary_extrema": True,
    },
    "boundary-distance": {
        "continuity": True,
        "distinguish_class": True,
        "distinguish_boundary": True,
        "boundary_extrema": False,
    },
    "abs-boundary-distance": {
        "continuity": True,
        "distinguish_class": False,
        "distinguish_boundary": True,
        "boundary_extrema": True,
    },
    "vertex-distance": {
        "continuity": True,
        "distinguish_class": False,
        "distinguish_boundary": False,
        "boundary_extrema": True,
    },
}

PROPERTY_NAMES = ("continuity", "distinguish_class", "distinguish_boundary", "boundary_extrema")

CONTINUITY_SCALES = (1e-2, 1e-3, 1e-4)
CONTINUITY_FACTOR = 10.0
MIN_BOUNDARY_POINTS = 50
BOUNDARY_SLACK_TOL = 1e-12
OFF_BOUNDARY_FRACTION = 0.02  # of the slack scale
VALUE_COLLISION_FRACTION = 1e-3  # of the value range
EXTREMUM_BAND_FRACTION = 0.01  # of the value range
EXTREMUM_SLACK_FRACTION = 0.1  # of the slack scale


@dataclass(frozen=True)
class PropertyReport:
    kind: str
    continuity: bool
    distinguish_class: bool
    distinguish_boundary: bool
    boundary_extrema: bool
    stats: dict
    sample_count: int
    seed: int

    def as_row(self) -> dict:
        return {name: getattr(self, name) for name in PROPERTY_NAMES}


def _rng(seed: int, key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(key,))))


def _sample_box(bbox: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(bbox[:, 0], bbox[:, 1], size=(count, bbox.shape[0]))


def find_boundary_points(lp: LinearProgram, bbox, count: int, seed: int, max_iters: int = 100) -> np.ndarray:
    """Points with min_slack = 0 (to BOUNDARY_SLACK_TOL), by sign bisection
    along segments between sampled points of opposite slack sign."""
    bbox = np.asarray(bbox, dtype=float)
    rng = _rng(seed, 90)
    X = _sample_box(bbox, max(count * 20, 2000), rng)
    ms = min_slack_many(lp, X)
    pos = X[ms > 1e-6]
    neg = X[ms < -1e-6]
    pairs = min(len(pos), len(neg), count)
    if pairs < MIN_BOUNDARY_POINTS:
        raise InconclusiveError(
            f"only {pairs} boundary-straddling pairs found; the box barely intersects the boundary"
        )
    lo = pos[:pairs].copy()
    hi = neg[:pairs].copy()
    for _ in range(max_iters):
        mid = 0.5 * (lo + hi)
        s = min_slack_many(lp, mid)
        if np.abs(s).max() <= BOUNDARY_SLACK_TOL:
            return mid
        take_lo = s > 0
        lo[take_lo] = mid[take_lo]
        hi[~take_lo] = mid[~take_lo]
    mid = 0.5 * (lo + hi)
    if np.abs(min_slack_many(lp, mid)).max() <= BOUNDARY_SLACK_TOL:
        return mid
    raise InconclusiveError("bisection failed to localize the boundary")


def _clip_to_box(X: np.ndarray, bbox: np.ndarray) -> np.ndarray:
    return np.clip(X, bbox[:, 0], bbox[:, 1])


def _check_continuity(enc: Encoding, bbox, boundary: np.ndarray, count: int, seed: int):
    """Jump statistic J(h) = max |phi(x + h u) - phi(x)| over random pairs
    and boundary-straddling pairs; pass iff J shrinks with h like a
    Lipschitz function (J(h) <= 10 h Lhat, Lhat = J(h_max)/h_max)."""
    rng = _rng(seed, 1)
    n = bbox.shape[0]
    base = _sample_box(bbox, count, rng)
    dirs = rng.normal(size=(count, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    bdirs = rng.normal(size=(len(boundary), n))
    bdirs /= np.linalg.norm(bdirs, axis=1, keepdims=True)
    jumps = {}
    for h in CONTINUITY_SCALES:
        a = np.vstack([base, boundary - 0.5 * h * bdirs])
        b = np.vstack([base + h * dirs, boundary + 0.5 * h * bdirs])
        a = _clip_to_box(a, bbox)
        b = _clip_to_box(b, bbox)
        jumps[h] = float(np.abs(enc.values(a) - enc.values(b)).max())
    h_max = CONTINUITY_SCALES[0]
    lipschitz = jumps[h_max] / h_max
    ok = all(
        jumps[h] <= max(CONTINUITY_FACTOR * h * lipschitz, 1e-12)
        for h in CONTINUITY_SCALES[1:]
    )
    return ok, {"jumps": jumps, "lipschitz_estimate": lipschitz}


def _check_distinguish_class(enc: Encoding, samples: np.ndarray, slacks: np.ndarray):
    """Pass iff the value intervals of the two classes are disjoint; the
    witness is a threshold (snapped to 0 when 0 sits in the gap) plus which
    side the feasible class lies on."""
    off_band = np.abs(slacks) > FEAS_TOL
    vals = enc.values(samples[off_band])
    feas = slacks[off_band] >= 0
    if feas.all() or (~feas).all():
        raise InconclusiveError("one feasibility class has no samples in the box")
    f_lo, f_hi = float(vals[feas].min()), float(vals[feas].max())
    i_lo, i_hi = float(vals[~feas].min()), float(vals[~feas].max())
    if f_lo > i_hi:
        gap = (i_hi, f_lo)
        orientation = "feasible-above"
    elif i_lo > f_hi:
        gap = (f_hi, i_lo)
        orientation = "feasible-below"
    else:
        return False, {"feasible_interval": (f_lo, f_hi), "infeasible_interval": (i_lo, i_hi)}
    threshold = 0.0 if gap[0] < 0.0 < gap[1] else 0.5 * (gap[0] + gap[1])
    stats = {
        "feasible_interval": (f_lo, f_hi),
        "infeasible_interval": (i_lo, i_hi),
        "threshold": threshold,
        "orientation": orientation,
    }
    return True, stats


def _check_distinguish_boundary(enc: Encoding, samples: np.ndarray, slacks: np.ndarray, boundary: np.ndarray):
    """Pass iff no off-boundary sample's value comes within a small fraction
    of the value range of any boundary point's value."""
    b_vals = enc.values(boundary)
    slack_scale = float(np.abs(slacks).max())
    off = np.abs(slacks) >= OFF_BOUNDARY_FRACTION * slack_scale
    off_vals = enc.values(samples[off])
    all_vals = np.concatenate([b_vals, off_vals])
    value_range = float(all_vals.max() - all_vals.min())
    rho = VALUE_COLLISION_FRACTION * max(value_range, 1e-12)
    min_gap = float(np.abs(b_vals[:, None] - off_vals[None, :]).min())
    ok = min_gap >= rho
    stats = {
        "boundary_value_interval": (float(b_vals.min()), float(b_vals.max())),
        "min_gap_to_off_boundary_values": min_gap,
        "collision_tolerance": rho,
    }
    return ok, stats


def _check_boundary_extrema(enc: Encoding, samples: np.ndarray, slacks: np.ndarray, boundary: np.ndarray, probes: np.ndarray):
    """Pass iff all near-maximum samples, or all near-minimum samples, sit
    near the constraint boundary (small |min_slack|).

    ``probes`` are structural anchor points (polytope vertices, box
    corners); they pin the sampled extrema to the true ones, which random
    samples alone miss when an extremum is attained at isolated points.
    """
    pool = np.vstack([samples, boundary, probes])
    pool_slacks = np.concatenate(
        [slacks, np.zeros(len(boundary)), min_slack_many(enc.lp, probes)]
    )
    vals = enc.values(pool)
    value_range = float(vals.max() - vals.min())
    if value_range <= 0:
        raise InconclusiveError("encoding is constant over the box")
    eta = EXTREMUM_BAND_FRACTION * value_range
    theta = EXTREMUM_SLACK_FRACTION * float(np.abs(pool_slacks).max())
    near_max = vals >= vals.max() - eta
    near_min = vals <= vals.min() + eta
    max_on_boundary = bool(np.abs(pool_slacks[near_max]).max() <= theta)
    min_on_boundary = bool(np.abs(pool_slacks[near_min]).max() <= theta)
    stats = {
        "value_range": value_range,
        "max_candidates": int(near_max.sum()),
        "min_candidates": int(near_min.sum()),
        "max_attained_only_near_boundary": max_on_boundary,
        "min_attained_only_near_boundary": min_on_boundary,
        "slack_threshold": theta,
    }
    return max_on_boundary or min_on_boundary, stats


def check_encoding_properties(
    lp: LinearProgram,
    kind: str,
    sample_count: int = 4000,
    seed: int = 0,
    excluded_vertices=None,
    bbox=None,
) -> PropertyReport:
    """Run all four property checkers against one encoding."""
    if sample_count < 1000:
        raise ValidationError("sample_count must be >= 1000")
    enc = make_encoding(lp, kind, excluded_vertices=excluded_vertices)
    bbox = vertex_bbox(lp) if bbox is None else np.asarray(bbox, dtype=float)
    samples = _sample_box(bbox, sample_count, _rng(seed, 0))
    slacks = min_slack_many(lp, samples)
    boundary = find_boundary_points(lp, bbox, max(MIN_BOUNDARY_POINTS * 4, sample_count // 8), seed)
    corners = np.stack(np.meshgrid(*bbox, indexing="ij"), axis=-1).reshape(-1, lp.n)
    probes = np.vstack([enumerate_vertices(lp).vertices, corners])

    cont, cont_stats = _check_continuity(enc, bbox, boundary, sample_count // 4, seed)
    cls, cls_stats = _check_distinguish_class(enc, samples, slacks)
    bnd, bnd_stats = _check_distinguish_boundary(enc, samples, slacks, boundary)
    ext, ext_stats = _check_boundary_extrema(enc, samples, slacks, boundary, probes)
    return PropertyReport(
        kind=kind,
        continuity=cont,
        distinguish_class=cls,
        distinguish_boundary=bnd,
        boundary_extrema=ext,
        stats={
            "continuity": cont_stats,
            "distinguish_class": cls_stats,
            "distinguish_boundary": bnd_stats,
            "boundary_extrema": ext_stats,
            "boundary_points": len(boundary),
        },
        sample_count=sample_count,
        seed=seed,
    )


def classify_with_witness(report: PropertyReport, values: np.ndarray) -> np.ndarray:
    """Apply the distinguish_class threshold witness: True = feasible."""
    if not report.distinguish_class:
        raise ValidationError("report carries no class witness (property failed)")
    w = report.stats["distinguish_class"]
    above = np.asarray(values, dtype=float) >= w["threshold"]
    return above if w["orientation"] == "feasible-above" else ~above


def encoding_property_table(lp: LinearProgram, sample_count: int = 4000, seed: int = 0) -> dict:
    """Reports for all five encodings. The vertex-distance encoding drops
    the origin from its retained vertex set when the origin is a vertex,
    mirroring the prior that the optimum of an all-positive program never
    sits there."""
    out = {}
    for kind in ENCODING_KINDS:
        excluded = None
        if kind == "vertex-distance":
            excluded = np.zeros((1, lp.n))
        out[kind] = check_encoding_properties(
            lp, kind, sample_count=sample_count, seed=seed, excluded_vertices=excluded
        )
    return out


# --------------------------------------------------------------- directedness


def build_monotone_harness(n: int = 2, seed: int = 0, samples: int = 6000, config=None):
    """Model trained on the strictly increasing target y = sum(x) over the
    unit box; every true partial derivative is +1."""
    from .nn import ModelConfig, fit_arrays

    rng = _rng(seed, 50)
    bbox = np.column_stack([np.zeros(n), np.ones(n)])
    X = _sample_box(bbox, samples, rng)
    y = X.sum(axis=1)
    cfg = config if config is not None else ModelConfig(seed=seed)
    return fit_arrays(X, y, cfg, bbox)


@dataclass(frozen=True)
class DirectednessReport:
    method: str
    directed: bool
    stats: dict


SIGN_AGREEMENT_LEVEL = 0.95


def directedness_test(
    method_tag: str,
    model,
    sample_count: int = 300,
    seed: int = 0,
    radius: float = 0.05,
    true_partial_signs=None,
) -> DirectednessReport:
    """Empirical directedness on a model with strictly monotone targets.

    directed: at least 95% of attribution entries carry the sign of the true
    partial derivative. undirected: the pooled mean attribution is within 3
    standard errors of 0 while the mean magnitude is not. Anything else
    raises InconclusiveError rather than passing silently.
    """
    if sample_count < 10:
        raise ValidationError("sample_count must be >= 10")
    n = model.input_dim
    signs = np.ones(n) if true_partial_signs is None else np.asarray(true_partial_signs, dtype=float)
    if signs.shape != (n,) or (signs == 0).any():
        raise ValidationError("true_partial_signs must be n nonzero values")
    bbox = np.asarray(model.bbox, dtype=float)
    # keep perturbations inside the trained region
    span = bbox[:, 1] - bbox[:, 0]
    inner = np.column_stack([bbox[:, 0] + 0.1 * span, bbox[:, 1] - 0.1 * span])
    X = _sample_box(inner, sample_count, _rng(seed, 40))

    rows = []
    for i, x in enumerate(X):
        cfg = PerturbConfig(radius=radius, seed=int(np.random.SeedSequence(seed, spawn_key=(41, i)).generate_state(1)[0]))
        if method_tag == "saliency":
            rows.append(saliency(model, x).values)
        elif method_tag == "lime":
            rows.append(lime(model, x, cfg).values)
        elif method_tag == "feature-permutation":
            rows.append(feature_permutation(model, x, cfg).values)
        else:
            raise ConfigurationError(
                f"directedness is tested empirically for saliency, lime, feature-permutation; got {method_tag!r}"
            )
    A = np.array(rows)
    oriented = A * signs
    agreement = float((oriented > 0).mean())
    flat = oriented.reshape(-1)
    mean = float(flat.mean())
    stderr = float(flat.std(ddof=1) / np.sqrt(flat.size))
    mags = np.abs(flat)
    mag_mean = float(mags.mean())
    mag_stderr = float(mags.std(ddof=1) / np.sqrt(mags.size))
    stats = {
        "sign_agreement": agreement,
        "mean": mean,
        "stderr": stderr,
        "magnitude_mean": mag_mean,
        "magnitude_stderr": mag_stderr,
        "points": sample_count,
    }
    if agreement >= SIGN_AGREEMENT_LEVEL:
        return DirectednessReport(method=method_tag, directed=True, stats=stats)
    if abs(mean) <= 3 * stderr and mag_mean > 3 * mag_stderr:
        return DirectednessReport(method=method_tag, directed=False, stats=stats)
    raise InconclusiveError(
        f"neither directed nor undirected criteria met for {method_tag}: {stats}"
    )
