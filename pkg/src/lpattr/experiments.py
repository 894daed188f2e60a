"""Experiment drivers: surrogate-slope convergence, the directed-probe
equivalence, and the five-feature feasibility study.

Each driver samples its evaluation points inside the model's normalization
box, derives all randomness from one seed, and returns a plain dict that
serializes cleanly to JSON.
"""

from __future__ import annotations

import numpy as np

from .attribution import (
    METHOD_TAGS,
    PerturbConfig,
    attribute,
    directed_feature_permutation,
    feature_permutation,
    lime,
)
from .data import generate_dataset
from .encodings import make_encoding
from .errors import ConfigurationError, InconclusiveError, ValidationError
from .lp import slack_values
from .nn import ModelConfig, accuracy, train_model

SMALL_ATTRIBUTION = 0.01  # below this magnitude the sign is not trusted
DEGENERATE_GRADIENT = 1e-8


def _rng(seed: int, key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(key,))))


def _sample_box(bbox: np.ndarray, count: int, rng: np.random.Generator, shrink: float = 0.0) -> np.ndarray:
    lo, hi = bbox[:, 0].copy(), bbox[:, 1].copy()
    if shrink:
        pad = shrink * (hi - lo)
        lo, hi = lo + pad, hi - pad
    return rng.uniform(lo, hi, size=(count, bbox.shape[0]))


def _point_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=key).generate_state(1)[0])


def experiment_lime_vs_saliency(
    model,
    radii=(0.5, 0.1, 0.02),
    points: int = 50,
    seed: int = 0,
    ridge_lambda: float = 1.0,
    samples: int = 50,
    check: bool = True,
) -> dict:
    """Local-surrogate slopes against the input gradient across shrinking
    perturbation radii.

    For each radius reports the mean cosine similarity between the surrogate
    slope vector and the gradient, and the mean surrogate magnitude. Points
    with near-zero gradient are excluded and counted.

    The two headline behaviors live in different regularization regimes, so
    ``check`` gates its asserts by ``ridge_lambda``. At 0 (plain least
    squares) the direction estimate is exact in the locally linear limit and
    similarity must be monotone nondecreasing along the descending radius
    list; with a positive ridge weight the penalty dominates the shrinking
    design scatter, which forces magnitudes to strictly decrease but also
    amplifies direction noise at tiny radii, so only the magnitude claim is
    asserted there. Violations raise InconclusiveError.
    """
    radii = tuple(float(r) for r in radii)
    if len(radii) < 2:
        raise ConfigurationError("need at least 2 radii")
    if any(radii[i] <= radii[i + 1] for i in range(len(radii) - 1)):
        raise ConfigurationError("radii must be strictly descending")
    if points < 10:
        raise ConfigurationError("need at least 10 points")
    pts = _sample_box(model.bbox, points, _rng(seed, 0), shrink=0.1)
    grads = model.input_gradient_many(pts)
    grad_norms = np.linalg.norm(grads, axis=1)
    keep = grad_norms > DEGENERATE_GRADIENT
    excluded = int(points - keep.sum())
    if keep.sum() < 2:
        raise InconclusiveError("almost all sampled points have a degenerate gradient")
    rows = []
    for ri, radius in enumerate(radii):
        cosines = []
        magnitudes = []
        for pi in np.flatnonzero(keep):
            cfg = PerturbConfig(
                radius=radius,
                samples=samples,
                ridge_lambda=ridge_lambda,
                seed=_point_seed(seed, 1, ri, int(pi)),
            )
            w = lime(model, pts[pi], cfg).values
            wn = np.linalg.norm(w)
            magnitudes.append(wn)
            if wn > 0.0:
                cosines.append(float(w @ grads[pi] / (wn * grad_norms[pi])))
        rows.append(
            {
                "radius": radius,
                "mean_cosine": float(np.mean(cosines)) if cosines else float("nan"),
                "mean_magnitude": float(np.mean(magnitudes)),
                "points_used": int(len(magnitudes)),
            }
        )
    report = {
        "radii": list(radii),
        "ridge_lambda": ridge_lambda,
        "points": points,
        "excluded_degenerate": excluded,
        "mean_gradient_magnitude": float(np.mean(grad_norms[keep])),
        "rows": rows,
    }
    if check:
        if ridge_lambda == 0:
            cos = [r["mean_cosine"] for r in rows]
            if any(cos[i] > cos[i + 1] for i in range(len(cos) - 1)):
                raise InconclusiveError(f"cosine similarity not monotone along radii: {cos}")
        else:
            mag = [r["mean_magnitude"] for r in rows]
            if any(mag[i] <= mag[i + 1] for i in range(len(mag) - 1)):
                raise InconclusiveError(f"surrogate magnitude not strictly decreasing: {mag}")
    return report


def experiment_directed_fp(model, radius: float = 0.1, points: int = 100, seed: int = 0) -> dict:
    """Directed single-feature probes against a least-squares surrogate fit
    on the identical probe set; the two should agree to rounding error.

    Also runs the undirected permutation method on the same points as a
    negative control and reports how far it lands from the surrogate.
    """
    if points < 1:
        raise ConfigurationError("need at least 1 point")
    n = model.input_dim
    pts = _sample_box(model.bbox, points, _rng(seed, 0), shrink=0.1)
    eye = np.eye(n)
    offsets = np.concatenate([radius * eye, -radius * eye], axis=0)
    deviations = np.zeros(points)
    control = np.zeros(points)
    for i in range(points):
        directed = directed_feature_permutation(model, pts[i], radius).values
        cfg = PerturbConfig(radius=radius, ridge_lambda=0.0, seed=0)
        fitted = lime(model, pts[i], cfg, offsets=offsets).values
        deviations[i] = np.max(np.abs(directed - fitted))
        fp_cfg = PerturbConfig(radius=radius, seed=_point_seed(seed, 1, i))
        undirected = feature_permutation(model, pts[i], fp_cfg).values
        control[i] = np.max(np.abs(undirected - fitted))
    return {
        "radius": radius,
        "points": points,
        "max_abs_deviation": float(deviations.max()),
        "mean_abs_deviation": float(deviations.mean()),
        "control_max_deviation": float(control.max()),
    }


def _pick_instances(lp, X: np.ndarray) -> tuple[int, int]:
    """One clearly feasible and one clearly infeasible row index.

    Feasible: largest minimum slack. Infeasible: prefers points violating
    exactly one constraint (taking the deepest such violation), else the
    most violated point overall.
    """
    slacks = slack_values(lp, X)
    min_slack = slacks.min(axis=1)
    feas = min_slack >= 0
    if not feas.any() or feas.all():
        raise ValidationError("need both feasible and infeasible points to pick instances")
    feasible_idx = int(np.flatnonzero(feas)[np.argmax(min_slack[feas])])
    infeas = ~feas
    single = infeas & ((slacks < 0).sum(axis=1) == 1)
    pool = single if single.any() else infeas
    pick = np.flatnonzero(pool)
    infeasible_idx = int(pick[np.argmin(min_slack[pool])])
    return feasible_idx, infeasible_idx


def _instance_entry(lp, model, x: np.ndarray, label: str, seed: int) -> dict:
    slacks = slack_values(lp, x[None, :])[0]
    methods = {}
    for mi, tag in enumerate(METHOD_TAGS):
        cfg = PerturbConfig(seed=_point_seed(seed, 7, mi))
        vec = attribute(model, x, tag, perturb_cfg=cfg)
        methods[tag] = {
            "values": [float(v) for v in vec.values],
            "sum": vec.attribution_sum,
            "small": [bool(abs(v) < SMALL_ATTRIBUTION) for v in vec.values],
        }
    return {
        "label": label,
        "point": [float(v) for v in x],
        "prediction": float(model.predict(x)),
        "slacks": [float(s) for s in slacks],
        "violated": [bool(s < 0) for s in slacks],
        "attributions": methods,
    }


def experiment_5dim(lp, seed: int = 0, count: int = 100_000, config: ModelConfig | None = None) -> dict:
    """Feasibility study on a five-feature, three-constraint program: train,
    report held-out accuracy, then attribute one feasible and one infeasible
    instance under all four methods, annotating constraint slacks and
    flagging attribution entries too small to trust."""
    if lp.n != 5 or lp.m != 3:
        raise ValidationError(f"expected a 5-feature, 3-constraint program, got n={lp.n}, m={lp.m}")
    enc = make_encoding(lp, "feasibility")
    ds = generate_dataset(lp, enc, count, seed=seed)
    cfg = config or ModelConfig(seed=seed)
    model = train_model(ds, cfg)
    val_X, val_y = ds.val_arrays()
    acc = accuracy(model, val_X, val_y)
    feas_i, infeas_i = _pick_instances(lp, val_X)
    return {
        "lp_digest": lp.digest(),
        "encoding": "feasibility",
        "sample_count": count,
        "seed": seed,
        "accuracy": acc,
        "small_threshold": SMALL_ATTRIBUTION,
        "instances": [
            _instance_entry(lp, model, val_X[feas_i], "feasible", seed),
            _instance_entry(lp, model, val_X[infeas_i], "infeasible", seed),
        ],
    }
