"""Attribution sweeps over a 2-feature raster.

A grid fixes all but two features, sweeps those two over a rectangle at a
given resolution, and evaluates one attribution method at every cell
center. The result carries one channel per feature, the exact elementwise
sum of the feature channels, and the model's raw prediction channel.
Randomized methods get one independent seed stream per cell, so results do
not depend on evaluation order.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .attribution import IGConfig, PerturbConfig, attribute
from .errors import ConfigurationError, ValidationError
from .render import render_heatmap
from .serialize import digest_of, format_float

DEFAULT_RESOLUTION = (100, 73)


@dataclass(frozen=True)
class GridSpec:
    dim_x: int
    dim_y: int
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    fixed_values: np.ndarray  # length n; entries at dim_x/dim_y are ignored
    resolution: tuple[int, int] = DEFAULT_RESOLUTION  # (width, height)

    def __post_init__(self):
        if self.dim_x == self.dim_y:
            raise ConfigurationError("dim_x and dim_y must differ")
        w, h = self.resolution
        if w < 2 or h < 2:
            raise ConfigurationError("resolution must be at least 2x2")
        if not (self.x_range[0] < self.x_range[1] and self.y_range[0] < self.y_range[1]):
            raise ConfigurationError("ranges must be nonempty")
        object.__setattr__(self, "fixed_values", np.asarray(self.fixed_values, dtype=float))
        n = self.fixed_values.shape[0]
        if not (0 <= self.dim_x < n and 0 <= self.dim_y < n):
            raise ConfigurationError("swept dimensions out of range")

    @property
    def n(self) -> int:
        return self.fixed_values.shape[0]

    def cell_centers(self):
        """(W,) x coordinates and (H,) y coordinates of cell centers."""
        w, h = self.resolution
        xs = self.x_range[0] + (np.arange(w) + 0.5) * (self.x_range[1] - self.x_range[0]) / w
        ys = self.y_range[0] + (np.arange(h) + 0.5) * (self.y_range[1] - self.y_range[0]) / h
        return xs, ys

    def points(self) -> np.ndarray:
        """All cell-center points, shape (W*H, n), cell index = i*H + j."""
        xs, ys = self.cell_centers()
        w, h = self.resolution
        pts = np.tile(self.fixed_values, (w * h, 1))
        pts[:, self.dim_x] = np.repeat(xs, h)
        pts[:, self.dim_y] = np.tile(ys, w)
        return pts

    def to_dict(self) -> dict:
        return {
            "dim_x": self.dim_x,
            "dim_y": self.dim_y,
            "x_range": list(self.x_range),
            "y_range": list(self.y_range),
            "fixed_values": [float(v) for v in self.fixed_values],
            "resolution": list(self.resolution),
        }


@dataclass
class GridResult:
    """Channels keyed by name: a1..an (per-feature attribution), sum,
    prediction; every channel has shape (W, H), indexed [x_index, y_index]."""

    spec: GridSpec
    method: str
    channels: dict[str, np.ndarray]
    provenance: dict = field(default_factory=dict)

    def feature_channels(self) -> list[np.ndarray]:
        return [self.channels[f"a{i + 1}"] for i in range(self.spec.n)]


def _cell_seed(base_seed: int, index: int) -> int:
    return int(np.random.SeedSequence(base_seed, spawn_key=(index,)).generate_state(1)[0])


def grid_attribution(
    model,
    method: str,
    spec: GridSpec,
    seed: int = 0,
    ig_cfg: IGConfig | None = None,
    perturb_cfg: PerturbConfig | None = None,
    provenance: dict | None = None,
) -> GridResult:
    """Evaluate one attribution method at every cell center."""
    if model.input_dim != spec.n:
        raise ValidationError(
            f"model expects {model.input_dim} features, grid supplies {spec.n}"
        )
    w, h = spec.resolution
    pts = spec.points()
    values = np.zeros((w * h, spec.n))
    base_perturb = perturb_cfg or PerturbConfig()
    needs_seed = method in ("feature-permutation", "lime")
    if method == "saliency":
        values = model.input_gradient_many(pts)
    else:
        for idx in range(w * h):
            cfg = base_perturb
            if needs_seed:
                cfg = PerturbConfig(
                    radius=base_perturb.radius,
                    samples=base_perturb.samples,
                    repeats=base_perturb.repeats,
                    ridge_lambda=base_perturb.ridge_lambda,
                    seed=_cell_seed(seed, idx),
                )
            values[idx] = attribute(model, pts[idx], method, ig_cfg=ig_cfg, perturb_cfg=cfg).values
    channels = {}
    for i in range(spec.n):
        channels[f"a{i + 1}"] = values[:, i].reshape(w, h)
    channels["sum"] = np.add.reduce([channels[f"a{i + 1}"] for i in range(spec.n)], axis=0)
    channels["prediction"] = model.predict_many(pts).reshape(w, h)
    prov = {
        "method": method,
        "seed": seed,
        "spec": spec.to_dict(),
        "config_digest": digest_of(
            {
                "ig": None if ig_cfg is None else {"steps": ig_cfg.steps, "baseline": ig_cfg.baseline},
                "perturb": {
                    "radius": base_perturb.radius,
                    "samples": base_perturb.samples,
                    "repeats": base_perturb.repeats,
                    "ridge_lambda": base_perturb.ridge_lambda,
                },
            }
        ),
    }
    if provenance:
        prov.update(provenance)
    return GridResult(spec=spec, method=method, channels=channels, provenance=prov)


def channel_csv_text(channel: np.ndarray) -> str:
    """`row,col,value` lines; row r, col c hold channel[c, r] so the column
    index walks the x axis."""
    w, h = channel.shape
    lines = ["row,col,value"]
    for r in range(h):
        for c in range(w):
            lines.append(f"{r},{c},{format_float(channel[c, r])}")
    return "\n".join(lines) + "\n"


def load_channel_csv(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().strip().split("\n")
    cells = [line.split(",") for line in lines[1:]]
    rows = max(int(c[0]) for c in cells) + 1
    cols = max(int(c[1]) for c in cells) + 1
    out = np.zeros((cols, rows))
    for r, c, v in cells:
        out[int(c), int(r)] = float(v)
    return out


def image_rows(channel: np.ndarray) -> np.ndarray:
    """Channel (W,H) to image row-major (H,W) with the top row holding the
    largest y, the usual plot orientation."""
    return channel.T[::-1, :]


def save_grid_result(result: GridResult, out_dir, stem: str) -> dict:
    """One CSV and one PPM per channel plus a manifest with sha256 digests.
    Returns the manifest."""
    from .serialize import sha256_hex

    os.makedirs(out_dir, exist_ok=True)
    files = {}
    for name in sorted(result.channels):
        csv_name = f"{stem}_{name}.csv"
        ppm_name = f"{stem}_{name}.ppm"
        text = channel_csv_text(result.channels[name])
        with open(os.path.join(out_dir, csv_name), "w", encoding="utf-8") as fh:
            fh.write(text)
        render_heatmap(image_rows(result.channels[name]), os.path.join(out_dir, ppm_name))
        with open(os.path.join(out_dir, ppm_name), "rb") as fh:
            ppm_bytes = fh.read()
        files[csv_name] = sha256_hex(text)
        files[ppm_name] = sha256_hex(ppm_bytes)
    manifest = {
        "stem": stem,
        "method": result.method,
        "provenance": result.provenance,
        "channels": sorted(result.channels),
        "files": files,
    }
    with open(os.path.join(out_dir, f"{stem}_manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    return manifest


def verify_grid_files(out_dir, stem: str) -> dict:
    """Recheck a saved grid: file hashes match the manifest and the sum
    channel equals the feature channels added in index order, exactly."""
    from .serialize import sha256_hex

    with open(os.path.join(out_dir, f"{stem}_manifest.json"), "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    problems = []
    for name, want in manifest["files"].items():
        path = os.path.join(out_dir, name)
        if not os.path.exists(path):
            problems.append(f"missing file {name}")
            continue
        with open(path, "rb") as fh:
            got = sha256_hex(fh.read())
        if got != want:
            problems.append(f"hash mismatch for {name}")
    feature_names = [c for c in manifest["channels"] if c.startswith("a")]
    feature_names.sort(key=lambda s: int(s[1:]))
    loaded = [load_channel_csv(os.path.join(out_dir, f"{stem}_{c}.csv")) for c in feature_names]
    total = load_channel_csv(os.path.join(out_dir, f"{stem}_sum.csv"))
    recomputed = np.add.reduce(loaded, axis=0)
    if not np.array_equal(recomputed, total):
        problems.append("sum channel does not equal the sum of feature channels")
    return {"stem": stem, "ok": not problems, "problems": problems}
