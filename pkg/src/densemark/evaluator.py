"""NME evaluation, yaw-binned aggregation, CED curves and table rendering.

NME = (1/N) * sum ||pred_i - gt_i||_2 / d with d = sqrt(h*w) of the
normalization box; 2D mode measures distances in (x,y), 3D in (x,y,z), and
d always comes from the (x,y) box. Yaw bins use absolute yaw, lower bound
inclusive, upper exclusive, with the final bin closed above (90 lands in
the last bin). The "All" figure follows the balanced-subset protocol: an
equal number of samples (the smallest bin count) drawn per bin without
replacement from a seeded generator; the plain mean is kept alongside.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError
from .geom import BoundingBox, landmark_bounding_box

DEFAULT_BINS = ((0.0, 30.0), (30.0, 60.0), (60.0, 90.0))
CED_GRID_POINTS = 1000


@dataclass(frozen=True)
class EvalConfig:
    mode: str = "3d"                      # "2d" or "3d"
    normalization: str = "gtLandmarkBox"  # or "providedBox"
    bins: tuple = DEFAULT_BINS
    ced_max_threshold: float = 0.05
    balanced_seed: int = 0

    def __post_init__(self):
        if self.mode not in ("2d", "3d"):
            raise DomainError(f"mode must be 2d or 3d, got {self.mode!r}")
        if self.normalization not in ("gtLandmarkBox", "providedBox"):
            raise DomainError(f"unknown normalization {self.normalization!r}")
        bins = tuple((float(lo), float(hi)) for lo, hi in self.bins)
        for lo, hi in bins:
            if not lo < hi:
                raise DomainError(f"bin [{lo},{hi}) is empty")
        for (_, hi), (lo2, _) in zip(bins, bins[1:]):
            if lo2 < hi:
                raise DomainError("bins must be disjoint and sorted")
        if not self.ced_max_threshold > 0:
            raise DomainError("ced_max_threshold must be positive")
        object.__setattr__(self, "bins", bins)


def nme(pred, gt, cfg=None, box=None):
    """Normalized mean Euclidean landmark error."""
    cfg = cfg or EvalConfig()
    if pred.schema != gt.schema:
        raise ShapeError(f"schema mismatch: {pred.schema} vs {gt.schema}")
    if cfg.normalization == "providedBox":
        if box is None:
            raise DomainError("providedBox normalization needs a box")
    else:
        box = landmark_bounding_box(gt)
    dims = 2 if cfg.mode == "2d" else 3
    diff = pred.points[:, :dims] - gt.points[:, :dims]
    dists = np.sqrt((diff * diff).sum(axis=1))
    return float(dists.mean() / box.d)


@dataclass(frozen=True)
class EvalSample:
    """One evaluation unit: ground truth plus metadata for binning."""

    id: str
    gt: object                  # LandmarkSet
    yaw: float = None           # signed degrees; None = unknown
    box: BoundingBox = None     # used under providedBox normalization


def _bin_index(abs_yaw, bins):
    for b, (lo, hi) in enumerate(bins):
        if lo <= abs_yaw < hi:
            return b
        if b == len(bins) - 1 and abs_yaw == hi:
            return b
    return None


def ced_curve(nmes, cfg=None):
    """CED samples on a uniform threshold grid, plus exact AUC.

    The curve is fraction(t) = |{nme <= t}| / total at 1000 uniform
    thresholds in [0, max]. The AUC integrates the exact step function
    (equivalently, the trapezoid rule on a partition containing every jump)
    normalized by the threshold cap, so analytic cases come out exact.
    """
    cfg = cfg or EvalConfig()
    vals = np.asarray(nmes, dtype=np.float64)
    if vals.size == 0:
        raise DomainError("CED needs at least one NME value")
    cap = cfg.ced_max_threshold
    s = np.sort(vals)
    grid = np.linspace(0.0, cap, CED_GRID_POINTS)
    fractions = np.searchsorted(s, grid, side="right") / vals.size

    knots = [0.0] + [float(x) for x in np.unique(s[s <= cap])] + [cap]
    area = 0.0
    for a, b in zip(knots, knots[1:]):
        if b <= a:
            continue
        frac = np.searchsorted(s, a, side="right") / vals.size
        area += (b - a) * frac
    auc = area / cap
    return list(zip(grid.tolist(), fractions.tolist())), float(auc)


@dataclass(frozen=True)
class EvalReport:
    per_image: tuple            # of (id, yaw, nme)
    bins: tuple                 # of (lo, hi)
    bin_means: tuple            # mean NME per bin, None where empty
    overall_mean: float         # plain mean over every evaluated image
    balanced_mean: float        # balanced-subset mean, None if a bin is empty
    ced: tuple = ()             # of (threshold, fraction)
    auc: float = None
    mode: str = "3d"
    balanced_seed: int = 0

    def to_json_dict(self):
        return {
            "perImage": [{"id": i, "yaw": y, "nme": n}
                         for i, y, n in self.per_image],
            "bins": [[lo, hi] for lo, hi in self.bins],
            "binMeans": list(self.bin_means),
            "overallMean": self.overall_mean,
            "balancedMean": self.balanced_mean,
            "ced": [[t, f] for t, f in self.ced],
            "auc": self.auc,
            "mode": self.mode,
            "balancedSeed": self.balanced_seed,
        }

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json_dict(cls, doc):
        return cls(
            per_image=tuple((r["id"], r["yaw"], r["nme"])
                            for r in doc["perImage"]),
            bins=tuple((lo, hi) for lo, hi in doc["bins"]),
            bin_means=tuple(doc["binMeans"]),
            overall_mean=doc["overallMean"],
            balanced_mean=doc["balancedMean"],
            ced=tuple((t, f) for t, f in doc.get("ced", [])),
            auc=doc.get("auc"),
            mode=doc.get("mode", "3d"),
            balanced_seed=doc.get("balancedSeed", 0),
        )

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def evaluate_dataset(samples, predictions, cfg=None):
    """Per-image NME, yaw-binned means, balanced subset, CED and AUC.

    ``samples`` is a sequence of EvalSample; ``predictions`` maps sample id
    to a LandmarkSet of matching schema. Records with unknown yaw are kept
    in the plain overall mean and the CED but excluded from bins.
    """
    cfg = cfg or EvalConfig()
    missing = [s.id for s in samples if s.id not in predictions]
    if missing:
        raise DomainError(f"missing predictions for: {', '.join(missing)}")
    if not samples:
        raise DomainError("no samples to evaluate")

    per_image = []
    for s in samples:
        value = nme(predictions[s.id], s.gt, cfg, box=s.box)
        per_image.append((s.id, s.yaw, value))

    binned = [[] for _ in cfg.bins]
    for _, yaw, value in per_image:
        if yaw is None:
            continue
        b = _bin_index(abs(yaw), cfg.bins)
        if b is not None:
            binned[b].append(value)
    bin_means = tuple(float(np.mean(vals)) if vals else None
                      for vals in binned)

    all_nmes = [value for _, _, value in per_image]
    overall = float(np.mean(all_nmes))

    balanced = None
    counts = [len(vals) for vals in binned]
    if all(c > 0 for c in counts):
        take = min(counts)
        rng = np.random.default_rng(cfg.balanced_seed)
        chosen = []
        for vals in binned:
            pick = rng.choice(len(vals), size=take, replace=False)
            chosen.extend(vals[i] for i in pick)
        balanced = float(np.mean(chosen))

    ced, auc = ced_curve(all_nmes, cfg)
    return EvalReport(
        per_image=tuple(per_image),
        bins=cfg.bins,
        bin_means=bin_means,
        overall_mean=overall,
        balanced_mean=balanced,
        ced=tuple(ced),
        auc=auc,
        mode=cfg.mode,
        balanced_seed=cfg.balanced_seed,
    )


# --- table rendering -------------------------------------------------------

LAYOUTS = {
    "aflw2000-68": {"name_header": "Method"},
    "aflw-21": {"name_header": "Method"},
    "backbone-compare": {"name_header": "Backbone"},
}

EMPTY_CELL = "—"  # em dash for bins with no samples


def format_nme_cell(value):
    """NME*100 at up to two decimals, round-half-even, no trailing zeros."""
    if value is None:
        return EMPTY_CELL
    s = f"{value * 100.0:.2f}"
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s


def _bin_header(lo, hi):
    def fmt(x):
        return str(int(x)) if float(x).is_integer() else str(x)

    return f"{fmt(lo)} to {fmt(hi)}"


def render_comparison(rows, layout="aflw2000-68"):
    """Fixed-width table, one row per (label, EvalReport)."""
    if layout not in LAYOUTS:
        raise DomainError(f"unknown layout {layout!r}; "
                          f"expected one of {sorted(LAYOUTS)}")
    if not rows:
        raise DomainError("nothing to render")
    name_header = LAYOUTS[layout]["name_header"]
    bins = rows[0][1].bins
    headers = [name_header] + [_bin_header(lo, hi) for lo, hi in bins] + ["All"]

    table_rows = []
    for label, report in rows:
        if report.bins != bins:
            raise DomainError("reports disagree on bin layout")
        cells = [format_nme_cell(m) for m in report.bin_means]
        cells.append(format_nme_cell(report.balanced_mean))
        table_rows.append([label] + cells)

    widths = [max(12, len(headers[0]),
                  max(len(r[0]) for r in table_rows))]
    for col in range(1, len(headers)):
        widths.append(max(8, len(headers[col]),
                          max(len(r[col]) for r in table_rows)))

    def render_line(cells):
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return " | ".join([first] + rest)

    sep = "-+-".join("-" * w for w in widths)
    lines = [render_line(headers), sep]
    lines.extend(render_line(r) for r in table_rows)
    return "\n".join(lines) + "\n"


def render_report(report, layout="aflw2000-68", label="Ours"):
    """Single-row paper-format table for one report."""
    return render_comparison([(label, report)], layout)
