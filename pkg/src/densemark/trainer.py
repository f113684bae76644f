"""Desk-scale reference regressor driven by the hybrid loss.

A linear (optionally one-hidden-layer tanh) model maps a synthetic feature
vector to 3N landmark coordinates and is trained with plain full-batch
gradient descent. Its job is verification, not vision: it proves the loss
kernels and their gradients drive learning on realizable tasks, fully
deterministically per seed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError
from .evaluator import EvalConfig, nme
from .geom import LandmarkSet, schema_for
from .losses import LossConfig, hybrid_loss, hybrid_loss_grad, wing

DIVERGENCE_CEILING = 1e6


@dataclass(frozen=True)
class RegressorSpec:
    input_dim: int = 16
    hidden: int = None
    output_dim: int = 1560          # 520 landmarks x 3
    seed: int = 0
    lr: float = 40.0
    epochs: int = 1200
    n_train: int = 64

    def __post_init__(self):
        if self.output_dim % 3 != 0 or self.output_dim <= 0:
            raise DomainError("output_dim must be 3 x landmark count")
        if not self.lr >= 0:
            raise DomainError("lr must be nonnegative")
        if self.epochs < 1 or self.input_dim < 1 or self.n_train < 1:
            raise DomainError("epochs, input_dim and n_train must be >= 1")
        if self.hidden is not None and self.hidden < 1:
            raise DomainError("hidden must be >= 1 when set")


class _Model:
    """Parameter container with forward and exact backward passes."""

    def __init__(self, spec):
        rng = np.random.default_rng(spec.seed)
        self.hidden = spec.hidden
        if spec.hidden is None:
            self.params = {
                "W": 0.01 * rng.standard_normal((spec.output_dim,
                                                 spec.input_dim)),
                "b": np.zeros(spec.output_dim),
            }
        else:
            self.params = {
                "W1": rng.standard_normal((spec.hidden, spec.input_dim))
                / np.sqrt(spec.input_dim),
                "b1": np.zeros(spec.hidden),
                "W2": 0.01 * rng.standard_normal((spec.output_dim,
                                                  spec.hidden)),
                "b2": np.zeros(spec.output_dim),
            }

    def forward(self, x):
        if self.hidden is None:
            return x @ self.params["W"].T + self.params["b"]
        h = np.tanh(x @ self.params["W1"].T + self.params["b1"])
        return h @ self.params["W2"].T + self.params["b2"]

    def backward(self, x, dpred):
        """Parameter gradients given dLoss/dPrediction."""
        if self.hidden is None:
            return {"W": dpred.T @ x, "b": dpred.sum(axis=0)}
        pre = x @ self.params["W1"].T + self.params["b1"]
        h = np.tanh(pre)
        dh = (dpred @ self.params["W2"]) * (1.0 - h * h)
        return {
            "W1": dh.T @ x,
            "b1": dh.sum(axis=0),
            "W2": dpred.T @ h,
            "b2": dpred.sum(axis=0),
        }


def make_task(spec, task_seed, task="linear", noise="none", noise_scale=1.0,
              outlier_fraction=0.05):
    """Synthetic regression task at landmark pixel scale.

    linear: y = A*x + b* with coordinates around 128 px. identity: the
    target is the input itself (requires input_dim == output_dim). Noise
    modes: none, gaussian, heavy (gaussian plus large sparse outliers).
    Returns (x, y_clean, y_observed).
    """
    rng = np.random.default_rng(task_seed)
    x = rng.standard_normal((spec.n_train, spec.input_dim))
    if task == "identity":
        if spec.input_dim != spec.output_dim:
            raise DomainError("identity task needs input_dim == output_dim")
        x = 60.0 * x  # zero-mean pixel-scale coordinates
        y = x.copy()
    elif task == "linear":
        a_true = 60.0 * rng.standard_normal((spec.output_dim,
                                             spec.input_dim)) \
            / np.sqrt(spec.input_dim)
        b_true = 128.0 + 60.0 * rng.standard_normal(spec.output_dim)
        y = x @ a_true.T + b_true
    else:
        raise DomainError(f"unknown task {task!r}")
    observed = y.copy()
    if noise == "gaussian":
        observed = observed + noise_scale * rng.standard_normal(y.shape)
    elif noise == "heavy":
        observed = observed + noise_scale * rng.standard_normal(y.shape)
        hits = rng.random(y.shape) < outlier_fraction
        spikes = rng.uniform(50.0, 150.0, size=y.shape) \
            * rng.choice([-1.0, 1.0], size=y.shape)
        observed = observed + hits * spikes
    elif noise != "none":
        raise DomainError(f"unknown noise mode {noise!r}")
    return x, y, observed


def _mean_nme(pred, gt):
    cfg = EvalConfig(mode="3d", normalization="gtLandmarkBox")
    n = pred.shape[1] // 3
    schema = schema_for(n)
    vals = []
    for p_row, g_row in zip(pred, gt):
        vals.append(nme(LandmarkSet(p_row.reshape(n, 3), schema),
                        LandmarkSet(g_row.reshape(n, 3), schema), cfg))
    return float(np.mean(vals))


def smooth_curve(curve, window=10):
    """Trailing moving average; length max(1, len-window+1)."""
    arr = np.asarray(curve, dtype=np.float64)
    if len(arr) <= window:
        return [float(arr.mean())]
    kernel = np.ones(window) / window
    return np.convolve(arr, kernel, mode="valid").tolist()


def train_synthetic(spec, task_seed=0, task="linear", noise="none",
                    noise_scale=1.0, loss_cfg=None):
    """Train on a synthetic task; returns metrics, curves and the model.

    Deterministic given (spec.seed, task_seed). Raises DivergenceError when
    the loss passes 1e6.
    """
    loss_cfg = loss_cfg or LossConfig()
    x, y_clean, y_obs = make_task(spec, task_seed, task=task, noise=noise,
                                  noise_scale=noise_scale)
    model = _Model(spec)
    curve = []
    for _ in range(spec.epochs):
        pred = model.forward(x)
        loss = hybrid_loss(pred, y_obs, loss_cfg)
        if loss > DIVERGENCE_CEILING:
            raise DivergenceError(f"training diverged (loss {loss:.3e}) "
                                  f"with lr={spec.lr}", lr=spec.lr)
        curve.append(loss)
        grads = model.backward(x, hybrid_loss_grad(pred, y_obs, loss_cfg))
        for name, g in grads.items():
            model.params[name] = model.params[name] - spec.lr * g
    final_pred = model.forward(x)
    return {
        "final_loss": hybrid_loss(final_pred, y_obs, loss_cfg),
        "final_nme": _mean_nme(final_pred, y_clean),
        "loss_curve": curve,
        "smoothed_curve": smooth_curve(curve),
        "model": model,
        "task": {"x": x, "y_clean": y_clean, "y_observed": y_obs},
    }


def gradient_check(spec, check_seed=0, n_coords=100, fd_step=1e-6,
                   rel_tol=1e-4, zero_residual=False, corruption=0.0):
    """Analytic model gradients vs central finite differences.

    Checks ``n_coords`` randomly chosen parameter coordinates of the
    hybrid-loss-through-model objective. ``corruption`` perturbs the
    analytic gradients (negative-control hook). Returns a report dict;
    report["passed"] is the verdict and report["worst"] the worst
    coordinate.
    """
    rng = np.random.default_rng(check_seed)
    model = _Model(spec)
    x = rng.standard_normal((8, spec.input_dim))
    if zero_residual:
        y = model.forward(x)
    else:
        y = model.forward(x) + rng.standard_normal((8, spec.output_dim)) \
            + 0.5 * np.sign(rng.standard_normal((8, spec.output_dim)))
    cfg = LossConfig()

    pred = model.forward(x)
    analytic = model.backward(x, hybrid_loss_grad(pred, y, cfg))
    if corruption:
        analytic = {name: g + corruption for name, g in analytic.items()}

    names = sorted(model.params)
    sizes = np.array([model.params[n].size for n in names])
    total = int(sizes.sum())
    picks = rng.choice(total, size=min(n_coords, total), replace=False)

    checks = []
    for flat_idx in picks:
        pos = int(flat_idx)
        for name, size in zip(names, sizes):
            if pos < size:
                break
            pos -= size
        base = model.params[name].flat[pos]
        model.params[name].flat[pos] = base + fd_step
        up = hybrid_loss(model.forward(x), y, cfg)
        model.params[name].flat[pos] = base - fd_step
        down = hybrid_loss(model.forward(x), y, cfg)
        model.params[name].flat[pos] = base
        fd = (up - down) / (2.0 * fd_step)
        a = float(analytic[name].flat[pos])
        denom = max(abs(a), abs(fd), 1e-8)
        checks.append({"param": name, "index": pos, "analytic": a,
                       "fd": fd, "rel_err": abs(a - fd) / denom})

    if zero_residual:
        worst_abs = max(abs(c["analytic"]) for c in checks)
        passed = worst_abs < 1e-12 and \
            max(abs(c["fd"]) for c in checks) < 1e-6
    else:
        passed = all(c["rel_err"] <= rel_tol for c in checks)
    worst = max(checks, key=lambda c: c["rel_err"])
    return {
        "passed": bool(passed),
        "n_checked": len(checks),
        "rel_tol": rel_tol,
        "worst": worst,
        "failures": [c for c in checks if c["rel_err"] > rel_tol],
    }


def compare_losses_heavy_tail(spec=None, task_seed=7):
    """Desk-scale proxy for the loss study: hybrid vs pure MSE training
    on a heavy-tailed-noise task, scored by the wing metric against clean
    targets. This is a proxy ordering on synthetic data, not a claim about
    CNN training.
    """
    spec = spec or RegressorSpec(input_dim=8, output_dim=60, lr=1.5,
                                 epochs=800, n_train=96, seed=3)
    results = {}
    for label, cfg in (("hybrid", LossConfig()),
                       ("mse", LossConfig(w1=0.0, w2=1.0))):
        out = train_synthetic(spec, task_seed=task_seed, noise="heavy",
                              noise_scale=1.0, loss_cfg=cfg)
        pred = out["model"].forward(out["task"]["x"])
        clean = out["task"]["y_clean"]
        residual = pred - clean
        results[label] = {
            "final_loss": out["final_loss"],
            "clean_wing": float(np.mean(wing(residual))),
            "clean_l1": float(np.mean(np.abs(residual))),
            "final_nme": _mean_nme(pred, clean),
        }
    results["hybrid_beats_mse"] = (results["hybrid"]["clean_wing"]
                                   < results["mse"]["clean_wing"])
    results["note"] = ("desk-scale synthetic proxy; ordering is not "
                       "asserted to transfer to full training")
    return results
