"""Closed-form landmark losses and gradients.

wing(x) = w*ln(1+|x|/eps) for |x| < w, else |x| - C with
C = w - w*ln(1+w/eps), which makes the two branches meet at |x| = w.
The hybrid training loss is w1*L_wing + w2*L_mse; every loss reduces by the
mean over all 3N landmark coordinates so the w1/w2 weighting is independent
of the landmark count.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, ShapeError

DEFAULT_W = 15.0
DEFAULT_EPSILON = 3.0
DEFAULT_W1 = 1.5
DEFAULT_W2 = 0.5


@dataclass(frozen=True)
class LossConfig:
    """Wing/hybrid parameters. C is derived and follows w and epsilon."""

    w: float = DEFAULT_W
    epsilon: float = DEFAULT_EPSILON
    w1: float = DEFAULT_W1
    w2: float = DEFAULT_W2
    mse_halved: bool = False  # True: hybrid's MSE term uses x^2/2

    def __post_init__(self):
        if not self.w > 0:
            raise DomainError("w must be positive")
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")
        if self.w1 < 0 or self.w2 < 0:
            raise DomainError("w1 and w2 must be nonnegative")

    @property
    def c(self):
        """Offset keeping wing continuous at |x| = w."""
        return self.w - self.w * math.log(1.0 + self.w / self.epsilon)


def wing(x, cfg=None):
    """Wing loss of a residual (scalar or arraylike, elementwise)."""
    cfg = cfg or LossConfig()
    vals = kernels.wing_values(np.asarray(x, dtype=np.float64),
                               cfg.w, cfg.epsilon, cfg.c)
    return float(vals) if np.isscalar(x) else vals


def wing_grad(x, cfg=None):
    """Derivative of the wing loss; 0 at x = 0 by convention."""
    cfg = cfg or LossConfig()
    vals = kernels.wing_grads(np.asarray(x, dtype=np.float64),
                              cfg.w, cfg.epsilon)
    return float(vals) if np.isscalar(x) else vals


def _residuals(pred, gt):
    if hasattr(pred, "schema") and hasattr(gt, "schema"):
        if pred.schema != gt.schema:
            raise ShapeError(f"schema mismatch: {pred.schema} vs {gt.schema}")
        return pred.points - gt.points
    p = np.asarray(pred, dtype=np.float64)
    g = np.asarray(gt, dtype=np.float64)
    if p.shape != g.shape:
        raise ShapeError(f"shape mismatch: {p.shape} vs {g.shape}")
    return p - g


def hybrid_loss(pred, gt, cfg=None):
    """w1 * mean wing + w2 * mean squared error over all coordinates."""
    cfg = cfg or LossConfig()
    r = _residuals(pred, gt)
    l_wing = float(np.mean(kernels.wing_values(r, cfg.w, cfg.epsilon, cfg.c)))
    sq = r * r
    if cfg.mse_halved:
        sq = sq / 2.0
    l_mse = float(np.mean(sq))
    return cfg.w1 * l_wing + cfg.w2 * l_mse


def hybrid_loss_grad(pred, gt, cfg=None):
    """d hybrid_loss / d pred, same shape as the prediction tensor."""
    cfg = cfg or LossConfig()
    r = _residuals(pred, gt)
    n = r.size
    g_wing = kernels.wing_grads(r, cfg.w, cfg.epsilon)
    g_mse = r if cfg.mse_halved else 2.0 * r
    return (cfg.w1 * g_wing + cfg.w2 * g_mse) / n


def auxiliary_losses(pred, gt):
    """Comparator losses: {'l1', 'l2', 'smooth_l1'}, coordinate means.

    l2 here is the halved square x^2/2, and smooth_l1 replaces it with
    |x| - 1/2 once |x| >= 1 (continuous, once-differentiable at the joint).
    """
    r = _residuals(pred, gt)
    ax = np.abs(r)
    smooth = np.where(ax < 1.0, r * r / 2.0, ax - 0.5)
    return {
        "l1": float(np.mean(ax)),
        "l2": float(np.mean(r * r / 2.0)),
        "smooth_l1": float(np.mean(smooth)),
    }
