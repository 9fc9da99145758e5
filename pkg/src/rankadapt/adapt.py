"""Correction losses that pull source and target embeddings together.

Two routes: a domain discriminator whose loss the embedding weights climb
(gradient reversal), and the plain L2 distance between the two embedding
sample means (here called MMD), optionally diagnosed alongside a covariance
discrepancy.  Gradient routing per parameter group keeps the two-player
game honest: the discriminator never receives the reversed gradient and the
embedder never descends the discriminator loss.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import mlp
from .errors import ShapeError, ValidationError
from .params import DiscriminatorParams, EmbedderParams, RankerParams, add_scaled, tree_map


class AdaptMethod(enum.Enum):
    GRADIENT_REVERSAL = "GradientReversal"
    MMD = "MMD"


@dataclass
class AdaptWeights:
    lambda_d: float = 1.0
    lambda_adv: float = 1.0
    lambda_mmd: float = 1.0

    def __post_init__(self):
        for name in ("lambda_d", "lambda_adv", "lambda_mmd"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValidationError(f"{name} must be finite and >= 0")


@dataclass
class LossBundle:
    """Per-batch loss values and per-group gradients of each term."""

    loss_p: float
    grad_p_ranker: RankerParams
    grad_p_embedder: EmbedderParams
    loss_d: float = None
    loss_adv: float = None
    loss_mmd: float = None
    grad_d_disc: DiscriminatorParams = None
    grad_d_embedder: EmbedderParams = None
    grad_mmd_embedder: EmbedderParams = None

    def total(self, weights, method):
        if method is AdaptMethod.GRADIENT_REVERSAL:
            return self.loss_p + weights.lambda_d * self.loss_d + weights.lambda_adv * self.loss_adv
        return self.loss_p + weights.lambda_mmd * self.loss_mmd


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softplus(z):
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def discriminator_prob(x, params):
    """P(example is from the source set) for one embedding vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError("discriminator_prob takes a single embedding vector")
    z, _ = mlp.forward(x[None, :], params)
    return float(_sigmoid(z)[0])


def discriminator_loss(emb_s, emb_t, params):
    """Cross-entropy of classifying embeddings by their dataset.

    Source embeddings are labeled 1, target 0; each side contributes the
    mean of its per-embedding log terms.  Returns
    (loss, disc_grads, (d_emb_s, d_emb_t)).
    """
    emb_s = np.asarray(emb_s, dtype=np.float64)
    emb_t = np.asarray(emb_t, dtype=np.float64)
    if emb_s.shape[0] == 0 or emb_t.shape[0] == 0:
        raise ValidationError("both source and target sides must be nonempty")

    z_s, cache_s = mlp.forward(emb_s, params)
    z_t, cache_t = mlp.forward(emb_t, params)
    loss = float(np.mean(_softplus(-z_s)) + np.mean(_softplus(z_t)))

    dz_s = (_sigmoid(z_s) - 1.0) / z_s.shape[0]
    dz_t = _sigmoid(z_t) / z_t.shape[0]
    grads_s, dx_s = mlp.backward(params, cache_s, dz_s)
    grads_t, dx_t = mlp.backward(params, cache_t, dz_t)
    net_s = mlp.grads_to_net(DiscriminatorParams, grads_s)
    net_t = mlp.grads_to_net(DiscriminatorParams, grads_t)
    return loss, tree_map(np.add, net_s, net_t), (dx_s, dx_t)


def adversarial_loss(loss_d):
    """The adversary climbs the discriminator loss: exactly its negation."""
    return -loss_d


def mmd_loss(emb_s, emb_t):
    """L2 norm of the difference between the two embedding sample means.

    Returns (loss, d_emb_s, d_emb_t); at loss == 0 the norm is not
    differentiable and the zero subgradient is used.
    """
    emb_s = np.asarray(emb_s, dtype=np.float64)
    emb_t = np.asarray(emb_t, dtype=np.float64)
    if emb_s.shape[0] == 0 or emb_t.shape[0] == 0:
        raise ValidationError("both source and target sides must be nonempty")
    if emb_s.shape[1] != emb_t.shape[1]:
        raise ShapeError("source and target embeddings must share a dimension")

    diff = emb_s.mean(axis=0) - emb_t.mean(axis=0)
    loss = float(np.linalg.norm(diff))
    d_s = np.zeros_like(emb_s)
    d_t = np.zeros_like(emb_t)
    if loss > 0.0:
        unit = diff / loss
        d_s += unit / emb_s.shape[0]
        d_t -= unit / emb_t.shape[0]
    return loss, d_s, d_t


def covariance_discrepancy(emb_s, emb_t):
    """Frobenius norm of the difference of the sample covariance matrices."""
    loss, _, _ = covariance_discrepancy_with_grads(emb_s, emb_t)
    return loss


def covariance_discrepancy_with_grads(emb_s, emb_t):
    """As covariance_discrepancy, plus gradients w.r.t. both embedding sets."""
    emb_s = np.asarray(emb_s, dtype=np.float64)
    emb_t = np.asarray(emb_t, dtype=np.float64)
    if emb_s.shape[0] < 2 or emb_t.shape[0] < 2:
        raise ValidationError("covariance needs at least two points per side")
    if emb_s.shape[1] != emb_t.shape[1]:
        raise ShapeError("source and target embeddings must share a dimension")

    cs = np.cov(emb_s, rowvar=False, ddof=1).reshape(emb_s.shape[1], emb_s.shape[1])
    ct = np.cov(emb_t, rowvar=False, ddof=1).reshape(emb_t.shape[1], emb_t.shape[1])
    delta = cs - ct
    loss = float(np.linalg.norm(delta))
    d_s = np.zeros_like(emb_s)
    d_t = np.zeros_like(emb_t)
    if loss > 0.0:
        g = delta / loss
        centered_s = emb_s - emb_s.mean(axis=0)
        centered_t = emb_t - emb_t.mean(axis=0)
        d_s = 2.0 / (emb_s.shape[0] - 1) * centered_s @ g
        d_t = -2.0 / (emb_t.shape[0] - 1) * centered_t @ g
    return loss, d_s, d_t


def route_gradients(bundle, weights, method):
    """Per-group update directions for one SGD step.

    GradientReversal: the prediction parameters descend the click loss, the
    discriminator descends lambda_d * L_D, and the embedding parameters
    descend L_P while *ascending* L_D scaled by lambda_adv.  MMD: embedding
    parameters descend L_P + lambda_mmd * L_MMD; no discriminator.

    Returns {"theta_emb": ..., "theta_P": ..., "theta_D": ... or None}.
    """
    if method is AdaptMethod.GRADIENT_REVERSAL:
        if bundle.grad_d_disc is None or bundle.grad_d_embedder is None:
            raise ValidationError("gradient reversal routing needs discriminator gradients")
        emb = add_scaled(bundle.grad_p_embedder, bundle.grad_d_embedder, -weights.lambda_adv)
        disc = tree_map(lambda g: weights.lambda_d * g, bundle.grad_d_disc)
        return {"theta_emb": emb, "theta_P": bundle.grad_p_ranker, "theta_D": disc}
    if method is AdaptMethod.MMD:
        if bundle.grad_mmd_embedder is None:
            raise ValidationError("MMD routing needs the mean-discrepancy gradient")
        emb = add_scaled(bundle.grad_p_embedder, bundle.grad_mmd_embedder, weights.lambda_mmd)
        return {"theta_emb": emb, "theta_P": bundle.grad_p_ranker, "theta_D": None}
    raise ValueError(f"unknown adaptation method {method!r}")
