"""Synthetic click-log generator with a known position-bias click model.

Source and target corpora are drawn from overlapping latent distributions
whose means differ by a controllable shift, so the embedding diagnostics of
a trained model show two distinct-but-overlapping populations.  Clicks come
from an examination/click cascade with known examination probabilities, so
every propensity weight is exact by construction.

Generation is fully vectorized per domain; all randomness flows from the
config seed.
"""

import math
from dataclasses import dataclass

import numpy as np

from .configio import to_dict
from .data import CorpusMeta, Dataset, DocumentEntry, QueryExample
from .errors import ConfigError

# latent geometry: coordinates have std LATENT_STD, so a domain_shift of s
# moves the target mean by s / LATENT_STD standard deviations overall
LATENT_STD = 0.5
DENSE_NOISE_STD = 0.15
DENSE_OFFSET_STD = 0.5
ORDER_GUMBEL_SCALE = 1.0
MAX_DOC_NGRAMS = 5
MAX_QUERY_NGRAMS = 3
RESAMPLE_SOFT_LIMIT = 1000
RESAMPLE_FAIL_FRACTION = 0.01
RESAMPLE_HARD_LIMIT = 100000
QUANT_RANGE_SIGMAS = 3.0

DEFAULT_EXAMINATION_PROBS = (1.0, 0.55, 0.38, 0.29, 0.24, 0.20)


@dataclass
class GenConfig:
    seed: int = 42
    n_source_queries: int = 50000
    n_target_queries: int = 5000
    vocab_size: int = 512
    dense_dim: int = 8
    docs_per_query: int = 6
    domain_shift: float = 1.0
    relevance_noise: float = 0.3
    examination_probs: tuple = DEFAULT_EXAMINATION_PROBS
    n_days: int = 30

    def __post_init__(self):
        self.examination_probs = tuple(float(p) for p in self.examination_probs)
        for name in ("n_source_queries", "n_target_queries", "vocab_size", "dense_dim",
                     "docs_per_query", "n_days"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.domain_shift < 0:
            raise ConfigError("domain_shift must be >= 0")
        if self.relevance_noise < 0:
            raise ConfigError("relevance_noise must be >= 0")
        probs = self.examination_probs
        if len(probs) != self.docs_per_query:
            raise ConfigError("examination_probs must have one entry per position")
        if probs[0] != 1.0:
            raise ConfigError("the top position must always be examined (prob 1.0)")
        if any(not 0.0 < p <= 1.0 for p in probs):
            raise ConfigError("examination probabilities must lie in (0, 1]")
        if any(probs[i] < probs[i + 1] for i in range(len(probs) - 1)):
            raise ConfigError("examination probabilities must be non-increasing")
        if self.vocab_size < self.dense_dim:
            raise ConfigError("vocab_size must be >= dense_dim (one bucket group per coordinate)")

    @property
    def meta(self):
        return CorpusMeta(self.vocab_size, self.dense_dim, self.docs_per_query)


@dataclass
class GenReport:
    source_latent_mean: list
    target_latent_mean: list
    click_position_histogram: dict  # domain -> list of counts, position-major
    resamples_over_limit: dict  # domain -> count of queries needing > soft limit
    max_resamples: dict

    def to_dict(self):
        return {
            "source_latent_mean": self.source_latent_mean,
            "target_latent_mean": self.target_latent_mean,
            "click_position_histogram": self.click_position_histogram,
            "resamples_over_limit": self.resamples_over_limit,
            "max_resamples": self.max_resamples,
        }


def _unit_vector(rng, dim):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _quantize(values, buckets):
    """Map latent coordinate values to per-coordinate bucket indices."""
    scaled = (values / LATENT_STD + QUANT_RANGE_SIGMAS) / (2.0 * QUANT_RANGE_SIGMAS)
    return np.clip(np.floor(scaled * buckets), 0, buckets - 1).astype(np.int64)


def _sample_bags(rng, latents, max_ids, buckets):
    """Draw 1..max_ids quantized-coordinate ids per row of latents.

    Returns (ids list of lists).  Coordinates are chosen without
    replacement; the id encodes (coordinate, bucket).
    """
    n, dim = latents.shape
    counts = rng.integers(1, min(max_ids, dim) + 1, size=n)
    coord_order = rng.random((n, dim)).argsort(axis=1)
    all_buckets = _quantize(latents, buckets)
    ids = []
    for i in range(n):
        coords = coord_order[i, : counts[i]]
        ids.append((coords * buckets + all_buckets[i, coords]).tolist())
    return ids


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _sample_clicks(rng, rel_by_pos, exam_probs):
    """Cascade click model, resampled until each query has exactly one click.

    rel_by_pos: (nq, N) relevance of the document shown at each position.
    Returns (clicked_position, attempts per query).
    """
    nq, n = rel_by_pos.shape
    click_prob = _sigmoid(rel_by_pos)
    clicked_pos = np.full(nq, -1, dtype=np.int64)
    attempts = np.zeros(nq, dtype=np.int64)
    active = np.arange(nq)
    rounds = 0
    while active.size:
        rounds += 1
        if rounds > RESAMPLE_HARD_LIMIT:
            raise ConfigError(
                "click sampling failed to produce exactly one click; "
                "reduce domain_shift or relevance_noise"
            )
        m = active.size
        examined = rng.random((m, n)) < exam_probs[None, :]
        clicks = examined & (rng.random((m, n)) < click_prob[active])
        n_clicks = clicks.sum(axis=1)
        attempts[active] += 1
        done = n_clicks == 1
        if done.any():
            rows = active[done]
            clicked_pos[rows] = np.argmax(clicks[done], axis=1)
            active = active[~done]
        if rounds == RESAMPLE_SOFT_LIMIT and active.size > RESAMPLE_FAIL_FRACTION * nq:
            raise ConfigError(
                f"{active.size}/{nq} queries still lack a unique click after "
                f"{RESAMPLE_SOFT_LIMIT} resamples; reduce domain_shift or relevance_noise"
            )
    return clicked_pos, attempts


def _generate_domain(cfg, domain, nq, offset, shared, rng):
    n = cfg.docs_per_query
    dim = cfg.dense_dim
    exam = np.array(cfg.examination_probs)
    buckets = cfg.vocab_size // dim

    q_lat = rng.normal(0.0, LATENT_STD, size=(nq, dim))
    d_lat = rng.normal(0.0, LATENT_STD, size=(nq, n, dim)) + offset

    dense = d_lat @ shared["feature_map"].T + shared["feature_offset"]
    dense += rng.normal(0.0, DENSE_NOISE_STD, size=dense.shape)

    rel_scale = 1.0 / (LATENT_STD * LATENT_STD * math.sqrt(dim))
    rel = (q_lat[:, None, :] * d_lat).sum(axis=2) * rel_scale
    rel += rng.normal(0.0, cfg.relevance_noise, size=rel.shape)

    # legacy display order: relevance ranking corrupted by Gumbel noise
    policy = rel + rng.gumbel(0.0, ORDER_GUMBEL_SCALE, size=rel.shape)
    order = np.argsort(-policy, axis=1, kind="stable")  # order[q, pos] = doc index

    rel_by_pos = np.take_along_axis(rel, order, axis=1)
    clicked_pos, attempts = _sample_clicks(rng, rel_by_pos, exam)
    clicked_doc = np.take_along_axis(order, clicked_pos[:, None], axis=1)[:, 0]

    weights = 1.0 / exam[clicked_pos]
    weights /= weights.mean()

    days = rng.integers(0, cfg.n_days, size=nq)

    q_bags = _sample_bags(rng, q_lat, MAX_QUERY_NGRAMS, buckets)
    d_bags = _sample_bags(rng, d_lat.reshape(nq * n, dim), MAX_DOC_NGRAMS, buckets)

    # positions: shown_position[doc] is the 1-based rank the policy gave it
    position_of_doc = np.empty((nq, n), dtype=np.int64)
    np.put_along_axis(position_of_doc, order, np.arange(1, n + 1)[None, :].repeat(nq, 0), axis=1)

    dense_lists = dense.reshape(nq * n, dim)
    examples = []
    for qi in range(nq):
        docs = [
            DocumentEntry(
                sparse_ngram_ids=d_bags[qi * n + di],
                dense_features=dense_lists[qi * n + di],
                clicked=bool(di == clicked_doc[qi]),
                shown_position=int(position_of_doc[qi, di]),
            )
            for di in range(n)
        ]
        examples.append(
            QueryExample(
                query_id=f"{domain}-{qi:06d}",
                query_ngram_ids=q_bags[qi],
                docs=docs,
                domain=domain,
                day=int(days[qi]),
                propensity_weight=float(weights[qi]),
            )
        )

    hist = np.bincount(clicked_pos, minlength=n)
    stats = {
        "latent_mean": d_lat.reshape(nq * n, dim).mean(axis=0),
        "click_hist": hist,
        "over_limit": int((attempts > RESAMPLE_SOFT_LIMIT).sum()),
        "max_attempts": int(attempts.max()),
    }
    return Dataset(examples, cfg.meta), stats


def generate(cfg):
    """Produce (source, target, report), deterministic in cfg.seed."""
    shared_rng = np.random.default_rng([cfg.seed, 0])
    dim = cfg.dense_dim
    shift_dir = _unit_vector(shared_rng, dim)
    # orthonormal latent->dense map keeps the shift visible at unit scale
    gauss = shared_rng.standard_normal((dim, dim))
    feature_map, _ = np.linalg.qr(gauss)
    shared = {
        "feature_map": feature_map,
        "feature_offset": shared_rng.normal(0.0, DENSE_OFFSET_STD, size=dim),
    }

    source, s_stats = _generate_domain(
        cfg, "source", cfg.n_source_queries, np.zeros(dim), shared, np.random.default_rng([cfg.seed, 1])
    )
    target, t_stats = _generate_domain(
        cfg, "target", cfg.n_target_queries, cfg.domain_shift * shift_dir, shared,
        np.random.default_rng([cfg.seed, 2]),
    )

    report = GenReport(
        source_latent_mean=[float(v) for v in s_stats["latent_mean"]],
        target_latent_mean=[float(v) for v in t_stats["latent_mean"]],
        click_position_histogram={
            "source": [int(c) for c in s_stats["click_hist"]],
            "target": [int(c) for c in t_stats["click_hist"]],
        },
        resamples_over_limit={"source": s_stats["over_limit"], "target": t_stats["over_limit"]},
        max_resamples={"source": s_stats["max_attempts"], "target": t_stats["max_attempts"]},
    )
    return source, target, report


def resolved_config_dict(cfg):
    return to_dict(cfg)
