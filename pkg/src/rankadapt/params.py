"""Parameter containers for the three trainable groups, their seeded
initialization, and flatten/unflatten helpers for gradient checking and
checkpoints."""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, ValidationError
from .linalg import LayerParams


@dataclass
class ModelArch:
    """Network dimensions; everything needed to allocate parameters."""

    vocab_size: int
    dense_dim: int
    embed_dim: int = 32
    k_q: int = 0  # 0 -> embed_dim // 2
    k_d: int = 0
    ranker_hidden: tuple = (256, 128, 64)
    disc_hidden: tuple = (64, 32)

    def __post_init__(self):
        if self.k_q == 0:
            self.k_q = self.embed_dim // 2
        if self.k_d == 0:
            self.k_d = self.embed_dim // 2
        self.ranker_hidden = tuple(int(h) for h in self.ranker_hidden)
        self.disc_hidden = tuple(int(h) for h in self.disc_hidden)
        for name in ("vocab_size", "dense_dim", "embed_dim", "k_q", "k_d"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"arch field {name} must be positive")

    @property
    def concat_dim(self):
        return self.k_q + self.k_d + self.dense_dim

    def to_dict(self):
        return {
            "vocab_size": self.vocab_size,
            "dense_dim": self.dense_dim,
            "embed_dim": self.embed_dim,
            "k_q": self.k_q,
            "k_d": self.k_d,
            "ranker_hidden": list(self.ranker_hidden),
            "disc_hidden": list(self.disc_hidden),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            vocab_size=int(d["vocab_size"]),
            dense_dim=int(d["dense_dim"]),
            embed_dim=int(d["embed_dim"]),
            k_q=int(d["k_q"]),
            k_d=int(d["k_d"]),
            ranker_hidden=tuple(d["ranker_hidden"]),
            disc_hidden=tuple(d["disc_hidden"]),
        )

    def fingerprint(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class EmbedderParams:
    query_table: np.ndarray  # (vocab_size, k_q)
    doc_table: np.ndarray  # (vocab_size, k_d)
    final_layer: LayerParams  # (embed_dim, k_q + k_d + dense_dim)


@dataclass
class RankerParams:
    hidden_layers: list
    output_layer: LayerParams  # (1, last_hidden)


@dataclass
class DiscriminatorParams:
    hidden_layers: list
    output_layer: LayerParams  # (1, last_hidden)


@dataclass
class ModelParams:
    embedder: EmbedderParams
    ranker: RankerParams
    discriminator: DiscriminatorParams


def glorot_uniform(rng, out_dim, in_dim):
    limit = np.sqrt(6.0 / (in_dim + out_dim))
    return rng.uniform(-limit, limit, size=(out_dim, in_dim))


def _init_mlp(rng, in_dim, hidden, cls):
    layers = []
    prev = in_dim
    for h in hidden:
        layers.append(LayerParams(glorot_uniform(rng, h, prev), np.zeros(h)))
        prev = h
    output = LayerParams(glorot_uniform(rng, 1, prev), np.zeros(1))
    return cls(hidden_layers=layers, output_layer=output)


def init_model_params(arch, seed):
    """Deterministic initialization: uniform Glorot weights, zero biases.

    Draw order is fixed (embedder tables, final layer, ranker, discriminator)
    so a (arch, seed) pair always yields the same parameters.
    """
    rng = np.random.default_rng(seed)
    emb = EmbedderParams(
        query_table=glorot_uniform(rng, arch.vocab_size, arch.k_q),
        doc_table=glorot_uniform(rng, arch.vocab_size, arch.k_d),
        final_layer=LayerParams(
            glorot_uniform(rng, arch.embed_dim, arch.concat_dim), np.zeros(arch.embed_dim)
        ),
    )
    ranker = _init_mlp(rng, arch.embed_dim, arch.ranker_hidden, RankerParams)
    disc = _init_mlp(rng, arch.embed_dim, arch.disc_hidden, DiscriminatorParams)
    return ModelParams(embedder=emb, ranker=ranker, discriminator=disc)


def tree_map(fn, *objs):
    """Apply fn leaf-wise over parameter containers of identical structure."""
    first = objs[0]
    if isinstance(first, np.ndarray):
        return fn(*objs)
    if isinstance(first, LayerParams):
        return LayerParams(
            fn(*(o.weight for o in objs)), fn(*(o.bias for o in objs))
        )
    if isinstance(first, list):
        return [tree_map(fn, *items) for items in zip(*objs)]
    if isinstance(first, EmbedderParams):
        return EmbedderParams(
            tree_map(fn, *(o.query_table for o in objs)),
            tree_map(fn, *(o.doc_table for o in objs)),
            tree_map(fn, *(o.final_layer for o in objs)),
        )
    if isinstance(first, (RankerParams, DiscriminatorParams)):
        return type(first)(
            tree_map(fn, *(o.hidden_layers for o in objs)),
            tree_map(fn, *(o.output_layer for o in objs)),
        )
    if isinstance(first, ModelParams):
        return ModelParams(
            tree_map(fn, *(o.embedder for o in objs)),
            tree_map(fn, *(o.ranker for o in objs)),
            tree_map(fn, *(o.discriminator for o in objs)),
        )
    raise TypeError(f"unsupported tree node {type(first)}")


def tree_leaves(obj):
    """Flat list of the ndarrays in a parameter container, in fixed order."""
    if isinstance(obj, np.ndarray):
        return [obj]
    if isinstance(obj, LayerParams):
        return [obj.weight, obj.bias]
    if isinstance(obj, list):
        return [leaf for item in obj for leaf in tree_leaves(item)]
    if isinstance(obj, EmbedderParams):
        return (
            tree_leaves(obj.query_table)
            + tree_leaves(obj.doc_table)
            + tree_leaves(obj.final_layer)
        )
    if isinstance(obj, (RankerParams, DiscriminatorParams)):
        return tree_leaves(obj.hidden_layers) + tree_leaves(obj.output_layer)
    if isinstance(obj, ModelParams):
        return (
            tree_leaves(obj.embedder) + tree_leaves(obj.ranker) + tree_leaves(obj.discriminator)
        )
    raise TypeError(f"unsupported tree node {type(obj)}")


def flatten(obj):
    """Concatenate all leaves into one float64 vector."""
    leaves = tree_leaves(obj)
    if not leaves:
        return np.zeros(0)
    return np.concatenate([leaf.ravel() for leaf in leaves])


def unflatten_like(template, flat):
    """Rebuild a container shaped like template from a flat vector."""
    flat = np.asarray(flat, dtype=np.float64)
    sizes = [leaf.size for leaf in tree_leaves(template)]
    if flat.size != sum(sizes):
        raise ShapeError(f"flat vector has {flat.size} entries, template needs {sum(sizes)}")
    pieces = iter(np.split(flat, np.cumsum(sizes)[:-1]))

    def rebuild(leaf):
        return next(pieces).reshape(leaf.shape).copy()

    return tree_map(rebuild, template)


def group_sizes(params):
    """(name, size) per trainable group, for gradient-check reports."""
    return [
        ("theta_emb", flatten(params.embedder).size),
        ("theta_P", flatten(params.ranker).size),
        ("theta_D", flatten(params.discriminator).size),
    ]


def zeros_like_params(obj):
    return tree_map(np.zeros_like, obj)


def copy_params(obj):
    return tree_map(np.copy, obj)


def add_scaled(target, delta, alpha):
    """target + alpha * delta, leaf-wise (returns a new container)."""
    return tree_map(lambda a, b: a + alpha * b, target, delta)


def _tree_to_jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, LayerParams):
        return {"weight": obj.weight.tolist(), "bias": obj.bias.tolist()}
    if isinstance(obj, list):
        return [_tree_to_jsonable(o) for o in obj]
    raise TypeError(type(obj))


def params_to_dict(params):
    return {
        "embedder": {
            "query_table": params.embedder.query_table.tolist(),
            "doc_table": params.embedder.doc_table.tolist(),
            "final_layer": _tree_to_jsonable(params.embedder.final_layer),
        },
        "ranker": {
            "hidden_layers": _tree_to_jsonable(params.ranker.hidden_layers),
            "output_layer": _tree_to_jsonable(params.ranker.output_layer),
        },
        "discriminator": {
            "hidden_layers": _tree_to_jsonable(params.discriminator.hidden_layers),
            "output_layer": _tree_to_jsonable(params.discriminator.output_layer),
        },
    }


def _layer_from_dict(d):
    return LayerParams(np.array(d["weight"], dtype=np.float64), np.array(d["bias"], dtype=np.float64))


def params_from_dict(d):
    return ModelParams(
        embedder=EmbedderParams(
            query_table=np.array(d["embedder"]["query_table"], dtype=np.float64),
            doc_table=np.array(d["embedder"]["doc_table"], dtype=np.float64),
            final_layer=_layer_from_dict(d["embedder"]["final_layer"]),
        ),
        ranker=RankerParams(
            hidden_layers=[_layer_from_dict(l) for l in d["ranker"]["hidden_layers"]],
            output_layer=_layer_from_dict(d["ranker"]["output_layer"]),
        ),
        discriminator=DiscriminatorParams(
            hidden_layers=[_layer_from_dict(l) for l in d["discriminator"]["hidden_layers"]],
            output_layer=_layer_from_dict(d["discriminator"]["output_layer"]),
        ),
    )
