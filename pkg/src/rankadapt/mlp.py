"""Batched forward/backward for the scalar-output feed-forward nets (the
prediction model and the discriminator share this machinery): tanh hidden
layers, linear output."""

import numpy as np

from .backend import kernels as K
from .errors import ShapeError


def forward(x, net):
    """Score a batch x (n, in_dim) with a hidden_layers/output_layer net.

    Returns (scores (n,), cache) where cache feeds backward().
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError("expected a 2-D batch")
    inputs = []
    h = x
    for layer in net.hidden_layers:
        if h.shape[1] != layer.in_dim:
            raise ShapeError(f"layer expects {layer.in_dim} inputs, got {h.shape[1]}")
        inputs.append(h)
        h = K.affine_tanh(h, layer.weight, layer.bias)
    if h.shape[1] != net.output_layer.in_dim:
        raise ShapeError(f"output layer expects {net.output_layer.in_dim} inputs, got {h.shape[1]}")
    scores = K.affine(h, net.output_layer.weight, net.output_layer.bias)
    return scores[:, 0], (inputs, h)


def backward(net, cache, dscores):
    """Gradients of the cached forward pass.

    dscores is the upstream gradient on the scalar scores (n,).  Returns
    (layer_grads, dx): layer_grads is a list of (dw, db) matching
    hidden_layers + [output_layer]; dx is the gradient on the input batch.
    """
    inputs, last_h = cache
    dz = np.asarray(dscores, dtype=np.float64)[:, None]
    dw_out, db_out, dh = K.linear_backward(last_h, net.output_layer.weight, dz)
    grads = [(dw_out, db_out)]
    h = last_h
    for layer, x_in in zip(reversed(net.hidden_layers), reversed(inputs)):
        dz = K.tanh_grad(h, dh)
        dw, db, dh = K.linear_backward(x_in, layer.weight, dz)
        grads.append((dw, db))
        h = x_in
    grads.reverse()  # now hidden layers first, output layer last
    return grads, dh


def grads_to_net(net_cls, layer_grads):
    """Wrap backward()'s (dw, db) list into a params-shaped container."""
    from .linalg import LayerParams

    hidden = [LayerParams(dw, db) for dw, db in layer_grads[:-1]]
    out = LayerParams(layer_grads[-1][0], layer_grads[-1][1])
    return net_cls(hidden_layers=hidden, output_layer=out)
