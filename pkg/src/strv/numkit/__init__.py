"""Small dense-tensor kernel: tape autodiff, optimizers, checkpoints."""

from .tensor import (
    Tensor,
    add,
    add_bias,
    backward,
    concat,
    cross_entropy,
    gather_rows,
    log,
    matmul,
    mean,
    mse,
    mul,
    relu,
    reshape,
    softmax,
    sub,
    total,
    zero_grads,
)
from .optim import SGD, Adam, glorot_uniform
from .gradcheck import finite_difference_check
from .checkpoint import load_params, save_params

__all__ = [
    "Tensor",
    "add",
    "add_bias",
    "backward",
    "concat",
    "cross_entropy",
    "gather_rows",
    "log",
    "matmul",
    "mean",
    "mse",
    "mul",
    "relu",
    "reshape",
    "softmax",
    "sub",
    "total",
    "zero_grads",
    "SGD",
    "Adam",
    "glorot_uniform",
    "finite_difference_check",
    "load_params",
    "save_params",
]
