from .optim import AdamState, adam_step
from .rng import XorShift64Star, seeded_rng
from .tensor import (
    Tensor,
    backward,
    concat,
    conv2d,
    conv2d_forward,
    dense,
    dense_forward,
    flatten,
    l1_loss,
    no_grad,
    relu,
)

__all__ = [
    "AdamState", "Tensor", "XorShift64Star", "adam_step", "backward", "concat",
    "conv2d", "conv2d_forward", "dense", "dense_forward", "flatten", "l1_loss",
    "no_grad", "relu", "seeded_rng",
]
