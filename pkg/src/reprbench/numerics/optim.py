from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import MissingGradient


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)


def adam_step(params, st: AdamState) -> None:
    """One bias-corrected Adam update in place; gradients are zeroed afterwards."""
    for i, p in enumerate(params):
        if p.grad is None:
            raise MissingGradient(f"parameter {i} {p.shape} has no gradient")
    if not st.m:
        st.m = [np.zeros_like(p.data) for p in params]
        st.v = [np.zeros_like(p.data) for p in params]
    st.t += 1
    step = st.lr / (1.0 - st.beta1 ** st.t)
    root_c2 = np.sqrt(1.0 - st.beta2 ** st.t)
    for p, m, v in zip(params, st.m, st.v):
        g = p.grad
        m *= st.beta1
        m += (1.0 - st.beta1) * g
        v *= st.beta2
        v += (1.0 - st.beta2) * np.square(g)
        denom = np.sqrt(v)
        denom /= root_c2
        denom += st.eps
        p.data -= step * m / denom
        g.fill(0.0)
