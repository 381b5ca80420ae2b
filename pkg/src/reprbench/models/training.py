"""Model construction, training with early stopping, and prediction in GW."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyTrainingSet, NonFiniteLoss, ReprMismatch
from ..numerics import AdamState, adam_step, backward, l1_loss, no_grad, seeded_rng
from ..samples import Sample, SampleSet
from .linear import LinearModel, fit_linear, predict_linear
from .networks import Network, build_network
from .spec import Family, ModelSpec

log = logging.getLogger(__name__)

PREDICT_CHUNK = 4096
SHUFFLE_SALT = 0x5DEECE66D


@dataclass
class Normalization:
    """Training-split statistics. Calendar features are passed through as is."""

    input_mean: np.ndarray
    input_std: np.ndarray
    target_mean: float
    target_std: float

    @classmethod
    def fit(cls, sset: SampleSet) -> "Normalization":
        x = sset.inputs
        y = sset.targets
        std = x.std(axis=0)
        std[std == 0] = 1.0
        t_std = float(y.std()) or 1.0
        return cls(x.mean(axis=0), std, float(y.mean()), t_std)

    def inputs(self, x: np.ndarray) -> np.ndarray:
        return (x - self.input_mean) / self.input_std

    def targets(self, y: np.ndarray) -> np.ndarray:
        return (y - self.target_mean) / self.target_std

    def untargets(self, z: np.ndarray) -> np.ndarray:
        return z * self.target_std + self.target_mean


@dataclass
class TrainedModel:
    spec: ModelSpec
    parameters: Network | LinearModel
    normalization: Normalization | None = None
    seed: int = 0
    best_val_mae: float = float("nan")
    val_history: list = field(default_factory=list)


def _build(spec: ModelSpec, rng, family: Family, zero: bool) -> TrainedModel:
    if spec.family is not family:
        raise ReprMismatch(f"expected a {family.value} spec, got {spec.family.value}")
    seed = getattr(rng, "seed", 0)
    return TrainedModel(spec, build_network(spec, rng, zero), seed=seed)


def build_fcn(spec: ModelSpec, rng=None, zero: bool = False) -> TrainedModel:
    return _build(spec, rng, Family.FCN, zero)


def build_cnn(spec: ModelSpec, rng=None, zero: bool = False) -> TrainedModel:
    return _build(spec, rng, Family.CNN, zero)


def build_mlp10(spec: ModelSpec, rng=None, zero: bool = False) -> TrainedModel:
    return _build(spec, rng, Family.MLP10, zero)


def build_model(spec: ModelSpec, seed: int) -> TrainedModel:
    """Untrained model for ``spec``; linear models get their weights in training."""
    if spec.family is Family.LINEAR:
        return TrainedModel(spec, None, seed=seed)
    return TrainedModel(spec, build_network(spec, seeded_rng(seed)), seed=seed)


def _check(model: TrainedModel, sset: SampleSet):
    spec = model.spec
    if sset.kind is not spec.repr:
        raise ReprMismatch(f"model trained for {spec.repr.value} got {sset.kind.value} samples")


def _raw_outputs(net: Network, norm: Normalization, sset: SampleSet) -> np.ndarray:
    out = np.empty(len(sset))
    with no_grad():
        for lo in range(0, len(sset), PREDICT_CHUNK):
            part = slice(lo, lo + PREDICT_CHUNK)
            y = net(norm.inputs(sset.inputs[part]), sset.calendar[part])
            out[part] = y.data.reshape(-1)
    return out


def predict(model: TrainedModel, s):
    """Absolute demand forecast in GW for a :class:`Sample` or sample collection.

    Difference models are reconstructed as ``x_k + delta``.
    """
    single = isinstance(s, Sample)
    sset = SampleSet.from_samples([s] if single else s)
    _check(model, sset)
    if model.spec.family is Family.LINEAR:
        out = predict_linear(model.parameters, sset)
    else:
        out = model.normalization.untargets(_raw_outputs(model.parameters, model.normalization, sset))
        if sset.kind.differenced:
            out = sset.x_k + out
    return float(out[0]) if single else out


def _val_mae(model, val) -> float:
    return float(np.mean(np.abs(val.target_absolute - predict(model, val))))


def train_model(model: TrainedModel, train, val, seed: int | None = None) -> TrainedModel:
    """Fit ``model`` in place and return it.

    Networks: mini-batch Adam on the L1 loss of standardised targets, one seeded
    shuffle per epoch, validation MAE (GW) after every epoch, parameters of the
    best epoch restored at the end. Linear models are solved directly on ``train``.
    """
    if len(train) == 0:
        raise EmptyTrainingSet("training set is empty")
    if len(val) == 0:
        raise EmptyTrainingSet("validation set is empty")
    train, val = SampleSet.from_samples(train), SampleSet.from_samples(val)
    _check(model, train)
    _check(model, val)
    seed = model.seed if seed is None else seed
    model.seed = seed

    if model.spec.family is Family.LINEAR:
        model.parameters = fit_linear(train, model.spec.repr.differenced)
        model.best_val_mae = _val_mae(model, val)
        model.val_history = [model.best_val_mae]
        return model

    cfg = model.spec.training
    net = model.parameters
    norm = Normalization.fit(train)
    model.normalization = norm
    x = norm.inputs(train.inputs)
    cal = train.calendar
    y = norm.targets(train.targets)
    params = net.parameters()
    for p in params:
        p.grad = None
    opt = AdamState(lr=cfg.lr)
    rng = seeded_rng(seed ^ SHUFFLE_SALT)

    best, best_state, stale = np.inf, net.state(), 0
    model.val_history = []
    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(train))
        for lo in range(0, len(order), cfg.batch_size):
            idx = order[lo:lo + cfg.batch_size]
            loss = l1_loss(net(x[idx], cal[idx]), y[idx])
            if not np.isfinite(loss.data):
                raise NonFiniteLoss(epoch)
            backward(loss)
            adam_step(params, opt)
        score = _val_mae(model, val)
        model.val_history.append(score)
        log.debug("seed %d epoch %d val MAE %.4f GW", seed, epoch, score)
        if score < best:
            best, best_state, stale = score, net.state(), 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    net.load_state(best_state)
    model.best_val_mae = float(best)
    return model
