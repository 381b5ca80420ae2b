from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

from ..errors import ReprMismatch
from ..transforms import ReprKind


class Family(str, enum.Enum):
    LINEAR = "linear"
    FCN = "fcn"
    CNN = "cnn"
    MLP10 = "mlp10"

    @property
    def takes_matrix(self) -> bool:
        return self is Family.CNN


def default_family(kind: ReprKind) -> Family:
    """The network paired with each representation in the benchmark grid."""
    return Family.CNN if ReprKind(kind).is_matrix else Family.FCN


@dataclass
class TrainingConfig:
    lr: float = 1e-3
    batch_size: int = 64
    max_epochs: int = 200
    patience: int = 10


@dataclass
class ModelSpec:
    """Architecture and training settings for one model.

    ``fcn_hidden`` is ``(encoder hidden, latent, head hidden)``; ``cnn_hidden`` the
    three dense layers after the flattened feature maps.
    """

    family: Family
    repr: ReprKind
    horizon: int
    fcn_hidden: tuple = (128, 64, 32)
    cnn_filters: tuple = (16, 32)
    cnn_kernel: tuple = (3, 3)
    cnn_hidden: tuple = (128, 64, 32)
    mlp_hidden: int = 10
    training: TrainingConfig = field(default_factory=TrainingConfig)

    def __post_init__(self):
        self.family = Family(self.family)
        self.repr = ReprKind(self.repr)
        self.fcn_hidden = tuple(self.fcn_hidden)
        self.cnn_filters = tuple(self.cnn_filters)
        self.cnn_kernel = tuple(self.cnn_kernel)
        self.cnn_hidden = tuple(self.cnn_hidden)
        if isinstance(self.training, dict):
            self.training = TrainingConfig(**self.training)
        check_compatible(self.family, self.repr)
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["family"] = self.family.value
        d["repr"] = self.repr.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(**d)


def check_compatible(family: Family, kind: ReprKind) -> None:
    if Family(family).takes_matrix != ReprKind(kind).is_matrix:
        shape = "matrix" if ReprKind(kind).is_matrix else "vector"
        raise ReprMismatch(f"{Family(family).value} cannot take the {shape} representation {ReprKind(kind).value}")
