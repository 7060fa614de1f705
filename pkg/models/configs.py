"""Pydantic models for model, training and run configuration."""

from pydantic import BaseModel, Field, ValidationError, model_validator
from typing import Optional, List, Literal, Dict, Any
from enum import Enum
from pathlib import Path

from errors import ConfigError, LayoutError
from models.dataset import CVScheme, Task, KINEMATIC_DIM, NUM_CATEGORIES, NUM_CLASSES


class TaskSelection(str, Enum):
    """Which tasks a run trains and evaluates on."""
    KT = "KT"
    NP = "NP"
    SU = "SU"
    ACROSS = "across"

    def tasks(self) -> List[Task]:
        if self == TaskSelection.ACROSS:
            return list(Task)
        return [Task.from_code(self.value)]


class ModelConfig(BaseModel):
    """Architecture hyperparameters."""
    segment_length: int = Field(75, ge=1)
    input_dim: int = Field(KINEMATIC_DIM, ge=1)
    num_classes: int = Field(NUM_CLASSES, ge=2)
    num_categories: int = Field(NUM_CATEGORIES, ge=1)
    heads: int = Field(4, ge=1)
    mlp_hidden: int = Field(128, ge=1)
    d_model: Optional[int] = Field(None, ge=1)
    num_fusion_modules: int = Field(3, ge=2)
    ff_expansion: int = Field(2, ge=1)
    average: Literal["logits", "probabilities"] = "logits"
    bn_momentum: float = Field(0.1, gt=0.0, le=1.0)
    bn_eps: float = Field(1e-5, gt=0.0)
    ln_eps: float = Field(1e-5, gt=0.0)
    seed: int = 0

    @model_validator(mode="after")
    def check_heads(self) -> "ModelConfig":
        if self.attention_dim % self.heads != 0:
            raise ValueError(
                f"attention width {self.attention_dim} is not divisible by heads={self.heads}"
            )
        return self

    @property
    def attention_dim(self) -> int:
        """Width of the attention projections: D rounded up to a multiple of heads."""
        if self.d_model is not None:
            return self.d_model
        return -(-self.input_dim // self.heads) * self.heads

    @property
    def head_dim(self) -> int:
        return self.attention_dim // self.heads


class TrainConfig(BaseModel):
    """Optimization hyperparameters."""
    epochs: int = Field(1500, ge=1)
    batch_size: int = Field(25, ge=1)
    learning_rate: float = Field(1e-6, gt=0.0)
    lambda_l2: float = Field(0.01, ge=0.0)
    augment_rate: float = Field(0.5, ge=0.0, le=1.0)
    label_smoothing: float = Field(0.3, ge=0.0, lt=1.0)
    noise_scale: float = Field(1.0, ge=0.0)
    adam_beta1: float = Field(0.9, ge=0.0, lt=1.0)
    adam_beta2: float = Field(0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(1e-8, gt=0.0)
    log_every: int = Field(50, ge=1)
    seed: int = 0


class RunConfig(BaseModel):
    """Merged view of everything a command needs."""
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    dataset_root: Optional[str] = None
    task: TaskSelection = TaskSelection.KT
    scheme: CVScheme = CVScheme.LOSO
    out: str = "runs"
    jobs: int = Field(1, ge=1)
    seed: int = 0
    synthetic: bool = False
    grs_representation: Literal["expected", "argmax"] = "expected"

    def require_dataset_root(self) -> Path:
        """Return the dataset root, checking it exists."""
        if not self.dataset_root:
            raise ConfigError("no dataset root: pass --dataset-root or set RTRANS_DATASET_ROOT")
        root = Path(self.dataset_root)
        if not root.is_dir():
            raise LayoutError([str(root)])
        return root

    @property
    def out_dir(self) -> Path:
        return Path(self.out)


def build_model_config(values: Dict[str, Any]) -> ModelConfig:
    """Validate a mapping into a ModelConfig, raising ConfigError on failure."""
    try:
        return ModelConfig(**values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def build_train_config(values: Dict[str, Any]) -> TrainConfig:
    """Validate a mapping into a TrainConfig, raising ConfigError on failure."""
    try:
        return TrainConfig(**values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
