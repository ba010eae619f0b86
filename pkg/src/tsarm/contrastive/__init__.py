"""Desk-scale contrastive pretraining and augmentation benchmarking."""

from .bench import benchmark_run, rank_augmentations
from .loss import nt_xent_loss
from .model import MLP, EncoderConfig
from .train import (
    ClassificationMetrics, TrainConfig, classification_metrics, finetune_and_test,
    label_subset, pretrain, stratified_split,
)

__all__ = [
    "MLP", "EncoderConfig", "TrainConfig", "ClassificationMetrics", "nt_xent_loss",
    "pretrain", "finetune_and_test", "rank_augmentations", "benchmark_run",
    "classification_metrics", "stratified_split", "label_subset",
]
