"""Linear large-margin classifiers for anchor points and anchor relations.

Training is deterministic stochastic subgradient descent on L2-regularized
hinge loss with a fixed 1/t learning-rate schedule: identical data, order,
seed, and config reproduce bit-identical models. Four binary models cover
the anchor point labels; three cover the relations, composed by argmax.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Document, GoldAnchor
from .features import FeatureConfig, FeatureVector, VocabularyIndex, extract_features, select_features
from .model import AnchorPointLabel, AnchorRelation


class TrainingDataError(ValueError):
    """Degenerate training input, e.g. a label with no examples."""


class ModelFormatError(ValueError):
    """Unreadable or incompatible model file."""


@dataclass(frozen=True)
class TrainingConfig:
    """Hyperparameters for the hinge-loss subgradient trainer.

    ``regularization`` is the soft-margin trade-off C in the usual
    0.5*||w||^2 + C * sum(hinge) objective (larger C = weaker
    regularization), so the LibSVM-style default of 1.0 behaves sensibly on
    imbalanced binary problems.
    """

    regularization: float = 1.0
    epochs: int = 50
    eta0: float = 1.0
    seed: int = 7

    def __post_init__(self) -> None:
        if self.regularization <= 0 or self.epochs <= 0 or self.eta0 <= 0:
            raise ValueError("regularization, epochs, and eta0 must all be positive")

    def to_json(self) -> dict:
        return {
            "regularization": self.regularization,
            "epochs": self.epochs,
            "eta0": self.eta0,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrainingConfig":
        return cls(
            regularization=float(obj["regularization"]),
            epochs=int(obj["epochs"]),
            eta0=float(obj["eta0"]),
            seed=int(obj["seed"]),
        )


@dataclass(frozen=True)
class LinearModel:
    """Weights over a frozen vocabulary plus an unregularized bias."""

    target: str
    vocabulary: VocabularyIndex
    weights: tuple[float, ...]
    bias: float

    def score(self, fv: FeatureVector) -> float:
        return sum(self.weights[i] * w for i, w in self.vocabulary.encode(fv)) + self.bias


def train_binary(
    instances: Sequence[tuple[FeatureVector, bool]],
    config: TrainingConfig,
    vocabulary: VocabularyIndex | None = None,
    target: str = "positive",
) -> LinearModel:
    """Fit one binary hinge-loss model; raises when a class has no examples."""
    n_pos = sum(1 for _, y in instances if y)
    if n_pos == 0:
        raise TrainingDataError(f"no positive examples for label {target!r}")
    if n_pos == len(instances):
        raise TrainingDataError(f"no negative examples for label {target!r}")
    if vocabulary is None:
        names: set[str] = set()
        for fv, _ in instances:
            names.update(fv)
        vocabulary = VocabularyIndex.from_names(names)

    encoded = [(vocabulary.encode(fv), 1.0 if y else -1.0) for fv, y in instances]
    weights = [0.0] * len(vocabulary)
    scale = 1.0
    bias = 0.0
    # Per-instance regularization for the C-parameterized objective.
    lam = 1.0 / (config.regularization * len(instances))
    rng = random.Random(config.seed)
    t = 0
    for _ in range(config.epochs):
        order = list(range(len(encoded)))
        rng.shuffle(order)
        for i in order:
            t += 1
            eta = config.eta0 / (1.0 + lam * config.eta0 * t)
            xs, y = encoded[i]
            margin = y * (scale * sum(weights[j] * w for j, w in xs) + bias)
            scale *= 1.0 - eta * lam
            if scale < 1e-9:
                weights = [scale * w for w in weights]
                scale = 1.0
            if margin < 1.0:
                for j, w in xs:
                    weights[j] += eta * y * w / scale
                bias += eta * y
    return LinearModel(
        target=target,
        vocabulary=vocabulary,
        weights=tuple(scale * w for w in weights),
        bias=bias,
    )


# Conflict policy: most prevalent label first.
ANCHOR_POINT_PREFERENCE = (
    AnchorPointLabel.ADMISSION,
    AnchorPointLabel.PREVIOUS_TIMEX,
    AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX,
    AnchorPointLabel.DISCHARGE,
)

RELATION_PREFERENCE = (
    AnchorRelation.AFTER,
    AnchorRelation.EQUAL_DURING,
    AnchorRelation.BEFORE,
)


def predict_anchor_point(
    fv: FeatureVector, models: Mapping[AnchorPointLabel, LinearModel]
) -> tuple[AnchorPointLabel, dict[AnchorPointLabel, float]]:
    """Fire the four binary models; default to admission, prefer by prevalence.

    A model is positive when its score is strictly greater than zero. With no
    positives the admission date wins by default; with several, the first
    positive in prevalence order does.
    """
    _check_shared_vocabulary(models.values())
    scores = {label: models[label].score(fv) for label in ANCHOR_POINT_PREFERENCE}
    for label in ANCHOR_POINT_PREFERENCE:
        if scores[label] > 0.0:
            return label, scores
    return AnchorPointLabel.ADMISSION, scores


def predict_anchor_relation(
    fv: FeatureVector, models: Mapping[AnchorRelation, LinearModel]
) -> tuple[AnchorRelation, dict[AnchorRelation, float]]:
    """Argmax of the three relation scores; exact ties fall to prevalence order."""
    _check_shared_vocabulary(models.values())
    scores = {rel: models[rel].score(fv) for rel in RELATION_PREFERENCE}
    best = RELATION_PREFERENCE[0]
    for rel in RELATION_PREFERENCE[1:]:
        if scores[rel] > scores[best]:
            best = rel
    return best, scores


def _check_shared_vocabulary(models) -> None:
    vocabularies = {m.vocabulary.names for m in models}
    if len(vocabularies) > 1:
        raise ModelFormatError("models do not share one vocabulary")


@dataclass(frozen=True)
class ModelBundle:
    """A task's models over one shared vocabulary, tied to a feature config."""

    task: str
    feature_config_hash: str
    training: TrainingConfig
    vocabulary: VocabularyIndex
    models: dict[str, LinearModel]

    FORMAT = "timexanchor-models/1"

    def to_bytes(self) -> bytes:
        payload = {
            "format": self.FORMAT,
            "task": self.task,
            "feature_config_hash": self.feature_config_hash,
            "training_config": self.training.to_json(),
            "vocabulary": list(self.vocabulary.names),
            "models": {
                name: {"weights": list(m.weights), "bias": m.bias}
                for name, m in sorted(self.models.items())
            },
        }
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")

    @classmethod
    def from_bytes(cls, data: bytes) -> "ModelBundle":
        try:
            payload = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ModelFormatError(f"unreadable model file: {exc}") from exc
        if payload.get("format") != cls.FORMAT:
            raise ModelFormatError(
                f"unsupported model format {payload.get('format')!r}; expected {cls.FORMAT!r}"
            )
        vocabulary = VocabularyIndex(tuple(payload["vocabulary"]))
        models = {
            name: LinearModel(
                target=name,
                vocabulary=vocabulary,
                weights=tuple(entry["weights"]),
                bias=float(entry["bias"]),
            )
            for name, entry in payload["models"].items()
        }
        return cls(
            task=payload["task"],
            feature_config_hash=payload["feature_config_hash"],
            training=TrainingConfig.from_json(payload["training_config"]),
            vocabulary=vocabulary,
            models=models,
        )

    def check_compatible(self, feature_config: FeatureConfig) -> None:
        if self.feature_config_hash != feature_config.stable_hash():
            raise ModelFormatError(
                f"model bundle {self.task!r} was trained with a different feature "
                f"configuration (hash {self.feature_config_hash})"
            )

    def anchor_point_models(self) -> dict[AnchorPointLabel, LinearModel]:
        return {AnchorPointLabel(name): m for name, m in self.models.items()}

    def anchor_relation_models(self) -> dict[AnchorRelation, LinearModel]:
        return {AnchorRelation(name): m for name, m in self.models.items()}


@dataclass(frozen=True)
class ModelSet:
    anchor_point: ModelBundle
    anchor_relation: ModelBundle


def gold_instances(docs: Sequence[Document], config: FeatureConfig) -> list[tuple[FeatureVector, GoldAnchor]]:
    """(features, gold) for every gold-annotated RI-TIMEX in the corpus."""
    instances = []
    for doc in docs:
        if doc.gold_anchors is None:
            raise TrainingDataError(f"document {doc.id} has no gold_anchors block")
        mentions = {m.id: m for m in doc.timexes}
        for mid in sorted(doc.gold_anchors):
            instances.append((extract_features(doc, mentions[mid], config), doc.gold_anchors[mid]))
    return instances


def fit_model_set(
    docs: Sequence[Document],
    feature_config: FeatureConfig,
    training_config: TrainingConfig,
) -> ModelSet:
    """Chi-square-select features per task, then train the 4 + 3 binary models."""
    instances = gold_instances(docs, feature_config)
    if not instances:
        raise TrainingDataError("corpus contains no gold-annotated RI-TIMEXes")
    vectors = [fv for fv, _ in instances]

    def build(task: str, labels, membership, threshold: float) -> ModelBundle:
        selected: set[str] = set()
        flags_by_label = {}
        for label in labels:
            flags = [membership(gold, label) for _, gold in instances]
            flags_by_label[label] = flags
            selected |= select_features(vectors, flags, threshold)
        vocabulary = VocabularyIndex.from_names(selected)
        models = {}
        for label in labels:
            pairs = [(fv, flag) for (fv, _), flag in zip(instances, flags_by_label[label])]
            models[label.value] = train_binary(
                pairs, training_config, vocabulary=vocabulary, target=label.value
            )
        return ModelBundle(
            task=task,
            feature_config_hash=feature_config.stable_hash(),
            training=training_config,
            vocabulary=vocabulary,
            models=models,
        )

    anchor_point = build(
        "anchor_point",
        ANCHOR_POINT_PREFERENCE,
        lambda gold, label: label in gold.anchor_points,
        feature_config.chi2_threshold_anchor_point,
    )
    anchor_relation = build(
        "anchor_relation",
        RELATION_PREFERENCE,
        lambda gold, label: gold.relation is label,
        feature_config.chi2_threshold_anchor_relation,
    )
    return ModelSet(anchor_point=anchor_point, anchor_relation=anchor_relation)
