"""Experiment configuration: a flat, diffable key = value file format."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .classifiers import TrainingConfig
from .features import FeatureConfig
from .model import AnchorPointLabel, AnchorRelation
from .synthetic import SyntheticConfig


class ConfigError(ValueError):
    """Unknown key or unparseable value in a run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Everything one reproducible run needs; file form is flat key = value."""

    corpus_dir: str = "corpus"
    model_dir: str = "models"
    report_dir: str = "reports"
    feature: FeatureConfig = field(default_factory=FeatureConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    synthetic: SyntheticConfig = field(default_factory=SyntheticConfig)
    oracle_mode: bool = False
    cross_section_previous: bool = True
    eval_mode: str = "strict"
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.eval_mode not in ("strict", "relaxed"):
            raise ConfigError(f"eval_mode must be strict or relaxed, got {self.eval_mode!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")

    def to_items(self) -> list[tuple[str, str]]:
        fc, tc, sc = self.feature, self.training, self.synthetic
        ap, rp = sc.anchor_probs, sc.relation_probs
        return [
            ("corpus_dir", self.corpus_dir),
            ("model_dir", self.model_dir),
            ("report_dir", self.report_dir),
            ("window_tokens", str(fc.window_tokens)),
            ("feature_sets", ",".join(sorted(fc.feature_sets))),
            ("chi2_threshold_anchor_point", repr(fc.chi2_threshold_anchor_point)),
            ("chi2_threshold_anchor_relation", repr(fc.chi2_threshold_anchor_relation)),
            ("regularization", repr(tc.regularization)),
            ("epochs", str(tc.epochs)),
            ("eta0", repr(tc.eta0)),
            ("training_seed", str(tc.seed)),
            ("document_count", str(sc.document_count)),
            ("ri_min", str(sc.ri_per_document[0])),
            ("ri_max", str(sc.ri_per_document[1])),
            ("seed", str(sc.seed)),
            ("anchor_prob_admission", repr(ap[AnchorPointLabel.ADMISSION])),
            ("anchor_prob_discharge", repr(ap[AnchorPointLabel.DISCHARGE])),
            ("anchor_prob_previous_timex", repr(ap[AnchorPointLabel.PREVIOUS_TIMEX])),
            (
                "anchor_prob_previous_absolute_timex",
                repr(ap[AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX]),
            ),
            ("relation_prob_before", repr(rp[AnchorRelation.BEFORE])),
            ("relation_prob_after", repr(rp[AnchorRelation.AFTER])),
            ("relation_prob_equal_during", repr(rp[AnchorRelation.EQUAL_DURING])),
            ("oracle_mode", "true" if self.oracle_mode else "false"),
            ("cross_section_previous", "true" if self.cross_section_previous else "false"),
            ("eval_mode", self.eval_mode),
            ("jobs", str(self.jobs)),
        ]

    def to_text(self) -> str:
        lines = ["# timexanchor run configuration"]
        lines.extend(f"{key} = {value}" for key, value in self.to_items())
        return "\n".join(lines) + "\n"

    def echo(self) -> dict[str, str]:
        return dict(self.to_items())

    def with_overrides(self, overrides: dict[str, str]) -> "RunConfig":
        if not overrides:
            return self
        values = dict(self.to_items())
        for key, value in overrides.items():
            if key not in values:
                raise ConfigError(f"unknown configuration key {key!r}")
            values[key] = value
        return _from_mapping(values)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        values = dict(cls().to_items())
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in values:
                raise ConfigError(f"line {lineno}: unknown configuration key {key!r}")
            values[key] = value
        return _from_mapping(values)


def _parse_bool(key: str, value: str) -> bool:
    if value.lower() in ("true", "1", "yes"):
        return True
    if value.lower() in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from exc


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from exc


def _from_mapping(values: dict[str, str]) -> RunConfig:
    try:
        feature = FeatureConfig(
            window_tokens=_parse_int("window_tokens", values["window_tokens"]),
            feature_sets=frozenset(
                s for s in values["feature_sets"].split(",") if s
            ),
            chi2_threshold_anchor_point=_parse_float(
                "chi2_threshold_anchor_point", values["chi2_threshold_anchor_point"]
            ),
            chi2_threshold_anchor_relation=_parse_float(
                "chi2_threshold_anchor_relation", values["chi2_threshold_anchor_relation"]
            ),
        )
        training = TrainingConfig(
            regularization=_parse_float("regularization", values["regularization"]),
            epochs=_parse_int("epochs", values["epochs"]),
            eta0=_parse_float("eta0", values["eta0"]),
            seed=_parse_int("training_seed", values["training_seed"]),
        )
        synthetic = SyntheticConfig(
            document_count=_parse_int("document_count", values["document_count"]),
            ri_per_document=(
                _parse_int("ri_min", values["ri_min"]),
                _parse_int("ri_max", values["ri_max"]),
            ),
            anchor_probs={
                AnchorPointLabel.ADMISSION: _parse_float(
                    "anchor_prob_admission", values["anchor_prob_admission"]
                ),
                AnchorPointLabel.DISCHARGE: _parse_float(
                    "anchor_prob_discharge", values["anchor_prob_discharge"]
                ),
                AnchorPointLabel.PREVIOUS_TIMEX: _parse_float(
                    "anchor_prob_previous_timex", values["anchor_prob_previous_timex"]
                ),
                AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX: _parse_float(
                    "anchor_prob_previous_absolute_timex",
                    values["anchor_prob_previous_absolute_timex"],
                ),
            },
            relation_probs={
                AnchorRelation.BEFORE: _parse_float(
                    "relation_prob_before", values["relation_prob_before"]
                ),
                AnchorRelation.AFTER: _parse_float(
                    "relation_prob_after", values["relation_prob_after"]
                ),
                AnchorRelation.EQUAL_DURING: _parse_float(
                    "relation_prob_equal_during", values["relation_prob_equal_during"]
                ),
            },
            seed=_parse_int("seed", values["seed"]),
        )
        return RunConfig(
            corpus_dir=values["corpus_dir"],
            model_dir=values["model_dir"],
            report_dir=values["report_dir"],
            feature=feature,
            training=training,
            synthetic=synthetic,
            oracle_mode=_parse_bool("oracle_mode", values["oracle_mode"]),
            cross_section_previous=_parse_bool(
                "cross_section_previous", values["cross_section_previous"]
            ),
            eval_mode=values["eval_mode"],
            jobs=_parse_int("jobs", values["jobs"]),
        )
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
