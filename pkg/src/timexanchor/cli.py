"""Command-line interface wiring corpus I/O, training, prediction, and reports.

Exit codes: 0 on success, 1 for usage errors, 2 for data or validation
errors. All randomness flows from the seeds in the run configuration, so a
fixed config file reproduces byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classifiers import ModelBundle, ModelFormatError, ModelSet, TrainingDataError, fit_model_set
from .config import ConfigError, RunConfig
from .corpus import CorpusError, Document, read_canonical, read_i2b2_xml, write_canonical
from .evaluation import (
    EvalDataError,
    ablation,
    anchor_stats,
    gold_records,
    prediction_records,
    render_ablation_table,
    render_stats_table,
    render_step_table,
    render_value_table,
    score,
)
from .model import CalendarError, IsoParseError
from .pipeline import PipelineError, normalize_document, predictions_from_bytes, predictions_to_bytes, results_to_json
from .spans import is_absolute, parse_span
from .synthetic import SyntheticError, generate_synthetic

_DATA_ERRORS = (
    CorpusError,
    SyntheticError,
    TrainingDataError,
    ModelFormatError,
    EvalDataError,
    PipelineError,
    ConfigError,
    CalendarError,
    IsoParseError,
    OSError,
)


class _Parser(argparse.ArgumentParser):
    # Usage errors exit 1 (argparse defaults to 2, which this interface
    # reserves for data errors).
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="run configuration file")
    parser.add_argument(
        "--set",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        dest="overrides",
        help="override one configuration key (repeatable)",
    )
    parser.add_argument("--corpus-dir", metavar="DIR")
    parser.add_argument("--model-dir", metavar="DIR")
    parser.add_argument("--report-dir", metavar="DIR")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--jobs", type=int)


def build_parser() -> _Parser:
    parser = _Parser(prog="timexanchor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert annotated XML to the canonical schema")
    _add_common(p)
    p.add_argument("--input", required=True, metavar="PATH", help="XML file or directory")
    p.add_argument("--output", required=True, metavar="DIR")

    p = sub.add_parser("gen-synthetic", help="write a synthetic gold-annotated corpus")
    _add_common(p)
    p.add_argument("--documents", type=int, metavar="N")

    p = sub.add_parser("train", help="train anchor point and relation models")
    _add_common(p)

    p = sub.add_parser("predict", help="normalize a corpus and write predictions")
    _add_common(p)
    p.add_argument("--oracle", action="store_true", help="use gold anchor decisions")

    p = sub.add_parser("evaluate", help="score predictions against gold anchors")
    _add_common(p)
    p.add_argument("--mode", choices=("strict", "relaxed"))
    p.add_argument("--predictions", metavar="PATH", help="defaults to <report_dir>/predictions.json")

    p = sub.add_parser("stats", help="corpus anchor/relation distribution report")
    _add_common(p)

    p = sub.add_parser("ablate", help="cross-validated feature-set comparison")
    _add_common(p)
    p.add_argument(
        "--rows",
        default="B,D1,D2;B;A",
        help="semicolon-separated feature-set rows, e.g. 'B,D1,D2;A'",
    )
    p.add_argument("--folds", type=int, default=10)

    p = sub.add_parser("parse-span", help="print the parsed reading of one span")
    _add_common(p)
    p.add_argument("text", help="the span to parse, e.g. 'the next day'")

    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        config = RunConfig.from_text(Path(args.config).read_text("utf-8"))
    else:
        config = RunConfig()
    overrides: dict[str, str] = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    for key, attr in (
        ("corpus_dir", "corpus_dir"),
        ("model_dir", "model_dir"),
        ("report_dir", "report_dir"),
        ("seed", "seed"),
        ("jobs", "jobs"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = str(value)
    if getattr(args, "documents", None) is not None:
        overrides["document_count"] = str(args.documents)
    if getattr(args, "mode", None) is not None:
        overrides["eval_mode"] = args.mode
    if getattr(args, "oracle", False):
        overrides["oracle_mode"] = "true"
    return config.with_overrides(overrides)


def _read_corpus(config: RunConfig) -> list[Document]:
    corpus_dir = Path(config.corpus_dir)
    paths = sorted(corpus_dir.glob("*.json"))
    if not paths:
        raise CorpusError(f"no canonical documents (*.json) found in {corpus_dir}")
    return [read_canonical(path.read_bytes()) for path in paths]


def _config_header(config: RunConfig) -> str:
    lines = ["# timexanchor report"]
    lines.extend(f"# config {key} = {value}" for key, value in config.to_items())
    return "\n".join(lines) + "\n\n"


def _write_report(config: RunConfig, stem: str, text: str, payload: dict) -> None:
    report_dir = Path(config.report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)
    (report_dir / f"{stem}.txt").write_text(_config_header(config) + text, "utf-8")
    payload = {"config": config.echo(), **payload}
    (report_dir / f"{stem}.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8"
    )


def _cmd_convert(args: argparse.Namespace, config: RunConfig) -> int:
    source = Path(args.input)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = sorted(source.glob("*.xml")) if source.is_dir() else [source]
    if not paths:
        raise CorpusError(f"no XML files found in {source}")
    for path in paths:
        sidecar = path.with_suffix(".anchors.json")
        doc = read_i2b2_xml(
            path.read_bytes(), sidecar.read_bytes() if sidecar.exists() else None
        )
        (out_dir / f"{doc.id}.json").write_bytes(write_canonical(doc))
    print(f"converted {len(paths)} document(s) into {out_dir}")
    return 0


def _cmd_gen_synthetic(args: argparse.Namespace, config: RunConfig) -> int:
    corpus_dir = Path(config.corpus_dir)
    corpus_dir.mkdir(parents=True, exist_ok=True)
    docs = generate_synthetic(config.synthetic)
    for doc in docs:
        (corpus_dir / f"{doc.id}.json").write_bytes(write_canonical(doc))
    print(f"wrote {len(docs)} synthetic document(s) into {corpus_dir}")
    return 0


def _model_paths(config: RunConfig) -> tuple[Path, Path]:
    model_dir = Path(config.model_dir)
    return model_dir / "anchor_point.json", model_dir / "anchor_relation.json"


def _cmd_train(args: argparse.Namespace, config: RunConfig) -> int:
    docs = _read_corpus(config)
    models = fit_model_set(docs, config.feature, config.training)
    ap_path, ar_path = _model_paths(config)
    ap_path.parent.mkdir(parents=True, exist_ok=True)
    ap_path.write_bytes(models.anchor_point.to_bytes())
    ar_path.write_bytes(models.anchor_relation.to_bytes())
    print(f"trained {len(models.anchor_point.models)} anchor-point and "
          f"{len(models.anchor_relation.models)} relation models")
    return 0


def _load_models(config: RunConfig) -> ModelSet:
    ap_path, ar_path = _model_paths(config)
    for path in (ap_path, ar_path):
        if not path.exists():
            raise ModelFormatError(f"missing model file {path}; run `timexanchor train` first")
    return ModelSet(
        anchor_point=ModelBundle.from_bytes(ap_path.read_bytes()),
        anchor_relation=ModelBundle.from_bytes(ar_path.read_bytes()),
    )


def _cmd_predict(args: argparse.Namespace, config: RunConfig) -> int:
    docs = _read_corpus(config)
    models = None if config.oracle_mode else _load_models(config)
    per_document = {}
    for doc in docs:
        results = normalize_document(
            doc,
            models,
            config.feature,
            oracle_mode=config.oracle_mode,
            cross_sections=config.cross_section_previous,
        )
        per_document[doc.id] = results_to_json(doc, results)
    report_dir = Path(config.report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)
    out = report_dir / "predictions.json"
    out.write_bytes(predictions_to_bytes(per_document, config.echo()))
    total = sum(len(v) for v in per_document.values())
    print(f"wrote predictions for {total} mention(s) to {out}")
    return 0


def _cmd_evaluate(args: argparse.Namespace, config: RunConfig) -> int:
    docs = _read_corpus(config)
    predictions_path = Path(args.predictions or Path(config.report_dir) / "predictions.json")
    if not predictions_path.exists():
        raise EvalDataError(f"missing predictions file {predictions_path}")
    predictions = prediction_records(predictions_from_bytes(predictions_path.read_bytes()))
    gold = gold_records(docs)
    report = score(predictions, gold, mode=config.eval_mode)
    text = render_step_table(report) + "\n" + render_value_table(report)
    _write_report(config, f"eval_report_{config.eval_mode}", text, {"report": report.to_json()})
    print(text, end="")
    return 0


def _cmd_stats(args: argparse.Namespace, config: RunConfig) -> int:
    docs = _read_corpus(config)
    report = anchor_stats(docs)
    text = render_stats_table(report)
    _write_report(config, "stats_report", text, {"report": report.to_json()})
    print(text, end="")
    return 0


def _cmd_ablate(args: argparse.Namespace, config: RunConfig) -> int:
    docs = _read_corpus(config)
    rows = [
        [s.strip() for s in row.split(",") if s.strip()]
        for row in args.rows.split(";")
        if row.strip()
    ]
    if not rows:
        raise EvalDataError("--rows must name at least one feature-set combination")
    table = ablation(docs, rows, config.feature, config.training, folds=args.folds)
    text = render_ablation_table(table)
    _write_report(config, "ablation_report", text, {"rows": [row.to_json() for row in table]})
    print(text, end="")
    return 0


def _cmd_parse_span(args: argparse.Namespace, config: RunConfig) -> int:
    if is_absolute(args.text):
        print(f"absolute: {args.text}")
        return 0
    print(parse_span(args.text).describe())
    return 0


_COMMANDS = {
    "convert": _cmd_convert,
    "gen-synthetic": _cmd_gen_synthetic,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
    "stats": _cmd_stats,
    "ablate": _cmd_ablate,
    "parse-span": _cmd_parse_span,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args)
        return _COMMANDS[args.command](args, config)
    except _DATA_ERRORS as exc:
        print(f"timexanchor: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
