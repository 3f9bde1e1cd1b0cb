"""Anchor-based normalization of relative and incomplete temporal expressions.

Relative and incomplete date/time expressions ("the next day", "6am",
"postoperative day two") cannot be normalized from their surface form alone.
This package resolves them in clinical-style narratives by classifying each
expression's anchor point (admission date, discharge date, previous timex,
previous absolute timex) and anchor relation (before / after / equal-during)
with trained linear models, parsing the surface span with rules, and
combining the three recursively into a final ISO 8601 value.
"""

from .classifiers import (
    LinearModel,
    ModelBundle,
    ModelSet,
    TrainingConfig,
    fit_model_set,
    predict_anchor_point,
    predict_anchor_relation,
    train_binary,
)
from .config import RunConfig
from .corpus import (
    Document,
    EventMention,
    EventType,
    GoldAnchor,
    Section,
    TimexMention,
    read_canonical,
    read_i2b2_xml,
    write_canonical,
    write_i2b2_xml,
)
from .evaluation import (
    AgreementReport,
    EvalReport,
    StatsReport,
    agreement,
    anchor_stats,
    ablation,
    gold_records,
    score,
)
from .features import (
    ContingencyTable,
    FeatureConfig,
    VocabularyIndex,
    chi_square,
    extract_features,
    select_features,
)
from .model import (
    AnchorPointLabel,
    AnchorRelation,
    CalendarDate,
    SectionKind,
    TimeOfDay,
    TimeUnit,
    TimexType,
    TimexValue,
    add_days,
    add_units,
    format_iso8601,
    parse_iso8601,
)
from .pipeline import (
    AnchorDecision,
    NormalizationResult,
    ResolutionStatus,
    compute_value,
    find_previous_absolute,
    find_previous_timex,
    normalize_document,
)
from .spans import ParsedSpan, SpanFamily, is_absolute, normalize_numbers, parse_span
from .synthetic import SyntheticConfig, generate_synthetic

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
