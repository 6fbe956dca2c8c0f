"""Value-driven action ranking: contextualized scoring, PROMETHEE and
alternative MCDA backends, plus ranking-agreement metrics."""

from ._core import (
    Action,
    ConfigError,
    Corpus,
    Error,
    GuardError,
    IoError,
    ParseError,
    Scenario,
    UndefinedMetricError,
    ValidationError,
    avg_acc,
    backends,
    brute_force_rank,
    first_acc,
    load_corpus,
    mae,
    os_sim,
    parse_corpus,
    preprocess_preferences,
    rank,
    rank_criteria,
    score,
    sigmoid,
    validate_corpus,
    variants,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
