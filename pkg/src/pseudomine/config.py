"""Pipeline configuration: a YAML file layered over packaged defaults, then
command-line and environment overrides."""
from __future__ import annotations

import copy
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .cleaner import CleaningRules
from .references import SnippetConfig
from .topics import TokenizerConfig

ENV_PREFIX = "PSEUDOMINE_"


class ConfigError(ValueError):
    pass


def default_tree() -> dict:
    text = resources.files("pseudomine").joinpath("default_config.yaml").read_text(encoding="utf-8")
    return yaml.safe_load(text)


def _merge(base: dict, override: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {where}{key}")
        if isinstance(base[key], dict) and key != "keywords":
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where}{key} must be a mapping")
            out[key] = _merge(base[key], value, f"{where}{key}.")
        else:
            out[key] = value
    return out


@dataclass
class PipelineConfig:
    corpus_root: Path
    output_dir: Path
    max_archive_depth: int
    keywords: dict[str, tuple[str, ...]]
    snippet: SnippetConfig
    cleaning: CleaningRules
    tokenizer: TokenizerConfig
    max_df: float
    min_df: float
    num_topics: int
    seed: int
    alpha: float | None
    beta: float
    iterations: int
    top_words: int
    min_year: int
    sample_n: int
    sample_seed: int
    labels: Path | None
    predictions: Path | None
    jobs: int

    @classmethod
    def from_tree(cls, tree: dict, base_dir: Path = Path(".")) -> "PipelineConfig":
        t = _merge(default_tree(), tree or {})
        try:
            def path(v):
                return None if v is None else (base_dir / v if not Path(v).is_absolute() else Path(v))

            tok = t["tokenizer"]
            stop = tok["stopwords"]
            if stop == "english":
                stop_set = TokenizerConfig().stopwords
            elif isinstance(stop, list):
                stop_set = frozenset(stop)
            else:
                raise ConfigError("tokenizer.stopwords must be 'english' or a list")
            cfg = cls(
                corpus_root=path(t["corpus"]["root"]),
                output_dir=path(t["corpus"]["output"]),
                max_archive_depth=int(t["corpus"]["max_archive_depth"]),
                keywords={k: tuple(v) for k, v in t["detect"]["keywords"].items()},
                snippet=SnippetConfig(
                    int(t["snippets"]["span_chars"]),
                    int(t["snippets"]["boundary_window"]),
                    frozenset(t["snippets"]["sentence_terminators"]),
                ),
                cleaning=CleaningRules(**{k: bool(v) for k, v in t["cleaning"].items()}),
                tokenizer=TokenizerConfig(
                    stopwords=stop_set | frozenset(tok["extra_stopwords"]),
                    non_instructive=frozenset(tok["non_instructive"]),
                    min_token_length=int(tok["min_token_length"]),
                ),
                max_df=float(t["tfidf"]["max_df"]),
                min_df=float(t["tfidf"]["min_df"]),
                num_topics=int(t["lda"]["num_topics"]),
                seed=int(t["lda"]["seed"]),
                alpha=None if t["lda"]["alpha"] is None else float(t["lda"]["alpha"]),
                beta=float(t["lda"]["beta"]),
                iterations=int(t["lda"]["iterations"]),
                top_words=int(t["lda"]["top_words"]),
                min_year=int(t["lda"]["min_year"]),
                sample_n=int(t["sampling"]["n"]),
                sample_seed=int(t["sampling"]["seed"]),
                labels=path(t["validation"]["labels"]),
                predictions=path(t["validation"]["predictions"]),
                jobs=int(t["jobs"]),
            )
        except ConfigError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc
        cfg.validate()
        return cfg

    def validate(self):
        positive = {
            "corpus.max_archive_depth": self.max_archive_depth,
            "lda.num_topics": self.num_topics,
            "lda.beta": self.beta,
            "lda.iterations": self.iterations,
            "lda.top_words": self.top_words,
            "tfidf.max_df": self.max_df,
            "jobs": self.jobs,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.alpha is not None and self.alpha <= 0:
            raise ConfigError("lda.alpha must be positive")
        if not 0 <= self.min_df <= self.max_df <= 1:
            raise ConfigError("need 0 <= tfidf.min_df <= tfidf.max_df <= 1")
        if self.num_topics < 2:
            raise ConfigError("lda.num_topics must be at least 2")
        if self.sample_n < 0:
            raise ConfigError("sampling.n must be non-negative")


def load_config(path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> PipelineConfig:
    """Read ``path`` (or defaults only) and apply flat overrides.

    Recognised overrides: ``root``, ``output``, ``seed``, ``jobs``,
    ``labels``, ``predictions``. ``None`` values are ignored.
    """
    tree: dict = {}
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        try:
            tree = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(tree, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        base = path.parent
    cfg = PipelineConfig.from_tree(tree, base)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "root":
            cfg.corpus_root = Path(value)
        elif key == "output":
            cfg.output_dir = Path(value)
        elif key == "seed":
            cfg.seed = cfg.sample_seed = int(value)
        elif key == "jobs":
            cfg.jobs = int(value)
        elif key in ("labels", "predictions"):
            setattr(cfg, key, Path(value))
        else:
            raise ConfigError(f"unknown override {key}")
    cfg.validate()
    return cfg


def env_overrides(environ=os.environ) -> dict[str, str]:
    """``PSEUDOMINE_<NAME>`` variables mirroring the command-line flags."""
    names = ("config", "root", "output", "seed", "jobs", "labels", "predictions")
    return {n: environ[ENV_PREFIX + n.upper()] for n in names if ENV_PREFIX + n.upper() in environ}
