import os
from dataclasses import asdict, dataclass, fields
from typing import Optional

import yaml
from dotenv import load_dotenv

# --- Load Environment ---
# This file is the single source of truth for loading environment variables.
# It should be imported before any other local module that needs these variables.
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..'))
dotenv_path = os.path.join(project_root, '.env')
if os.path.exists(dotenv_path):
    load_dotenv(dotenv_path=dotenv_path, override=True)

# --- Logging ---
LOG_LEVEL = os.getenv('CURVE_PI1_LOG_LEVEL', 'INFO')
LOG_FORMAT = '[%(asctime)s] [%(levelname)s] - %(message)s'

# --- Group-theory budgets ---
TIETZE_MAX_PASSES = int(os.getenv('CURVE_PI1_TIETZE_PASSES', '50'))
HOPF_SEARCH_LENGTH = int(os.getenv('CURVE_PI1_HOPF_SEARCH_LENGTH', '6'))  # L
HOPF_BALL_RADIUS = int(os.getenv('CURVE_PI1_HOPF_BALL_RADIUS', '6'))  # R
HOM_TUPLE_CAP = int(os.getenv('CURVE_PI1_HOM_TUPLE_CAP', str(10 ** 9)))
HOM_WORKERS = int(os.getenv('CURVE_PI1_HOM_WORKERS', '4'))
HOM_CHUNK = int(os.getenv('CURVE_PI1_HOM_CHUNK', str(1 << 18)))
EPI_MAX_SYLLABLES = int(os.getenv('CURVE_PI1_EPI_SYLLABLES', '3'))
EPI_CANDIDATE_CAP = int(os.getenv('CURVE_PI1_EPI_CANDIDATES', '2000000'))

# --- Singularity analysis ---
RESOLVE_MAX_STEPS = int(os.getenv('CURVE_PI1_RESOLVE_MAX_STEPS', '200'))

# --- Reports ---
DEFAULT_CATALOG = os.getenv('CURVE_PI1_CATALOG', 'small')


class Config:
    LOG_LEVEL = LOG_LEVEL
    TIETZE_MAX_PASSES = TIETZE_MAX_PASSES
    HOPF_SEARCH_LENGTH = HOPF_SEARCH_LENGTH
    HOPF_BALL_RADIUS = HOPF_BALL_RADIUS
    HOM_TUPLE_CAP = HOM_TUPLE_CAP
    HOM_WORKERS = HOM_WORKERS
    HOM_CHUNK = HOM_CHUNK
    EPI_MAX_SYLLABLES = EPI_MAX_SYLLABLES
    EPI_CANDIDATE_CAP = EPI_CANDIDATE_CAP
    RESOLVE_MAX_STEPS = RESOLVE_MAX_STEPS
    DEFAULT_CATALOG = DEFAULT_CATALOG


@dataclass(frozen=True)
class Budgets:
    """Per-run limits; every search in the pipeline reads its bound from here."""
    tietze_passes: int = TIETZE_MAX_PASSES
    hopf_search_length: int = HOPF_SEARCH_LENGTH
    hopf_ball_radius: int = HOPF_BALL_RADIUS
    hom_tuple_cap: int = HOM_TUPLE_CAP
    hom_workers: int = HOM_WORKERS
    hom_chunk: int = HOM_CHUNK
    epi_max_syllables: int = EPI_MAX_SYLLABLES
    epi_candidate_cap: int = EPI_CANDIDATE_CAP
    resolve_max_steps: int = RESOLVE_MAX_STEPS

    @classmethod
    def from_config(cls, config_class=Config) -> 'Budgets':
        return cls(
            tietze_passes=config_class.TIETZE_MAX_PASSES,
            hopf_search_length=config_class.HOPF_SEARCH_LENGTH,
            hopf_ball_radius=config_class.HOPF_BALL_RADIUS,
            hom_tuple_cap=config_class.HOM_TUPLE_CAP,
            hom_workers=config_class.HOM_WORKERS,
            hom_chunk=config_class.HOM_CHUNK,
            epi_max_syllables=config_class.EPI_MAX_SYLLABLES,
            epi_candidate_cap=config_class.EPI_CANDIDATE_CAP,
            resolve_max_steps=config_class.RESOLVE_MAX_STEPS,
        )

    def to_dict(self) -> dict:
        return asdict(self)


def load_budgets(path: Optional[str] = None, config_class=Config) -> Budgets:
    """
    Budgets from Config, overridden by a YAML mapping file when given.

    Raises:
        ValueError: unknown keys or non-integer values in the file
    """
    budgets = Budgets.from_config(config_class)
    if not path:
        return budgets

    with open(path, 'r', encoding='utf-8') as f:
        overrides = yaml.safe_load(f) or {}
    if not isinstance(overrides, dict):
        raise ValueError(f"Budget file {path} must contain a mapping")

    valid = {f.name for f in fields(Budgets)}
    unknown = set(overrides) - valid
    if unknown:
        raise ValueError(f"Unknown budget keys {sorted(unknown)}. Available: {', '.join(sorted(valid))}")
    for key, value in overrides.items():
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise ValueError(f"Budget '{key}' must be a non-negative integer, got {value!r}")
    merged = budgets.to_dict()
    merged.update(overrides)
    return Budgets(**merged)
