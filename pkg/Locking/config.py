"""
Experiment Configuration Module
Loads YAML experiment files, merges command-line overrides, validates the
result and computes the provenance block embedded in every report.
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import List, Mapping, Optional

import yaml

from errors import ConfigError
from schemas import validate_config_document

logger = logging.getLogger(__name__)

TOOL_VERSION = "0.3.0"


@dataclass
class ExperimentConfig:
    """Every subcommand parameter; unset values keep their defaults."""

    command: Optional[str] = None
    # gen
    kind: str = "antisat"
    n: int = 8
    t: Optional[int] = None
    block_type: int = 0
    f_column: Optional[int] = None
    common_row: Optional[int] = None
    q: Optional[int] = None
    included_columns: Optional[List[int]] = None
    dividing_column: Optional[int] = None
    cell_row: Optional[int] = None
    single_cell_in: str = "g"
    p: Optional[int] = None
    host: Optional[str] = None
    target_output: Optional[str] = None
    # attack / analyze inputs
    block_file: Optional[str] = None
    locked_file: Optional[str] = None
    key_file: Optional[str] = None
    oracle_bench: Optional[str] = None
    # attack
    seed: Optional[int] = None
    seeds: List[int] = field(default_factory=lambda: [0])
    conflict_cap: Optional[int] = None
    iteration_cap: Optional[int] = None
    budget: Optional[int] = None
    profile_step: Optional[int] = None
    max_iters: Optional[int] = None
    solver: str = "embedded"
    solver_cmd: Optional[str] = None
    threads: int = 1
    export_cnf: bool = False
    # analyze
    census: bool = False
    census_mode: str = "exhaustive"
    sample_count: int = 10_000
    sps: bool = False
    sps_exact: bool = False
    cas_probe: bool = False
    bypass_key: Optional[str] = None
    distinct: bool = False
    constraints: bool = False
    wk_array: bool = False
    removal: bool = False
    # output
    output_dir: str = "results"
    output_format: str = "json"

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def provenance(self) -> dict:
        return {
            "config": self.to_dict(),
            "config_hash": self.config_hash,
            "seed": self.seed,
            "tool_version": TOOL_VERSION,
        }


FIELD_NAMES = frozenset(f.name for f in fields(ExperimentConfig))


def load_config_file(path) -> dict:
    """
    Read a YAML experiment file.

    Raises:
        ConfigError: when the file is not a YAML mapping
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = yaml.safe_load(handle) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"Cannot parse {path}: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError(f"{path} must contain a mapping of parameters")
    # allow dashes as in the command-line flags
    return {str(k).replace("-", "_"): v for k, v in document.items()}


def build_config(overrides: Mapping[str, object], config_path: Optional[str] = None) -> ExperimentConfig:
    """
    Merge file values and explicit overrides (None means "not given"),
    then validate.
    """
    merged = {}
    if config_path:
        merged.update(load_config_file(config_path))
        logger.info("Loaded configuration from %s", Path(config_path).name)
    merged.update({k: v for k, v in overrides.items() if v is not None and k in FIELD_NAMES})
    unknown = sorted(set(merged) - FIELD_NAMES)
    if unknown:
        raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")

    defaults = ExperimentConfig().to_dict()
    defaults.update(merged)
    validate_config_document(defaults)
    config = ExperimentConfig(**defaults)
    validate_semantics(config)
    return config


def validate_semantics(config: ExperimentConfig) -> None:
    """
    Cross-field checks the schema cannot express.

    Raises:
        ConfigError: with an actionable message
    """
    if config.command == "gen":
        n, t = config.n, config.t
        if config.kind == "comp":
            if t is None or not 1 <= t <= n - 1:
                raise ConfigError(f"--kind comp needs 1 <= t <= n-1 (n={n}), got t={t}")
        elif config.kind == "noncomp":
            if t is None or not 2 <= t <= n - 1:
                raise ConfigError(f"--kind noncomp needs 2 <= t <= n-1 (n={n}), got t={t}")
        elif config.kind == "consecutive":
            if config.p is None or not 1 <= config.p <= (1 << n) - 1:
                raise ConfigError(f"--kind consecutive needs 1 <= p <= 2^n - 1 (n={n}), got p={config.p}")
        if t is not None:
            row_bits = n - t
            for name, value, bits in (("f_column", config.f_column, t),
                                      ("dividing_column", config.dividing_column, t),
                                      ("common_row", config.common_row, row_bits),
                                      ("cell_row", config.cell_row, row_bits)):
                if value is not None and value >= (1 << bits):
                    raise ConfigError(f"--{name.replace('_', '-')} {value} does not fit in {bits} bits")
            if config.q is not None and not row_bits <= config.q <= n - 1:
                raise ConfigError(f"--q must be in [{row_bits}, {n - 1}], got {config.q}")
    elif config.command == "attack":
        if not config.locked_file:
            raise ConfigError("attack needs --locked")
        if not (config.key_file or config.oracle_bench):
            raise ConfigError("attack needs an oracle: --key-file or --oracle-bench")
        if config.profile_step is not None and config.max_iters is None and config.budget is None:
            raise ConfigError("--profile-step needs --max-iters (or --budget) as the last checkpoint")
        if config.max_iters is not None and config.profile_step is None:
            raise ConfigError("--max-iters only applies together with --profile-step")
    elif config.command == "analyze":
        if not (config.block_file or config.locked_file):
            raise ConfigError("analyze needs --block or --locked")
    if config.solver == "external" and not config.solver_cmd:
        raise ConfigError("--solver external needs --solver-cmd")
