"""
Command Provider Module
Shared plumbing for the CLI subcommand providers: exit codes, oracle and
key-file loading, status lines.
"""

import json
import logging
from pathlib import Path
from typing import Dict, Optional

from rich.console import Console

from config import ExperimentConfig
from errors import ConfigError, DomainError
from netlist import Netlist, Oracle, key_assignment, load_bench
from schemas import KEY_SCHEMA, validate_document

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TIMEOUT = 3
EXIT_IO = 4

VALIDATION_ERRORS = {
    "LockingError", "ConfigError", "DomainError", "ConstructionError",
    "BenchParseError", "NetlistError", "CapacityError",
}


def exit_code_for(error_type: str) -> int:
    return EXIT_VALIDATION if error_type in VALIDATION_ERRORS else EXIT_IO


def read_json_document(path, what: str):
    """
    Parse a JSON input file.

    Raises:
        DomainError: when the file is not valid JSON
    """
    with open(path, "r", encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as exc:
            raise DomainError(f"{what} {Path(path).name} is not valid JSON: {exc}") from exc


def load_key_file(path, locked: Optional[Netlist] = None) -> Dict[str, int]:
    """
    Read a key file: {"n", "K_f", "K_g"} or {"assignment": {wire: bit}}.

    Raises:
        DomainError: on a malformed document or missing key inputs
    """
    document = read_json_document(path, "Key file")
    validate_document(KEY_SCHEMA, document, "key file")
    if "assignment" in document:
        key = {k: int(v) for k, v in document["assignment"].items()}
    else:
        key = key_assignment(document["n"], document["K_f"], document["K_g"])
    if locked is not None:
        missing = [k for k in locked.key_inputs if k not in key]
        if missing:
            raise DomainError(f"Key file {Path(path).name} leaves {', '.join(missing[:4])} unassigned")
    return key


class CommandProvider:
    """Base class for subcommand providers."""

    def __init__(self, config: ExperimentConfig, console: Optional[Console] = None):
        self.config = config
        self.console = console or Console()
        self.output_dir = Path(config.output_dir)
        self.written = []

    @property
    def commands(self) -> dict:
        return {}

    def run(self) -> int:
        raise NotImplementedError

    def status(self, message: str, ok: bool = True) -> None:
        self.console.print(f"{'✅' if ok else '❌'} {message}")

    def fail(self, result: dict) -> int:
        self.status(result["error"], ok=False)
        return exit_code_for(result.get("error_type", "LockingError"))

    def record(self, path) -> None:
        self.written.append(Path(path))
        self.status(f"Wrote {path}")

    def load_oracle(self, locked: Netlist) -> Oracle:
        """Oracle from --key-file (activated locked netlist) or --oracle-bench."""
        if self.config.key_file:
            return Oracle(locked, load_key_file(self.config.key_file, locked))
        if self.config.oracle_bench:
            reference = load_bench(self.config.oracle_bench)
            if reference.key_inputs:
                raise ConfigError(f"Oracle bench {self.config.oracle_bench} still has key inputs")
            return Oracle(reference)
        raise ConfigError("This analysis needs an oracle: --key-file or --oracle-bench")
