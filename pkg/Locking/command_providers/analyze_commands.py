"""
Analyze Command Provider
Census, constraint and wrong-key reports, SPS/ADS ranking, CAS-Unlock
probe, bypass cost and SPS removal for a block file or a locked bench.
"""

import logging

from rich import box
from rich.table import Table

from command_providers.command_provider import EXIT_OK, CommandProvider, read_json_document
from data_providers.attack_data_provider import AttackDataProvider
from data_providers.corruptibility_data_provider import CorruptibilityDataProvider
from data_providers.report_data_provider import ReportDataProvider
from data_providers.signal_data_provider import SignalDataProvider
from errors import ConfigError, LockingError
from netlist import load_bench, synthesize_block
from truthsets import LockBlock

logger = logging.getLogger(__name__)


def parse_block_key(text: str):
    """'K_f,K_g' with decimal, 0x or 0b literals."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"--bypass expects 'K_f,K_g', got {text!r}")
    try:
        return int(parts[0], 0), int(parts[1], 0)
    except ValueError as exc:
        raise ConfigError(f"--bypass expects integer key halves, got {text!r}") from exc


class AnalyzeCommandProvider(CommandProvider):
    """Command provider for analyses of a block or a locked netlist."""

    def __init__(self, config, console=None):
        super().__init__(config, console)
        self.block = None
        self.locked = None
        self.results = {}

    @property
    def commands(self) -> dict:
        return {
            "census": self.census,
            "constraints": self.constraints,
            "wk_array": self.wrong_key_array,
            "sps": self.signal_skew,
            "cas_probe": self.cas_probe,
            "bypass": self.bypass,
            "removal": self.removal,
        }

    def _load(self) -> None:
        c = self.config
        if c.block_file:
            self.block = LockBlock.from_dict(read_json_document(c.block_file, "Block file"))
        if c.locked_file:
            self.locked = load_bench(c.locked_file)

    def _require_block(self, what: str) -> LockBlock:
        if self.block is None:
            raise ConfigError(f"{what} needs --block")
        return self.block

    def _write(self, name: str, payload: dict, frame=None) -> dict:
        if "error" in payload:
            raise _ProviderFailure(payload)
        writer = ReportDataProvider(self.config.provenance())
        self.record(writer.write_report(self.output_dir, name, payload, frame, self.config.output_format))
        self.results[name] = payload
        return payload

    def census(self) -> dict:
        c = self.config
        if self.block is not None:
            provider = CorruptibilityDataProvider(self.block, c.provenance())
            seed = c.seed if c.seed is not None else 2023
            result = provider.get_census(c.census_mode, c.sample_count, seed)
            if "error" in result:
                raise _ProviderFailure(result)
            self._print_histogram(result)
            return self._write("census", result, provider.get_census_frame())
        oracle = self.load_oracle(self.locked)
        provider = AttackDataProvider(self.locked, oracle, provenance=c.provenance())
        seed = c.seed if c.seed is not None else 2023
        result = provider.get_netlist_census(c.sample_count, seed, c.threads)
        if "error" in result:
            raise _ProviderFailure(result)
        self._print_histogram(result)
        return self._write("census", result)

    def _print_histogram(self, result: dict) -> None:
        table = Table(title=f"📊 Corruptibility census ({result['census']['mode']})",
                      box=box.ROUNDED, border_style="green")
        table.add_column("e", justify="right")
        table.add_column("keys", justify="right")
        for e, count in result["histogram"].items():
            table.add_row(e, f"{count:,}")
        self.console.print(table)
        self.console.print(f"Average over wrong keys: {result['average']}")

    def constraints(self) -> dict:
        provider = CorruptibilityDataProvider(self._require_block("--constraints"))
        return self._write("constraints", provider.get_constraint_report())

    def wrong_key_array(self) -> dict:
        provider = CorruptibilityDataProvider(self._require_block("--wk-array"))
        frame = provider.get_wrong_key_frame()
        writer = ReportDataProvider(self.config.provenance())
        self.record(writer.write_report(self.output_dir, "wrong_key_array", {}, frame, "csv"))
        return {"rows": len(frame)}

    def signal_skew(self) -> dict:
        net = self.locked if self.locked is not None else synthesize_block(self.block)
        provider = SignalDataProvider(net, self.config.provenance())
        result = provider.analyze("exact" if self.config.sps_exact else "propagated")
        if "error" in result:
            raise _ProviderFailure(result)
        table = Table(title=f"🔎 ADS ranking ({result['mode']})", box=box.ROUNDED, border_style="magenta")
        for column in ("rank", "gate", "kind", "ads", "tfi_keys"):
            table.add_column(column, justify="right")
        for row in result["ranking"]:
            table.add_row(str(row["rank"]), row["gate"], row["kind"], f"{row['ads']:.6f}", str(row["tfi_keys"]))
        self.console.print(table)
        self._signal_provider = provider
        return self._write("sps", result, provider.get_ranking_frame())

    def cas_probe(self) -> dict:
        provider = CorruptibilityDataProvider(self._require_block("--cas-probe"))
        result = provider.get_cas_probe()
        if "error" not in result:
            self.status(f"All-0 key corruptibility {result['all0']}, all-1 key corruptibility {result['all1']}")
        return self._write("cas_probe", result)

    def bypass(self) -> dict:
        provider = CorruptibilityDataProvider(self._require_block("--bypass"))
        k_f, k_g = parse_block_key(self.config.bypass_key)
        result = provider.get_bypass_cost(k_f, k_g)
        if "error" not in result:
            self.status(f"Bypass must patch N_p = {result['n_p']} input patterns")
        return self._write("bypass", result)

    def removal(self) -> dict:
        if self.locked is None:
            raise ConfigError("--removal needs --locked")
        provider = getattr(self, "_signal_provider", None) or SignalDataProvider(self.locked)
        result = provider.run_removal(self.load_oracle(self.locked))
        if "error" not in result:
            self.status(f"Removed {result['gate']} as constant {result['constant']}: "
                        f"corruptibility {result['corruptibility']}", ok=result["recovered"])
        return self._write("removal", result)

    def run(self) -> int:
        c = self.config
        selected = [
            ("census", c.census), ("constraints", c.constraints or c.distinct),
            ("wk_array", c.wk_array), ("sps", c.sps), ("cas_probe", c.cas_probe),
            ("bypass", c.bypass_key is not None), ("removal", c.removal),
        ]
        try:
            self._load()
            names = [name for name, wanted in selected if wanted]
            if not names:
                raise ConfigError("Nothing to analyze: pass --census, --sps, --cas-probe, --bypass, "
                                  "--constraints, --distinct, --wk-array or --removal")
            for name in names:
                self.commands[name]()
        except _ProviderFailure as failure:
            return self.fail(failure.result)
        except LockingError as e:
            return self.fail(ReportDataProvider._error("Analysis", e))
        except OSError as e:
            return self.fail(ReportDataProvider._error("Analysis I/O", e))
        return EXIT_OK


class _ProviderFailure(Exception):
    def __init__(self, result: dict):
        super().__init__(result["error"])
        self.result = result
