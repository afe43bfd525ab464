"""
Gen Command Provider
Builds a locking block, writes its files and prints the predicted
corruptibility table; optionally locks a host netlist.
"""

import logging

from rich import box
from rich.table import Table

from block_factory import initialize_block_factory
from command_providers.command_provider import EXIT_OK, CommandProvider
from data.host_data import load_host
from data_providers.corruptibility_data_provider import CorruptibilityDataProvider
from data_providers.report_data_provider import ReportDataProvider
from errors import LockingError
from fixture_setup import lock_block
from netlist import emit_bench, synthesize_block

logger = logging.getLogger(__name__)


class GenCommandProvider(CommandProvider):
    """Command provider for block generation."""

    def __init__(self, config, console=None):
        super().__init__(config, console)
        self.factory = initialize_block_factory(config.block_type)
        self.reports = ReportDataProvider(config.provenance())

    @property
    def commands(self) -> dict:
        return {
            "build": self.build_block,
            "predict": self.print_prediction,
            "lock": self.lock_host,
        }

    def build_block(self):
        c = self.config
        labels = {
            "f_column": c.f_column if c.f_column is not None else 0,
            "common_row": c.common_row,
            "q": c.q,
            "included_columns": c.included_columns,
            "dividing_column": c.dividing_column if c.dividing_column is not None else 0,
            "cell_row": c.cell_row if c.cell_row is not None else 0,
            "single_cell_in": c.single_cell_in,
            "p": c.p,
        }
        return self.factory.create_block(c.kind, c.n, t=c.t, block_type=c.block_type, **labels)

    def print_prediction(self) -> dict:
        c = self.config
        if c.kind not in ("comp", "noncomp"):
            return {}
        prediction = CorruptibilityDataProvider.get_prediction(c.kind, c.n, c.t)
        if "error" in prediction:
            return prediction
        table = Table(title=f"📊 Predicted corruptibility ({c.kind}, n={c.n}, t={c.t})",
                      box=box.ROUNDED, border_style="cyan")
        table.add_column("e", justify="right")
        table.add_column("keys", justify="right")
        for e, count in prediction["histogram"].items():
            table.add_row(e, f"{count:,}")
        table.add_row("0 (right)", f"{prediction['right_keys']:,}")
        self.console.print(table)
        self.console.print(f"Average over wrong keys: {prediction['average']} "
                           f"(closed form {prediction['closed_form_average']})")
        return prediction

    def lock_host(self, block, family) -> None:
        c = self.config
        host = load_host(c.host, n_inputs=block.n)
        fixture = lock_block(block, family, host, c.target_output)
        locked = fixture.locked
        self.record(self.reports.write_text(self.output_dir, "locked.bench", emit_bench(locked)))
        self.record(self.reports.write_report(
            self.output_dir, "key",
            {"n": block.n, "K_f": 0, "K_g": min(family.offsets), "assignment": fixture.key}))
        self.status(f"Locked {host.name}: {len(locked.gates)} gates, {len(locked.key_inputs)} key inputs")

    def run(self) -> int:
        try:
            block, family = self.build_block()
            self.record(self.reports.write_report(self.output_dir, "block", block.to_dict()))
            block_bench = emit_bench(synthesize_block(block))
            self.record(self.reports.write_text(self.output_dir, "block.bench", block_bench))
            self.record(self.reports.write_report(self.output_dir, "right_keys", family.to_dict()))
            prediction = self.print_prediction()
            if "error" in prediction:
                return self.fail(prediction)
            if prediction:
                self.record(self.reports.write_report(self.output_dir, "prediction", prediction))
            self.status(f"Right keys: {family.describe()}")
            if self.config.host:
                self.lock_host(block, family)
        except LockingError as e:
            return self.fail(ReportDataProvider._error("Block generation", e))
        except OSError as e:
            return self.fail(ReportDataProvider._error("Writing block files", e))
        return EXIT_OK
