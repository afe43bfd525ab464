"""
Analysis Module
Corruptibility measurement and census, signal probability skew (SPS) and
absolute difference of skew (ADS) analysis, SPS removal, CAS-Unlock probe,
bypass cost and key verification.
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from cnf_encoding import equivalence_formula
from errors import CapacityError, DomainError
from netlist import Netlist, Oracle, input_columns, simulate
from satcore import SolveStatus, make_solver
from truthsets import MAX_WIDTH, LockBlock, offset_corruptibility_table

logger = logging.getLogger(__name__)

EXHAUSTIVE_CENSUS_MAX_WIDTH = 16
EXACT_SPS_MAX_INPUTS = 20
VERIFY_EXHAUSTIVE_MAX_INPUTS = 20
DEFAULT_SAMPLE_COUNT = 10_000
DEFAULT_CENSUS_SEED = 2023
SWEEP_CHUNK = 1 << 16

BlockKey = Union[Tuple[int, int], int]


def _block_key(block: LockBlock, key: BlockKey) -> Tuple[int, int]:
    if isinstance(key, tuple):
        k_f, k_g = (int(k) for k in key)
    else:
        k_f, k_g = block.split_key(int(key))
    if not (0 <= k_f <= block.mask and 0 <= k_g <= block.mask):
        raise DomainError(f"Key halves must fit in {block.n} bits")
    return k_f, k_g


def _block_mismatches(block: LockBlock, key: BlockKey) -> np.ndarray:
    if block.n > MAX_WIDTH:
        raise CapacityError("Corruptibility sweep", block.n, MAX_WIDTH)
    k_f, k_g = _block_key(block, key)
    points = np.arange(1 << block.n, dtype=np.int64)
    return np.flatnonzero(block.output(points, k_f, k_g) != block.correct_output)


def _netlist_mismatch_chunks(net: Netlist, key: Mapping[str, int], oracle: Oracle):
    width = len(net.primary_inputs)
    if width > MAX_WIDTH:
        raise CapacityError("Corruptibility sweep", width, MAX_WIDTH)
    if len(oracle.primary_inputs) != width:
        raise DomainError(f"Oracle has {len(oracle.primary_inputs)} inputs, circuit has {width}")
    missing = [k for k in net.key_inputs if k not in key]
    if missing:
        raise DomainError(f"Key leaves {len(missing)} key inputs unassigned")
    for start in range(0, 1 << width, SWEEP_CHUNK):
        patterns = np.arange(start, min(start + SWEEP_CHUNK, 1 << width), dtype=np.int64)
        assignment = input_columns(net.primary_inputs, patterns)
        assignment.update({k: np.full(len(patterns), bool(int(key[k]) & 1)) for k in net.key_inputs})
        outputs = simulate(net, assignment)
        got = np.stack([outputs[w] for w in net.outputs], axis=1)
        wrong = (got != oracle.query_batch(patterns)).any(axis=1)
        yield patterns[wrong]


def corruptibility(target: Union[LockBlock, Netlist], key, oracle: Optional[Oracle] = None) -> int:
    """
    Number of input patterns whose output is wrong under ``key``.

    Args:
        target: Standalone block (key is (K_f, K_g) or the concatenated key)
            or locked netlist (key maps key-input names to bits)
        oracle: Required for netlists

    Returns:
        Count of corrupted input patterns
    """
    if isinstance(target, LockBlock):
        return int(len(_block_mismatches(target, key)))
    if oracle is None:
        raise DomainError("Measuring a netlist needs an oracle")
    return int(sum(len(chunk) for chunk in _netlist_mismatch_chunks(target, key, oracle)))


@dataclass
class CorruptibilityReport:
    """Histogram {corruptibility: key count} over a key space."""

    key_bits: int
    histogram: Dict[int, int]
    mode: str = "exhaustive"
    sample_count: Optional[int] = None
    seed: Optional[int] = None

    @property
    def total(self) -> int:
        return sum(self.histogram.values())

    @property
    def right_keys(self) -> int:
        return self.histogram.get(0, 0)

    @property
    def average(self) -> Fraction:
        """Mean corruptibility over wrong keys."""
        wrong = self.total - self.right_keys
        if not wrong:
            return Fraction(0)
        return Fraction(sum(e * c for e, c in self.histogram.items()), wrong)

    def to_dict(self) -> dict:
        census = {"mode": self.mode}
        if self.mode == "sampled":
            census.update(count=self.sample_count, seed=self.seed)
        return {
            "key_bits": self.key_bits,
            "histogram": {str(e): c for e, c in sorted(self.histogram.items(), reverse=True)},
            "average": str(self.average),
            "average_float": float(self.average),
            "right_keys": self.right_keys,
            "total": self.total,
            "census": census,
        }

    def to_frame(self) -> pd.DataFrame:
        rows = [{"corruptibility": e, "keys": c} for e, c in sorted(self.histogram.items(), reverse=True)]
        return pd.DataFrame(rows, columns=["corruptibility", "keys"])


def corruptibility_census(block: LockBlock, mode: str = "exhaustive",
                          sample_count: int = DEFAULT_SAMPLE_COUNT,
                          seed: int = DEFAULT_CENSUS_SEED) -> CorruptibilityReport:
    """
    Wrong-key histogram of a standalone block.

    A key (K_f, K_g) corrupts exactly c[K_f ^ K_g] inputs, so each offset
    stands for 2^n keys in the exhaustive census.
    """
    table = offset_corruptibility_table(block.f, block.g, block.block_type)
    if mode == "exhaustive":
        if block.n > EXHAUSTIVE_CENSUS_MAX_WIDTH:
            raise CapacityError("Exhaustive census", block.n, EXHAUSTIVE_CENSUS_MAX_WIDTH)
        values, counts = np.unique(table, return_counts=True)
        histogram = {int(e): int(c) << block.n for e, c in zip(values, counts)}
        return CorruptibilityReport(2 * block.n, histogram)
    if mode != "sampled":
        raise DomainError(f"Unknown census mode {mode!r}; expected 'exhaustive' or 'sampled'")
    if sample_count < 1:
        raise DomainError(f"Sample count must be positive, got {sample_count}")
    rng = np.random.default_rng(seed)
    k_f = rng.integers(0, 1 << block.n, size=sample_count, dtype=np.int64)
    k_g = rng.integers(0, 1 << block.n, size=sample_count, dtype=np.int64)
    histogram = Counter(table[k_f ^ k_g].tolist())
    return CorruptibilityReport(2 * block.n, dict(histogram), "sampled", sample_count, seed)


def netlist_census(locked: Netlist, oracle: Oracle, sample_count: int = 100,
                   seed: int = DEFAULT_CENSUS_SEED, threads: int = 1) -> CorruptibilityReport:
    """Sampled census for a block embedded in a host; every sampled key is swept over all inputs."""
    if not locked.key_inputs:
        raise DomainError("Census needs a netlist with key inputs")
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(sample_count, len(locked.key_inputs)))
    keys = [dict(zip(locked.key_inputs, row.tolist())) for row in bits]

    def measure(key):
        return corruptibility(locked, key, oracle)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(measure, keys))
    else:
        values = [measure(key) for key in keys]
    return CorruptibilityReport(len(locked.key_inputs), dict(Counter(values)), "sampled", sample_count, seed)


@dataclass(frozen=True)
class BypassCost:
    n_p: int
    patterns: Tuple[int, ...]
    truncated: bool


def bypass_cost(block: LockBlock, key: BlockKey, listing_cap: int = 32) -> BypassCost:
    """Input patterns a bypass circuit must patch for ``key`` (listing capped)."""
    wrong = _block_mismatches(block, key)
    listed = tuple(int(p) for p in wrong[:listing_cap])
    return BypassCost(int(len(wrong)), listed, len(wrong) > listing_cap)


def cas_unlock_probe(block: LockBlock) -> Dict[str, int]:
    """Corruptibility of the all-0 and all-1 keys."""
    return {
        "all0": corruptibility(block, (0, 0)),
        "all1": corruptibility(block, (block.mask, block.mask)),
    }


@dataclass
class SignalStats:
    """Per-wire SPS and per-gate ADS of one netlist."""

    sps: Dict[str, float]
    ads: Dict[str, float]
    mode: str = "propagated"

    def to_frame(self) -> pd.DataFrame:
        rows = [{"wire": w, "sps": s, "ads": self.ads.get(w)} for w, s in self.sps.items()]
        return pd.DataFrame(rows, columns=["wire", "sps", "ads"])


def _propagate_probability(kind: str, probs: Sequence[float]) -> float:
    if kind in ("AND", "NAND"):
        p = float(np.prod(probs))
    elif kind in ("OR", "NOR"):
        p = 1.0 - float(np.prod([1.0 - q for q in probs]))
    elif kind in ("XOR", "XNOR"):
        p = (1.0 - float(np.prod([1.0 - 2.0 * q for q in probs]))) / 2.0
    else:
        p = probs[0]
    return 1.0 - p if kind in ("NAND", "NOR", "XNOR", "NOT") else p


def sps_analyze(net: Netlist, mode: str = "propagated") -> SignalStats:
    """
    Signal probability skew Pr[w = 1] - 0.5 of every wire with all inputs
    independent and uniform, and ADS = max - min input skew for every gate
    with two or more inputs.

    Propagated mode applies the gate identities; exact mode enumerates all
    input combinations.
    """
    if mode == "propagated":
        probability = {w: 0.5 for w in net.inputs}
        for gate in net.topological_gates():
            probability[gate.output] = _propagate_probability(
                gate.kind, [probability[w] for w in gate.inputs])
    elif mode == "exact":
        width = len(net.inputs)
        if width > EXACT_SPS_MAX_INPUTS:
            raise CapacityError("Exact SPS", width, EXACT_SPS_MAX_INPUTS)
        patterns = np.arange(1 << width, dtype=np.int64)
        values = simulate(net, input_columns(net.inputs, patterns), all_wires=True)
        probability = {w: float(np.mean(values[w])) for w in net.wires}
    else:
        raise DomainError(f"Unknown SPS mode {mode!r}; expected 'propagated' or 'exact'")

    sps = {w: probability[w] - 0.5 for w in net.wires}
    ads = {}
    for gate in net.topological_gates():
        if len(gate.inputs) >= 2:
            skews = [sps[w] for w in gate.inputs]
            ads[gate.output] = max(skews) - min(skews)
    return SignalStats(sps, ads, mode)


@dataclass(frozen=True)
class RankedGate:
    name: str
    kind: str
    ads: float
    tfi_keys: int
    sps: float


def ads_ranking(stats: SignalStats, net: Netlist) -> List[RankedGate]:
    """Gates by ADS descending, then key inputs in the fan-in cone descending, then name."""
    ranked = [
        RankedGate(name, net.gates[name].kind, ads, len(net.fanin_keys(name)), stats.sps[name])
        for name, ads in stats.ads.items()
    ]
    return sorted(ranked, key=lambda g: (-g.ads, -g.tfi_keys, g.name))


@dataclass
class RemovalResult:
    gate: str
    ads: float
    constant: int
    corruptibility: int
    recovered: bool = field(init=False)

    def __post_init__(self):
        self.recovered = self.corruptibility == 0


def sps_removal(locked: Netlist, oracle: Oracle, stats: Optional[SignalStats] = None) -> RemovalResult:
    """
    Replace the top-ranked ADS gate with the constant its skew leans to and
    measure the key-independent remainder against the oracle.
    """
    stats = stats or sps_analyze(locked)
    ranking = ads_ranking(stats, locked)
    if not ranking:
        raise DomainError("Netlist has no multi-input gate to remove")
    top = ranking[0]
    constant = 0 if top.sps < 0 else 1
    stripped = locked.with_constant(top.name, constant)
    zero_key = {k: 0 for k in stripped.key_inputs}
    result = RemovalResult(top.name, top.ads, constant, corruptibility(stripped, zero_key, oracle))
    logger.info("Removed %s (ADS %.4f) as constant %d: corruptibility %d",
                top.name, top.ads, constant, result.corruptibility)
    return result


def verify_key(locked: Netlist, oracle: Oracle, key: Mapping[str, int], *,
               solver: str = "embedded", solver_cmd=None) -> bool:
    """
    Functional equivalence of the locked circuit under ``key`` with the
    oracle: an exhaustive sweep for narrow circuits, a SAT miter otherwise.
    """
    if len(locked.primary_inputs) <= VERIFY_EXHAUSTIVE_MAX_INPUTS:
        return corruptibility(locked, key, oracle) == 0
    formula = equivalence_formula(locked, key, oracle.net, oracle.key)
    engine = make_solver(solver, command=solver_cmd)
    engine.ensure_vars(formula.num_vars)
    engine.add_clauses(formula.clauses)
    result = engine.solve()
    if result.status is SolveStatus.UNKNOWN:
        raise DomainError("Equivalence check was inconclusive")
    return result.status is SolveStatus.UNSAT
