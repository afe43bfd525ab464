"""
Netlist Module
Gate-level IR for locked circuits on a networkx DAG: bench-format I/O,
batch simulation, block synthesis, host integration and the oracle.
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from errors import BenchParseError, DomainError, NetlistError
from truthsets import BlockType, LockBlock, SopCover

logger = logging.getLogger(__name__)

GATE_KINDS = ("AND", "NAND", "OR", "NOR", "XOR", "XNOR", "NOT", "BUF")
KIND_ALIASES = {"BUFF": "BUF", "INV": "NOT"}
KEY_PREFIX = "keyinput"

_INPUT_RE = re.compile(r"^INPUT\s*\(\s*([^\s()]+)\s*\)$", re.IGNORECASE)
_OUTPUT_RE = re.compile(r"^OUTPUT\s*\(\s*([^\s()]+)\s*\)$", re.IGNORECASE)
_GATE_RE = re.compile(r"^([^\s=]+)\s*=\s*([A-Za-z]+)\s*\((.*)\)$")


@dataclass(frozen=True)
class Gate:
    kind: str
    inputs: Tuple[str, ...]
    output: str

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise NetlistError(f"Unknown gate kind {self.kind!r} driving {self.output}")
        arity = len(self.inputs)
        if self.kind in ("NOT", "BUF") and arity != 1:
            raise NetlistError(f"{self.kind} gate {self.output} needs exactly one input, got {arity}")
        if arity == 0:
            raise NetlistError(f"Gate {self.output} has no inputs")


class Netlist:
    """
    Combinational netlist. Inputs whose names start with ``keyinput`` are key
    inputs; all others are primary inputs. Gate names are their output wires.
    """

    def __init__(self, inputs: Sequence[str], outputs: Sequence[str], gates: Iterable[Gate],
                 name: str = "circuit", key_prefix: str = KEY_PREFIX):
        self.name = name
        self.key_prefix = key_prefix
        self.inputs: List[str] = list(inputs)
        self.outputs: List[str] = list(outputs)
        self.gates: Dict[str, Gate] = {}
        for gate in gates:
            if gate.output in self.gates or gate.output in self.inputs:
                raise NetlistError(f"Wire {gate.output} is driven more than once")
            self.gates[gate.output] = gate
        if len(set(self.inputs)) != len(self.inputs):
            raise NetlistError("Duplicate INPUT declaration")
        self.primary_inputs = [w for w in self.inputs if not w.startswith(key_prefix)]
        self.key_inputs = [w for w in self.inputs if w.startswith(key_prefix)]
        self.graph = self._build_graph()
        self._order = [w for w in nx.topological_sort(self.graph) if w in self.gates]

    def _build_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.inputs)
        graph.add_nodes_from(self.gates)
        for gate in self.gates.values():
            for wire in gate.inputs:
                if wire not in graph:
                    raise NetlistError(f"Wire {wire} used by {gate.output} is never driven")
                graph.add_edge(wire, gate.output)
        for wire in self.outputs:
            if wire not in graph:
                raise NetlistError(f"Output {wire} is never driven")
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise NetlistError(f"Combinational cycle through {cycle[0][0]}")
        return graph

    @property
    def wires(self) -> List[str]:
        return self.inputs + self._order

    def topological_gates(self) -> List[Gate]:
        return [self.gates[w] for w in self._order]

    def fanin_keys(self, wire: str) -> List[str]:
        """Key inputs in the transitive fan-in of a wire."""
        ancestors = nx.ancestors(self.graph, wire)
        return [k for k in self.key_inputs if k in ancestors]

    def with_constant(self, wire: str, value: int) -> "Netlist":
        """Copy where the gate driving ``wire`` is replaced by a constant."""
        if wire not in self.gates:
            raise NetlistError(f"{wire} is not driven by a gate")
        anchor = self.inputs[0]
        kind = "XNOR" if value else "XOR"
        gates = [Gate(kind, (anchor, anchor), wire) if g.output == wire else g
                 for g in self.gates.values()]
        return Netlist(self.inputs, self.outputs, gates, self.name, self.key_prefix)

    def __repr__(self) -> str:
        return (f"Netlist({self.name!r}, {len(self.primary_inputs)} PI, {len(self.key_inputs)} keys, "
                f"{len(self.outputs)} PO, {len(self.gates)} gates)")


def parse_bench(text: str, name: str = "circuit", key_prefix: str = KEY_PREFIX) -> Netlist:
    """
    Parse ISCAS bench text.

    Raises:
        BenchParseError: with the 1-based line number of the problem
    """
    inputs, outputs, gates = [], [], []
    lines: Dict[str, int] = {}
    output_lines: Dict[str, int] = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _INPUT_RE.match(line)
        if match:
            inputs.append(match.group(1))
            lines.setdefault(match.group(1), line_number)
            continue
        match = _OUTPUT_RE.match(line)
        if match:
            outputs.append(match.group(1))
            output_lines.setdefault(match.group(1), line_number)
            continue
        match = _GATE_RE.match(line)
        if not match:
            raise BenchParseError(f"cannot parse {line!r}", line_number)
        output, kind, args = match.group(1), match.group(2).upper(), match.group(3)
        kind = KIND_ALIASES.get(kind, kind)
        if kind not in GATE_KINDS:
            raise BenchParseError(f"unknown gate kind {match.group(2)!r}", line_number)
        operands = tuple(a.strip() for a in args.split(",") if a.strip())
        try:
            gates.append(Gate(kind, operands, output))
        except NetlistError as exc:
            raise BenchParseError(str(exc), line_number) from exc
        lines.setdefault(output, line_number)
    try:
        return Netlist(inputs, outputs, gates, name, key_prefix)
    except NetlistError as exc:
        known = {**output_lines, **lines}
        wire = _wire_in_message(str(exc), known)
        raise BenchParseError(str(exc), known.get(wire, 0)) from exc


def _wire_in_message(message: str, lines: Mapping[str, int]) -> Optional[str]:
    for token in re.findall(r"[^\s]+", message):
        if token in lines:
            return token
    return None


def emit_bench(net: Netlist) -> str:
    """Bench text: inputs, outputs, then gates in declaration order."""
    out = [f"INPUT({w})" for w in net.inputs]
    out += [f"OUTPUT({w})" for w in net.outputs]
    out += [f"{g.output} = {g.kind}({', '.join(g.inputs)})" for g in net.gates.values()]
    return "\n".join(out) + "\n"


def _eval_gate(kind: str, values: List[np.ndarray]) -> np.ndarray:
    if kind == "AND":
        return np.logical_and.reduce(values)
    if kind == "NAND":
        return ~np.logical_and.reduce(values)
    if kind == "OR":
        return np.logical_or.reduce(values)
    if kind == "NOR":
        return ~np.logical_or.reduce(values)
    if kind == "XOR":
        return np.logical_xor.reduce(values)
    if kind == "XNOR":
        return ~np.logical_xor.reduce(values)
    if kind == "NOT":
        return ~values[0]
    return values[0]


def simulate(net: Netlist, assignment: Mapping[str, object], all_wires: bool = False) -> Dict[str, object]:
    """
    Evaluate the netlist. Values may be bits or equally shaped numpy arrays;
    scalars come back as ints, arrays as bool arrays.

    Raises:
        DomainError: if an input is unassigned
    """
    missing = [w for w in net.inputs if w not in assignment]
    if missing:
        raise DomainError(f"Unassigned inputs: {', '.join(missing[:8])}")
    scalar = all(np.ndim(assignment[w]) == 0 for w in net.inputs)
    values = {w: np.asarray(assignment[w], dtype=bool) for w in net.inputs}
    for gate in net.topological_gates():
        values[gate.output] = _eval_gate(gate.kind, [values[w] for w in gate.inputs])
    wires = net.wires if all_wires else net.outputs
    if scalar:
        return {w: int(values[w]) for w in wires}
    return {w: values[w] for w in wires}


def input_columns(wires: Sequence[str], patterns: np.ndarray) -> Dict[str, np.ndarray]:
    """Split integer patterns into per-wire bit columns (bit i -> wires[i])."""
    patterns = np.asarray(patterns, dtype=np.int64)
    return {w: ((patterns >> i) & 1).astype(bool) for i, w in enumerate(wires)}


def key_assignment(n: int, k_f: int, k_g: int, prefix: str = KEY_PREFIX) -> Dict[str, int]:
    """keyinput0..n-1 carry K_f bits, keyinput n..2n-1 carry K_g bits."""
    assignment = {f"{prefix}{i}": (int(k_f) >> i) & 1 for i in range(n)}
    assignment.update({f"{prefix}{n + i}": (int(k_g) >> i) & 1 for i in range(n)})
    return assignment


def split_key_assignment(n: int, assignment: Mapping[str, int], prefix: str = KEY_PREFIX) -> Tuple[int, int]:
    k_f = sum((int(assignment[f"{prefix}{i}"]) & 1) << i for i in range(n))
    k_g = sum((int(assignment[f"{prefix}{n + i}"]) & 1) << i for i in range(n))
    return k_f, k_g


class _TreeBuilder:
    """Emits balanced binary gate trees with unique wire names."""

    def __init__(self, prefix: str):
        self.prefix = prefix
        self.gates: List[Gate] = []
        self._counter = 0

    def fresh(self, stem: str) -> str:
        self._counter += 1
        return f"{self.prefix}{stem}{self._counter}"

    def add(self, kind: str, inputs: Sequence[str], output: Optional[str] = None, stem: str = "n") -> str:
        output = output or self.fresh(stem)
        self.gates.append(Gate(kind, tuple(inputs), output))
        return output

    def tree(self, kind: str, wires: Sequence[str], root_kind: str, output: Optional[str] = None) -> str:
        """Balanced tree of 2-input ``kind`` gates whose root gate is ``root_kind``."""
        if len(wires) == 1:
            if root_kind == kind:
                return wires[0] if output is None else self.add("BUF", wires, output)
            return self.add("NOT", wires, output)
        half = (len(wires) + 1) // 2
        left = self.tree(kind, wires[:half], kind)
        right = self.tree(kind, wires[half:], kind)
        return self.add(root_kind, (left, right), output)

    def constant(self, anchor: str, value: bool, output: Optional[str] = None) -> str:
        return self.add("XNOR" if value else "XOR", (anchor, anchor), output)


def _synthesize_cover(builder: _TreeBuilder, cover: SopCover, literals: Sequence[str],
                      output: str) -> str:
    negated: Dict[int, str] = {}

    def literal(bit: int, positive: bool) -> str:
        if positive:
            return literals[bit]
        if bit not in negated:
            negated[bit] = builder.add("NOT", (literals[bit],), stem="inv")
        return negated[bit]

    if not cover.cubes:
        return builder.constant(literals[0], cover.inverted, output)
    if any(len(cube) == 0 for cube in cover.cubes):
        return builder.constant(literals[0], not cover.inverted, output)
    if len(cover.cubes) == 1:
        wires = [literal(b, p) for b, p in cover.cubes[0]]
        return builder.tree("AND", wires, "NAND" if cover.inverted else "AND", output)
    terms = [builder.tree("AND", [literal(b, p) for b, p in cube], "AND") for cube in cover.cubes]
    return builder.tree("OR", terms, "NOR" if cover.inverted else "OR", output)


def synthesize_block(block: LockBlock, key_prefix: str = KEY_PREFIX, prefix: str = "lock_",
                     input_prefix: str = "lockin") -> Netlist:
    """
    Gate-level block: XOR key layers L = X ^ K, f and g as two-level SOP
    trees, and the final G gate (AND for type-0, OR for type-1) named
    ``<prefix>G``.
    """
    n = block.n
    builder = _TreeBuilder(prefix)
    x = [f"{input_prefix}{i}" for i in range(n)]
    keys = [f"{key_prefix}{i}" for i in range(2 * n)]
    lf = [builder.add("XOR", (x[i], keys[i]), f"{prefix}lf{i}") for i in range(n)]
    lg = [builder.add("XOR", (x[i], keys[n + i]), f"{prefix}lg{i}") for i in range(n)]

    f_builder = _TreeBuilder(prefix + "f_")
    g_builder = _TreeBuilder(prefix + "g_")
    f_out = _synthesize_cover(f_builder, block.f.sop_cover(), lf, f"{prefix}f")
    g_out = _synthesize_cover(g_builder, block.g.sop_cover(), lg, f"{prefix}g")
    final_kind = "AND" if block.block_type == BlockType.TYPE0 else "OR"
    gates = builder.gates + f_builder.gates + g_builder.gates
    gates.append(Gate(final_kind, (f_out, g_out), f"{prefix}G"))
    return Netlist(x + keys, [f"{prefix}G"], gates, name=f"block_n{n}", key_prefix=key_prefix)


def integrate(host: Netlist, block_net: Netlist, target_output: Optional[str] = None) -> Netlist:
    """
    Lock one host output: block inputs map by position onto host primary
    inputs (extras become new primary inputs) and the target output becomes
    host_output XOR G.
    """
    target = target_output if target_output is not None else host.outputs[0]
    if target not in host.outputs:
        raise NetlistError(f"Unknown output {target!r}; host outputs are {host.outputs}")
    if len(block_net.outputs) != 1:
        raise NetlistError("Block netlist must have exactly one output")

    rename = {}
    extra_inputs = []
    for i, wire in enumerate(block_net.primary_inputs):
        if i < len(host.primary_inputs):
            rename[wire] = host.primary_inputs[i]
        else:
            rename[wire] = wire
            extra_inputs.append(wire)
    clashes = (set(block_net.gates) | set(extra_inputs) | set(block_net.key_inputs)) & set(host.wires)
    if clashes:
        raise NetlistError(f"Block wires clash with host wires: {sorted(clashes)[:5]}")

    original = f"{target}_orig"
    if original in host.wires:
        raise NetlistError(f"Host already uses wire {original}")
    gates = []
    if target in host.gates:
        for gate in host.topological_gates():
            ins = tuple(original if w == target else w for w in gate.inputs)
            out = original if gate.output == target else gate.output
            gates.append(Gate(gate.kind, ins, out))
        locked_name = target
        outputs = list(host.outputs)
    else:
        # the target output is a primary input wire
        gates = list(host.topological_gates())
        gates.append(Gate("BUF", (target,), original))
        locked_name = f"{target}_locked"
        outputs = [locked_name if w == target else w for w in host.outputs]
    for gate in block_net.topological_gates():
        gates.append(Gate(gate.kind, tuple(rename.get(w, w) for w in gate.inputs), gate.output))
    gates.append(Gate("XOR", (original, block_net.outputs[0]), locked_name))

    inputs = host.primary_inputs + extra_inputs + host.key_inputs + block_net.key_inputs
    locked = Netlist(inputs, outputs, gates, name=f"{host.name}_locked", key_prefix=host.key_prefix)
    logger.info("Locked %s output %s: %d gates, %d key inputs",
                host.name, target, len(locked.gates), len(locked.key_inputs))
    return locked


def constant_host(n_inputs: int, value: int = 0, name: str = "const_host") -> Netlist:
    """Host whose single output is a constant."""
    inputs = [f"x{i}" for i in range(n_inputs)]
    kind = "XNOR" if value else "XOR"
    return Netlist(inputs, ["y"], [Gate(kind, (inputs[0], inputs[0]), "y")], name=name)


class Oracle:
    """
    Activated circuit: a netlist with every key input fixed (or none).
    Queries take integer patterns, bit i driving primary_inputs[i].
    """

    def __init__(self, net: Netlist, key: Optional[Mapping[str, int]] = None):
        key = dict(key or {})
        missing = [k for k in net.key_inputs if k not in key]
        if missing:
            raise DomainError(f"Oracle key leaves {len(missing)} key inputs unassigned")
        self.net = net
        self.key = {k: int(key[k]) & 1 for k in net.key_inputs}
        self.primary_inputs = list(net.primary_inputs)
        self.outputs = list(net.outputs)

    @property
    def input_width(self) -> int:
        return len(self.primary_inputs)

    def query(self, pattern: int) -> Tuple[int, ...]:
        assignment = {w: (int(pattern) >> i) & 1 for i, w in enumerate(self.primary_inputs)}
        assignment.update(self.key)
        result = simulate(self.net, assignment)
        return tuple(result[w] for w in self.outputs)

    def query_batch(self, patterns: np.ndarray) -> np.ndarray:
        """Bool array of shape (len(patterns), outputs)."""
        patterns = np.asarray(patterns, dtype=np.int64)
        assignment = input_columns(self.primary_inputs, patterns)
        assignment.update({k: np.full(len(patterns), bool(v)) for k, v in self.key.items()})
        result = simulate(self.net, assignment)
        return np.stack([result[w] for w in self.outputs], axis=1)


def load_bench(path, key_prefix: str = KEY_PREFIX) -> Netlist:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return parse_bench(text, name=Path(path).stem, key_prefix=key_prefix)
