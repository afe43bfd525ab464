"""
Host Data Module
Bundled host netlists used as locking targets.
"""

from pathlib import Path

from netlist import Netlist, constant_host, load_bench

DATA_DIR = Path(__file__).parent
SAMPLE_HOST_PATH = DATA_DIR / "c17.bench"
CONSTANT_HOSTS = ("const0", "const1")

host_catalog = {
    "c17": {"file": "c17.bench", "inputs": 5, "outputs": 2, "gates": 6,
            "description": "ISCAS-85 c17, six NAND gates"},
}


def load_sample_host() -> Netlist:
    """The bundled c17 host."""
    return load_bench(SAMPLE_HOST_PATH)


def load_host(name_or_path: str, n_inputs: int = 8) -> Netlist:
    """
    Resolve a host by catalog name, ``const0``/``const1`` or bench path.
    Constant hosts get ``n_inputs`` primary inputs.
    """
    if name_or_path in host_catalog:
        return load_bench(DATA_DIR / host_catalog[name_or_path]["file"])
    if name_or_path in CONSTANT_HOSTS:
        return constant_host(n_inputs, int(name_or_path[-1]))
    return load_bench(name_or_path)
