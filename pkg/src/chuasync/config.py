"""JSON scenario files: parsing and validation.

Layout::

    {
      "params":   {"alpha": .., "beta": .., "gamma": .., "a": .., "b": ..},
      "topology": {"n": 3, "edges": [[0, 1], [1, 2]], "directed": false}
                | {"matrix": [[0, 1], [1, 0]]}            (nested or flat row-major)
                | {"generator": "complete", "n": 20}      (complete|empty|path|ring|star|random)
      "coupling": {"name": "linear_arctan", "c": 3, "k1": 3, "k2": 4},   k1/k2 optional overrides
      "pivot":    0,                                       optional
      "sim":      {"dt": 0.001, "t_end": 20, "seed": 0, "stride": 10, "identical": false, "spread": 1.0},
      "tolerances": {"margin": 1e-9, "sector": 1e-12, "pair_bound": 1e-9},
      "verify":   {"range": 1000, "samples": 100000, "pairs": 100000},
      "threshold": {"k_max": 100, "resolution": 1e-4, "scan": true},
      "scan":     {"parameter": "k", "start": 15, "stop": 25, "step": 0.5}   or "values": [...]
    }
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .coupling import SectorCoupling, from_spec
from .errors import ChuaSyncError, ConfigParseError, ValidationError
from .model import ChuaParams
from .topology import Topology

KNOWN_SECTIONS = {"name", "description", "params", "topology", "coupling", "pivot", "sim",
                  "tolerances", "verify", "threshold", "scan"}


@dataclass
class SimConfig:
    dt: float = 1e-3
    t_end: float = 10.0
    seed: int = 0
    stride: int = 10
    identical: bool = False
    spread: float = 1.0


@dataclass
class Scenario:
    params: ChuaParams
    topology: Topology
    coupling: SectorCoupling
    coupling_spec: dict
    pivot: Optional[int] = None
    sim: Optional[SimConfig] = None
    tolerances: dict = field(default_factory=lambda: {"margin": 1e-9, "sector": 1e-12, "pair_bound": 1e-9})
    verify: dict = field(default_factory=lambda: {"range": 1e3, "samples": 100_000, "pairs": 100_000})
    threshold: dict = field(default_factory=lambda: {"k_max": 100.0, "resolution": 1e-4, "scan": None})
    scan: Optional[dict] = None
    name: str = ""


def bundled_scenarios():
    root = resources.files("chuasync") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _read(source):
    path = Path(source)
    if path.is_file():
        return path.read_text(), path.stem
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    if stem in bundled_scenarios() and path.parent == Path("."):
        return (resources.files("chuasync") / "scenarios" / f"{stem}.json").read_text(), stem
    raise ConfigParseError(f"config {source!r} not found (bundled: {', '.join(bundled_scenarios())})")


def parse_topology(d) -> Topology:
    if not isinstance(d, dict):
        raise ConfigParseError("'topology' must be an object")
    if "matrix" in d:
        mat = np.asarray(d["matrix"])
        if mat.ndim == 1:
            n = int(d.get("n", round(math.sqrt(mat.size))))
            if n * n != mat.size:
                raise ConfigParseError(f"flat matrix of length {mat.size} is not n*n")
            mat = mat.reshape(n, n)
        return Topology(mat)
    if "n" not in d:
        raise ConfigParseError("topology needs 'n' unless a 'matrix' is given")
    n = int(d["n"])
    if n < 1:
        raise ValidationError(f"node count must be >= 1, got {n}")
    if "edges" in d:
        return Topology.from_edges(n, d["edges"], directed=bool(d.get("directed", False)))
    gen = d.get("generator")
    makers = {"complete": Topology.complete, "empty": Topology.empty, "path": Topology.path,
              "ring": Topology.ring}
    if gen in makers:
        return makers[gen](n)
    if gen == "star":
        return Topology.star(n, int(d.get("center", 0)))
    if gen == "random":
        return Topology.random(n, float(d["density"]), int(d.get("seed", 0)))
    raise ConfigParseError("topology needs 'edges', 'matrix' or a known 'generator'")


def parse_scenario(doc: dict, name="") -> Scenario:
    if not isinstance(doc, dict):
        raise ConfigParseError("config must be a JSON object")
    unknown = set(doc) - KNOWN_SECTIONS
    if unknown:
        raise ConfigParseError(f"unknown config sections: {sorted(unknown)}")
    for key in ("params", "topology", "coupling"):
        if key not in doc:
            raise ConfigParseError(f"missing section {key!r}")
    params = ChuaParams.from_dict(doc["params"])
    topo = parse_topology(doc["topology"])
    coupling = from_spec(doc["coupling"])
    pivot = doc.get("pivot")
    if pivot is not None:
        pivot = int(pivot)
        if not 0 <= pivot < topo.n:
            raise ValidationError(f"pivot {pivot} out of range for n={topo.n}")
    sc = Scenario(params, topo, coupling, dict(doc["coupling"]), pivot, name=doc.get("name", name))
    if "sim" in doc:
        try:
            sc.sim = SimConfig(**doc["sim"])
        except TypeError as exc:
            raise ConfigParseError(f"bad 'sim' section: {exc}") from None
    for key in ("tolerances", "verify", "threshold"):
        extra = doc.get(key, {})
        bad = set(extra) - set(getattr(sc, key))
        if bad:
            raise ConfigParseError(f"unknown keys in {key!r}: {sorted(bad)}")
        getattr(sc, key).update(extra)
    if "scan" in doc:
        scan = dict(doc["scan"])
        if "parameter" not in scan or not ("values" in scan or {"start", "stop", "step"} <= set(scan)):
            raise ConfigParseError("'scan' needs 'parameter' and either 'values' or start/stop/step")
        sc.scan = scan
    return sc


def load_scenario(source) -> Scenario:
    text, stem = _read(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"invalid JSON in {source}: {exc}") from None
    try:
        return parse_scenario(doc, stem)
    except ChuaSyncError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigParseError(f"bad config {source}: {exc}") from None
