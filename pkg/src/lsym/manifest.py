"""Run manifests: plain ``key = value`` text with one ``[party NAME]`` section per party.

    program = program.lsym
    mode = ds-abstract
    seed = 7
    fuel = 100000
    schedule = random
    pad = 16

    [party A]
    inputs = 10 3
    output = a.out

``pad`` appends that many pseudo-random contributions to every party's queue after
its listed inputs, drawn from ``pad_seed``; programs that use synchronized
randomness read them.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .st_eval import InputOracle

MODES = ("st", "ds-abstract", "ds-concrete")
TOP_KEYS = {"program", "mode", "seed", "fuel", "schedule", "pad", "pad_seed", "backend_seed"}
PARTY_KEYS = {"inputs", "output"}


class ManifestError(Exception):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass
class PartySpec:
    name: str
    inputs: tuple = ()
    output: Optional[str] = None


@dataclass
class Manifest:
    program: str
    parties: dict = field(default_factory=dict)
    seed: int = 0
    fuel: int = 100_000
    mode: str = "ds-abstract"
    schedule: str = "rr"
    pad: int = 0
    pad_seed: int = 0
    backend_seed: int = 0
    base_dir: Path = field(default_factory=Path)

    def program_path(self) -> Path:
        return (self.base_dir / self.program).resolve()

    def output_path(self, party: str) -> Optional[Path]:
        out = self.parties[party].output if party in self.parties else None
        return None if out is None else self.base_dir / out

    def oracle(self) -> InputOracle:
        queues = {}
        for name, spec in self.parties.items():
            rng = random.Random(f"{self.pad_seed}:{name}")
            queues[name] = tuple(spec.inputs) + tuple(rng.randrange(1 << 16)
                                                      for _ in range(self.pad))
        return InputOracle(queues)

    def check_principals(self, principals) -> None:
        errors = [f"party {a} is not a principal of the program"
                  for a in self.parties if a not in principals]
        if errors:
            raise ManifestError(errors)


def _int(value: str, key: str, errors: list, lo: Optional[int] = None) -> int:
    try:
        n = int(value, 0)
    except ValueError:
        errors.append(f"{key}: expected an integer, found {value!r}")
        return 0
    if lo is not None and n < lo:
        errors.append(f"{key}: must be at least {lo}")
    return n


def parse_manifest(text: str, base_dir: Path = Path(".")) -> Manifest:
    errors: list[str] = []
    top: dict = {}
    parties: dict = {}
    section: Optional[PartySpec] = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            head = line.strip("[]").split()
            if len(head) != 2 or head[0] != "party" or not line.endswith("]"):
                errors.append(f"line {n}: expected [party NAME]")
                section = None
                continue
            if head[1] in parties:
                errors.append(f"line {n}: duplicate party {head[1]}")
            section = parties.setdefault(head[1], PartySpec(head[1]))
            continue
        if "=" not in line:
            errors.append(f"line {n}: expected key = value")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if section is None:
            if key not in TOP_KEYS:
                errors.append(f"line {n}: unknown key {key!r}")
            top[key] = value
        elif key == "inputs":
            section.inputs = tuple(_int(v, f"line {n}: inputs", errors) for v in value.split())
        elif key == "output":
            section.output = value
        else:
            errors.append(f"line {n}: unknown party key {key!r}")
    m = Manifest(program=top.get("program", ""), parties=parties, base_dir=base_dir)
    if not m.program:
        errors.append("missing key: program")
    if "seed" in top:
        m.seed = _int(top["seed"], "seed", errors)
    if "fuel" in top:
        m.fuel = _int(top["fuel"], "fuel", errors, lo=1)
    if "pad" in top:
        m.pad = _int(top["pad"], "pad", errors, lo=0)
    if "pad_seed" in top:
        m.pad_seed = _int(top["pad_seed"], "pad_seed", errors)
    if "backend_seed" in top:
        m.backend_seed = _int(top["backend_seed"], "backend_seed", errors)
    if "mode" in top:
        m.mode = top["mode"]
        if m.mode not in MODES:
            errors.append(f"mode: expected one of {', '.join(MODES)}, found {m.mode!r}")
    if "schedule" in top:
        m.schedule = top["schedule"]
        if m.schedule not in ("rr", "random") and not m.schedule.startswith("scripted:"):
            errors.append(f"schedule: expected rr, random or scripted:FILE, found {m.schedule!r}")
    if errors:
        raise ManifestError(errors)
    return m


def load_manifest(path) -> Manifest:
    path = Path(path)
    return parse_manifest(path.read_text(), path.parent)


def parse_expected(text: str) -> dict:
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line and "=" in line:
            k, v = (s.strip() for s in line.split("=", 1))
            out[k] = v
    return out
