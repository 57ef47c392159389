"""Shipped example programs, each with a run manifest and its expected outcome."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..manifest import Manifest, load_manifest, parse_expected
from ..syntax import CoreProgram, compile_source


@dataclass
class CorpusEntry:
    name: str
    path: Path
    manifest: Manifest
    expected: dict

    @property
    def source(self) -> str:
        return (self.path / "program.lsym").read_text()

    def compile(self) -> CoreProgram:
        return compile_source(self.source)

    @property
    def stuck(self) -> bool:
        return self.expected.get("outcome") == "stuck"

    @property
    def oracle(self) -> str:
        return self.expected.get("oracle", "")


def corpus_dir() -> Path:
    return Path(str(resources.files(__package__)))


def load_entry(path) -> CorpusEntry:
    path = Path(path)
    return CorpusEntry(path.name, path, load_manifest(path / "manifest"),
                       parse_expected((path / "expected").read_text()))


def corpus_list(root=None) -> list[CorpusEntry]:
    root = Path(root) if root is not None else corpus_dir()
    return [load_entry(p) for p in sorted(root.iterdir())
            if p.is_dir() and (p / "program.lsym").exists()]


def entry(name: str) -> CorpusEntry:
    return load_entry(corpus_dir() / name)
