import pytest

from lsym.corpus import corpus_list
from lsym.syntax import compile_source


def program(src: str, prelude: bool = True):
    return compile_source(src, use_prelude=prelude)


@pytest.fixture(scope="session")
def corpus():
    return {e.name: e for e in corpus_list()}


# acceptance criteria report: one line per criterion at the end of the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        name, ok, secs, limit = ACCEPTANCE[n]
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{n:>2}] {verdict}  {name:<58} {secs:7.2f}s (limit {limit}s)")
