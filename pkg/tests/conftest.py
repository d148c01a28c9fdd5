from pathlib import Path

import pytest

from cooccurnet import fixtures
from cooccurnet.corpus import build_index, ingest_corpus, ingest_lexicon

DATA = Path(__file__).parent / "data"


def index_from(fx: fixtures.CorpusFixture, workers: int = 1):
    return build_index(ingest_corpus(fx.docs), ingest_lexicon(fx.lexicon), workers=workers)


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def sparse_fixture():
    return fixtures.sparse_corpus(seed=7)


@pytest.fixture
def write_lines(tmp_path):
    def _write(name, lines):
        path = tmp_path / name
        path.write_text("".join(lines), encoding="utf-8")
        return path
    return _write


_ACCEPTANCE: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion of the build")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    label = dict(report.user_properties).get("acceptance")
    if label:
        _ACCEPTANCE.append((label, "PASS" if report.passed else "FAIL", report.nodeid))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome, nodeid in sorted(_ACCEPTANCE, key=lambda r: int(r[0].split()[0][2:])):
        terminalreporter.write_line(f"{outcome}  {label}")
