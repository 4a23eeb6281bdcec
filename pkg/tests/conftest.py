import json
from pathlib import Path

import pytest

import make_fixtures

FIXTURES = Path(__file__).parent / "fixtures"
REPO_ROOT = Path(__file__).resolve().parent.parent

# Pass/fail lines recorded by the acceptance tests, replayed uncaptured at
# the end of the run so the gate can be read off any run log.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance gate")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def generated_fixtures() -> Path:
    """Regenerate the committed fixtures; generation is byte-stable."""
    make_fixtures.main()
    return FIXTURES


@pytest.fixture(scope="session")
def fixtures_dir(generated_fixtures: Path) -> Path:
    return generated_fixtures


@pytest.fixture()
def pipeline_config_dict(fixtures_dir: Path) -> dict:
    """The committed pipeline config with input paths made absolute."""
    with open(fixtures_dir / "pipeline_config.json", encoding="utf-8") as fh:
        cfg = json.load(fh)
    for key, value in cfg["paths"].items():
        if key != "out_dir":
            cfg["paths"][key] = str(REPO_ROOT / value)
    return cfg


@pytest.fixture()
def write_config(tmp_path: Path):
    """Write a config dict to a JSON file with the given out_dir."""
    counter = {"n": 0}

    def _write(cfg_dict: dict, out_dir: Path) -> str:
        counter["n"] += 1
        materialized = json.loads(json.dumps(cfg_dict))
        materialized["paths"]["out_dir"] = str(out_dir)
        path = tmp_path / f"config{counter['n']}.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(materialized, fh, indent=2)
        return str(path)

    return _write


@pytest.fixture()
def run_cli(capsys):
    """Run the console entry point in-process; returns (code, stdout, stderr)."""
    from subevents.cli import main

    def _run(*args: str):
        try:
            code = main(list(args))
        except SystemExit as exc:
            code = exc.code if isinstance(exc.code, int) else 0
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run
