import subprocess
import sys

import pytest


def export_dataset(out_dir, seed=3, count=4, pairs=3, size=64, difficulty="medium"):
    """Produce a dataset through the planning CLI (the external interface)."""
    result = subprocess.run(
        [
            sys.executable, "-m", "gridplan.cli", "dataset", "export",
            "--seed", str(seed), "--count", str(count), "--pairs", str(pairs),
            "--difficulty", difficulty, "--width", str(size), "--height", str(size),
            "--out", str(out_dir),
        ],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr
    return out_dir / "manifest.jsonl"


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("dataset")
    return export_dataset(out)
