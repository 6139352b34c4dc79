import time
from pathlib import Path

import pytest

from ternhash.harness import load_config, run_experiment

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture(scope="session")
def reference_results():
    """The full reference comparison at both code widths, with wall times.

    Built once per session; the acceptance tests that interrogate the trend
    and the final mAP comparison share these runs.
    """
    out = {}
    for dim in (16, 32):
        cfg = load_config(CONFIG_DIR / f"reference_d{dim}.cfg")
        start = time.perf_counter()
        out[dim] = (run_experiment(cfg), time.perf_counter() - start)
    return out
