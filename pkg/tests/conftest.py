import csv
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

_ACCEPTANCE = []


def write_census_csv(path, districts_per_state, year=2011, seed=0, sex_split=True):
    """Write a consistent census-style CSV (male + female = total, literate <= population)."""
    rng = np.random.default_rng(seed)
    cols = ["state", "district", "year", "pop_t"]
    if sex_split:
        cols += ["pop_m", "pop_f"]
    cols += ["lit_t"] + (["lit_m", "lit_f"] if sex_split else [])
    cols += ["work_t"] + (["work_m", "work_f"] if sex_split else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for s, count in enumerate(districts_per_state):
            for d in range(count):
                pop = rng.integers(50_000, 5_000_000, size=2)
                lit = (pop * rng.uniform(0.4, 0.9, size=2)).astype(int)
                work = (pop * rng.uniform(0.2, 0.55, size=2)).astype(int)
                row = {"state": f"State{s:02d}", "district": f"D{s:02d}-{d:03d}",
                       "year": year, "pop_t": pop.sum(), "pop_m": pop[0], "pop_f": pop[1],
                       "lit_t": lit.sum(), "lit_m": lit[0], "lit_f": lit[1],
                       "work_t": work.sum(), "work_m": work[0], "work_f": work[1]}
                w.writerow([row[c] for c in cols])
    return path


@pytest.fixture
def census_csv(tmp_path):
    return write_census_csv(tmp_path / "census.csv", [12, 7, 3, 20, 5, 9], seed=11)


@pytest.fixture
def acceptance():
    def record(label, ok, detail=""):
        """Log one criterion line; ``ok`` may also be "SKIP" or "INFO"."""
        status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
        _ACCEPTANCE.append(f"{status}  {label}  {detail}".rstrip())
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
