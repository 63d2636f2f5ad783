"""Shared state for the acceptance run: fixture location and summary lines."""

import os
from pathlib import Path

DATA_DIR = Path(__file__).parent / "data"
POPULATION_ENV = "LEADDIGITS_POPULATION_CSV"

LINES: dict[int, str] = {}


def population_path() -> Path:
    """Location of the 217-row 2023 population file, if one was supplied."""
    env = os.environ.get(POPULATION_ENV)
    if env:
        return Path(env)
    return DATA_DIR / "population_2023.csv"
