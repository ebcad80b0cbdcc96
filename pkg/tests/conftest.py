import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from parallelqa import datastore


@pytest.fixture(scope="session")
def pilot_dataset():
    return datastore.load_pilot_dataset()


@pytest.fixture(scope="session")
def pilot_examples(pilot_dataset):
    return datastore.to_examples(pilot_dataset, "pilot")


@pytest.fixture()
def pilot_file(tmp_path, pilot_dataset):
    path = tmp_path / "pilot.json"
    datastore.save_pqa(pilot_dataset, path)
    return path
