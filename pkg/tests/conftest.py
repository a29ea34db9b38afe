import pytest

from amrkbqa.config import PipelineConfig, bundled_path
from amrkbqa.pipeline import Resources, load_kb, load_records


@pytest.fixture(scope="session")
def config():
    return PipelineConfig()


@pytest.fixture(scope="session")
def resources(config):
    return Resources.load(config)


@pytest.fixture(scope="session")
def toy_kb(config, resources):
    return load_kb(config, resources)


@pytest.fixture(scope="session")
def records(config):
    return {r.id: r for r in load_records(bundled_path("questions.jsonl"))}
