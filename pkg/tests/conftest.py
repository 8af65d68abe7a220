import hypothesis
import pytest

from dataclasses import replace

from mesbench.scenario import baseline_config

hypothesis.settings.register_profile(
    "workbench", deadline=None, max_examples=50,
    suppress_health_check=[hypothesis.HealthCheck.too_slow],
)
hypothesis.settings.load_profile("workbench")


@pytest.fixture
def day_config():
    """Baseline config shortened to one day; keeps simulation tests snappy."""
    return replace(baseline_config(), horizon_s=86400.0)


@pytest.fixture
def week_config():
    return baseline_config()
