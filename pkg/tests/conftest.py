import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=1000,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much, HealthCheck.data_too_large],
)
settings.register_profile("quick", parent=settings.get_profile("default"), max_examples=100)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# outcomes by node id, so the acceptance summary can reuse tests that
# already ran in this session instead of running them again
RESULTS: dict[str, str] = {}


def pytest_collection_modifyitems(items):
    items.sort(key=lambda item: item.path.name == "test_acceptance.py")


def pytest_runtest_logreport(report):
    if report.when == "call" or report.outcome != "passed":
        if RESULTS.get(report.nodeid) != "failed":
            RESULTS[report.nodeid] = report.outcome
