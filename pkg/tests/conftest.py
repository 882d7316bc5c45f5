import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # expose the call-phase result so fixtures can report pass or fail at teardown
    outcome = yield
    if call.when == "call":
        item.rep_call = outcome.get_result()
