from hypothesis import settings

settings.register_profile("netcoh", deadline=None, max_examples=60)
settings.load_profile("netcoh")


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
