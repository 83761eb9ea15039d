from fractions import Fraction

from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def F(s):
    return Fraction(s)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = next((m for n, m in list(sys.modules.items()) if n.rsplit(".", 1)[-1] == "test_acceptance"), None)
    got = [mod.LINES[k] for k in sorted(mod.LINES)] if mod else []
    if got:
        terminalreporter.section("acceptance criteria")
        for line in got:
            terminalreporter.write_line(line)
