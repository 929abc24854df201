import os
import random

from hypothesis import HealthCheck, settings, strategies as st

from arrangement_cm.corpus import random_lattice

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = os.path.join(os.path.dirname(__file__), "data")


def lattices(max_elements: int = 8):
    """Seeded random union-closed lattices with random monotone labels."""
    return st.integers(0, 10**9).map(lambda s: random_lattice(random.Random(s), max_elements))


def matrices(max_rows: int = 5, max_cols: int = 5, lo: int = -3, hi: int = 3):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
