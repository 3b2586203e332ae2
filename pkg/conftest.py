"""Shared fixtures: the coefficient table is solved once per session."""

import pytest

from freudsobolev import SobolevParams, build_freud_table, build_sobolev_table


@pytest.fixture(scope="session")
def ft():
    """Freud table up to degree 250 at 64 digits."""
    return build_freud_table(250, 64)


@pytest.fixture(scope="session")
def small_ft():
    """Freud table large enough for everything below degree 40."""
    return build_freud_table(60, 40)


@pytest.fixture(scope="session")
def st(small_ft):
    """Sobolev table for M0 = 1, M1 = 0.5."""
    return build_sobolev_table(small_ft, SobolevParams(1.0, 0.5), 40)


@pytest.fixture(scope="session")
def st_heavy(small_ft):
    """Sobolev table for M0 = 0.3, M1 = 2."""
    return build_sobolev_table(small_ft, SobolevParams(0.3, 2.0), 40)
