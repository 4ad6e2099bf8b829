import pytest

from cbtopo import CbtConfig, build_colorless_task, build_task


@pytest.fixture(scope="session")
def cbt_tasks():
    """Colored task instances for the three smallest sizes."""
    return {n: build_task(CbtConfig(n=n)) for n in (1, 2, 3)}


@pytest.fixture(scope="session")
def colorless_tasks():
    """Colorless projections for the three smallest sizes."""
    return {n: build_colorless_task(CbtConfig(n=n)) for n in (1, 2, 3)}
