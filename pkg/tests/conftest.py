import itertools
import os

import pytest

from app.graph import Graph
from app.report_store import ReportStore

TEST_DB_NAME = "test_reports.db"
TEST_DB_PATH = "tests"


def complete_graph(n):
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def write_lines(path, lines):
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    return str(path)


@pytest.fixture(scope="session", autouse=True)
def setup_test_database():
    """
    Creates the test report database before all tests.
    Deletes it after all tests have finished.
    """

    os.makedirs(TEST_DB_PATH, exist_ok=True)
    db_file_path = os.path.join(TEST_DB_PATH, TEST_DB_NAME)
    with ReportStore(db_name=TEST_DB_NAME, db_path=TEST_DB_PATH):
        pass

    yield

    if os.path.exists(db_file_path):
        os.remove(db_file_path)


@pytest.fixture()
def store():
    """
    Fixture to provide a ReportStore instance for each test function.
    """
    with ReportStore(db_name=TEST_DB_NAME, db_path=TEST_DB_PATH) as store:
        yield store


@pytest.fixture
def triangle():
    return complete_graph(3)


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def k5():
    return complete_graph(5)


@pytest.fixture
def p4():
    return path_graph(4)


@pytest.fixture
def paw():
    """Triangle 0-1-2 with a pendant vertex 3 on 2."""
    return Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])


@pytest.fixture
def two_triangles():
    """Two triangles joined by the bridge 2-3."""
    return Graph.from_edges(
        6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)])
