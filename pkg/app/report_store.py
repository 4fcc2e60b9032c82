import json
import logging
import os
import sqlite3

from app.entity.experiment_report import ExperimentReport
from app.time_utils import current_timestamp_millis

logger = logging.getLogger(__name__)


class ReportStore:
    """
    A class to manage the SQLite database of benchmark runs.
    Each run owns the per-query reports it produced.
    """

    RUN_NOT_FOUND = 'run_not_found'
    UNKNOWN_ERROR = 'unknown_error'
    OK = 'ok'

    def __init__(self, db_name="reports.db", db_path="."):
        """
        Initializes the ReportStore.

        Args:
            db_name (str): The name of the SQLite database file.
            db_path (str): The relative path to create database in.
                           Defaults to current directory.
        """
        self.db_name = db_name
        self.db_path = db_path

        self.db_file_path = os.path.join(self.db_path, self.db_name)

        self.conn = None
        self.cursor = None
        self.connect()
        self._create_tables()

    @classmethod
    def at(cls, file_path):
        """Open the store at a full file path."""
        directory, name = os.path.split(file_path)
        return cls(db_name=name, db_path=directory or ".")

    def connect(self):
        """Connect to the database."""
        try:
            self.conn = sqlite3.connect(
                self.db_file_path, check_same_thread=False)
            self.conn.row_factory = sqlite3.Row
            self.cursor = self.conn.cursor()
            self.cursor.execute("PRAGMA foreign_keys = ON")

        except sqlite3.Error as e:
            logger.error("Database connection error: %s", e)
            raise

    def close(self):
        """Close the database connection."""
        if self.conn:
            self.conn.close()
            self.conn = None
            self.cursor = None

    def _create_tables(self):
        """
        Creates the Runs and Reports tables if they don't already exist.
        """
        try:
            self.cursor.execute("""
                CREATE TABLE IF NOT EXISTS Runs (
                    run_id INTEGER PRIMARY KEY AUTOINCREMENT,
                    suite VARCHAR(64) NOT NULL,
                    seed TEXT NOT NULL,
                    params TEXT NOT NULL,
                    created_at INTEGER NOT NULL,
                    summary TEXT
                )
            """)

            self.cursor.execute("""
                CREATE TABLE IF NOT EXISTS Reports (
                    report_id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER NOT NULL,
                    query_index INTEGER NOT NULL,
                    n_q INTEGER NOT NULL,
                    matched INTEGER NOT NULL,
                    score REAL NOT NULL,
                    baseline_score REAL,
                    exact_match INTEGER NOT NULL,
                    in_pruned INTEGER NOT NULL,
                    density REAL,
                    delta REAL NOT NULL,
                    tau REAL NOT NULL,
                    FOREIGN KEY (run_id) REFERENCES Runs(run_id)
                )
            """)

            self.conn.commit()
            return ReportStore.OK
        except sqlite3.Error as e:
            logger.error("Error creating tables: %s", e)
            self.conn.rollback()
            return ReportStore.UNKNOWN_ERROR

    def save_run(self, suite, seed, params, summary=None):
        """
        Stores a benchmark run.

        Args:
            suite (str): Suite name, e.g. 'planted'.
            seed (int): Seed of the run (stored as text, it may exceed
                SQLite's signed 64-bit range).
            params (dict): Run parameters.
            summary (dict): Aggregates of the run, if already known.

        Returns:
            int: The run_id of the new run.
        """
        try:
            self.cursor.execute(
                """INSERT INTO Runs (suite, seed, params, created_at, summary)
                VALUES (?, ?, ?, ?, ?)""",
                (suite, str(seed), json.dumps(params, sort_keys=True),
                 current_timestamp_millis(),
                 json.dumps(summary, sort_keys=True)
                 if summary is not None else None)
            )
            self.conn.commit()
            return self.cursor.lastrowid
        except sqlite3.Error as e:
            logger.error("Error saving run: %s", e)
            self.conn.rollback()
            return ReportStore.UNKNOWN_ERROR

    def update_summary(self, run_id, summary):
        """
        Replaces the summary of a run.

        Returns:
            str: OK, RUN_NOT_FOUND or UNKNOWN_ERROR.
        """
        try:
            self.cursor.execute(
                "UPDATE Runs SET summary = ? WHERE run_id = ?",
                (json.dumps(summary, sort_keys=True), run_id))

            if self.cursor.rowcount == 0:
                return ReportStore.RUN_NOT_FOUND

            self.conn.commit()
            return ReportStore.OK
        except sqlite3.Error as e:
            logger.error("Error updating run: %s", e)
            self.conn.rollback()
            return ReportStore.UNKNOWN_ERROR

    def save_report(self, run_id, report):
        """
        Stores one query report of a run.

        Args:
            run_id (int): The owning run.
            report (ExperimentReport): The report to store.

        Returns:
            int: The report_id of the new row.
        """
        try:
            if self.get_run(run_id) is None:
                return ReportStore.RUN_NOT_FOUND

            self.cursor.execute(
                """INSERT INTO Reports (run_id, query_index, n_q, matched,
                score, baseline_score, exact_match, in_pruned, density,
                delta, tau)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)""",
                (run_id, report.query_index, report.n_q, report.matched,
                 report.score, report.baseline_score,
                 int(report.exact_match), int(report.in_pruned),
                 report.density, report.delta, report.tau)
            )
            self.conn.commit()
            return self.cursor.lastrowid
        except sqlite3.Error as e:
            logger.error("Error saving report: %s", e)
            self.conn.rollback()
            return ReportStore.UNKNOWN_ERROR

    def get_run(self, run_id):
        """
        Gets a run by its ID.

        Returns:
            dict: The run with decoded params and summary, or None.
        """
        try:
            self.cursor.execute(
                "SELECT * FROM Runs WHERE run_id = ?", (run_id,))
            row = self.cursor.fetchone()

            if row is None:
                return None

            return {
                'run_id': row['run_id'],
                'suite': row['suite'],
                'seed': int(row['seed']),
                'params': json.loads(row['params']),
                'created_at': row['created_at'],
                'summary': json.loads(row['summary'])
                if row['summary'] else None,
            }
        except sqlite3.Error as e:
            logger.error("Error getting run: %s", e)
            return None

    def list_runs(self, suite=''):
        """
        Lists runs, newest first, optionally restricted to one suite.

        Returns:
            list: Dicts as returned by `get_run`.
        """
        suite = suite.strip()

        try:
            if suite:
                self.cursor.execute("""
                    SELECT run_id FROM Runs
                    WHERE suite = ?
                    ORDER BY run_id DESC""",
                                    (suite,))
            else:
                self.cursor.execute("""
                    SELECT run_id FROM Runs
                    ORDER BY run_id DESC""")

            ids = [row['run_id'] for row in self.cursor.fetchall()]
            return [self.get_run(run_id) for run_id in ids]
        except sqlite3.Error as e:
            logger.error("Error listing runs: %s", e)
            return []

    def get_reports(self, run_id):
        """
        Retrieves the reports of a run in query order.

        Returns:
            list: ExperimentReport objects, or RUN_NOT_FOUND.
        """
        try:
            if self.get_run(run_id) is None:
                return ReportStore.RUN_NOT_FOUND

            self.cursor.execute("""
                SELECT * FROM Reports
                WHERE run_id = ?
                ORDER BY query_index, report_id""",
                                (run_id,))

            return list(map(ExperimentReport.from_row,
                            self.cursor.fetchall()))
        except sqlite3.Error as e:
            logger.error("Error getting reports: %s", e)
            return []

    def __enter__(self):
        """
        Context manager entry point.  Allows use of 'with' statement.
        """
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """
        Context manager exit point.  Closes the connection.
        """
        self.close()
