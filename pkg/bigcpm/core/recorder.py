"""
Benchmark results ledger
Records benchmark runs and their grid cells to a local SQLite file
"""
import logging
import sqlite3
import time
import uuid
from typing import Any, Dict, List, Optional

from .serializer import ResultSerializer

logger = logging.getLogger(__name__)


class BenchRecorder:
    """Records benchmark runs and per-cell measurements to SQLite"""

    def __init__(self, db_path: str = "bigcpm_bench.db"):
        self.db_path = db_path
        self.serializer = ResultSerializer(indent=None)
        self.init_database()

    def init_database(self):
        """Initialize SQLite database with required tables"""
        with sqlite3.connect(self.db_path) as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS bench_runs (
                    id TEXT PRIMARY KEY,
                    started_at INTEGER NOT NULL,
                    finished_at INTEGER,
                    seed INTEGER,
                    solver TEXT,
                    grid TEXT,
                    status TEXT,
                    error_message TEXT
                )
            """)
            conn.execute("""
                CREATE TABLE IF NOT EXISTS bench_cells (
                    id TEXT PRIMARY KEY,
                    run_id TEXT REFERENCES bench_runs(id),
                    position INTEGER,
                    n_obs INTEGER NOT NULL,
                    n_distinct INTEGER NOT NULL,
                    n_pred INTEGER NOT NULL,
                    time_s REAL,
                    peak_mem INTEGER,
                    fit_mem INTEGER,
                    iterations INTEGER,
                    converged INTEGER,
                    status TEXT,
                    error_message TEXT
                )
            """)
            conn.commit()

    def start_run(self, seed: Optional[int], solver: str, grid: Dict[str, Any]) -> str:
        """Start recording a benchmark run"""
        run_id = str(uuid.uuid4())
        with sqlite3.connect(self.db_path) as conn:
            conn.execute("""
                INSERT INTO bench_runs (id, started_at, seed, solver, grid, status)
                VALUES (?, ?, ?, ?, ?, ?)
            """, (run_id, int(time.time() * 1000), seed, solver,
                  self.serializer.serialize(grid), "running"))
            conn.commit()
        return run_id

    def record_cell(self, run_id: str, record, position: int) -> str:
        """Store one BenchRecord"""
        cell_id = str(uuid.uuid4())
        with sqlite3.connect(self.db_path) as conn:
            conn.execute("""
                INSERT INTO bench_cells
                (id, run_id, position, n_obs, n_distinct, n_pred, time_s, peak_mem,
                 fit_mem, iterations, converged, status, error_message)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            """, (cell_id, run_id, position, record.N, record.M, record.p, record.time,
                  record.peak_mem, record.fit_mem, record.iterations, int(record.fit_converged),
                  record.status, record.error))
            conn.commit()
        return cell_id

    def complete_run(self, run_id: str, status: str = "success", error: Optional[str] = None):
        """Complete recording a benchmark run"""
        with sqlite3.connect(self.db_path) as conn:
            conn.execute("""
                UPDATE bench_runs SET finished_at = ?, status = ?, error_message = ?
                WHERE id = ?
            """, (int(time.time() * 1000), status, error, run_id))
            conn.commit()
        logger.debug("Bench run %s completed with status %s", run_id, status)

    def list_runs(self) -> List[Dict[str, Any]]:
        """List all recorded runs, newest first"""
        with sqlite3.connect(self.db_path) as conn:
            cursor = conn.execute("""
                SELECT r.id, r.started_at, r.finished_at, r.seed, r.solver, r.status,
                       COUNT(c.id) AS cell_count
                FROM bench_runs r LEFT JOIN bench_cells c ON c.run_id = r.id
                GROUP BY r.id
                ORDER BY r.started_at DESC
            """)
            return [dict(zip([col[0] for col in cursor.description], row))
                    for row in cursor.fetchall()]

    def get_run_records(self, run_id: str) -> List[Dict[str, Any]]:
        """All cells of a run in grid order"""
        with sqlite3.connect(self.db_path) as conn:
            cursor = conn.execute("""
                SELECT n_obs AS N, n_distinct AS M, n_pred AS p, time_s AS time, peak_mem,
                       fit_mem, iterations,
                       converged AS fit_converged, status, error_message AS error
                FROM bench_cells WHERE run_id = ?
                ORDER BY position
            """, (run_id,))
            rows = [dict(zip([col[0] for col in cursor.description], row))
                    for row in cursor.fetchall()]
        for row in rows:
            row["fit_converged"] = bool(row["fit_converged"])
        return rows
