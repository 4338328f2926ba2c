"""Time and memory scaling benchmarks"""
from .harness import (DESK_GRID, FULL_GRID, BenchCell, BenchRecord, generate_cell_data,
                      measure_cell, peak_rss_bytes, plan_grid, run_grid)
from .scaling import (LogLogModel, fit_fixed_exponent_model, fit_loglog_model, records_frame,
                      write_loglog_tsv, write_models_json, write_records_csv)

__all__ = [
    "DESK_GRID", "FULL_GRID", "BenchCell", "BenchRecord", "generate_cell_data",
    "measure_cell", "peak_rss_bytes", "plan_grid", "run_grid",
    "LogLogModel", "fit_fixed_exponent_model", "fit_loglog_model", "records_frame",
    "write_loglog_tsv", "write_models_json", "write_records_csv",
]
