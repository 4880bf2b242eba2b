"""
Storage layer for rof.

Provides flat-file export of trial and experiment rows:
- CSV via pandas
- JSON with the run's ledger and config attached
"""

from rof.storage.reports import render, rows_to_frame, write_report

__all__ = ["render", "rows_to_frame", "write_report"]
