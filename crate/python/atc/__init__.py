"""Attack-tree correctness checking against finite transition systems.

`Model` wraps one system (and optionally one tree) loaded from the JSON
documents the `atc` CLI uses; reports come back as plain dicts with the
same fields as the CLI's JSON output.
"""

from atc._native import PROPERTIES, Model, reduce_dimacs, truth_table_sat

__all__ = ["Model", "PROPERTIES", "reduce_dimacs", "truth_table_sat"]
