"""Tabular training over map x reward-machine products."""

from popmachine.trainer.backend import BACKEND, kernel
from popmachine.trainer.encode import ProductTables, build_tables
from popmachine.trainer.loop import (
    Hyperparams,
    Mode,
    QTable,
    RunLog,
    evaluate,
    train,
    trajectory,
    trajectory_csv,
)
from popmachine.trainer.solver import (
    ProductMdp,
    bfs_shortest_completion,
    build_product,
    start_value,
    value_iteration,
)

__all__ = [
    "BACKEND",
    "kernel",
    "ProductTables",
    "build_tables",
    "Hyperparams",
    "Mode",
    "QTable",
    "RunLog",
    "evaluate",
    "train",
    "trajectory",
    "trajectory_csv",
    "ProductMdp",
    "bfs_shortest_completion",
    "build_product",
    "start_value",
    "value_iteration",
]
