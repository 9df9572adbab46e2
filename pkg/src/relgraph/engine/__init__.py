from .executor import ResultTable, execute
from .kernels import KERNEL_MODE
from .operators import DEFAULT_BATCH_SIZE, ExecEnv
from .plan import (
    GRAPH_OPS,
    OP_KINDS,
    RELATIONAL_OPS,
    PlanNode,
    dumps,
    explain,
    from_json,
    loads,
    to_json,
)

__all__ = [
    "DEFAULT_BATCH_SIZE",
    "ExecEnv",
    "GRAPH_OPS",
    "KERNEL_MODE",
    "OP_KINDS",
    "PlanNode",
    "RELATIONAL_OPS",
    "ResultTable",
    "dumps",
    "execute",
    "explain",
    "from_json",
    "loads",
    "to_json",
]
