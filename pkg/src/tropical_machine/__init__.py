"""Race-logic temporal state machine simulator over the min-plus semiring."""
from .core import INF, TieMode, wavefront, matrix, onehot
from .errors import TropicalError
from .machine import CostTable, Instruction, Machine, MachineConfig, Opcode, WriteMode, cost_report
from .memory import OverflowPolicy, RangeConfig

__version__ = "0.1.0"
