from .config import ConfigError, RunConfig, dump_config, load_config, parse_config
from .runner import (
    MiuraReport,
    SolveResult,
    SweepReport,
    SweepRow,
    cmd_convergence,
    cmd_miura,
    cmd_solve,
    cmd_viscosity_sweep,
)
