"""Constants for parsers."""

COMMANDS = ("constants", "solve-pde", "simulate", "compare")

# Flags shared by every subcommand:
ARGPARSE_ARGS = {
    "config": {"dest": "config", "metavar": "PATH", "default": None},
    "out": {"dest": "out", "metavar": "DIR", "default": None},
    "seed": {"dest": "seed", "metavar": "U64", "type": int, "default": None},
    "workers": {"dest": "workers", "metavar": "N", "type": int, "default": None},
    "dry-run": {"dest": "dry_run", "action": "store_true"},
    "format": {"dest": "format", "choices": ["csv", "json", "binary"], "default": "json"},
    "verbose": {"dest": "verbose", "action": "store_true"},
}

# Flags of one subcommand only:
COMMAND_ARGS = {
    "constants": {
        "sweep-chi": {"dest": "sweep_chi", "metavar": "START:STOP:NUM", "default": None},
    },
    "solve-pde": {},
    "simulate": {
        "epsilon": {"dest": "epsilon", "type": float, "default": None},
        "kde-every": {"dest": "kde_every", "metavar": "STEPS", "type": int, "default": None},
    },
    "compare": {
        "trend": {"dest": "trend", "metavar": "N1,N2,...", "default": None},
        "sweep-epsilon": {"dest": "sweep_epsilon", "action": "store_true"},
        "kde-every": {"dest": "kde_every", "metavar": "STEPS", "type": int, "default": None},
    },
}

SWEEP_CHI_PARTS = 3
EPSILON_FACTORS = (1, 2, 4)
