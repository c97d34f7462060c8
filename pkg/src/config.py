"""Environment-driven defaults for caps, logging and parallelism."""

import os
from pathlib import Path

# Largest min(m!, n!) the exact sds solver will enumerate (8! by default)
CAP_FACTORIAL = int(os.getenv("DEFSETS_CAP_FACTORIAL", "40320"))

# Largest class size that may be enumerated or sampled exactly
CAP_CLASS = int(os.getenv("DEFSETS_CAP_CLASS", "200000"))

# Largest m! * n! the brute-force good-form search will try
CAP_BRUTEFORCE = int(os.getenv("DEFSETS_CAP_BRUTEFORCE", "100000"))

# Worker processes for fan-out; 1 keeps everything in-process
WORKERS = int(os.getenv("DEFSETS_WORKERS", "1"))

# Exact discrepancy scans enumerate subsets of the smaller side up to this size
MAX_EXACT_DISCREPANCY_SIDE = 25

RNG_ALGORITHM = "numpy.Philox4x64-10"


def get_log_dir() -> Path:
    """Get the directory run logs are written to."""
    return Path(os.getenv("DEFSETS_LOG_DIR", "logs"))
