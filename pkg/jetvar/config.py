"""
jetvar configuration
====================
Defaults for the engine and the command line. Every value can be overridden
from the environment; none is required.
"""

import os

# ─── Reports ─────────────────────────────────────────────────────────────────

DEFAULT_FORMAT = os.getenv("JETVAR_FORMAT", "text").strip() or "text"
DEFAULT_GAUGE = os.getenv("JETVAR_GAUGE", "lex").strip() or "lex"
VERBOSE = os.getenv("JETVAR_VERBOSE", "").strip().lower() not in ("", "0", "false", "no")

# ─── Minimal-order search ────────────────────────────────────────────────────

# Ansatz systems larger than this are skipped (the homotopy Lagrangian is kept)
SEARCH_MAX_UNKNOWNS = int(os.getenv("JETVAR_SEARCH_MAX_UNKNOWNS", "3000"))
# Extra base-coordinate degree allowed in the ansatz beyond the source form's
SEARCH_EXTRA_BASE_DEGREE = int(os.getenv("JETVAR_SEARCH_EXTRA_BASE_DEGREE", "1"))

# ─── Numeric first-variation oracle ──────────────────────────────────────────

GRID_POINTS = int(os.getenv("JETVAR_GRID_POINTS", "201"))
FD_STEP = float(os.getenv("JETVAR_FD_STEP", "1e-4"))
BOUNDARY_TOLERANCE = 1e-12
