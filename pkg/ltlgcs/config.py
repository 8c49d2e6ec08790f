#!/usr/bin/env python

"""
Tolerances and defaults shared across ltlgcs.

Solver-level checks use FEASIBILITY_TOL; anything reported back to a user
(containment, continuity) uses the looser CONTAINMENT_TOL.
"""

FEASIBILITY_TOL = 1e-8
CONTAINMENT_TOL = 1e-6
CONTINUITY_TOL = 1e-6
START_TOL = 1e-9
INTEGRAL_TOL = 1e-6  # y_e this close to 1 counts as integral

# rounding
ROUNDING_FLOOR = 1e-4  # edges below this flow are tried last
DEFAULT_MAX_ROUND_PATHS = 10
POOL_SIZE = 4  # concurrent restriction solves

# splines
DEFAULT_ORDER = 4
DEFAULT_SMOOTHNESS = 2
DEFAULT_NORM = "l2"

# geometry
CHEBYSHEV_RADIUS_CAP = 1e6

# Buchi cross-check: lasso words with prefix and cycle up to these lengths
DBA_CHECK_PREFIX = 2
DBA_CHECK_CYCLE = 2
DBA_REDUCE_LIMIT = 16  # larger DBAs skip state merging

# exact oracle
DEFAULT_PATH_BUDGET = 200

SCENARIO_SCHEMA = "v1"
