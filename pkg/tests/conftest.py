"""Test-session setup: cap BLAS threads before numpy loads.

The suite runs thousands of small (dim <= 128) factorizations; threaded BLAS
pools lose far more to synchronization than they gain at these sizes.
"""

import os

for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(var, "1")
