import os

# Pin BLAS to one thread before numpy loads: the samplers' small-matrix GEMMs
# lose more to thread wake-up latency than they gain from parallelism, and
# single-threaded kernels keep timings and results reproducible.
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")
