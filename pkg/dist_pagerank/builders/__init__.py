"""Dense matrix builders used to verify the sparse update kernels."""
