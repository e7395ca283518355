"""
simtile Workload Benchmarks

Timed end-to-end workloads for the simtile toolkit and a runner that writes
timestamped JSON and CSV reports.
"""
