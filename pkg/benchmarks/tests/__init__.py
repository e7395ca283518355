# Benchmarks tests package 