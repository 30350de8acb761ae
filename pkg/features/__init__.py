"""Features Package

- netgen: random networks and simulated range measurements
- models: localization cone programs and solution readers
- metrics: position error, error histograms, relative entropy
- pipeline: one network through every objective
- experiments: multi-network sweeps and aggregation
"""
