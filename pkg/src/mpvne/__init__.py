"""Multi-domain virtual network embedding: MP-VNE solver, baselines and simulator."""

__version__ = "0.1.0"
