"""
NOMA Semi-ISaC performance analysis
Analytic evaluators, Monte Carlo oracles and sweep scripts package
"""

__version__ = "1.0.0"
