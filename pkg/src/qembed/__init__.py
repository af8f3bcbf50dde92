"""Q-embedding of classical Bayesian nets, QB-net simulation and reference quantum algorithms."""

__version__ = "0.1.0"
