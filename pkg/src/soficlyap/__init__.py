"""Graph-based Lyapunov certificates for switched linear systems under
sofic-shift constraints."""

__version__ = "0.1.0"
