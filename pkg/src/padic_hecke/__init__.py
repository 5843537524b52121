"""p-adic Fourier theory at finite level and critical Hecke L-values."""

__version__ = "0.1.0"
