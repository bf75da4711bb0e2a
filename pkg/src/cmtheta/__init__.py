"""CM theta elements on definite quaternion algebras: class sets, CM eigenforms, Gross points, L-values."""

__version__ = "0.1.0"
