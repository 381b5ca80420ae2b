"""Data-representation transforms and a load-forecasting benchmark harness."""

__version__ = "0.1.0"
