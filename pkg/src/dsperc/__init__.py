"""Bond percolation on uniform random graphs with a given degree sequence."""

__version__ = "0.1.0"
