"""websmith: exact symbolic computation in the rank <= 2 combinatorial spiders."""

__version__ = "0.1.0"
