"""Local computations for toroidalization of morphisms from 3-folds to surfaces."""

__version__ = "0.1.0"
