"""First-order temporal logic with admissible semantics."""

__version__ = "0.1.0"
