"""Type-of-relationship and sibling inference from Internet Routing Registry dumps."""

__version__ = "0.1.0"
