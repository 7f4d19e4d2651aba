"""Core infrastructure: configuration, logging, errors and the command line."""

__version__ = "0.1.0"
FORMAT_VERSION = "1"
