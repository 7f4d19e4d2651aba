"""Command-line subcommands, wire records and report rendering.

Subcommand modules register with ``core.registry.cli`` when imported;
``core.cli`` imports all of them.
"""
