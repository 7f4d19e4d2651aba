"""Test suite for LesionFuse."""
