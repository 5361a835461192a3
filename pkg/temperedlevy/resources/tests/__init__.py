"""Test resources initialization."""
