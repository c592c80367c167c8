"""Test suite for prescomplex."""

