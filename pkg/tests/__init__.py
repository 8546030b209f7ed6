"""Test suite for shadowrank."""
