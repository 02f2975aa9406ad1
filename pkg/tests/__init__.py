"""Test suite for MaskLab."""
