"""MaskLab - iterative mask denoising laboratory."""

__version__ = "0.1.0"
