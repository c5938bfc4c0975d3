"""Blind deconvolution of graph signals under eigenbasis perturbations."""

__version__ = "0.1.0"
