"""Semiclassical spectra of a delta-perturbed Laplacian on 3D manifolds of revolution."""
__version__ = "0.1.0"
