"""Exact finite-size machinery: operators, spectra, kink textures."""
