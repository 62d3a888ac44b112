"""Fenchel-Nielsen surfaces, marked length spectra and near-isometries between them."""

__version__ = "0.1.0"
