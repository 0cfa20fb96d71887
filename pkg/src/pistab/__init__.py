"""BPS D-brane spectra on abelian orbifolds: quivers, stability, gradings and walls."""

__version__ = "0.1.0"
