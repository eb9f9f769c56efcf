"""qboson-sampling - q-deformed boson spectra, permanents and exact Fock-state sampling."""

__version__ = "0.1.0"
