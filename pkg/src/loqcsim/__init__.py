"""Linear-optics and quantum-optics simulation toolkit: Fock-state
interferometry, time-bin loop networks, metrology, photon sources, Fock-state
fusion, non-Fock sampling, phase-space integrals, quantum walks and grid-state
preparation."""
__version__ = "0.1.0"

from ._accel import backend_name  # noqa: E402,F401
