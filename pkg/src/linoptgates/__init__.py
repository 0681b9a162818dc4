"""Post-selected linear-optics gates: simulation, verification, synthesis.

Subpackages:

* :mod:`linoptgates.fock` -- exact Fock amplitudes for mode transformations
* :mod:`linoptgates.gates` -- conditional gate extraction and verification
* :mod:`linoptgates.dilation` -- unitary completion and the pair embedding
* :mod:`linoptgates.family` -- closed-form conditional-phase solution family
* :mod:`linoptgates.optimize` -- derivative-free gate searches
* :mod:`linoptgates.reck` -- beamsplitter decomposition of mode unitaries
* :mod:`linoptgates.bounds` -- product states, trace-out, Bell overlaps
"""

from ._kernels import USING_NUMBA

__version__ = "0.1.0"

__all__ = ["USING_NUMBA", "__version__"]
