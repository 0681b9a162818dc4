"""Reference gate matrices bundled with the package.

``v180_matrix`` is the known optimal conditional-sign-flip submatrix (itself
unitary, success probability 2/27) in exact closed form evaluated in double
precision.  ``v90_matrix`` is the best known 90-degree solution, available
only to four decimals (success probability 1/19.37).  Both are also shipped
as JSON files under ``linoptgates/data`` for the command line.
"""

from importlib import resources

import json

import numpy as np

from .fock import ModeTransform


def v180_matrix() -> np.ndarray:
    s6 = np.sqrt(6.0)
    s2 = np.sqrt(2.0)
    a = np.sqrt(3.0 + s6) / 3.0
    b = np.sqrt(3.0 - s6) / 3.0
    c = np.sqrt((3.0 + s6) / 2.0) / 3.0
    d = np.sqrt(1.0 / 6.0 - 1.0 / (3.0 * s6))
    return np.array([
        [-1.0 / 3.0, -s2 / 3.0, s2 / 3.0, 2.0 / 3.0],
        [s2 / 3.0, -1.0 / 3.0, -2.0 / 3.0, s2 / 3.0],
        [-a, b, -c, d],
        [-b, -a, -d, -c],
    ], dtype=np.complex128)


def v90_matrix() -> np.ndarray:
    # realizes the -90 degree conditional phase as tabulated; the conjugate
    # matrix realizes +90 with the same probability and singular values
    return np.array([
        [-0.3202 + 0.0418j, -0.2520 - 0.3226j, 0.2883 + 0.0j, -0.1292 - 0.7221j],
        [-0.2520 - 0.3226j, -0.3202 + 0.0418j, -0.1292 - 0.7221j, 0.2883 + 0.0j],
        [-0.3216 + 0.7210j, -0.1711 - 0.1725j, 0.2469 + 0.0j, 0.3322 + 0.3285j],
        [-0.1711 - 0.1725j, -0.3216 + 0.7210j, 0.3322 + 0.3285j, 0.2469 + 0.0j],
    ], dtype=np.complex128)


def data_path(name: str):
    """Path of a bundled JSON data file."""
    return resources.files("linoptgates.data").joinpath(name)


def load_bundled(name: str) -> ModeTransform:
    with data_path(name).open("r") as fh:
        return ModeTransform.from_json(json.load(fh))
