"""Interleaved-real storage of complex coordinates.

``x[2j] = Re z_j`` and ``x[2j + 1] = Im z_j``. Closed forms are written in
complex arithmetic and converted here, in one place:

* a real function φ(z, z̄) has real gradient ``∂φ/∂x_j + i ∂φ/∂y_j = 2 ∂φ/∂z̄_j``;
* a real vector field ``c ∂/∂z + c̄ ∂/∂z̄`` has components ``(Re c, Im c)``.
"""
import numpy as np


def to_complex(x):
    x = np.asarray(x, dtype=float)
    return x[0::2] + 1j * x[1::2]


def from_complex(z):
    z = np.asarray(z, dtype=complex)
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def gradient_from_dzbar(dphi_dzbar):
    """Real gradient of a real function from its ``∂/∂z̄`` derivatives."""
    return from_complex(2.0 * np.asarray(dphi_dzbar, dtype=complex))


def vector_from_dz_coefficients(c):
    """Real vector of the field ``Σ c_j ∂/∂z_j + c̄_j ∂/∂z̄_j``."""
    return from_complex(c)
