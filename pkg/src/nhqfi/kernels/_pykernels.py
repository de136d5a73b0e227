"""Vectorized numpy versions of the hot loops."""
from __future__ import annotations

import numpy as np


def generator_qfi_grid(v1, v2, a, b, Ga, Gb, ms, phis):
    """Generator-form QFI over a grid of initial states ``v1 + m e^{i phi} v2``.

    ``a, b`` are ``U v1, U v2`` and ``Ga, Gb`` their images under the
    generator.  Returns ``(F, F_projected)`` with shape ``(len(ms), len(phis))``.
    """
    v1, v2, a, b, Ga, Gb = (np.asarray(v, dtype=complex) for v in (v1, v2, a, b, Ga, Gb))
    ms = np.asarray(ms, dtype=float)[:, None]
    phis = np.asarray(phis, dtype=float)[None, :]
    c = ms * np.exp(1j * phis)
    c2 = np.abs(c) ** 2

    def quad(x, y):
        # <x + c y | x + c y>
        return np.vdot(x, x).real + c2 * np.vdot(y, y).real + 2 * (c * np.vdot(x, y)).real

    n0 = quad(v1, v2)
    P = quad(a, b) / n0
    mean = (np.vdot(a, Ga) + c * np.vdot(a, Gb) + np.conj(c) * np.vdot(b, Ga) + c2 * np.vdot(b, Gb)) / n0
    second = quad(Ga, Gb) / n0
    dalpha = -mean.imag / P
    var = second / P - np.abs(mean) ** 2 / P ** 2
    return 16.0 * P * dalpha ** 2 + 4.0 * P * var, 4.0 * var
