"""Chebyshev cell integration used by the boundary classifier.

A smooth integrand sampled at Chebyshev–Lobatto nodes of a cell [a, b] is
interpolated spectrally and integrated term by term; crucially the
antiderivative is available *at every node*, which is what lets the
classifier build cumulative integrals cell by cell without re-quadrature.
The heavy lifting is standard: a type-I DCT converts Lobatto samples to
Chebyshev coefficients and ``numpy.polynomial.chebyshev`` integrates and
evaluates the series.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from scipy.fft import dct as _dct

__all__ = ["lobatto_nodes", "series_coeffs", "partial_integrals"]


def lobatto_nodes(n: int) -> np.ndarray:
    """The n+1 Chebyshev–Lobatto points of [-1, 1] in ascending order."""
    return -np.cos(np.pi * np.arange(n + 1) / n)


def series_coeffs(fvals: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients of the interpolant through Lobatto samples.

    ``fvals`` are function values at ``lobatto_nodes(n)`` (ascending).  The
    type-I DCT implements the discrete Chebyshev transform exactly; the node
    order is reversed first because the DCT convention samples ``cos`` points
    in descending position.
    """
    n = len(fvals) - 1
    c = _dct(np.asarray(fvals, dtype=float)[::-1], type=1) / n
    c[0] /= 2.0
    c[-1] /= 2.0
    return c


def partial_integrals(fvals, a: float, b: float, xs: np.ndarray):
    """Cumulative integral of the interpolant from ``a`` to each node.

    ``xs`` are the reference nodes in [-1, 1] matching ``fvals``.  Returns
    ``(partials, total)`` where ``partials[j] = integral from a to node j``
    and ``total`` is the full cell integral; exact for polynomials up to the
    sample degree, spectrally accurate for smooth integrands.
    """
    coeffs = series_coeffs(fvals)
    anti = _cheb.chebint(coeffs, lbnd=-1.0)
    partials = _cheb.chebval(xs, anti) * (b - a) / 2.0
    return partials, partials[-1]
