"""Vectorised adaptive Simpson quadrature for vector-valued integrands."""
from __future__ import annotations

import numpy as np

from .errors import AccuracyError


ROUNDOFF = 64 * np.finfo(float).eps


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, initial: int = 8, max_depth: int = 40,
                     max_panels: int = 1 << 16):
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    ``f`` maps a 1-d array of abscissae to an array of shape ``(n, m)``;
    all ``m`` components share the refinement, and a panel is accepted only
    when its worst component passes the Richardson test.  Every level of
    the refinement is evaluated in one batched call.

    A panel whose error estimate is already at the rounding level of its
    own contribution is accepted too, since halving it further cannot help.
    More than ``max_panels`` live panels raise :class:`AccuracyError`.
    """
    if a == b:
        return np.zeros(np.shape(f(np.array([a])))[1:])
    x = np.linspace(a, b, 2 * initial + 1)
    fx = np.asarray(f(x))
    left, mid, right = x[0:-1:2], x[1::2], x[2::2]
    fl, fm, fr = fx[0:-1:2], fx[1::2], fx[2::2]
    whole = (right - left)[:, None] / 6 * (fl + 4 * fm + fr)
    ptol = np.full(initial, tol / initial)
    total = np.zeros(fx.shape[1:], dtype=fx.dtype)
    for _ in range(max_depth):
        lm, rm = 0.5 * (left + mid), 0.5 * (mid + right)
        fnew = np.asarray(f(np.concatenate([lm, rm])))
        flm, frm = fnew[: len(lm)], fnew[len(lm):]
        sl = (mid - left)[:, None] / 6 * (fl + 4 * flm + fm)
        sr = (right - mid)[:, None] / 6 * (fm + 4 * frm + fr)
        err = sl + sr - whole
        floor = ROUNDOFF * (np.abs(sl) + np.abs(sr)).max(axis=1)
        ok = np.abs(err).max(axis=1) <= 15 * np.maximum(ptol, floor)
        total = total + (sl[ok] + sr[ok] + err[ok] / 15).sum(axis=0)
        todo = ~ok
        if not todo.any():
            return total
        if 2 * todo.sum() > max_panels:
            raise AccuracyError(f"adaptive Simpson needs more than {max_panels} panels for tol={tol:g} on [{a}, {b}]")
        # split every unfinished panel into its two halves
        left = np.concatenate([left[todo], mid[todo]])
        right = np.concatenate([mid[todo], right[todo]])
        newmid = np.concatenate([lm[todo], rm[todo]])
        fl, fr = np.concatenate([fl[todo], fm[todo]]), np.concatenate([fm[todo], fr[todo]])
        fm = np.concatenate([flm[todo], frm[todo]])
        whole = np.concatenate([sl[todo], sr[todo]])
        ptol = np.concatenate([ptol[todo], ptol[todo]]) / 2
        mid = newmid
    raise AccuracyError(f"adaptive Simpson did not reach tol={tol:g} on [{a}, {b}] within depth {max_depth}")
