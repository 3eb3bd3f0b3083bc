"""Time-stepping kernels for the signal/phonon envelope equations.

Two interchangeable implementations of :func:`advance` live here: a numba
``@njit`` loop and a pure-numpy version vectorised over cells and batch.
``SLOWSBS_BACKEND=numpy`` forces the numpy path; otherwise numba is used
when it imports.

One step on the characteristics-aligned grid (``dz = v_g dt``):

1. transport: every cell takes its left neighbour's value, cell 0 takes the
   boundary input;
2. full mode: each phonon is advanced by the exact exponential solution of
   ``dq/dt = -(gamma/2) q + drive`` with the drive frozen over the step, then
   the signal is kicked by the updated phonons;
   adiabatic mode: the signal is multiplied by the Cayley factor of the local
   rate ``(G - i kappa) dz`` and only the noise part of each phonon is kept.

State arrays have shape ``(batch, nz)`` and are updated in place.
"""

from __future__ import annotations

import math
import os

import numpy as np

FULL = 0
ADIABATIC = 1

# layout of the float64 coefficient vector shared by both backends
(
    C_MODE,
    C_DT,
    C_CU,
    C_CL,
    C_DWU,
    C_DWL,
    C_DECAY,
    C_DRIVE,
    C_SDU,
    C_SDL,
    C_FRE,
    C_FIM,
    C_PERU,
    C_PERL,
) = range(14)
N_COEF = 14


def _reduced_phase(dw, t, period):
    if period > 0.0:
        t = t - period * math.floor(t / period)
    return dw * t


def advance_numpy(psi, q_u, q_l, n0, inp, noise_u, noise_l, out, coef):
    mode = int(coef[C_MODE])
    dt = coef[C_DT]
    c_u = coef[C_CU]
    c_l = coef[C_CL]
    decay = coef[C_DECAY]
    drive = coef[C_DRIVE]
    sd_u = coef[C_SDU]
    sd_l = coef[C_SDL]
    factor = complex(coef[C_FRE], coef[C_FIM])
    use_nu = noise_u.shape[1] > 0
    use_nl = noise_l.shape[1] > 0
    for k in range(inp.shape[0]):
        tm = (n0 + k + 0.5) * dt
        pu = _reduced_phase(coef[C_DWU], tm, coef[C_PERU])
        pl = _reduced_phase(coef[C_DWL], tm, coef[C_PERL])
        eu = complex(math.cos(pu), -math.sin(pu))
        el = complex(math.cos(pl), -math.sin(pl))
        psi[:, 1:] = psi[:, :-1]
        psi[:, 0] = inp[k]
        if mode == FULL:
            q_u *= decay
            q_u += (-1j * c_u * drive * eu) * np.conj(psi)
            q_l *= decay
            q_l += (-1j * c_l * drive * el) * psi
        else:
            q_u *= decay
            q_l *= decay
        if use_nu:
            q_u -= sd_u * noise_u[:, k, :]
        if use_nl:
            q_l -= sd_l * noise_l[:, k, :]
        if mode == ADIABATIC:
            psi *= factor
        psi += (-1j * c_u * dt * eu) * np.conj(q_u) + (-1j * c_l * dt * el.conjugate()) * q_l
        out[:, k] = psi[:, -1]


def _make_numba():
    from numba import njit

    @njit(cache=True, nogil=True)
    def advance_numba(psi, q_u, q_l, n0, inp, noise_u, noise_l, out, coef):
        mode = int(coef[C_MODE])
        dt = coef[C_DT]
        c_u = coef[C_CU]
        c_l = coef[C_CL]
        decay = coef[C_DECAY]
        drive = coef[C_DRIVE]
        sd_u = coef[C_SDU]
        sd_l = coef[C_SDL]
        factor = complex(coef[C_FRE], coef[C_FIM])
        use_nu = noise_u.shape[1] > 0
        use_nl = noise_l.shape[1] > 0
        nb, nz = psi.shape
        for k in range(inp.shape[0]):
            tm = (n0 + k + 0.5) * dt
            per_u = coef[C_PERU]
            per_l = coef[C_PERL]
            tu = tm - per_u * math.floor(tm / per_u) if per_u > 0.0 else tm
            tl = tm - per_l * math.floor(tm / per_l) if per_l > 0.0 else tm
            pu = coef[C_DWU] * tu
            pl = coef[C_DWL] * tl
            eu = complex(math.cos(pu), -math.sin(pu))
            el = complex(math.cos(pl), -math.sin(pl))
            du = -1j * c_u * drive * eu
            dl = -1j * c_l * drive * el
            ku = -1j * c_u * dt * eu
            kl = -1j * c_l * dt * el.conjugate()
            for b in range(nb):
                for j in range(nz - 1, 0, -1):
                    psi[b, j] = psi[b, j - 1]
                psi[b, 0] = inp[k]
                for j in range(nz):
                    p = psi[b, j]
                    qu = q_u[b, j] * decay
                    ql = q_l[b, j] * decay
                    if mode == FULL:
                        qu += du * p.conjugate()
                        ql += dl * p
                    else:
                        p = p * factor
                    if use_nu:
                        qu -= sd_u * noise_u[b, k, j]
                    if use_nl:
                        ql -= sd_l * noise_l[b, k, j]
                    q_u[b, j] = qu
                    q_l[b, j] = ql
                    psi[b, j] = p + ku * qu.conjugate() + kl * ql
                out[b, k] = psi[b, nz - 1]

    return advance_numba


def _select():
    requested = os.environ.get("SLOWSBS_BACKEND", "").strip().lower()
    if requested == "numpy":
        return "numpy", None
    try:
        fn = _make_numba()
    except ImportError:
        if requested == "numba":
            raise
        return "numpy", None
    return "numba", fn


BACKEND, _advance_numba = _select()


def get_advance(backend: str | None = None):
    """Return the step kernel for ``backend`` (default: the active one)."""
    backend = backend or BACKEND
    if backend == "numpy":
        return advance_numpy
    if backend == "numba":
        global _advance_numba
        if _advance_numba is None:
            _advance_numba = _make_numba()
        return _advance_numba
    raise ValueError(f"unknown backend {backend!r}")


def empty_noise(batch: int, nz: int) -> np.ndarray:
    return np.zeros((batch, 0, nz), dtype=np.complex128)
