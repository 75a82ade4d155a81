"""Eigenvalues of sector generators: steady state and relaxation gap.

The generator is non-Hermitian; its spectrum lies in the closed right half
plane with a simple zero eigenvalue per ergodic sector.  The gap is the
eigenvalue of smallest strictly positive real part (for a conjugate pair the
representative with Im >= 0 is reported; only Re enters the scaling law).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

ZERO_TOL = 1e-10
DENSE_LIMIT = 4000


class ConvergenceError(RuntimeError):
    """Krylov iteration did not reach the requested residual."""


@dataclass
class SpectrumResult:
    sector: object
    eigenvalues: np.ndarray
    gap: complex | None
    method: str
    zero_count: int = 0

    def export_spectrum(self, stream):
        """One `re im` pair per line, 17 significant digits."""
        for ev in self.eigenvalues:
            stream.write(f"{ev.real:.17g} {ev.imag:.17g}\n")

    def summary(self):
        sec = self.sector
        return {
            "L": None if sec is None else sec.length,
            "n_A": None if sec is None else sec.n_a,
            "n_B": None if sec is None else sec.n_b,
            "k": None if sec is None else sec.momentum,
            "gap_re": None if self.gap is None else self.gap.real,
            "gap_im": None if self.gap is None else self.gap.imag,
            "method": self.method,
        }


def _sorted_eigs(vals):
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


def _pick_gap(vals, zero_tol):
    pos = vals[vals.real > zero_tol]
    if len(pos) == 0:
        return None
    gmin = np.min(pos.real)
    cands = pos[np.abs(pos.real - gmin) <= max(zero_tol, 1e-12 * max(gmin, 1.0))]
    up = cands[cands.imag >= -zero_tol]
    pick = up[np.argmin(up.imag)] if len(up) else cands[np.argmax(cands.imag)]
    if abs(pick.imag) <= zero_tol:
        pick = complex(pick.real, 0.0)
    return complex(pick)


def dense_spectrum(gen, zero_tol=ZERO_TOL, dense_limit=DENSE_LIMIT):
    """Full spectrum of one block by LAPACK; refuses oversized blocks."""
    if gen.dimension > dense_limit:
        raise ValueError(
            f"dimension {gen.dimension} exceeds dense limit {dense_limit}; "
            "use krylov_gap"
        )
    mat = gen.to_dense()
    if np.all(np.isreal(mat)):
        mat = mat.real
    vals = scipy.linalg.eigvals(mat) if gen.dimension else np.zeros(0, complex)
    vals = _sorted_eigs(np.asarray(vals, dtype=complex))
    zero_count = int(np.sum(np.abs(vals) <= zero_tol))
    return SpectrumResult(
        sector=gen.sector,
        eigenvalues=vals,
        gap=_pick_gap(vals, zero_tol),
        method="dense",
        zero_count=zero_count,
    )


def krylov_gap(gen, seed=0, n_eigs=8, sigma=1e-3, tol=1e-12,
               residual_tol=1e-10, zero_tol=ZERO_TOL):
    """Gap and nearby eigenvalues by shift-inverted Arnoldi.

    The shift sits just off the known zero mode so the factorized matrix is
    nonsingular; the zero eigenvalue is recovered and discarded.  The start
    vector is drawn from `seed`, and every returned eigenpair is checked
    against `residual_tol` (failure raises, never a silent wrong answer).
    """
    n = gen.dimension
    if n < 3:
        raise ValueError("block too small for Krylov iteration; use dense_spectrum")
    mat = gen.to_csr().tocsc()
    if np.all(np.isreal(gen.vals)):
        mat = mat.real.astype(np.float64)
    k = min(n_eigs, n - 2)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    try:
        lu = spla.splu((mat - sigma * sp.identity(n, dtype=mat.dtype,
                                                  format="csc")).tocsc())
        op = spla.LinearOperator((n, n), matvec=lu.solve, dtype=mat.dtype)
        vals, vecs = spla.eigs(mat, k=k, sigma=sigma, OPinv=op, which="LM",
                               v0=v0, tol=tol)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(
            f"Arnoldi did not converge for dimension {n}: {exc}"
        ) from exc
    resid = np.empty(k)
    for i in range(k):
        v = vecs[:, i]
        resid[i] = np.linalg.norm(mat @ v - vals[i] * v) / np.linalg.norm(v)
    bad = resid > residual_tol
    if np.any(bad):
        raise ConvergenceError(
            f"eigenpair residuals above {residual_tol}: {resid[bad]}"
        )
    vals = _sorted_eigs(np.asarray(vals, dtype=complex))
    zero_count = int(np.sum(np.abs(vals) <= zero_tol))
    return SpectrumResult(
        sector=gen.sector,
        eigenvalues=vals,
        gap=_pick_gap(vals, zero_tol),
        method="krylov",
        zero_count=zero_count,
    )
