"""R-matrix, monodromy and transfer matrix, and the integrability checks.

The R-matrix elements R^{mk}_{il}(theta) are the five-rule table

    R^{aa}_{aa} = e^theta
    R^{ab}_{ba} = 2 sinh theta   (a < b),   0  (a > b)
    R^{ab}_{ab} = e^theta        (a < b),   e^{-theta}  (a > b)

stored as a rank-4 tensor T[m, k, i, l].  Two distinct operator wirings of
the same table are needed, and both are fixed by unambiguous anchors:

* the site vertex [t_ab(theta)]_{ij} = R^{ib}_{aj}, pinned by the action of
  the monodromy matrix on the all-A reference state (A eigenvalue a(theta)^L,
  D_ii eigenvalue c(theta)^L, lower-left entries annihilate);
* the factorization-equation operator Rhat: |l, i> -> R^{mk}_{il} |m, k>,
  pinned by demanding that the Yang-Baxter identity
  Rhat_12(x-y) Rhat_13(x-z) Rhat_23(y-z) = Rhat_23 Rhat_13 Rhat_12 hold
  (it does, to machine precision; other wirings fail).

tau(0) comes out as the one-site translation (a permutation), so the
logarithmic derivative of the transfer matrix is formed with a permutation
transpose instead of a linear solve.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .lattice import build_hamiltonian_tasep


def weight_a(theta):
    return np.exp(theta)


def weight_c(theta):
    return 2.0 * np.sinh(theta)


def fun_g(theta):
    return np.exp(theta) / (2.0 * np.sinh(theta))


def fun_h(theta):
    return 2.0 * np.exp(-theta) * np.sinh(theta)


def r_tensor(theta):
    """Rank-4 element table T[m, k, i, l] = R^{mk}_{il}(theta)."""
    t = np.zeros((3, 3, 3, 3), dtype=complex)
    a = weight_a(theta)
    c = weight_c(theta)
    for al in range(3):
        t[al, al, al, al] = a
        for be in range(3):
            if al < be:
                t[al, be, be, al] = c
                t[al, be, al, be] = a
            elif al > be:
                t[al, be, al, be] = np.exp(-theta)
    return t


@dataclass
class RMatrix:
    theta: complex
    tensor: np.ndarray = field(repr=False)

    @classmethod
    def at(cls, theta):
        return cls(theta=theta, tensor=r_tensor(theta))

    def as_operator(self):
        """9x9 operator |l,i> -> R^{mk}_{il}|m,k> (the YBE wiring)."""
        return np.transpose(self.tensor, (0, 1, 3, 2)).reshape(9, 9)


@dataclass
class NestedWeights:
    """Coefficients of the second-level (six-vertex) commutation algebra."""

    theta: complex

    def coefficients(self):
        th = self.theta
        return {
            (1, 1, 1, 1): 1.0,
            (1, 2, 1, 2): 1.0,
            (2, 1, 1, 2): 2.0 * np.sinh(th) * np.exp(-th),
            (2, 1, 2, 1): np.exp(-2.0 * th),
            (2, 2, 2, 2): 1.0,
        }

    def g(self, theta=None):
        return fun_g(self.theta if theta is None else theta)

    def h(self, theta=None):
        return fun_h(self.theta if theta is None else theta)


_SWAP23 = None


def _swap23():
    global _SWAP23
    if _SWAP23 is None:
        P = np.zeros((27, 27))
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    P[i * 9 + k * 3 + j, i * 9 + j * 3 + k] = 1.0
        _SWAP23 = P
    return _SWAP23


def check_yang_baxter(theta1, theta2, theta3):
    """Max-norm residual of the factorization equation at the given triple."""
    eye = np.eye(3)
    r12 = np.kron(RMatrix.at(theta1 - theta2).as_operator(), eye)
    r23 = np.kron(eye, RMatrix.at(theta2 - theta3).as_operator())
    P = _swap23()
    r13 = P @ np.kron(RMatrix.at(theta1 - theta3).as_operator(), eye) @ P
    lhs = r12 @ r13 @ r23
    rhs = r23 @ r13 @ r12
    return float(np.max(np.abs(lhs - rhs)))


def t_site(theta):
    """Site vertex blocks t[a, b][i, j] = R^{ib}_{aj}(theta)."""
    return np.einsum("ibaj->abij", r_tensor(theta))


@dataclass
class TransferMatrix:
    length: int
    theta: complex
    monodromy: np.ndarray = field(repr=False)  # (3, 3) object array of sparse blocks

    @property
    def matrix(self):
        """tau(theta) = sum_i T_ii as a sparse matrix."""
        return (self.monodromy[0, 0] + self.monodromy[1, 1]
                + self.monodromy[2, 2]).tocsr()

    def block(self, a, b):
        return self.monodromy[a, b].tocsr()


def build_transfer_matrix(length, theta):
    """Monodromy/transfer matrix on the 3^length chain (length <= 8)."""
    if length < 1:
        raise ValueError("length must be positive")
    if length > 8:
        raise ValueError("3^L transfer matrix limited to L <= 8")
    t = t_site(theta)
    ts = [[sp.csr_matrix(t[a, b]) for b in range(3)] for a in range(3)]
    blocks = np.empty((3, 3), dtype=object)
    for a in range(3):
        for b in range(3):
            blocks[a, b] = ts[a][b]
    # the newest site enters as the most significant kron factor, so site 0
    # carries the most significant trit, matching the lattice packing
    for _ in range(length - 1):
        new = np.empty((3, 3), dtype=object)
        for a in range(3):
            for b in range(3):
                acc = None
                for c in range(3):
                    term = sp.kron(ts[c][b], blocks[a, c], format="csr")
                    acc = term if acc is None else acc + term
                new[a, b] = acc
        blocks = new
    return TransferMatrix(length=length, theta=theta, monodromy=blocks)


def transfer_trace(length, theta):
    return build_transfer_matrix(length, theta).matrix


def _invert_tau0(tau0):
    """tau(0) is the one-site translation; invert exactly when detected."""
    dense = np.asarray(tau0.todense())
    is_perm = (
        np.all((np.abs(dense) < 1e-12) | (np.abs(dense - 1) < 1e-12))
        and np.all(np.abs(dense.sum(axis=0) - 1) < 1e-12)
        and np.all(np.abs(dense.sum(axis=1) - 1) < 1e-12)
    )
    if is_perm:
        return np.round(dense.real).T.astype(float), True
    return np.linalg.inv(dense), False


def hamiltonian_from_transfer(length, step=1e-4):
    """d(log tau)/dtheta at theta = 0 as a dense matrix (length <= 6).

    Central differences with one Richardson level; tau(0) inverted by
    permutation transpose (it is the translation operator).
    """
    if length > 6:
        raise ValueError("dense logarithmic derivative limited to L <= 6")
    tau = lambda th: np.asarray(transfer_trace(length, th).todense())
    d1 = (tau(step) - tau(-step)) / (2.0 * step)
    d2 = (tau(step / 2) - tau(-step / 2)) / step
    dtau = (4.0 * d2 - d1) / 3.0
    inv0, _ = _invert_tau0(transfer_trace(length, 0.0))
    return dtau @ inv0


def transfer_hamiltonian_check(length, step=1e-4):
    """Compare d(log tau)/dtheta|_0 with the totally asymmetric generator.

    With K the logarithmic derivative, (length * Id - K) / 2 equals the
    generator entrywise: the derivative carries scale -2 and offset
    length relative to the master-equation convention.  Returns the
    max-norm discrepancy together with that affine convention.
    """
    K = hamiltonian_from_transfer(length, step=step)
    H = build_hamiltonian_tasep(length).to_dense()
    recovered = (length * np.eye(3 ** length) - K) / 2.0
    discrepancy = float(np.max(np.abs(recovered - H)))
    return {
        "length": length,
        "discrepancy": discrepancy,
        "scale": -0.5,
        "offset": length / 2.0,
    }
