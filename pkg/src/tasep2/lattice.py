"""Ring configurations, particle-number sectors, and the stochastic generator.

The two-species totally asymmetric exclusion process on Z/LZ has local states
A (first class), B (second class) and vacancy 0, encoded as base-3 digits
A=0 < B=1 < 0=2.  With right rate Gamma_R and left rate Gamma_L the allowed
exchanges of a bond (j, j+1) holding the ordered pair (g, d) are

    g < d : (g, d) -> (d, g) at Gamma_R      (A0->0A, B0->0B, AB->BA)
    g > d : (g, d) -> (d, g) at Gamma_L

The master equation dp/dt = -H p fixes the matrix convention used throughout:
H[c', c] = -rate(c -> c') off the diagonal, H[c, c] = total escape rate, so
every column sums to zero and the totally asymmetric diagonal counts the
allowed moves out of a configuration.
"""

from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.sparse as sp

from . import _kernels

SPECIES_A = 0
SPECIES_B = 1
VACANCY = 2
SPECIES_CHARS = "AB0"


def _multinomial(length, n_a, n_b):
    return factorial(length) // (
        factorial(n_a) * factorial(n_b) * factorial(length - n_a - n_b)
    )


@dataclass(frozen=True)
class DiffusionRates:
    """Hop rates; q and d are defined only for gamma_left > 0."""

    gamma_right: float
    gamma_left: float

    def __post_init__(self):
        if self.gamma_right < 0 or self.gamma_left < 0:
            raise ValueError("hop rates must be nonnegative")
        if self.gamma_right == 0 and self.gamma_left == 0:
            raise ValueError("at least one hop rate must be positive")

    @property
    def q(self):
        if self.gamma_left <= 0:
            raise ValueError("q = sqrt(gamma_right/gamma_left) needs gamma_left > 0")
        return np.sqrt(self.gamma_right / self.gamma_left)

    @property
    def d(self):
        if self.gamma_left <= 0:
            raise ValueError("d = sqrt(gamma_right*gamma_left) needs gamma_left > 0")
        return np.sqrt(self.gamma_right * self.gamma_left)


@dataclass(frozen=True)
class Sector:
    """Conserved-number block: n_a first-class and n_b second-class particles."""

    length: int
    n_a: int
    n_b: int
    momentum: int | None = None

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if self.n_a < 0 or self.n_b < 0 or self.n_a + self.n_b > self.length:
            raise ValueError(
                f"invalid sector counts ({self.n_a}, {self.n_b}) for L={self.length}"
            )
        if self.momentum is not None and not 0 <= self.momentum < self.length:
            raise ValueError("momentum must lie in [0, length)")

    @property
    def n_vac(self):
        return self.length - self.n_a - self.n_b

    @property
    def dimension(self):
        return _multinomial(self.length, self.n_a, self.n_b)


@dataclass(frozen=True)
class RingConfiguration:
    """Occupation state of the ring; round-trips with its base-3 packed code."""

    sites: tuple

    def __post_init__(self):
        if not self.sites:
            raise ValueError("empty configuration")
        if any(s not in (SPECIES_A, SPECIES_B, VACANCY) for s in self.sites):
            raise ValueError("site states must be in {0, 1, 2}")

    @classmethod
    def from_packed(cls, packed, length):
        sites = []
        for _ in range(length):
            sites.append(packed % 3)
            packed //= 3
        return cls(tuple(reversed(sites)))

    @property
    def packed_index(self):
        length = len(self.sites)
        return sum(s * 3 ** (length - 1 - j) for j, s in enumerate(self.sites))

    def translate(self, steps=1):
        """Cyclic shift moving each site's content `steps` places to the right."""
        length = len(self.sites)
        steps %= length
        return RingConfiguration(self.sites[-steps:] + self.sites[:-steps])

    def __str__(self):
        return "".join(SPECIES_CHARS[s] for s in self.sites)


@dataclass
class SectorGenerator:
    """Sparse generator block: sorted duplicate-free COO triplets."""

    sector: Sector | None
    dimension: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    packs: np.ndarray = field(repr=False)

    def to_csr(self):
        return sp.csr_matrix(
            (self.vals, (self.rows, self.cols)),
            shape=(self.dimension, self.dimension),
        )

    def to_dense(self):
        return self.to_csr().toarray()

    def column_sums(self):
        return np.asarray(self.to_csr().sum(axis=0)).ravel()

    def export_coo(self, stream):
        """One `row col re im` line per entry, 0-based, 17 significant digits."""
        for r, c, v in zip(self.rows, self.cols, self.vals):
            v = complex(v)
            stream.write(f"{r} {c} {v.real:.17g} {v.imag:.17g}\n")


def _sorted_coo(rows, cols, vals, dimension):
    """Deterministic (row, col)-sorted duplicate-free COO."""
    if len(rows) == 0:
        return (np.zeros(0, np.int64), np.zeros(0, np.int64),
                np.zeros(0, vals.dtype if hasattr(vals, "dtype") else np.float64))
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals)
    key = rows * dimension + cols
    order = np.argsort(key, kind="stable")
    key, rows, cols, vals = key[order], rows[order], cols[order], vals[order]
    boundary = np.concatenate(([True], key[1:] != key[:-1]))
    idx = np.flatnonzero(boundary)
    summed = np.add.reduceat(vals, idx)
    keep = summed != 0
    return rows[idx][keep], cols[idx][keep], summed[keep]


def sector_packs(sector):
    """Packed codes of the sector in ascending order."""
    return _kernels.enumerate_packed(sector.length, sector.n_a, sector.n_b)


def enumerate_sector(sector):
    """Ordered list of configurations (ascending packed index)."""
    return [
        RingConfiguration.from_packed(int(x), sector.length)
        for x in sector_packs(sector)
    ]


def _assemble(length, packs, gamma_r, gamma_l, sector):
    rows, cols, vals = _kernels.assemble_moves(
        length, np.asarray(packs, dtype=np.int64), float(gamma_r), float(gamma_l)
    )
    n = len(packs)
    rows, cols, vals = _sorted_coo(rows, cols, vals, n)
    return SectorGenerator(
        sector=sector, dimension=n, rows=rows, cols=cols, vals=vals,
        packs=np.asarray(packs, dtype=np.int64),
    )


def _full_space_packs(length):
    return np.arange(3 ** length, dtype=np.int64)


def build_hamiltonian_general(length, rates, sector=None):
    """Partially asymmetric generator; needs gamma_left > 0 (else use the
    totally asymmetric builder)."""
    if not isinstance(rates, DiffusionRates):
        raise TypeError("rates must be DiffusionRates")
    if rates.gamma_left <= 0:
        raise ValueError(
            "gamma_left = 0 is the totally asymmetric limit; "
            "use build_hamiltonian_tasep"
        )
    if sector is None:
        return _assemble(length, _full_space_packs(length), rates.gamma_right,
                         rates.gamma_left, None)
    if sector.length != length:
        raise ValueError("sector length mismatch")
    return _assemble(length, sector_packs(sector), rates.gamma_right,
                     rates.gamma_left, sector)


def build_hamiltonian_tasep(length, sector=None):
    """Totally asymmetric generator (Gamma_R = 1, Gamma_L = 0)."""
    if length < 2:
        raise ValueError("need at least two sites")
    if sector is None:
        return _assemble(length, _full_space_packs(length), 1.0, 0.0, None)
    if sector.length != length:
        raise ValueError("sector length mismatch")
    return _assemble(length, sector_packs(sector), 1.0, 0.0, sector)


def translation_permutation(gen):
    """perm with perm[i] = index of the right-translated configuration i."""
    packs = gen.packs
    length = _length_of(gen)
    out = np.empty(len(packs), dtype=np.int64)
    lookup = {int(x): i for i, x in enumerate(packs)}
    for i, x in enumerate(packs):
        out[i] = lookup[_kernels.translate_packed(int(x), length)]
    return out


def _length_of(gen):
    if gen.sector is not None:
        return gen.sector.length
    # full space: dimension = 3**L
    length = int(round(np.log(gen.dimension) / np.log(3)))
    if 3 ** length != gen.dimension:
        raise ValueError("cannot infer ring length from generator dimension")
    return length


def project_momentum(gen, k):
    """Block of the generator on the translation eigenspace exp(2 pi i k / L).

    Basis vectors are normalized sums over translation orbits; an orbit of
    period d contributes to momentum k iff k*d = 0 mod L.
    """
    length = _length_of(gen)
    if not 0 <= k < length:
        raise ValueError("momentum out of range")
    packs = gen.packs
    rep, shift, period = _kernels.orbit_table(length, packs)
    is_rep = rep == np.arange(len(packs))
    keep = is_rep & ((k * period) % length == 0)
    rep_rows = np.flatnonzero(keep)
    block_index = {int(r): a for a, r in enumerate(rep_rows)}
    n = len(rep_rows)
    omega = np.exp(2j * np.pi * k / length)

    rows_out, cols_out, vals_out = [], [], []
    csr = gen.to_csr().tocsc()
    for a, r in enumerate(rep_rows):
        col = csr.getcol(int(r))
        d_a = period[r]
        for t, v in zip(col.indices, col.data):
            b_rep = rep[t]
            if b_rep not in block_index:
                continue  # target orbit incompatible with this momentum
            b = block_index[b_rep]
            d_b = period[t]
            phase = omega ** int(shift[t])
            rows_out.append(b)
            cols_out.append(a)
            vals_out.append(v * np.sqrt(d_a / d_b) * phase)
    rows_out, cols_out, vals_out = _sorted_coo(
        np.array(rows_out, dtype=np.int64),
        np.array(cols_out, dtype=np.int64),
        np.array(vals_out, dtype=complex),
        n,
    )
    sec = gen.sector
    new_sector = None
    if sec is not None:
        new_sector = Sector(sec.length, sec.n_a, sec.n_b, momentum=k)
    return SectorGenerator(
        sector=new_sector, dimension=n, rows=rows_out, cols=cols_out,
        vals=vals_out, packs=packs[rep_rows],
    )


def all_sectors(length):
    """Every (n_a, n_b) sector of the ring."""
    out = []
    for n_a in range(length + 1):
        for n_b in range(length + 1 - n_a):
            out.append(Sector(length, n_a, n_b))
    return out
