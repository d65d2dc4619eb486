"""Generative model of correlated readout noise, used as ground truth.

Each prepared register state x' produces an exact outcome distribution

    p(x|x') = prod_i m_i(x_i|x')
            + sum_{i<j} (-1)^(x_i+x_j) c_ij(x') prod_{l != i,j} m_l(x_l|x')
            + sum_{i<j<k} (-1)^(x_i+x_j+x_k) g_ijk prod_{l not in ijk} m_l(x_l|x')

where m_i(0|x') = base_i(0|x'_i) - sum_j shift[i][j] * x'_j is the
probability that qubit i reads 0, and c_ij(x') = cov[i][j](x'_i, x'_j)
+ sum_l spectator_cov[i][j][l] * x'_l is a signed pair covariance. The
signed pair and triple terms each sum to zero over outcomes, so every
column is automatically normalized; nonnegativity is checked at
construction by full enumeration.

The shift sign is chosen so that shift[i][j] equals the drop of qubit i's
P(read 0) when prepared spectator j is flipped to 1, i.e. exactly the
spectator-shift correlator measured by :mod:`spamcal.characterize`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bits import BitString
from .errors import ValidationError
from .geometry import RegisterGeometry
from .norms import check_column_stochastic
from .serialize import dump_json, load_json
from .tmatrix import TransitionMatrix

ORACLE_LIMIT_DEFAULT = 12


def _signed_kron(factors) -> np.ndarray:
    v = np.ones(1)
    for f in factors:
        v = np.kron(v, f)
    return v


@dataclass
class NoiseModel:
    """Per-qubit readout matrices plus sparse correlated terms.

    shifts:         {(i, j): float}   spectator shift of qubit i from qubit j
    pair_cov:       {(i, j): 2x2 array over prepared bits (x'_i, x'_j)}
    spectator_cov:  {(i, j, l): float} linear spectator term of c_ij
    triples:        {(i, j, k): float} constant signed triple weight
    shift_range:    Chebyshev range bound declared for shifts
    cov_range:      Chebyshev range bound declared for spectator_cov
    """

    geometry: RegisterGeometry
    base: np.ndarray
    shifts: dict = field(default_factory=dict)
    pair_cov: dict = field(default_factory=dict)
    spectator_cov: dict = field(default_factory=dict)
    triples: dict = field(default_factory=dict)
    shift_range: int = 0
    cov_range: int = 0

    def __post_init__(self):
        n = self.geometry.n
        self.base = np.asarray(self.base, dtype=float)
        if self.base.shape != (n, 2, 2):
            raise ValidationError(
                f"expected {n} single-qubit 2x2 matrices, got shape {self.base.shape}"
            )
        for i in range(n):
            check_column_stochastic(self.base[i], tol=1e-9)
        self.pair_cov = {
            k: np.asarray(v, dtype=float).reshape(2, 2)
            for k, v in self.pair_cov.items()
        }
        self._check_indices()
        self._check_ranges()
        if n <= ORACLE_LIMIT_DEFAULT:
            self._check_columns()

    @property
    def n(self) -> int:
        return self.geometry.n

    def _check_indices(self):
        n = self.n
        for (i, j) in self.shifts:
            if not (1 <= i <= n and 1 <= j <= n) or i == j:
                raise ValidationError(f"bad shift index pair {(i, j)}")
        for (i, j) in self.pair_cov:
            if not (1 <= i < j <= n):
                raise ValidationError(f"pair_cov keys need i < j, got {(i, j)}")
        for (i, j, l) in self.spectator_cov:
            if not (1 <= i < j <= n) or l in (i, j) or not 1 <= l <= n:
                raise ValidationError(f"bad spectator_cov index {(i, j, l)}")
        for (i, j, k) in self.triples:
            if not (1 <= i < j < k <= n):
                raise ValidationError(f"triple keys need i < j < k, got {(i, j, k)}")

    def _check_ranges(self):
        for (i, j), v in self.shifts.items():
            if v != 0.0 and self.geometry.chebyshev(i, j) > self.shift_range:
                raise ValidationError(
                    f"shift[{i},{j}]={v} exceeds declared range {self.shift_range}"
                )
        for (i, j, l), v in self.spectator_cov.items():
            d = min(self.geometry.chebyshev(i, l), self.geometry.chebyshev(j, l))
            if v != 0.0 and d > self.cov_range:
                raise ValidationError(
                    f"spectator_cov[{i},{j},{l}]={v} exceeds declared "
                    f"range {self.cov_range}"
                )

    def _check_columns(self):
        for c in range(1 << self.n):
            xprime = BitString.from_index(c, self.n)
            p = self.column(xprime)
            if np.min(p) < -1e-12:
                bad = int(np.argmin(p))
                raise ValidationError(
                    f"model gives negative probability p({BitString.from_index(bad, self.n)}"
                    f"|{xprime}) = {np.min(p)}"
                )
            if abs(p.sum() - 1.0) > 1e-12:
                raise ValidationError(
                    f"column {xprime} sums to {p.sum()}, expected 1"
                )

    def read0(self, i: int, xprime: BitString) -> float:
        """m_i(0|x'): probability that qubit i reads 0."""
        m = self.base[i - 1][0, xprime.bit(i)]
        for (a, b), v in self.shifts.items():
            if a == i and xprime.bit(b):
                m -= v
        return float(m)

    def pair_value(self, i: int, j: int, xprime: BitString) -> float:
        """c_ij(x'): signed pair covariance weight for i < j."""
        c = 0.0
        if (i, j) in self.pair_cov:
            c += float(self.pair_cov[(i, j)][xprime.bit(i), xprime.bit(j)])
        for (a, b, l), v in self.spectator_cov.items():
            if (a, b) == (i, j) and xprime.bit(l):
                c += v
        return c

    def means(self, xprime: BitString) -> np.ndarray:
        """(n, 2) array of m_i(x_i|x') for both outcomes."""
        m = np.empty((self.n, 2))
        for i in range(1, self.n + 1):
            m0 = self.read0(i, xprime)
            m[i - 1] = (m0, 1.0 - m0)
        return m

    def column(self, xprime: BitString) -> np.ndarray:
        """The exact outcome distribution for one prepared state."""
        m = self.means(xprime)
        p = _signed_kron(m)
        sign = np.array([1.0, -1.0])
        pairs = set(self.pair_cov) | {(i, j) for (i, j, _l) in self.spectator_cov}
        for (i, j) in sorted(pairs):
            c = self.pair_value(i, j, xprime)
            if c == 0.0:
                continue
            factors = [
                sign if l in (i, j) else m[l - 1] for l in range(1, self.n + 1)
            ]
            p = p + c * _signed_kron(factors)
        for (i, j, k), g in sorted(self.triples.items()):
            if g == 0.0:
                continue
            factors = [
                sign if l in (i, j, k) else m[l - 1] for l in range(1, self.n + 1)
            ]
            p = p + g * _signed_kron(factors)
        return p

    def full_matrix(self, limit: int = ORACLE_LIMIT_DEFAULT) -> TransitionMatrix:
        """Exhaustive transition matrix over all 2^n prepared states."""
        if self.n > limit:
            raise ValidationError(
                f"full enumeration of n={self.n} needs O(4^n) work; "
                f"the oracle limit is {limit}"
            )
        dim = 1 << self.n
        t = np.empty((dim, dim))
        for c in range(dim):
            t[:, c] = self.column(BitString.from_index(c, self.n))
        return TransitionMatrix(self.n, t)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dimension": self.geometry.dimension,
            "positions": [list(p) for p in self.geometry.positions],
            "base": self.base.tolist(),
            "shifts": {f"{i},{j}": v for (i, j), v in sorted(self.shifts.items())},
            "shift_range": self.shift_range,
            "pair_cov": {
                f"{i},{j}": v.tolist() for (i, j), v in sorted(self.pair_cov.items())
            },
            "spectator_cov": {
                f"{i},{j},{l}": v
                for (i, j, l), v in sorted(self.spectator_cov.items())
            },
            "cov_range": self.cov_range,
            "triples": {
                f"{i},{j},{k}": v for (i, j, k), v in sorted(self.triples.items())
            },
        }

    def to_json(self, path=None) -> str:
        return dump_json(self.to_dict(), path)

    @classmethod
    def from_dict(cls, obj) -> "NoiseModel":
        def keys(s, parts):
            return tuple(int(x) for x in s.split(","))[:parts]

        geometry = RegisterGeometry(
            int(obj["n"]),
            int(obj["dimension"]),
            tuple(tuple(int(c) for c in p) for p in obj["positions"]),
        )
        return cls(
            geometry=geometry,
            base=np.asarray(obj["base"], dtype=float),
            shifts={keys(s, 2): float(v) for s, v in obj.get("shifts", {}).items()},
            pair_cov={
                keys(s, 2): np.asarray(v, dtype=float)
                for s, v in obj.get("pair_cov", {}).items()
            },
            spectator_cov={
                keys(s, 3): float(v)
                for s, v in obj.get("spectator_cov", {}).items()
            },
            triples={
                keys(s, 3): float(v) for s, v in obj.get("triples", {}).items()
            },
            shift_range=int(obj.get("shift_range", 0)),
            cov_range=int(obj.get("cov_range", 0)),
        )

    @classmethod
    def from_json(cls, path) -> "NoiseModel":
        return cls.from_dict(load_json(path))


# -- presets ---------------------------------------------------------------

_C4_BASE = [
    [[0.996, 0.099], [0.004, 0.901]],  # Q14
    [[0.940, 0.125], [0.060, 0.875]],  # Q13
    [[0.986, 0.051], [0.014, 0.949]],  # Q12
    [[0.999, 0.063], [0.001, 0.937]],  # Q11
]

_C8_BASE = [
    [[0.998, 0.097], [0.002, 0.903]],  # Q14
    [[0.940, 0.130], [0.060, 0.870]],  # Q13
    [[0.988, 0.054], [0.012, 0.946]],  # Q12
    [[0.999, 0.061], [0.001, 0.939]],  # Q11
    [[0.970, 0.060], [0.030, 0.940]],  # Q10
    [[0.987, 0.080], [0.013, 0.920]],  # Q9
    [[0.692, 0.329], [0.308, 0.671]],  # Q8
    [[0.997, 0.131], [0.003, 0.869]],  # Q7
]


def identity_model(n: int) -> NoiseModel:
    base = np.tile(np.eye(2), (n, 1, 1))
    return NoiseModel(RegisterGeometry.chain(n), base)


def melbourne_c4() -> NoiseModel:
    """4-qubit chain with measured single-qubit matrices, the large
    nonlocal spectator shift of the last qubit, and a small pair covariance."""
    cov = 2.0e-4 * np.ones((2, 2))
    return NoiseModel(
        RegisterGeometry.chain(4),
        np.asarray(_C4_BASE),
        shifts={(4, 1): 0.047},
        shift_range=3,
        pair_cov={(2, 3): cov},
    )


def melbourne_c4_product() -> NoiseModel:
    """The uncorrelated version of :func:`melbourne_c4`."""
    return NoiseModel(RegisterGeometry.chain(4), np.asarray(_C4_BASE))


def melbourne_c8() -> NoiseModel:
    cov = 1.9e-4 * np.ones((2, 2))
    return NoiseModel(
        RegisterGeometry.chain(8),
        np.asarray(_C8_BASE),
        shifts={(4, 1): 0.049},
        shift_range=3,
        pair_cov={(3, 5): cov},
    )


PRESETS = {
    "melbourne-c4": melbourne_c4,
    "melbourne-c4-product": melbourne_c4_product,
    "melbourne-c8": melbourne_c8,
}
