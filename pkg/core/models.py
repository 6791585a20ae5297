"""
Domain Layer: Value types for the dp3asym toolkit.
Every type is an immutable dataclass; services build new values instead of
mutating existing ones, so any instance can be shared between threads.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
import math

import numpy as np

from core.exceptions import InvalidParameters, InadmissibleLabel


class Family(str, Enum):
    """Coefficient families produced by the coefficient service."""
    U = 'U'
    W = 'W'
    ETA = 'ETA'
    R = 'R'
    D = 'D'
    HTILDE = 'HTILDE'
    NU_TILDE = 'NU_TILDE'
    MU_STAR = 'MU_STAR'
    P_STAR = 'P_STAR'
    U_HAT = 'U_HAT'
    W_HAT = 'W_HAT'
    ETA_HAT = 'ETA_HAT'
    R_HAT = 'R_HAT'
    D_HAT = 'D_HAT'
    HSTAR_HAT = 'HSTAR_HAT'
    NU_HAT = 'NU_HAT'
    MU_HAT = 'MU_HAT'
    P_HAT = 'P_HAT'


class Axis(str, Enum):
    REAL = 'REAL'
    IMAGINARY = 'IMAGINARY'


class Case(str, Enum):
    CASE_I = 'CASE_I'
    CASE_II_KPLUS = 'CASE_II_kplus'
    CASE_III_KMINUS = 'CASE_III_kminus'


class Quantity(str, Enum):
    U = 'u'
    U_PRIME = 'u_prime'
    F_MINUS = 'f_minus'
    F_PLUS = 'f_plus'
    H = 'H'
    SIGMA = 'sigma'
    PHI = 'phi'


def _check_k(k):
    if k not in (1, -1):
        raise InvalidParameters(f'branch index k must be +1 or -1, got {k!r}')
    return k


@dataclass(frozen=True)
class Parameters:
    """
    The triple (a, b, ε) of the DP3E together with the phase labels of εb.

    εb has to be real: eps2 is 0 when εb > 0 and ±1 when εb < 0, so that
    εb·e^{−iπ eps2} is always positive. eps2_hat plays the same role for the
    imaginary-axis formulas.
    """
    a: complex
    b: complex
    epsilon: int = 1
    eps2: int = None
    eps2_hat: int = None

    def __post_init__(self):
        object.__setattr__(self, 'a', complex(self.a))
        object.__setattr__(self, 'b', complex(self.b))
        if self.b == 0:
            raise InvalidParameters('b must be nonzero')
        if self.epsilon not in (1, -1):
            raise InvalidParameters(f'epsilon must be +1 or -1, got {self.epsilon!r}')
        eb = self.epsilon * self.b
        if abs(eb.imag) > 1e-14 * abs(eb):
            raise InvalidParameters(f'epsilon*b must be real, got {eb}')
        default = 0 if eb.real > 0 else 1
        for name in ('eps2', 'eps2_hat'):
            value = getattr(self, name)
            if value is None:
                value = default
                object.__setattr__(self, name, value)
            if value not in (0, 1, -1):
                raise InvalidParameters(f'{name} must be 0 or +-1, got {value!r}')
            if (value == 0) != (eb.real > 0):
                raise InvalidParameters(
                    f'{name}={value} is inconsistent with epsilon*b={eb.real:g}'
                )

    @property
    def eb(self):
        """εb as a real number."""
        return (self.epsilon * self.b).real

    @property
    def is_resonant(self):
        """True when i·a is an integer (the algebraic-solution case)."""
        ia = 1j * self.a
        return abs(ia.imag) < 1e-12 and abs(ia.real - round(ia.real)) < 1e-12

    def with_a(self, a):
        return replace(self, a=a)

    def as_dict(self):
        return {
            'a': self.a,
            'b': self.b,
            'epsilon': self.epsilon,
            'eps2': self.eps2,
            'eps2_hat': self.eps2_hat,
        }


@dataclass(frozen=True)
class DerivedConstants:
    """Branch-resolved constants for one (Parameters, k) pair."""
    k: int
    cbrt_eb: float
    sixth_root_eb: complex
    alpha_k: complex
    c0k: complex
    K: complex
    P_a: complex
    theta_coeff: complex
    beta_coeff: complex


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients of one family, stored with their native index origin."""
    family: Family
    k: int
    values: tuple
    params: Parameters
    eps_labels: tuple = (0, 0)
    resonant: bool = False

    def __getitem__(self, m):
        return self.values[m]

    def __len__(self):
        return len(self.values)

    @property
    def N(self):
        return len(self.values) - 1

    def as_array(self):
        return np.array(self.values, dtype=complex)


@dataclass(frozen=True)
class MonodromyPoint:
    """A point (a, s00, s0inf, s1inf, g11, g12, g21, g22) of the monodromy manifold."""
    a: complex
    s00: complex
    s0inf: complex
    s1inf: complex
    g11: complex
    g12: complex
    g21: complex
    g22: complex

    FIELDS = ('a', 's00', 's0inf', 's1inf', 'g11', 'g12', 'g21', 'g22')

    def __post_init__(self):
        for name in self.FIELDS:
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def g(self):
        return np.array([[self.g11, self.g12], [self.g21, self.g22]], dtype=complex)

    @property
    def g_scale(self):
        return max(abs(self.g11), abs(self.g12), abs(self.g21), abs(self.g22))

    def as_dict(self):
        return {name: getattr(self, name) for name in self.FIELDS}

    @classmethod
    def from_dict(cls, data):
        return cls(**{name: data[name] for name in cls.FIELDS})


@dataclass(frozen=True)
class SymmetryLabel:
    """
    (ε1, ε2, m(ε2) | ℓ) for the real-axis maps, or the hatted
    (ε̂1, ε̂2, m̂(ε̂2) | ℓ̂) for the imaginary-axis maps.
    """
    hatted: bool
    eps1: int
    eps2: int
    m_eps2: int
    ell: int

    def __post_init__(self):
        if not self.is_admissible():
            raise InadmissibleLabel(f'{self} is not an admissible symmetry label')

    def is_admissible(self):
        if self.ell not in (0, 1):
            return False
        if self.hatted:
            if self.eps1 not in (1, -1):
                return False
            if self.eps2 == 0:
                return self.m_eps2 in (1, -1)
            return self.eps2 in (1, -1) and self.m_eps2 == 0
        if self.eps1 not in (0, 1, -1) or self.eps2 not in (0, 1, -1):
            return False
        if self.eps2 == 0:
            return self.m_eps2 == 0
        return self.m_eps2 in (1, -1)

    @property
    def key(self):
        return (int(self.hatted), self.ell, self.eps1, self.eps2, self.m_eps2)

    def __str__(self):
        prefix = '^' if self.hatted else ''
        return f'{prefix}({self.eps1},{self.eps2},{self.m_eps2}|{self.ell})'

    @classmethod
    def parse(cls, text):
        """Parse '(1,0,0|0)', '1,0,0|0' or the hatted '^(1,0,-1|0)'."""
        raw = text.strip()
        hatted = raw.startswith('^')
        raw = raw.lstrip('^').strip('()[] ')
        try:
            head, ell = raw.split('|')
            eps1, eps2, m_eps2 = (int(part) for part in head.split(','))
            ell = int(ell)
        except ValueError as exc:
            raise InadmissibleLabel(f'cannot parse symmetry label {text!r}') from exc
        return cls(hatted, eps1, eps2, m_eps2, ell)


@dataclass(frozen=True)
class CaseTag:
    case: Case
    k: int = None


@dataclass(frozen=True)
class RegimeLabel:
    """
    Ray and label data selecting one trans-series formula set.

    axis REAL uses ε1 ∈ {0, ±1}; axis IMAGINARY uses ε̂1 ∈ {±1} and the
    variable τ* = τ·e^{−iπε̂1/2}.
    """
    axis: Axis
    eps1: int
    eps2: int
    m_eps2: int
    ell: int
    k: int

    def __post_init__(self):
        _check_k(self.k)
        # Raises InadmissibleLabel for inconsistent tuples.
        self.symmetry_label()

    @classmethod
    def base(cls, k=1):
        return cls(Axis.REAL, 0, 0, 0, 0, k)

    @property
    def hatted(self):
        return self.axis == Axis.IMAGINARY

    @property
    def s(self):
        """(−1)^{ε2}, or (−1)^{ε̂2} on the imaginary axis."""
        return -1 if self.eps2 % 2 else 1

    def symmetry_label(self):
        return SymmetryLabel(self.hatted, self.eps1, self.eps2, self.m_eps2, self.ell)

    def rotation(self):
        """The ray rotation μ with t = τ/μ and u(τ) = U(t)/μ."""
        if self.hatted:
            return complex(np.exp(0.5j * np.pi * self.eps1))
        return complex(np.exp(1j * np.pi * self.eps1))

    def to_t(self, tau):
        return complex(tau) / self.rotation()

    def __str__(self):
        return f'{self.axis.value}{self.symmetry_label()} k={self.k:+d}'


@dataclass(frozen=True)
class TransSeriesEval:
    tau: complex
    power_part: complex
    exp_part: complex
    total: complex
    order_N: int
    next_term_proxy: float
    exp_magnitude: float
    quantity: Quantity = Quantity.U
    mod_2pi: bool = False

    @classmethod
    def build(cls, tau, power_part, exp_part, order_N, next_term_proxy, exp_magnitude,
              quantity=Quantity.U, mod_2pi=False):
        return cls(
            tau=complex(tau),
            power_part=complex(power_part),
            exp_part=complex(exp_part),
            total=complex(power_part) + complex(exp_part),
            order_N=int(order_N),
            next_term_proxy=float(next_term_proxy),
            exp_magnitude=float(exp_magnitude),
            quantity=quantity,
            mod_2pi=mod_2pi,
        )


@dataclass(frozen=True)
class AmplitudeA:
    value: complex
    k: int
    s00: complex
    regime: RegimeLabel


@dataclass(frozen=True)
class IntegratorStats:
    steps: int
    rejected: int
    nfev: int
    status: str
    message: str = ''


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Numerical solution of the DP3E with the derived quantities sampled on tau_grid."""
    tau_grid: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray
    phi: np.ndarray
    H: np.ndarray
    f_minus: np.ndarray
    f_plus: np.ndarray
    sigma: np.ndarray
    stats: IntegratorStats
    pair: tuple = (0j, 0j)
    truncated: bool = False
    diagnostic: str = ''


@dataclass(frozen=True)
class ManifoldReport:
    residuals: tuple
    scaled: tuple
    tol: float
    passed: bool

    NAMES = ('det', 'product', 'cross', 'quad1', 'quad2')

    @property
    def max_residual(self):
        return max(self.scaled)


@dataclass(frozen=True)
class CompositionReport:
    lhs: SymmetryLabel
    rhs_chain: tuple
    passed: bool
    sign: int
    deltas: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    intercept: float
    saturated: bool


@dataclass(frozen=True)
class ResidualReport:
    quantity: str
    tau_points: tuple
    residuals: tuple
    fitted_decay_exponent: float
    expected_exponent: float
    passed: bool
    tolerance: float = 0.0
    details: dict = field(default_factory=dict)
    trajectory: object = field(default=None, compare=False, repr=False, metadata={'export': False})


@dataclass(frozen=True)
class TauSpec:
    """A single τ (count 1) or a geometric ladder from start to stop."""
    start: complex
    stop: complex = None
    count: int = 1

    def values(self):
        if self.count <= 1 or self.stop is None:
            return [complex(self.start)]
        start, stop = complex(self.start), complex(self.stop)
        ratio = (stop / start) ** (1.0 / (self.count - 1))
        return [start * ratio ** j for j in range(self.count)]


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: Parameters = None
    regime: RegimeLabel = None
    monodromy: MonodromyPoint = None
    case: Case = None
    s00: complex = None
    N: object = 12
    tau_spec: TauSpec = None
    output_path: str = None
    output_format: str = 'json'
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)


def is_close(x, y, rel=1e-12, floor=1e-14):
    """Relative comparison with an absolute floor."""
    return abs(x - y) <= max(rel * max(abs(x), abs(y)), floor)


def principal_angle(value):
    """Shift the real part of value into (−π, π]."""
    value = complex(value)
    shift = 2 * math.pi * math.floor((math.pi - value.real) / (2 * math.pi))
    return complex(value.real + shift, value.imag)


@dataclass(frozen=True)
class RunResult:
    """Outcome of one cli run: exit code, the document and its rendered text."""
    exit_code: int
    document: dict
    text: str
    output_path: str = None
