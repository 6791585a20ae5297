"""
Business Logic Layer: Explicit Symmetry Actions
The 46 explicit maps of the Lie-point symmetry group on the monodromy data
(30 real-axis labels, 16 imaginary-axis labels), with the sign parameters
fixed to +1.

Each action receives a MonodromyInputs view of the input point and returns
(s0inf, s1inf, g11, g12, g21, g22) of the image. The Stokes multiplier s00
never changes and the image value of a is set by the caller.
"""
import numpy as np


class MonodromyInputs:
    """
    Read-only view of one input point with the shorthands used by the
    explicit formulas; e(q) = e^{qπa} for the input a.
    """

    __slots__ = ('a', 's00', 's0', 's1', 'g11', 'g12', 'g21', 'g22', '_cache')

    def __init__(self, point):
        self.a = point.a
        self.s00 = point.s00
        self.s0 = point.s0inf
        self.s1 = point.s1inf
        self.g11 = point.g11
        self.g12 = point.g12
        self.g21 = point.g21
        self.g22 = point.g22
        self._cache = {}

    def e(self, q):
        if q not in self._cache:
            self._cache[q] = complex(np.exp(q * np.pi * self.a))
        return self._cache[q]

    @property
    def X1(self):
        return self.g12 - self.g11 * self.s1 * self.e(2)

    @property
    def X2(self):
        return self.g22 - self.g21 * self.s1 * self.e(2)

    @property
    def Y1(self):
        return self.g21 + self.s00 * self.g11

    @property
    def Y2(self):
        return self.g22 + self.s00 * self.g12

    @property
    def Z1(self):
        return self.g11 + self.s0 * self.g12

    @property
    def Z2(self):
        return self.g21 + self.s0 * self.g22


I = 1j
H = 0.5
Q = 0.25


# ----------------------------------------------------------------------
# Real axis, ℓ = 0
# ----------------------------------------------------------------------

def _r_0_0_0_0(p):
    return p.s0, p.s1, p.g11, p.g12, p.g21, p.g22


def _r_m1_0_0_0(p):
    g11 = -I * p.Y1 * p.e(H)
    g12 = -I * p.Y2 * p.e(-H)
    return (p.s0 * p.e(1), p.s1 * p.e(-1),
            g11, g12, -I * p.g11 * p.e(H), -I * p.g12 * p.e(-H))


def _r_p1_0_0_0(p):
    return (p.s0 * p.e(-1), p.s1 * p.e(1),
            I * p.g21 * p.e(-H), I * p.g22 * p.e(H),
            I * (p.g11 - p.s00 * p.g21) * p.e(-H), I * (p.g12 - p.s00 * p.g22) * p.e(H))


def _swap_s(p):
    return -p.s1 * p.e(1), -p.s0 * p.e(1)


def _r_0_m1_m1_0(p):
    return (*_swap_s(p),
            I * (p.X2 + p.s00 * p.X1) * p.e(-H), -I * p.Y1 * p.e(H),
            I * p.X1 * p.e(-H), -I * p.g11 * p.e(H))


def _r_0_m1_p1_0(p):
    return (*_swap_s(p),
            p.g12 * p.e(H), -p.Z1 * p.e(-H),
            p.g22 * p.e(H), -p.Z2 * p.e(-H))


def _r_0_p1_m1_0(p):
    return (*_swap_s(p),
            p.X1 * p.e(-H), -p.g11 * p.e(H),
            p.X2 * p.e(-H), -p.g21 * p.e(H))


def _r_0_p1_p1_0(p):
    return (*_swap_s(p),
            I * p.g22 * p.e(H), -I * p.Z2 * p.e(-H),
            I * (p.g12 - p.s00 * p.g22) * p.e(H),
            I * (-p.g11 - p.g12 * p.s0 + p.s00 * p.Z2) * p.e(-H))


def _swap_left(p):
    """(s0, s1) -> (−s1, −s0 e(2)) for ε1 = −1."""
    return -p.s1, -p.s0 * p.e(2)


def _swap_right(p):
    """(s0, s1) -> (−s1 e(2), −s0) for ε1 = +1."""
    return -p.s1 * p.e(2), -p.s0


def _r_m1_m1_m1_0(p):
    s2 = 1 + p.s00 ** 2
    return (*_swap_left(p),
            (p.X1 * s2 + p.s00 * p.X2) * p.e(-1),
            -(p.g11 * s2 + p.s00 * p.g21) * p.e(1),
            (p.X2 + p.s00 * p.X1) * p.e(-1),
            -p.Y1 * p.e(1))


def _r_p1_m1_m1_0(p):
    return (*_swap_right(p), -p.X1, p.g11, -p.X2, p.g21)


def _r_m1_m1_p1_0(p):
    return (*_swap_left(p),
            -I * p.Y2, I * (p.Z2 + p.s00 * p.Z1),
            -I * p.g12, I * p.Z1)


def _r_p1_m1_p1_0(p):
    return (*_swap_right(p),
            I * p.g22 * p.e(1), -I * p.Z2 * p.e(-1),
            I * (p.g12 - p.s00 * p.g22) * p.e(1),
            -I * (p.Z1 - p.s00 * p.Z2) * p.e(-1))


def _r_m1_p1_m1_0(p):
    return (*_swap_left(p),
            -I * (p.X2 + p.s00 * p.X1) * p.e(-1), I * p.Y1 * p.e(1),
            -I * p.X1 * p.e(-1), I * p.g11 * p.e(1))


def _r_p1_p1_m1_0(p):
    return (*_swap_right(p),
            I * p.X2, -I * p.g21,
            I * (p.X1 - p.s00 * p.X2), -I * (p.g11 - p.s00 * p.g21))


def _r_m1_p1_p1_0(p):
    return (*_swap_left(p), p.g12, -p.Z1, p.g22, -p.Z2)


def _r_p1_p1_p1_0(p):
    inner = p.g12 - p.s00 * p.g22
    return (*_swap_right(p),
            -inner * p.e(1),
            -(-p.g11 - p.g12 * p.s0 + p.s00 * p.Z2) * p.e(-1),
            -(p.g22 - p.s00 * inner) * p.e(1),
            (p.Z2 * (1 + p.s00 ** 2) - p.s00 * p.Z1) * p.e(-1))


# ----------------------------------------------------------------------
# Imaginary axis, ℓ = 0
# ----------------------------------------------------------------------

def _i_p1_p1_0_0(p):
    return (p.s0 * p.e(-H), p.s1 * p.e(H),
            -I * p.g21 * p.e(-Q), -I * p.g22 * p.e(Q),
            -I * (p.g11 - p.s00 * p.g21) * p.e(-Q), -I * (p.g12 - p.s00 * p.g22) * p.e(Q))


def _i_p1_m1_0_0(p):
    return (p.s0 * p.e(-H), p.s1 * p.e(H),
            p.g11 * p.e(-Q), p.g12 * p.e(Q), p.g21 * p.e(-Q), p.g22 * p.e(Q))


def _i_m1_p1_0_0(p):
    return (p.s0 * p.e(H), p.s1 * p.e(-H),
            p.g11 * p.e(Q), p.g12 * p.e(-Q), p.g21 * p.e(Q), p.g22 * p.e(-Q))


def _i_m1_m1_0_0(p):
    return (p.s0 * p.e(H), p.s1 * p.e(-H),
            I * p.Y1 * p.e(Q), I * p.Y2 * p.e(-Q),
            I * p.g11 * p.e(Q), I * p.g12 * p.e(-Q))


def _i_p1_0_m1_0(p):
    return (-p.s1 * p.e(1.5), -p.s0 * p.e(H),
            p.X1 * p.e(-Q), -p.g11 * p.e(Q), p.X2 * p.e(-Q), -p.g21 * p.e(Q))


def _i_m1_0_m1_0(p):
    return (-p.s1 * p.e(H), -p.s0 * p.e(1.5),
            I * (p.X2 + p.s00 * p.X1) * p.e(-0.75), -I * p.Y1 * p.e(0.75),
            I * p.X1 * p.e(-0.75), -I * p.g11 * p.e(0.75))


def _i_p1_0_p1_0(p):
    return (-p.s1 * p.e(1.5), -p.s0 * p.e(H),
            I * p.g22 * p.e(0.75), -I * p.Z2 * p.e(-0.75),
            I * (p.g12 - p.s00 * p.g22) * p.e(0.75),
            I * (-p.g11 - p.s0 * p.g12 + p.s00 * p.Z2) * p.e(-0.75))


def _i_m1_0_p1_0(p):
    return (-p.s1 * p.e(H), -p.s0 * p.e(1.5),
            -p.g12 * p.e(Q), p.Z1 * p.e(-Q), -p.g22 * p.e(Q), p.Z2 * p.e(-Q))


# ----------------------------------------------------------------------
# Real axis, ℓ = 1
# ----------------------------------------------------------------------

def _r_0_0_0_1(p):
    return -p.s0, -p.s1, I * p.g11, -I * p.g12, I * p.g21, -I * p.g22


def _r_m1_0_0_1(p):
    return (-p.s0 * p.e(1), -p.s1 * p.e(-1),
            p.Y1 * p.e(H), -p.Y2 * p.e(-H), p.g11 * p.e(H), -p.g12 * p.e(-H))


def _r_p1_0_0_1(p):
    return (-p.s0 * p.e(-1), -p.s1 * p.e(1),
            -p.g21 * p.e(-H), p.g22 * p.e(H),
            -(p.g11 - p.s00 * p.g21) * p.e(-H), (p.g12 - p.s00 * p.g22) * p.e(H))


def _swap_s_plus(p):
    return p.s1 * p.e(1), p.s0 * p.e(1)


def _r_0_m1_m1_1(p):
    return (*_swap_s_plus(p),
            -(p.X2 + p.s00 * p.X1) * p.e(-H), -p.Y1 * p.e(H),
            -p.X1 * p.e(-H), -p.g11 * p.e(H))


def _r_0_m1_p1_1(p):
    return (*_swap_s_plus(p),
            I * p.g12 * p.e(H), I * p.Z1 * p.e(-H),
            I * p.g22 * p.e(H), I * p.Z2 * p.e(-H))


def _r_0_p1_m1_1(p):
    return (*_swap_s_plus(p),
            I * p.X1 * p.e(-H), I * p.g11 * p.e(H),
            I * p.X2 * p.e(-H), I * p.g21 * p.e(H))


def _r_0_p1_p1_1(p):
    return (*_swap_s_plus(p),
            -p.g22 * p.e(H), -p.Z2 * p.e(-H),
            -(p.g12 - p.s00 * p.g22) * p.e(H),
            (-p.g11 - p.s0 * p.g12 + p.s00 * p.Z2) * p.e(-H))


def _swap_left_plus(p):
    return p.s1, p.s0 * p.e(2)


def _swap_right_plus(p):
    return p.s1 * p.e(2), p.s0


def _r_m1_m1_m1_1(p):
    s2 = 1 + p.s00 ** 2
    return (*_swap_left_plus(p),
            I * (p.X1 * s2 + p.s00 * p.X2) * p.e(-1),
            I * (p.g11 * s2 + p.s00 * p.g21) * p.e(1),
            I * (p.X2 + p.s00 * p.X1) * p.e(-1),
            I * p.Y1 * p.e(1))


def _r_p1_m1_m1_1(p):
    return (*_swap_right_plus(p), -I * p.X1, -I * p.g11, -I * p.X2, -I * p.g21)


def _r_m1_m1_p1_1(p):
    return (*_swap_left_plus(p), p.Y2, p.Z2 + p.s00 * p.Z1, p.g12, p.Z1)


def _r_p1_m1_p1_1(p):
    return (*_swap_right_plus(p),
            -p.g22 * p.e(1), -p.Z2 * p.e(-1),
            -(p.g12 - p.s00 * p.g22) * p.e(1),
            -(p.Z1 - p.s00 * p.Z2) * p.e(-1))


def _r_m1_p1_m1_1(p):
    return (*_swap_left_plus(p),
            (p.X2 + p.s00 * p.X1) * p.e(-1), p.Y1 * p.e(1),
            p.X1 * p.e(-1), p.g11 * p.e(1))


def _r_p1_p1_m1_1(p):
    return (*_swap_right_plus(p),
            -p.X2, -p.g21, -(p.X1 - p.s00 * p.X2), -(p.g11 - p.s00 * p.g21))


def _r_m1_p1_p1_1(p):
    return (*_swap_left_plus(p), I * p.g12, I * p.Z1, I * p.g22, I * p.Z2)


def _r_p1_p1_p1_1(p):
    inner = p.g12 - p.s00 * p.g22
    return (*_swap_right_plus(p),
            -I * inner * p.e(1),
            I * (-p.g11 - p.s0 * p.g12 + p.s00 * p.Z2) * p.e(-1),
            -I * (p.g22 - p.s00 * inner) * p.e(1),
            -I * (p.Z2 * (1 + p.s00 ** 2) - p.s00 * p.Z1) * p.e(-1))


# ----------------------------------------------------------------------
# Imaginary axis, ℓ = 1
# ----------------------------------------------------------------------

def _i_p1_p1_0_1(p):
    return (-p.s0 * p.e(-H), -p.s1 * p.e(H),
            p.g21 * p.e(-Q), -p.g22 * p.e(Q),
            (p.g11 - p.s00 * p.g21) * p.e(-Q), -(p.g12 - p.s00 * p.g22) * p.e(Q))


def _i_p1_m1_0_1(p):
    return (-p.s0 * p.e(-H), -p.s1 * p.e(H),
            I * p.g11 * p.e(-Q), -I * p.g12 * p.e(Q),
            I * p.g21 * p.e(-Q), -I * p.g22 * p.e(Q))


def _i_m1_p1_0_1(p):
    return (-p.s0 * p.e(H), -p.s1 * p.e(-H),
            I * p.g11 * p.e(Q), -I * p.g12 * p.e(-Q),
            I * p.g21 * p.e(Q), -I * p.g22 * p.e(-Q))


def _i_m1_m1_0_1(p):
    return (-p.s0 * p.e(H), -p.s1 * p.e(-H),
            -p.Y1 * p.e(Q), p.Y2 * p.e(-Q), -p.g11 * p.e(Q), p.g12 * p.e(-Q))


def _i_p1_0_m1_1(p):
    return (p.s1 * p.e(1.5), p.s0 * p.e(H),
            I * p.X1 * p.e(-Q), I * p.g11 * p.e(Q), I * p.X2 * p.e(-Q), I * p.g21 * p.e(Q))


def _i_p1_0_p1_1(p):
    return (p.s1 * p.e(1.5), p.s0 * p.e(H),
            -p.g22 * p.e(0.75), -p.Z2 * p.e(-0.75),
            -(p.g12 - p.s00 * p.g22) * p.e(0.75),
            (-p.g11 - p.s0 * p.g12 + p.s00 * p.Z2) * p.e(-0.75))


def _i_m1_0_m1_1(p):
    return (p.s1 * p.e(H), p.s0 * p.e(1.5),
            -(p.X2 + p.s00 * p.X1) * p.e(-0.75), -p.Y1 * p.e(0.75),
            -p.X1 * p.e(-0.75), -p.g11 * p.e(0.75))


def _i_m1_0_p1_1(p):
    return (p.s1 * p.e(H), p.s0 * p.e(1.5),
            -I * p.g12 * p.e(Q), -I * p.Z1 * p.e(-Q),
            -I * p.g22 * p.e(Q), -I * p.Z2 * p.e(-Q))


# Keyed by (hatted, ε1, ε2, m(ε2), ℓ).
ACTIONS = {
    (False, 0, 0, 0, 0): _r_0_0_0_0,
    (False, -1, 0, 0, 0): _r_m1_0_0_0,
    (False, 1, 0, 0, 0): _r_p1_0_0_0,
    (False, 0, -1, -1, 0): _r_0_m1_m1_0,
    (False, 0, -1, 1, 0): _r_0_m1_p1_0,
    (False, 0, 1, -1, 0): _r_0_p1_m1_0,
    (False, 0, 1, 1, 0): _r_0_p1_p1_0,
    (False, -1, -1, -1, 0): _r_m1_m1_m1_0,
    (False, 1, -1, -1, 0): _r_p1_m1_m1_0,
    (False, -1, -1, 1, 0): _r_m1_m1_p1_0,
    (False, 1, -1, 1, 0): _r_p1_m1_p1_0,
    (False, -1, 1, -1, 0): _r_m1_p1_m1_0,
    (False, 1, 1, -1, 0): _r_p1_p1_m1_0,
    (False, -1, 1, 1, 0): _r_m1_p1_p1_0,
    (False, 1, 1, 1, 0): _r_p1_p1_p1_0,
    (True, 1, 1, 0, 0): _i_p1_p1_0_0,
    (True, 1, -1, 0, 0): _i_p1_m1_0_0,
    (True, -1, 1, 0, 0): _i_m1_p1_0_0,
    (True, -1, -1, 0, 0): _i_m1_m1_0_0,
    (True, 1, 0, -1, 0): _i_p1_0_m1_0,
    (True, -1, 0, -1, 0): _i_m1_0_m1_0,
    (True, 1, 0, 1, 0): _i_p1_0_p1_0,
    (True, -1, 0, 1, 0): _i_m1_0_p1_0,
    (False, 0, 0, 0, 1): _r_0_0_0_1,
    (False, -1, 0, 0, 1): _r_m1_0_0_1,
    (False, 1, 0, 0, 1): _r_p1_0_0_1,
    (False, 0, -1, -1, 1): _r_0_m1_m1_1,
    (False, 0, -1, 1, 1): _r_0_m1_p1_1,
    (False, 0, 1, -1, 1): _r_0_p1_m1_1,
    (False, 0, 1, 1, 1): _r_0_p1_p1_1,
    (False, -1, -1, -1, 1): _r_m1_m1_m1_1,
    (False, 1, -1, -1, 1): _r_p1_m1_m1_1,
    (False, -1, -1, 1, 1): _r_m1_m1_p1_1,
    (False, 1, -1, 1, 1): _r_p1_m1_p1_1,
    (False, -1, 1, -1, 1): _r_m1_p1_m1_1,
    (False, 1, 1, -1, 1): _r_p1_p1_m1_1,
    (False, -1, 1, 1, 1): _r_m1_p1_p1_1,
    (False, 1, 1, 1, 1): _r_p1_p1_p1_1,
    (True, 1, 1, 0, 1): _i_p1_p1_0_1,
    (True, 1, -1, 0, 1): _i_p1_m1_0_1,
    (True, -1, 1, 0, 1): _i_m1_p1_0_1,
    (True, -1, -1, 0, 1): _i_m1_m1_0_1,
    (True, 1, 0, -1, 1): _i_p1_0_m1_1,
    (True, 1, 0, 1, 1): _i_p1_0_p1_1,
    (True, -1, 0, -1, 1): _i_m1_0_m1_1,
    (True, -1, 0, 1, 1): _i_m1_0_p1_1,
}


# Compositions F∘G (G applied first), written as (lhs, [F, G]) with labels
# in the (hatted, ε1, ε2, m, ℓ) form.
def _compositions():
    out = []
    for eps1 in (1, -1):
        for eps2 in (1, -1):
            for m in (1, -1):
                out.append(((False, eps1, eps2, m, 0),
                            [(False, 0, eps2, m, 0), (False, eps1, 0, 0, 0)]))
    out += [
        ((True, 1, 0, -1, 0), [(False, 0, -1, -1, 0), (True, 1, 1, 0, 0)]),
        ((True, -1, 0, -1, 0), [(False, 0, -1, -1, 0), (True, -1, 1, 0, 0)]),
        ((True, 1, 0, 1, 0), [(False, 0, 1, 1, 0), (True, 1, -1, 0, 0)]),
        ((True, -1, 0, 1, 0), [(False, 0, 1, 1, 0), (True, -1, -1, 0, 0)]),
    ]
    for eps1 in (1, -1):
        out.append(((False, eps1, 0, 0, 1), [(False, eps1, 0, 0, 0), (False, 0, 0, 0, 1)]))
    for eps2 in (1, -1):
        for m in (1, -1):
            out.append(((False, 0, eps2, m, 1), [(False, 0, eps2, m, 0), (False, 0, 0, 0, 1)]))
    for eps1 in (1, -1):
        for eps2 in (1, -1):
            for m in (1, -1):
                out.append(((False, eps1, eps2, m, 1),
                            [(False, 0, eps2, m, 1), (False, eps1, 0, 0, 0)]))
    for eps1 in (1, -1):
        for eps2 in (1, -1):
            out.append(((True, eps1, eps2, 0, 1), [(True, eps1, eps2, 0, 0), (False, 0, 0, 0, 1)]))
    out += [
        ((True, 1, 0, -1, 1), [(False, 0, 1, -1, 0), (True, 1, -1, 0, 1)]),
        ((True, 1, 0, 1, 1), [(False, 0, 1, 1, 0), (True, 1, -1, 0, 1)]),
        ((True, -1, 0, -1, 1), [(False, 0, 1, -1, 0), (True, -1, -1, 0, 1)]),
        ((True, -1, 0, 1, 1), [(False, 0, 1, 1, 0), (True, -1, -1, 0, 1)]),
    ]
    return out


COMPOSITIONS = _compositions()
