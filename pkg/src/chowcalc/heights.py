"""Heights of the arithmetic diagonal over a function field.

Everything lives in the intersection lattice of the relative curve over B,
spanned by omega (relative dualizing sheaf), F (a fiber) and P = f^*omega_S.
Entries may be rationals or symbolic ring elements (e.g. sympy symbols);
only ring operations and division by the rational d are used.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import Q

BASIS = ("omega", "F", "P")


class HeightError(ValueError):
    """Input outside the hypotheses of the unramified height formula."""


def _num(x):
    if isinstance(x, (int, str, Fraction)) and not isinstance(x, bool):
        return Q(x)
    return x


def _is_zero(x) -> bool:
    if x == 0:
        return True
    expand = getattr(x, "expand", None)
    return expand is not None and expand() == 0


@dataclass(frozen=True)
class ArithSurfaceData:
    """Intersection numbers on the relative curve: omega^2, omega.P, P^2 and F.P.

    omega.F = 2g - 2 and F^2 = 0 are fixed by the genus.
    """
    genus: int
    omega_sq: object
    omega_P: object
    P_sq: object
    F_P: object = Fraction(0)
    smooth: bool = True

    def __post_init__(self):
        if not isinstance(self.genus, int) or self.genus < 0:
            raise HeightError(f"genus must be a non-negative integer, got {self.genus!r}")
        for name in ("omega_sq", "omega_P", "P_sq", "F_P"):
            object.__setattr__(self, name, _num(getattr(self, name)))

    @classmethod
    def k3(cls, genus: int, omega_sq, h) -> "ArithSurfaceData":
        """A smooth K3 family: omega_S = h F, so P = h F."""
        h = _num(h)
        return cls(genus, omega_sq, h * (2 * genus - 2), 0, 0)

    @property
    def gram(self):
        g2 = Fraction(2 * self.genus - 2)
        return (
            (self.omega_sq, g2, self.omega_P),
            (g2, Fraction(0), self.F_P),
            (self.omega_P, self.F_P, self.P_sq),
        )

    @property
    def d(self):
        """deg f^*f_*C = (omega - P).F."""
        return 2 * self.genus - 2 - self.F_P

    def pair(self, u, v):
        g = self.gram
        return sum(u[i] * g[i][j] * v[j] for i in range(3) for j in range(3) if u[i] != 0 and v[j] != 0)

    def require_hypotheses(self):
        if not self.smooth:
            raise HeightError("the unramified formula assumes a smooth model over B; refusing semistable input")
        if _is_zero(self.d):
            raise HeightError("the formula assumes d := deg f^*f_*C != 0, but d = 0 here")


# ---- lattice vectors in the basis (omega, F, P) -------------------------------------

OMEGA = (Fraction(1), Fraction(0), Fraction(0))
FIBER = (Fraction(0), Fraction(1), Fraction(0))
P_VEC = (Fraction(0), Fraction(0), Fraction(1))


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _scale(c, u):
    return tuple(c * a for a in u)


def phi(data: ArithSurfaceData):
    """f^*f_*C = omega - P by adjunction."""
    return _add(OMEGA, _scale(-1, P_VEC))


def kappa(data: ArithSurfaceData):
    """-(f^*f_*C / d)^2 / 2, chosen so that e_bar^2 = 0."""
    data.require_hypotheses()
    d = data.d
    p = phi(data)
    return -data.pair(p, p) / (2 * d * d)


def e_bar(data: ArithSurfaceData):
    """f^*f_*C / d + kappa F."""
    d = data.d
    return _add(_scale(Fraction(1) / d, phi(data)), _scale(kappa(data), FIBER))


# ---- the delta expansion on C x_B C -------------------------------------------------
#
# Classes on Y = C x_B C are combinations of the diagonal D and the pullbacks
# L(a) = p_1^* a, R(a) = p_2^* a.  Pushing a product of two such classes
# along p_2 uses
#   D.D -> -omega     D.L(a) -> a     D.R(a) -> a
#   L(a).L(b) -> (a.b) F     L(a).R(b) -> (a.F) b     R(a).R(b) -> 0

def _push_pair(data, s, t):
    ks, vs = s
    kt, vt = t
    if ks > kt:
        ks, vs, kt, vt = kt, vt, ks, vs
    kinds = (ks, kt)
    if kinds == ("D", "D"):
        return _scale(-1, OMEGA)
    if kinds in (("D", "L"), ("D", "R")):
        return vt
    if kinds == ("L", "L"):
        return _scale(data.pair(vs, vt), FIBER)
    if kinds == ("L", "R"):
        return _scale(data.pair(vs, FIBER), vt)
    if kinds == ("R", "R"):
        return (0, 0, 0)
    raise ValueError(f"no pushforward rule for {kinds}")


def faulty_push_pair(data, s, t):
    """_push_pair with the self-intersection rule D.D -> +omega (sign flipped), for negative tests."""
    if s[0] == "D" and t[0] == "D":
        return OMEGA
    return _push_pair(data, s, t)


def push_product(data, x, y, rule=_push_pair):
    """p_2*(x . y) for x, y lists of (coefficient, (kind, vector))."""
    out = (0, 0, 0)
    for cx, sx in x:
        for cy, sy in y:
            out = _add(out, _scale(cx * cy, rule(data, sx, sy)))
    return out


def delta(data, e=None):
    e = e_bar(data) if e is None else e
    return [(1, ("D", None)), (-1, ("L", e)), (-1, ("R", e))]


def push_delta_sq(data: ArithSurfaceData, e=None, rule=None):
    """p_2*(delta . delta) by expanding delta = D - L(e_bar) - R(e_bar).

    Checks e_bar^2 = 0 and e_bar . F = 1 first, then that the result is
    -omega - 2 e_bar.  ``e`` overrides e_bar (as a vector in the basis
    omega, F, P).  A replacement pushforward ``rule`` skips the final
    comparison so that a faulty rule surfaces as a disagreement of routes.
    """
    data.require_hypotheses()
    e = e_bar(data) if e is None else tuple(_num(x) for x in e)
    if not _is_zero(data.pair(e, e)):
        raise HeightError(f"e_bar^2 = {data.pair(e, e)} != 0; the expansion needs e_bar^2 = 0")
    if not _is_zero(data.pair(e, FIBER) - 1):
        raise HeightError("e_bar . F != 1")
    dl = delta(data, e)
    if rule is not None:
        return push_product(data, dl, dl, rule)
    out = push_product(data, dl, dl)
    expected = _add(_scale(-1, OMEGA), _scale(-2, e))
    if not all(_is_zero(a - b) for a, b in zip(out, expected)):
        raise HeightError(f"delta expansion gave {out}, expected -omega - 2 e_bar")
    return out


@dataclass(frozen=True)
class HeightResult:
    closed_form: object
    reduced_route: object
    expansion_route: object
    d: object
    kappa: object

    @property
    def agree(self) -> bool:
        return _is_zero(self.closed_form - self.reduced_route) and _is_zero(self.closed_form - self.expansion_route)

    @property
    def value(self):
        return self.closed_form


def closed_form(data: ArithSurfaceData):
    """-(1/d) ((d+1) omega - P) . (omega - P)."""
    data.require_hypotheses()
    d = data.d
    left = _add(_scale(d + 1, OMEGA), _scale(-1, P_VEC))
    return -data.pair(left, phi(data)) / d


def reduced_route(data: ArithSurfaceData):
    """-omega . phi - phi^2 / d."""
    data.require_hypotheses()
    p = phi(data)
    return -data.pair(OMEGA, p) - data.pair(p, p) / data.d


def height_unramified(data: ArithSurfaceData, rule=None) -> HeightResult:
    """<gamma, gamma> by the closed form, the reduced formula and the delta expansion.

    ``rule`` replaces the pushforward rule of the expansion (for fault injection).
    """
    expansion = data.pair(push_delta_sq(data, rule=rule), phi(data))
    return HeightResult(closed_form(data), reduced_route(data), expansion, data.d, kappa(data))


def k3_bound(genus: int, h):
    """The conjectural upper bound 4g(g-1) h / (2g-1) for omega^2."""
    if genus < 2:
        raise HeightError("the bound assumes g >= 2")
    return Fraction(4 * genus * (genus - 1), 2 * genus - 1) * _num(h)


def k3_height(genus: int, omega_sq, h):
    """-(2g-1)/(2g-2) omega^2 + 2g h, the closed form for a smooth K3 family."""
    if genus < 2:
        raise HeightError("d = 2g - 2 vanishes for g = 1")
    return -Fraction(2 * genus - 1, 2 * genus - 2) * _num(omega_sq) + 2 * genus * _num(h)


def satisfies_k3_bound(genus: int, omega_sq, h) -> bool:
    """<gamma, gamma> >= 0, equivalently omega^2 <= the bound (rational input only)."""
    return k3_height(genus, omega_sq, h) >= 0
