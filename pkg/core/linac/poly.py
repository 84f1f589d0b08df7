from __future__ import annotations

from types import MappingProxyType
from typing import Mapping, Sequence, Union, Optional

import numpy as np

from .exception import DomainError, InputError


# Exponent tuple (a_1, ..., a_n) of the monomial x_1^a_1 ... x_n^a_n
MultiIndex = tuple[int, ...]
Number = Union[int, float, complex]


def grlex_key(alpha: MultiIndex) -> tuple:
    """Graded lexicographic order: total degree first, then x_1 before x_2 before ..."""
    return (sum(alpha), tuple(-a for a in alpha))


def unit_index(n: int, j: int) -> MultiIndex:
    return tuple(1 if i == j else 0 for i in range(n))


def check_index(alpha: Sequence[int], n: int) -> MultiIndex:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n:
        raise InputError(f"multi-index {alpha} has length {len(alpha)}, expected {n}")
    if any(a < 0 for a in alpha):
        raise InputError(f"multi-index {alpha} has a negative exponent")
    return alpha


class LaurentPoly:
    """
    Finite Laurent polynomial c(s) = sum_k c_k s^k in the group parameter s.

    Coefficients are stored in canonical form: exact zeros are dropped, nothing else is
    pruned, so symbolic pipelines are reproducible bit for bit.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[int, Number]] = None):
        clean = {}
        for k, c in (terms or {}).items():
            c = complex(c)
            if c != 0:
                clean[int(k)] = c
        self._terms = clean

    @classmethod
    def constant(cls, c: Number) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, k: int, c: Number = 1.0) -> "LaurentPoly":
        return cls({k: c})

    @property
    def terms(self) -> Mapping[int, complex]:
        return MappingProxyType(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def max_frequency(self) -> int:
        return max((abs(k) for k in self._terms), default=0)

    def coefficient(self, k: int) -> complex:
        return self._terms.get(k, 0j)

    def circle_average(self) -> complex:
        # every s^k with k != 0 integrates to zero over |s| = 1
        return self._terms.get(0, 0j)

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by s^k."""
        return LaurentPoly({j + k: c for j, c in self._terms.items()})

    def __call__(self, s):
        s = np.asarray(s, dtype=complex) if not np.isscalar(s) else complex(s)
        if np.any(np.asarray(s) == 0) and any(k < 0 for k in self._terms):
            raise DomainError("Laurent polynomial with negative powers evaluated at s = 0")
        if np.isscalar(s):
            return sum((c * s ** k for k, c in self._terms.items()), 0j)
        out = np.zeros(np.shape(s), dtype=complex)
        for k, c in self._terms.items():
            out = out + c * s ** k
        return out

    def __add__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return LaurentPoly(terms)

    def __radd__(self, other) -> "LaurentPoly":
        return self + other

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            c = complex(other)
            return LaurentPoly({k: c * v for k, v in self._terms.items()})
        terms: dict[int, complex] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = k1 + k2
                terms[k] = terms[k] + c1 * c2 if k in terms else c1 * c2
        return LaurentPoly(terms)

    def __rmul__(self, other) -> "LaurentPoly":
        return self * other

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        if isinstance(other, (int, float, complex)):
            return self == LaurentPoly.constant(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {c!r}" for k, c in sorted(self._terms.items()))
        return f"LaurentPoly({{{body}}})"


def laurent_circle_average(c: LaurentPoly) -> complex:
    """Mean of c(e^{2 pi i t}) over t in [0, 1], i.e. the s^0 coefficient."""
    return c.circle_average()


###############################
# generic coefficient-dict arithmetic (complex or LaurentPoly coefficients)
###############################
Terms = dict  # MultiIndex -> complex | LaurentPoly


def _is_zero(c) -> bool:
    return c.is_zero if isinstance(c, LaurentPoly) else c == 0


def _clean(terms: Terms) -> Terms:
    return {a: c for a, c in terms.items() if not _is_zero(c)}


def _add_terms(f: Terms, g: Terms) -> Terms:
    out = dict(f)
    for a, c in g.items():
        out[a] = out[a] + c if a in out else c
    return _clean(out)


def _mul_terms(f: Terms, g: Terms) -> Terms:
    out: Terms = {}
    for a, ca in f.items():
        for b, cb in g.items():
            key = tuple(i + j for i, j in zip(a, b))
            prod = ca * cb
            out[key] = out[key] + prod if key in out else prod
    return _clean(out)


def _scale_terms(f: Terms, c) -> Terms:
    return _clean({a: c * v for a, v in f.items()})


def _substitute(f: Terms, g: Sequence[Terms], n_new: int) -> Terms:
    """f(g_1, ..., g_n) as a polynomial in n_new variables."""
    one = tuple([0] * n_new)
    powers: dict[tuple[int, int], Terms] = {}

    def power(j: int, e: int) -> Terms:
        if e == 0:
            return {one: 1.0 + 0j}
        if (j, e) not in powers:
            powers[(j, e)] = g[j] if e == 1 else _mul_terms(power(j, e - 1), g[j])
        return powers[(j, e)]

    out: Terms = {}
    for alpha, c in f.items():
        term: Terms = {one: c}
        for j, e in enumerate(alpha):
            if e:
                term = _mul_terms(term, power(j, e))
        out = _add_terms(out, term)
    return out


def _as_laurent(item: tuple) -> tuple:
    alpha, c = item
    return alpha, c if isinstance(c, LaurentPoly) else LaurentPoly.constant(c)


def _sorted_items(terms: Mapping) -> list:
    return sorted(terms.items(), key=lambda item: grlex_key(item[0]))


def monomial_values(batch: np.ndarray, exps: np.ndarray) -> np.ndarray:
    """x^alpha for every row of batch (m, n) and every row of exps (K, n); shape (m, K).

    Powers are built by repeated multiplication so that small integer powers are exact.
    """
    m, n = batch.shape
    out = np.ones((m, exps.shape[0]), dtype=complex)
    for j in range(n):
        top = int(exps[:, j].max(initial=0))
        if top == 0:
            continue
        powers = np.ones((m, top + 1), dtype=complex)
        for e in range(1, top + 1):
            powers[:, e] = powers[:, e - 1] * batch[:, j]
        out *= powers[:, exps[:, j]]
    return out


class PolyMap:
    """
    Polynomial map C^n -> C^n, one coefficient dict per coordinate.

    Houses the linearizer F, generating vector fields X and conjugating automorphisms.
    Instances are immutable; arithmetic returns new canonical maps.
    """

    __slots__ = ("dimension", "_coords", "_compiled", "_partials")

    def __init__(self, dimension: int, coords: Sequence[Mapping[Sequence[int], Number]]):
        if dimension < 1:
            raise InputError(f"dimension must be positive, got {dimension}")
        if len(coords) != dimension:
            raise InputError(f"{len(coords)} coordinate polynomials given for dimension {dimension}")
        self.dimension = dimension
        self._coords = tuple(
            {check_index(a, dimension): complex(c) for a, c in coord.items() if complex(c) != 0}
            for coord in coords
        )
        self._compiled = None
        self._partials = None

    @classmethod
    def zero(cls, n: int) -> "PolyMap":
        return cls(n, [{} for _ in range(n)])

    @classmethod
    def identity(cls, n: int) -> "PolyMap":
        return cls(n, [{unit_index(n, i): 1.0} for i in range(n)])

    @classmethod
    def affine(cls, matrix, offset=None) -> "PolyMap":
        """x -> M x + b."""
        m = np.asarray(matrix, dtype=complex)
        n = m.shape[0]
        b = np.zeros(n, dtype=complex) if offset is None else np.asarray(offset, dtype=complex)
        coords = []
        for i in range(n):
            coord = {unit_index(n, j): m[i, j] for j in range(n)}
            coord[tuple([0] * n)] = b[i]
            coords.append(coord)
        return cls(n, coords)

    @property
    def coords(self) -> tuple[Mapping[MultiIndex, complex], ...]:
        return tuple(MappingProxyType(c) for c in self._coords)

    @property
    def max_degree(self) -> int:
        return max((sum(a) for coord in self._coords for a in coord), default=0)

    def coefficient(self, i: int, alpha: Sequence[int]) -> complex:
        return self._coords[i].get(tuple(alpha), 0j)

    def items(self, i: int) -> list[tuple[MultiIndex, complex]]:
        """Terms of coordinate i in graded lexicographic order."""
        return _sorted_items(self._coords[i])

    def constant_vector(self) -> np.ndarray:
        zero = tuple([0] * self.dimension)
        return np.array([coord.get(zero, 0j) for coord in self._coords], dtype=complex)

    def linear_matrix(self) -> np.ndarray:
        n = self.dimension
        return np.array([[self._coords[i].get(unit_index(n, j), 0j) for j in range(n)] for i in range(n)])

    def _compile(self):
        if self._compiled is None:
            exps = sorted({a for coord in self._coords for a in coord}, key=grlex_key)
            if not exps:
                exps = [tuple([0] * self.dimension)]
            index = {a: k for k, a in enumerate(exps)}
            coef = np.zeros((self.dimension, len(exps)), dtype=complex)
            for i, coord in enumerate(self._coords):
                for a, c in coord.items():
                    coef[i, index[a]] = c
            self._compiled = (np.array(exps, dtype=int), coef)
        return self._compiled

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape[-1] != self.dimension:
            raise InputError(f"point of dimension {x.shape[-1]} given to a map on C^{self.dimension}")
        exps, coef = self._compile()
        batch = np.atleast_2d(x)
        monomials = monomial_values(batch, exps)
        out = monomials @ coef.T
        return out[0] if x.ndim == 1 else out

    def partial(self, j: int) -> "PolyMap":
        """Exact derivative d/dx_j of every coordinate."""
        coords = []
        for coord in self._coords:
            d = {}
            for a, c in coord.items():
                if a[j]:
                    b = a[:j] + (a[j] - 1,) + a[j + 1:]
                    d[b] = c * a[j]
            coords.append(d)
        return PolyMap(self.dimension, coords)

    def jacobian(self, x) -> np.ndarray:
        """DF(x); shape (n, n) for one point, (m, n, n) for a batch."""
        if self._partials is None:
            self._partials = [self.partial(j) for j in range(self.dimension)]
        x = np.asarray(x, dtype=complex)
        cols = [p(x) for p in self._partials]
        return np.stack(cols, axis=-1)

    def compose(self, g: "PolyMap") -> "PolyMap":
        """self o g."""
        if g.dimension != self.dimension:
            raise InputError("composition of maps with different dimensions")
        coords = [_substitute(coord, g._coords, g.dimension) for coord in self._coords]
        return PolyMap(self.dimension, coords)

    def transform(self, matrix) -> "PolyMap":
        """x -> M f(x)."""
        m = np.asarray(matrix, dtype=complex)
        coords = []
        for i in range(self.dimension):
            out: Terms = {}
            for j in range(self.dimension):
                if m[i, j] != 0:
                    out = _add_terms(out, _scale_terms(self._coords[j], m[i, j]))
            coords.append(out)
        return PolyMap(self.dimension, coords)

    def chop(self, threshold: float) -> "PolyMap":
        """Zero coefficients with magnitude below threshold."""
        return PolyMap(self.dimension, [{a: c for a, c in coord.items() if abs(c) >= threshold}
                                        for coord in self._coords])

    def max_coefficient_distance(self, other: "PolyMap") -> float:
        if other.dimension != self.dimension:
            raise InputError("maps of different dimensions are not comparable")
        worst = 0.0
        for f, g in zip(self._coords, other._coords):
            for a in set(f) | set(g):
                worst = max(worst, abs(f.get(a, 0j) - g.get(a, 0j)))
        return worst

    def __add__(self, other: "PolyMap") -> "PolyMap":
        if other.dimension != self.dimension:
            raise InputError("sum of maps with different dimensions")
        return PolyMap(self.dimension, [_add_terms(f, g) for f, g in zip(self._coords, other._coords)])

    def __neg__(self) -> "PolyMap":
        return PolyMap(self.dimension, [{a: -c for a, c in coord.items()} for coord in self._coords])

    def __sub__(self, other: "PolyMap") -> "PolyMap":
        return self + (-other)

    def __mul__(self, scalar: Number) -> "PolyMap":
        return PolyMap(self.dimension, [_scale_terms(coord, complex(scalar)) for coord in self._coords])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.dimension == other.dimension and self._coords == other._coords

    def __hash__(self) -> int:
        return hash((self.dimension, tuple(frozenset(c.items()) for c in self._coords)))

    def __repr__(self) -> str:
        return f"PolyMap({self.dimension}, {[dict(self.items(i)) for i in range(self.dimension)]})"


def poly_eval(f: PolyMap, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.shape[0] != f.dimension:
        raise InputError(f"point of shape {x.shape} given to a map on C^{f.dimension}")
    return f(x)


class ActionPoly:
    """
    Closed-form action phi(s, x) = phi^s(x): polynomial in x, Laurent in s.

    coords[i][alpha] is the Laurent coefficient of x^alpha in coordinate i.
    """

    __slots__ = ("dimension", "_coords")

    def __init__(self, dimension: int, coords: Sequence[Mapping[Sequence[int], LaurentPoly]]):
        if len(coords) != dimension:
            raise InputError(f"{len(coords)} coordinate polynomials given for dimension {dimension}")
        self.dimension = dimension
        self._coords = tuple(
            {check_index(a, dimension): c for a, c in map(_as_laurent, coord.items()) if not c.is_zero}
            for coord in coords
        )

    @classmethod
    def diagonal(cls, weights: Sequence[int]) -> "ActionPoly":
        """Linear action (s^w_1 x_1, ..., s^w_n x_n)."""
        n = len(weights)
        return cls(n, [{unit_index(n, i): LaurentPoly.monomial(int(w))} for i, w in enumerate(weights)])

    @property
    def coords(self) -> tuple[Mapping[MultiIndex, LaurentPoly], ...]:
        return tuple(MappingProxyType(c) for c in self._coords)

    @property
    def max_frequency(self) -> int:
        return max((c.max_frequency for coord in self._coords for c in coord.values()), default=0)

    def items(self, i: int) -> list[tuple[MultiIndex, LaurentPoly]]:
        return _sorted_items(self._coords[i])

    def at(self, s: Number) -> PolyMap:
        """The map phi^s."""
        s = complex(s)
        if s == 0:
            raise DomainError("C*-action evaluated at s = 0")
        return PolyMap(self.dimension, [{a: c(s) for a, c in coord.items()} for coord in self._coords])

    def __call__(self, s: Number, x) -> np.ndarray:
        return self.at(s)(x)

    def evaluate_many(self, s, x) -> np.ndarray:
        """phi(s_k, x) for an array of s values and one point x; shape (len(s), n)."""
        s = np.asarray(s, dtype=complex).ravel()
        if np.any(s == 0):
            raise DomainError("C*-action evaluated at s = 0")
        x = np.asarray(x, dtype=complex).reshape(1, -1)
        out = np.zeros((s.size, self.dimension), dtype=complex)
        for i, coord in enumerate(self._coords):
            for a, c in coord.items():
                out[:, i] += c(s) * monomial_values(x, np.array([a]))[0, 0]
        return out

    def linear_part(self) -> tuple[tuple[LaurentPoly, ...], ...]:
        """Matrix of Laurent coefficients of the degree-one monomials."""
        n = self.dimension
        zero = LaurentPoly()
        return tuple(tuple(self._coords[i].get(unit_index(n, j), zero) for j in range(n)) for i in range(n))

    def identity_defect(self) -> float:
        """Max coefficient distance between phi^1 and the identity map."""
        return self.at(1.0).max_coefficient_distance(PolyMap.identity(self.dimension))

    def pre_compose(self, g: PolyMap) -> "ActionPoly":
        """(s, x) -> phi(s, g(x))."""
        coords = [_substitute(coord, g._coords, g.dimension) for coord in self._coords]
        return ActionPoly(self.dimension, coords)

    def post_compose(self, h: PolyMap) -> "ActionPoly":
        """(s, x) -> h(phi(s, x))."""
        lifted = [{a: LaurentPoly.constant(c) for a, c in coord.items()} for coord in h._coords]
        coords = [_substitute(coord, self._coords, self.dimension) for coord in lifted]
        return ActionPoly(self.dimension, coords)

    def conjugate(self, h: PolyMap, h_inverse: PolyMap) -> "ActionPoly":
        """(s, x) -> h^-1(phi(s, h(x))) for a polynomial automorphism h."""
        return self.pre_compose(h).post_compose(h_inverse)

    def conjugate_linear(self, g) -> "ActionPoly":
        """(s, x) -> G^-1 phi(s, G x)."""
        g = np.asarray(g, dtype=complex)
        return self.conjugate(PolyMap.affine(g), PolyMap.affine(np.linalg.inv(g)))

    def translate(self, p) -> "ActionPoly":
        """(s, u) -> phi(s, u + p) - p, moving the fixed point p to the origin."""
        p = np.asarray(p, dtype=complex)
        n = self.dimension
        if not np.any(p):
            return self
        eye = np.eye(n)
        return self.conjugate(PolyMap.affine(eye, p), PolyMap.affine(eye, -p))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ActionPoly):
            return NotImplemented
        return self.dimension == other.dimension and self._coords == other._coords

    def __hash__(self) -> int:
        return hash((self.dimension, tuple(frozenset(c.items()) for c in self._coords)))

    def __repr__(self) -> str:
        return f"ActionPoly({self.dimension}, {[dict(self.items(i)) for i in range(self.dimension)]})"


def action_eval(action: ActionPoly, s: Number, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.shape[0] != action.dimension:
        raise InputError(f"point of shape {x.shape} given to an action on C^{action.dimension}")
    return action(s, x)

