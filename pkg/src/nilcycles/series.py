"""Exact bivariate polynomials and truncated univariate power series over Q.

Both types are immutable.  Coefficients are :class:`fractions.Fraction`;
integers and ``"p/q"`` strings are accepted wherever a coefficient is
expected and are converted on entry.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rational = Fraction
Coeff = Union[Fraction, int, str]

__all__ = [
    "Rational",
    "as_rational",
    "BiPoly",
    "UniSeries",
    "poly_add",
    "poly_mul",
    "poly_partial",
    "substitute_y",
    "series_add",
    "series_mul",
    "series_truncate",
]


def as_rational(value: Coeff) -> Fraction:
    """Convert ``value`` to a Fraction, refusing floats.

    Floats are rejected because they silently carry binary rounding; exact
    decimals should be passed as strings such as ``"1/10"``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational coefficient")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().replace("−", "-")
        if any(ch in text for ch in "eE."):
            raise ValueError(f"not an exact rational string: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


class BiPoly:
    """Sparse polynomial in ``x`` and ``y``.

    ``terms`` maps exponent pairs ``(i, j)`` to the coefficient of
    ``x**i * y**j``.  Zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], Coeff] | None = None):
        clean: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in {(i, j)}")
            c = as_rational(c)
            if c:
                key = (int(i), int(j))
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[tuple[int, int], Fraction]) -> "BiPoly":
        # terms already canonical
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[int, int, Coeff]]) -> "BiPoly":
        acc: dict[tuple[int, int], Fraction] = {}
        for i, j, c in entries:
            acc[(i, j)] = acc.get((i, j), Fraction(0)) + as_rational(c)
        return cls(acc)

    @classmethod
    def x(cls) -> "BiPoly":
        return cls._raw({(1, 0): Fraction(1)})

    @classmethod
    def y(cls) -> "BiPoly":
        return cls._raw({(0, 1): Fraction(1)})

    @classmethod
    def constant(cls, c: Coeff) -> "BiPoly":
        return cls({(0, 0): c})

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, i: int, j: int) -> Fraction:
        return self._terms.get((i, j), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def total_degree(self) -> int:
        return max((i + j for i, j in self._terms), default=-1)

    @property
    def x_degree(self) -> int:
        return max((i for i, _ in self._terms), default=-1)

    @property
    def y_degree(self) -> int:
        return max((j for _, j in self._terms), default=-1)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = BiPoly.constant(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def _coerce(self, other) -> "BiPoly":
        if isinstance(other, BiPoly):
            return other
        return BiPoly.constant(other)

    def __add__(self, other) -> "BiPoly":
        return poly_add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self) -> "BiPoly":
        return BiPoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "BiPoly":
        return poly_add(self, -self._coerce(other))

    def __rsub__(self, other) -> "BiPoly":
        return poly_add(self._coerce(other), -self)

    def __mul__(self, other) -> "BiPoly":
        if isinstance(other, BiPoly):
            return poly_mul(self, other)
        c = as_rational(other)
        if not c:
            return BiPoly()
        return BiPoly._raw({k: v * c for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BiPoly":
        if n < 0:
            raise ValueError("negative power")
        result = BiPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def partial(self, var: str) -> "BiPoly":
        return poly_partial(self, var)

    def __call__(self, x0: Coeff, y0: Coeff) -> Fraction:
        return self.evaluate(x0, y0)

    def evaluate(self, x0, y0):
        """Evaluate at a point; exact for rational input, also works on floats."""
        if not isinstance(x0, float):
            x0 = as_rational(x0)
        if not isinstance(y0, float):
            y0 = as_rational(y0)
        return sum((c * x0**i * y0**j for (i, j), c in self._terms.items()), Fraction(0))

    def shift(self, x0: Coeff, y0: Coeff) -> "BiPoly":
        """Return ``p(x + x0, y + y0)``."""
        x0, y0 = as_rational(x0), as_rational(y0)
        X = BiPoly.x() + x0
        Y = BiPoly.y() + y0
        out = BiPoly()
        for (i, j), c in self._terms.items():
            out = out + c * X**i * Y**j
        return out

    def y_columns(self) -> list[dict[int, Fraction]]:
        """Group terms by the power of y: ``cols[j][i]`` is the coefficient of x^i y^j."""
        cols: list[dict[int, Fraction]] = [dict() for _ in range(self.y_degree + 1)]
        for (i, j), c in self._terms.items():
            cols[j][i] = c
        return cols

    def __repr__(self) -> str:
        if not self._terms:
            return "BiPoly(0)"
        parts = []
        for (i, j), c in sorted(self._terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][0])):
            mono = "*".join(s for s in (_pw("x", i), _pw("y", j)) if s)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return "BiPoly(" + " + ".join(parts) + ")"


def _pw(name: str, e: int) -> str:
    if e == 0:
        return ""
    return name if e == 1 else f"{name}^{e}"


def poly_add(a: BiPoly, b: BiPoly) -> BiPoly:
    out = dict(a._terms)
    for k, c in b._terms.items():
        s = out.get(k, Fraction(0)) + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return BiPoly._raw(out)


def poly_mul(a: BiPoly, b: BiPoly) -> BiPoly:
    out: dict[tuple[int, int], Fraction] = {}
    for (i1, j1), c1 in a._terms.items():
        for (i2, j2), c2 in b._terms.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, Fraction(0)) + c1 * c2
    return BiPoly._raw({k: c for k, c in out.items() if c})


def poly_partial(a: BiPoly, var: str) -> BiPoly:
    if var == "x":
        return BiPoly._raw({(i - 1, j): c * i for (i, j), c in a._terms.items() if i})
    if var == "y":
        return BiPoly._raw({(i, j - 1): c * j for (i, j), c in a._terms.items() if j})
    raise ValueError(f"unknown variable {var!r}")


class UniSeries:
    """Truncated power series ``c0 + c1 x + ... + cK x^K + O(x^(K+1))``.

    ``order`` is K, the highest degree whose coefficient is valid.  Binary
    operations return a series of the smaller of the two orders.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Sequence[Coeff], order: int | None = None):
        cs = [as_rational(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("series order must be nonnegative")
        cs = cs[: order + 1] + [Fraction(0)] * (order + 1 - len(cs))
        self._coeffs = tuple(cs)

    @classmethod
    def _raw(cls, coeffs: tuple[Fraction, ...]) -> "UniSeries":
        obj = object.__new__(cls)
        obj._coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, order: int) -> "UniSeries":
        return cls._raw((Fraction(0),) * (order + 1))

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, Coeff], order: int) -> "UniSeries":
        cs = [Fraction(0)] * (order + 1)
        for k, c in coeffs.items():
            if k <= order:
                cs[k] += as_rational(c)
        return cls._raw(tuple(cs))

    @classmethod
    def monomial(cls, k: int, order: int, c: Coeff = 1) -> "UniSeries":
        return cls.from_dict({k: c}, order)

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    def __getitem__(self, k: int) -> Fraction:
        if k < 0 or k > self.order:
            raise IndexError(f"coefficient {k} outside validity order {self.order}")
        return self._coeffs[k]

    def __len__(self) -> int:
        return len(self._coeffs)

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None if zero through ``order``."""
        for k, c in enumerate(self._coeffs):
            if c:
                return k
        return None

    def is_zero(self) -> bool:
        return self.valuation() is None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UniSeries):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __add__(self, other: "UniSeries") -> "UniSeries":
        return series_add(self, other)

    def __neg__(self) -> "UniSeries":
        return UniSeries._raw(tuple(-c for c in self._coeffs))

    def __sub__(self, other: "UniSeries") -> "UniSeries":
        return series_add(self, -other)

    def __mul__(self, other) -> "UniSeries":
        if isinstance(other, UniSeries):
            return series_mul(self, other)
        c = as_rational(other)
        return UniSeries._raw(tuple(v * c for v in self._coeffs))

    __rmul__ = __mul__

    def truncate(self, order: int) -> "UniSeries":
        return series_truncate(self, order)

    def evaluate(self, x0):
        """Horner evaluation of the truncated polynomial part."""
        if not isinstance(x0, float):
            x0 = as_rational(x0)
        acc = Fraction(0) if not isinstance(x0, float) else 0.0
        for c in reversed(self._coeffs):
            acc = acc * x0 + c
        return acc

    def reflect(self) -> "UniSeries":
        """Return ``s(-x)``."""
        return UniSeries._raw(tuple(-c if k % 2 else c for k, c in enumerate(self._coeffs)))

    def nonzero_terms(self) -> dict[int, Fraction]:
        return {k: c for k, c in enumerate(self._coeffs) if c}

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*x^{k}" for k, c in self.nonzero_terms().items()) or "0"
        return f"UniSeries({body} + O(x^{self.order + 1}))"


def series_add(a: UniSeries, b: UniSeries) -> UniSeries:
    n = min(len(a._coeffs), len(b._coeffs))
    return UniSeries._raw(tuple(p + q for p, q in zip(a._coeffs[:n], b._coeffs[:n])))


def series_mul(a: UniSeries, b: UniSeries) -> UniSeries:
    K = min(a.order, b.order)
    ac, bc = a._coeffs, b._coeffs
    # skip leading zeros; most series here have high valuation
    a_nz = [(i, c) for i, c in enumerate(ac[: K + 1]) if c]
    b_nz = [(j, c) for j, c in enumerate(bc[: K + 1]) if c]
    out = [Fraction(0)] * (K + 1)
    for i, ci in a_nz:
        for j, cj in b_nz:
            if i + j > K:
                break
            out[i + j] += ci * cj
    return UniSeries._raw(tuple(out))


def series_truncate(a: UniSeries, order: int) -> UniSeries:
    if order > a.order:
        raise ValueError(f"cannot extend validity from order {a.order} to {order}")
    return UniSeries._raw(a._coeffs[: order + 1])


def substitute_y(a: BiPoly, s: UniSeries) -> UniSeries:
    """The series ``a(x, s(x))`` truncated at ``s.order``, by Horner in y."""
    K = s.order
    cols = a.y_columns()
    if not cols:
        return UniSeries.zero(K)
    acc = UniSeries.from_dict(cols[-1], K)
    for col in reversed(cols[:-1]):
        acc = series_mul(acc, s) + UniSeries.from_dict(col, K)
    return acc
