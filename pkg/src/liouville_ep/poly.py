"""Exact sparse multivariate polynomial arithmetic over Gaussian rationals.

Coefficients are complex numbers with exact rational real and imaginary parts
(`GaussRational`, built on `fractions.Fraction`).  Polynomials carry a fixed,
ordered variable tuple; every exponent vector has one slot per variable and
operations between polynomials require identical variable tuples.  Variable
lists are never extended silently: pick the ambient list for a computation up
front and stick with it.

The matrix layer (`PolyMatrix`) provides the handful of exact linear-algebra
routines the rest of the package needs: Kronecker products, the fraction-free
Bareiss determinant (with cofactor expansion as fallback), the Sylvester
resultant, and reduced row echelon rank over the constant field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

RationalLike = Union[int, Fraction]
ScalarLike = Union[int, Fraction, "GaussRational"]


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


@dataclass(frozen=True)
class GaussRational:
    """Complex number with exact rational parts, re + im*i."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re: RationalLike, im: RationalLike = 0) -> "GaussRational":
        return GaussRational(_as_fraction(re), _as_fraction(im))

    @staticmethod
    def coerce(x: ScalarLike) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        return GaussRational.of(x)

    def __add__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussRational":
        return GaussRational(-self.re, -self.im)

    def __mul__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussRational") -> "GaussRational":
        if other.is_zero():
            raise ZeroDivisionError("division by zero GaussRational")
        d = other.re * other.re + other.im * other.im
        return GaussRational(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


GR_ZERO = GaussRational.of(0)
GR_ONE = GaussRational.of(1)
GR_I = GaussRational.of(0, 1)


def _grlex_key(expo: tuple[int, ...]) -> tuple:
    # graded lexicographic: total degree first, then the exponent tuple itself
    # (leftmost variable most significant)
    return (sum(expo), expo)


class ExactDivisionError(ArithmeticError):
    """Raised when polynomial division is requested but not exact."""


class MultiPoly:
    """Sparse multivariate polynomial with GaussRational coefficients.

    Canonical form: `terms` maps exponent tuples (one entry per variable in
    `vars`) to nonzero coefficients.  The zero polynomial has an empty map.
    Instances are treated as immutable; do not mutate `terms` after creation.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], GaussRational]):
        vs = tuple(variables)
        clean: dict[tuple[int, ...], GaussRational] = {}
        for expo, coeff in terms.items():
            e = tuple(expo)
            if len(e) != len(vs):
                raise ValueError(f"exponent {e} does not match variables {vs}")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent in {e}")
            if not coeff.is_zero():
                clean[e] = coeff
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "terms", clean)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(variables: Sequence[str]) -> "MultiPoly":
        return MultiPoly(variables, {})

    @staticmethod
    def constant(variables: Sequence[str], value: ScalarLike) -> "MultiPoly":
        c = GaussRational.coerce(value)
        zero_expo = (0,) * len(tuple(variables))
        return MultiPoly(variables, {zero_expo: c})

    @staticmethod
    def variable(variables: Sequence[str], name: str) -> "MultiPoly":
        vs = tuple(variables)
        if name not in vs:
            raise ValueError(f"variable {name!r} not in {vs}")
        expo = tuple(1 if v == name else 0 for v in vs)
        return MultiPoly(vs, {expo: GR_ONE})

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(k == 0 for k in e) for e in self.terms)

    def constant_value(self) -> GaussRational:
        if self.is_zero():
            return GR_ZERO
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    # -- ring operations ---------------------------------------------------

    def _check_vars(self, other: "MultiPoly") -> None:
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_vars(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, GR_ZERO) + c
        return MultiPoly(self.vars, out)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_vars(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, GR_ZERO) - c
        return MultiPoly(self.vars, out)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_vars(other)
        out: dict[tuple[int, ...], GaussRational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                if e in out:
                    out[e] = out[e] + prod
                else:
                    out[e] = prod
        return MultiPoly(self.vars, out)

    def __pow__(self, n: int) -> "MultiPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MultiPoly.constant(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, value: ScalarLike) -> "MultiPoly":
        c = GaussRational.coerce(value)
        return MultiPoly(self.vars, {e: co * c for e, co in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.vars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        from .expr import format_poly  # local import: expr depends on poly

        return f"MultiPoly({format_poly(self)!r})"

    # -- structure ---------------------------------------------------------

    def degree(self, var: str | None = None) -> int:
        """Degree in `var`, or total degree when var is None; zero poly -> -1."""
        if self.is_zero():
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        idx = self.vars.index(var)
        return max(e[idx] for e in self.terms)

    def coefficients_in(self, var: str) -> dict[int, "MultiPoly"]:
        """Group terms by the exponent of `var`.

        Returns {exponent: coefficient polynomial}; coefficient polynomials
        live in the same ambient variable list with `var`-exponent zero.
        Only nonzero coefficients appear.
        """
        idx = self.vars.index(var)
        groups: dict[int, dict[tuple[int, ...], GaussRational]] = {}
        for e, c in self.terms.items():
            k = e[idx]
            rest = e[:idx] + (0,) + e[idx + 1:]
            groups.setdefault(k, {})[rest] = c
        return {k: MultiPoly(self.vars, t) for k, t in sorted(groups.items())}

    def coefficient_list(self, var: str) -> list["MultiPoly"]:
        """Dense ascending coefficient list [c0, c1, ..., c_deg] in `var`."""
        if self.is_zero():
            return [MultiPoly.zero(self.vars)]
        groups = self.coefficients_in(var)
        deg = max(groups)
        zero = MultiPoly.zero(self.vars)
        return [groups.get(k, zero) for k in range(deg + 1)]

    def derivative(self, var: str) -> "MultiPoly":
        idx = self.vars.index(var)
        out: dict[tuple[int, ...], GaussRational] = {}
        for e, c in self.terms.items():
            k = e[idx]
            if k == 0:
                continue
            e2 = e[:idx] + (k - 1,) + e[idx + 1:]
            out[e2] = out.get(e2, GR_ZERO) + c * GaussRational.of(k)
        return MultiPoly(self.vars, out)

    def uses_only(self, allowed: Iterable[str]) -> bool:
        """True when every term's support is within `allowed`."""
        allowed_idx = {self.vars.index(v) for v in allowed}
        for e in self.terms:
            for i, k in enumerate(e):
                if k > 0 and i not in allowed_idx:
                    return False
        return True

    # -- substitution and evaluation ---------------------------------------

    def substitute(self, bindings: Mapping[str, Union["MultiPoly", ScalarLike]]) -> "MultiPoly":
        """Simultaneously substitute polynomials or constants for variables.

        The result stays in the same ambient variable list.  Polynomial values
        must share that list.
        """
        values: dict[int, MultiPoly] = {}
        for name, val in bindings.items():
            idx = self.vars.index(name)
            if isinstance(val, MultiPoly):
                self._check_vars(val)
                values[idx] = val
            else:
                values[idx] = MultiPoly.constant(self.vars, val)
        if not values:
            return self
        power_cache: dict[tuple[int, int], MultiPoly] = {}

        def power(idx: int, k: int) -> MultiPoly:
            key = (idx, k)
            if key not in power_cache:
                power_cache[key] = values[idx] ** k
            return power_cache[key]

        result = MultiPoly.zero(self.vars)
        for e, c in self.terms.items():
            kept = tuple(0 if i in values else k for i, k in enumerate(e))
            term = MultiPoly(self.vars, {kept: c})
            for idx in values:
                if e[idx]:
                    term = term * power(idx, e[idx])
            result = result + term
        return result

    def evaluate(self, assignment: Mapping[str, complex]) -> complex:
        """Numerically evaluate with every variable bound to a complex number."""
        vals = []
        for v in self.vars:
            if v not in assignment:
                raise ValueError(f"no value for variable {v!r}")
            vals.append(complex(assignment[v]))
        total = 0j
        for e, c in self.terms.items():
            m = complex(c)
            for base, k in zip(vals, e):
                if k:
                    m *= base ** k
            total += m
        return total

    # -- exact division ----------------------------------------------------

    def exact_div(self, divisor: "MultiPoly") -> "MultiPoly":
        """Exact polynomial division; raises ExactDivisionError if not exact."""
        self._check_vars(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return self
        if divisor.is_constant():
            inv = GR_ONE / divisor.constant_value()
            return self.scale(inv)
        d_lead = max(divisor.terms, key=_grlex_key)
        d_coeff = divisor.terms[d_lead]
        remainder = dict(self.terms)
        quotient: dict[tuple[int, ...], GaussRational] = {}
        while remainder:
            r_lead = max(remainder, key=_grlex_key)
            e = tuple(a - b for a, b in zip(r_lead, d_lead))
            if any(k < 0 for k in e):
                raise ExactDivisionError("division is not exact")
            q_coeff = remainder[r_lead] / d_coeff
            quotient[e] = q_coeff
            for de, dc in divisor.terms.items():
                te = tuple(a + b for a, b in zip(e, de))
                new = remainder.get(te, GR_ZERO) - q_coeff * dc
                if new.is_zero():
                    remainder.pop(te, None)
                else:
                    remainder[te] = new
        return MultiPoly(self.vars, quotient)


# -- matrices ---------------------------------------------------------------


class PolyMatrix:
    """Dense matrix of MultiPoly entries sharing one variable list."""

    __slots__ = ("vars", "rows")

    def __init__(self, rows: Sequence[Sequence[MultiPoly]]):
        rs = tuple(tuple(row) for row in rows)
        if not rs or not rs[0]:
            raise ValueError("matrix must be non-empty")
        width = len(rs[0])
        vs = rs[0][0].vars
        for row in rs:
            if len(row) != width:
                raise ValueError("ragged matrix")
            for entry in row:
                if entry.vars != vs:
                    raise ValueError("mixed variable lists in matrix")
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "rows", rs)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]))

    def __getitem__(self, rc: tuple[int, int]) -> MultiPoly:
        r, c = rc
        return self.rows[r][c]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.vars == other.vars and self.rows == other.rows

    @staticmethod
    def identity(variables: Sequence[str], n: int) -> "PolyMatrix":
        one = MultiPoly.constant(variables, 1)
        zero = MultiPoly.zero(variables)
        return PolyMatrix([[one if i == j else zero for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(variables: Sequence[str], n: int, m: int | None = None) -> "PolyMatrix":
        zero = MultiPoly.zero(variables)
        m = n if m is None else m
        return PolyMatrix([[zero for _ in range(m)] for _ in range(n)])

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)]
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)]
        )

    def scale(self, factor: MultiPoly | ScalarLike) -> "PolyMatrix":
        if not isinstance(factor, MultiPoly):
            factor = MultiPoly.constant(self.vars, factor)
        return PolyMatrix([[factor * e for e in row] for row in self.rows])

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError("shape mismatch in matmul")
        zero = MultiPoly.zero(self.vars)
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = zero
                for t in range(k):
                    acc = acc + self.rows[i][t] * other.rows[t][j]
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def transpose(self) -> "PolyMatrix":
        n, m = self.shape
        return PolyMatrix([[self.rows[i][j] for i in range(n)] for j in range(m)])

    def conjugate(self) -> "PolyMatrix":
        """Entrywise coefficient conjugation; variables are treated as real."""
        return PolyMatrix(
            [
                [MultiPoly(e.vars, {k: c.conjugate() for k, c in e.terms.items()}) for e in row]
                for row in self.rows
            ]
        )

    def dagger(self) -> "PolyMatrix":
        return self.conjugate().transpose()

    def kron(self, other: "PolyMatrix") -> "PolyMatrix":
        n, m = self.shape
        p, q = other.shape
        out = [[None] * (m * q) for _ in range(n * p)]
        for i in range(n):
            for j in range(m):
                a = self.rows[i][j]
                for k in range(p):
                    for l in range(q):
                        out[i * p + k][j * q + l] = a * other.rows[k][l]
        return PolyMatrix(out)

    def trace(self) -> MultiPoly:
        n, m = self.shape
        if n != m:
            raise ValueError("trace of non-square matrix")
        acc = MultiPoly.zero(self.vars)
        for i in range(n):
            acc = acc + self.rows[i][i]
        return acc

    def substitute(self, bindings: Mapping[str, Union[MultiPoly, ScalarLike]]) -> "PolyMatrix":
        return PolyMatrix([[e.substitute(bindings) for e in row] for row in self.rows])

    def evaluate(self, assignment: Mapping[str, complex]):
        """Numeric matrix as a nested list of complex numbers."""
        return [[e.evaluate(assignment) for e in row] for row in self.rows]


def det_cofactor(matrix: PolyMatrix) -> MultiPoly:
    """Determinant by Laplace expansion along the first row.  Exponential;
    kept as the fallback and as the independent cross-check for Bareiss."""
    n, m = matrix.shape
    if n != m:
        raise ValueError("determinant of non-square matrix")
    rows = matrix.rows

    def rec(row_idx: int, cols: tuple[int, ...]) -> MultiPoly:
        if len(cols) == 1:
            return rows[row_idx][cols[0]]
        acc = MultiPoly.zero(matrix.vars)
        for pos, c in enumerate(cols):
            entry = rows[row_idx][c]
            if entry.is_zero():
                continue
            minor = rec(row_idx + 1, cols[:pos] + cols[pos + 1:])
            term = entry * minor
            acc = acc + term if pos % 2 == 0 else acc - term
        return acc

    return rec(0, tuple(range(n)))


def det_bareiss(matrix: PolyMatrix) -> MultiPoly:
    """Fraction-free Bareiss determinant.

    All intermediate divisions are exact.  Row pivoting handles zero pivots;
    if a pivot column is zero everywhere below the current row the routine
    falls back to cofactor expansion of the original matrix.
    """
    n, m = matrix.shape
    if n != m:
        raise ValueError("determinant of non-square matrix")
    if n == 1:
        return matrix.rows[0][0]
    work = [list(row) for row in matrix.rows]
    sign = 1
    prev = MultiPoly.constant(matrix.vars, 1)
    for k in range(n - 1):
        if work[k][k].is_zero():
            pivot_row = next((r for r in range(k + 1, n) if not work[r][k].is_zero()), None)
            if pivot_row is None:
                # singular leading column; the determinant is 0, but defer to
                # the cofactor route rather than encode that inference here
                return det_cofactor(matrix)
            work[k], work[pivot_row] = work[pivot_row], work[k]
            sign = -sign
        pivot = work[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = work[i][j] * pivot - work[i][k] * work[k][j]
                work[i][j] = num.exact_div(prev)
            work[i][k] = MultiPoly.zero(matrix.vars)
        prev = pivot
    result = work[n - 1][n - 1]
    return result if sign == 1 else -result


def sylvester_resultant(f: MultiPoly, g: MultiPoly, var: str) -> MultiPoly:
    """Resultant of f and g with respect to `var` via the Sylvester matrix.

    Degree-zero edge cases follow the usual conventions: Res(c, g) = c^deg(g).
    Both inputs degree zero in `var` is an error (nothing to eliminate).
    """
    if f.vars != g.vars:
        raise ValueError("variable mismatch")
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of the zero polynomial")
    m = f.degree(var)
    n = g.degree(var)
    if m == 0 and n == 0:
        raise ValueError("both polynomials are constant in " + repr(var))
    if m == 0:
        return f ** n
    if n == 0:
        return g ** m
    fc = f.coefficient_list(var)  # ascending
    gc = g.coefficient_list(var)
    size = m + n
    zero = MultiPoly.zero(f.vars)
    rows = []
    # n rows of f's coefficients, descending, shifted right
    for shift in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(fc)):  # c_m, ..., c_0
            row[shift + k] = c
        rows.append(row)
    for shift in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(gc)):
            row[shift + k] = c
        rows.append(row)
    return det_bareiss(PolyMatrix(rows))


def _univariate_coeffs(p: MultiPoly, var: str) -> list[GaussRational]:
    """Ascending constant coefficients of a polynomial univariate in `var`."""
    if not p.uses_only([var]):
        raise ValueError(f"polynomial is not univariate in {var!r}")
    return [c.constant_value() for c in p.coefficient_list(var)]


def _from_univariate(coeffs: Sequence[GaussRational], variables: Sequence[str], var: str) -> MultiPoly:
    vs = tuple(variables)
    idx = vs.index(var)
    terms = {}
    for k, c in enumerate(coeffs):
        e = tuple(k if i == idx else 0 for i in range(len(vs)))
        terms[e] = c
    return MultiPoly(vs, terms)


def gcd_univariate(f: MultiPoly, g: MultiPoly, var: str) -> MultiPoly:
    """Monic gcd of two univariate polynomials over the Gaussian rationals.

    Inputs must be univariate in `var` (other ambient variables already
    substituted away).  gcd(0, 0) is an error; gcd with one zero argument is
    the monic normalization of the other.
    """
    if f.vars != g.vars:
        raise ValueError("variable mismatch")
    a = _univariate_coeffs(f, var)
    b = _univariate_coeffs(g, var)

    def trim(c: list[GaussRational]) -> list[GaussRational]:
        while c and c[-1].is_zero():
            c.pop()
        return c

    a, b = trim(list(a)), trim(list(b))
    if not a and not b:
        raise ValueError("gcd(0, 0) is undefined")

    def rem(num: list[GaussRational], den: list[GaussRational]) -> list[GaussRational]:
        num = list(num)
        dn = len(den) - 1
        lead = den[-1]
        while len(num) - 1 >= dn and num:
            k = len(num) - 1 - dn
            q = num[-1] / lead
            for i, dc in enumerate(den):
                num[k + i] = num[k + i] - q * dc
            num = trim(num)
            if not num:
                break
        return num

    while b:
        a, b = b, rem(a, b)
    lead = a[-1]
    monic = [c / lead for c in a]
    return _from_univariate(monic, f.vars, var)
