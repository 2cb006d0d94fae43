"""Exact location and classification of spectral degeneracies.

Pipeline: the shifted characteristic polynomial det(L - (omega + omega0) I),
kept fully symbolic in the model parameters and omega0, has a degenerate
eigenvalue at omega0 exactly when its lowest omega-coefficients vanish.  The
two lowest (value and first derivative at omega = 0) are the degeneracy
conditions; eliminating omega0 between them by a resultant yields one
polynomial in the parameters whose zero set carries every double point.  A
one-parameter scan specializes the remaining parameters to exact rationals,
solves the resultant numerically, snaps roots back to exact rationals, and
verifies them symbolically before classifying each degeneracy through the
Newton polygon of a seeded generic perturbation plus an exact geometric
multiplicity computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .models import EPSILON, OMEGA, OMEGA0, generic_perturbation, char_poly
from .newton import (
    EPReport,
    NewtonPolygon,
    assert_routes_agree,
    ep_orders,
    lower_hull,
    newton_points,
)
from .numerics import NumericalError, roots_aberth
from .poly import (
    GR_ZERO,
    GaussRational,
    MultiPoly,
    PolyMatrix,
    gcd_univariate,
    sylvester_resultant,
)


@dataclass(frozen=True)
class DegeneracyConditions:
    """The k lowest omega-coefficients of an epsilon-free shifted char poly."""

    conditions: tuple[MultiPoly, ...]  # ascending: c_0, c_1, ...

    @property
    def count(self) -> int:
        return len(self.conditions)


def degeneracy_conditions(charpoly: MultiPoly, k: int = 2, omega: str = OMEGA) -> DegeneracyConditions:
    """Extract c_0 .. c_{k-1}; requires an epsilon-free polynomial."""
    if charpoly.is_zero():
        raise ValueError("zero characteristic polynomial")
    if charpoly.degree(EPSILON) > 0:
        raise ValueError("characteristic polynomial must be epsilon-free here")
    deg = charpoly.degree(omega)
    if not 1 <= k <= deg:
        raise ValueError(f"k must be between 1 and deg_omega = {deg}")
    coeffs = charpoly.coefficient_list(omega)
    return DegeneracyConditions(tuple(coeffs[:k]))


def eliminate_shift(conds: DegeneracyConditions, shift_var: str = OMEGA0) -> MultiPoly:
    """Resultant of the two lowest conditions with respect to the shift."""
    if conds.count < 2:
        raise ValueError("need at least two degeneracy conditions")
    c0, c1 = conds.conditions[0], conds.conditions[1]
    if c0.degree(shift_var) < 1 or c1.degree(shift_var) < 1:
        raise ValueError(
            f"a degeneracy condition is free of {shift_var!r}; "
            "solve it directly instead of eliminating"
        )
    return sylvester_resultant(c1, c0, shift_var)


# -- exact rank / geometric multiplicity ---------------------------------------


def _constant_rows(matrix: PolyMatrix) -> list[list[GaussRational]]:
    rows = []
    for row in matrix.rows:
        out = []
        for entry in row:
            if not entry.is_constant():
                raise ValueError("matrix entry is not constant; bind parameters first")
            out.append(entry.constant_value())
        rows.append(out)
    return rows


def rank_exact(matrix: PolyMatrix) -> int:
    """Rank of a constant matrix by exact Gaussian elimination."""
    work = _constant_rows(matrix)
    nrows = len(work)
    ncols = len(work[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, nrows) if not work[r][col].is_zero()), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = work[rank][col]
        for r in range(rank + 1, nrows):
            if work[r][col].is_zero():
                continue
            factor = work[r][col] / inv
            work[r] = [a - factor * b for a, b in zip(work[r], work[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def geometric_multiplicity(matrix: PolyMatrix, eigenvalue: GaussRational) -> int:
    """dim ker(M - lambda I) over the exact constant field."""
    n, m = matrix.shape
    if n != m:
        raise ValueError("square matrix required")
    lam = MultiPoly.constant(matrix.vars, eigenvalue)
    shifted = matrix - PolyMatrix.identity(matrix.vars, n).scale(lam)
    return n - rank_exact(shifted)


# -- candidate solving -----------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    """Outcome of the polygon + multiplicity analysis at one exact point."""

    kind: str  # 'ep' | 'diabolic' | 'inconclusive'
    order: int | None
    alg_mult: int
    geom_mult: int
    report: EPReport
    polygon: NewtonPolygon
    seeds: tuple[int, ...]
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Candidate:
    """One root of the eliminated resultant, snapped to an exact value."""

    param: str
    value: GaussRational
    exact: bool
    omega0_values: tuple[GaussRational, ...]
    flags: tuple[str, ...]
    classifications: tuple[tuple[GaussRational, Classification], ...] = ()


@dataclass(frozen=True)
class ScanResult:
    param: str
    bindings: dict
    continuum: bool
    candidates: tuple[Candidate, ...]


def _rationalize(z: complex, max_denominator: int = 10**6) -> GaussRational:
    return GaussRational(
        Fraction(z.real).limit_denominator(max_denominator),
        Fraction(z.imag).limit_denominator(max_denominator),
    )


def _to_univariate_complex(p: MultiPoly, var: str) -> list[complex]:
    return [complex(c.constant_value()) for c in p.coefficient_list(var)]


def _square_free(p: MultiPoly, var: str) -> MultiPoly:
    """Exact square-free part p / gcd(p, p'), so every root becomes simple.

    Multiple resultant roots are the norm at diabolic points; floating-point
    root finders only locate an m-fold root to ~eps^(1/m), which would defeat
    the rational snap-back.  Dividing out the repeated factors keeps the
    numeric step well conditioned.
    """
    d = p.derivative(var)
    if d.is_zero():
        return p
    g = gcd_univariate(p, d, var)
    if g.degree(var) < 1:
        return p
    return p.exact_div(g)


def _exact_roots_univariate(g: MultiPoly, var: str) -> tuple[list[GaussRational], bool]:
    """Roots of a univariate polynomial; exact when they snap to rationals.

    Returns (roots, all_exact).  Non-rational roots are returned rationalized
    but flagged by all_exact = False.
    """
    g = _square_free(g, var)
    coeffs = g.coefficient_list(var)
    deg = len(coeffs) - 1
    if deg == 1:
        c0 = coeffs[0].constant_value()
        c1 = coeffs[1].constant_value()
        return [GR_ZERO - c0 / c1], True
    roots = roots_aberth(_to_univariate_complex(g, var))
    out: list[GaussRational] = []
    all_exact = True
    for r in roots:
        cand = _rationalize(complex(r))
        val = g.substitute({var: cand})
        if val.is_zero():
            if cand not in out:
                out.append(cand)
        else:
            all_exact = False
            out.append(cand)
    return out, all_exact


def solve_candidates(
    resultant: MultiPoly,
    target: str,
    bindings: Mapping[str, Fraction],
    conds: DegeneracyConditions,
    shift_var: str = OMEGA0,
    dedupe_tol: float = 1e-9,
    verify_tol: float = 1e-8,
) -> ScanResult:
    """Solve the specialized resultant for one parameter and verify the roots.

    All parameters except `target` must be bound to exact rationals.  An
    identically vanishing specialized resultant means a continuum of
    degeneracies (flagged, not an error).  Each numeric root is snapped to a
    nearby rational; a candidate counts as exact when the two degeneracy
    conditions acquire a common root symbolically (nonzero gcd in the shift),
    otherwise it is kept with an 'approximate' flag when the conditions are
    satisfied to `verify_tol`, or 'unverified' when they are not.
    """
    specialized = resultant.substitute(dict(bindings))
    if specialized.is_zero():
        return ScanResult(target, dict(bindings), True, ())
    if not specialized.uses_only([target]):
        raise ValueError("bindings must fix every parameter except the target")
    if specialized.is_constant():
        return ScanResult(target, dict(bindings), False, ())
    specialized = _square_free(specialized, target)
    roots = roots_aberth(_to_univariate_complex(specialized, target))
    # dedupe numerically before snapping
    unique: list[complex] = []
    for r in sorted(roots, key=lambda z: (z.real, z.imag)):
        if not any(abs(r - u) <= dedupe_tol for u in unique):
            unique.append(complex(r))
    bound_conds = [c.substitute(dict(bindings)) for c in conds.conditions]
    candidates: list[Candidate] = []
    seen_exact: set[GaussRational] = set()
    for z in unique:
        value = _rationalize(z)
        c_at = [c.substitute({target: value}) for c in bound_conds]
        flags: list[str] = []
        omega0_values: tuple[GaussRational, ...] = ()
        exact = False
        if all(c.is_zero() for c in c_at):
            exact = True
            flags.append("omega0-continuum")
        else:
            g = gcd_univariate(c_at[0], c_at[1], shift_var)
            if g.degree(shift_var) >= 1:
                roots_w, roots_exact = _exact_roots_univariate(g, shift_var)
                omega0_values = tuple(roots_w)
                exact = roots_exact
                if not roots_exact:
                    flags.append("approximate")
            else:
                # rational snap failed symbolically; fall back to the numeric
                # tolerance check at near-common roots of the two conditions
                near = _near_common_roots(c_at, shift_var, verify_tol)
                if near:
                    omega0_values = tuple(_rationalize(w) for w in near)
                    flags.append("approximate")
                else:
                    flags.append("unverified")
        if exact and value in seen_exact:
            continue
        if exact:
            seen_exact.add(value)
        candidates.append(Candidate(target, value, exact, omega0_values, tuple(flags)))
    return ScanResult(target, dict(bindings), False, tuple(candidates))


def _near_common_roots(c_at: Sequence[MultiPoly], shift_var: str, tol: float) -> list[complex]:
    lists = []
    for c in c_at:
        if c.is_zero():
            continue
        if c.degree(shift_var) < 1:
            return []
        try:
            lists.append(list(roots_aberth(_to_univariate_complex(c, shift_var))))
        except NumericalError:
            return []
    if len(lists) < 2:
        return lists[0] if lists else []
    out = []
    for r in lists[0]:
        if any(abs(r - s) <= tol for s in lists[1]):
            out.append(complex(r))
    return out


# -- classification -----------------------------------------------------------------


def classify(
    bound_matrix: PolyMatrix,
    omega0: GaussRational,
    seed: int = 42,
    seeds: int = 3,
) -> Classification:
    """Classify an exact degeneracy of a fully bound generator.

    Requires omega0 to be an exact eigenvalue (the constant term of the
    shifted characteristic polynomial must vanish identically).  The Newton
    polygon of a seeded generic perturbation is recomputed for `seeds`
    consecutive seeds; disagreement marks the point inconclusive.  Rules:

      * EP(n): some root valuation equals 1/n with n >= 2 and the geometric
        multiplicity is below the algebraic one (defective);
      * diabolic: every finite positive valuation equals 1 and the geometric
        multiplicity equals the algebraic one (semisimple linear splitting);
      * anything else: inconclusive.
    """
    n, m = bound_matrix.shape
    if n != m:
        raise ValueError("square matrix required")
    base = char_poly(bound_matrix, None, shift=omega0)
    coeffs = base.coefficient_list(OMEGA)
    if not coeffs[0].is_zero():
        raise ValueError("omega0 is not an exact eigenvalue of the bound generator")
    alg_mult = next(k for k, c in enumerate(coeffs) if not c.is_zero())
    geom_mult = geometric_multiplicity(bound_matrix, omega0)
    notes: list[str] = []
    polygons = []
    reports = []
    seed_list = tuple(range(seed, seed + seeds))
    for s in seed_list:
        l1 = generic_perturbation(bound_matrix.vars, n, s)
        f = char_poly(bound_matrix, l1, shift=omega0)
        report = assert_routes_agree(f)
        polygons.append(lower_hull(newton_points(f)))
        reports.append(report)
    signature = {tuple((seg.slope, seg.hspan) for seg in p.segments) for p in polygons}
    agree = len(signature) == 1
    if not agree:
        notes.append("seed-disagreement")
    report = reports[0]
    polygon = polygons[0]
    positive = [(v, mult) for v, mult in report.finite() if v > 0]
    vanishing = sum(mult for _, mult in positive)
    inf_mult = sum(mult for v, mult in report.entries if math.isinf(v))
    if vanishing + inf_mult != alg_mult:
        notes.append("perturbation-multiplicity-mismatch")
    order = report.max_order()
    if not agree:
        kind = "inconclusive"
        order = None
    elif order is not None and geom_mult < alg_mult:
        kind = "ep"
    elif positive and all(v == 1 for v, _ in positive) and geom_mult == alg_mult:
        kind = "diabolic"
        order = None
    else:
        kind = "inconclusive"
        order = None
    return Classification(
        kind, order, alg_mult, geom_mult, report, polygon, seed_list, tuple(notes)
    )


def scan_parameter(
    generator: PolyMatrix,
    target: str,
    bindings: Mapping[str, Fraction],
    rate_params: Sequence[str] = (),
    seed: int = 42,
) -> ScanResult:
    """Full scan: conditions -> resultant -> candidates -> classification.

    `generator` is the symbolic superoperator matrix; `bindings` fixes every
    model parameter except `target`.  Candidates with exact verification are
    classified at each back-solved omega0; candidates binding a dissipation
    rate (listed in rate_params) to a negative or non-real value are flagged
    nonphysical but never dropped.
    """
    variables = generator.vars
    shift = MultiPoly.variable(variables, OMEGA0)
    p = char_poly(generator, None, shift=shift)
    conds = degeneracy_conditions(p, 2)
    resultant = eliminate_shift(conds)
    result = solve_candidates(resultant, target, bindings, conds)
    if result.continuum:
        return result
    enriched: list[Candidate] = []
    for cand in result.candidates:
        flags = list(cand.flags)
        if target in rate_params and (cand.value.im != 0 or cand.value.re < 0):
            flags.append("nonphysical")
        for name in rate_params:
            if name in bindings and Fraction(bindings[name]) < 0 and "nonphysical" not in flags:
                flags.append("nonphysical")
        classifications = []
        if cand.exact:
            bound = generator.substitute({**dict(bindings), target: cand.value})
            for w0 in cand.omega0_values:
                classifications.append((w0, classify(bound, w0, seed=seed)))
        enriched.append(
            Candidate(
                cand.param,
                cand.value,
                cand.exact,
                cand.omega0_values,
                tuple(flags),
                tuple(classifications),
            )
        )
    return ScanResult(result.param, result.bindings, False, tuple(enriched))
