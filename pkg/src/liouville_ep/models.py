"""Exact vectorized Liouvillians for open quantum systems.

A model is a Hamiltonian plus a list of dissipation channels with polynomial
rates.  Density matrices are flattened row-major: index(row, col) = row*dim +
col, so vec(A rho B) = (A kron B^T) vec(rho).  The generator assembled here is

    L = -i (H kron I - I kron H^T)
        + sum_k rate_k (G kron conj(G) - 1/2 (G^H G) kron I - 1/2 I kron (G^H G)^T)

with G the channel operator.  Loss-only channels (population leaving the
modeled subspace) contribute only the anticommutator part; for those the
stored operator stands in for the leaving operator and only G^H G enters.

Reserved variable names: 'omega' (the eigenvalue variable), 'epsilon' (the
perturbation strength), 'omega0' (the spectral shift), and 'i'.  Model
parameters may not collide with them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .expr import parse_expression
from .poly import GaussRational, MultiPoly, PolyMatrix, ScalarLike, det_bareiss

OMEGA = "omega"
EPSILON = "epsilon"
OMEGA0 = "omega0"
RESERVED_NAMES = ("i", OMEGA, EPSILON, OMEGA0)


def flatten_index(row: int, col: int, dim: int) -> int:
    """Row-major position of a density-matrix entry in its vectorization."""
    if not (0 <= row < dim and 0 <= col < dim):
        raise ValueError(f"index ({row}, {col}) out of range for dim {dim}")
    return row * dim + col


def ambient_variables(params: Sequence[str]) -> tuple[str, ...]:
    """Canonical variable list for a model: parameters, then omega0, omega, epsilon."""
    return tuple(params) + (OMEGA0, OMEGA, EPSILON)


@dataclass(frozen=True)
class JumpChannel:
    """One dissipation channel: rate polynomial and jump operator.

    refill=False marks a loss-only channel: the recycling term G kron conj(G)
    is dropped because the population lands outside the modeled subspace.
    """

    rate: MultiPoly
    operator: PolyMatrix
    refill: bool = True


@dataclass(frozen=True)
class ModelSpec:
    name: str
    dim: int
    params: tuple[str, ...]
    hamiltonian: PolyMatrix
    channels: tuple[JumpChannel, ...]

    def __post_init__(self):
        for p in self.params:
            if p in RESERVED_NAMES:
                raise ValueError(f"parameter name {p!r} is reserved")
        if len(set(self.params)) != len(self.params):
            raise ValueError("duplicate parameter names")
        n, m = self.hamiltonian.shape
        if n != m or n != self.dim:
            raise ValueError("hamiltonian shape does not match dim")
        for ch in self.channels:
            if ch.operator.shape != (self.dim, self.dim):
                raise ValueError("channel operator shape does not match dim")

    @property
    def variables(self) -> tuple[str, ...]:
        return ambient_variables(self.params)


@dataclass(frozen=True)
class Superoperator:
    """A dim^2 x dim^2 generator acting on row-major vectorized densities."""

    dim: int
    matrix: PolyMatrix

    def __post_init__(self):
        n, m = self.matrix.shape
        if n != m or n != self.dim * self.dim:
            raise ValueError("superoperator must be dim^2 square")


def _channel_pieces(spec: ModelSpec, ch: JumpChannel) -> tuple[PolyMatrix, PolyMatrix]:
    """(anticommutator part, refill part) of one channel, rate included."""
    variables = spec.variables
    n = spec.dim
    ident = PolyMatrix.identity(variables, n)
    g = ch.operator
    ghg = g.dagger() @ g
    half = Fraction(1, 2)
    anti = (ghg.kron(ident) + ident.kron(ghg.transpose())).scale(-half).scale(ch.rate)
    refill = g.kron(g.conjugate()).scale(ch.rate)
    return anti, refill


def channel_refill(spec: ModelSpec, index: int) -> PolyMatrix:
    """Refill (quantum-jump) superoperator term of one channel."""
    ch = spec.channels[index]
    if not ch.refill:
        raise ValueError("loss-only channel has no refill term")
    _, refill = _channel_pieces(spec, ch)
    return refill


def build_liouvillian(spec: ModelSpec) -> Superoperator:
    """Assemble the full generator of the model."""
    variables = spec.variables
    n = spec.dim
    ident = PolyMatrix.identity(variables, n)
    h = spec.hamiltonian
    commutator = h.kron(ident) - ident.kron(h.transpose())
    total = commutator.scale(GaussRational.of(0, -1))
    for ch in spec.channels:
        anti, refill = _channel_pieces(spec, ch)
        total = total + anti
        if ch.refill:
            total = total + refill
    return Superoperator(n, total)


def char_poly(
    l0: Union[Superoperator, PolyMatrix],
    perturbation: PolyMatrix | None = None,
    shift: Union[MultiPoly, ScalarLike] = 0,
) -> MultiPoly:
    """Shifted characteristic polynomial det(L0 + eps*L1 - (omega + shift) I).

    The convention puts the eigenvalue at omega = 0: with shift = s, omega = 0
    is a root exactly when s is an eigenvalue of L0 + eps*L1.  `shift` may be
    a constant or a polynomial (typically the bare variable omega0).
    """
    matrix = l0.matrix if isinstance(l0, Superoperator) else l0
    variables = matrix.vars
    if OMEGA not in variables or EPSILON not in variables:
        raise ValueError(f"ambient variables must include {OMEGA!r} and {EPSILON!r}")
    n, m = matrix.shape
    if n != m:
        raise ValueError("square matrix required")
    if not isinstance(shift, MultiPoly):
        shift = MultiPoly.constant(variables, shift)
    elif shift.vars != variables:
        raise ValueError("shift polynomial lives in a different variable list")
    work = matrix
    if perturbation is not None:
        if perturbation.shape != matrix.shape:
            raise ValueError("perturbation shape mismatch")
        eps = MultiPoly.variable(variables, EPSILON)
        work = work + perturbation.scale(eps)
    omega = MultiPoly.variable(variables, OMEGA)
    work = work - PolyMatrix.identity(variables, n).scale(omega + shift)
    return det_bareiss(work)


def perturbation_matrix(superop: Union[Superoperator, PolyMatrix], param: str) -> PolyMatrix:
    """Entrywise partial derivative of the generator with respect to one parameter."""
    matrix = superop.matrix if isinstance(superop, Superoperator) else superop
    if param not in matrix.vars:
        raise ValueError(f"unknown parameter {param!r}")
    return PolyMatrix([[e.derivative(param) for e in row] for row in matrix.rows])


def generic_perturbation(variables: Sequence[str], size: int, seed: int) -> PolyMatrix:
    """Deterministic dense perturbation with small Gaussian-integer entries.

    Real and imaginary parts are drawn independently and uniformly from
    {-9, ..., 9}, row-major, real part first, from random.Random(seed).
    """
    rng = random.Random(seed)
    rows = []
    for _ in range(size):
        row = []
        for _ in range(size):
            re = rng.randint(-9, 9)
            im = rng.randint(-9, 9)
            row.append(MultiPoly.constant(variables, GaussRational.of(re, im)))
        rows.append(row)
    return PolyMatrix(rows)


# -- built-in models ----------------------------------------------------------


@dataclass(frozen=True)
class BuiltinModel:
    """Model bundle: spec plus the generator split used by the analyses.

    l0 is the deterministic (no-jump) part and l_jumps the recycling term that
    is treated as the perturbation in hybrid analyses; for fully Lindbladian
    models l_jumps is None and l0 is the complete generator.
    """

    name: str
    spec: ModelSpec
    l0: Superoperator
    l_jumps: Superoperator | None = None
    rate_params: tuple[str, ...] = field(default=())

    @property
    def l_eff(self) -> Superoperator:
        if self.l_jumps is None:
            return self.l0
        return Superoperator(self.l0.dim, self.l0.matrix + self.l_jumps.matrix)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.spec.variables


def _matrix_from_strings(rows: Sequence[Sequence[str]], variables: Sequence[str]) -> PolyMatrix:
    return PolyMatrix([[parse_expression(s, variables) for s in row] for row in rows])


def _rate_param_names(spec: ModelSpec) -> tuple[str, ...]:
    names = []
    for ch in spec.channels:
        for p in spec.params:
            idx = spec.variables.index(p)
            if any(e[idx] > 0 for e in ch.rate.terms) and p not in names:
                names.append(p)
    return tuple(names)


def _spin_half() -> BuiltinModel:
    params = ("Omega", "gamma_minus", "gamma_x", "gamma_y")
    variables = ambient_variables(params)
    h = _matrix_from_strings([["Omega/2", "0"], ["0", "-Omega/2"]], variables)
    lower = _matrix_from_strings([["0", "0"], ["1", "0"]], variables)
    sx = _matrix_from_strings([["0", "1"], ["1", "0"]], variables)
    sy = _matrix_from_strings([["0", "-i"], ["i", "0"]], variables)
    channels = (
        JumpChannel(parse_expression("gamma_minus", variables), lower),
        JumpChannel(parse_expression("gamma_x", variables), sx),
        JumpChannel(parse_expression("gamma_y", variables), sy),
    )
    spec = ModelSpec("spin_half", 2, params, h, channels)
    l_full = build_liouvillian(spec)
    return BuiltinModel("spin_half", spec, l_full, None, _rate_param_names(spec))


def _qubit() -> BuiltinModel:
    # two-level submanifold {e, f} of a three-level ladder; the e -> ground
    # decay leaves the subspace (loss-only channel), the f -> e decay stays
    # inside and its recycling term is the natural perturbation block
    params = ("gamma_e", "gamma_f", "J")
    variables = ambient_variables(params)
    h = _matrix_from_strings([["0", "J"], ["J", "0"]], variables)
    loss_e = _matrix_from_strings([["1", "0"], ["0", "0"]], variables)
    decay_fe = _matrix_from_strings([["0", "1"], ["0", "0"]], variables)
    channels = (
        JumpChannel(parse_expression("gamma_e", variables), loss_e, refill=False),
        JumpChannel(parse_expression("gamma_f", variables), decay_fe, refill=True),
    )
    spec = ModelSpec("qubit", 2, params, h, channels)
    l_full = build_liouvillian(spec)
    jumps = channel_refill(spec, 1)
    l0 = Superoperator(2, l_full.matrix - jumps)
    return BuiltinModel("qubit", spec, l0, Superoperator(2, jumps), _rate_param_names(spec))


_BUILTINS = {"spin_half": _spin_half, "qubit": _qubit}


def builtin_model(name: str) -> BuiltinModel:
    """Construct a built-in model bundle ('spin_half' or 'qubit')."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown builtin model {name!r}; have {sorted(_BUILTINS)}") from None
    return factory()


def model_from_dict(data: Mapping) -> BuiltinModel:
    """Build a model bundle from a plain dict (the JSON model-file shape).

    Expected keys: name (str), dim (int), params (list of str), hamiltonian
    (dim x dim nested list of expression strings), jumps (list of {rate:
    expression string, operator: nested list}).  All channels are standard
    Lindblad channels; the bundle has no jump split.
    """
    try:
        name = str(data["name"])
        dim = int(data["dim"])
        params = tuple(str(p) for p in data["params"])
        ham_rows = data["hamiltonian"]
        jumps = data.get("jumps", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed model description: {exc}") from exc
    variables = ambient_variables(params)
    h = _matrix_from_strings(ham_rows, variables)
    channels = []
    for j in jumps:
        rate = parse_expression(str(j["rate"]), variables)
        op = _matrix_from_strings(j["operator"], variables)
        channels.append(JumpChannel(rate, op))
    spec = ModelSpec(name, dim, params, h, tuple(channels))
    l_full = build_liouvillian(spec)
    return BuiltinModel(name, spec, l_full, None, _rate_param_names(spec))
