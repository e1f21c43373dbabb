"""Orthogonal idempotents and primary decompositions of a free Grassmann module.

For one endomorphism ``m`` with body eigenvalues ``λ_i`` of multiplicity
``d_i`` the characteristic polynomial is ``χ = Π (t-λ_i)^((s+1)d_i)``.
With ``g_i = χ / (t-λ_i)^((s+1)d_i)`` and Bezout coefficients
``Σ h_i g_i = 1`` the idempotents are ``e_i = (h_i g_i)(m)``.  A commuting
family is handled by multiplying the per-matrix systems together.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .coefficients import EXACT, NUMERIC, GaussianRational, format_coefficient, is_exact, real_part
from .errors import (
    ConditionViolation,
    InternalConsistencyError,
    NeedsHintError,
    NotCoprimeError,
    NotInvertibleError,
    PreconditionError,
)
from .polynomial import Poly, is_exact_poly, rational_roots, root_multiplicity, squarefree_part, sturm_real_root_count, xgcd
from .supermatrix import COMMUTE, SuperMatrix

USER = "user-supplied"
RATIONAL_ROOTS = "rational-roots"
NUMERIC_CLUSTERED = "numeric-clustered"
DEFAULT_TOL = 1e-8


def _sort_key(lam):
    if isinstance(lam, GaussianRational):
        return (lam.re, lam.im)
    if isinstance(lam, complex):
        return (lam.real, lam.imag)
    return (lam, 0)


@dataclass(frozen=True)
class EigenData:
    eigenvalues: tuple
    multiplicities: tuple
    provenance: str = USER
    tol: float | None = None

    def __post_init__(self):
        if len(self.eigenvalues) != len(self.multiplicities):
            raise PreconditionError("eigenvalues and multiplicities differ in length")
        if any(d < 1 for d in self.multiplicities):
            raise PreconditionError("multiplicities must be positive")
        if len(set(self.eigenvalues)) != len(self.eigenvalues):
            raise PreconditionError("eigenvalues must be pairwise distinct")

    @property
    def size(self) -> int:
        return sum(self.multiplicities)

    def poly(self) -> Poly:
        out = Poly([Fraction(1)])
        for lam, d in zip(self.eigenvalues, self.multiplicities):
            out = out * Poly.linear_root(lam) ** d
        return out

    def to_json(self) -> dict:
        return {
            "eigenvalues": [format_coefficient(x) if is_exact(x) else real_part(x) for x in self.eigenvalues],
            "multiplicities": list(self.multiplicities),
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class IdempotentSystem:
    """Complete orthogonal idempotents labelled by eigenvalue tuples."""

    labels: tuple
    idempotents: tuple
    ranks: tuple
    polynomials: tuple | None = None

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(zip(self.labels, self.idempotents))

    @property
    def r(self) -> int:
        return self.idempotents[0].r

    def axiom_residuals(self) -> dict:
        """Max coefficient magnitude of ``Σe - I``, ``e_i e_j`` (i≠j) and ``e² - e``."""
        es = self.idempotents
        one = SuperMatrix.identity(es[0].r, es[0].sig, es[0].backend)
        total = es[0]
        for e in es[1:]:
            total = total + e
        orth = max((es[i] * es[j]).max_abs() for i in range(len(es)) for j in range(len(es)) if i != j) if len(es) > 1 else 0.0
        idem = max((e * e - e).max_abs() for e in es)
        return {"complete": (total - one).max_abs(), "orthogonal": orth, "idempotent": idem}


@dataclass(frozen=True)
class PrimaryDecomposition:
    system: IdempotentSystem
    basis: SuperMatrix
    basis_inverse: SuperMatrix
    offsets: tuple
    blocks: tuple = field(default=())  # blocks[i][j]: restriction of matrix i to block j

    def conjugated(self, m: SuperMatrix) -> SuperMatrix:
        return self.basis_inverse * m * self.basis


# -- Bezout --------------------------------------------------------------------


def poly_bezout(gs: Sequence[Poly]) -> list:
    """``h_1..h_l`` with ``Σ h_i g_i = 1`` for pairwise coprime ``g_i``.

    Runs the extended Euclidean algorithm pairwise, with monic remainders.
    """
    gs = list(gs)
    if not gs:
        raise PreconditionError("need at least one polynomial")
    if any(g.is_zero() for g in gs):
        raise NotCoprimeError("zero polynomial has no Bezout partner")
    lc = gs[0].lead()
    acc = gs[0].monic()
    hs = [Poly([1 / lc])]
    for g in gs[1:]:
        d, u, v = xgcd(acc, g)
        hs = [h * u for h in hs]
        hs.append(v)
        acc = d
    if acc.degree != 0:
        raise NotCoprimeError(f"polynomials share the factor {acc}")
    inv = 1 / acc.c[0]
    return [h * inv for h in hs]


# -- eigenvalues -----------------------------------------------------------------


def _check_hint(p: Poly, hint: EigenData, r: int, real_required: bool) -> EigenData:
    if hint.size != r:
        raise PreconditionError(f"eigen hint multiplicities sum to {hint.size}, expected {r}")
    if real_required:
        bad = [x for x in hint.eigenvalues if isinstance(x, (GaussianRational, complex)) and (x.imag if isinstance(x, complex) else x.im) != 0]
        if bad:
            raise ConditionViolation(f"eigen hint has non-real eigenvalues {[format_coefficient(x) for x in bad]}")
    if is_exact_poly(p):
        if hint.poly() != p:
            raise PreconditionError(f"eigen hint does not reproduce the body characteristic polynomial {p}")
    else:
        diff = max((abs(a - b) for a, b in itertools.zip_longest(hint.poly().c, p.c, fillvalue=0)), default=0.0)
        if diff > (hint.tol or DEFAULT_TOL) * max(1.0, max(abs(c) for c in p.c)) * 1e3:
            raise PreconditionError("eigen hint does not match the body characteristic polynomial")
    return hint


def _components(values: list, radius: float) -> list:
    """Connected components of the graph joining values at distance <= radius."""
    groups: list = []
    for z in values:
        near = [g for g in groups if any(abs(z - w) <= radius for w in g)]
        merged = [z]
        for g in near:
            merged.extend(g)
            groups.remove(g)
        groups.append(merged)
    return groups


def cluster(values: Sequence[complex], tol: float, norm: float = 0.0) -> list:
    """Group nearby values; returns ``(mean, count)`` pairs sorted by real then imaginary part.

    A group of ``k`` values is accepted when its diameter is within ``tol``
    or within ``100 * (eps * norm) ** (1 / k)``, the rounding spread of a
    defective eigenvalue of multiplicity ``k``.  Oversized groups are split
    at the next smaller radius.  ``norm = 0`` disables the widening.
    """
    eps = 2.220446049250313e-16

    def radius(k):
        return max(tol, 100 * (eps * norm) ** (1 / k)) if norm and k > 1 else tol

    def diameter(g):
        return max((abs(a - b) for a, b in itertools.combinations(g, 2)), default=0.0)

    def settle(g):
        k = len(g)
        if k == 1 or diameter(g) <= radius(k):
            return [g]
        parts = _components(g, radius(k - 1))
        if len(parts) == 1:
            parts = _components(g, tol)
            if len(parts) == 1:
                return [g]
        return [p for part in parts for p in settle(part)]

    vals = [complex(z) for z in values]
    groups = [p for g in _components(vals, radius(len(vals))) for p in settle(g)]
    out = [(sum(g) / len(g), len(g)) for g in groups]
    return sorted(out, key=lambda p: (p[0].real, p[0].imag))


def eigen_extract(
    m: SuperMatrix, hint: EigenData | None = None, real_required: bool = True, tol: float = DEFAULT_TOL
) -> EigenData:
    """Eigenvalues and algebraic multiplicities of the body of ``m``.

    The exact path finds rational roots of the body characteristic
    polynomial; anything else needs a hint.  With ``real_required`` a
    non-real spectrum raises :class:`ConditionViolation`.
    """
    body = m.body()
    r = m.r
    p = linalg.charpoly(body)
    if hint is not None:
        return _check_hint(p, hint, r, real_required)

    if m.backend == NUMERIC or not is_exact_poly(p):
        if m.backend == EXACT:
            # exact but Gaussian: only a hint can label the spectrum exactly
            if real_required and any(isinstance(c, GaussianRational) for c in p.c):
                raise ConditionViolation("body characteristic polynomial has non-real coefficients; spectrum is not real")
            raise NeedsHintError("complex body spectrum on the exact path needs an eigen hint")
        arr = np.array(body, dtype=complex)
        ev = np.linalg.eigvals(arr)
        groups = cluster([complex(z) for z in ev], tol, float(np.linalg.norm(arr, 2)))
        if real_required:
            bad = [z for z, _ in groups if abs(z.imag) > tol]
            if bad:
                raise ConditionViolation(f"body has non-real eigenvalues {bad}")
            groups = [(complex(z.real, 0.0), k) for z, k in groups]
        return EigenData(tuple(z for z, _ in groups), tuple(k for _, k in groups), NUMERIC_CLUSTERED, tol)

    if any(isinstance(c, GaussianRational) for c in p.c):
        if real_required:
            raise ConditionViolation("body characteristic polynomial has non-real coefficients; spectrum is not real")
        raise NeedsHintError("Gaussian-rational spectrum needs an eigen hint")

    roots = rational_roots(squarefree_part(p))
    mults = [root_multiplicity(p, lam) for lam in roots]
    if sum(mults) == r:
        return EigenData(tuple(roots), tuple(mults), RATIONAL_ROOTS)
    rest = p
    for lam, d in zip(roots, mults):
        rest = rest.exact_div(Poly.linear_root(lam) ** d)
    distinct = squarefree_part(rest).degree
    if real_required and sturm_real_root_count(rest) < distinct:
        raise ConditionViolation(f"body has non-real eigenvalues (factor {rest} has complex roots)")
    raise NeedsHintError(f"body has irrational eigenvalues (factor {rest}); supply an eigen hint")


def spectrum_is_real(m: SuperMatrix, tol: float = DEFAULT_TOL) -> bool:
    """Exact (Sturm) test on the exact backend; eigenvalue test otherwise."""
    p = linalg.charpoly(m.body())
    if is_exact_poly(p):
        if any(isinstance(c, GaussianRational) for c in p.c):
            return False
        return sturm_real_root_count(p) == squarefree_part(p).degree
    arr = np.array(m.body(), dtype=complex)
    groups = cluster([complex(z) for z in np.linalg.eigvals(arr)], tol, float(np.linalg.norm(arr, 2)))
    return all(abs(z.imag) <= tol for z, _ in groups)


# -- idempotents -------------------------------------------------------------------


def _exact_label(lam):
    if is_exact(lam):
        return lam
    z = complex(lam)
    return GaussianRational.make(Fraction(z.real), Fraction(z.imag))


def _powers(m: SuperMatrix, count: int) -> list:
    out = [SuperMatrix.identity(m.r, m.sig, m.backend)]
    for _ in range(1, count):
        out.append(out[-1] * m)
    return out


def _combine(powers: list, p: Poly, backend: str) -> SuperMatrix:
    acc = None
    for k, c in enumerate(p.c):
        if c == 0:
            continue
        if backend == NUMERIC:
            c = complex(c)
        term = powers[k].scale(c)
        acc = term if acc is None else acc + term
    if acc is None:
        return SuperMatrix.zero(powers[0].r, powers[0].sig, powers[0].backend)
    return acc


def _numeric_idempotents(m: SuperMatrix, lams: list, ns: list) -> list:
    """Floating idempotents in partial-fraction form.

    ``e_i = H_i(m - λ_i) · Π_{j≠i} ((m - λ_j)/(λ_i - λ_j))^{n_j}`` where
    ``H_i`` is the Taylor polynomial of order ``n_i`` of
    ``Π_{j≠i} (1 + x/(λ_i - λ_j))^{-n_j}``.  This is the same polynomial as
    ``h_i g_i`` but avoids the monomial basis, whose coefficients cancel
    badly in floating point.
    """
    out = []
    for i, (li, ni) in enumerate(zip(lams, ns)):
        series = [1.0 + 0j] + [0j] * (ni - 1)
        g = SuperMatrix.identity(m.r, m.sig, NUMERIC)
        for j, (lj, nj) in enumerate(zip(lams, ns)):
            if j == i:
                continue
            a = li - lj
            factor = [math.comb(nj + k - 1, k) * (-1) ** k / a**k for k in range(ni)]
            series = [sum(series[p] * factor[k - p] for p in range(k + 1)) for k in range(ni)]
            g = g * m.shift(lj).scale(1 / a) ** nj
        nil = m.shift(li)
        h = SuperMatrix.identity(m.r, m.sig, NUMERIC).scale(series[-1])
        for c in reversed(series[:-1]):
            h = (h * nil).shift(-c)
        out.append(h * g)
    return out


def idempotent_system(m: SuperMatrix, e: EigenData) -> IdempotentSystem:
    """Complete set of orthogonal idempotents ``(h_i g_i)(m)`` attached to ``m``."""
    if e.size != m.r:
        raise PreconditionError(f"eigen data has total multiplicity {e.size}, matrix rank is {m.r}")
    s = m.s
    if m.backend == NUMERIC:
        lams = [complex(lam) for lam in e.eigenvalues]
        ns = [(s + 1) * d for d in e.multiplicities]
        idems = _numeric_idempotents(m, lams, ns)
        return IdempotentSystem(tuple((lam,) for lam in e.eigenvalues), tuple(idems), tuple(e.multiplicities))
    labels = [_exact_label(lam) for lam in e.eigenvalues]
    factors = [Poly.linear_root(lam) ** ((s + 1) * d) for lam, d in zip(labels, e.multiplicities)]
    chi = Poly([Fraction(1)])
    for f in factors:
        chi = chi * f
    gs = []
    for i in range(len(factors)):
        g = Poly([Fraction(1)])
        for j, f in enumerate(factors):
            if j != i:
                g = g * f
        gs.append(g)
    hs = poly_bezout(gs)
    # Reducing modulo chi is free because chi(m) = 0.
    polys = [(h * g) % chi for h, g in zip(hs, gs)]
    if len(polys) == 1:
        polys = [Poly([Fraction(1)])]
    powers = _powers(m, max(p.degree for p in polys) + 1)
    idems = [_combine(powers, p, m.backend) for p in polys]
    return IdempotentSystem(
        tuple((lam,) for lam in e.eigenvalues), tuple(idems), tuple(e.multiplicities), tuple(polys)
    )


def _commutes(a: SuperMatrix, b: SuperMatrix, tol: float) -> bool:
    if a.backend == EXACT and b.backend == EXACT:
        return a.commutator_class(b) == COMMUTE
    return (a * b - b * a).max_abs() <= tol


def _body_rank(e: SuperMatrix) -> int:
    tr = linalg.trace(e.body())
    if is_exact(tr):
        return int(real_part(tr))
    return int(round(complex(tr).real))


def joint_system(
    ms: Sequence[SuperMatrix], es: Sequence[EigenData], tol: float = DEFAULT_TOL
) -> IdempotentSystem:
    """Idempotents for a commuting family, labelled by eigenvalue tuples ``q_j``."""
    if len(ms) != len(es) or not ms:
        raise PreconditionError("need one eigen data per matrix")
    for i, j in itertools.combinations(range(len(ms)), 2):
        if not _commutes(ms[i], ms[j], tol):
            raise PreconditionError(f"matrices {i + 1} and {j + 1} do not commute")
    systems = [idempotent_system(m, e) for m, e in zip(ms, es)]
    if len(systems) == 1:
        return systems[0]
    found = []
    for choice in itertools.product(*(range(len(sy)) for sy in systems)):
        prod = systems[0].idempotents[choice[0]]
        for sy, k in zip(systems[1:], choice[1:]):
            prod = prod * sy.idempotents[k]
        # A nonzero idempotent has a nonzero projection as body; its trace is the rank.
        rank = _body_rank(prod)
        if rank == 0:
            continue
        label = tuple(sy.labels[k][0] for sy, k in zip(systems, choice))
        found.append((label, prod, rank))
    found.sort(key=lambda t: tuple(_sort_key(x) for x in t[0]))
    total = sum(rk for _, _, rk in found)
    if total != ms[0].r:
        raise InternalConsistencyError(f"joint idempotent ranks sum to {total}, expected {ms[0].r}")
    return IdempotentSystem(
        tuple(l for l, _, _ in found), tuple(p for _, p, _ in found), tuple(rk for _, _, rk in found)
    )


def _block_basis(e: SuperMatrix, label, ms: Sequence[SuperMatrix], rank: int) -> list:
    """Body vectors spanning the image of ``body(e)``: the joint generalized eigenspace."""
    r = e.r
    if e.backend == EXACT:
        stacked = []
        for m, lam in zip(ms, label):
            a = linalg.shift(m.body(), lam)
            stacked.extend(linalg.matpow(a, r))
        basis = linalg.nullspace(stacked, r)
    else:
        proj = np.array(e.body(), dtype=complex)
        u, sv, _ = np.linalg.svd(proj)
        basis = [[complex(x) for x in u[:, k]] for k in range(rank)]
    if len(basis) != rank:
        raise InternalConsistencyError(
            f"block {tuple(format_coefficient(x) for x in label)} has a {len(basis)}-dimensional "
            f"eigenspace but rank {rank}"
        )
    return basis


def primary_decomposition(
    system: IdempotentSystem, ms: Sequence[SuperMatrix], tol: float = DEFAULT_TOL
) -> PrimaryDecomposition:
    """Adapted basis ``B`` (columns ``e_j ξ``) and the block-diagonal restrictions."""
    columns = []
    offsets = [0]
    for (label, e), rank in zip(system, system.ranks):
        for xi in _block_basis(e, label, ms, rank):
            columns.append(e.apply_to_vector(xi))
        offsets.append(offsets[-1] + rank)
    basis = SuperMatrix.from_columns(columns)
    try:
        binv = basis.invert()
    except NotInvertibleError as exc:
        raise InternalConsistencyError(f"adapted basis is not invertible: {exc}") from exc
    block_of = [j for j in range(len(system)) for _ in range(offsets[j], offsets[j + 1])]
    blocks = []
    for i, m in enumerate(ms):
        conj = binv * m * basis
        for a in range(m.r):
            for b in range(m.r):
                if block_of[a] == block_of[b]:
                    continue
                entry = conj[a, b]
                if (entry.backend == EXACT and not entry.is_zero()) or entry.max_abs() > tol:
                    raise InternalConsistencyError(
                        f"conjugated matrix {i + 1} has a nonzero off-block entry at ({a + 1}, {b + 1})"
                    )
        blocks.append(
            tuple(
                SuperMatrix(conj.submatrix(range(offsets[j], offsets[j + 1]), range(offsets[j], offsets[j + 1])))
                for j in range(len(system))
            )
        )
    return PrimaryDecomposition(system, basis, binv, tuple(offsets), tuple(blocks))
