"""Ring homomorphisms C^∞(R^{n|s2}) -> M_r(Grassmann_{s1}) from a coordinate assignment.

An assignment sends the even coordinates ``y^i`` to commuting matrices
``m_i`` with real body spectra and the odd coordinates ``ϑ^l`` to
mutually anticommuting matrices ``Θ_l`` that commute with every ``m_i``.
The induced map is evaluated block by block over the primary
decomposition: on block ``j`` (eigenvalue tuple ``q_j``) a smooth
function acts through its Taylor expansion at ``q_j`` applied to the
nilpotent offsets ``(m_i - λ_j^i) e_j``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .coefficients import EXACT, NUMERIC, format_coefficient, is_real
from .errors import ConditionViolation, DomainError, PreconditionError, StructuralError
from .grassmann import indices_of
from .jet_eval import weighted_jet
from .smoothfn import POLYNOMIAL, SmoothFunction, SuperFunction, multi_indices
from .spectral import (
    DEFAULT_TOL,
    IdempotentSystem,
    PrimaryDecomposition,
    _commutes,
    eigen_extract,
    joint_system,
    primary_decomposition,
    spectrum_is_real,
)
from .supermatrix import SuperMatrix


def _fmt_point(q) -> str:
    return "(" + ", ".join(format_coefficient(x) for x in q) + ")"


@dataclass(frozen=True)
class AssignmentEta:
    """Images of the coordinates ``y^1..y^n | ϑ^1..ϑ^s2``."""

    ys: tuple
    thetas: tuple = ()
    hints: tuple = ()
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "ys", tuple(self.ys))
        object.__setattr__(self, "thetas", tuple(self.thetas))
        hints = tuple(self.hints) or (None,) * len(self.ys)
        object.__setattr__(self, "hints", hints)
        mats = self.ys + self.thetas
        if not self.ys:
            raise StructuralError("an assignment needs at least one even coordinate")
        if len(hints) != len(self.ys):
            raise StructuralError("one eigen hint slot per even coordinate")
        first = mats[0]
        for k, m in enumerate(mats):
            if m.r != first.r or m.sig != first.sig or m.backend != first.backend:
                raise StructuralError(f"matrix {k + 1} disagrees with the others on size, signature or backend")

    @property
    def n(self) -> int:
        return len(self.ys)

    @property
    def s2(self) -> int:
        return len(self.thetas)

    @property
    def r(self) -> int:
        return self.ys[0].r

    @property
    def s1(self) -> int:
        return self.ys[0].s

    @property
    def backend(self) -> str:
        return self.ys[0].backend

    def to_numeric(self) -> "AssignmentEta":
        return AssignmentEta(
            tuple(m.to_numeric() for m in self.ys), tuple(t.to_numeric() for t in self.thetas), (), self.tol
        )


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, condition: int, relation: str, operands: Sequence[str], detail: str = ""):
        self.violations.append(
            {"condition": condition, "relation": relation, "operands": list(operands), "detail": detail}
        )

    def to_json(self) -> dict:
        return {"passed": self.passed, "violations": self.violations}

    def __str__(self):
        if self.passed:
            return "conditions (1) and (2) hold"
        return "\n".join(
            f"condition ({v['condition']}) violated: {v['relation']} {', '.join(v['operands'])}"
            + (f" ({v['detail']})" if v["detail"] else "")
            for v in self.violations
        )


def _anticommutes(a: SuperMatrix, b: SuperMatrix, tol: float) -> bool:
    s = a * b + b * a
    return s.is_zero() if a.backend == EXACT else s.max_abs() <= tol


def validate(eta: AssignmentEta) -> ValidationReport:
    """Check commutation relations (condition 1) and real body spectra (condition 2)."""
    rep = ValidationReport()
    tol = eta.tol
    for i, j in itertools.combinations(range(eta.n), 2):
        if not _commutes(eta.ys[i], eta.ys[j], tol):
            rep.add(1, "commute", [f"y{i + 1}", f"y{j + 1}"], "m_i m_j != m_j m_i")
    for i in range(eta.n):
        for l in range(eta.s2):
            if not _commutes(eta.ys[i], eta.thetas[l], tol):
                rep.add(1, "commute", [f"y{i + 1}", f"theta{l + 1}"], "m_i Θ_l != Θ_l m_i")
    for l, k in itertools.combinations_with_replacement(range(eta.s2), 2):
        if not _anticommutes(eta.thetas[l], eta.thetas[k], tol):
            detail = "Θ_l Θ_l != 0" if l == k else "Θ_l Θ_l' != -Θ_l' Θ_l"
            rep.add(1, "anticommute", [f"theta{l + 1}", f"theta{k + 1}"], detail)
    for i, (m, hint) in enumerate(zip(eta.ys, eta.hints)):
        if hint is not None:
            real = all(is_real(x, tol) for x in hint.eigenvalues)
        else:
            real = spectrum_is_real(m, tol)
        if not real:
            rep.add(2, "real spectrum", [f"y{i + 1}"], "body has non-real eigenvalues")
    return rep


@dataclass
class SpectralLocusReport:
    points: tuple
    ranks: tuple
    nilpotency: tuple  # nilpotency[j][i]: index of (m_i - λ_j^i) e_j
    truncation: tuple  # highest Taylor degree that can survive on block j
    s1: int
    r: int

    @property
    def within_charpoly_bound(self) -> bool:
        return all(nu <= rk * (self.s1 + 1) for rk, nus in zip(self.ranks, self.nilpotency) for nu in nus)

    @property
    def within_caption_bound(self) -> bool:
        """Whether every index is at most ``(r-1)(s1+1)``; recorded, not enforced."""
        return all(nu <= (self.r - 1) * (self.s1 + 1) for nus in self.nilpotency for nu in nus)

    @property
    def pushforward(self) -> list:
        return list(zip(self.points, self.ranks))

    def summary(self) -> str:
        parts = []
        for q, rk, nus in zip(self.points, self.ranks, self.nilpotency):
            nu = str(nus[0]) if len(nus) == 1 else "(" + ", ".join(map(str, nus)) + ")"
            parts.append(f"q={_fmt_point(q)}: rank {rk}, ν={nu}")
        return "{" + "; ".join(parts) + "}"

    def to_json(self) -> dict:
        return {
            "points": [[format_coefficient(x) for x in q] for q in self.points],
            "ranks": list(self.ranks),
            "nilpotency": [list(nus) for nus in self.nilpotency],
            "truncation_degree": list(self.truncation),
            "rank_sum": sum(self.ranks),
            "within_charpoly_bound": self.within_charpoly_bound,
            "within_caption_bound": self.within_caption_bound,
            "pushforward": [{"point": [format_coefficient(x) for x in q], "rank": rk} for q, rk in self.pushforward],
            "summary": self.summary(),
        }


def _nilpotency_index(n: SuperMatrix, cap: int, tol: float) -> int:
    power = n
    for k in range(1, cap + 2):
        if (power.is_zero() if n.backend == EXACT else power.max_abs() <= tol):
            return k
        power = power * n
    raise ConditionViolation(f"offset is not nilpotent within {cap} steps")


class MapHandle:
    """The built homomorphism for one assignment.  Immutable after construction."""

    def __init__(self, eta: AssignmentEta):
        rep = validate(eta)
        if not rep.passed:
            raise ConditionViolation(f"assignment violates the map hypotheses:\n{rep}")
        self.eta = eta
        self.eigen = tuple(eigen_extract(m, h, True, eta.tol) for m, h in zip(eta.ys, eta.hints))
        self.system: IdempotentSystem = joint_system(eta.ys, self.eigen, eta.tol)
        self.decomposition: PrimaryDecomposition = primary_decomposition(self.system, eta.ys, eta.tol)
        self.offsets = tuple(
            tuple(m.shift(lam) * e for m, lam in zip(eta.ys, label)) for label, e in self.system
        )
        cap = eta.r * (eta.s1 + 1)
        self.nilpotency = tuple(tuple(_nilpotency_index(nm, cap, eta.tol) for nm in offs) for offs in self.offsets)
        self._monomials: dict = {}
        self._theta_products: dict = {}

    @property
    def points(self):
        return self.system.labels

    def _block_monomials(self, j: int, numeric: bool) -> list:
        """Per degree ``d``: ``{α: Π_i N_{j,i}^{α_i} e_j}`` with zero monomials dropped."""
        key = (j, numeric)
        if key in self._monomials:
            return self._monomials[key]
        if numeric and self.eta.backend == EXACT:
            out = [{a: m.to_numeric() for a, m in level.items()} for level in self._block_monomials(j, False)]
            self._monomials[key] = out
            return out
        n = self.eta.n
        offs = self.offsets[j]
        e = self.system.idempotents[j]
        cap = sum(nu - 1 for nu in self.nilpotency[j])
        levels = [{(0,) * n: e}]
        exact = self.eta.backend == EXACT
        for d in range(1, cap + 1):
            current = {}
            for idx in multi_indices(n, d):
                i = next(k for k, x in enumerate(idx) if x)
                if idx[i] >= self.nilpotency[j][i]:
                    continue
                parent = idx[:i] + (idx[i] - 1,) + idx[i + 1:]
                pm = levels[-1].get(parent)
                if pm is None:
                    continue
                mono = pm * offs[i]
                if mono.is_zero() if exact else mono.max_abs() <= self.eta.tol:
                    continue
                current[idx] = mono
            if not current:
                break
            levels.append(current)
        self._monomials[key] = levels
        return levels

    def truncation_degree(self, j: int) -> int:
        return len(self._block_monomials(j, False)) - 1

    def _theta_product(self, mask: int) -> SuperMatrix:
        if mask not in self._theta_products:
            eta = self.eta
            out = SuperMatrix.identity(eta.r, eta.ys[0].sig, eta.backend)
            for l in indices_of(mask):
                out = out * eta.thetas[l - 1]
            self._theta_products[mask] = out
        return self._theta_products[mask]

    def even_image(self, f: SmoothFunction, numeric: bool | None = None) -> SuperMatrix:
        """``f(m_1, ..., m_n)`` as a sum of blockwise truncated Taylor expansions."""
        eta = self.eta
        if f.n != eta.n:
            raise StructuralError(f"function has {f.n} variables, assignment has {eta.n}")
        if numeric is None:
            numeric = not (f.kind == POLYNOMIAL and f.poly.is_exact() and eta.backend == EXACT)
        acc = None
        for j, q in enumerate(self.points):
            for level in self._block_monomials(j, numeric):
                for idx, mono in level.items():
                    try:
                        c = f.jet(idx, q)
                    except DomainError as exc:
                        raise DomainError(f"at spectral point q={_fmt_point(q)}: {exc}") from exc
                    if c == 0:
                        continue
                    c = weighted_jet(c, idx)
                    if numeric:
                        c = complex(c)
                    term = mono.scale(c)
                    acc = term if acc is None else acc + term
        if acc is None:
            r, sig = eta.r, eta.ys[0].sig
            acc = SuperMatrix.zero(r, sig, NUMERIC if numeric else eta.backend)
        return acc

    def apply(self, F: SuperFunction) -> SuperMatrix:
        """Image of a super-function: ``Σ_I f_I(m) Θ^I`` with ascending ``I``."""
        eta = self.eta
        if (F.n, F.s2) != (eta.n, eta.s2):
            raise StructuralError(f"super-function lives on R^{{{F.n}|{F.s2}}}, map targets R^{{{eta.n}|{eta.s2}}}")
        numeric = eta.backend == NUMERIC or not all(
            f.kind == POLYNOMIAL and f.poly.is_exact() for f in F.components.values()
        )
        backend = NUMERIC if numeric else EXACT
        acc = SuperMatrix.zero(eta.r, eta.ys[0].sig, backend)
        for mask, f in F.sorted_components():
            even = self.even_image(f, numeric)
            if mask:
                theta = self._theta_product(mask)
                if numeric:
                    theta = theta.to_numeric()
                even = even * theta
            acc = acc + even
        return acc

    def spectral_locus(self) -> SpectralLocusReport:
        return SpectralLocusReport(
            points=self.points,
            ranks=self.system.ranks,
            nilpotency=self.nilpotency,
            truncation=tuple(sum(nu - 1 for nu in nus) for nus in self.nilpotency),
            s1=self.eta.s1,
            r=self.eta.r,
        )


def build(eta: AssignmentEta) -> MapHandle:
    return MapHandle(eta)


def apply(handle: MapHandle, F: SuperFunction) -> SuperMatrix:
    return handle.apply(F)


def spectral_locus(handle: MapHandle) -> SpectralLocusReport:
    return handle.spectral_locus()


def _difference(a: SuperMatrix, b: SuperMatrix) -> SuperMatrix:
    if a.backend != b.backend:
        a, b = a.to_numeric(), b.to_numeric()
    return a - b


def verify_homomorphism(handle: MapHandle, pairs: Sequence[tuple], tol: float = 1e-9) -> dict:
    """Residuals of ``φ(FG) - φ(F)φ(G)`` and ``φ(F+G) - φ(F) - φ(G)`` over sample pairs.

    Polynomial pairs on the exact backend must give exactly zero; others
    must stay within ``tol``.
    """
    samples = []
    ok = True
    for F, G in pairs:
        pf, pg = handle.apply(F), handle.apply(G)
        mult = _difference(handle.apply(F * G), _product(pf, pg))
        add = _difference(handle.apply(F + G), _sum(pf, pg))
        exact = mult.backend == EXACT and add.backend == EXACT
        passed = (mult.is_zero() and add.is_zero()) if exact else max(mult.max_abs(), add.max_abs()) <= tol
        ok = ok and passed
        samples.append(
            {"exact": exact, "multiplicative": mult.max_abs(), "additive": add.max_abs(), "passed": passed}
        )
    return {
        "passed": ok,
        "max_multiplicative": max((s["multiplicative"] for s in samples), default=0.0),
        "max_additive": max((s["additive"] for s in samples), default=0.0),
        "samples": samples,
    }


def _product(a, b):
    if a.backend != b.backend:
        a, b = a.to_numeric(), b.to_numeric()
    return a * b


def _sum(a, b):
    if a.backend != b.backend:
        a, b = a.to_numeric(), b.to_numeric()
    return a + b


# -- C^∞-hulls in the matrix ring ----------------------------------------------------


def _hull_handle(lam: Sequence[SuperMatrix], hints=None, tol: float = DEFAULT_TOL) -> MapHandle:
    lam = tuple(lam)
    if len({m.backend for m in lam}) > 1:
        lam = tuple(m.to_numeric() for m in lam)
    for i, j in itertools.combinations(range(len(lam)), 2):
        if not _commutes(lam[i], lam[j], tol):
            raise PreconditionError(f"elements {i + 1} and {j + 1} of the set do not commute")
    return MapHandle(AssignmentEta(lam, (), tuple(hints or ()), tol))


def cinfty_hull_eval(lam: Sequence[SuperMatrix], f: SmoothFunction, handle: MapHandle | None = None) -> SuperMatrix:
    """``f(r_1, ..., r_l)`` for a commuting tuple with real spectra."""
    handle = handle or _hull_handle(lam)
    return handle.even_image(f)


def _is_zero(m: SuperMatrix, tol: float) -> bool:
    return m.is_zero() if m.backend == EXACT else m.max_abs() <= tol


def default_composers(m: int) -> list:
    """Outer functions used to probe composition coherence."""
    ys = [f"y{k + 1}" for k in range(m)]
    return [
        SmoothFunction.parse(" + ".join(ys), m),
        SmoothFunction.parse("*".join(ys), m),
        SmoothFunction.parse(f"y1**2 - 2*y{m} + 1/2", m),
    ]


def check_admissibility_axioms(
    lam: Sequence[SuperMatrix], samples: Sequence[SmoothFunction], composers=None, tol: float = DEFAULT_TOL
) -> dict:
    """Per-axiom residuals for the C^∞-admissibility conditions on ``lam``.

    (1) each ``f(lam)`` commutes with ``lam``; (2) the ``f(lam)`` commute
    with each other; (3) ``(g∘f)(lam) = g(f(lam))``; (4) ``π_j(lam) = lam_j``.
    """
    lam = tuple(lam)
    handle = _hull_handle(lam, tol=tol)
    outs = [handle.even_image(f) for f in samples]

    def record(residuals):
        worst = max((m.max_abs() for m in residuals), default=0.0)
        return {"passed": all(_is_zero(m, tol) for m in residuals), "residual": worst, "checked": len(residuals)}

    ax1 = [_difference(_product(o, x), _product(x, o)) for o in outs for x in lam]
    ax2 = [_difference(_product(a, b), _product(b, a)) for a, b in itertools.combinations(outs, 2)]
    ax3 = []
    if samples:
        inner_handle = _hull_handle(outs, tol=tol)
        for g in composers if composers is not None else default_composers(len(samples)):
            lhs = handle.even_image(g.compose(list(samples)))
            rhs = inner_handle.even_image(g)
            ax3.append(_difference(lhs, rhs))
    n = len(lam)
    ax4 = [_difference(handle.even_image(SmoothFunction.coordinate(n, j + 1)), lam[j]) for j in range(n)]
    report = {
        "commutes_with_set": record(ax1),
        "mutually_commute": record(ax2),
        "composition": record(ax3),
        "projection": record(ax4),
    }
    report["passed"] = all(v["passed"] for v in report.values())
    return report
