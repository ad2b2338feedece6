"""Catalog of matrix identities and inequalities, with sound tolerance accounting.

Each side of a law is carried as an :class:`Interval` ``[lo, hi]`` that is
known to contain the exact value: Schatten norms are point intervals, a
certified supremum ``v`` with error bound ``e`` is ``[v, v + e]``, and sums,
nonnegative scalings, p-th powers, max and min are propagated endpoint-wise
(all are monotone). A link ``lhs <= rhs`` or ``lhs == rhs`` then has

    slack  = rhs.lo - lhs.lo
    budget = width(lhs) + width(rhs) + 1e-8 * max(1, |lhs.lo|, |rhs.lo|)

For sides built from a single certificate the width is exactly that
certificate, so the budget reduces to "sum of certificates plus a relative
numerical allowance".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import matrix as mx
from .radius import OptimizerConfig, circle_sup, omega, omega_im, rotating_sum_sup
from .spectral import PNorm, as_pnorm, gauge, schatten

REL_TOL = 1e-8
L31A_ANGLES = (math.pi / 7, math.pi / 3, math.pi / 2, math.pi, 5 * math.pi / 3)

PASS = "PASS"
FAIL = "FAIL"
WITNESS = "EQUALITY_WITNESS"
EXPLORATORY = "EXPLORATORY"


class LawDomainError(ValueError):
    """Exponent outside the range where the law is asserted."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    @classmethod
    def exact(cls, x: float) -> "Interval":
        return cls(float(x), float(x))

    @classmethod
    def cert(cls, cv) -> "Interval":
        return cls(cv.value, cv.value + cv.eps)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def scale(self, c: float) -> "Interval":
        if c < 0:
            raise ValueError("only nonnegative scalings keep endpoints ordered")
        return Interval(c * self.lo, c * self.hi)

    def power(self, q: float) -> "Interval":
        return Interval(max(self.lo, 0.0) ** q, max(self.hi, 0.0) ** q)


def imax(*xs: Interval) -> Interval:
    return Interval(max(x.lo for x in xs), max(x.hi for x in xs))


def imin(*xs: Interval) -> Interval:
    return Interval(min(x.lo for x in xs), min(x.hi for x in xs))


def isum(xs: Sequence[Interval]) -> Interval:
    return Interval(math.fsum(x.lo for x in xs), math.fsum(x.hi for x in xs))


def lp_combine(xs: Sequence[Interval], p: PNorm) -> Interval:
    """``(sum x**p)**(1/p)``, or ``max x`` at ``p = inf``."""
    return Interval(float(gauge([x.lo for x in xs], p)), float(gauge([x.hi for x in xs], p)))


@dataclass(frozen=True)
class PDomain:
    lo: float
    hi: float
    hi_closed: bool

    def __contains__(self, p) -> bool:
        v = as_pnorm(p).p
        return self.lo <= v and (v < self.hi or (self.hi_closed and v == self.hi))

    def __str__(self) -> str:
        hi = "inf" if math.isinf(self.hi) else f"{self.hi:g}"
        return f"[{self.lo:g}, {hi}{']' if self.hi_closed else ')'}"


ALL_P = PDomain(1.0, math.inf, True)
P_GE_2 = PDomain(2.0, math.inf, False)
P_LE_2 = PDomain(1.0, 2.0, True)


@dataclass(frozen=True)
class Law:
    id: str
    kind: str  # "equality" or "inequality"
    arity: int
    p_domain: PDomain
    description: str
    anchor: str
    # sides and links given (inputs, p, cfg, params)
    evaluate: Callable = field(repr=False, compare=False)
    # input size as a multiple of the trial dimension
    size_factor: int = 1
    # laws whose formula has no meaning at p = inf even in exploratory mode
    finite_only: bool = False

    @property
    def is_equality(self) -> bool:
        return self.kind == "equality"


@dataclass
class Link:
    lhs: str
    rhs: str
    relation: str
    slack: float
    budget: float

    @property
    def holds(self) -> bool:
        if self.relation == "==":
            return abs(self.slack) <= self.budget
        return self.slack >= -self.budget

    @property
    def tight(self) -> bool:
        return abs(self.slack) <= self.budget


@dataclass
class LawCheck:
    law_id: str
    p: str
    inputs: dict
    sides: list
    links: list
    slack: float
    eps_budget: float
    verdict: str
    exploratory: bool = False
    holds: bool = True
    tight_links: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict in (PASS, WITNESS)

    def to_dict(self) -> dict:
        return {
            "law_id": self.law_id,
            "p": self.p,
            "inputs": self.inputs,
            "sides": [[n, lo, hi] for n, lo, hi in self.sides],
            "links": [dict(lhs=k.lhs, rhs=k.rhs, relation=k.relation, slack=k.slack, budget=k.budget)
                      for k in self.links],
            "slack": self.slack,
            "eps_budget": self.eps_budget,
            "verdict": self.verdict,
            "exploratory": self.exploratory,
            "holds": self.holds,
            "tight_links": list(self.tight_links),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LawCheck":
        return cls(
            law_id=d["law_id"], p=d["p"], inputs=d["inputs"],
            sides=[tuple(s) for s in d["sides"]],
            links=[Link(**k) for k in d["links"]],
            slack=d["slack"], eps_budget=d["eps_budget"], verdict=d["verdict"],
            exploratory=d["exploratory"], holds=d["holds"], tight_links=list(d["tight_links"]),
        )


# -- law bodies ----------------------------------------------------------------
# Each returns (sides, links): sides maps name -> Interval, links are
# (lhs_name, rhs_name, relation).

def _w(a, p, cfg) -> Interval:
    return Interval.cert(omega(a, p, cfg))


def _n(a, p) -> Interval:
    return Interval.exact(schatten(a, p))


def _eq1(ins, p, cfg, prm):
    (a,) = ins
    return {"|A+A*|": _n(mx.direct_sum(a, mx.adjoint(a)), p),
            "|A+A|": _n(mx.direct_sum(a, a), p)}, [("|A+A*|", "|A+A|", "==")]


def _eq2(ins, p, cfg, prm):
    a, b = ins
    return {"|A+B|": _n(mx.direct_sum(a, b), p),
            "|offdiag(A,B)|": _n(mx.off_diag(a, b), p)}, [("|A+B|", "|offdiag(A,B)|", "==")]


def _eq3(ins, p, cfg, prm):
    a, b = ins
    return {"|A+B|": _n(mx.direct_sum(a, b), p),
            "lp(|A|,|B|)": lp_combine([_n(a, p), _n(b, p)], p)}, [("|A+B|", "lp(|A|,|B|)", "==")]


def _eq4(ins, p, cfg, prm):
    (a,) = ins
    return {"|A+A|": _n(mx.direct_sum(a, a), p),
            "2^(1/p)|A|": _n(a, p).scale(2.0 ** p.inv)}, [("|A+A|", "2^(1/p)|A|", "==")]


def _bk_sides(ins, p, prm):
    (t,) = ins
    part = mx.BlockPartition(int(prm["grid"]), t.shape[0] // int(prm["grid"]))
    blocks = mx.extract_blocks(t, part)
    total = _n(t, p).power(p.p)
    blocksum = isum([_n(b, p).power(p.p) for row in blocks for b in row])
    return total, blocksum, float(part.grid) ** (2 - p.p)


def _bk_upper(ins, p, cfg, prm):
    total, blocksum, c = _bk_sides(ins, p, prm)
    sides = {"n^(2-p)|T|^p": total.scale(c), "sum|Tij|^p": blocksum, "|T|^p": total}
    return sides, [("n^(2-p)|T|^p", "sum|Tij|^p", "<="), ("sum|Tij|^p", "|T|^p", "<=")]


def _bk_lower(ins, p, cfg, prm):
    total, blocksum, c = _bk_sides(ins, p, prm)
    sides = {"|T|^p": total, "sum|Tij|^p": blocksum, "n^(2-p)|T|^p": total.scale(c)}
    return sides, [("|T|^p", "sum|Tij|^p", "<="), ("sum|Tij|^p", "n^(2-p)|T|^p", "<=")]


def _l14(ins, p, cfg, prm):
    (b,) = ins
    return {"w(offdiag(B,B))": _w(mx.off_diag(b, b), p, cfg),
            "2^(1/p)w(B)": _w(b, p, cfg).scale(2.0 ** p.inv)}, \
        [("w(offdiag(B,B))", "2^(1/p)w(B)", "==")]


def _l21(ins, p, cfg, prm):
    a, b = ins
    rot = Interval.cert(rotating_sum_sup(a, b, p, cfg))
    return {"w(offdiag(A,B))": _w(mx.off_diag(a, b), p, cfg),
            "2^(1/p-1)sup|e^it A+e^-it B*|": rot.scale(2.0 ** (p.inv - 1))}, \
        [("w(offdiag(A,B))", "2^(1/p-1)sup|e^it A+e^-it B*|", "==")]


def _p22(ins, p, cfg, prm):
    a, b = ins
    return {"w(A+B)": _w(mx.direct_sum(a, b), p, cfg),
            "lp(w(A),w(B))": lp_combine([_w(a, p, cfg), _w(b, p, cfg)], p)}, \
        [("w(A+B)", "lp(w(A),w(B))", "<=")]


def t23_terms(a, p, cfg) -> dict:
    """The four certified values ``w_p(a_ij)`` plus ``w_p(A)`` for a 2x2 block matrix."""
    p = as_pnorm(p)
    n = a.shape[0] // 2
    (a11, a12), (a21, a22) = mx.extract_blocks(a, mx.BlockPartition(2, n))
    c = 2.0 ** (-p.inv)
    return {
        "w(A)": _w(a, p, cfg),
        "w(a11)": _w(a11, p, cfg),
        "w(a12)": _w(c * mx.off_diag(a12, a21), p, cfg),
        "w(a21)": _w(c * mx.off_diag(a21, a12), p, cfg),
        "w(a22)": _w(a22, p, cfg),
    }


def _t23(coef: Callable[[PNorm], float]):
    def body(ins, p, cfg, prm):
        (a,) = ins
        t = t23_terms(a, p, cfg)
        rhs = isum([t[k].power(p.p) for k in ("w(a11)", "w(a12)", "w(a21)", "w(a22)")])
        sides = {"w(A)^p": t["w(A)"].power(p.p), "c*sum w(aij)^p": rhs.scale(coef(p))}
        return sides, [("w(A)^p", "c*sum w(aij)^p", "<=")]
    return body


def _l31a(ins, p, cfg, prm):
    a, b = ins
    sides = {"w(offdiag(A,B))": _w(mx.off_diag(a, b), p, cfg)}
    links = []
    for k, th in enumerate(L31A_ANGLES):
        name = f"w(offdiag(A,e^i{th:.6f} B))"
        sides[name] = _w(mx.off_diag(a, np.exp(1j * th) * b), p, cfg)
        links.append(("w(offdiag(A,B))", name, "=="))
    return sides, links


def _l31b(ins, p, cfg, prm):
    a, b = ins
    return {"w(offdiag(A,B))": _w(mx.off_diag(a, b), p, cfg),
            "w(offdiag(B,A))": _w(mx.off_diag(b, a), p, cfg)}, \
        [("w(offdiag(A,B))", "w(offdiag(B,A))", "==")]


def _t32(ins, p, cfg, prm):
    a, b = ins
    c = 2.0 ** (p.inv - 1)  # 1 / 2^(1-1/p)
    wp, wm = _w(a + b, p, cfg), _w(a - b, p, cfg)
    sides = {"max(w(A+B),w(A-B))/2^(1-1/p)": imax(wp, wm).scale(c),
             "w(offdiag(A,B))": _w(mx.off_diag(a, b), p, cfg),
             "(w(A+B)+w(A-B))/2^(1-1/p)": (wp + wm).scale(c)}
    return sides, [("max(w(A+B),w(A-B))/2^(1-1/p)", "w(offdiag(A,B))", "<="),
                   ("w(offdiag(A,B))", "(w(A+B)+w(A-B))/2^(1-1/p)", "<=")]


def _c33(ins, p, cfg, prm):
    (t,) = ins
    wt = _w(t, p, cfg)
    mid = _w(mx.off_diag(mx.re_part(t), mx.im_part(t)), p, cfg).scale(2.0 ** (-p.inv))
    sides = {"w(T)/2": wt.scale(0.5), "2^(-1/p)w(offdiag(ReT,ImT))": mid, "w(T)": wt}
    return sides, [("w(T)/2", "2^(-1/p)w(offdiag(ReT,ImT))", "<="),
                   ("2^(-1/p)w(offdiag(ReT,ImT))", "w(T)", "<=")]


def _r34(ins, p, cfg, prm):
    (a,) = ins
    return {"sup|Im(e^it A)|": Interval.cert(omega_im(a, p, cfg)), "w(A)": _w(a, p, cfg)}, \
        [("sup|Im(e^it A)|", "w(A)", "==")]


def _r35(ins, p, cfg, prm):
    (x,) = ins
    return {"w([[X,X],[-X,-X]])": _w(mx.block2(x, x, -x, -x), p, cfg),
            "2w(X)": _w(x, p, cfg).scale(2.0)}, [("w([[X,X],[-X,-X]])", "2w(X)", "<=")]


def _t36(ins, p, cfg, prm):
    a, b = ins
    rhs = imin(_w(a, p, cfg), _w(b, p, cfg)).scale(2.0 ** p.inv) \
        + imin(_w(a + b, p, cfg), _w(a - b, p, cfg))
    return {"w(offdiag(A,B))": _w(mx.off_diag(a, b), p, cfg),
            "2^(1/p)min(w(A),w(B))+min(w(A+B),w(A-B))": rhs}, \
        [("w(offdiag(A,B))", "2^(1/p)min(w(A),w(B))+min(w(A+B),w(A-B))", "<=")]


def _r41a(ins, p, cfg, prm):
    (t,) = ins
    return {"sup|aReT+bImT|": Interval.cert(circle_sup(t, p, cfg)), "w(T)": _w(t, p, cfg)}, \
        [("sup|aReT+bImT|", "w(T)", "==")]


def _r41b(ins, p, cfg, prm):
    (t,) = ins
    return {"|T+T*|": _n(t + mx.adjoint(t), p), "2w(T)": _w(t, p, cfg).scale(2.0)}, \
        [("|T+T*|", "2w(T)", "<=")]


def _t42(ins, p, cfg, prm):
    a, b = ins
    mid = _w(mx.off_diag(a, mx.adjoint(b)), p, cfg).scale(2.0 ** (1 - p.inv))
    sides = {"|A+B|": _n(a + b, p), "2^(1-1/p)w(offdiag(A,B*))": mid,
             "|A|+|B|": _n(a, p) + _n(b, p)}
    return sides, [("|A+B|", "2^(1-1/p)w(offdiag(A,B*))", "<="),
                   ("2^(1-1/p)w(offdiag(A,B*))", "|A|+|B|", "<=")]


_CATALOG = (
    Law("EQ1", "equality", 1, ALL_P, "|A (+) A*|_p = |A (+) A|_p",
        "Sec. 1 Eq. (1), '(see \\cite{[11]})' context", _eq1),
    Law("EQ2", "equality", 2, ALL_P, "|A (+) B|_p = |[[0,A],[B,0]]|_p",
        "Sec. 1 Eq. (2), '(see \\cite{[11]})'", _eq2),
    Law("EQ3", "equality", 2, ALL_P, "|A (+) B|_p = (|A|_p^p + |B|_p^p)^(1/p); max form at p=inf",
        "Sec. 1 Eq. (3), 'Moreover, we have'", _eq3),
    Law("EQ4", "equality", 1, ALL_P, "|A (+) A|_p = 2^(1/p) |A|_p",
        "Sec. 1 Eq. (4)", _eq4),
    Law("BK-UPPER", "inequality", 1, P_GE_2,
        "n^(2-p)|T|_p^p <= sum |T_ij|_p^p <= |T|_p^p for 2 <= p < inf",
        "Thm 1.2, 'relates the Shatten p-norm'", _bk_upper, finite_only=True),
    Law("BK-LOWER", "inequality", 1, P_LE_2,
        "|T|_p^p <= sum |T_ij|_p^p <= n^(2-p)|T|_p^p for 1 <= p <= 2",
        "Thm 1.2, 'relates the Shatten p-norm'", _bk_lower, finite_only=True),
    Law("L14", "equality", 1, ALL_P, "w_p([[0,B],[B,0]]) = 2^(1/p) w_p(B)",
        "Lemma 1.4, 'was proved by the authors'", _l14),
    Law("L21", "equality", 2, ALL_P,
        "w_p([[0,A],[B,0]]) = 2^(1/p-1) sup_t |e^it A + e^-it B*|_p",
        "Lemma 2.1, '$e^{i\\theta }A+e^{-i\\theta }B^{\\ast}$'", _l21),
    Law("P22", "inequality", 2, ALL_P,
        "w_p(A (+) B) <= (w_p^p(A) + w_p^p(B))^(1/p); max form at p=inf",
        "Prop 2.2, 'inequality holds for all $p$'", _p22),
    Law("T23-HI", "inequality", 1, P_GE_2,
        "w_p^p(A) <= 2^(2-p) sum_ij w_p^p(a_ij) for 2 <= p < inf",
        "Thm 2.3, 'be a $2\\times2$ block matrix'", _t23(lambda p: 2.0 ** (2 - p.p)),
        size_factor=2, finite_only=True),
    Law("T23-LO", "inequality", 1, P_LE_2,
        "w_p^p(A) <= sum_ij w_p^p(a_ij) for 1 <= p <= 2",
        "Thm 2.3, 'be a $2\\times2$ block matrix'", _t23(lambda p: 1.0),
        size_factor=2, finite_only=True),
    Law("L31A", "equality", 2, ALL_P, "w_p([[0,A],[e^it B,0]]) = w_p([[0,A],[B,0]])",
        "Lemma 3.1(a), 'for all $\\theta \\in \\mathbb{R}$'", _l31a),
    Law("L31B", "equality", 2, ALL_P, "w_p([[0,A],[B,0]]) = w_p([[0,B],[A,0]])",
        "Lemma 3.1(b)", _l31b),
    Law("T32", "inequality", 2, ALL_P,
        "max(w(A+B),w(A-B))/2^(1-1/p) <= w_p([[0,A],[B,0]]) <= (w(A+B)+w(A-B))/2^(1-1/p)",
        "Thm 3.2, 'gives upper and lower bounds'", _t32),
    Law("C33", "inequality", 1, ALL_P,
        "w_p(T)/2 <= 2^(-1/p) w_p([[0,Re T],[Im T,0]]) <= w_p(T)",
        "Cor 3.3, 'T=A+iB, where A=Re(T)'", _c33),
    Law("R34", "equality", 1, ALL_P, "sup_t |Im(e^it A)|_p = w_p(A)",
        "Remark 3.4, '$Im(e^{i\\theta}A)$'", _r34),
    Law("R35", "inequality", 1, P_GE_2, "w_p([[X,X],[-X,-X]]) <= 2 w_p(X) for 2 <= p < inf",
        "Remark 3.5, 'and $2\\leq p<\\infty$ then'", _r35),
    Law("T36", "inequality", 2, P_GE_2,
        "w_p([[0,A],[B,0]]) <= 2^(1/p) min(w(A),w(B)) + min(w(A+B),w(A-B)) for 2 <= p < inf",
        "Thm 3.6, 'min(\\omega_{p}(A),\\omega_{p}(B))'", _t36),
    Law("R41A", "equality", 1, ALL_P, "sup_{a^2+b^2=1} |a Re T + b Im T|_p = w_p(T)",
        "Remark 4.1, 'presented by \"Yamazaki\"'", _r41a),
    Law("R41B", "inequality", 1, ALL_P, "|T + T*|_p <= 2 w_p(T)",
        "Remark 4.1, 'presented by \"Yamazaki\"'", _r41b),
    Law("T42", "inequality", 2, ALL_P,
        "|A+B|_p <= 2^(1-1/p) w_p([[0,A],[B*,0]]) <= |A|_p + |B|_p",
        "Thm 4.2, 'refinement of the triangle inequality'", _t42),
)
_BY_ID = {law.id: law for law in _CATALOG}


def list_laws() -> list[Law]:
    return list(_CATALOG)


def get_law(law_id: str) -> Law:
    try:
        return _BY_ID[law_id]
    except KeyError:
        raise KeyError(f"unknown law id {law_id!r}; known ids: {', '.join(_BY_ID)}") from None


def bk_grid(seed: int) -> int:
    """Block grid (2 or 3) used for the Bhatia-Kittaneh laws on a seeded draw."""
    return 2 + int(seed) % 2


def input_sizes(law: Law, dim: int, seed: int) -> tuple[list[int], dict]:
    if law.id.startswith("BK-"):
        g = bk_grid(seed)
        return [g * dim], {"grid": g}
    return [law.size_factor * dim] * law.arity, {}


def draw_inputs(law: Law, kind: str, dim: int, seed: int) -> tuple[list[np.ndarray], dict]:
    """Random inputs for ``law``; a pure function of ``(law, kind, dim, seed)``."""
    sizes, params = input_sizes(law, dim, seed)
    mats = [mx.random_matrix(kind, n, mx.child_seed(seed, j)) for j, n in enumerate(sizes)]
    return mats, params


def _check_inputs(law: Law, inputs, params) -> list[np.ndarray]:
    if len(inputs) != law.arity:
        raise ValueError(f"{law.id} takes {law.arity} matrix input(s), got {len(inputs)}")
    mats = [mx.as_matrix(a, square=True, name=f"input {k}") for k, a in enumerate(inputs)]
    if any(m.shape != mats[0].shape for m in mats):
        raise ValueError(f"{law.id} inputs must share one size, got {[m.shape for m in mats]}")
    n = mats[0].shape[0]
    if law.size_factor == 2 and n % 2:
        raise ValueError(f"{law.id} needs an even-sized matrix split into 2x2 blocks, got size {n}")
    if law.id.startswith("BK-"):
        g = int(params.get("grid", 2))
        if g < 1 or n % g:
            raise ValueError(f"{law.id}: size {n} is not divisible into a {g}x{g} block grid")
    return mats


def evaluate_law(law: Law | str, inputs, p, cfg: OptimizerConfig | None = None, *,
                 params: dict | None = None, descriptor: dict | None = None,
                 exploratory: bool = False) -> LawCheck:
    """Evaluate one law on explicit inputs.

    ``params`` carries law options (``grid`` for the block-norm chains).
    ``descriptor`` is recorded verbatim as the input description. Outside the
    law's exponent range a :class:`LawDomainError` is raised unless
    ``exploratory`` is set, in which case the result is marked exploratory.
    """
    law = get_law(law) if isinstance(law, str) else law
    p = as_pnorm(p)
    cfg = cfg or OptimizerConfig()
    params = dict(params or {})
    if law.id.startswith("BK-"):
        params.setdefault("grid", 2)
    in_domain = p in law.p_domain
    if not in_domain and (not exploratory or (law.finite_only and p.is_inf)):
        raise LawDomainError(f"{law.id} is asserted for p in {law.p_domain}, not p = {p}")
    mats = _check_inputs(law, inputs, params)

    sides, raw_links = law.evaluate(mats, p, cfg, params)
    links = []
    for lhs, rhs, rel in raw_links:
        x, y = sides[lhs], sides[rhs]
        budget = x.width + y.width + REL_TOL * max(1.0, abs(x.lo), abs(y.lo))
        links.append(Link(lhs, rhs, rel, y.lo - x.lo, budget))

    if law.is_equality:
        crit = max(links, key=lambda k: abs(k.slack) - k.budget)
    else:
        crit = min(links, key=lambda k: k.slack + k.budget)
    holds = all(k.holds for k in links)
    tight = [i for i, k in enumerate(links) if k.tight] if not law.is_equality else []
    if not in_domain:
        verdict = EXPLORATORY
    elif not holds:
        verdict = FAIL
    elif tight:
        verdict = WITNESS
    else:
        verdict = PASS

    desc = dict(descriptor) if descriptor is not None else {"explicit": True}
    desc.update(params)
    return LawCheck(
        law_id=law.id, p=str(p), inputs=desc,
        sides=[(name, iv.lo, iv.hi) for name, iv in sides.items()],
        links=links, slack=crit.slack, eps_budget=crit.budget, verdict=verdict,
        exploratory=not in_domain, holds=holds, tight_links=tight,
    )
