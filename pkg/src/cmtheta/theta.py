"""Theta elements over ring class groups and the experiments built on their specializations.

For Gross points x(a) of conductor m = c p^n and the CM eigenform f,

    Theta = sum_a chi0(a) f(x(a)) [a]  in  Q(zeta)[G_m],

and nu(Theta) = sum_a nu(a) chi0(a) f(x(a)) is the toric period of f against
chi0 nu.  The Lab class builds (and caches) the Shimura set, the eigenform and
the theta weights f(x(a)) for an instance; sweeps read only the weights.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import lcm

import numpy as np

from .cache import Cache
from .cmform import cm_eigenvector
from .config import Instance
from .cyclotomic import CyclotomicElement
from .elladic import INFINITE, cyclotomic_embedding, ell_valuation
from .grosspoints import NotTransitive, build_family
from .lfun import l_value, root_number
from .quadfield import (
    HeckeCharacter,
    ImagQuadField,
    RingClassCharacter,
    RingClassGroup,
    all_characters,
    characters_of_exact_conductor,
    ring_class_group,
)
from .quatalg import algebra_for, right_ideal_classes, special_order

log = logging.getLogger(__name__)

EMBEDDING_PRECISION = 8


class WrongLevel(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    pass


# ---------------------------------------------------------------- theta elements

@dataclass
class ThetaElement:
    """Coefficients chi0(a) w(a) on G_m, with w(a) = f(x(a)) integral."""

    group: RingClassGroup
    weights: tuple[int, ...]
    chi0: RingClassCharacter | None = None
    p: int | None = None
    n: int | None = None

    def __post_init__(self):
        if len(self.weights) != self.group.order:
            raise ValueError("one weight per group element")
        if self.chi0 is not None:
            if self.chi0.is_trivial():
                self.chi0 = None
            elif (self.chi0.group.K, self.chi0.group.m) != (self.group.K, self.group.m):
                self.chi0 = self.chi0.pullback(self.group)

    @property
    def m(self) -> int:
        return self.group.m

    def coefficient(self, a: int) -> CyclotomicElement:
        if self.chi0 is None:
            return CyclotomicElement.rational(1, self.weights[a])
        return self.chi0.value(a) * self.weights[a]

    def coefficients(self) -> list[CyclotomicElement]:
        return [self.coefficient(a) for a in range(self.group.order)]

    def is_integral(self) -> bool:
        return all(isinstance(w, int) for w in self.weights)

    def scaled(self, c: int) -> "ThetaElement":
        return ThetaElement(self.group, tuple(c * w for w in self.weights), self.chi0, self.p, self.n)

    def translated(self, t: int) -> "ThetaElement":
        """Weights a -> w(a t): the element attached to the re-based family."""
        G = self.group
        return ThetaElement(G, tuple(self.weights[G.mul(a, t)] for a in range(G.order)), self.chi0, self.p, self.n)

    def on_group(self, nu: RingClassCharacter) -> RingClassCharacter:
        """nu as a character of G_m; WrongLevel when it does not factor through G_m."""
        G = self.group
        H = nu.group
        if (H.K, H.m) == (G.K, G.m):
            return nu
        if H.K != G.K:
            raise WrongLevel("characters of a different field")
        if G.m % H.m == 0:
            return nu.pullback(G)
        if H.m % G.m == 0 and nu.factors_through(G):
            pr = H.projection(G)
            table = np.zeros(G.order, dtype=np.int64)
            table[pr] = nu.table
            return RingClassCharacter(G, table, nu.N, nu.label)
        raise WrongLevel(f"character of conductor {nu.conductor()} does not factor through G_{G.m}")

    def specialize(self, nu: RingClassCharacter) -> CyclotomicElement:
        """sum_a nu(a) chi0(a) w(a), exactly."""
        nu = self.on_group(nu)
        if self.chi0 is None:
            N = max(nu.N, 1)
            exps = nu.table % N
        else:
            N = lcm(nu.N, self.chi0.N)
            exps = (nu.table * (N // nu.N) + self.chi0.table * (N // self.chi0.N)) % N
        counts = np.zeros(N, dtype=object)
        for e, w in zip(exps.tolist(), self.weights):
            counts[e] += w
        return CyclotomicElement.from_exponent_counts(N, counts.tolist())

    def fourier_inversion_holds(self, chars: list[RingClassCharacter] | None = None) -> bool:
        """sum_nu nu(Theta) nu(a)^-1 = |G| coefficient(a) for every a."""
        G = self.group
        chars = all_characters(G) if chars is None else chars
        vals = [(nu, self.specialize(nu)) for nu in chars]
        for a in range(G.order):
            tot = None
            for nu, v in vals:
                term = v * nu.value(a).conj()
                tot = term if tot is None else tot + term
            if tot != self.coefficient(a) * G.order:
                return False
        return True

    def inversion_symmetry(self) -> tuple[int, int] | None:
        """(t, s) with w(a^-1) = s w(a t) for all a, smallest t first; None if there is none."""
        G = self.group
        w = self.weights
        for t in range(G.order):
            for s in (1, -1):
                if all(w[G.inv(a)] == s * w[G.mul(a, t)] for a in range(G.order)):
                    return t, s
        return None

    def is_zero(self) -> bool:
        return not any(self.weights)


def theta_element(f, family, chi0: RingClassCharacter | None = None, *, p=None, n=None) -> ThetaElement:
    """Theta for the eigenform f (integral coordinates) on a Gross point family."""
    coords = f.integer_coords() if hasattr(f, "integer_coords") else [int(c) for c in f]
    if not family.bijective:
        raise NotTransitive([len(family._lookup)])
    weights = tuple(coords[x.cls] for x in family.points)
    return ThetaElement(family.group, weights, chi0, p, n)


def rebase_offset(th1: ThetaElement, th2: ThetaElement) -> int | None:
    """t with th2.weights(a) = th1.weights(a t) for all a."""
    G = th1.group
    for t in range(G.order):
        if all(th2.weights[a] == th1.weights[G.mul(a, t)] for a in range(G.order)):
            return t
    return None


def value_hash(z: CyclotomicElement) -> str:
    return hashlib.sha256(z.canonical_key().encode()).hexdigest()[:16]


@lru_cache(maxsize=64)
def _embedding(order: int, ell: int):
    return cyclotomic_embedding(order, ell, EMBEDDING_PRECISION)


def ell_adic_valuation(z: CyclotomicElement, ell: int):
    """v_ell of z under the fixed embedding of Q(zeta_order); INFINITE at 0."""
    if z.is_zero():
        return INFINITE
    return ell_valuation(z, _embedding(z.order, ell))


# ---------------------------------------------------------------- instance workspace

class Lab:
    """Shimura set, eigenform and theta weights for one instance, cached on disk."""

    def __init__(self, inst: Instance, cache: Cache | None = None):
        self.inst = inst
        self.cache = cache if cache is not None else Cache(None)
        self.K = ImagQuadField(inst.D)
        self.lam = HeckeCharacter(self.K)
        self.cache_keys: dict[str, str] = {}

    @cached_property
    def chi0(self) -> RingClassCharacter | None:
        if self.inst.chi0 is None:
            return None
        G = ring_class_group(self.K, self.inst.c)
        for ch in all_characters(G):
            if tuple(ch.label) == tuple(self.inst.chi0):
                if ch.conductor() != self.inst.c:
                    raise ValueError(f"chi0 {self.inst.chi0} is not primitive of conductor {self.inst.c}")
                return ch
        raise ValueError(f"no character with label {self.inst.chi0} on G_{self.inst.c}")

    @cached_property
    def shimura(self):
        B = algebra_for(self.K)
        return right_ideal_classes(special_order(B, self.lam))

    def _base_key(self) -> dict:
        return {"D": self.inst.D}

    def eigenform(self) -> dict:
        def compute():
            X = self.shimura
            f = cm_eigenvector(X, self.lam)
            return {
                "coords": f.integer_coords(),
                "signs": list(X.signs),
                "weights": [str(Fraction(w)) for w in X.weights],
                "mass": str(X.mass),
            }

        payload, digest = self.cache.get_or_compute("eigenform", self._base_key(), compute)
        self.cache_keys["eigenform"] = digest
        return payload

    def theta_weights(self, n: int) -> list[int]:
        m = self.inst.c * self.inst.p**n
        key = {"D": self.inst.D, "m": m}

        def compute():
            coords = self.eigenform()["coords"]
            fam = build_family(self.shimura, m, group=ring_class_group(self.K, m), check_transitive=False)
            if not fam.bijective:
                raise NotTransitive([len(fam._lookup)])
            return {"m": m, "classes": fam.classes(), "weights": [coords[c] for c in fam.classes()]}

        payload, digest = self.cache.get_or_compute("theta", key, compute)
        # the weights depend on the eigenform whether or not it was recomputed
        self.cache_keys["eigenform"] = self.cache.key("eigenform", self._base_key())
        self.cache_keys[f"theta/{m}"] = digest
        return payload["weights"]

    def theta(self, n: int) -> ThetaElement:
        m = self.inst.c * self.inst.p**n
        G = ring_class_group(self.K, m)
        chi0 = self.chi0.pullback(G) if self.chi0 is not None else None
        return ThetaElement(G, tuple(self.theta_weights(n)), chi0, self.inst.p, n)

    def level_characters(self, n: int) -> list[RingClassCharacter]:
        """All characters of G_{c p^n} pulled back from exact conductor p^n, lexicographic."""
        chars = characters_of_exact_conductor(self.K, 1, self.inst.p, n)
        if len(chars) > self.inst.budgets.max_characters:
            raise BudgetExhausted(f"{len(chars)} characters at n = {n}")
        G = ring_class_group(self.K, self.inst.c * self.inst.p**n)
        return [nu.pullback(G) if self.inst.c > 1 else nu for nu in chars]

    def family_characters(self, n: int) -> list[tuple[int, RingClassCharacter]]:
        """(index, nu) for level characters trivial on the class of sqrt(D)."""
        out = []
        for i, nu in enumerate(self.level_characters(n)):
            if nu.exp(nu.group.class_of_sqrt_d()) == 0:
                out.append((i, nu))
        return out

    def twist(self, nu: RingClassCharacter) -> RingClassCharacter:
        return self.chi0.pullback(nu.group) * nu if self.chi0 is not None else nu

    @cached_property
    def base_root_number(self) -> int:
        return root_number(self.lam, self.chi0)

    @property
    def p_splits(self) -> bool:
        return self.K.splitting(self.inst.p) == "split"

    def predicted_sign(self, nu: RingClassCharacter, n: int) -> int:
        """Parity law: eps(lambda chi0 nu) = (-1)^n nu(sqrt D) eps(lambda chi0) at inert p, no (-1)^n at split p."""
        s = nu.value(nu.group.class_of_sqrt_d())
        sign = 1 if s == 1 else -1
        law = sign * self.base_root_number
        if not self.p_splits:
            law *= (-1) ** n
        return law

    def provenance(self) -> dict:
        from . import __version__
        return {"version": __version__, "cache_keys": dict(sorted(self.cache_keys.items()))}


# ---------------------------------------------------------------- reports

@dataclass
class SweepRow:
    n: int
    char_index: int
    label: tuple
    order: int
    eps: int
    predicted: int
    theta_val_hash: str
    v_ell: str  # Fraction string or "zero"
    L_interval: tuple | None = None  # (re, im, radius)
    ratio: float | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "char_index": self.char_index,
            "label": list(self.label),
            "order": self.order,
            "eps": self.eps,
            "predicted": self.predicted,
            "theta_val_hash": self.theta_val_hash,
            "v_ell": self.v_ell,
            "L_interval": list(self.L_interval) if self.L_interval is not None else None,
            "ratio": self.ratio,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepRow":
        L = d.get("L_interval")
        return cls(d["n"], d["char_index"], tuple(d["label"]), d["order"], d["eps"], d["predicted"],
                   d["theta_val_hash"], d["v_ell"], tuple(L) if L is not None else None, d.get("ratio"))


@dataclass
class SweepReport:
    kind: str
    instance: dict
    rows: list[SweepRow]
    summary: dict
    provenance: dict = field(default_factory=dict)

    def sorted_rows(self) -> list[SweepRow]:
        return sorted(self.rows, key=lambda r: (r.n, r.char_index))

    def to_text(self) -> str:
        from .report import dump_report
        return dump_report(self)

    @classmethod
    def from_text(cls, text: str) -> "SweepReport":
        from .report import load_report
        return load_report(text)

    def parity_consistent(self) -> bool:
        return all(r.eps == r.predicted for r in self.rows)


def _v_str(v) -> str:
    return "zero" if v == INFINITE else str(Fraction(v))


def _nu_label(nu: RingClassCharacter) -> tuple:
    return tuple(int(x) for x in nu.label) if nu.label is not None else ()


def valuation_sweep(lab: Lab, n_range=None) -> SweepReport:
    """v_ell(nu(Theta)) for every family character of conductor p^n, n in n_range.

    A row whose root number is -1 must have nu(Theta) = 0 exactly; the
    summary lists the right-parity characters with positive valuation
    (the exception set) and the number with v_ell = 0 at each level.
    """
    inst = lab.inst
    n_range = list(n_range) if n_range is not None else list(range(1, inst.n_max + 1))
    rows = []
    per_level = {}
    exceptions = []
    violations = []
    for n in n_range:
        th = lab.theta(n)
        right = units = 0
        for i, nu in lab.family_characters(n):
            val = th.specialize(nu)
            eps = root_number(lab.lam, lab.twist(nu))
            pred = lab.predicted_sign(nu, n)
            if eps == -1:
                v = "zero"
                if not val.is_zero():
                    violations.append([n, i])
            else:
                right += 1
                vv = ell_adic_valuation(val, inst.ell)
                v = _v_str(vv)
                if vv == 0:
                    units += 1
                else:
                    exceptions.append([n, i, v])
            rows.append(SweepRow(n, i, _nu_label(nu), nu.N, eps, pred, value_hash(val), v))
        per_level[str(n)] = {"right_parity": right, "v_ell_zero": units}
    levels_with_rows = [n for n in n_range if per_level[str(n)]["right_parity"] > 0]
    top = max(levels_with_rows) if levels_with_rows else None
    summary = {
        "per_level": per_level,
        "exceptions": exceptions,
        "exception_count": len(exceptions),
        "top_level": top,
        "top_level_has_unit": bool(top is not None and per_level[str(top)]["v_ell_zero"] > 0),
        "wrong_parity_nonzero": violations,
        "parity_consistent": all(r.eps == r.predicted for r in rows),
    }
    return SweepReport("valuation", inst.key(), rows, summary, lab.provenance())


def eps_sweep(lab: Lab, n_range=None) -> SweepReport:
    """Root numbers by the Gauss-sum route across conductors p^n, against the parity law.

    Family characters (trivial on [sqrt D]) must alternate as (-1)^n at an
    inert p; every level character of root number -1 must give nu(Theta) = 0.
    """
    inst = lab.inst
    n_range = list(n_range) if n_range is not None else list(range(1, 6))
    rows = []
    signs = {}
    wrong_nonzero = []
    zero_iff = True
    checked = 0
    for n in n_range:
        th = lab.theta(n)
        fam_idx = {i for i, _ in lab.family_characters(n)}
        level = set()
        for i, nu in enumerate(lab.level_characters(n)):
            val = th.specialize(nu)
            eps = root_number(lab.lam, lab.twist(nu))
            if eps == -1:
                checked += 1
                if not val.is_zero():
                    wrong_nonzero.append([n, i])
            if i not in fam_idx:
                continue
            pred = lab.predicted_sign(nu, n)
            level.add(eps)
            if val.is_zero() != (eps == -1):
                zero_iff = False
            rows.append(SweepRow(n, i, _nu_label(nu), nu.N, eps, pred, value_hash(val),
                                 "zero" if val.is_zero() else "nonzero"))
        signs[str(n)] = sorted(level)
    alternates = True
    if not lab.p_splits:
        for n in n_range:
            expect = [(-1) ** n * lab.base_root_number]
            if signs[str(n)] and signs[str(n)] != expect:
                alternates = False
    summary = {
        "signs_by_level": signs,
        "alternates": alternates,
        "parity_consistent": all(r.eps == r.predicted for r in rows),
        "zero_iff_wrong_parity": zero_iff,
        "wrong_parity_checked": checked,
        "wrong_parity_nonzero": wrong_nonzero,
    }
    return SweepReport("eps", inst.key(), rows, summary, lab.provenance())


# ---------------------------------------------------------------- Waldspurger constancy

def level_factor(K: ImagQuadField, conductor: int) -> int:
    """N(c1): the part of the conductor supported at primes split in K."""
    from .numtheory import factorint
    out = 1
    for q, e in factorint(conductor).items():
        if K.splitting(q) == "split":
            out *= q**e
    return out


@dataclass
class WaldspurgerResult:
    n: int
    ratios: list  # (char_index, R(nu))
    max_deviation: float
    level_constant: float  # R / N(c1) at level n
    vanishing_ok: bool
    cross: dict | None = None
    control_deviation: float | None = None
    rows: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "n": self.n,
            "count": len(self.ratios),
            "max_deviation": self.max_deviation,
            "level_constant": self.level_constant,
            "vanishing_ok": self.vanishing_ok,
            "cross": self.cross,
            "control_deviation": self.control_deviation,
        }


def _ratios(lab: Lab, n: int, abs_err: float):
    th = lab.theta(n)
    out = []
    rows = []
    vanish = True
    for i, nu in lab.family_characters(n):
        psi = lab.twist(nu)
        eps = root_number(lab.lam, psi)
        val = th.specialize(nu)
        L1 = l_value(lab.lam, psi, abs_err=abs_err, ceiling=lab.inst.budgets.l_ceiling)
        L2 = l_value(lab.lam, psi.conj(), abs_err=abs_err, ceiling=lab.inst.budgets.l_ceiling)
        if eps == -1:
            ok = val.is_zero() and abs(L1.value) <= L1.radius + abs_err and abs(L2.value) <= L2.radius + abs_err
            vanish = vanish and ok
            rows.append(SweepRow(n, i, _nu_label(nu), nu.N, eps, lab.predicted_sign(nu, n), value_hash(val),
                                 "zero", (L1.value.real, L1.value.imag, L1.radius), None))
            continue
        P2 = abs(val.to_complex()) ** 2
        prod = L1.value * L2.value
        R = P2 / prod.real
        out.append((i, R, P2, prod.real, nu))
        rows.append(SweepRow(n, i, _nu_label(nu), nu.N, eps, lab.predicted_sign(nu, n), value_hash(val),
                             _v_str(ell_adic_valuation(val, lab.inst.ell)),
                             (L1.value.real, L1.value.imag, L1.radius), R))
    return out, rows, vanish


def _max_dev(values: list[float]) -> float:
    if len(values) < 2:
        return float("nan")
    ref = values[0]
    return max(abs(v / ref - 1) for v in values)


def waldspurger_constancy(lab: Lab, n: int, *, n_other: int | None = None, abs_err: float = 1e-9,
                          control: bool = False) -> WaldspurgerResult:
    """max over right-parity nu of |R(nu)/R(nu_0) - 1|, R = |nu(Theta)|^2 / (L(1, lambda nu) L(1, lambda nu^-1)).

    With n_other, the constant R / N(c1) is compared across the two levels.
    The control pairs each period with the L-values of the next character.
    """
    data, rows, vanish = _ratios(lab, n, abs_err)
    if len(data) < 2:
        raise ValueError(f"only {len(data)} right-parity characters at n = {n}")
    Rs = [r for _, r, _, _, _ in data]
    cond = lab.inst.c * lab.inst.p**n
    const = Rs[0] / level_factor(lab.K, cond)
    res = WaldspurgerResult(n, [(i, r) for i, r, _, _, _ in data], _max_dev(Rs), const, vanish, rows=rows)
    if n_other is not None:
        data2, _, vanish2 = _ratios(lab, n_other, abs_err)
        Rs2 = [r for _, r, _, _, _ in data2]
        const2 = Rs2[0] / level_factor(lab.K, lab.inst.c * lab.inst.p**n_other)
        res.cross = {
            "n_other": n_other,
            "count_other": len(Rs2),
            "max_deviation_other": _max_dev(Rs2) if len(Rs2) > 1 else 0.0,
            "level_constant_other": const2,
            "cross_deviation": abs(const2 / const - 1),
            "vanishing_ok_other": vanish2,
        }
    if control:
        shifted = [data[(k + 1) % len(data)][3] for k in range(len(data))]
        res.control_deviation = _max_dev([d[2] / s for d, s in zip(data, shifted)])
    return res


def waldspurger_report(lab: Lab, res: WaldspurgerResult) -> SweepReport:
    return SweepReport("waldspurger", lab.inst.key(), res.rows, res.summary(), lab.provenance())
