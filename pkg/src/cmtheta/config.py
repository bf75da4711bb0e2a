"""Versioned INI configuration: instance descriptors, budgets and tolerances."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, asdict
from pathlib import Path

CONFIG_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Budgets:
    l_ceiling: int = 5_000_000  # largest ideal norm in an L-series sum
    max_characters: int = 2000  # per conductor level


@dataclass(frozen=True)
class Tolerances:
    waldspurger_rel: float = 1e-6
    l_abs_err: float = 1e-9


@dataclass(frozen=True)
class Instance:
    """One experiment: K = Q(sqrt(D)), the tower prime p, ell, and chi0 on G_c.

    chi0 is a character label (generator exponents, as in all_characters)
    of the ring class group of conductor c; None means trivial.
    """

    name: str
    D: int
    p: int
    ell: int
    n_max: int = 4
    c: int = 1
    chi0: tuple[int, ...] | None = None
    lambda_twist: tuple[int, ...] | None = None
    budgets: Budgets = field(default_factory=Budgets)

    def key(self) -> dict:
        d = asdict(self)
        d["chi0"] = list(self.chi0) if self.chi0 is not None else None
        d["lambda_twist"] = list(self.lambda_twist) if self.lambda_twist is not None else None
        return d


@dataclass(frozen=True)
class Config:
    version: int
    instances: tuple[Instance, ...]
    tolerances: Tolerances = field(default_factory=Tolerances)
    waldspurger: dict = field(default_factory=dict)


def _tuple_or_none(s: str | None):
    if s is None:
        return None
    s = s.strip()
    if s.lower() in ("", "none", "trivial"):
        return None
    return tuple(int(t) for t in s.replace(",", " ").split())


def load_config(path: str | Path) -> Config:
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read {path}")
    return parse_config(cp)


def parse_text(text: str) -> Config:
    cp = configparser.ConfigParser()
    cp.read_string(text)
    return parse_config(cp)


def parse_config(cp: configparser.ConfigParser) -> Config:
    if not cp.has_section("meta"):
        raise ConfigError("missing [meta] section")
    version = cp.getint("meta", "version")
    if version != CONFIG_VERSION:
        raise ConfigError(f"config version {version}, expected {CONFIG_VERSION}")
    tol = Tolerances()
    if cp.has_section("tolerances"):
        s = cp["tolerances"]
        tol = Tolerances(s.getfloat("waldspurger_rel", tol.waldspurger_rel), s.getfloat("l_abs_err", tol.l_abs_err))
    insts = []
    for sec in cp.sections():
        if not sec.startswith("instance."):
            continue
        s = cp[sec]
        b = Budgets(s.getint("l_ceiling", Budgets.l_ceiling), s.getint("max_characters", Budgets.max_characters))
        twist = _tuple_or_none(s.get("lambda_twist"))
        if twist is not None:
            raise ConfigError("only the canonical lambda (lambda_twist = none) is supported")
        insts.append(Instance(
            name=sec[len("instance."):],
            D=s.getint("D"),
            p=s.getint("p"),
            ell=s.getint("ell"),
            n_max=s.getint("n_max", 4),
            c=s.getint("c", 1),
            chi0=_tuple_or_none(s.get("chi0")),
            lambda_twist=twist,
            budgets=b,
        ))
    wald = {}
    if cp.has_section("waldspurger"):
        s = cp["waldspurger"]
        wald = {"instance": s.get("instance"), "n": s.getint("n"), "n_other": s.getint("n_other", fallback=None)}
    return Config(version, tuple(insts), tol, wald)


DEFAULT_CONFIG = """\
[meta]
version = 1

[tolerances]
waldspurger_rel = 1e-6
l_abs_err = 1e-9

[instance.d7p3]
D = -7
p = 3
ell = 11
n_max = 4

[instance.d7p5]
D = -7
p = 5
ell = 11
n_max = 4

[instance.d19p3]
D = -19
p = 3
ell = 7
n_max = 4

[instance.d11c2p3]
D = -11
p = 3
ell = 7
n_max = 4
c = 2
chi0 = 1

[instance.d7p11]
D = -7
p = 11
ell = 13
n_max = 2

[waldspurger]
instance = d7p11
n = 2
n_other = 1
"""


def default_config() -> Config:
    return parse_text(DEFAULT_CONFIG)
