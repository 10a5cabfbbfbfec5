"""Named states, strategies and boxes used as reference points."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import scenario as sc
from .algebra import (X_HAT, Y_HAT, Z_HAT, BinaryPovm, bloch_to_density, canonical_two_qubit,
                      check_density, tensor)
from .errors import DegenerateDenominator, DomainError, ParseError

SQ2 = math.sqrt(2)


@dataclass(frozen=True, eq=False)
class NamedStrategy:
    """One of three realizations: P&M (``preps`` + ``bob``), bipartite (``state`` + ``alice`` +
    ``bob``) or a bare ``box`` (``bob`` optional, needed only for steering questions).

    ``index_map`` says which conditional state plays the role of each P&M preparation.
    """

    label: str
    bob: tuple | None = None
    preps: tuple | None = None
    state: np.ndarray | None = None
    alice: tuple | None = None
    box: sc.Box | None = None
    index_map: dict = field(default_factory=lambda: sc.IDENTITY_MAP)

    def __post_init__(self):
        realizations = [self.preps is not None,
                        self.state is not None and self.alice is not None,
                        self.box is not None]
        if sum(realizations) != 1:
            raise ValueError("exactly one of preps, state+alice or box must be given")
        if self.preps is not None and self.bob is None:
            raise ValueError("a prepare-and-measure strategy needs Bob's measurements")
        if self.state is not None and self.bob is None:
            raise ValueError("a bipartite strategy needs Bob's measurements")

    @property
    def kind(self) -> str:
        if self.preps is not None:
            return "pm"
        return "bipartite" if self.state is not None else "box"

    def joint_box(self) -> sc.Box | None:
        if self.box is not None:
            return self.box
        if self.state is not None:
            return sc.box_from_state(self.state, self.alice, self.bob)
        return None

    def assemblage(self) -> sc.Assemblage | None:
        if self.state is None:
            return None
        return sc.steer_assemblage(self.state, self.alice)

    def conditional(self) -> sc.ConditionalTable | None:
        if self.state is not None:
            return sc.conditional_table(self.assemblage(), self.bob)
        if self.box is not None:
            return sc.box_to_conditional(self.box)
        return None

    def sequential(self) -> sc.SequentialTable:
        if self.preps is not None:
            return sc.pm_table(self.preps, self.bob)
        return sc.sequential_from_conditional(self.conditional(), self.index_map)


def _check_visibility(v):
    v = float(v)
    if not 0 <= v <= 1:
        raise DomainError(f"visibility V = {v!r} outside [0, 1]")
    return v


def bb84_strategy() -> NamedStrategy:
    preps = tuple(bloch_to_density(s) for s in (Z_HAT, -Z_HAT, X_HAT, -X_HAT))
    return NamedStrategy("bb84", preps=preps, bob=(BinaryPovm.sharp(Z_HAT), BinaryPovm.sharp(X_HAT)))


def rac_optimal_strategy() -> NamedStrategy:
    d_plus, d_minus = (X_HAT + Y_HAT) / SQ2, (X_HAT - Y_HAT) / SQ2
    preps = tuple(bloch_to_density(s) for s in (d_plus, d_minus, -d_minus, -d_plus))
    return NamedStrategy("rac-optimal", preps=preps,
                         bob=(BinaryPovm.sharp(X_HAT), BinaryPovm.sharp(Y_HAT)))


SINGLET = np.array([0, 1, -1, 0], dtype=complex) / SQ2


def werner_state(v) -> np.ndarray:
    v = _check_visibility(v)
    return v * np.outer(SINGLET, SINGLET.conj()) + (1 - v) / 4 * np.eye(4)


def standard_alice():
    """A0 = -sigma_z, A1 = sigma_x."""
    return BinaryPovm.sharp(-Z_HAT), BinaryPovm.sharp(X_HAT)


def standard_bob():
    """B0 = sigma_z, B1 = sigma_x."""
    return BinaryPovm.sharp(Z_HAT), BinaryPovm.sharp(X_HAT)


def white_noise_bb84_box(v) -> sc.Box:
    v = _check_visibility(v)
    p = np.empty((2, 2, 2, 2))
    for x0, y, x1, b in itertools.product(sc.BITS, repeat=4):
        sign = (-1) ** (x1 ^ b ^ (x0 * y))
        p[x0, y, x1, b] = (1 + sign * (x0 == y) * v) / 4
    return sc.Box(p)


def werner_strategy(v) -> NamedStrategy:
    return NamedStrategy(f"werner:{float(v)!r}", state=werner_state(v), alice=standard_alice(),
                         bob=standard_bob())


def white_noise_bb84_strategy(v) -> NamedStrategy:
    return NamedStrategy(f"wn-bb84:{float(v)!r}", box=white_noise_bb84_box(v), bob=standard_bob())


def pr_box() -> sc.Box:
    p = np.zeros((2, 2, 2, 2))
    for x, y, a, b in itertools.product(sc.BITS, repeat=4):
        if a ^ b == x * y:
            p[x, y, a, b] = 0.5
    return sc.Box(p)


def _classical_mixture(p0, r_hat, local_states, classical_first):
    p0 = float(p0)
    if not 0 <= p0 <= 1:
        raise DomainError(f"p0 = {p0!r} outside [0, 1]")
    r_hat = np.asarray(r_hat, dtype=float)
    if abs(np.linalg.norm(r_hat) - 1) > 1e-9:
        raise DomainError("classical basis direction must be a unit vector")
    projectors = (bloch_to_density(r_hat), bloch_to_density(-r_hat))
    weights = (p0, 1 - p0)
    rho = np.zeros((4, 4), dtype=complex)
    for w, proj, chi in zip(weights, projectors, local_states):
        chi = check_density(chi, dim=2)
        rho += w * (tensor(proj, chi) if classical_first else tensor(chi, proj))
    return rho


def cq_state(p0, r_hat, chi0, chi1) -> np.ndarray:
    """sum_i p_i |i><i| x chi_i with {|i>} the eigenbasis of r_hat.sigma."""
    return _classical_mixture(p0, r_hat, (chi0, chi1), classical_first=True)


def qc_state(p0, r_hat, phi0, phi1) -> np.ndarray:
    """sum_j p_j phi_j x |j><j|."""
    return _classical_mixture(p0, r_hat, (phi0, phi1), classical_first=False)


def bell_diagonal_rac_strategy() -> NamedStrategy:
    state = canonical_two_qubit((0, 0, 0), (0, 0, 0), (0.5, 0.5, 0))
    alice = (BinaryPovm.sharp((X_HAT + Y_HAT) / SQ2), BinaryPovm.sharp((X_HAT - Y_HAT) / SQ2))
    bob = (BinaryPovm.sharp(X_HAT), BinaryPovm.sharp(Y_HAT))
    return NamedStrategy("bell-diag-rac", state=state, alice=alice, bob=bob, index_map=sc.RAC_MAP)


def construction_measurements(name: str, c=None):
    """(alice, bob) sharp measurement pairs behind the closed-form Q expressions.

    ``aligned``: Alice x, y; Bob x, y. ``steering-optimal``: Alice (c1 x +- c2 y)/|.|,
    Bob (x +- y)/sqrt2. ``rac-optimal``: Alice (x +- y)/sqrt2; Bob x, y.
    """
    diag, anti = (X_HAT + Y_HAT) / SQ2, (X_HAT - Y_HAT) / SQ2
    if name == "aligned":
        alice, bob = (X_HAT, Y_HAT), (X_HAT, Y_HAT)
    elif name == "steering-optimal":
        c1, c2 = float(c[0]), float(c[1])
        n = math.hypot(c1, c2)
        if n <= 1e-12:
            raise DegenerateDenominator("c1 = c2 = 0 leaves Alice's directions undefined")
        alice = ((c1 * X_HAT + c2 * Y_HAT) / n, (c1 * X_HAT - c2 * Y_HAT) / n)
        bob = (diag, anti)
    elif name == "rac-optimal":
        alice, bob = (diag, anti), (X_HAT, Y_HAT)
    else:
        raise ParseError(f"unknown construction {name!r}")
    return (tuple(BinaryPovm.sharp(u) for u in alice), tuple(BinaryPovm.sharp(u) for u in bob))


def canonical_strategy(a, b, c, construction: str, label=None) -> NamedStrategy:
    alice, bob = construction_measurements(construction, c)
    return NamedStrategy(label or f"canonical/{construction}", state=canonical_two_qubit(a, b, c),
                         alice=alice, bob=bob)


FAMILIES = {
    "bb84": ("BB84 preparations and sigma_z/sigma_x measurements (P&M)", False),
    "rac-optimal": ("optimal 2-to-1 quantum RAC preparations, sigma_x/sigma_y (P&M)", False),
    "werner": ("Werner state with A={-sz,sx}, B={sz,sx}; parameter V in [0,1]", True),
    "wn-bb84": ("white-noise BB84 box; parameter V in [0,1]; Bob={sz,sx}", True),
    "pr": ("Popescu-Rohrlich box", False),
    "bell-diag-rac": ("separable Bell-diagonal state c=(1/2,1/2,0) with RAC measurements", False),
}

_FIXED = {
    "bb84": bb84_strategy,
    "rac-optimal": rac_optimal_strategy,
    "pr": lambda: NamedStrategy("pr", box=pr_box()),
    "bell-diag-rac": bell_diagonal_rac_strategy,
}
_PARAMETRIZED = {"werner": werner_strategy, "wn-bb84": white_noise_bb84_strategy}


def parametrized(name: str) -> bool:
    if name not in FAMILIES:
        raise ParseError(f"unknown family {name!r}; known: {', '.join(FAMILIES)}")
    return FAMILIES[name][1]


def family_constructor(name: str):
    """Callable V -> NamedStrategy for a parametrized family."""
    if not parametrized(name):
        raise ParseError(f"family {name!r} takes no parameter")
    return _PARAMETRIZED[name]


def resolve_family(text: str) -> NamedStrategy:
    """Parse ``name`` or ``name:value`` into a strategy."""
    name, _, arg = text.partition(":")
    if parametrized(name):
        if not arg:
            raise ParseError(f"family {name!r} needs a parameter, e.g. {name}:0.5")
        try:
            value = float(arg)
        except ValueError:
            raise ParseError(f"bad parameter {arg!r} for family {name!r}") from None
        return _PARAMETRIZED[name](value)
    if arg:
        raise ParseError(f"family {name!r} takes no parameter")
    return _FIXED[name]()
