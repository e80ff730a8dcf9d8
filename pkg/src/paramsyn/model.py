"""Parametric Markov models: pMDPs, pMCs, concurrent reachability games.

A pMC is a pMDP where every state enables exactly one action.  Models are
immutable after construction, so they can be shared freely across
analyses and grid workers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .polyalg import Polynomial, PolyError, eval_poly

# Single action name used for Markov-chain rows.
MC_ACT = "act"

# Prefix reserved for generator-produced state/parameter names.
GEN_PREFIX = "$"

Instantiation = dict[str, Fraction]
Scheduler = dict[str, str]


class ModelError(ValueError):
    pass


class Pmdp:
    """A parametric MDP: states, parameters, polynomial transition labels.

    `trans` maps (state, action, successor) to a nonzero Polynomial.
    Named target sets live on the model so that constructions with several
    objectives can share one state space.
    """

    __slots__ = ("states", "params", "actions", "initial", "trans", "targets", "_act")

    def __init__(
        self,
        states: Iterable[str],
        params: Iterable[str],
        initial: str,
        trans: Mapping[tuple[str, str, str], Polynomial | Fraction | int],
        targets: Mapping[str, Iterable[str]] | None = None,
    ):
        states = tuple(states)
        params = tuple(params)
        state_set = set(states)
        if len(state_set) != len(states):
            raise ModelError("duplicate state names")
        if initial not in state_set:
            raise ModelError(f"initial state {initial!r} is not a state")
        clean: dict[tuple[str, str, str], Polynomial] = {}
        acts: dict[str, list[str]] = {s: [] for s in states}
        param_set = set(params)
        for (s, a, t), label in trans.items():
            if s not in state_set:
                raise ModelError(f"transition from unknown state {s!r}")
            if t not in state_set:
                raise ModelError(f"transition to unknown state {t!r}")
            poly = label if isinstance(label, Polynomial) else Polynomial.const(label)
            if poly.is_zero():
                continue
            extra = set(poly.params()) - param_set
            if extra:
                raise ModelError(f"label on ({s},{a},{t}) uses undeclared {sorted(extra)}")
            clean[(s, a, t)] = poly
            if a not in acts[s]:
                acts[s].append(a)
        for s in states:
            if not acts[s]:
                raise ModelError(f"state {s!r} has no enabled action")
        tgt: dict[str, frozenset[str]] = {}
        for name, members in (targets or {}).items():
            members = frozenset(members)
            unknown = members - state_set
            if unknown:
                raise ModelError(f"target set {name!r} mentions unknown {sorted(unknown)}")
            tgt[name] = members
        action_names = tuple(sorted({a for _, a, _ in clean}))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "actions", action_names)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "trans", clean)
        object.__setattr__(self, "targets", tgt)
        object.__setattr__(self, "_act", {s: tuple(sorted(a)) for s, a in acts.items()})

    def __setattr__(self, name, value):
        raise AttributeError("Pmdp is immutable")

    def act(self, s: str) -> tuple[str, ...]:
        """Actions enabled in s (nonzero label to some successor)."""
        return self._act[s]

    def is_pmc(self) -> bool:
        return all(len(self.act(s)) == 1 for s in self.states)

    def row(self, s: str, a: str) -> dict[str, Polynomial]:
        return {t: p for (s2, a2, t), p in self.trans.items() if s2 == s and a2 == a}

    def mc_row(self, s: str) -> dict[str, Polynomial]:
        (a,) = self.act(s)
        return self.row(s, a)

    def target_set(self, name: str) -> frozenset[str]:
        if name not in self.targets:
            raise ModelError(f"unknown target set {name!r}")
        return self.targets[name]

    def with_targets(self, extra: Mapping[str, Iterable[str]]) -> "Pmdp":
        merged = {name: set(members) for name, members in self.targets.items()}
        for name, members in extra.items():
            merged[name] = set(members)
        return Pmdp(self.states, self.params, self.initial, self.trans, merged)

    def scheduler_count(self) -> int:
        count = 1
        for s in self.states:
            count *= len(self.act(s))
        return count

    def schedulers(self) -> Iterable[Scheduler]:
        """All deterministic memoryless schedulers, in a fixed order."""
        per_state = [self.act(s) for s in self.states]
        for combo in itertools.product(*per_state):
            yield dict(zip(self.states, combo))

    def __repr__(self):
        kind = "pMC" if self.is_pmc() else "pMDP"
        return (
            f"<{kind} |S|={len(self.states)} |X|={len(self.params)} "
            f"init={self.initial!r}>"
        )


def fresh_name(base: str, taken: set[str]) -> str:
    name = GEN_PREFIX + base
    if name not in taken:
        taken.add(name)
        return name
    i = 2
    while f"{name}~{i}" in taken:
        i += 1
    name = f"{name}~{i}"
    taken.add(name)
    return name


def classify_instantiation(
    m: Pmdp, u: Mapping[str, Fraction]
) -> tuple[str, list[tuple[str, str, str]]]:
    """Classify u as invalid / well-defined / graph-preserving.

    Returns the classification and the list of labelled transitions whose
    value becomes 0 under u.
    """
    missing = [x for x in m.params if x not in u]
    if missing:
        raise ModelError(f"instantiation misses parameters {missing}")
    zero_edges = []
    row_sums: dict[tuple[str, str], Fraction] = {}
    for (s, a, t), poly in m.trans.items():
        val = eval_poly(poly, u)
        if val < 0 or val > 1:
            return "invalid", []
        if val == 0:
            zero_edges.append((s, a, t))
        row_sums[(s, a)] = row_sums.get((s, a), Fraction(0)) + val
    if any(total != 1 for total in row_sums.values()):
        return "invalid", []
    if zero_edges:
        return "well-defined", sorted(zero_edges)
    return "graph-preserving", []


def is_well_defined(m: Pmdp, u: Mapping[str, Fraction]) -> bool:
    return classify_instantiation(m, u)[0] != "invalid"


def is_graph_preserving(m: Pmdp, u: Mapping[str, Fraction]) -> bool:
    return classify_instantiation(m, u)[0] == "graph-preserving"


def check_simple(m: Pmdp) -> tuple[bool, list[str]]:
    """Check simplicity: labels are constants, x, or 1-x; rows sum to 1."""
    violations = []
    for (s, a, t), poly in sorted(m.trans.items()):
        if poly.is_constant():
            continue
        params = poly.params()
        ok = len(params) == 1 and (
            poly == Polynomial.var(params[0]) or poly == Polynomial.one_minus(params[0])
        )
        if not ok:
            violations.append(f"label on ({s},{a},{t}) is {poly}")
    for s in m.states:
        for a in m.act(s):
            total = Polynomial()
            for t, poly in m.row(s, a).items():
                total = total + poly
            if total != Polynomial.const(1):
                violations.append(f"row ({s},{a}) sums to {total}")
    return (not violations, violations)


def instantiate(m: Pmdp, u: Mapping[str, Fraction]) -> Pmdp:
    """Replace labels by their values at u; zero-probability edges drop out."""
    kind, _ = classify_instantiation(m, u)
    if kind == "invalid":
        raise ModelError("instantiation is not well-defined")
    trans = {}
    for (s, a, t), poly in m.trans.items():
        val = eval_poly(poly, u)
        if val != 0:
            trans[(s, a, t)] = Polynomial.const(val)
    return Pmdp(m.states, (), m.initial, trans, m.targets)


def induced_pmc(m: Pmdp, sigma: Mapping[str, str]) -> Pmdp:
    """The pMC obtained by fixing a deterministic memoryless scheduler."""
    trans = {}
    for s in m.states:
        a = sigma.get(s)
        if a is None:
            raise ModelError(f"scheduler undefined at state {s!r}")
        if a not in m.act(s):
            raise ModelError(f"scheduler picks disabled action {a!r} at {s!r}")
        for t, poly in m.row(s, a).items():
            trans[(s, MC_ACT, t)] = poly
    return Pmdp(m.states, m.params, m.initial, trans, m.targets)


@dataclass(frozen=True)
class ParamSpace:
    """A parameter region: wd / gp / eps-box / explicit box.

    Explicit boxes carry per-parameter bounds with open/closed flags.
    """

    kind: str = "wd"
    eps: Fraction | None = None
    bounds: tuple[tuple[str, Fraction, Fraction, bool, bool], ...] = ()

    def __post_init__(self):
        if self.kind not in ("wd", "gp", "eps", "box"):
            raise ModelError(f"unknown parameter-space kind {self.kind!r}")
        if self.kind == "eps":
            if self.eps is None or not (0 < self.eps < Fraction(1, 2)):
                raise ModelError("eps must lie in (0, 1/2)")
        if self.kind == "box":
            for var, lo, hi, _, _ in self.bounds:
                if not lo < hi:
                    raise ModelError(f"empty interval for {var!r}")

    def contains(self, m: Pmdp, u: Mapping[str, Fraction]) -> bool:
        if self.kind == "wd":
            return classify_instantiation(m, u)[0] != "invalid"
        if self.kind == "gp":
            return classify_instantiation(m, u)[0] == "graph-preserving"
        if self.kind == "eps":
            return all(self.eps <= Fraction(u[x]) <= 1 - self.eps for x in m.params)
        for var, lo, hi, lo_open, hi_open in self.bounds:
            v = Fraction(u[var])
            if v < lo or v > hi:
                return False
            if lo_open and v == lo:
                return False
            if hi_open and v == hi:
                return False
        return True


WD_SPACE = ParamSpace("wd")
GP_SPACE = ParamSpace("gp")


class Csrg:
    """Concurrent stochastic reachability game with rational kernel rows.

    Both players pick actions simultaneously; the kernel row for
    (state, action_one, action_two) is an exact distribution over states.
    Player-two action names must be globally distinct because they become
    parameter names in the pMDP encoding.
    """

    __slots__ = ("states", "initial", "targets", "acts1", "acts2", "kernel")

    def __init__(
        self,
        states: Iterable[str],
        initial: str,
        targets: Iterable[str],
        acts1: Mapping[str, Iterable[str]],
        acts2: Mapping[str, Iterable[str]],
        kernel: Mapping[tuple[str, str, str], Mapping[str, Fraction]],
    ):
        states = tuple(states)
        state_set = set(states)
        if initial not in state_set:
            raise ModelError(f"initial state {initial!r} is not a state")
        targets = frozenset(targets)
        if not targets <= state_set:
            raise ModelError("target set mentions unknown states")
        a1 = {s: tuple(acts1[s]) for s in states}
        a2 = {s: tuple(acts2[s]) for s in states}
        seen2: set[str] = set()
        for s in states:
            if not a1[s] or not a2[s]:
                raise ModelError(f"state {s!r} needs actions for both players")
            for b in a2[s]:
                if b in seen2:
                    raise ModelError(f"player-two action {b!r} reused across states")
                seen2.add(b)
        rows: dict[tuple[str, str, str], dict[str, Fraction]] = {}
        for s in states:
            for a in a1[s]:
                for b in a2[s]:
                    if (s, a, b) not in kernel:
                        raise ModelError(f"kernel row missing for ({s},{a},{b})")
                    row = {t: Fraction(p) for t, p in kernel[(s, a, b)].items() if p}
                    if set(row) - state_set:
                        raise ModelError(f"kernel row ({s},{a},{b}) leaves the state space")
                    if sum(row.values(), Fraction(0)) != 1 or any(p < 0 for p in row.values()):
                        raise ModelError(f"kernel row ({s},{a},{b}) is not a distribution")
                    rows[(s, a, b)] = row
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "acts1", a1)
        object.__setattr__(self, "acts2", a2)
        object.__setattr__(self, "kernel", rows)

    def __setattr__(self, name, value):
        raise AttributeError("Csrg is immutable")

    def __repr__(self):
        return f"<Csrg |S|={len(self.states)} init={self.initial!r}>"


# A stationary randomized strategy: (state, action) -> probability.
RandStrategy = dict[tuple[str, str], Fraction]


def validate_strategy(game: Csrg, strat: RandStrategy, player: int) -> None:
    acts = game.acts1 if player == 1 else game.acts2
    for s in game.states:
        total = Fraction(0)
        for a in acts[s]:
            p = Fraction(strat.get((s, a), 0))
            if p < 0:
                raise ModelError(f"negative probability at ({s},{a})")
            total += p
        if total != 1:
            raise ModelError(f"strategy row at {s!r} sums to {total}")


def game_mdp_vs_strategy(game: Csrg, strat: RandStrategy, fixed: int) -> Pmdp:
    """The MDP faced by one player when the other follows `strat`.

    fixed=2 freezes player two: the result is the best-response MDP over
    player-one actions (and symmetrically for fixed=1).
    """
    validate_strategy(game, strat, fixed)
    trans: dict[tuple[str, str, str], Polynomial] = {}
    free_acts = game.acts1 if fixed == 2 else game.acts2
    fixed_acts = game.acts2 if fixed == 2 else game.acts1
    for s in game.states:
        for a in free_acts[s]:
            row: dict[str, Fraction] = {}
            for b in fixed_acts[s]:
                weight = Fraction(strat.get((s, b), 0))
                if weight == 0:
                    continue
                key = (s, a, b) if fixed == 2 else (s, b, a)
                for t, p in game.kernel[key].items():
                    row[t] = row.get(t, Fraction(0)) + weight * p
            for t, p in row.items():
                if p != 0:
                    trans[(s, a, t)] = Polynomial.const(p)
    return Pmdp(game.states, (), game.initial, trans, {"T": game.targets})
