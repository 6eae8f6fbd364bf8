"""
Numerical divisor configurations on a rational surface.

A configuration stores self-intersections, global pairwise intersection
numbers and a set of named points, each listing the divisors through it
(with multiplicity) and the local intersection number of every incident pair.
Blow-ups and blow-downs update all three exactly; placement of the points
created by a blow-up is supplied by the caller.
"""

import logging
from copy import deepcopy
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .exactpoly import CurveParams

logger = logging.getLogger(__name__)

ROLES = ('section', 'fiber', 'curve', 'exceptional')


class SurfaceError(Exception):
    """Raised when an operation's preconditions fail or a configuration is inconsistent."""
    pass


class SurfaceInvariantError(SurfaceError):
    """Raised by a replay when a step leaves the configuration inconsistent."""

    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


def _pair(a: str, b: str) -> FrozenSet[str]:
    if a == b:
        raise SurfaceError(f"Pair of identical divisors '{a}'")
    return frozenset((a, b))


def _pair_label(pair: FrozenSet[str]) -> str:
    return ".".join(sorted(pair))


@dataclass(frozen=True)
class Divisor:
    name: str
    self_intersection: int
    role: str


@dataclass
class SurfacePoint:
    name: str
    multiplicities: Dict[str, int]
    local: Dict[FrozenSet[str], int] = field(default_factory=dict)

    def __post_init__(self):
        self.multiplicities = {k: v for k, v in self.multiplicities.items() if v}
        for a, b in combinations(sorted(self.multiplicities), 2):
            self.local.setdefault(_pair(a, b), self.multiplicities[a] * self.multiplicities[b])

    def local_between(self, a: str, b: str) -> int:
        return self.local.get(_pair(a, b), 0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'multiplicities': dict(sorted(self.multiplicities.items())),
            'local': {_pair_label(k): v for k, v in sorted(self.local.items(), key=lambda kv: _pair_label(kv[0]))},
        }


def make_point(name: str, multiplicities: Mapping[str, int],
               local: Optional[Mapping[Tuple[str, str], int]] = None) -> SurfacePoint:
    """Point with the given multiplicities; unspecified incident pairs meet transversally."""
    pairs = {_pair(a, b): v for (a, b), v in (local or {}).items()}
    return SurfacePoint(name, dict(multiplicities), pairs)


@dataclass
class DivisorConfiguration:
    divisors: Dict[str, Divisor] = field(default_factory=dict)
    intersections: Dict[FrozenSet[str], int] = field(default_factory=dict)
    points: Dict[str, SurfacePoint] = field(default_factory=dict)

    # --- building (mutating, used while assembling an initial configuration) ---

    def add_divisor(self, name: str, self_intersection: int, role: str) -> 'DivisorConfiguration':
        if role not in ROLES:
            raise SurfaceError(f"Unknown role '{role}'. Available: {', '.join(ROLES)}")
        if name in self.divisors:
            raise SurfaceError(f"Divisor '{name}' already exists")
        self.divisors[name] = Divisor(name, self_intersection, role)
        return self

    def set_intersection(self, a: str, b: str, value: int) -> 'DivisorConfiguration':
        key = _pair(a, b)
        if value:
            self.intersections[key] = value
        else:
            self.intersections.pop(key, None)
        return self

    def add_point(self, point: SurfacePoint) -> 'DivisorConfiguration':
        if point.name in self.points:
            raise SurfaceError(f"Point '{point.name}' already exists")
        self.points[point.name] = point
        return self

    # --- queries ---

    def self_intersection(self, name: str) -> int:
        return self._divisor(name).self_intersection

    def intersection(self, a: str, b: str) -> int:
        if a == b:
            return self.self_intersection(a)
        return self.intersections.get(_pair(a, b), 0)

    def _divisor(self, name: str) -> Divisor:
        if name not in self.divisors:
            raise SurfaceError(f"Unknown divisor '{name}'. Available: {', '.join(sorted(self.divisors))}")
        return self.divisors[name]

    def validate(self):
        """
        Raises:
            SurfaceError: listing every violated invariant
        """
        problems = []
        for d in self.divisors.values():
            if d.role not in ROLES:
                problems.append(f"{d.name} has unknown role {d.role}")
        totals: Dict[FrozenSet[str], int] = {}
        for pt in self.points.values():
            for name in pt.multiplicities:
                if name not in self.divisors:
                    problems.append(f"point {pt.name} lies on unknown divisor {name}")
            for key, value in pt.local.items():
                a, b = sorted(key)
                if a not in pt.multiplicities or b not in pt.multiplicities:
                    problems.append(f"point {pt.name} has local {a}.{b} but is not on both")
                    continue
                if value < pt.multiplicities[a] * pt.multiplicities[b]:
                    problems.append(f"point {pt.name}: local {a}.{b}={value} below "
                                    f"{pt.multiplicities[a]}*{pt.multiplicities[b]}")
                totals[key] = totals.get(key, 0) + value
        for key in set(totals) | set(self.intersections):
            if totals.get(key, 0) != self.intersections.get(key, 0):
                problems.append(f"{_pair_label(key)}: locals sum to {totals.get(key, 0)}, "
                                f"global is {self.intersections.get(key, 0)}")
        if problems:
            raise SurfaceError("; ".join(problems))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'divisors': {n: {'self_intersection': d.self_intersection, 'role': d.role}
                         for n, d in sorted(self.divisors.items())},
            'intersections': {_pair_label(k): v
                              for k, v in sorted(self.intersections.items(), key=lambda kv: _pair_label(kv[0]))},
            'points': {n: p.to_dict() for n, p in sorted(self.points.items())},
        }


def _prune(config: DivisorConfiguration):
    config.intersections = {k: v for k, v in config.intersections.items() if v}


def blowup(config: DivisorConfiguration, point: str, exceptional: str,
           residual: Optional[Sequence[SurfacePoint]] = None, role: str = 'exceptional') -> DivisorConfiguration:
    """
    Blow up `point`, creating the (-1)-curve `exceptional`.

    Args:
        config: configuration (left untouched)
        point: name of the center
        exceptional: name of the new divisor
        residual: points on the new divisor; by default one transversal point per
            incident divisor, allowed only when no local intersection survives

    Returns:
        The new configuration

    Raises:
        SurfaceError: unknown point, name clash, or residual placement needed
    """
    if point not in config.points:
        raise SurfaceError(f"Unknown point '{point}'. Available: {', '.join(sorted(config.points))}")
    if exceptional in config.divisors:
        raise SurfaceError(f"Divisor '{exceptional}' already exists")
    new = deepcopy(config)
    center = new.points.pop(point)
    mults = center.multiplicities

    for name, m in mults.items():
        d = new.divisors[name]
        new.divisors[name] = replace(d, self_intersection=d.self_intersection - m * m)
    for a, b in combinations(sorted(mults), 2):
        key = _pair(a, b)
        new.intersections[key] = new.intersections.get(key, 0) - mults[a] * mults[b]
    new.divisors[exceptional] = Divisor(exceptional, -1, role)
    for name, m in mults.items():
        new.intersections[_pair(name, exceptional)] = m

    if residual is None:
        leftover = {k: v - mults[min(k)] * mults[max(k)] for k, v in center.local.items()}
        if any(leftover.values()):
            raise SurfaceError(f"Blow-up of {point} leaves tangencies "
                               f"{[_pair_label(k) for k, v in leftover.items() if v]}; residual points required")
        residual = [make_point(f"{exceptional}/{name}", {exceptional: 1, name: 1}, {(exceptional, name): m})
                    for name, m in sorted(mults.items())]
    for rp in residual:
        if rp.name in new.points:
            raise SurfaceError(f"Residual point '{rp.name}' already exists")
        new.points[rp.name] = rp
    _prune(new)
    logger.debug(f"Blew up {point} -> {exceptional}; multiplicities {mults}")
    return new


def blowdown(config: DivisorConfiguration, divisor: str, point_name: Optional[str] = None) -> DivisorConfiguration:
    """
    Contract a (-1)-curve of role exceptional or fiber.

    Points on the curve merge into one point named `point_name` (default
    '<divisor>*'), kept only when at least two divisors pass through it.
    """
    e = config._divisor(divisor)
    if e.self_intersection != -1:
        raise SurfaceError(f"Cannot blow down {divisor}: self-intersection {e.self_intersection} != -1")
    if e.role not in ('exceptional', 'fiber'):
        raise SurfaceError(f"Cannot blow down {divisor} with role {e.role}")
    new = deepcopy(config)
    dots = {name: new.intersection(name, divisor) for name in new.divisors if name != divisor}
    dots = {k: v for k, v in dots.items() if v}

    for name, k in dots.items():
        d = new.divisors[name]
        new.divisors[name] = replace(d, self_intersection=d.self_intersection + k * k)
    for a, b in combinations(sorted(dots), 2):
        key = _pair(a, b)
        new.intersections[key] = new.intersections.get(key, 0) + dots[a] * dots[b]
    del new.divisors[divisor]
    new.intersections = {k: v for k, v in new.intersections.items() if divisor not in k}

    on_e = [p for p in new.points.values() if divisor in p.multiplicities]
    for p in on_e:
        del new.points[p.name]
    if len(dots) >= 2:
        local = {}
        for a, b in combinations(sorted(dots), 2):
            local[(a, b)] = dots[a] * dots[b] + sum(p.local_between(a, b) for p in on_e
                                                    if a in p.multiplicities and b in p.multiplicities)
        merged = make_point(point_name or f"{divisor}*", dots, local)
        if merged.name in new.points:
            raise SurfaceError(f"Point '{merged.name}' already exists")
        new.points[merged.name] = merged
    _prune(new)
    logger.debug(f"Blew down {divisor}; neighbours {dots}")
    return new


def retag(config: DivisorConfiguration, divisor: str, role: str) -> DivisorConfiguration:
    if role not in ROLES:
        raise SurfaceError(f"Unknown role '{role}'. Available: {', '.join(ROLES)}")
    new = deepcopy(config)
    new.divisors[divisor] = replace(new._divisor(divisor), role=role)
    return new


# =============================================================================
# Elementary transformations for the curve family
# =============================================================================

@dataclass
class ReplayStep:
    index: int
    kind: str
    center: str
    created: Optional[str]
    self_intersections: Dict[str, int]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'index': self.index,
            'kind': self.kind,
            'center': self.center,
            'created': self.created,
            'self_intersections': self.self_intersections,
        }


@dataclass
class NagataReplay:
    final: DivisorConfiguration
    trace: List[ReplayStep]
    checkpoints: Dict[str, Dict[str, int]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'final': self.final.to_dict(),
            'checkpoints': self.checkpoints,
            'trace': [s.to_dict() for s in self.trace],
        }


@dataclass(frozen=True)
class SideData:
    """Branch data on one side: per infinitely near point P^0..P^m."""
    multiplicities: Tuple[int, ...]
    contacts_with_e: Tuple[int, ...]
    contacts_with_last: Tuple[int, ...]

    @classmethod
    def from_resolution(cls, branch, m: int) -> 'SideData':
        """Read stages 1..m+1 of a full-trace BranchResolution."""
        stages = [branch.stage(j) for j in range(1, m + 2)]
        if any(s is None for s in stages):
            raise SurfaceError(f"Branch {branch.tangent_direction} has no full trace up to point {m + 1}")
        return cls(tuple(s.multiplicity for s in stages),
                   tuple(s.exceptional_contact for s in stages),
                   tuple(s.last_exceptional_contact for s in stages))


SIDES = (('inf', 'L_inf', 'x=0'), ('0', 'L_0', 'y=0'))


def projective_plane_configuration(params: CurveParams) -> DivisorConfiguration:
    """C, L_0 = {y=0}, L_inf = {x=0} in the plane, all meeting only at P = [0:0:1]."""
    deg, m, d = params.degree, params.m, params.d
    config = DivisorConfiguration()
    config.add_divisor('C', deg * deg, 'curve')
    config.add_divisor('L_0', 1, 'fiber')
    config.add_divisor('L_inf', 1, 'fiber')
    config.set_intersection('C', 'L_0', deg).set_intersection('C', 'L_inf', deg).set_intersection('L_0', 'L_inf', 1)
    config.add_point(make_point('P', {'C': 2 * m * d, 'L_0': 1, 'L_inf': 1},
                                {('C', 'L_0'): deg, ('C', 'L_inf'): deg, ('L_0', 'L_inf'): 1}))
    return config


def _summary(config: DivisorConfiguration) -> Dict[str, int]:
    return {name: d.self_intersection for name, d in sorted(config.divisors.items())}


def replay_nagata(params: CurveParams, branches: Mapping[str, Any]) -> NagataReplay:
    """
    Blow up P, then m times along each branch, then contract both line chains.

    Args:
        params: curve parameters
        branches: full-trace BranchResolution per tangent label ('x=0', 'y=0')

    Returns:
        NagataReplay with the final configuration, every step and the
        intermediate checkpoints

    Raises:
        SurfaceInvariantError: a step breaks consistency or the end state is off
    """
    m, d, N = params.m, params.d, params.N
    sides = {}
    for tag, _, label in SIDES:
        if label not in branches:
            raise SurfaceError(f"Missing branch data for {label}")
        sides[tag] = SideData.from_resolution(branches[label], m)

    trace: List[ReplayStep] = []
    config = projective_plane_configuration(params)

    def record(new: DivisorConfiguration, kind: str, center: str, created: Optional[str] = None):
        step = len(trace)
        try:
            new.validate()
        except SurfaceError as exc:
            raise SurfaceInvariantError(step, f"{kind} at {center}: {exc}") from exc
        trace.append(ReplayStep(step, kind, center, created, _summary(new)))
        return new

    config = record(config, 'start', 'P2')

    residual = []
    for tag, line, _ in SIDES:
        data = sides[tag]
        residual.append(make_point(
            f"P_{tag}^0", {'E': 1, 'C': data.multiplicities[0], line: 1},
            {('C', 'E'): data.contacts_with_e[0], ('C', line): params.degree - 2 * m * d}))
    config = record(blowup(config, 'P', 'E', residual), 'blowup', 'P', 'E')
    config = record(retag(config, 'E', 'section'), 'retag', 'E')
    checkpoints = {'sigma_1': {**_summary(config), 'C.E': config.intersection('C', 'E')}}

    for tag, line, _ in SIDES:
        data = sides[tag]
        previous = line
        for j in range(1, m + 1):
            chain = f"E_{tag}^{j}"
            nxt = j  # index of P^j in the side data
            on_e = data.contacts_with_e[nxt] > 0
            mults = {chain: 1, 'C': data.multiplicities[nxt]}
            local = {('C', chain): data.contacts_with_last[nxt]}
            if on_e:
                mults['E'] = 1
                local[('C', 'E')] = data.contacts_with_e[nxt]
            points = [
                make_point(f"P_{tag}^{j}", mults, local),
                make_point(f"Q_{tag}^{j}", {previous: 1, chain: 1}),
            ]
            if not on_e:
                points.append(make_point(f"R_{tag}", {'E': 1, chain: 1}))
            config = record(blowup(config, f"P_{tag}^{j - 1}", chain, points), 'blowup', f"P_{tag}^{j - 1}", chain)
            previous = chain
    checkpoints['blown_up'] = _summary(config)

    for tag, line, _ in SIDES:
        for name in [line] + [f"E_{tag}^{j}" for j in range(1, m)]:
            config = record(blowdown(config, name), 'blowdown', name)
        config = record(retag(config, f"E_{tag}^{m}", 'fiber'), 'retag', f"E_{tag}^{m}")

    expected = {
        'E.E': (config.self_intersection('E'), -N),
        'C.E': (config.intersection('C', 'E'), 0),
        'C.C': (config.self_intersection('C'), d * d * N),
    }
    for tag, _, _ in SIDES:
        fiber = f"E_{tag}^{m}"
        expected[f"{fiber}.{fiber}"] = (config.self_intersection(fiber), 0)
        expected[f"C.{fiber}"] = (config.intersection('C', fiber), d)
        expected[f"E.{fiber}"] = (config.intersection('E', fiber), 1)
    wrong = {k: v for k, v in expected.items() if v[0] != v[1]}
    if wrong:
        raise SurfaceInvariantError(len(trace), "final state differs: " + ", ".join(
            f"{k}={got} (expected {want})" for k, (got, want) in wrong.items()))
    logger.info(f"Replay finished in {len(trace)} steps: E^2={-N}, C^2={d * d * N}")
    return NagataReplay(config, trace, checkpoints)
