"""Discrete Lion-Man game engine.

Each step the lion jumps ``min(D, D_n)`` along the geodesic toward the man's
current position; the man then sees the lion's new position and moves at most
``D`` inside the domain.  The lion wins the step when ``d(L_{n+1}, M_n) < alpha``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, StrategyExhaustedError
from .spaces import Domain, Space, clamp_move, domain_from_dict, space_from_dict


@dataclass
class GameConfig:
    space: Space
    domain: Domain
    D: float
    L0: np.ndarray
    M0: np.ndarray
    alpha: float
    max_steps: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.domain.space != self.space:
            raise InvalidInputError("domain belongs to a different space")
        if not self.domain.game_domain:
            raise InvalidInputError(f"{self.domain!r} is not a playing domain")
        self.L0 = self.space.point(self.L0).copy()
        self.M0 = self.space.point(self.M0).copy()
        self.D = float(self.D)
        self.alpha = float(self.alpha)
        if not self.D > 0:
            raise InvalidInputError("jump bound D must be positive")
        if self.D > self.domain.diameter_bound:
            raise InvalidInputError("D may not exceed the domain diameter bound")
        if not self.alpha > 0:
            raise InvalidInputError("capture tolerance alpha must be positive")
        if int(self.max_steps) < 1:
            raise InvalidInputError("max_steps must be a positive integer")
        self.max_steps = int(self.max_steps)
        if int(self.seed) < 0:
            raise InvalidInputError("seed must be unsigned")
        self.seed = int(self.seed)
        if not (self.domain.contains(self.L0) and self.domain.contains(self.M0)):
            raise InvalidInputError("starting points must lie in the domain")

    def to_dict(self):
        return {
            "space": self.space.to_dict(),
            "domain": self.domain.to_dict(),
            "D": self.D,
            "L0": self.L0.tolist(),
            "M0": self.M0.tolist(),
            "alpha": self.alpha,
            "max_steps": self.max_steps,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        space = space_from_dict(d["space"])
        return cls(
            space=space,
            domain=domain_from_dict(d["domain"], space),
            D=d["D"],
            L0=d["L0"],
            M0=d["M0"],
            alpha=d["alpha"],
            max_steps=d["max_steps"],
            seed=d["seed"],
        )


@dataclass(frozen=True)
class StepRecord:
    n: int
    L: np.ndarray
    M: np.ndarray
    D_n: float
    gap_n: float


@dataclass
class GameTrace:
    """Positions and distances of a finished run, stored column-wise."""

    config: GameConfig
    L: np.ndarray
    M: np.ndarray
    D_n: np.ndarray
    gap_n: np.ndarray
    capture_step: int | None
    strategy: str = "unknown"

    @property
    def terminated_by(self):
        return "capture" if self.capture_step is not None else "max_steps"

    def __len__(self):
        return len(self.D_n)

    def step(self, n) -> StepRecord:
        return StepRecord(int(n), self.L[n], self.M[n], float(self.D_n[n]), float(self.gap_n[n]))

    @property
    def steps(self):
        return [self.step(n) for n in range(len(self))]


# ---------------------------------------------------------------------------
# the two players


def lion_step(space: Space, L, M, D):
    """Move ``min(D, d(L, M))`` from ``L`` along the geodesic to ``M``."""
    L, M = space.point(L), space.point(M)
    d = float(space._distance(L, M))
    if d == 0.0:
        return L.copy()
    if d <= D:
        return M.copy()
    return space._interpolate(L, M, D / d)


class ManStrategy:
    """Proposes the man's next target; ``man_step`` repairs it into a legal move."""

    name = "abstract"

    def __init__(self):
        self.rng = np.random.default_rng(0)

    def reset(self, seed):
        self.rng = np.random.default_rng(seed)

    def propose(self, space: Space, domain: Domain, L_new, M, D):
        raise NotImplementedError

    def _random_direction(self, space):
        return self.rng.standard_normal(space.dim)


class Stationary(ManStrategy):
    name = "stationary"

    def propose(self, space, domain, L_new, M, D):
        return M


class RandomWalk(ManStrategy):
    name = "random-walk"

    def propose(self, space, domain, L_new, M, D):
        return space.extend(M, self._random_direction(space), D)


class Flee(ManStrategy):
    """Run straight away from the lion, continuing the lion-to-man geodesic."""

    name = "flee"

    def propose(self, space, domain, L_new, M, D):
        direction = M - L_new
        if space._distance(L_new, M) < 1e-12:
            direction = self._random_direction(space)
        try:
            return space.extend(M, direction, D)
        except InvalidInputError:
            return space.extend(M, self._random_direction(space), D)


class BoundaryOrbit(ManStrategy):
    """Circle the domain boundary about its center, roughly ``D`` per step."""

    name = "boundary-orbit"

    def propose(self, space, domain, L_new, M, D):
        c = domain.center
        rho = float(space._distance(c, M))
        if rho < 1e-12:
            return domain.boundary_along(self._offset(space, c))
        radius = rho if space.kind != "sphere2" else math.sin(rho)
        angle = D / max(radius, 1e-12)
        turned = space.rotate_about(c, M, min(angle, math.pi / 2))
        return domain.boundary_along(self._offset(space, c, turned))

    @staticmethod
    def _offset(space, c, toward=None):
        if toward is not None:
            return toward - c if space.kind != "sphere2" else toward
        e = np.zeros(space.dim)
        e[0] = 1.0
        if space.kind == "sphere2" and abs(c[0]) > 0.9:
            e = np.array([0.0, 1.0, 0.0])
        return e


class Scripted(ManStrategy):
    """Replay a fixed list of targets; each passes through ``clamp_move``."""

    name = "scripted"

    def __init__(self, targets):
        super().__init__()
        self.targets = [np.asarray(t, dtype=float) for t in targets]
        self._next = 0

    def reset(self, seed):
        super().reset(seed)
        self._next = 0

    def propose(self, space, domain, L_new, M, D):
        if self._next >= len(self.targets):
            raise StrategyExhaustedError("scripted man has no targets left")
        target = self.targets[self._next]
        self._next += 1
        return target


STRATEGIES = {
    "stationary": Stationary,
    "random-walk": RandomWalk,
    "flee": Flee,
    "boundary-orbit": BoundaryOrbit,
}


def make_strategy(name, targets=None) -> ManStrategy:
    if name == "scripted":
        if targets is None:
            raise InvalidInputError("scripted strategy needs a target list")
        return Scripted(targets)
    try:
        return STRATEGIES[name]()
    except KeyError:
        known = ", ".join([*STRATEGIES, "scripted"])
        raise InvalidInputError(f"unknown strategy {name!r}; choose from {known}") from None


def man_step(strategy: ManStrategy, space: Space, domain: Domain, L_new, M, D):
    """The man's legal move: the strategy's proposal repaired by ``clamp_move``."""
    L_new, M = space.point(L_new), space.point(M)
    return clamp_move(domain, M, strategy.propose(space, domain, L_new, M, D), D)


def random_start(domain: Domain, seed):
    """Lion and man starting points drawn uniformly from ``domain`` with ``seed``."""
    rng = np.random.default_rng(seed)
    return domain.sample(rng), domain.sample(rng)


# ---------------------------------------------------------------------------


def run_game(config: GameConfig, strategy: ManStrategy) -> GameTrace:
    space, domain, D, alpha = config.space, config.domain, config.D, config.alpha
    strategy.reset(config.seed)
    L, M = config.L0.copy(), config.M0.copy()
    Ls, Ms, Ds, gaps = [], [], [], []
    capture = None
    holding = False
    for n in range(config.max_steps):
        D_n = float(space._distance(L, M))
        L_next = lion_step(space, L, M, D)
        gap = float(space._distance(L_next, M))
        Ls.append(L)
        Ms.append(M)
        Ds.append(D_n)
        gaps.append(gap)
        if gap < alpha:
            capture = n
            break
        if holding:
            M_next = M
        else:
            try:
                M_next = man_step(strategy, space, domain, L_next, M, D)
            except StrategyExhaustedError:
                holding = True
                M_next = M
        L, M = L_next, M_next
    return GameTrace(
        config=config,
        L=np.array(Ls),
        M=np.array(Ms),
        D_n=np.array(Ds),
        gap_n=np.array(gaps),
        capture_step=capture,
        strategy=strategy.name,
    )


def capture_time(trace: GameTrace, alpha):
    """First ``n`` with ``gap_n < alpha``, or None."""
    hits = np.flatnonzero(trace.gap_n < alpha)
    return int(hits[0]) if len(hits) else None


def recompute_gaps(trace: GameTrace):
    """``d(L_{n+1}, M_n)`` rebuilt from the stored positions alone."""
    space, D = trace.config.space, trace.config.D
    nxt = np.empty_like(trace.L)
    nxt[:-1] = trace.L[1:]
    if len(trace):
        nxt[-1] = lion_step(space, trace.L[-1], trace.M[-1], D)
    return space._distance(nxt, trace.M)


# ---------------------------------------------------------------------------
# trace formats


def _header(dim):
    return ["n", *[f"Lx{i}" for i in range(dim)], *[f"Mx{i}" for i in range(dim)], "D_n", "gap_n"]


def trace_to_csv(trace: GameTrace, fh=None):
    """Write the step table; returns the text when ``fh`` is None."""
    buf = io.StringIO() if fh is None else fh
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_header(trace.L.shape[1] if len(trace) else trace.config.space.dim))
    for n in range(len(trace)):
        w.writerow(
            [n, *map(repr, trace.L[n].tolist()), *map(repr, trace.M[n].tolist()),
             repr(float(trace.D_n[n])), repr(float(trace.gap_n[n]))]
        )
    return buf.getvalue() if fh is None else None


def read_trace_csv(fh):
    """Parse a step table back into arrays ``(n, L, M, D_n, gap_n)``."""
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    dim = sum(1 for h in header if h.startswith("Lx"))
    if header != _header(dim):
        raise InvalidInputError("not a lion-man trace table")
    data = np.array([[float(v) for v in row] for row in body]).reshape(len(body), 2 * dim + 3)
    return (
        data[:, 0].astype(int),
        data[:, 1 : 1 + dim],
        data[:, 1 + dim : 1 + 2 * dim],
        data[:, -2],
        data[:, -1],
    )


def trace_to_dict(trace: GameTrace):
    return {
        "config": trace.config.to_dict(),
        "strategy": trace.strategy,
        "steps": [
            {"n": n, "L": trace.L[n].tolist(), "M": trace.M[n].tolist(),
             "D_n": float(trace.D_n[n]), "gap_n": float(trace.gap_n[n])}
            for n in range(len(trace))
        ],
        "capture_step": trace.capture_step,
        "terminated_by": trace.terminated_by,
    }


def trace_from_dict(d) -> GameTrace:
    config = GameConfig.from_dict(d["config"])
    steps = d["steps"]
    dim = config.space.dim
    return GameTrace(
        config=config,
        L=np.array([s["L"] for s in steps], dtype=float).reshape(len(steps), dim),
        M=np.array([s["M"] for s in steps], dtype=float).reshape(len(steps), dim),
        D_n=np.array([s["D_n"] for s in steps], dtype=float),
        gap_n=np.array([s["gap_n"] for s in steps], dtype=float),
        capture_step=d["capture_step"],
        strategy=d.get("strategy", "unknown"),
    )


def trace_to_json(trace: GameTrace) -> str:
    return json.dumps(trace_to_dict(trace))


def trace_from_json(text: str) -> GameTrace:
    return trace_from_dict(json.loads(text))
