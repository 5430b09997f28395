"""Monkey Search: a tree-growing meta-heuristic for global minimization.

The search grows virtual binary trees. Every branch carries a solution
obtained by perturbing the solution of its parent. A virtual monkey climbs
a tree from the root to a fixed height, creating two candidate branches at
each step and choosing one of them (*exploring*). Back at the top it climbs
down, leaving on each branch a mark equal to the best objective value found
in the subtree above it (*climbing down*). Somewhere on the way down it
decides to climb up again, this time following the marks until it reaches
unexplored territory (*climbing up*). After a fixed number of climb-ups the
tree is abandoned and its best solutions are merged into a memory shared by
all trees. The first trees start from random points, later trees start from
a combination of the memory.

The problem is any object with the methods

``random_solution(rng)``
    a fresh random point,
``perturb(point, memory_points, rng)``
    a perturbed copy of ``point``; ``memory_points`` is the current memory,
    best first,
``objective(point)``
    the value to minimize,
``distance(a, b)``
    a metric on points, used for memory distinctness and convergence,

and optionally ``blend(memory_points, rng)`` to build a new root from the
memory (otherwise :func:`combine_memory` picks coordinates).

All randomness is drawn from one ``numpy.random.Generator`` seeded from
:attr:`MSParams.rng_seed`. Per explore step the order is: first child's
perturbation, second child's perturbation, branch choice.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

logger = logging.getLogger(__name__)

PERTURB_RETRIES = 10


@dataclass
class Solution:
    point: Any
    value: float


@dataclass(eq=False)
class Branch:
    """A node of a virtual tree.

    ``mark`` is ``None`` until the monkey climbs down through the branch;
    afterwards it is the best value among the branch and every branch
    evaluated above it.
    """

    solution: Solution
    parent: Optional["Branch"] = None
    depth: int = 0
    children: list = field(default_factory=list)
    mark: Optional[float] = None

    @property
    def explored(self):
        return bool(self.children)

    @property
    def value(self):
        return self.solution.value

    def path_from_root(self):
        path = []
        b = self
        while b is not None:
            path.append(b)
            b = b.parent
        return path[::-1]

    def walk(self):
        stack = [self]
        while stack:
            b = stack.pop()
            yield b
            stack.extend(reversed(b.children))


@dataclass(frozen=True)
class MSParams:
    height: int = 40
    climb_ups: int = 20
    memory_size: int = 10
    starting_trees: int = 100
    max_trees: int = 3000
    better_branch_prob: float = 0.8
    climb_up_prob: float = 0.5
    epsilon: float = math.radians(5.0)
    rng_seed: int = 0

    def __post_init__(self):
        if self.height < 1:
            raise ValueError("height must be >= 1")
        if self.climb_ups < 0:
            raise ValueError("climb_ups must be >= 0")
        if self.memory_size < 1:
            raise ValueError("memory_size must be >= 1")
        if self.starting_trees < 1:
            raise ValueError("starting_trees must be >= 1")
        if self.max_trees < self.starting_trees:
            raise ValueError("max_trees must be >= starting_trees")
        if not 0.5 < self.better_branch_prob <= 1.0:
            raise ValueError("better_branch_prob must lie in (0.5, 1]")
        if not 0.0 <= self.climb_up_prob < 1.0:
            raise ValueError("climb_up_prob must lie in [0, 1)")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")

    @property
    def evaluation_budget(self):
        """Upper bound on objective calls per tree, root included."""
        return 2 * self.height * (1 + self.climb_ups) + 1


class Memory:
    """Best solutions seen so far, sorted by value and mutually distinct.

    A candidate closer than ``radius`` to a better entry is dropped.
    """

    def __init__(self, capacity, distance, radius=0.0):
        self.capacity = capacity
        self.distance = distance
        self.radius = radius
        self.solutions: list[Solution] = []

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def __getitem__(self, i):
        return self.solutions[i]

    @property
    def full(self):
        return len(self.solutions) >= self.capacity

    @property
    def best(self):
        return self.solutions[0]

    def points(self):
        return [s.point for s in self.solutions]

    def update(self, candidates):
        # stable sort keeps incumbents ahead of equal-valued newcomers
        pool = sorted(list(self.solutions) + list(candidates), key=lambda s: s.value)
        self.solutions = select_distinct(pool, self.capacity, self.distance, self.radius)


def select_distinct(sorted_solutions, capacity, distance, radius):
    kept = []
    for s in sorted_solutions:
        if len(kept) >= capacity:
            break
        if all(distance(s.point, k.point) >= radius for k in kept):
            kept.append(s)
    return kept


def choose_child_exploring(value_a, value_b, rng, better_branch_prob=0.8):
    """Index (0 or 1) of the child to climb, favouring the lower value.

    The better child wins with probability ``better_branch_prob``; an exact
    tie is a fair coin. Exactly one uniform draw is consumed.
    """
    u = rng.random()
    if value_a == value_b:
        return 0 if u < 0.5 else 1
    better = 0 if value_a < value_b else 1
    return better if u < better_branch_prob else 1 - better


def choose_child_ascending(mark_a, mark_b, rng, better_branch_prob=0.8):
    """Index of the child to climb on the way up.

    A child without a mark (``None``) has not been explored; it is preferred
    over a marked one. Otherwise the better mark is preferred. The preferred
    child wins with probability ``better_branch_prob``; ties (two unmarked
    children or equal marks) are a fair coin. One uniform draw is consumed.
    """
    u = rng.random()
    if (mark_a is None and mark_b is None) or mark_a == mark_b:
        return 0 if u < 0.5 else 1
    if mark_a is None:
        preferred = 0
    elif mark_b is None:
        preferred = 1
    else:
        preferred = 0 if mark_a < mark_b else 1
    return preferred if u < better_branch_prob else 1 - preferred


def combine_memory(memory, problem, rng):
    """Root point for a new tree built from the memory.

    Uses ``problem.blend`` when available; the fallback picks every
    coordinate from a uniformly chosen memory point.
    """
    points = memory.points() if isinstance(memory, Memory) else list(memory)
    if not points:
        raise ValueError("cannot combine an empty memory")
    blend = getattr(problem, "blend", None)
    if blend is not None:
        return blend(points, rng)
    stacked = np.asarray(points, dtype=float)
    if stacked.ndim == 1:
        stacked = stacked[:, None]
    pick = rng.integers(len(points), size=stacked.shape[1])
    out = stacked[pick, np.arange(stacked.shape[1])]
    return out.reshape(np.shape(points[0]))


def converged(memory, epsilon):
    """True when the memory is full and all its points lie within ``epsilon``
    of each other."""
    if not memory.full:
        return False
    pts = memory.points()
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if memory.distance(pts[i], pts[j]) > epsilon:
                return False
    return True


@dataclass
class Tree:
    root: Branch
    solutions: list = field(default_factory=list)
    evaluations: int = 0
    climb_ups: int = 0

    def best(self, count, distance, radius=0.0):
        pool = sorted(self.solutions, key=lambda s: s.value)
        return select_distinct(pool, count, distance, radius)


@dataclass
class SearchResult:
    memory: Memory
    trees: int
    evaluations: int
    converged: bool
    history: list = field(default_factory=list)  # incumbent value after each tree

    @property
    def best(self):
        return self.memory.best


class MonkeySearch:
    """Monkey Search over a user supplied problem.

    >>> ms = MonkeySearch(problem, MSParams(rng_seed=1))
    >>> result = ms.run()
    >>> result.best.value
    """

    def __init__(self, problem, params: MSParams = MSParams()):
        self.problem = problem
        self.params = params
        self.rng = np.random.default_rng(params.rng_seed)
        self.memory = Memory(params.memory_size, problem.distance, params.epsilon / 10)
        self.evaluations = 0

    def _evaluate(self, point):
        value = float(self.problem.objective(point))
        self.evaluations += 1
        return Solution(point, value)

    def _perturbed(self, solution):
        points = self.memory.points()
        for _ in range(PERTURB_RETRIES):
            new = self._evaluate(self.problem.perturb(solution.point, points, self.rng))
            if not math.isnan(new.value):
                return new
        raise RuntimeError(f"perturbation failed {PERTURB_RETRIES} times in a row")

    def explore_step(self, current: Branch, tree: Optional[Tree] = None) -> Branch:
        """Grow two children on ``current`` and return the one the monkey climbs."""
        if current.children:
            raise ValueError("branch is already explored")
        kids = [
            Branch(self._perturbed(current.solution), current, current.depth + 1)
            for _ in range(2)
        ]
        current.children = kids
        if tree is not None:
            tree.solutions.extend(k.solution for k in kids)
        pick = choose_child_exploring(
            kids[0].value, kids[1].value, self.rng, self.params.better_branch_prob
        )
        return kids[pick]

    def climb_up(self, start: Branch, tree: Optional[Tree] = None) -> Branch:
        """Climb from ``start`` to the top, following marks over explored
        branches and exploring once unexplored territory is reached."""
        p = self.params
        b = start
        while b.children:
            i = choose_child_ascending(
                b.children[0].mark, b.children[1].mark, self.rng, p.better_branch_prob
            )
            b = b.children[i]
        while b.depth < p.height:
            b = self.explore_step(b, tree)
        return b

    def climb_down(self, top: Branch) -> Branch:
        """Mark the path from ``top`` down to the root and return the branch
        from which the monkey climbs up again.

        Walking down, the monkey leaves each branch with a mark equal to the
        best value on it or on any of its evaluated children (using their
        marks where they have one). At every branch below the top it decides
        with probability ``climb_up_prob`` to climb up from there; the root
        is the fallback. The whole path is marked regardless of where the
        monkey turns, so marks stay exact for later climbs.
        """
        resume = None
        b = top
        while b is not None:
            mark = b.value
            for child in b.children:
                m = child.value if child.mark is None else child.mark
                if m < mark:
                    mark = m
            b.mark = mark
            if resume is None and b is not top and b.parent is not None:
                if self.rng.random() < self.params.climb_up_prob:
                    resume = b
            if b.parent is None and resume is None:
                resume = b
            b = b.parent
        return resume

    def run_tree(self, root: Solution) -> Tree:
        """Search one tree rooted at the already evaluated ``root``."""
        tree = Tree(Branch(root), [root])
        start_evals = self.evaluations
        top = self.climb_up(tree.root, tree)
        for _ in range(self.params.climb_ups):
            resume = self.climb_down(top)
            top = self.climb_up(resume, tree)
            tree.climb_ups += 1
        self.climb_down(top)
        tree.evaluations = self.evaluations - start_evals
        return tree

    def run(self, callback: Optional[Callable[[int, "MonkeySearch"], bool]] = None):
        """Run trees until the memory converges or ``max_trees`` is reached.

        ``callback(tree_index, search)`` is called after every tree; returning
        True stops the run early.
        """
        p = self.params
        history = []
        is_converged = False
        t = 0
        while t < p.max_trees:
            if t < p.starting_trees:
                point = self.problem.random_solution(self.rng)
            else:
                point = combine_memory(self.memory, self.problem, self.rng)
            root = self._evaluate(point)
            tree = self.run_tree(root)
            self.memory.update(
                tree.best(p.memory_size, self.problem.distance, self.memory.radius)
            )
            history.append(self.memory.best.value)
            t += 1
            logger.debug("tree %d: incumbent %.6g", t, self.memory.best.value)
            if t >= p.starting_trees and converged(self.memory, p.epsilon):
                is_converged = True
                break
            if callback is not None and callback(t, self):
                break
        return SearchResult(self.memory, t, self.evaluations, is_converged, history)


def run(problem, params: MSParams = MSParams(), callback=None) -> SearchResult:
    return MonkeySearch(problem, params).run(callback)
