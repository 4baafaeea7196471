"""Genetic search: feature spotters over patches, then the scaffolder.

Stage one evolves atomic equalities (no logic) against one weighted patch
each; stage two evolves a logical combination of the spotted atoms, treated
as opaque Boolean variables, against the union patch.  Both stages rank by
the inner exponent of the loss (same ordering, no overflow), break ties by
tree size and then by rendered text, and are fully deterministic given
(data, patches, config).

Degenerate candidates never win: atoms whose canonical form is identically
true or false, and scaffolds that are propositional tautologies or
contradictions over their atoms, are parked at infinite loss.  They carry
no data signal, and the environment's non-degeneracy checks would reject
them anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import rng as _rng
from ..statements.ast import (
    And,
    Arith,
    Const,
    Equals,
    Feature,
    FEATURES,
    Implies,
    Node,
    Not,
    render,
    tree_depth,
    tree_size,
)
from ..statements.canonical import AtomicFormula, canonicalize
from ..statements.evaluate import evaluate_batch
from .config import RegressorConfig
from .loss import ZeroWeightError, prior_sum, weighted_accuracy
from ..statements.ast import operator_classes

_ARITH_OPS = ("+", "-", "*")


class EvalCache:
    """Per-dataset cache of evaluation vectors and atom metadata.

    Keyed by the canonical rendering, so structurally identical trees share
    one entry across generations, patches, and environment steps.
    """

    def __init__(self, feature_matrix: np.ndarray) -> None:
        self.fm = np.asarray(feature_matrix, dtype=np.int64)
        self._vectors: dict[str, np.ndarray] = {}
        self._meta: dict[str, tuple[int, frozenset]] = {}
        self._trivial: dict[str, bool] = {}
        self.misses = 0

    @property
    def n(self) -> int:
        return self.fm.shape[0]

    def truth_vector(self, statement: Node, key: str | None = None) -> np.ndarray:
        key = render(statement) if key is None else key
        vec = self._vectors.get(key)
        if vec is None:
            vec = evaluate_batch(statement, self.fm)
            vec.setflags(write=False)
            self._vectors[key] = vec
            self.misses += 1
        return vec

    def atom_meta(self, atom: Equals, key: str) -> tuple[int, frozenset]:
        """(tree_size, usage classes) of an equality atom."""
        meta = self._meta.get(key)
        if meta is None:
            meta = (tree_size(atom), operator_classes(atom))
            self._meta[key] = meta
        return meta

    def atom_trivially_true(self, atom: Equals, key: str) -> bool:
        """Canonical triviality, checked lazily (only for all-true atoms)."""
        flag = self._trivial.get(key)
        if flag is None:
            canon = canonicalize(atom)
            flag = canon.is_trivially_true
            self._trivial[key] = flag
        return flag


@dataclass
class RegressionResult:
    best: Node
    loss: float
    weighted_accuracy: float
    evaluations: int


def union_patch(patches) -> np.ndarray:
    """Scaffolder weights: per-datapoint maximum over the patch weights."""
    arrays = [np.asarray(p, dtype=float) for p in patches]
    if not arrays:
        raise ValueError("union_patch needs at least one patch")
    return np.maximum.reduce(arrays)


def _check_patch(lam, n: int) -> np.ndarray:
    w = np.asarray(lam, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"patch weights must have shape ({n},)")
    if float(w.sum()) == 0.0:
        raise ZeroWeightError("patch has zero total weight")
    return w


# --------------------------------------------------------------------------
# Arithmetic-tree toolbox (spotter stage)

def _random_arith(gen: np.random.Generator, cfg: RegressorConfig, depth: int) -> Node:
    if depth <= 1 or gen.random() < 0.35:
        if gen.random() < 0.8:
            return Feature(FEATURES[int(gen.integers(len(FEATURES)))])
        return Const(int(gen.integers(cfg.const_lo, cfg.const_hi + 1)))
    op = _ARITH_OPS[int(gen.integers(len(_ARITH_OPS)))]
    return Arith(op, _random_arith(gen, cfg, depth - 1), _random_arith(gen, cfg, depth - 1))


def _random_atom(gen: np.random.Generator, cfg: RegressorConfig) -> Equals:
    for _ in range(8):
        depth = int(gen.integers(1, 4))
        atom = Equals(
            _random_arith(gen, cfg, depth), _random_arith(gen, cfg, depth)
        )
        if tree_size(atom) <= cfg.max_atom_size and tree_depth(atom) <= cfg.max_atom_depth:
            return atom
    return Equals(
        Feature(FEATURES[int(gen.integers(len(FEATURES)))]),
        Const(int(gen.integers(cfg.const_lo, cfg.const_hi + 1))),
    )


def _subtrees(node: Node) -> list[Node]:
    out = [node]
    if isinstance(node, Arith):
        out.extend(_subtrees(node.left))
        out.extend(_subtrees(node.right))
    return out


def _replace(node: Node, index: int, repl: Node) -> tuple[Node, int]:
    """Replace the pre-order ``index``-th subtree; returns (tree, consumed)."""
    if index == 0:
        return repl, tree_size(node)
    if not isinstance(node, Arith):
        return node, 1
    left_size = tree_size(node.left)
    if index - 1 < left_size:
        new_left, _ = _replace(node.left, index - 1, repl)
        return Arith(node.op, new_left, node.right), 0
    new_right, _ = _replace(node.right, index - 1 - left_size, repl)
    return Arith(node.op, node.left, new_right), 0


def _atom_sides(atom: Equals) -> tuple[Node, Node]:
    return atom.left, atom.right


def _replace_in_atom(atom: Equals, index: int, repl: Node) -> Equals:
    left_size = tree_size(atom.left)
    if index < left_size:
        new_left, _ = _replace(atom.left, index, repl)
        return Equals(new_left, atom.right)
    new_right, _ = _replace(atom.right, index - left_size, repl)
    return Equals(atom.left, new_right)


def _atom_positions(atom: Equals) -> int:
    return tree_size(atom) - 1  # every node except the '=' root


def _crossover_atoms(a: Equals, b: Equals, gen, cfg) -> Equals:
    donor_pool = _subtrees(b.left) + _subtrees(b.right)
    for _ in range(4):
        donor = donor_pool[int(gen.integers(len(donor_pool)))]
        pos = int(gen.integers(_atom_positions(a)))
        child = _replace_in_atom(a, pos, donor)
        if tree_size(child) <= cfg.max_atom_size and tree_depth(child) <= cfg.max_atom_depth:
            return child
    return a


def _point_mutation(a: Equals, gen, cfg) -> Equals:
    pos = int(gen.integers(_atom_positions(a)))
    nodes = _subtrees(a.left) + _subtrees(a.right)
    target = nodes[pos]
    if isinstance(target, Arith):
        ops = [op for op in _ARITH_OPS if op != target.op]
        repl: Node = Arith(ops[int(gen.integers(len(ops)))], target.left, target.right)
    elif isinstance(target, Feature):
        repl = Feature(FEATURES[int(gen.integers(len(FEATURES)))])
    else:
        repl = Const(int(gen.integers(cfg.const_lo, cfg.const_hi + 1)))
    return _replace_in_atom(a, pos, repl)


def _subtree_mutation(a: Equals, gen, cfg) -> Equals:
    for _ in range(4):
        pos = int(gen.integers(_atom_positions(a)))
        child = _replace_in_atom(a, pos, _random_arith(gen, cfg, 2))
        if tree_size(child) <= cfg.max_atom_size and tree_depth(child) <= cfg.max_atom_depth:
            return child
    return a


def _const_perturb(a: Equals, gen, cfg) -> Equals:
    nodes = _subtrees(a.left) + _subtrees(a.right)
    const_positions = [i for i, n in enumerate(nodes) if isinstance(n, Const)]
    if not const_positions:
        return _point_mutation(a, gen, cfg)
    pos = const_positions[int(gen.integers(len(const_positions)))]
    old = nodes[pos]
    delta = 1 if gen.random() < 0.5 else -1
    value = int(np.clip(old.value + delta, cfg.const_lo, cfg.const_hi))
    return _replace_in_atom(a, pos, Const(value))


# --------------------------------------------------------------------------
# Spotter engine

def _prior_of_classes(classes: frozenset, size: int, cfg: RegressorConfig) -> float:
    total = sum(cfg.prior(key) for key in classes)
    return total + cfg.prior("length") * size


def _evolve_atoms(data_cache: EvalCache, w: np.ndarray, cfg: RegressorConfig,
                  gen: np.random.Generator, counter) -> Equals:
    total = float(w.sum())
    memo: dict[str, tuple] = {}

    def fitness(atom: Equals):
        key = render(atom)
        fit = memo.get(key)
        if fit is not None:
            return fit
        size, classes = data_cache.atom_meta(atom, key)
        vec = data_cache.truth_vector(atom, key)
        counter[0] += 1
        # Identically-true equalities (0 = 0 in canonical form) would win
        # every patch; park them.  All-true vectors are rare, so the
        # canonical check stays off the hot path.
        if bool(vec.all()) and data_cache.atom_trivially_true(atom, key):
            fit = (math.inf, size, key)
        else:
            acc = float(np.dot(w, vec)) / total
            ll = math.exp(cfg.alpha * (1.0 - acc)) - _prior_of_classes(
                classes, size, cfg
            )
            fit = (ll, size, key)
        memo[key] = fit
        return fit

    pop = [_random_atom(gen, cfg) for _ in range(cfg.population_size)]
    fits = [fitness(a) for a in pop]
    best_i = min(range(len(pop)), key=fits.__getitem__)
    best, best_fit = pop[best_i], fits[best_i]

    def tournament() -> Equals:
        idx = gen.integers(len(pop), size=cfg.tournament_size)
        winner = min(idx, key=lambda i: fits[int(i)])
        return pop[int(winner)]

    for _ in range(cfg.generations):
        nxt = [best]
        while len(nxt) < cfg.population_size:
            roll = gen.random()
            if roll < cfg.crossover_prob:
                child = _crossover_atoms(tournament(), tournament(), gen, cfg)
            elif roll < cfg.crossover_prob + cfg.mutation_prob:
                parent = tournament()
                if gen.random() < 0.5:
                    child = _point_mutation(parent, gen, cfg)
                else:
                    child = _subtree_mutation(parent, gen, cfg)
            else:
                child = _const_perturb(tournament(), gen, cfg)
            nxt.append(child)
        pop = nxt
        fits = [fitness(a) for a in pop]
        gen_best = min(range(len(pop)), key=fits.__getitem__)
        if fits[gen_best] < best_fit:
            best, best_fit = pop[gen_best], fits[gen_best]
    return best


def spot_features(data, patches, cfg: RegressorConfig,
                  cache: EvalCache | None = None) -> list[AtomicFormula]:
    """One atomic formula per patch, by seeded genetic search.

    Never fails: the best-found atom is returned even at poor accuracy.
    """
    atoms, _ = _spot_counted(data, patches, cfg, cache)
    return atoms


def _spot_counted(data, patches, cfg, cache):
    cache = _ensure_cache(data, cache)
    atoms: list[AtomicFormula] = []
    counter = [0]
    for p_idx, lam in enumerate(patches):
        w = _check_patch(lam, cache.n)
        gen = _rng.generator(cfg.seed, "spotter", p_idx)
        best = _evolve_atoms(cache, w, cfg, gen, counter)
        atoms.append(AtomicFormula(best, canonicalize(best)))
    return atoms, counter[0]


# --------------------------------------------------------------------------
# Scaffolder engine: logic over opaque atoms.

def _scaffold_random(gen, n_vars: int, depth: int):
    if depth <= 0 or gen.random() < 0.45:
        return ("var", int(gen.integers(n_vars)))
    roll = gen.random()
    if roll < 0.25:
        return ("not", _scaffold_random(gen, n_vars, depth - 1))
    op = "and" if roll < 0.55 else "imp"
    return (
        op,
        _scaffold_random(gen, n_vars, depth - 1),
        _scaffold_random(gen, n_vars, depth - 1),
    )


def _scaffold_eval(tree, vectors):
    if tree[0] == "var":
        return vectors[tree[1]]
    if tree[0] == "not":
        return ~_scaffold_eval(tree[1], vectors)
    a = _scaffold_eval(tree[1], vectors)
    b = _scaffold_eval(tree[2], vectors)
    return (a & b) if tree[0] == "and" else (~a | b)


def _scaffold_vars(tree, acc: set[int]) -> set[int]:
    if tree[0] == "var":
        acc.add(tree[1])
    elif tree[0] == "not":
        _scaffold_vars(tree[1], acc)
    else:
        _scaffold_vars(tree[1], acc)
        _scaffold_vars(tree[2], acc)
    return acc


def _scaffold_degenerate(tree) -> bool:
    """Propositional tautology or contradiction over the atom variables."""
    variables = sorted(_scaffold_vars(tree, set()))
    k = len(variables)
    if k > 10:
        return False
    column = {v: i for i, v in enumerate(variables)}
    rows = 1 << k
    table = np.zeros((rows, max(k, 1)), dtype=bool)
    for i, v in enumerate(variables):
        period = 1 << i
        table[:, i] = (np.arange(rows) // period) % 2 == 1
    vectors = {v: table[:, column[v]] for v in variables}
    truth = _scaffold_eval(tree, vectors)
    return bool(truth.all() or not truth.any())


def _substitute(tree, atoms: list[AtomicFormula]) -> Node:
    if tree[0] == "var":
        return atoms[tree[1]].node
    if tree[0] == "not":
        return Not(_substitute(tree[1], atoms))
    left = _substitute(tree[1], atoms)
    right = _substitute(tree[2], atoms)
    return And(left, right) if tree[0] == "and" else Implies(left, right)


def _scaffold_render(tree, atom_strs) -> str:
    if tree[0] == "var":
        return atom_strs[tree[1]]
    if tree[0] == "not":
        return f"(¬ {_scaffold_render(tree[1], atom_strs)})"
    op = "∧" if tree[0] == "and" else "⟹"
    return (
        f"({op} {_scaffold_render(tree[1], atom_strs)}"
        f" {_scaffold_render(tree[2], atom_strs)})"
    )


def _scaffold_metrics(tree, atom_sizes, atom_depths):
    """(total size, total depth, connective count) of the substituted tree."""
    if tree[0] == "var":
        return atom_sizes[tree[1]], atom_depths[tree[1]], 0
    if tree[0] == "not":
        s, d, c = _scaffold_metrics(tree[1], atom_sizes, atom_depths)
        return s + 1, d + 1, c + 1
    s1, d1, c1 = _scaffold_metrics(tree[1], atom_sizes, atom_depths)
    s2, d2, c2 = _scaffold_metrics(tree[2], atom_sizes, atom_depths)
    return s1 + s2 + 1, max(d1, d2) + 1, c1 + c2 + 1


_SCAFFOLD_OP_CLASS = {"and": "op:and", "imp": "op:implies", "not": "op:not"}


def _scaffold_classes(tree, atom_classes) -> frozenset[str]:
    out: set[str] = set()

    def walk(t, parent_not: bool) -> None:
        if t[0] == "var":
            out.update(atom_classes[t[1]])
            return
        out.add(_SCAFFOLD_OP_CLASS[t[0]])
        if t[0] == "not":
            if parent_not:
                out.add("nested_not")
            walk(t[1], True)
        else:
            walk(t[1], False)
            walk(t[2], False)

    walk(tree, False)
    return frozenset(out)


def scaffold(atoms: list[AtomicFormula], data, union_lam,
             cfg: RegressorConfig, cache: EvalCache | None = None) -> Node:
    """Best Boolean combination of the atoms on the union patch."""
    statement, _ = _scaffold_search(atoms, data, union_lam, cfg, cache)
    return statement


def _scaffold_search(atoms, data, union_lam, cfg, cache):
    if not atoms:
        raise ValueError("scaffold needs at least one atomic formula")
    cache = _ensure_cache(data, cache)
    w = _check_patch(union_lam, cache.n)
    total = float(w.sum())
    # Spotted atoms may coincide (identical patches); collapse canonical
    # duplicates so the search sees each distinct atom as one variable.
    unique: list[AtomicFormula] = []
    seen_keys: set[tuple] = set()
    for atom in atoms:
        key = atom.canonical.key()
        if key not in seen_keys:
            seen_keys.add(key)
            unique.append(atom)
    atoms = unique
    n_vars = len(atoms)

    atom_strs = [render(a.node) for a in atoms]
    vectors = [cache.truth_vector(a.node, s) for a, s in zip(atoms, atom_strs)]
    atom_sizes = [tree_size(a.node) for a in atoms]
    atom_depths = [tree_depth(a.node) for a in atoms]
    atom_classes = [operator_classes(a.node) for a in atoms]
    atom_trivial = [
        a.canonical.is_trivially_true or a.canonical.is_trivially_false
        for a in atoms
    ]

    gen = _rng.generator(cfg.seed, "scaffold")
    counter = [0]
    fitness_memo: dict = {}

    def fitness(tree):
        memo = fitness_memo.get(tree)
        if memo is not None:
            return memo
        size, depth, conn = _scaffold_metrics(tree, atom_sizes, atom_depths)
        key = _scaffold_render(tree, atom_strs)
        if (
            size > cfg.max_size
            or depth > cfg.max_depth
            or _scaffold_degenerate(tree)
            or any(atom_trivial[v] for v in _scaffold_vars(tree, set()))
        ):
            out = (math.inf, size, key)
        else:
            truth = _scaffold_eval(tree, vectors)
            counter[0] += 1
            acc = float(np.dot(w, truth)) / total
            priors = sum(
                cfg.prior(k)
                for k in _scaffold_classes(tree, atom_classes)
                if k != "nested_not"
            )
            if "nested_not" in _scaffold_classes(tree, atom_classes):
                priors += cfg.prior("nested_not")
            priors += cfg.prior("length") * size
            out = (math.exp(cfg.alpha * (1.0 - acc)) - priors, size, key)
        fitness_memo[tree] = out
        return out

    pop = [("var", i) for i in range(n_vars)]
    while len(pop) < cfg.scaffold_population:
        pop.append(_scaffold_random(gen, n_vars, cfg.scaffold_depth))
    fits = [fitness(t) for t in pop]
    best_i = min(range(len(pop)), key=fits.__getitem__)
    best, best_fit = pop[best_i], fits[best_i]

    def tournament():
        idx = gen.integers(len(pop), size=cfg.tournament_size)
        return pop[int(min(idx, key=lambda i: fits[int(i)]))]

    def mutate(tree):
        # Replace a random subtree with a fresh random one.
        positions = _scaffold_positions(tree)
        pos = int(gen.integers(positions))
        repl = _scaffold_random(gen, n_vars, max(cfg.scaffold_depth - 1, 0))
        return _scaffold_replace(tree, pos, repl)[0]

    def crossover(a, b):
        positions_b = _scaffold_collect(b)
        donor = positions_b[int(gen.integers(len(positions_b)))]
        pos = int(gen.integers(_scaffold_positions(a)))
        return _scaffold_replace(a, pos, donor)[0]

    for _ in range(cfg.scaffold_generations):
        nxt = [best]
        while len(nxt) < cfg.scaffold_population:
            if gen.random() < cfg.crossover_prob:
                child = crossover(tournament(), tournament())
            else:
                child = mutate(tournament())
            nxt.append(child)
        pop = nxt
        fits = [fitness(t) for t in pop]
        gen_best = min(range(len(pop)), key=fits.__getitem__)
        if fits[gen_best] < best_fit:
            best, best_fit = pop[gen_best], fits[gen_best]

    statement = _substitute(best, atoms)
    return statement, counter[0]


def _scaffold_positions(tree) -> int:
    if tree[0] == "var":
        return 1
    if tree[0] == "not":
        return 1 + _scaffold_positions(tree[1])
    return 1 + _scaffold_positions(tree[1]) + _scaffold_positions(tree[2])


def _scaffold_collect(tree) -> list:
    out = [tree]
    if tree[0] == "not":
        out.extend(_scaffold_collect(tree[1]))
    elif tree[0] != "var":
        out.extend(_scaffold_collect(tree[1]))
        out.extend(_scaffold_collect(tree[2]))
    return out


def _scaffold_replace(tree, index: int, repl):
    if index == 0:
        return repl, _scaffold_positions(tree)
    if tree[0] == "var":
        return tree, 1
    if tree[0] == "not":
        child, _ = _scaffold_replace(tree[1], index - 1, repl)
        return ("not", child), 0
    left_n = _scaffold_positions(tree[1])
    if index - 1 < left_n:
        child, _ = _scaffold_replace(tree[1], index - 1, repl)
        return (tree[0], child, tree[2]), 0
    child, _ = _scaffold_replace(tree[2], index - 1 - left_n, repl)
    return (tree[0], tree[1], child), 0


# --------------------------------------------------------------------------

def _ensure_cache(data, cache: EvalCache | None) -> EvalCache:
    if cache is not None:
        return cache
    from ..surfaces.datapoints import feature_matrix

    fm = data if isinstance(data, np.ndarray) else feature_matrix(data)
    return EvalCache(fm)


def run_conjecturer(data, patches, cfg: RegressorConfig,
                    cache: EvalCache | None = None):
    """Spotters then scaffolder; returns (statement, result on the union)."""
    cache = _ensure_cache(data, cache)
    atoms, spot_evals = _spot_counted(data, patches, cfg, cache)
    union = union_patch(patches)
    statement, scaffold_evals = _scaffold_search(atoms, data, union, cfg, cache)
    acc = weighted_accuracy(statement, cache.fm, union)
    full_loss = math.exp(
        math.exp(cfg.alpha * (1.0 - acc)) - prior_sum(statement, cfg)
    )
    result = RegressionResult(
        best=statement,
        loss=full_loss,
        weighted_accuracy=acc,
        evaluations=spot_evals + scaffold_evals,
    )
    return statement, result
