"""Muller automata over powerset alphabets with symbolic propositional guards.

A letter of the alphabet is a subset of the automaton's action signature.
Transitions carry propositional guards over the actions; a transition exists
for every letter satisfying the guard.  All semantic work (products, reducts,
homomorphism checks, acceptance, emptiness) happens on the guard semantics --
bitmasks indexed by letters -- never on guard syntax.

Final-state families come in several closed forms; each can test membership
of a candidate infinity set and can unfold itself into a disjunction of
"hit these state sets / stay within this state set" constraints, which is
what acceptance and emptiness search on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .sigcat import ActionSignature, SignatureMorphism, ordered_actions

# ---------------------------------------------------------------------------
# Guards


@dataclass(frozen=True)
class Guard:
    pass


@dataclass(frozen=True)
class GAtom(Guard):
    action: str


@dataclass(frozen=True)
class GNot(Guard):
    sub: Guard


@dataclass(frozen=True)
class GAnd(Guard):
    subs: tuple[Guard, ...]


@dataclass(frozen=True)
class GOr(Guard):
    subs: tuple[Guard, ...]


G_TRUE = GAnd(())
G_FALSE = GOr(())


def g_atom(action: str) -> Guard:
    return GAtom(action)


def g_not(g: Guard) -> Guard:
    if isinstance(g, GNot):
        return g.sub
    if g == G_TRUE:
        return G_FALSE
    if g == G_FALSE:
        return G_TRUE
    return GNot(g)


def _flatten(cls, parts):
    out = []
    for p in parts:
        if isinstance(p, cls):
            out.extend(p.subs)
        else:
            out.append(p)
    # canonical operand order makes structurally equal guards out of
    # semantically identical constructions
    return tuple(sorted(set(out), key=repr))


def g_and(*parts: Guard) -> Guard:
    subs = _flatten(GAnd, parts)
    if G_FALSE in subs:
        return G_FALSE
    subs = tuple(p for p in subs if p != G_TRUE)
    if len(subs) == 1:
        return subs[0]
    return GAnd(subs)


def g_or(*parts: Guard) -> Guard:
    subs = _flatten(GOr, parts)
    if G_TRUE in subs:
        return G_TRUE
    subs = tuple(p for p in subs if p != G_FALSE)
    if len(subs) == 1:
        return subs[0]
    return GOr(subs)


def guard_atoms(g: Guard) -> frozenset[str]:
    if isinstance(g, GAtom):
        return frozenset({g.action})
    if isinstance(g, GNot):
        return guard_atoms(g.sub)
    if isinstance(g, (GAnd, GOr)):
        out = frozenset()
        for s in g.subs:
            out |= guard_atoms(s)
        return out
    raise TypeError(g)


def rename_guard(g: Guard, mapping: dict[str, str]) -> Guard:
    if isinstance(g, GAtom):
        return GAtom(mapping.get(g.action, g.action))
    if isinstance(g, GNot):
        return GNot(rename_guard(g.sub, mapping))
    if isinstance(g, GAnd):
        return GAnd(tuple(rename_guard(s, mapping) for s in g.subs))
    if isinstance(g, GOr):
        return GOr(tuple(rename_guard(s, mapping) for s in g.subs))
    raise TypeError(g)


# Letters of a signature with n actions are indexed 0 .. 2^n - 1; bit i of a
# letter index says whether action number i (in ordered_actions order) is in
# the letter.  A guard's semantics is the bitmask over all letter indices.


@lru_cache(maxsize=None)
def _atom_column(n_actions: int, i: int) -> int:
    """Bitmask over 2^n letter indices whose i-th action bit is set."""
    block = ((1 << (1 << i)) - 1) << (1 << i)  # 2^i zeros then 2^i ones
    width = 1 << (i + 1)
    mask = 0
    for start in range(0, 1 << n_actions, width):
        mask |= block << start
    return mask


def full_mask(sig: ActionSignature) -> int:
    return (1 << (1 << len(sig.actions))) - 1


def guard_mask(g: Guard, sig: ActionSignature) -> int:
    """Semantics of a guard: one bit per letter of the signature."""
    actions = ordered_actions(sig)
    index = {a: i for i, a in enumerate(actions)}
    full = full_mask(sig)

    def go(h: Guard) -> int:
        if isinstance(h, GAtom):
            if h.action not in index:
                raise ValueError(f"guard atom {h.action!r} outside signature")
            return _atom_column(len(actions), index[h.action])
        if isinstance(h, GNot):
            return full ^ go(h.sub)
        if isinstance(h, GAnd):
            m = full
            for s in h.subs:
                m &= go(s)
            return m
        if isinstance(h, GOr):
            m = 0
            for s in h.subs:
                m |= go(s)
            return m
        raise TypeError(h)

    return go(g)


def letter_index(letter: frozenset[str], sig: ActionSignature) -> int:
    actions = ordered_actions(sig)
    idx = 0
    for i, a in enumerate(actions):
        if a in letter:
            idx |= 1 << i
    extra = letter - sig.actions
    if extra:
        raise ValueError(f"letter uses actions outside signature: {sorted(extra)}")
    return idx


def letter_at(index: int, sig: ActionSignature) -> frozenset[str]:
    actions = ordered_actions(sig)
    return frozenset(a for i, a in enumerate(actions) if index & (1 << i))


def guards_equivalent(g1: Guard, g2: Guard, sig: ActionSignature) -> bool:
    return guard_mask(g1, sig) == guard_mask(g2, sig)


def mask_to_guard(mask: int, sig: ActionSignature) -> Guard:
    """Synthesize a guard with the given semantics (cube-merged DNF)."""
    full = full_mask(sig)
    if mask == 0:
        return G_FALSE
    if mask == full:
        return G_TRUE
    n = len(sig.actions)
    actions = ordered_actions(sig)
    # cubes as (care_bits, value_bits); start from minterms and merge
    cubes = {((1 << n) - 1, idx) for idx in range(1 << n) if mask & (1 << idx)}
    changed = True
    while changed:
        changed = False
        merged = set()
        used = set()
        cube_list = sorted(cubes)
        for i, (c1, v1) in enumerate(cube_list):
            for c2, v2 in cube_list[i + 1 :]:
                if c1 == c2 and bin(v1 ^ v2).count("1") == 1:
                    bit = v1 ^ v2
                    merged.add((c1 & ~bit, v1 & ~bit))
                    used.add((c1, v1))
                    used.add((c2, v2))
        if merged - cubes:
            cubes = (cubes - used) | merged
            changed = True
    terms = []
    for care, value in sorted(cubes):
        lits = []
        for i in range(n):
            if care & (1 << i):
                atom = GAtom(actions[i])
                lits.append(atom if value & (1 << i) else GNot(atom))
        terms.append(g_and(*lits))
    return g_or(*terms)


# ---------------------------------------------------------------------------
# Final-state families

# A "requirement disjunct" is a pair (hits, withins): the candidate infinity
# set must intersect every set in `hits` and stay inside every set in
# `withins`.  A family unfolds into a disjunction of such constraints that is
# exactly equivalent to membership for live, non-empty candidate sets.


@dataclass(frozen=True)
class FinalFamily:
    def contains(self, s: frozenset) -> bool:
        raise NotImplementedError

    def dnf(self, states: frozenset):
        raise NotImplementedError


@dataclass(frozen=True)
class Explicit(FinalFamily):
    """An explicit list of final-state sets; members must be non-empty."""

    sets: frozenset[frozenset]

    def __post_init__(self):
        object.__setattr__(self, "sets", frozenset(frozenset(s) for s in self.sets))
        if any(not s for s in self.sets):
            raise ValueError("final-state sets must be non-empty")

    def contains(self, s):
        return frozenset(s) in self.sets

    def dnf(self, states):
        out = []
        for member in sorted(self.sets, key=_set_key):
            if member <= states:
                out.append((tuple(frozenset({q}) for q in sorted(member, key=_key)), (member,)))
        return out


@dataclass(frozen=True)
class AllNonempty(FinalFamily):
    """Every non-empty state set is final."""

    def contains(self, s):
        return bool(s)

    def dnf(self, states):
        return [((), ())]


@dataclass(frozen=True)
class ImpliesFamily(FinalFamily):
    """Non-empty sets that contain `required` whenever they contain `trigger`."""

    trigger: object
    required: object

    def contains(self, s):
        return bool(s) and (self.trigger not in s or self.required in s)

    def dnf(self, states):
        avoid = frozenset(q for q in states if q != self.trigger)
        hit = frozenset({self.required}) & states
        return [((), (avoid,)), ((hit,), ())]


@dataclass(frozen=True)
class GenBuchi(FinalFamily):
    """Non-empty sets intersecting every one of the listed state sets."""

    sets: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))

    def contains(self, s):
        return bool(s) and all(s & f for f in self.sets)

    def dnf(self, states):
        return [(tuple(f & states for f in self.sets), ())]


@dataclass(frozen=True)
class ProductFamily(FinalFamily):
    """Sets whose projection to every component belongs to that component's family.

    Components are addressed by position in tuple-shaped states.
    """

    parts: tuple[tuple[int, FinalFamily], ...]

    def contains(self, s):
        if not s:
            return False
        return all(fam.contains(frozenset(q[i] for q in s)) for i, fam in self.parts)

    def dnf(self, states):
        disjuncts = [((), ())]
        for i, fam in self.parts:
            comp_states = frozenset(q[i] for q in states)
            lifted = []
            for hits, withins in fam.dnf(comp_states):
                lh = tuple(frozenset(q for q in states if q[i] in t) for t in hits)
                lw = tuple(frozenset(q for q in states if q[i] in t) for t in withins)
                lifted.append((lh, lw))
            disjuncts = [
                (h1 + h2, w1 + w2)
                for h1, w1 in disjuncts
                for h2, w2 in lifted
            ]
        return disjuncts


def _key(x):
    return repr(x)


def _set_key(s):
    return tuple(sorted(map(_key, s)))


def explicit_members(family: FinalFamily, states: frozenset) -> frozenset[frozenset]:
    """Enumerate the family over subsets of `states` (cross-check conversion)."""
    if len(states) > 16:
        raise ValueError("explicit enumeration limited to small state sets")
    members = []
    items = sorted(states, key=_key)
    for r in range(1, len(items) + 1):
        for combo in itertools.combinations(items, r):
            s = frozenset(combo)
            if family.contains(s):
                members.append(s)
    return frozenset(members)


# ---------------------------------------------------------------------------
# Automata and lasso traces


@dataclass(frozen=True)
class MullerAutomaton:
    signature: ActionSignature
    states: frozenset
    transitions: tuple[tuple[object, Guard, object], ...]
    initial: frozenset
    final: FinalFamily

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if not self.initial <= self.states:
            raise ValueError("initial states must be states")
        for src, g, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError(f"transition endpoint outside states: {src!r} -> {dst!r}")
            stray = guard_atoms(g) - self.signature.actions
            if stray:
                raise ValueError(f"guard atoms outside signature: {sorted(stray)}")

    def edge_masks(self) -> dict[tuple[object, object], int]:
        """Satisfiable semantic edges: (src, dst) -> letter bitmask (merged, non-zero)."""
        try:
            return object.__getattribute__(self, "_edge_masks")
        except AttributeError:
            pass
        masks: dict[tuple[object, object], int] = {}
        for src, g, dst in self.transitions:
            m = guard_mask(g, self.signature)
            if m:
                key = (src, dst)
                masks[key] = masks.get(key, 0) | m
        object.__setattr__(self, "_edge_masks", masks)
        return masks


@dataclass(frozen=True)
class LassoTrace:
    """An ultimately periodic trace: ``prefix . cycle^omega``."""

    signature: ActionSignature
    prefix: tuple[frozenset[str], ...]
    cycle: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(frozenset(l) for l in self.prefix))
        object.__setattr__(self, "cycle", tuple(frozenset(l) for l in self.cycle))
        if not self.cycle:
            raise ValueError("lasso cycle must be non-empty")
        for letter in self.prefix + self.cycle:
            stray = letter - self.signature.actions
            if stray:
                raise ValueError(f"letter outside signature: {sorted(stray)}")

    def __len__(self) -> int:
        """Number of distinct positions (prefix plus one cycle)."""
        return len(self.prefix) + len(self.cycle)

    def letter(self, pos: int) -> frozenset[str]:
        if pos < len(self.prefix):
            return self.prefix[pos]
        return self.cycle[(pos - len(self.prefix)) % len(self.cycle)]

    def next_pos(self, pos: int) -> int:
        """Successor among the canonical positions 0 .. len(self)-1."""
        if pos + 1 < len(self):
            return pos + 1
        return len(self.prefix)

    def rename(self, sigma: SignatureMorphism) -> "LassoTrace":
        """Image trace under a signature morphism (letters mapped forward)."""
        if sigma.source != self.signature:
            raise ValueError("signature mismatch")
        m = sigma.mapping
        return LassoTrace(
            sigma.target,
            tuple(frozenset(m[a] for a in l) for l in self.prefix),
            tuple(frozenset(m[a] for a in l) for l in self.cycle),
        )


# ---------------------------------------------------------------------------
# Shared liveness search
#
# Both acceptance and emptiness reduce to: does some reachable node set D,
# strongly connected and carrying a closed walk through all its nodes, satisfy
# the final family on its state projection?  The family is unfolded into
# hit/within disjuncts; for each disjunct the graph is restricted to the
# within-sets and the maximal SCCs of the restriction are tested against the
# hit-sets.  Maximal SCCs suffice: hits are monotone under supersets and every
# live candidate lies inside a maximal SCC of the restriction.


def _sccs(nodes, succ):
    """Tarjan's algorithm, iterative; returns list of node lists."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    sccs = []
    counter = itertools.count()
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = next(counter)
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(succ(nxt))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(comp)
    return sccs


def _reachable(roots, succ):
    seen = set(roots)
    frontier = list(roots)
    while frontier:
        node = frontier.pop()
        for nxt in succ(node):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def _find_live_set(roots, succ, disjuncts, project):
    """A reachable live node set whose projection meets some disjunct, or None."""
    reach = _reachable(roots, succ)
    if not reach:
        return None

    def succ_in(region):
        def f(n):
            return [m for m in succ(n) if m in region]
        return f

    for comp in _sccs(sorted(reach, key=_key), succ_in(reach)):
        comp_set = set(comp)
        has_edge = any(m in comp_set for n in comp for m in succ(n))
        if not has_edge:
            continue
        for hits, withins in disjuncts:
            region = comp_set
            for w in withins:
                region = {n for n in region if project(n) in w}
            if not region:
                continue
            for sub in _sccs(sorted(region, key=_key), succ_in(region)):
                sub_set = set(sub)
                if len(sub_set) == 1:
                    node = next(iter(sub_set))
                    if node not in succ_in(sub_set)(node):
                        continue
                if all(any(project(n) in t for n in sub_set) for t in hits):
                    return frozenset(sub_set)
    return None


def _closed_walk(region, succ):
    """A closed walk (>= 1 edge) visiting every node of a strongly connected region."""
    region = set(region)
    start = min(region, key=_key)

    def shortest(src, targets):
        # shortest path of at least one edge from src to any target node;
        # prev value None marks direct successors of src
        prev = {}
        queue = []
        for nxt in succ(src):
            if nxt in region and nxt not in prev:
                prev[nxt] = None
                queue.append(nxt)
        while queue:
            node = queue.pop(0)
            if node in targets:
                path = [node]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                path.append(src)
                return list(reversed(path))
            for nxt in succ(node):
                if nxt in region and nxt not in prev:
                    prev[nxt] = node
                    queue.append(nxt)
        raise AssertionError("region not strongly connected")

    walk = [start]
    unvisited = region - {start}
    while unvisited:
        path = shortest(walk[-1], unvisited)
        walk.extend(path[1:])
        unvisited -= set(path)
    if walk[-1] != start or len(walk) == 1:
        walk.extend(shortest(walk[-1], {start})[1:])
    return walk


def _path_to(roots, succ, targets):
    prev = {}
    queue = []
    for r in roots:
        prev[r] = None
        queue.append(r)
    while queue:
        node = queue.pop(0)
        if node in targets:
            path = []
            while node is not None:
                path.append(node)
                node = prev[node]
            return list(reversed(path))
        for nxt in succ(node):
            if nxt not in prev:
                prev[nxt] = node
                queue.append(nxt)
    return None


# ---------------------------------------------------------------------------
# Operations


def accepts(a: MullerAutomaton, t: LassoTrace) -> bool:
    """Does the automaton accept the ultimately periodic trace?"""
    if t.signature != a.signature:
        raise ValueError("trace signature differs from automaton signature")
    letters = [letter_index(t.letter(i), a.signature) for i in range(len(t))]
    masks = a.edge_masks()
    out_edges: dict[object, list[tuple[object, int]]] = {}
    for (src, dst), m in masks.items():
        out_edges.setdefault(src, []).append((dst, m))

    def succ(node):
        state, pos = node
        bit = 1 << letters[pos]
        nxt = t.next_pos(pos)
        return [(dst, nxt) for dst, m in out_edges.get(state, ()) if m & bit]

    roots = [(q, 0) for q in sorted(a.initial, key=_key)]
    disjuncts = a.final.dnf(a.states)
    return _find_live_set(roots, succ, disjuncts, lambda n: n[0]) is not None


def is_empty(a: MullerAutomaton) -> bool:
    """True iff the automaton accepts no trace."""
    return find_accepted_lasso(a) is None


def find_accepted_lasso(a: MullerAutomaton) -> LassoTrace | None:
    """Some accepted lasso, or None if the language is empty.

    Looks for a reachable live state set (over satisfiable-guard edges) whose
    membership in the final family is witnessed through the hit/within
    unfolding, then reads letters off a covering closed walk.
    """
    masks = a.edge_masks()
    out_edges: dict[object, list[object]] = {}
    for src, dst in masks:
        out_edges.setdefault(src, []).append(dst)

    def succ(state):
        return out_edges.get(state, ())

    roots = sorted(a.initial, key=_key)
    if not roots:
        return None
    live = _find_live_set(roots, succ, a.final.dnf(a.states), lambda n: n)
    if live is None:
        return None

    def pick_letter(src, dst):
        m = masks[(src, dst)]
        low = (m & -m).bit_length() - 1
        return letter_at(low, a.signature)

    path = _path_to(roots, succ, live)
    walk = _closed_walk(live, lambda n: [m for m in succ(n) if m in live])
    entry = path[-1]
    # rotate walk to start at the entry node
    k = walk.index(entry)
    cycle_nodes = walk[k:-1] + walk[:k] + [entry]
    prefix = tuple(pick_letter(path[i], path[i + 1]) for i in range(len(path) - 1))
    cycle = tuple(
        pick_letter(cycle_nodes[i], cycle_nodes[i + 1]) for i in range(len(cycle_nodes) - 1)
    )
    return LassoTrace(a.signature, prefix, cycle)


def reduct(a: MullerAutomaton, sigma: SignatureMorphism) -> MullerAutomaton:
    """Alphabet reduct along ``sigma: A -> A'`` of an automaton over A'.

    A letter over A enables a reduct transition iff it is the sigma-preimage
    of some letter over A' enabling the original transition.
    """
    if a.signature != sigma.target:
        raise ValueError("automaton signature must be the morphism target")
    src_sig = sigma.source
    src_actions = ordered_actions(src_sig)
    tgt_pos = {x: j for j, x in enumerate(ordered_actions(sigma.target))}
    bit_of = [(1 << i, 1 << tgt_pos[sigma(x)]) for i, x in enumerate(src_actions)]
    # preimage of each target letter, as a source letter index
    pre = []
    for idx in range(1 << len(tgt_pos)):
        letter = 0
        for src_bit, tgt_bit in bit_of:
            if idx & tgt_bit:
                letter |= src_bit
        pre.append(letter)
    transitions = []
    for (src, dst), m in sorted(a.edge_masks().items(), key=_key):
        proj = 0
        mm = m
        while mm:
            low = mm & -mm
            proj |= 1 << pre[low.bit_length() - 1]
            mm ^= low
        transitions.append((src, mask_to_guard(proj, src_sig), dst))
    return MullerAutomaton(src_sig, a.states, tuple(transitions), a.initial, a.final)


def cofree_expansion(a: MullerAutomaton, sigma: SignatureMorphism) -> MullerAutomaton:
    """Right adjoint to the reduct: re-express an automaton over the larger signature.

    A letter over A' enables an expanded transition iff its sigma-preimage
    enables the original one; syntactically this is atom substitution.
    """
    if a.signature != sigma.source:
        raise ValueError("automaton signature must be the morphism source")
    mapping = sigma.mapping
    transitions = tuple(
        (src, rename_guard(g, mapping), dst) for src, g, dst in a.transitions
    )
    return MullerAutomaton(sigma.target, a.states, transitions, a.initial, a.final)


def product(automata, signature: ActionSignature | None = None) -> MullerAutomaton:
    """Product over a common signature; accepts the intersection of the languages.

    The empty product is the one-state automaton with a true self-loop that
    accepts every trace (over the given signature, empty by default).
    """
    automata = list(automata)
    if not automata:
        sig = signature if signature is not None else ActionSignature(frozenset())
        q = "*"
        return MullerAutomaton(sig, frozenset({q}), ((q, G_TRUE, q),), frozenset({q}), AllNonempty())
    sig = automata[0].signature
    for a in automata[1:]:
        if a.signature != sig:
            raise ValueError("product factors must share a signature")
    states = frozenset(itertools.product(*[sorted(a.states, key=_key) for a in automata]))
    initial = frozenset(itertools.product(*[sorted(a.initial, key=_key) for a in automata]))
    annotated = [
        [(src, g, dst, guard_mask(g, sig)) for src, g, dst in a.transitions]
        for a in automata
    ]
    transitions = []
    for combo in itertools.product(*annotated):
        m = full_mask(sig)
        for _, _, _, em in combo:
            m &= em
            if not m:
                break
        if not m:
            continue
        src = tuple(e[0] for e in combo)
        dst = tuple(e[2] for e in combo)
        transitions.append((src, g_and(*(e[1] for e in combo)), dst))
    final = ProductFamily(tuple((i, a.final) for i, a in enumerate(automata)))
    return MullerAutomaton(sig, states, tuple(transitions), initial, final)


def check_homomorphism(h: dict, a1: MullerAutomaton, a2: MullerAutomaton) -> bool:
    """Is the state map a homomorphism a1 -> a2 over the common signature?

    Transitions are compared semantically: every letter enabling a source
    transition must enable some target transition between the image states.
    Final families are compared by enumerating subsets of a1's states.
    """
    if a1.signature != a2.signature:
        raise ValueError("homomorphism requires a common signature")
    if set(h) != set(a1.states):
        raise ValueError("state map must be total on the source states")
    if any(v not in a2.states for v in h.values()):
        return False
    if not frozenset(h[q] for q in a1.initial) <= a2.initial:
        return False
    m2 = a2.edge_masks()
    for (src, dst), m in a1.edge_masks().items():
        if m & ~m2.get((h[src], h[dst]), 0):
            return False
    for s in explicit_members(a1.final, a1.states):
        if not a2.final.contains(frozenset(h[q] for q in s)):
            return False
    return True


def automaton_isomorphism(a1: MullerAutomaton, a2: MullerAutomaton):
    """A state bijection that is a semantic isomorphism, or None.

    Backtracking over bijections, pruned by initial-state membership and
    edge-mask profiles; guards and families are compared semantically.
    """
    if a1.signature != a2.signature or len(a1.states) != len(a2.states):
        return None
    if len(a1.initial) != len(a2.initial):
        return None
    m1, m2 = a1.edge_masks(), a2.edge_masks()

    def profile(a, masks, q):
        outs = sorted(m for (s, _), m in masks.items() if s == q)
        ins = sorted(m for (_, d), m in masks.items() if d == q)
        return (q in a.initial, outs, ins)

    p1 = {q: profile(a1, m1, q) for q in a1.states}
    p2 = {q: profile(a2, m2, q) for q in a2.states}
    order = sorted(a1.states, key=_key)

    def compatible(assign):
        for (s, d), m in m1.items():
            if s in assign and d in assign:
                if m != m2.get((assign[s], assign[d]), 0):
                    return False
        return True

    def extend(i, assign, used):
        if i == len(order):
            image_edges = {(assign[s], assign[d]) for (s, d) in m1}
            if set(m2) != image_edges:
                return None
            back = {v: k for k, v in assign.items()}
            for s in explicit_members(a1.final, a1.states):
                if not a2.final.contains(frozenset(assign[q] for q in s)):
                    return None
            for s in explicit_members(a2.final, a2.states):
                if not a1.final.contains(frozenset(back[q] for q in s)):
                    return None
            return dict(assign)
        q = order[i]
        for cand in sorted(a2.states - used, key=_key):
            if p1[q] != p2[cand]:
                continue
            assign[q] = cand
            if compatible(assign):
                res = extend(i + 1, assign, used | {cand})
                if res is not None:
                    return res
            del assign[q]
        return None

    return extend(0, {}, frozenset())
