"""Marked metric graphs: points of (projectivized) Outer space.

A marked graph is a finite metric graph with a spanning tree and, on
each non-tree edge, a word labeling it in the free group.  The labels
must form a free basis; translation lengths of arbitrary words go
through the certified inverse of that basis map.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .automorphisms import (
    Automorphism,
    Endomorphism,
    NotABasis,
    apply_endo,
    certify_basis,
    random_automorphism,
)
from .words import InputError, Word, letters_to_text, parse_word, word

# An oriented edge is (edge index, +1) for src->dst or (edge index, -1).
OrientedEdge = Tuple[int, int]


@dataclass(frozen=True)
class Edge:
    eid: str
    src: str
    dst: str
    length: Fraction

    def __post_init__(self):
        if not isinstance(self.length, Fraction) or self.length <= 0:
            raise InputError(
                f"edge {self.eid}: length must be a positive Fraction"
            )


@dataclass(frozen=True)
class MarkedGraph:
    rank: int
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    tree: frozenset  # edge ids
    labels: Tuple[Tuple[str, Word], ...]  # (non-tree edge id, word), sorted

    def __post_init__(self):
        self._validate()

    # -- validation -------------------------------------------------------

    def _validate(self) -> None:
        if self.rank < 2:
            raise InputError("rank must be >= 2")
        if not self.vertices:
            raise InputError("graph needs at least one vertex")
        ids = [e.eid for e in self.edges]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate edge ids")
        vset = set(self.vertices)
        for e in self.edges:
            if e.src not in vset or e.dst not in vset:
                raise InputError(f"edge {e.eid}: unknown endpoint")
        if not self.tree <= set(ids):
            raise InputError("tree contains unknown edge ids")
        # spanning tree: |V|-1 edges, connects everything
        if len(self.tree) != len(self.vertices) - 1:
            raise InputError("tree is not a spanning tree (wrong size)")
        reach = {self.vertices[0]}
        frontier = [self.vertices[0]]
        tree_edges = [e for e in self.edges if e.eid in self.tree]
        while frontier:
            v = frontier.pop()
            for e in tree_edges:
                for a, b in ((e.src, e.dst), (e.dst, e.src)):
                    if a == v and b not in reach:
                        reach.add(b)
                        frontier.append(b)
        if reach != vset:
            raise InputError("tree does not span the graph")
        degree = {v: 0 for v in self.vertices}
        for e in self.edges:
            degree[e.src] += 1
            degree[e.dst] += 1
        if len(self.vertices) > 1 and any(d < 3 for d in degree.values()):
            raise InputError("degree-2 (or lower) vertices are not allowed")
        nontree = [e for e in self.edges if e.eid not in self.tree]
        if len(nontree) != self.rank:
            raise InputError(
                f"need {self.rank} non-tree edges, got {len(nontree)}"
            )
        label_ids = [eid for eid, _ in self.labels]
        if sorted(label_ids) != sorted(e.eid for e in nontree):
            raise InputError("labels must cover exactly the non-tree edges")
        if list(self.labels) != sorted(self.labels, key=lambda kv: kv[0]):
            raise InputError("labels must be sorted by edge id")
        for _, g in self.labels:
            if g.rank != self.rank:
                raise InputError("label rank mismatch")
        basis = certify_basis(
            Endomorphism(self.rank, tuple(g for _, g in self.labels))
        )
        if isinstance(basis, NotABasis):
            raise InputError("labels do not form a free basis")

    # -- derived structure (cached per instance) --------------------------

    @property
    def _marking(self) -> "_Marking":
        cached = _MARKING_CACHE.get(id(self))
        if cached is None or cached[0] is not self:
            cached = (self, _build_marking(self))
            _MARKING_CACHE[id(self)] = cached
        return cached[1]

    def volume(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    def edge_by_id(self, eid: str) -> Edge:
        for e in self.edges:
            if e.eid == eid:
                return e
        raise InputError(f"no edge {eid!r}")

    def with_lengths(self, lengths: Dict[str, Fraction]) -> "MarkedGraph":
        edges = tuple(
            Edge(e.eid, e.src, e.dst, lengths.get(e.eid, e.length))
            for e in self.edges
        )
        return MarkedGraph(self.rank, self.vertices, edges, self.tree, self.labels)


_MARKING_CACHE: dict = {}


@dataclass(frozen=True)
class _Marking:
    basis: Automorphism  # forward: x_i -> g_{f_i}
    loops: Tuple[Tuple[OrientedEdge, ...], ...]  # loop for each basis letter


def _build_marking(T: MarkedGraph) -> _Marking:
    basis = certify_basis(
        Endomorphism(T.rank, tuple(g for _, g in T.labels))
    )
    assert isinstance(basis, Automorphism)
    root = T.vertices[0]
    # oriented tree path from each vertex to the root
    to_root: Dict[str, Tuple[OrientedEdge, ...]] = {root: ()}
    frontier = [root]
    tree_idx = [
        (i, e) for i, e in enumerate(T.edges) if e.eid in T.tree
    ]
    while frontier:
        v = frontier.pop()
        for i, e in tree_idx:
            if e.src == v and e.dst not in to_root:
                to_root[e.dst] = ((i, -1),) + to_root[v]
                frontier.append(e.dst)
            elif e.dst == v and e.src not in to_root:
                to_root[e.src] = ((i, 1),) + to_root[v]
                frontier.append(e.src)

    def from_root(v: str) -> Tuple[OrientedEdge, ...]:
        return tuple((i, -s) for i, s in reversed(to_root[v]))

    loops = []
    for eid, _ in T.labels:
        i = next(k for k, e in enumerate(T.edges) if e.eid == eid)
        e = T.edges[i]
        loops.append(from_root(e.src) + ((i, 1),) + to_root[e.dst])
    return _Marking(basis, tuple(loops))


def _reduce_edge_path(path: Iterable[OrientedEdge]) -> List[OrientedEdge]:
    stack: List[OrientedEdge] = []
    for step in path:
        if stack and stack[-1][0] == step[0] and stack[-1][1] == -step[1]:
            stack.pop()
        else:
            stack.append(step)
    return stack


def circuit_for(T: MarkedGraph, w: Word) -> List[OrientedEdge]:
    """Cyclically reduced edge circuit representing the class of w."""
    if w.rank != T.rank:
        raise InputError(f"rank mismatch: {w.rank} vs {T.rank}")
    marking = T._marking
    u = apply_endo(marking.basis.inverse, w)
    path: List[OrientedEdge] = []
    for x in u.letters:
        loop = marking.loops[abs(x) - 1]
        if x < 0:
            loop = tuple((i, -s) for i, s in reversed(loop))
        path.extend(loop)
    path = _reduce_edge_path(path)
    while len(path) >= 2 and path[0][0] == path[-1][0] and path[0][1] == -path[-1][1]:
        path = path[1:-1]
    return path


def translation_length(T: MarkedGraph, w: Word) -> Fraction:
    return sum(
        (T.edges[i].length for i, _ in circuit_for(T, w)), Fraction(0)
    )


# -- constructors ---------------------------------------------------------

def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def rose(n: int, lengths: Sequence) -> MarkedGraph:
    """Wedge of n loops; loop i is labeled by the i-th generator."""
    if len(lengths) != n:
        raise InputError(f"need {n} lengths")
    edges = tuple(
        Edge(f"e{i+1}", "v", "v", _frac(lengths[i])) for i in range(n)
    )
    labels = tuple((f"e{i+1}", word([i + 1], n)) for i in range(n))
    return MarkedGraph(n, ("v",), edges, frozenset(), labels)


def unit_rose(n: int) -> MarkedGraph:
    return rose(n, [Fraction(1)] * n)


def standard_rose(n: int) -> MarkedGraph:
    """The volume-1 rose with all edges of length 1/n."""
    return rose(n, [Fraction(1, n)] * n)


def generalized_theta(lengths: Sequence) -> MarkedGraph:
    """m >= 3 parallel edges between two vertices; rank m - 1.

    Edge 1 is the tree; the loop for generator k-1 runs over edge k and
    back over edge 1.
    """
    m = len(lengths)
    if m < 3:
        raise InputError("theta graph needs at least 3 parallel edges")
    n = m - 1
    edges = tuple(
        Edge(f"e{k+1}", "u", "v", _frac(lengths[k])) for k in range(m)
    )
    labels = tuple((f"e{k}", word([k - 1], n)) for k in range(2, m + 1))
    return MarkedGraph(n, ("u", "v"), edges, frozenset({"e1"}), labels)


def theta(lengths: Sequence) -> MarkedGraph:
    if len(lengths) != 3:
        raise InputError("theta graph has exactly 3 edges")
    return generalized_theta(lengths)


def dumbbell(loop_a, bar, loop_b) -> MarkedGraph:
    """Two loops joined by a bar; rank 2."""
    edges = (
        Edge("ea", "u", "u", _frac(loop_a)),
        Edge("em", "u", "v", _frac(bar)),
        Edge("eb", "v", "v", _frac(loop_b)),
    )
    labels = (("ea", word([1], 2)), ("eb", word([2], 2)))
    return MarkedGraph(2, ("u", "v"), edges, frozenset({"em"}), labels)


# -- operations -----------------------------------------------------------

def normalize_volume(T: MarkedGraph) -> MarkedGraph:
    vol = T.volume()
    return T.with_lengths({e.eid: e.length / vol for e in T.edges})


def systole(T: MarkedGraph) -> Fraction:
    from .lipschitz import candidates

    return min(length for _, length in candidates(T).circuit_lengths)


def act(T: MarkedGraph, phi: Automorphism) -> MarkedGraph:
    """T . phi, satisfying ||w||_{T phi} = ||phi(w)||_T."""
    if phi.rank != T.rank:
        raise InputError(f"rank mismatch: {phi.rank} vs {T.rank}")
    labels = tuple(
        (eid, apply_endo(phi.inverse, g)) for eid, g in T.labels
    )
    return MarkedGraph(T.rank, T.vertices, T.edges, T.tree, labels)


def length_functions_equal(T: MarkedGraph, S: MarkedGraph) -> bool:
    """Equality as points of Outer space: agreement of translation
    lengths on the union of both candidate sets."""
    from .lipschitz import candidates

    if T.rank != S.rank:
        return False
    words = {w for w, _ in candidates(T).loops} | {
        w for w, _ in candidates(S).loops
    }
    return all(
        translation_length(T, w) == translation_length(S, w) for w in words
    )


def collapse_degree_two(
    rank: int,
    vertices: Sequence[str],
    edges: Sequence[Edge],
    tree: Iterable[str],
    labels: Dict[str, Word],
) -> MarkedGraph:
    """Merge edge chains through degree-2 vertices, then build the graph.

    Raw-data entry point for the CLI collapse tool; MarkedGraph itself
    rejects degree-2 vertices.
    """
    verts = list(vertices)
    eds = list(edges)
    tset = set(tree)
    labs = dict(labels)
    while True:
        degree = {v: 0 for v in verts}
        for e in eds:
            degree[e.src] += 1
            degree[e.dst] += 1
        target = next(
            (v for v in verts if degree[v] == 2 and len(verts) > 1), None
        )
        if target is None:
            break
        incident = [e for e in eds if target in (e.src, e.dst)]
        if len(incident) == 1:  # a loop at the vertex: cannot collapse
            raise InputError(f"vertex {target} carries a single loop")
        e1, e2 = incident
        # orient both away from target: merged edge runs end1 -> end2
        # through the removed vertex
        end1 = e1.dst if e1.src == target else e1.src
        end2 = e2.dst if e2.src == target else e2.src
        in_tree = e1.eid in tset and e2.eid in tset
        if e1.eid not in tset and e2.eid not in tset:
            raise InputError(
                "cannot collapse a degree-2 vertex between two labeled edges"
            )
        keep = e1 if e1.eid not in tset else e2
        label = labs.pop(keep.eid, None)
        if label is not None:
            # merged edge keeps keep's orientation across the chain
            if keep is e1:
                flip = e1.dst != target  # e1 oriented away from end1?
            else:
                flip = e2.src != target
            if flip:
                label = label.inverse()
            labs[keep.eid] = label
        merged = Edge(keep.eid, end1, end2, e1.length + e2.length)
        eds = [e for e in eds if e not in (e1, e2)] + [merged]
        tset.discard(e1.eid)
        tset.discard(e2.eid)
        if in_tree:
            tset.add(keep.eid)
        verts.remove(target)
    labels_t = tuple(sorted(labs.items(), key=lambda kv: kv[0]))
    return MarkedGraph(rank, tuple(verts), tuple(eds), frozenset(tset), labels_t)


def random_marked_graph(n: int, seed) -> MarkedGraph:
    """Random point of Outer space: random topology, rational lengths and
    a random marking twist.  Deterministic per (n, seed)."""
    rng = random.Random(f"graph:{n}:{seed}")
    shapes = ["rose", "theta"]
    if n == 2:
        shapes.append("dumbbell")
    shape = rng.choice(shapes)

    def rand_len() -> Fraction:
        return Fraction(rng.randint(1, 12), rng.randint(1, 12))

    if shape == "rose":
        base = rose(n, [rand_len() for _ in range(n)])
    elif shape == "theta":
        base = generalized_theta([rand_len() for _ in range(n + 1)])
    else:
        base = dumbbell(rand_len(), rand_len(), rand_len())
    twist = random_automorphism(n, rng.randint(0, 4), rng.random())
    return act(base, twist)


# -- JSON -----------------------------------------------------------------

def fraction_to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(
        x.numerator
    )


def fraction_from_str(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {s!r}") from exc


def to_json_dict(T: MarkedGraph) -> dict:
    return {
        "rank": T.rank,
        "vertices": list(T.vertices),
        "edges": [
            {
                "id": e.eid,
                "from": e.src,
                "to": e.dst,
                "length": fraction_to_str(e.length),
            }
            for e in T.edges
        ],
        "tree": sorted(T.tree),
        "labels": {eid: letters_to_text(g.letters) for eid, g in T.labels},
    }


def from_json_dict(data: dict) -> MarkedGraph:
    try:
        rank = int(data["rank"])
        vertices = tuple(str(v) for v in data["vertices"])
        edges = tuple(
            Edge(
                str(e["id"]),
                str(e["from"]),
                str(e["to"]),
                fraction_from_str(str(e["length"])),
            )
            for e in data["edges"]
        )
        tree = frozenset(str(t) for t in data["tree"])
        labels = tuple(
            sorted(
                (
                    (str(eid), parse_word(str(text), rank))
                    for eid, text in data["labels"].items()
                ),
                key=lambda kv: kv[0],
            )
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed graph JSON: {exc}") from exc
    return MarkedGraph(rank, vertices, edges, tree, labels)


def load_graph(path: str) -> MarkedGraph:
    with open(path) as fh:
        return from_json_dict(json.load(fh))


def save_graph(T: MarkedGraph, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(T), fh, indent=2)
        fh.write("\n")
