"""Promise correlation clustering on labeled graphs, and the hardness gadget.

A PccGraph carries binary pair labels: an edge means the pair should be
together, a non-edge that it should be apart.  The correlation loss of a
clustering counts co-clustered non-edges (NL) and cross-cluster edges (PL).

``build_gadget`` turns an exact-cover-by-3-sets instance into a graph on
which partitioning into cliques of size exactly p is possible if and only if
the instance has an exact cover.  The layout, the two canonical clusterings
each gadget supports, and the counting identities behind the construction
are documented in docs/gadget-construction.md; the short version:

* Each 3-subset becomes a gadget of p chains: three rooted at the subset's
  element vertices (shared across gadgets) and p-3 rooted at private anchor
  vertices.  A chain is t blocks; a block is its base vertex, p-1 fresh
  middle vertices, and a fresh top vertex, where the top of one block is the
  base of the next.  Base-middle and middle-top pairs are edges, middles
  form a clique, base-top is a non-edge.  The final tops of the p chains
  form a p-clique.
* Every block yields exactly two p-cliques: base plus middles ("down", which
  consumes the base) or middles plus top ("up", which leaves the base free).
  The missing base-top edge forces a whole chain, and via the final-top
  clique a whole gadget, to commit one way.  A gadget that goes down claims
  its three elements; one that goes up leaves them free.
* Anchors of all gadgets plus a filler pool (sized so the leftover count is
  divisible by p whenever exactly q gadgets go down) form one soup clique
  that absorbs the anchors of up gadgets.  Elements are not in the soup, so
  they can only ever be claimed by a containing gadget going down.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .core import Clustering, canonical_pair
from .errors import (
    InstanceTooLargeError,
    ParameterError,
    SchemaError,
)


class PccGraph:
    """Simple undirected graph; vertices are 0..n-1, edges canonical pairs."""

    def __init__(self, n: int, edges):
        if n < 1:
            raise ParameterError(f"graph needs at least one vertex, got n={n}")
        self.n = n
        canon = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise SchemaError(f"edge ({u}, {v}) outside vertex range 0..{n - 1}")
            canon.add(canonical_pair(u, v))
        self.edges = frozenset(canon)
        self.adjacency = {v: set() for v in range(n)}
        for u, v in self.edges:
            self.adjacency[u].add(v)
            self.adjacency[v].add(u)

    def has_edge(self, u: int, v: int) -> bool:
        return canonical_pair(u, v) in self.edges

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def load_graph(path) -> PccGraph:
    """Text format: first line `n m`, then one `u v` line per edge."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty graph file")
    try:
        n, m = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise SchemaError(f"{path}: first line must be 'n m'") from None
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            u, v = (int(tok) for tok in line.split())
        except ValueError:
            raise SchemaError(f"{path}:{lineno}: expected 'u v'") from None
        edges.append((u, v))
    if len(edges) != m:
        raise SchemaError(f"{path}: header says {m} edges, file has {len(edges)}")
    return PccGraph(n, edges)


def save_graph(graph: PccGraph, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{graph.n} {graph.edge_count}\n")
        for u, v in sorted(graph.edges):
            fh.write(f"{u} {v}\n")


def correlation_loss(graph: PccGraph, clustering: Clustering, w1: float, w2: float):
    """(NL, PL, L) over unordered pairs.

    NL counts co-clustered non-edges, PL cross-cluster edges, and
    L = w1*NL + w2*PL.  Ordered-pair conventions double both counts, which
    cancels in every comparison, so unordered counts are reported.
    """
    expected = set(range(graph.n))
    if set(clustering.ids) != expected:
        from .errors import InvalidClusteringError

        raise InvalidClusteringError("clustering does not partition the vertex set")
    nl = pl = 0
    for u in range(graph.n):
        for v in range(u + 1, graph.n):
            same = clustering.same(u, v)
            edge = graph.has_edge(u, v)
            if same and not edge:
                nl += 1
            elif edge and not same:
                pl += 1
    return nl, pl, w1 * nl + w2 * pl


# ---------------------------------------------------------------------------
# X3C instances


@dataclass(frozen=True)
class X3cInstance:
    q: int
    subsets: tuple

    def __post_init__(self):
        if self.q < 1:
            raise ParameterError(f"q must be at least 1, got {self.q}")
        universe = 3 * self.q
        canon = []
        for s in self.subsets:
            trip = tuple(sorted(s))
            if len(trip) != 3 or len(set(trip)) != 3:
                raise SchemaError(f"subset {s} must have exactly 3 distinct elements")
            if not all(0 <= e < universe for e in trip):
                raise SchemaError(f"subset {s} outside the universe 0..{universe - 1}")
            canon.append(trip)
        object.__setattr__(self, "subsets", tuple(canon))

    @property
    def universe_size(self) -> int:
        return 3 * self.q

    @property
    def m(self) -> int:
        return len(self.subsets)


def load_x3c(path) -> X3cInstance:
    """Text format: first line `q m`, then one subset (3 indices) per line."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty instance file")
    try:
        q, m = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise SchemaError(f"{path}: first line must be 'q m'") from None
    subsets = []
    for lineno, line in enumerate(lines[1:], start=2):
        toks = line.split()
        if len(toks) != 3:
            raise SchemaError(f"{path}:{lineno}: expected 3 element indices")
        subsets.append(tuple(int(tok) for tok in toks))
    if len(subsets) != m:
        raise SchemaError(f"{path}: header says {m} subsets, file has {len(subsets)}")
    return X3cInstance(q=q, subsets=tuple(subsets))


@dataclass(frozen=True)
class GadgetParams:
    p: int = 4
    t: int = 2

    def __post_init__(self):
        if self.p < 4:
            raise ParameterError(f"p must be at least 4, got {self.p}")
        if self.t < 2:
            raise ParameterError(f"t must be at least 2, got {self.t}")


def gadget_beta(params: GadgetParams) -> float:
    """The construction's within-threshold positive fraction: 1/(1 + 2/p + 1/(pt))."""
    return float(gadget_beta_fraction(params))


def gadget_beta_fraction(params: GadgetParams) -> Fraction:
    p, t = params.p, params.t
    return 1 / (1 + Fraction(2, p) + Fraction(1, p * t))


# ---------------------------------------------------------------------------
# Gadget construction


@dataclass
class ChainLayout:
    base: int
    blocks: list  # (base, mids tuple, top) per block, base of block j+1 = top of block j


@dataclass
class GadgetLayout:
    index: int
    elements: tuple  # the 3 shared element vertices
    anchors: tuple  # p-3 private anchor vertices
    chains: list  # ChainLayout, elements first then anchors
    final_tops: tuple  # the p chain ends, joined in a p-clique

    def inclusion_blocks(self):
        """The "down" clusters: every block as base+middles, plus the top clique."""
        blocks = []
        for chain in self.chains:
            for base, mids, _top in chain.blocks:
                blocks.append((base,) + mids)
        blocks.append(self.final_tops)
        return blocks

    def exclusion_blocks(self):
        """The "up" clusters: every block as middles+top; bases are left out."""
        blocks = []
        for chain in self.chains:
            for _base, mids, top in chain.blocks:
                blocks.append(mids + (top,))
        return blocks


@dataclass
class GadgetBuild:
    graph: PccGraph
    instance: X3cInstance
    params: GadgetParams
    gadgets: list
    fillers: tuple
    soup: tuple  # all anchors plus fillers, a clique
    structural_edges: frozenset  # chain and top-clique edges, no soup edges

    def gadget_clustering(self, index: int, inclusion: bool) -> Clustering:
        """One gadget's canonical clustering, singletons everywhere else."""
        layout = self.gadgets[index]
        blocks = layout.inclusion_blocks() if inclusion else layout.exclusion_blocks()
        used = {v for b in blocks for v in b}
        blocks.extend((v,) for v in range(self.graph.n) if v not in used)
        return Clustering(blocks, expected_ids=range(self.graph.n))

    def all_exclusion_clustering(self) -> Clustering:
        """Every gadget up; elements, anchors, and fillers become singletons."""
        blocks = []
        for layout in self.gadgets:
            blocks.extend(layout.exclusion_blocks())
        used = {v for b in blocks for v in b}
        blocks.extend((v,) for v in range(self.graph.n) if v not in used)
        return Clustering(blocks, expected_ids=range(self.graph.n))

    def alpha_fraction(self) -> Fraction:
        """Fraction of all-exclusion positive pairs that are non-edges; zero by design."""
        clustering = self.all_exclusion_clustering()
        pos = far = 0
        for block in clustering.blocks:
            for u, v in combinations(block, 2):
                pos += 1
                far += not self.graph.has_edge(u, v)
        if pos == 0:
            raise ParameterError("exclusion clustering has no positive pairs")
        return Fraction(far, pos)

    def beta_fraction(self, include_soup: bool = False) -> Fraction:
        """Fraction of edges the all-exclusion clustering keeps together.

        Over structural edges this equals 1/(1 + 2/p + 1/(pt)) exactly; soup
        edges, when counted, dilute it (they sit between singletons).
        """
        clustering = self.all_exclusion_clustering()
        edges = self.graph.edges if include_soup else self.structural_edges
        near = len(edges)
        near_pos = sum(1 for u, v in edges if clustering.same(u, v) == 1)
        return Fraction(near_pos, near)

    def stats(self) -> dict:
        p, t = self.params.p, self.params.t
        m, q = self.instance.m, self.instance.q
        core = m * (p * p * t + (p - 3)) + 3 * q
        return {
            "alpha": float(self.alpha_fraction()),
            "beta": float(self.beta_fraction()),
            "beta_with_soup": float(self.beta_fraction(include_soup=True)),
            "vertices": self.graph.n,
            "vertices_core": core,
            "fillers": len(self.fillers),
            "edges": self.graph.edge_count,
            "edges_structural": len(self.structural_edges),
            "edges_soup": self.graph.edge_count - len(self.structural_edges),
        }


def build_gadget(instance: X3cInstance, params: GadgetParams) -> GadgetBuild:
    p, t = params.p, params.t
    q, m = instance.q, instance.m
    counter = 3 * q  # elements take 0..3q-1
    edges = []
    gadgets = []
    all_anchors = []

    def fresh():
        nonlocal counter
        v = counter
        counter += 1
        return v

    for g_index, subset in enumerate(instance.subsets):
        anchors = tuple(fresh() for _ in range(p - 3))
        all_anchors.extend(anchors)
        chains = []
        final_tops = []
        for base0 in subset + anchors:
            base = base0
            blocks = []
            for _ in range(t):
                mids = tuple(fresh() for _ in range(p - 1))
                top = fresh()
                for mid in mids:
                    edges.append((base, mid))
                    edges.append((mid, top))
                edges.extend(combinations(mids, 2))
                blocks.append((base, mids, top))
                base = top  # the block's top seeds the next block
            chains.append(ChainLayout(base=base0, blocks=blocks))
            final_tops.append(base)
        edges.extend(combinations(final_tops, 2))
        gadgets.append(
            GadgetLayout(
                index=g_index,
                elements=subset,
                anchors=anchors,
                chains=chains,
                final_tops=tuple(final_tops),
            )
        )

    structural = frozenset(canonical_pair(u, v) for u, v in edges)
    # Filler count makes the soup leftover divisible by p when q gadgets go down.
    filler_count = ((q - m) * (p - 3)) % p
    fillers = tuple(fresh() for _ in range(filler_count))
    soup = tuple(all_anchors) + fillers
    edges.extend(combinations(soup, 2))

    graph = PccGraph(counter, edges)
    return GadgetBuild(
        graph=graph,
        instance=instance,
        params=params,
        gadgets=gadgets,
        fillers=fillers,
        soup=soup,
        structural_edges=structural,
    )


# ---------------------------------------------------------------------------
# Solvers


EXHAUSTIVE_MAX_N = 12


def solve_pcc_exhaustive(graph: PccGraph, M: int) -> Clustering:
    """Minimum unweighted correlation loss over partitions with blocks <= M.

    Plain exhaustive search over set partitions, restricted-growth style,
    with incremental loss bookkeeping.  Ties break lexicographically on the
    canonical partition encoding.
    """
    if graph.n > EXHAUSTIVE_MAX_N:
        raise InstanceTooLargeError(
            f"exhaustive solver handles n <= {EXHAUSTIVE_MAX_N}, got {graph.n}"
        )
    if M < 1:
        raise ParameterError(f"cluster-size cap must be at least 1, got {M}")
    n = graph.n
    total_edges = graph.edge_count
    best: list = [None, None]  # loss, encoding

    blocks: list = []

    def place(v: int, nl_so_far: int, within_so_far: int):
        if best[0] is not None and nl_so_far > best[0]:
            return
        if v == n:
            loss = nl_so_far + (total_edges - within_so_far)
            if best[0] is None or loss < best[0]:
                best[0] = loss
                best[1] = tuple(sorted(tuple(sorted(b)) for b in blocks))
            elif loss == best[0]:
                encoding = tuple(sorted(tuple(sorted(b)) for b in blocks))
                if encoding < best[1]:
                    best[1] = encoding
            return
        for block in blocks:
            if len(block) >= M:
                continue
            hits = sum(1 for u in block if graph.has_edge(u, v))
            block.append(v)
            place(v + 1, nl_so_far + len(block) - 1 - hits, within_so_far + hits)
            block.pop()
        blocks.append([v])
        place(v + 1, nl_so_far, within_so_far)
        blocks.pop()

    place(0, 0, 0)
    return Clustering(best[1], expected_ids=range(n))


def enumerate_p_cliques(graph: PccGraph, p: int):
    """All vertex sets of size p inducing a complete subgraph, as sorted tuples."""
    cliques = []

    def extend(prefix: list, candidates: list):
        if len(prefix) == p:
            cliques.append(tuple(prefix))
            return
        need = p - len(prefix)
        for i, v in enumerate(candidates):
            if len(candidates) - i < need:
                break
            prefix.append(v)
            extend(prefix, [u for u in candidates[i + 1 :] if u in graph.adjacency[v]])
            prefix.pop()

    extend([], list(range(graph.n)))
    return cliques


def solve_pcc_cliquecover(graph: PccGraph, p: int) -> Optional[Clustering]:
    """Partition the vertices into disjoint p-cliques, or None.

    Exact-cover backtracking over the enumerated p-clique list.  The branch
    variable is the uncovered vertex with the fewest remaining cliques, which
    also serves as unit propagation: a vertex with one option forces it, one
    with none cuts the branch.
    """
    if p < 1:
        raise ParameterError(f"clique size must be at least 1, got {p}")
    if graph.n % p != 0:
        return None
    cliques = enumerate_p_cliques(graph, p)
    by_vertex = {v: [] for v in range(graph.n)}
    for clique in cliques:
        for v in clique:
            by_vertex[v].append(clique)

    covered = [False] * graph.n
    chosen: list = []

    def search(remaining: int) -> bool:
        if remaining == 0:
            return True
        pivot, options = None, None
        for v in range(graph.n):
            if covered[v]:
                continue
            avail = [c for c in by_vertex[v] if not any(covered[u] for u in c)]
            if options is None or len(avail) < len(options):
                pivot, options = v, avail
                if not avail:
                    return False
                if len(avail) == 1:
                    break
        for clique in options:
            for u in clique:
                covered[u] = True
            chosen.append(clique)
            if search(remaining - p):
                return True
            chosen.pop()
            for u in clique:
                covered[u] = False
        return False

    if not search(graph.n):
        return None
    return Clustering(chosen, expected_ids=range(graph.n))


def decide_x3c(instance: X3cInstance, params: GadgetParams) -> bool:
    """YES iff the gadget graph splits into cliques of size exactly p."""
    build = build_gadget(instance, params)
    return solve_pcc_cliquecover(build.graph, params.p) is not None
