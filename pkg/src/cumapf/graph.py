"""Undirected graphs, MovingAI map parsing and the primitive graph routines.

Every routine that works on an induced subgraph takes the full :class:`Graph`
plus a membership container (anything supporting ``in``) instead of building
the subgraph.  Neighbours are always visited in ascending vertex-id order,
which makes BFS trees, and therefore the planners, fully deterministic.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Collection, Iterable, Sequence
from dataclasses import dataclass, field


class GraphError(ValueError):
    """Raised when a graph violates the simple/undirected/connected contract."""


class MapFormatError(ValueError):
    """Raised for malformed MovingAI map text."""


@dataclass(frozen=True)
class GridMeta:
    """Grid provenance of a graph parsed from a map file.

    ``cells[v]`` is the ``(row, col)`` of vertex ``v``.  ``pruned`` is set when
    the passable region was disconnected and only its largest component kept.
    """

    height: int
    width: int
    cells: tuple[tuple[int, int], ...]
    pruned: bool = False
    index: dict[tuple[int, int], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", {rc: v for v, rc in enumerate(self.cells)})

    def passable_mask(self) -> list[list[bool]]:
        mask = [[False] * self.width for _ in range(self.height)]
        for r, c in self.cells:
            mask[r][c] = True
        return mask


class Graph:
    """Simple, undirected, connected graph over vertices ``0..n-1``."""

    __slots__ = ("adj", "grid_meta", "_edge_count")

    def __init__(
        self,
        adjacency: Sequence[Iterable[int]],
        grid_meta: GridMeta | None = None,
        *,
        require_connected: bool = True,
    ) -> None:
        adj = tuple(tuple(sorted(set(nbrs))) for nbrs in adjacency)
        n = len(adj)
        if n == 0:
            raise GraphError("graph has no vertices")
        edges = 0
        for v, nbrs in enumerate(adj):
            if len(nbrs) != len(list(adjacency[v])):
                raise GraphError(f"duplicate edge at vertex {v}")
            for w in nbrs:
                if not 0 <= w < n:
                    raise GraphError(f"neighbour {w} of {v} out of range")
                if w == v:
                    raise GraphError(f"self-loop at vertex {v}")
                if v not in adj[w]:
                    raise GraphError(f"edge {v}-{w} is not symmetric")
            edges += len(nbrs)
        self.adj: tuple[tuple[int, ...], ...] = adj
        self.grid_meta = grid_meta
        self._edge_count = edges // 2
        if require_connected and len(_reach(adj, range(n).__contains__, 0)) != n:
            raise GraphError("graph is not connected")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        return cls(adj)

    @classmethod
    def grid(cls, height: int, width: int) -> Graph:
        """Open ``height`` x ``width`` 4-connected grid, ids row-major."""
        return parse_map(grid_map_text([[True] * width for _ in range(height)]))

    @property
    def vertex_count(self) -> int:
        return len(self.adj)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def __len__(self) -> int:
        return len(self.adj)

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self.adj)}, |E|={self._edge_count})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.adj == other.adj

    def __hash__(self) -> int:
        return hash(self.adj)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def max_degree(self) -> int:
        return max(len(nbrs) for nbrs in self.adj)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.adj) for v in nbrs if u < v]

    def neighborhood(self, vertices: Collection[int]) -> set[int]:
        """Open neighbourhood ``N(V')``: neighbours of the set, minus the set."""
        out: set[int] = set()
        adj = self.adj
        for v in vertices:
            out.update(adj[v])
        out.difference_update(vertices)
        return out

    def coord(self, v: int) -> tuple[int, int]:
        if self.grid_meta is None:
            raise GraphError("graph has no grid metadata")
        return self.grid_meta.cells[v]

    def vertex_at(self, row: int, col: int) -> int:
        if self.grid_meta is None:
            raise GraphError("graph has no grid metadata")
        try:
            return self.grid_meta.index[(row, col)]
        except KeyError:
            raise GraphError(f"cell ({row}, {col}) is not a vertex") from None


@dataclass(frozen=True)
class DistanceField:
    """Hop distance from every vertex to the nearest member of ``sources``."""

    sources: frozenset[int]
    dist: tuple[int, ...]

    def __getitem__(self, v: int) -> int:
        return self.dist[v]

    def min_over(self, vertices: Iterable[int]) -> int:
        d = self.dist
        return min(d[v] for v in vertices)


@dataclass(frozen=True)
class BfsTree:
    """BFS tree of ``G[domain]`` rooted at ``root``.

    ``parent[v]`` is one hop closer to the root; the root has no entry.
    """

    root: int
    domain: frozenset[int]
    parent: dict[int, int]
    reached: frozenset[int]

    def path_to_root(self, v: int) -> list[int]:
        if v not in self.reached:
            raise KeyError(v)
        path = [v]
        while v != self.root:
            v = self.parent[v]
            path.append(v)
        return path

    def depth(self, v: int) -> int:
        return len(self.path_to_root(v)) - 1


def _reach(adj, member, root: int) -> dict[int, int]:
    """BFS parents restricted to ``member``; the root maps to -1."""
    parent = {root: -1}
    queue = deque((root,))
    pop, push = queue.popleft, queue.append
    while queue:
        v = pop()
        for w in adj[v]:
            if w not in parent and member(w):
                parent[w] = v
                push(w)
    return parent


def bfs_parents(graph: Graph, domain: Collection[int], root: int) -> dict[int, int]:
    """Fast form of :func:`bfs_tree`: parent map including ``root -> -1``."""
    return _reach(graph.adj, domain.__contains__, root)


def bfs_tree(graph: Graph, domain: Collection[int], root: int) -> BfsTree:
    if root not in domain:
        raise ValueError(f"root {root} is not in the domain")
    parent = _reach(graph.adj, domain.__contains__, root)
    reached = frozenset(parent)
    del parent[root]
    return BfsTree(root, frozenset(domain), parent, reached)


def articulation_points(graph: Graph, domain: Collection[int]) -> set[int]:
    """Cut vertices of ``G[domain]`` (iterative lowlink DFS, linear time).

    A disconnected domain is handled per component: a vertex is reported when
    removing it splits its own component.
    """
    adj = graph.adj
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    cut: set[int] = set()
    clock = 0
    for root in domain:
        if root in disc:
            continue
        disc[root] = low[root] = clock
        clock += 1
        root_children = 0
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            v, p, it = stack[-1]
            for w in it:
                if w not in domain:
                    continue
                dw = disc.get(w)
                if dw is None:
                    disc[w] = low[w] = clock
                    clock += 1
                    stack.append((w, v, iter(adj[w])))
                    break
                if w != p and dw < low[v]:
                    low[v] = dw
            else:
                stack.pop()
                if p == -1:
                    continue
                if low[v] < low[p]:
                    low[p] = low[v]
                if p == root:
                    root_children += 1
                elif low[v] >= disc[p]:
                    cut.add(p)
        if root_children > 1:
            cut.add(root)
    return cut


def components_of(graph: Graph, domain: Collection[int]) -> list[set[int]]:
    """Connected components of ``G[domain]``.

    Sorted by size descending, ties broken by smallest member ascending.
    """
    adj = graph.adj
    seen: set[int] = set()
    comps: list[set[int]] = []
    for root in sorted(domain):
        if root in seen:
            continue
        comp = set(_reach(adj, domain.__contains__, root))
        seen |= comp
        comps.append(comp)
    # stable sort keeps the ascending-smallest-member order within equal sizes
    comps.sort(key=len, reverse=True)
    return comps


def is_connected_set(graph: Graph, vertices: Collection[int]) -> bool:
    if not vertices:
        return False
    root = next(iter(vertices))
    return len(_reach(graph.adj, vertices.__contains__, root)) == len(vertices)


def multi_source_distance(graph: Graph, sources: Iterable[int]) -> DistanceField:
    src = frozenset(sources)
    if not src:
        raise ValueError("sources must be non-empty")
    n = len(graph.adj)
    inf = n  # never attained on a connected graph
    dist = [inf] * n
    queue = deque()
    for s in sorted(src):
        dist[s] = 0
        queue.append(s)
    adj = graph.adj
    while queue:
        v = queue.popleft()
        dv = dist[v] + 1
        for w in adj[v]:
            if dist[w] > dv:
                dist[w] = dv
                queue.append(w)
    return DistanceField(src, tuple(dist))


def min_pair_distance(
    graph: Graph,
    starts: Iterable[int],
    targets: Iterable[int],
    field_to_targets: DistanceField | None = None,
) -> tuple[int, int, int]:
    """``min dist(s, t)`` over ``S x T`` with a witness pair ``(x, y)``.

    Ties prefer the smallest ``x``, then the smallest ``y``.
    """
    targets = sorted(set(targets))
    starts = sorted(set(starts))
    if not starts or not targets:
        raise ValueError("both vertex sets must be non-empty")
    field = field_to_targets or multi_source_distance(graph, targets)
    best = min(field.dist[s] for s in starts)
    x = next(s for s in starts if field.dist[s] == best)
    ds = multi_source_distance(graph, [x])
    y = next(t for t in targets if ds.dist[t] == best)
    return best, x, y


def diameter(graph: Graph) -> int:
    return max(max(multi_source_distance(graph, [v]).dist) for v in range(len(graph.adj)))


# -- MovingAI maps -----------------------------------------------------------

PASSABLE = frozenset(".G")


def parse_map(text: str) -> Graph:
    """Parse MovingAI ``.map`` text into a 4-connected grid graph.

    Passable cells ('.' and 'G') are numbered densely in row-major order.  If
    the passable region is disconnected only the largest component is kept
    (ties: the one holding the smallest cell id) and ``grid_meta.pruned`` is set.
    """
    lines = text.splitlines()
    header: dict[str, str] = {}
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if line.lower() == "map":
            break
        key, _, value = line.partition(" ")
        header[key.lower()] = value.strip()
    else:
        raise MapFormatError("missing 'map' line")
    try:
        height = int(header["height"])
        width = int(header["width"])
    except (KeyError, ValueError):
        raise MapFormatError("header must give integer 'height' and 'width'") from None
    if "type" not in header:
        raise MapFormatError("missing 'type' line")
    if height <= 0 or width <= 0:
        raise MapFormatError("height and width must be positive")
    rows = [ln.rstrip("\r\n") for ln in lines[i : i + height]]
    if len(rows) != height:
        raise MapFormatError(f"expected {height} rows, found {len(rows)}")
    for r, row in enumerate(rows):
        if len(row) != width:
            raise MapFormatError(f"row {r} has length {len(row)}, expected {width}")
    cells = [(r, c) for r in range(height) for c in range(width) if rows[r][c] in PASSABLE]
    if not cells:
        raise MapFormatError("map has no passable cells")

    index = {rc: v for v, rc in enumerate(cells)}
    adj = [_grid_neighbors(index, r, c) for r, c in cells]
    # keep the largest passable component
    seen: set[int] = set()
    best: set[int] = set()
    for v in range(len(cells)):
        if v not in seen:
            comp = set(_reach(adj, lambda w: True, v))
            seen |= comp
            if len(comp) > len(best):
                best = comp
    pruned = len(best) != len(cells)
    if pruned:
        cells = [rc for v, rc in enumerate(cells) if v in best]
        index = {rc: v for v, rc in enumerate(cells)}
        adj = [_grid_neighbors(index, r, c) for r, c in cells]
    return Graph(adj, GridMeta(height, width, tuple(cells), pruned))


def _grid_neighbors(index: dict[tuple[int, int], int], r: int, c: int) -> list[int]:
    # up, left, right, down == ascending row-major id
    out = []
    for rc in ((r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)):
        v = index.get(rc)
        if v is not None:
            out.append(v)
    return out


def load_map(path) -> Graph:
    with open(path, encoding="ascii") as fh:
        return parse_map(fh.read())


def grid_map_text(mask: Sequence[Sequence[bool]]) -> str:
    height = len(mask)
    width = len(mask[0]) if height else 0
    body = "\n".join("".join("." if ok else "@" for ok in row) for row in mask)
    return f"type octile\nheight {height}\nwidth {width}\nmap\n{body}\n"


def to_map_text(graph: Graph) -> str:
    """Serialize a grid graph back to MovingAI text ('.' passable, '@' blocked)."""
    if graph.grid_meta is None:
        raise GraphError("graph has no grid metadata")
    return grid_map_text(graph.grid_meta.passable_mask())
