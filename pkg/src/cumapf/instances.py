"""Instance generation and instance files.

Random instances draw S and T as two independent random connected subsets
of a map.  Randomness comes from numpy's PCG64 seeded through a
``SeedSequence(seed, spawn_key=(index,))``, so instance ``index`` of a batch
is reproducible regardless of how the batch is split across workers.

The connected-subset sampler grows a set from a uniform vertex by repeatedly
adding a uniform vertex of the current frontier.  It is *not* uniform over
all connected subsets of the requested size.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .core import Instance, InvalidInstanceError
from .graph import Graph, MapFormatError, grid_map_text, load_map, parse_map


def make_rng(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str  # "random" | "tight" | "grid3"
    n: int = 0
    k: int = 0
    ell: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind == "random" and self.n < 1:
            raise ValueError("random instances need n >= 1")
        if self.kind == "tight" and (self.k < 1 or self.ell < 1):
            raise ValueError("tight instances need k >= 1 and l >= 1")
        if self.kind == "grid3" and self.k < 2:
            raise ValueError("grid3 instances need k >= 2")
        if self.kind not in ("random", "tight", "grid3"):
            raise ValueError(f"unknown generator kind {self.kind!r}")


def random_connected_subset(graph: Graph, n: int, rng: np.random.Generator) -> list[int]:
    """Grow a connected vertex set of size ``n`` by random frontier growth."""
    size = graph.vertex_count
    if not 1 <= n <= size:
        raise ValueError(f"cannot draw {n} vertices from a graph with {size}")
    adj = graph.adj
    start = int(rng.integers(size))
    chosen = [start]
    in_set = {start}
    frontier: list[int] = []
    slot: dict[int, int] = {}

    def push(v: int) -> None:
        for w in adj[v]:
            if w not in in_set and w not in slot:
                slot[w] = len(frontier)
                frontier.append(w)

    push(start)
    while len(chosen) < n:
        if not frontier:
            raise RuntimeError("frontier exhausted before reaching the requested size")
        k = int(rng.integers(len(frontier)))
        v = frontier[k]
        last = frontier.pop()
        if last != v:
            frontier[k] = last
            slot[last] = k
        del slot[v]
        chosen.append(v)
        in_set.add(v)
        push(v)
    return chosen


def gen_random(graph: Graph, n: int, seed: int, index: int = 0, map_path: str | None = None) -> Instance:
    rng = make_rng(seed, index)
    starts = random_connected_subset(graph, n, rng)
    targets = random_connected_subset(graph, n, rng)
    return Instance(graph, tuple(sorted(starts)), tuple(sorted(targets)), seed=seed, map_path=map_path)


def gen_tight(k: int, ell: int) -> Instance:
    """Path of k starts above a stem of l vertices above a path of k targets.

    Every start is adjacent to the top of the stem and every target to its
    bottom; ids are starts ``0..k-1``, stem ``k..k+l-1``, targets after that.
    """
    if k < 1 or ell < 1:
        raise ValueError("need k >= 1 and l >= 1")
    top = list(range(k))
    stem = list(range(k, k + ell))
    bottom = list(range(k + ell, 2 * k + ell))
    edges = [(top[i], top[i + 1]) for i in range(k - 1)]
    edges += [(bottom[i], bottom[i + 1]) for i in range(k - 1)]
    edges += [(stem[i], stem[i + 1]) for i in range(ell - 1)]
    edges += [(s, stem[0]) for s in top]
    edges += [(stem[-1], t) for t in bottom]
    graph = Graph.from_edges(2 * k + ell, edges)
    return Instance(graph, tuple(top), tuple(bottom))


def gen_grid3(k: int) -> Instance:
    """Open k x 3 grid with S the first column and T the last."""
    if k < 2:
        raise ValueError("need k >= 2")
    graph = Graph.grid(k, 3)
    starts = tuple(graph.vertex_at(r, 0) for r in range(k))
    targets = tuple(graph.vertex_at(r, 2) for r in range(k))
    return Instance(graph, starts, targets)


def generate(spec: GeneratorSpec, graph: Graph | None = None, index: int = 0,
             map_path: str | None = None) -> Instance:
    if spec.kind == "tight":
        return gen_tight(spec.k, spec.ell)
    if spec.kind == "grid3":
        return gen_grid3(spec.k)
    if graph is None:
        raise ValueError("random instances need a map")
    return gen_random(graph, spec.n, spec.seed, index, map_path)


# -- maps ----------------------------------------------------------------------

def random_map_text(height: int, width: int, obstacle_ratio: float, seed: int) -> str:
    """A random-H-W-P style map with a connected passable region.

    Exactly ``round(H*W*ratio)`` cells are blocked; layouts are redrawn from
    the same stream until the free cells are connected.
    """
    cells = height * width
    blocked = round(cells * obstacle_ratio)
    rng = make_rng(seed)
    for _ in range(10_000):
        picks = rng.choice(cells, size=blocked, replace=False)
        mask = [[True] * width for _ in range(height)]
        for p in picks:
            mask[int(p) // width][int(p) % width] = False
        text = grid_map_text(mask)
        if not parse_map(text).grid_meta.pruned:
            return text
    raise RuntimeError("could not draw a connected map")


def bundled_map_path(name: str) -> Path:
    """Path of a map shipped with the package, e.g. ``random-32-32-20``."""
    ref = resources.files("cumapf") / "maps" / f"{name}.map"
    return Path(str(ref))


def resolve_map_path(path_or_name: str, base: str | os.PathLike | None = None) -> Path:
    p = Path(path_or_name)
    if not p.is_absolute() and base is not None and (Path(base) / p).exists():
        return Path(base) / p
    if p.exists():
        return p
    bundled = bundled_map_path(p.stem)
    if bundled.exists():
        return bundled
    raise FileNotFoundError(f"map file not found: {path_or_name}")


# -- instance files --------------------------------------------------------------

def instance_to_dict(instance: Instance) -> dict:
    data: dict = {}
    if instance.map_path is not None:
        data["map"] = instance.map_path
    else:
        data["map"] = "inline"
        data["inline_graph"] = [list(nbrs) for nbrs in instance.graph.adj]
    data["starts"] = list(instance.starts)
    data["targets"] = list(instance.targets)
    data["seed"] = instance.seed
    return data


def save_instance(instance: Instance, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(instance), fh, separators=(",", ":"))
        fh.write("\n")


def _resolve_ids(graph: Graph, raw: list) -> list[int]:
    out = []
    for item in raw:
        if isinstance(item, list):
            if len(item) != 2:
                raise InvalidInstanceError(f"bad grid coordinate {item!r}")
            try:
                out.append(graph.vertex_at(int(item[0]), int(item[1])))
            except ValueError as exc:
                raise InvalidInstanceError(str(exc)) from None
        else:
            v = int(item)
            if not 0 <= v < graph.vertex_count:
                raise InvalidInstanceError(f"vertex id {v} out of range")
            out.append(v)
    return out


def instance_from_dict(data: dict, base: str | os.PathLike | None = None) -> Instance:
    try:
        map_ref = data["map"]
        starts_raw, targets_raw = data["starts"], data["targets"]
    except KeyError as exc:
        raise InvalidInstanceError(f"instance is missing field {exc}") from None
    try:
        if map_ref == "inline":
            graph = Graph(data["inline_graph"])
            map_path = None
        else:
            graph = load_map(resolve_map_path(map_ref, base))
            map_path = map_ref
    except (FileNotFoundError, MapFormatError, ValueError, KeyError) as exc:
        raise InvalidInstanceError(f"cannot load graph: {exc}") from None
    starts = _resolve_ids(graph, starts_raw)
    targets = _resolve_ids(graph, targets_raw)
    return Instance(graph, tuple(starts), tuple(targets), seed=int(data.get("seed", 0)),
                    map_path=map_path)


def load_instance(path: str | os.PathLike) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInstanceError(f"cannot read instance {path}: {exc}") from None
    return instance_from_dict(data, base=Path(path).parent)
