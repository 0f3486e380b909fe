"""Bundled and externally sourced benchmark networks."""
from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .graph import Graph, load_edge_list, read_vertex_values

__all__ = [
    "DatasetInfo",
    "DATASETS",
    "DatasetUnavailable",
    "load_karate",
    "load_football",
    "karate_factions",
    "PACIFIC_TEN",
    "data_dirs",
]

PACIFIC_TEN = ("8", "Pacific Ten", "Pacific-10", "Pac-10", "Pac10")


class DatasetUnavailable(FileNotFoundError):
    pass


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    vertices: int
    edges: int
    source: str
    note: str = ""


DATASETS = (
    DatasetInfo("karate", 34, 78, "bundled (Zachary 1977)"),
    DatasetInfo("football", 115, 613, "http://www-personal.umich.edu/~mejn/netdata/football.zip",
                "labels: conference value per team"),
    DatasetInfo("house", 434, 51033, "https://voteview.com/data",
                "98th House co-voting network over all 908 roll calls"),
    DatasetInfo("blogs", 1490, 16714, "http://www-personal.umich.edu/~mejn/netdata/polblogs.zip",
                "giant component has 1222 vertices and 19087 edges"),
    DatasetInfo("facebook", 4039, 88234, "https://snap.stanford.edu/data/facebook_combined.txt.gz"),
    DatasetInfo("power", 4941, 6594, "http://www-personal.umich.edu/~mejn/netdata/power.zip"),
)


def data_dirs() -> list[Path]:
    """Search path for data files: ``$GENDYN_DATA`` (if set) then the package data."""
    dirs = []
    env = os.environ.get("GENDYN_DATA")
    if env:
        dirs.append(Path(env))
    dirs.append(Path(str(resources.files("gendyn") / "data")))
    return dirs


def _find(name: str) -> Path | None:
    for d in data_dirs():
        p = d / name
        if p.is_file():
            return p
    return None


def _numeric_order(g: Graph) -> Graph:
    try:
        keys = [int(x) for x in g.labels]
    except ValueError:
        return g
    return g.permute(np.argsort(keys, kind="stable"))


def _load(stem: str) -> tuple[Graph, dict]:
    edges = _find(f"{stem}.edges")
    labels = _find(f"{stem}.labels")
    if edges is None or labels is None:
        info = next(d for d in DATASETS if d.name == stem)
        raise DatasetUnavailable(
            f"{stem}.edges/{stem}.labels not found in {[str(d) for d in data_dirs()]}; "
            f"source: {info.source}"
        )
    with open(edges, encoding="utf-8") as fh:
        g = _numeric_order(load_edge_list(fh, weighted=False))
    with open(labels, encoding="utf-8") as fh:
        lab = read_vertex_values(fh)
    return g, lab


def load_karate() -> tuple[Graph, dict]:
    """Zachary karate club (unweighted) and the faction of every member."""
    return _load("karate")


def karate_factions() -> tuple[np.ndarray, np.ndarray]:
    """Vertex indices of the two factions (``Mr. Hi``, ``Officer``)."""
    g, lab = load_karate()
    hi = np.array([g.index(v) for v, f in lab.items() if f == "Mr. Hi"])
    off = np.array([g.index(v) for v, f in lab.items() if f != "Mr. Hi"])
    return np.sort(hi), np.sort(off)


def load_football() -> tuple[Graph, dict]:
    """NCAA Division I-A 2000 season and each team's conference.

    Not bundled; place ``football.edges`` and ``football.labels`` in
    ``$GENDYN_DATA``.  Raises :class:`DatasetUnavailable` otherwise.
    """
    return _load("football")
