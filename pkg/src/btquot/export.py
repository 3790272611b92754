"""DOT and JSON serialisation of levelled graphs."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .field import field_of_order
from .graph import LevelledGraph
from .groups import Variant
from .poly import format_poly
from .ring import ring_from_text

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def vertex_labels(graph: LevelledGraph) -> list[str]:
    out = []
    for i in range(graph.num_levels):
        out.extend(f"{i}:{j}" for j in range(len(graph.level(i))))
    return out


def to_dot(graph: LevelledGraph, color_components: bool = True) -> str:
    labels = vertex_labels(graph)
    s = graph.summary()
    lines = [f'graph "{graph.variant.value} q={s["q"]} g={s["g"]}" {{']
    lines.append("  node [shape=circle, fontsize=8];")
    for i in range(graph.num_levels):
        lines.append(f"  subgraph level{i} {{")
        lines.append("    rank=same;")
        for v in graph.level(i):
            attrs = [f'label="{labels[v]}"']
            if color_components and graph.num_components > 1:
                col = PALETTE[int(graph.components[v]) % len(PALETTE)]
                attrs.append(f'color="{col}"')
            lines.append(f"    v{v} [{', '.join(attrs)}];")
        lines.append("  }")
    for a, b in graph.edges.tolist():
        lines.append(f"  v{a} -- v{b};")
    if graph.cusp_count:
        lines.append(f'  cusps [shape=note, label="{graph.cusp_count} cusp rays off level {graph.n - 1}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json_obj(graph: LevelledGraph) -> dict:
    group = graph.group
    nbytes = group.key_bytes
    vertices = []
    lev = graph.vertex_level
    for v in range(graph.num_vertices):
        vertices.append({"id": v, "level": int(lev[v]),
                         "key": int(graph.keys[v]).to_bytes(nbytes, "big").hex()})
    return {
        "q": graph.q,
        "g": format_poly(graph.ring.g),
        "variant": graph.variant.value,
        "mode": graph.mode,
        "levels": [{"index": i, "size": n} for i, n in enumerate(graph.level_sizes)],
        "vertices": vertices,
        "edges": graph.edges.tolist(),
        "components": graph.components.tolist(),
        "cusp_count": int(graph.cusp_count),
    }


def to_json(graph: LevelledGraph) -> str:
    return json.dumps(to_json_obj(graph), separators=(",", ":")) + "\n"


def from_json(text: str) -> LevelledGraph:
    obj = json.loads(text)
    field_of_order(obj["q"])  # validates q
    ring = ring_from_text(obj["q"], obj["g"])
    sizes = [lv["size"] for lv in sorted(obj["levels"], key=lambda lv: lv["index"])]
    offsets = np.zeros(len(sizes) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(sizes)
    verts = sorted(obj["vertices"], key=lambda v: v["id"])
    keys = np.array([int(v["key"], 16) for v in verts], dtype=np.int64)
    edges = np.array(obj["edges"], dtype=np.int64).reshape(-1, 2)
    comps = np.array(obj["components"], dtype=np.int64)
    top = len(sizes) - 1
    return LevelledGraph(Variant.parse(obj["variant"]), ring, obj["mode"], offsets, keys, edges, comps,
                         int(obj["cusp_count"]), meta={"top_level": top})


def write_text_atomic(path: str | os.PathLike, text: str):
    """Write via a temporary file in the same directory, so failures leave nothing behind."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export_graph(graph: LevelledGraph, fmt: str, path: str | os.PathLike | None = None) -> str:
    if fmt == "dot":
        text = to_dot(graph)
    elif fmt == "json":
        text = to_json(graph)
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    if path is not None:
        write_text_atomic(path, text)
    return text


def graphs_equal(a: LevelledGraph, b: LevelledGraph) -> bool:
    return (a.variant == b.variant and a.ring == b.ring and a.mode == b.mode
            and np.array_equal(a.offsets, b.offsets) and np.array_equal(a.keys, b.keys)
            and np.array_equal(a.edges, b.edges) and np.array_equal(a.components, b.components)
            and a.cusp_count == b.cusp_count)
