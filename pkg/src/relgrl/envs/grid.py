"""Grid helpers shared by the cellular domains (binary ``neighbor`` facts)."""

from __future__ import annotations

from relgrl.relational import GroundFact


def cell_name(i: int, j: int) -> str:
    return f"l{i}_{j}"


def grid_cells(x: int, y: int) -> list[str]:
    return [cell_name(i, j) for i in range(1, x + 1) for j in range(1, y + 1)]


def neighbor_facts(x: int, y: int) -> set[GroundFact]:
    """King-move adjacency on an x-by-y grid, emitted in both directions."""
    out = set()
    for i in range(1, x + 1):
        for j in range(1, y + 1):
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    if (di, dj) == (0, 0):
                        continue
                    a, b = i + di, j + dj
                    if 1 <= a <= x and 1 <= b <= y:
                        out.add(GroundFact("neighbor", (cell_name(i, j), cell_name(a, b))))
    return out


def neighbour_table(spec) -> list[tuple[str, tuple[str, ...]]]:
    nb = spec._cache.get("grid_nb")
    if nb is None:
        acc: dict[str, list[str]] = {c: [] for c in spec.universe}
        for f in spec.static_facts:
            if f.predicate == "neighbor":
                acc[f.args[0]].append(f.args[1])
        nb = [(c, tuple(sorted(acc[c]))) for c in spec.universe]
        spec._cache["grid_nb"] = nb
    return nb
