"""Small synthetic contact-tracing datasets used across the test suite."""

from __future__ import annotations

import datetime as dt
from pathlib import Path

import numpy as np

ORIENTATIONS = ("F", "HM", "MSM")
MODES = ("random", "CT", "CAPT")
REGIONS = ("west", "centre", "east")


def planted_dataset(groups: int = 6, size: int = 14, p_in: float = 0.3, bridges: int = 1,
                    isolated: int = 5, seed: int = 7) -> tuple[str, str]:
    """Vertex and edge CSV text for a planted-partition graph plus isolates.

    Groups are chained by ``bridges`` edges each so the non-isolated part
    is connected.  Group 0 is all MSM so atypicality has something to find.
    """
    rng = np.random.default_rng(seed)
    n = groups * size
    ids = [f"p{i:04d}" for i in range(n + isolated)]
    edges = set()
    for g in range(groups):
        base = g * size
        for i in range(size - 1):  # path keeps every group connected
            edges.add((base + i, base + i + 1))
        for i in range(size):
            for j in range(i + 2, size):
                if rng.random() < p_in:
                    edges.add((base + i, base + j))
        if g + 1 < groups:
            for _ in range(bridges):
                a = base + int(rng.integers(size))
                b = base + size + int(rng.integers(size))
                edges.add((a, b))
    deg = np.zeros(n + isolated, dtype=int)
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    start = dt.date(1990, 1, 1)
    vrows = ["id,orientation,detection_mode,detection_date,age_at_detection,region,declared_partners"]
    for i, vid in enumerate(ids):
        group = i // size if i < n else -1
        orient = "MSM" if group == 0 else ORIENTATIONS[int(rng.integers(3))]
        mode = MODES[int(rng.integers(3))]
        date = start + dt.timedelta(days=int(rng.integers(0, 3000)))
        age = int(rng.integers(16, 60))
        region = REGIONS[group % 3] if group >= 0 else REGIONS[int(rng.integers(3))]
        declared = int(deg[i] + rng.integers(0, 4))
        vrows.append(f"{vid},{orient},{mode},{date.isoformat()},{age},{region},{declared}")
    erows = ["src,dst,named_by"]
    for a, b in sorted(edges):
        erows.append(f"{ids[a]},{ids[b]},{('src', 'dst', 'both')[int(rng.integers(3))]}")
    return "\n".join(vrows) + "\n", "\n".join(erows) + "\n"


def write_planted(directory: Path, **kw) -> tuple[Path, Path]:
    vtext, etext = planted_dataset(**kw)
    directory.mkdir(parents=True, exist_ok=True)
    vp, ep = directory / "vertices.csv", directory / "edges.csv"
    vp.write_text(vtext)
    ep.write_text(etext)
    return vp, ep
