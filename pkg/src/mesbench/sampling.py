"""Experiment designs: OAT screening, Saltelli sample matrices, dense grids.

The quasi-random backbone is a Sobol low-discrepancy sequence built from the
bundled direction-number table (data/sobol_directions.txt). Points are
emitted in plain binary index order starting at index 1, so the degenerate
all-zeros point never appears and every prefix of 2^m points fills the dyadic
grid evenly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .scenario import Factor, Recipe, validate_factor_set

__all__ = [
    "DesignError",
    "CampaignDesign",
    "sobol_points",
    "max_sobol_dimension",
    "oat_design",
    "saltelli_design",
    "grid_design",
]

_SOBOL_BITS = 32
_SOBOL_SCALE = 1.0 / (1 << _SOBOL_BITS)


class DesignError(ValueError):
    """A design request is structurally invalid."""


@lru_cache(maxsize=1)
def _direction_table() -> list[tuple[int, int, list[int]]]:
    """Parse the bundled table into (s, a, m-values) rows for dims >= 2."""
    text = resources.files("mesbench.data").joinpath("sobol_directions.txt").read_text()
    rows = []
    expected_dim = 2
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [int(tok) for tok in line.split()]
        dim, s, a, m = parts[0], parts[1], parts[2], parts[3:]
        if dim != expected_dim or len(m) != s:
            raise ValueError(f"malformed direction-number row: {line!r}")
        rows.append((s, a, m))
        expected_dim += 1
    return rows


def max_sobol_dimension() -> int:
    return len(_direction_table()) + 1


@lru_cache(maxsize=None)
def _direction_vectors(dim_index: int) -> tuple[int, ...]:
    """32-bit direction integers v_1..v_32 for one dimension (0-based index).

    Dimension 0 is the van der Corput sequence (v_j = 2^(32-j)); higher
    dimensions expand their initial m-values through the primitive-polynomial
    recurrence m_k = 2 a_1 m_{k-1} ^ ... ^ 2^(s-1) a_{s-1} m_{k-s+1}
    ^ 2^s m_{k-s} ^ m_{k-s}.
    """
    if dim_index == 0:
        return tuple(1 << (_SOBOL_BITS - j) for j in range(1, _SOBOL_BITS + 1))
    table = _direction_table()
    if dim_index - 1 >= len(table):
        raise DesignError(
            f"dimension {dim_index + 1} exceeds the direction-number table "
            f"(max {max_sobol_dimension()})"
        )
    s, a, m_init = table[dim_index - 1]
    m = list(m_init)
    for k in range(s, _SOBOL_BITS):
        new = m[k - s] ^ (m[k - s] << s)
        for j in range(1, s):
            if (a >> (s - 1 - j)) & 1:
                new ^= m[k - j] << j
        m.append(new)
    return tuple(m[j] << (_SOBOL_BITS - (j + 1)) for j in range(_SOBOL_BITS))


def _sobol_point_int(index: int, vectors: tuple[int, ...]) -> int:
    x = 0
    j = 0
    while index:
        if index & 1:
            x ^= vectors[j]
        index >>= 1
        j += 1
    return x


def sobol_points(dim: int, n: int, skip: int = 0) -> list[list[float]]:
    """First ``n`` Sobol points in [0,1)^dim after skipping ``skip`` of them.

    Deterministic; the sequence starts at index 1 (the all-zeros point is
    dropped), so skip=0 yields the points at indices 1..n.
    """
    if dim < 1:
        raise DesignError("dim must be >= 1")
    if n < 0:
        raise DesignError("n must be >= 0")
    if dim > max_sobol_dimension():
        raise DesignError(
            f"dim {dim} exceeds the direction-number table (max {max_sobol_dimension()})"
        )
    vectors = [_direction_vectors(d) for d in range(dim)]
    return [
        [_sobol_point_int(i, vectors[d]) * _SOBOL_SCALE for d in range(dim)]
        for i in range(1 + skip, 1 + skip + n)
    ]


# --------------------------------------------------------------------------
# Designs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CampaignDesign:
    """An ordered recipe list plus the bookkeeping analysis relies on.

    ``meta`` layout per kind:
      oat      {"factors": [...], "base_run": 0, "triples": {name: [base, lo, hi]}}
      saltelli {"factors": [...], "n": N, "k": k, "second_order": bool,
                "blocks": ["A", "B", "AB_0", ...]} with rows laid out
                block-major in that order, N rows per block
      grid     {"axes": [...], "points_per_axis": p, "values": {name: [...]}}

    Recipe ordering and run_ids match the meta layout exactly.
    """

    kind: str
    recipes: tuple[Recipe, ...]
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.recipes)


def _scale(u: float, f: Factor) -> float:
    return f.min + u * (f.max - f.min)


def oat_design(factors: list[Factor]) -> CampaignDesign:
    """One-at-a-time screening: shared base run, then min/max per factor."""
    if not factors:
        raise DesignError("oat_design requires at least one factor")
    validate_factor_set(factors)
    base = {f.name: f.base for f in factors}
    recipes = [Recipe(0, dict(base), design_tag="oat:base")]
    triples: dict[str, list[int]] = {}
    for f in factors:
        lo_id, hi_id = len(recipes), len(recipes) + 1
        lo = dict(base)
        lo[f.name] = f.min
        hi = dict(base)
        hi[f.name] = f.max
        recipes.append(Recipe(lo_id, lo, design_tag=f"oat:{f.name}:min"))
        recipes.append(Recipe(hi_id, hi, design_tag=f"oat:{f.name}:max"))
        triples[f.name] = [0, lo_id, hi_id]
    meta = {"factors": [f.name for f in factors], "base_run": 0, "triples": triples}
    return CampaignDesign("oat", tuple(recipes), meta)


def saltelli_design(factors: list[Factor], n: int, second_order: bool = False,
                    skip: int = 0) -> CampaignDesign:
    """Saltelli sample-matrix design for first-order and total-effect indices.

    Builds base matrices A and B from a 2k-dimensional Sobol sequence plus,
    for each factor i, AB_i (matrix A with column i taken from B); with
    ``second_order`` the BA_i blocks are appended as well. Row layout is
    recorded in meta; total runs are N(k+2), or N(2k+2) with second order.
    """
    if not factors:
        raise DesignError("saltelli_design requires at least one factor")
    validate_factor_set(factors)
    if n < 1:
        raise DesignError("n must be >= 1")
    if n & (n - 1):
        warnings.warn(f"saltelli sample count N={n} is not a power of two; "
                      "balance properties of the Sobol sequence are weakened")
    k = len(factors)
    pts = sobol_points(2 * k, n, skip=skip)
    a_rows = [[_scale(p[i], f) for i, f in enumerate(factors)] for p in pts]
    b_rows = [[_scale(p[k + i], f) for i, f in enumerate(factors)] for p in pts]

    blocks: list[tuple[str, list[list[float]]]] = [("A", a_rows), ("B", b_rows)]
    for i in range(k):
        ab = [row[:i] + [b[i]] + row[i + 1:] for row, b in zip(a_rows, b_rows)]
        blocks.append((f"AB_{i}", ab))
    if second_order:
        for i in range(k):
            ba = [row[:i] + [a[i]] + row[i + 1:] for row, a in zip(b_rows, a_rows)]
            blocks.append((f"BA_{i}", ba))

    names = [f.name for f in factors]
    recipes = []
    for block_name, rows in blocks:
        for r, row in enumerate(rows):
            run_id = len(recipes)
            recipes.append(Recipe(run_id, dict(zip(names, row)),
                                  design_tag=f"saltelli:{block_name}:{r}"))
    meta = {
        "factors": names,
        "n": n,
        "k": k,
        "second_order": second_order,
        "skip": skip,
        "blocks": [name for name, _ in blocks],
    }
    return CampaignDesign("saltelli", tuple(recipes), meta)


def grid_design(factors: list[Factor], axes: list[str], points_per_axis: int) -> CampaignDesign:
    """Equally spaced inclusive grid over one or two axes, others at base."""
    if not (1 <= len(axes) <= 2):
        raise DesignError("grid_design supports exactly 1 or 2 axes")
    if points_per_axis < 2:
        raise DesignError("points_per_axis must be >= 2")
    validate_factor_set(factors)
    by_name = {f.name: f for f in factors}
    missing = [a for a in axes if a not in by_name]
    if missing:
        raise DesignError(f"axes not in factor set: {missing}")
    if len(set(axes)) != len(axes):
        raise DesignError("grid axes must be distinct")

    base = {f.name: f.base for f in factors}
    values = {
        a: [by_name[a].min + i * (by_name[a].max - by_name[a].min) / (points_per_axis - 1)
            for i in range(points_per_axis)]
        for a in axes
    }
    recipes = []
    if len(axes) == 1:
        for v in values[axes[0]]:
            assignment = dict(base)
            assignment[axes[0]] = v
            recipes.append(Recipe(len(recipes), assignment, design_tag=f"grid:{axes[0]}"))
    else:
        for v1 in values[axes[0]]:
            for v2 in values[axes[1]]:
                assignment = dict(base)
                assignment[axes[0]] = v1
                assignment[axes[1]] = v2
                recipes.append(Recipe(len(recipes), assignment,
                                      design_tag=f"grid:{axes[0]}x{axes[1]}"))
    meta = {
        "factors": [f.name for f in factors],
        "axes": list(axes),
        "points_per_axis": points_per_axis,
        "values": values,
    }
    return CampaignDesign("grid", tuple(recipes), meta)
