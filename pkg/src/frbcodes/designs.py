"""Resolvable transversal designs and affine planes over finite fields.

Point and block ids are dense integers with fixed orderings:

* TD(ell, h): point ``g*h + e`` is field element ``e`` in group ``g``;
  block ``a*h + b`` is ``{(g, a*c_g + b)}`` where ``c_g`` is the field
  element with index ``g``. Resolution class ``a`` holds blocks
  ``a*h .. a*h + h - 1``.
* A(q): point ``x*q + y`` is ``(x, y)``; line ``a*q + b`` is
  ``y = a*x + b`` and line ``q*q + c`` is the vertical ``x = c``.
  Parallel class ``a < q`` holds the slope-``a`` lines, class ``q`` the
  verticals.

When ``h`` is not a prime power, TD(ell, h) with ``ell <= 3`` is still
built from the cyclic group Z_h (a Latin square); such designs may lack a
resolution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

from .errors import EllTooLarge, NotPrimePower
from .gf import field_new, is_prime_power
from .incidence import BinaryIncidenceMatrix

# (a-coefficient, b-coefficient) per group for the cyclic fallback; any two
# rows are independent over Z_h for every h.
_CYCLIC_COEFFS = ((0, 1), (1, 1), (1, 2))


@dataclass(frozen=True)
class TransversalDesign:
    ell: int
    h: int
    points: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]
    blocks: tuple[tuple[int, ...], ...]
    resolution: tuple[tuple[int, ...], ...] | None = None
    construction: str = "field"

    def point_label(self, p: int) -> tuple[int, int]:
        return divmod(p, self.h)

    @property
    def resolvable(self) -> bool:
        return self.resolution is not None


@dataclass(frozen=True)
class AffinePlane:
    q: int
    points: tuple[int, ...]
    lines: tuple[tuple[int, ...], ...]
    parallel_classes: tuple[tuple[int, ...], ...]

    def point_label(self, p: int) -> tuple[int, int]:
        return divmod(p, self.q)


def _resolution_by_slope(blocks, h: int, n_points: int):
    classes = tuple(tuple(range(a * h, (a + 1) * h)) for a in range(h))
    for cls in classes:
        seen = [pt for b in cls for pt in blocks[b]]
        if len(seen) != n_points or len(set(seen)) != n_points:
            return None
    return classes


def build_td(ell: int, h: int) -> TransversalDesign:
    """Build TD(ell, h); resolvable whenever ``h`` is a prime power."""
    if ell < 2:
        raise ValueError("ell must be at least 2")
    if ell > h:
        raise EllTooLarge(f"ell exceeds h (ell={ell}, h={h})")
    if is_prime_power(h):
        F = field_new(h)
        blocks = tuple(
            tuple(g * h + F.add(F.mul(a, g), b) for g in range(ell))
            for a in range(h)
            for b in range(h)
        )
        construction = "field"
    elif ell <= len(_CYCLIC_COEFFS):
        blocks = tuple(
            tuple(g * h + (u * a + v * b) % h for g, (u, v) in enumerate(_CYCLIC_COEFFS[:ell]))
            for a in range(h)
            for b in range(h)
        )
        construction = "cyclic"
    else:
        raise NotPrimePower(f"h={h} is not a prime power (only ell <= 3 is supported then)")
    points = tuple(range(ell * h))
    groups = tuple(tuple(range(g * h, (g + 1) * h)) for g in range(ell))
    return TransversalDesign(
        ell, h, points, groups, blocks, _resolution_by_slope(blocks, h, len(points)), construction
    )


def build_affine(q: int) -> AffinePlane:
    F = field_new(q)
    lines = [
        tuple(sorted(x * q + F.add(F.mul(a, x), b) for x in range(q)))
        for a in range(q)
        for b in range(q)
    ]
    lines += [tuple(c * q + y for y in range(q)) for c in range(q)]
    classes = tuple(tuple(range(a * q, (a + 1) * q)) for a in range(q + 1))
    return AffinePlane(q, tuple(range(q * q)), tuple(lines), classes)


class AxiomCheck(NamedTuple):
    name: str
    passed: bool
    counterexample: object = None


class ValidationReport(NamedTuple):
    family: str
    checks: list[AxiomCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def to_json_obj(self) -> dict:
        return {
            "family": self.family,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "counterexample": c.counterexample}
                for c in self.checks
            ],
        }


def _first(it):
    return next(iter(it), None)


def _pair_counts(blocks, n_points):
    counts = {}
    for blk in blocks:
        for pair in combinations(sorted(blk), 2):
            counts[pair] = counts.get(pair, 0) + 1
    return counts


def _replication(blocks, n_points):
    rep = [0] * n_points
    for blk in blocks:
        for p in blk:
            rep[p] += 1
    return rep


def _resolution_check(classes, blocks, points, name):
    if classes is None:
        return None
    used = sorted(b for cls in classes for b in cls)
    if used != list(range(len(blocks))):
        return AxiomCheck(name, False, {"reason": "classes do not partition the blocks"})
    for ci, cls in enumerate(classes):
        seen = sorted(p for b in cls for p in blocks[b])
        if seen != sorted(points):
            return AxiomCheck(name, False, {"class": ci})
    return AxiomCheck(name, True)


def validate_td(td: TransversalDesign) -> ValidationReport:
    ell, h = td.ell, td.h
    pts = set(td.points)
    group_of = {}
    for gi, grp in enumerate(td.groups):
        for p in grp:
            group_of.setdefault(p, gi)
    checks = [AxiomCheck("points", len(pts) == ell * h == len(td.points), {"count": len(td.points)})]

    bad_groups = [gi for gi, g in enumerate(td.groups) if len(g) != h]
    flat = sorted(p for g in td.groups for p in g)
    partition_ok = len(td.groups) == ell and not bad_groups and flat == sorted(pts)
    checks.append(AxiomCheck("groups_partition", partition_ok, None if partition_ok else {"groups": bad_groups}))

    bad_size = _first(i for i, b in enumerate(td.blocks) if len(set(b)) != ell or not set(b) <= pts)
    checks.append(AxiomCheck("block_size", bad_size is None, None if bad_size is None else {"block": bad_size}))

    bad_meet = None
    for i, blk in enumerate(td.blocks):
        hits = [0] * len(td.groups)
        for p in blk:
            if p in group_of:
                hits[group_of[p]] += 1
        if any(x != 1 for x in hits):
            bad_meet = {"block": i, "group_hits": hits}
            break
    checks.append(AxiomCheck("block_meets_each_group_once", bad_meet is None, bad_meet))

    counts = _pair_counts(td.blocks, len(td.points))
    bad_pair = None
    for a, b in combinations(sorted(pts), 2):
        c = counts.get((a, b), 0)
        want = 0 if group_of.get(a) == group_of.get(b) else 1
        if c != want:
            bad_pair = {"pair": [a, b], "blocks": c, "expected": want}
            break
    checks.append(AxiomCheck("pair_in_one_block", bad_pair is None, bad_pair))

    checks.append(AxiomCheck("block_count", len(td.blocks) == h * h, {"count": len(td.blocks)}))
    rep = _replication(td.blocks, len(td.points))
    bad_rep = _first(p for p, r in enumerate(rep) if r != h)
    checks.append(AxiomCheck("replication", bad_rep is None, None if bad_rep is None else {"point": bad_rep, "blocks": rep[bad_rep]}))

    res = _resolution_check(td.resolution, td.blocks, td.points, "resolution")
    if res is not None:
        checks.append(res)
    return ValidationReport("td", checks)


def validate_affine(ap: AffinePlane) -> ValidationReport:
    q = ap.q
    pts = set(ap.points)
    checks = [AxiomCheck("points", len(pts) == q * q == len(ap.points), {"count": len(ap.points)})]
    checks.append(AxiomCheck("line_count", len(ap.lines) == q * (q + 1), {"count": len(ap.lines)}))
    bad_size = _first(i for i, ln in enumerate(ap.lines) if len(set(ln)) != q or not set(ln) <= pts)
    checks.append(AxiomCheck("line_size", bad_size is None, None if bad_size is None else {"line": bad_size}))
    counts = _pair_counts(ap.lines, len(ap.points))
    bad_pair = _first((a, b) for a, b in combinations(sorted(pts), 2) if counts.get((a, b), 0) != 1)
    checks.append(
        AxiomCheck(
            "pair_on_one_line",
            bad_pair is None,
            None if bad_pair is None else {"pair": list(bad_pair), "lines": counts.get(bad_pair, 0)},
        )
    )
    ok_classes = len(ap.parallel_classes) == q + 1 and all(len(c) == q for c in ap.parallel_classes)
    checks.append(AxiomCheck("class_shape", ok_classes, None if ok_classes else {"classes": len(ap.parallel_classes)}))
    checks.append(_resolution_check(ap.parallel_classes, ap.lines, ap.points, "parallel_classes"))
    return ValidationReport("affine", checks)


def td_incidence(td: TransversalDesign) -> BinaryIncidenceMatrix:
    """Points x blocks; column ``j`` is the indicator of block ``j``."""
    rows = [set() for _ in td.points]
    for j, blk in enumerate(td.blocks):
        for p in blk:
            rows[p].add(j)
    return BinaryIncidenceMatrix.from_supports(len(td.blocks), rows)


def affine_incidence(ap: AffinePlane) -> BinaryIncidenceMatrix:
    rows = [set() for _ in ap.points]
    for j, ln in enumerate(ap.lines):
        for p in ln:
            rows[p].add(j)
    return BinaryIncidenceMatrix.from_supports(len(ap.lines), rows)


def to_json_obj(design) -> dict:
    if isinstance(design, TransversalDesign):
        return {
            "family": "td",
            "params": {"ell": design.ell, "h": design.h, "construction": design.construction},
            "points": [[p, *design.point_label(p)] for p in design.points],
            "groups": [list(g) for g in design.groups],
            "classes": None if design.resolution is None else [list(c) for c in design.resolution],
            "blocks": [list(b) for b in design.blocks],
        }
    return {
        "family": "affine",
        "params": {"q": design.q},
        "points": [[p, *design.point_label(p)] for p in design.points],
        "classes": [list(c) for c in design.parallel_classes],
        "blocks": [list(b) for b in design.lines],
    }


def to_json(design) -> str:
    return json.dumps(to_json_obj(design))


def from_json_obj(obj: dict):
    blocks = tuple(tuple(b) for b in obj["blocks"])
    points = tuple(p[0] for p in obj["points"])
    classes = obj.get("classes")
    classes = None if classes is None else tuple(tuple(c) for c in classes)
    if obj["family"] == "td":
        prm = obj["params"]
        return TransversalDesign(
            prm["ell"], prm["h"], points, tuple(tuple(g) for g in obj["groups"]),
            blocks, classes, prm.get("construction", "field"),
        )
    if obj["family"] == "affine":
        return AffinePlane(obj["params"]["q"], points, blocks, classes)
    raise ValueError(f"unknown design family {obj['family']!r}")


def incidence(design) -> BinaryIncidenceMatrix:
    if isinstance(design, TransversalDesign):
        return td_incidence(design)
    return affine_incidence(design)
