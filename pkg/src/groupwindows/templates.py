"""Shift-style template descriptions of window groups.

A template describes a family of groups, one per window length: a periodic
component layout, a list of fixed generators with explicit finite support,
and shifted generator patterns that are stamped out at start, start+stride,
start+2*stride, ... as long as they fit inside the window.

Unrolling a template at window length N gives a concrete WindowSubgroup.
The window closure of a template at N is the projection onto [1, N] of the
unroll at a slightly longer window; it captures every prefix the family can
match, including those that need generators reaching past N.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .window import ComponentGroup, Element, ProductWindow, WindowSubgroup, project


@dataclass(frozen=True)
class FixedGenerator:
    """A generator with explicit support: sorted (coordinate, residues) pairs."""

    support: tuple[tuple[int, tuple[int, ...]], ...]

    def max_coordinate(self) -> int:
        return max(c for c, _ in self.support) if self.support else 0

    def width(self) -> int:
        if not self.support:
            return 0
        coords = [c for c, _ in self.support]
        return max(coords) - min(coords) + 1


@dataclass(frozen=True)
class ShiftedGenerator:
    """A pattern stamped at start, start+stride, ...; offsets are 0-based."""

    start: int
    stride: int
    pattern: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        if self.stride < 1:
            raise InputError("shifted generator stride must be >= 1")
        if self.start < 1:
            raise InputError("shifted generator start must be >= 1")
        for off, _ in self.pattern:
            if off < 0:
                raise InputError("pattern offsets must be >= 0")

    def width(self) -> int:
        if not self.pattern:
            return 0
        offs = [o for o, _ in self.pattern]
        return max(offs) - min(offs) + 1

    def max_offset(self) -> int:
        return max((o for o, _ in self.pattern), default=0)


@dataclass(frozen=True)
class TemplateSpec:
    """Periodic components plus fixed and shifted generator families."""

    period: int
    component_orders: tuple[tuple[int, ...], ...]
    fixed_generators: tuple[FixedGenerator, ...] = ()
    shifted_generators: tuple[ShiftedGenerator, ...] = ()

    def __post_init__(self):
        if self.period < 1:
            raise InputError("component template period must be >= 1")
        if len(self.component_orders) != self.period:
            raise InputError(
                f"component template lists {len(self.component_orders)} coordinate "
                f"shapes but declares period {self.period}"
            )

    def component_at(self, coordinate: int) -> tuple[int, ...]:
        return self.component_orders[(coordinate - 1) % self.period]

    def window(self, n: int) -> ProductWindow:
        if n < 1:
            raise InputError("window length must be >= 1")
        return ProductWindow(tuple(ComponentGroup(self.component_at(i)) for i in range(1, n + 1)))

    def margin(self) -> int:
        """Maximal generator support width; how far boundary effects reach."""
        widths = [g.width() for g in self.fixed_generators]
        widths += [s.width() for s in self.shifted_generators]
        return max(widths, default=0)


@dataclass(frozen=True)
class UnrollResult:
    window: ProductWindow
    group: WindowSubgroup
    skipped: tuple[tuple[str, int], ...] = ()  # (kind or pattern index, start coord)


def _place(window: ProductWindow, placements) -> Element:
    rows = [list((0,) * len(c.factor_orders)) for c in window.components]
    for coord, residues in placements:
        comp = window.components[coord - 1]
        if len(residues) != len(comp.factor_orders):
            raise InputError(
                f"coordinate {coord}: expected {len(comp.factor_orders)} residues, "
                f"got {len(residues)}"
            )
        rows[coord - 1] = [int(r) for r in residues]
    return window.element(rows)


def unroll_template(template: TemplateSpec, n: int) -> UnrollResult:
    """Materialize the template at window length n.

    Fixed generators come first, then shifted instances ordered by start
    coordinate and pattern index.  Instances whose support does not fit in
    [1, n] are skipped and recorded.
    """
    for fg in template.fixed_generators:
        if fg.max_coordinate() > n:
            raise InputError(
                f"window length {n} is smaller than a fixed generator support "
                f"reaching coordinate {fg.max_coordinate()}"
            )
    window = template.window(n)
    gens = [_place(window, fg.support) for fg in template.fixed_generators]
    skipped = []
    instances = []
    for idx, sg in enumerate(template.shifted_generators):
        start = sg.start
        while start <= n:
            top = start + sg.max_offset()
            if top > n:
                skipped.append((f"shifted[{idx}]", start))
            else:
                instances.append((start, idx, sg))
            start += sg.stride
    instances.sort(key=lambda t: (t[0], t[1]))
    for start, _idx, sg in instances:
        gens.append(_place(window, [(start + off, res) for off, res in sg.pattern]))
    return UnrollResult(window=window, group=WindowSubgroup(window, gens), skipped=tuple(skipped))


def closure_window(template: TemplateSpec, n: int, lookahead: int | None = None) -> UnrollResult:
    """The window closure of the template at length n.

    Computed as the projection onto [1, n] of the unroll at n + lookahead,
    where the default lookahead is the template margin.  Generators beyond
    the window can then still contribute their visible prefixes.
    """
    if lookahead is None:
        lookahead = max(template.margin(), 1)
    big = unroll_template(template, n + lookahead)
    projected = project(big.group, (1, n))
    return UnrollResult(window=projected.window, group=projected, skipped=big.skipped)
