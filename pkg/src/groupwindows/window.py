"""Finite windows of products of finite abelian groups.

A window is the truncation of a product of finite abelian groups to
coordinates 1..N.  Every coordinate group is given by its cyclic
decomposition into prime-power factors, so the whole window flattens to a
product of cyclic groups Z(m_1) x ... x Z(m_F).  Subgroups are presented by
generators and identified by a canonical lattice basis: the generators plus
the modulus relations span an integer lattice of full rank F, and the
canonical echelon basis of that lattice is the subgroup's identity card.

All coordinate indices in the public interface are 1-based and intervals are
inclusive, matching the certificate and file formats.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd, lcm, prod

from .errors import InputError, WindowScaleError
from .intlinalg import IntMatrix, left_kernel_basis, row_lattice_basis, solve_mixed_modulus

# Exact element scans refuse beyond this many elements.
ENUM_LIMIT = 1 << 20


def _prime_factor(n: int) -> tuple[int, int]:
    """Return (p, k) with n == p**k, or raise InputError."""
    if n < 2:
        raise InputError(f"factor order {n} is not a prime power")
    m = n
    p = None
    for q in range(2, n + 1):
        if q * q > m:
            if p is None:
                p = m
            elif m != 1 and m % p:
                raise InputError(f"factor order {n} is not a prime power")
            break
        if m % q == 0:
            p = q
            break
    while m % p == 0:
        m //= p
    if m != 1:
        raise InputError(f"factor order {n} is not a prime power")
    k = 0
    mm = n
    while mm > 1:
        mm //= p
        k += 1
    return p, k


@dataclass(frozen=True)
class ComponentGroup:
    """One coordinate group, a direct sum of cyclic prime-power factors."""

    factor_orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factor_orders", tuple(int(m) for m in self.factor_orders))
        for m in self.factor_orders:
            _prime_factor(m)

    @property
    def order(self) -> int:
        return prod(self.factor_orders) if self.factor_orders else 1

    def primes(self) -> set[int]:
        return {_prime_factor(m)[0] for m in self.factor_orders}


@dataclass(frozen=True)
class ProductWindow:
    """Coordinates 1..N, each carrying a ComponentGroup."""

    components: tuple[ComponentGroup, ...]

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, ComponentGroup) else ComponentGroup(tuple(c))
            for c in self.components
        )
        object.__setattr__(self, "components", comps)
        if len(comps) < 1:
            raise InputError("a window needs at least one coordinate")

    @property
    def length(self) -> int:
        return len(self.components)

    @cached_property
    def flat_orders(self) -> tuple[int, ...]:
        return tuple(m for c in self.components for m in c.factor_orders)

    @cached_property
    def coord_slices(self) -> tuple[tuple[int, int], ...]:
        """Per-coordinate (start, end) half-open slices into the flat vector."""
        slices = []
        pos = 0
        for c in self.components:
            slices.append((pos, pos + len(c.factor_orders)))
            pos += len(c.factor_orders)
        return tuple(slices)

    @property
    def flat_length(self) -> int:
        return len(self.flat_orders)

    def check_interval(self, interval) -> tuple[int, int]:
        lo, hi = interval
        if not (1 <= lo <= hi <= self.length):
            raise InputError(f"interval [{lo}, {hi}] not inside [1, {self.length}]")
        return lo, hi

    def flat_slice(self, interval) -> tuple[int, int]:
        lo, hi = self.check_interval(interval)
        return self.coord_slices[lo - 1][0], self.coord_slices[hi - 1][1]

    def subwindow(self, interval) -> "ProductWindow":
        lo, hi = self.check_interval(interval)
        return ProductWindow(self.components[lo - 1 : hi])

    def element(self, residues) -> "Element":
        """Build an element from per-coordinate residue sequences.

        Residues are reduced into the canonical range [0, m).
        """
        if len(residues) != self.length:
            raise InputError(
                f"expected residues for {self.length} coordinates, got {len(residues)}"
            )
        rows = []
        for i, (coord, comp) in enumerate(zip(residues, self.components), start=1):
            if len(coord) != len(comp.factor_orders):
                raise InputError(
                    f"coordinate {i}: expected {len(comp.factor_orders)} residues, "
                    f"got {len(coord)}"
                )
            rows.append(tuple(int(r) % m for r, m in zip(coord, comp.factor_orders)))
        return Element(self, tuple(rows))

    def from_flat(self, flat) -> "Element":
        if len(flat) != self.flat_length:
            raise InputError("flat residue vector has wrong length")
        rows = []
        for start, end in self.coord_slices:
            rows.append(tuple(int(r) % m for r, m in zip(flat[start:end], self.flat_orders[start:end])))
        return Element(self, tuple(rows))

    def zero(self) -> "Element":
        return Element(self, tuple((0,) * len(c.factor_orders) for c in self.components))

    def full_subgroup(self) -> "WindowSubgroup":
        gens = []
        for i, (start, end) in enumerate(self.coord_slices):
            for f in range(start, end):
                flat = [0] * self.flat_length
                flat[f] = 1
                gens.append(self.from_flat(flat))
        return WindowSubgroup(self, gens)

    def trivial_subgroup(self) -> "WindowSubgroup":
        return WindowSubgroup(self, ())

    def primes(self) -> tuple[int, ...]:
        ps = set()
        for c in self.components:
            ps |= c.primes()
        return tuple(sorted(ps))


@dataclass(frozen=True)
class Element:
    """A point of a window: one residue per cyclic factor, grouped by coordinate."""

    window: ProductWindow
    residues: tuple[tuple[int, ...], ...]

    @cached_property
    def flat(self) -> tuple[int, ...]:
        return tuple(r for coord in self.residues for r in coord)

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.flat)

    @cached_property
    def support(self) -> tuple[int, ...]:
        """1-based coordinates where the element is nonzero."""
        return tuple(
            i for i, coord in enumerate(self.residues, start=1) if any(coord)
        )

    def support_width(self) -> int:
        s = self.support
        return (s[-1] - s[0] + 1) if s else 0

    def order(self) -> int:
        orders = [
            m // gcd(m, r)
            for r, m in zip(self.flat, self.window.flat_orders)
            if r
        ]
        return lcm(*orders) if orders else 1

    def __add__(self, other: "Element") -> "Element":
        if other.window != self.window:
            raise InputError("cannot add elements of different windows")
        return self.window.from_flat([a + b for a, b in zip(self.flat, other.flat)])

    def __neg__(self) -> "Element":
        return self.window.from_flat([-a for a in self.flat])

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, k: int) -> "Element":
        return self.window.from_flat([k * a for a in self.flat])

    def __rmul__(self, k: int) -> "Element":
        return self.scale(k)

    def restrict(self, interval) -> "Element":
        """The projection of the element onto a coordinate interval."""
        lo, hi = self.window.check_interval(interval)
        sub = self.window.subwindow(interval)
        return Element(sub, self.residues[lo - 1 : hi])

    def embed(self, window: ProductWindow, interval) -> "Element":
        """Zero-pad a subwindow element back into ``window`` at ``interval``."""
        lo, hi = window.check_interval(interval)
        if window.subwindow(interval) != self.window:
            raise InputError("element does not match the target interval shape")
        rows = [tuple((0,) * len(c.factor_orders)) for c in window.components]
        rows[lo - 1 : hi] = list(self.residues)
        return Element(window, tuple(rows))


def element_order(g: Element) -> int:
    """Least n >= 1 with n*g == 0, the lcm of the coordinate residue orders."""
    return g.order()


class WindowSubgroup:
    """A subgroup of a window, identified by its canonical lattice basis.

    Two subgroups are equal exactly when their canonical bases agree, so the
    class is usable as a decidable stand-in for abstract subgroup equality.
    Instances are immutable; derived data (basis, element lists, scaled
    subgroups) is cached on first use.
    """

    def __init__(self, window: ProductWindow, generators=()):
        gens = tuple(generators)
        for g in gens:
            if not isinstance(g, Element) or g.window != window:
                raise InputError("generators must be elements of the subgroup's window")
        self.window = window
        self.generators = gens
        self._scaled_cache: dict[int, "WindowSubgroup"] = {}
        self._elements_cache: tuple[Element, ...] | None = None

    @cached_property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        """Canonical full-rank basis of the generator lattice plus relations."""
        F = self.window.flat_length
        mods = self.window.flat_orders
        rows = [list(g.flat) for g in self.generators]
        for f in range(F):
            row = [0] * F
            row[f] = mods[f]
            rows.append(row)
        return tuple(tuple(r) for r in row_lattice_basis(rows, F))

    @cached_property
    def canonical_generators(self) -> tuple[Element, ...]:
        """Basis rows reduced modulo the factor orders, zero rows dropped."""
        out = []
        for row in self.basis:
            g = self.window.from_flat(row)
            if not g.is_zero():
                out.append(g)
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, WindowSubgroup):
            return NotImplemented
        return self.window == other.window and self.basis == other.basis

    def __hash__(self):
        return hash((self.window, self.basis))

    def __repr__(self):
        return f"WindowSubgroup(order={self.order()}, window={self.window.flat_orders})"

    def order(self) -> int:
        covolume = prod(row[i] for i, row in enumerate(self.basis))
        total = prod(self.window.flat_orders) if self.window.flat_orders else 1
        q, r = divmod(total, covolume)
        assert r == 0
        return q

    def is_trivial(self) -> bool:
        return self.order() == 1

    def exponent(self) -> int:
        """Least n with n*g == 0 for every g in the subgroup."""
        orders = [g.order() for g in self.canonical_generators]
        return lcm(*orders) if orders else 1

    def contains(self, x: Element) -> bool:
        if x.window != self.window:
            raise InputError("element and subgroup live in different windows")
        vec = list(x.flat)
        for idx, row in enumerate(self.basis):
            pivot = row[idx]
            if vec[idx] % pivot:
                return False
            q = vec[idx] // pivot
            if q:
                vec = [a - q * b for a, b in zip(vec, row)]
        return not any(vec)

    def coset_representative(self, x: Element) -> Element:
        """Canonical representative of x modulo this subgroup."""
        if x.window != self.window:
            raise InputError("element and subgroup live in different windows")
        vec = list(x.flat)
        for idx, row in enumerate(self.basis):
            q = vec[idx] // row[idx]
            if q:
                vec = [a - q * b for a, b in zip(vec, row)]
        return self.window.from_flat(vec)

    def scaled(self, k: int) -> "WindowSubgroup":
        """The subgroup k*G = { k*g : g in G }."""
        if k < 0:
            k = -k
        got = self._scaled_cache.get(k)
        if got is None:
            got = WindowSubgroup(self.window, [g.scale(k) for g in self.canonical_generators])
            self._scaled_cache[k] = got
        return got

    def elements(self, limit: int = ENUM_LIMIT) -> tuple[Element, ...]:
        """All elements, sorted by flat residue vector.  Exact and cached."""
        if self._elements_cache is not None:
            return self._elements_cache
        n = self.order()
        if n > limit:
            raise WindowScaleError(
                f"subgroup has {n} elements, beyond the exact-scan limit {limit}"
            )
        mods = self.window.flat_orders
        gens = [g.flat for g in self.canonical_generators]
        seen = {tuple(0 for _ in mods)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for v in frontier:
                for g in gens:
                    w = tuple((a + b) % m for a, b, m in zip(v, g, mods))
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        assert len(seen) == n
        elems = tuple(self.window.from_flat(v) for v in sorted(seen))
        self._elements_cache = elems
        return elems

    def presentation_margin(self) -> int:
        """Max support width over the given and the canonical generators, minimized.

        This is the width of the narrowest generator presentation at hand; it
        bounds how far window-boundary effects can reach.
        """
        widths_given = [g.support_width() for g in self.generators if not g.is_zero()]
        widths_canon = [g.support_width() for g in self.canonical_generators]
        candidates = []
        if widths_given:
            candidates.append(max(widths_given))
        if widths_canon:
            candidates.append(max(widths_canon))
        return min(candidates) if candidates else 0


def project(g: WindowSubgroup, interval) -> WindowSubgroup:
    """The image of the subgroup under projection onto a coordinate interval."""
    g.window.check_interval(interval)
    sub = g.window.subwindow(interval)
    gens = [x.restrict(interval) for x in g.canonical_generators]
    return WindowSubgroup(sub, gens)


def section(g: WindowSubgroup, interval) -> WindowSubgroup:
    """Members of the subgroup supported inside ``interval``, in the full window.

    This is the kernel of the projection onto the complementary coordinates.
    """
    lo, hi = g.window.check_interval(interval)
    F = g.window.flat_length
    mods = g.window.flat_orders
    s, e = g.window.flat_slice(interval)
    compl = [f for f in range(F) if f < s or f >= e]
    if not compl:
        return WindowSubgroup(g.window, g.canonical_generators)
    basis = g.basis
    t = [mods[f] for f in compl]
    T = len(compl)
    rows = [[basis[i][f] for f in compl] for i in range(F)]
    for j in range(T):
        row = [0] * T
        row[j] = t[j]
        rows.append(row)
    kernel = left_kernel_basis(IntMatrix.from_rows(rows))
    gens = []
    for v in kernel:
        flat = [0] * F
        for i in range(F):
            c = v[i]
            if c:
                row = basis[i]
                flat = [a + c * b for a, b in zip(flat, row)]
        gens.append(g.window.from_flat(flat))
    return WindowSubgroup(g.window, gens)


def membership(x: Element, g: WindowSubgroup) -> bool:
    """True when x is an integer combination of the generators modulo the moduli."""
    return g.contains(x)


def intersect_with_sum(g: WindowSubgroup, interval) -> WindowSubgroup:
    """The members of the subgroup supported inside ``interval``.

    Same computation as ``section``; callers use this name when they mean the
    intersection with the direct sum over the interval.
    """
    return section(g, interval)


def membership_coefficients(x: Element, g: WindowSubgroup) -> list[int] | None:
    """Coefficients expressing x over the canonical generators, or None."""
    if x.window != g.window:
        raise InputError("element and subgroup live in different windows")
    gens = g.canonical_generators
    if not gens:
        return [] if x.is_zero() else None
    A = IntMatrix.from_rows([[gen.flat[f] for gen in gens] for f in range(g.window.flat_length)])
    return solve_mixed_modulus(A, list(x.flat), list(g.window.flat_orders))


def combine(g: WindowSubgroup, coefficients) -> Element:
    """The combination sum(c_j * generator_j) over the canonical generators."""
    gens = g.canonical_generators
    if len(coefficients) != len(gens):
        raise InputError("one coefficient per canonical generator required")
    acc = g.window.zero()
    for c, gen in zip(coefficients, gens):
        if c:
            acc = acc + gen.scale(c)
    return acc


def sum_subgroups(a: WindowSubgroup, b: WindowSubgroup) -> WindowSubgroup:
    if a.window != b.window:
        raise InputError("cannot sum subgroups of different windows")
    return WindowSubgroup(a.window, a.canonical_generators + b.canonical_generators)


def span(window: ProductWindow, elements) -> WindowSubgroup:
    return WindowSubgroup(window, tuple(elements))


def solve_in_subgroup(g: WindowSubgroup, target: Element, scale: int = 1) -> Element | None:
    """Find y in the subgroup with scale*y == target, canonically chosen."""
    if target.window != g.window:
        raise InputError("element and subgroup live in different windows")
    gens = g.canonical_generators
    if not gens:
        return g.window.zero() if target.is_zero() else None
    A = IntMatrix.from_rows(
        [[scale * gen.flat[f] for gen in gens] for f in range(g.window.flat_length)]
    )
    coeffs = solve_mixed_modulus(A, list(target.flat), list(g.window.flat_orders))
    if coeffs is None:
        return None
    return combine(g, coeffs)
