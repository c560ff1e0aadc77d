"""p-primary structure of window subgroups.

Socles, heights, maximal-height prefix witnesses, and the decomposition of a
mixed-order subgroup into its p-parts.  The socle G[p] is the subgroup of
elements killed by p, a vector space over the p-element field; the height of
a nonzero x in a p-group counts how often x can be divided by p inside the
group.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import InputError
from .intlinalg import IntMatrix, left_kernel_basis
from .window import (
    Element,
    ProductWindow,
    WindowSubgroup,
    membership,
    project,
    section,
    solve_in_subgroup,
)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _check_prime(p: int):
    if not _is_prime(p):
        raise InputError(f"{p} is not prime")


def p_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_p_group(g: WindowSubgroup, p: int) -> bool:
    e = g.exponent()
    while e % p == 0:
        e //= p
    return e == 1


@dataclass(frozen=True)
class SocleBasis:
    """A basis of G[p]: independent elements of order p spanning the socle."""

    prime: int
    basis: tuple[Element, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)


def socle_subgroup(g: WindowSubgroup, p: int) -> WindowSubgroup:
    """The subgroup { x in G : p*x == 0 }."""
    _check_prime(p)
    F = g.window.flat_length
    mods = g.window.flat_orders
    basis = g.basis
    # p*x vanishes iff every flat residue is divisible by m_f / gcd(m_f, p)
    t = [m // gcd(m, p) for m in mods]
    rows = [[basis[i][f] for f in range(F)] for i in range(F)]
    for j in range(F):
        row = [0] * F
        row[j] = t[j]
        rows.append(row)
    kernel = left_kernel_basis(IntMatrix.from_rows(rows))
    gens = []
    for v in kernel:
        flat = [0] * F
        for i in range(F):
            if v[i]:
                flat = [a + v[i] * b for a, b in zip(flat, basis[i])]
        gens.append(g.window.from_flat(flat))
    return WindowSubgroup(g.window, gens)


def _socle_coordinates(window: ProductWindow, p: int):
    """Flat factor positions with p dividing the modulus, and their half-moduli."""
    coords = []
    for f, m in enumerate(window.flat_orders):
        if m % p == 0:
            coords.append((f, m // p))
    return coords


def socle_vector(x: Element, p: int) -> tuple[int, ...]:
    """Coordinates of an order-dividing-p element over the p-element field."""
    coords = _socle_coordinates(x.window, p)
    out = []
    for f, half in coords:
        r = x.flat[f]
        if r % half:
            raise InputError("element is not killed by p")
        out.append((r // half) % p)
    # factors not divisible by p must carry residue 0
    for f, m in enumerate(x.window.flat_orders):
        if m % p and x.flat[f]:
            raise InputError("element is not killed by p")
    return tuple(out)


def _from_socle_vector(window: ProductWindow, p: int, vec) -> Element:
    coords = _socle_coordinates(window, p)
    flat = [0] * window.flat_length
    for (f, half), a in zip(coords, vec):
        flat[f] = (a % p) * half
    return window.from_flat(flat)


def _fp_rref(rows, p: int):
    """Reduced row echelon form over the p-element field; canonical."""
    mat = [list(r) for r in rows]
    ncols = len(mat[0]) if mat else 0
    pivots = []
    r = 0
    for j in range(ncols):
        pivot = None
        for i in range(r, len(mat)):
            if mat[i][j] % p:
                pivot = i
                break
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = pow(mat[r][j], -1, p)
        mat[r] = [(v * inv) % p for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][j] % p:
                c = mat[i][j]
                mat[i] = [(a - c * b) % p for a, b in zip(mat[i], mat[r])]
        pivots.append(j)
        r += 1
    return [row for row in mat[:r]], pivots


def socle(g: WindowSubgroup, p: int) -> SocleBasis:
    """A canonical basis of the socle G[p]."""
    _check_prime(p)
    sub = socle_subgroup(g, p)
    vecs = [socle_vector(x, p) for x in sub.canonical_generators]
    rref, _ = _fp_rref(vecs, p)
    basis = tuple(_from_socle_vector(g.window, p, v) for v in rref)
    return SocleBasis(prime=p, basis=basis)


def socle_dimension(g: WindowSubgroup, p: int) -> int:
    n = socle_subgroup(g, p).order()
    d = 0
    while n > 1:
        n //= p
        d += 1
    return d


def height(x: Element, g: WindowSubgroup, p: int) -> int:
    """Largest n such that p**n * y == x is solvable with y in the group.

    Defined for nonzero members of a p-group; zero is rejected because no
    finite value is faithful for it.
    """
    _check_prime(p)
    if x.is_zero():
        raise InputError("height of the zero element is undefined")
    if not membership(x, g):
        raise InputError("element does not belong to the subgroup")
    if not is_p_group(g, p):
        raise InputError("heights are defined inside p-groups")
    h = 0
    while g.scaled(p ** (h + 1)).contains(x):
        h += 1
    return h


def _candidate_cosets(x: Element, g: WindowSubgroup, i: int, n_i: int, p: int):
    """Elements of G_[1,n_i][p] with the same [1,i]-prefix as x, sorted."""
    inner = section(g, (1, n_i))
    if i + 1 <= n_i:
        free = socle_subgroup(section(g, (i + 1, n_i)), p)
        shifts = free.elements()
    else:
        shifts = (g.window.zero(),)
    return inner, sorted((x + s for s in shifts), key=lambda e: e.flat)


def max_height_prefix_witness(
    x: Element,
    i: int,
    g: WindowSubgroup,
    n_i: int,
    n_sequence=None,
) -> Element:
    """A prefix-preserving socle element of maximal height inside the window.

    Given x in G_[1,n_i][p] with a nonzero [1,i]-prefix, returns an element of
    G_[1,n_i][p] with the same [1,i]-prefix whose height inside G_[1,n_i]
    matches the height of x in G and is maximal among all such candidates.
    When the prefix below i vanishes and some n_j < i is known (passed via
    ``n_sequence``), heights are additionally realized inside G_[j+1,n_i].
    Ties are broken by the lexicographically least residue vector.
    """
    p = x.order()
    _check_prime(p)
    g.window.check_interval((i, n_i))
    if not membership(x, g):
        raise InputError("element does not belong to the subgroup")
    if any(c > n_i for c in x.support):
        raise InputError(f"element is not supported inside [1, {n_i}]")
    if x.restrict((1, i)).is_zero():
        raise InputError("the [1,i]-prefix of the element must be nonzero")
    if not is_p_group(g, p):
        raise InputError("witness search requires a p-group")

    target = height(x, g, p)
    inner, candidates = _candidate_cosets(x, g, i, n_i, p)

    deep = None
    if n_sequence and i >= 2 and x.restrict((1, i - 1)).is_zero():
        js = [j for j, nj in n_sequence.items() if nj < i]
        if js:
            j = max(js)
            deep = section(g, (j + 1, n_i))

    scored = []
    for cand in candidates:
        h_inner = height(cand, inner, p) if not cand.is_zero() else -1
        h_deep = height(cand, deep, p) if deep is not None and not cand.is_zero() else None
        scored.append((h_inner, h_deep, cand))
    best_h = max(s[0] for s in scored)
    pool = [s for s in scored if s[0] == best_h]
    # prefer candidates realizing the ambient height, then the deep-section height
    exact = [s for s in pool if s[0] == target and (s[1] is None or s[1] == target)]
    if exact:
        pool = exact
    return min(pool, key=lambda s: s[2].flat)[2]


@dataclass(frozen=True)
class PrimaryPart:
    """One p-part: the coordinates kept, the sub-window, and the image group."""

    prime: int
    coordinates: tuple[int, ...]  # 1-based coordinates with a p-power factor
    window: ProductWindow
    subgroup: WindowSubgroup
    # flat positions in the parent window, one per flat factor of the part
    flat_positions: tuple[int, ...]

    def embed(self, x: Element, parent: ProductWindow) -> Element:
        """Zero-pad a part element back into the parent window."""
        if x.window != self.window:
            raise InputError("element does not belong to this primary part")
        flat = [0] * parent.flat_length
        for pos, r in zip(self.flat_positions, x.flat):
            flat[pos] = r
        return parent.from_flat(flat)

    def restrict(self, x: Element) -> Element:
        """Project a parent-window element onto this part."""
        return self.window.from_flat([x.flat[pos] for pos in self.flat_positions])


@dataclass(frozen=True)
class PrimaryDecomposition:
    window: ProductWindow
    primes: tuple[int, ...]
    parts: tuple[PrimaryPart, ...]

    def part(self, p: int) -> PrimaryPart:
        for part in self.parts:
            if part.prime == p:
                return part
        raise InputError(f"no primary part for prime {p}")


def primary_decompose(g: WindowSubgroup) -> PrimaryDecomposition:
    """Split the subgroup into its p-parts along the prime-power factors.

    Every flat factor has prime-power order, so the p-part of an element is
    its restriction to the p-power factors.  The part groups multiply back to
    the original order.
    """
    window = g.window
    order = g.order()
    primes = tuple(p for p in window.primes() if order % p == 0)
    parts = []
    for p in primes:
        coords = []
        comps = []
        flats = []
        for i, comp in enumerate(window.components, start=1):
            start, _ = window.coord_slices[i - 1]
            kept = [
                (start + k, m)
                for k, m in enumerate(comp.factor_orders)
                if m % p == 0
            ]
            if kept:
                coords.append(i)
                comps.append(tuple(m for _, m in kept))
                flats.extend(pos for pos, _ in kept)
        sub_window = ProductWindow(tuple(comps))
        gens = []
        for gen in g.canonical_generators:
            gens.append(sub_window.from_flat([gen.flat[pos] for pos in flats]))
        parts.append(
            PrimaryPart(
                prime=p,
                coordinates=tuple(coords),
                window=sub_window,
                subgroup=WindowSubgroup(sub_window, gens),
                flat_positions=tuple(flats),
            )
        )
    return PrimaryDecomposition(window=window, primes=primes, parts=tuple(parts))
