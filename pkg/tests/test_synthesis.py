import random
from itertools import product as iproduct
from math import prod

import pytest

from groupwindows import (
    Block,
    Encoder,
    GeneratingSet,
    WindowSubgroup,
    check_implicit_direct_product,
    closure_window,
    encode,
    height,
    order_controllability_certificate,
    represent,
    span,
    synthesize,
    synthesize_p,
    unroll_template,
    verify_block_properties,
    verify_isomorphic_encoder,
)
from groupwindows.errors import InputError

from conftest import random_staggered_group, subgroup, window_of
import oracles


def _synth(g, p):
    cert = order_controllability_certificate(g)
    return synthesize_p(g, p, cert), cert


def test_synthesize_rectangular_z4_z2():
    w = window_of([4], [2])
    full = w.full_subgroup()
    gs, _ = _synth(full, 2)
    assert [(b.d, b.size) for b in gs.blocks] == [(1, 1), (2, 1)]
    assert [y.flat for y in gs.generators] == [(1, 0), (0, 1)]
    assert gs.heights == (1, 0)
    assert gs.determined
    assert verify_block_properties(gs, full).passed()
    assert verify_isomorphic_encoder(gs, full)
    assert bool(check_implicit_direct_product(gs, full))


def test_synthesize_requires_matching_certificate():
    w = window_of([4], [2])
    full = w.full_subgroup()
    cert = order_controllability_certificate(full)
    with pytest.raises(InputError):
        synthesize_p(full, 3, cert)  # not a 3-group
    from groupwindows import is_rectangular

    with pytest.raises(InputError):
        synthesize_p(full, 2, is_rectangular(full))  # wrong property


def test_synthesize_running_example_closure(shift_template):
    c8 = closure_window(shift_template, 8).group
    gs, cert = _synth(c8, 2)
    assert cert.holds()
    assert gs.determined
    assert [(b.d, b.size) for b in gs.blocks] == [(i, 1) for i in range(1, 9)]
    assert gs.heights == (0, 1, 1, 1, 1, 1, 1, 1)
    report = verify_block_properties(gs, c8)
    assert report.passed(), report.failures()
    assert verify_isomorphic_encoder(gs, c8)
    assert bool(check_implicit_direct_product(gs, c8))


def test_raw_template_family_fails_on_the_closure(shift_template):
    # the plain unroll generators do not encode the closure: the choice of
    # generating set matters
    c8 = closure_window(shift_template, 8).group
    g8 = unroll_template(shift_template, 8).group
    raw_x = [y.scale(2) for y in g8.generators]
    raw_h = [height(y.scale(2), c8, 2) for y in g8.generators]
    raw = GeneratingSet(
        prime=2,
        blocks=(Block(d=1, size=len(raw_x)),),
        socle_elements=tuple(raw_x),
        generators=tuple(g8.generators),
        heights=tuple(raw_h),
        n_sequence={i: min(i + 1, 8) for i in range(1, 9)},
    )
    assert not verify_isomorphic_encoder(raw, c8)
    assert not bool(check_implicit_direct_product(raw, c8))


def test_synthesize_random_staggered_spans_the_group():
    rng = random.Random(9090)
    done = 0
    while done < 8:
        p = rng.choice([2, 3])
        g = random_staggered_group(rng, p)
        if g is None:
            continue
        cert = order_controllability_certificate(g)
        if not cert.holds():
            continue
        gs = synthesize_p(g, p, cert)
        assert span(g.window, gs.generators) == g
        done += 1


def test_verify_block_properties_flags_tampered_height():
    w = window_of([4], [2])
    full = w.full_subgroup()
    gs, _ = _synth(full, 2)
    # lower the first socle element to a shorter lift: (d) must fail
    tampered = GeneratingSet(
        prime=2,
        blocks=gs.blocks,
        socle_elements=gs.socle_elements,
        generators=gs.generators,
        heights=(0,) + gs.heights[1:],
        n_sequence=gs.n_sequence,
    )
    report = verify_block_properties(tampered, full)
    assert not report.passed()
    assert "d" in report.failures() or "e" in report.failures()


def test_verify_block_properties_hand_built_generating_set():
    # hand-build the canonical factor generating set of Z4 x Z2 and cross-check
    # the socle by enumeration
    w = window_of([4], [2])
    full = w.full_subgroup()
    x1, x2 = w.element([[2], [0]]), w.element([[0], [1]])
    y1, y2 = w.element([[1], [0]]), w.element([[0], [1]])
    gs = GeneratingSet(
        prime=2,
        blocks=(Block(d=1, size=1), Block(d=2, size=1)),
        socle_elements=(x1, x2),
        generators=(y1, y2),
        heights=(1, 0),
        n_sequence={1: 1, 2: 2},
    )
    report = verify_block_properties(gs, full)
    assert report.passed(), report.failures()
    socle_span = oracles.naive_span([(2, 0), (0, 1)], [4, 2])
    full_span = oracles.naive_span([(1, 0), (0, 1)], [4, 2])
    assert socle_span == oracles.naive_socle(full_span, [4, 2], 2)


def test_encode_examples():
    w = window_of([4], [2])
    full = w.full_subgroup()
    gs, _ = _synth(full, 2)
    enc = Encoder(group=full, generating_set=gs)
    assert encode(enc, [0, 0]).is_zero()
    assert encode(enc, [1, 0]).flat == gs.generators[0].flat
    with pytest.raises(InputError):
        encode(enc, [4, 0])
    with pytest.raises(InputError):
        encode(enc, [1])
    # random coefficients match an independent summation
    rng = random.Random(1)
    mods = list(w.flat_orders)
    for _ in range(20):
        coeffs = [rng.randrange(o) for o in gs.orders]
        got = encode(enc, coeffs)
        flat = [0] * len(mods)
        for k, y in zip(coeffs, gs.generators):
            flat = [(a + k * b) % m for a, b, m in zip(flat, y.flat, mods)]
        assert got.flat == tuple(flat)


def test_represent_examples():
    w = window_of([4], [2])
    full = w.full_subgroup()
    gs, _ = _synth(full, 2)
    enc = Encoder(group=full, generating_set=gs)
    assert represent(w.zero(), enc) == [0, 0]
    z = gs.generators[0] + gs.generators[1].scale(1)
    assert represent(z, enc) == [1, 1]
    with pytest.raises(InputError):
        represent(window_of([4], [2], [2]).zero(), enc)
    for z in full.elements():
        coeffs = represent(z, enc)
        assert encode(enc, coeffs).flat == z.flat


def test_verify_isomorphic_encoder_dependent_generator_appended():
    w = window_of([4], [2])
    full = w.full_subgroup()
    gs, _ = _synth(full, 2)
    y_extra = gs.generators[0].scale(2)
    padded = GeneratingSet(
        prime=2,
        blocks=gs.blocks + (Block(d=2, size=1),),
        socle_elements=gs.socle_elements + (y_extra,),
        generators=gs.generators + (y_extra,),
        heights=gs.heights + (0,),
        n_sequence=gs.n_sequence,
    )
    assert not verify_isomorphic_encoder(padded, full)


def test_block_minimum_height_law():
    # inside one block, the height of a combination is the least height among
    # the touched generators; checked by enumeration of coefficient patterns
    rng = random.Random(606)
    done = 0
    while done < 6:
        p = rng.choice([2, 3])
        g = random_staggered_group(rng, p, max_order=1 << 9)
        if g is None:
            continue
        cert = order_controllability_certificate(g)
        if not cert.holds():
            continue
        gs = synthesize_p(g, p, cert)
        if not gs.determined:
            continue
        counts = gs.block_counts()
        for k, block in enumerate(gs.blocks, start=1):
            lo, hi = counts[k - 1], counts[k]
            xs = gs.socle_elements[lo:hi]
            hs = gs.heights[lo:hi]
            for coeffs in iproduct(*[range(p) for _ in xs]):
                if not any(coeffs):
                    continue
                z = g.window.zero()
                for c, x in zip(coeffs, xs):
                    if c:
                        z = z + x.scale(c)
                if z.is_zero():
                    continue
                expect = min(h for c, h in zip(coeffs, hs) if c)
                assert height(z, g, p) == expect
        done += 1


def test_height_preserved_in_generated_subgroup():
    # heights inside the span of the lifted generators agree with heights in
    # the whole group, on the span of the socle elements
    rng = random.Random(707)
    done = 0
    while done < 6:
        p = rng.choice([2, 3])
        g = random_staggered_group(rng, p, max_order=1 << 9)
        if g is None:
            continue
        cert = order_controllability_certificate(g)
        if not cert.holds():
            continue
        gs = synthesize_p(g, p, cert)
        if not gs.determined:
            continue
        y_span = span(g.window, gs.generators)
        x_span = span(g.window, gs.socle_elements)
        for z in x_span.elements():
            if z.is_zero():
                continue
            assert height(z, g, p) == height(z, y_span, p)
        done += 1


def test_kernel_triviality_digit_scan():
    rng = random.Random(11011)
    done = 0
    while done < 5:
        p = rng.choice([2, 3])
        g = random_staggered_group(rng, p, max_order=1 << 8)
        if g is None:
            continue
        cert = order_controllability_certificate(g)
        if not cert.holds():
            continue
        gs = synthesize_p(g, p, cert)
        if not gs.determined or prod(gs.orders) > 1 << 10:
            continue
        zero = g.window.zero().flat
        for combo in iproduct(*[range(o) for o in gs.orders]):
            if not any(combo):
                continue
            acc = g.window.zero()
            for k, y in zip(combo, gs.generators):
                if k:
                    acc = acc + y.scale(k)
            assert acc.flat != zero
        done += 1


def test_finite_support_members_lie_in_generator_span():
    rng = random.Random(31337)
    done = 0
    while done < 8:
        p = rng.choice([2, 3])
        g = random_staggered_group(rng, p)
        if g is None:
            continue
        cert = order_controllability_certificate(g)
        if not cert.holds():
            continue
        gs = synthesize_p(g, p, cert)
        y_span = span(g.window, gs.generators)
        assert y_span == g
        done += 1


def test_generating_set_determinism():
    rng = random.Random(500)
    g = None
    while g is None:
        g = random_staggered_group(rng, 2)
        if g is not None and not order_controllability_certificate(g).holds():
            g = None
    cert = order_controllability_certificate(g)
    a = synthesize_p(g, 2, cert)
    b = synthesize_p(
        WindowSubgroup(g.window, g.generators), 2, order_controllability_certificate(g)
    )
    assert [x.flat for x in a.socle_elements] == [x.flat for x in b.socle_elements]
    assert [y.flat for y in a.generators] == [y.flat for y in b.generators]
    assert a.heights == b.heights
    assert [(bl.d, bl.size) for bl in a.blocks] == [(bl.d, bl.size) for bl in b.blocks]


def test_multi_prime_synthesize_crt_window():
    w = window_of([2, 3])
    res = synthesize(w.full_subgroup())
    assert res.verdicts["isomorphic_encoder"]
    assert res.verdicts["implicit_direct_product"]
    assert {p: gs.orders for p, gs in res.generating_sets.items()} == {2: (2,), 3: (3,)}
    for z in w.full_subgroup().elements():
        cmap = res.combined.represent(z)
        assert res.combined.encode(cmap).flat == z.flat


def test_multi_prime_synthesize_distinct_prime_window():
    w = window_of([2], [3], [5])
    full = w.full_subgroup()
    seen = {}
    for a in full.elements():
        for b in full.elements():
            sub = WindowSubgroup(w, [a, b])
            seen[sub.basis] = sub
    for sub in seen.values():
        res = synthesize(sub)
        assert res.verdicts["isomorphic_encoder"]
        assert res.verdicts["implicit_direct_product"]


def test_multi_prime_synthesize_mixed_staggered():
    w = window_of([4, 3], [4, 3], [4, 3])
    g = WindowSubgroup(
        w,
        [
            w.from_flat([2, 1, 1, 0, 0, 0]),
            w.from_flat([0, 0, 1, 1, 0, 0]),
            w.from_flat([0, 0, 0, 0, 2, 2]),
        ],
    )
    cert = order_controllability_certificate(g)
    assert cert.holds()
    res = synthesize(g, certificate=cert)
    assert res.verdicts["isomorphic_encoder"]
    total = 1
    for gs in res.generating_sets.values():
        total *= prod(gs.orders) if gs.orders else 1
    assert total == g.order()
    for z in g.elements():
        cmap = res.combined.represent(z)
        assert res.combined.encode(cmap).flat == z.flat


def test_synthesize_refuses_failing_certificate(shift_template):
    g6 = unroll_template(shift_template, 6).group
    from groupwindows import certify

    cert = certify(shift_template, "order-controllable", window=6)
    with pytest.raises(InputError):
        synthesize(g6, certificate=cert)
