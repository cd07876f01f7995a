"""Exact crystallographic model of the Euclidean (3,3,3) triangle group."""

import random

import pytest

from fptower import (EisensteinInt, AffineIsometry, IDENTITY, CANONICAL_X,
                     CANONICAL_Y, evaluate, in_triangle_group,
                     surjectivity_check, find_epi_to_triangle,
                     all_epis_to_triangle, parse_presentation,
                     bundled_presentation)
from fptower.eisenstein import E_ZERO, E_ONE

W = EisensteinInt(0, 1)          # the primitive cube root of unity itself


def test_omega_arithmetic():
    # 1 + w + w^2 = 0
    assert (E_ONE + W + W * W).is_zero()
    assert W * W * W == E_ONE
    assert W.norm() == 1
    assert EisensteinInt(1, -1).norm() == 3          # norm of 1 - w
    # mul_omega_pow agrees with multiplication by powers of w
    rng = random.Random(5)
    for _ in range(300):
        z = EisensteinInt(rng.randrange(-9, 10), rng.randrange(-9, 10))
        acc = z
        for k in range(4):
            assert z.mul_omega_pow(k) == acc if k else True
            acc = acc * W
        assert z.mul_omega_pow(1) == z * W
        assert z.mul_omega_pow(2) == z * W * W
        # the norm is multiplicative
        z2 = EisensteinInt(rng.randrange(-9, 10), rng.randrange(-9, 10))
        assert (z * z2).norm() == z.norm() * z2.norm()


def test_isometry_group_laws():
    rng = random.Random(6)
    rand = lambda: AffineIsometry(
        EisensteinInt(rng.randrange(-5, 6), rng.randrange(-5, 6)),
        rng.randrange(3))
    for _ in range(300):
        g, h, k = rand(), rand(), rand()
        assert (g * h) * k == g * (h * k)
        assert g * IDENTITY == IDENTITY * g == g
        assert (g * g.inverse()).is_identity()
        assert (g.inverse() * g).is_identity()
        assert (g * h).inverse() == h.inverse() * g.inverse()


def test_orders():
    assert IDENTITY.order() == 1
    assert CANONICAL_X.order() == 3
    assert CANONICAL_Y.order() == 3
    assert AffineIsometry(E_ONE, 0).order() is None   # pure translation
    assert (CANONICAL_X * CANONICAL_X * CANONICAL_X).is_identity()
    y3 = CANONICAL_Y * CANONICAL_Y * CANONICAL_Y
    assert y3.is_identity()


def test_canonical_images_satisfy_triangle_relators():
    t = bundled_presentation("triangle-333")
    images = [CANONICAL_X, CANONICAL_Y]
    for r in t.relators:
        assert evaluate(r, images).is_identity()
    # (xy)^3 = 1 is forced by 1 + w + w^2 = 0
    xy = CANONICAL_X * CANONICAL_Y
    assert (xy * xy * xy).is_identity()


def test_translation_lattice_membership():
    one_minus_w = EisensteinInt(1, -1)
    assert in_triangle_group(AffineIsometry(one_minus_w, 0))
    assert in_triangle_group(AffineIsometry(one_minus_w * W, 0))
    assert in_triangle_group(AffineIsometry(one_minus_w * 5, 0))
    assert not in_triangle_group(AffineIsometry(E_ONE, 0))
    assert not in_triangle_group(AffineIsometry(W, 0))
    assert in_triangle_group(IDENTITY)


def test_surjectivity_check_examples():
    one_minus_w = EisensteinInt(1, -1)
    # the canonical generators generate T by definition
    assert surjectivity_check([CANONICAL_X, CANONICAL_Y])
    # two equal rotations give a cyclic image of order 3
    assert not surjectivity_check([CANONICAL_X, CANONICAL_X])
    # scaling the translation by 3 generates a proper sublattice
    scaled = AffineIsometry(one_minus_w * 3, 1)
    assert not surjectivity_check([CANONICAL_X, scaled])
    # pure translations can never surject (no rotation in the image)
    assert not surjectivity_check([AffineIsometry(one_minus_w, 0)])


def test_epi_search_tautological():
    t = bundled_presentation("triangle-333")
    images = find_epi_to_triangle(t)
    assert images is not None
    for r in t.relators:
        assert evaluate(r, images).is_identity()
    assert surjectivity_check(images)


def test_epi_search_rank_one_fails():
    assert find_epi_to_triangle(parse_presentation("<x | x^3>")) is None
    assert find_epi_to_triangle(parse_presentation("<x |>")) is None


def test_epi_search_abelian_fails():
    # (Z/3)^2 has no epimorphism onto the nonabelian T
    p = parse_presentation("<x, y | x^3, y^3, (x, y)>")
    assert find_epi_to_triangle(p) is None


def test_all_epis_are_distinct_and_valid():
    t = bundled_presentation("triangle-prime")
    found = all_epis_to_triangle(t, limit=5)
    assert found, "T-prime must surject onto T"
    seen = set()
    for images in found:
        for r in t.relators:
            assert evaluate(r, images).is_identity()
        assert surjectivity_check(images)
        seen.add(tuple(images))
    assert len(seen) == len(found)
