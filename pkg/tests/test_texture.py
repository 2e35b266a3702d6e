import numpy as np

from ctcompand.core import CompandParams
from ctcompand.pyramid import build_gaussian_pyramid, expand
from ctcompand.texture import build_sorf_pyramid
from oracles import sorf_substitution_oracle


def sorf(grid, p):
    return build_sorf_pyramid(build_gaussian_pyramid(grid, p.depth, p.kernel_a), p)


def test_constant_image_scores_zero():
    p = CompandParams.defaults(depth=2)
    stack = sorf(np.full((32, 32), 0.4), p)
    for lv in stack.levels:
        np.testing.assert_allclose(lv, 0.0, atol=1e-14)


def test_full_blend_gives_independent_levels(rng):
    p = CompandParams.defaults(depth=2, texture_blend=(1.0, 1.0, 1.0))
    grid = rng.uniform(1e-3, 1.0, (32, 32))
    gauss = build_gaussian_pyramid(grid, p.depth, p.kernel_a)
    stack = build_sorf_pyramid(gauss, p)
    for n in range(3):
        dog = np.abs(gauss[n] - expand(gauss[n + 1], gauss[n].shape, p.kernel_a))
        np.testing.assert_allclose(stack[n], dog ** p.texture_exponent, atol=1e-12)


def test_unit_exponent_full_blend_is_plain_dog(rng):
    p = CompandParams.defaults(depth=2, texture_exponent=1.0, texture_blend=(1.0, 1.0, 1.0))
    grid = rng.uniform(1e-3, 1.0, (32, 32))
    gauss = build_gaussian_pyramid(grid, p.depth, p.kernel_a)
    stack = build_sorf_pyramid(gauss, p)
    dog0 = np.abs(gauss[0] - expand(gauss[1], gauss[0].shape, p.kernel_a))
    np.testing.assert_allclose(stack[0], dog0, atol=0.0)


def test_matches_substitution_oracle(rng):
    p = CompandParams.defaults(depth=3, texture_exponent=1.0, texture_blend=(0.5,) * 4)
    grid = rng.uniform(1e-3, 1.0, (32, 32))
    gauss = build_gaussian_pyramid(grid, p.depth, p.kernel_a)
    stack = build_sorf_pyramid(gauss, p)
    expected = sorf_substitution_oracle(
        list(gauss.levels), p.texture_exponent, list(p.texture_blend), p.kernel_a
    )
    for got, want in zip(stack.levels, expected):
        np.testing.assert_allclose(got, want, atol=1e-10)


def test_matches_substitution_oracle_mixed_weights(rng):
    p = CompandParams.defaults(
        depth=2, texture_exponent=0.7, texture_blend=(0.3, 0.8, 0.5)
    )
    grid = rng.uniform(1e-3, 1.0, (24, 24))
    gauss = build_gaussian_pyramid(grid, p.depth, p.kernel_a)
    stack = build_sorf_pyramid(gauss, p)
    expected = sorf_substitution_oracle(
        list(gauss.levels), p.texture_exponent, list(p.texture_blend), p.kernel_a
    )
    for got, want in zip(stack.levels, expected):
        np.testing.assert_allclose(got, want, atol=1e-10)


def test_nonnegative_everywhere(rng):
    p = CompandParams.defaults(depth=3)
    grid = rng.uniform(1e-3, 1.0, (48, 48))
    for lv in sorf(grid, p).levels:
        assert lv.min() >= 0.0


def test_stronger_grating_scores_at_least_as_high():
    p = CompandParams.defaults(depth=2)
    yy, xx = np.mgrid[0:64, 0:64]
    base = 0.5 + 0.05 * np.sin(2 * np.pi * xx / 8.0) * np.sin(2 * np.pi * yy / 8.0)
    prev = None
    for t in (1.0, 2.0, 4.0):
        grid = 0.5 + t * (base - 0.5)
        peak = sorf(grid, p)[0].max()
        if prev is not None:
            assert peak >= prev
        prev = peak
