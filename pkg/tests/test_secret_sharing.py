"""Mask splitting, exact reconstruction, and masked aggregation."""

from fractions import Fraction

import numpy as np
import pytest

from dcfed.masking import (
    FIXED_SCALE_BITS,
    MaskDegenerateError,
    MaskSecret,
    aggregate_masked,
    mask_update,
    new_mask,
    reconstruct_sum,
    split_secret,
    sum_local_shares,
)
from dcfed.masking.shamir import FIXED_SCALE, ShareError
from dcfed.nn import EnsembleModel, block_average

SCALE = 1 << FIXED_SCALE_BITS


def test_degree_zero_polynomial_copies_secret():
    s = MaskSecret(mantissa=12345, coeffs=())
    bundle = split_secret(s, m=1, points=(1, 2, 3))
    assert bundle.values == (12345, 12345, 12345)


def test_hand_worked_shares():
    s = MaskSecret(mantissa=3, coeffs=(1,))
    bundle = split_secret(s, m=2, points=(1, 2))
    assert bundle.values == (4, 5)


def test_sum_and_reconstruct_hand_case():
    a = split_secret(MaskSecret(3, (1,)), 2, (1, 2))
    b = split_secret(MaskSecret(5, (2,)), 2, (1, 2))
    p1 = sum_local_shares([a.share_for(1), b.share_for(1)])
    p2 = sum_local_shares([a.share_for(2), b.share_for(2)])
    assert (p1, p2) == (11, 14)
    assert reconstruct_sum((1, 2), (11, 14)) == 8


def test_single_sender_sum_is_identity():
    assert sum_local_shares([42]) == 42


def test_all_zero_secrets_reconstruct_zero():
    # zero-valued polynomials evaluated by hand; the MaskSecret type
    # itself requires positive masks, the math does not
    points = (1, 2, 3)
    sums = [0, 0, 0]
    assert reconstruct_sum(points, sums) == 0


def test_reconstruction_exactness_random_rounds():
    rng = np.random.default_rng(17)
    for _ in range(200):
        m = int(rng.integers(1, 9))
        points = tuple(range(1, m + 1))
        secrets = [new_mask(rng, m, owner=f"a{i}") for i in range(m)]
        bundles = [split_secret(s, m, points) for s in secrets]
        sums = [sum_local_shares([b.share_for(z) for b in bundles])
                for z in points]
        got = reconstruct_sum(points, sums)
        assert got == sum(s.mantissa for s in secrets)  # exact, zero error


def test_duplicate_points_rejected():
    s = MaskSecret(10, (1,))
    with pytest.raises(ShareError):
        split_secret(s, 2, (3, 3))
    with pytest.raises(ShareError):
        reconstruct_sum((1, 1), (5, 5))


def test_nonpositive_mask_rejected():
    with pytest.raises(ShareError):
        MaskSecret(0, ())


def test_fewer_than_m_shares_reveal_nothing():
    # with only m-1 share values, every candidate secret on a grid admits
    # coefficients reproducing those shares exactly (Vandermonde solve)
    m = 4
    points = (1, 2, 3, 4)
    secret = MaskSecret(7 * SCALE, (11, 5, 9))
    bundle = split_secret(secret, m, points)
    seen = bundle.values[:m - 1]
    seen_pts = points[:m - 1]
    for candidate in range(1, 40):
        rows = [[Fraction(z) ** k for k in range(1, m)] for z in seen_pts]
        rhs = [Fraction(v - candidate) for v, z in zip(seen, seen_pts)]
        sol = _solve_fractions(rows, rhs)
        assert sol is not None
        for z, v in zip(seen_pts, seen):
            acc = Fraction(candidate)
            for k, phi in enumerate(sol, start=1):
                acc += phi * z ** k
            assert acc == v


def _solve_fractions(rows, rhs):
    n = len(rows)
    M = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        M[col] = [v / M[col][col] for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def _blocks(n, seed=0):
    model = EnsembleModel.create((2, 3, 3, 3, 1), n_members=1, seed=seed)
    out = []
    for i in range(n):
        m = EnsembleModel.create((2, 3, 3, 3, 1), n_members=1, seed=seed + i)
        out.append(block_average(m))
    return out


def test_equal_masks_average_plainly():
    blocks = _blocks(3)
    w = MaskSecret(SCALE, ())  # w = 1.0
    updates = [mask_update(MaskSecret(SCALE, (), owner=f"a{i}"), b)
               for i, b in enumerate(blocks)]
    agg = aggregate_masked(updates, 3 * SCALE)
    manual = np.mean([b.data for b in blocks], axis=0)
    assert np.allclose(agg.data, manual, atol=1e-12)


def test_single_participant_returns_own_block():
    (block,) = _blocks(1)
    s = MaskSecret(int(1.37 * SCALE), ())
    agg = aggregate_masked([mask_update(s, block)], s.mantissa)
    assert np.allclose(agg.data, block.data, atol=1e-9)


def test_masked_aggregate_matches_weighted_mean():
    rng = np.random.default_rng(23)
    blocks = _blocks(3, seed=40)
    secrets = [new_mask(rng, 3, owner=f"a{i}") for i in range(3)]
    updates = [mask_update(s, b) for s, b in zip(secrets, blocks)]
    w_r = sum(s.mantissa for s in secrets)
    agg = aggregate_masked(updates, w_r)
    ws = np.array([s.value for s in secrets])
    oracle = np.sum([w * b.data for w, b in zip(ws, blocks)], axis=0) / ws.sum()
    assert float(np.max(np.abs(agg.data - oracle))) <= 1e-9


def test_degenerate_mask_sum_aborts():
    (block,) = _blocks(1)
    s = MaskSecret(SCALE, ())
    with pytest.raises(MaskDegenerateError):
        aggregate_masked([mask_update(s, block)], 0)
