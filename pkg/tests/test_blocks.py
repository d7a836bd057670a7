import itertools

import numpy as np
import pytest

from rdhei.blocks import (BlockModel, broadcast_restore, classify_blocks, from_blocks,
                          inverse_rearrange, majority_restore, nub_embeddable, part_verdicts,
                          rearrange, to_blocks, P_CELLS)
from rdhei.errors import LabelLengthMismatch


def brute_uniform(plane):
    m, n = plane.shape
    out = []
    for bi in range(m // 4):
        for bj in range(n // 4):
            vals = {int(plane[4 * bi + r, 4 * bj + c]) for r in range(4) for c in range(4)}
            out.append(0 if len(vals) == 1 else 1)
    return out


def test_block_view_round_trip(rng):
    plane = rng.integers(0, 2, (12, 20), dtype=np.uint8)
    blocks = to_blocks(plane)
    assert blocks.shape == (15, 16)
    assert blocks[1].tolist() == plane[0:4, 4:8].ravel().tolist()
    assert np.array_equal(from_blocks(blocks, plane.shape), plane)


def test_all_zero_plane_is_all_ub():
    model = classify_blocks(np.zeros((16, 16), np.uint8))
    assert model.l2.tolist() == [0] * 16
    assert model.n_ub == 16


def test_single_defect_gives_one_nub():
    plane = np.zeros((16, 16), np.uint8)
    plane[9, 2] = 1
    model = classify_blocks(plane)
    assert model.n_nub == 1
    assert model.l2[8] == 1


def test_classification_matches_brute_force(rng):
    for _ in range(50):
        plane = (rng.random((16, 16)) < rng.random() * 0.2).astype(np.uint8)
        assert classify_blocks(plane).l2.tolist() == brute_uniform(plane)


def test_reserved_block_is_excluded(rng):
    plane = rng.integers(0, 2, (16, 16), dtype=np.uint8)
    model = classify_blocks(plane, reserved=True)
    assert model.n_blocks == 15
    assert model.l2.tolist() == brute_uniform(plane)[:-1]


def _part_oracle(p, neighbours):
    return p == (1 if sum(neighbours) >= 2 else 0)


def test_part_rule_all_16_configurations():
    # every (P, n1, n2, n3) placed in the top-left quadrant; other parts pass trivially
    for p, a, b, c in itertools.product((0, 1), repeat=4):
        block = np.zeros(16, np.uint8)
        block[[0, 1, 4]] = a, b, c
        block[5] = p
        flag, verdicts = nub_embeddable(block.reshape(4, 4))
        assert verdicts[0] == _part_oracle(p, (a, b, c))
        assert verdicts[1:] == (True, True, True)
        assert flag == (0 if verdicts[0] else 1)


@pytest.mark.parametrize("p, nb, passes", [
    (0, (0, 0, 1), True),
    (1, (1, 1, 0), True),
    (1, (0, 0, 1), False),
    (0, (1, 1, 0), False),
])
def test_part_examples(p, nb, passes):
    block = np.zeros((4, 4), np.uint8)
    block.ravel()[[0, 1, 4]] = nb
    block.ravel()[5] = p
    flag, verdicts = nub_embeddable(block)
    assert verdicts[0] is passes
    assert flag == (0 if passes else 1)


def test_payload_cells_touch_the_centre():
    assert sorted(P_CELLS.tolist()) == [5, 6, 9, 10]


def test_majority_restore_brute_force_all_blocks():
    """Every embeddable block survives arbitrary payload-cell overwrites."""
    codes = np.arange(1 << 16, dtype=np.uint32)
    blocks = ((codes[:, None] >> np.arange(15, -1, -1)) & 1).astype(np.uint8)
    ok = part_verdicts(blocks).all(axis=1)
    emb = blocks[ok]
    for pattern in itertools.product((0, 1), repeat=4):
        marked = emb.copy()
        marked[:, P_CELLS] = pattern
        assert np.array_equal(majority_restore(marked), emb)
    # non-embeddable blocks are exactly those not fixed by the restore
    assert np.array_equal(ok, (majority_restore(blocks) == blocks).all(axis=1))


def test_embeddable_block_count():
    # 2^12 ways to fill the 12 neighbour cells; P is then forced in each part
    codes = np.arange(1 << 16, dtype=np.uint32)
    blocks = ((codes[:, None] >> np.arange(15, -1, -1)) & 1).astype(np.uint8)
    assert part_verdicts(blocks).all(axis=1).sum() == 1 << 12


def test_ub_broadcast_restores_both_values(rng):
    for value in (0, 1):
        block = np.full((1, 16), value, np.uint8)
        marked = block.copy()
        marked[0, :15] = rng.integers(0, 2, 15)
        assert np.array_equal(broadcast_restore(marked), block)


def test_rearrange_puts_nubs_first():
    plane = np.zeros((8, 16), np.uint8)
    plane[0, 8] = 1      # block 2
    plane[5, 1] = 1      # block 4
    plane[4:8, 12:16] = 1  # block 7, uniform ones
    model = classify_blocks(plane)
    assert model.l2.tolist() == [0, 0, 1, 0, 1, 0, 0, 0]
    assert model.permutation.tolist() == [2, 4, 0, 1, 3, 5, 6, 7]
    out = to_blocks(rearrange(plane, model))
    src = to_blocks(plane)
    assert np.array_equal(out[0], src[2]) and np.array_equal(out[1], src[4])
    assert np.array_equal(out[7], src[7])


def test_all_ub_plane_identity():
    plane = np.zeros((8, 8), np.uint8)
    plane[4:, :4] = 1
    model = classify_blocks(plane)
    assert np.array_equal(rearrange(plane, model), plane)


def test_rearrange_inverse_identity(rng):
    for trial in range(1000):
        m, n = 4 * rng.integers(2, 7, 2)
        plane = (rng.random((m, n)) < rng.random() * 0.1).astype(np.uint8)
        reserved = bool(trial % 2)
        model = classify_blocks(plane, reserved=reserved)
        back = inverse_rearrange(rearrange(plane, model), model.l2, reserved)
        assert np.array_equal(back, plane)


def test_reserved_block_stays_in_place(rng):
    plane = rng.integers(0, 2, (8, 8), dtype=np.uint8)
    model = classify_blocks(plane, reserved=True)
    assert np.array_equal(rearrange(plane, model)[4:, 4:], plane[4:, 4:])


def test_count_identity(lena):
    from rdhei.prediction import compute_pe, pe_to_planes
    planes = pe_to_planes(compute_pe(lena))
    for k in range(8):
        model = classify_blocks(planes[k], reserved=k == 0)
        assert model.n_ub + model.n_nub == 16384 - (k == 0)
        assert len(model.nub_flags) == model.n_nub


def test_label_length_mismatch():
    with pytest.raises(LabelLengthMismatch):
        inverse_rearrange(np.zeros((8, 8), np.uint8), np.zeros(3, np.uint8))


def test_model_permutation_is_bijection(rng):
    l2 = rng.integers(0, 2, 40)
    model = BlockModel((20, 32), l2, np.zeros(int(l2.sum())))
    assert sorted(model.permutation.tolist()) == list(range(40))
