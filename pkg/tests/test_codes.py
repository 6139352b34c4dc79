import itertools

import numpy as np
import pytest

from ternhash import (
    PackedCode,
    TernaryCode,
    encode_binary,
    hamming,
    hard_ternary,
    load_codes,
    pack,
    save_codes,
    ternarize,
    unpack,
)


def code(*trits) -> TernaryCode:
    return TernaryCode(np.array(trits, dtype=np.int8))


def test_ternary_code_validation():
    code(1, 0, -1)
    with pytest.raises(ValueError):
        TernaryCode(np.array([2, 0], dtype=np.int8))
    with pytest.raises(ValueError):
        TernaryCode(np.array([], dtype=np.int8))
    with pytest.raises(ValueError):
        TernaryCode(np.zeros((2, 2), dtype=np.int8))


def test_packed_code_invariants():
    with pytest.raises(ValueError):
        PackedCode(pos=np.array([1], dtype=np.uint64), neg=np.array([1], dtype=np.uint64), d=4)
    with pytest.raises(ValueError):
        PackedCode(pos=np.array([1 << 10], dtype=np.uint64), neg=np.array([0], dtype=np.uint64), d=4)
    with pytest.raises(ValueError):
        PackedCode(pos=np.array([1], dtype=np.uint64), neg=np.array([0], dtype=np.uint64), d=0)


def test_ternarize():
    assert ternarize(np.array([0.7, -0.2, -0.9]), 0.5) == code(1, 0, -1)
    assert ternarize(np.zeros(5), 0.5) == code(0, 0, 0, 0, 0)
    rng = np.random.default_rng(0)
    for _ in range(50):
        v = rng.uniform(-2, 2, size=20)
        got = ternarize(v, 0.5).trits
        want = [hard_ternary(float(x), 0.5) for x in v]
        assert got.tolist() == want


def test_pack_bit_layout():
    packed = pack(code(1, 0, -1))
    assert packed.pos.tolist() == [0b001]
    assert packed.neg.tolist() == [0b100]
    zero = pack(code(0, 0, 0))
    assert zero.pos.tolist() == [0] and zero.neg.tolist() == [0]


def test_pack_unpack_roundtrip():
    rng = np.random.default_rng(1)
    for d in (1, 4, 63, 64, 65, 70, 128):
        c = TernaryCode(rng.integers(-1, 2, size=d).astype(np.int8))
        assert unpack(pack(c)) == c


def test_encode_binary():
    assert encode_binary(code(1)) == "10"
    assert encode_binary(code(-1, 0, 1)) == "010010"
    assert encode_binary(code(0, 0, 0, 0)) == "00000000"


def brute_hamming(a: TernaryCode, b: TernaryCode) -> int:
    return sum(x != y for x, y in zip(encode_binary(a), encode_binary(b)))


def test_hamming_basics():
    a, b = code(1, 0, -1), code(1, -1, 1)
    assert hamming(pack(a), pack(a)) == 0
    assert hamming(pack(a), pack(b)) == 3
    with pytest.raises(ValueError):
        hamming(pack(a), pack(code(1, 0)))


def test_hamming_exhaustive_d4():
    all_codes = [code(*trits) for trits in itertools.product((-1, 0, 1), repeat=4)]
    packed = [pack(c) for c in all_codes]
    for i, ci in enumerate(all_codes):
        for j, cj in enumerate(all_codes):
            assert hamming(packed[i], packed[j]) == brute_hamming(ci, cj)


def test_hamming_metric_properties_sampled():
    rng = np.random.default_rng(2)
    codes = [TernaryCode(rng.integers(-1, 2, size=128).astype(np.int8)) for _ in range(30)]
    packed = [pack(c) for c in codes]
    for i in range(len(codes)):
        for j in range(len(codes)):
            dij = hamming(packed[i], packed[j])
            assert 0 <= dij <= 2 * 128
            assert dij == hamming(packed[j], packed[i])
            assert (dij == 0) == (codes[i] == codes[j])
            for l in range(len(codes)):
                assert dij <= hamming(packed[i], packed[l]) + hamming(packed[l], packed[j])


def test_per_element_distance_table():
    table = {(1, 1): 0, (0, 0): 0, (-1, -1): 0, (1, 0): 1, (0, 1): 1, (-1, 0): 1, (0, -1): 1, (1, -1): 2, (-1, 1): 2}
    rng = np.random.default_rng(3)
    for _ in range(100):
        a = TernaryCode(rng.integers(-1, 2, size=16).astype(np.int8))
        b = TernaryCode(rng.integers(-1, 2, size=16).astype(np.int8))
        want = sum(table[(int(x), int(y))] for x, y in zip(a.trits, b.trits))
        assert hamming(pack(a), pack(b)) == want == brute_hamming(a, b)


def test_codes_file_roundtrip(tmp_path):
    rng = np.random.default_rng(4)
    codes = [pack(TernaryCode(rng.integers(-1, 2, size=70).astype(np.int8))) for _ in range(9)]
    path = tmp_path / "codes.tnc"
    save_codes(path, codes)
    loaded = load_codes(path)
    assert loaded == codes
    save_codes(tmp_path / "again.tnc", loaded)
    assert (tmp_path / "again.tnc").read_bytes() == path.read_bytes()


def test_codes_file_errors(tmp_path):
    with pytest.raises(ValueError):
        save_codes(tmp_path / "x.tnc", [])
    mixed = [pack(code(1, 0)), pack(code(1, 0, -1))]
    with pytest.raises(ValueError):
        save_codes(tmp_path / "x.tnc", mixed)
    bad = tmp_path / "bad.tnc"
    bad.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(ValueError):
        load_codes(bad)
    path = tmp_path / "trunc.tnc"
    save_codes(path, [pack(code(1, 0, -1))])
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(ValueError):
        load_codes(path)
