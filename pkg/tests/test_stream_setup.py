import numpy as np
import pytest

from ingrass.baseline import SparsifierConfig, baseline_sparsify
from ingrass.errors import ChecksumFailure, NotEnoughCandidates, ParseError, VersionMismatch
from ingrass.generators import random_connected_graph
from ingrass.lrd import build_pair_index, lrd_decompose
from ingrass.resistance import build_embedder
from ingrass.setupfile import load_setup, save_setup
from ingrass.stream import grown_graph, read_stream, synth_stream, write_stream
from ingrass.update import SparsifierState, ingrass_update


@pytest.fixture(scope="module")
def case():
    g = random_connected_graph(300, seed=1, weights="uniform")
    h0 = baseline_sparsify(g, SparsifierConfig.from_offtree(0.1, 300))
    return g, h0


def test_stream_round_trip(tmp_path):
    batches = [[(0, 1, 1.5), (2, 3, 0.1)], [(4, 5, 2.0)]]
    write_stream(tmp_path / "s.txt", batches)
    assert read_stream(tmp_path / "s.txt") == batches


def test_stream_parse(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("0 1 1.0\n\n#\n2 3 2\n#\n")
    assert read_stream(p) == [[(0, 1, 1.0)], [(2, 3, 2.0)]]
    p.write_text("0 1\n")
    with pytest.raises(ParseError):
        read_stream(p)
    p.write_text("0 a 1\n")
    with pytest.raises(ParseError):
        read_stream(p)


@pytest.mark.parametrize("mode", ["complement", "nonedge", "local"])
def test_synth_stream_modes(case, mode):
    g, h0 = case
    b = synth_stream(g, h0, 10, 20, seed=4, mode=mode)
    assert len(b) == 10 and all(len(x) == 20 for x in b)
    flat = [(u, v) for x in b for u, v, _ in x]
    assert len(set(flat)) == 200 and all(u < v for u, v in flat)
    gkeys = set(zip(g.u.tolist(), g.v.tolist()))
    hkeys = set(zip(h0.u.tolist(), h0.v.tolist()))
    if mode == "complement":
        assert all(e in gkeys and e not in hkeys for e in flat)
    else:
        assert not any(e in gkeys for e in flat)
        assert grown_graph(g, b).n_edges == g.n_edges + 200
    assert synth_stream(g, h0, 10, 20, seed=4, mode=mode) == b
    assert synth_stream(g, h0, 10, 20, seed=5, mode=mode) != b


def test_synth_stream_errors(case):
    g, h0 = case
    with pytest.raises(ValueError):
        synth_stream(g, h0, 10, 0)
    with pytest.raises(NotEnoughCandidates):
        synth_stream(g, h0, 10, g.n_edges)


def test_synth_stream_sized_for_density_growth(case):
    g, h0 = case
    n = g.n_nodes
    d0 = (h0.n_edges - (n - 1)) / n
    per = int(round(2.4 * d0 * n / 10))
    b = synth_stream(g, h0, 10, per)
    final = (h0.n_edges + sum(map(len, b)) - (n - 1)) / n
    assert final / d0 == pytest.approx(3.4, rel=0.05)


def build(h0):
    emb = build_embedder(h0, m=8, seed=2)
    hier = lrd_decompose(h0, emb)
    return emb, hier, build_pair_index(h0, hier)


def test_setup_round_trip(case, tmp_path):
    _, h0 = case
    emb, hier, idx = build(h0)
    idx.register(h0.n_edges, 0, 299, hier)  # overlays are saved too
    p = tmp_path / "setup.bin"
    save_setup(p, h0, hier, idx, emb, meta={"note": "x"})
    h0b, hierb, idxb, embb, meta = load_setup(p)
    assert h0b == h0 and hierb == hier and idxb == idx and embb == emb
    assert meta["note"] == "x"


def test_setup_replay_identical(case, tmp_path):
    g, h0 = case
    emb, hier, idx = build(h0)
    save_setup(tmp_path / "s.bin", h0, hier, idx, emb)
    batch = synth_stream(g, h0, 1, 100, seed=9)[0]
    s1 = SparsifierState.create(h0, hier, 20.0, idx)
    ev1 = ingrass_update(s1, batch)
    h0b, hierb, idxb, _, _ = load_setup(tmp_path / "s.bin")
    s2 = SparsifierState.create(h0b, hierb, 20.0, idxb)
    ev2 = ingrass_update(s2, batch)
    assert [e.to_dict() for e in ev1] == [e.to_dict() for e in ev2]
    assert s1.ew == s2.ew


def test_setup_corruption(case, tmp_path):
    _, h0 = case
    emb, hier, idx = build(h0)
    p = tmp_path / "s.bin"
    save_setup(p, h0, hier, idx, emb)
    data = p.read_bytes()
    for cut in (len(data) - 1, len(data) // 2, 20, 5):
        (tmp_path / "t.bin").write_bytes(data[:cut])
        with pytest.raises(ChecksumFailure):
            load_setup(tmp_path / "t.bin")
    flipped = bytearray(data)
    flipped[len(data) // 2] ^= 0xFF
    (tmp_path / "f.bin").write_bytes(bytes(flipped))
    with pytest.raises(ChecksumFailure):
        load_setup(tmp_path / "f.bin")
    (tmp_path / "m.bin").write_bytes(b"NOTMAGIC" + data[8:])
    with pytest.raises(VersionMismatch):
        load_setup(tmp_path / "m.bin")
    bad = bytearray(data)
    bad[8] = 99
    (tmp_path / "v.bin").write_bytes(bytes(bad))
    with pytest.raises(VersionMismatch):
        load_setup(tmp_path / "v.bin")
    (tmp_path / "x.bin").write_bytes(data + b"\0")
    with pytest.raises(ChecksumFailure):
        load_setup(tmp_path / "x.bin")
    with pytest.raises(OSError):
        load_setup(tmp_path / "missing.bin")
