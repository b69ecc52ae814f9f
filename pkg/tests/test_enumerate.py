from __future__ import annotations

import pytest

from nact.enumerate import (
    _Pools, SEEDS, EnumerationLimitError, GenConfig, GenState, StreamExhausted,
    enumerate_up_to, generable, list1_axiom_filter, load_stream, dump_stream,
)
from nact.formula import bound_var_count, canonicalize, expand_sugar, length, parse, to_core, to_text
from nact.pathology import detect_prim_patho

OMEGA = "forall x1 . (0 in x1 & (forall x2 . x2 in x1 -> x2 cup {x2} in x1)) -> x in x1"


def texts(config):
    return [to_text(f) for f in enumerate_up_to(config)]


def test_pool_texts_match_printer():
    pools = _Pools(GenConfig(max_length=7, equality=True, max_bound_vars=3))
    pools.build_to(7)
    for (_, n), pool in pools.pools.items():
        for text, m in pool.items():
            assert to_text(m.formula) == text and length(m.formula) == n


def test_first_four_gl1():
    assert texts(GenConfig(max_length=3))[:4] == ["T", "F", "x in x", "x notin x"]


def test_seed_block():
    assert texts(GenConfig(max_length=5))[:8] == list(SEEDS)


def test_gl1_length_two_by_hand():
    assert texts(GenConfig(max_length=2)) == [
        "T", "F", "x in x", "x notin x", "exists x1 . x1 in x", "exists x1 . x in x1",
    ]


def test_order_after_seed_block():
    fs = enumerate_up_to(GenConfig(max_length=7))
    lengths = [length(f) for f in fs[len(SEEDS):]]
    assert lengths == sorted(lengths)
    assert all(length(f) <= 3 for f in fs[:len(SEEDS)])


def test_injective_and_canonical():
    fs = enumerate_up_to(GenConfig(max_length=8, max_bound_vars=2))
    keys = [to_text(canonicalize(f)) for f in fs]
    assert len(set(keys)) == len(keys)
    assert keys == [to_text(f) for f in fs]


def test_idempotent_conjunction_never_new():
    ts = set(texts(GenConfig(max_length=6)))
    assert "x in x & x in x" not in ts and "x in x" in ts


def test_deterministic():
    cfg = GenConfig(max_length=7, max_bound_vars=2)
    assert texts(cfg) == texts(cfg)


def test_gl2_relation_to_gl1():
    gl1 = set(texts(GenConfig(max_length=7)))
    gl2 = set(texts(GenConfig(mode="GL2", max_length=7)))
    assert "x notin x" not in gl2 and "x in x" in gl2
    assert gl2 <= gl1
    assert gl1 - gl2 == {t for t in gl1 if detect_prim_patho(parse(t)) is not None}


def test_gl3_parameter():
    cfg = GenConfig(mode="GL3", max_length=4, max_params=1)
    ts = texts(cfg)
    seeds_present = [s for s in SEEDS if s in ts]
    assert ts[: len(seeds_present)] == seeds_present
    rest = [parse(t) for t in ts[len(seeds_present):]]
    keys = [(length(f), bound_var_count(f), to_text(f)) for f in rest]
    assert keys == sorted(keys)
    assert ts[len(seeds_present):][:3] == ["b1 in b1", "b1 in x", "x in b1"]
    # one representative per permutation of parameters
    two = texts(GenConfig(mode="GL3", max_length=3, max_params=2))
    assert "x in b1" in two and "x in b2" not in two


def test_list1_filter():
    assert not list1_axiom_filter(parse("x notin x"))
    assert not list1_axiom_filter(parse("x in x"))
    assert list1_axiom_filter(parse("x = x"))


def test_omega_generability():
    omega = canonicalize(to_core(expand_sugar(parse(OMEGA))))
    assert length(omega) == 42
    assert not generable(omega, GenConfig())
    assert generable(omega, GenConfig(quantifier_rule="general", equality=True))


def test_generable_matches_stream():
    cfg = GenConfig(max_length=6)
    for f in enumerate_up_to(cfg):
        assert generable(f, cfg)
    assert not generable(parse("exists x1 . x1 in x1"), cfg)
    assert not generable(parse("x = x"), cfg)


def test_state_stream_and_exhaustion():
    st = GenState(GenConfig(max_length=2))
    out = [to_text(st.next()) for _ in range(6)]
    assert out[0] == "T"
    with pytest.raises(StreamExhausted):
        st.next()
    assert len(st.emitted) == 6


def test_limit():
    with pytest.raises(EnumerationLimitError):
        enumerate_up_to(GenConfig(max_length=8, max_count=100))


@pytest.mark.parametrize("kwargs", [
    {"mode": "GL4"},
    {"mode": "GL1", "max_params": 1},
    {"quantifier_rule": "loose"},
    {"max_length": 0},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        GenConfig(**kwargs)


def test_dump_and_load(tmp_path):
    fs = enumerate_up_to(GenConfig(max_length=5))
    path = tmp_path / "stream.txt"
    assert dump_stream(fs, path) == len(fs)
    assert load_stream(path) == fs
