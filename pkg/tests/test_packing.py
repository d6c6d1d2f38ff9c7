import random

import pytest

from rceval.errors import PackingLengthError
from rceval.learned import (
    CLS_ID,
    SEP_ID,
    FULL_ABLATION,
    HashTokenizer,
    pack_input,
)


def test_layout_tiny_inputs():
    packed = pack_input("p1 p2", "q1", "r1 r2", "c1")
    # [CLS] p1 p2 [SEP] q1 [SEP] r1 r2 [SEP] c1 [SEP]
    assert packed.tokens[0] == "[CLS]"
    assert packed.token_ids[0] == CLS_ID
    assert [packed.tokens[i] for i in packed.sep_positions] == ["[SEP]"] * 4
    assert packed.segments["passage"] == (1, 3)
    assert packed.segments["question"] == (4, 5)
    assert packed.segments["reference"] == (6, 8)
    assert packed.segments["candidate"] == (9, 10)
    assert len(packed) == 11
    assert packed.decode_segment("reference") == "r1 r2"
    assert sum(1 for t in packed.token_ids if t == SEP_ID) == 4


def test_ablation_empties_segments_but_keeps_separators():
    packed = pack_input("p1 p2", "q1", "r1", "c1", ablation={"reference", "candidate"})
    assert packed.segments["passage"] == (1, 1)
    assert packed.segments["question"] == (2, 2)
    assert packed.decode_segment("passage") == ""
    assert packed.decode_segment("reference") == "r1"
    assert packed.decode_segment("candidate") == "c1"
    assert sum(1 for t in packed.token_ids if t == SEP_ID) == 4


def test_invalid_ablation():
    with pytest.raises(ValueError):
        pack_input("p", "q", "r", "c", ablation=set())
    with pytest.raises(ValueError):
        pack_input("p", "q", "r", "c", ablation={"passage", "context"})


def test_passage_truncated_first():
    passage = " ".join(f"p{i}" for i in range(600))
    packed = pack_input(passage, "q1 q2", "r1", "c1", max_len=512)
    assert len(packed) == 512
    assert packed.decode_segment("question") == "q1 q2"
    assert packed.decode_segment("reference") == "r1"
    assert packed.decode_segment("candidate") == "c1"
    start, end = packed.segments["passage"]
    assert end - start == 512 - 5 - 2 - 1 - 1
    assert packed.segment_tokens("passage") == tuple(f"p{i}" for i in range(end - start))


def test_question_truncated_second():
    passage = " ".join(f"p{i}" for i in range(10))
    question = " ".join(f"q{i}" for i in range(30))
    packed = pack_input(passage, question, "r", "c", max_len=20)
    assert len(packed) == 20
    assert packed.decode_segment("passage") == ""
    assert packed.segment_tokens("question") == tuple(f"q{i}" for i in range(20 - 5 - 2))
    assert packed.decode_segment("reference") == "r"
    assert packed.decode_segment("candidate") == "c"


def test_reference_candidate_never_truncated():
    with pytest.raises(PackingLengthError) as err:
        pack_input("p", "q", " ".join(["r"] * 4), " ".join(["c"] * 10), max_len=12)
    assert err.value.segment == "candidate"
    with pytest.raises(PackingLengthError) as err:
        pack_input("p", "q", " ".join(["r"] * 20), "c", max_len=12)
    assert err.value.segment == "reference"


def test_property_suite_randomized():
    rng = random.Random(2024)
    tokenizer = HashTokenizer()
    words = [f"w{i}" for i in range(50)]

    def text(lo, hi):
        return " ".join(rng.choice(words) for _ in range(rng.randint(lo, hi)))

    for trial in range(1000):
        max_len = rng.randint(16, 64)
        # keep reference+candidate inside the untruncatable floor
        floor = max_len - 5
        n_ref = rng.randint(0, floor // 2)
        n_cand = rng.randint(0, floor - n_ref)
        texts = {
            "passage": text(0, 40),
            "question": text(0, 20),
            "reference": " ".join(rng.choice(words) for _ in range(n_ref)),
            "candidate": " ".join(rng.choice(words) for _ in range(n_cand)),
        }
        names = list(FULL_ABLATION)
        ablation = frozenset(
            rng.sample(names, rng.randint(1, 4))
        )
        packed = pack_input(
            texts["passage"], texts["question"], texts["reference"],
            texts["candidate"], ablation=ablation, tokenizer=tokenizer,
            max_len=max_len,
        )
        assert len(packed) <= max_len
        assert len(packed.token_ids) == len(packed.tokens) == len(packed.attention_mask)
        assert sum(1 for t in packed.token_ids if t == SEP_ID) == 4
        assert packed.token_ids[0] == CLS_ID
        assert packed.token_ids.count(CLS_ID) == 1

        for name in ("reference", "candidate"):
            if name in ablation:
                # never truncated
                assert packed.decode_segment(name) == " ".join(
                    tokenizer.tokens(texts[name])
                )
            else:
                assert packed.segment_tokens(name) == ()
        for name in ("passage", "question"):
            if name in ablation:
                original = tokenizer.tokens(texts[name])
                kept = packed.segment_tokens(name)
                # equal to the original up to end-truncation
                assert list(kept) == original[: len(kept)]
            else:
                assert packed.segment_tokens(name) == ()
        # ids consistent with surface tokens
        for pos, (tid, tok) in enumerate(zip(packed.token_ids, packed.tokens)):
            if tok not in ("[CLS]", "[SEP]"):
                assert tid == tokenizer.id_of(tok)
