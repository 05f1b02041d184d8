"""Fixtures: a tiny local character-level transformer and toy corpora.

No model hub is reachable from the test environment, so the encoder tests
run against a randomly initialized two-layer GPT-2 with a character-level
tokenizer built here and saved to a temp directory.  Random weights are
fine: extraction only needs a deterministic sentence -> hidden-state map.
The character tokenizer guarantees every multi-character stimulus spans
several subtokens, which is exactly the case the last-subtoken rule is
about.
"""

from __future__ import annotations

import pytest


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    import torch
    from tokenizers import Tokenizer, models, pre_tokenizers
    from transformers import GPT2Config, GPT2Model, PreTrainedTokenizerFast

    out = tmp_path_factory.mktemp("tiny-model")
    chars = sorted(set("abcdefghijklmnopqrstuvwxyz .,'0123456789"))
    vocab = {c: i for i, c in enumerate(chars)}
    vocab["[UNK]"] = len(vocab)
    tok = Tokenizer(models.WordLevel(vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = pre_tokenizers.Split(pattern="", behavior="isolated")
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tok, unk_token="[UNK]", model_max_length=64
    )
    fast.save_pretrained(out)

    torch.manual_seed(0)
    config = GPT2Config(
        vocab_size=len(vocab),
        n_embd=16,
        n_layer=2,
        n_head=2,
        n_positions=64,
        bos_token_id=0,
        eos_token_id=0,
    )
    GPT2Model(config).save_pretrained(out)
    return str(out)
