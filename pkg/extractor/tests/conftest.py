import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizerFast

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "bank", "river", "lend", "money", "document", "was", "a", "on",
    "##s", "##ed", "##ing", "write", "read", "paper", "by", "sat", "we",
    "in", "detail", "it", "this", "is", "of", "to",
]

SENTENCES = [
    # (words, [(word_idx, lemma, pos, sense_key)])
    (["the", "bank", "lends", "money"], [(1, "bank", "NOUN", "bank%1:14:00::")]),
    (["we", "sat", "on", "the", "bank"], [(4, "bank", "NOUN", "bank%1:17:01::")]),
    (["the", "document", "was", "read"], [(1, "document", "NOUN", "document%1:10:00::")]),
    (["we", "document", "it", "in", "detail"], [(1, "document", "VERB", "document%2:32:00::")]),
    (["the", "paper", "was", "a", "document"], [(4, "document", "NOUN", "document%1:10:00::")]),
    (["banks", "lend", "money"], [(0, "bank", "NOUN", "bank%1:14:00::")]),
    (["we", "read", "the", "paper"], [(1, "read", "VERB", "read%2:31:00::")]),
    (["it", "was", "read", "by", "the", "bank", "in", "detail"],
     [(5, "bank", "NOUN", "bank%1:14:00::")]),
    (["this", "is", "a", "river", "bank"], [(4, "bank", "NOUN", "bank%1:17:01::")]),
    (["we", "write", "to", "document", "this"], [(3, "document", "VERB", "document%2:32:00::")]),
]


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """Local randomly-initialized masked-LM checkpoint; no network needed."""
    root = tmp_path_factory.mktemp("ckpt")
    tokenizer = BertTokenizerFast(
        vocab={tok: i for i, tok in enumerate(VOCAB)}, do_lower_case=True
    )
    cfg = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    torch.manual_seed(0)
    model = BertModel(cfg)
    model.save_pretrained(root)
    tokenizer.save_pretrained(root)
    return root


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory):
    """Ten-sentence annotated corpus in the interchange TSV layout."""
    root = tmp_path_factory.mktemp("corpus")
    path = root / "toy.tsv"
    lines = ["corpus_id\tsentence_idx\ttoken_idx\tsurface\tlemma\tpos\tsense_key"]
    for si, (words, annots) in enumerate(SENTENCES):
        keyed = {idx: (lemma, pos, key) for idx, lemma, pos, key in annots}
        for ti, w in enumerate(words):
            lemma, pos, key = keyed.get(ti, (w.lower(), "OTHER", ""))
            lines.append(f"S3-T1\t{si}\t{ti}\t{w}\t{lemma}\t{pos}\t{key}")
    path.write_text("\n".join(lines) + "\n")
    return path
