"""Input construction and a small trainable token encoder.

The sequence layout is ``<s> context </s> question || option </s>``. The
encoder is a word-level stand-in for a pre-trained language model: token
embeddings plus learned positions, followed by one position-wise ReLU
mixing layer with a residual connection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dagn.numerics import ops
from dagn.numerics.init import uniform_weight, zeros
from dagn.numerics.tensor import Tensor
from dagn.segmenter import tokenize


class SampleFormatError(ValueError):
    pass


class VocabularyError(ValueError):
    pass


PAD, UNK, BOS, EOS, SEP = "<pad>", "<unk>", "<s>", "</s>", "||"
RESERVED = (PAD, UNK, BOS, EOS, SEP)


class Vocabulary:
    """Lowercased word -> id; reserved ids 0..4 come first, corpus words sorted after."""

    def __init__(self, words=()):
        corpus = sorted(set(words) - set(RESERVED))
        self.itos = list(RESERVED) + corpus
        self.stoi = {w: i for i, w in enumerate(self.itos)}

    @classmethod
    def build(cls, texts):
        words = set()
        for text in texts:
            words.update(t.lower for t in tokenize(text))
        return cls(words)

    @classmethod
    def from_samples(cls, samples):
        texts = []
        for s in samples:
            texts.append(s.context)
            texts.append(s.question)
            texts.extend(s.options)
        return cls.build(texts)

    def __len__(self):
        return len(self.itos)

    def __getitem__(self, word):
        return self.stoi.get(word, self.stoi[UNK])

    def id(self, word):
        return self[word]

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("#reserved " + " ".join(f"{w}={i}" for i, w in enumerate(RESERVED)) + "\n")
            for w in self.itos[len(RESERVED):]:
                fh.write(f"{w}\t{self.stoi[w]}\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if not header or header[0] != "#reserved":
                raise VocabularyError(f"{path}: missing reserved-id header")
            reserved = dict(item.rsplit("=", 1) for item in header[1:])
            if [reserved.get(w) for w in RESERVED] != [str(i) for i in range(len(RESERVED))]:
                raise VocabularyError(f"{path}: reserved ids differ from {RESERVED}")
            words = [line.rstrip("\n").split("\t")[0] for line in fh if line.strip()]
        vocab = cls(words)
        if vocab.itos[len(RESERVED):] != words:
            raise VocabularyError(f"{path}: entries are not sorted")
        return vocab


@dataclass
class InputSequence:
    ids: np.ndarray
    words: list
    tags: list  # special | context | question | option | delimiter, per position
    edu_spans: list  # positions of each surviving EDU (the sets S_n)
    edu_ids: list  # EDU id of each span, aligned with edu_spans
    context_range: tuple  # [start, end) positions of context tokens
    qo_range: tuple  # [start, end) positions from question start to option end

    def __len__(self):
        return len(self.ids)

    @property
    def context_mask(self):
        m = np.zeros(len(self), dtype=bool)
        m[self.context_range[0]:self.context_range[1]] = True
        return m

    @property
    def qo_mask(self):
        """Question and option positions, excluding the ``||`` separator."""
        m = np.zeros(len(self), dtype=bool)
        m[self.qo_range[0]:self.qo_range[1]] = True
        for i in range(*self.qo_range):
            if self.words[i] == SEP and self.tags[i] == "special":
                m[i] = False
        return m

    def span_matrix(self):
        """0/1 matrix [N×L] with row n marking positions of EDU n."""
        s = np.zeros((len(self.edu_spans), len(self)))
        for n, span in enumerate(self.edu_spans):
            s[n, list(span)] = 1.0
        return s


def _segment_tags(seg_text, source):
    tags = [source] * len(seg_text.tokens)
    for hit in seg_text.hits:
        for i in range(hit.token_span[0], hit.token_span[1] + 1):
            tags[i] = "delimiter"
    return tags


def build_input(sample, k, seg, vocab, max_len=256):
    """Instantiate ``<s> context </s> question || option </s>`` for option ``k``.

    ``seg`` is the sample's segmentation (see ``segment_sample``). If the
    sequence is longer than ``max_len`` context tokens are dropped from the
    left; EDU spans are clipped and EDUs that lose every token disappear.
    """
    if not 0 <= k < len(sample.options):
        raise SampleFormatError(f"option index {k} out of range")
    opt = seg.options[k]
    if not opt.tokens:
        raise SampleFormatError(f"sample {getattr(sample, 'id', '?')}: option {k} is empty")
    ctx = seg.context
    q_tokens = tokenize(sample.question)

    fixed = 4 + len(q_tokens) + len(opt.tokens)
    if fixed > max_len:
        raise SampleFormatError(
            f"sample {getattr(sample, 'id', '?')}: question+option need {fixed} positions, "
            f"max_len is {max_len}")
    drop = max(0, fixed + len(ctx.tokens) - max_len)
    ctx_words = [t.lower for t in ctx.tokens[drop:]]
    ctx_tags = _segment_tags(ctx, "context")[drop:]

    words = [BOS] + ctx_words + [EOS]
    tags = ["special"] + ctx_tags + ["special"]
    context_range = (1, 1 + len(ctx_words))
    q_start = len(words)
    words += [t.lower for t in q_tokens] + [SEP]
    tags += ["question"] * len(q_tokens) + ["special"]
    opt_start = len(words)
    words += [t.lower for t in opt.tokens] + [EOS]
    tags += _segment_tags(opt, "option") + ["special"]
    qo_range = (q_start, len(words) - 1)

    edu_spans, edu_ids = [], []
    for edu in ctx.edus:
        span = [1 + i - drop for i in edu.positions if i >= drop]
        if span:
            edu_spans.append(tuple(span))
            edu_ids.append(edu.id)
    for edu in opt.edus:
        edu_spans.append(tuple(opt_start + i for i in edu.positions))
        edu_ids.append(edu.id)

    ids = np.array([vocab[w] for w in words], dtype=np.int64)
    return InputSequence(ids, words, tags, edu_spans, edu_ids, context_range, qo_range)


class EncoderWeights:
    def __init__(self, vocab_size, hidden, max_len, rng):
        self.hidden = hidden
        self.max_len = max_len
        self.tok_emb = uniform_weight(rng, (vocab_size, hidden), "encoder.tok_emb", fan_in=hidden)
        self.pos_emb = uniform_weight(rng, (max_len, hidden), "encoder.pos_emb", fan_in=hidden)
        self.mix_w = uniform_weight(rng, (hidden, hidden), "encoder.mix_w")
        self.mix_b = zeros((hidden,), "encoder.mix_b")

    def parameters(self):
        return [self.tok_emb, self.pos_emb, self.mix_w, self.mix_b]


def encode(seq, w):
    """Contextual token embeddings ``[L×H]`` for one input sequence."""
    ids = np.asarray(seq.ids)
    vocab_size = w.tok_emb.shape[0]
    if ids.size and (ids.min() < 0 or ids.max() >= vocab_size):
        raise VocabularyError(f"token id out of range for vocabulary of size {vocab_size}")
    if len(ids) > w.pos_emb.shape[0]:
        raise SampleFormatError(f"sequence length {len(ids)} exceeds position table "
                                f"{w.pos_emb.shape[0]}")
    h0 = ops.index(w.tok_emb, ids) + ops.index(w.pos_emb, slice(0, len(ids)))
    return h0 + ops.relu(h0 @ w.mix_w + w.mix_b)


def edu_embed(tokens, edu_spans):
    """Row n is the sum of token rows in span n."""
    length = tokens.shape[0]
    s = np.zeros((len(edu_spans), length))
    for n, span in enumerate(edu_spans):
        if len(span) == 0:
            raise ValueError(f"EDU {n} has an empty token span")
        for p in span:
            if not 0 <= p < length:
                raise IndexError(f"EDU {n}: position {p} outside [0, {length})")
        s[n, list(span)] = 1.0
    return ops.matmul(Tensor(s), tokens)
