"""Answer prediction head and the full per-option scoring chain."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dagn.graph import GraphVariant, apply_variant, build_graph
from dagn.encoder import EncoderWeights, SampleFormatError, build_input, edu_embed, encode
from dagn.numerics import ops
from dagn.numerics.init import make_rng, ones, uniform_weight, zeros
from dagn.numerics.tensor import Tensor, as_tensor
from dagn.reasoner import Adjacency, ReasonerWeights, reason, enhance_tokens
from dagn.segmenter import Granularity, load_delimiter_library, segment_sample


class SegmentError(ValueError):
    pass


class GRUWeights:
    def __init__(self, d_in, hidden, rng, prefix):
        self.w_x = uniform_weight(rng, (d_in, 3 * hidden), f"{prefix}.w_x", fan_in=hidden)
        self.b_x = zeros((3 * hidden,), f"{prefix}.b_x")
        self.w_h = uniform_weight(rng, (hidden, 3 * hidden), f"{prefix}.w_h")
        self.b_h = zeros((3 * hidden,), f"{prefix}.b_h")

    def parameters(self):
        return [self.w_x, self.b_x, self.w_h, self.b_h]


class PredictorWeights:
    def __init__(self, hidden, rng):
        if hidden % 2:
            raise ValueError(f"hidden size must be even for the bidirectional GRU, got {hidden}")
        self.ln1_gain = ones((hidden,), "predictor.ln1_gain")
        self.ln1_bias = zeros((hidden,), "predictor.ln1_bias")
        self.gru_fwd = GRUWeights(hidden, hidden // 2, rng, "predictor.gru_fwd")
        self.gru_bwd = GRUWeights(hidden, hidden // 2, rng, "predictor.gru_bwd")
        self.ln2_gain = ones((hidden,), "predictor.ln2_gain")
        self.ln2_bias = zeros((hidden,), "predictor.ln2_bias")
        self.pool_ctx = uniform_weight(rng, (hidden, 1), "predictor.pool_ctx")
        self.pool_qo = uniform_weight(rng, (hidden, 1), "predictor.pool_qo")
        self.mlp_w1 = uniform_weight(rng, (3 * hidden, hidden), "predictor.mlp_w1")
        self.mlp_b1 = zeros((hidden,), "predictor.mlp_b1")
        self.mlp_w2 = uniform_weight(rng, (hidden, 1), "predictor.mlp_w2")
        self.mlp_b2 = zeros((1,), "predictor.mlp_b2")

    def parameters(self):
        return ([self.ln1_gain, self.ln1_bias]
                + self.gru_fwd.parameters() + self.gru_bwd.parameters()
                + [self.ln2_gain, self.ln2_bias, self.pool_ctx, self.pool_qo,
                   self.mlp_w1, self.mlp_b1, self.mlp_w2, self.mlp_b2])


def bigru(x, fwd, bwd):
    """Concatenated forward and backward GRU states, ``[L×2h]``."""
    f = ops.gru(x @ fwd.w_x + fwd.b_x, fwd.w_h, fwd.b_h)
    b = ops.gru(x @ bwd.w_x + bwd.b_x, bwd.w_h, bwd.b_h, reverse=True)
    return ops.concat([f, b], axis=1)


def encode_sequence(t_prime, w):
    """LayerNorm -> BiGRU -> residual add -> LayerNorm."""
    t_prime = as_tensor(t_prime)
    if t_prime.ndim != 2 or t_prime.shape[0] < 1:
        raise ValueError(f"encode_sequence expects a non-empty [L×H] input, got {t_prime.shape}")
    x = ops.layer_norm(t_prime, w.ln1_gain, w.ln1_bias)
    return ops.layer_norm(x + bigru(x, w.gru_fwd, w.gru_bwd), w.ln2_gain, w.ln2_bias)


def pool_segment(seq, mask, proj):
    """Softmax-weighted sum of the masked rows of ``seq``; returns ``[H]``."""
    seq = as_tensor(seq)
    mask = np.asarray(mask, dtype=bool)
    positions = np.flatnonzero(mask)
    if positions.size == 0:
        raise SegmentError("cannot pool an empty segment")
    rows = ops.index(seq, positions)
    weights = ops.softmax(ops.reshape(rows @ proj, (1, positions.size)))
    return ops.reshape(weights @ rows, (seq.shape[1],))


@dataclass(frozen=True)
class ModelConfig:
    hidden: int = 32
    iterations: int = 2
    max_len: int = 256
    granularity: str = Granularity.EDU.value
    variant: str = GraphVariant.STANDARD.value
    use_graph: bool = True
    dropout: float = 0.1


@dataclass
class PreparedOption:
    seq: object  # InputSequence
    graph: object  # DiscourseGraph or None
    adjacency: object  # Adjacency or None


@dataclass
class OptionScore:
    logits: np.ndarray
    probabilities: np.ndarray
    predicted: int


class DAGN:
    """Encoder, graph reasoner and prediction head with their parameters."""

    def __init__(self, config, vocab, seed=0):
        self.config = config
        self.vocab = vocab
        self.seed = seed
        self.lib = load_delimiter_library()
        rng = make_rng(seed, stream=0)
        self.encoder = EncoderWeights(len(vocab), config.hidden, config.max_len, rng)
        self.reasoner = ReasonerWeights(config.hidden, rng)
        self.predictor = PredictorWeights(config.hidden, rng)

    def parameters(self):
        return self.encoder.parameters() + self.reasoner.parameters() + self.predictor.parameters()

    def prepare(self, sample):
        """Segment, build inputs and graphs for every option (no parameters involved)."""
        seg = segment_sample(sample, self.lib, self.config.granularity)
        prepared = []
        for k in range(len(sample.options)):
            seq = build_input(sample, k, seg, self.vocab, self.config.max_len)
            graph = adjacency = None
            if self.config.use_graph and seq.edu_spans:
                g = build_graph(seg.context.edus, seg.context.hits,
                                seg.options[k].edus, seg.options[k].hits, k)
                graph = apply_variant(g.subgraph(seq.edu_ids), self.config.variant)
                adjacency = Adjacency.from_graph(graph)
            prepared.append(PreparedOption(seq, graph, adjacency))
        return prepared

    def score_option(self, option, rng=None, trace=None):
        """Scalar logit for one prepared option; ``rng`` enables dropout."""
        cfg = self.config
        p = self.predictor
        tokens = encode(option.seq, self.encoder)
        if rng is not None:
            tokens = ops.dropout(tokens, cfg.dropout, rng)
        enhanced = tokens
        if option.adjacency is not None:
            edus = edu_embed(tokens, option.seq.edu_spans)
            v_final = reason(edus, option.adjacency, self.reasoner, cfg.iterations, trace=trace)
            enhanced = enhance_tokens(tokens, v_final, option.seq.edu_spans)
        seq = encode_sequence(enhanced, p)
        ctx = pool_segment(seq, option.seq.context_mask, p.pool_ctx)
        qo = pool_segment(seq, option.seq.qo_mask, p.pool_qo)
        feats = ops.reshape(ops.concat([ctx, qo, ops.index(tokens, 0)]), (1, 3 * cfg.hidden))
        if rng is not None:
            feats = ops.dropout(feats, cfg.dropout, rng)
        hidden = ops.gelu(feats @ p.mlp_w1 + p.mlp_b1)
        return ops.reshape(hidden @ p.mlp_w2 + p.mlp_b2, ())

    def logits(self, prepared, rng=None):
        if len(prepared) != 4:
            raise SampleFormatError(f"expected 4 options, got {len(prepared)}")
        return ops.concat([ops.reshape(self.score_option(o, rng), (1,)) for o in prepared])

    def loss(self, prepared, label, rng=None):
        return ops.cross_entropy(self.logits(prepared, rng), label)

    def predict(self, sample, prepared=None):
        if len(sample.options) != 4:
            raise SampleFormatError(f"sample {sample.id}: expected 4 options, "
                                    f"got {len(sample.options)}")
        prepared = prepared or self.prepare(sample)
        return score_from_logits(self.logits(prepared).data)


def score_from_logits(logits):
    logits = np.asarray(logits, dtype=np.float64)
    z = np.exp(logits - logits.max())
    probs = z / z.sum()
    return OptionScore(logits.copy(), probs, int(np.argmax(logits)))


def score_option(sample, k, model):
    """Logit for option ``k`` of ``sample`` under ``model``."""
    return model.score_option(model.prepare(sample)[k])


def predict(sample, model):
    return model.predict(sample)
