"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Every test appends a ``[PASS]`` or ``[FAIL]`` line to ``RESULTS``; the
conftest prints them as a block at the end of the pytest run.
"""

import random
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from dagn.graph import GraphVariant, apply_variant
from dagn.harness import ABLATION_ROWS, ExperimentConfig, generate_synthetic, run_ablation, train
from dagn.harness.solver import accuracy as solver_accuracy
from dagn.harness.data import QASample
from dagn.numerics import ops
from dagn.numerics.gradcheck import finite_diff_check
from dagn.numerics.init import make_rng
from dagn.numerics.tensor import Parameter, Tape, Tensor
from dagn.encoder import EncoderWeights, Vocabulary, build_input, edu_embed, encode
from dagn.predictor import DAGN, ModelConfig, PredictorWeights, encode_sequence, pool_segment
from dagn.reasoner import NodeState, ReasonerWeights, enhance_tokens, node_weights, propagate, reason
from dagn.segmenter import (
    EDU,
    LIBRARY_SHA256,
    DelimiterKind,
    load_delimiter_library,
    segment,
    segment_sample,
)

from conftest import FIG1_OPTION
from oracles import (
    brute_force_edges,
    brute_force_segment,
    constructed_corpus,
    dense_propagate,
    random_delimited_texts,
)
from test_graph import check_invariants, edge_set, graph_of
from test_reasoner import (
    E,
    I,
    make_graph,
    oracle_weights,
    permuted,
    random_graph,
    random_weights,
    symmetric_topologies,
)

RESULTS = []


@contextmanager
def criterion(number, title):
    start = time.perf_counter()
    notes = []
    status = "FAIL"
    try:
        yield notes
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        detail = f"; {'; '.join(notes)}" if notes else ""
        line = f"[{status}] criterion {number}: {title} ({elapsed:.1f}s{detail})"
        RESULTS.append(line)
        print(line)


def test_criterion_1_delimiter_fidelity():
    with criterion(1, "delimiter library fidelity") as notes:
        start = time.perf_counter()
        lib = load_delimiter_library()
        assert lib.checksum() == LIBRARY_SHA256
        assert len(lib.connectives) == 100 and len(set(lib.connectives)) == 100
        assert set(lib.punctuation) == {".", ",", ";", ":"}
        for phrase in ("because", "on the one hand on the other hand", "as a result", "either or"):
            assert lib.kind_of(phrase) is DelimiterKind.EXPLICIT
        assert lib.kind_of(";") is DelimiterKind.PUNCT
        elapsed = time.perf_counter() - start
        notes.append(f"sha256 {lib.checksum()[:12]}, load {elapsed * 1e3:.2f} ms")
        assert elapsed < 1.0


def test_criterion_2_segmentation_oracle():
    with criterion(2, "segmentation matches brute-force splitter") as notes:
        corpus = constructed_corpus(200)
        agree = 0
        for text in corpus:
            edus, hits = segment(text)
            got = ([list(e.positions) for e in edus],
                   [(h.phrase, *h.token_span, h.left_edu, h.right_edu) for h in hits])
            agree += got == brute_force_segment(text)
        notes.append(f"{agree}/{len(corpus)} cases agree")
        assert agree == len(corpus)
        edus, hits = segment(FIG1_OPTION)
        assert len(edus) == 2
        assert [(h.phrase, h.kind, h.left_edu, h.right_edu) for h in hits] == [
            ("because", DelimiterKind.EXPLICIT, 0, 1)]


def test_criterion_3_graph_oracle():
    with criterion(3, "graph construction matches brute-force adjacency") as notes:
        texts = random_delimited_texts(100)
        r = random.Random(5)
        checked = 0
        for text in texts:
            option = r.choice(texts)
            c_edus, c_hits = brute_force_segment(text)
            o_edus, o_hits = brute_force_segment(option)
            if not c_edus and not o_edus:  # nothing to build
                continue
            g = graph_of(text, option)
            assert edge_set(g) == brute_force_edges(c_hits) | brute_force_edges(o_hits, len(c_edus))
            for variant in GraphVariant:
                check_invariants(apply_variant(g, variant))
            checked += 1
        for n in range(2, 9):
            g = graph_of(", ".join(f"w{i}" for i in range(n)))
            assert len(apply_variant(g, GraphVariant.FULLY_CONNECTED).edges) == n * (n - 1)
        notes.append(f"{checked} graphs checked, fully connected n=2..8")
        assert checked >= 95


def test_criterion_4_message_passing_oracle():
    with criterion(4, "propagation matches dense-loop oracle") as notes:
        worst, count = 0.0, 0
        for n in range(1, 5):
            w = random_weights(3, n)
            v = np.random.default_rng(n).normal(size=(n, 3))
            state = NodeState(Tensor(v))
            alpha = node_weights(state, w)
            for edges in symmetric_topologies(n):
                got = propagate(state, make_graph(n, edges), alpha, w).data
                want = dense_propagate(v, alpha.data[:, 0], edges, oracle_weights(w))
                worst = max(worst, float(np.abs(got - want).max(initial=0.0)))
                count += 1
        rng = np.random.default_rng(44)
        for trial in range(50):
            n, h = int(rng.integers(1, 7)), int(rng.integers(1, 5))
            w = random_weights(h, 500 + trial)
            edges = random_graph(rng, n, symmetric=bool(trial % 2))
            v = rng.normal(size=(n, h))
            state = NodeState(Tensor(v))
            alpha = node_weights(state, w)
            got = propagate(state, make_graph(n, edges), alpha, w).data
            want = dense_propagate(v, alpha.data[:, 0], edges, oracle_weights(w))
            worst = max(worst, float(np.abs(got - want).max(initial=0.0)))
            count += 1
        notes.append(f"{count} graphs, max abs diff {worst:.1e}")
        assert worst <= 1e-12


def _gradient_cases():
    r = np.random.default_rng(2024)

    def param(shape, name, scale=1.0):
        return Parameter(r.normal(size=shape) * scale, name)

    a, b = param((4, 3), "a"), param((3, 2), "b")
    probe42 = r.normal(size=(4, 2))
    yield "matmul", lambda: ops.sum(ops.matmul(a, b) * probe42), [a, b]

    x = param((3, 4), "x")
    probe34 = r.normal(size=(3, 4))
    for kind in ("sigmoid", "gelu", "tanh"):
        yield kind, (lambda k=kind: ops.sum(ops.activation(x, k) * probe34)), [x]
    xr = Parameter(np.where(np.abs(x.data) < 1e-2, 0.5, x.data), "xr")
    yield "relu", lambda: ops.sum(ops.relu(xr) * probe34), [xr]
    yield "softmax", lambda: ops.sum(ops.softmax(x) * probe34), [x]
    gain, bias = param(4, "gain"), param(4, "bias")
    yield "layer_norm", lambda: ops.sum(ops.layer_norm(x, gain, bias) * probe34), [x, gain, bias]
    s = param(4, "scores")
    yield "cross_entropy", lambda: ops.cross_entropy(s, 1), [s]
    gx, w_h, b_h = param((5, 9), "gx"), param((3, 9), "w_h", 0.5), param(9, "b_h", 0.1)
    probe53 = r.normal(size=(5, 3))
    yield "gru", lambda: ops.sum(ops.gru(gx, w_h, b_h, reverse=True) * probe53), [gx, w_h, b_h]

    sample = QASample("g", "rain falls because clouds form.", "why?",
                      ("rain falls", "clouds form", "rain falls because clouds form", "sun"), 2)
    vocab = Vocabulary.from_samples([sample])
    seq = build_input(sample, 2, segment_sample(sample), vocab)
    enc = EncoderWeights(len(vocab), 4, 24, make_rng(3))
    enc.mix_b.data[...] = make_rng(4).normal(size=4) * 0.1
    probe_e = r.normal(size=(len(seq.edu_spans), 4))
    yield ("encode+edu_embed",
           lambda: ops.sum(edu_embed(encode(seq, enc), seq.edu_spans) * probe_e),
           enc.parameters())

    g = make_graph(5, {(0, E, 1), (1, E, 0), (1, I, 2), (2, I, 1),
                       (3, E, 4), (4, E, 3), (0, I, 4), (4, I, 0)})
    tokens = param((9, 4), "tokens")
    spans = [(0, 1), (2,), (4, 5), (6,), (7, 8)]
    probe94 = r.normal(size=(9, 4))
    for k in (1, 2, 3):
        rw = random_weights(4, 30 + k)
        yield (f"reason+enhance K={k}",
               lambda rw=rw, k=k: ops.sum(enhance_tokens(
                   tokens, reason(edu_embed(tokens, spans), g, rw, k), spans) * probe94),
               [tokens] + rw.parameters())

    pw = PredictorWeights(4, make_rng(1))
    xs = param((5, 4), "xs")
    probe54 = r.normal(size=(5, 4))
    yield ("encode_sequence", lambda: ops.sum(encode_sequence(xs, pw) * probe54),
           [xs] + pw.parameters()[:-6])
    proj = param((4, 1), "proj")
    probe4 = r.normal(size=4)
    yield ("pool_segment", lambda: ops.sum(pool_segment(xs, [1, 1, 0, 1, 0], proj) * probe4),
           [xs, proj])

    for k in (1, 2, 3):
        for seed in range(50):
            model = DAGN(ModelConfig(hidden=8, iterations=k, max_len=24, dropout=0.0), vocab, seed)
            prepared = model.prepare(sample)
            with Tape() as tape:
                model.loss(prepared, sample.label)
            if tape.relu_margin > 1e-3:  # keep clear of ReLU kinks
                break
        yield (f"full loss H=8 K={k}",
               lambda m=model, p=prepared: m.loss(p, sample.label), model.parameters())


def test_criterion_5_gradient_suite():
    with criterion(5, "finite-difference gradient suite") as notes:
        start = time.perf_counter()
        failures, worst = [], 0.0
        n = 0
        for name, f, params in _gradient_cases():
            report = finite_diff_check(f, params, h=1e-5, tol=1e-4)
            n += 1
            worst = max(worst, report.max_error)
            if not report.passed or report.relu_margin <= 1e-3:
                failures.append(f"{name}: {report} margin {report.relu_margin:.1e}")
        elapsed = time.perf_counter() - start
        notes.append(f"{n} checks, max rel err {worst:.1e}")
        assert not failures, failures
        assert elapsed < 120


def test_criterion_6_equivariance():
    with criterion(6, "reasoning equivariance and option permutation") as notes:
        rng = np.random.default_rng(6)
        worst_reason = 0.0
        for trial in range(50):
            n, h = int(rng.integers(1, 7)), int(rng.integers(1, 5))
            w = random_weights(h, 900 + trial)
            edges = random_graph(rng, n)
            e = rng.normal(size=(n, h))
            perm = rng.permutation(n)
            e_perm = np.empty_like(e)
            e_perm[perm] = e
            k = int(rng.integers(1, 4))
            out = reason(e, make_graph(n, edges), w, k).data
            out_perm = reason(e_perm, make_graph(n, permuted(edges, perm)), w, k).data
            worst_reason = max(worst_reason, float(np.abs(out_perm[perm] - out).max()))

        samples = generate_synthetic(50, seed=6, split="test")
        model = DAGN(ModelConfig(hidden=8, dropout=0.0), Vocabulary.from_samples(samples), seed=6)
        worst_predict, argmax_ok = 0.0, 0
        for s in samples:
            base = model.predict(s)
            perm = rng.permutation(4)
            shuffled = QASample(s.id, s.context, s.question,
                                tuple(s.options[i] for i in perm), int(np.argsort(perm)[s.label]))
            got = model.predict(shuffled)
            worst_predict = max(worst_predict,
                                float(np.abs(got.probabilities - base.probabilities[perm]).max()))
            argmax_ok += perm[got.predicted] == base.predicted
        notes.append(f"reason max diff {worst_reason:.1e}, predict max diff {worst_predict:.1e}")
        assert worst_reason <= 1e-10 and worst_predict <= 1e-10
        assert argmax_ok == len(samples)


CRITERION7 = ExperimentConfig(hidden=32, n_train=256, n_dev=64, epochs=20, seed=0)


@pytest.fixture(scope="module")
def synthetic_runs():
    runs = []
    for _ in range(2):
        start = time.perf_counter()
        result = train(CRITERION7)
        runs.append((result, time.perf_counter() - start))
    return runs


def test_criterion_7_synthetic_end_to_end(synthetic_runs):
    with criterion(7, "synthetic end-to-end training") as notes:
        result, elapsed = synthetic_runs[0]
        solver = solver_accuracy(generate_synthetic(256, 0, "train")
                                 + generate_synthetic(64, 0, "dev"))
        notes.append(f"dev acc {result.report.accuracy:.3f} (best epoch {result.best_epoch}), "
                     f"solver {solver:.3f}, train {elapsed:.0f}s")
        assert result.report.accuracy >= 0.95
        assert len(result.dev_curve) <= 20
        assert solver == 1.0
        assert elapsed < 300


def test_criterion_8_ablation_plumbing():
    with criterion(8, "ablation runner plumbing") as notes:
        base = ExperimentConfig(hidden=16, n_train=64, n_dev=32, epochs=2, seed=0)
        first = run_ablation(base)
        second = run_ablation(base)
        assert [r.name for r in first] == [name for name, _ in ABLATION_ROWS]
        assert [r.to_json() for r in first] == [r.to_json() for r in second]
        assert len({r.train_order_digest for r in first}) == 1
        for row in first:
            assert row.report.n == 32 and 0.0 <= row.report.accuracy <= 1.0
        notes.append(", ".join(f"{r.name}={r.report.accuracy:.2f}" for r in first))


def test_criterion_9_determinism(synthetic_runs):
    with criterion(9, "byte-identical checkpoints and reports") as notes:
        (a, _), (b, _) = synthetic_runs
        blob_a, blob_b = a.checkpoint_bytes(), b.checkpoint_bytes()
        notes.append(f"checkpoint {len(blob_a)} bytes")
        assert blob_a == blob_b
        assert a.report.to_json() == b.report.to_json()
        assert a.losses == b.losses and a.order_digest == b.order_digest


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
