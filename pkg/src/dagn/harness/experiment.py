"""Training, evaluation and the ablation runner."""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass, field, replace

from dagn.encoder import Vocabulary
from dagn.graph import GraphVariant
from dagn.harness.config import ExperimentConfig, resolve_data_path
from dagn.harness.data import load_logiqa, load_reclor
from dagn.harness.optim import AdamW
from dagn.harness.synthetic import generate_synthetic
from dagn.numerics import checkpoint
from dagn.numerics.init import make_rng
from dagn.numerics.tensor import Tape, backward
from dagn.predictor import DAGN, ModelConfig
from dagn.segmenter import Granularity

log = logging.getLogger(__name__)


class TrainingError(ValueError):
    pass


@dataclass
class EvalReport:
    accuracy: float | None
    predictions: list  # one dict per sample
    config_hash: str
    seed: int

    @property
    def n(self):
        return len(self.predictions)

    def to_json(self, with_predictions=True):
        out = {"accuracy": self.accuracy, "n": self.n, "config_hash": self.config_hash,
               "seed": self.seed}
        if with_predictions:
            out["predictions"] = self.predictions
        return out

    def write_leaderboard(self, path):
        """One predicted option index per line, in sample order."""
        with open(path, "w", encoding="ascii") as fh:
            for rec in self.predictions:
                fh.write(f"{rec['predicted']}\n")


@dataclass
class TrainResult:
    model: DAGN
    report: EvalReport  # dev report of the retained (best-dev) parameters
    losses: list = field(default_factory=list)  # mean loss per optimizer step
    dev_curve: list = field(default_factory=list)  # dev accuracy per epoch
    best_epoch: int = 0
    order_digest: str = ""  # sha256 of the sample order actually used

    def checkpoint_bytes(self):
        return model_checkpoint_bytes(self.model, self.report.config_hash)


def load_split(config, which):
    """Samples for ``which`` in {'train', 'dev'} per the config's data source."""
    if config.dataset_format == "synthetic":
        n = config.n_train if which == "train" else config.n_dev
        return generate_synthetic(n, config.seed, split=which)
    path = resolve_data_path(config.train_path if which == "train" else config.dev_path)
    if config.dataset_format == "reclor":
        return load_reclor(path)
    return load_logiqa(path)


def model_checkpoint_bytes(model, config_hash):
    extra = {"model_config": model.config.__dict__, "vocab": model.vocab.itos}
    return checkpoint.dumps(model.parameters(), model.seed, config_hash, extra)


def save_model(model, config_hash, directory):
    os.makedirs(directory, exist_ok=True)
    blob = model_checkpoint_bytes(model, config_hash)
    with open(os.path.join(directory, "model.ckpt"), "wb") as fh:
        fh.write(blob)
    model.vocab.save(os.path.join(directory, "vocab.txt"))
    return blob


def load_model(directory_or_file):
    path = directory_or_file
    if os.path.isdir(path):
        path = os.path.join(path, "model.ckpt")
    header, arrays = checkpoint.load(path)
    vocab_path = os.path.join(os.path.dirname(path), "vocab.txt")
    if os.path.exists(vocab_path):
        vocab = Vocabulary.load(vocab_path)
    else:
        vocab = Vocabulary(header["extra"]["vocab"])
    model = DAGN(ModelConfig(**header["extra"]["model_config"]), vocab, seed=header["seed"])
    checkpoint.restore(model.parameters(), arrays)
    return model, header


def evaluate(model, samples, config_hash="", prepared=None):
    """Accuracy plus per-sample predictions; accuracy is None if any label is missing."""
    records = []
    correct = 0
    labeled = all(s.label is not None for s in samples)
    for i, s in enumerate(samples):
        score = model.predict(s, prepared[i] if prepared is not None else None)
        rec = {"id": s.id, "predicted": score.predicted,
               "probabilities": [float(p) for p in score.probabilities]}
        if s.label is not None:
            rec["label"] = s.label
            correct += int(score.predicted == s.label)
        records.append(rec)
    accuracy = correct / len(samples) if labeled and samples else None
    return EvalReport(accuracy, records, config_hash, model.seed)


def train(config, train_samples=None, dev_samples=None, progress=None):
    """Train from scratch and keep the parameters with the best dev accuracy.

    Single-threaded and fully seeded: identical (config, data) gives
    byte-identical checkpoints.
    """
    train_samples = load_split(config, "train") if train_samples is None else train_samples
    dev_samples = load_split(config, "dev") if dev_samples is None else dev_samples
    if not train_samples:
        raise TrainingError("empty training set")
    missing = [s.id for s in train_samples if s.label is None]
    if missing:
        raise TrainingError(f"training samples without labels: {missing[:5]}")

    vocab = Vocabulary.from_samples(train_samples)
    model = DAGN(config.model_config(), vocab, seed=config.seed)
    params = model.parameters()
    optimizer = AdamW(params, lr=config.lr, weight_decay=config.weight_decay)
    shuffle_rng = make_rng(config.seed, stream=1)
    dropout_rng = make_rng(config.seed, stream=2)

    prep_train = [model.prepare(s) for s in train_samples]
    prep_dev = [model.prepare(s) for s in dev_samples]
    config_hash = config.hash()

    losses, dev_curve = [], []
    best_acc, best_epoch, best_state = -1.0, 0, None
    order_hash = hashlib.sha256()
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(train_samples))
        order_hash.update(order.astype("<i8").tobytes())
        for start in range(0, len(order), config.batch_size):
            batch = order[start:start + config.batch_size]
            optimizer.zero_grad()
            total = 0.0
            for i in batch:
                with Tape():
                    loss = model.loss(prep_train[i], train_samples[i].label, rng=dropout_rng)
                    scaled = loss * (1.0 / len(batch))
                backward(scaled)
                total += loss.item()
            optimizer.step()
            losses.append(total / len(batch))
        report = evaluate(model, dev_samples, config_hash, prep_dev) if dev_samples else None
        acc = report.accuracy if report and report.accuracy is not None else 0.0
        dev_curve.append(acc)
        if progress:
            progress(epoch, losses[-1], acc)
        log.info("epoch %d loss %.4f dev %.4f", epoch, losses[-1], acc)
        if acc > best_acc:
            best_acc, best_epoch = acc, epoch
            best_state = [p.data.copy() for p in params]

    for p, saved in zip(params, best_state):
        p.data[...] = saved
    final = evaluate(model, dev_samples, config_hash, prep_dev) if dev_samples else \
        EvalReport(None, [], config_hash, config.seed)
    return TrainResult(model, final, losses, dev_curve, best_epoch, order_hash.hexdigest())


ABLATION_ROWS = (
    ("DAGN", {}),
    ("DAGN - clause nodes", {"granularity": Granularity.CLAUSE.value}),
    ("DAGN - sentence nodes", {"granularity": Granularity.SENTENCE.value}),
    ("DAGN - single edge type", {"variant": GraphVariant.SINGLE_EDGE_TYPE.value}),
    ("DAGN - fully connected edges", {"variant": GraphVariant.FULLY_CONNECTED.value}),
    ("DAGN w/o graph module", {"use_graph": False}),
)


@dataclass
class AblationRow:
    name: str
    config: ExperimentConfig
    report: EvalReport
    train_order_digest: str

    def to_json(self):
        return {"name": self.name, "config_hash": self.report.config_hash,
                "accuracy": self.report.accuracy, "n": self.report.n, "seed": self.report.seed}


def run_ablation(base, train_samples=None, dev_samples=None, progress=None):
    """Train and evaluate every ablation row under one seed and data order."""
    train_samples = load_split(base, "train") if train_samples is None else train_samples
    dev_samples = load_split(base, "dev") if dev_samples is None else dev_samples
    rows = []
    for name, changes in ABLATION_ROWS:
        cfg = replace(base, **changes)
        result = train(cfg, train_samples, dev_samples)
        rows.append(AblationRow(name, cfg, result.report, result.order_digest))
        if progress:
            progress(rows[-1])
    return rows

