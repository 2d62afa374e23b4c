"""QA samples and dataset loaders (ReClor JSON, normalized LogiQA JSON Lines)."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass


class IngestionError(ValueError):
    pass


@dataclass(frozen=True)
class QASample:
    id: str
    context: str
    question: str
    options: tuple
    label: int | None = None

    def __post_init__(self):
        if len(self.options) != 4:
            raise IngestionError(f"sample {self.id}: expected 4 options, got {len(self.options)}")
        if self.label is not None and not (isinstance(self.label, int) and 0 <= self.label < 4):
            raise IngestionError(f"sample {self.id}: label {self.label!r} not in 0..3")

    def to_json(self):
        d = asdict(self)
        d["options"] = list(self.options)
        return d

    def text_hash(self):
        blob = json.dumps([self.context, self.question, list(self.options)], ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _get(obj, key, sample_id):
    if key not in obj:
        raise IngestionError(f"sample {sample_id}: missing field {key!r}")
    return obj[key]


def _make_sample(obj, sample_id, options_key):
    if not isinstance(obj, dict):
        raise IngestionError(f"sample {sample_id}: expected a JSON object")
    options = _get(obj, options_key, sample_id)
    if not isinstance(options, list) or not all(isinstance(o, str) for o in options):
        raise IngestionError(f"sample {sample_id}: {options_key!r} must be a list of strings")
    if len(options) != 4:
        raise IngestionError(f"sample {sample_id}: expected 4 options, got {len(options)}")
    label = obj.get("label")
    if label is not None and (isinstance(label, bool) or not isinstance(label, int)):
        raise IngestionError(f"sample {sample_id}: label must be an integer")
    return QASample(
        id=str(sample_id),
        context=str(_get(obj, "context", sample_id)),
        question=str(_get(obj, "question", sample_id)),
        options=tuple(options),
        label=label,
    )


def load_reclor(path):
    """ReClor split: JSON array of {context, question, answers, label, id_string}.

    The blind test split has no ``label``; those samples load with ``label=None``.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise IngestionError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, list):
        raise IngestionError(f"{path}: expected a JSON array of samples")
    samples = []
    for i, obj in enumerate(raw):
        sample_id = obj.get("id_string", f"#{i}") if isinstance(obj, dict) else f"#{i}"
        samples.append(_make_sample(obj, sample_id, "answers"))
    return samples


def load_logiqa(path):
    """Normalized LogiQA: one {id, context, question, options, label} object per line."""
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestionError(f"{path}: line {lineno}: invalid JSON ({exc})") from None
            try:
                sample_id = obj.get("id", f"line{lineno}") if isinstance(obj, dict) else lineno
                samples.append(_make_sample(obj, sample_id, "options"))
            except IngestionError as exc:
                raise IngestionError(f"{path}: line {lineno}: {exc}") from None
    return samples


def write_jsonl(samples, path):
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_json(), ensure_ascii=False) + "\n")


def load_dataset(path, fmt=None):
    """Dispatch on ``fmt`` ('reclor' | 'logiqa' | 'jsonl'), else on the file suffix."""
    fmt = fmt or ("reclor" if str(path).endswith(".json") else "logiqa")
    if fmt == "reclor":
        return load_reclor(path)
    if fmt in ("logiqa", "jsonl", "synthetic"):
        return load_logiqa(path)
    raise IngestionError(f"unknown dataset format {fmt!r}")
