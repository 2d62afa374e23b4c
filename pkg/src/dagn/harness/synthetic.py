"""Template-generated causal-reasoning samples.

Each context states one causal link (effect ``because`` cause, or cause
``therefore`` effect) and one contrast between two unrelated clauses. The
correct option restates the causal link; distractors reverse its direction
with the same words, or join the same clauses with a contrast connective.
One distractor always has exactly the correct option's token multiset, so a
bag-of-words scorer cannot separate them.
"""

from collections import Counter

import numpy as np

from dagn.harness.data import QASample
from dagn.numerics.init import make_rng
from dagn.segmenter import load_delimiter_library, segment, tokenize

CAUSES = (
    "heavy rain falls", "the wind grows strong", "fuel prices rise",
    "the power grid fails", "the team trains daily", "consumer demand grows",
    "the lake freezes", "the sun shines brightly", "the factory closes",
    "taxes are cut", "the dam breaks", "interest rates drop",
    "the drought persists", "the old bridge collapses", "the company hires engineers",
    "the teacher explains clearly",
)
EFFECTS = (
    "the river floods", "old trees fall down", "airline tickets cost more",
    "the city goes dark", "the team wins the final", "shops sell more goods",
    "skaters crowd the ice", "crops ripen quickly", "many workers lose jobs",
    "families spend more money", "the valley is flooded", "people buy more houses",
    "wells run dry", "traffic is blocked", "products improve",
    "students understand the lesson",
)
FILLERS = (
    "Local reporters described the situation",
    "Experts have studied the region",
    "Officials published a short report",
    "",
)
QUESTIONS = (
    "Which one of the following is most strongly supported by the passage?",
    "Which statement follows from the information above?",
    "According to the passage, which claim is true?",
)
CONTRAST = ("although", "but")


def _cap(text):
    return text[:1].upper() + text[1:]


def _causal_statement(cause, effect, form):
    return f"{effect} because {cause}" if form == 0 else f"{cause} therefore {effect}"


def _options_for(cause, effect, rng):
    form = int(rng.integers(2))
    correct = _causal_statement(cause, effect, form)
    distractors = [
        # same words as the correct option, direction reversed
        _causal_statement(effect, cause, form),
        _causal_statement(effect, cause, 1 - form),
        f"{effect} {CONTRAST[int(rng.integers(2))]} {cause}",
    ]
    order = rng.permutation(3)
    return correct, [distractors[i] for i in order]


_SPLIT_STREAMS = {"train": 7, "dev": 8, "test": 9}


def generate_synthetic(n, seed=0, split="train"):
    """``n`` labeled samples; labels are balanced over the four positions.

    ``split`` selects an independent random stream, so train and dev sets
    drawn with the same seed do not share a sample sequence.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = make_rng(seed, stream=_SPLIT_STREAMS[split])
    labels = rng.permutation(np.tile(np.arange(4), (n + 3) // 4))[:n]
    samples = []
    for i in range(n):
        c_idx = rng.choice(len(CAUSES), size=2, replace=False)
        e_idx = rng.choice(len(EFFECTS), size=2, replace=False)
        cause, other_cause = CAUSES[c_idx[0]], CAUSES[c_idx[1]]
        effect, other_effect = EFFECTS[e_idx[0]], EFFECTS[e_idx[1]]

        statements = [
            _cap(_causal_statement(cause, effect, int(rng.integers(2)))) + ".",
            _cap(f"{other_effect} {CONTRAST[int(rng.integers(2))]} {other_cause}") + ".",
        ]
        statements = [statements[j] for j in rng.permutation(2)]
        filler = FILLERS[int(rng.integers(len(FILLERS)))]
        if filler:
            statements.insert(int(rng.integers(3)), filler + ".")
        context = " ".join(statements)

        correct, distractors = _options_for(cause, effect, rng)
        label = int(labels[i])
        options = distractors[:label] + [correct] + distractors[label:]
        samples.append(QASample(
            id=f"synth-{split}-{seed}-{i}",
            context=context,
            question=QUESTIONS[int(rng.integers(len(QUESTIONS)))],
            options=tuple(options),
            label=label,
        ))
    return samples


def self_check(samples):
    """Generator invariants; raises AssertionError on violation."""
    lib = load_delimiter_library()
    for s in samples:
        for opt in s.options:
            edus, _ = segment(opt, lib)
            assert len(edus) >= 2, f"{s.id}: option {opt!r} has {len(edus)} EDU(s)"
        bags = [Counter(t.lower for t in tokenize(o)) for o in s.options]
        gold = bags[s.label]
        assert any(b == gold for k, b in enumerate(bags) if k != s.label), \
            f"{s.id}: no distractor shares the correct option's tokens"
