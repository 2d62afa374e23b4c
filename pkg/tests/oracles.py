"""Independent reference implementations used as test oracles.

None of these call into the code under test except for the delimiter data
itself, so agreement between the two is meaningful.
"""

import random
import re

import numpy as np

from dagn.segmenter import EXPLICIT_CONNECTIVES, PUNCTUATION

_TOKEN_RE = re.compile(r'[.,;:?!()\[\]"]|[^\s.,;:?!()\[\]"]+')


def brute_force_segment(text, connectives=EXPLICIT_CONNECTIVES, punctuation=PUNCTUATION):
    """Regex splitter over the space-joined lowercased token stream.

    Returns (edus, hits): edus as lists of token indices, hits as
    (phrase, first, last, left_edu_index_or_None, right_edu_index_or_None).
    """
    tokens = _TOKEN_RE.findall(text)
    stream = " ".join(t.lower() for t in tokens)
    phrases = sorted(set(connectives) | set(punctuation), key=len, reverse=True)
    if not phrases or not tokens:
        return ([[i for i in range(len(tokens))]] if tokens else []), []
    pattern = re.compile(r"(?:^|(?<= ))(?:%s)(?= |$)" % "|".join(map(re.escape, phrases)))

    label = [None] * len(tokens)  # edu ordinal, or "D" for delimiter tokens
    raw_hits = []
    for m in pattern.finditer(stream):
        first = stream.count(" ", 0, m.start())
        last = first + m.group(0).count(" ")
        raw_hits.append((m.group(0), first, last))
        for i in range(first, last + 1):
            label[i] = "D"

    edus = []
    for i, lab in enumerate(label):
        if lab == "D":
            continue
        if i > 0 and label[i - 1] != "D":
            edus[-1].append(i)
        else:
            edus.append([i])
        label[i] = len(edus) - 1

    hits = []
    for phrase, first, last in raw_hits:
        left = label[first - 1] if first > 0 and label[first - 1] != "D" else None
        right = label[last + 1] if last + 1 < len(tokens) and label[last + 1] != "D" else None
        hits.append((phrase, first, last, left, right))
    return edus, hits


def brute_force_edges(hits, offset=0):
    """Directed typed edges implied by a hit list from brute_force_segment."""
    edges = set()
    for phrase, _, _, left, right in hits:
        if left is None or right is None:
            continue
        kind = "r_I" if phrase in PUNCTUATION else "r_E"
        edges.add((left + offset, kind, right + offset))
        edges.add((right + offset, kind, left + offset))
    return edges


_PLAIN = ["alpha", "Beta", "gamma", "rain", "sun", "clouds", "form", "becausex", "results",
          "hand", "other", "the", "one", "a", "nor", "X", "y2", "Q?", "(note)", "ok!"]


def _case(r, s):
    return r.choice([s, s.upper(), s.capitalize(), s])


def _plain_words(lib_phrases):
    single = {p for p in lib_phrases if " " not in p}
    return [w for w in _PLAIN if w.lower() not in single]


def constructed_corpus(n=200, seed=0):
    """Texts covering multiword connectives, adjacent delimiters, empty runs
    and delimiter-free inputs, in roughly equal shares."""
    r = random.Random(seed)
    plain = _plain_words(EXPLICIT_CONNECTIVES)
    multi = [p for p in EXPLICIT_CONNECTIVES if " " in p]
    single = [p for p in EXPLICIT_CONNECTIVES if " " not in p]
    out = []
    for i in range(n):
        kind = i % 4
        pieces = []
        if kind == 0:  # multiword connectives, sometimes as prefixes of longer ones
            for _ in range(r.randint(1, 3)):
                pieces += r.sample(plain, r.randint(1, 3))
                pieces.append(_case(r, r.choice(multi)))
            if r.random() < 0.5:
                pieces += ["as", "a"]  # prefix of "as a result" that must not match as one
        elif kind == 1:  # adjacent delimiters and leading/trailing ones
            if r.random() < 0.7:
                pieces.append(r.choice(PUNCTUATION + ("because", "however")))
            for _ in range(r.randint(1, 4)):
                pieces += r.sample(plain, r.randint(0, 2))
                for _ in range(r.randint(1, 3)):
                    pieces.append(r.choice([r.choice(PUNCTUATION), _case(r, r.choice(single))]))
        elif kind == 2:  # no delimiters at all
            pieces = [r.choice(plain) for _ in range(r.randint(1, 10))]
        else:  # free mix
            pool = plain + single + multi + list(PUNCTUATION)
            pieces = [_case(r, r.choice(pool)) for _ in range(r.randint(0, 14))]
        text = ""
        for p in pieces:
            glue = "" if p in PUNCTUATION and r.random() < 0.5 else " " * r.randint(1, 2)
            text += glue + p
        out.append(text.strip() if r.random() < 0.8 else text)
    return out


def random_delimited_texts(n=100, seed=1):
    r = random.Random(seed)
    plain = _plain_words(EXPLICIT_CONNECTIVES)
    delims = list(PUNCTUATION) + ["because", "therefore", "however", "as a result", "and", "if"]
    texts = []
    for _ in range(n):
        parts = []
        for _ in range(r.randint(1, 6)):
            parts += r.sample(plain, r.randint(0, 3))
            parts.append(r.choice(delims))
        texts.append(" ".join(parts))
    return texts


def dense_propagate(v, alpha, edges, w_by_type):
    """Neighbour-averaged typed messages by explicit loops over per-type N x N masks."""
    n, h = v.shape
    masks = {r: np.zeros((n, n)) for r in w_by_type}
    for src, r, dst in edges:
        masks[r][dst, src] += 1.0
    out = np.zeros((n, h))
    for i in range(n):
        deg = sum(masks[r][i, j] for r in masks for j in range(n))
        if deg == 0:
            continue
        acc = np.zeros(h)
        for r, mask in masks.items():
            for j in range(n):
                for _ in range(int(mask[i, j])):
                    for col in range(h):
                        acc[col] += alpha[j] * sum(v[j, k] * w_by_type[r][k, col] for k in range(h))
        out[i] = acc / deg
    return out
