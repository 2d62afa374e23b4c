import sys

import numpy as np
import pytest

from dagn.encoder import Vocabulary
from dagn.harness.data import QASample
from dagn.predictor import DAGN, ModelConfig

FIG1_CONTEXT = (
    "A signal in a pure analog system consists of an infinite number of possible values, "
    "while a signal in a digital system has a restricted number of possible values. "
    "Errors can occur in the transmission of digital signals."
)
FIG1_OPTION = ("digital systems are the best information systems because error cannot occur "
               "in the emission of digital signals")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def fig1_sample():
    return QASample(
        id="fig1",
        context=FIG1_CONTEXT,
        question="Which one of the following can be properly inferred?",
        options=(
            FIG1_OPTION,
            "digital systems are more reliable than analog systems",
            "pure analog systems cannot transmit signals, but digital systems can",
            "errors occur when signals are transmitted",
        ),
        label=3,
    )


@pytest.fixture
def toy_sample():
    return QASample(
        id="toy",
        context="rain falls because clouds form.",
        question="Why?",
        options=("rain falls", "clouds form", "rain falls because clouds form", "sun"),
        label=2,
    )


def make_model(samples, hidden=8, iterations=2, seed=0, **kw):
    cfg = ModelConfig(hidden=hidden, iterations=iterations, max_len=kw.pop("max_len", 64),
                      dropout=0.0, **kw)
    return DAGN(cfg, Vocabulary.from_samples(samples), seed=seed)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
