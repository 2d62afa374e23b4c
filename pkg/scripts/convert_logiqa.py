"""Convert upstream LogiQA plain text into the JSON Lines schema read by ``load_logiqa``.

The upstream files hold one record per block, blocks separated by blank
lines::

    <answer letter a-d>
    <context>
    <question>
    A.<option>
    B.<option>
    C.<option>
    D.<option>

Usage: python3 scripts/convert_logiqa.py Eval.txt dev.jsonl [--prefix dev]
"""

import argparse
import re
import sys

from dagn.harness.data import IngestionError, QASample, write_jsonl

_OPTION = re.compile(r"^\s*([A-Da-d])\s*[.)]\s*(.*)$")
LETTERS = "abcd"


def parse_blocks(lines):
    """Yield (first line number, stripped lines) for every non-blank block."""
    block, start = [], None
    for number, line in enumerate(lines, 1):
        line = line.strip()
        if line:
            if not block:
                start = number
            block.append(line)
        elif block:
            yield start, block
            block = []
    if block:
        yield start, block


def to_sample(block, start, sample_id):
    if len(block) != 7:
        raise IngestionError(f"line {start}: expected 7 lines in a record, got {len(block)}")
    letter, context, question, *raw_options = block
    if letter.lower() not in LETTERS:
        raise IngestionError(f"line {start}: answer must be one of a-d, got {letter!r}")
    options = []
    for offset, raw in enumerate(raw_options):
        m = _OPTION.match(raw)
        if not m or m.group(1).lower() != LETTERS[offset]:
            raise IngestionError(f"line {start + 3 + offset}: expected option "
                                 f"{LETTERS[offset].upper()}, got {raw!r}")
        options.append(m.group(2).strip())
    return QASample(sample_id, context, question, tuple(options), LETTERS.index(letter.lower()))


def convert(lines, prefix):
    return [to_sample(block, start, f"{prefix}_{i}")
            for i, (start, block) in enumerate(parse_blocks(lines))]


def main(argv=None):
    parser = argparse.ArgumentParser(description="convert LogiQA plain text to JSON Lines")
    parser.add_argument("input")
    parser.add_argument("output")
    parser.add_argument("--prefix", default="logiqa", help="id prefix, ids are <prefix>_<index>")
    args = parser.parse_args(argv)
    with open(args.input, encoding="utf-8") as fh:
        try:
            samples = convert(fh, args.prefix)
        except IngestionError as err:
            sys.exit(f"{args.input}: {err}")
    write_jsonl(samples, args.output)
    print(f"wrote {len(samples)} samples to {args.output}")


if __name__ == "__main__":
    main()
