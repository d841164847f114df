import sys
from pathlib import Path

import pytest

from artifact.checker import run_deep
from artifact.parser import parse, parse_type

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

sys.setrecursionlimit(max(sys.getrecursionlimit(), 60000))


def ty(text, env=None, types=None):
    """Parse a type; undeclared lowercase names become shared type variables."""
    return parse_type(text, types, env)


def load(name):
    path = CORPUS / name
    return parse(path.read_text(encoding="utf-8"), str(path))


def deep(fn, *args, **kwargs):
    return run_deep(fn, *args, **kwargs)


@pytest.fixture
def corpus_dir():
    return CORPUS
