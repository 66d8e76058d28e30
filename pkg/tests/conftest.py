from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from treematch.tree import DraftNode, LabeledTree, freeze

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"


def build(tag: str, *children: DraftNode, attrs=None, text=None) -> DraftNode:
    return DraftNode(tag=tag, attrs=list(attrs or []), text=text, children=list(children))


@pytest.fixture
def three_node_page() -> LabeledTree:
    return freeze(build("html", build("body", build("p", text="hi"))))


@pytest.fixture
def corpus_pages() -> list[Path]:
    pages = sorted(CORPUS_DIR.glob("*.html"))
    if not pages:
        pytest.skip("bundled corpus not generated")
    return pages
