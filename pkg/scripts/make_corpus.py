#!/usr/bin/env python3
"""Deterministically generate the bundled HTML corpus.

Pages imitate common site layouts (news, shop, docs, blog, forum, dashboard):
a header with navigation, a main region grown from repeated content blocks
(cards, articles, tables, forms, widget lists), an aside, and a footer.
Class vocabularies are sampled with Zipf-like weights so every page has
common, mid-frequency, and rare tokens; about a third of the nodes carry a
unique id. Re-running the script reproduces the same files byte for byte.
"""

from __future__ import annotations

import random
import sys
from html import escape
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from treematch.tree import DraftNode, parse_html  # noqa: E402

MASTER_SEED = 20240501

# (name, target node count); sizes span small sweep-friendly pages up to
# a few thousand nodes
PAGES = [
    ("news", 120), ("shop", 150), ("docs", 190), ("blog", 230),
    ("forum", 270), ("dash", 310), ("news", 350), ("shop", 420),
    ("docs", 500), ("blog", 600), ("forum", 700), ("dash", 850),
    ("news", 1000), ("shop", 1200), ("docs", 1400), ("blog", 1600),
    ("forum", 1900), ("dash", 2200), ("news", 2500), ("shop", 2800),
    ("docs", 3100), ("blog", 3400), ("forum", 3700), ("dash", 4200),
]

THEME_WORDS = {
    "news": "story headline breaking world politics sport culture opinion live "
            "column editor feature photo video brief update desk region metro "
            "business tech science health media press wire daily weekly byline",
    "shop": "product price cart basket deal offer sale stock brand rating review "
            "ship return size color badge featured bundle coupon gift wish list "
            "category filter sort grid tile thumb detail spec compare checkout",
    "docs": "guide chapter section reference api method param returns example "
            "note warning tip code block syntax index toc search version stable "
            "deprecated module class function argument usage install setup faq",
    "blog": "post entry draft tag archive comment reply author date share like "
            "subscribe feed related popular recent featured quote image caption "
            "gallery series topic category excerpt footer sidebar widget theme",
    "forum": "thread reply quote user avatar karma badge moderator sticky locked "
             "poll vote topic board category signature join online offline rank "
             "mention report flag spoiler edit history pinned hot new unread",
    "dash": "panel chart metric gauge alert status trend widget filter range "
            "export refresh legend axis series value delta target spark table "
            "row cell summary config layout grid drag drop pin unpin overview",
}

TEXT_WORDS = (
    "the a of and to in for with on from by about over under within across "
    "team value report number detail record moment change growth result part "
    "system place market field light water sound paper group music question"
).split()

VOID_TAGS = {"img", "input", "br", "meta", "link", "hr"}


def letter_code(number: int) -> str:
    """1 -> a, 26 -> z, 27 -> aa: id suffixes that survive word tokenization."""
    out = []
    while number > 0:
        number, rem = divmod(number - 1, 26)
        out.append(chr(ord("a") + rem))
    return "".join(reversed(out))


class PageBuilder:
    def __init__(self, theme: str, seed: int, target: int = 400):
        self.rng = random.Random(seed)
        base = THEME_WORDS[theme].split()
        # larger sites use larger class/slug vocabularies; grow the pool with
        # compound words so token multiplicities stay sublinear in page size
        wanted = max(len(base), int(2.5 * target**0.5))
        vocab = list(base)
        k = 0
        while len(vocab) < wanted:
            a = base[k % len(base)]
            b = base[(k * 7 + 3) % len(base)]
            k += 1
            if a != b:
                vocab.append(a + b)
        self.vocab = vocab
        self.weights = [1.0 / rank for rank in range(1, len(self.vocab) + 1)]
        self.theme = theme
        self.count = 0
        self.id_counter = 0

    def node(self, tag: str, *, classes: int = 0, with_id: bool | None = None,
             text_words: int = 0, attrs: list[tuple[str, str]] | None = None) -> DraftNode:
        self.count += 1
        attr_list = list(attrs or [])
        if classes:
            words = self.rng.choices(self.vocab, weights=self.weights, k=classes)
            attr_list.append(("class", " ".join(dict.fromkeys(words))))
        if with_id is None:
            with_id = self.rng.random() < 0.45
        if with_id:
            self.id_counter += 1
            attr_list.append(("id", f"{self.theme}-{letter_code(self.id_counter)}"))
        text = None
        if text_words:
            text = " ".join(self.rng.choice(TEXT_WORDS) for _ in range(text_words))
        return DraftNode(tag=tag, attrs=attr_list, text=text)

    def words(self, k: int) -> str:
        return " ".join(self.rng.choice(TEXT_WORDS) for _ in range(k))

    def slug(self, k: int = 2) -> str:
        # realistic URL path piece: "world-politics" style
        return "-".join(self.rng.choice(self.vocab) for _ in range(k))

    # -- building blocks ---------------------------------------------------

    def nav(self) -> DraftNode:
        nav = self.node("nav", classes=2, with_id=True)
        ul = self.node("ul", classes=1)
        for k in range(self.rng.randint(4, 7)):
            li = self.node("li", classes=1)
            a = self.node("a", classes=1, text_words=1,
                          attrs=[("href", f"/{self.theme}/{self.slug(1)}"),
                                 ("title", self.words(2))])
            li.children.append(a)
            ul.children.append(li)
        nav.children.append(ul)
        return nav

    def card(self) -> DraftNode:
        card = self.node("div", classes=2,
                         attrs=[("data-kind", self.rng.choice(self.vocab))])
        title = self.node("h3", classes=1)
        link = self.node("a", classes=1, text_words=2,
                         attrs=[("href", f"/{self.theme}/{self.slug(2)}/{self.rng.randint(100, 999)}")])
        title.children.append(link)
        body = self.node("p", classes=1, text_words=self.rng.randint(4, 10))
        meta = self.node("span", classes=2, text_words=2)
        card.children.extend([title, body, meta])
        if self.rng.random() < 0.5:
            card.children.append(
                self.node("img", attrs=[("src", f"/static/{self.slug(2)}.png"),
                                        ("alt", self.words(2))])
            )
        return card

    def article(self) -> DraftNode:
        art = self.node("article", classes=2, with_id=True)
        art.children.append(self.node("h2", classes=1, text_words=3))
        for _ in range(self.rng.randint(1, 3)):
            art.children.append(self.node("p", classes=1,
                                          text_words=self.rng.randint(6, 14)))
        tags = self.node("div", classes=1)
        for _ in range(self.rng.randint(2, 4)):
            tags.children.append(self.node("span", classes=1, text_words=1))
        art.children.append(tags)
        return art

    def table(self) -> DraftNode:
        table = self.node("table", classes=1, with_id=True)
        cols = self.rng.randint(3, 5)
        headers = [self.rng.choice(self.vocab) for _ in range(cols)]
        thead = self.node("thead")
        row = self.node("tr")
        for word in headers:
            th = self.node("th", classes=1, text_words=1, attrs=[("scope", "col")])
            th.text = word
            row.children.append(th)
        thead.children.append(row)
        tbody = self.node("tbody")
        for _ in range(self.rng.randint(2, 5)):
            tr = self.node("tr", classes=1)
            for word in headers:
                tr.children.append(
                    self.node("td", classes=1, text_words=self.rng.randint(1, 2),
                              attrs=[("data-col", word)])
                )
            tbody.children.append(tr)
        table.children.extend([thead, tbody])
        return table

    def form(self) -> DraftNode:
        form = self.node("form", classes=1, with_id=True,
                         attrs=[("action", f"/{self.theme}/submit")])
        for k in range(self.rng.randint(2, 4)):
            name = f"{self.rng.choice(self.vocab)}-{letter_code(k + 1)}"
            label = self.node("label", classes=1, text_words=1,
                              attrs=[("for", name)])
            field = self.node("input", with_id=True,
                              attrs=[("type", "text"), ("name", name),
                                     ("placeholder", self.words(2))])
            form.children.extend([label, field])
        select = self.node("select", classes=1, attrs=[("name", "pick")])
        for _ in range(self.rng.randint(2, 5)):
            word = self.rng.choice(self.vocab)
            option = self.node("option", text_words=1, attrs=[("value", word)])
            select.children.append(option)
        form.children.append(select)
        form.children.append(self.node("button", classes=2, text_words=1,
                                       attrs=[("type", "submit")]))
        return form

    def widget(self) -> DraftNode:
        box = self.node("div", classes=2)
        box.children.append(self.node("h4", classes=1, text_words=2))
        ul = self.node("ul", classes=1)
        for _ in range(self.rng.randint(3, 6)):
            li = self.node("li", classes=2)
            li.children.append(self.node("a", classes=1, text_words=2,
                                         attrs=[("href", f"/t/{self.slug(2)}"),
                                                ("title", self.words(1))]))
            ul.children.append(li)
        box.children.append(ul)
        return box

    def footer(self) -> DraftNode:
        footer = self.node("footer", classes=1, with_id=True)
        for _ in range(3):
            col = self.node("div", classes=1)
            col.children.append(self.node("h5", text_words=1))
            ul = self.node("ul")
            for _ in range(self.rng.randint(2, 4)):
                li = self.node("li")
                li.children.append(self.node("a", text_words=1, attrs=[("href", "#")]))
                ul.children.append(li)
            col.children.append(ul)
            footer.children.append(col)
        return footer

    def build(self, target: int) -> DraftNode:
        html = self.node("html", with_id=False, attrs=[("lang", "en")])
        head = self.node("head", with_id=False)
        head.children.append(self.node("meta", with_id=False,
                                       attrs=[("charset", "utf-8")]))
        title = self.node("title", with_id=False)
        title.text = f"{self.theme} {self.words(2)}"
        head.children.append(title)
        head.children.append(self.node("link", with_id=False,
                                       attrs=[("rel", "stylesheet"),
                                              ("href", "/static/site.css")]))
        body = self.node("body", classes=1)
        header = self.node("header", classes=2, with_id=True)
        header.children.append(self.node("h1", classes=1, text_words=2))
        header.children.append(self.nav())
        body.children.append(header)

        main = self.node("main", classes=1, with_id=True)
        body.children.append(main)
        blocks = [self.card, self.article, self.widget, self.table, self.form]
        section = None
        while self.count < target - 30:
            if section is None or len(section.children) >= self.rng.randint(3, 6):
                section = self.node("section", classes=2)
                main.children.append(section)
            section.children.append(self.rng.choice(blocks)())

        aside = self.node("aside", classes=2, with_id=True)
        aside.children.append(self.widget())
        body.children.append(aside)
        body.children.append(self.footer())
        html.children.extend([head, body])
        return html


def render_html(node: DraftNode) -> str:
    attrs = "".join(f' {name}="{escape(value, quote=True)}"' for name, value in node.attrs)
    if node.tag in VOID_TAGS and not node.children:
        return f"<{node.tag}{attrs}>"
    inner = escape(node.text) if node.text else ""
    inner += "".join(render_html(child) for child in node.children)
    return f"<{node.tag}{attrs}>{inner}</{node.tag}>"


def main() -> int:
    corpus_dir = Path(__file__).resolve().parent.parent / "corpus"
    corpus_dir.mkdir(exist_ok=True)
    for stale in corpus_dir.glob("*.html"):
        stale.unlink()
    for index, (theme, target) in enumerate(PAGES):
        builder = PageBuilder(theme, seed=MASTER_SEED + index, target=target)
        draft = builder.build(target)
        text = "<!doctype html>\n" + render_html(draft) + "\n"
        parsed = parse_html(text)
        assert len(parsed) == builder.count, (len(parsed), builder.count)
        assert 100 <= len(parsed) <= 5000, len(parsed)
        name = f"p{index:02d}_{theme}_{len(parsed):04d}.html"
        (corpus_dir / name).write_text(text, encoding="utf-8")
        print(f"{name}: {len(parsed)} nodes")
    return 0


if __name__ == "__main__":
    sys.exit(main())
