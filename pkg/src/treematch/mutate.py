"""Ground-truth-labeled mutants of a DOM tree.

Every source node gets a unique signature; mutation operators rewrite a copy
of the tree while transferring signatures, so the signature relation between
source and mutant is the exact node matching a matcher should recover.
Structure operators: remove (node and subtree), duplicate (signature-less
copy), wrap (new signature-less parent), unwrap (splice children into the
node's place), swap (exchange two siblings). Attribute and content operators
edit a node in place. All randomness comes from one seeded generator, so a
(tree, ratio, seed) triple always produces the same mutant.
"""

from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass, replace

from .tree import DraftNode, LabeledTree, freeze, thaw


class ExhaustedTargets(RuntimeError):
    """No eligible node left before reaching the requested mutation count."""


class DuplicateSignature(ValueError):
    """A signature appears on more than one node of the same tree."""


MUTATION_KINDS = (
    "remove_node",
    "duplicate",
    "wrap",
    "unwrap",
    "swap",
    "attr_remove",
    "attr_remove_words",
    "content_replace_random",
    "content_change_letters",
    "content_remove",
    "content_remove_words",
)

_STRUCTURAL_KINDS = frozenset(
    {"remove_node", "duplicate", "wrap", "unwrap", "swap"}
)

# magnitudes for the partial text/attribute operators (the operators'
# definition fixes only *what* changes, not how much)
_CHANGE_LETTER_FRACTION = 0.10
_REMOVE_WORD_FRACTION = 0.30
_WRAPPER_TAG = "div"


@dataclass(frozen=True)
class MutationOp:
    """One applied operator: its kind, the target's signature, and details."""

    kind: str
    target: str
    detail: dict


@dataclass(frozen=True)
class MutationLog:
    """Everything needed to re-derive the ground truth for one mutant."""

    source_page: str
    seed: int
    ratio: float
    ops: tuple[MutationOp, ...]
    removed_signatures: frozenset[str]


def assign_signatures(tree: LabeledTree) -> LabeledTree:
    """Give every node a unique opaque signature (stable across re-runs).

    Signatures live outside the attribute list, so tokenization and the
    matchers never see them.
    """
    return LabeledTree(
        tuple(replace(node, signature=f"s{node.id:05d}") for node in tree)
    )


def ground_truth(source: LabeledTree, mutant: LabeledTree) -> set[tuple[int, int]]:
    """Pairs of (source id, mutant id) sharing a signature."""

    def by_signature(tree: LabeledTree) -> dict[str, int]:
        out: dict[str, int] = {}
        for node in tree:
            if node.signature is None:
                continue
            if node.signature in out:
                raise DuplicateSignature(node.signature)
            out[node.signature] = node.id
        return out

    src = by_signature(source)
    dst = by_signature(mutant)
    return {(src[sig], dst[sig]) for sig in src.keys() & dst.keys()}


def _signatures_in(node: DraftNode) -> list[str]:
    found = [node.signature] if node.signature is not None else []
    for child in node.children:
        found.extend(_signatures_in(child))
    return found


def _random_word(rng: random.Random) -> str:
    return "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(3, 8)))


def _drop_words(text: str, rng: random.Random) -> str:
    words = text.split()
    k = max(1, int(_REMOVE_WORD_FRACTION * len(words) + 0.5))
    doomed = set(rng.sample(range(len(words)), min(k, len(words))))
    return " ".join(w for i, w in enumerate(words) if i not in doomed)


class _Mutator:
    def __init__(self, tree: LabeledTree, ratio: float, seed: int, source_page: str):
        if not 0.0 <= ratio <= 0.5:
            raise ValueError(f"mutation ratio must be in [0, 0.5], got {ratio}")
        for node in tree:
            if node.signature is None:
                raise ValueError(f"node {node.id} has no signature; sign the tree first")
        self.ratio = ratio
        self.seed = seed
        self.source_page = source_page
        self.target = int(ratio * len(tree) + 0.5)
        self.root = thaw(tree)
        self.rng = random.Random(seed)
        self.mutated: set[str] = set()
        self.removed: set[str] = set()
        self.ops: list[MutationOp] = []
        self._entries: list[tuple[DraftNode, DraftNode | None]] | None = None
        self._signed_counts: dict[int, int] = {}

    # -- bookkeeping ---------------------------------------------------

    def entries(self) -> list[tuple[DraftNode, DraftNode | None]]:
        if self._entries is None:
            found: list[tuple[DraftNode, DraftNode | None]] = []
            counts: dict[int, int] = {}

            def walk(node: DraftNode, parent: DraftNode | None) -> int:
                found.append((node, parent))
                signed = 1 if node.signature is not None else 0
                for child in node.children:
                    signed += walk(child, node)
                counts[id(node)] = signed
                return signed

            walk(self.root, None)
            self._entries = found
            self._signed_counts = counts
        return self._entries

    def _invalidate(self) -> None:
        self._entries = None

    def _note(self, kind: str, target: str, detail: dict, signatures: list[str]) -> None:
        self.ops.append(MutationOp(kind=kind, target=target, detail=detail))
        self.mutated.update(signatures)

    # -- candidate scan --------------------------------------------------

    def candidates(self) -> dict[str, list[tuple[DraftNode, DraftNode | None]]]:
        need = self.target - len(self.mutated)
        out: dict[str, list[tuple[DraftNode, DraftNode | None]]] = {
            kind: [] for kind in MUTATION_KINDS
        }
        for node, parent in self.entries():
            if node.signature is None:
                continue
            entry = (node, parent)
            if parent is not None:
                if self._signed_counts[id(node)] <= need:
                    out["remove_node"].append(entry)
                out["duplicate"].append(entry)
                out["unwrap"].append(entry)
                if len(parent.children) >= 2:
                    out["swap"].append(entry)
            out["wrap"].append(entry)
            if node.attrs:
                out["attr_remove"].append(entry)
                if any(value.split() for _, value in node.attrs):
                    out["attr_remove_words"].append(entry)
            if node.text:
                out["content_replace_random"].append(entry)
                out["content_remove"].append(entry)
                if node.text.split():
                    out["content_remove_words"].append(entry)
                if any(ch.isalpha() for ch in node.text):
                    out["content_change_letters"].append(entry)
        return out

    # -- operators --------------------------------------------------------

    def apply(self, kind: str, node: DraftNode, parent: DraftNode | None) -> None:
        sig = node.signature
        assert sig is not None
        rng = self.rng
        if kind == "remove_node":
            assert parent is not None
            gone = _signatures_in(node)
            parent.children.remove(node)
            self.removed.update(gone)
            self._note(kind, sig, {"subtree_signatures": gone}, gone)
        elif kind == "duplicate":
            assert parent is not None
            copy = node.copy_deep(keep_signatures=False)
            parent.children.insert(parent.children.index(node) + 1, copy)
            self._note(kind, sig, {}, [sig])
        elif kind == "wrap":
            wrapper = DraftNode(tag=_WRAPPER_TAG, children=[node])
            if parent is None:
                self.root = wrapper
            else:
                parent.children[parent.children.index(node)] = wrapper
            self._note(kind, sig, {"wrapper_tag": _WRAPPER_TAG}, [sig])
        elif kind == "unwrap":
            assert parent is not None
            idx = parent.children.index(node)
            parent.children[idx : idx + 1] = node.children
            self.removed.add(sig)
            self._note(kind, sig, {}, [sig])
        elif kind == "swap":
            assert parent is not None
            others = [c for c in parent.children if c is not node]
            partner = rng.choice(others)
            i = parent.children.index(node)
            j = parent.children.index(partner)
            parent.children[i], parent.children[j] = partner, node
            touched = [sig] + ([partner.signature] if partner.signature else [])
            self._note(kind, sig, {"partner": partner.signature}, touched)
        elif kind == "attr_remove":
            name = rng.choice([n for n, _ in node.attrs])
            node.attrs = [(n, v) for n, v in node.attrs if n != name]
            self._note(kind, sig, {"attribute": name}, [sig])
        elif kind == "attr_remove_words":
            name, value = rng.choice(
                [(n, v) for n, v in node.attrs if v.split()]
            )
            shrunk = _drop_words(value, rng)
            node.attrs = [(n, shrunk if n == name else v) for n, v in node.attrs]
            self._note(kind, sig, {"attribute": name}, [sig])
        elif kind == "content_replace_random":
            count = max(1, len(node.text.split()))  # type: ignore[union-attr]
            node.text = " ".join(_random_word(rng) for _ in range(count))
            self._note(kind, sig, {"words": count}, [sig])
        elif kind == "content_change_letters":
            chars = list(node.text)  # type: ignore[arg-type]
            letter_positions = [i for i, ch in enumerate(chars) if ch.isalpha()]
            k = max(1, int(_CHANGE_LETTER_FRACTION * len(letter_positions) + 0.5))
            for i in rng.sample(letter_positions, min(k, len(letter_positions))):
                chars[i] = rng.choice(string.ascii_lowercase)
            node.text = "".join(chars)
            self._note(kind, sig, {"letters": k}, [sig])
        elif kind == "content_remove":
            node.text = None
            self._note(kind, sig, {}, [sig])
        elif kind == "content_remove_words":
            node.text = _drop_words(node.text, rng) or None  # type: ignore[arg-type]
            self._note(kind, sig, {}, [sig])
        else:  # pragma: no cover - guarded by MUTATION_KINDS
            raise ValueError(f"unknown mutation kind {kind!r}")
        if kind in _STRUCTURAL_KINDS:
            self._invalidate()

    def run(self) -> tuple[LabeledTree, MutationLog]:
        while len(self.mutated) < self.target:
            pools = self.candidates()
            usable = [kind for kind in MUTATION_KINDS if pools[kind]]
            if not usable:
                raise ExhaustedTargets(
                    f"{len(self.mutated)} of {self.target} nodes mutated, no target left"
                )
            kind = self.rng.choice(usable)
            node, parent = self.rng.choice(pools[kind])
            self.apply(kind, node, parent)
        log = MutationLog(
            source_page=self.source_page,
            seed=self.seed,
            ratio=self.ratio,
            ops=tuple(self.ops),
            removed_signatures=frozenset(self.removed),
        )
        return freeze(self.root), log


def mutate(
    tree: LabeledTree, ratio: float, seed: int, source_page: str = ""
) -> tuple[LabeledTree, MutationLog]:
    """Apply random operators until round(ratio * size) distinct nodes changed."""
    return _Mutator(tree, ratio, seed, source_page).run()


# ---------------------------------------------------------------------------
# Log serialization (the third file of an on-disk mutant bundle)

def mutation_log_to_json(log: MutationLog, indent: int | None = 2) -> str:
    obj = {
        "source_page": log.source_page,
        "seed": log.seed,
        "ratio": log.ratio,
        "ops": [
            {"kind": op.kind, "target": op.target, "detail": op.detail}
            for op in log.ops
        ],
        "removed_signatures": sorted(log.removed_signatures),
    }
    return json.dumps(obj, ensure_ascii=False, indent=indent)


def mutation_log_from_json(text: str) -> MutationLog:
    obj = json.loads(text)
    return MutationLog(
        source_page=obj["source_page"],
        seed=obj["seed"],
        ratio=obj["ratio"],
        ops=tuple(
            MutationOp(kind=o["kind"], target=o["target"], detail=o["detail"])
            for o in obj["ops"]
        ),
        removed_signatures=frozenset(obj["removed_signatures"]),
    )
