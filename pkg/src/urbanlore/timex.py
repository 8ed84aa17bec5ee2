"""Rule-based temporal expression tagging (DATE, DURATION, TIME).

Rules are written in a small token-level pattern language (see
``data/timex_rules.txt`` for the syntax). Every rule compiles into one shared
Thompson NFA; scanning determinizes it lazily, caching each (state set, token
signature) transition, so tagging is a deterministic longest-match scan.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import FormatError
from .text_core import AnnotationSpan, Document, Token

__all__ = [
    "TIMEX_TAGS",
    "Candidate",
    "TimexGrammar",
    "TimexSpan",
    "compile_grammar",
    "default_grammar",
    "load_timex_grammar",
    "recognize_timex",
]

TIMEX_TAGS = ("DATE", "DURATION", "TIME")
# lower wins on equal-length overlaps
PRECEDENCE = {"DURATION": 0, "DATE": 1, "TIME": 2}

TimexSpan = AnnotationSpan

_LEX = re.compile(r'"(?:[^"\\]|\\.)*"|/(?:[^/\\]|\\.)+/|@\w+|[()|?*+]|[^\s()|?*+"]+')
_RULE = re.compile(r"^(\w+)\s+(\w+)\s*:\s*(.+)$")
_CLASS = re.compile(r"^@(\w+)\s*=\s*(.+)$")
_CLASS_ALT = re.compile(r"/(?:[^/\\]|\\.)+/|[^|\s]+|\|")


class _ClassDef:
    def __init__(self, literals: set[str], regexes: list[re.Pattern]):
        self.literals = literals
        self.regexes = regexes

    def matches(self, surface: str) -> bool:
        return surface.lower() in self.literals or any(r.fullmatch(surface) for r in self.regexes)


@dataclass(frozen=True)
class Candidate:
    start: int
    end: int
    tag: str
    rule: str


@dataclass
class _Nfa:
    eps: list[list[int]] = field(default_factory=list)
    moves: list[list[tuple[int, int]]] = field(default_factory=list)

    def new(self) -> int:
        self.eps.append([])
        self.moves.append([])
        return len(self.eps) - 1


class _Parser:
    def __init__(self, text: str, lineno: int, atom_id, path: str | None):
        self.items = _LEX.findall(text)
        self.pos = 0
        self.lineno = lineno
        self.atom_id = atom_id
        self.path = path

    def fail(self, msg: str):
        raise FormatError(self.lineno, msg, self.path)

    def peek(self) -> str | None:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def take(self) -> str:
        item = self.peek()
        if item is None:
            self.fail("unexpected end of pattern")
        self.pos += 1
        return item

    def parse(self):
        node = self.alt()
        if self.peek() is not None:
            self.fail(f"unexpected {self.peek()!r}")
        return node

    def alt(self):
        branches = [self.seq()]
        while self.peek() == "|":
            self.take()
            branches.append(self.seq())
        return branches[0] if len(branches) == 1 else ("alt", branches)

    def seq(self):
        items = []
        while self.peek() not in (None, ")", "|"):
            items.append(self.item())
        if not items:
            self.fail("empty pattern")
        return items[0] if len(items) == 1 else ("seq", items)

    def item(self):
        node = self.atom()
        while self.peek() in ("?", "*", "+"):
            node = ({"?": "opt", "*": "star", "+": "plus"}[self.take()], node)
        return node

    def atom(self):
        tok = self.take()
        if tok == "(":
            node = self.alt()
            if self.take() != ")":
                self.fail("expected ')'")
            return node
        if tok in (")", "|", "?", "*", "+"):
            self.fail(f"unexpected {tok!r}")
        return ("atom", self.atom_id(tok, self))


class TimexGrammar:
    """A compiled rule set. Immutable after construction apart from its transition cache."""

    def __init__(self, rules: list[tuple[str, str]], nfa: _Nfa, start: int,
                 accepts: dict[int, int], atoms: list):
        self.rules = rules  # (tag, name)
        self._nfa = nfa
        self._atoms = atoms
        self._accepts = accepts
        self._start = self._closure({start})
        self._dfa: dict[tuple[frozenset, int], frozenset] = {}
        self._accept_cache: dict[frozenset, tuple[int, ...]] = {}
        self._mask_cache: dict[str, int] = {}

    @property
    def rule_names(self) -> list[str]:
        return [name for _, name in self.rules]

    def _closure(self, states: Iterable[int]) -> frozenset:
        stack = list(states)
        seen = set(stack)
        while stack:
            for t in self._nfa.eps[stack.pop()]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    def _mask(self, surface: str) -> int:
        mask = self._mask_cache.get(surface)
        if mask is None:
            mask = 0
            for i, atom in enumerate(self._atoms):
                if atom(surface):
                    mask |= 1 << i
            self._mask_cache[surface] = mask
        return mask

    def _step(self, state: frozenset, mask: int) -> frozenset:
        key = (state, mask)
        nxt = self._dfa.get(key)
        if nxt is None:
            targets = [t for s in state for atom, t in self._nfa.moves[s] if mask >> atom & 1]
            nxt = self._closure(targets) if targets else frozenset()
            self._dfa[key] = nxt
        return nxt

    def _accepting(self, state: frozenset) -> tuple[int, ...]:
        hit = self._accept_cache.get(state)
        if hit is None:
            hit = tuple(sorted(self._accepts[s] for s in state if s in self._accepts))
            self._accept_cache[state] = hit
        return hit

    def candidates(self, tokens: list[Token]) -> list[Candidate]:
        """Every (start, end, rule) match; for each start and rule only the longest end."""
        masks = [self._mask(t.surface) for t in tokens]
        found = []
        for i in range(len(tokens)):
            state = self._start
            best: dict[int, int] = {}
            for j in range(i, len(tokens)):
                state = self._step(state, masks[j])
                if not state:
                    break
                for rule in self._accepting(state):
                    best[rule] = j + 1
            for rule, end in sorted(best.items()):
                tag, name = self.rules[rule]
                found.append(Candidate(i, end, tag, name))
        return found

    def recognize(self, tokens: list[Token]) -> list[TimexSpan]:
        cands = sorted(
            self.candidates(tokens),
            key=lambda c: (c.start - c.end, PRECEDENCE[c.tag], c.start),
        )
        taken = [False] * len(tokens)
        spans = []
        for c in cands:
            if any(taken[c.start:c.end]):
                continue
            for k in range(c.start, c.end):
                taken[k] = True
            spans.append(AnnotationSpan(c.start, c.end, c.tag))
        spans.sort()
        return spans


def compile_grammar(text: str, path: str | None = None) -> TimexGrammar:
    """Compile rule-file text. Raises :class:`FormatError` with the offending line."""
    classes: dict[str, _ClassDef] = {}
    atoms: list = []
    atom_index: dict[tuple[str, str], int] = {}
    nfa = _Nfa()
    start = nfa.new()
    accepts: dict[int, int] = {}
    rules: list[tuple[str, str]] = []

    def atom_id(tok: str, parser: _Parser) -> int:
        if tok.startswith("@"):
            name = tok[1:]
            if name not in classes:
                parser.fail(f"undefined class @{name}")
            key = ("cls", name)
            pred = classes[name].matches
        elif len(tok) > 1 and tok.startswith("/") and tok.endswith("/"):
            key = ("re", tok[1:-1])
            try:
                rx = re.compile(tok[1:-1])
            except re.error as exc:
                parser.fail(f"bad regex {tok}: {exc}")
            pred = rx.fullmatch
        else:
            lit = tok[1:-1] if tok.startswith('"') else tok
            key = ("lit", lit.lower())

            def pred(surface, _lit=lit.lower()):
                return surface.lower() == _lit
        if key not in atom_index:
            atom_index[key] = len(atoms)
            atoms.append(pred)
        return atom_index[key]

    def build(node) -> tuple[int, int]:
        kind, arg = node
        if kind == "atom":
            s, e = nfa.new(), nfa.new()
            nfa.moves[s].append((arg, e))
            return s, e
        if kind == "seq":
            s, e = build(arg[0])
            for child in arg[1:]:
                cs, ce = build(child)
                nfa.eps[e].append(cs)
                e = ce
            return s, e
        s, e = nfa.new(), nfa.new()
        if kind == "alt":
            for child in arg:
                cs, ce = build(child)
                nfa.eps[s].append(cs)
                nfa.eps[ce].append(e)
            return s, e
        cs, ce = build(arg)
        nfa.eps[s].append(cs)
        nfa.eps[ce].append(e)
        if kind in ("opt", "star"):
            nfa.eps[s].append(e)
        if kind in ("star", "plus"):
            nfa.eps[ce].append(cs)
        return s, e

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _CLASS.match(line)
        if m:
            literals, regexes = set(), []
            parts = _CLASS_ALT.findall(m.group(2))
            if not parts or parts[0] == "|" or parts[-1] == "|" or any(
                (a == "|") == (b == "|") for a, b in zip(parts, parts[1:])
            ):
                raise FormatError(lineno, "class alternatives must be separated by single '|'", path)
            for alt in parts[::2]:
                if len(alt) > 1 and alt.startswith("/") and alt.endswith("/"):
                    try:
                        regexes.append(re.compile(alt[1:-1]))
                    except re.error as exc:
                        raise FormatError(lineno, f"bad regex {alt}: {exc}", path) from None
                else:
                    literals.add(alt.lower())
            classes[m.group(1)] = _ClassDef(literals, regexes)
            continue
        m = _RULE.match(line)
        if not m:
            raise FormatError(lineno, "expected '@NAME = ...' or 'TAG name: pattern'", path)
        tag, name, pattern = m.groups()
        if tag not in TIMEX_TAGS:
            raise FormatError(lineno, f"unknown tag {tag!r}", path)
        if name in (n for _, n in rules):
            raise FormatError(lineno, f"duplicate rule name {name!r}", path)
        node = _Parser(pattern, lineno, atom_id, path).parse()
        s, e = build(node)
        nfa.eps[start].append(s)
        accepts[e] = len(rules)
        rules.append((tag, name))
    return TimexGrammar(rules, nfa, start, accepts, atoms)


def load_timex_grammar(path: str | Path) -> TimexGrammar:
    path = Path(path)
    return compile_grammar(path.read_text(encoding="utf-8"), str(path))


_DEFAULT: TimexGrammar | None = None


def default_grammar() -> TimexGrammar:
    """The shipped grammar, compiled once per process."""
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("urbanlore.data").joinpath("timex_rules.txt").read_text(encoding="utf-8")
        _DEFAULT = compile_grammar(text, "timex_rules.txt")
    return _DEFAULT


def recognize_timex(doc: Document | str, grammar: TimexGrammar | None = None) -> list[TimexSpan]:
    """Non-overlapping temporal spans in token order."""
    if isinstance(doc, str):
        doc = Document("_", doc)
    return (grammar or default_grammar()).recognize(doc.tokens)
