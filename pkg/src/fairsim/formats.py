"""Line-oriented text formats for automata, relations and matrix witnesses.

Every format is whitespace separated, one directive per line, with ``#``
starting a comment.  Probabilities are exact rationals written ``p/q`` (or
integers / finite decimals, which are converted exactly).

``.nbta``::

    nbta
    alphabet a:2 b:2
    states x1 x2
    initial x1
    accepting x2
    trans x1 a x1 x1

``.pbwa``::

    pbwa
    alphabet a b
    states x1 x2
    initial x1 1
    accepting x2
    trans x1 a x2 1/2

``.rel``: ``pair x y`` lines.

``.mat``: ``row y x=p/q ...`` lines give the witness.  Optional blocks
``seq11 n`` / ``seq12 n`` (followed by ``row`` lines) give the ``n``-th
approximants; columns outside the block are rejected.  An optional
``limit`` block (``row`` lines over non-accepting ``Y`` states) and a
``ratio p/q`` line present an omega-length sequence with a geometric tail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .matrixsim import ApproxSequences, MatrixWitness
from .nbta import AutomatonError, Nbta, RankedAlphabet
from .pbwa import Pbwa, PbwaError


class FormatError(ValueError):
    """Syntax or semantic error in an input file."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None, source: str = "<input>"):
        self.line, self.col, self.source, self.msg = line, col, source, msg
        where = source
        if line is not None:
            where += f":{line}"
            if col is not None:
                where += f":{col}"
        super().__init__(f"{where}: {msg}")


@dataclass
class _Tok:
    text: str
    line: int
    col: int


def _lines(text: str):
    """Yield token lists for non-blank lines, with 1-based positions."""
    for ln, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = []
        i = 0
        while i < len(body):
            if body[i].isspace():
                i += 1
                continue
            j = i
            while j < len(body) and not body[j].isspace():
                j += 1
            toks.append(_Tok(body[i:j], ln, i + 1))
            i = j
        if toks:
            yield toks


def _rational(tok: _Tok, source: str) -> Fraction:
    try:
        v = Fraction(tok.text)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"expected a rational p/q, got {tok.text!r}", tok.line, tok.col, source) from None
    return v


def _header(lines: list, kind: str, source: str):
    if not lines:
        raise FormatError(f"empty file, expected header {kind!r}", 1, 1, source)
    first = lines[0]
    if first[0].text != kind or len(first) != 1:
        raise FormatError(f"expected header {kind!r}", first[0].line, first[0].col, source)
    return lines[1:]


def _once(seen: dict, toks, source):
    key = toks[0].text
    if key in seen:
        raise FormatError(f"duplicate {key!r} line", toks[0].line, toks[0].col, source)
    seen[key] = toks


def _names(toks) -> list:
    return [t.text for t in toks[1:]]


def parse_nbta(text: str, source: str = "<input>", max_arity: int | None = None) -> Nbta:
    lines = _header(list(_lines(text)), "nbta", source)
    seen: dict = {}
    trans = []
    for toks in lines:
        key = toks[0]
        if key.text in ("alphabet", "states", "initial", "accepting"):
            _once(seen, toks, source)
        elif key.text == "trans":
            if len(toks) < 3:
                raise FormatError("trans needs a state and a symbol", key.line, key.col, source)
            trans.append(toks)
        else:
            raise FormatError(f"unknown directive {key.text!r}", key.line, key.col, source)
    for need in ("alphabet", "states"):
        if need not in seen:
            raise FormatError(f"missing {need!r} line", None, None, source)
    arities = {}
    for t in seen["alphabet"][1:]:
        sym, sep, n = t.text.rpartition(":")
        if not sep or not sym or not n.isdigit():
            raise FormatError(f"expected symbol:arity, got {t.text!r}", t.line, t.col, source)
        if sym in arities:
            raise FormatError(f"duplicate symbol {sym!r}", t.line, t.col, source)
        arities[sym] = int(n)
    if not arities:
        t = seen["alphabet"][0]
        raise FormatError("alphabet must be nonempty", t.line, t.col, source)
    states = _names(seen["states"])
    known = set(states)
    for key in ("initial", "accepting"):
        for t in seen.get(key, [None])[1:]:
            if t.text not in known:
                raise FormatError(f"unknown state {t.text!r}", t.line, t.col, source)
    triples = []
    for toks in trans:
        x, sym = toks[1], toks[2]
        if x.text not in known:
            raise FormatError(f"unknown state {x.text!r}", x.line, x.col, source)
        if sym.text not in arities:
            raise FormatError(f"unknown symbol {sym.text!r}", sym.line, sym.col, source)
        kids = toks[3:]
        if len(kids) != arities[sym.text]:
            raise FormatError(
                f"symbol {sym.text!r} has arity {arities[sym.text]} but {len(kids)} children given",
                sym.line,
                sym.col,
                source,
            )
        for c in kids:
            if c.text not in known:
                raise FormatError(f"unknown state {c.text!r}", c.line, c.col, source)
        triples.append((x.text, sym.text, tuple(c.text for c in kids)))
    kw = {} if max_arity is None else {"max_arity": max_arity}
    try:
        return Nbta.build(
            states,
            RankedAlphabet(arities),
            triples,
            _names(seen.get("initial", [None])),
            _names(seen.get("accepting", [None])),
            **kw,
        )
    except AutomatonError as e:
        raise FormatError(str(e), None, None, source) from None


def parse_pbwa(text: str, source: str = "<input>") -> Pbwa:
    lines = _header(list(_lines(text)), "pbwa", source)
    seen: dict = {}
    inits, trans = [], []
    for toks in lines:
        key = toks[0]
        if key.text in ("alphabet", "states", "accepting"):
            _once(seen, toks, source)
        elif key.text == "initial":
            if len(toks) != 3:
                raise FormatError("expected 'initial state p/q'", key.line, key.col, source)
            inits.append(toks)
        elif key.text == "trans":
            if len(toks) != 5:
                raise FormatError("expected 'trans x letter x2 p/q'", key.line, key.col, source)
            trans.append(toks)
        else:
            raise FormatError(f"unknown directive {key.text!r}", key.line, key.col, source)
    for need in ("alphabet", "states"):
        if need not in seen:
            raise FormatError(f"missing {need!r} line", None, None, source)
    alphabet = _names(seen["alphabet"])
    states = _names(seen["states"])
    known, letters = set(states), set(alphabet)

    def state(t):
        if t.text not in known:
            raise FormatError(f"unknown state {t.text!r}", t.line, t.col, source)
        return t.text

    for t in seen.get("accepting", [None])[1:]:
        state(t)
    init = {}
    for toks in inits:
        x = state(toks[1])
        if x in init:
            raise FormatError(f"duplicate initial entry for {x!r}", toks[1].line, toks[1].col, source)
        init[x] = _rational(toks[2], source)
    entries, seen_t = [], set()
    for toks in trans:
        x, a, y = state(toks[1]), toks[2], state(toks[3])
        if a.text not in letters:
            raise FormatError(f"unknown letter {a.text!r}", a.line, a.col, source)
        if (x, a.text, y) in seen_t:
            raise FormatError("duplicate transition", toks[0].line, toks[0].col, source)
        seen_t.add((x, a.text, y))
        entries.append((x, a.text, y, _rational(toks[4], source)))
    try:
        return Pbwa.build(states, alphabet, entries, init, _names(seen.get("accepting", [None])))
    except PbwaError as e:
        raise FormatError(str(e), None, None, source) from None


def parse_relation(text: str, source: str = "<input>", X: Nbta | None = None, Y: Nbta | None = None) -> frozenset:
    out = set()
    for toks in _lines(text):
        if toks[0].text != "pair" or len(toks) != 3:
            raise FormatError("expected 'pair x y'", toks[0].line, toks[0].col, source)
        x, y = toks[1], toks[2]
        if X is not None and x.text not in X.states:
            raise FormatError(f"unknown left state {x.text!r}", x.line, x.col, source)
        if Y is not None and y.text not in Y.states:
            raise FormatError(f"unknown right state {y.text!r}", y.line, y.col, source)
        out.add((x.text, y.text))
    return frozenset(out)


@dataclass
class MatFile:
    """A parsed ``.mat`` file, still keyed by state names."""

    rows: dict = field(default_factory=dict)
    seq11: dict = field(default_factory=dict)
    seq12: dict = field(default_factory=dict)
    limit: dict | None = None
    ratio: Fraction | None = None

    @property
    def has_sequences(self) -> bool:
        return bool(self.seq11 or self.seq12 or self.limit is not None)


def parse_mat_text(text: str, source: str = "<input>") -> MatFile:
    out = MatFile()
    target = out.rows
    for toks in _lines(text):
        key = toks[0]
        if key.text == "row":
            if len(toks) < 2:
                raise FormatError("row needs a state", key.line, key.col, source)
            y = toks[1].text
            if y in target:
                raise FormatError(f"duplicate row {y!r} in this block", key.line, key.col, source)
            entries = {}
            for t in toks[2:]:
                x, sep, p = t.text.partition("=")
                if not sep or not x:
                    raise FormatError(f"expected x=p/q, got {t.text!r}", t.line, t.col, source)
                if x in entries:
                    raise FormatError(f"duplicate column {x!r}", t.line, t.col, source)
                entries[x] = _rational(_Tok(p, t.line, t.col + len(x) + 1), source)
            target[y] = entries
        elif key.text in ("seq11", "seq12"):
            if len(toks) != 2 or not toks[1].text.isdigit():
                raise FormatError(f"expected '{key.text} n'", key.line, key.col, source)
            blocks = out.seq11 if key.text == "seq11" else out.seq12
            n = int(toks[1].text)
            if n in blocks:
                raise FormatError(f"duplicate {key.text} block {n}", key.line, key.col, source)
            blocks[n] = target = {}
        elif key.text == "limit":
            if len(toks) != 1 or out.limit is not None:
                raise FormatError("expected a single bare 'limit' line", key.line, key.col, source)
            out.limit = target = {}
        elif key.text == "ratio":
            if len(toks) != 2 or out.ratio is not None:
                raise FormatError("expected a single 'ratio p/q' line", key.line, key.col, source)
            out.ratio = _rational(toks[1], source)
        else:
            raise FormatError(f"unknown directive {key.text!r}", key.line, key.col, source)
    return out


def _block_matrix(rows: dict, ys: list, xs: list, source, what: str) -> tuple:
    unknown_y = set(rows) - set(ys)
    if unknown_y:
        raise FormatError(f"{what}: rows for states outside the block: {sorted(unknown_y)}", None, None, source)
    out = []
    for y in ys:
        entries = rows.get(y, {})
        bad = set(entries) - set(xs)
        if bad:
            raise FormatError(f"{what}: row {y!r} has columns outside the block: {sorted(bad)}", None, None, source)
        out.append(tuple(entries.get(x, Fraction(0)) for x in xs))
    return tuple(out)


def resolve_mat(mat: MatFile, X: Pbwa, Y: Pbwa, source: str = "<input>") -> tuple:
    """Turn a parsed ``.mat`` into ``(MatrixWitness, ApproxSequences | None)``."""
    A = _block_matrix(mat.rows, list(Y.states), list(X.states), source, "witness")
    if not mat.has_sequences:
        return MatrixWitness(A), None
    y1 = [Y.states[i] for i in Y.block(1)]
    x1 = [X.states[i] for i in X.block(1)]
    x2 = [X.states[i] for i in X.block(2)]
    if sorted(mat.seq11) != list(range(len(mat.seq11))) or sorted(mat.seq12) != sorted(mat.seq11):
        raise FormatError("seq11/seq12 blocks must be numbered 0..n with the same indices", None, None, source)
    s11 = tuple(_block_matrix(mat.seq11[n], y1, x1, source, f"seq11 {n}") for n in sorted(mat.seq11))
    s12 = tuple(_block_matrix(mat.seq12[n], y1, x2, source, f"seq12 {n}") for n in sorted(mat.seq12))
    if mat.limit is None:
        if mat.ratio is not None:
            raise FormatError("a ratio needs a limit block", None, None, source)
        return MatrixWitness(A), ApproxSequences(s11, s12)
    if mat.ratio is None:
        raise FormatError("a limit block needs a 'ratio p/q' line", None, None, source)
    lim = _block_matrix(mat.limit, y1, x1 + x2, source, "limit")
    l11 = tuple(row[: len(x1)] for row in lim)
    l12 = tuple(row[len(x1):] for row in lim)
    return MatrixWitness(A), ApproxSequences(s11, s12, True, l11, l12, mat.ratio)


def _fmt(v: Fraction) -> str:
    return str(Fraction(v))


def print_nbta(aut: Nbta) -> str:
    lines = [
        "nbta",
        "alphabet " + " ".join(f"{s}:{n}" for s, n in aut.alphabet.arities.items()),
        "states " + " ".join(aut.states),
        "initial " + " ".join(x for x in aut.states if x in aut.initial),
        "accepting " + " ".join(x for x in aut.states if x in aut.accepting),
    ]
    for x, sym, ch in aut.transition_triples():
        lines.append(" ".join(["trans", x, sym, *ch]))
    return "\n".join(l.rstrip() for l in lines) + "\n"


def print_pbwa(aut: Pbwa) -> str:
    lines = [
        "pbwa",
        "alphabet " + " ".join(aut.alphabet),
        "states " + " ".join(aut.states),
    ]
    for x, p in zip(aut.states, aut.initial):
        if p:
            lines.append(f"initial {x} {_fmt(p)}")
    lines.append("accepting " + " ".join(x for x in aut.states if x in aut.accepting))
    for a in aut.alphabet:
        for i, x in enumerate(aut.states):
            for j, y in enumerate(aut.states):
                p = aut.matrices[a][i][j]
                if p:
                    lines.append(f"trans {x} {a} {y} {_fmt(p)}")
    return "\n".join(l.rstrip() for l in lines) + "\n"


def print_relation(R) -> str:
    return "".join(f"pair {x} {y}\n" for x, y in sorted(R, key=repr))


def _rows(ys, xs, M) -> list:
    out = []
    for y, row in zip(ys, M):
        cells = [f"{x}={_fmt(p)}" for x, p in zip(xs, row) if p]
        out.append(" ".join(["row", y, *cells]))
    return out


def print_mat(X: Pbwa, Y: Pbwa, A: MatrixWitness, seqs: ApproxSequences | None = None) -> str:
    lines = _rows(Y.states, X.states, A.matrix)
    if seqs is not None:
        y1 = [Y.states[i] for i in Y.block(1)]
        x1 = [X.states[i] for i in X.block(1)]
        x2 = [X.states[i] for i in X.block(2)]
        for n, (m11, m12) in enumerate(zip(seqs.seq11, seqs.seq12)):
            lines.append(f"seq11 {n}")
            lines += ["  " + r for r in _rows(y1, x1, m11)]
            lines.append(f"seq12 {n}")
            lines += ["  " + r for r in _rows(y1, x2, m12)]
        if seqs.omega:
            lines.append("limit")
            joined = [tuple(a) + tuple(b) for a, b in zip(seqs.limit11, seqs.limit12)]
            lines += ["  " + r for r in _rows(y1, x1 + x2, joined)]
            lines.append(f"ratio {_fmt(seqs.ratio)}")
    return "\n".join(lines) + "\n"


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise FormatError(f"cannot read file: {e.strerror}", None, None, str(path)) from None


def parse_automaton(path, kind: str):
    """Read an ``.nbta`` or ``.pbwa`` file."""
    text = _read(path)
    if kind == "nbta":
        return parse_nbta(text, str(path))
    if kind == "pbwa":
        return parse_pbwa(text, str(path))
    raise ValueError(f"unknown automaton kind {kind!r}")


def load_relation(path, X=None, Y=None) -> frozenset:
    return parse_relation(_read(path), str(path), X, Y)


def load_mat(path, X: Pbwa, Y: Pbwa) -> tuple:
    return resolve_mat(parse_mat_text(_read(path), str(path)), X, Y, str(path))
