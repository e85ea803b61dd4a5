"""Strict inequality constraints on probability vectors and grids.

Grammar (indices are 1-based)::

    expr  ::= chain ('&' chain)*
    chain ::= term (op term)+
    op    ::= '<' | '>'
    term  ::= 'p[' i ']' | 'p[' i ',' j ']' | 'cond(' i ',' j ')'

``p[i]`` is a row success probability (product-binomial tables), ``p[i,j]``
a cell probability and ``cond(i,j)`` the row-conditional probability
``p[i,j] / sum_j' p[i,j']`` (multinomial tables).

>>> expr = parse_constraint("p[1]>p[2]>p[3]", (3, None))
>>> evaluate(expr, [0.5, 0.3, 0.2])
True
>>> str(mirror(expr))
'p[1]<p[2]<p[3]'
"""

import re
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConstraintSyntaxError, InputError

__all__ = [
    "Term",
    "Chain",
    "ConstraintExpr",
    "parse_constraint",
    "evaluate",
    "mirror",
    "descending_chain",
    "always",
]


class Term(NamedTuple):
    kind: str  # "row", "cell" or "cond"
    i: int  # 0-based
    j: int = -1

    def __str__(self):
        if self.kind == "row":
            return f"p[{self.i + 1}]"
        if self.kind == "cell":
            return f"p[{self.i + 1},{self.j + 1}]"
        return f"cond({self.i + 1},{self.j + 1})"

    def value(self, probs):
        if self.kind == "row":
            return probs[..., self.i]
        if self.kind == "cell":
            return probs[..., self.i, self.j]
        row = probs[..., self.i, :]
        return row[..., self.j] / row.sum(axis=-1)


class Chain(NamedTuple):
    terms: tuple
    ops: tuple

    def __str__(self):
        out = [str(self.terms[0])]
        for op, term in zip(self.ops, self.terms[1:]):
            out.append(op)
            out.append(str(term))
        return "".join(out)

    def atoms(self):
        return [(a, op, b) for a, op, b in zip(self.terms, self.ops, self.terms[1:])]


@dataclass(frozen=True)
class ConstraintExpr:
    """Conjunction of strict comparison chains.

    An expression with no chains is the trivial constraint that every
    probability configuration satisfies; it can only be built in code
    (see :func:`always`), never parsed.
    """

    chains: tuple
    dims: tuple

    def __str__(self):
        return " & ".join(str(c) for c in self.chains)

    @property
    def n_atoms(self) -> int:
        return sum(len(c.ops) for c in self.chains)

    def __call__(self, probs):
        return evaluate(self, probs)


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<cond>cond\(\s*(?P<ci>\d+)\s*,\s*(?P<cj>\d+)\s*\))"
    r"|(?P<cell>p\[\s*(?P<pi>\d+)\s*,\s*(?P<pj>\d+)\s*\])"
    r"|(?P<row>p\[\s*(?P<ri>\d+)\s*\])"
    r"|(?P<bad><=|>=|==|=|!=)"
    r"|(?P<op>[<>])"
    r"|(?P<amp>&)"
    r")"
)


def _make_term(m, dims, pos):
    r, c = dims
    if m.group("row"):
        if c is not None:
            raise ConstraintSyntaxError("row term p[i] is not valid for a multinomial grid", pos)
        term = Term("row", int(m.group("ri")) - 1)
    else:
        if c is None:
            raise ConstraintSyntaxError("cell terms need a multinomial (r x c) grid", pos)
        if m.group("cell"):
            term = Term("cell", int(m.group("pi")) - 1, int(m.group("pj")) - 1)
        else:
            term = Term("cond", int(m.group("ci")) - 1, int(m.group("cj")) - 1)
    if not 0 <= term.i < r or (term.kind != "row" and not 0 <= term.j < c):
        raise ConstraintSyntaxError(f"index out of range in {term}", pos)
    return term


def parse_constraint(text: str, dims) -> ConstraintExpr:
    """Parse constraint text against table dimensions ``(r, c)``.

    Use ``c=None`` for product-binomial tables.

    Raises
    ------
    ConstraintSyntaxError
        On bad tokens, out-of-range indices, row/cell mixing, or non-strict
        operators.
    """
    r, c = dims
    dims = (int(r), None if c is None else int(c))
    chains = []
    terms, ops = [], []
    expect_term = True
    pos = 0
    text = text.rstrip()
    if not text:
        raise ConstraintSyntaxError("empty constraint", 0)
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ConstraintSyntaxError(f"unexpected input {text[pos:pos + 10]!r}", pos)
        start = m.start(m.lastgroup)
        if m.group("bad"):
            raise ConstraintSyntaxError(f"non-strict operator {m.group('bad')!r}; only < and > allowed", start)
        if m.group("op") or m.group("amp"):
            if expect_term:
                raise ConstraintSyntaxError("expected a term", start)
            if m.group("op"):
                ops.append(m.group("op"))
            else:
                if not ops:
                    raise ConstraintSyntaxError("a chain needs at least one comparison", start)
                chains.append(Chain(tuple(terms), tuple(ops)))
                terms, ops = [], []
            expect_term = True
        else:
            if not expect_term:
                raise ConstraintSyntaxError("expected an operator", start)
            terms.append(_make_term(m, dims, start))
            expect_term = False
        pos = m.end()
    if expect_term:
        raise ConstraintSyntaxError("constraint ends where a term was expected", len(text))
    if not ops:
        raise ConstraintSyntaxError("a chain needs at least one comparison", len(text))
    chains.append(Chain(tuple(terms), tuple(ops)))
    return ConstraintExpr(tuple(chains), dims)


def _check_dims(expr, probs):
    r, c = expr.dims
    want = (r,) if c is None else (r, c)
    if probs.shape[probs.ndim - len(want):] != want:
        raise InputError(f"probabilities of shape {probs.shape} do not match constraint dims {want}")


def evaluate(expr: ConstraintExpr, probs):
    """True where every atom holds under strict comparison.

    ``probs`` may carry leading batch dimensions; the result then is a boolean
    array over the batch.
    """
    probs = np.asarray(probs, dtype=float)
    _check_dims(expr, probs)
    c = expr.dims[1]
    batch = probs.shape[: probs.ndim - (1 if c is None else 2)]
    ok = np.ones(batch, dtype=bool)
    for chain in expr.chains:
        for a, op, b in chain.atoms():
            va, vb = a.value(probs), b.value(probs)
            ok &= (va < vb) if op == "<" else (va > vb)
    return bool(ok) if ok.ndim == 0 else ok


def mirror(expr: ConstraintExpr) -> Optional[ConstraintExpr]:
    """The expression with every comparison flipped, for a single chain.

    Returns ``None`` for conjunctions of several chains, whose complement is
    not itself a conjunction.
    """
    if len(expr.chains) != 1:
        return None
    chain = expr.chains[0]
    flipped = tuple(">" if op == "<" else "<" for op in chain.ops)
    return ConstraintExpr((Chain(chain.terms, flipped),), expr.dims)


def descending_chain(r: int) -> ConstraintExpr:
    """p[1] > p[2] > ... > p[r]."""
    return parse_constraint(">".join(f"p[{i}]" for i in range(1, r + 1)), (r, None))


def always(dims) -> ConstraintExpr:
    """The trivial constraint, satisfied by every configuration."""
    r, c = dims
    return ConstraintExpr((), (int(r), None if c is None else int(c)))
