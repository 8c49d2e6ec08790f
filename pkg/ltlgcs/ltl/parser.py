#!/usr/bin/env python

"""
Formula parser.

Precedence, tightest first: unary operators (`!`, `X`, `F`, `G`), `U`
(right-associative), `&`, `|`, `->` (right-associative). Atom names are
runs of [a-zA-Z0-9_]; `X`, `F`, `G`, `U`, `true` and `false` are reserved.
See doc/grammar.md.
"""

from typing import Dict, List, Tuple

from lark import Lark, Token, Transformer
from lark.exceptions import (
    UnexpectedCharacters,
    UnexpectedEOF,
    UnexpectedInput,
    UnexpectedToken,
    VisitError,
)

from ltlgcs.error import FormulaSyntaxError
from ltlgcs.ltl.formula import (
    FALSE,
    KEYWORDS,
    TRUE,
    Always,
    And,
    Atom,
    Eventually,
    Formula,
    Next,
    Not,
    Or,
    Until,
)

GRAMMAR = r"""
?start: implication

?implication: disjunction "->" implication -> implies
            | disjunction

?disjunction: disjunction "|" conjunction -> or_
            | conjunction

?conjunction: conjunction "&" until -> and_
            | until

?until: unary "U" until -> until
      | unary

?unary: "!" unary -> not_
      | "X" unary -> next_
      | "F" unary -> eventually
      | "G" unary -> always
      | primary

?primary: "true" -> true
        | "false" -> false
        | NAME -> atom
        | "(" implication ")"

NAME: /[a-zA-Z0-9_]+/

%import common.WS
%ignore WS
"""

_parser = Lark(GRAMMAR, parser="lalr", start="start")

_TOKEN_TEXT = {"NAME": "atom", "$END": "end of input"}


class _ToFormula(Transformer):
    def __init__(self, text: str) -> None:
        Transformer.__init__(self)
        self.text = text
        self.offsets: Dict[str, int] = {}

    def implies(self, args: List[Formula]) -> Formula:
        return Or(Not(args[0]), args[1])

    def or_(self, args: List[Formula]) -> Formula:
        return Or(args[0], args[1])

    def and_(self, args: List[Formula]) -> Formula:
        return And(args[0], args[1])

    def until(self, args: List[Formula]) -> Formula:
        return Until(args[0], args[1])

    def not_(self, args: List[Formula]) -> Formula:
        return Not(args[0])

    def next_(self, args: List[Formula]) -> Formula:
        return Next(args[0])

    def eventually(self, args: List[Formula]) -> Formula:
        return Eventually(args[0])

    def always(self, args: List[Formula]) -> Formula:
        return Always(args[0])

    def true(self, _: List) -> Formula:
        return TRUE

    def false(self, _: List) -> Formula:
        return FALSE

    def atom(self, args: List[Token]) -> Formula:
        token = args[0]
        name = str(token)
        if name in KEYWORDS:
            offset = _byte_offset(self.text, token.start_pos or 0)
            raise FormulaSyntaxError(
                f"unexpected '{name}' at offset {offset}; expected one of atom",
                offset=offset,
                expected=["atom"],
            )
        if name not in self.offsets:
            self.offsets[name] = _byte_offset(self.text, token.start_pos or 0)
        return Atom(name)


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _describe(names: List[str]) -> List[str]:
    out = []
    for name in names:
        if name in _TOKEN_TEXT:
            out.append(_TOKEN_TEXT[name])
            continue
        try:
            out.append(repr(_parser.get_terminal(name).pattern.value))
        except KeyError:
            out.append(name)
    return sorted(set(out))


def _syntax_error(text: str, err: UnexpectedInput) -> FormulaSyntaxError:
    if isinstance(err, UnexpectedEOF):
        offset = len(text)
        expected = list(err.expected)
        found = "end of input"
    elif isinstance(err, UnexpectedToken):
        expected = list(err.expected)
        if err.token.type == "$END":
            offset = len(text)
            found = "end of input"
        else:
            offset = err.token.start_pos or 0
            found = repr(str(err.token))
    elif isinstance(err, UnexpectedCharacters):
        offset = err.pos_in_stream
        expected = list(err.allowed or [])
        found = repr(text[offset])
    else:
        offset, expected, found = 0, [], "input"
    offset = _byte_offset(text, offset)
    names = _describe(expected)
    detail = f"unexpected {found} at offset {offset}"
    if names:
        detail += f"; expected one of {', '.join(names)}"
    return FormulaSyntaxError(detail, offset=offset, expected=names)


def parse_with_offsets(text: str) -> Tuple[Formula, Dict[str, int]]:
    """
    Parse text, also returning the byte offset of the first occurrence of
    each atom.
    """
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as why:
        raise _syntax_error(text, why)
    builder = _ToFormula(text)
    try:
        formula = builder.transform(tree)
    except VisitError as why:
        if isinstance(why.orig_exc, FormulaSyntaxError):
            raise why.orig_exc
        raise
    return formula, builder.offsets


def parse(text: str) -> Formula:
    return parse_with_offsets(text)[0]
