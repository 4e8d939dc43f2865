"""
Parser and renderer for the line-oriented instance format.

    instance <name>
    var <ident> [aux] ( {<int>(,<int>)*} | <int>..<int> )
    order <ident> <ident> ...
    con alldifferent ( <ident>+ )
    con rel <ident> <op> <ident> [+ <int>]
    con ext (allowed|forbidden) ( <ident>+ ) { (<int>,...) (; (<int>,...))* }

``#`` starts a comment that runs to the end of the line.
"""
import logging
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .domain import (
    Constraint,
    ConstraintKind,
    Instance,
    InstanceError,
    InstanceValidationError,
    Variable,
)

logger = logging.getLogger(__name__)


class InstanceParseError(InstanceError):
    """Raised when instance text cannot be parsed; carries the 1-based position."""

    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        self.reason = message
        super().__init__(f"line {line}, column {column}: {message}")


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<range>\.\.)
  | (?P<op>!=|<=|>=|=|<|>)
  | (?P<punct>[{}(),;+])
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(line: str, line_no: int) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(line):
        match = _TOKEN_RE.match(line, pos)
        if match is None:
            raise InstanceParseError(f"unexpected character {line[pos]!r}", line_no, pos + 1)
        if match.lastgroup != 'ws':
            tokens.append(_Token(match.lastgroup, match.group(), pos + 1))
        pos = match.end()
    return tokens


class _Cursor:
    """Token cursor over a single line."""

    def __init__(self, tokens: List[_Token], line_no: int, line_length: int):
        self.tokens = tokens
        self.line_no = line_no
        self.end_column = line_length + 1
        self.pos = 0

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def error(self, message, token=None):
        column = token.column if token is not None else self.end_column
        return InstanceParseError(message, self.line_no, column)

    def next(self, what: str) -> _Token:
        token = self.peek()
        if token is None:
            raise self.error(f"expected {what}, found end of line")
        self.pos += 1
        return token

    def expect(self, kind: str, text: Optional[str] = None) -> _Token:
        what = repr(text) if text is not None else kind
        token = self.next(what)
        if token.kind != kind or (text is not None and token.text != text):
            raise self.error(f"expected {what}, found {token.text!r}", token)
        return token

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[_Token]:
        token = self.peek()
        if token is not None and token.kind == kind and (text is None or token.text == text):
            self.pos += 1
            return token
        return None

    def finish(self):
        token = self.peek()
        if token is not None:
            raise self.error(f"unexpected trailing token {token.text!r}", token)


class InstanceParser:
    """Builds an Instance from the native text format."""

    def __init__(self, name: Optional[str] = None):
        self.name = name
        self._name_seen = False
        self.variables: List[Variable] = []
        self.index: Dict[str, int] = {}
        self.constraints: List[Constraint] = []
        self._order: Optional[Tuple[List[_Token], int]] = None

    def parse(self, text: str) -> Instance:
        for line_no, raw in enumerate(text.splitlines(), 1):
            line = raw.split('#', 1)[0]
            tokens = _tokenize(line, line_no)
            if not tokens:
                continue
            cursor = _Cursor(tokens, line_no, len(line.rstrip()))
            keyword = cursor.expect('ident')
            handler = getattr(self, f'_parse_{keyword.text}', None)
            if handler is None:
                raise cursor.error(f"unknown statement {keyword.text!r}", keyword)
            handler(cursor, keyword)
            cursor.finish()

        ordering = self._resolve_order()
        try:
            instance = Instance(
                name=self.name or 'unnamed',
                variables=tuple(self.variables),
                constraints=tuple(self.constraints),
                ordering=ordering,
            )
        except InstanceValidationError as e:
            raise InstanceParseError(str(e), 1, 1) from e
        logger.debug(
            f"Parsed instance {instance.name}: {instance.n_variables} variables, "
            f"{instance.n_constraints} constraints"
        )
        return instance

    # Statements

    def _parse_instance(self, cursor: _Cursor, keyword: _Token):
        if self._name_seen:
            raise cursor.error("duplicate 'instance' line", keyword)
        self.name = cursor.expect('ident').text
        self._name_seen = True

    def _parse_var(self, cursor: _Cursor, keyword: _Token):
        name_token = cursor.expect('ident')
        if name_token.text in self.index:
            raise cursor.error(f"duplicate variable name {name_token.text!r}", name_token)
        aux = cursor.accept('ident', 'aux') is not None

        domain_token = cursor.peek()
        if cursor.accept('punct', '{'):
            values = [int(cursor.expect('int').text)]
            while cursor.accept('punct', ','):
                values.append(int(cursor.expect('int').text))
            cursor.expect('punct', '}')
        else:
            low = int(cursor.expect('int').text)
            cursor.expect('range')
            high = int(cursor.expect('int').text)
            if high < low:
                raise cursor.error(f"empty domain {low}..{high}", domain_token)
            values = list(range(low, high + 1))

        try:
            variable = Variable(name=name_token.text, domain=tuple(values), aux=aux)
        except InstanceValidationError as e:
            raise cursor.error(str(e), domain_token) from e
        self.index[variable.name] = len(self.variables)
        self.variables.append(variable)

    def _parse_order(self, cursor: _Cursor, keyword: _Token):
        if self._order is not None:
            raise cursor.error("duplicate 'order' line", keyword)
        names = [cursor.expect('ident')]
        while not cursor.at_end():
            names.append(cursor.expect('ident'))
        self._order = (names, cursor.line_no)

    def _parse_con(self, cursor: _Cursor, keyword: _Token):
        kind = cursor.expect('ident')
        try:
            if kind.text == 'alldifferent':
                scope = self._scope(cursor)
                constraint = Constraint(kind=ConstraintKind.ALLDIFFERENT, scope=scope)
            elif kind.text == 'rel':
                left = self._variable(cursor)
                op = cursor.expect('op').text
                right = self._variable(cursor)
                offset = 0
                if cursor.accept('punct', '+'):
                    offset = int(cursor.expect('int').text)
                constraint = Constraint(
                    kind=ConstraintKind.RELATION, scope=(left, right), op=op, offset=offset,
                )
            elif kind.text == 'ext':
                mode = cursor.expect('ident')
                if mode.text not in ('allowed', 'forbidden'):
                    raise cursor.error(f"expected 'allowed' or 'forbidden', found {mode.text!r}", mode)
                scope = self._scope(cursor)
                tuples = self._tuples(cursor)
                constraint = Constraint(
                    kind=ConstraintKind.EXTENSION, scope=scope,
                    tuples=frozenset(tuples), allowed=mode.text == 'allowed',
                )
            else:
                raise cursor.error(f"unknown constraint kind {kind.text!r}", kind)
        except InstanceValidationError as e:
            raise cursor.error(str(e), keyword) from e
        self.constraints.append(constraint)

    # Pieces

    def _variable(self, cursor: _Cursor) -> int:
        token = cursor.expect('ident')
        if token.text not in self.index:
            raise cursor.error(f"undeclared variable {token.text!r}", token)
        return self.index[token.text]

    def _scope(self, cursor: _Cursor) -> Tuple[int, ...]:
        cursor.expect('punct', '(')
        scope = [self._variable(cursor)]
        while not cursor.accept('punct', ')'):
            scope.append(self._variable(cursor))
        return tuple(scope)

    def _tuples(self, cursor: _Cursor) -> List[Tuple[int, ...]]:
        cursor.expect('punct', '{')
        tuples = []
        if cursor.accept('punct', '}'):
            return tuples
        while True:
            cursor.expect('punct', '(')
            values = [int(cursor.expect('int').text)]
            while cursor.accept('punct', ','):
                values.append(int(cursor.expect('int').text))
            cursor.expect('punct', ')')
            tuples.append(tuple(values))
            if cursor.accept('punct', '}'):
                return tuples
            cursor.expect('punct', ';')

    def _resolve_order(self) -> Optional[Tuple[int, ...]]:
        if self._order is None:
            return None
        tokens, line_no = self._order
        ordering = []
        for token in tokens:
            if token.text not in self.index:
                raise InstanceParseError(f"undeclared variable {token.text!r} in order", line_no, token.column)
            ordering.append(self.index[token.text])
        if sorted(ordering) != list(range(len(self.variables))):
            raise InstanceParseError(
                "order is not a permutation of all variables", line_no, tokens[0].column,
            )
        return tuple(ordering)


def parse_instance(text: str, name: Optional[str] = None) -> Instance:
    """
    Parse instance text.

    Args:
        text: Instance source in the native format
        name: Fallback name when the text has no ``instance`` line

    Raises:
        InstanceParseError: On syntax errors or invariant violations
    """
    return InstanceParser(name=name).parse(text)


def _render_domain(domain: Tuple[int, ...]) -> str:
    if len(domain) > 2 and domain[-1] - domain[0] == len(domain) - 1:
        return f"{domain[0]}..{domain[-1]}"
    return '{' + ','.join(str(v) for v in domain) + '}'


def render_instance(instance: Instance) -> str:
    """Render an instance in the native format; ``parse_instance`` inverts it."""
    names = [v.name for v in instance.variables]
    lines = [f"instance {instance.name}"]
    for variable in instance.variables:
        aux = ' aux' if variable.aux else ''
        lines.append(f"var {variable.name}{aux} {_render_domain(variable.domain)}")
    if instance.variables:
        lines.append('order ' + ' '.join(names[i] for i in instance.ordering))

    for constraint in instance.constraints:
        scope = ' '.join(names[i] for i in constraint.scope)
        if constraint.kind == ConstraintKind.ALLDIFFERENT:
            lines.append(f"con alldifferent ( {scope} )")
        elif constraint.kind == ConstraintKind.RELATION:
            left, right = (names[i] for i in constraint.scope)
            offset = f" + {constraint.offset}" if constraint.offset else ''
            lines.append(f"con rel {left} {constraint.op} {right}{offset}")
        else:
            mode = 'allowed' if constraint.allowed else 'forbidden'
            tuples = ' ; '.join(
                '(' + ','.join(str(v) for v in t) + ')' for t in sorted(constraint.tuples)
            )
            lines.append(f"con ext {mode} ( {scope} ) {{ {tuples} }}")
    return '\n'.join(lines) + '\n'

