"""Tokenizer and recursive-descent parser.

Keywords are case-insensitive; identifiers are case-sensitive. String
literals use single quotes with '' as the escape. Every error carries
a (line, column) position.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..errors import ParseError
from .ast import (
    BaseTableRef,
    ColRef,
    ColumnItem,
    Comparison,
    Const,
    CreatePropertyGraph,
    EdgeTableClause,
    EdgeTerm,
    GraphTableClause,
    JoinSpec,
    MatchClause,
    Operand,
    PathExpr,
    Pos,
    SelectItem,
    SelectQuery,
    Statement,
    VertexTerm,
)

KEYWORDS = {
    "SELECT", "FROM", "WHERE", "AS", "JOIN", "INNER", "ON", "AND",
    "CREATE", "PROPERTY", "GRAPH", "VERTEX", "EDGE", "TABLES",
    "SOURCE", "DESTINATION", "KEY", "REFERENCES", "REFERENCE",
    "GRAPH_TABLE", "MATCH", "DISTINCT", "VERTICES", "EDGES", "ALL",
    "COLUMNS",
}

# multi-char operators first so the scanner is greedy in the right order
_PUNCT = ["<=", ">=", "<>", "->", "<-", "(", ")", "{", "}", "[", "]",
          ",", ".", ";", ":", "-", "=", "<", ">"]


@dataclass(frozen=True)
class Token:
    type: str  # KEYWORD, IDENT, INT, STRING, punct literal, EOF
    value: str
    line: int
    col: int

    @property
    def pos(self) -> Pos:
        return Pos(self.line, self.col)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "'":
            start_line, start_col = line, col
            i += 1
            col += 1
            buf = []
            while True:
                if i >= n:
                    raise ParseError("unterminated string literal", start_line, start_col)
                c = text[i]
                if c == "'":
                    if i + 1 < n and text[i + 1] == "'":
                        buf.append("'")
                        i += 2
                        col += 2
                        continue
                    i += 1
                    col += 1
                    break
                if c == "\n":
                    raise ParseError("unterminated string literal", start_line, start_col)
                buf.append(c)
                i += 1
                col += 1
            tokens.append(Token("STRING", "".join(buf), start_line, start_col))
            continue
        if ch.isdigit():
            start_col = col
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            start_col = col
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            upper = word.upper()
            if upper in KEYWORDS:
                tokens.append(Token("KEYWORD", upper, line, start_col))
            else:
                tokens.append(Token("IDENT", word, line, start_col))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token(p, p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    # -- plumbing ---------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.type != "EOF":
            self.i += 1
        return t

    def at_keyword(self, kw: str) -> bool:
        t = self.peek()
        return t.type == "KEYWORD" and t.value == kw

    def accept_keyword(self, kw: str) -> bool:
        if self.at_keyword(kw):
            self.next()
            return True
        return False

    def expect_keyword(self, kw: str) -> Token:
        t = self.peek()
        if not self.at_keyword(kw):
            raise ParseError(f"expected {kw}, got {t.value or t.type!r}", t.line, t.col)
        return self.next()

    def accept(self, ttype: str) -> Optional[Token]:
        if self.peek().type == ttype:
            return self.next()
        return None

    def expect(self, ttype: str) -> Token:
        t = self.peek()
        if t.type != ttype:
            shown = t.value if t.value else t.type
            raise ParseError(f"expected {ttype!r}, got {shown!r}", t.line, t.col)
        return self.next()

    def ident(self) -> str:
        return self.expect("IDENT").value

    # -- statements ---------------------------------------------------------

    def statement(self) -> Statement:
        if self.at_keyword("CREATE"):
            stmt: Statement = self.create_graph()
        elif self.at_keyword("SELECT"):
            stmt = self.select_query()
        else:
            t = self.peek()
            raise ParseError("expected SELECT or CREATE PROPERTY GRAPH",
                             t.line, t.col)
        self.accept(";")
        t = self.peek()
        if t.type != "EOF":
            raise ParseError(f"unexpected trailing input {t.value!r}", t.line, t.col)
        return stmt

    def create_graph(self) -> CreatePropertyGraph:
        self.expect_keyword("CREATE")
        self.expect_keyword("PROPERTY")
        self.expect_keyword("GRAPH")
        name = self.ident()
        self.expect_keyword("VERTEX")
        self.expect_keyword("TABLES")
        self.expect("(")
        vtables = [self.ident()]
        while self.accept(","):
            vtables.append(self.ident())
        self.expect(")")
        self.expect_keyword("EDGE")
        self.expect_keyword("TABLES")
        self.expect("(")
        etables = [self.edge_table_clause()]
        while self.accept(","):
            etables.append(self.edge_table_clause())
        self.expect(")")
        return CreatePropertyGraph(name, tuple(vtables), tuple(etables))

    def edge_table_clause(self) -> EdgeTableClause:
        rel = self.ident()
        self.expect_keyword("SOURCE")
        src_key, src_table, src_ref = self.key_reference()
        self.expect_keyword("DESTINATION")
        dst_key, dst_table, dst_ref = self.key_reference()
        return EdgeTableClause(rel, src_key, src_table, src_ref,
                               dst_key, dst_table, dst_ref)

    def key_reference(self) -> tuple[str, str, str]:
        self.expect_keyword("KEY")
        self.expect("(")
        key = self.ident()
        self.expect(")")
        if not self.accept_keyword("REFERENCES"):
            self.expect_keyword("REFERENCE")
        table = self.ident()
        self.expect("(")
        ref = self.ident()
        self.expect(")")
        return key, table, ref

    # -- SELECT ---------------------------------------------------------

    def select_query(self) -> SelectQuery:
        self.expect_keyword("SELECT")
        items = [self.select_item()]
        while self.accept(","):
            items.append(self.select_item())
        self.expect_keyword("FROM")
        from_items = [self.from_item()]
        while self.accept(","):
            from_items.append(self.from_item())
        joins = []
        while self.at_keyword("JOIN") or self.at_keyword("INNER"):
            self.accept_keyword("INNER")
            self.expect_keyword("JOIN")
            table = self.base_table_ref()
            self.expect_keyword("ON")
            conds = self.conjunction()
            joins.append(JoinSpec(table, tuple(conds)))
        where: list[Comparison] = []
        if self.accept_keyword("WHERE"):
            where = self.conjunction()
        return SelectQuery(tuple(items), tuple(from_items), tuple(joins),
                           tuple(where))

    def select_item(self) -> SelectItem:
        ref = self.colref()
        alias = None
        if self.accept_keyword("AS"):
            alias = self.ident()
        return SelectItem(ref, alias)

    def colref(self) -> ColRef:
        t = self.expect("IDENT")
        if self.accept("."):
            name = self.ident()
            return ColRef(t.value, name, t.pos)
        return ColRef(None, t.value, t.pos)

    def from_item(self):
        if self.at_keyword("GRAPH_TABLE"):
            return self.graph_table()
        return self.base_table_ref()

    def base_table_ref(self) -> BaseTableRef:
        t = self.expect("IDENT")
        alias = t.value
        if self.accept_keyword("AS"):
            alias = self.ident()
        elif self.peek().type == "IDENT":
            alias = self.ident()
        return BaseTableRef(t.value, alias, t.pos)

    def graph_table(self) -> GraphTableClause:
        t = self.expect_keyword("GRAPH_TABLE")
        self.expect("(")
        graph = self.ident()
        match = self.match_clause()
        self.expect_keyword("COLUMNS")
        self.expect("(")
        cols = [self.column_item()]
        while self.accept(","):
            cols.append(self.column_item())
        self.expect(")")
        self.expect(")")
        if not self.accept_keyword("AS") and self.peek().type != "IDENT":
            raise ParseError("GRAPH_TABLE requires an alias",
                             self.peek().line, self.peek().col)
        alias = self.ident()
        return GraphTableClause(graph, match, tuple(cols), alias, t.pos)

    def column_item(self) -> ColumnItem:
        t = self.peek()
        var = self.ident()
        self.expect(".")
        attr = self.ident()
        self.expect_keyword("AS")
        alias = self.ident()
        return ColumnItem(var, attr, alias, t.pos)

    def match_clause(self) -> MatchClause:
        self.expect_keyword("MATCH")
        distinct = "none"
        if self.accept_keyword("DISTINCT"):
            t = self.peek()
            if self.accept_keyword("VERTICES"):
                distinct = "vertices"
            elif self.accept_keyword("EDGES"):
                distinct = "edges"
            elif self.accept_keyword("ALL"):
                distinct = "all"
            else:
                raise ParseError("expected VERTICES, EDGES or ALL after DISTINCT",
                                 t.line, t.col)
        paths = [self.path_expr()]
        while self.accept(","):
            paths.append(self.path_expr())
        return MatchClause(distinct, tuple(paths))

    def path_expr(self) -> PathExpr:
        first = self.vertex_term()
        steps: list[tuple[EdgeTerm, VertexTerm]] = []
        while self.peek().type in ("-", "<-"):
            edge = self.edge_term()
            vertex = self.vertex_term()
            steps.append((edge, vertex))
        return PathExpr(first, tuple(steps))

    def vertex_term(self) -> VertexTerm:
        t = self.expect("(")
        var = self.ident()
        label = None
        if self.accept(":"):
            label = self.ident()
        props = self.props_block()
        self.expect(")")
        return VertexTerm(var, label, props, t.pos)

    def edge_term(self) -> EdgeTerm:
        t = self.peek()
        if self.accept("<-"):
            arrow = "left"
            self.expect("[")
        else:
            self.expect("-")
            arrow = None  # decided by the closing side
            self.expect("[")
        var = None
        if self.peek().type == "IDENT":
            var = self.ident()
        self.expect(":")
        label = self.ident()
        props = self.props_block()
        self.expect("]")
        if arrow == "left":
            self.expect("-")
        elif self.accept("->"):
            arrow = "right"
        else:
            self.expect("-")
            arrow = "none"
        return EdgeTerm(var, label, arrow, props, t.pos)

    def props_block(self) -> tuple:
        if self.peek().type != "{":
            return ()
        self.next()
        props = []
        while True:
            attr = self.ident()
            self.expect(":")
            props.append((attr, self.const()))
            if not self.accept(","):
                break
        self.expect("}")
        return tuple(props)

    def const(self) -> Const:
        t = self.peek()
        if t.type == "STRING":
            self.next()
            return Const(t.value, t.pos)
        neg = False
        if t.type == "-":
            self.next()
            neg = True
        it = self.expect("INT")
        v = int(it.value)
        return Const(-v if neg else v, t.pos)

    def conjunction(self) -> list[Comparison]:
        conds = [self.comparison()]
        while self.accept_keyword("AND"):
            conds.append(self.comparison())
        return conds

    def comparison(self) -> Comparison:
        left = self.operand()
        t = self.peek()
        if t.type not in ("=", "<>", "<", "<=", ">", ">="):
            raise ParseError(f"expected comparison operator, got {t.value!r}",
                             t.line, t.col)
        self.next()
        right = self.operand()
        return Comparison(left, t.type, right, t.pos)

    def operand(self) -> Operand:
        t = self.peek()
        if t.type == "IDENT":
            return self.colref()
        return self.const()


def parse_statement(text: str) -> Statement:
    return Parser(text).statement()


def parse_query(text: str) -> SelectQuery:
    stmt = parse_statement(text)
    if not isinstance(stmt, SelectQuery):
        raise ParseError("expected a SELECT query", 1, 1)
    return stmt


def parse_ddl(text: str) -> list[CreatePropertyGraph]:
    """Parse a file of CREATE PROPERTY GRAPH statements."""
    parser = Parser(text)
    out = []
    while parser.peek().type != "EOF":
        out.append(parser.create_graph())
        parser.accept(";")
    return out
