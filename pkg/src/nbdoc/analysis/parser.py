"""Recursive-descent parser for the scripting-language subset used in
data-science notebook cells.

The grammar intentionally covers only the statement and expression forms
that appear in typical analysis cells (imports, assignments, calls,
attribute chains, subscripts/slices, defs, lambdas, for/if, binary and
unary operators). Anything outside the subset raises UnsupportedSyntax;
malformed code raises ParseError. Callers degrade to token-only mode on
either.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import (
    DEDENT, END, INDENT, NAME, NEWLINE, NUMBER, OP, STRING,
    LexError, Tok, lex,
)


class ParseError(Exception):
    pass


class UnsupportedSyntax(ParseError):
    pass


# Node kinds. Leaf kinds (name, constant) always carry a value; attribute,
# binop, keyword, function_def carry an auxiliary value (attr/op/arg name).
LEAF_KINDS = {"name", "constant"}


@dataclass
class AstNode:
    kind: str
    value: str | None = None
    children: list["AstNode"] = field(default_factory=list)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


_UNSUPPORTED_KEYWORDS = {
    "class", "while", "with", "try", "except", "finally", "async", "await",
    "yield", "global", "nonlocal", "del", "raise", "assert", "pass",
    "break", "continue",
}

_COMPARE_OPS = {"==", "!=", "<", ">", "<=", ">="}
_ADD_OPS = {"+", "-"}
_MUL_OPS = {"*", "/", "//", "%", "@"}


class _Parser:
    def __init__(self, tokens: list[Tok]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers -------------------------------------------------
    def peek(self, offset: int = 0) -> Tok:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Tok:
        tok = self.tokens[self.pos]
        if self.pos < len(self.tokens) - 1:
            self.pos += 1
        return tok

    def at(self, type_: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.type == type_ and (text is None or tok.text == text)

    def expect(self, type_: str, text: str | None = None) -> Tok:
        if not self.at(type_, text):
            tok = self.peek()
            raise ParseError(
                f"expected {text or type_}, got {tok.text!r} at line {tok.line}"
            )
        return self.advance()

    def skip_newlines(self):
        while self.at(NEWLINE):
            self.advance()

    # -- statements ----------------------------------------------------
    def parse_module(self) -> AstNode:
        body = []
        self.skip_newlines()
        while not self.at(END):
            body.append(self.statement())
            self.skip_newlines()
        return AstNode("module", children=body)

    def statement(self) -> AstNode:
        tok = self.peek()
        if tok.type == NAME:
            if tok.text in _UNSUPPORTED_KEYWORDS:
                raise UnsupportedSyntax(f"{tok.text!r} statement at line {tok.line}")
            if tok.text == "import":
                return self.import_stmt()
            if tok.text == "from":
                return self.from_import_stmt()
            if tok.text == "def":
                return self.function_def()
            if tok.text == "return":
                return self.return_stmt()
            if tok.text == "for":
                return self.for_stmt()
            if tok.text == "if":
                return self.if_stmt()
        return self.assign_or_expr()

    def _dotted_name(self) -> str:
        parts = [self.expect(NAME).text]
        while self.at(OP, "."):
            self.advance()
            parts.append(self.expect(NAME).text)
        return ".".join(parts)

    def import_stmt(self) -> AstNode:
        self.expect(NAME, "import")
        names = []
        while True:
            module = self._dotted_name()
            alias = None
            if self.at(NAME, "as"):
                self.advance()
                alias = self.expect(NAME).text
            names.append(AstNode("name", module if alias is None else f"{module} as {alias}"))
            if self.at(OP, ","):
                self.advance()
                continue
            break
        self.end_of_statement()
        return AstNode("import", children=names)

    def from_import_stmt(self) -> AstNode:
        self.expect(NAME, "from")
        module = self._dotted_name()
        self.expect(NAME, "import")
        if self.at(OP, "*"):
            raise UnsupportedSyntax("star import")
        names = []
        while True:
            target = self.expect(NAME).text
            if self.at(NAME, "as"):
                self.advance()
                target = f"{target} as {self.expect(NAME).text}"
            names.append(AstNode("name", target))
            if self.at(OP, ","):
                self.advance()
                continue
            break
        self.end_of_statement()
        return AstNode("import_from", value=module, children=names)

    def function_def(self) -> AstNode:
        self.expect(NAME, "def")
        fname = self.expect(NAME).text
        self.expect(OP, "(")
        params = self.param_list(")")
        self.expect(OP, ")")
        self.expect(OP, ":")
        body = self.block()
        return AstNode("function_def", value=fname, children=params + body)

    def param_list(self, closer: str) -> list[AstNode]:
        params = []
        while not self.at(OP, closer) and not (closer == ":" and self.at(OP, ":")):
            if self.at(OP, "*") or self.at(OP, "**"):
                raise UnsupportedSyntax("starred parameter")
            pname = self.expect(NAME).text
            if self.at(OP, "="):
                self.advance()
                params.append(AstNode("keyword", value=pname, children=[self.expression()]))
            else:
                params.append(AstNode("name", pname))
            if self.at(OP, ","):
                self.advance()
            else:
                break
        return params

    def return_stmt(self) -> AstNode:
        self.expect(NAME, "return")
        children = []
        if not self.at(NEWLINE) and not self.at(DEDENT) and not self.at(END):
            children.append(self.expression_list())
        self.end_of_statement()
        return AstNode("return", children=children)

    def for_stmt(self) -> AstNode:
        self.expect(NAME, "for")
        target = self.expression_list(allow_in=False)
        self.expect(NAME, "in")
        iterable = self.expression_list()
        self.expect(OP, ":")
        body = self.block()
        return AstNode("for", children=[target, iterable] + body)

    def if_stmt(self) -> AstNode:
        self.advance()  # if / elif
        test = self.expression()
        self.expect(OP, ":")
        children = [test] + self.block()
        self.skip_newlines()
        if self.at(NAME, "elif"):
            children.append(self.if_stmt())
        elif self.at(NAME, "else"):
            self.advance()
            self.expect(OP, ":")
            children.extend(self.block())
        return AstNode("if", children=children)

    def block(self) -> list[AstNode]:
        # single-line suite: `def f(x): return x`
        if not self.at(NEWLINE):
            return [self.statement()]
        self.skip_newlines()
        self.expect(INDENT)
        body = []
        while not self.at(DEDENT) and not self.at(END):
            body.append(self.statement())
            self.skip_newlines()
        if self.at(DEDENT):
            self.advance()
        return body

    def assign_or_expr(self) -> AstNode:
        first = self.expression_list()
        if self.at(OP, "="):
            targets = [first]
            values = []
            while self.at(OP, "="):
                self.advance()
                values.append(self.expression_list())
            *chain, value = values
            targets.extend(chain)
            for target in targets:
                if target.kind not in ("name", "attribute", "subscript", "tuple"):
                    raise ParseError("invalid assignment target")
            self.end_of_statement()
            return AstNode("assign", children=targets + [value])
        self.end_of_statement()
        return AstNode("expr_stmt", children=[first])

    def end_of_statement(self):
        if self.at(OP, ";"):
            raise UnsupportedSyntax("semicolon-separated statements")
        if self.at(NEWLINE):
            self.advance()
        elif not (self.at(END) or self.at(DEDENT)):
            tok = self.peek()
            raise ParseError(f"unexpected {tok.text!r} at line {tok.line}")

    # -- expressions ---------------------------------------------------
    def expression_list(self, allow_in: bool = True) -> AstNode:
        first = self.expression(allow_in=allow_in)
        if not self.at(OP, ","):
            return first
        items = [first]
        while self.at(OP, ","):
            self.advance()
            if self.at(NEWLINE) or self.at(OP, "=") or self.at(NAME, "in"):
                break
            items.append(self.expression(allow_in=allow_in))
        return AstNode("tuple", children=items)

    def expression(self, allow_in: bool = True) -> AstNode:
        if self.at(NAME, "lambda"):
            return self.lambda_expr()
        return self.or_expr(allow_in)

    def lambda_expr(self) -> AstNode:
        self.expect(NAME, "lambda")
        params = self.param_list(":")
        self.expect(OP, ":")
        return AstNode("lambda", children=params + [self.expression()])

    def or_expr(self, allow_in: bool) -> AstNode:
        node = self.and_expr(allow_in)
        while self.at(NAME, "or"):
            self.advance()
            node = AstNode("binop", value="or", children=[node, self.and_expr(allow_in)])
        return node

    def and_expr(self, allow_in: bool) -> AstNode:
        node = self.not_expr(allow_in)
        while self.at(NAME, "and"):
            self.advance()
            node = AstNode("binop", value="and", children=[node, self.not_expr(allow_in)])
        return node

    def not_expr(self, allow_in: bool) -> AstNode:
        if self.at(NAME, "not"):
            self.advance()
            return AstNode("binop", value="not", children=[self.not_expr(allow_in)])
        return self.comparison(allow_in)

    def comparison(self, allow_in: bool) -> AstNode:
        node = self.arith(allow_in)
        while True:
            tok = self.peek()
            if tok.type == OP and tok.text in _COMPARE_OPS:
                self.advance()
                node = AstNode("binop", value=tok.text, children=[node, self.arith(allow_in)])
            elif allow_in and tok.type == NAME and tok.text in ("in", "is"):
                op = self.advance().text
                if self.at(NAME, "not"):
                    self.advance()
                    op += " not"
                node = AstNode("binop", value=op, children=[node, self.arith(allow_in)])
            elif tok.type == NAME and tok.text == "not" and allow_in:
                self.advance()
                self.expect(NAME, "in")
                node = AstNode("binop", value="not in", children=[node, self.arith(allow_in)])
            else:
                return node

    def arith(self, allow_in: bool) -> AstNode:
        node = self.term(allow_in)
        while self.at(OP) and self.peek().text in _ADD_OPS:
            op = self.advance().text
            node = AstNode("binop", value=op, children=[node, self.term(allow_in)])
        return node

    def term(self, allow_in: bool) -> AstNode:
        node = self.factor(allow_in)
        while self.at(OP) and self.peek().text in _MUL_OPS:
            op = self.advance().text
            node = AstNode("binop", value=op, children=[node, self.factor(allow_in)])
        return node

    def factor(self, allow_in: bool) -> AstNode:
        if self.at(OP, "-"):
            self.advance()
            return AstNode("binop", value="usub", children=[self.factor(allow_in)])
        if self.at(OP, "+"):
            self.advance()
            return AstNode("binop", value="uadd", children=[self.factor(allow_in)])
        return self.power(allow_in)

    def power(self, allow_in: bool) -> AstNode:
        node = self.postfix(allow_in)
        if self.at(OP, "**"):
            self.advance()
            return AstNode("binop", value="**", children=[node, self.factor(allow_in)])
        return node

    def postfix(self, allow_in: bool) -> AstNode:
        node = self.atom(allow_in)
        while True:
            if self.at(OP, "."):
                self.advance()
                attr = self.expect(NAME).text
                node = AstNode("attribute", value=attr, children=[node])
            elif self.at(OP, "("):
                self.advance()
                args = self.call_args()
                self.expect(OP, ")")
                node = AstNode("call", children=[node] + args)
            elif self.at(OP, "["):
                self.advance()
                index = self.subscript_index()
                self.expect(OP, "]")
                node = AstNode("subscript", children=[node, index])
            else:
                return node

    def call_args(self) -> list[AstNode]:
        args: list[AstNode] = []
        while not self.at(OP, ")"):
            if self.at(OP, "*") or self.at(OP, "**"):
                raise UnsupportedSyntax("starred argument")
            if self.at(NAME) and self.peek(1).type == OP and self.peek(1).text == "=":
                kw = self.advance().text
                self.advance()
                args.append(AstNode("keyword", value=kw, children=[self.expression()]))
            else:
                args.append(self.expression())
            if self.at(OP, ","):
                self.advance()
            else:
                break
        return args

    def subscript_index(self) -> AstNode:
        items = [self.slice_item()]
        while self.at(OP, ","):
            self.advance()
            if self.at(OP, "]"):
                break
            items.append(self.slice_item())
        return items[0] if len(items) == 1 else AstNode("tuple", children=items)

    def slice_item(self) -> AstNode:
        parts: list[AstNode] = []
        is_slice = False

        def piece_present() -> bool:
            return not (self.at(OP, ":") or self.at(OP, "]") or self.at(OP, ","))

        if piece_present():
            parts.append(self.expression())
        if self.at(OP, ":"):
            is_slice = True
            self.advance()
            if piece_present():
                parts.append(self.expression())
            if self.at(OP, ":"):
                self.advance()
                if piece_present():
                    parts.append(self.expression())
        if is_slice:
            return AstNode("slice", children=parts)
        if not parts:
            raise ParseError("empty subscript")
        return parts[0]

    def atom(self, allow_in: bool) -> AstNode:
        tok = self.peek()
        if tok.type == NUMBER:
            self.advance()
            return AstNode("constant", "<num>")
        if tok.type == STRING:
            self.advance()
            return AstNode("constant", "<str>")
        if tok.type == NAME:
            if tok.text in ("True", "False", "None"):
                self.advance()
                return AstNode("constant", tok.text.lower())
            if tok.text in _UNSUPPORTED_KEYWORDS:
                raise UnsupportedSyntax(f"{tok.text!r} at line {tok.line}")
            if tok.text in ("if", "else", "for", "import", "from", "def", "return", "elif"):
                raise ParseError(f"unexpected keyword {tok.text!r} at line {tok.line}")
            self.advance()
            return AstNode("name", tok.text)
        if tok.type == OP and tok.text == "(":
            self.advance()
            if self.at(OP, ")"):
                self.advance()
                return AstNode("tuple")
            inner = self.expression_list()
            self.expect(OP, ")")
            return inner
        if tok.type == OP and tok.text == "[":
            self.advance()
            items = []
            while not self.at(OP, "]"):
                if self.at(NAME, "for"):
                    raise UnsupportedSyntax("comprehension")
                items.append(self.expression())
                if self.at(NAME, "for"):
                    raise UnsupportedSyntax("comprehension")
                if self.at(OP, ","):
                    self.advance()
                else:
                    break
            self.expect(OP, "]")
            return AstNode("list", children=items)
        if tok.type == OP and tok.text == "{":
            raise UnsupportedSyntax("dict/set literal")
        raise ParseError(f"unexpected {tok.text!r} at line {tok.line}")


def parse_ast(source: str) -> AstNode:
    """Parse cleaned source into a module-rooted AST for the subset
    grammar. Raises UnsupportedSyntax / ParseError (or LexError from the
    lexer) on anything outside the subset."""
    tokens = lex(source)
    parser = _Parser(tokens)
    node = parser.parse_module()
    return node
