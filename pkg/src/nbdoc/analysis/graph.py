"""Token/node/edge artifacts consumed by the summarizer."""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import LexError, clean_source, split_identifier, tokenize_code
from .parser import AstNode, LEAF_KINDS, ParseError, parse_ast

DEFAULT_T_MAX = 100
DEFAULT_A_MAX = 200


@dataclass(frozen=True)
class CodeGraph:
    code_tokens: tuple[str, ...]
    ast_tokens: tuple[str, ...] = ()
    edges: tuple[tuple[int, int], ...] = ()
    degraded: bool = False


def _node_value_tokens(node: AstNode) -> list[str]:
    if node.value is None:
        return []
    if node.kind == "constant":
        return [node.value]
    # identifiers (names, attr/keyword/function names, dotted imports)
    parts: list[str] = []
    for piece in node.value.replace(".", " ").split():
        if piece in ("as", "in", "not", "or", "and", "is"):
            parts.append(piece)
        elif piece.isidentifier():
            parts.extend(split_identifier(piece))
        else:
            parts.append(piece)  # operator symbols on binop nodes
    return parts


class _Emitter:
    def __init__(self, a_max: int):
        self.a_max = a_max
        self.tokens: list[str] = []
        self.edges: list[tuple[int, int]] = []

    def emit(self, node: AstNode, parent: int | None) -> None:
        if node.kind in LEAF_KINDS:
            # leaves expand to value sub-tokens, each a child of the parent
            subtokens = _node_value_tokens(node) or [node.kind]
            if len(self.tokens) + len(subtokens) > self.a_max:
                return
            for sub in subtokens:
                index = len(self.tokens)
                self.tokens.append(sub)
                if parent is not None:
                    self.edges.append((parent, index))
            return
        if len(self.tokens) + 1 > self.a_max:
            return
        index = len(self.tokens)
        self.tokens.append(node.kind)
        if parent is not None:
            self.edges.append((parent, index))
        # auxiliary value (attribute name, operator, keyword arg, def name)
        for sub in _node_value_tokens(node):
            if len(self.tokens) >= self.a_max:
                return
            sub_index = len(self.tokens)
            self.tokens.append(sub)
            self.edges.append((index, sub_index))
        for child in node.children:
            self.emit(child, index)


def ast_to_tokens(root: AstNode, a_max: int = DEFAULT_A_MAX) -> tuple[list[str], list[tuple[int, int]]]:
    """Pre-order serialization of an AST: structural nodes contribute their
    kind name (plus value sub-tokens), leaves contribute value sub-tokens.
    Subtrees that would overflow ``a_max`` are dropped whole."""
    emitter = _Emitter(a_max)
    emitter.emit(root, None)
    return emitter.tokens, emitter.edges


def build_code_graph(
    source: str,
    t_max: int = DEFAULT_T_MAX,
    a_max: int = DEFAULT_A_MAX,
) -> CodeGraph:
    """Full preprocessing of one code cell: clean, tokenize, parse, and
    serialize the AST. Parse or lex failures degrade to token-only mode."""
    cleaned = clean_source(source)
    try:
        code_tokens = tokenize_code(cleaned)[:t_max]
    except LexError:
        return CodeGraph(code_tokens=(), degraded=True)
    try:
        root = parse_ast(cleaned)
    except (ParseError, LexError):
        return CodeGraph(code_tokens=tuple(code_tokens), degraded=True)
    ast_tokens, edges = ast_to_tokens(root, a_max)
    return CodeGraph(
        code_tokens=tuple(code_tokens),
        ast_tokens=tuple(ast_tokens),
        edges=tuple(edges),
    )
