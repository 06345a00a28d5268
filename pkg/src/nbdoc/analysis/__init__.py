from .lexer import LexError, clean_source, split_identifier, tokenize_code
from .parser import AstNode, ParseError, UnsupportedSyntax, parse_ast
from .graph import CodeGraph, DEFAULT_A_MAX, DEFAULT_T_MAX, ast_to_tokens, build_code_graph

__all__ = [
    "LexError",
    "clean_source",
    "split_identifier",
    "tokenize_code",
    "AstNode",
    "ParseError",
    "UnsupportedSyntax",
    "parse_ast",
    "CodeGraph",
    "DEFAULT_A_MAX",
    "DEFAULT_T_MAX",
    "ast_to_tokens",
    "build_code_graph",
]
