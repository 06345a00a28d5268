"""Graph-augmented code summarizer: recurrent token encoder, residual
graph encoder over AST nodes, and an attention decoder.

The recurrent cells are written out gate by gate rather than using the
framework's fused RNN modules, so the computation matches the documented
equations exactly and can be cross-checked against a straight-line
reimplementation.
"""

from __future__ import annotations

from typing import Optional, Sequence

import torch
from torch import nn

from ..analysis import CodeGraph
from ..corpus import BOS, EOS, Vocab


class SummarizerError(Exception):
    pass


class DimensionMismatch(SummarizerError):
    pass


class VocabOverflow(SummarizerError):
    pass


MODEL_VERSION = 1
DEFAULT_D = 64
DEFAULT_HOPS = 2
MAX_DECODE_LEN = 20


class GruCell(nn.Module):
    """Gated recurrent unit: z/r gates plus candidate state.

    z = sigmoid(x Wz + h Uz + bz)
    r = sigmoid(x Wr + h Ur + br)
    n = tanh(x Wn + r * (h Un) + bn)
    h' = (1 - z) * n + z * h
    """

    def __init__(self, d: int):
        super().__init__()
        self.wz = nn.Parameter(torch.empty(d, d))
        self.uz = nn.Parameter(torch.empty(d, d))
        self.bz = nn.Parameter(torch.empty(d))
        self.wr = nn.Parameter(torch.empty(d, d))
        self.ur = nn.Parameter(torch.empty(d, d))
        self.br = nn.Parameter(torch.empty(d))
        self.wn = nn.Parameter(torch.empty(d, d))
        self.un = nn.Parameter(torch.empty(d, d))
        self.bn = nn.Parameter(torch.empty(d))

    def forward(self, x: torch.Tensor, h: torch.Tensor) -> torch.Tensor:
        z = torch.sigmoid(x @ self.wz + h @ self.uz + self.bz)
        r = torch.sigmoid(x @ self.wr + h @ self.ur + self.br)
        n = torch.tanh(x @ self.wn + r * (h @ self.un) + self.bn)
        return (1.0 - z) * n + z * h


def _attend(states: Optional[torch.Tensor], query: torch.Tensor) -> torch.Tensor:
    """Dot-product attention context; zero vector when nothing to attend."""
    if states is None or states.shape[0] == 0:
        return torch.zeros_like(query)
    weights = torch.softmax(states @ query, dim=0)
    return weights @ states


def normalized_adjacency(
    n_nodes: int, edges: Sequence[tuple[int, int]], dtype: torch.dtype = torch.float32
) -> torch.Tensor:
    """Row-normalized symmetric adjacency with self loops."""
    adj = torch.eye(n_nodes, dtype=dtype)
    for parent, child in edges:
        if parent >= n_nodes or child >= n_nodes or parent < 0 or child < 0:
            raise DimensionMismatch(f"edge ({parent},{child}) outside {n_nodes} nodes")
        adj[parent, child] = 1.0
        adj[child, parent] = 1.0
    return adj / adj.sum(dim=1, keepdim=True)


class SummarizerModel(nn.Module):
    def __init__(
        self,
        in_vocab: Vocab,
        out_vocab: Vocab,
        d: int = DEFAULT_D,
        hops: int = DEFAULT_HOPS,
    ):
        super().__init__()
        self.in_vocab = in_vocab
        self.out_vocab = out_vocab
        self.d = d
        self.hops = hops
        self.version = MODEL_VERSION
        self.e_in = nn.Parameter(torch.empty(len(in_vocab), d))
        self.e_out = nn.Parameter(torch.empty(len(out_vocab), d))
        self.w_g = nn.Parameter(torch.empty(d, d))
        self.encoder = GruCell(d)
        self.decoder = GruCell(d)
        self.w_c = nn.Parameter(torch.empty(3 * d, d))
        self.w_o = nn.Parameter(torch.empty(d, len(out_vocab)))
        self.b_o = nn.Parameter(torch.empty(len(out_vocab)))
        self.reset_parameters()

    def reset_parameters(self, seed: Optional[int] = None) -> None:
        generator = torch.Generator()
        if seed is not None:
            generator.manual_seed(seed)
        else:
            generator.seed()
        scale = self.d ** -0.5
        with torch.no_grad():
            for param in self.parameters():
                if param.dim() >= 2:
                    param.uniform_(-scale, scale, generator=generator)
                else:
                    param.zero_()

    # -- encoding ------------------------------------------------------

    def _check_ids(self, ids: Sequence[int], vocab: Vocab, what: str) -> None:
        for i in ids:
            if not 0 <= i < len(vocab):
                raise VocabOverflow(f"{what} id {i} outside vocabulary of {len(vocab)}")

    def encode_graph(self, graph: CodeGraph) -> tuple[list[int], list[int], tuple]:
        code_ids = [self.in_vocab.encode(t) for t in graph.code_tokens]
        ast_ids = [] if graph.degraded else [self.in_vocab.encode(t) for t in graph.ast_tokens]
        edges = () if graph.degraded else graph.edges
        return code_ids, ast_ids, edges

    def encode_sources(
        self, code_ids: Sequence[int], ast_ids: Sequence[int], edges: Sequence[tuple[int, int]]
    ) -> tuple[Optional[torch.Tensor], torch.Tensor, Optional[torch.Tensor]]:
        """Token states H, final token state, and hopped node states."""
        self._check_ids(code_ids, self.in_vocab, "code token")
        self._check_ids(ast_ids, self.in_vocab, "ast token")
        h = torch.zeros(self.d, dtype=self.e_in.dtype)
        states = []
        for i in code_ids:
            h = self.encoder(self.e_in[i], h)
            states.append(h)
        token_states = torch.stack(states) if states else None
        node_states = None
        if ast_ids:
            nodes = self.e_in[list(ast_ids)]
            adj = normalized_adjacency(len(ast_ids), edges, dtype=self.e_in.dtype)
            for _ in range(self.hops):
                nodes = torch.relu(adj @ nodes @ self.w_g + nodes)
            node_states = nodes
        return token_states, h, node_states

    # -- decoding ------------------------------------------------------

    def step(
        self,
        token_id: int,
        state: torch.Tensor,
        token_states: Optional[torch.Tensor],
        node_states: Optional[torch.Tensor],
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """One decoder step: next state and output logits."""
        state = self.decoder(self.e_out[token_id], state)
        c_tok = _attend(token_states, state)
        c_ast = _attend(node_states, state)
        combined = torch.tanh(torch.cat([state, c_tok, c_ast]) @ self.w_c)
        return state, combined @ self.w_o + self.b_o

    def forward_ids(
        self,
        code_ids: Sequence[int],
        ast_ids: Sequence[int],
        edges: Sequence[tuple[int, int]],
        target_prefix: Sequence[int],
    ) -> torch.Tensor:
        self._check_ids(target_prefix, self.out_vocab, "target")
        token_states, final, node_states = self.encode_sources(code_ids, ast_ids, edges)
        state = final
        logits = []
        for token_id in target_prefix:
            state, step_logits = self.step(token_id, state, token_states, node_states)
            logits.append(step_logits)
        if not logits:
            return torch.zeros(0, len(self.out_vocab), dtype=self.e_in.dtype)
        return torch.stack(logits)

    def forward(self, graph: CodeGraph, target_prefix: Sequence[int]) -> torch.Tensor:
        """Logits [len(target_prefix) x V_out]; row t is the distribution
        over the token following target_prefix[:t+1]."""
        code_ids, ast_ids, edges = self.encode_graph(graph)
        return self.forward_ids(code_ids, ast_ids, edges, target_prefix)


def greedy_decode(model: SummarizerModel, graph: CodeGraph, max_len: int = MAX_DECODE_LEN) -> list[str]:
    """Argmax decoding from <s> until </s> or max_len tokens."""
    code_ids, ast_ids, edges = model.encode_graph(graph)
    with torch.no_grad():
        token_states, state, node_states = model.encode_sources(code_ids, ast_ids, edges)
        out: list[str] = []
        token_id = BOS
        for _ in range(max_len):
            state, logits = model.step(token_id, state, token_states, node_states)
            token_id = int(torch.argmax(logits).item())
            if token_id == EOS:
                break
            out.append(model.out_vocab.decode(token_id))
    return out
