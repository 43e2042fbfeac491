"""Model input assembly: tokenization, vocabulary, sequence layout,
occurrence alignment, and MLM masking.

Layout is [CLS] input-tokens [SEP] [SEP] code-tokens [SEP], with the input
and code regions truncated separately to their budgets. Sub-tokens of one
variable occurrence all carry that occurrence's labels; MLM masking touches
only code-region positions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .labels import LabeledSample, MASK_MARKER
from .quantize import BIN_IDS, DATA_TYPE_IDS, VALUE_TYPE_IDS
from .rng import sample_positions

# region tags
REGION_CLS = 0
REGION_INPUT = 1
REGION_SEP = 2
REGION_CODE = 3
REGION_PAD = 4

NULL_LABEL = -1

MAX_IDENT_PIECE = 8

_TOKEN_RE = re.compile(
    r"\[MASK\]"
    r"|[A-Za-z_][A-Za-z0-9_]*"
    r"|\d+\.\d+"
    r"|\d+"
    r"|<=|>=|==|!=|&&|\|\|"
    r"|\S"
)


def tokenize_with_spans(text: str) -> list[tuple[str, int, int]]:
    """Deterministic split into (token, start, end) triples. Identifiers
    longer than 8 chars split greedily into 8-char pieces."""
    out = []
    for m in _TOKEN_RE.finditer(text):
        tok, start = m.group(0), m.start()
        if tok != MASK_MARKER and len(tok) > MAX_IDENT_PIECE and (tok[0].isalpha() or tok[0] == "_"):
            for i in range(0, len(tok), MAX_IDENT_PIECE):
                piece = tok[i : i + MAX_IDENT_PIECE]
                out.append((piece, start + i, start + i + len(piece)))
        else:
            out.append((tok, start, start + len(tok)))
    return out


def tokenize(text: str) -> list[str]:
    return [tok for tok, _, _ in tokenize_with_spans(text)]


@dataclass
class Vocabulary:
    token_to_id: dict[str, int]
    id_to_token: list[str]

    CLS = 0
    SEP = 1
    MASK = 2
    PAD = 3
    UNK = 4
    SPECIALS = ("[CLS]", "[SEP]", "[MASK]", "[PAD]", "[UNK]")

    @classmethod
    def build(cls, tokens) -> "Vocabulary":
        id_to_token = list(cls.SPECIALS)
        seen = set(cls.SPECIALS)
        for tok in sorted(set(tokens)):
            if tok not in seen:
                id_to_token.append(tok)
                seen.add(tok)
        return cls({t: i for i, t in enumerate(id_to_token)}, id_to_token)

    def encode(self, token: str) -> int:
        return self.token_to_id.get(token, self.UNK)

    def decode(self, token_id: int) -> str:
        return self.id_to_token[token_id]

    def __len__(self) -> int:
        return len(self.id_to_token)

    def to_dict(self) -> dict:
        return {"tokens": self.id_to_token, "specials": {
            "cls": self.CLS, "sep": self.SEP, "mask": self.MASK,
            "pad": self.PAD, "unk": self.UNK,
        }}

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        id_to_token = list(data["tokens"])
        return cls({t: i for i, t in enumerate(id_to_token)}, id_to_token)


@dataclass
class BudgetConfig:
    input_budget: int = 64
    code_budget: int = 960
    pad_to: int | None = None


@dataclass
class AssembledSequence:
    token_ids: list[int]
    region_tags: list[int]
    # occurrence index -> [start, end) token range within the full sequence
    alignment: dict[int, tuple[int, int]]
    dtype_ids: list[int]
    vtype_ids: list[int]
    bin_ids: list[int]
    cov_ids: list[int]
    mask_positions: list[int] = field(default_factory=list)  # branch markers

    def code_region_positions(self) -> list[int]:
        return [i for i, tag in enumerate(self.region_tags) if tag == REGION_CODE]


def assemble(
    exec_input_text: str,
    code_text: str,
    sample: LabeledSample,
    vocab: Vocabulary,
    budgets: BudgetConfig = BudgetConfig(),
    occ_spans: list[tuple[int, int]] | None = None,
    marker_offsets: list[int] | None = None,
) -> AssembledSequence:
    """Build the model input sequence for one sample.

    ``occ_spans`` overrides the spans of ``sample.occurrences`` (used when
    ``code_text`` is the branch-annotated rewrite and spans were shifted);
    ``marker_offsets`` locates inserted branch markers within ``code_text``.
    """
    input_tokens = tokenize_with_spans(exec_input_text)[: budgets.input_budget]
    code_tokens = tokenize_with_spans(code_text)[: budgets.code_budget]

    token_ids = [Vocabulary.CLS]
    region_tags = [REGION_CLS]
    for tok, _, _ in input_tokens:
        token_ids.append(vocab.encode(tok))
        region_tags.append(REGION_INPUT)
    token_ids.extend([Vocabulary.SEP, Vocabulary.SEP])
    region_tags.extend([REGION_SEP, REGION_SEP])
    code_base = len(token_ids)
    for tok, _, _ in code_tokens:
        token_ids.append(Vocabulary.MASK if tok == MASK_MARKER else vocab.encode(tok))
        region_tags.append(REGION_CODE)
    token_ids.append(Vocabulary.SEP)
    region_tags.append(REGION_SEP)

    if budgets.pad_to is not None:
        while len(token_ids) < budgets.pad_to:
            token_ids.append(Vocabulary.PAD)
            region_tags.append(REGION_PAD)

    n = len(token_ids)
    dtype_ids = [NULL_LABEL] * n
    vtype_ids = [NULL_LABEL] * n
    bin_ids = [NULL_LABEL] * n
    cov_ids = [NULL_LABEL] * n

    # map char offsets in code_text to surviving token indices
    spans = occ_spans if occ_spans is not None else [occ.span for occ in sample.occurrences]
    alignment: dict[int, tuple[int, int]] = {}
    for occ_idx, (start, end) in enumerate(spans):
        tok_range = _covering_tokens(code_tokens, start, end)
        if tok_range is None:
            continue
        lo, hi = tok_range
        alignment[occ_idx] = (code_base + lo, code_base + hi)
        label = sample.labels[occ_idx]
        d = DATA_TYPE_IDS[label.state.data_type]
        v = VALUE_TYPE_IDS[label.state.value_type]
        b = BIN_IDS[label.state.bin]
        c = 1 if label.coverage == "Yes" else 0
        for pos in range(code_base + lo, code_base + hi):
            dtype_ids[pos] = d
            vtype_ids[pos] = v
            bin_ids[pos] = b
            cov_ids[pos] = c

    mask_positions = []
    if marker_offsets:
        by_offset = {start: i for i, (tok, start, _) in enumerate(code_tokens) if tok == MASK_MARKER}
        for off in marker_offsets:
            if off in by_offset:
                mask_positions.append(code_base + by_offset[off])

    return AssembledSequence(
        token_ids=token_ids,
        region_tags=region_tags,
        alignment=alignment,
        dtype_ids=dtype_ids,
        vtype_ids=vtype_ids,
        bin_ids=bin_ids,
        cov_ids=cov_ids,
        mask_positions=mask_positions,
    )


def _covering_tokens(code_tokens, start: int, end: int) -> tuple[int, int] | None:
    lo = None
    hi = None
    for i, (_, s, e) in enumerate(code_tokens):
        if s >= start and e <= end:
            if lo is None:
                lo = i
            hi = i + 1
        elif lo is not None:
            break
    if lo is None:
        return None
    return lo, hi


def mask_for_mlm(
    seq: AssembledSequence, rate: float, seed: int
) -> tuple[list[int], dict[int, int]]:
    """Replace floor(rate * |code region|) code-region tokens with the MASK
    id. Returns (masked token ids, {position: original id}). Special ids
    (inserted branch markers) are never chosen; the input region and special
    positions are untouched."""
    if not 0 < rate < 1:
        raise ValueError("rate must be in (0, 1)")
    code_positions = seq.code_region_positions()
    candidates = [p for p in code_positions if seq.token_ids[p] > Vocabulary.PAD]
    count = min(int(rate * len(code_positions)), len(candidates))
    chosen = sample_positions(len(candidates), count, seed)
    masked = list(seq.token_ids)
    targets: dict[int, int] = {}
    for idx in chosen:
        pos = candidates[idx]
        targets[pos] = masked[pos]
        masked[pos] = Vocabulary.MASK
    return masked, targets
