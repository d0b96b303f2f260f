"""Discrete first-order HMM: supervised counting/training, Viterbi decoding, config files.

Decoding runs in log space; a zero probability is ``-inf``. Raw trellis
maxima are reported alongside but may underflow on long alert streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import NoAdmissiblePathError, ParseError, UnknownSymbolError, ValidationError

ROW_TOL = 1e-9


def _as_matrix(values, shape: tuple[int, ...], name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.shape != shape:
        raise ValidationError(f"{name} has shape {arr.shape}, expected {shape}")
    arr.setflags(write=False)
    return arr


def _check_stochastic(arr: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValidationError(f"{name} entries must lie in [0, 1]")
    sums = arr.sum(axis=-1)
    bad = np.flatnonzero(np.abs(np.atleast_1d(sums) - 1.0) > ROW_TOL)
    if bad.size:
        where = f" row {bad[0] + 1}" if arr.ndim == 2 else ""
        raise ValidationError(f"{name}{where} sums to {np.atleast_1d(sums)[bad[0]]!r}, not 1")


@dataclass(frozen=True, eq=False)
class HmmModel:
    """The tuple (alphabet, states, transition, emission, initial)."""

    states: tuple[str, ...]
    symbols: tuple[str, ...]
    transition: np.ndarray
    emission: np.ndarray
    initial: np.ndarray

    def __post_init__(self) -> None:
        states, symbols = tuple(self.states), tuple(self.symbols)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "symbols", symbols)
        n, m = len(states), len(symbols)
        if n < 1 or m < 1:
            raise ValidationError("an HMM needs at least one state and one symbol")
        if len(set(states)) != n or len(set(symbols)) != m:
            raise ValidationError("state and symbol names must be unique")
        object.__setattr__(self, "transition", _as_matrix(self.transition, (n, n), "T"))
        object.__setattr__(self, "emission", _as_matrix(self.emission, (n, m), "E"))
        object.__setattr__(self, "initial", _as_matrix(self.initial, (n,), "PI"))
        _check_stochastic(self.transition, "T")
        _check_stochastic(self.emission, "E")
        _check_stochastic(self.initial, "PI")

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_symbols(self) -> int:
        return len(self.symbols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HmmModel):
            return NotImplemented
        return (
            self.states == other.states
            and self.symbols == other.symbols
            and np.array_equal(self.transition, other.transition)
            and np.array_equal(self.emission, other.emission)
            and np.array_equal(self.initial, other.initial)
        )

    __hash__ = None  # type: ignore[assignment]

    def state_index(self, names: Iterable[str]) -> list[int]:
        lookup = {s: i for i, s in enumerate(self.states)}
        try:
            return [lookup[s] for s in names]
        except KeyError as exc:
            raise UnknownSymbolError(f"unknown state {exc.args[0]!r}") from None

    def symbol_index(self, names: Iterable[str]) -> list[int]:
        lookup = {s: i for i, s in enumerate(self.symbols)}
        try:
            return [lookup[h] for h in names]
        except KeyError as exc:
            raise UnknownSymbolError(f"unknown alert symbol {exc.args[0]!r}") from None

    def permuted(self, order: Sequence[int]) -> HmmModel:
        """Same model with states listed as ``[states[i] for i in order]``."""
        idx = np.asarray(order)
        return HmmModel(
            tuple(self.states[i] for i in idx),
            self.symbols,
            self.transition[np.ix_(idx, idx)],
            self.emission[idx],
            self.initial[idx],
        )


@dataclass(frozen=True)
class TrainingCorpus:
    states: tuple[str, ...]
    symbols: tuple[str, ...]
    sequences: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    provenance: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        known_s, known_h = set(self.states), set(self.symbols)
        for i, (qs, hs) in enumerate(self.sequences):
            if len(qs) != len(hs):
                raise ValidationError(f"sequence {i}: {len(qs)} states but {len(hs)} symbols")
            if not qs:
                raise ValidationError(f"sequence {i} is empty")
            for q in qs:
                if q not in known_s:
                    raise UnknownSymbolError(f"sequence {i}: unknown state {q!r}")
            for h in hs:
                if h not in known_h:
                    raise UnknownSymbolError(f"sequence {i}: unknown symbol {h!r}")


@dataclass(frozen=True, eq=False)
class CountTables:
    states: tuple[str, ...]
    symbols: tuple[str, ...]
    transition: np.ndarray
    emission: np.ndarray
    initial: np.ndarray

    def __add__(self, other: CountTables) -> CountTables:
        if (self.states, self.symbols) != (other.states, other.symbols):
            raise ValidationError("count tables over different alphabets")
        return CountTables(
            self.states, self.symbols, self.transition + other.transition,
            self.emission + other.emission, self.initial + other.initial,
        )


@dataclass(frozen=True)
class DecodedPath:
    states: tuple[str, ...]
    log_deltas: tuple[float, ...]
    observations: tuple[str, ...]
    log_likelihood: float = field(default=float("nan"))

    @property
    def deltas(self) -> tuple[float, ...]:
        return tuple(math.exp(x) for x in self.log_deltas)

    def __len__(self) -> int:
        return len(self.states)


def count_corpus(corpus: TrainingCorpus) -> CountTables:
    n, m = len(corpus.states), len(corpus.symbols)
    s_idx = {s: i for i, s in enumerate(corpus.states)}
    h_idx = {h: i for i, h in enumerate(corpus.symbols)}
    trans = np.zeros((n, n), dtype=np.int64)
    emit = np.zeros((n, m), dtype=np.int64)
    init = np.zeros(n, dtype=np.int64)
    for qs, hs in corpus.sequences:
        qi = [s_idx[q] for q in qs]
        init[qi[0]] += 1
        for a, b in zip(qi, qi[1:]):
            trans[a, b] += 1
        for q, h in zip(qi, hs):
            emit[q, h_idx[h]] += 1
    return CountTables(corpus.states, corpus.symbols, trans, emit, init)


def _normalize(counts: np.ndarray, kappa: float) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64) + kappa
    totals = counts.sum(axis=-1, keepdims=True)
    width = counts.shape[-1]
    safe = np.where(totals > 0, totals, 1.0)
    return np.where(totals > 0, counts / safe, 1.0 / width)


def train(counts: CountTables, kappa: float = 0.0) -> HmmModel:
    """Maximum-likelihood estimates from supervised counts with additive smoothing ``kappa``.

    Rows with no observations (and ``kappa == 0``) become uniform.
    """
    if not kappa >= 0:
        raise ValidationError(f"smoothing must be non-negative, got {kappa!r}")
    return HmmModel(
        counts.states,
        counts.symbols,
        _normalize(counts.transition, kappa),
        _normalize(counts.emission, kappa),
        _normalize(counts.initial, kappa),
    )


def _log(arr: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(arr)


def viterbi(model: HmmModel, alerts: Sequence[str]) -> DecodedPath:
    """Most likely hidden state sequence for ``alerts``; ties go to the lowest state index."""
    if len(alerts) == 0:
        raise ValidationError("cannot decode an empty alert sequence")
    obs = model.symbol_index(alerts)
    log_t = _log(model.transition)
    log_e = _log(model.emission)
    delta = _log(model.initial) + log_e[:, obs[0]]
    k = len(obs)
    back = np.zeros((k, model.n_states), dtype=np.int64)
    best = [float(delta.max())]
    for t in range(1, k):
        scores = delta[:, None] + log_t
        back[t] = np.argmax(scores, axis=0)
        delta = scores[back[t], np.arange(model.n_states)] + log_e[:, obs[t]]
        best.append(float(delta.max()))
    if best[-1] == -math.inf:
        raise NoAdmissiblePathError(f"no admissible state path for alerts {tuple(alerts)!r}")
    path = [int(np.argmax(delta))]
    for t in range(k - 1, 0, -1):
        path.append(int(back[t, path[-1]]))
    path.reverse()
    return DecodedPath(
        tuple(model.states[i] for i in path), tuple(best), tuple(alerts), best[-1]
    )


def log_sequence_likelihood(model: HmmModel, alerts: Sequence[str], states: Sequence[str]) -> float:
    if len(alerts) != len(states):
        raise ValidationError(f"{len(alerts)} alerts but {len(states)} states")
    if not alerts:
        raise ValidationError("empty sequence")
    q = model.state_index(states)
    h = model.symbol_index(alerts)
    factors = [model.initial[q[0]]]
    for t in range(len(q)):
        factors.append(model.emission[q[t], h[t]])
        if t + 1 < len(q):
            factors.append(model.transition[q[t], q[t + 1]])
    if any(f == 0 for f in factors):
        return -math.inf
    return math.fsum(math.log(f) for f in factors)


def sequence_likelihood(model: HmmModel, alerts: Sequence[str], states: Sequence[str]) -> float:
    """Joint probability P(alerts, states | model)."""
    if len(alerts) != len(states):
        raise ValidationError(f"{len(alerts)} alerts but {len(states)} states")
    if not alerts:
        raise ValidationError("empty sequence")
    q = model.state_index(states)
    h = model.symbol_index(alerts)
    p = float(model.initial[q[0]]) * float(model.emission[q[0], h[0]])
    for t in range(1, len(q)):
        p *= float(model.transition[q[t - 1], q[t]]) * float(model.emission[q[t], h[t]])
    return p


def predict_next(model: HmmModel, path: DecodedPath) -> str:
    """Most likely successor of the last decoded state."""
    last = model.state_index([path.states[-1]])[0]
    return model.states[int(np.argmax(model.transition[last]))]


def sample(model: HmmModel, length: int, rng: np.random.Generator) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Draw one (states, symbols) sequence of the given length."""
    n, m = model.n_states, model.n_symbols
    q = [int(rng.choice(n, p=model.initial))]
    for _ in range(length - 1):
        q.append(int(rng.choice(n, p=model.transition[q[-1]])))
    h = [int(rng.choice(m, p=model.emission[s])) for s in q]
    return tuple(model.states[i] for i in q), tuple(model.symbols[i] for i in h)


# ------------------------------------------------------------ file formats

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_model(model: HmmModel) -> str:
    """HMM configuration text: header then T, E and PI blocks, row-major."""
    lines = [
        "# HMM configuration",
        f"N {model.n_states}",
        f"M {model.n_symbols}",
        "states " + " ".join(model.states),
        "symbols " + " ".join(model.symbols),
        "T",
    ]
    lines += [" ".join(_fmt(x) for x in row) for row in model.transition]
    lines.append("E")
    lines += [" ".join(_fmt(x) for x in row) for row in model.emission]
    lines.append("PI")
    lines.append(" ".join(_fmt(x) for x in model.initial))
    return "\n".join(lines) + "\n"


def load_model(text: str, source: str = "") -> HmmModel:
    rows = [
        (i, line.split("#", 1)[0].split())
        for i, line in enumerate(text.splitlines(), start=1)
    ]
    rows = [(i, toks) for i, toks in rows if toks]
    header: dict[str, tuple[int, list[str]]] = {}
    blocks: dict[str, list[tuple[int, list[str]]]] = {}
    current = None
    for lineno, toks in rows:
        key = toks[0]
        if key in ("N", "M", "states", "symbols"):
            if current is not None:
                raise ParseError(f"header field {key!r} after matrix data", lineno, 1, source)
            if key in header:
                raise ParseError(f"duplicate header field {key!r}", lineno, 1, source)
            header[key] = (lineno, toks[1:])
        elif key in ("T", "E", "PI") and len(toks) == 1:
            if key in blocks:
                raise ParseError(f"duplicate block {key!r}", lineno, 1, source)
            current = key
            blocks[key] = []
        elif current is None:
            raise ParseError(f"unexpected line starting with {key!r}", lineno, 1, source)
        else:
            blocks[current].append((lineno, toks))
    for key in ("N", "M", "states", "symbols"):
        if key not in header:
            raise ParseError(f"missing header field {key!r}", 1, 1, source)
    for key in ("T", "E", "PI"):
        if key not in blocks:
            raise ParseError(f"missing matrix block {key!r}", 1, 1, source)

    def count(key: str) -> int:
        lineno, vals = header[key]
        if len(vals) != 1 or not vals[0].isdigit():
            raise ParseError(f"{key} must be a single non-negative integer", lineno, 1, source)
        return int(vals[0])

    n, m = count("N"), count("M")
    states, symbols = header["states"][1], header["symbols"][1]
    if len(states) != n:
        raise ParseError(f"N={n} but {len(states)} state names", header["states"][0], 1, source)
    if len(symbols) != m:
        raise ParseError(f"M={m} but {len(symbols)} symbol names", header["symbols"][0], 1, source)

    def matrix(key: str, n_rows: int, n_cols: int) -> np.ndarray:
        data = blocks[key]
        if len(data) != n_rows:
            line = data[-1][0] if data else 1
            raise ParseError(f"block {key} has {len(data)} rows, expected {n_rows}", line, 1, source)
        out = np.empty((n_rows, n_cols))
        for r, (lineno, toks) in enumerate(data):
            if len(toks) != n_cols:
                raise ParseError(f"block {key} row has {len(toks)} values, expected {n_cols}", lineno, 1, source)
            try:
                out[r] = [float(x) for x in toks]
            except ValueError:
                raise ParseError(f"non-numeric value in block {key}", lineno, 1, source) from None
        return out

    t = matrix("T", n, n)
    e = matrix("E", n, m)
    pi = matrix("PI", 1, n)[0]
    return HmmModel(tuple(states), tuple(symbols), t, e, pi)


def load_corpus(text: str, source: str = "", states: Sequence[str] | None = None,
                symbols: Sequence[str] | None = None) -> TrainingCorpus:
    """Parse ``state<TAB>symbol`` records; a blank line ends a sequence.

    Alphabets default to first-appearance order.
    """
    seqs: list[tuple[list[str], list[str]]] = []
    cur: tuple[list[str], list[str]] = ([], [])
    seen_s: dict[str, None] = dict.fromkeys(states or ())
    seen_h: dict[str, None] = dict.fromkeys(symbols or ())
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith("#"):
            continue
        if not line.strip():
            if cur[0]:
                seqs.append(cur)
                cur = ([], [])
            continue
        parts = line.rstrip("\r").split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ParseError("expected 'state<TAB>symbol'", lineno, 1, source)
        q, h = parts
        if states is not None and q not in seen_s:
            raise UnknownSymbolError(f"{source}:{lineno}: unknown state {q!r}")
        if symbols is not None and h not in seen_h:
            raise UnknownSymbolError(f"{source}:{lineno}: unknown symbol {h!r}")
        seen_s.setdefault(q)
        seen_h.setdefault(h)
        cur[0].append(q)
        cur[1].append(h)
    if cur[0]:
        seqs.append(cur)
    return TrainingCorpus(
        tuple(seen_s), tuple(seen_h), tuple((tuple(q), tuple(h)) for q, h in seqs), (source,) if source else ()
    )


def dump_corpus(corpus: TrainingCorpus) -> str:
    blocks = ["".join(f"{q}\t{h}\n" for q, h in zip(qs, hs)) for qs, hs in corpus.sequences]
    return "\n".join(blocks)


def load_alerts(text: str, source: str = "") -> list[str]:
    """Alert log lines ``tick<TAB>category``, returned in tick order."""
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError("expected 'tick<TAB>alert-category'", lineno, 1, source)
        try:
            tick = int(parts[0])
        except ValueError:
            raise ParseError(f"tick {parts[0]!r} is not an integer", lineno, 1, source) from None
        records.append((tick, lineno, parts[1].strip()))
    records.sort(key=lambda r: (r[0], r[1]))
    return [r[2] for r in records]


def dump_alerts(alerts: Sequence[tuple[int, str]]) -> str:
    return "".join(f"{tick}\t{cat}\n" for tick, cat in alerts)


def format_decode(model: HmmModel, path: DecodedPath) -> str:
    lines = ["step\talert\tstate\tlog_delta\tdelta"]
    for i, (h, q, ld, d) in enumerate(zip(path.observations, path.states, path.log_deltas, path.deltas), start=1):
        lines.append(f"{i}\t{h}\t{q}\t{ld:.6f}\t{d:.5f}")
    lines.append(f"next\t-\t{predict_next(model, path)}\t-\t-")
    return "\n".join(lines) + "\n"
