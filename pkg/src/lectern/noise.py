"""Controlled word-error injection, standing in for a speech recognizer.

Errors are token-i.i.d.: each reference token is substituted or deleted with
its configured probability, and a random token is inserted after each
position with the insertion probability. Substitutions and insertions draw
uniformly from a confusion vocabulary (substitutions never reproduce the
original token). All randomness is fixed by the seed, mixed with a stable
per-lecture hash so lectures can be corrupted independently and in any
order.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass

import numpy as np

from .evaluation import (
    REFERENCE_VARIANT,
    TestCollection,
    lecture_tokens,
    recall_precision_f,
    word_error_rate,
)
from .retrieval import DEFAULT_POOL_SIZE, ScoringParams, build_index, query_top_n
from .segmentation import DEFAULT_N_MAX, SpeechUnit, TimedToken, generate_passages
from .tokenizer import TokenizerConfig


@dataclass(frozen=True)
class NoiseSpec:
    sub_rate: float = 0.0
    del_rate: float = 0.0
    ins_rate: float = 0.0
    seed: int = 0
    confusion_vocab: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for name, rate in (
            ("sub_rate", self.sub_rate),
            ("del_rate", self.del_rate),
            ("ins_rate", self.ins_rate),
        ):
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.sub_rate + self.del_rate + self.ins_rate > 1.0:
            raise ValueError("error rates must sum to at most 1")
        if not isinstance(self.confusion_vocab, tuple):
            object.__setattr__(self, "confusion_vocab", tuple(self.confusion_vocab))
        if self.sub_rate + self.ins_rate > 0 and not self.confusion_vocab:
            raise ValueError("confusion_vocab required for substitutions/insertions")


def _lecture_rng(seed: int, lecture_id: str) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([seed, zlib.crc32(lecture_id.encode("utf-8"))])
    )


def corrupt_transcript(units: list[SpeechUnit], spec: NoiseSpec) -> list[SpeechUnit]:
    """Apply the noise spec to every unit, preserving unit ids and stamps.

    Substitutions and deletions are decided per token first; insertions then
    go only between two untouched tokens, at a probability compensated by
    (1-sub_rate-del_rate)^2 so the expected insertion count stays at
    ins_rate per token. An insertion whose path to a deletion runs only
    through corrupted tokens collapses with it into substitutions under
    minimum-cost alignment, deflating the injected error rate; an untouched
    flanking token pins the alignment. When ins_rate exceeds the square of
    the untouched probability, the effective rate caps there (noted for
    extreme rate mixes only).

    Surviving tokens keep their timestamps; inserted tokens get zero-width
    stamps at the preceding token's end. A unit is never fully emptied: if
    every token would be deleted, its first reference token is kept so unit
    alignment with relevance judgments survives corruption.
    """
    rngs: dict[str, np.random.Generator] = {}
    out: list[SpeechUnit] = []
    vocab = spec.confusion_vocab
    untouched = 1.0 - spec.sub_rate - spec.del_rate
    ins_eff = (
        min(spec.ins_rate / (untouched * untouched), 1.0) if untouched > 0 else 0.0
    )
    for unit in units:
        rng = rngs.get(unit.lecture_id)
        if rng is None:
            rng = rngs[unit.lecture_id] = _lecture_rng(spec.seed, unit.lecture_id)
        surfaces: list[str | None] = []  # None marks a deletion
        for tok in unit.tokens:
            op = rng.random()
            if op < spec.sub_rate:
                choices = [t for t in vocab if t != tok.surface]
                if choices:
                    surfaces.append(choices[rng.integers(len(choices))])
                else:
                    surfaces.append(tok.surface)
            elif op < spec.sub_rate + spec.del_rate:
                surfaces.append(None)
            else:
                surfaces.append(tok.surface)
        tokens: list[TimedToken] = []
        n = len(unit.tokens)
        for i, tok in enumerate(unit.tokens):
            if surfaces[i] is None:
                continue
            tokens.append(TimedToken(surfaces[i], tok.start_ms, tok.end_ms))
            kept_here = surfaces[i] == tok.surface
            kept_next = i + 1 == n or surfaces[i + 1] == unit.tokens[i + 1].surface
            if kept_here and kept_next and rng.random() < ins_eff:
                surface = vocab[rng.integers(len(vocab))]
                tokens.append(TimedToken(surface, tok.end_ms, tok.end_ms))
        if not tokens:
            tokens.append(unit.tokens[0])
        out.append(SpeechUnit(unit.unit_id, unit.lecture_id, tuple(tokens)))
    return out


def rates_for_target(target_wer: float) -> tuple[float, float, float]:
    """Split a target WER into (sub, del, ins) rates, half to substitutions."""
    return 0.5 * target_wer, 0.25 * target_wer, 0.25 * target_wer


@dataclass
class SweepCell:
    mean_f: float
    f_ratio: float  # mean_f / clean mean_f (1.0 when clean F is 0)


@dataclass
class RobustnessReport:
    targets: list[float]
    query_sets: list[str]
    top_n: int
    n_seeds: int
    cells: dict[tuple[str, float], SweepCell]  # (query_set, target) -> cell
    measured_wer: dict[float, float]  # target -> mean measured WER

    def to_json(self) -> str:
        return json.dumps(
            {
                "targets": self.targets,
                "query_sets": self.query_sets,
                "top_n": self.top_n,
                "n_seeds": self.n_seeds,
                "cells": {
                    f"{qs}@{t}": {"mean_f": c.mean_f, "f_ratio": c.f_ratio}
                    for (qs, t), c in self.cells.items()
                },
                "measured_wer": {str(t): w for t, w in self.measured_wer.items()},
            },
            indent=2,
        )

    def render_table(self) -> str:
        lines = ["target    measured  " + "".join(qs.ljust(20) for qs in self.query_sets)]
        for t in self.targets:
            row = f"{t:<10.2f}{self.measured_wer[t]:<10.3f}"
            for qs in self.query_sets:
                c = self.cells[(qs, t)]
                row += f"F={c.mean_f:.3f} ({c.f_ratio:.2f})  "
            lines.append(row)
        return "\n".join(lines) + "\n"


def wer_sweep(
    collection: TestCollection,
    wer_targets: list[float],
    query_sets: dict[str, dict[str, str]],
    seed: int = 0,
    n_seeds: int = 5,
    top_n: int = 3,
    n_max: int = DEFAULT_N_MAX,
    params: ScoringParams | None = None,
    tokenizer: TokenizerConfig | None = None,
    pool_size: int = DEFAULT_POOL_SIZE,
    confusion_vocab: tuple[str, ...] | None = None,
) -> RobustnessReport:
    """Measure retrieval F against injected error rate for each query set.

    For every target WER and seed, reference transcripts are corrupted,
    indexed, and queried; F is averaged over queries and seeds. A clean
    (target 0) baseline is always included. The confusion vocabulary
    defaults to all surface forms of the collection's reference transcripts.
    """
    collection.validate()
    targets = sorted(set(wer_targets) | {0.0})
    if confusion_vocab is None:
        seen: dict[str, None] = {}
        for variants in collection.lectures.values():
            for tok in lecture_tokens(variants[REFERENCE_VARIANT]):
                seen.setdefault(tok)
        confusion_vocab = tuple(seen)

    queries_by_lecture: dict[str, dict[str, list[str]]] = {}
    for set_name, queries in query_sets.items():
        for qid in queries:
            lec = collection.query_lecture(qid)
            queries_by_lecture.setdefault(lec, {}).setdefault(set_name, []).append(qid)

    f_sums: dict[tuple[str, float], float] = {
        (qs, t): 0.0 for qs in query_sets for t in targets
    }
    f_counts: dict[tuple[str, float], int] = dict.fromkeys(f_sums, 0)
    wer_sums: dict[float, float] = dict.fromkeys(targets, 0.0)
    wer_counts: dict[float, int] = dict.fromkeys(targets, 0)

    for t_idx, target in enumerate(targets):
        sub, dele, ins = rates_for_target(target)
        for rep in range(n_seeds):
            run_seed = int(
                np.random.SeedSequence([seed, rep, t_idx]).generate_state(1)[0]
            )
            for lec, variants in collection.lectures.items():
                ref_units = variants[REFERENCE_VARIANT]
                if target == 0.0:
                    units = ref_units
                else:
                    spec = NoiseSpec(sub, dele, ins, run_seed, confusion_vocab)
                    units = corrupt_transcript(ref_units, spec)
                wer_sums[target] += word_error_rate(
                    lecture_tokens(ref_units), lecture_tokens(units)
                )
                wer_counts[target] += 1
                index = build_index(
                    generate_passages(units, n_max, tokenizer), params, tokenizer
                )
                for set_name, qids in queries_by_lecture.get(lec, {}).items():
                    for qid in qids:
                        groups = query_top_n(
                            index, query_sets[set_name][qid], top_n, pool_size
                        )
                        _, _, f = recall_precision_f(
                            groups, collection.qrels.for_query(qid)
                        )
                        f_sums[(set_name, target)] += f
                        f_counts[(set_name, target)] += 1
            if target == 0.0:
                break  # the clean baseline is deterministic

    cells: dict[tuple[str, float], SweepCell] = {}
    for qs in query_sets:
        clean = f_sums[(qs, 0.0)] / max(f_counts[(qs, 0.0)], 1)
        for t in targets:
            mean_f = f_sums[(qs, t)] / max(f_counts[(qs, t)], 1)
            ratio = mean_f / clean if clean > 0 else 1.0
            cells[(qs, t)] = SweepCell(mean_f, ratio)
    measured = {t: wer_sums[t] / max(wer_counts[t], 1) for t in targets}
    return RobustnessReport(
        targets=targets,
        query_sets=sorted(query_sets),
        top_n=top_n,
        n_seeds=n_seeds,
        cells=cells,
        measured_wer=measured,
    )
