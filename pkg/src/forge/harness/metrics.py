"""Statement-level metrics over evaluation episodes.

Every logged statement is reparsed and run through the concept detector;
percentages are over all statements, except the proven-with-concept rate,
whose denominator is the proven statements (0 when none were proven).
Per-episode breakdowns ride along for cluster resampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..statements.concepts import detect_concepts
from ..statements.parse import parse
from ..marl.env import EpisodeLog


@dataclass(frozen=True)
class EpisodeCounts:
    statements: int = 0
    chi: int = 0
    b0: int = 0
    b1: int = 0
    b2: int = 0
    proven: int = 0
    proven_with_concept: int = 0

    def as_tuple(self) -> tuple:
        return (self.statements, self.chi, self.b0, self.b1, self.b2,
                self.proven, self.proven_with_concept)


@dataclass
class MetricsRow:
    unique_atomics: int
    total_statements: int
    chi_pct: float
    b0_pct: float
    b1_pct: float
    b2_pct: float
    proven_with_concept_pct: float
    per_episode: list[EpisodeCounts] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "unique_atomics": self.unique_atomics,
            "total_statements": self.total_statements,
            "chi_pct": self.chi_pct,
            "b0_pct": self.b0_pct,
            "b1_pct": self.b1_pct,
            "b2_pct": self.b2_pct,
            "proven_with_concept_pct": self.proven_with_concept_pct,
            "per_episode": [list(c.as_tuple()) for c in self.per_episode],
        }


def _pct(hits: int, total: int) -> float:
    return 100.0 * hits / total if total else 0.0


def compute_metrics(logs: list[EpisodeLog], premises,
                    coefficient_mode: str = "integer",
                    proven_threshold: float = 1.0) -> MetricsRow:
    """Concept and provability rates over evaluation logs.

    ``premises`` feeds the concept detector (the allowed substitutions);
    a statement counts as proven when its pre-noise score reaches
    ``proven_threshold``.
    """
    if not logs:
        raise ValueError("compute_metrics needs at least one episode log")
    unique_atoms: set[str] = set()
    per_episode: list[EpisodeCounts] = []
    flag_cache: dict[str, tuple[bool, bool, bool, bool]] = {}
    for log in logs:
        statements = chi = b0 = b1 = b2 = proven = proven_with = 0
        for step in log.steps:
            statements += 1
            unique_atoms.update(step.atoms)
            flags = flag_cache.get(step.statement)
            if flags is None:
                detected = detect_concepts(
                    parse(step.statement), premises, coefficient_mode
                )
                flags = (detected.has_chi, detected.has_b0,
                         detected.has_b1, detected.has_b2)
                flag_cache[step.statement] = flags
            chi += flags[0]
            b0 += flags[1]
            b1 += flags[2]
            b2 += flags[3]
            is_proven = step.rho >= proven_threshold
            proven += is_proven
            proven_with += is_proven and (flags[0] or flags[2])
        per_episode.append(
            EpisodeCounts(statements, chi, b0, b1, b2, proven, proven_with)
        )
    totals = EpisodeCounts(*map(sum, zip(*(c.as_tuple() for c in per_episode))))
    return MetricsRow(
        unique_atomics=len(unique_atoms),
        total_statements=totals.statements,
        chi_pct=_pct(totals.chi, totals.statements),
        b0_pct=_pct(totals.b0, totals.statements),
        b1_pct=_pct(totals.b1, totals.statements),
        b2_pct=_pct(totals.b2, totals.statements),
        proven_with_concept_pct=_pct(totals.proven_with_concept, totals.proven),
        per_episode=per_episode,
    )


def ratio_of_sums(numerator_index: int, denominator_index: int = 0):
    """Statistic factory over EpisodeCounts tuples: 100 * sum/sum."""

    def statistic(episodes) -> float:
        num = den = 0
        for ep in episodes:
            row = ep.as_tuple() if isinstance(ep, EpisodeCounts) else tuple(ep)
            num += row[numerator_index]
            den += row[denominator_index]
        return 100.0 * num / den if den else 0.0

    return statistic
