"""Result container shared by the oracle, the pivot search and the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

REACHABLE = "reachable"
UNREACHABLE = "unreachable"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Stats:
    explored: int = 0
    iterations: int = 0
    millis: int = 0


@dataclass(frozen=True)
class Verdict:
    """Outcome of a reachability query.

    witness holds printable labels and is present exactly when reachable;
    closed records whether the exploration provably covered the whole
    space (always true for the exact backends).
    """

    outcome: str
    witness: tuple[str, ...] | None = None
    stats: Stats = field(default_factory=Stats)
    closed: bool = True

    def __post_init__(self) -> None:
        assert (self.outcome == REACHABLE) == (self.witness is not None)

    @property
    def conclusive(self) -> bool:
        return self.outcome in (REACHABLE, UNREACHABLE)

    def exit_code(self) -> int:
        return {REACHABLE: 0, UNREACHABLE: 1, INCONCLUSIVE: 2}[self.outcome]

    def report(self, include_millis: bool = True) -> str:
        lines = [f"verdict: {self.outcome}"]
        if self.witness is not None:
            lines.append("witness:")
            lines += [f"  {step}" for step in self.witness]
        lines.append("stats:")
        lines.append(f"  explored: {self.stats.explored}")
        lines.append(f"  iterations: {self.stats.iterations}")
        if include_millis:
            lines.append(f"  millis: {self.stats.millis}")
        return "\n".join(lines) + "\n"
