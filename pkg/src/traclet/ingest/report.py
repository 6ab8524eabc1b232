from __future__ import annotations

from dataclasses import dataclass, field

_MAX_WARNINGS = 1000


@dataclass
class IngestReport:
    """Mutable sink for per-parse bookkeeping (skip counters, warnings)."""

    counters: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def inc(self, key: str, n: int = 1) -> None:
        self.counters[key] = self.counters.get(key, 0) + n

    def warn(self, message: str) -> None:
        if len(self.warnings) < _MAX_WARNINGS:
            self.warnings.append(message)

    def to_dict(self) -> dict:
        return {
            "counters": dict(sorted(self.counters.items())),
            "warnings": list(self.warnings),
        }
