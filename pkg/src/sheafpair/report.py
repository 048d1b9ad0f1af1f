from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    where: tuple = ()

    def to_json(self) -> dict:
        return {"kind": self.kind, "message": self.message, "where": list(self.where)}


@dataclass
class Report:
    """Outcome of a validation: truthy iff there are no violations."""

    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, kind: str, message: str, *where) -> None:
        self.violations.append(Violation(kind, message, tuple(where)))

    def extend(self, other: "Report") -> None:
        self.violations.extend(other.violations)

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}
