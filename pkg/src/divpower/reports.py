"""Pass/fail bookkeeping shared by the axiom checkers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Counts per named check plus the first witness of each failure."""

    subject: str = ""
    passes: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    counterexamples: dict = field(default_factory=dict)

    def ensure(self, *names: str) -> "CheckReport":
        for name in names:
            self.passes.setdefault(name, 0)
            self.failures.setdefault(name, 0)
        return self

    def record(self, name: str, good: bool, witness=None) -> bool:
        """Count one check; ``witness`` may be a zero-argument callable."""
        self.ensure(name)
        if good:
            self.passes[name] += 1
        else:
            self.failures[name] += 1
            if name not in self.counterexamples:
                # witnesses may be passed lazily to keep passing checks cheap
                if callable(witness):
                    witness = witness()
                self.counterexamples[name] = witness if witness is not None else ""
        return good

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.failures.items() if v]

    def merge(self, other: "CheckReport", prefix: str = "") -> "CheckReport":
        for name in other.passes:
            key = prefix + name
            self.ensure(key)
            self.passes[key] += other.passes[name]
            self.failures[key] += other.failures[name]
            if name in other.counterexamples:
                self.counterexamples.setdefault(key, other.counterexamples[name])
        return self

    def to_dict(self) -> dict:
        return {"subject": self.subject, "ok": self.ok, "passes": dict(self.passes),
                "failures": dict(self.failures),
                "counterexamples": {k: str(v) for k, v in self.counterexamples.items()}}

    def summary(self) -> str:
        status = "pass" if self.ok else "FAIL " + ", ".join(self.failed())
        total = sum(self.passes.values()) + sum(self.failures.values())
        return f"{self.subject or 'check'}: {status} ({total} checks)"
