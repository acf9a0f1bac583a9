"""Campaign reports shared by the randomized verifiers."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable


@dataclass
class VerifyReport:
    name: str
    params: dict
    seeds: int
    seed_pass: list[bool]
    records: list[dict]
    threshold: float = 19 / 20
    extra: dict = field(default_factory=dict)

    @property
    def pass_rate(self) -> float:
        return sum(self.seed_pass) / len(self.seed_pass) if self.seed_pass else 1.0

    @property
    def ok(self) -> bool:
        return self.pass_rate >= self.threshold - 1e-12

    @property
    def failures(self) -> list[dict]:
        return [r for r in self.records if r.get("pass") is False and r.get("hypothesis_ok", True)]

    def to_dict(self) -> dict:
        return {
            "verifier": self.name,
            "params": self.params,
            "seeds": self.seeds,
            "seed_pass": self.seed_pass,
            "pass_rate": self.pass_rate,
            "threshold": self.threshold,
            "pass": self.ok,
            "failures": self.failures,
            "records": self.records,
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def seed_list(seeds: int | Iterable[int], base: int = 0) -> list[int]:
    if isinstance(seeds, int):
        return [base + s for s in range(seeds)]
    return list(seeds)
