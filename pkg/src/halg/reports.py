"""Report containers shared by the certifiers and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class RelationReport:
    """Outcome of a bucketed relation check (square-zero and friends).

    ``buckets`` maps (arity, hbar_order) to the list of residual records for
    that bucket; a record is (input_word, output_word, coefficient_string).
    Buckets with empty lists were checked and found clean; the dict always
    carries every checked bucket so reports enumerate what was verified.
    """

    kind: str
    flavor: str
    truncation: dict
    buckets: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(not entries for entries in self.buckets.values())

    @property
    def first_failure(self):
        for key in sorted(self.buckets):
            if self.buckets[key]:
                return key
        return None

    def failing_buckets(self):
        return [k for k in sorted(self.buckets) if self.buckets[k]]

    def residual_count(self):
        return sum(len(v) for v in self.buckets.values())

    def lines(self):
        """Stable per-bucket text lines: one per bucket, residuals inline."""
        out = []
        for key in sorted(self.buckets):
            entries = self.buckets[key]
            arity, hbar = key
            status = "ok" if not entries else f"residual:{len(entries)}"
            line = f"bucket arity={arity} hbar={hbar} {status}"
            for in_w, out_w, coeff in entries:
                line += f" [{'|'.join(in_w)}]->[{'|'.join(out_w)}]={coeff}"
            out.append(line)
        return out

    def merge(self, other):
        for key, entries in other.buckets.items():
            self.buckets.setdefault(key, []).extend(entries)
        return self
