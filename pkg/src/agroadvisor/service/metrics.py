"""Tiny in-process metrics registry with a text exposition format."""

from __future__ import annotations

import threading

LATENCY_BUCKETS_MS = (5.0, 10.0, 25.0, 50.0, 100.0, 250.0, 500.0, 1000.0)


class Metrics:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.queries_total = 0
        self.grounding_flags_total = 0
        self._latency_counts = [0] * (len(LATENCY_BUCKETS_MS) + 1)
        self._latency_sum_ms = 0.0
        self._latency_n = 0

    def inc_queries(self) -> None:
        with self._lock:
            self.queries_total += 1

    def add_grounding_flags(self, n: int) -> None:
        with self._lock:
            self.grounding_flags_total += n

    def observe_retrieval_ms(self, ms: float) -> None:
        with self._lock:
            for i, edge in enumerate(LATENCY_BUCKETS_MS):
                if ms <= edge:
                    self._latency_counts[i] += 1
                    break
            else:
                self._latency_counts[-1] += 1
            self._latency_sum_ms += ms
            self._latency_n += 1

    def render(self) -> str:
        with self._lock:
            lines = [
                f"queries_total {self.queries_total}",
                f"grounding_flags_total {self.grounding_flags_total}",
            ]
            cumulative = 0
            for edge, count in zip(LATENCY_BUCKETS_MS, self._latency_counts):
                cumulative += count
                lines.append(f'retrieval_latency_ms_bucket{{le="{edge:g}"}} {cumulative}')
            cumulative += self._latency_counts[-1]
            lines.append(f'retrieval_latency_ms_bucket{{le="+Inf"}} {cumulative}')
            lines.append(f"retrieval_latency_ms_count {self._latency_n}")
            lines.append(f"retrieval_latency_ms_sum {self._latency_sum_ms:.3f}")
            return "\n".join(lines) + "\n"
