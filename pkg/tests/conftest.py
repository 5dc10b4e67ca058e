import numpy as np
import pytest

from hexaug import EmbeddingDataset


def make_dataset(rng, k=4, d=8, counts=None, spread=1.0, mean_scale=3.0):
    """Random Gaussian-cluster dataset with the given per-class counts."""
    if counts is None:
        counts = [20] * k
    assert len(counts) == k
    means = rng.normal(0.0, mean_scale, size=(k, d))
    chunks, labels = [], []
    for c, nc in enumerate(counts):
        chunks.append(means[c] + spread * rng.standard_normal((nc, d)))
        labels.append(np.full(nc, c, dtype=np.int64))
    vectors = np.concatenate(chunks).astype(np.float32)
    return EmbeddingDataset(vectors, np.concatenate(labels), k)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    seen: dict[str, str] = {}
    for status, reports in terminalreporter.stats.items():
        if status not in ("passed", "failed", "error", "skipped"):
            continue
        for rep in reports:
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            when = getattr(rep, "when", None)
            name = nodeid.split("::")[-1]
            if when == "call":
                if rep.passed:
                    seen.setdefault(name, "PASS")
                elif rep.skipped:
                    seen[name] = "SKIP"
                else:
                    seen[name] = "FAIL"
            elif when == "setup" and (rep.failed or rep.skipped):
                seen[name] = "SKIP" if rep.skipped else "FAIL"
    if seen:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name in sorted(seen):
            terminalreporter.write_line(f"[ACCEPTANCE] {name}: {seen[name]}")
