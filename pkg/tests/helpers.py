from hybridplace import SbaGraph

ABS_TOL = 1e-9


def random_graph(rng, n, density=None):
    """Random simple graph with integer hosting in [1, 40] and one-decimal rates."""
    density = rng.uniform(0.1, 1.0) if density is None else density
    hosting = rng.integers(1, 41, size=n)
    edges = [
        (i, j, round(float(rng.uniform(1, 50)), 1))
        for i in range(n) for j in range(i + 1, n) if rng.random() < density
    ]
    return SbaGraph.from_arrays(hosting, edges)


CRITERIA: list[str] = []


def criterion(label: str, ok: bool, detail: str = ""):
    """Record an acceptance outcome for the end-of-run summary, then assert it."""
    CRITERIA.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
    print(CRITERIA[-1])
    assert ok, f"{label}: {detail}"
