import numpy as np
import pytest

from rtkm import Clustering, Dataset


def grid_projection_oracle(y, mass, levels=16, grid=21):
    """Brute-force projection onto {w in [0,1]^n : sum w = mass} by grid
    refinement over the first n-1 coordinates (n <= 4)."""
    y = np.asarray(y, dtype=float)
    n = y.size
    assert 2 <= n <= 4
    lows = np.zeros(n - 1)
    highs = np.ones(n - 1)
    best = None
    best_dist = np.inf
    for _ in range(levels):
        axes = [np.linspace(lows[d], highs[d], grid) for d in range(n - 1)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n - 1)
        last = mass - mesh.sum(axis=1)
        feasible = (last >= -1e-9) & (last <= 1 + 1e-9)
        cand = np.concatenate([mesh, last[:, None]], axis=1)[feasible]
        if len(cand):
            dist = ((cand - y) ** 2).sum(axis=1)
            i = int(np.argmin(dist))
            if dist[i] < best_dist:
                best, best_dist = cand[i], dist[i]
        # window of +/- 4 grid steps: the sum constraint makes the sliced
        # objective a narrow valley, so a tight window can shed the
        # optimum and stall the refinement
        step = (highs - lows) / (grid - 1)
        lows = np.clip(best[: n - 1] - 4 * step, 0, 1)
        highs = np.clip(best[: n - 1] + 4 * step, 0, 1)
    return np.clip(best, 0.0, 1.0)


def exhaustive_average_f1(pred_sets, truth_sets):
    """Maximum of the mean per-truth-cluster F1 over every one-to-one
    matching, by enumerating permutations (small instances only)."""
    from itertools import permutations

    from rtkm.metrics import f1_matrix

    scores = f1_matrix(pred_sets, truth_sets)
    n_pred, n_truth = scores.shape
    best = 0.0
    if n_pred >= n_truth:
        for perm in permutations(range(n_pred), n_truth):
            best = max(best, sum(scores[p, t] for t, p in enumerate(perm)))
    else:
        for perm in permutations(range(n_truth), n_pred):
            best = max(best, sum(scores[p, t] for p, t in enumerate(perm)))
    return best / n_truth


def make_blobs_with_outliers(gen_seed=42, spread=0.6, per_cluster=50,
                             outliers=((120.0, 120.0), (-110.0, 90.0))):
    """Three well-separated 2-d Gaussian blobs plus fixed far outliers."""
    rng = np.random.default_rng(gen_seed)
    means = np.array([[0.0, 0.0], [10.0, 0.0], [5.0, 8.0]])
    chunks = [m[:, None] + spread * rng.standard_normal((2, per_cluster)) for m in means]
    if outliers:
        chunks.append(np.array(outliers, dtype=float).T)
    pts = np.concatenate(chunks, axis=1)
    n_out = len(outliers)
    n = pts.shape[1]
    members = tuple(frozenset((j,)) for j in range(3) for _ in range(per_cluster))
    members += tuple(frozenset() for _ in range(n_out))
    flags = np.zeros(n, dtype=bool)
    if n_out:
        flags[-n_out:] = True
    return Dataset(pts, members, flags)


def truth_of(dataset):
    n_true = max((max(s) + 1 for s in dataset.truth_memberships if s), default=0)
    clusters = tuple(
        {i for i, s in enumerate(dataset.truth_memberships) if j in s}
        for j in range(n_true)
    )
    outliers = frozenset(np.flatnonzero(dataset.truth_outliers).tolist()) \
        if dataset.truth_outliers is not None else frozenset()
    return Clustering(clusters, outliers)


@pytest.fixture
def blobs_dataset():
    return make_blobs_with_outliers()
