"""Independent brute-force oracles used to check the engine.

Everything here is deliberately written in plain Python (loops, sorted(),
math.sqrt) with no imports from the package under test, so each oracle is an
independent path to the same answer. Inputs are plain tuples/dicts.
"""

from __future__ import annotations

import itertools
import math


# ---------------------------------------------------------------------------
# distance scans
# ---------------------------------------------------------------------------

def euclidean(a, b):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def cosine_distance(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    return 1.0 - dot / (na * nb)


def scan_knn(points, query, k, metric="euclidean", predicate=None):
    """points: dict id -> vector. Returns [(id, dist)] sorted by (dist, id)."""
    dist = euclidean if metric == "euclidean" else cosine_distance
    rows = []
    for pid in points:
        if predicate is not None and not predicate(pid):
            continue
        rows.append((dist(points[pid], query), pid))
    rows.sort()
    return [(pid, d) for d, pid in rows[:k]]


def scan_range(points, query, radius, metric="euclidean", predicate=None):
    full = scan_knn(points, query, len(points), metric, predicate)
    return [(pid, d) for pid, d in full if d <= radius]


def scan_counterfactual(points, labels, query_id, query_vec, target_label):
    """Nearest point with target label, excluding the query id itself."""
    best = None
    for pid in sorted(points):
        if pid == query_id or labels[pid] != target_label:
            continue
        d = euclidean(points[pid], query_vec)
        if best is None or (d, pid) < best:
            best = (d, pid)
    return None if best is None else (best[1], best[0])


def scan_adversarial_ratios(points, labels):
    """id -> nearest-unlike-distance / nearest-like-distance (self excluded)."""
    ratios = {}
    for pid in points:
        d_like = math.inf
        d_unlike = math.inf
        for other in points:
            if other == pid:
                continue
            d = euclidean(points[pid], points[other])
            if labels[other] == labels[pid]:
                d_like = min(d_like, d)
            else:
                d_unlike = min(d_unlike, d)
        if d_like == 0.0:
            ratios[pid] = 0.0 if d_unlike == 0.0 else math.inf
        elif math.isinf(d_like):
            ratios[pid] = 0.0
        else:
            ratios[pid] = d_unlike / d_like
    return ratios


def scan_recall(records, query, tau):
    """records: id -> (vector, validated). Best validated cosine match >= tau."""
    best = None
    for rid in sorted(records):
        vec, validated = records[rid]
        if not validated:
            continue
        sim = min(1.0, 1.0 - cosine_distance(vec, query))
        if sim < tau:
            continue
        if best is None or sim > best[1]:
            best = (rid, sim)
    return best


# ---------------------------------------------------------------------------
# knn prediction reference (used inside the Shapley oracle)
# ---------------------------------------------------------------------------

def knn_target_mean(rows, query_features, subset, k, total_features):
    """v(S): mean target of the k nearest rows under subset-restricted distance.

    rows: list of (id, features-dict, numeric-target), pre-sorted by id.
    subset: iterable of feature names; empty -> mean target over all rows.
    Distance on S is rescaled by total_features/len(S).
    """
    names = sorted(subset)
    if not names:
        return sum(t for _, _, t in rows) / len(rows)
    scale = total_features / len(names)
    scored = []
    for rid, feats, target in rows:
        ss = 0.0
        for name in names:
            diff = query_features[name] - feats[name]
            ss += diff * diff
        scored.append((math.sqrt(scale * ss), rid, target))
    scored.sort(key=lambda r: (r[0], r[1]))
    top = scored[: min(k, len(scored))]
    return sum(t for _, _, t in top) / len(top)


def shapley_by_permutations(value_fn, n_players):
    """Exact Shapley values as the average marginal over all n! orderings.

    value_fn takes a frozenset of player indices. Memoized internally, so the
    cost is 2^n value evaluations plus n! * n lookups.
    """
    cache = {}

    def v(s):
        if s not in cache:
            cache[s] = value_fn(s)
        return cache[s]

    totals = [0.0] * n_players
    count = 0
    for perm in itertools.permutations(range(n_players)):
        current = frozenset()
        v_prev = v(current)
        for player in perm:
            current = current | {player}
            v_cur = v(current)
            totals[player] += v_cur - v_prev
            v_prev = v_cur
        count += 1
    return [t / count for t in totals]


# ---------------------------------------------------------------------------
# kernel two-sample machinery (prototype / criticism reference)
# ---------------------------------------------------------------------------

def rbf(a, b, sigma):
    ss = sum((x - y) ** 2 for x, y in zip(a, b))
    return math.exp(-ss / (2.0 * sigma * sigma))


def median_pairwise_distance(vectors):
    dists = sorted(
        euclidean(vectors[i], vectors[j])
        for i in range(len(vectors))
        for j in range(i + 1, len(vectors))
    )
    if not dists:
        return 1.0
    mid = len(dists) // 2
    med = dists[mid] if len(dists) % 2 == 1 else 0.5 * (dists[mid - 1] + dists[mid])
    return med if med > 0 else 1.0


def squared_mmd(sample, chosen, sigma):
    """MMD^2 between the full sample and the chosen subset (both id lists)."""
    n = len(sample)
    m = len(chosen)
    t_data = sum(rbf(a, b, sigma) for a in sample for b in sample) / (n * n)
    t_cross = sum(rbf(a, p, sigma) for a in sample for p in chosen) / (n * m)
    t_proto = sum(rbf(p, q, sigma) for p in chosen for q in chosen) / (m * m)
    return t_data - 2.0 * t_cross + t_proto


def greedy_prototypes_reference(points, m, sigma):
    """points: list of (id, vector) sorted by id. Returns (ids, mmd2 trace)."""
    vectors = {pid: vec for pid, vec in points}
    sample = [vec for _, vec in points]
    chosen_ids = []
    trace = []
    for _ in range(m):
        best = None
        for pid, _ in points:
            if pid in chosen_ids:
                continue
            candidate = [vectors[c] for c in chosen_ids] + [vectors[pid]]
            score = squared_mmd(sample, candidate, sigma)
            if best is None or score < best[0]:
                best = (score, pid)
        chosen_ids.append(best[1])
        trace.append(best[0])
    return chosen_ids, trace


def witness_scores_reference(points, prototype_ids, sigma):
    """id -> |mean kernel similarity to data - mean kernel similarity to prototypes|."""
    vectors = {pid: vec for pid, vec in points}
    sample = [vec for _, vec in points]
    protos = [vectors[pid] for pid in prototype_ids]
    scores = {}
    for pid, vec in points:
        to_data = sum(rbf(vec, a, sigma) for a in sample) / len(sample)
        to_protos = sum(rbf(vec, p, sigma) for p in protos) / len(protos)
        scores[pid] = abs(to_data - to_protos)
    return scores


def best_subset_by_mmd(points, m, sigma):
    """Exhaustive minimum-MMD^2 subset of size m (tiny inputs only)."""
    sample = [vec for _, vec in points]
    vectors = {pid: vec for pid, vec in points}
    best = None
    for combo in itertools.combinations(sorted(vectors), m):
        score = squared_mmd(sample, [vectors[c] for c in combo], sigma)
        if best is None or score < best[0]:
            best = (score, combo)
    return list(best[1])
