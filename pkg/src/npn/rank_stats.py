"""Rank statistics and Gaussianization.

Everything here operates on an n x D data matrix (rows are samples) and is
invariant to strictly increasing per-column transforms, which is the whole
point: ranks only see order. The module provides

* rank computation with an explicit tie policy,
* the standard normal quantile (probit) used to Gaussianize ranks,
* the rank-based scatter matrix of the Gaussianized data,
* Spearman and Kendall rank-correlation matrices, and
* the classical sine maps (Kruskal, 1958) taking Spearman's rho or
  Kendall's tau of a bivariate Gaussian back to its Pearson correlation.

Kendall's tau uses the tau-a normalization: the pair-sign sum is divided by
C(n, 2) and tied pairs contribute zero through sign(0) = 0.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import DegenerateColumn, DomainError
from .matrix_core import as_symmetric

__all__ = [
    "TiePolicy",
    "ensure_data_matrix",
    "compute_ranks",
    "probit",
    "gaussianize",
    "sigma_g",
    "spearman_matrix",
    "kendall_matrix",
    "latent_from_rank_corr",
]


class TiePolicy(enum.Enum):
    """How tied values are ranked.

    LITERAL assigns every member of a tied group the group's maximum rank,
    i.e. entry (i, j) is the count of samples k with X[k, j] <= X[i, j].
    MIDRANK assigns the average of the literal ranks in the group, which
    keeps Gaussianized columns mean-centered when atoms are present.
    """

    LITERAL = "literal"
    MIDRANK = "midrank"


def ensure_data_matrix(x) -> np.ndarray:
    """Coerce ``x`` to a finite float64 matrix of shape (n, D).

    1-d input is treated as a single column. Raises DomainError on empty,
    more-than-2-d, or non-finite input.
    """
    m = np.asarray(x, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DomainError(f"expected a 2-d data matrix, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise DomainError(f"data matrix must be nonempty, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("data matrix contains non-finite entries")
    return m


def compute_ranks(x, policy: TiePolicy = TiePolicy.LITERAL) -> np.ndarray:
    """Columnwise ranks in [1, n].

    Under LITERAL the result is integer valued (dtype int64); under MIDRANK
    tied groups get half-integer averages (dtype float64). Columns with all
    entries distinct are permutations of {1, ..., n} under either policy.
    """
    m = ensure_data_matrix(x)
    n, d = m.shape
    if policy is TiePolicy.LITERAL:
        out = np.empty((n, d), dtype=np.int64)
    else:
        out = np.empty((n, d), dtype=np.float64)
    for j in range(d):
        col = m[:, j]
        srt = np.sort(col)
        upper = np.searchsorted(srt, col, side="right")
        if policy is TiePolicy.LITERAL:
            out[:, j] = upper
        else:
            lower = np.searchsorted(srt, col, side="left")
            out[:, j] = (lower + upper + 1) / 2.0
    return out


# Rational minimax coefficients for the normal quantile (Wichura's PPND16,
# Algorithm AS 241). Central branch covers |p - 1/2| <= 0.425; the two tail
# branches are in terms of r = sqrt(-log(min(p, 1-p))).
_PROBIT_A = [
    2.5090809287301226727e3, 3.3430575583588128105e4, 6.7265770927008700853e4,
    4.5921953931549871457e4, 1.3731693765509461125e4, 1.9715909503065514427e3,
    1.3314166789178437745e2, 3.3871328727963666080e0,
]
_PROBIT_B = [
    5.2264952788528545610e3, 2.8729085735721942674e4, 3.9307895800092710610e4,
    2.1213794301586595867e4, 5.3941960214247511077e3, 6.8718700749205790830e2,
    4.2313330701600911252e1, 1.0,
]
_PROBIT_C = [
    7.74545014278341407640e-4, 2.27238449892691845833e-2, 2.41780725177450611770e-1,
    1.27045825245236838258e0, 3.64784832476320460504e0, 5.76949722146069140550e0,
    4.63033784615654529590e0, 1.42343711074968357734e0,
]
_PROBIT_D = [
    1.05075007164441684324e-9, 5.47593808499534494600e-4, 1.51986665636164571966e-2,
    1.48103976427480074590e-1, 6.89767334985100004550e-1, 1.67638483018380384940e0,
    2.05319162663775882187e0, 1.0,
]
_PROBIT_E = [
    2.01033439929228813265e-7, 2.71155556874348757815e-5, 1.24266094738807843860e-3,
    2.65321895265761230930e-2, 2.96560571828504891230e-1, 1.78482653991729133580e0,
    5.46378491116411436990e0, 6.65790464350110377720e0,
]
_PROBIT_F = [
    2.04426310338993978564e-15, 1.42151175831644588870e-7, 1.84631831751005468180e-5,
    7.86869131145613259100e-4, 1.48753612908506148525e-2, 1.36929880922735805310e-1,
    5.99832206555887937690e-1, 1.0,
]


def probit(p):
    """Standard normal quantile function.

    Accepts a scalar or ndarray of probabilities strictly inside (0, 1) and
    returns the same shape. Absolute error is below 1e-13 over
    [1e-12, 1 - 1e-12], validated against a bisection oracle.

    Raises
    ------
    DomainError
        If any input is outside the open interval (0, 1).
    """
    arr = np.asarray(p, dtype=np.float64)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel().copy()
    if flat.size == 0:
        return arr.reshape(np.shape(p)).astype(np.float64)
    if not np.all(np.isfinite(flat)) or np.any(flat <= 0.0) or np.any(flat >= 1.0):
        raise DomainError("probit argument must lie strictly inside (0, 1)")

    q = flat - 0.5
    out = np.empty_like(flat)

    central = np.abs(q) <= 0.425
    if np.any(central):
        r = 0.180625 - q[central] * q[central]
        out[central] = q[central] * np.polyval(_PROBIT_A, r) / np.polyval(_PROBIT_B, r)

    tail = ~central
    if np.any(tail):
        qt = q[tail]
        pm = np.where(qt < 0.0, flat[tail], 1.0 - flat[tail])
        r = np.sqrt(-np.log(pm))
        val = np.empty_like(r)
        near = r <= 5.0
        rn = r[near] - 1.6
        val[near] = np.polyval(_PROBIT_C, rn) / np.polyval(_PROBIT_D, rn)
        far = ~near
        rf = r[far] - 5.0
        val[far] = np.polyval(_PROBIT_E, rf) / np.polyval(_PROBIT_F, rf)
        out[tail] = np.where(qt < 0.0, -val, val)

    result = out.reshape(np.shape(arr))
    return float(result) if scalar else result


def gaussianize(x, policy: TiePolicy = TiePolicy.LITERAL) -> np.ndarray:
    """Map each entry to the normal quantile of its scaled rank.

    Entry (i, j) becomes probit(R[i, j] / (n + 1)). For a distinct-valued
    column the sorted output is the fixed symmetric grid
    {probit(i / (n + 1)) : i = 1..n}, so the column mean is zero.
    """
    m = ensure_data_matrix(x)
    n = m.shape[0]
    if n < 2:
        raise DomainError("gaussianization needs at least 2 samples")
    ranks = compute_ranks(m, policy)
    return probit(np.asarray(ranks, dtype=np.float64) / (n + 1.0))


def sigma_g(x, policy: TiePolicy = TiePolicy.LITERAL) -> np.ndarray:
    """Uncentered second-moment matrix of the Gaussianized data.

    Returns (1/n) Xg.T @ Xg where Xg = gaussianize(x). The divisor is n and
    no centering is applied; with distinct values every diagonal entry
    equals the grid second moment (1/n) sum_i probit(i/(n+1))^2, which is
    slightly below 1 and shrinks the matrix deterministically in n.
    """
    xg = gaussianize(x, policy)
    n = xg.shape[0]
    return as_symmetric(xg.T @ xg / n)


def spearman_matrix(x, policy: TiePolicy = TiePolicy.LITERAL) -> np.ndarray:
    """Spearman rank-correlation matrix (Pearson correlation of ranks).

    Raises
    ------
    DegenerateColumn
        If some column's ranks are constant, which makes the correlation
        undefined for that column.
    """
    ranks = np.asarray(compute_ranks(x, policy), dtype=np.float64)
    spread = np.ptp(ranks, axis=0)
    if np.any(spread == 0.0):
        j = int(np.flatnonzero(spread == 0.0)[0])
        raise DegenerateColumn(f"column {j} has constant ranks")
    if ranks.shape[1] == 1:
        return np.ones((1, 1))
    corr = np.corrcoef(ranks, rowvar=False)
    corr = as_symmetric(corr)
    np.fill_diagonal(corr, 1.0)
    return corr


def kendall_matrix(x, backend: str = "auto") -> np.ndarray:
    """Kendall tau-a rank-correlation matrix.

    Entry (j, k) is the sum over unordered sample pairs of
    sign(X[a, j] - X[b, j]) * sign(X[a, k] - X[b, k]) divided by C(n, 2).
    Two backends produce identical values: ``naive`` forms the full O(n^2)
    pair-sign products and ``mergesort`` counts discordant pairs in
    O(n log n) via Knight's inversion-counting construction. ``auto``
    switches to mergesort at n >= 128.
    """
    m = ensure_data_matrix(x)
    n, d = m.shape
    if n < 2:
        raise DomainError("Kendall correlation needs at least 2 samples")
    if backend == "auto":
        backend = "mergesort" if n >= 128 else "naive"
    if backend not in ("naive", "mergesort"):
        raise DomainError(f"unknown Kendall backend {backend!r}")

    out = np.eye(d)
    if backend == "naive":
        signs = [
            np.sign(m[:, j][:, None] - m[:, j][None, :]).astype(np.int8)
            for j in range(d)
        ]
        denom = n * (n - 1)
        for j in range(d):
            for k in range(j + 1, d):
                total = int(np.einsum("ab,ab->", signs[j], signs[k], dtype=np.int64))
                out[j, k] = out[k, j] = total / denom
    else:
        for j in range(d):
            for k in range(j + 1, d):
                t = _kendall_pair_mergesort(m[:, j], m[:, k])
                out[j, k] = out[k, j] = t
    return out


def _tied_pair_count(sorted_v: np.ndarray) -> int:
    """Number of unordered pairs with equal value; input must be sorted."""
    if sorted_v.size < 2:
        return 0
    breaks = np.flatnonzero(sorted_v[1:] != sorted_v[:-1])
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks + 1, [sorted_v.size]))
    runs = (ends - starts).astype(np.int64)
    return int(np.sum(runs * (runs - 1) // 2))


def _joint_tied_pair_count(xs: np.ndarray, ys: np.ndarray) -> int:
    """Pairs tied in both coordinates; inputs lexicographically sorted."""
    if xs.size < 2:
        return 0
    same = (xs[1:] == xs[:-1]) & (ys[1:] == ys[:-1])
    breaks = np.flatnonzero(~same)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks + 1, [xs.size]))
    runs = (ends - starts).astype(np.int64)
    return int(np.sum(runs * (runs - 1) // 2))


def count_inversions(values: np.ndarray) -> int:
    """Strict inversions (i < j with v[i] > v[j]) by bottom-up merging.

    The array is padded with +inf to a power of two; each level merges
    adjacent sorted blocks with a stable argsort, and for every element
    coming from a right block the number of strictly larger left-block
    elements still ahead of it is accumulated. Stability makes equal values
    contribute nothing, which is exactly the strict-inversion count.
    """
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    if n < 2:
        return 0
    size = 1 << (n - 1).bit_length()
    buf = np.full(size, np.inf)
    buf[:n] = v
    total = 0
    width = 1
    while width < size:
        blocks = buf.reshape(-1, 2 * width)
        order = np.argsort(blocks, axis=1, kind="stable")
        from_left = order < width
        seen_left = np.cumsum(from_left, axis=1)
        total += int(np.sum(np.where(from_left, 0, width - seen_left)))
        buf = np.take_along_axis(blocks, order, axis=1).reshape(-1)
        width *= 2
    return total


def _kendall_pair_mergesort(x: np.ndarray, y: np.ndarray) -> float:
    """Tau-a for one column pair via Knight's O(n log n) construction."""
    n = x.size
    order = np.lexsort((y, x))
    xs = x[order]
    ys = y[order]
    n0 = n * (n - 1) // 2
    ties_x = _tied_pair_count(xs)
    ties_y = _tied_pair_count(np.sort(y))
    ties_xy = _joint_tied_pair_count(xs, ys)
    discordant = count_inversions(ys)
    concordant_minus_discordant = n0 - ties_x - ties_y + ties_xy - 2 * discordant
    return concordant_minus_discordant / n0


def latent_from_rank_corr(m, kind: str) -> np.ndarray:
    """Map a rank-correlation matrix to the implied Gaussian correlation.

    For a bivariate Gaussian with Pearson correlation s, Spearman's rho
    satisfies s = 2 sin(pi rho / 6) and Kendall's tau satisfies
    s = sin(pi tau / 2); both identities survive strictly increasing
    marginal transforms. This applies the chosen map entrywise and restores
    an exact unit diagonal.

    Parameters
    ----------
    m : array_like, shape (D, D)
        Symmetric matrix with entries in [-1, 1].
    kind : str
        ``"spearman"`` or ``"kendall"`` (case-insensitive).

    Raises
    ------
    DomainError
        If ``kind`` is unknown or some entry exceeds 1 in magnitude beyond
        1e-12 slack.
    """
    mat = as_symmetric(m)
    if np.max(np.abs(mat)) > 1.0 + 1e-12:
        raise DomainError("rank correlations must lie in [-1, 1]")
    mat = np.clip(mat, -1.0, 1.0)
    key = kind.lower()
    if key == "spearman":
        out = 2.0 * np.sin(np.pi * mat / 6.0)
    elif key == "kendall":
        out = np.sin(np.pi * mat / 2.0)
    else:
        raise DomainError(f"unknown rank correlation kind {kind!r}")
    out = np.clip(out, -1.0, 1.0)
    np.fill_diagonal(out, 1.0)
    return as_symmetric(out)
