"""Numba kernels: the 29 interval attributes and the tree split search.

Everything here operates on raw float64 segments. Attribute semantics are
pinned in :mod:`xmtc.features`; this module is the production implementation.
The test suite carries an independently written reference implementation and
cross-checks values, so keep the two in behavioural lockstep via the
documented definitions, not by sharing code.

All kernels are compiled without fastmath so results are reproducible across
runs and thread counts, and with ``nogil`` so tree fitting can run in threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit

N_ATTRIBUTES = 29

# ---------------------------------------------------------------------------
# basic statistics


@njit(cache=True, nogil=True)
def _mean(y):
    total = 0.0
    for i in range(y.shape[0]):
        total += y[i]
    return total / y.shape[0]


@njit(cache=True, nogil=True)
def _std_samp(y):
    # sample standard deviation (ddof=1); 0.0 when fewer than 2 values
    n = y.shape[0]
    if n < 2:
        return 0.0
    m = _mean(y)
    acc = 0.0
    for i in range(n):
        d = y[i] - m
        acc += d * d
    return np.sqrt(acc / (n - 1))


@njit(cache=True, nogil=True)
def _std_pop(y):
    n = y.shape[0]
    m = _mean(y)
    acc = 0.0
    for i in range(n):
        d = y[i] - m
        acc += d * d
    return np.sqrt(acc / n)


@njit(cache=True, nogil=True)
def _slope(y):
    # least-squares slope of y against 0-based time index; 0.0 if degenerate
    n = y.shape[0]
    if n < 2:
        return 0.0
    tbar = (n - 1) / 2.0
    ybar = _mean(y)
    num = 0.0
    den = 0.0
    for i in range(n):
        dt = i - tbar
        num += dt * (y[i] - ybar)
        den += dt * dt
    if den == 0.0:
        return 0.0
    return num / den


@njit(cache=True, nogil=True)
def _sorted_copy(y):
    s = y.copy()
    s.sort()
    return s


@njit(cache=True, nogil=True)
def _quantile_sorted_type7(s, q):
    # linear interpolation at position (n - 1) * q
    n = s.shape[0]
    pos = (n - 1) * q
    lo = int(np.floor(pos))
    if lo >= n - 1:
        return s[n - 1]
    frac = pos - lo
    return s[lo] + (s[lo + 1] - s[lo]) * frac


@njit(cache=True, nogil=True)
def _quantile_sorted_half(s, q):
    # linear interpolation on the midpoint grid (i + 0.5) / n, clamped at the
    # extremes; this is the convention shared by the symbolization features
    n = s.shape[0]
    pos = n * q - 0.5
    if pos <= 0.0:
        return s[0]
    if pos >= n - 1:
        return s[n - 1]
    lo = int(np.floor(pos))
    frac = pos - lo
    return s[lo] + (s[lo + 1] - s[lo]) * frac


@njit(cache=True, nogil=True)
def _median_sorted(s):
    n = s.shape[0]
    if n % 2 == 1:
        return s[n // 2]
    return 0.5 * (s[n // 2 - 1] + s[n // 2])


# ---------------------------------------------------------------------------
# autocorrelation helpers
#
# ac(k) = sum_t (y[t] - mean)(y[t + k] - mean) / sum_t (y[t] - mean)^2
# (biased estimator, ac(0) = 1), evaluated lazily per lag.


@njit(cache=True, nogil=True)
def _ac_denom(y):
    m = _mean(y)
    acc = 0.0
    for i in range(y.shape[0]):
        d = y[i] - m
        acc += d * d
    return m, acc


@njit(cache=True, nogil=True)
def _ac_at(y, m, denom, lag):
    acc = 0.0
    for i in range(y.shape[0] - lag):
        acc += (y[i] - m) * (y[i + lag] - m)
    return acc / denom


@njit(cache=True, nogil=True)
def _first_zero_ac(y):
    # first lag with ac <= 0; 0 for a constant segment, n when no crossing
    n = y.shape[0]
    m, denom = _ac_denom(y)
    if denom <= 0.0:
        return 0
    for lag in range(1, n):
        if _ac_at(y, m, denom, lag) <= 0.0:
            return lag
    return n


# ---------------------------------------------------------------------------
# spectral helpers


@njit(cache=True, nogil=True)
def _fft_inplace(re, im):
    # iterative radix-2 Cooley-Tukey; length must be a power of two
    n = re.shape[0]
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            re[i], re[j] = re[j], re[i]
            im[i], im[j] = im[j], im[i]
    length = 2
    while length <= n:
        ang = -2.0 * np.pi / length
        wr0 = np.cos(ang)
        wi0 = np.sin(ang)
        half = length >> 1
        for start in range(0, n, length):
            wr = 1.0
            wi = 0.0
            for k in range(half):
                a = start + k
                b = a + half
                vr = re[b] * wr - im[b] * wi
                vi = re[b] * wi + im[b] * wr
                re[b] = re[a] - vr
                im[b] = im[a] - vi
                re[a] = re[a] + vr
                im[a] = im[a] + vi
                wr_new = wr * wr0 - wi * wi0
                wi = wr * wi0 + wi * wr0
                wr = wr_new
        length <<= 1


@njit(cache=True, nogil=True)
def _welch_psd(y):
    # single-segment rectangular-window PSD of the mean-centred segment,
    # one-sided, on the angular frequency grid f_k = 2 pi k / nfft with
    # nfft = 2^ceil(log2(n)); density scale 1 / (2 pi n), interior bins doubled
    n = y.shape[0]
    m = _mean(y)
    nfft = 1
    while nfft < n:
        nfft <<= 1
    re = np.zeros(nfft)
    im = np.zeros(nfft)
    for i in range(n):
        re[i] = y[i] - m
    _fft_inplace(re, im)
    n_s = nfft // 2 + 1
    s = np.empty(n_s)
    scale = 1.0 / (2.0 * np.pi * n)
    for k in range(n_s):
        s[k] = (re[k] * re[k] + im[k] * im[k]) * scale
    for k in range(1, n_s - 1):
        s[k] *= 2.0
    df = 2.0 * np.pi / nfft
    return s, df


# ---------------------------------------------------------------------------
# distribution features


@njit(cache=True, nogil=True)
def _histogram_mode(y, n_bins):
    # mean centre of the fullest equal-width bins over [min, max]; a constant
    # segment is its own single-bin mode
    n = y.shape[0]
    mn = y[0]
    mx = y[0]
    for i in range(1, n):
        if y[i] < mn:
            mn = y[i]
        if y[i] > mx:
            mx = y[i]
    if mx <= mn:
        return mn
    width = (mx - mn) / n_bins
    counts = np.zeros(n_bins)
    for i in range(n):
        idx = int((y[i] - mn) / width)
        if idx >= n_bins:
            idx = n_bins - 1
        counts[idx] += 1.0
    max_count = 0.0
    num_max = 1
    acc = 0.0
    for i in range(n_bins):
        centre = mn + width * i + width * 0.5
        if counts[i] > max_count:
            max_count = counts[i]
            num_max = 1
            acc = centre
        elif counts[i] == max_count:
            num_max += 1
            acc += centre
    return acc / num_max


@njit(cache=True, nogil=True)
def _outlier_include_mdrmd(y, flip):
    # median location drift of increasingly strict outlier sets, on the
    # internally z-scored segment (population std); `flip` selects the sign
    n = y.shape[0]
    m = _mean(y)
    sigma = _std_pop(y)
    if sigma <= 0.0:
        return 0.0
    z = np.empty(n)
    for i in range(n):
        z[i] = flip * (y[i] - m) / sigma
    mx = z[0]
    tot = 0
    for i in range(n):
        if z[i] > mx:
            mx = z[i]
        if z[i] >= 0.0:
            tot += 1
    if mx <= 0.0 or tot == 0:
        return 0.0
    inc = 0.01
    n_thr = int(np.floor(mx / inc)) + 1
    ms3 = np.empty(n_thr)
    ms4 = np.empty(n_thr)
    for j in range(n_thr):
        thr = j * inc
        cnt = 0
        for i in range(n):
            if z[i] >= thr:
                cnt += 1
        # median of the 1-based time indices exceeding the threshold
        p_lo = (cnt - 1) // 2
        p_hi = cnt // 2
        seen = 0
        v_lo = 0.0
        v_hi = 0.0
        for i in range(n):
            if z[i] >= thr:
                if seen == p_lo:
                    v_lo = i + 1.0
                if seen == p_hi:
                    v_hi = i + 1.0
                seen += 1
        ms3[j] = (cnt - 1.0) / tot * 100.0
        ms4[j] = (v_lo + v_hi) / 2.0 / (n / 2.0) - 1.0
    mj = -1
    for j in range(n_thr):
        if ms3[j] > 2.0:
            mj = j
    if mj < 0:
        return 0.0
    kept = _sorted_copy(ms4[: mj + 1])
    return _median_sorted(kept)


# ---------------------------------------------------------------------------
# correlation-shape features


@njit(cache=True, nogil=True)
def _f1ecac(y):
    # linearly interpolated lag where the autocorrelation first falls
    # below 1/e; n when it never does (including the constant segment)
    n = y.shape[0]
    m, denom = _ac_denom(y)
    if denom <= 0.0:
        return float(n)
    thresh = 1.0 / np.e
    prev = 1.0
    for lag in range(1, n):
        cur = _ac_at(y, m, denom, lag)
        if cur < thresh:
            return (lag - 1) + (thresh - prev) / (cur - prev)
        prev = cur
    return float(n)


@njit(cache=True, nogil=True)
def _first_min_ac(y):
    # first lag that is a strict local minimum of the autocorrelation
    n = y.shape[0]
    m, denom = _ac_denom(y)
    if denom <= 0.0:
        return float(n)
    if n < 3:
        return float(n)
    a_prev = 1.0
    a_cur = _ac_at(y, m, denom, 1)
    for lag in range(1, n - 1):
        a_next = _ac_at(y, m, denom, lag + 1)
        if a_cur < a_prev and a_cur < a_next:
            return float(lag)
        a_prev = a_cur
        a_cur = a_next
    return float(n)


@njit(cache=True, nogil=True)
def _ami_even_2_5(y):
    # automutual information at lag 2 from a joint histogram over five equal
    # bins spanning [min - 0.1, max + 0.1]
    n = y.shape[0]
    n_pairs = n - 2
    if n_pairs < 1:
        return 0.0
    mn = y[0]
    mx = y[0]
    for i in range(1, n):
        if y[i] < mn:
            mn = y[i]
        if y[i] > mx:
            mx = y[i]
    step = (mx - mn + 0.2) / 5.0
    edge0 = mn - 0.1
    joint = np.zeros((5, 5))
    for t in range(n_pairs):
        i1 = int((y[t] - edge0) / step)
        i2 = int((y[t + 2] - edge0) / step)
        if i1 > 4:
            i1 = 4
        if i2 > 4:
            i2 = 4
        joint[i1, i2] += 1.0
    ami = 0.0
    for i in range(5):
        pi = 0.0
        for j in range(5):
            pi += joint[i, j]
        if pi == 0.0:
            continue
        for j in range(5):
            if joint[i, j] == 0.0:
                continue
            pj = 0.0
            for k in range(5):
                pj += joint[k, j]
            pij = joint[i, j] / n_pairs
            ami += pij * np.log(pij / ((pi / n_pairs) * (pj / n_pairs)))
    return ami


@njit(cache=True, nogil=True)
def _trev_1_num(y):
    n = y.shape[0]
    acc = 0.0
    for i in range(n - 1):
        d = y[i + 1] - y[i]
        acc += d * d * d
    return acc / (n - 1)


@njit(cache=True, nogil=True)
def _hrv_pnn40(y):
    # share of successive differences larger than 0.04 in absolute value
    n = y.shape[0]
    cnt = 0
    for i in range(n - 1):
        if np.abs(y[i + 1] - y[i]) * 1000.0 > 40.0:
            cnt += 1
    return cnt / (n - 1.0)


@njit(cache=True, nogil=True)
def _embed2_dist_expfit_meandiff(y):
    # mean absolute difference between the histogram of successive distances
    # in the (y_t, y_{t+tau}) embedding and a fitted exponential density
    n = y.shape[0]
    tau = _first_zero_ac(y)
    cap = n // 10
    if tau > cap:
        tau = cap
    if tau < 1:
        tau = 1
    m = n - tau - 1
    if m < 2:
        return 0.0
    d = np.empty(m)
    for t in range(m):
        dx = y[t + 1] - y[t]
        dy = y[t + tau + 1] - y[t + tau]
        d[t] = np.sqrt(dx * dx + dy * dy)
    l = _mean(d)
    if l <= 0.0:
        return 0.0
    sigma = _std_samp(d)
    if sigma < 0.001:
        return 0.0
    mn = d[0]
    mx = d[0]
    for i in range(1, m):
        if d[i] < mn:
            mn = d[i]
        if d[i] > mx:
            mx = d[i]
    span = mx - mn
    if span <= 0.0:
        return 0.0
    n_bins = int(np.ceil(span / (3.5 * sigma / m ** (1.0 / 3.0))))
    if n_bins < 1:
        return 0.0
    width = span / n_bins
    counts = np.zeros(n_bins)
    for i in range(m):
        idx = int((d[i] - mn) / width)
        if idx >= n_bins:
            idx = n_bins - 1
        counts[idx] += 1.0
    acc = 0.0
    for i in range(n_bins):
        centre = mn + width * i + width * 0.5
        density = counts[i] / (m * width)
        acc += np.abs(density - np.exp(-centre / l) / l)
    return acc / n_bins


@njit(cache=True, nogil=True)
def _ami40_fmmi(y):
    # first local minimum of the gaussian automutual information
    # -0.5 log(1 - ac(k)^2) over lags 1 .. min(40, ceil(n / 2))
    n = y.shape[0]
    tau_max = int(np.ceil(n / 2.0))
    if tau_max > 40:
        tau_max = 40
    if tau_max < 1:
        return 0.0
    m, denom = _ac_denom(y)
    if denom <= 0.0:
        return float(tau_max)
    ami = np.empty(tau_max + 1)
    for lag in range(1, tau_max + 1):
        a = _ac_at(y, m, denom, lag)
        v = 1.0 - a * a
        if v <= 0.0:
            ami[lag] = np.inf
        else:
            ami[lag] = -0.5 * np.log(v)
    for lag in range(2, tau_max):
        if ami[lag] < ami[lag - 1] and ami[lag] < ami[lag + 1]:
            return float(lag)
    return float(tau_max)


@njit(cache=True, nogil=True)
def _tauresrat_mean1(y):
    # ratio of the first ac zero of the one-step forecast residuals
    # (previous-value forecast) to that of the segment itself
    tau_y = _first_zero_ac(y)
    if tau_y == 0:
        return 0.0
    n = y.shape[0]
    res = np.empty(n - 1)
    for i in range(n - 1):
        res[i] = y[i + 1] - y[i]
    tau_r = _first_zero_ac(res)
    return tau_r / tau_y


@njit(cache=True, nogil=True)
def _local_simple_mean3_stderr(y):
    # sample std of the residuals of a rolling mean-of-previous-3 forecast
    n = y.shape[0]
    m = n - 3
    if m < 2:
        return 0.0
    res = np.empty(m)
    for t in range(m):
        res[t] = y[t + 3] - (y[t] + y[t + 1] + y[t + 2]) / 3.0
    return _std_samp(res)


# ---------------------------------------------------------------------------
# symbolic features


@njit(cache=True, nogil=True)
def _long_stretch(b, val):
    # longest run of `val`, with the boundary convention that run length is
    # measured between consecutive non-`val` anchors (an all-`val` array of
    # length k therefore scores k - 1)
    n = b.shape[0]
    last = 0
    best = 0
    for i in range(n):
        if b[i] != val or i == n - 1:
            stretch = i - last
            if stretch > best:
                best = stretch
            last = i
    return best


@njit(cache=True, nogil=True)
def _binarystats_mean_longstretch1(y):
    # binarize the first n - 1 values against the segment mean
    n = y.shape[0]
    m = _mean(y)
    b = np.empty(n - 1, np.int64)
    for i in range(n - 1):
        b[i] = 1 if y[i] - m > 0.0 else 0
    return float(_long_stretch(b, 1))


@njit(cache=True, nogil=True)
def _binarystats_diff_longstretch0(y):
    # binarize successive changes as non-decreasing / decreasing
    n = y.shape[0]
    b = np.empty(n - 1, np.int64)
    for i in range(n - 1):
        b[i] = 1 if y[i + 1] - y[i] >= 0.0 else 0
    return float(_long_stretch(b, 0))


@njit(cache=True, nogil=True)
def _symbolize3(values, q1, q2, out):
    for i in range(values.shape[0]):
        if values[i] <= q1:
            out[i] = 0
        elif values[i] <= q2:
            out[i] = 1
        else:
            out[i] = 2


@njit(cache=True, nogil=True)
def _transition_matrix_sumdiagcov(y):
    # downsample at the first ac zero, coarse-grain into terciles, and sum the
    # per-column sample variances of the 3x3 transition probability matrix
    tau = _first_zero_ac(y)
    if tau < 1:
        tau = 1
    yd = y[::tau].copy()
    nd = yd.shape[0]
    if nd < 2:
        return 0.0
    s = _sorted_copy(yd)
    q1 = _quantile_sorted_half(s, 1.0 / 3.0)
    q2 = _quantile_sorted_half(s, 2.0 / 3.0)
    sym = np.empty(nd, np.int64)
    _symbolize3(yd, q1, q2, sym)
    t_mat = np.zeros((3, 3))
    for i in range(nd - 1):
        t_mat[sym[i], sym[i + 1]] += 1.0
    for i in range(3):
        for j in range(3):
            t_mat[i, j] /= nd - 1.0
    total = 0.0
    for j in range(3):
        col_mean = (t_mat[0, j] + t_mat[1, j] + t_mat[2, j]) / 3.0
        var = 0.0
        for i in range(3):
            d = t_mat[i, j] - col_mean
            var += d * d
        total += var / 2.0
    return total


@njit(cache=True, nogil=True)
def _motif3_quantile_hh(y):
    # entropy of adjacent symbol pairs after tercile coarse-graining
    n = y.shape[0]
    if n < 2:
        return 0.0
    s = _sorted_copy(y)
    q1 = _quantile_sorted_half(s, 1.0 / 3.0)
    q2 = _quantile_sorted_half(s, 2.0 / 3.0)
    sym = np.empty(n, np.int64)
    _symbolize3(y, q1, q2, sym)
    joint = np.zeros((3, 3))
    for i in range(n - 1):
        joint[sym[i], sym[i + 1]] += 1.0
    hh = 0.0
    for i in range(3):
        for j in range(3):
            if joint[i, j] > 0.0:
                p = joint[i, j] / (n - 1.0)
                hh -= p * np.log(p)
    return hh


# ---------------------------------------------------------------------------
# periodicity


@njit(cache=True, nogil=True)
def _spline_detrend(y):
    # least-squares cubic spline with one interior knot at the midpoint of the
    # normalized time axis (truncated power basis), returned as residuals
    n = y.shape[0]
    basis = np.empty((n, 5))
    for i in range(n):
        t = i / (n - 1.0)
        basis[i, 0] = 1.0
        basis[i, 1] = t
        basis[i, 2] = t * t
        basis[i, 3] = t * t * t
        u = t - 0.5
        basis[i, 4] = u * u * u if u > 0.0 else 0.0
    # normal equations, solved by gaussian elimination with partial pivoting
    ata = np.zeros((5, 5))
    atb = np.zeros(5)
    for i in range(n):
        for a in range(5):
            atb[a] += basis[i, a] * y[i]
            for b in range(5):
                ata[a, b] += basis[i, a] * basis[i, b]
    for col in range(5):
        piv = col
        best = np.abs(ata[col, col])
        for r in range(col + 1, 5):
            if np.abs(ata[r, col]) > best:
                best = np.abs(ata[r, col])
                piv = r
        if best == 0.0:
            return y - _mean(y)
        if piv != col:
            for c in range(5):
                ata[col, c], ata[piv, c] = ata[piv, c], ata[col, c]
            atb[col], atb[piv] = atb[piv], atb[col]
        for r in range(col + 1, 5):
            factor = ata[r, col] / ata[col, col]
            for c in range(col, 5):
                ata[r, c] -= factor * ata[col, c]
            atb[r] -= factor * atb[col]
    coef = np.zeros(5)
    for row in range(4, -1, -1):
        acc = atb[row]
        for c in range(row + 1, 5):
            acc -= ata[row, c] * coef[c]
        coef[row] = acc / ata[row, row]
    resid = np.empty(n)
    for i in range(n):
        fit = 0.0
        for a in range(5):
            fit += basis[i, a] * coef[a]
        resid[i] = y[i] - fit
    return resid


@njit(cache=True, nogil=True)
def _periodicity_wang(y):
    # first autocorrelation peak of the spline-detrended segment that rises at
    # least 0.01 above the preceding trough and is non-negative
    n = y.shape[0]
    if n < 6:
        return 0.0
    acmax = int(np.ceil(n / 3.0))
    if acmax < 3:
        return 0.0
    resid = _spline_detrend(y)
    m, denom = _ac_denom(resid)
    # a residual whose power is float noise relative to the segment's own
    # variance carries no periodicity signal
    _, y_power = _ac_denom(y)
    if denom <= 1e-12 * y_power:
        return 0.0
    acf = np.empty(acmax + 1)
    acf[0] = 1.0
    for lag in range(1, acmax + 1):
        acf[lag] = _ac_at(resid, m, denom, lag)
    troughs = np.empty(acmax, np.int64)
    peaks = np.empty(acmax, np.int64)
    n_troughs = 0
    n_peaks = 0
    for lag in range(2, acmax):
        if acf[lag] < acf[lag - 1] and acf[lag] < acf[lag + 1]:
            troughs[n_troughs] = lag
            n_troughs += 1
        elif acf[lag] > acf[lag - 1] and acf[lag] > acf[lag + 1]:
            peaks[n_peaks] = lag
            n_peaks += 1
    for p in range(n_peaks):
        lag_peak = peaks[p]
        the_peak = acf[lag_peak]
        lag_trough = -1
        for t in range(n_troughs):
            if troughs[t] < lag_peak:
                lag_trough = troughs[t]
            else:
                break
        if lag_trough < 0:
            continue
        if the_peak - acf[lag_trough] < 0.01:
            continue
        if the_peak < 0.0:
            continue
        return float(lag_peak)
    return 0.0


# ---------------------------------------------------------------------------
# spectral summaries


@njit(cache=True, nogil=True)
def _welch_area_5_1(y):
    s, df = _welch_psd(y)
    upto = s.shape[0] // 5
    acc = 0.0
    for i in range(upto):
        acc += s[i]
    return acc * df


@njit(cache=True, nogil=True)
def _welch_centroid(y):
    s, df = _welch_psd(y)
    total = 0.0
    for i in range(s.shape[0]):
        total += s[i]
    if total <= 0.0:
        return 0.0
    half = total * 0.5
    acc = 0.0
    for i in range(s.shape[0]):
        acc += s[i]
        if acc > half:
            return i * df
    return (s.shape[0] - 1) * df


# ---------------------------------------------------------------------------
# fluctuation analysis


@njit(cache=True, nogil=True)
def _linfit_resid_norm(xs, ys, lo, hi):
    # euclidean norm of residuals of a least-squares line over [lo, hi)
    n = hi - lo
    xm = 0.0
    ym = 0.0
    for i in range(lo, hi):
        xm += xs[i]
        ym += ys[i]
    xm /= n
    ym /= n
    num = 0.0
    den = 0.0
    for i in range(lo, hi):
        dx = xs[i] - xm
        num += dx * (ys[i] - ym)
        den += dx * dx
    slope = num / den if den > 0.0 else 0.0
    intercept = ym - slope * xm
    acc = 0.0
    for i in range(lo, hi):
        r = ys[i] - (slope * xs[i] + intercept)
        acc += r * r
    return np.sqrt(acc)


@njit(cache=True, nogil=True)
def _fluct_anal_prop_r1(y, lag, use_dfa):
    # two-regime fit over the log-log fluctuation curve of the lag-subsampled
    # cumulative sum; returns the fraction of scales in the first regime
    n = y.shape[0]
    n_cum = (n - 1) // lag + 1
    if n_cum < 10:
        return 0.0
    x = np.empty(n_cum)
    acc = 0.0
    for i in range(n_cum):
        acc += y[i * lag]
        x[i] = acc
    lo = np.log(5.0)
    hi = np.log(n_cum / 2.0)
    if hi <= lo:
        return 0.0
    taus = np.empty(50, np.int64)
    n_tau = 0
    for i in range(50):
        tau = int(np.floor(np.exp(lo + (hi - lo) * i / 49.0) + 0.5))
        if n_tau == 0 or tau != taus[n_tau - 1]:
            taus[n_tau] = tau
            n_tau += 1
    if n_tau < 12:
        return 0.0
    log_tau = np.empty(n_tau)
    log_f = np.empty(n_tau)
    for q in range(n_tau):
        tau = taus[q]
        n_buf = n_cum // tau
        if n_buf < 1:
            return 0.0
        # per-window linear detrend over positions 0 .. tau - 1
        tbar = (tau - 1) / 2.0
        den = 0.0
        for t in range(tau):
            dt = t - tbar
            den += dt * dt
        total = 0.0
        for w in range(n_buf):
            base = w * tau
            ym = 0.0
            for t in range(tau):
                ym += x[base + t]
            ym /= tau
            num = 0.0
            for t in range(tau):
                num += (t - tbar) * (x[base + t] - ym)
            slope = num / den
            if use_dfa:
                for t in range(tau):
                    r = x[base + t] - (ym + slope * (t - tbar))
                    total += r * r
            else:
                r_min = np.inf
                r_max = -np.inf
                for t in range(tau):
                    r = x[base + t] - (ym + slope * (t - tbar))
                    if r < r_min:
                        r_min = r
                    if r > r_max:
                        r_max = r
                span = r_max - r_min
                total += span * span
        if use_dfa:
            f = np.sqrt(total / (n_buf * tau))
        else:
            f = np.sqrt(total / n_buf)
        if f <= 0.0:
            return 0.0
        log_tau[q] = np.log(float(tau))
        log_f[q] = np.log(f)
    min_points = 6
    best = np.inf
    best_split_at = -1
    for i in range(min_points, n_tau - min_points + 1):
        # regimes overlap at the split scale
        err = _linfit_resid_norm(log_tau, log_f, 0, i) + _linfit_resid_norm(
            log_tau, log_f, i - 1, n_tau
        )
        if err < best:
            best = err
            best_split_at = i
    if best_split_at < 0:
        return 0.0
    return best_split_at / n_tau


# ---------------------------------------------------------------------------
# dispatch


@njit(cache=True, nogil=True)
def _eval_raw(y, attr_id):
    if attr_id == 0:
        return _mean(y)
    elif attr_id == 1:
        return _std_samp(y)
    elif attr_id == 2:
        return _slope(y)
    elif attr_id == 3:
        return _median_sorted(_sorted_copy(y))
    elif attr_id == 4:
        s = _sorted_copy(y)
        return _quantile_sorted_type7(s, 0.75) - _quantile_sorted_type7(s, 0.25)
    elif attr_id == 5:
        return np.min(y)
    elif attr_id == 6:
        return np.max(y)
    elif attr_id == 7:
        return _histogram_mode(y, 5)
    elif attr_id == 8:
        return _histogram_mode(y, 10)
    elif attr_id == 9:
        return _f1ecac(y)
    elif attr_id == 10:
        return _first_min_ac(y)
    elif attr_id == 11:
        return _ami_even_2_5(y)
    elif attr_id == 12:
        return _trev_1_num(y)
    elif attr_id == 13:
        return _hrv_pnn40(y)
    elif attr_id == 14:
        return _binarystats_mean_longstretch1(y)
    elif attr_id == 15:
        return _transition_matrix_sumdiagcov(y)
    elif attr_id == 16:
        return _periodicity_wang(y)
    elif attr_id == 17:
        return _embed2_dist_expfit_meandiff(y)
    elif attr_id == 18:
        return _ami40_fmmi(y)
    elif attr_id == 19:
        return _tauresrat_mean1(y)
    elif attr_id == 20:
        return _outlier_include_mdrmd(y, 1.0)
    elif attr_id == 21:
        return _outlier_include_mdrmd(y, -1.0)
    elif attr_id == 22:
        return _welch_area_5_1(y)
    elif attr_id == 23:
        return _binarystats_diff_longstretch0(y)
    elif attr_id == 24:
        return _motif3_quantile_hh(y)
    elif attr_id == 25:
        return _fluct_anal_prop_r1(y, 1, False)
    elif attr_id == 26:
        return _fluct_anal_prop_r1(y, 2, True)
    elif attr_id == 27:
        return _welch_centroid(y)
    elif attr_id == 28:
        return _local_simple_mean3_stderr(y)
    return 0.0


@njit(cache=True, nogil=True)
def eval_attr(y, attr_id):
    # total: any non-finite attribute value maps to 0.0
    v = _eval_raw(y, attr_id)
    if np.isfinite(v):
        return v
    return 0.0


@njit(cache=True, nogil=True)
def eval_block(segments, attr_ids, out):
    for i in range(segments.shape[0]):
        for j in range(attr_ids.shape[0]):
            out[i, j] = eval_attr(segments[i], attr_ids[j])


# ---------------------------------------------------------------------------
# tree split search


@njit(cache=True, nogil=True)
def best_split(x, y, n_classes):
    """Exhaustive entropy split search.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values, scanned in (feature index, threshold) order; only strictly better
    information gain displaces the incumbent, so exact ties resolve to the
    lowest feature index and then the lowest threshold. Returns
    (feature, threshold, gain); feature is -1 when no feature admits a split.
    """
    n, n_feat = x.shape
    counts = np.zeros(n_classes)
    for i in range(n):
        counts[y[i]] += 1.0
    parent = 0.0
    for c in range(n_classes):
        if counts[c] > 0.0:
            p = counts[c] / n
            parent -= p * np.log2(p)
    best_gain = -np.inf
    best_feat = -1
    best_thr = 0.0
    left = np.zeros(n_classes)
    for f in range(n_feat):
        col = x[:, f].copy()
        order = np.argsort(col)
        for c in range(n_classes):
            left[c] = 0.0
        for i in range(n - 1):
            left[y[order[i]]] += 1.0
            xi = col[order[i]]
            xj = col[order[i + 1]]
            if xj <= xi:
                continue
            thr = xi + (xj - xi) * 0.5
            if not (xi < thr < xj):
                thr = xi
            n_l = i + 1.0
            n_r = n - n_l
            child = 0.0
            for c in range(n_classes):
                lc = left[c]
                rc = counts[c] - lc
                if lc > 0.0:
                    child -= lc * np.log2(lc / n_l)
                if rc > 0.0:
                    child -= rc * np.log2(rc / n_r)
            gain = parent - child / n
            if gain > best_gain:
                best_gain = gain
                best_feat = f
                best_thr = thr
    if best_feat < 0:
        return -1, 0.0, 0.0
    return best_feat, best_thr, best_gain
