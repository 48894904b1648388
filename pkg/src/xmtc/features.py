"""The 29 interval attributes: 7 summary statistics plus the catch22 set.

Attributes are evaluated on raw segment values as floats (no global
z-scoring); only the two outlier-timing attributes standardize internally,
which matches how interval forests normally consume the catch22 set. Any
attribute whose natural definition degenerates (constant segment, empty
residual, non-finite intermediate) returns 0.0, with one pinned exception:
the histogram modes of a constant segment are the constant itself.

Attribute ids, in the fixed pool order used everywhere (feature matrices,
serialized models):

==  =============================================
 0  mean
 1  standard deviation (sample, ddof=1)
 2  least-squares slope against the 0-based index
 3  median
 4  interquartile range (type-7 quantiles at position (n - 1) * q)
 5  minimum
 6  maximum
 7  DN_HistogramMode_5
 8  DN_HistogramMode_10
 9  CO_f1ecac
10  CO_FirstMin_ac
11  CO_HistogramAMI_even_2_5
12  CO_trev_1_num
13  MD_hrv_classic_pnn40
14  SB_BinaryStats_mean_longstretch1
15  SB_TransitionMatrix_3ac_sumdiagcov
16  PD_PeriodicityWang_th0_01
17  CO_Embed2_Dist_tau_d_expfit_meandiff
18  IN_AutoMutualInfoStats_40_gaussian_fmmi
19  FC_LocalSimple_mean1_tauresrat
20  DN_OutlierInclude_p_001_mdrmd
21  DN_OutlierInclude_n_001_mdrmd
22  SP_Summaries_welch_rect_area_5_1
23  SB_BinaryStats_diff_longstretch0
24  SB_MotifThree_quantile_hh
25  SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1
26  SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1
27  SP_Summaries_welch_rect_centroid
28  FC_LocalSimple_mean3_stderr
==  =============================================

Conventions shared by several attributes, pinned here once:

* autocorrelation: biased estimator, ac(k) = sum (y_t - m)(y_{t+k} - m) /
  sum (y_t - m)^2; "first zero" is the first lag with ac <= 0 (n if none,
  0 for a constant segment, in which case consumers fall back as documented
  per attribute);
* tercile symbolization (ids 15, 24) uses quantiles interpolated on the
  midpoint grid (i + 0.5) / n with clamped extremes, and symbols are assigned
  by v <= q(1/3) -> 0, v <= q(2/3) -> 1, else 2;
* the Welch summaries (ids 22, 27) use a single rectangular segment of the
  mean-centred values, nfft = 2^ceil(log2(n)), one-sided density
  |X_k|^2 / (2 pi n) with interior bins doubled, on the angular grid
  f_k = 2 pi k / nfft; the centroid is the first frequency where cumulative
  power exceeds half the total;
* the spline detrend of id 16 is a least-squares cubic with a single interior
  knot at the midpoint of the normalized time axis; a segment the spline fits
  to within float noise (residual power <= 1e-12 of the segment's centred
  power) is treated as aperiodic and scores 0.
"""

from __future__ import annotations

import numpy as np

from . import _kernels

__all__ = [
    "SUMMARY_NAMES",
    "CATCH22_NAMES",
    "ATTRIBUTE_NAMES",
    "N_ATTRIBUTES",
    "eval_attribute",
    "summary7",
    "catch22",
    "warm_up",
]

SUMMARY_NAMES = (
    "mean",
    "std",
    "slope",
    "median",
    "iqr",
    "min",
    "max",
)

CATCH22_NAMES = (
    "DN_HistogramMode_5",
    "DN_HistogramMode_10",
    "CO_f1ecac",
    "CO_FirstMin_ac",
    "CO_HistogramAMI_even_2_5",
    "CO_trev_1_num",
    "MD_hrv_classic_pnn40",
    "SB_BinaryStats_mean_longstretch1",
    "SB_TransitionMatrix_3ac_sumdiagcov",
    "PD_PeriodicityWang_th0_01",
    "CO_Embed2_Dist_tau_d_expfit_meandiff",
    "IN_AutoMutualInfoStats_40_gaussian_fmmi",
    "FC_LocalSimple_mean1_tauresrat",
    "DN_OutlierInclude_p_001_mdrmd",
    "DN_OutlierInclude_n_001_mdrmd",
    "SP_Summaries_welch_rect_area_5_1",
    "SB_BinaryStats_diff_longstretch0",
    "SB_MotifThree_quantile_hh",
    "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1",
    "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1",
    "SP_Summaries_welch_rect_centroid",
    "FC_LocalSimple_mean3_stderr",
)

ATTRIBUTE_NAMES = SUMMARY_NAMES + CATCH22_NAMES
N_ATTRIBUTES = len(ATTRIBUTE_NAMES)


def _as_segment(values: np.ndarray) -> np.ndarray:
    seg = np.ascontiguousarray(values, dtype=np.float64)
    if seg.ndim != 1 or seg.shape[0] < 3:
        raise ValueError("segment must be 1-D with at least 3 values")
    return seg


def eval_attribute(values: np.ndarray, attr_id: int) -> float:
    """Evaluate one attribute on a raw segment of at least 3 values."""
    if not 0 <= attr_id < N_ATTRIBUTES:
        raise ValueError(f"attribute id must be in 0..{N_ATTRIBUTES - 1}")
    return float(_kernels.eval_attr(_as_segment(values), attr_id))


def summary7(values: np.ndarray) -> np.ndarray:
    """The seven summary statistics (ids 0..6) of one segment."""
    seg = _as_segment(values)
    return np.array([_kernels.eval_attr(seg, i) for i in range(7)])


def catch22(values: np.ndarray) -> np.ndarray:
    """The 22 canonical features (ids 7..28) of one segment."""
    seg = _as_segment(values)
    return np.array([_kernels.eval_attr(seg, i) for i in range(7, 29)])


def warm_up() -> None:
    """Force JIT compilation of every attribute kernel on a tiny input."""
    seg = np.sin(np.arange(64, dtype=np.float64))
    for attr_id in range(N_ATTRIBUTES):
        _kernels.eval_attr(seg, attr_id)
    x = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    _kernels.best_split(x, np.array([0, 1, 1, 0], dtype=np.int64), 2)
    out = np.empty((1, 2))
    _kernels.eval_block(seg.reshape(1, -1), np.array([0, 7], dtype=np.int64), out)
