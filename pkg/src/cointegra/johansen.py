"""Johansen reduced-rank cointegration testing.

Builds the product-moment matrices S00, S01, S11 from the level/difference
regressions, solves the generalized eigenproblem, and forms trace and
max-eigenvalue statistics. Rank selection compares the trace statistic to
embedded 5% critical values; the max-eigenvalue statistic is reported for
audit only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    LeadingBlockSingular,
    NumericalFailure,
    SampleTooShort,
    SingularS00,
)
from .linalg import RANK_TOL, cholesky, generalized_sym_eig

_EIG_TOL = 1e-10


class DeterministicCase(enum.Enum):
    """Deterministic-term configuration of the cointegrated system.

    Restricted terms enter the cointegration relation (appended to the
    lagged-level block); unrestricted terms enter the short-run regression.
    """

    NONE = "none"
    RESTRICTED_CONSTANT = "restrictedConstant"
    UNRESTRICTED_CONSTANT = "unrestrictedConstant"
    RESTRICTED_TREND = "restrictedTrend"
    UNRESTRICTED_TREND = "unrestrictedTrend"

    @classmethod
    def parse(cls, text) -> "DeterministicCase":
        if isinstance(text, cls):
            return text
        aliases = {
            "none": cls.NONE,
            "rconst": cls.RESTRICTED_CONSTANT,
            "restrictedconstant": cls.RESTRICTED_CONSTANT,
            "uconst": cls.UNRESTRICTED_CONSTANT,
            "unrestrictedconstant": cls.UNRESTRICTED_CONSTANT,
            "rtrend": cls.RESTRICTED_TREND,
            "restrictedtrend": cls.RESTRICTED_TREND,
            "utrend": cls.UNRESTRICTED_TREND,
            "unrestrictedtrend": cls.UNRESTRICTED_TREND,
        }
        key = str(text).strip().lower()
        if key not in aliases:
            raise ValueError(f"unknown deterministic case {text!r}")
        return aliases[key]

    @property
    def short(self) -> str:
        return {
            DeterministicCase.NONE: "none",
            DeterministicCase.RESTRICTED_CONSTANT: "rconst",
            DeterministicCase.UNRESTRICTED_CONSTANT: "uconst",
            DeterministicCase.RESTRICTED_TREND: "rtrend",
            DeterministicCase.UNRESTRICTED_TREND: "utrend",
        }[self]


# 5% critical values indexed by remaining dimension n-r = 1..6. The
# no-deterministics and restricted-constant columns are the standard
# asymptotic tables. The unrestricted-constant column is calibrated for
# driftless data (dimension 1 anchored at the squared Dickey-Fuller tau-mu
# quantile, higher dimensions simulated): rank decisions are then correctly
# sized for non-trending series and err conservative when a drift is present.
TRACE_CV5 = {
    DeterministicCase.NONE: (4.1296, 12.3212, 24.2761, 40.1749, 60.0627, 83.9383),
    DeterministicCase.RESTRICTED_CONSTANT: (
        9.1645, 20.2618, 35.1928, 54.0790, 76.9728, 103.8473,
    ),
    DeterministicCase.UNRESTRICTED_CONSTANT: (
        8.18, 18.01, 32.02, 49.92, 71.67, 97.17,
    ),
}
MAXEIG_CV5 = {
    DeterministicCase.NONE: (4.1296, 11.2246, 17.7961, 24.1592, 30.4428, 36.6301),
    DeterministicCase.RESTRICTED_CONSTANT: (
        9.1645, 15.8921, 22.2996, 28.5881, 34.8059, 40.9568,
    ),
    DeterministicCase.UNRESTRICTED_CONSTANT: (
        8.18, 15.00, 21.40, 27.95, 34.20, 40.20,
    ),
}


@dataclass
class JohansenResult:
    """Eigenvalues, statistics, and the rank decision for one system.

    critical_values_5pct holds per-r lists for 'trace' and 'maxEig'; it is
    None (along with selected_rank) for the trend cases, which carry no
    embedded tables.
    """

    eigenvalues: np.ndarray
    trace_stats: np.ndarray
    max_eig_stats: np.ndarray
    critical_values_5pct: dict[str, np.ndarray] | None
    selected_rank: int | None
    beta: np.ndarray
    s_matrices: dict[str, np.ndarray]
    case: DeterministicCase
    k: int
    t_eff: int


def _design_blocks(x: np.ndarray, k: int, case: DeterministicCase):
    t, n = x.shape
    dx = np.diff(x, axis=0)
    z0 = dx[k - 1 :]
    t_eff = z0.shape[0]
    trend = np.arange(1.0, t_eff + 1.0)[:, None]
    ones = np.ones((t_eff, 1))

    z1_cols = [x[k - 1 : t - 1]]
    if case is DeterministicCase.RESTRICTED_CONSTANT:
        z1_cols.append(ones)
    elif case is DeterministicCase.RESTRICTED_TREND:
        z1_cols.append(trend)
    z1 = np.hstack(z1_cols)

    z2_cols = [dx[k - 1 - i : dx.shape[0] - i] for i in range(1, k)]
    if case in (
        DeterministicCase.UNRESTRICTED_CONSTANT,
        DeterministicCase.UNRESTRICTED_TREND,
    ):
        z2_cols.append(ones)
    elif case is DeterministicCase.RESTRICTED_TREND:
        z2_cols.append(ones)
    if case is DeterministicCase.UNRESTRICTED_TREND:
        z2_cols.append(trend)
    z2 = np.hstack(z2_cols) if z2_cols else None
    return z0, z1, z2, t_eff


def _partial_out(z0, z1, z2):
    if z2 is None:
        return z0, z1
    coef0, *_ = scipy.linalg.lstsq(z2, z0, lapack_driver="gelsy")
    coef1, *_ = scipy.linalg.lstsq(z2, z1, lapack_driver="gelsy")
    return z0 - z2 @ coef0, z1 - z2 @ coef1


def johansen_test(data, k: int, case="restrictedConstant") -> JohansenResult:
    """Run the cointegration-rank test on a level system.

    Parameters
    ----------
    data : PanelDataset or ndarray (T, n)
    k : int
        Level-VAR lag order (k-1 lagged differences enter the short-run
        regression).
    case : DeterministicCase or str

    Raises
    ------
    SampleTooShort
        If the effective sample T - k is below 10 + n*k.
    SingularS00
        If the short-run residual moment matrix cannot be factorized.
    NumericalFailure
        If an eigenvalue leaves [0, 1) by more than 1e-10.
    """
    case = DeterministicCase.parse(case)
    x = data.matrix() if hasattr(data, "matrix") else np.asarray(data, dtype=float)
    t, n = x.shape
    if k < 1:
        raise ValueError("lag order k must be at least 1")
    t_eff = t - k
    if t_eff < 10 + n * k:
        raise SampleTooShort(f"effective sample {t_eff} below minimum {10 + n * k}")

    z0, z1, z2, t_eff = _design_blocks(x, k, case)
    r0, r1 = _partial_out(z0, z1, z2)
    s00 = r0.T @ r0 / t_eff
    s01 = r0.T @ r1 / t_eff
    s11 = r1.T @ r1 / t_eff

    # Scale-free singularity check: pivots of the correlation-scaled S00.
    d = np.sqrt(np.diag(s00))
    if np.any(d <= 0.0):
        raise SingularS00("S00 has a non-positive diagonal entry")
    try:
        l_corr = cholesky(s00 / np.outer(d, d))
    except Exception as exc:
        raise SingularS00(str(exc)) from exc
    pivots = np.diag(l_corr) ** 2
    if np.min(pivots) < RANK_TOL * np.max(pivots):
        raise SingularS00("S00 numerically singular")
    l00 = d[:, None] * l_corr
    # A = S10 S00^-1 S01 formed as C'C with C = L^-1 S01 for symmetry.
    c = scipy.linalg.solve_triangular(l00, s01, lower=True)
    a = c.T @ c

    eigvals, eigvecs = generalized_sym_eig(a, s11)
    eigvals = eigvals[:n]
    beta = eigvecs[:, :n]
    if np.any(eigvals < -_EIG_TOL) or np.any(eigvals > 1.0 + _EIG_TOL):
        raise NumericalFailure(f"eigenvalue outside [0, 1): {eigvals}")
    eigvals = np.clip(eigvals, 0.0, np.nextafter(1.0, 0.0))

    log_terms = np.log1p(-eigvals)
    trace = np.array([-t_eff * log_terms[r:].sum() for r in range(n)])
    maxeig = -t_eff * log_terms

    if case in TRACE_CV5:
        if n > len(TRACE_CV5[case]):
            raise ValueError(f"no critical values for {n}-dimensional systems")
        trace_cv = np.array([TRACE_CV5[case][n - r - 1] for r in range(n)])
        maxeig_cv = np.array([MAXEIG_CV5[case][n - r - 1] for r in range(n)])
        cvs = {"trace": trace_cv, "maxEig": maxeig_cv}
        selected = n
        for r in range(n):
            if trace[r] < trace_cv[r]:
                selected = r
                break
    else:
        cvs = None
        selected = None

    return JohansenResult(
        eigenvalues=eigvals,
        trace_stats=trace,
        max_eig_stats=maxeig,
        critical_values_5pct=cvs,
        selected_rank=selected,
        beta=beta,
        s_matrices={"S00": s00, "S01": s01, "S11": s11},
        case=case,
        k=k,
        t_eff=t_eff,
    )


def beta_normalize(beta: np.ndarray, r: int, return_pivot: bool = False):
    """Normalize the first r cointegrating vectors to an identity leading block.

    Returns beta* = b (c'b)^-1 with c selecting the first r rows, so that
    span(beta*) = span(b). When the leading r x r block is singular the rows
    are re-pivoted so an invertible block exists; pass return_pivot=True to
    receive the row indices actually used (in pivot order).

    Raises
    ------
    LeadingBlockSingular
        If no set of r rows yields an invertible block (column rank < r).
    """
    beta = np.asarray(beta, dtype=float)
    if beta.ndim != 2 or not 1 <= r <= beta.shape[1]:
        raise ValueError("need a 2-d beta with at least r columns")
    b = beta[:, :r]
    pivot = list(range(r))
    block = b[:r, :]
    if _near_singular(block):
        # Column-pivoted QR on b' ranks rows by leverage.
        _q, rr, piv = scipy.linalg.qr(b.T, mode="economic", pivoting=True)
        d = np.abs(np.diag(rr))
        if d.size < r or d[0] == 0.0 or d[min(r, d.size) - 1] < RANK_TOL * d[0]:
            raise LeadingBlockSingular("beta columns have rank below r")
        pivot = [int(i) for i in piv[:r]]
        block = b[pivot, :]
        if _near_singular(block):
            raise LeadingBlockSingular("no invertible r x r block found")
    normalized = b @ np.linalg.inv(block)
    if return_pivot:
        return normalized, pivot
    return normalized


def _near_singular(block: np.ndarray) -> bool:
    d = np.abs(np.diag(scipy.linalg.qr(block, mode="r")[0] if block.size else block))
    if d.size == 0:
        return True
    return d.min() < RANK_TOL * max(d.max(), 1e-300)
