"""Positivity scans of projection-compressed partial transposes at x = 1/7.

The state under test is the fifth family member at x = 1/7, moved to a frame
where level 0 and level 1 of each side are mixed by K = [[1, i], [1, -i]]/sqrt2
(level 2 untouched) before the partial transpose. Two rank-two row families
compress it:

    form 1:  rows (1, a, 0) and (0, 0, 1)       "P1"
    form 2:  rows (1, 0, b) and (0, 1, c)       "P2"

For form 2 the objects of interest are the 4th, 5th and 6th leading principal
minors of the compressed matrix; their positivity over all complex (b, c) is
the evidence that no such compression turns negative. F and G are the 5th
minor and determinant rescaled by fixed integers so their grid minima land
in a plottable window.

eval_closed_form carries hand-derived closed-form polynomials for the three
minors, transcribed verbatim from the source analysis they were copied out
of; cross_check compares them against directly computed minors and reports
deviations instead of correcting either side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from . import linalg, states
from ._fmt import complex_pair, write_csv

UNDISTILLABLE_X = 1.0 / 7.0

DEN_MINOR4 = 5531904
DEN_MINOR5 = 464679936
DEN_DET = 39033114624

SCALE_F = 1075648  # applied to the 5th leading principal minor
SCALE_G = 7529536  # applied to the determinant

WHICH_TOKENS = ("alpha1_psd", "alpha2_minor4", "alpha2_minor5", "alpha2_det", "F", "G")

_BLOCK = {"alpha2_minor4": 4, "alpha2_minor5": 5, "alpha2_det": 6, "F": 5, "G": 6}
_AUTO_SCALE = {"F": float(SCALE_F), "G": float(SCALE_G)}


class NonRealValue(ArithmeticError):
    """A closed form produced a non-negligible imaginary part. Principal
    minors of a Hermitian matrix are real, so this signals a transcription
    problem in the polynomial being evaluated."""


# --- frame and compression ---------------------------------------------------


def mixed_frame_state(x: float = UNDISTILLABLE_X) -> states.QutritState:
    state = states.build_family("v", x)
    k = states.phase_mix_on_01()
    op = states.LocalOperator(k, k.conj(), unitary_flag=True)
    return states.from_density(states.apply_local(state, op), case_id="v", x=x)


@lru_cache(maxsize=32)
def _mixed_frame_pt(x: float) -> np.ndarray:
    """Partial transpose of the frame-rotated fifth-family state."""
    return linalg.partial_transpose(mixed_frame_state(x).rho, 3, 3)


def _row_family(form_id: int, params) -> np.ndarray:
    if form_id == 1:
        a = complex(params if np.isscalar(params) else params[0])
        return np.array([[1, a, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
    if form_id == 2:
        b, c = (complex(params[0]), complex(params[1]))
        return np.array([[1, 0, b], [0, 1, c], [0, 0, 0]], dtype=complex)
    raise ValueError(f"unknown form_id {form_id}; expected 1 or 2")


def build_projected(form_id: int, params, x: float = UNDISTILLABLE_X) -> np.ndarray:
    """9x9 Hermitian compression (rank <= 6) of the partial transpose in the
    mixed frame by the chosen row family."""
    if not (0.0 < x < 1.0):
        raise states.OutOfRange(f"x must lie in (0, 1), got {x}")
    g = _mixed_frame_pt(float(x))
    r = np.kron(_row_family(form_id, params), np.eye(3, dtype=complex))
    out = r @ g @ r.conj().T
    linalg.check_hermitian(out)
    return 0.5 * (out + out.conj().T)


def direct_minors(alpha: np.ndarray) -> np.ndarray:
    """[4th, 5th, 6th] leading principal minors, computed by determinant."""
    alpha = linalg.as_matrix(alpha)
    vals = []
    for k in (4, 5, 6):
        d = np.linalg.det(alpha[:k, :k])
        vals.append(d.real)
    return np.array(vals)


# --- closed forms ------------------------------------------------------------


def eval_closed_form(which: str, b: complex, c: complex) -> float:
    """Evaluate one of the transcribed closed-form minors at (b, c).

    The polynomials mix b^2 with conj(b)^2 terms and are kept exactly as
    printed in the source they were copied from; the deeply nested sum in the
    determinant is grouped by balanced parentheses, the reading pinned by the
    constant term 9*536*5 over the common denominator. Raises NonRealValue
    when the result has a non-negligible imaginary part instead of silently
    dropping it.
    """
    b = complex(b)
    c = complex(c)
    bb = b.conjugate()
    cc = c.conjugate()
    ab2 = (b * bb).real  # |b|^2
    ac2 = (c * cc).real  # |c|^2

    if which == "minor4":
        val = (
            737
            + 268 * b**2
            + 648 * ab2**3
            + 715 * ac2
            + ab2**2 * (1184 + 63 * ac2)
            + bb * (b * (1427 + 324 * b**2) + 4 * bb * (67 + 81 * ab2) + 778 * b * ac2)
        ) / DEN_MINOR4
    elif which == "minor5":
        val = (
            536 * (5 + b**2)
            + ab2 * (8533 + 648 * b**2 - 504 * c**2)
            + 9 * ac2**2 * (715 + 63 * ab2)
            + bb**2 * (536 + 6868 * b**2 + 4095 * c**2 + 81 * ab2 * (8 + 7 * b**2 - 7 * c**2))
            + ac2 * (9233 + 2412 * b**2 + 4788 * ab2**2 + 7388 * ab2 + 2412 * bb**2)
            - 18 * b * (-65 * b + 9 * b * ab2 + 8 * bb) * cc**2
        ) / DEN_MINOR5
    elif which == "det":
        val = (
            585 * b * (8 + 7 * b**2 - 7 * c**2) * bb**3
            + bb**2 * (4824 + 50436 * b**2 + 30647 * c**2 - 65 * ac2 * (-212 - 595 * b**2 + 63 * c**2))
            + ab2 * (
                71037
                + 4680 * b**2
                + 13780 * c**2
                + 38675 * ac2**2
                + 56293 * ac2
                - 1170 * (-14 + b**2) * cc**2
            )
            + 9 * (
                536 * (5 + b**2 + c**2)
                + cc * (
                    c * (7893 + 1820 * b**2 + 520 * c**2)
                    + cc * (536 + 1058 * b**2 + 5604 * c**2 + 65 * ac2 * (8 - 2 * b**2 + 7 * c**2))
                )
            )
        ) / DEN_DET
    else:
        raise ValueError(f"unknown closed form {which!r}; expected minor4, minor5 or det")

    val = complex(val)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
        raise NonRealValue(
            f"{which} at b={b}, c={c} evaluated to {val}; imaginary residue too large"
        )
    return float(val.real)


_CLOSED_INDEX = {"minor4": 0, "minor5": 1, "det": 2}


@dataclass
class CrossCheckReport:
    which: str
    n_points: int
    max_rel_dev: float
    passed: bool
    worst: list
    non_real: list

    def to_json(self) -> dict:
        return {
            "which": self.which,
            "n_points": self.n_points,
            "max_rel_dev": self.max_rel_dev,
            "passed": self.passed,
            "worst": self.worst,
            "non_real": self.non_real,
        }


def cross_check(which: str, grid: Sequence[tuple], x: float = UNDISTILLABLE_X,
                tol: float = 1e-9, max_logged: int = 20) -> CrossCheckReport:
    """Compare a closed-form minor against the directly computed one over a
    grid of (b, c) pairs. Deviations are reported, never raised; points where
    the closed form fails to be real are collected separately."""
    if which not in _CLOSED_INDEX:
        raise ValueError(f"unknown closed form {which!r}")
    idx = _CLOSED_INDEX[which]
    entries = []
    non_real = []
    for b, c in grid:
        alpha = build_projected(2, (b, c), x)
        direct = float(direct_minors(alpha)[idx])
        try:
            closed = eval_closed_form(which, b, c)
        except NonRealValue as exc:
            non_real.append({"b": complex_pair(complex(b)), "c": complex_pair(complex(c)),
                             "error": str(exc)})
            continue
        dev = abs(closed - direct) / max(1.0, abs(direct))
        entries.append((dev, complex(b), complex(c), closed, direct))
    entries.sort(key=lambda t: -t[0])
    max_dev = entries[0][0] if entries else 0.0
    worst = [
        {
            "b": complex_pair(bb), "c": complex_pair(cc),
            "closed": cl, "direct": dr, "deviation": dv,
        }
        for dv, bb, cc, cl, dr in entries[:max_logged]
        if dv > tol
    ]
    return CrossCheckReport(
        which=which,
        n_points=len(entries) + len(non_real),
        max_rel_dev=max_dev,
        passed=(max_dev <= tol) and not non_real,
        worst=worst,
        non_real=non_real,
    )


# --- grids -------------------------------------------------------------------


def default_a_grid() -> list:
    """|a| over 20 log-spaced magnitudes in [1e-2, 1e2] x 24 phases, plus 0."""
    out = [0j]
    mags = np.logspace(-2, 2, 20)
    for m in mags:
        for p in range(24):
            out.append(m * np.exp(2j * np.pi * p / 24))
    return out


def default_real_bc_grid(lo: float = -2.0, hi: float = 2.0, n: int = 21) -> list:
    vals = np.linspace(lo, hi, n)
    return [(complex(bv), complex(cv)) for bv in vals for cv in vals]


def default_complex_b_grid_c0(lo: float = -2.0, hi: float = 2.0, n: int = 21) -> list:
    vals = np.linspace(lo, hi, n)
    return [(complex(re, im), 0j) for re in vals for im in vals]


@dataclass
class MinorScanSpec:
    which: str
    re_range: tuple = (-3.0, 3.0)
    im_range: tuple = (-3.0, 3.0)
    step: float = 0.05
    c_values: tuple = (0j,)
    scale: Optional[float] = None
    x: float = UNDISTILLABLE_X

    def __post_init__(self):
        if self.which not in WHICH_TOKENS:
            raise ValueError(f"unknown scan target {self.which!r}; expected one of {WHICH_TOKENS}")
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.re_range[1] < self.re_range[0] or self.im_range[1] < self.im_range[0]:
            raise ValueError("empty grid range")
        if not self.c_values:
            raise ValueError("need at least one c value")
        if self.scale is None:
            self.scale = _AUTO_SCALE.get(self.which, 1.0)

    def axis(self, which_axis: str) -> np.ndarray:
        lo, hi = self.re_range if which_axis == "re" else self.im_range
        n = int(round((hi - lo) / self.step)) + 1
        return lo + self.step * np.arange(n)

    def to_json(self) -> dict:
        return {
            "re_range": [self.re_range[0], self.re_range[1]],
            "im_range": [self.im_range[0], self.im_range[1]],
            "step": self.step,
            "c_values": [complex_pair(complex(c)) for c in self.c_values],
            "x": self.x,
        }


@dataclass
class GridScan:
    spec: MinorScanSpec
    samples: np.ndarray  # rows: re_b, im_b, re_c, im_c, value
    min_value: float
    argmin: tuple  # (b, c)

    def passed(self) -> bool:
        if self.spec.which in ("F", "G"):
            return bool(1.0 <= self.min_value <= 10.0)
        if self.spec.which == "alpha1_psd":
            return bool(self.min_value >= -1e-10)
        return bool(self.min_value > 0.0)

    def to_json(self) -> dict:
        return {
            "which": self.spec.which,
            "scale": self.spec.scale,
            "min_value": self.min_value,
            "argmin": {"b": complex_pair(self.argmin[0]), "c": complex_pair(self.argmin[1])},
            "grid": self.spec.to_json(),
            "pass": self.passed(),
        }


def _compression_bases(x: float, form_id: int) -> list:
    """Top-left 6x6 blocks of R_i G R_j^dag for the constant/linear row pieces."""
    g = _mixed_frame_pt(float(x))
    eye = np.eye(3, dtype=complex)
    if form_id == 2:
        parts = [
            np.array([[1, 0, 0], [0, 1, 0], [0, 0, 0]], dtype=complex),  # constant
            np.array([[0, 0, 1], [0, 0, 0], [0, 0, 0]], dtype=complex),  # b
            np.array([[0, 0, 0], [0, 0, 1], [0, 0, 0]], dtype=complex),  # c
        ]
    else:
        parts = [
            np.array([[1, 0, 0], [0, 0, 1], [0, 0, 0]], dtype=complex),  # constant
            np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]], dtype=complex),  # a
        ]
    rs = [np.kron(p, eye) for p in parts]
    return [[(ri @ g @ rj.conj().T)[:6, :6] for rj in rs] for ri in rs]


def _batched_values(spec: MinorScanSpec, b_vals: np.ndarray, c_val: complex) -> np.ndarray:
    form_id = 1 if spec.which == "alpha1_psd" else 2
    bases = _compression_bases(spec.x, form_id)
    n = b_vals.size
    if form_id == 2:
        coefs = [np.ones(n), b_vals, np.full(n, c_val)]
    else:
        coefs = [np.ones(n), b_vals]
    # assemble sum_{i,j} coef_i conj(coef_j) base_ij
    alphas = np.zeros((n, 6, 6), dtype=complex)
    for i, ci in enumerate(coefs):
        for j, cj in enumerate(coefs):
            alphas += (ci * cj.conj())[:, None, None] * bases[i][j]
    if spec.which == "alpha1_psd":
        return np.linalg.eigvalsh(alphas)[:, 0]
    k = _BLOCK[spec.which]
    return np.linalg.det(alphas[:, :k, :k]).real * spec.scale


def scan(spec: MinorScanSpec, out_csv: Optional[str] = None) -> GridScan:
    """Evaluate the chosen quantity over the grid. Rows are ordered by
    (c value, re_b, im_b); for alpha1_psd the b columns carry the a parameter
    and the value is the smallest eigenvalue on the six support rows."""
    re_axis = spec.axis("re")
    im_axis = spec.axis("im")
    bb, ii = np.meshgrid(re_axis, im_axis, indexing="ij")
    b_flat = (bb + 1j * ii).reshape(-1)
    rows = []
    best = (np.inf, 0j, 0j)
    for c_val in spec.c_values:
        c_val = complex(c_val)
        values = _batched_values(spec, b_flat, c_val)
        if not np.all(np.isfinite(values)):
            raise FloatingPointError("non-finite value in grid scan")
        block = np.column_stack([
            b_flat.real, b_flat.imag,
            np.full(b_flat.size, c_val.real), np.full(b_flat.size, c_val.imag),
            values,
        ])
        rows.append(block)
        k = int(np.argmin(values))
        if values[k] < best[0]:
            best = (float(values[k]), complex(b_flat[k]), c_val)
    samples = np.vstack(rows)
    result = GridScan(spec=spec, samples=samples, min_value=best[0], argmin=(best[1], best[2]))
    if out_csv is not None:
        write_csv(out_csv, ["re_b", "im_b", "re_c", "im_c", "value"], samples)
    return result


def value_at(which: str, b: complex, c: complex, x: float = UNDISTILLABLE_X,
             scale: Optional[float] = None) -> float:
    """Single-point evaluation matching scan()'s value column."""
    if scale is None:
        scale = _AUTO_SCALE.get(which, 1.0)
    if which == "alpha1_psd":
        alpha = build_projected(1, b, x)
        return float(np.linalg.eigvalsh(alpha[:6, :6])[0])
    alpha = build_projected(2, (b, c), x)
    k = _BLOCK[which]
    return float(np.linalg.det(alpha[:k, :k]).real) * scale


def refine_minimum(result: GridScan, n_seeds: int = 10) -> dict:
    """Local descent from the smallest grid values, to support positivity
    claims beyond bare grid resolution. c is held at each seed's value."""
    spec = result.spec
    order = np.argsort(result.samples[:, 4])[:n_seeds]
    best = {"value": result.min_value,
            "b": complex(result.argmin[0]), "c": complex(result.argmin[1])}
    for idx in order:
        re_b, im_b, re_c, im_c, _ = result.samples[idx]
        c_val = complex(re_c, im_c)

        def f(z):
            return value_at(spec.which, complex(z[0], z[1]), c_val, spec.x, spec.scale)

        res = minimize(f, [re_b, im_b], method="Nelder-Mead",
                       options={"xatol": 1e-7, "fatol": 1e-12, "maxiter": 200})
        if res.fun < best["value"]:
            best = {"value": float(res.fun), "b": complex(res.x[0], res.x[1]), "c": c_val}
    return best


def psd_scan_form1(a_grid: Optional[Sequence[complex]] = None,
                   x: float = UNDISTILLABLE_X) -> tuple[list, bool]:
    """Smallest eigenvalue of the form-1 compression per sampled a; overall
    verdict is PSD-everywhere at tolerance 1e-10."""
    if a_grid is None:
        a_grid = default_a_grid()
    entries = []
    all_psd = True
    for a in a_grid:
        alpha = build_projected(1, a, x)
        min_eig = float(np.linalg.eigvalsh(alpha)[0])
        ok = min_eig >= -1e-10
        all_psd = all_psd and ok
        entries.append({"a": complex(a), "min_eigenvalue": min_eig, "is_psd": ok})
    return entries, all_psd
