"""Two-positivity counterexample for the trace-preserving extended map.

On two qubits with basis |++>, |+->, |-+>, |--> the block matrix
sum_ij E_ij (x) M_ij is positive while sum_ij E_ij (x) Lambda(M_ij) acquires a
negative eigenvalue once m < 2 delta - 1.  M_11 is the paos state
(|++><++| + singlet)/2, on which Lambda reduces to [1 + mP]; the remaining
blocks are state-symmetric and therefore fixed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pairspace import PairBasis

POS_TOL = 1e-10
FORMULA_TOL = 1e-10
# cells within rounding of m = 2 delta - 1 have a zero eigenvalue, not a negative one
BOUNDARY_MARGIN = 1e-12

_P4 = PairBasis(2).permutation


def m11() -> np.ndarray:
    return np.array([
        [0.5, 0, 0, 0],
        [0, 0.25, -0.25, 0],
        [0, -0.25, 0.25, 0],
        [0, 0, 0, 0],
    ])


def m11_evolved(m: float) -> np.ndarray:
    """Explicit image of M_11 under Lambda with a . s = 0."""
    q = 0.25 * (1 - m)
    return np.array([
        [0.5 * (m + 1), 0, 0, 0],
        [0, q, -q, 0],
        [0, -q, q, 0],
        [0, 0, 0, 0],
    ])


def corner_block(delta: float) -> np.ndarray:
    """E_11 (x) diag(delta, 0) = delta |++><++|."""
    out = np.zeros((4, 4))
    out[0, 0] = delta
    return out


def before_eigenvalues_formula(delta: float) -> list[float]:
    r = math.sqrt(20 * delta ** 2 - 4 * delta + 1)
    return [0.5 * delta + 0.25 + 0.25 * r, 0.5 * delta + 0.25 - 0.25 * r, 0.5, 0.0]


def after_eigenvalue_formula(delta: float, m: float) -> float:
    r = math.sqrt(m * m - 4 * m * delta + 2 * m + 20 * delta ** 2 - 4 * delta + 1)
    return 0.25 * m + 0.5 * delta + 0.25 - 0.25 * r


def predicts_negative(delta: float, m: float) -> bool:
    return m < 2 * delta - 1 - BOUNDARY_MARGIN


def _assemble(blocks) -> np.ndarray:
    return np.block([[blocks[0][0], blocks[0][1]], [blocks[1][0], blocks[1][1]]])


@dataclass(frozen=True)
class BlockWitness:
    delta: float
    m: float
    blocks: tuple
    evolved_blocks: tuple

    @property
    def before(self) -> np.ndarray:
        return _assemble(self.blocks)

    @property
    def after(self) -> np.ndarray:
        return _assemble(self.evolved_blocks)


def build_witness(delta: float, m: float) -> BlockWitness:
    if not delta > 0:
        raise ValueError("delta must be > 0")
    if abs(m) > 0.5 + 1e-12:
        raise ValueError("m must lie in [-1/2, 1/2]")
    corner = corner_block(delta)
    first = m11()
    evolved = (np.eye(4) + m * _P4) @ first
    blocks = ((first, corner), (corner, corner))
    evolved_blocks = ((evolved, corner), (corner, corner))
    return BlockWitness(float(delta), float(m), blocks, evolved_blocks)


def _residual_to_nearest(eigs: np.ndarray, target: float) -> float:
    return float(np.min(np.abs(eigs - target)))


def certify(w: BlockWitness) -> dict:
    """Eigenvalues of both block matrices, positivity verdicts and formula residuals."""
    before = np.linalg.eigvalsh(w.before)
    after = np.linalg.eigvalsh(w.after)
    residuals = {
        f"before_{k}": _residual_to_nearest(before, v)
        for k, v in enumerate(before_eigenvalues_formula(w.delta))
    }
    residuals["after_radical"] = _residual_to_nearest(after, after_eigenvalue_formula(w.delta, w.m))
    residuals["evolved_block"] = float(np.max(np.abs(w.evolved_blocks[0][0] - m11_evolved(w.m))))
    return {
        "delta": w.delta,
        "m": w.m,
        "before_eigs": before.tolist(),
        "after_eigs": after.tolist(),
        "verdicts": {
            "before_positive": bool(before.min() >= -POS_TOL),
            "after_positive": bool(after.min() >= -POS_TOL),
            "predicted_negative": predicts_negative(w.delta, w.m),
            "formulas_match": all(r <= FORMULA_TOL for r in residuals.values()),
        },
        "formula_residuals": residuals,
    }


SCAN_HEADER = ("delta", "m", "before_min_eig", "after_min_eig", "before_positive",
               "after_positive", "predicted_negative", "prediction_consistent")


def scan_cell(delta: float, m: float) -> list:
    cert = certify(build_witness(delta, m))
    v = cert["verdicts"]
    # the inequality only predicts negativity; when it does not fire any verdict is consistent
    consistent = (not v["predicted_negative"]) or (not v["after_positive"])
    return [float(delta), float(m), min(cert["before_eigs"]), min(cert["after_eigs"]),
            int(v["before_positive"]), int(v["after_positive"]),
            int(v["predicted_negative"]), int(consistent)]


def scan(delta_grid, m_grid) -> list[list]:
    for delta in delta_grid:
        if not 0 < delta < 0.5:
            raise ValueError(f"delta {delta} outside (0, 1/2)")
    return [scan_cell(d, m) for d in delta_grid for m in m_grid]
