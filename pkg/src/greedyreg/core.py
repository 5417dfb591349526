"""Shared domain types for greedy dictionary regression.

Everything here is plain data: datasets, materialized design matrices,
sparse models, and per-run fit reports.  All types are immutable after
construction (backing arrays are marked read-only) so they can be shared
freely across concurrent fits.
"""

from dataclasses import dataclass, field

import numpy as np

# Columns with empirical norm below this are "dead": they are never
# selectable (normalizing them would divide by ~zero).
DEAD_COLUMN_NORM = 1e-12

# Termination reasons recorded by fits and reports.
NO_ACTIVE_ATOM = "no_active_atom"
RESIDUAL_RATIO = "residual_ratio"
FIXED_K = "fixed_k"
DICTIONARY_EXHAUSTED = "dictionary_exhausted"
ZERO_RESIDUAL = "zero_residual"

TERMINATION_REASONS = frozenset(
    {NO_ACTIVE_ATOM, RESIDUAL_RATIO, FIXED_K, DICTIONARY_EXHAUSTED, ZERO_RESIDUAL}
)


class NonFinite(ValueError):
    """A dataset entry is NaN or infinite."""


class LengthMismatch(ValueError):
    """Paired vectors have different lengths."""


class EmptyData(ValueError):
    """A dataset with zero samples."""


def _frozen_array(values, dtype=float, ndim=None):
    arr = np.array(values, dtype=dtype)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Paired inputs (m, d) and scalar targets (m,) with a train/test role."""

    inputs: np.ndarray
    targets: np.ndarray
    role: str = "train"

    def __post_init__(self):
        inputs = np.array(self.inputs, dtype=float)
        if inputs.ndim == 1:
            inputs = inputs.reshape(-1, 1)
        inputs.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", _frozen_array(self.targets, ndim=1))

    @property
    def m(self) -> int:
        return self.targets.shape[0]

    @property
    def d(self) -> int:
        return self.inputs.shape[1]


def validate_dataset(d: Dataset) -> Dataset:
    """Return ``d`` unchanged if its invariants hold, else raise.

    Raises EmptyData for zero samples, LengthMismatch when inputs and
    targets disagree in length, NonFinite on any NaN/Inf entry.
    """
    if d.m == 0 or d.inputs.shape[0] == 0:
        raise EmptyData("dataset has no samples")
    if d.inputs.shape[0] != d.targets.shape[0]:
        raise LengthMismatch(
            f"{d.inputs.shape[0]} inputs vs {d.targets.shape[0]} targets"
        )
    if not np.isfinite(d.inputs).all():
        raise NonFinite("non-finite input entry")
    if not np.isfinite(d.targets).all():
        raise NonFinite("non-finite target entry")
    return d


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Atoms evaluated at the training inputs, one column per atom.

    ``column_norms`` always holds the empirical norms of the *raw*
    columns; when ``normalized`` is set the stored columns have been
    scaled to unit empirical norm and ``column_norms`` are the scale
    factors needed to map fitted coefficients back to the raw atoms.
    Columns with raw norm below DEAD_COLUMN_NORM are dead and never
    selectable.
    """

    columns: np.ndarray
    column_norms: np.ndarray
    normalized: bool = False
    live: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "columns", _frozen_array(self.columns, ndim=2))
        object.__setattr__(
            self, "column_norms", _frozen_array(self.column_norms, ndim=1)
        )
        if self.column_norms.shape[0] != self.columns.shape[1]:
            raise LengthMismatch("one norm per column required")
        object.__setattr__(
            self, "live", _frozen_array(self.column_norms >= DEAD_COLUMN_NORM, bool)
        )

    @classmethod
    def from_columns(cls, columns) -> "DesignMatrix":
        columns = np.asarray(columns, dtype=float)
        norms = np.sqrt(np.mean(columns**2, axis=0))
        return cls(columns, norms, normalized=False)

    @property
    def m(self) -> int:
        return self.columns.shape[0]

    @property
    def n(self) -> int:
        return self.columns.shape[1]

    def scales(self) -> np.ndarray:
        """Per-column factor mapping column-basis coefficients to raw atoms."""
        if self.normalized:
            return self.column_norms
        return np.ones(self.n)

    def to_raw_coefficients(self, coefficients, selected=None) -> np.ndarray:
        """Rescale coefficients fitted on stored columns to the raw-atom basis."""
        coefficients = np.asarray(coefficients, dtype=float)
        if not self.normalized:
            return coefficients.copy()
        if selected is None:
            return coefficients / self.column_norms
        return coefficients / self.column_norms[list(selected)]


@dataclass(frozen=True, eq=False)
class SparseModel:
    """Ordered atom selection plus raw-atom coefficients.

    Selection order is preserved so prefix models (first k atoms with
    their own coefficients) can be rebuilt for k-sweeps.
    """

    selected: tuple
    coefficients: np.ndarray
    truncation_bound: float | None = None

    def __post_init__(self):
        selected = tuple(int(i) for i in self.selected)
        if len(set(selected)) != len(selected):
            raise ValueError("selected atom indices must be distinct")
        object.__setattr__(self, "selected", selected)
        object.__setattr__(
            self, "coefficients", _frozen_array(self.coefficients, ndim=1)
        )
        if len(selected) != self.coefficients.shape[0]:
            raise LengthMismatch("one coefficient per selected atom required")

    @property
    def sparsity(self) -> int:
        return len(self.selected)


def sparse_model_to_lines(model: SparseModel) -> list[str]:
    """Serialize a model to a line-oriented text block (floats via repr)."""
    bound = (
        "none" if model.truncation_bound is None else repr(float(model.truncation_bound))
    )
    lines = [f"truncation_bound={bound}"]
    for idx, coef in zip(model.selected, model.coefficients):
        lines.append(f"{idx},{float(coef)!r}")
    return lines


def sparse_model_from_lines(lines) -> SparseModel:
    lines = list(lines)
    if not lines or not lines[0].startswith("truncation_bound="):
        raise ValueError("missing truncation_bound header line")
    bound_text = lines[0].split("=", 1)[1]
    bound = None if bound_text == "none" else float(bound_text)
    selected, coefficients = [], []
    for line in lines[1:]:
        idx_text, coef_text = line.split(",", 1)
        selected.append(int(idx_text))
        coefficients.append(float(coef_text))
    return SparseModel(tuple(selected), np.array(coefficients), bound)


@dataclass(frozen=True)
class FitReport:
    """One benchmark row: a single (method, parameter, sigma, seed) run."""

    method: str
    parameter: float
    sigma: float | None
    seed: int
    test_rmse: float
    train_rmse: float
    sparsity: int
    iterations: int
    termination: str
    seconds: float
