"""
Quantum-Kernel Support Vector Classifier

Kernel:
    K[i, j] = g( F( W ρ_i W†, W ρ_j W† ) )

where W is the layered Rzz/Ry feature-map unitary, F is the Uhlmann
fidelity and g is either the identity or the rescaling
x ↦ tan(π x / 2.03), which spreads out the densely populated region
of fidelities near 1.

The dual soft-margin problem is solved by scikit-learn's SVC on the
precomputed kernel (libsvm SMO). Rescaled kernels are not always PSD;
when the smallest eigenvalue is below -1e-6 the diagonal is shifted by
the deficit and a warning is logged.

Feature-map angles are fixed at a seeded uniform draw and never trained.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd
from sklearn.metrics import roc_auc_score
from sklearn.svm import SVC

from losses.divergences import pairwise_fidelity
from quantum.channel import AnsatzSpec, build_unitary
from quantum.linalg import dagger, hermitianize, make_rng
from quantum.states import as_batch

logger = logging.getLogger(__name__)

TAN_DIVISOR = 2.03
PSD_SHIFT_TOL = 1e-6
SYMMETRY_TOL = 1e-9


class KernelScaling(Enum):
    NONE = "none"
    TAN = "tan"

    @classmethod
    def parse(cls, value: Union[str, "KernelScaling"]) -> "KernelScaling":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"Unknown kernel scaling '{value}' (expected none or tan)") from None


@dataclass(frozen=True)
class KernelSpec:
    """
    Feature map and rescaling.

    Attributes:
        n_qubits: Qubits of the classified states
        n_layers: Feature-map ansatz layers
        scaling: Post-fidelity rescaling
    """

    n_qubits: int
    n_layers: int = 3
    scaling: KernelScaling = KernelScaling.NONE

    def __post_init__(self):
        if self.n_layers < 1:
            raise ValueError(f"Feature map needs at least one layer, got {self.n_layers}")
        object.__setattr__(self, "scaling", KernelScaling.parse(self.scaling))

    @property
    def feature_map(self) -> AnsatzSpec:
        return AnsatzSpec(self.n_qubits, self.n_layers)


def feature_map_params(spec: KernelSpec, seed: int) -> np.ndarray:
    """Seeded feature-map angles, uniform in [-π, π)."""
    return make_rng(seed).uniform(-np.pi, np.pi, spec.feature_map.n_params)


def apply_feature_map(states, spec: KernelSpec, params: np.ndarray) -> np.ndarray:
    mats = as_batch(states)
    if mats.shape[-1] != 2**spec.n_qubits:
        raise ValueError(
            f"Feature map acts on {spec.n_qubits} qubits, states have dimension {mats.shape[-1]}"
        )
    w = build_unitary(spec.feature_map, params)
    return hermitianize(w @ mats @ dagger(w))


def rescale(fidelities: np.ndarray, scaling: KernelScaling) -> np.ndarray:
    if scaling is KernelScaling.TAN:
        return np.tan(np.pi * fidelities / TAN_DIVISOR)
    return fidelities


def kernel_matrix(states, spec: KernelSpec, params: np.ndarray, others=None) -> np.ndarray:
    """
    Fidelity kernel between `states` and `others` (or within `states`).

    Args:
        states: Row states
        spec: Feature map and rescaling
        params: Feature-map angles
        others: Column states; omit for the symmetric training kernel

    Returns:
        Real matrix of shape (len(states), len(others))
    """
    rows = apply_feature_map(states, spec, params)
    cols = None if others is None else apply_feature_map(others, spec, params)
    return rescale(pairwise_fidelity(rows, cols), spec.scaling)


@dataclass
class SvmModel:
    """
    Trained dual SVM.

    Attributes:
        alphas: Dual coefficients α_i ≥ 0 for every training point
        bias: Intercept b
        support: Indices of support vectors
        c_reg: Box constraint C
        estimator: Fitted scikit-learn SVC
        shift: Diagonal shift applied to make the kernel PSD
    """

    alphas: np.ndarray
    bias: float
    support: np.ndarray
    c_reg: float
    estimator: SVC
    shift: float = 0.0

    def decision_function(self, k_test: np.ndarray) -> np.ndarray:
        return self.estimator.decision_function(np.asarray(k_test, dtype=float))


def _check_labels(labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels).astype(int).ravel()
    if not np.all(np.isin(labels, (-1, 1))):
        raise ValueError("Labels must be -1 or +1")
    return labels


def fit(kernel: np.ndarray, labels, c_reg: float = 1.0) -> SvmModel:
    """
    Solve the soft-margin dual on a precomputed kernel.

    Raises:
        ValueError: On a non-symmetric kernel, bad labels or one class only
    """
    kernel = np.asarray(kernel, dtype=float)
    labels = _check_labels(labels)
    if kernel.ndim != 2 or kernel.shape[0] != kernel.shape[1]:
        raise ValueError(f"Training kernel must be square, got {kernel.shape}")
    if kernel.shape[0] != labels.size:
        raise ValueError(f"Kernel has {kernel.shape[0]} rows but {labels.size} labels were given")
    if np.max(np.abs(kernel - kernel.T)) > SYMMETRY_TOL:
        raise ValueError("Training kernel is not symmetric")
    if np.unique(labels).size < 2:
        raise ValueError("Training labels contain a single class")
    if c_reg <= 0:
        raise ValueError(f"c_reg must be positive, got {c_reg}")

    shift = 0.0
    smallest = float(np.linalg.eigvalsh(0.5 * (kernel + kernel.T))[0])
    if smallest < -PSD_SHIFT_TOL:
        shift = -smallest
        logger.warning("Kernel is not PSD (min eigenvalue %.3e); shifting diagonal by %.3e", smallest, shift)
        kernel = kernel + shift * np.eye(kernel.shape[0])

    estimator = SVC(kernel="precomputed", C=c_reg, tol=1e-5)
    estimator.fit(kernel, labels)
    alphas = np.zeros(labels.size)
    alphas[estimator.support_] = np.abs(estimator.dual_coef_[0])
    return SvmModel(
        alphas=alphas,
        bias=float(estimator.intercept_[0]),
        support=np.asarray(estimator.support_),
        c_reg=float(c_reg),
        estimator=estimator,
        shift=shift,
    )


@dataclass
class ClassificationScore:
    accuracy: float
    auc: Optional[float]

    def to_dict(self) -> dict:
        return {"accuracy": self.accuracy, "auc": self.auc}


def score_decisions(decisions, labels) -> ClassificationScore:
    """
    Accuracy of sign(decision) and ROC AUC of the decision values.

    AUC is None when only one class is present.
    """
    decisions = np.asarray(decisions, dtype=float).ravel()
    labels = _check_labels(labels)
    if decisions.size != labels.size:
        raise ValueError(f"{decisions.size} decision values for {labels.size} labels")
    predicted = np.where(decisions > 0, 1, -1)
    accuracy = float(np.mean(predicted == labels))
    auc = float(roc_auc_score(labels, decisions)) if np.unique(labels).size == 2 else None
    return ClassificationScore(accuracy=accuracy, auc=auc)


def evaluate(model: SvmModel, k_test: np.ndarray, labels) -> ClassificationScore:
    """Score a trained SVM on a test-vs-train kernel."""
    k_test = np.asarray(k_test, dtype=float)
    if k_test.shape[1] != model.alphas.size:
        raise ValueError(
            f"Test kernel has {k_test.shape[1]} columns, model was trained on {model.alphas.size} points"
        )
    return score_decisions(model.decision_function(k_test), labels)


def export_kernel_csv(kernel: np.ndarray, path: Union[str, Path]) -> None:
    """Write a kernel matrix as a headerless CSV."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(np.asarray(kernel, dtype=float)).to_csv(path, header=False, index=False)


class QSVC:
    """
    Kernel classifier over density matrices.

    Usage:
        clf = QSVC(KernelSpec(n_qubits=1, scaling="tan"), seed=0)
        clf.train(train_states, train_labels)
        score, k_test = clf.evaluate(test_states, test_labels)
    """

    def __init__(self, spec: KernelSpec, seed: int = 0, c_reg: float = 1.0):
        self.spec = spec
        self.seed = seed
        self.c_reg = c_reg
        self.params = feature_map_params(spec, seed)
        self.train_states: Optional[np.ndarray] = None
        self.model: Optional[SvmModel] = None
        self.train_kernel: Optional[np.ndarray] = None

    def train(self, states, labels) -> "QSVC":
        self.train_states = as_batch(states)
        self.train_kernel = kernel_matrix(self.train_states, self.spec, self.params)
        self.model = fit(self.train_kernel, labels, self.c_reg)
        return self

    def test_kernel(self, states) -> np.ndarray:
        if self.model is None:
            raise RuntimeError("QSVC.train must be called before scoring")
        return kernel_matrix(states, self.spec, self.params, self.train_states)

    def decision_function(self, states) -> np.ndarray:
        return self.model.decision_function(self.test_kernel(states))

    def evaluate(self, states, labels) -> Tuple[ClassificationScore, np.ndarray]:
        """Score on held-out states; also returns the test kernel."""
        k_test = self.test_kernel(states)
        return evaluate(self.model, k_test, labels), k_test
