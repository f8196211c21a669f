"""Conventional probes run next to the estimation task for comparison:
two-time spin correlations, out-of-time-order correlators, and tripartite
mutual information.

Correlators and OTOCs are linear in the state, so averaging over the testing
inputs reduces exactly to a trace against the ensemble-mean state.  Entropies
are not, so the mutual-information curve averages per-snapshot values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .driver import StateEnsemble
from .hamiltonian import SpectralModel, propagator
from .pauli import PauliString, as_pauli_string, build_dense
from .states import partial_trace, von_neumann_entropy


@dataclass(frozen=True)
class OtocSpec:
    """Operator pair <W(tau) V W(tau) V>: W is evolved, V stays at time 0."""

    w: PauliString
    v: PauliString

    @classmethod
    def of(cls, w: PauliString | str, v: PauliString | str) -> "OtocSpec":
        return cls(w=as_pauli_string(w), v=as_pauli_string(v))

    def name(self) -> str:
        return f"{self.w.label()}_{self.v.label()}".replace("*", "")


@dataclass(frozen=True)
class TmiSpec:
    """Three pairwise-disjoint qubit subsets of the full register."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self):
        subsets = [tuple(sorted(self.a)), tuple(sorted(self.b)), tuple(sorted(self.c))]
        for name, sub in zip("abc", subsets):
            if not sub:
                raise ValueError(f"subset {name} is empty")
        combined = subsets[0] + subsets[1] + subsets[2]
        if len(set(combined)) != len(combined):
            raise ValueError(f"subsets overlap: {subsets}")
        object.__setattr__(self, "a", subsets[0])
        object.__setattr__(self, "b", subsets[1])
        object.__setattr__(self, "c", subsets[2])

    def name(self) -> str:
        return "_".join("".join(str(q) for q in sub) for sub in (self.a, self.b, self.c))


def heisenberg(
    op: PauliString | np.ndarray, model: SpectralModel, tau: float
) -> np.ndarray:
    """Full-register Heisenberg operator U(tau)^dag O U(tau).

    Input-step independent, so one evaluation serves the whole test ensemble.
    """
    if isinstance(op, PauliString):
        op = build_dense(op, model.n + 1)
    u = propagator(model, tau)
    return u.conj().T @ op @ u


def dynamical_correlation(
    ensemble: StateEnsemble, qubit: int, model: SpectralModel, tau: float
) -> complex:
    """Two-time correlation Tr[rho_mean sigma^z_1 sigma^z_qubit(tau)].

    The time-0 operator sits leftmost; the real part is what gets plotted and
    the modulus feeds the deviation criterion.
    """
    z1 = build_dense(PauliString.from_terms({1: "z"}), ensemble.n_qubits)
    zi_tau = heisenberg(PauliString.from_terms({qubit: "z"}), model, tau)
    return complex(np.einsum("ij,ji->", ensemble.mean_state @ z1, zi_tau))


def correlation_curve(
    ensemble: StateEnsemble,
    qubit: int,
    model: SpectralModel,
    taus: np.ndarray,
) -> np.ndarray:
    """``dynamical_correlation`` over a grid, evolving one matrix per tau.

    Tr[rho Z1 Zi(tau)] = Tr[U (rho Z1) U^dag Zi], and Zi is diagonal, so each
    tau costs one conjugation plus a diagonal dot per qubit.
    """
    z1 = build_dense(PauliString.from_terms({1: "z"}), ensemble.n_qubits)
    zi_diag = np.diag(build_dense(PauliString.from_terms({qubit: "z"}), ensemble.n_qubits))
    seed = ensemble.mean_state @ z1
    out = np.zeros(len(taus), dtype=complex)
    for m, tau in enumerate(np.asarray(taus, dtype=float)):
        u = propagator(model, tau)
        moved = u @ seed @ u.conj().T
        out[m] = np.dot(np.diag(moved), zi_diag)
    return out


def otoc(
    ensemble: StateEnsemble, spec: OtocSpec, model: SpectralModel, tau: float
) -> float:
    """Real part of Tr[rho_mean W(tau) V W(tau) V]."""
    value, _ = _otoc_complex(ensemble, spec, model, tau)
    return value.real


def _otoc_complex(
    ensemble: StateEnsemble, spec: OtocSpec, model: SpectralModel, tau: float
) -> tuple[complex, float]:
    dim_qubits = ensemble.n_qubits
    w_tau = heisenberg(spec.w, model, tau)
    v = build_dense(spec.v, dim_qubits)
    value = complex(
        np.einsum("ij,ji->", ensemble.mean_state @ w_tau, v @ w_tau @ v)
    )
    return value, abs(value.imag)


def otoc_curve(
    ensemble: StateEnsemble,
    spec: OtocSpec,
    model: SpectralModel,
    taus: np.ndarray,
) -> tuple[np.ndarray, float]:
    """OTOC over a grid; returns (values, max imaginary residue)."""
    values = np.zeros(len(taus))
    residue = 0.0
    for m, tau in enumerate(np.asarray(taus, dtype=float)):
        value, imag = _otoc_complex(ensemble, spec, model, tau)
        values[m] = value.real
        residue = max(residue, imag)
    return values, residue


def tmi(snapshot: np.ndarray, spec: TmiSpec) -> float:
    """Tripartite mutual information of one full-register snapshot.

    S_A + S_B + S_C - S_AB - S_AC - S_BC + S_ABC, with all entropies taken
    from partial traces of the joint reduced state on A u B u C.
    """
    union = tuple(sorted(spec.a + spec.b + spec.c))
    joint = partial_trace(snapshot, union)
    position = {q: i for i, q in enumerate(union)}

    def entropy_of(qubits: tuple[int, ...]) -> float:
        local = tuple(position[q] for q in qubits)
        if len(local) == len(union):
            return von_neumann_entropy(joint)
        return von_neumann_entropy(partial_trace(joint, local))

    return (
        entropy_of(spec.a)
        + entropy_of(spec.b)
        + entropy_of(spec.c)
        - entropy_of(tuple(sorted(spec.a + spec.b)))
        - entropy_of(tuple(sorted(spec.a + spec.c)))
        - entropy_of(tuple(sorted(spec.b + spec.c)))
        + entropy_of(union)
    )


def tmi_curve(
    ensemble: StateEnsemble,
    spec: TmiSpec,
    model: SpectralModel,
    taus: np.ndarray,
) -> np.ndarray:
    """Mean tripartite mutual information over the retained snapshots.

    Entropy is nonlinear, so unlike the correlators this cannot use the mean
    state; each retained snapshot is evolved and measured individually.
    """
    if ensemble.n_samples == 0:
        raise ValueError("ensemble retains no snapshots (tmi_cap was 0)")
    taus = np.asarray(taus, dtype=float)
    totals = np.zeros(len(taus))
    for i in range(ensemble.n_samples):
        rho0 = ensemble.sample_state(i)
        for m, tau in enumerate(taus):
            u = propagator(model, tau)
            totals[m] += tmi(u @ rho0 @ u.conj().T, spec)
    return totals / ensemble.n_samples
