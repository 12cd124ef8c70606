"""Noise-targeted 2-CHSH configurations found by linear programming.

The doubled CHSH scenario is described by a 16x16 probability matrix over
Alice's and Bob's ordered two-qubit projector lists.  A linear program
searches for the Bell coefficient matrix that maximizes the score of a
state depolarized at a chosen design visibility, subject to every
deterministic local strategy scoring at most 1 and to unit coefficient
bounds.  Constraint generation keeps the working LP small: the 65,536
local vertices are scanned exactly for violations and only violated ones
enter the solver.

Solved configurations are normalized to a [0, 1] Bell matrix, scored via
``Tr(P_eta B^T)``, bounded classically by exhaustive strategy search, and
serialized to JSON for reuse.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from .qmath import (
    DepolarizingChannel,
    SIGMA_X,
    SIGMA_Z,
    apply_depolarizing,
    epr_state,
    kron,
    permute_qubits,
)
from .robustness import GapPolynomial, extract_gap_polynomial

SOLVER_VERSION = 1
FEASIBILITY_TOL = 1e-7
DEGENERATE_GAP_TOL = 1e-9
SCHEMA_VERSION = 1

_N_VERTICES = 2**16
_TO_CANONICAL = (0, 2, 1, 3)


class SolverError(RuntimeError):
    """The LP solve failed or did not reach feasibility."""

    def __init__(self, message: str, iterations: int = 0, worst_violation: float = 0.0):
        super().__init__(
            f"{message} (iterations={iterations}, worst violation={worst_violation:.3e})"
        )
        self.iterations = iterations
        self.worst_violation = worst_violation


def _single_qubit_projector(observable: np.ndarray, sign: float) -> np.ndarray:
    return (np.eye(2) + sign * observable) / 2


def _pair_projectors(basis: dict[int, np.ndarray]) -> list[np.ndarray]:
    """The 16 ordered two-qubit projectors of one party.

    Setting blocks run over question pairs (0,0), (0,1), (1,0), (1,1);
    within a block the outcome signs run (+,+), (+,-), (-,+), (-,-).
    """
    out = []
    for x1 in (0, 1):
        for x2 in (0, 1):
            for s1 in (1.0, -1.0):
                for s2 in (1.0, -1.0):
                    out.append(
                        np.kron(
                            _single_qubit_projector(basis[x1], s1),
                            _single_qubit_projector(basis[x2], s2),
                        )
                    )
    return out


def alice_projectors() -> list[np.ndarray]:
    return _pair_projectors({0: SIGMA_X, 1: SIGMA_Z})


def bob_projectors() -> list[np.ndarray]:
    return _pair_projectors(
        {
            0: (SIGMA_X + SIGMA_Z) / np.sqrt(2),
            1: (SIGMA_X - SIGMA_Z) / np.sqrt(2),
        }
    )


@lru_cache(maxsize=1)
def _joint_operators() -> np.ndarray:
    """All 256 permuted A_i (x) B_j operators, shape (16, 16, 16, 16)."""
    alice = alice_projectors()
    bob = bob_projectors()
    joint = np.empty((16, 16, 16, 16), dtype=complex)
    for i, a in enumerate(alice):
        for j, b in enumerate(bob):
            joint[i, j] = permute_qubits(kron(a, b), _TO_CANONICAL)
    return joint


def build_probability_matrix(eta: float) -> np.ndarray:
    """Outcome probabilities (with the 1/16 setting weight folded in).

    Entry (i, j) is Tr(rho_eta (A_i (x) B_j)) / 16 for the depolarized
    two-pair input at visibility ``eta``; the 256 entries sum to 1.
    """
    channel = DepolarizingChannel(eta, 4)
    rho = apply_depolarizing(channel, np.kron(epr_state(), epr_state()))
    return np.einsum("ijkl,lk->ij", _joint_operators(), rho).real / 16


@lru_cache(maxsize=1)
def enumerate_local_vertices() -> np.ndarray:
    """Flat payoff indices of all 65,536 deterministic strategies.

    Row ``k`` lists, for each of the 16 joint settings, the flat index into
    a 16x16 payoff matrix that strategy ``k`` deterministically selects.
    Bit layout of ``k``: bits 0-3 Alice's first output per question, bits
    4-7 her second output, bits 8-11 Bob's first output, bits 12-15 his
    second output.
    """
    ks = np.arange(_N_VERTICES, dtype=np.int64)[:, None]
    qs = np.arange(4)
    a1 = (ks >> qs) & 1
    a2 = (ks >> (qs + 4)) & 1
    b1 = (ks >> (qs + 8)) & 1
    b2 = (ks >> (qs + 12)) & 1
    rows = 4 * qs + (2 * a1 + a2)
    cols = 4 * qs + (2 * b1 + b2)
    flat = rows[:, :, None] * 16 + cols[:, None, :]
    return flat.reshape(_N_VERTICES, 16).astype(np.int32)


def local_vertex_matrix(k: int) -> np.ndarray:
    """Indicator payoff matrix of one deterministic strategy (raw 0/1)."""
    out = np.zeros(256)
    out[enumerate_local_vertices()[k]] = 1.0
    return out.reshape(16, 16)


def vertex_values(bell: np.ndarray) -> np.ndarray:
    """Sum of ``bell`` entries each deterministic strategy collects."""
    return bell.reshape(-1)[enumerate_local_vertices()].sum(axis=1)


@dataclass(frozen=True)
class BellMatrix:
    """Raw LP coefficients and their [0, 1] normalization."""

    raw: np.ndarray

    @property
    def normalized(self) -> np.ndarray:
        shifted = self.raw - self.raw.min()
        span = shifted.max()
        if span < 1e-12:
            return np.zeros_like(self.raw)
        return shifted / span


def solve_bell_lp(
    p_matrix: np.ndarray,
    feasibility_tol: float = FEASIBILITY_TOL,
    batch: int = 64,
    max_rounds: int = 400,
) -> tuple[BellMatrix, int]:
    """Maximize the quantum score over unit-bounded Bell coefficients.

    Constraint generation: solve with the violated-vertex rows found so
    far, scan all 65,536 vertices for the most violated, add a batch of
    violators, and repeat until no deterministic strategy scores above 1.
    Returns the coefficient matrix and the number of generation rounds.
    """
    objective = -np.asarray(p_matrix, dtype=float).reshape(-1)
    rows = np.zeros((0, 256))
    indices = enumerate_local_vertices()
    worst = math.inf
    for round_no in range(1, max_rounds + 1):
        result = linprog(
            objective,
            A_ub=rows if rows.size else None,
            b_ub=np.ones(len(rows)) if rows.size else None,
            bounds=(-1.0, 1.0),
            method="highs",
        )
        if result.status != 0:
            raise SolverError(
                f"restricted LP failed: {result.message}", round_no, worst
            )
        coeffs = result.x
        values = vertex_values(coeffs.reshape(16, 16))
        order = np.argsort(values)[::-1]
        worst = float(values[order[0]] - 1.0)
        if worst <= feasibility_tol:
            return BellMatrix(coeffs.reshape(16, 16)), round_no
        violators = order[:batch][values[order[:batch]] > 1.0 + feasibility_tol]
        new_rows = np.zeros((len(violators), 256))
        for r, k in enumerate(violators):
            np.add.at(new_rows[r], indices[k], 1.0)
        rows = np.vstack([rows, new_rows])
    raise SolverError("constraint generation did not converge", max_rounds, worst)


def opt_local_bound(bell: BellMatrix) -> float:
    """Best deterministic score against the normalized Bell matrix.

    Exhausts all 65,536 strategies; the 1/16 setting weight puts the
    result on the same scale as :func:`opt_score`.
    """
    return float(vertex_values(bell.normalized).max()) / 16


@dataclass(frozen=True)
class OptConfig:
    """A solved configuration: coefficients, bounds and gap polynomial."""

    eta_prime: float
    bell: BellMatrix
    local_bound: float
    quantum_bound: float
    gap_poly: GapPolynomial
    rounds: int
    solver_version: int = SOLVER_VERSION

    @property
    def name(self) -> str:
        return f"opt2chsh:{self.eta_prime:g}"

    @property
    def degenerate(self) -> bool:
        return self.gap_poly.gap(1.0) <= DEGENERATE_GAP_TOL

    def score(self, eta: float) -> float:
        return opt_score(self, eta)


def opt_score(cfg: OptConfig, eta: float) -> float:
    """Score Tr(P_eta B^T) of the configuration at input visibility eta."""
    return float(np.sum(build_probability_matrix(eta) * cfg.bell.normalized))


def solve_config(eta_prime: float, **lp_kwargs) -> OptConfig:
    """Solve the LP at the design visibility and package the configuration."""
    if not 0.0 <= eta_prime <= 1.0:
        raise ValueError(f"design visibility must lie in [0, 1], got {eta_prime}")
    bell, rounds = solve_bell_lp(build_probability_matrix(eta_prime), **lp_kwargs)
    normalized = bell.normalized
    local = float(vertex_values(normalized).max()) / 16

    def score_fn(eta: float) -> float:
        return float(np.sum(build_probability_matrix(eta) * normalized))

    poly = extract_gap_polynomial(score_fn, local)
    return OptConfig(
        eta_prime=eta_prime,
        bell=bell,
        local_bound=local,
        quantum_bound=poly.quantum_bound,
        gap_poly=poly,
        rounds=rounds,
    )


def game_model(cfg: OptConfig):
    """Adapter into the analytic :class:`~nlg.robustness.GameModel` view."""
    from .robustness import GameModel

    return GameModel(cfg.name, 4, cfg.gap_poly)


def config_to_dict(cfg: OptConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "solver_version": cfg.solver_version,
        "eta_prime": cfg.eta_prime,
        "raw_bell": [float(v) for v in cfg.bell.raw.reshape(-1)],
        "normalized_bell": [float(v) for v in cfg.bell.normalized.reshape(-1)],
        "local_bound": cfg.local_bound,
        "quantum_bound": cfg.quantum_bound,
        "gap_poly": {
            "d": cfg.gap_poly.d,
            "c1": cfg.gap_poly.c1,
            "c2": cfg.gap_poly.c2,
            "omega_c": cfg.gap_poly.omega_c,
        },
        "degenerate": cfg.degenerate,
        "generation_rounds": cfg.rounds,
    }


def config_from_dict(data: dict) -> OptConfig:
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {data.get('schema_version')!r}")
    gp = data["gap_poly"]
    return OptConfig(
        eta_prime=float(data["eta_prime"]),
        bell=BellMatrix(np.array(data["raw_bell"], dtype=float).reshape(16, 16)),
        local_bound=float(data["local_bound"]),
        quantum_bound=float(data["quantum_bound"]),
        gap_poly=GapPolynomial(gp["d"], gp["c1"], gp["c2"], gp["omega_c"]),
        rounds=int(data.get("generation_rounds", 0)),
        solver_version=int(data.get("solver_version", SOLVER_VERSION)),
    )


def config_path(directory: Path, eta_prime: float) -> Path:
    return Path(directory) / f"opt2chsh-{eta_prime:g}-v{SOLVER_VERSION}.json"


def save_config(cfg: OptConfig, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(config_to_dict(cfg), indent=1) + "\n")


def load_config(path: Path) -> OptConfig:
    return config_from_dict(json.loads(Path(path).read_text()))


def load_or_solve(directory: Path, eta_prime: float) -> OptConfig:
    """Load a cached configuration or solve and cache it."""
    path = config_path(directory, eta_prime)
    if path.exists():
        return load_config(path)
    cfg = solve_config(eta_prime)
    save_config(cfg, path)
    return cfg
