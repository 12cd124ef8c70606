"""The CHSH, 2-CHSH and magic-square games: operators, scores and bounds.

Each game is packaged as a :class:`GameSpec` holding a Hermitian score
operator in canonical register order plus the affine map taking its
expectation value to a success probability.  Deterministic-strategy
enumeration routines provide an operator-free cross-check of every local
bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qmath import (
    DepolarizingChannel,
    DimensionError,
    PAULI,
    SIGMA_X,
    SIGMA_Z,
    apply_depolarizing,
    epr_state,
    kron,
    permute_qubits,
)

SCORE_IMAG_TOL = 1e-6
SCORE_CLAMP_TOL = 1e-6

# Moves (A1, A2, B1, B2) register order into the canonical (A1, B1, A2, B2).
_TO_CANONICAL = (0, 2, 1, 3)


class ScoreIntegrityError(ArithmeticError):
    """A computed score fell outside [0, 1] or kept an imaginary residue."""


@dataclass(frozen=True)
class ScoreOperator:
    """Hermitian operator with an affine map to success probability."""

    matrix: np.ndarray
    scale: float = 1.0
    offset: float = 0.0

    def expectation(self, rho: np.ndarray) -> float:
        value = np.trace(rho @ self.matrix)
        if abs(value.imag) > SCORE_IMAG_TOL:
            raise ScoreIntegrityError(
                f"imaginary residue {value.imag:.3e} in score expectation"
            )
        return value.real


@dataclass(frozen=True)
class GameSpec:
    name: str
    n_qubits: int
    local_bound: float
    quantum_bound: float
    score_operator: ScoreOperator

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


def _projective(observable: np.ndarray, outcome: int) -> np.ndarray:
    """Projector onto the (-1)**outcome eigenspace of a +/-1 observable."""
    sign = 1.0 - 2.0 * outcome
    return (np.eye(observable.shape[0]) + sign * observable) / 2


_CHSH_ALICE = {0: SIGMA_Z, 1: SIGMA_X}
_CHSH_BOB = {
    0: (SIGMA_Z + SIGMA_X) / np.sqrt(2),
    1: (SIGMA_Z - SIGMA_X) / np.sqrt(2),
}

# Winning (a, b, x, y) tuples of one CHSH instance: a XOR b == x AND y.
_CHSH_WINNING = tuple(
    (a, b, x, y)
    for a, b, x, y in itertools.product((0, 1), repeat=4)
    if (a ^ b) == (x & y)
)


@lru_cache(maxsize=None)
def chsh_game() -> GameSpec:
    """CHSH with the optimal observables; score = Tr(rho S)/8 + 1/2."""
    op = (
        kron(_CHSH_ALICE[0], _CHSH_BOB[0])
        + kron(_CHSH_ALICE[0], _CHSH_BOB[1])
        + kron(_CHSH_ALICE[1], _CHSH_BOB[0])
        - kron(_CHSH_ALICE[1], _CHSH_BOB[1])
    )
    return GameSpec(
        name="chsh",
        n_qubits=2,
        local_bound=0.75,
        quantum_bound=(2 + np.sqrt(2)) / 4,
        score_operator=ScoreOperator(op, scale=1 / 8, offset=0.5),
    )


@lru_cache(maxsize=None)
def two_chsh_game() -> GameSpec:
    """Two CHSH instances played in parallel; win iff both instances win."""
    op = np.zeros((16, 16), dtype=complex)
    for a1, b1, x1, y1 in _CHSH_WINNING:
        for a2, b2, x2, y2 in _CHSH_WINNING:
            op += kron(
                _projective(_CHSH_ALICE[x1], a1),
                _projective(_CHSH_ALICE[x2], a2),
                _projective(_CHSH_BOB[y1], b1),
                _projective(_CHSH_BOB[y2], b2),
            )
    op = permute_qubits(op / 16, _TO_CANONICAL)
    return GameSpec(
        name="2chsh",
        n_qubits=4,
        local_bound=10 / 16,
        quantum_bound=((2 + np.sqrt(2)) / 4) ** 2,
        score_operator=ScoreOperator(op),
    )


# Mermin-Peres observable grid; entry "XZ" means sigma_x on the party's first
# qubit and sigma_z on their second.  Rows multiply to +I, columns to +I, +I,
# -I, which is what makes a consistent classical grid impossible.
_MSG_GRID = (("IZ", "ZI", "ZZ"), ("XI", "IX", "XX"), ("XZ", "ZX", "YY"))


def _msg_block(block: int) -> tuple[list[np.ndarray], float]:
    """Observables of one question block (0-2 rows, 3-5 columns) and its
    required outcome parity."""
    if block < 3:
        labels = _MSG_GRID[block]
    else:
        labels = tuple(_MSG_GRID[r][block - 3] for r in range(3))
    sign = -1.0 if block == 5 else 1.0
    return [kron(PAULI[s[0]], PAULI[s[1]]) for s in labels], sign


@lru_cache(maxsize=None)
def msg_game() -> GameSpec:
    """Magic-square game scored through one joint Hermitian operator.

    For each of the six question blocks, Alice's projectors range over the
    outcome triples with the correct parity; Bob, asked for one of the
    three cells, must agree with Alice there, so his projector (built from
    the transposed observable) enters once per cell with Alice's outcome.
    """
    op = np.zeros((16, 16), dtype=complex)
    eye4 = np.eye(4)
    for block in range(6):
        observables, parity = _msg_block(block)
        for outcomes in itertools.product((1.0, -1.0), repeat=3):
            if outcomes[0] * outcomes[1] * outcomes[2] != parity:
                continue
            alice = eye4
            for a, obs in zip(outcomes, observables):
                alice = alice @ (eye4 + a * obs) / 2
            bob = sum(
                (eye4 + a * obs.T) / 2 for a, obs in zip(outcomes, observables)
            )
            op += kron(alice, bob)
    op = permute_qubits(op / 18, _TO_CANONICAL)
    return GameSpec(
        name="msg",
        n_qubits=4,
        local_bound=17 / 18,
        quantum_bound=1.0,
        score_operator=ScoreOperator(op),
    )


_REGISTRY = {"chsh": chsh_game, "2chsh": two_chsh_game, "msg": msg_game}


def builtin_game(name: str) -> GameSpec:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown game {name!r}; expected one of {sorted(_REGISTRY)}")


def winning_state(game: GameSpec) -> np.ndarray:
    """The state reaching the quantum bound, in canonical register order."""
    pair = epr_state()
    return pair if game.n_qubits == 2 else np.kron(pair, pair)


def score(game: GameSpec, rho: np.ndarray) -> float:
    """Success probability of ``game`` on the state ``rho``."""
    rho = np.asarray(rho)
    if rho.shape != (game.dim, game.dim):
        raise DimensionError(
            f"{game.name} needs a {game.dim}x{game.dim} state, got {rho.shape}"
        )
    sop = game.score_operator
    value = sop.scale * sop.expectation(rho) + sop.offset
    if value < -SCORE_CLAMP_TOL or value > 1 + SCORE_CLAMP_TOL:
        raise ScoreIntegrityError(
            f"{game.name} score {value} outside [0, 1] beyond tolerance"
        )
    return min(max(value, 0.0), 1.0)


def score_at_visibility(game: GameSpec, eta: float) -> float:
    """Score of the game's winning state sent through depolarizing noise."""
    channel = DepolarizingChannel(eta, game.n_qubits)
    return score(game, apply_depolarizing(channel, winning_state(game)))


def chsh_local_maximum() -> float:
    """Best deterministic win rate for CHSH, by enumeration."""
    best = 0.0
    for fa in itertools.product((0, 1), repeat=2):
        for fb in itertools.product((0, 1), repeat=2):
            wins = sum(
                (fa[x] ^ fb[y]) == (x & y)
                for x in (0, 1)
                for y in (0, 1)
            )
            best = max(best, wins / 4)
    return best


def two_chsh_local_maximum() -> float:
    """Best deterministic win rate for 2-CHSH over all 65,536 strategies.

    Each player sees both questions, so an output bit may depend on the
    full question pair.
    """
    questions = list(itertools.product((0, 1), repeat=2))
    answers = list(itertools.product((0, 1), repeat=2))  # (bit1, bit2)
    alice_maps = list(itertools.product(range(4), repeat=4))
    win = np.zeros((4, 4, 4, 4), dtype=bool)  # x, y, a, b
    for xi, (x1, x2) in enumerate(questions):
        for yi, (y1, y2) in enumerate(questions):
            for ai, (a1, a2) in enumerate(answers):
                for bi, (b1, b2) in enumerate(answers):
                    win[xi, yi, ai, bi] = ((a1 ^ b1) == (x1 & y1)) and (
                        (a2 ^ b2) == (x2 & y2)
                    )
    best = 0
    for fa in alice_maps:
        table = win[np.arange(4)[:, None], np.arange(4)[None, :], np.array(fa)[:, None], :]
        # table[x, y, b]: win status once Alice's map is fixed
        best_bob = table.sum(axis=0).max(axis=1).sum()
        best = max(best, best_bob)
    return best / 16


def msg_local_maximum() -> float:
    """Best deterministic win rate for the magic-square game.

    Bob answers each cell from a fixed +/-1 grid; against any such grid
    Alice's best reply per block is the parity-correct triple agreeing
    with the grid on as many cells as possible.
    """
    best = 0
    for grid_bits in range(512):
        grid = [1 - 2 * ((grid_bits >> i) & 1) for i in range(9)]
        wins = 0
        for block in range(6):
            if block < 3:
                cells = [3 * block + c for c in range(3)]
            else:
                cells = [3 * r + (block - 3) for r in range(3)]
            parity = -1 if block == 5 else 1
            values = [grid[c] for c in cells]
            agreement = 3 if values[0] * values[1] * values[2] == parity else 2
            wins += agreement
        best = max(best, wins)
    return best / 18
