"""Trace-triple reduction on the one-holed torus.

For a pair (P, Q) in SL(2,R) generating the fundamental group of a one
holed torus, the triple (x, y, z) = (tr P, tr Q, tr PQ) determines the
boundary trace through

    kappa(x, y, z) = x^2 + y^2 + z^2 - x y z - 2 = tr [P, Q].

Changing the generating pair acts on the triple through permutations and
the move z -> xy - z; when kappa lies in (2, 18] this action always reaches
a triple with a coordinate in [-2, 2], i.e. a simple closed curve on the
torus whose image is non-hyperbolic.  The reduction below records its moves
so that the witness curve can be replayed as a word in the starting pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

MOVES = ("P12", "P23", "M3")

# word letters: "a", "b" and capitals for inverses; matrices multiply left
# to right, so the word of a product P Q is word(P) + word(Q)
_INVERT = {"a": "A", "A": "a", "b": "B", "B": "b"}


class ReductionError(RuntimeError):
    pass


def kappa(x: float, y: float, z: float) -> float:
    """x^2 + y^2 + z^2 - xyz - 2, the commutator trace of the pair."""
    return x * x + y * y + z * z - x * y * z - 2.0


def _invert_word(w: str) -> str:
    return "".join(_INVERT[c] for c in reversed(w))


def _apply_move(move: str, triple, words):
    """One move on the trace triple and the tracked pair words.

    P12 swaps the pair; P23 replaces (p, q) by (p^-1, p q); M3 replaces
    (p, q) by (p, q^-1).  All three keep both entries simple closed curves
    of the torus and act on the triple by (y,x,z), (x,z,y), (x,y,xy-z).
    """
    x, y, z = triple
    wa, wb = words
    if move == "P12":
        return (y, x, z), (wb, wa)
    if move == "P23":
        return (x, z, y), (_invert_word(wa), wa + wb)
    if move == "M3":
        return (x, y, x * y - z), (wa, _invert_word(wb))
    raise ReductionError(f"unknown move {move!r}")


def _found_index(triple, tol: float = 0.0) -> Optional[int]:
    for idx, val in enumerate(triple):
        if abs(val) <= 2.0 + tol:
            return idx + 1
    return None


@dataclass(frozen=True)
class ReductionResult:
    start: Tuple[float, float, float]
    triple: Tuple[float, float, float]
    moves: Tuple[str, ...]
    found_index: Optional[int]          # 1, 2 or 3; None for AllNegative
    all_negative: bool
    steps: int

    @property
    def curve_word(self) -> Optional[str]:
        """Witness word in the starting pair letters (a, b), or None."""
        if self.found_index is None:
            return None
        _, (wa, wb) = replay_moves(self.start, self.moves)
        return (wa, wb, wa + wb)[self.found_index - 1]


# candidate compound steps: a permutation prefix followed by M3
_PERM_WORDS = (("M3",), ("P12", "M3"), ("P23", "M3"), ("P12", "P23", "M3"),
               ("P23", "P12", "M3"), ("P12", "P23", "P12", "M3"))


def _max_abs(triple) -> float:
    return max(abs(v) for v in triple)


def reduce_triple(x: float, y: float, z: float,
                  max_steps: int = 10_000) -> ReductionResult:
    """Reduce a trace triple until a coordinate lies in [-2, 2].

    Greedy descent on max(|x|, |y|, |z|) over the compound moves
    (permutation then z -> xy - z), with a breadth-first fallback of depth
    20 when the greedy step stalls; kappa is invariant throughout.  Ends in
    one of three states: a found coordinate, AllNegative (all three below
    -2, possible only when kappa > 18), or a ReductionError after
    `max_steps`.
    """
    start = (float(x), float(y), float(z))
    kappa0 = kappa(*start)
    triple = start
    moves: List[str] = []
    steps = 0
    while True:
        if max(abs(v) for v in triple) > 1e8:
            raise ReductionError(
                f"coordinates grew beyond float integrity from {start}")
        if abs(kappa(*triple) - kappa0) > 1e-9 * max(1.0, abs(kappa0)):
            raise ReductionError(
                f"kappa drifted from {kappa0} to {kappa(*triple)}")
        idx = _found_index(triple)
        if idx is not None:
            return ReductionResult(start=start, triple=triple,
                                   moves=tuple(moves), found_index=idx,
                                   all_negative=False, steps=steps)
        if all(v < -2.0 for v in triple):
            return ReductionResult(start=start, triple=triple,
                                   moves=tuple(moves), found_index=None,
                                   all_negative=True, steps=steps)
        if steps >= max_steps:
            raise ReductionError(
                f"no terminal state within {max_steps} steps from {start}")
        cur = _max_abs(triple)
        best = None
        for word in _PERM_WORDS:
            cand = triple
            for mv in word:
                cand, _ = _apply_move(mv, cand, ("a", "b"))
            score = _max_abs(cand)
            if score < cur - 1e-12 and (best is None or score < best[0]):
                best = (score, word, cand)
        if best is not None:
            _, word, triple = best
            moves.extend(word)
            steps += len(word)
            continue
        bfs = _bfs_escape(triple, cur)
        if bfs is None:
            raise ReductionError(
                f"greedy descent stalled at {triple} (kappa="
                f"{kappa(*triple):.6f}) and breadth-first search failed")
        word, triple = bfs
        moves.extend(word)
        steps += len(word)


def _bfs_escape(triple, cur_max: float, depth: int = 20,
                node_cap: int = 200_000):
    """Shortest move word that strictly lowers the max or finds a coordinate."""
    seen = {tuple(round(v, 9) for v in triple)}
    frontier = [((), triple)]
    for _ in range(depth):
        nxt = []
        for word, tr in frontier:
            for mv in MOVES:
                tr2, _ = _apply_move(mv, tr, ("a", "b"))
                if _max_abs(tr2) > 1e8:       # float integrity guard
                    continue
                key = tuple(round(v, 9) for v in tr2)
                if key in seen:
                    continue
                seen.add(key)
                if len(seen) > node_cap:
                    return None
                w2 = word + (mv,)
                if _found_index(tr2) is not None or _max_abs(tr2) < cur_max - 1e-12 \
                        or all(v < -2.0 for v in tr2):
                    return list(w2), tr2
                nxt.append((w2, tr2))
        frontier = nxt
        if not frontier:
            return None
    return None


def replay_moves(start: Tuple[float, float, float],
                 moves: Tuple[str, ...]) -> Tuple[Tuple[float, float, float],
                                                  Tuple[str, str]]:
    """Replay a move word from a starting triple.

    Returns the final triple and the word pair expressing the final
    generating pair in the starting letters; replay is exact (bitwise
    reproducible from the same inputs).
    """
    triple = tuple(float(v) for v in start)
    words = ("a", "b")
    for mv in moves:
        triple, words = _apply_move(mv, triple, words)
    return triple, words
