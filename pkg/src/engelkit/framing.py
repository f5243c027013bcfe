"""Integer feasibility solver for round-1-handle attachment framings.

Given the framing offsets n+ and n- of the attaching map along the two core
curves and the rotation numbers of their images, decide whether a model
twist m and stabilization counts exist, and return the canonical minimal
solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple


@dataclass(frozen=True)
class FramingProblem:
    n_plus: int
    n_minus: int
    rot_plus: int
    rot_minus: int


@dataclass(frozen=True)
class FramingSolution:
    m: int
    n_pp: int  # positive stabilizations of the + curve
    n_pm: int  # negative stabilizations of the + curve
    n_mp: int
    n_mm: int
    k: int     # common rotation number after stabilizing

    def counts(self) -> Tuple[int, int, int, int]:
        return (self.n_pp, self.n_pm, self.n_mp, self.n_mm)

    def to_jsonable(self) -> dict:
        return {
            "m": self.m,
            "n_plus_plus": self.n_pp,
            "n_plus_minus": self.n_pm,
            "n_minus_plus": self.n_mp,
            "n_minus_minus": self.n_mm,
            "k": self.k,
        }


def parity_feasible(p: FramingProblem) -> bool:
    """The mod-2 obstruction: n+ + rot+ and n- + rot- must agree."""
    return (p.n_plus + p.rot_plus) % 2 == (p.n_minus + p.rot_minus) % 2


def check_solution(p: FramingProblem, s: FramingSolution) -> bool:
    """All defining equations, exactly."""
    if min(s.counts()) < 0:
        return False
    if p.n_plus + s.m != s.n_pp + s.n_pm:
        return False
    if p.n_minus + s.m != s.n_mp + s.n_mm:
        return False
    if (s.n_mp - s.n_mm - s.n_pp + s.n_pm) != (p.rot_plus - p.rot_minus):
        return False
    if s.k != p.rot_plus + s.n_pp - s.n_pm:
        return False
    if s.k != p.rot_minus + s.n_mp - s.n_mm:
        return False
    return True


def solve_stabilization(p: FramingProblem) -> Optional[FramingSolution]:
    """Canonical solution: minimal m, then lexicographically minimal counts.

    Infeasible exactly when the parity obstruction fails.  With
    S+ = n+ + m and S- = n- + m, a twist m works when some d with
    |d| <= S+, d = S+ (mod 2) satisfies |d + rot+ - rot-| <= S- with the
    matching parity; the counts are (S +- d)/2.
    """
    if not parity_feasible(p):
        return None
    dr = p.rot_plus - p.rot_minus
    m = max(-p.n_plus, -p.n_minus)
    while True:
        sp = p.n_plus + m
        sm = p.n_minus + m
        lo = max(-sp, -sm - dr)
        hi = min(sp, sm - dr)
        # d must have the parity of sp (and then d + dr has the parity of sm)
        d = lo if (lo - sp) % 2 == 0 else lo + 1
        if d <= hi:
            n_pp = (sp + d) // 2
            n_pm = (sp - d) // 2
            dm = d + dr
            n_mp = (sm + dm) // 2
            n_mm = (sm - dm) // 2
            sol = FramingSolution(m, n_pp, n_pm, n_mp, n_mm, p.rot_plus + d)
            assert check_solution(p, sol)
            return sol
        m += 1


def brute_force_solution(
    p: FramingProblem, m_lo: Optional[int] = None, m_hi: int = 20, count_max: int = 20
) -> Optional[FramingSolution]:
    """Search oracle: enumerate (m, d) pairs and return the first solution in
    the canonical order (minimal m, then minimal n++)."""
    if m_lo is None:
        m_lo = max(-p.n_plus, -p.n_minus)
    dr = p.rot_plus - p.rot_minus
    for m in range(m_lo, m_hi + 1):
        sp = p.n_plus + m
        sm = p.n_minus + m
        if sp < 0 or sm < 0 or sp > 2 * count_max or sm > 2 * count_max:
            continue
        for d in range(-sp, sp + 1):
            if (d - sp) % 2 != 0:
                continue
            dm = d + dr
            if abs(dm) > sm or (dm - sm) % 2 != 0:
                continue
            sol = FramingSolution(m, (sp + d) // 2, (sp - d) // 2,
                                  (sm + dm) // 2, (sm - dm) // 2, p.rot_plus + d)
            if check_solution(p, sol):
                return sol
    return None


@dataclass
class ReplayReport:
    consistent: bool
    final_rot_plus: int
    final_rot_minus: int
    final_framing_plus: int
    final_framing_minus: int
    notes: str = ""


def replay_solution(p: FramingProblem, s: FramingSolution,
                    with_curves: bool = False) -> ReplayReport:
    """Replay the solution through framing actions and stabilizations.

    Applies the m-twist to the contact framings and the postconditions of
    the stabilizations (each shifts the framing once and the rotation by its
    sign); asserts the final framings match the image contact framings and
    the final rotation numbers agree.  With ``with_curves`` the stabilized
    rotation deltas are additionally driven through explicit front curves.
    """
    from .curves import FramingWord, framing_action

    fr_plus = framing_action(s.m, FramingWord("gamma+", 0))
    fr_minus = framing_action(s.m, FramingWord("gamma-", 0))
    # attaching map sends these to n+/n- twisted image framings; each
    # stabilization twists the image contact framing once
    img_plus = p.n_plus + fr_plus.offset
    img_minus = p.n_minus + fr_minus.offset
    stab_plus = s.n_pp + s.n_pm
    stab_minus = s.n_mp + s.n_mm
    rot_p = p.rot_plus + s.n_pp - s.n_pm
    rot_m = p.rot_minus + s.n_mp - s.n_mm
    ok = (
        img_plus == stab_plus
        and img_minus == stab_minus
        and rot_p == rot_m == s.k
    )
    notes = ""
    if with_curves:
        from fractions import Fraction
        from .curves import front_rotation_number, stabilize, unknot_fixture

        base = unknot_fixture()
        base_rot = front_rotation_number(base)
        windows = [
            (Fraction(9, 8), Fraction(11, 8)),
            (Fraction(13, 8), Fraction(15, 8)),
            (Fraction(33, 8), Fraction(35, 8)),
            (Fraction(37, 8), Fraction(39, 8)),
        ]
        for label, npos, nneg in (("+", s.n_pp, s.n_pm), ("-", s.n_mp, s.n_mm)):
            if npos + nneg > len(windows):
                notes = "curve replay skipped: too many stabilizations for the fixture"
                break
            cur = base
            signs = [1] * npos + [-1] * nneg
            for sgn, win in zip(signs, windows):
                cur = stabilize(cur, sgn, window=win)
            delta = front_rotation_number(cur) - base_rot
            if delta != npos - nneg:
                ok = False
                notes = f"curve replay mismatch on the {label} side"
    return ReplayReport(ok, rot_p, rot_m, img_plus, img_minus, notes)
