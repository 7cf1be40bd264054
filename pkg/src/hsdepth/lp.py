"""Bounded-variable primal simplex with basis-defined duals and reduced costs.

The engine keeps a dense explicit basis inverse (instances here stay at desk
scale, a few hundred rows) and supports warm restarts after bound changes or
row additions, which is what the branch-and-cut driver leans on.

Internally every row ``a . x {>=,<=,=} b`` becomes an equality
``a . x + w = b`` with a slack variable ``w`` bounded by

    >=  :  w in (-inf, 0]
    <=  :  w in [0, +inf)
    =   :  w in [0, 0]

so the dual value reported for a row is the shadow price d(objective)/d(rhs):
non-negative for tight >= rows, non-positive for tight <= rows in a
minimization.  Feasibility is restored by a composite phase 1 that minimizes
the total bound violation of basic variables; no artificial columns are ever
added, so any basis (cold slack basis or a warm one) is a valid start.

Pivot rule: most-negative reduced cost, switching to Bland's rule after a
stall to guarantee termination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
ITERATION_LIMIT = "IterationLimit"

GE, LE, EQ = ">=", "<=", "="

# variable states
_BASIC = 0
_AT_LOWER = 1
_AT_UPPER = 2
_FREE = 3

_PIVOT_TOL = 1e-10
_REFACTOR_EVERY = 64
_STALL_LIMIT = 300


@dataclass
class LpModel:
    """Minimization LP over bounded variables with >=, <= and = rows."""

    objective: np.ndarray
    row_coeffs: np.ndarray
    senses: list[str]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        n = self.objective.shape[0]
        self.row_coeffs = np.asarray(self.row_coeffs, dtype=float).reshape(-1, n)
        self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        self.lower = np.asarray(self.lower, dtype=float).reshape(-1)
        self.upper = np.asarray(self.upper, dtype=float).reshape(-1)
        m = self.row_coeffs.shape[0]
        if len(self.senses) != m or self.rhs.shape[0] != m:
            raise ValueError("row dimensions inconsistent")
        if self.lower.shape[0] != n or self.upper.shape[0] != n:
            raise ValueError("bound dimensions inconsistent")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        bad = set(self.senses) - {GE, LE, EQ}
        if bad:
            raise ValueError(f"unknown senses {bad}")


@dataclass
class LpSolution:
    status: str
    objective_value: float
    primal: np.ndarray
    duals: np.ndarray
    reduced_costs: np.ndarray
    row_activity: np.ndarray
    iterations: int


class SimplexEngine:
    """Incremental simplex over a fixed set of structural columns.

    Rows may be appended at any time; structural bounds and objective
    coefficients may be changed between solves.  ``solve`` warm-starts from
    the last basis when one exists.
    """

    def __init__(self, lower, upper, objective, feas_tol: float = 1e-9,
                 opt_tol: float = 1e-9):
        self.nstruct = len(objective)
        self.lo = np.asarray(lower, dtype=float).copy()
        self.hi = np.asarray(upper, dtype=float).copy()
        self.cost = np.asarray(objective, dtype=float).copy()
        if self.lo.shape[0] != self.nstruct or self.hi.shape[0] != self.nstruct:
            raise ValueError("bound dimensions inconsistent")
        if np.any(self.lo > self.hi):
            raise ValueError("lower bound exceeds upper bound")
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.A = np.zeros((0, self.nstruct))
        self.rhs = np.zeros(0)
        self.slack_lo = np.zeros(0)
        self.slack_hi = np.zeros(0)
        self.nrows = 0
        self.total_iterations = 0
        self._basis: np.ndarray | None = None
        self._state: np.ndarray | None = None
        self._values: np.ndarray | None = None
        self._binv: np.ndarray | None = None

    # ---- model edits -----------------------------------------------------

    def add_row(self, coeffs, sense: str, rhs: float) -> int:
        return self.add_rows(np.asarray(coeffs, dtype=float)[None, :], [sense], [rhs])

    def add_rows(self, coeffs, senses, rhs) -> int:
        coeffs = np.asarray(coeffs, dtype=float).reshape(-1, self.nstruct)
        rhs = np.asarray(rhs, dtype=float).reshape(-1)
        k = coeffs.shape[0]
        if len(senses) != k or rhs.shape[0] != k:
            raise ValueError("row dimensions inconsistent")
        slo = np.empty(k)
        shi = np.empty(k)
        for i, s in enumerate(senses):
            if s == GE:
                slo[i], shi[i] = -np.inf, 0.0
            elif s == LE:
                slo[i], shi[i] = 0.0, np.inf
            elif s == EQ:
                slo[i], shi[i] = 0.0, 0.0
            else:
                raise ValueError(f"unknown sense {s!r}")
        first = self.nrows
        self.A = np.vstack([self.A, coeffs]) if self.nrows else coeffs.copy()
        self.rhs = np.concatenate([self.rhs, rhs])
        self.slack_lo = np.concatenate([self.slack_lo, slo])
        self.slack_hi = np.concatenate([self.slack_hi, shi])
        self.nrows += k
        if self._basis is not None:
            # new slacks enter the basis; grow the inverse block-triangularly
            old_m = first
            binv = np.zeros((self.nrows, self.nrows))
            binv[:old_m, :old_m] = self._binv
            for i in range(k):
                r = old_m + i
                rb = np.zeros(old_m)
                struct_mask = self._basis < self.nstruct
                cols = self._basis[struct_mask]
                rb[struct_mask] = coeffs[i, cols]
                binv[r, :old_m] = -rb @ self._binv
                binv[r, r] = 1.0
            self._binv = binv
            self._basis = np.concatenate(
                [self._basis, self.nstruct + first + np.arange(k)]
            )
            self._state = np.concatenate([self._state, np.full(k, _BASIC, dtype=np.int8)])
            self._values = np.concatenate([self._values, np.zeros(k)])
        return first

    def set_bounds(self, j: int, lo: float, hi: float) -> None:
        if lo > hi:
            raise ValueError("lower bound exceeds upper bound")
        self.lo[j] = lo
        self.hi[j] = hi

    def set_bounds_bulk(self, idx, lo, hi) -> None:
        self.lo[idx] = lo
        self.hi[idx] = hi
        if np.any(self.lo[idx] > self.hi[idx]):
            raise ValueError("lower bound exceeds upper bound")

    def set_cost(self, j: int, value: float) -> None:
        self.cost[j] = value

    def reset_basis(self) -> None:
        self._basis = None

    # ---- column helpers ----------------------------------------------------

    def _full_lo(self):
        return np.concatenate([self.lo, self.slack_lo])

    def _full_hi(self):
        return np.concatenate([self.hi, self.slack_hi])

    def _column(self, j: int) -> np.ndarray:
        if j < self.nstruct:
            return self.A[:, j]
        col = np.zeros(self.nrows)
        col[j - self.nstruct] = 1.0
        return col

    def _cold_start(self):
        m = self.nrows
        ncols = self.nstruct + m
        lo, hi = self._full_lo(), self._full_hi()
        state = np.empty(ncols, dtype=np.int8)
        values = np.zeros(ncols)
        for j in range(self.nstruct):
            l, h = lo[j], hi[j]
            if np.isfinite(l) and np.isfinite(h):
                if abs(l) <= abs(h):
                    state[j], values[j] = _AT_LOWER, l
                else:
                    state[j], values[j] = _AT_UPPER, h
            elif np.isfinite(l):
                state[j], values[j] = _AT_LOWER, l
            elif np.isfinite(h):
                state[j], values[j] = _AT_UPPER, h
            else:
                state[j], values[j] = _FREE, 0.0
        state[self.nstruct:] = _BASIC
        self._basis = self.nstruct + np.arange(m)
        self._state = state
        self._values = values

    def _clamp_nonbasic(self):
        lo, hi = self._full_lo(), self._full_hi()
        st = self._state
        vals = self._values
        for j in np.nonzero(st != _BASIC)[0]:
            l, h = lo[j], hi[j]
            if st[j] == _AT_LOWER:
                if np.isfinite(l):
                    vals[j] = l
                elif np.isfinite(h):
                    st[j], vals[j] = _AT_UPPER, h
                else:
                    st[j], vals[j] = _FREE, 0.0
            elif st[j] == _AT_UPPER:
                if np.isfinite(h):
                    vals[j] = h
                elif np.isfinite(l):
                    st[j], vals[j] = _AT_LOWER, l
                else:
                    st[j], vals[j] = _FREE, 0.0
            else:  # FREE
                if np.isfinite(l) or np.isfinite(h):
                    if np.isfinite(l):
                        st[j], vals[j] = _AT_LOWER, l
                    else:
                        st[j], vals[j] = _AT_UPPER, h
                else:
                    vals[j] = 0.0

    def _refactor(self) -> bool:
        m = self.nrows
        B = np.zeros((m, m))
        for r, j in enumerate(self._basis):
            B[:, r] = self._column(j)
        try:
            self._binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            return False
        return True

    def _compute_xb(self) -> np.ndarray:
        vals = self._values.copy()
        vals[self._basis] = 0.0
        resid = self.rhs - self.A @ vals[: self.nstruct] - vals[self.nstruct:]
        return self._binv @ resid

    # ---- main loop ---------------------------------------------------------

    def solve(self, max_iters: int = 20000) -> LpSolution:
        m = self.nrows
        if self._basis is None or len(self._basis) != m:
            self._cold_start()
        self._clamp_nonbasic()
        if not self._refactor():
            self._cold_start()
            self._refactor()
        xb = self._compute_xb()

        lo, hi = self._full_lo(), self._full_hi()
        ftol = self.feas_tol
        state = self._state
        values = self._values
        basis = self._basis
        span = hi - lo

        iters = 0
        bland = False
        stall = 0
        best_obj = np.inf
        last_phase1 = None
        status = None

        while True:
            lo_b = lo[basis]
            hi_b = hi[basis]
            below = xb < lo_b - ftol
            above = xb > hi_b + ftol
            phase1 = bool(below.any() or above.any())

            if phase1:
                c_b = above.astype(float) - below.astype(float)
                y = c_b @ self._binv
                d = np.concatenate([-(y @ self.A), -y])
                cur_obj = float((xb - hi_b)[above].sum() + (lo_b - xb)[below].sum())
            else:
                c_full = np.concatenate([self.cost, np.zeros(m)])
                y = c_full[basis] @ self._binv
                d = c_full - np.concatenate([y @ self.A, y])
                full_vals = values.copy()
                full_vals[basis] = xb
                cur_obj = float(self.cost @ full_vals[: self.nstruct])

            if last_phase1 is not None and phase1 != last_phase1:
                best_obj = np.inf
                stall = 0
                bland = False
            last_phase1 = phase1
            if cur_obj < best_obj - 1e-12:
                best_obj = cur_obj
                stall = 0
                bland = False
            else:
                stall += 1
                if stall >= _STALL_LIMIT:
                    bland = True

            movable = span > 0
            can_inc = (
                ((state == _AT_LOWER) | (state == _FREE))
                & (d < -self.opt_tol)
                & movable
            )
            can_dec = (
                ((state == _AT_UPPER) | (state == _FREE))
                & (d > self.opt_tol)
                & movable
            )
            cand = can_inc | can_dec
            if not cand.any():
                if phase1:
                    status = INFEASIBLE
                else:
                    status = OPTIMAL
                break

            if bland:
                j = int(np.nonzero(cand)[0][0])
            else:
                merit = np.where(cand, np.abs(d), -np.inf)
                j = int(np.argmax(merit))
            direction = 1.0 if can_inc[j] else -1.0

            aj = self._column(j)
            w = self._binv @ aj
            rates = -direction * w

            # blocking step lengths from basic variables
            t_arr = np.full(m, np.inf)
            up = rates > _PIVOT_TOL
            dn = rates < -_PIVOT_TOL
            inc_block = up & ~above
            dec_block = dn & ~below
            tgt_up = np.where(below, lo_b, hi_b)
            tgt_dn = np.where(above, hi_b, lo_b)
            ok_up = inc_block & np.isfinite(tgt_up)
            ok_dn = dec_block & np.isfinite(tgt_dn)
            t_arr[ok_up] = (tgt_up[ok_up] - xb[ok_up]) / rates[ok_up]
            t_arr[ok_dn] = (tgt_dn[ok_dn] - xb[ok_dn]) / rates[ok_dn]
            np.maximum(t_arr, 0.0, out=t_arr)

            t_basic = float(t_arr.min()) if m else np.inf
            t_own = span[j] if np.isfinite(span[j]) else np.inf

            if not np.isfinite(min(t_basic, t_own)):
                if phase1:
                    raise RuntimeError("phase-1 ray: numerical breakdown")
                status = UNBOUNDED
                break

            if t_own <= t_basic:
                # bound flip, basis unchanged
                t = t_own
                xb = xb + rates * t
                if state[j] == _AT_LOWER:
                    state[j] = _AT_UPPER
                    values[j] = hi[j]
                else:
                    state[j] = _AT_LOWER
                    values[j] = lo[j]
            else:
                t = t_basic
                near = t_arr <= t + 1e-9 * (1.0 + t)
                if bland:
                    pos = int(np.nonzero(near)[0][np.argmin(basis[near])])
                else:
                    wa = np.where(near, np.abs(w), -np.inf)
                    pos = int(np.argmax(wa))
                leave = int(basis[pos])
                # bound the leaving variable lands on
                if up[pos]:
                    bnd = tgt_up[pos]
                else:
                    bnd = tgt_dn[pos]
                xb = xb + rates * t
                enter_val = values[j] + direction * t
                if abs(bnd - lo[leave]) <= abs(bnd - hi[leave]):
                    state[leave] = _AT_LOWER
                    values[leave] = lo[leave]
                else:
                    state[leave] = _AT_UPPER
                    values[leave] = hi[leave]
                basis[pos] = j
                state[j] = _BASIC
                xb[pos] = enter_val
                piv = w[pos]
                if abs(piv) < _PIVOT_TOL:
                    self._refactor()
                    xb = self._compute_xb()
                else:
                    self._binv[pos, :] /= piv
                    mask = np.ones(m, dtype=bool)
                    mask[pos] = False
                    self._binv[mask, :] -= np.outer(w[mask], self._binv[pos, :])

            iters += 1
            if iters % _REFACTOR_EVERY == 0:
                self._refactor()
                xb = self._compute_xb()
            if iters >= max_iters:
                status = ITERATION_LIMIT
                break

        self.total_iterations += iters
        # refresh the primal values from the final basis
        full_vals = self._values.copy()
        full_vals[basis] = xb
        x = full_vals[: self.nstruct]
        c_full = np.concatenate([self.cost, np.zeros(m)])
        y = c_full[basis] @ self._binv if m else np.zeros(0)
        reduced = self.cost - (y @ self.A if m else 0.0)
        activity = self.A @ x if m else np.zeros(0)
        obj = float(self.cost @ x)
        if status == INFEASIBLE:
            obj = np.inf
        elif status == UNBOUNDED:
            obj = -np.inf
        return LpSolution(
            status=status,
            objective_value=obj,
            primal=x.copy(),
            duals=np.asarray(y, dtype=float).copy(),
            reduced_costs=np.asarray(reduced, dtype=float).copy(),
            row_activity=activity,
            iterations=iters,
        )


def solve_lp(model: LpModel, feas_tol: float = 1e-9,
             max_iters: int = 20000) -> LpSolution:
    """Solve a bounded-variable LP; deterministic for identical input."""
    engine = SimplexEngine(model.lower, model.upper, model.objective,
                           feas_tol=feas_tol)
    if model.row_coeffs.shape[0]:
        engine.add_rows(model.row_coeffs, model.senses, model.rhs)
    return engine.solve(max_iters=max_iters)


def dual_objective(model: LpModel, sol: LpSolution) -> float:
    """Dual objective value y.b plus reduced-cost bound terms.

    Basic variables carry zero reduced cost, so summing d_j * x_j over all
    columns picks up exactly the nonbasic bound terms.  Equals the primal
    objective at an optimal basis; tests use the gap to detect drift in the
    factorized inverse.
    """
    return float(sol.duals @ model.rhs) + float(sol.reduced_costs @ sol.primal)
