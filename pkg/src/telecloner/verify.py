"""Property checks behind the ``verify`` command.

Each check returns a :class:`CheckResult`; a failing check carries the
offending case (d, x, theta, outcome) so it can be reproduced.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2, sqrt
from typing import Callable, Optional

import numpy as np

from . import analysis, cloning, core
from .core import TOL
from .telecloning import (
    ChannelAmplitudes,
    all_outcomes,
    channel_entanglement,
    channel_entropy,
    channel_state,
    correction_unitary,
    expected_corrected_state,
    fidelity_analytic,
    optimal_amplitudes,
    optimal_x0_y,
    run_protocol,
)

N_RANDOM_STATES = 20
N_PHASES_COVARIANCE = 50
N_CLONE_PHASES = 100
N_RANDOM_CHANNELS = 20


@dataclass(frozen=True)
class CheckResult:
    name: str
    d: int
    passed: bool
    max_error: float
    case: Optional[str] = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name} d={self.d} max_err={self.max_error:.3e}"
        if self.case:
            text += f" case={self.case}"
        return text


def _case(d, x=None, theta=None, outcome=None) -> str:
    parts = [f"d={d}"]
    if x is not None:
        parts.append("x=[" + ",".join(f"{v:.17g}" for v in np.asarray(x)) + "]")
    if theta is not None:
        parts.append("theta=[" + ",".join(f"{v:.17g}" for v in np.asarray(theta)) + "]")
    if outcome is not None:
        parts.append(f"outcome=({outcome.l},{outcome.k})")
    return "(" + ", ".join(parts) + ")"


class _Tracker:
    """Accumulates the worst error over a check and remembers where it happened."""

    def __init__(self, name, d, tol):
        self.name, self.d, self.tol = name, d, tol
        self.worst = 0.0
        self.case = None

    def see(self, err, case_fn=None):
        err = float(err)
        if err > self.worst or np.isnan(err):
            self.worst = err
            if (err > self.tol or np.isnan(err)) and case_fn is not None:
                self.case = case_fn()

    def result(self):
        passed = self.worst <= self.tol
        return CheckResult(self.name, self.d, passed, self.worst, None if passed else self.case)


def random_state(dims, rng) -> core.StateVector:
    v = rng.standard_normal(int(np.prod(dims))) + 1j * rng.standard_normal(int(np.prod(dims)))
    return core.StateVector(tuple(dims), v / np.linalg.norm(v))


def random_channel(d, rng) -> ChannelAmplitudes:
    return ChannelAmplitudes.normalize(rng.random(d) + 1e-12)


# ---------------------------------------------------------------- qudit core


def check_core(d, rng) -> list:
    out = []
    t = _Tracker("core.tensor_norm", d, TOL.norm)
    for _ in range(N_RANDOM_STATES):
        a, b = random_state((d,), rng), random_state((d, d), rng)
        t.see(abs(core.tensor_product(a, b).norm() - 1.0), lambda: _case(d))
    out.append(t.result())

    t = _Tracker("core.partial_trace_consistency", d, TOL.norm)
    for _ in range(N_RANDOM_STATES):
        psi = random_state((d, d, d), rng)
        direct = core.partial_trace(psi, [0])
        staged = core.partial_trace(core.partial_trace(psi, [0, 1]), [0])
        t.see(np.max(np.abs(direct.matrix - staged.matrix)), lambda: _case(d))
        t.see(abs(direct.trace() - 1.0), lambda: _case(d))
        t.see(abs(core.partial_trace(psi, [0, 1, 2]).trace() - 1.0), lambda: _case(d))
    out.append(t.result())

    t = _Tracker("core.schmidt_symmetry", d, TOL.cross)
    for _ in range(N_RANDOM_STATES):
        psi = random_state((d, d), rng)
        sa = core.von_neumann_entropy(core.partial_trace(psi, [0]))
        sb = core.von_neumann_entropy(core.partial_trace(psi, [1]))
        t.see(abs(sa - sb), lambda: _case(d))
    out.append(t.result())

    t = _Tracker("core.fidelity_phase_invariance", d, TOL.norm)
    for _ in range(N_RANDOM_STATES):
        psi, phi = random_state((d,), rng), random_state((d,), rng)
        rho = phi.projector()
        shifted = core.StateVector(psi.dims, np.exp(1j * rng.uniform(0, 2 * np.pi)) * psi.amplitudes)
        t.see(abs(core.fidelity(psi, rho) - core.fidelity(shifted, rho)), lambda: _case(d))
    out.append(t.result())

    t = _Tracker("core.entropy_bounds", d, TOL.norm)
    for _ in range(N_RANDOM_STATES):
        rho = core.partial_trace(random_state((d, d), rng), [0])
        s = core.von_neumann_entropy(rho)
        t.see(max(-s, s - log2(d), 0.0), lambda: _case(d))
    out.append(t.result())
    return out


# ------------------------------------------------------------------ cloning


def check_cloning(d, rng) -> list:
    out = []
    t = _Tracker("cloning.isometry", d, TOL.norm)
    c = _Tracker("cloning.clone_symmetry", d, TOL.norm)
    for _ in range(N_RANDOM_STATES):
        res = cloning.econ_clone(random_state((d,), rng))
        t.see(abs(res.state.norm() - 1.0), lambda: _case(d))
        c.see(np.max(np.abs(res.clones[0].matrix - res.clones[1].matrix)), lambda: _case(d))
    out += [t.result(), c.result()]

    t = _Tracker("cloning.phase_covariance", d, TOL.cross)
    target = cloning.econ_fidelity_analytic(d)
    for _ in range(N_CLONE_PHASES):
        theta = cloning.random_phases(d, rng)
        f = cloning.econ_clone(cloning.phase_state(d, theta)).fidelity_each
        t.see(abs(f - target), lambda: _case(d, theta=theta))
    out.append(t.result())

    fe, fo = cloning.econ_fidelity_analytic(d), cloning.opt_fidelity_analytic(d)
    if d == 2:
        out.append(CheckResult("cloning.econ_equals_opt", d, abs(fe - fo) <= 1e-12, abs(fe - fo)))
    else:
        ok = fe < fo
        out.append(CheckResult("cloning.econ_below_opt", d, ok, max(fe - fo, 0.0), None if ok else _case(d)))
    return out


# -------------------------------------------------------------- telecloning


def check_telecloning(d, rng, formula: Callable = fidelity_analytic) -> list:
    out = []
    prob = _Tracker("telecloning.outcome_uniformity", d, TOL.cross)
    indep = _Tracker("telecloning.outcome_independence", d, TOL.cross)
    sym = _Tracker("telecloning.clone_symmetry", d, TOL.cross)
    oracle = _Tracker("telecloning.oracle_equivalence", d, TOL.cross)
    corr = _Tracker("telecloning.correction_correctness", d, TOL.cross)
    ent = _Tracker("telecloning.entropy_consistency", d, TOL.cross)

    channels = [random_channel(d, rng) for _ in range(N_RANDOM_CHANNELS)]
    channels += [ChannelAmplitudes.uniform(d), optimal_amplitudes(d)]
    for x in channels:
        theta = cloning.random_phases(d, rng)
        run = run_protocol(theta, x)
        expect = formula(x)
        f = run.fidelities()
        indep.see(f.max() - f.min(), lambda: _case(d, x.x, theta))
        oracle.see(abs(run.mean_fidelity - expect), lambda: _case(d, x.x, theta))
        for r in run.records:
            prob.see(abs(r.probability - 1.0 / d**2), lambda: _case(d, x.x, theta, r.outcome))
            sym.see(abs(r.fidelity_B - r.fidelity_C), lambda: _case(d, x.x, theta, r.outcome))
            oracle.see(abs(r.fidelity_B - expect), lambda: _case(d, x.x, theta, r.outcome))
            direct = expected_corrected_state(theta, x, r.outcome.l)
            overlap = abs(np.vdot(direct.amplitudes, r.corrected_state.amplitudes))
            corr.see(1.0 - overlap, lambda: _case(d, x.x, theta, r.outcome))
        prob.see(abs(run.total_probability - 1.0), lambda: _case(d, x.x, theta))
        rho_a2 = core.partial_trace(channel_state(x), [0])
        ent.see(abs(channel_entropy(x) - core.von_neumann_entropy(rho_a2)), lambda: _case(d, x.x))
        ent.see(abs(channel_entropy(x) - channel_entanglement(x)), lambda: _case(d, x.x))
    out += [t.result() for t in (prob, indep, sym, oracle, corr, ent)]

    t = _Tracker("telecloning.phase_covariance", d, TOL.cross)
    x = random_channel(d, rng)
    ref = None
    for _ in range(N_PHASES_COVARIANCE):
        theta = cloning.random_phases(d, rng)
        f = run_protocol(theta, x).mean_fidelity
        ref = f if ref is None else ref
        t.see(abs(f - ref), lambda: _case(d, x.x, theta))
    out.append(t.result())

    t = _Tracker("telecloning.unitarity", d, 1e-12)
    for o in all_outcomes(d):
        u = correction_unitary(d, o)
        t.see(np.max(np.abs(u.conj().T @ u - np.eye(d))), lambda: _case(d, outcome=o))
    out.append(t.result())

    t = _Tracker("telecloning.uniform_channel_fidelity", d, TOL.cross)
    t.see(abs(formula(ChannelAmplitudes.uniform(d)) - cloning.econ_fidelity_analytic(d)), lambda: _case(d))
    out.append(t.result())
    t = _Tracker("telecloning.optimal_channel_fidelity", d, TOL.cross)
    t.see(abs(formula(optimal_amplitudes(d)) - cloning.opt_fidelity_analytic(d)), lambda: _case(d))
    out.append(t.result())

    e = channel_entanglement(optimal_amplitudes(d))
    if d == 2:
        out.append(CheckResult("telecloning.optimal_channel_maximally_entangled", d, abs(e - 1.0) <= TOL.cross, abs(e - 1.0)))
    else:
        gap = log2(d) - e
        out.append(CheckResult("telecloning.optimal_channel_partially_entangled", d, gap > 1e-6, gap))
    return out


# ----------------------------------------------------------------- analysis


def check_analysis(d, rng, seed) -> list:
    out = []
    res = analysis.maximize_fidelity(d, seed=seed)
    f_err = abs(res.f_star - cloning.opt_fidelity_analytic(d))
    out.append(CheckResult("analysis.optimizer_fidelity", d, f_err <= 1e-6, f_err))
    xs, xo = res.x_star.x, optimal_amplitudes(d).x
    x_err = max(abs(xs[0] - xo[0]), float(np.max(np.abs(np.sort(xs[1:]) - np.sort(xo[1:])))))
    out.append(CheckResult("analysis.optimizer_amplitudes", d, x_err <= 1e-4, x_err, None if x_err <= 1e-4 else _case(d, xs)))

    t = _Tracker("analysis.gradient_vs_finite_difference", d, 1e-6)
    for _ in range(N_RANDOM_STATES):
        x = random_channel(d, rng).x
        g, fd = analysis.fidelity_gradient(x), analysis.finite_difference_gradient(x)
        t.see(np.max(np.abs(g - fd)) / max(np.max(np.abs(fd)), 1e-300), lambda: _case(d, x))
    out.append(t.result())

    points = analysis.sweep_x0(d)
    x_opt = optimal_x0_y(d)[0]
    at_opt = [p for p in points if abs(p.x0 - x_opt) <= analysis.MERGE_TOL]
    t = _Tracker("analysis.sweep_hits_optimum", d, TOL.cross)
    t.see(abs(at_opt[0].fidelity - cloning.opt_fidelity_analytic(d)) if at_opt else np.inf, lambda: _case(d))
    out.append(t.result())

    s_arg, f_arg = analysis.argmax_x0(points, "entropy"), analysis.argmax_x0(points, "fidelity")
    ok = abs(s_arg - 1 / sqrt(d)) <= 1e-12 and abs(f_arg - x_opt) <= 1e-12
    ok = ok and ((s_arg == f_arg) if d == 2 else (s_arg != f_arg))
    out.append(CheckResult("analysis.sweep_argmax", d, ok, 0.0 if ok else abs(f_arg - x_opt)))

    if d > 2:
        seg = [p for p in points if 1 / sqrt(d) <= p.x0 <= x_opt]
        worst = 0.0
        for a, b in zip(seg, seg[1:]):
            worst = max(worst, a.fidelity - b.fidelity, b.entropy - a.entropy)
        out.append(CheckResult("analysis.tradeoff_monotonicity", d, worst <= 0.0, worst))
    return out


def run_checks(max_d: int, seed: int, formula: Callable = fidelity_analytic) -> list:
    """Every property for ``d = 2 .. max_d``, in a fixed order."""
    max_d = core.check_dim(max_d)
    results = []
    for d in range(2, max_d + 1):
        rng = np.random.default_rng([seed, d])
        results += check_core(d, rng)
        results += check_cloning(d, rng)
        results += check_telecloning(d, rng, formula)
        results += check_analysis(d, rng, seed)
    return results
