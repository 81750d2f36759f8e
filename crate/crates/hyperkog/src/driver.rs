//! The outer iteration: repeated weight-driven multi-steps until no big
//! steps remain, a final ordering cleanup, and assembly of the computed
//! factors `G₀ = U Σ V⁻¹`.
//!
//! Every parallel section — weight computation, kernel recomputation, and
//! the batched left/right applications — is deterministic, so a run
//! produces bitwise identical results for any task count.

use rayon::prelude::*;

use crate::dps::{build_ordering_seq, sort_weights, weight_cmp, AugWeight};
use crate::kernel2x2::Hsvd2Result;
use crate::matrix::{Matrix, SignDiagonal};
use crate::scalar::Scalar;
use crate::sweep::{
    build_pair_partition, compute_all_weights, is_candidate, off_fro_sq, IterationState,
};

/// Tuning knobs for a run.  The defaults reproduce the reference setup:
/// full hyperbolic tangents admitted (`υ = 1`), multi-steps of ⌊n₀/2⌋
/// pivots, and a generous budget of 50 virtual sweeps.
#[derive(Clone, Debug)]
pub struct Config {
    /// Upper bound in `(0, 1]` on `|tanh ψ|`; hyperbolic kernels needing
    /// more are declared undefined for the step.  Lowering it (0.8, 0.75,
    /// 0.5, …) trades convergence speed for bounded condition growth and
    /// is the documented retry when a run hits the sweep limit.
    pub upsilon: f64,
    /// Pivots per multi-step; `None` means ⌊n₀/2⌋.
    pub target_multistep_len: Option<usize>,
    /// Budget: one virtual sweep is `n₀ − 1` multi-steps.
    pub max_virtual_sweeps: usize,
    /// Accumulate `U` and `V⁻¹` (otherwise only Σ is produced).
    pub accumulate_vectors: bool,
    /// Execution width; any value produces bitwise identical results.
    pub tasks: usize,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            upsilon: 1.0,
            target_multistep_len: None,
            max_virtual_sweeps: 50,
            accumulate_vectors: true,
            tasks: 1,
        }
    }
}

impl Config {
    fn validate(&self) {
        assert!(
            self.upsilon > 0.0 && self.upsilon <= 1.0,
            "upsilon must lie in (0, 1]"
        );
        assert!(self.max_virtual_sweeps >= 1, "sweep budget must be positive");
        assert!(self.tasks >= 1, "task count must be positive");
    }
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// A multi-step contained no big step.
    Converged,
    /// The weight pass found nothing to do (after filtering).
    NoCandidates,
    /// The multi-step budget ran out first.
    SweepLimit,
    /// Single-pivot mode only: the best remaining pivot has an undefined
    /// hyperbolic kernel at this `υ`.
    UndefinedHsvd,
}

impl Outcome {
    /// Stable lowercase token used in stats files.
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Converged => "converged",
            Outcome::NoCandidates => "no_candidates",
            Outcome::SweepLimit => "sweep_limit",
            Outcome::UndefinedHsvd => "undefined_hsvd",
        }
    }

    /// Whether the run left the iterate in the target diagonal form.
    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Converged | Outcome::NoCandidates)
    }
}

impl std::str::FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Outcome, String> {
        match s {
            "converged" => Ok(Outcome::Converged),
            "no_candidates" => Ok(Outcome::NoCandidates),
            "sweep_limit" => Ok(Outcome::SweepLimit),
            "undefined_hsvd" => Ok(Outcome::UndefinedHsvd),
            other => Err(format!("unknown outcome {other:?}")),
        }
    }
}

/// Counters and norms describing a finished run.
///
/// `steps` counts every applied 2×2 step, including the final cleanup's
/// swaps and phases; `multisteps` counts only the batched multi-steps of
/// the main loop, and `cycles` is `multisteps / (n₀ − 1)` — the virtual
/// sweep count (0 for n₀ ≤ 1).
#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    pub steps: u64,
    pub multisteps: u64,
    pub cycles: f64,
    /// Off-diagonal Frobenius norm of the input.
    pub off_initial: f64,
    /// Off-diagonal Frobenius norm of the final iterate.
    pub off_final: f64,
    pub outcome: Outcome,
}

/// The computed decomposition `G₀ = U Σ V⁻¹` with `U` unitary and `V`
/// `J`-unitary.
///
/// After a successful run the diagonal of Σ is non-increasing along the
/// positions with `J = +1` and non-decreasing along the positions with
/// `J = −1`, and the eigenvalues of `G₀ J G₀*` are recovered as
/// `σᵢ² · jᵢ`.
#[derive(Clone, Debug)]
pub struct HsvdResult<S> {
    pub sigma: Vec<f64>,
    pub u: Option<Matrix<S>>,
    pub v_inv: Option<Matrix<S>>,
    pub j: SignDiagonal,
    pub stats: RunStats,
}

/// Whether a just-completed multi-step halts the iteration: a step is
/// *small* when its pivot was already diagonal or both of its computed
/// transformations are exact identities; the iteration halts when the
/// multi-step contained no big step.
pub fn convergence_check<S: Scalar>(multistep: &[Hsvd2Result<S>]) -> bool {
    multistep
        .iter()
        .all(|s| s.was_diagonal || (s.u_is_identity && s.v_is_identity))
}

/// Computes the HSVD of `G₀` under the signature `J₀`.
///
/// Each round computes all candidate weights, selects a greedy batch of
/// index-disjoint pivots (heaviest weight first), recomputes each selected
/// pivot's 2×2 HSVD, and applies all left transformations before all right
/// ones.  The loop ends when a multi-step contains no big step, when no
/// candidates remain, or when the budget is spent; a successful end is
/// followed by a cleanup pass of diagonal swaps and phases that enforces
/// the final Σ ordering.
pub fn run<S: Scalar>(g0: &Matrix<S>, j0: &SignDiagonal, cfg: &Config) -> HsvdResult<S> {
    cfg.validate();
    assert_eq!(g0.order(), j0.order(), "matrix and sign orders must agree");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.tasks)
        .build()
        .expect("failed to build the worker pool");
    pool.install(|| run_multistep(g0, j0, cfg))
}

fn run_multistep<S: Scalar>(g0: &Matrix<S>, j0: &SignDiagonal, cfg: &Config) -> HsvdResult<S> {
    let n = g0.order();
    let mut state = IterationState::new(g0.clone(), j0.clone(), cfg.accumulate_vectors);
    let off_initial = off_fro_sq(&state.g).sqrt().to_f64();
    let mut steps = 0u64;
    let mut multisteps = 0u64;

    if n <= 1 {
        if n == 1 {
            steps += phase_single_entry(&mut state);
        }
        return finalize(state, Outcome::NoCandidates, steps, multisteps, off_initial);
    }

    let partition = build_pair_partition(j0);
    let target_len = cfg.target_multistep_len.unwrap_or(n / 2).max(1);
    let budget = cfg.max_virtual_sweeps as u64 * (n as u64 - 1);
    let mut outcome = Outcome::SweepLimit;

    while multisteps < budget {
        let weights = compute_all_weights(&state, &partition, cfg.upsilon);
        let sorted = sort_weights(&weights);
        if sorted.is_empty() {
            outcome = Outcome::NoCandidates;
            break;
        }
        let ordering = build_ordering_seq(&sorted, target_len, 0, n);
        let pivots = ordering.pivots();
        let kernels: Vec<Hsvd2Result<S>> = pivots
            .par_iter()
            .map(|&(p, q)| state.pivot_hsvd2(p, q, cfg.upsilon))
            .collect();
        state.apply_left_batch(&pivots, &kernels);
        state.apply_right_batch(&pivots, &kernels);
        steps += pivots.len() as u64;
        multisteps += 1;
        if convergence_check(&kernels) {
            outcome = Outcome::Converged;
            break;
        }
    }

    if outcome.is_success() {
        steps += cleanup_ordering(&mut state, cfg.upsilon);
    }
    finalize(state, outcome, steps, multisteps, off_initial)
}

/// Sequential reference mode: one pivot per step, `-∞` weights kept, so an
/// undefined hyperbolic kernel halts the run with
/// [`Outcome::UndefinedHsvd`] instead of being filtered out.  The halting
/// rule is purely weight-driven (no small-step heuristic): the run ends
/// when no candidates remain.
pub fn run_single_pivot<S: Scalar>(
    g0: &Matrix<S>,
    j0: &SignDiagonal,
    cfg: &Config,
) -> HsvdResult<S> {
    cfg.validate();
    assert_eq!(g0.order(), j0.order(), "matrix and sign orders must agree");
    let n = g0.order();
    let mut state = IterationState::new(g0.clone(), j0.clone(), cfg.accumulate_vectors);
    let off_initial = off_fro_sq(&state.g).sqrt().to_f64();
    let mut steps = 0u64;

    if n <= 1 {
        if n == 1 {
            steps += phase_single_entry(&mut state);
        }
        return finalize(state, Outcome::NoCandidates, steps, steps, off_initial);
    }

    let partition = build_pair_partition(j0);
    let budget = cfg.max_virtual_sweeps as u64 * (n as u64 * (n as u64 - 1) / 2);
    let mut outcome = Outcome::SweepLimit;

    while steps < budget {
        let weights = compute_all_weights(&state, &partition, cfg.upsilon);
        let mut kept: Vec<AugWeight> = weights.iter().filter(|a| !a.w.is_nan()).copied().collect();
        kept.sort_by(weight_cmp);
        let Some(first) = kept.first().copied() else {
            outcome = Outcome::NoCandidates;
            break;
        };
        if first.w == f64::NEG_INFINITY {
            outcome = Outcome::UndefinedHsvd;
            break;
        }
        let step = state.pivot_hsvd2(first.p, first.q, cfg.upsilon);
        state.apply_left2(first.p, first.q, &step);
        state.apply_right2(first.p, first.q, &step);
        steps += 1;
    }

    finalize(state, outcome, steps, steps, off_initial)
}

/// Applies the only possible order-1 step: a phase making the single entry
/// real and non-negative.  Returns the number of steps applied (0 or 1).
fn phase_single_entry<S: Scalar>(state: &mut IterationState<S>) -> u64 {
    let g00 = state.g.get(0, 0);
    if g00.is_real_nonneg() {
        return 0;
    }
    state.g.set(0, 0, S::from_re(g00.abs()));
    if let Some(u_star) = &mut state.u_star {
        // U* carries the conjugate phase, so that U Σ reproduces the entry.
        u_star.set(0, 0, S::phase_conj(g00.polar()));
    }
    1
}

/// Applies diagonal-pivot small steps (swaps and phases only) until no
/// such candidate remains, so the final Σ carries real non-negative values
/// in the required order.  Pivots with off-diagonal mass are left alone:
/// this pass may relocate existing entries but never creates new
/// off-diagonal mass, and it terminates because each swap strictly reduces
/// the misordering of a sign class and each phase settles an entry for
/// good.
fn cleanup_ordering<S: Scalar>(state: &mut IterationState<S>, upsilon: f64) -> u64 {
    let n = state.order();
    let mut applied = 0u64;
    loop {
        let mut changed = false;
        for q in 1..n {
            for p in 0..q {
                if state.g.get(p, q) != S::zero() || state.g.get(q, p) != S::zero() {
                    continue;
                }
                if !is_candidate(&state.g, &state.j, p, q) {
                    continue;
                }
                let step = state.pivot_hsvd2(p, q, upsilon);
                debug_assert!(step.defined && step.was_diagonal);
                state.apply_left2(p, q, &step);
                state.apply_right2(p, q, &step);
                applied += 1;
                changed = true;
            }
        }
        if !changed {
            return applied;
        }
    }
}

fn finalize<S: Scalar>(
    state: IterationState<S>,
    outcome: Outcome,
    steps: u64,
    multisteps: u64,
    off_initial: f64,
) -> HsvdResult<S> {
    let n = state.g.order();
    let off_final = off_fro_sq(&state.g).sqrt().to_f64();
    let cycles = if n > 1 {
        multisteps as f64 / (n as f64 - 1.0)
    } else {
        0.0
    };
    let sigma: Vec<f64> = (0..n).map(|i| state.g.get(i, i).re()).collect();
    let u = state.u_star.map(|u_star| u_star.conj_transpose());
    let j = state.j;
    // V⁻¹ = J V* J: conjugate-transpose with sign flips where the row and
    // column signatures differ.
    let v_inv = state.v.map(|v| {
        let v_star = v.conj_transpose();
        Matrix::from_fn(n, |i, k| {
            let e = v_star.get(i, k);
            if j.get(i) != j.get(k) {
                e.neg()
            } else {
                e
            }
        })
    });
    HsvdResult {
        sigma,
        u,
        v_inv,
        j,
        stats: RunStats {
            steps,
            multisteps,
            cycles,
            off_initial,
            off_final,
            outcome,
        },
    }
}
