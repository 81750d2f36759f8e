//! Synthetic test problems with planted eigenvalues, and high-precision
//! checks of a computed decomposition against them.
//!
//! A problem is a pair `(G₀, J₀)` built so that the eigenvalues of
//! `G₀ J₀ G₀*` are known in advance: starting from `diag(|λ|^{1/2})` the
//! generator applies random `J₀`-orthosymmetric plane transforms on the
//! right and random Householder reflectors on the left, all in
//! double-double arithmetic, and only then rounds to binary64.  The checks
//! evaluate the decomposition residual and the eigenvalue error in
//! double-double as well, so they stay trustworthy down to ~10⁻³⁰.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dd::{Dd, DdC};
use crate::driver::HsvdResult;
use crate::matrix::{Matrix, SignDiagonal};
use crate::scalar::Scalar;
use crate::sweep::fro_sq;

/// Scalar field of a generated problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

/// Everything that determines a generated problem.  The same spec always
/// reproduces the same problem, bitwise, on every platform: the generator
/// is pinned to ChaCha8 (eigenvalues on stream 0, factors on stream 1) and
/// avoids platform-dependent math routines.
#[derive(Clone, Debug)]
pub struct TestSpec {
    /// Problem order n₀ ≥ 2.
    pub order: usize,
    pub field: Field,
    /// Eigenvalue range: 1 = uniform (0, 1]; 2 = uniform [−1, 1];
    /// 3 = standard normal.  All ranges reject |λ| outside
    /// `(eps_floor, 1]`.
    pub range: u8,
    /// Smallest admitted eigenvalue magnitude (10⁻¹³ or 10⁻¹⁵).
    pub eps_floor: f64,
    pub seed: u64,
}

impl TestSpec {
    fn validate(&self) {
        assert!(self.order >= 2, "problem order must be at least 2");
        assert!(
            (1..=3).contains(&self.range),
            "eigenvalue range must be 1, 2 or 3"
        );
        assert!(
            self.eps_floor > 0.0 && self.eps_floor < 1.0,
            "eigenvalue floor must lie in (0, 1)"
        );
    }
}

/// A generated problem together with its planted eigenvalues: by
/// construction `G₀ J₀ G₀*` has the eigenvalues `planted_eigenvalues`, up
/// to the error of generation arithmetic (double-double, then one final
/// rounding of each entry to binary64).
#[derive(Clone, Debug)]
pub struct GenResult<S> {
    pub g0: Matrix<S>,
    pub j0: SignDiagonal,
    /// Positives first, matching the sign layout of `j0`.
    pub planted_eigenvalues: Vec<f64>,
}

/// Error metrics of a finished run against its planted problem.
#[derive(Clone, Copy, Debug)]
pub struct CheckReport {
    /// ‖G₀ − U Σ V⁻¹‖_F / ‖G₀‖_F.
    pub err_decomp: f64,
    /// max relative eigenvalue error of {σᵢ²jᵢ} against the planted set.
    pub err_eigen: f64,
    /// Virtual sweep count of the run.
    pub cycles: f64,
}

/// Asserts the floating-point environment the algorithms assume:
/// round-to-nearest-even and gradual underflow.
pub fn assert_fp_environment() {
    let one = std::hint::black_box(1.0f64);
    let half_ulp = std::hint::black_box(f64::EPSILON / 2.0);
    assert_eq!(one + half_ulp, 1.0, "rounding is not round-to-nearest-even");
    let tie = std::hint::black_box(1.5 * f64::EPSILON);
    assert_eq!(
        one + tie,
        1.0 + 2.0 * f64::EPSILON,
        "ties do not round to even"
    );
    let tiny = std::hint::black_box(f64::MIN_POSITIVE) / 2.0;
    assert!(
        tiny > 0.0 && tiny < f64::MIN_POSITIVE,
        "subnormals are not supported (flush-to-zero?)"
    );
}

/// Draws the planted eigenvalues for `spec` (PRNG stream 0): `order`
/// values with |λ| ∈ (eps_floor, 1], all positive for range 1.
pub fn gen_eigenvalues(spec: &TestSpec) -> Vec<f64> {
    spec.validate();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(0);
    let mut out = Vec::with_capacity(spec.order);
    while out.len() < spec.order {
        let lambda = match spec.range {
            // 1 − [0, 1) lands exactly in (0, 1].
            1 => 1.0 - rng.gen::<f64>(),
            2 => rng.gen_range(-1.0..=1.0),
            _ => {
                let mut u: f64 = rng.gen();
                while u <= 0.0 {
                    u = rng.gen();
                }
                inverse_normal_cdf(u)
            }
        };
        if lambda.abs() > spec.eps_floor && lambda.abs() <= 1.0 {
            out.push(lambda);
        }
    }
    out
}

/// Builds `(G₀, J₀)` with the given eigenvalues planted (PRNG stream 1).
///
/// The eigenvalues are reordered positives-first; `J₀` takes their signs.
/// `G₀ = Q · diag(|λ|^{1/2}) · W` where `Q` is a product of `n₀ − 1`
/// pseudorandom Householder reflectors and `W` a product of ⌈n₀/2⌉ random
/// `J₀`-orthosymmetric plane transforms — trigonometric within same-sign
/// index pairs, hyperbolic with |tanh| ≤ 0.5 across signs.
pub fn synthesize_pair<S: Scalar>(lambda: &[f64], spec: &TestSpec) -> GenResult<S> {
    spec.validate();
    assert_eq!(
        S::IS_COMPLEX,
        spec.field == Field::Complex,
        "scalar type does not match the spec's field"
    );
    assert_eq!(lambda.len(), spec.order, "eigenvalue count mismatch");
    assert!(
        lambda.iter().all(|l| l.is_finite() && *l != 0.0),
        "planted eigenvalues must be finite and nonzero"
    );

    let mut planted: Vec<f64> = lambda.iter().copied().filter(|l| *l > 0.0).collect();
    planted.extend(lambda.iter().copied().filter(|l| *l < 0.0));
    let j0 = SignDiagonal::new(planted.iter().map(|l| if *l > 0.0 { 1 } else { -1 }).collect());

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(1);
    let n = spec.order;
    let g0 = synthesize_core(&planted, &j0, &mut rng, (n + 1) / 2, n - 1);
    GenResult {
        g0,
        j0,
        planted_eigenvalues: planted,
    }
}

/// Convenience: eigenvalues plus synthesis in one call.
pub fn generate<S: Scalar>(spec: &TestSpec) -> GenResult<S> {
    synthesize_pair(&gen_eigenvalues(spec), spec)
}

/// ‖G₀ − U Σ V⁻¹‖_F / ‖G₀‖_F, accumulated entirely in double-double.
pub fn check_decomposition<S: Scalar>(g0: &Matrix<S>, result: &HsvdResult<S>) -> f64 {
    let n = g0.order();
    let u = result.u.as_ref().expect("decomposition check needs U");
    let v_inv = result.v_inv.as_ref().expect("decomposition check needs V⁻¹");
    assert!(u.order() == n && v_inv.order() == n && result.sigma.len() == n);

    // T = Σ V⁻¹ (row k scaled by σ_k), then the residual of U·T.
    let t: Vec<DdC> = (0..n * n)
        .map(|idx| lift(v_inv.get(idx / n, idx % n)).scale(Dd::from_f64(result.sigma[idx / n])))
        .collect();
    let mut num = Dd::ZERO;
    for i in 0..n {
        for j in 0..n {
            let mut acc = DdC::ZERO;
            for k in 0..n {
                acc = acc.add(lift(u.get(i, k)).mul(t[k * n + j]));
            }
            num = num.add(acc.sub(lift(g0.get(i, j))).norm_sq());
        }
    }
    num.sqrt().div(fro_sq(g0).sqrt()).to_f64()
}

/// Max relative error between the planted eigenvalues and {σᵢ² jᵢ}, both
/// sorted descending so the comparison is permutation-safe.
pub fn check_eigenvalues(planted: &[f64], sigma: &[f64], j0: &SignDiagonal) -> f64 {
    assert_eq!(planted.len(), sigma.len(), "eigenvalue count mismatch");
    assert_eq!(sigma.len(), j0.order(), "sign count mismatch");
    let mut lam = planted.to_vec();
    let mut computed: Vec<f64> = sigma
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let sq = Dd::from_prod(*s, *s).to_f64();
            if j0.get(i) > 0 {
                sq
            } else {
                -sq
            }
        })
        .collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    computed.sort_by(|a, b| b.total_cmp(a));
    let mut worst = 0.0f64;
    for (l, c) in lam.iter().zip(&computed) {
        let rel = Dd::from_sum(*l, -*c).div(Dd::from_f64(*l)).abs().to_f64();
        worst = worst.max(rel);
    }
    worst
}

/// Both error metrics plus the run's cycle count in one report.
pub fn check<S: Scalar>(gen: &GenResult<S>, result: &HsvdResult<S>) -> CheckReport {
    CheckReport {
        err_decomp: check_decomposition(&gen.g0, result),
        err_eigen: check_eigenvalues(&gen.planted_eigenvalues, &result.sigma, &gen.j0),
        cycles: result.stats.cycles,
    }
}

#[inline]
fn lift<S: Scalar>(z: S) -> DdC {
    DdC::new(z.re(), z.im())
}

/// Inverse of the standard normal CDF (Acklam's rational approximation,
/// relative error below 1.2·10⁻⁹ — plenty for drawing test eigenvalues,
/// and deterministic across platforms, unlike libm-dependent samplers).
fn inverse_normal_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * libm::log(p)).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -inverse_normal_cdf_tail(1.0 - p)
    }
}

/// Upper-tail helper so both tails share the lower-tail branch exactly.
fn inverse_normal_cdf_tail(p: f64) -> f64 {
    inverse_normal_cdf(p)
}

/// Square matrix with double-double complex entries, row-major; only what
/// the generator and checks need.
struct DdMat {
    n: usize,
    data: Vec<DdC>,
}

impl DdMat {
    fn diag_sqrt_abs(values: &[f64]) -> DdMat {
        let n = values.len();
        let mut data = vec![DdC::ZERO; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = DdC {
                re: Dd::from_f64(v.abs()).sqrt(),
                im: Dd::ZERO,
            };
        }
        DdMat { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> DdC {
        self.data[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: DdC) {
        self.data[i * self.n + j] = v;
    }

    /// Right-multiplies by the plane transform embedding `w` at (p, q).
    fn mul_plane_right(&mut self, p: usize, q: usize, w: [[DdC; 2]; 2]) {
        for i in 0..self.n {
            let a = self.at(i, p);
            let b = self.at(i, q);
            self.set(i, p, a.mul(w[0][0]).add(b.mul(w[1][0])));
            self.set(i, q, a.mul(w[0][1]).add(b.mul(w[1][1])));
        }
    }

    /// Left-multiplies by the Householder reflector `I − β v v*`.
    fn reflect_left(&mut self, v: &[DdC], beta: Dd) {
        for j in 0..self.n {
            let mut s = DdC::ZERO;
            for i in 0..self.n {
                s = s.add(v[i].conj().mul(self.at(i, j)));
            }
            let bs = s.scale(beta);
            for i in 0..self.n {
                let updated = self.at(i, j).sub(v[i].mul(bs));
                self.set(i, j, updated);
            }
        }
    }

    fn round<S: Scalar>(&self) -> Matrix<S> {
        Matrix::from_fn(self.n, |i, j| {
            let z = self.at(i, j);
            S::from_parts(z.re.to_f64(), z.im.to_f64())
        })
    }
}

/// Applies `planes` random plane transforms and `reflectors` random
/// Householder reflectors to `diag(|λ|^{1/2})`, then rounds to binary64.
/// Kept separate so tests can plant trivial factor counts.
fn synthesize_core<S: Scalar>(
    lambda: &[f64],
    j0: &SignDiagonal,
    rng: &mut ChaCha8Rng,
    planes: usize,
    reflectors: usize,
) -> Matrix<S> {
    let n = lambda.len();
    let mut m = DdMat::diag_sqrt_abs(lambda);
    for _ in 0..planes {
        let (p, q) = draw_pair(rng, n);
        let w = if j0.same_sign(p, q) {
            let (c, s) = draw_direction(rng);
            let f = draw_phase::<S>(rng);
            // Unitary: [[c, s·f], [−s·f̄, c]].
            [
                [real(c), f.scale(s)],
                [f.conj().scale(s.neg()), real(c)],
            ]
        } else {
            // Positives come first in J₀, so (p, q) sees signs (+, −).
            let t = rng.gen_range(-0.5..=0.5);
            let ch = Dd::ONE.div(Dd::ONE.sub(Dd::from_prod(t, t)).sqrt());
            let sh = ch.mul_f64(t);
            let f = draw_phase::<S>(rng);
            // J-orthosymmetric: [[ch, sh·f], [sh·f̄, ch]].
            [[real(ch), f.scale(sh)], [f.conj().scale(sh), real(ch)]]
        };
        m.mul_plane_right(p, q, w);
    }
    for _ in 0..reflectors {
        let (v, beta) = draw_reflector::<S>(rng, n);
        m.reflect_left(&v, beta);
    }
    m.round()
}

#[inline]
fn real(x: Dd) -> DdC {
    DdC {
        re: x,
        im: Dd::ZERO,
    }
}

fn draw_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let p = rng.gen_range(0..n);
    let mut q = rng.gen_range(0..n);
    while q == p {
        q = rng.gen_range(0..n);
    }
    (p.min(q), p.max(q))
}

/// A random direction (cos θ, sin θ), renormalized in double-double so the
/// plane transform is orthogonal well beyond binary64.
fn draw_direction(rng: &mut ChaCha8Rng) -> (Dd, Dd) {
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let (c, s) = (libm::cos(theta), libm::sin(theta));
    let norm = Dd::from_prod(c, c).add(Dd::from_prod(s, s)).sqrt();
    (Dd::from_f64(c).div(norm), Dd::from_f64(s).div(norm))
}

/// A random unit phase — exactly 1 in the real field (no PRNG use there,
/// since angles and tanh draws already cover both signs).
fn draw_phase<S: Scalar>(rng: &mut ChaCha8Rng) -> DdC {
    if !S::IS_COMPLEX {
        return real(Dd::ONE);
    }
    let (c, s) = draw_direction(rng);
    DdC { re: c, im: s }
}

/// A random reflector vector `v` with its coefficient `β = 2/‖v‖²`.
fn draw_reflector<S: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> (Vec<DdC>, Dd) {
    loop {
        let v: Vec<DdC> = (0..n)
            .map(|_| {
                let re = rng.gen_range(-1.0..1.0);
                let im = if S::IS_COMPLEX {
                    rng.gen_range(-1.0..1.0)
                } else {
                    0.0
                };
                DdC::new(re, im)
            })
            .collect();
        let norm_sq = v.iter().fold(Dd::ZERO, |acc, z| acc.add(z.norm_sq()));
        if norm_sq.to_f64() > 0.0 {
            return (v, Dd::from_f64(2.0).div(norm_sq));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::{run, Config, Outcome, RunStats};
    use crate::scalar::C64;

    fn spec(order: usize, field: Field, range: u8, seed: u64) -> TestSpec {
        TestSpec {
            order,
            field,
            range,
            eps_floor: 1e-13,
            seed,
        }
    }

    /// Eigenvalues of a Hermitian matrix held in double-double, by cyclic
    /// two-sided plane rotations (phase step then a real rotation, both
    /// renormalized in double-double so similarity is preserved far beyond
    /// binary64).  Small orders only.
    fn dd_hermitian_eigenvalues(h: &mut DdMat) -> Vec<f64> {
        let n = h.n;
        for _ in 0..60 {
            let mut biggest = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    let hpq = h.at(p, q);
                    let mag_sq = hpq.norm_sq();
                    let mag = mag_sq.sqrt();
                    biggest = biggest.max(mag.to_f64());
                    if mag.to_f64() == 0.0 {
                        continue;
                    }
                    // Phase column q (and conjugate row q) so (p, q)
                    // becomes real non-negative.
                    let w = hpq.conj().scale(Dd::ONE.div(mag));
                    for i in 0..n {
                        h.set(i, q, h.at(i, q).mul(w));
                    }
                    for i in 0..n {
                        h.set(q, i, h.at(q, i).mul(w.conj()));
                    }
                    // Real rotation zeroing the now-real off-diagonal.
                    let alpha = h.at(p, p).re.to_f64();
                    let delta = h.at(q, q).re.to_f64();
                    let gamma = h.at(p, q).re.to_f64();
                    let d = alpha - delta;
                    let t = if d == 0.0 {
                        1.0
                    } else {
                        -2.0 * gamma * d.signum() / (d.abs() + d.hypot(2.0 * gamma))
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let norm = Dd::from_prod(c, c).add(Dd::from_prod(s, s)).sqrt();
                    let (c, s) = (Dd::from_f64(c).div(norm), Dd::from_f64(s).div(norm));
                    for i in 0..n {
                        let a = h.at(i, p);
                        let b = h.at(i, q);
                        h.set(i, p, a.scale(c).sub(b.scale(s)));
                        h.set(i, q, a.scale(s).add(b.scale(c)));
                    }
                    for i in 0..n {
                        let a = h.at(p, i);
                        let b = h.at(q, i);
                        h.set(p, i, a.scale(c).sub(b.scale(s)));
                        h.set(q, i, a.scale(s).add(b.scale(c)));
                    }
                }
            }
            if biggest < 1e-28 {
                break;
            }
        }
        (0..n).map(|i| h.at(i, i).re.to_f64()).collect()
    }

    fn gram_dd<S: Scalar>(g: &Matrix<S>, j: &SignDiagonal) -> DdMat {
        let n = g.order();
        let mut h = DdMat {
            n,
            data: vec![DdC::ZERO; n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let mut acc = DdC::ZERO;
                for l in 0..n {
                    let term = lift(g.get(i, l)).mul(lift(g.get(k, l)).conj());
                    acc = if j.get(l) > 0 {
                        acc.add(term)
                    } else {
                        acc.sub(term)
                    };
                }
                h.set(i, k, acc);
            }
        }
        h
    }

    #[test]
    fn fp_environment_is_as_assumed() {
        assert_fp_environment();
    }

    #[test]
    fn range_one_eigenvalues_are_positive_and_floored() {
        let s = spec(64, Field::Real, 1, 7);
        let lam = gen_eigenvalues(&s);
        assert_eq!(lam.len(), 64);
        assert!(lam.iter().all(|l| *l > s.eps_floor && *l <= 1.0));
    }

    #[test]
    fn range_two_is_deterministic_and_floored() {
        let s = spec(48, Field::Complex, 2, 12345);
        let a = gen_eigenvalues(&s);
        let b = gen_eigenvalues(&s);
        assert_eq!(a, b);
        assert!(a.iter().all(|l| l.abs() > s.eps_floor && l.abs() <= 1.0));
        assert!(a.iter().any(|l| *l < 0.0), "range 2 should mix signs");
    }

    #[test]
    fn range_three_mixes_signs_for_moderate_orders() {
        for seed in 0..10 {
            let lam = gen_eigenvalues(&spec(16, Field::Real, 3, seed));
            assert!(lam.iter().any(|l| *l > 0.0), "seed {seed} lacks positives");
            assert!(lam.iter().any(|l| *l < 0.0), "seed {seed} lacks negatives");
            assert!(lam.iter().all(|l| l.abs() <= 1.0));
        }
    }

    #[test]
    fn generation_is_bitwise_deterministic() {
        let s = spec(12, Field::Complex, 2, 99);
        let a = generate::<C64>(&s);
        let b = generate::<C64>(&s);
        assert_eq!(a.g0, b.g0);
        assert_eq!(a.j0, b.j0);
        assert_eq!(a.planted_eigenvalues, b.planted_eigenvalues);
    }

    #[test]
    fn trivial_factor_counts_leave_the_diagonal() {
        let lambda = [0.81, 0.25, -0.49];
        let j0 = SignDiagonal::new(vec![1, 1, -1]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g: Matrix<f64> = synthesize_core(&lambda, &j0, &mut rng, 0, 0);
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    let d = g.get(i, i);
                    assert!((d * d - lambda[i].abs()).abs() <= 4.0 * f64::EPSILON);
                } else {
                    assert_eq!(g.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn planted_eigenvalues_survive_the_synthesis() {
        // eig(G₀ J₀ G₀*) against the planted values, with the Gram matrix
        // and its eigenvalues both evaluated in double-double.
        let s = TestSpec {
            order: 4,
            field: Field::Complex,
            range: 2,
            eps_floor: 1e-13,
            seed: 21,
        };
        let lambda = [0.9, -0.5, 0.3, -0.2];
        let gen = synthesize_pair::<C64>(&lambda, &s);
        assert_eq!(gen.j0.signs(), &[1, 1, -1, -1]);
        assert_eq!(gen.planted_eigenvalues, vec![0.9, 0.3, -0.5, -0.2]);

        let mut h = gram_dd(&gen.g0, &gen.j0);
        let mut eig = dd_hermitian_eigenvalues(&mut h);
        eig.sort_by(|a, b| b.total_cmp(a));
        let mut planted = gen.planted_eigenvalues.clone();
        planted.sort_by(|a, b| b.total_cmp(a));
        for (e, l) in eig.iter().zip(&planted) {
            assert!(
                ((e - l) / l).abs() <= 1e-13,
                "eigenvalue {e} drifted from planted {l}"
            );
        }

        // Same check in the real field.
        let s = TestSpec {
            field: Field::Real,
            ..s
        };
        let gen = synthesize_pair::<f64>(&lambda, &s);
        let mut h = gram_dd(&gen.g0, &gen.j0);
        let mut eig = dd_hermitian_eigenvalues(&mut h);
        eig.sort_by(|a, b| b.total_cmp(a));
        for (e, l) in eig.iter().zip(&planted) {
            assert!(((e - l) / l).abs() <= 1e-13);
        }
    }

    #[test]
    fn all_plus_signature_reduces_to_an_ordinary_svd_problem() {
        let s = spec(8, Field::Real, 1, 31);
        let gen = generate::<f64>(&s);
        assert!(gen.j0.signs().iter().all(|sg| *sg == 1));

        let na = nalgebra::DMatrix::from_fn(8, 8, |i, j| gen.g0.get(i, j));
        let mut sv: Vec<f64> = na.svd(false, false).singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        let mut expected: Vec<f64> = gen
            .planted_eigenvalues
            .iter()
            .map(|l| l.sqrt())
            .collect();
        expected.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in sv.iter().zip(&expected) {
            assert!(((a - b) / b).abs() <= 1e-12, "singular value {a} vs {b}");
        }
    }

    #[test]
    fn decomposition_check_is_zero_for_exact_factors() {
        let g0: Matrix<f64> = Matrix::identity(3);
        let result = HsvdResult {
            sigma: vec![1.0; 3],
            u: Some(Matrix::identity(3)),
            v_inv: Some(Matrix::identity(3)),
            j: SignDiagonal::identity(3),
            stats: RunStats {
                steps: 0,
                multisteps: 0,
                cycles: 0.0,
                off_initial: 0.0,
                off_final: 0.0,
                outcome: Outcome::NoCandidates,
            },
        };
        assert_eq!(check_decomposition(&g0, &result), 0.0);
    }

    #[test]
    fn decomposition_check_sees_first_order_perturbations() {
        // G0 = diag(2, 1) with U(0,0) = 1 + δ: residual is exactly 2δ, so
        // the relative error is 2δ/√5.
        let g0 = Matrix::from_row_major(2, vec![2.0, 0.0, 0.0, 1.0]);
        let delta = 1e-8;
        let mut u = Matrix::identity(2);
        u.set(0, 0, 1.0 + delta);
        let result = HsvdResult {
            sigma: vec![2.0, 1.0],
            u: Some(u),
            v_inv: Some(Matrix::identity(2)),
            j: SignDiagonal::identity(2),
            stats: RunStats {
                steps: 0,
                multisteps: 0,
                cycles: 0.0,
                off_initial: 0.0,
                off_final: 0.0,
                outcome: Outcome::NoCandidates,
            },
        };
        let err = check_decomposition(&g0, &result);
        // Compare against the δ that actually survived rounding into U.
        let stored_delta = (1.0 + delta) - 1.0;
        let expected = 2.0 * stored_delta / 5.0f64.sqrt();
        assert!((err - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn eigenvalue_check_is_permutation_safe_and_first_order() {
        let planted = vec![0.9, 0.3, -0.5];
        let j = SignDiagonal::new(vec![1, 1, -1]);
        let sigma: Vec<f64> = vec![0.9f64.sqrt(), 0.3f64.sqrt(), 0.5f64.sqrt()];
        let clean = check_eigenvalues(&planted, &sigma, &j);
        assert!(clean <= 4.0 * f64::EPSILON, "clean check gave {clean}");

        // Shuffle Σ and J positions together: the metric must not move.
        let shuffled_sigma = vec![sigma[2], sigma[0], sigma[1]];
        let shuffled_j = SignDiagonal::new(vec![-1, 1, 1]);
        let shuffled = check_eigenvalues(&planted, &shuffled_sigma, &shuffled_j);
        assert_eq!(clean, shuffled);

        // One σ off by relative δ moves the metric by ≈ 2δ.
        let delta = 1e-9;
        let bumped = vec![sigma[0] * (1.0 + delta), sigma[1], sigma[2]];
        let err = check_eigenvalues(&planted, &bumped, &j);
        assert!((err - 2.0 * delta).abs() <= 1e-3 * (2.0 * delta));
    }

    #[test]
    fn planted_problems_run_end_to_end() {
        for field in [Field::Real, Field::Complex] {
            let s = spec(16, field, 2, 5);
            let report = match field {
                Field::Real => {
                    let gen = generate::<f64>(&s);
                    let result = run(&gen.g0, &gen.j0, &Config::default());
                    assert!(result.stats.outcome.is_success());
                    check(&gen, &result)
                }
                Field::Complex => {
                    let gen = generate::<C64>(&s);
                    let result = run(&gen.g0, &gen.j0, &Config::default());
                    assert!(result.stats.outcome.is_success());
                    check(&gen, &result)
                }
            };
            assert!(report.err_decomp <= 1e-12, "err_decomp = {}", report.err_decomp);
            assert!(report.err_eigen <= 1e-11, "err_eigen = {}", report.err_eigen);
            assert!(report.cycles > 0.0 && report.cycles <= 50.0);
        }
    }
}
