//! Limit profiles and the differential-equation description of the process.
//!
//! Time `t` counts edges per vertex. A vertex is hit at rate `2/u(t)`, where
//! `u` is the fraction of unsaturated vertices, so with `λ' = 2/u` a degree-`j`
//! vertex is still unsaturated with probability `P(Poisson(λ) < j)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::rational::{int, to_f64};
use crate::{Error, Result};

/// Asymptotic degree fractions `r_1..r_Δ` and a cut degree `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitProfile {
    r: Vec<BigRational>,
    k: u32,
}

impl LimitProfile {
    /// `r[j-1]` is the fraction of degree-`j` vertices; `1 ≤ k ≤ Δ`.
    pub fn new(mut r: Vec<BigRational>, k: u32) -> Result<Self> {
        while r.len() > 1 && r.last().is_some_and(|x| x.is_zero()) {
            r.pop();
        }
        if r.is_empty() || r.iter().any(|x| x.is_negative()) {
            return Err(Error::InvalidParameters("fractions must be nonnegative".into()));
        }
        let total: BigRational = r.iter().sum();
        if total != int(1) {
            return Err(Error::InvalidParameters(format!("fractions sum to {total}, not 1")));
        }
        if k == 0 || k as usize > r.len() {
            return Err(Error::CutOutOfRange { k, delta: r.len() as u32 });
        }
        Ok(LimitProfile { r, k })
    }

    /// From `(j, r_j)` pairs; unlisted degrees get zero.
    pub fn from_pairs(pairs: &[(u32, BigRational)], k: u32) -> Result<Self> {
        let delta = pairs.iter().map(|&(j, _)| j).max().unwrap_or(0) as usize;
        if pairs.iter().any(|&(j, _)| j == 0) {
            return Err(Error::InvalidParameters("degree 0 in profile".into()));
        }
        let mut r = vec![BigRational::zero(); delta];
        for (j, v) in pairs {
            r[*j as usize - 1] += v;
        }
        Self::new(r, k)
    }

    pub fn with_k(&self, k: u32) -> Result<Self> {
        Self::new(self.r.clone(), k)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn delta(&self) -> u32 {
        self.r.len() as u32
    }

    /// `r_j` for `1 ≤ j ≤ Δ`.
    pub fn r(&self, j: u32) -> &BigRational {
        &self.r[j as usize - 1]
    }

    pub fn fractions(&self) -> &[BigRational] {
        &self.r
    }

    fn r_f64(&self) -> Vec<f64> {
        self.r.iter().map(to_f64).collect()
    }

    /// `T = ½ Σ j r_j`.
    pub fn big_t(&self) -> BigRational {
        self.weighted_sum(self.delta()) / int(2)
    }

    /// `Σ_{j≤k} j r_j`.
    pub fn weighted_sum(&self, k: u32) -> BigRational {
        self.r.iter().enumerate().take(k as usize).map(|(i, x)| x * int(i as u64 + 1)).sum()
    }
}

/// `(Σ_{j≤k} j r_j)² / (2 Σ_j j r_j)`.
pub fn mu_hat(profile: &LimitProfile, k: u32) -> Result<BigRational> {
    if k == 0 || k > profile.delta() {
        return Err(Error::CutOutOfRange { k, delta: profile.delta() });
    }
    let s = profile.weighted_sum(k);
    Ok(&s * &s / (profile.weighted_sum(profile.delta()) * int(2)))
}

/// `u_j(λ) = r_j e^{−λ} Σ_{ℓ<j} λ^ℓ/ℓ!` for `j = 1..Δ`.
pub fn u_closed_form(profile: &LimitProfile, lambda: f64) -> Vec<f64> {
    closed_form(&profile.r_f64(), lambda)
}

fn closed_form(r: &[f64], lambda: f64) -> Vec<f64> {
    let e = libm::exp(-lambda);
    let mut term = e;
    let mut cum = 0.0;
    r.iter()
        .enumerate()
        .map(|(i, &rj)| {
            cum += term;
            term *= lambda / (i as f64 + 1.0);
            rj * cum
        })
        .collect()
}

/// `T − t(λ) = ½ Σ_j r_j Σ_{ℓ<j} P(Poisson(λ) ≤ ℓ)`, the edge mass left after `λ`.
pub fn remaining_mass(profile: &LimitProfile, lambda: f64) -> f64 {
    remaining(&profile.r_f64(), lambda)
}

fn remaining(r: &[f64], lambda: f64) -> f64 {
    let e = libm::exp(-lambda);
    let (mut term, mut cdf, mut acc, mut total) = (e, 0.0, 0.0, 0.0);
    for (i, &rj) in r.iter().enumerate() {
        cdf += term;
        term *= lambda / (i as f64 + 1.0);
        acc += cdf;
        total += rj * acc;
    }
    total / 2.0
}

/// All pairs `(a, b)` with `1 ≤ a ≤ b ≤ Δ` in lexicographic order.
pub fn pair_index(delta: u32) -> Vec<(u32, u32)> {
    (1..=delta).flat_map(|a| (a..=delta).map(move |b| (a, b))).collect()
}

/// `x'_{a,b}` divided by the common factor, at the given `u_j`.
fn x_rates(uj: &[f64], pairs: &[(u32, u32)], out: &mut [f64]) {
    let u: f64 = uj.iter().sum();
    let inv = 1.0 / (u * u);
    for (o, &(a, b)) in out.iter_mut().zip(pairs) {
        let f = if a == b { 1.0 } else { 2.0 };
        *o = f * uj[a as usize - 1] * uj[b as usize - 1] * inv;
    }
}

/// Sampled solution on `[0, T−δ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeTrajectory {
    pub big_t: f64,
    pub delta: u32,
    pub t: Vec<f64>,
    pub lambda: Vec<f64>,
    pub u: Vec<f64>,
    /// `u_j` from the closed form at the integrated `λ`, one row per grid point.
    pub u_j: Vec<Vec<f64>>,
    /// `u_j` from the hit-count system, integrated independently.
    pub u_j_numeric: Vec<Vec<f64>>,
    pub pairs: Vec<(u32, u32)>,
    pub x: Vec<Vec<f64>>,
}

impl OdeTrajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        *self.t.last().unwrap_or(&0.0)
    }

    /// Index of `x_{a,b}` with `a ≤ b`.
    pub fn pair_position(&self, a: u32, b: u32) -> Option<usize> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.pairs.iter().position(|&p| p == (a, b))
    }

    /// Largest gap between the closed-form and the integrated `u_j`.
    pub fn closed_form_gap(&self) -> f64 {
        self.u_j
            .iter()
            .zip(&self.u_j_numeric)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }
}

/// Default endpoint guard as a fraction of `T`.
pub const DEFAULT_GUARD: f64 = 1e-3;

/// Integrates with the default endpoint guard `δ = 10⁻³ T`.
pub fn integrate(profile: &LimitProfile, step: f64) -> Result<OdeTrajectory> {
    integrate_with_guard(profile, step, DEFAULT_GUARD * to_f64(&profile.big_t()))
}

/// Classical RK4 on `(λ, w, x)` over `[0, T−δ]` with fixed step close to `step`.
///
/// `w_{j,h}` is the fraction of degree-`j` vertices hit exactly `h < j` times;
/// `u` used for the rates comes from the closed form.
pub fn integrate_with_guard(profile: &LimitProfile, step: f64, guard: f64) -> Result<OdeTrajectory> {
    let big_t = to_f64(&profile.big_t());
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameters("step must be positive".into()));
    }
    if !(guard > 0.0 && guard < big_t) {
        return Err(Error::InvalidParameters("guard must lie in (0, T)".into()));
    }
    let end = big_t - guard;
    let steps = libm::ceil(end / step) as usize;
    if steps < 1000 {
        return Err(Error::InvalidParameters(format!("only {steps} grid steps; need at least 1000")));
    }
    let h = end / steps as f64;
    let r = profile.r_f64();
    let delta = profile.delta();
    let pairs = pair_index(delta);
    let nw: usize = (1..=delta as usize).sum();
    let np = pairs.len();
    // state: λ, w (nw entries), x (np entries)
    let dim = 1 + nw + np;
    let mut y = vec![0.0; dim];
    let mut off = 1;
    for (i, &rj) in r.iter().enumerate() {
        y[off] = rj;
        off += i + 1;
    }
    let rhs = |y: &[f64], dy: &mut [f64]| -> Result<()> {
        let uj = closed_form(&r, y[0]);
        let u: f64 = uj.iter().sum();
        if !(u > 1e-300 && u.is_finite()) {
            return Err(Error::Integration(format!("u collapsed at λ = {}", y[0])));
        }
        let rate = 2.0 / u;
        dy[0] = rate;
        let mut off = 1;
        for j in 1..=delta as usize {
            for hh in 0..j {
                let prev = if hh == 0 { 0.0 } else { y[off + hh - 1] };
                dy[off + hh] = rate * (prev - y[off + hh]);
            }
            off += j;
        }
        x_rates(&uj, &pairs, &mut dy[1 + nw..]);
        Ok(())
    };
    let mut out = OdeTrajectory {
        big_t,
        delta,
        t: Vec::with_capacity(steps + 1),
        lambda: Vec::with_capacity(steps + 1),
        u: Vec::with_capacity(steps + 1),
        u_j: Vec::with_capacity(steps + 1),
        u_j_numeric: Vec::with_capacity(steps + 1),
        pairs: pairs.clone(),
        x: Vec::with_capacity(steps + 1),
    };
    let record = |out: &mut OdeTrajectory, t: f64, y: &[f64]| {
        let uj = closed_form(&r, y[0]);
        out.t.push(t);
        out.lambda.push(y[0]);
        out.u.push(uj.iter().sum());
        out.u_j.push(uj);
        let mut num = Vec::with_capacity(delta as usize);
        let mut off = 1;
        for j in 1..=delta as usize {
            num.push(y[off..off + j].iter().sum());
            off += j;
        }
        out.u_j_numeric.push(num);
        out.x.push(y[1 + nw..].to_vec());
    };
    record(&mut out, 0.0, &y);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    for i in 0..steps {
        rhs(&y, &mut k1)?;
        for d in 0..dim {
            tmp[d] = y[d] + 0.5 * h * k1[d];
        }
        rhs(&tmp, &mut k2)?;
        for d in 0..dim {
            tmp[d] = y[d] + 0.5 * h * k2[d];
        }
        rhs(&tmp, &mut k3)?;
        for d in 0..dim {
            tmp[d] = y[d] + h * k3[d];
        }
        rhs(&tmp, &mut k4)?;
        for d in 0..dim {
            y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        record(&mut out, (i + 1) as f64 * h, &y);
    }
    Ok(out)
}

/// `ρ_k` with its pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoEstimate {
    pub rho: f64,
    /// `Σ_{a≤b≤k} x_{a,b}(T−δ)`.
    pub at_guard: f64,
    /// Contribution of `[T−δ, T)`, integrated in `λ`.
    pub tail: f64,
    /// Bound on the error of `tail`: quadrature difference plus the mass
    /// beyond the last `λ`.
    pub tail_error: f64,
}

/// `∫ (Σ_{a≤k} u_a)² / (2u) dλ` over `[λ0, λ1]` by Simpson's rule with `n` panels.
fn lambda_integral(r: &[f64], k: u32, l0: f64, l1: f64, n: usize) -> f64 {
    let f = |l: f64| {
        let uj = closed_form(r, l);
        let u: f64 = uj.iter().sum();
        let s: f64 = uj[..k as usize].iter().sum();
        if u > 0.0 {
            s * s / (2.0 * u)
        } else {
            0.0
        }
    };
    let n = n + n % 2;
    let h = (l1 - l0) / n as f64;
    let mut acc = f(l0) + f(l1);
    for i in 1..n {
        acc += f(l0 + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Smallest `λ` (on a coarse ladder) leaving less than `eps` edge mass.
fn lambda_cutoff(r: &[f64], from: f64, eps: f64) -> f64 {
    let mut l = from.max(1.0);
    while remaining(r, l) > eps && l < 1e4 {
        l += 1.0;
    }
    l
}

/// `ρ_k = Σ_{a≤b≤k} x_{a,b}(T)` from a trajectory plus a `λ`-space tail.
pub fn rho_k(traj: &OdeTrajectory, profile: &LimitProfile, k: u32) -> Result<RhoEstimate> {
    if k == 0 || k > profile.delta() {
        return Err(Error::CutOutOfRange { k, delta: profile.delta() });
    }
    let last = traj.x.last().ok_or_else(|| Error::Integration("empty trajectory".into()))?;
    let at_guard: f64 = traj.pairs.iter().zip(last).filter(|(&(_, b), _)| b <= k).map(|(_, v)| v).sum();
    let r = profile.r_f64();
    let l0 = *traj.lambda.last().unwrap_or(&0.0);
    let l1 = lambda_cutoff(&r, l0, 1e-14);
    let n = (((l1 - l0) * 400.0) as usize).max(200);
    let fine = lambda_integral(&r, k, l0, l1, 2 * n);
    let coarse = lambda_integral(&r, k, l0, l1, n);
    let tail_error = (fine - coarse).abs() + remaining(&r, l1);
    Ok(RhoEstimate { rho: at_guard + fine, at_guard, tail: fine, tail_error })
}

/// `ρ_k` computed entirely in `λ`, as an independent cross-check.
pub fn rho_k_lambda(profile: &LimitProfile, k: u32) -> Result<f64> {
    if k == 0 || k > profile.delta() {
        return Err(Error::CutOutOfRange { k, delta: profile.delta() });
    }
    let r = profile.r_f64();
    let l1 = lambda_cutoff(&r, 0.0, 1e-15);
    Ok(lambda_integral(&r, k, 0.0, l1, ((l1 * 2000.0) as usize).max(2000)))
}

/// `T (Σ_{j≤k} r_j)² / (2Δ+1)`, a lower bound on `ρ_k`.
pub fn rho_lower_bound(profile: &LimitProfile, k: u32) -> BigRational {
    let s: BigRational = profile.fractions().iter().take(k as usize).sum();
    profile.big_t() * &s * &s / int(2 * profile.delta() as u64 + 1)
}

/// Outcome of `Σ_j j r_j > k √(2Δ+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SufficientCondition {
    pub holds: bool,
    /// `(Σ_j j r_j)²`.
    pub lhs_squared: BigRational,
    /// `k² (2Δ+1)`.
    pub rhs_squared: BigRational,
    /// `Σ_j j r_j − k √(2Δ+1)`.
    pub margin: f64,
}

pub fn sufficient_condition(profile: &LimitProfile, k: u32) -> SufficientCondition {
    let s = profile.weighted_sum(profile.delta());
    let lhs_squared = &s * &s;
    let rhs_squared = int(k as u64 * k as u64 * (2 * profile.delta() as u64 + 1));
    let margin = to_f64(&s) - k as f64 * libm::sqrt(2.0 * profile.delta() as f64 + 1.0);
    SufficientCondition { holds: lhs_squared > rhs_squared, lhs_squared, rhs_squared, margin }
}

/// Worst violation of each pointwise bound over the grid (0 when it holds).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvariantReport {
    pub initial_error: f64,
    pub u_increase: f64,
    pub u_lower: f64,
    pub lambda_upper: f64,
    pub u_j_lower: f64,
}

impl InvariantReport {
    pub fn holds(&self, tol: f64) -> bool {
        [self.initial_error, self.u_increase, self.u_lower, self.lambda_upper, self.u_j_lower].iter().all(|&v| v <= tol)
    }
}

/// `u(0) = 1`, `x(0) = 0`, `u` non-increasing, `u ≥ 2(T−t)/Δ`,
/// `λ ≤ Δ ln(T/(T−t))` and `u_j ≥ r_j e^{−λ}`.
pub fn check_invariants(traj: &OdeTrajectory, profile: &LimitProfile) -> InvariantReport {
    let r = profile.r_f64();
    let d = traj.delta as f64;
    let mut rep = InvariantReport::default();
    if let (Some(u0), Some(x0)) = (traj.u.first(), traj.x.first()) {
        rep.initial_error = (u0 - 1.0).abs() + x0.iter().map(|v| v.abs()).sum::<f64>();
    }
    for i in 0..traj.len() {
        let (t, u, l) = (traj.t[i], traj.u[i], traj.lambda[i]);
        if i > 0 {
            rep.u_increase = rep.u_increase.max(u - traj.u[i - 1]);
        }
        rep.u_lower = rep.u_lower.max(2.0 * (traj.big_t - t) / d - u);
        rep.lambda_upper = rep.lambda_upper.max(l - d * libm::log(traj.big_t / (traj.big_t - t)));
        let e = libm::exp(-l);
        for (uj, rj) in traj.u_j[i].iter().zip(&r) {
            rep.u_j_lower = rep.u_j_lower.max(rj * e - uj);
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn half_one_half(delta: u32, k: u32) -> LimitProfile {
        LimitProfile::from_pairs(&[(1, ratio(1, 2)), (delta, ratio(1, 2))], k).unwrap()
    }

    #[test]
    fn profile_validation() {
        assert!(LimitProfile::new(vec![ratio(1, 2)], 1).is_err());
        assert!(LimitProfile::new(vec![ratio(3, 2), ratio(-1, 2)], 1).is_err());
        assert!(LimitProfile::new(vec![ratio(1, 1)], 2).is_err());
        let p = half_one_half(7, 1);
        assert_eq!(p.big_t(), ratio(2, 1));
        assert_eq!(p.delta(), 7);
    }

    #[test]
    fn mu_hat_and_condition_examples() {
        let p = half_one_half(7, 1);
        assert_eq!(mu_hat(&p, 1).unwrap(), ratio(1, 32));
        assert!(sufficient_condition(&p, 1).holds);
        assert!(!sufficient_condition(&half_one_half(5, 1), 1).holds);
        let near = LimitProfile::from_pairs(&[(3, ratio(1, 100)), (4, ratio(99, 100))], 3).unwrap();
        assert!(!sufficient_condition(&near, 3).holds);
    }

    #[test]
    fn closed_form_at_start_and_degree_one() {
        let p = half_one_half(7, 1);
        assert_eq!(u_closed_form(&p, 0.0), vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5]);
        let u = u_closed_form(&p, 1.3);
        assert!((u[0] - 0.5 * libm::exp(-1.3)).abs() < 1e-15);
        assert!((remaining_mass(&p, 0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pure_matching_profile() {
        let p = LimitProfile::new(vec![ratio(1, 1)], 1).unwrap();
        let tr = integrate(&p, 1e-4).unwrap();
        let rho = rho_k(&tr, &p, 1).unwrap();
        assert!((rho.rho - 0.5).abs() < 1e-8, "{rho:?}");
    }

    #[test]
    fn half_ones_half_sevens() {
        let p = half_one_half(7, 1);
        let tr = integrate(&p, 2.0 / 20000.0).unwrap();
        assert!(check_invariants(&tr, &p).holds(1e-9));
        assert!(tr.closed_form_gap() < 1e-6);
        let rho = rho_k(&tr, &p, 1).unwrap();
        let cross = rho_k_lambda(&p, 1).unwrap();
        assert!((rho.rho - cross).abs() < 1e-6, "{} vs {}", rho.rho, cross);
        assert!(rho.rho > 1.0 / 32.0);
        assert!(rho.rho >= to_f64(&rho_lower_bound(&p, 1)));
        let all = rho_k(&tr, &p, 7).unwrap();
        assert!((all.rho - 2.0).abs() < 1e-6);
        let coarse = integrate(&p, 2.0 / 10000.0).unwrap();
        assert!((rho_k(&coarse, &p, 1).unwrap().rho - rho.rho).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_steps() {
        let p = half_one_half(7, 1);
        assert!(integrate(&p, 0.0).is_err());
        assert!(integrate(&p, 0.1).is_err());
    }
}
