//! Monte Carlo simulation of the typical link.
//!
//! Each trial draws a Poisson field of interferers on the disk of radius
//! `r_max` around the receiver, attaches unit-mean exponential fading to every
//! link and evaluates the channel state S. Trial `i` uses its own ChaCha
//! stream derived from `(seed, i)`, and trials are accumulated in fixed
//! blocks merged in block order, so results do not depend on the worker
//! count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::broadcast::PowerProfile;
use crate::error::{Error, Result};
use crate::network::NetworkParams;

/// Tail-to-near-field interference ratio tolerated by the default radius.
pub const TRUNCATION_BUDGET: f64 = 1e-4;
const BLOCK: u64 = 2048;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_trials: u64,
    pub r_max: f64,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    /// Config with the default truncation radius for `params`.
    pub fn new(params: &NetworkParams, n_trials: u64, seed: u64) -> Self {
        SimConfig {
            n_trials,
            r_max: truncation_radius(params),
            seed,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        SimConfig { workers, ..self }
    }

    pub fn validate(&self, params: &NetworkParams) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::param("n_trials", 0.0, "must be >= 1"));
        }
        if self.workers == 0 {
            return Err(Error::param("workers", 0.0, "must be >= 1"));
        }
        if !(self.r_max >= 10.0 * params.r0 && self.r_max.is_finite()) {
            return Err(Error::param("r_max", self.r_max, "must be finite and >= 10 r0"));
        }
        Ok(())
    }
}

/// Expected interference from beyond `r_max` relative to that from the
/// annulus R₀ < r < r_max:
/// r_max^{2−α} / (R₀^{2−α} − r_max^{2−α}).
pub fn truncation_ratio(params: &NetworkParams, r_max: f64) -> f64 {
    let e = 2.0 - params.alpha;
    let tail = r_max.powf(e);
    let near = params.r0.powf(e) - tail;
    if near > 0.0 {
        tail / near
    } else {
        f64::INFINITY
    }
}

/// Smallest radius meeting [`TRUNCATION_BUDGET`], floored at 50·R₀.
pub fn truncation_radius(params: &NetworkParams) -> f64 {
    let r = params.r0 * ((1.0 + 1.0 / TRUNCATION_BUDGET) * (1.0 + 1e-9)).powf(1.0 / (params.alpha - 2.0));
    r.max(50.0 * params.r0)
}

/// RNG stream of trial `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// S = |h₀|²R₀^{−α} / (P·Σ|h_k|²‖x_k‖^{−α} + σ_N²).
fn channel_state(params: &NetworkParams, h0: f64, interference: f64) -> f64 {
    h0 * params.r0.powf(-params.alpha) / (params.power * interference + params.noise)
}

/// Channel state for a given interferer field, fading drawn from `rng`.
pub fn sample_state_in_field<R: Rng + ?Sized>(params: &NetworkParams, distances: &[f64], rng: &mut R) -> f64 {
    let h0: f64 = Exp1.sample(rng);
    let interference: f64 = distances
        .iter()
        .map(|&d| {
            let h: f64 = Exp1.sample(rng);
            h * d.powf(-params.alpha)
        })
        .sum();
    channel_state(params, h0, interference)
}

struct Sampler {
    params: NetworkParams,
    count: Option<Poisson<f64>>,
    r_max_sq: f64,
    half_alpha: f64,
    int_half_alpha: Option<i32>,
}

impl Sampler {
    fn new(params: &NetworkParams, r_max: f64) -> Result<Self> {
        let mean = params.lambda * std::f64::consts::PI * r_max * r_max;
        let count = if mean > 0.0 {
            Some(Poisson::new(mean).map_err(|_| Error::param("lambda", params.lambda, "Poisson mean out of range"))?)
        } else {
            None
        };
        let half_alpha = 0.5 * params.alpha;
        let int_half_alpha = (half_alpha.fract() == 0.0 && half_alpha <= 16.0).then_some(half_alpha as i32);
        Ok(Sampler {
            params: *params,
            count,
            r_max_sq: r_max * r_max,
            half_alpha,
            int_half_alpha,
        })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let h0: f64 = Exp1.sample(rng);
        let n = self.count.as_ref().map_or(0, |p| p.sample(rng) as u64);
        let mut interference = 0.0;
        for _ in 0..n {
            // uniform on the disk: r² = r_max²·U, U ∈ (0, 1]
            let r2 = self.r_max_sq * (1.0 - rng.random::<f64>());
            let gain = match self.int_half_alpha {
                Some(k) => 1.0 / r2.powi(k),
                None => r2.powf(-self.half_alpha),
            };
            let h: f64 = Exp1.sample(rng);
            interference += h * gain;
        }
        channel_state(&self.params, h0, interference)
    }
}

/// One channel-state draw using a fresh Poisson field.
pub fn sample_state<R: Rng + ?Sized>(params: &NetworkParams, config: &SimConfig, rng: &mut R) -> Result<f64> {
    config.validate(params)?;
    Ok(Sampler::new(params, config.r_max)?.sample(rng))
}

trait Merge {
    fn merge(&mut self, other: Self);
}

fn run_trials<A, I, O>(params: &NetworkParams, config: &SimConfig, init: I, observe: O) -> Result<A>
where
    A: Merge + Send,
    I: Fn() -> A + Sync,
    O: Fn(&mut A, u64, f64) + Sync,
{
    params.validate()?;
    config.validate(params)?;
    let sampler = Sampler::new(params, config.r_max)?;
    let n = config.n_trials;
    let blocks = n.div_ceil(BLOCK);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .expect("thread pool");
    let partials: Vec<A> = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut acc = init();
                for trial in b * BLOCK..((b + 1) * BLOCK).min(n) {
                    let mut rng = trial_rng(config.seed, trial);
                    observe(&mut acc, trial, sampler.sample(&mut rng));
                }
                acc
            })
            .collect()
    });
    let mut parts = partials.into_iter();
    let mut total = parts.next().unwrap_or_else(&init);
    for p in parts {
        total.merge(p);
    }
    Ok(total)
}

/// Raw power sums of a sample, enough for moments up to the fourth.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    sums: [f64; 4],
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let x2 = x * x;
        self.sums[0] += x;
        self.sums[1] += x2;
        self.sums[2] += x2 * x;
        self.sums[3] += x2 * x2;
    }

    fn raw(&self, k: usize) -> f64 {
        self.sums[k - 1] / self.n as f64
    }

    pub fn mean(&self) -> Estimate {
        let m = self.raw(1);
        Estimate::new(m, Z95 * (self.sample_variance() / self.n as f64).sqrt())
    }

    pub fn second_moment(&self) -> Estimate {
        let m2 = self.raw(2);
        let var = (self.raw(4) - m2 * m2).max(0.0);
        Estimate::new(m2, Z95 * (var / self.n as f64).sqrt())
    }

    fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let m = self.raw(1);
        let n = self.n as f64;
        ((self.raw(2) - m * m) * n / (n - 1.0)).max(0.0)
    }

    /// Unbiased sample variance; half-width from the fourth central moment.
    pub fn variance(&self) -> Estimate {
        let (m1, m2, m3, m4) = (self.raw(1), self.raw(2), self.raw(3), self.raw(4));
        let sigma2 = m2 - m1 * m1;
        let mu4 = m4 - 4.0 * m3 * m1 + 6.0 * m2 * m1 * m1 - 3.0 * m1.powi(4);
        let se = ((mu4 - sigma2 * sigma2).max(0.0) / self.n as f64).sqrt();
        Estimate::new(self.sample_variance(), Z95 * se)
    }
}

impl Merge for Moments {
    fn merge(&mut self, other: Self) {
        self.n += other.n;
        for (a, b) in self.sums.iter_mut().zip(other.sums) {
            *a += b;
        }
    }
}

fn proportion(hits: u64, n: u64) -> Estimate {
    let p = hits as f64 / n as f64;
    Estimate::new(p, Z95 * (p * (1.0 - p) / n as f64).sqrt())
}

/// Point estimate with its 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub half_width_95: f64,
}

impl Estimate {
    pub fn new(value: f64, half_width_95: f64) -> Self {
        Estimate { value, half_width_95 }
    }

    /// |value − x| ≤ k half-widths.
    pub fn covers(&self, x: f64, k: f64) -> bool {
        (self.value - x).abs() <= k * self.half_width_95
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    pub xi: f64,
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub n_effective: u64,
    pub mean: Estimate,
    pub second_moment: Estimate,
    pub variance: Estimate,
    /// P[S < s0] for the broadcast strategy, P[S·P < β] for the outage one.
    pub complete_outage: Estimate,
    /// P[R(S) < ξ] per requested ξ (broadcast only).
    pub rate_outage: Vec<ThresholdEstimate>,
    pub truncation_ratio: f64,
}

impl SimResult {
    pub fn truncation_ok(&self) -> bool {
        self.truncation_ratio <= TRUNCATION_BUDGET
    }
}

#[derive(Clone)]
struct BroadcastAcc {
    rate: Moments,
    below_s0: u64,
    below_xi: Vec<u64>,
}

impl Merge for BroadcastAcc {
    fn merge(&mut self, other: Self) {
        self.rate.merge(other.rate);
        self.below_s0 += other.below_s0;
        for (a, b) in self.below_xi.iter_mut().zip(other.below_xi) {
            *a += b;
        }
    }
}

/// Per-trial broadcast rate R(S) with its moments, complete outage and
/// rate outage at each ξ in `xis`.
pub fn simulate_broadcast(
    params: &NetworkParams,
    profile: &PowerProfile,
    config: &SimConfig,
    xis: &[f64],
) -> Result<SimResult> {
    let acc = run_trials(
        params,
        config,
        || BroadcastAcc {
            rate: Moments::default(),
            below_s0: 0,
            below_xi: vec![0; xis.len()],
        },
        |acc, _, s| {
            let r = profile.layer_rate(s);
            acc.rate.push(r);
            acc.below_s0 += u64::from(s < profile.s0());
            for (count, &xi) in acc.below_xi.iter_mut().zip(xis) {
                *count += u64::from(r < xi);
            }
        },
    )?;
    let n = acc.rate.n;
    Ok(SimResult {
        n_effective: n,
        mean: acc.rate.mean(),
        second_moment: acc.rate.second_moment(),
        variance: acc.rate.variance(),
        complete_outage: proportion(acc.below_s0, n),
        rate_outage: xis
            .iter()
            .zip(&acc.below_xi)
            .map(|(&xi, &hits)| ThresholdEstimate {
                xi,
                estimate: proportion(hits, n),
            })
            .collect(),
        truncation_ratio: truncation_ratio(params, config.r_max),
    })
}

#[derive(Clone, Default)]
struct OutageAcc {
    rate: Moments,
    failures: u64,
}

impl Merge for OutageAcc {
    fn merge(&mut self, other: Self) {
        self.rate.merge(other.rate);
        self.failures += other.failures;
    }
}

/// Outage strategy: rate ln(1 + β) when S·P ≥ β, else 0.
pub fn simulate_outage(params: &NetworkParams, beta: f64, config: &SimConfig) -> Result<SimResult> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", beta, "must be > 0"));
    }
    let rate = beta.ln_1p();
    let acc = run_trials(params, config, OutageAcc::default, |acc, _, s| {
        let ok = s * params.power >= beta;
        acc.rate.push(if ok { rate } else { 0.0 });
        acc.failures += u64::from(!ok);
    })?;
    let n = acc.rate.n;
    Ok(SimResult {
        n_effective: n,
        mean: acc.rate.mean(),
        second_moment: acc.rate.second_moment(),
        variance: acc.rate.variance(),
        complete_outage: proportion(acc.failures, n),
        rate_outage: Vec::new(),
        truncation_ratio: truncation_ratio(params, config.r_max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawSample {
    pub trial: u64,
    pub state: f64,
    pub rate: f64,
}

impl Merge for Vec<RawSample> {
    fn merge(&mut self, other: Self) {
        self.extend(other);
    }
}

/// Channel state and broadcast rate of every trial, in trial order.
pub fn raw_samples(params: &NetworkParams, profile: &PowerProfile, config: &SimConfig) -> Result<Vec<RawSample>> {
    run_trials(params, config, Vec::new, |acc, trial, state| {
        acc.push(RawSample {
            trial,
            state,
            rate: profile.layer_rate(state),
        })
    })
}

/// Channel states of every trial, in trial order.
pub fn sample_states(params: &NetworkParams, config: &SimConfig) -> Result<Vec<f64>> {
    struct States(Vec<f64>);
    impl Merge for States {
        fn merge(&mut self, other: Self) {
            self.0.extend(other.0);
        }
    }
    Ok(run_trials(params, config, || States(Vec::new()), |acc, _, s| acc.0.push(s))?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{cdf_s, conditional_ccdf, Regime};

    fn ks_distance(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn truncation_radius_meets_budget() {
        for &alpha in &[2.5, 3.0, 4.0, 6.0] {
            let p = NetworkParams::interference_limited(0.1, alpha).unwrap();
            let r = truncation_radius(&p);
            assert!(truncation_ratio(&p, r) <= TRUNCATION_BUDGET, "alpha = {alpha}");
            assert!(r >= 50.0);
        }
        let p = NetworkParams::interference_limited(0.1, 4.0).unwrap();
        assert!((truncation_radius(&p) - 100.0).abs() < 0.01);
        assert!(truncation_ratio(&p, 20.0) > TRUNCATION_BUDGET);
    }

    #[test]
    fn rejects_bad_config() {
        let p = NetworkParams::interference_limited(0.1, 4.0).unwrap();
        let c = SimConfig::new(&p, 10, 1);
        assert!(SimConfig { r_max: 5.0, ..c }.validate(&p).is_err());
        assert!(SimConfig { n_trials: 0, ..c }.validate(&p).is_err());
        assert!(SimConfig { workers: 0, ..c }.validate(&p).is_err());
    }

    #[test]
    fn noise_only_state_is_exponential() {
        let p = NetworkParams::new(0.0, 1.2, 4.0, 3.0, 0.7).unwrap();
        let cfg = SimConfig::new(&p, 200_000, 7);
        let states = sample_states(&p, &cfg).unwrap();
        let rate = 1.2f64.powf(4.0) * 0.7;
        let d = ks_distance(states, |s| 1.0 - (-rate * s).exp());
        assert!(d < 1.36 / (200_000f64).sqrt(), "KS = {d}");
    }

    #[test]
    fn state_distribution_matches_cdf() {
        let p = NetworkParams::new(0.05, 1.0, 4.0, 1.0, 0.0).unwrap();
        let cfg = SimConfig::new(&p, 200_000, 11);
        let states = sample_states(&p, &cfg).unwrap();
        let d = ks_distance(states, |s| cdf_s(&p, s).unwrap());
        assert!(d < 1.36 / (200_000f64).sqrt(), "KS = {d}");
    }

    #[test]
    fn fixed_field_matches_conditional_ccdf() {
        let p = NetworkParams::new(0.1, 1.0, 4.0, 1.0, 0.05).unwrap();
        let mut field_rng = trial_rng(3, 0);
        let distances: Vec<f64> = (0..20).map(|_| 0.5 + 5.0 * field_rng.random::<f64>()).collect();
        let n = 1_000_000u64;
        let mut rng = trial_rng(3, 1);
        let states: Vec<f64> = (0..n)
            .map(|_| sample_state_in_field(&p, &distances, &mut rng))
            .collect();
        for &s in &[0.05, 0.2, 0.5, 1.0, 3.0] {
            let exact = conditional_ccdf(&p, s, &distances);
            let emp = states.iter().filter(|&&x| x > s).count() as f64 / n as f64;
            let se = (exact * (1.0 - exact) / n as f64).sqrt();
            assert!((emp - exact).abs() <= 3.0 * se, "s = {s}: {emp} vs {exact}");
        }
    }

    #[test]
    fn reproducible_and_worker_invariant() {
        let p = NetworkParams::interference_limited(0.1, 4.0).unwrap();
        let profile = PowerProfile::solve(&p, Regime::InterferenceLimited).unwrap();
        let cfg = SimConfig::new(&p, 10_000, 42).with_workers(1);
        let a = simulate_broadcast(&p, &profile, &cfg, &[0.1, 1.0]).unwrap();
        let b = simulate_broadcast(&p, &profile, &cfg, &[0.1, 1.0]).unwrap();
        let c = simulate_broadcast(&p, &profile, &cfg.with_workers(4), &[0.1, 1.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let one = SimConfig { n_trials: 1, ..cfg };
        let x = simulate_broadcast(&p, &profile, &one, &[]).unwrap();
        let y = simulate_broadcast(&p, &profile, &one, &[]).unwrap();
        assert_eq!(x.mean.value, y.mean.value);
        assert_eq!(x.n_effective, 1);
    }

    #[test]
    fn raw_samples_follow_trial_order() {
        let p = NetworkParams::interference_limited(0.1, 4.0).unwrap();
        let profile = PowerProfile::solve(&p, Regime::InterferenceLimited).unwrap();
        let cfg = SimConfig::new(&p, 5000, 9);
        let raw = raw_samples(&p, &profile, &cfg).unwrap();
        assert_eq!(raw.len(), 5000);
        assert!(raw.iter().enumerate().all(|(i, r)| r.trial == i as u64));
        let states = sample_states(&p, &cfg).unwrap();
        assert!(raw.iter().zip(&states).all(|(r, &s)| r.state == s));
    }

    #[test]
    fn outage_success_fraction() {
        let p = NetworkParams::interference_limited(0.1, 4.0).unwrap();
        let cfg = SimConfig::new(&p, 50_000, 5);
        let tiny = simulate_outage(&p, 1e-9, &cfg).unwrap();
        assert!(tiny.complete_outage.value < 1e-3);
        let beta = 1.0;
        let r = simulate_outage(&p, beta, &cfg).unwrap();
        let c = p.derive().unwrap();
        let success = (-c.g_lambda_tilde * beta.powf(c.delta)).exp();
        assert!(r.complete_outage.covers(1.0 - success, 3.0));
        let var = success * (1.0 - success) * 2f64.ln().powi(2);
        assert!(r.variance.covers(var, 3.0));
    }

    #[test]
    fn moment_merge_is_exact_sum() {
        let mut a = Moments::default();
        let mut b = Moments::default();
        let mut all = Moments::default();
        for i in 0..10 {
            let x = i as f64 * 0.5;
            if i < 4 {
                a.push(x)
            } else {
                b.push(x)
            }
            all.push(x);
        }
        a.merge(b);
        assert_eq!(a, all);
        assert!((all.mean().value - 2.25).abs() < 1e-15);
        // sample variance of 0, 0.5, …, 4.5
        assert!((all.variance().value - 2.291_666_666_666_667).abs() < 1e-12);
    }
}
