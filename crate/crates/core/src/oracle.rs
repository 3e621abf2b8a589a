//! Independent checks of the two-level generating function: an exact
//! counting-field Lindbladian and a Gillespie sampler of probe quanta.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::linalg::{c64, cexp_m1, eigenvector, nearest_eigenvalue, sandwich, CMatrix, CVector};
use crate::models::{qhe_generator, QheSpec};

/// Lindbladian with probe jumps weighted by the counting field: emission into
/// the probe by `e^{iξΩ}`, absorption from it by `e^{−iξΩ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedGenerator {
    pub xi: Complex64,
    pub matrix: CMatrix,
    /// `matrix − untilted generator`, kept separately for the eigenvalue refinement.
    tilt: CMatrix,
}

impl TiltedGenerator {
    pub fn tilt(&self) -> &CMatrix {
        &self.tilt
    }
}

/// Trace covector on row-major vectorized 2×2 matrices.
fn trace_covector() -> CVector {
    CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)])
}

pub fn build_tilted(spec: &QheSpec, xi: Complex64) -> Result<TiltedGenerator> {
    let rates = spec.rates()?;
    let untilted = qhe_generator(spec.rabi, rates.total());
    let sm = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
    let sp = sm.adjoint();
    let phase = Complex64::new(0.0, spec.splitting) * xi;
    let tilt = sandwich(&sm, &sp) * (cexp_m1(phase) * rates.probe.down)
        + sandwich(&sp, &sm) * (cexp_m1(-phase) * rates.probe.up);
    Ok(TiltedGenerator { xi, matrix: untilted + &tilt, tilt })
}

/// Generating function from the tilted generator, with the branch flag of the
/// eigenvalue tracking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedValue {
    pub value: Complex64,
    pub ambiguous: bool,
}

const CONTINUATION_STEP: f64 = 0.05;

/// `f̄(ξ) = −λ(ξ)`, with λ the eigenvalue that is zero at ξ = 0, followed
/// along the straight path from the origin.
///
/// The selected eigenvalue is refined through its right eigenvector r as
/// `⟨1|(L_ξ − L_0) r⟩ / ⟨1|r⟩`, which uses that the trace is conserved by
/// `L_0`. This keeps full relative accuracy for small ξ.
pub fn fcs_via_tilted(spec: &QheSpec, xi: Complex64) -> Result<TiltedValue> {
    if xi == Complex64::new(0.0, 0.0) {
        return Ok(TiltedValue { value: xi, ambiguous: false });
    }
    let steps = ((xi.norm() * spec.splitting / CONTINUATION_STEP).ceil() as usize).max(1);
    let mut lambda = Complex64::new(0.0, 0.0);
    let mut ambiguous = false;
    let mut last = None;
    for j in 1..=steps {
        let gen = build_tilted(spec, xi * (j as f64 / steps as f64))?;
        let sel = nearest_eigenvalue(&gen.matrix, lambda)?;
        lambda = sel.value;
        ambiguous |= sel.ambiguous;
        last = Some(gen);
    }
    let gen = last.expect("at least one step");
    let r = eigenvector(&gen.matrix, lambda);
    let one = trace_covector();
    let denom = one.dot(&r);
    if denom.norm() > 1e-8 * r.norm() {
        lambda = one.dot(&(gen.tilt() * &r)) / denom;
    }
    Ok(TiltedValue { value: -lambda, ambiguous })
}

/// Net probe-quanta statistics over many independent trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats {
    pub n_traj: u64,
    pub duration: f64,
    pub seed: u64,
    pub quantum: f64,
    /// Net quanta into the probe per trajectory → number of trajectories.
    pub histogram: BTreeMap<i64, u64>,
    /// Σkⁿ for n = 1..4, exact so merging is order-independent.
    moments: [i128; 4],
}

impl TrajectoryStats {
    fn empty(duration: f64, seed: u64, quantum: f64) -> Self {
        Self { n_traj: 0, duration, seed, quantum, histogram: BTreeMap::new(), moments: [0; 4] }
    }

    fn push(&mut self, k: i64) {
        self.n_traj += 1;
        *self.histogram.entry(k).or_insert(0) += 1;
        let k = i128::from(k);
        let mut p = 1i128;
        for m in &mut self.moments {
            p *= k;
            *m += p;
        }
    }

    /// Combine two runs of the same process.
    pub fn merge(mut self, other: Self) -> Self {
        self.n_traj += other.n_traj;
        for (k, c) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += c;
        }
        for (a, b) in self.moments.iter_mut().zip(other.moments) {
            *a += b;
        }
        self
    }

    fn raw(&self, n: usize) -> f64 {
        self.moments[n - 1] as f64 / self.n_traj as f64
    }

    pub fn mean_count(&self) -> f64 {
        if self.n_traj == 0 {
            return 0.0;
        }
        self.raw(1)
    }

    pub fn count_variance(&self) -> f64 {
        if self.n_traj < 2 {
            return 0.0;
        }
        let n = self.n_traj as f64;
        let m = self.raw(1);
        (self.raw(2) - m * m) * n / (n - 1.0)
    }

    fn central_fourth(&self) -> f64 {
        let m = self.raw(1);
        self.raw(4) - 4.0 * m * self.raw(3) + 6.0 * m * m * self.raw(2) - 3.0 * m.powi(4)
    }

    /// Mean energy current into the probe.
    pub fn c1(&self) -> f64 {
        self.quantum * self.mean_count() / self.duration
    }

    pub fn c1_stderr(&self) -> f64 {
        self.quantum * (self.count_variance() / self.n_traj.max(1) as f64).sqrt() / self.duration
    }

    /// Energy-current noise: variance of transferred energy per unit time.
    pub fn c2(&self) -> f64 {
        self.quantum * self.quantum * self.count_variance() / self.duration
    }

    pub fn c2_stderr(&self) -> f64 {
        let v = self.count_variance();
        let spread = (self.central_fourth() - v * v).max(0.0);
        self.quantum * self.quantum * (spread / self.n_traj.max(1) as f64).sqrt() / self.duration
    }

    pub fn write_histogram_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("histogram output: {e}"));
        w.write_record(["net_quanta", "trajectories"]).map_err(io)?;
        for (k, c) in &self.histogram {
            w.write_record([k.to_string(), c.to_string()]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("histogram output: {e}")))
    }
}

pub const EVENT_BUDGET: f64 = 1e6;

struct JumpRates {
    up_probe: f64,
    up_total: f64,
    down_probe: f64,
    down_total: f64,
}

fn exponential(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    -(1.0 - rng.random::<f64>()).ln() / rate
}

fn run_one(r: &JumpRates, duration: f64, rng: &mut ChaCha8Rng) -> i64 {
    let p1 = r.up_total / (r.up_total + r.down_total);
    let mut excited = rng.random::<f64>() < p1;
    let mut t = 0.0;
    let mut k = 0i64;
    loop {
        let (rate, probe) = if excited { (r.down_total, r.down_probe) } else { (r.up_total, r.up_probe) };
        t += exponential(rng, rate);
        if t > duration {
            return k;
        }
        if rng.random::<f64>() * rate < probe {
            k += if excited { 1 } else { -1 };
        }
        excited = !excited;
    }
}

/// Gillespie sampling of the undriven two-level jump process, counting quanta
/// exchanged with the probe. Trajectory `i` uses stream `i` of the seeded
/// generator, so results do not depend on scheduling.
pub fn sample_trajectories(spec: &QheSpec, duration: f64, n_traj: u64, seed: u64) -> Result<TrajectoryStats> {
    if spec.rabi != 0.0 {
        return Err(Error::InvalidModel("trajectory sampler handles the undriven engine only".into()));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidArgument(format!("duration must be positive, got {duration}")));
    }
    let rates = spec.rates()?;
    let total = rates.total();
    let budget = duration * total.up.max(total.down);
    if budget > EVENT_BUDGET {
        return Err(Error::EventBudget(budget));
    }
    let empty = || TrajectoryStats::empty(duration, seed, spec.splitting);
    if total.up + total.down == 0.0 {
        let mut s = empty();
        (0..n_traj).for_each(|_| s.push(0));
        return Ok(s);
    }
    let jr = JumpRates { up_probe: rates.probe.up, up_total: total.up, down_probe: rates.probe.down, down_total: total.down };
    let chunk = 1024u64;
    let chunks = n_traj.div_ceil(chunk);
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut s = empty();
            for i in c * chunk..((c + 1) * chunk).min(n_traj) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                s.push(run_one(&jr, duration, &mut rng));
            }
            s
        })
        .reduce(empty, TrajectoryStats::merge))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

/// Chi-square fit of a count histogram to a Poisson law with the sample mean.
/// Bins with expected occupation below 5 are pooled into the tails.
pub fn poisson_chi_square(histogram: &BTreeMap<i64, u64>) -> Result<ChiSquareFit> {
    if histogram.keys().any(|&k| k < 0) {
        return Err(Error::InvalidArgument("Poisson fit needs non-negative counts".into()));
    }
    let n: u64 = histogram.values().sum();
    if n == 0 {
        return Err(Error::InvalidArgument("empty histogram".into()));
    }
    let nf = n as f64;
    let mean = histogram.iter().map(|(&k, &c)| k as f64 * c as f64).sum::<f64>() / nf;
    if mean <= 0.0 {
        return Err(Error::InvalidArgument("Poisson fit needs a positive mean".into()));
    }
    let kmax = *histogram.keys().next_back().expect("non-empty");
    let mut pk = (-mean).exp();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut cum = 0.0;
    let (mut pend_o, mut pend_e) = (0.0, 0.0);
    for k in 0..=kmax.max(1) {
        let obs = *histogram.get(&k).unwrap_or(&0) as f64;
        pend_o += obs;
        pend_e += nf * pk;
        cum += pk;
        if pend_e >= 5.0 {
            bins.push((pend_o, pend_e));
            pend_o = 0.0;
            pend_e = 0.0;
        }
        pk *= mean / (k + 1) as f64;
    }
    // upper tail beyond kmax has no observations but carries probability
    pend_e += nf * (1.0 - cum).max(0.0);
    match bins.last_mut() {
        Some(last) if pend_e < 5.0 => {
            last.0 += pend_o;
            last.1 += pend_e;
        }
        _ => bins.push((pend_o, pend_e)),
    }
    if bins.len() < 3 {
        return Err(Error::InvalidArgument("too few populated bins for a chi-square fit".into()));
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len() as u64 - 2;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(ChiSquareFit { statistic, dof, p_value: 1.0 - dist.cdf(statistic) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{BathSpec, Susceptibility};
    use crate::fcs::{cumulant, gf_incoherent};
    use crate::linalg::{dominant_eigenvalue, eigenvalues};
    use crate::models::{qhe_spectra, qhe_steady_state, qhe_steady_state_without_probe};

    fn bath(beta: f64, chi: f64) -> BathSpec {
        BathSpec::new(beta, Susceptibility::scalar(chi).unwrap()).unwrap()
    }

    fn engine(probe_chi: f64, rabi: f64) -> QheSpec {
        QheSpec::new(1.0, bath(1.0, probe_chi), vec![bath(0.3, 1.0)], rabi).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn tilted_c(spec: &QheSpec, n: u32) -> f64 {
        cumulant(|xi| Ok(fcs_via_tilted(spec, xi)?.value), n, spec.splitting).unwrap().value
    }

    fn rate_balance(spec: &QheSpec) -> f64 {
        let st = qhe_steady_state(spec).unwrap();
        let r = spec.rates().unwrap().probe;
        spec.splitting * (r.down * st.p1 - r.up * st.p0)
    }

    #[test]
    fn untilted_generator_conserves_trace() {
        for rabi in [0.0, 0.8] {
            let gen = build_tilted(&engine(0.4, rabi), c64(0.0, 0.0)).unwrap();
            let left = gen.matrix.transpose() * trace_covector();
            assert!(left.norm() < 1e-12);
            let top = dominant_eigenvalue(&gen.matrix, c64(0.0, 0.0)).unwrap();
            assert!(top.value.norm() < 1e-12);
            assert!(eigenvalues(&gen.matrix).unwrap().iter().all(|z| z.re <= 1e-12));
            assert_eq!(fcs_via_tilted(&engine(0.4, rabi), c64(0.0, 0.0)).unwrap().value, c64(0.0, 0.0));
        }
    }

    #[test]
    fn probe_only_has_no_current() {
        let spec = QheSpec::new(1.0, bath(0.7, 1.0), vec![], 0.0).unwrap();
        assert!(tilted_c(&spec, 1).abs() < 1e-12);
    }

    #[test]
    fn first_cumulant_matches_rate_balance() {
        for (chi, rabi) in [(0.4, 0.0), (2.0, 0.0), (0.4, 0.9)] {
            let spec = engine(chi, rabi);
            let c1 = tilted_c(&spec, 1);
            assert!(rel(c1, rate_balance(&spec)) < 1e-8, "{c1} vs {}", rate_balance(&spec));
        }
    }

    #[test]
    fn weak_probe_matches_perturbative_generating_function() {
        let spec = engine(1e-7, 0.0);
        let st = qhe_steady_state_without_probe(&spec).unwrap();
        let (ycal, _) = qhe_spectra(&spec, &st).unwrap();
        for xi in [c64(0.3, 0.0), c64(-1.2, 0.0), c64(0.5, 0.4), c64(0.0, 0.9)] {
            let exact = fcs_via_tilted(&spec, xi).unwrap();
            let pert = gf_incoherent(&spec.probe, &ycal, xi).unwrap();
            assert!((exact.value - pert).norm() <= 1e-6 * pert.norm(), "{xi}: {} vs {pert}", exact.value);
            assert!(!exact.ambiguous);
        }
    }

    #[test]
    fn discrepancy_shrinks_linearly_with_probe_coupling() {
        let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&r| {
                let spec = engine(r, 0.0);
                let st = qhe_steady_state_without_probe(&spec).unwrap();
                let (ycal, _) = qhe_spectra(&spec, &st).unwrap();
                let pert = cumulant(|xi| gf_incoherent(&spec.probe, &ycal, xi), 1, 1.0).unwrap().value;
                rel(tilted_c(&spec, 1), pert)
            })
            .collect();
        for w in gaps.windows(2) {
            let ratio = w[0] / w[1];
            assert!((7.0..14.0).contains(&ratio), "{gaps:?}");
        }
    }

    #[test]
    fn second_cumulant_of_weak_probe() {
        let spec = engine(1e-6, 0.0);
        let st = qhe_steady_state(&spec).unwrap();
        let r = spec.rates().unwrap().probe;
        let c2 = tilted_c(&spec, 2);
        let pert = r.down * st.p1 + r.up * st.p0;
        assert!(rel(c2, pert) < 1e-5, "{c2} vs {pert}");
    }

    #[test]
    fn sampler_rejects_drive_and_budget() {
        assert!(sample_trajectories(&engine(0.4, 0.5), 1.0, 10, 1).is_err());
        assert!(matches!(sample_trajectories(&engine(0.4, 0.0), 1e7, 10, 1), Err(Error::EventBudget(_))));
    }

    #[test]
    fn zero_rates_give_no_events() {
        let spec = QheSpec::new(1.0, bath(1.0, 0.0), vec![bath(1.0, 0.0)], 0.0).unwrap();
        let s = sample_trajectories(&spec, 5.0, 100, 3).unwrap();
        assert_eq!(s.histogram.get(&0), Some(&100));
        assert_eq!(s.c1(), 0.0);
    }

    #[test]
    fn sampler_is_deterministic_and_merge_is_order_free() {
        let spec = engine(0.5, 0.0);
        let a = sample_trajectories(&spec, 3.0, 3000, 42).unwrap();
        let b = sample_trajectories(&spec, 3.0, 3000, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_trajectories(&spec, 3.0, 3000, 43).unwrap();
        assert_ne!(a, c);
        let ab = a.clone().merge(c.clone());
        let ba = c.merge(a);
        assert_eq!(ab.histogram, ba.histogram);
        assert_eq!(ab.moments, ba.moments);
    }

    #[test]
    fn sampled_current_and_noise() {
        let spec = engine(0.5, 0.0);
        let s = sample_trajectories(&spec, 10.0, 20_000, 7).unwrap();
        let want = rate_balance(&spec);
        assert!((s.c1() - want).abs() < 3.0 * s.c1_stderr(), "{} ± {} vs {want}", s.c1(), s.c1_stderr());
        // finite window: noise sits between the Poisson value and the long-time limit
        let c2 = tilted_c(&spec, 2);
        assert!((s.c2() - c2).abs() < 0.1 * c2, "{} vs {c2}", s.c2());

        let probe_only = QheSpec::new(1.0, bath(0.7, 1.0), vec![], 0.0).unwrap();
        let s = sample_trajectories(&probe_only, 10.0, 20_000, 9).unwrap();
        assert!(s.c1().abs() < 3.0 * s.c1_stderr());
    }

    #[test]
    fn standard_error_scales_with_inverse_root() {
        let spec = engine(0.5, 0.0);
        let small = sample_trajectories(&spec, 2.0, 4_000, 11).unwrap();
        let large = sample_trajectories(&spec, 2.0, 16_000, 11).unwrap();
        let ratio = small.c1_stderr() / large.c1_stderr();
        assert!((1.8..2.2).contains(&ratio), "{ratio}");
    }

    #[test]
    fn histogram_csv() {
        let spec = engine(0.5, 0.0);
        let s = sample_trajectories(&spec, 1.0, 50, 1).unwrap();
        let mut buf = Vec::new();
        s.write_histogram_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("net_quanta,trajectories\n"));
        let total: u64 = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
        assert_eq!(total, 50);
    }

    #[test]
    fn chi_square_accepts_poisson_and_rejects_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut h = BTreeMap::new();
        // Poisson(2) by inversion
        for _ in 0..20_000 {
            let u: f64 = rng.random();
            let (mut k, mut p) = (0i64, (-2.0f64).exp());
            let mut cdf = p;
            while u > cdf {
                k += 1;
                p *= 2.0 / k as f64;
                cdf += p;
            }
            *h.entry(k).or_insert(0) += 1;
        }
        assert!(poisson_chi_square(&h).unwrap().p_value > 0.01);
        let flat: BTreeMap<i64, u64> = (0..5).map(|k| (k, 4000)).collect();
        assert!(poisson_chi_square(&flat).unwrap().p_value < 1e-6);
        assert!(poisson_chi_square(&BTreeMap::from([(-1, 3)])).is_err());
    }
}
