//! Self-verification suites over seeded random inputs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bath::{BathSpec, Susceptibility};
use crate::error::{Error, Result};
use crate::fcs::{cumulant, gf_coherent, gf_coherent_response, gf_incoherent, transfer_rates};
use crate::linalg::c64;
use crate::models::{
    ho_closed_rflow, ho_spectra, qhe_closed_fcs, qhe_closed_rflow, qhe_spectra, qhe_steady_state,
    qhe_steady_state_without_probe, FcsPart, OscillatorSpec, QheSpec,
};
use crate::oracle::{fcs_via_tilted, sample_trajectories};
use crate::random::{random_bath, random_coherent, random_incoherent};
use crate::rflow::{
    flow_via_correspondence, multi_world_flow_closed, multi_world_flow_diagram_sum, reflection_lhs,
    reflection_rhs, shannon_flow, total_flow, RenyiOrder,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Correspondence,
    DiagramSum,
    ClosedForm,
    Reflection,
    Oracle,
    ClassicalLimit,
    ShannonLimit,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Correspondence,
        Suite::DiagramSum,
        Suite::ClosedForm,
        Suite::Reflection,
        Suite::Oracle,
        Suite::ClassicalLimit,
        Suite::ShannonLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Correspondence => "correspondence",
            Suite::DiagramSum => "diagram-sum",
            Suite::ClosedForm => "closed-form",
            Suite::Reflection => "appendix-a",
            Suite::Oracle => "oracle",
            Suite::ClassicalLimit => "classical-limit",
            Suite::ShannonLimit => "shannon-limit",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == name || (name == "reflection" && *s == Suite::Reflection))
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::InvalidArgument(format!("unknown suite `{name}`, expected one of {}", names.join(", ")))
            })
    }
}

/// One numerical check inside a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

/// Knobs for the suites; `corrupt_sign` flips the coherent term of the
/// correspondence as a negative control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub corrupt_sign: bool,
    pub mc_trajectories: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 2718, corrupt_sign: false, mc_trajectories: 20_000 }
    }
}

struct Acc {
    suite: Suite,
    name: &'static str,
    cases: usize,
    worst: f64,
    tolerance: f64,
}

impl Acc {
    fn new(suite: Suite, name: &'static str, tolerance: f64) -> Self {
        Self { suite, name, cases: 0, worst: 0.0, tolerance }
    }

    fn add(&mut self, residual: f64) {
        self.cases += 1;
        // NaN must fail the check
        self.worst = if residual.is_nan() { f64::INFINITY } else { self.worst.max(residual) };
    }

    fn done(self) -> Check {
        Check { suite: self.suite, name: self.name, cases: self.cases, max_residual: self.worst, tolerance: self.tolerance }
    }
}

fn order(m: f64) -> Result<RenyiOrder> {
    RenyiOrder::new(m)
}

fn rng_for(opts: &VerifyOptions, suite: Suite) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(suite as u64);
    rng
}

fn scalar_bath(beta: f64, chi: f64) -> Result<BathSpec> {
    BathSpec::new(beta, Susceptibility::scalar(chi)?)
}

fn correspondence(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = rng_for(opts, Suite::Correspondence);
    let mut acc = Acc::new(Suite::Correspondence, "total flow vs generating functions", 1e-10);
    let mut imag = Acc::new(Suite::Correspondence, "imaginary residue", 1e-10);
    for _ in 0..200 {
        let dim = rng.random_range(1..=3);
        let bath = random_bath(&mut rng, dim);
        let ycal = random_incoherent(&mut rng, dim);
        let ycoh = random_coherent(&mut rng, dim);
        let m = [2.0, 3.0, 5.0][rng.random_range(0..3)];
        let t = total_flow(&bath, order(m)?, &ycal, &ycoh)?;
        let via = if opts.corrupt_sign {
            let star = bath.rescaled(m)?;
            let xi = c64(0.0, bath.beta.get() * (m - 1.0));
            ((gf_incoherent(&star, &ycal, xi)? + gf_coherent(&star, &ycoh, xi)?) * m).re
        } else {
            let c = flow_via_correspondence(&bath, order(m)?, &ycal, &ycoh)?;
            imag.add(c.imag_residue.abs() / (c.value.abs() + f64::EPSILON * t.scale));
            c.value
        };
        acc.add((t.value - via).abs() / (t.value.abs() + f64::EPSILON * t.scale));
    }
    let mut checks = vec![acc.done()];
    if !opts.corrupt_sign {
        checks.push(imag.done());
    }
    Ok(checks)
}

fn diagram_sum(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = rng_for(opts, Suite::DiagramSum);
    let mut acc = Acc::new(Suite::DiagramSum, "world sum vs resummed form, M = 2..10", 1e-12);
    for m in 2..=10 {
        for _ in 0..10 {
            let dim = rng.random_range(1..=3);
            let bath = random_bath(&mut rng, dim);
            let y = random_coherent(&mut rng, dim);
            let a = multi_world_flow_diagram_sum(&bath, order(f64::from(m))?, &y)?;
            let b = multi_world_flow_closed(&bath, order(f64::from(m))?, &y)?;
            acc.add((a - b).abs() / b.abs());
        }
    }
    Ok(vec![acc.done()])
}

fn closed_form(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = rng_for(opts, Suite::ClosedForm);
    let mut engine = Acc::new(Suite::ClosedForm, "heat engine flow", 1e-12);
    let mut engine_fcs = Acc::new(Suite::ClosedForm, "heat engine generating functions", 1e-12);
    let mut osc = Acc::new(Suite::ClosedForm, "oscillator flow", 1e-12);
    let mut dual = Acc::new(Suite::ClosedForm, "coherent response form", 1e-12);
    for _ in 0..100 {
        let beta = rng.random_range(0.1..5.0);
        let spec = QheSpec::new(
            rng.random_range(0.2..3.0),
            scalar_bath(beta, rng.random_range(0.1..2.0))?,
            vec![scalar_bath(rng.random_range(0.05..1.0), rng.random_range(0.1..2.0))?],
            rng.random_range(0.0..2.0),
        )?;
        let st = qhe_steady_state(&spec)?;
        let (ycal, ycoh) = qhe_spectra(&spec, &st)?;
        let m = [0.5, 2.0, 2.5, 3.0, 5.0][rng.random_range(0..5)];
        let t = total_flow(&spec.probe, order(m)?, &ycal, &ycoh)?;
        let c = qhe_closed_rflow(&spec, &st, order(m)?)?;
        engine.add((t.value - c).abs() / t.scale.max(c.abs()));
        let star = spec.probe.rescaled(m)?;
        let xi = c64(0.0, beta * (m - 1.0));
        for (gf, part) in [(gf_incoherent(&star, &ycal, xi)?, FcsPart::Incoherent), (gf_coherent(&star, &ycoh, xi)?, FcsPart::Coherent)] {
            let closed = qhe_closed_fcs(&spec, &st, order(m)?, part)?;
            engine_fcs.add((gf - closed).norm() / gf.norm().max(f64::MIN_POSITIVE));
        }

        let w0 = rng.random_range(0.2..3.0);
        let ho = OscillatorSpec::new(
            w0,
            w0 + rng.random_range(0.1..1.0),
            rng.random_range(0.1..5.0),
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        )?;
        let probe = scalar_bath(beta, 1.0)?;
        let (ycal, ycoh) = ho_spectra(&ho)?;
        let m = rng.random_range(1.5..6.0);
        let t = total_flow(&probe, order(m)?, &ycal, &ycoh)?;
        let c = ho_closed_rflow(&ho, &probe, order(m)?)?;
        osc.add((t.value - c).abs() / c.abs());

        let dim = rng.random_range(1..=3);
        let bath = random_bath(&mut rng, dim);
        let y = random_coherent(&mut rng, dim);
        let xi = c64(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let a = gf_coherent(&bath, &y, xi)?;
        let b = gf_coherent_response(&bath, &y, xi)?;
        dual.add((a - b).norm() / a.norm());
    }
    Ok(vec![engine.done(), engine_fcs.done(), osc.done(), dual.done()])
}

fn reflection(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = rng_for(opts, Suite::Reflection);
    let mut acc = Acc::new(Suite::Reflection, "frequency reflection identity", 1e-12);
    let tests: [&dyn Fn(f64) -> Complex64; 3] = [&|_| c64(1.0, 0.0), &|w| c64(w, 0.0), &|w| Complex64::new(0.0, 0.7 * w).exp()];
    for _ in 0..100 {
        let dim = rng.random_range(1..=3);
        let bath = random_bath(&mut rng, dim);
        let spec = random_incoherent(&mut rng, dim);
        let m = rng.random_range(1.1..6.0);
        for f in tests {
            let l = reflection_lhs(&bath, order(m)?, &spec, f)?;
            let r = reflection_rhs(&bath, order(m)?, &spec, f)?;
            acc.add((l - r).norm() / l.norm());
        }
    }
    Ok(vec![acc.done()])
}

/// Heat engine with a hot auxiliary bath and a probe of relative strength `ratio`.
pub fn weak_probe_engine(ratio: f64, rabi: f64) -> Result<QheSpec> {
    QheSpec::new(1.0, scalar_bath(1.0, ratio)?, vec![scalar_bath(0.3, 1.0)?], rabi)
}

fn oracle(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut weak = Acc::new(Suite::Oracle, "tilted vs perturbative, weak probe", 1e-6);
    let spec = weak_probe_engine(1e-7, 0.0)?;
    let st = qhe_steady_state_without_probe(&spec)?;
    let (ycal, _) = qhe_spectra(&spec, &st)?;
    for xi in [c64(0.25, 0.0), c64(-0.5, 0.0), c64(1.0, 0.0), c64(0.0, 0.5), c64(0.4, -0.3)] {
        let exact = fcs_via_tilted(&spec, xi)?;
        let pert = gf_incoherent(&spec.probe, &ycal, xi)?;
        weak.add(if exact.ambiguous { f64::INFINITY } else { (exact.value - pert).norm() / pert.norm() });
    }

    let mut balance = Acc::new(Suite::Oracle, "tilted C1 vs rate balance", 1e-8);
    for (ratio, rabi) in [(0.3, 0.0), (2.0, 0.0), (0.3, 0.8)] {
        let spec = weak_probe_engine(ratio, rabi)?;
        let st = qhe_steady_state(&spec)?;
        let r = spec.rates()?.probe;
        let want = spec.splitting * (r.down * st.p1 - r.up * st.p0);
        let c1 = cumulant(|xi| Ok(fcs_via_tilted(&spec, xi)?.value), 1, spec.splitting)?;
        balance.add((c1.value - want).abs() / want.abs());
    }

    let mut mc = Acc::new(Suite::Oracle, "sampled C1 in standard errors", 3.0);
    let spec = weak_probe_engine(0.5, 0.0)?;
    let st = qhe_steady_state(&spec)?;
    let (ycal, _) = qhe_spectra(&spec, &st)?;
    let want: f64 = transfer_rates(&spec.probe, &ycal)?.iter().map(|(nu, g)| nu * g).sum();
    let s = sample_trajectories(&spec, 10.0, opts.mc_trajectories, opts.seed)?;
    mc.add((s.c1() - want).abs() / s.c1_stderr());
    Ok(vec![weak.done(), balance.done(), mc.done()])
}

fn classical_limit(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = rng_for(opts, Suite::ClassicalLimit);
    let mut acc = Acc::new(Suite::ClassicalLimit, "identical spectra give zero flow", 0.0);
    for _ in 0..50 {
        let dim = rng.random_range(1..=3);
        let bath = random_bath(&mut rng, dim);
        let y = random_coherent(&mut rng, dim);
        let m = [0.5, 2.0, 3.0, 4.5][rng.random_range(0..4)];
        acc.add(total_flow(&bath, order(m)?, &y, &y)?.value.abs());
        acc.add(flow_via_correspondence(&bath, order(m)?, &y, &y)?.value.abs());
    }
    let mut osc = Acc::new(Suite::ClassicalLimit, "oscillator at the probe temperature", 0.0);
    for t in [0.5, 1.0, 2.0] {
        let ho = OscillatorSpec::new(1.0, 1.7, t, c64(0.3, 0.1), c64(-0.2, 0.4))?;
        let probe = scalar_bath(1.0 / t, 1.0)?;
        osc.add(ho_closed_rflow(&ho, &probe, order(2.0)?)?.abs());
    }
    Ok(vec![acc.done(), osc.done()])
}

fn shannon_limit(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = rng_for(opts, Suite::ShannonLimit);
    let mut acc = Acc::new(Suite::ShannonLimit, "slope of the flow at M = 1", 1e-3);
    let eps = 1e-4;
    let spec = QheSpec::new(1.0, scalar_bath(1.0, 1.0)?, vec![scalar_bath(0.3, 1.0)?], 0.4)?;
    let st = qhe_steady_state(&spec)?;
    let (ycal, ycoh) = qhe_spectra(&spec, &st)?;
    let mut cases = vec![(spec.probe.clone(), ycal, ycoh)];
    for _ in 0..30 {
        let dim = rng.random_range(1..=2);
        let b = random_bath(&mut rng, dim);
        let bath = BathSpec::new(rng.random_range(0.1..0.7), b.chi)?;
        cases.push((bath, random_incoherent(&mut rng, dim), random_coherent(&mut rng, dim)));
    }
    for (bath, ycal, ycoh) in cases {
        let s = shannon_flow(&bath, &ycal, &ycoh)?;
        let slope = total_flow(&bath, order(1.0 + eps)?, &ycal, &ycoh)?.value / eps;
        let size: f64 = [&ycal, &ycoh]
            .iter()
            .map(|sp| transfer_rates(&bath, sp).map(|r| r.iter().map(|(nu, g)| (nu * g).abs()).sum::<f64>()))
            .sum::<Result<f64>>()?;
        acc.add((slope - s).abs() / (s.abs().max(bath.beta.get() * size * 1e-3)));
    }
    Ok(vec![acc.done()])
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Check>> {
    match suite {
        Suite::Correspondence => correspondence(opts),
        Suite::DiagramSum => diagram_sum(opts),
        Suite::ClosedForm => closed_form(opts),
        Suite::Reflection => reflection(opts),
        Suite::Oracle => oracle(opts),
        Suite::ClassicalLimit => classical_limit(opts),
        Suite::ShannonLimit => shannon_limit(opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_with_default_seed() {
        let opts = VerifyOptions { mc_trajectories: 5_000, ..Default::default() };
        for suite in Suite::ALL {
            for check in run_suite(suite, &opts).unwrap() {
                assert!(check.passed(), "{check:?}");
                assert!(check.cases > 0);
            }
        }
    }

    #[test]
    fn corrupted_sign_fails_correspondence() {
        let opts = VerifyOptions { corrupt_sign: true, ..Default::default() };
        assert!(run_suite(Suite::Correspondence, &opts).unwrap().iter().any(|c| !c.passed()));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()).unwrap(), s);
        }
        assert!(Suite::parse("everything").is_err());
    }
}
