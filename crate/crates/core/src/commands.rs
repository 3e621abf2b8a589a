//! Command implementations behind the `entroflow` binary.
//!
//! Every command returns a [`Report`]; rendering and exit codes are left to
//! the caller.

use rayon::prelude::*;

use crate::config::{PreparedModel, RunConfig};
use crate::error::{Error, Result};
use crate::fcs::{cumulant, gf_coherent, gf_incoherent};
use crate::linalg::c64;
use crate::oracle::{fcs_via_tilted, sample_trajectories, TrajectoryStats};
use crate::report::{Cell, Meta, Report, Table};
use crate::rflow::{flow_via_correspondence, total_flow, RenyiOrder};
use crate::verify::{run_suite, Suite, VerifyOptions};

pub const DEFAULT_SEED: u64 = 2718;

/// Provenance recorded in every report header.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub config_sha256: String,
    pub seed: Option<u64>,
}

fn report(command: &str, inv: &Invocation, tables: Vec<Table>, passed: Option<bool>) -> Report {
    Report {
        meta: Meta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_sha256: inv.config_sha256.clone(),
            seed: inv.seed,
        },
        tables,
        passed,
    }
}

const FLOW_COLUMNS: [&str; 8] =
    ["M", "total_flow", "single_world", "multi_world", "via_correspondence", "residual", "imag_residue", "closed_form"];

fn flow_rows(cfg: &RunConfig) -> Result<Vec<Vec<Cell>>> {
    let p = cfg.prepare()?;
    cfg.orders
        .iter()
        .map(|&m| {
            if m == 1.0 {
                return Err(Error::InvalidArgument(
                    "config field `orders`: M = 1 is the Shannon limit; `fcs` reports its mean currents".into(),
                ));
            }
            let o = RenyiOrder::new(m)?;
            let t = total_flow(&p.probe, o, &p.ycal, &p.ycoh)?;
            let c = flow_via_correspondence(&p.probe, o, &p.ycal, &p.ycoh)?;
            let residual = (t.value - c.value).abs() / (t.value.abs() + f64::EPSILON * t.scale).max(f64::MIN_POSITIVE);
            Ok(vec![
                m.into(),
                t.value.into(),
                t.single_world.into(),
                t.multi_world.into(),
                c.value.into(),
                residual.into(),
                c.imag_residue.into(),
                p.closed_form(o)?.into(),
            ])
        })
        .collect()
}

/// Rényi flow per order, through both routes and the model's closed form.
pub fn cmd_rflow(cfg: &RunConfig, inv: &Invocation) -> Result<Report> {
    let mut t = Table::new("rflow", &FLOW_COLUMNS);
    for row in flow_rows(cfg)? {
        t.push(row);
    }
    Ok(report("rflow", inv, vec![t], None))
}

/// Generating functions on the ξ grid plus the first four cumulants.
pub fn cmd_fcs(cfg: &RunConfig, inv: &Invocation) -> Result<Report> {
    let grid = cfg
        .xi_grid
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("config field `xi_grid`: required by `fcs`".into()))?;
    let p = cfg.prepare()?;
    let mut gf = Table::new("generating_functions", &["xi_re", "xi_im", "f_i_re", "f_i_im", "f_c_re", "f_c_im"]);
    for &[re, im] in grid {
        let xi = c64(re, im);
        let fi = gf_incoherent(&p.probe, &p.ycal, xi)?;
        let fc = gf_coherent(&p.probe, &p.ycoh, xi)?;
        gf.push(vec![re.into(), im.into(), fi.re.into(), fi.im.into(), fc.re.into(), fc.im.into()]);
    }
    let wmax = p.max_frequency();
    let mut cs = Table::new("cumulants", &["n", "incoherent", "coherent", "imag_incoherent", "imag_coherent", "flagged"]);
    for n in 1..=4 {
        let ci = cumulant(|xi| gf_incoherent(&p.probe, &p.ycal, xi), n, wmax)?;
        let cc = cumulant(|xi| gf_coherent(&p.probe, &p.ycoh, xi), n, wmax)?;
        cs.push(vec![
            i64::from(n).into(),
            ci.value.into(),
            cc.value.into(),
            ci.imag_residue.into(),
            cc.imag_residue.into(),
            (ci.flagged || cc.flagged).into(),
        ]);
    }
    Ok(report("fcs", inv, vec![gf, cs], None))
}

/// Oracle comparison plus the raw sampled statistics, if any.
pub struct OracleOutput {
    pub report: Report,
    pub samples: Option<TrajectoryStats>,
}

/// Analytic vs tilted-generator vs sampled cumulants for the heat engine.
pub fn cmd_oracle(cfg: &RunConfig, inv: &Invocation) -> Result<OracleOutput> {
    let p = cfg.prepare()?;
    let PreparedModel::Qhe { spec, .. } = &p.model else {
        return Err(Error::InvalidArgument("oracle supports QHE only".into()));
    };
    let opts = cfg.oracle.clone().unwrap_or_default();
    let wmax = spec.splitting;
    let samples = if spec.rabi == 0.0 {
        Some(sample_trajectories(spec, opts.duration, opts.trajectories, inv.seed.unwrap_or(DEFAULT_SEED))?)
    } else {
        None
    };
    let mut t = Table::new("oracle", &["quantity", "analytic", "tilted", "monte_carlo", "monte_carlo_stderr"]);
    for n in 1..=2u32 {
        let analytic = cumulant(|xi| gf_incoherent(&p.probe, &p.ycal, xi), n, wmax)?.value;
        let tilted = cumulant(|xi| Ok(fcs_via_tilted(spec, xi)?.value), n, wmax)?.value;
        let (mc, se) = match &samples {
            Some(s) if n == 1 => (Some(s.c1()), Some(s.c1_stderr())),
            Some(s) => (Some(s.c2()), Some(s.c2_stderr())),
            None => (None, None),
        };
        let label = if n == 1 { "C1" } else { "C2" };
        t.push(vec![label.into(), analytic.into(), tilted.into(), mc.into(), se.into()]);
    }
    Ok(OracleOutput { report: report("oracle", inv, vec![t], None), samples })
}

/// Flow table over a one-parameter sweep; points are evaluated in parallel
/// and emitted in axis order.
pub fn cmd_sweep(cfg: &RunConfig, inv: &Invocation) -> Result<Report> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("config field `sweep`: required by `sweep`".into()))?;
    let points = cfg.sweep_points().expect("sweep present");
    let blocks: Vec<Vec<Vec<Cell>>> = points
        .par_iter()
        .map(|&v| {
            let rows = flow_rows(&cfg.with_parameter(&sweep.name, v)?)?;
            Ok(rows.into_iter().map(|r| std::iter::once(Cell::Num(v)).chain(r).collect()).collect())
        })
        .collect::<Result<_>>()?;
    let mut columns = vec![sweep.name.as_str()];
    columns.extend(FLOW_COLUMNS);
    let mut t = Table::new("sweep", &columns);
    for row in blocks.into_iter().flatten() {
        t.push(row);
    }
    Ok(report("sweep", inv, vec![t], None))
}

/// Run the verification suites; `passed` is false if any check fails.
pub fn cmd_verify(suites: &[Suite], opts: &VerifyOptions, inv: &Invocation) -> Result<Report> {
    let mut checks = Table::new("checks", &["suite", "check", "cases", "max_residual", "tolerance", "passed"]);
    let mut summary = Table::new("suites", &["suite", "passed"]);
    let mut all = true;
    for &suite in suites {
        let results = run_suite(suite, opts)?;
        let ok = results.iter().all(|c| c.passed());
        all &= ok;
        for c in results {
            checks.push(vec![
                suite.name().into(),
                c.name.into(),
                (c.cases as i64).into(),
                c.max_residual.into(),
                c.tolerance.into(),
                c.passed().into(),
            ]);
        }
        summary.push(vec![suite.name().into(), ok.into()]);
    }
    Ok(report("verify", inv, vec![checks, summary], Some(all)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Format;

    fn inv() -> Invocation {
        Invocation { config_sha256: "test".into(), seed: Some(1) }
    }

    fn col(r: &Report, table: &str, name: &str) -> Vec<f64> {
        r.table(table).unwrap().column(name).unwrap().iter().map(|c| c.as_f64().unwrap()).collect()
    }

    const QHE: &str = r#"{
        "model": {"type": "qhe", "splitting": 1.0, "steady_state": {"p1": 0.3}},
        "orders": [2.0, 3.0],
        "beta": 1.0,
        "xi_grid": [[0, 0], [0.5, 0], [0, 1]]
    }"#;

    #[test]
    fn rflow_reference_engine() {
        let cfg = RunConfig::from_json(QHE).unwrap();
        let r = cmd_rflow(&cfg, &inv()).unwrap();
        assert!((col(&r, "rflow", "total_flow")[0] - 0.062117157260009735).abs() < 1e-14);
        assert!(col(&r, "rflow", "residual").iter().all(|&v| v <= 1e-10));
        let bad = RunConfig::from_json(&QHE.replace("[2.0, 3.0]", "[1.0]")).unwrap();
        assert!(cmd_rflow(&bad, &inv()).is_err());
    }

    #[test]
    fn rflow_oscillator_at_probe_temperature() {
        let text = r#"{"model": {"type": "oscillator", "omega0": 1.0, "drive_frequency": 1.7,
                       "effective_temperature": 1.0}, "beta": 1.0, "orders": [2, 3]}"#;
        let r = cmd_rflow(&RunConfig::from_json(text).unwrap(), &inv()).unwrap();
        for name in ["total_flow", "single_world", "multi_world", "via_correspondence", "closed_form"] {
            assert!(col(&r, "rflow", name).iter().all(|v| v.abs() < 1e-15), "{name}");
        }
    }

    #[test]
    fn fcs_reference_engine() {
        let r = cmd_fcs(&RunConfig::from_json(QHE).unwrap(), &inv()).unwrap();
        assert_eq!(col(&r, "generating_functions", "f_i_re")[0], 0.0);
        assert!(col(&r, "generating_functions", "f_c_re").iter().all(|&v| v == 0.0));
        assert!((col(&r, "cumulants", "incoherent")[0] - 0.06720931725226942).abs() < 1e-9);
        let no_grid = QHE.replace(",\n        \"xi_grid\": [[0, 0], [0.5, 0], [0, 1]]", "");
        assert!(cmd_fcs(&RunConfig::from_json(&no_grid).unwrap(), &inv()).is_err());
    }

    #[test]
    fn oracle_rejects_oscillator_and_is_deterministic() {
        let text = r#"{"model": {"type": "oscillator", "omega0": 1.0, "drive_frequency": 1.7,
                       "effective_temperature": 1.0}, "beta": 1.0}"#;
        let e = cmd_oracle(&RunConfig::from_json(text).unwrap(), &inv()).err().unwrap();
        assert!(e.to_string().contains("QHE only"));
        let engine = r#"{"model": {"type": "qhe", "splitting": 1.0, "probe_chi": {"family": "constant", "value": 0.5},
                         "other_baths": [{"beta": 0.3}]}, "beta": 1.0,
                         "oracle": {"duration": 5.0, "trajectories": 2000}}"#;
        let cfg = RunConfig::from_json(engine).unwrap();
        let a = cmd_oracle(&cfg, &inv()).unwrap().report.render(Format::Csv).unwrap();
        let b = cmd_oracle(&cfg, &inv()).unwrap().report.render(Format::Csv).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_rows_follow_axis() {
        let text = r#"{"model": {"type": "qhe", "splitting": 1.0, "other_baths": [{"beta": 0.3}]},
                       "beta": 1.0, "orders": [2],
                       "sweep": {"name": "rabi", "from": 0.0, "to": 1.0, "steps": 5}}"#;
        let r = cmd_sweep(&RunConfig::from_json(text).unwrap(), &inv()).unwrap();
        assert_eq!(col(&r, "sweep", "rabi"), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let total = col(&r, "sweep", "total_flow");
        let closed = col(&r, "sweep", "closed_form");
        for (t, c) in total.iter().zip(&closed) {
            assert!((t - c).abs() <= 1e-12 * t.abs());
        }
    }

    #[test]
    fn verify_single_suite() {
        let r = cmd_verify(&[Suite::Reflection], &VerifyOptions::default(), &inv()).unwrap();
        assert_eq!(r.passed, Some(true));
        assert_eq!(r.table("suites").unwrap().rows.len(), 1);
    }
}
