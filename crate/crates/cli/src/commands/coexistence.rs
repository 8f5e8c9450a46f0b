use std::fmt;

use consolidation::grid::fmt_f64;
use consolidation::potential::{find_coexistence_pressure, CoexistenceOptions, CoexistenceReport};

use super::Output;
use crate::config::Config;
use crate::svg::{render, LineStyle, Panel, Series};

/// Pressure quoted for the model parameters `a = 0.5, b = 1, alpha = 100`.
pub const REFERENCE_PRESSURE: f64 = 0.24221;

#[derive(Debug, Clone)]
pub struct CoexistenceSummary {
    pub report: CoexistenceReport,
    pub bracket: (f64, f64),
}

impl CoexistenceSummary {
    pub fn scan_csv(&self) -> String {
        let mut out = String::from("p,energy_gap\n");
        for (p, gap) in &self.report.scan {
            out += &format!("{},{}\n", fmt_f64(*p), gap.map(fmt_f64).unwrap_or_default());
        }
        out
    }

    pub fn discrepancy(&self) -> f64 {
        self.report.pressure - REFERENCE_PRESSURE
    }
}

impl fmt::Display for CoexistenceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.report;
        writeln!(f, "coexistence pressure p* = {:.10}", r.pressure)?;
        writeln!(f, "  fluid-poor minimum  ({:.8}, {:.8})  psi = {:.12e}", r.fluid_poor.eps, r.fluid_poor.m, r.fluid_poor.psi)?;
        writeln!(f, "  fluid-rich minimum  ({:.8}, {:.8})  psi = {:.12e}", r.fluid_rich.eps, r.fluid_rich.m, r.fluid_rich.psi)?;
        writeln!(f, "  energy gap at p*    {:.3e}", r.energy_gap)?;
        writeln!(f, "  bistable for p in   [{:.6}, {:.6}]", r.bistable_interval.0, r.bistable_interval.1)?;
        writeln!(f, "  sign changes in scan {}", r.sign_changes)?;
        let d = self.discrepancy();
        let verdict = if d.abs() <= 1e-3 { "agrees" } else { "DISAGREES" };
        writeln!(f, "  p* - {REFERENCE_PRESSURE} = {d:.3e} ({verdict} within 1e-3)")
    }
}

pub fn run(config: &Config, out: &Output) -> anyhow::Result<CoexistenceSummary> {
    let params = config.model()?;
    let bracket = (config.parsed_or("coexistence.lo", 0.23)?, config.parsed_or("coexistence.hi", 0.26)?);
    let opts = CoexistenceOptions {
        scan_points: config.parsed_or("coexistence.scan_points", CoexistenceOptions::default().scan_points)?,
        ..Default::default()
    };
    let report = find_coexistence_pressure(&params, bracket, &opts)?;
    let summary = CoexistenceSummary { report, bracket };
    out.csv("coexistence_scan.csv", &summary.scan_csv())?;
    let (ps, gaps): (Vec<f64>, Vec<f64>) = summary.report.scan.iter().filter_map(|(p, g)| g.map(|g| (*p, g))).unzip();
    let panel = Panel::new("energy gap between the wells", "p", "psi(poor) - psi(rich)")
        .with(Series::new("scan", ps, gaps, LineStyle::Solid));
    out.svg("coexistence.svg", &render(&[panel]))?;
    Ok(summary)
}
