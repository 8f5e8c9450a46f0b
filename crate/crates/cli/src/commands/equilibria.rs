use std::fmt;

use consolidation::grid::fmt_f64;
use consolidation::potential::{find_equilibria, SearchBox};
use consolidation::EquilibriumPoint;

use super::Output;
use crate::config::Config;

#[derive(Debug, Clone)]
pub struct EquilibriaReport {
    pub p: f64,
    pub points: Vec<EquilibriumPoint>,
}

impl EquilibriaReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,m,psi,kind\n");
        for q in &self.points {
            out += &format!("{},{},{},{}\n", fmt_f64(q.eps), fmt_f64(q.m), fmt_f64(q.psi), q.kind.as_str());
        }
        out
    }
}

impl fmt::Display for EquilibriaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "critical points at p = {}", self.p)?;
        writeln!(f, "{:>14} {:>14} {:>16}  kind", "eps", "m", "psi")?;
        for q in &self.points {
            writeln!(f, "{:>14.8} {:>14.8} {:>16.10e}  {}", q.eps, q.m, q.psi, q.kind.as_str())?;
        }
        Ok(())
    }
}

pub fn run(config: &Config, out: &Output) -> anyhow::Result<EquilibriaReport> {
    let params = config.model()?;
    let points = find_equilibria(&params, &SearchBox::default(), 16)?;
    let report = EquilibriaReport { p: params.p, points };
    out.csv("equilibria.csv", &report.to_csv())?;
    Ok(report)
}
