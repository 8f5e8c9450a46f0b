use std::fmt;

use consolidation::mms::{coupled_temporal_order, spatial_order, spatial_params, temporal_order, OrderTable, TemporalStudy};

use super::Output;
use crate::config::Config;

#[derive(Debug, Clone)]
pub struct MmsReport {
    pub implicit: OrderTable,
    pub crank_nicolson: OrderTable,
    pub spatial: OrderTable,
    pub coupled: Vec<OrderTable>,
}

impl MmsReport {
    pub fn tables(&self) -> impl Iterator<Item = &OrderTable> {
        [&self.implicit, &self.crank_nicolson, &self.spatial].into_iter().chain(&self.coupled)
    }
}

impl fmt::Display for MmsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.tables() {
            writeln!(f, "{}", t.label)?;
            for (k, (s, e)) in t.sizes.iter().zip(&t.errors).enumerate() {
                let order = if k == 0 { String::from("-") } else { format!("{:.3}", t.orders[k - 1]) };
                writeln!(f, "  size {s:<12.4e} error {e:<12.4e} order {order}")?;
            }
        }
        Ok(())
    }
}

pub fn run(config: &Config, out: &Output) -> anyhow::Result<MmsReport> {
    let levels = config.parsed_or("mms.levels", 5usize)?;
    let study = |theta| -> anyhow::Result<TemporalStudy> {
        let d = TemporalStudy::new(theta);
        Ok(TemporalStudy {
            cells: config.parsed_or("mms.cells", d.cells)?,
            coarse_steps: config.parsed_or("mms.coarse_steps", d.coarse_steps)?,
            levels,
            ..d
        })
    };
    let cells = config
        .list("mms.spatial_cells")?
        .map(|v| v.into_iter().map(|c| c as usize).collect::<Vec<_>>())
        .unwrap_or_else(|| vec![20, 40, 80, 160]);
    let report = MmsReport {
        implicit: temporal_order(&study(1.0)?)?,
        crank_nicolson: temporal_order(&study(0.5)?)?,
        spatial: spatial_order(&spatial_params(), &cells)?,
        coupled: vec![coupled_temporal_order(0.5, levels)?, coupled_temporal_order(1.0, levels)?],
    };
    let csv: String = report
        .tables()
        .enumerate()
        .map(|(k, t)| {
            let body = t.to_csv();
            if k == 0 { body } else { body.lines().skip(1).map(|l| format!("{l}\n")).collect() }
        })
        .collect();
    out.csv("mms.csv", &csv)?;
    Ok(report)
}
