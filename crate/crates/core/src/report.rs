//! Area savings reporting.
//!
//! Given mode takes measured standalone and reconfigurable totals and
//! reproduces the savings arithmetic; model mode compares the modeled area
//! of each application packed alone against the merged union, using the
//! area metric.

use std::fmt::Write as _;

use crate::graph::DataflowGraph;
use crate::merge::{area, merge, AreaTable, MergeError};

/// Savings summary: per-application standalone areas, their total, the
/// merged (reconfigurable) area, and the savings fraction
/// (total - merged) / total.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaReport {
    pub mode: &'static str,
    pub standalone: Vec<(String, u64)>,
    pub standalone_total: u64,
    pub merged: u64,
    pub savings: f64,
}

impl AreaReport {
    pub fn savings_percent(&self) -> f64 {
        self.savings * 100.0
    }
}

fn savings_fraction(total: u64, merged: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        (total as f64 - merged as f64) / total as f64
    }
}

/// Given mode: user-supplied measured totals.
pub fn report_given(standalone: &[(String, u64)], reconfigurable: u64) -> AreaReport {
    let total: u64 = standalone.iter().map(|(_, a)| a).sum();
    AreaReport {
        mode: "given",
        standalone: standalone.to_vec(),
        standalone_total: total,
        merged: reconfigurable,
        savings: savings_fraction(total, reconfigurable),
    }
}

/// Model mode: each application merged alone versus the union of all of
/// them, measured with the area metric.
pub fn report_model(
    graphs: &[DataflowGraph],
    table: &AreaTable,
    seed: Option<u64>,
) -> Result<AreaReport, MergeError> {
    let mut standalone = Vec::new();
    for g in graphs {
        let alone = merge(std::slice::from_ref(g), seed)?;
        standalone.push((g.name.clone(), area(&alone, table)?));
    }
    let union = merge(graphs, seed)?;
    let merged = area(&union, table)?;
    let total: u64 = standalone.iter().map(|(_, a)| a).sum();
    Ok(AreaReport {
        mode: "model",
        standalone,
        standalone_total: total,
        merged,
        savings: savings_fraction(total, merged),
    })
}

pub fn format_report(r: &AreaReport) -> String {
    let mut out = String::new();
    writeln!(out, "area report (mode={})", r.mode).unwrap();
    for (name, a) in &r.standalone {
        writeln!(out, "standalone {name}: {a}").unwrap();
    }
    writeln!(out, "standalone total: {}", r.standalone_total).unwrap();
    writeln!(out, "reconfigurable:   {}", r.merged).unwrap();
    writeln!(out, "savings:          {:.2}%", r.savings_percent()).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_app_graph;
    use crate::graph::TypeLabel;

    #[test]
    fn given_mode_reproduces_published_savings() {
        let r = report_given(
            &[("day".to_string(), 14327), ("night".to_string(), 27872)],
            31042,
        );
        assert!(
            (r.savings_percent() - 26.44).abs() < 0.005,
            "{}",
            r.savings_percent()
        );
        let r2 = report_given(
            &[("day".to_string(), 14327), ("night".to_string(), 27872)],
            31046,
        );
        assert!((r2.savings_percent() - 26.43).abs() < 0.005);
    }

    #[test]
    fn single_app_model_report_saves_nothing() {
        let g = parse_app_graph(
            "app solo\nnode a type=T in=0 out=1\nnode b type=U in=1 out=0\nedge a.out0 -> b.in0",
        )
        .unwrap();
        let table = AreaTable {
            intrinsic: [
                (TypeLabel::new("T").unwrap(), 10),
                (TypeLabel::new("U").unwrap(), 20),
            ]
            .into(),
            router_area: 5,
        };
        let r = report_model(std::slice::from_ref(&g), &table, None).unwrap();
        assert_eq!(r.standalone_total, r.merged);
        assert_eq!(r.savings, 0.0);
    }

    #[test]
    fn report_formats_with_two_decimals() {
        let r = report_given(&[("x".to_string(), 100)], 75);
        let text = format_report(&r);
        assert!(text.contains("savings:          25.00%"), "{text}");
    }
}
