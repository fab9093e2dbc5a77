use std::io::Write;

use crate::error::Result;
use crate::simloop::{Metrics, SweepRow, Trajectory};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn trace_header(depth: usize) -> Vec<String> {
    let mut cols: Vec<String> = ["t", "y", "x_plant", "u", "v", "d"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    fn indexed(prefix: &'static str, n: usize) -> impl Iterator<Item = String> {
        (0..n).map(move |i| format!("{prefix}{i}"))
    }
    cols.extend(indexed("mu_x", depth));
    cols.extend(indexed("eps_z", depth));
    cols.extend(indexed("eps_w", depth - 1));
    cols.extend(indexed("pi_z", depth));
    cols.extend(indexed("pi_w", depth - 1));
    cols.extend(["F_total", "F_obs", "F_dyn", "F_hyper"].iter().map(|s| s.to_string()));
    cols
}

pub fn write_trace(out: &mut impl Write, traj: &Trajectory) -> Result<()> {
    writeln!(out, "{}", trace_header(traj.depth).join(","))?;
    for r in &traj.rows {
        let f = &r.free_energy;
        let fields = [r.t, r.y, r.x_plant, r.u, r.v, r.d]
            .into_iter()
            .chain(r.mu_x.iter().copied())
            .chain(r.eps_z.iter().copied())
            .chain(r.eps_w.iter().copied())
            .chain(r.pi_z.iter().copied())
            .chain(r.pi_w.iter().copied())
            .chain([f.total, f.f_obs, f.f_dyn, f.f_hyper()])
            .map(format_number)
            .collect::<Vec<_>>();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub(crate) const METRIC_COLUMNS: [&str; 7] = [
    "iae",
    "ie",
    "overshoot_pct",
    "rise_time_10_90",
    "settling_time_2pct",
    "steady_state_error",
    "peak_u",
];

pub(crate) fn metric_fields(m: &Metrics) -> Vec<String> {
    vec![
        format_number(m.iae),
        format_number(m.ie),
        format_number(m.overshoot_pct),
        format_opt(m.rise_time_10_90),
        format_opt(m.settling_time_2pct),
        format_number(m.steady_state_error),
        format_number(m.peak_u),
    ]
}

pub(crate) fn write_sweep(out: &mut impl Write, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "value,{}", METRIC_COLUMNS.join(","))?;
    for row in rows {
        writeln!(
            out,
            "{},{}",
            format_number(row.value),
            metric_fields(&row.metrics).join(",")
        )?;
    }
    Ok(())
}
