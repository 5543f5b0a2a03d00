//! Trajectory CSV and plot-data output.

use std::io::Write;

use crate::analysis::{detect_formation_at, FormationThresholds};
use crate::geom::VehicleState;
use crate::scalar::Scalar;
use crate::sim::TrajectoryRecord;

/// 17 significant digits, enough to round-trip an f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const TRAJECTORY_HEADER: [&str; 11] = ["t", "id", "x", "y", "theta", "v", "omega", "mode", "W", "M", "E"];

pub fn write_trajectory_csv<T: Scalar, W: Write>(record: &TrajectoryRecord<T>, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for (k, tick) in record.ticks.iter().enumerate() {
        let t = fmt_f64(record.time(k).f64());
        for (i, a) in tick.iter().enumerate() {
            w.write_record([
                t.clone(),
                i.to_string(),
                fmt_f64(a.state.position.x.f64()),
                fmt_f64(a.state.position.y.f64()),
                fmt_f64(a.state.heading.f64()),
                fmt_f64(a.input.v.f64()),
                fmt_f64(a.input.omega.f64()),
                a.mode.as_str().to_string(),
                fmt_f64(a.cost.upwash_w.f64()),
                fmt_f64(a.cost.moment_m.f64()),
                fmt_f64(a.cost.cost_e.f64()),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Wide table of E per agent over time: `t, E0, E1, ...`.
pub fn write_cost_series<T: Scalar, W: Write>(record: &TrajectoryRecord<T>, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((0..record.agent_count).map(|i| format!("E{i}")));
    w.write_record(&header)?;
    for (k, tick) in record.ticks.iter().enumerate() {
        let mut row = vec![fmt_f64(record.time(k).f64())];
        row.extend(tick.iter().map(|a| fmt_f64(a.cost.cost_e.f64())));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Flock-shape polylines: for each requested time, the left branch from its tail
/// to the front agent and on to the tail of the right branch.
pub fn write_shape_polylines<T: Scalar, W: Write>(
    record: &TrajectoryRecord<T>,
    times: &[T],
    theta_g: T,
    half_span: T,
    th: &FormationThresholds,
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "order", "id", "x", "y"])?;
    for &t in times {
        let k = record.tick_at(t);
        let states: Vec<VehicleState<T>> = record.ticks[k].iter().map(|a| a.state).collect();
        let m = detect_formation_at(&states, theta_g, half_span, th);
        let path = m
            .left
            .members
            .iter()
            .rev()
            .chain(std::iter::once(&m.front))
            .chain(m.right.members.iter());
        for (order, &id) in path.enumerate() {
            let p = states[id].position;
            w.write_record([
                fmt_f64(record.time(k).f64()),
                order.to_string(),
                id.to_string(),
                fmt_f64(p.x.f64()),
                fmt_f64(p.y.f64()),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
