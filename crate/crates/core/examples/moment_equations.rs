use cavity_collective::dynamics::TimeGrid;
use cavity_collective::moments::{integrate_moment_equations, short_time_expansion, ClosureConfig, MomentState, SignMode};
use cavity_collective::{ModeDims, ModelParams};

/// Closed equations `dm/dt = g k1`, `dk1/dt = σ 2 N g k2` with a frozen
/// `k2`, under both sign conventions, next to their quadratic solution.
fn main() -> cavity_collective::Result<()> {
    let params = ModelParams::new(4, 0.1, ModeDims::default());
    let init = MomentState { m: 0.5, k1: 0.0, k2: 0.25 };
    let grid = TimeGrid::new(10.0, 11)?;
    for mode in [SignMode::AsPrinted, SignMode::Opposite] {
        let series = integrate_moment_equations(&init, &params, &ClosureConfig::constant(init.k2, mode), &grid)?;
        println!("{mode:?}:");
        for row in &series.rows {
            let closed = short_time_expansion(&init, &params, mode, row.t);
            let flag = if row.m_negative { "  (m < 0)" } else { "" };
            println!("  t = {:4.1}  m = {:+.6}  closed form {:+.6}  k1 = {:+.4}{flag}", row.t, row.m, closed, row.k1);
        }
    }
    Ok(())
}
