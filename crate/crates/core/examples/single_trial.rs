//! Runs one seeded desk-scale trial per strategy and prints the outcome.

use rne_rescue::grouping::Strategy;
use rne_rescue::harness::{compute_costs, run_trial};
use rne_rescue::sim::Scenario;

fn main() -> rne_rescue::Result<()> {
    let scenario = Scenario::desk_scale();
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    for strategy in Strategy::ALL {
        let t0 = std::time::Instant::now();
        let m = run_trial(&scenario, strategy, seed)?;
        println!(
            "{:>6}: easy {:>3} hard {:>3} rounds {:>2} rests {:>2} collisions {:>4} deadlocks {:>3} ({:.2?})",
            strategy.name(),
            m.rescued_easy,
            m.rescued_hard,
            m.rounds.len(),
            m.rest_events,
            m.collisions,
            m.deadlocks,
            t0.elapsed()
        );
        for c in compute_costs(&m) {
            println!(
                "        {:<5} energy/rescuee {:>8} hp/rescuee {:>8}",
                c.task.label(),
                c.energy_per_rescuee.map_or("-".into(), |v| format!("{v:.4}")),
                c.hp_per_rescuee.map_or("-".into(), |v| format!("{v:.4}")),
            );
        }
    }
    Ok(())
}
