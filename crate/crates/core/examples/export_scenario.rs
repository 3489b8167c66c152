//! Writes the built-in desk-scale scenario and a matching grouping roster
//! as JSON, so they can be edited and fed back to the CLI.
//!
//! `cargo run --example export_scenario -- scenarios/desk40.json data/roster12.json`

use rne_rescue::harness::sample_initials;
use rne_rescue::io::Roster;
use rne_rescue::sim::{RobotState, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let scenario_path = args.next().unwrap_or_else(|| "desk40.json".into());
    let roster_path = args.next().unwrap_or_else(|| "roster12.json".into());

    let scenario = Scenario::desk_scale();
    std::fs::write(&scenario_path, serde_json::to_string_pretty(&scenario)? + "\n")?;

    // Every robot at its start with the first trial's sampled energy and HP.
    let ids: Vec<String> = scenario.robots.iter().map(|r| r.id.clone()).collect();
    let initials = sample_initials(scenario.master_seed, &ids, 1, &scenario.initial)?;
    let robots = scenario
        .robots
        .iter()
        .zip(&initials.trials[0])
        .map(|(cfg, init)| {
            let mut r = RobotState::new(cfg.id.clone(), cfg.role, *scenario.roles.get(cfg.role), cfg.start);
            r.energy = init.energy;
            r.hp = init.hp;
            r.snapshot()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let roster = Roster {
        robots,
        tasks: scenario.world.task_targets(),
    };
    std::fs::write(&roster_path, serde_json::to_string_pretty(&roster)? + "\n")?;
    println!("wrote {scenario_path} and {roster_path}");
    Ok(())
}
