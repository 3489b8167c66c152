//! The three comparison strategies on the same roster: nearest to the task
//! (DIS), most energy (ENG), and HP-then-distance (HP_DIS).
//!
//! `cargo run --example baseline_grouping -- data/roster12.json`

use rne_rescue::grouping::{assign_groups, default_weights, Strategy};
use rne_rescue::io::load_roster;
use rne_rescue::trust::RneConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/roster12.json".into());
    let roster = load_roster(&path)?;
    for strategy in [Strategy::Dis, Strategy::Eng, Strategy::HpDis] {
        let a = assign_groups(strategy, &roster.robots, &roster.tasks, &default_weights(), &RneConfig::default())?;
        println!("{:>6}  hard: {}", strategy.name(), a.hard_group.join(" "));
        println!("{:>6}  easy: {}", "", a.easy_group.join(" "));
    }
    Ok(())
}
