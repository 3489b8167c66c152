//! Trust-based grouping of the twelve-robot roster, showing the score of
//! every split and merge along the way.
//!
//! `cargo run --example rne_grouping -- data/roster12.json`

use rne_rescue::grouping::{default_weights, rne_grouping};
use rne_rescue::io::load_roster;
use rne_rescue::trust::RneConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/roster12.json".into());
    let roster = load_roster(&path)?;
    let a = rne_grouping(&roster.robots, &default_weights(), &RneConfig::default())?;
    println!("hard: {}", a.hard_group.join(" "));
    println!("easy: {}", a.easy_group.join(" "));
    for (k, v) in &a.diagnostics {
        println!("  {k:<24} {v:.6}");
    }
    Ok(())
}
