//! Enumerates every equal split of a small carrier pool and picks the one
//! whose halves differ most.

use rne_rescue::geometry::Cell;
use rne_rescue::grouping::{all_bipartitions, best_split, default_weights, Role, RobotSnapshot};
use rne_rescue::trust::RneConfig;

fn main() -> rne_rescue::Result<()> {
    let needs = [
        [92.0, 0.83, 1.84, 71.0, 2.0, 6.0, 0.0092],
        [64.0, 0.58, 1.28, 95.0, 2.0, 4.0, 0.0064],
        [88.0, 0.79, 1.76, 55.0, 2.0, 6.0, 0.0088],
        [51.0, 0.45, 1.02, 40.0, 2.0, 5.0, 0.0051],
    ];
    let carriers = needs
        .iter()
        .enumerate()
        .map(|(i, n)| RobotSnapshot::new(format!("c{}", i + 1), Role::Carrier, n.to_vec(), Cell::new(i as i32, 0)))
        .collect::<Result<Vec<_>, _>>()?;

    for m in 1..=4 {
        let pool = (0..2 * m)
            .map(|i| RobotSnapshot::new(format!("r{i}"), Role::Carrier, vec![1.0; 7], Cell::new(i as i32, 0)))
            .collect::<Result<Vec<_>, _>>()?;
        println!("{} members split {} ways", 2 * m, all_bipartitions(&pool, m)?.len());
    }
    for b in all_bipartitions(&carriers, 2)? {
        println!("  {:?} | {:?}", b.half_a, b.half_b);
    }
    let best = best_split(&carriers, &default_weights(), &RneConfig::default())?;
    println!(
        "best split {:?} | {:?} with trust {}",
        best.half_a,
        best.half_b,
        best.score.expect("best_split scores its result")
    );
    Ok(())
}
