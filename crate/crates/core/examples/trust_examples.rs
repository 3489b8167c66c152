//! Agent, agent-group and group-group trust on small three-need robots,
//! including the base-10 truncated variant.

use rne_rescue::needs::{normalize_needs, GroupNeedsMatrix, NeedsVector, WeightVector};
use rne_rescue::trust::{agent_agent_trust, agent_group_trust, group_group_trust, LogBase, RneConfig};

fn main() -> rne_rescue::Result<()> {
    let w = WeightVector::new(vec![6.0, 4.0, 2.0])?;
    let r1 = NeedsVector::new(vec![86.0, 120.0, 30.0])?;
    let r2 = NeedsVector::new(vec![20.0, 30.0, 10.0])?;
    let r3 = NeedsVector::new(vec![80.0, 115.0, 25.0])?;
    let g1 = GroupNeedsMatrix::from_rows(vec![vec![82.0, 114.0, 24.0], vec![79.0, 117.0, 23.0]])?;
    let g2 = GroupNeedsMatrix::from_rows(vec![vec![40.0, 56.0, 12.0], vec![56.0, 48.0, 15.0]])?;
    let cfg = RneConfig::default();

    for (name, r) in [("R1", &r1), ("R2", &r2), ("R3", &r3)] {
        let d = normalize_needs(r, &w)?;
        println!("D({name}) = {:.4?}", d.probs());
    }
    println!("T(R1||R2) = {}", agent_agent_trust(&r1, &r2, &w, &cfg)?);
    println!("T(R1||R3) = {}", agent_agent_trust(&r1, &r3, &w, &cfg)?);
    println!("T(R1||G1) = {}", agent_group_trust(&r1, &g1, &w, &cfg)?);
    println!("T(R1||G2) = {}", agent_group_trust(&r1, &g2, &w, &cfg)?);

    let ten = RneConfig::default().with_log_base(LogBase::Ten).with_truncation(2);
    println!("T(G1||G2) = {} (base 10, floored to 2 decimals)", group_group_trust(&g1, &g2, &w, &ten)?);
    println!("T(G2||G1) = {} (base 10, floored to 2 decimals)", group_group_trust(&g2, &g1, &w, &ten)?);
    println!("T(G1||G2) = {} (natural log, full precision)", group_group_trust(&g1, &g2, &w, &cfg)?);
    Ok(())
}
