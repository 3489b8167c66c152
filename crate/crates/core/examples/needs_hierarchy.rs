//! Evaluates the four-level needs hierarchy for a healthy robot and for one
//! whose safety level falls short, which switches off every level above it.

use rne_rescue::needs::{ExpectationTerms, NeedsHierarchy};

fn hierarchy(safety_probs: Vec<f64>) -> rne_rescue::Result<NeedsHierarchy> {
    Ok(NeedsHierarchy {
        safety: ExpectationTerms::new(vec![1.0, 1.0], safety_probs)?,
        basic: ExpectationTerms::new(vec![0.6, 0.4], vec![0.9, 0.8])?,
        capability: ExpectationTerms::new(vec![0.5, 0.3, 0.2], vec![0.7, 0.9, 0.4])?,
        teaming: ExpectationTerms::new(vec![1.0], vec![0.75])?,
        thresholds: [1.2, 0.5, 0.5],
    })
}

fn main() -> rne_rescue::Result<()> {
    for (label, probs) in [("healthy", vec![0.9, 0.8]), ("in danger", vec![0.3, 0.4])] {
        let levels = hierarchy(probs)?.evaluate()?;
        println!(
            "{label:>9}: safety {:.2} basic {:.2} capability {:.2} teaming {:.2} gates {:?}",
            levels.safety, levels.basic, levels.capability, levels.teaming, levels.gate_satisfied
        );
    }
    Ok(())
}
