//! Per-step ensemble records and the observers that fill them.
//!
//! A chain run emits one [`EnsembleRecord`] per accepted step. The step index
//! and plan digest are always present; election statistics are attached by
//! whichever [`Observer`]s the caller supplies, so runs on graphs without
//! vote data stay valid (the optional fields are simply omitted).

use serde::{Deserialize, Serialize};

use crate::election::{tally, Party};
use crate::error::Result;
use crate::graph::{DualGraph, Plan};

/// One row of a chain's statistics stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRecord {
    pub step: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seats_a: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranked_shares_a: Option<Vec<f64>>,
    pub plan_digest: String,
}

/// Statistic extractor invoked on every accepted step.
pub trait Observer {
    fn observe(&self, graph: &DualGraph, plan: &Plan, record: &mut EnsembleRecord) -> Result<()>;
}

/// Fills `seats_a` and `ranked_shares_a` from one named election.
pub struct ElectionObserver {
    election: String,
}

impl ElectionObserver {
    pub fn new(election: impl Into<String>) -> Self {
        ElectionObserver {
            election: election.into(),
        }
    }
}

impl Observer for ElectionObserver {
    fn observe(&self, graph: &DualGraph, plan: &Plan, record: &mut EnsembleRecord) -> Result<()> {
        let election = graph.election(&self.election)?;
        let t = tally(graph, plan, election)?;
        record.seats_a = Some(t.seats_won(Party::A));
        record.ranked_shares_a = Some(t.ranked_shares(Party::A)?);
        Ok(())
    }
}

/// Builds the record for one accepted step and runs every observer on it.
pub fn observe_step(
    observers: &[Box<dyn Observer + '_>],
    graph: &DualGraph,
    plan: &Plan,
    step: u64,
) -> Result<EnsembleRecord> {
    let mut record = EnsembleRecord {
        step,
        seats_a: None,
        ranked_shares_a: None,
        plan_digest: plan.digest(),
    };
    for obs in observers {
        obs.observe(graph, plan, &mut record)?;
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::Election;
    use crate::error::Error;

    #[test]
    fn observer_fills_election_stats() {
        let mut graph = DualGraph::rook_grid(2, 2);
        graph
            .add_election(Election::new("E", vec![3, 3, 0, 0], vec![0, 0, 2, 2]))
            .unwrap();
        let plan = Plan::from_assignment(vec![0, 0, 1, 1], 2).unwrap();
        let observers: Vec<Box<dyn Observer>> = vec![Box::new(ElectionObserver::new("E"))];
        let rec = observe_step(&observers, &graph, &plan, 7).unwrap();
        assert_eq!(rec.step, 7);
        assert_eq!(rec.seats_a, Some(1));
        assert_eq!(rec.ranked_shares_a, Some(vec![0.0, 1.0]));
        assert_eq!(rec.plan_digest, plan.digest());
    }

    #[test]
    fn missing_election_is_an_error() {
        let graph = DualGraph::rook_grid(2, 2);
        let plan = Plan::single_district(4);
        let observers: Vec<Box<dyn Observer>> = vec![Box::new(ElectionObserver::new("nope"))];
        assert!(matches!(
            observe_step(&observers, &graph, &plan, 1),
            Err(Error::UnknownElection { .. })
        ));
    }

    #[test]
    fn bare_record_omits_optional_fields() {
        let graph = DualGraph::rook_grid(2, 2);
        let plan = Plan::single_district(4);
        let rec = observe_step(&[], &graph, &plan, 1).unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        assert!(!json.contains("seats_a"));
        assert!(!json.contains("ranked_shares_a"));
        let back: EnsembleRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
    }
}
