//! Two-party vote tallies and seat statistics.
//!
//! Votes are stored as raw per-unit counts; shares are always derived at the
//! point of use (reported statewide percentages do not reliably sum to one,
//! so nothing here assumes they do). Third-party votes are expected to be
//! dropped during ingestion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistrictId, DualGraph, Plan, VertexId};

/// The two parties of a contest. By reporting convention `A` is the
/// Democratic column and `B` the Republican column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn opponent(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }
}

impl std::str::FromStr for Party {
    type Err = Error;

    fn from_str(s: &str) -> Result<Party> {
        match s {
            "a" | "A" => Ok(Party::A),
            "b" | "B" => Ok(Party::B),
            other => Err(Error::InvalidConfig {
                reason: format!("unknown party {other:?}; expected 'a' or 'b'"),
            }),
        }
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::A => write!(f, "a"),
            Party::B => write!(f, "b"),
        }
    }
}

/// A named contest with per-vertex vote counts for both parties, indexed by
/// dense vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Election {
    name: String,
    votes_a: Vec<u64>,
    votes_b: Vec<u64>,
}

impl Election {
    pub fn new(name: impl Into<String>, votes_a: Vec<u64>, votes_b: Vec<u64>) -> Election {
        assert_eq!(
            votes_a.len(),
            votes_b.len(),
            "party vote vectors must have equal length"
        );
        Election {
            name: name.into(),
            votes_a,
            votes_b,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_vertices(&self) -> usize {
        self.votes_a.len()
    }

    pub fn votes(&self, v: VertexId) -> (u64, u64) {
        (self.votes_a[v.index()], self.votes_b[v.index()])
    }

    pub fn votes_for(&self, v: VertexId, party: Party) -> u64 {
        match party {
            Party::A => self.votes_a[v.index()],
            Party::B => self.votes_b[v.index()],
        }
    }

    pub fn total(&self, party: Party) -> u64 {
        match party {
            Party::A => self.votes_a.iter().sum(),
            Party::B => self.votes_b.iter().sum(),
        }
    }

    /// Party share of the statewide two-party total.
    pub fn statewide_share(&self, party: Party) -> Result<f64> {
        let a = self.total(Party::A);
        let b = self.total(Party::B);
        if a + b == 0 {
            return Err(Error::DegenerateElection);
        }
        Ok(self.total(party) as f64 / (a + b) as f64)
    }
}

/// Per-district `(party A, party B)` vote totals for one election under one
/// plan. District sums always equal the statewide sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistrictTally {
    totals: Vec<(u64, u64)>,
}

impl DistrictTally {
    pub fn new(totals: Vec<(u64, u64)>) -> Result<DistrictTally> {
        if totals.is_empty() {
            return Err(Error::InvalidConfig {
                reason: "a tally needs at least one district".into(),
            });
        }
        Ok(DistrictTally { totals })
    }

    pub fn num_districts(&self) -> usize {
        self.totals.len()
    }

    pub fn totals(&self) -> &[(u64, u64)] {
        &self.totals
    }

    pub fn district_total(&self, d: DistrictId, party: Party) -> u64 {
        let (a, b) = self.totals[d.index()];
        match party {
            Party::A => a,
            Party::B => b,
        }
    }

    /// Number of districts the party wins outright; exact ties award the
    /// seat to neither party.
    pub fn seats_won(&self, party: Party) -> u32 {
        self.totals
            .iter()
            .filter(|&&(a, b)| match party {
                Party::A => a > b,
                Party::B => b > a,
            })
            .count() as u32
    }

    /// Per-district two-party shares for `party`, sorted ascending.
    pub fn ranked_shares(&self, party: Party) -> Result<Vec<f64>> {
        let mut shares = Vec::with_capacity(self.totals.len());
        for (d, &(a, b)) in self.totals.iter().enumerate() {
            if a + b == 0 {
                return Err(Error::ZeroVoteDistrict {
                    district: d as u32 + 1,
                });
            }
            let winner = match party {
                Party::A => a,
                Party::B => b,
            };
            shares.push(winner as f64 / (a + b) as f64);
        }
        shares.sort_by(f64::total_cmp);
        Ok(shares)
    }
}

/// Sums an election's per-vertex votes into per-district totals.
pub fn tally(graph: &DualGraph, plan: &Plan, election: &Election) -> Result<DistrictTally> {
    if plan.num_vertices() != graph.num_vertices() {
        return Err(Error::PlanGraphMismatch {
            expected: graph.num_vertices(),
            actual: plan.num_vertices(),
        });
    }
    if election.num_vertices() != graph.num_vertices() {
        return Err(Error::IncompleteElection {
            election: election.name().to_string(),
            vertex: format!("#{}", election.num_vertices().min(graph.num_vertices())),
        });
    }
    let mut totals = vec![(0u64, 0u64); plan.num_districts() as usize];
    for (v, d) in plan.assignments() {
        let (a, b) = election.votes(v);
        totals[d.index()].0 += a;
        totals[d.index()].1 += b;
    }
    Ok(DistrictTally { totals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_sums_per_district() {
        let graph = DualGraph::path_graph(2);
        let election = Election::new("E", vec![3, 4], vec![1, 0]);
        let plan = Plan::single_district(2);
        let t = tally(&graph, &plan, &election).unwrap();
        assert_eq!(t.totals(), &[(7, 1)]);
    }

    #[test]
    fn singleton_districts_pass_votes_through() {
        let graph = DualGraph::path_graph(3);
        let election = Election::new("E", vec![5, 0, 2], vec![1, 7, 2]);
        let plan = Plan::from_assignment(vec![0, 1, 2], 3).unwrap();
        let t = tally(&graph, &plan, &election).unwrap();
        assert_eq!(t.totals(), &[(5, 1), (0, 7), (2, 2)]);
    }

    #[test]
    fn row_plan_tallies_on_grid() {
        let graph = DualGraph::rook_grid(2, 3);
        let election = Election::new("E", vec![1; 6], vec![0; 6]);
        let rows = Plan::from_assignment(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let t = tally(&graph, &rows, &election).unwrap();
        assert_eq!(t.totals(), &[(3, 0), (3, 0)]);
    }

    #[test]
    fn tally_conserves_statewide_totals() {
        let graph = DualGraph::rook_grid(2, 3);
        let election = Election::new("E", vec![9, 1, 4, 0, 2, 7], vec![3, 3, 3, 3, 3, 3]);
        let plan = Plan::from_assignment(vec![0, 0, 1, 0, 1, 1], 2).unwrap();
        let t = tally(&graph, &plan, &election).unwrap();
        let (sa, sb): (u64, u64) = t
            .totals()
            .iter()
            .fold((0, 0), |(a, b), &(x, y)| (a + x, b + y));
        assert_eq!(sa, election.total(Party::A));
        assert_eq!(sb, election.total(Party::B));
    }

    #[test]
    fn incomplete_election_is_rejected() {
        let graph = DualGraph::path_graph(3);
        let short = Election::new("E", vec![1, 2], vec![0, 0]);
        let plan = Plan::single_district(3);
        assert!(matches!(
            tally(&graph, &plan, &short),
            Err(Error::IncompleteElection { .. })
        ));
    }

    #[test]
    fn seats_with_tie_rule() {
        let t = DistrictTally {
            totals: vec![(7, 1), (0, 5)],
        };
        assert_eq!(t.seats_won(Party::A), 1);
        assert_eq!(t.seats_won(Party::B), 1);

        let tied = DistrictTally {
            totals: vec![(2, 2)],
        };
        assert_eq!(tied.seats_won(Party::A), 0);
        assert_eq!(tied.seats_won(Party::B), 0);

        let sweep = DistrictTally {
            totals: vec![(5, 1), (4, 2), (9, 3)],
        };
        assert_eq!(sweep.seats_won(Party::A), 3);
    }

    #[test]
    fn seats_plus_ties_cover_all_districts() {
        let t = DistrictTally {
            totals: vec![(7, 1), (0, 5), (2, 2), (4, 4)],
        };
        let ties = t.totals().iter().filter(|&&(a, b)| a == b).count() as u32;
        assert_eq!(
            t.seats_won(Party::A) + t.seats_won(Party::B) + ties,
            t.num_districts() as u32
        );
    }

    #[test]
    fn ranked_shares_sorted() {
        let t = DistrictTally {
            totals: vec![(6, 4), (4, 6), (11, 9)],
        };
        assert_eq!(t.ranked_shares(Party::A).unwrap(), vec![0.4, 0.55, 0.6]);

        let single = DistrictTally {
            totals: vec![(1, 0)],
        };
        assert_eq!(single.ranked_shares(Party::A).unwrap(), vec![1.0]);

        let zero = DistrictTally {
            totals: vec![(1, 1), (0, 0)],
        };
        assert!(matches!(
            zero.ranked_shares(Party::A),
            Err(Error::ZeroVoteDistrict { district: 2 })
        ));
    }

    #[test]
    fn uniform_vertices_give_statewide_share_everywhere() {
        let graph = DualGraph::rook_grid(2, 3);
        let election = Election::new("E", vec![3; 6], vec![2; 6]);
        let rows = Plan::from_assignment(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let t = tally(&graph, &rows, &election).unwrap();
        let statewide = election.statewide_share(Party::A).unwrap();
        for share in t.ranked_shares(Party::A).unwrap() {
            assert_eq!(share, statewide);
        }
    }

    #[test]
    fn statewide_share_values() {
        let e = Election::new("E", vec![534], vec![466]);
        assert_eq!(e.statewide_share(Party::A).unwrap(), 0.534);

        let even = Election::new("E", vec![5], vec![5]);
        assert_eq!(even.statewide_share(Party::A).unwrap(), 0.5);

        let sweep = Election::new("E", vec![10], vec![0]);
        assert_eq!(sweep.statewide_share(Party::A).unwrap(), 1.0);

        let empty = Election::new("E", vec![0], vec![0]);
        assert!(matches!(
            empty.statewide_share(Party::A),
            Err(Error::DegenerateElection)
        ));
    }
}
