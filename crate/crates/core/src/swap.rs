//! Markov chain over k:1 nested plans on a lower-house dual graph.
//!
//! A step draws two house districts (graph vertices) uniformly with
//! replacement and exchanges their upper-chamber assignments. Proposals that
//! break contiguity are rejected and redrawn inside the same step; proposals
//! that land in a single upper district are accepted as no-ops, which keeps
//! the chain lazy. A rejection guard surfaces locked states instead of
//! spinning forever: the move set is known not to be irreducible on every
//! graph.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

use crate::ensemble::{observe_step, EnsembleRecord, Observer};
use crate::error::{Error, Result};
use crate::graph::{is_connected, is_k_nested, DualGraph, NestingSpec, Plan, VertexId};

/// Run parameters for the swap chain. `steps` counts accepted steps;
/// rejected proposals are retried inside a step, bounded by
/// `max_rejections_per_step`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapConfig {
    pub steps: u64,
    pub rng_seed: u64,
    pub max_rejections_per_step: u64,
    pub nesting: NestingSpec,
}

impl SwapConfig {
    pub const DEFAULT_STEPS: u64 = 1_000_000;
    pub const DEFAULT_MAX_REJECTIONS: u64 = 100_000;

    pub fn new(steps: u64, rng_seed: u64, nesting: NestingSpec) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidConfig {
                reason: "swap chain needs at least one step".into(),
            });
        }
        Ok(SwapConfig {
            steps,
            rng_seed,
            max_rejections_per_step: Self::DEFAULT_MAX_REJECTIONS,
            nesting,
        })
    }

    pub fn with_max_rejections(mut self, guard: u64) -> Result<Self> {
        if guard == 0 {
            return Err(Error::InvalidConfig {
                reason: "rejection guard must be at least 1".into(),
            });
        }
        self.max_rejections_per_step = guard;
        Ok(self)
    }
}

/// The applied proposal of one accepted step. `changed` is false for no-op
/// steps (both vertices already shared an upper district).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapMove {
    pub first: VertexId,
    pub second: VertexId,
    pub changed: bool,
}

/// Current chain state: the graph, the nested plan, and the owned RNG
/// stream. The plan satisfies the nesting predicate at all times.
pub struct SwapState<'g> {
    graph: &'g DualGraph,
    plan: Plan,
    spec: NestingSpec,
    rng: Pcg64Mcg,
}

impl<'g> SwapState<'g> {
    pub fn new(graph: &'g DualGraph, plan: Plan, spec: NestingSpec, rng_seed: u64) -> Result<Self> {
        if !is_k_nested(graph, &plan, spec)? {
            return Err(Error::InvalidSeed {
                reason: format!("plan is not a valid {}:1 nesting", spec.arity()),
            });
        }
        Ok(SwapState {
            graph,
            plan,
            spec,
            rng: Pcg64Mcg::seed_from_u64(rng_seed),
        })
    }

    pub fn graph(&self) -> &'g DualGraph {
        self.graph
    }

    pub fn plan(&self) -> &Plan {
        &self.plan
    }

    pub fn nesting(&self) -> NestingSpec {
        self.spec
    }

    /// Two vertices drawn independently and uniformly, with replacement.
    pub fn propose_pair(&mut self) -> (VertexId, VertexId) {
        let n = self.graph.num_vertices() as u32;
        let u = VertexId(self.rng.random_range(0..n));
        let v = VertexId(self.rng.random_range(0..n));
        (u, v)
    }

    /// One accepted step: proposals are redrawn until one is acceptable.
    /// No-op proposals (pair inside one district) are accepted immediately;
    /// contiguity-breaking proposals are rejected up to `max_rejections`.
    pub fn swap_step(&mut self, max_rejections: u64) -> Result<SwapMove> {
        let mut rejections = 0u64;
        loop {
            let (u, v) = self.propose_pair();
            if self.plan.district_of(u) == self.plan.district_of(v) {
                return Ok(SwapMove {
                    first: u,
                    second: v,
                    changed: false,
                });
            }
            if is_valid_swap(self.graph, &self.plan, u, v) {
                self.plan.swap_in_place(u, v);
                return Ok(SwapMove {
                    first: u,
                    second: v,
                    changed: true,
                });
            }
            rejections += 1;
            if rejections >= max_rejections {
                return Err(Error::StuckChain { rejections });
            }
        }
    }
}

/// True iff exchanging the assignments of `u` and `v` leaves both affected
/// districts contiguous. Pairs inside a single district (including `u == v`)
/// are no-ops and always valid.
pub fn is_valid_swap(graph: &DualGraph, plan: &Plan, u: VertexId, v: VertexId) -> bool {
    let du = plan.district_of(u);
    let dv = plan.district_of(v);
    if du == dv {
        return true;
    }
    let exchange = |members: Vec<VertexId>, out: VertexId, incoming: VertexId| {
        members
            .into_iter()
            .map(|m| if m == out { incoming } else { m })
            .collect::<Vec<_>>()
    };
    let new_du = exchange(plan.district_members(du), u, v);
    let new_dv = exchange(plan.district_members(dv), v, u);
    // subsets are nonempty and in range, so these cannot fail
    is_connected(graph, &new_du).unwrap_or(false) && is_connected(graph, &new_dv).unwrap_or(false)
}

/// Streaming swap run; yields exactly `config.steps` records and is a
/// deterministic function of `(graph, initial, config)`.
pub struct SwapRun<'g> {
    state: SwapState<'g>,
    observers: Vec<Box<dyn Observer + 'g>>,
    max_rejections: u64,
    steps: u64,
    emitted: u64,
    failed: bool,
}

impl<'g> SwapRun<'g> {
    /// Plan after the most recently emitted step (the seed before any step).
    pub fn plan(&self) -> &Plan {
        self.state.plan()
    }
}

impl<'g> Iterator for SwapRun<'g> {
    type Item = Result<EnsembleRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.emitted == self.steps {
            return None;
        }
        self.emitted += 1;
        if let Err(e) = self.state.swap_step(self.max_rejections) {
            self.failed = true;
            return Some(Err(e));
        }
        let record = observe_step(
            &self.observers,
            self.state.graph,
            &self.state.plan,
            self.emitted,
        );
        if record.is_err() {
            self.failed = true;
        }
        Some(record)
    }
}

/// Starts a swap run from `initial`, which must already satisfy the nesting
/// predicate.
pub fn run_swap<'g>(
    graph: &'g DualGraph,
    initial: &Plan,
    config: &SwapConfig,
    observers: Vec<Box<dyn Observer + 'g>>,
) -> Result<SwapRun<'g>> {
    if config.steps == 0 {
        return Err(Error::InvalidConfig {
            reason: "swap chain needs at least one step".into(),
        });
    }
    let state = SwapState::new(graph, initial.clone(), config.nesting, config.rng_seed)?;
    Ok(SwapRun {
        state,
        observers,
        max_rejections: config.max_rejections_per_step,
        steps: config.steps,
        emitted: 0,
        failed: false,
    })
}
