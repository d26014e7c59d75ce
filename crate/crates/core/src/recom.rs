//! Recombination chain over unit-level plans.
//!
//! One step merges the two districts on either side of a uniformly chosen
//! cut edge, draws a random spanning tree of the merged region (random edge
//! order + Kruskal), and removes a tree edge whose two sides both land
//! within the population tolerance. Trees are redrawn on cut failure, and
//! the step is redrawn with a fresh merge pair when a pair's budget runs
//! out, all bounded by `max_tree_attempts`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

use crate::ensemble::{observe_step, EnsembleRecord, Observer};
use crate::error::{Error, Result};
use crate::graph::{
    is_contiguous_plan, population_deviation, DistrictId, DualGraph, Plan, VertexId,
};
use crate::util::Dsu;

/// Run parameters for the recombination chain.
#[derive(Debug, Clone, PartialEq)]
pub struct RecomConfig {
    pub steps: u64,
    pub rng_seed: u64,
    /// Relative population tolerance; districts stay within
    /// `epsilon * ideal` of the ideal population.
    pub epsilon: f64,
    pub max_tree_attempts: u64,
    pub num_districts: u32,
}

impl RecomConfig {
    pub const DEFAULT_EPSILON: f64 = 0.05;
    pub const DEFAULT_TREE_ATTEMPTS: u64 = 1_000;

    pub fn new(steps: u64, rng_seed: u64, num_districts: u32) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidConfig {
                reason: "recom chain needs at least one step".into(),
            });
        }
        if num_districts == 0 {
            return Err(Error::InvalidConfig {
                reason: "recom chain needs at least one district".into(),
            });
        }
        Ok(RecomConfig {
            steps,
            rng_seed,
            epsilon: Self::DEFAULT_EPSILON,
            max_tree_attempts: Self::DEFAULT_TREE_ATTEMPTS,
            num_districts,
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidConfig {
                reason: format!("epsilon {epsilon} must lie in [0, 1)"),
            });
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn with_tree_attempts(mut self, attempts: u64) -> Result<Self> {
        if attempts == 0 {
            return Err(Error::InvalidConfig {
                reason: "tree attempt budget must be at least 1".into(),
            });
        }
        self.max_tree_attempts = attempts;
        Ok(self)
    }

    fn ideal_population(&self, graph: &DualGraph) -> f64 {
        graph.total_population() as f64 / self.num_districts as f64
    }
}

/// Spanning tree of a vertex subset, stored as an explicit edge list.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    vertices: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
}

impl SpanningTree {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }
}

/// Picks the merge pair for a step: the two districts of a uniformly chosen
/// cross-district edge, so adjacent pairs are selected with probability
/// proportional to their shared boundary length.
pub fn select_merge_pair(
    graph: &DualGraph,
    plan: &Plan,
    rng: &mut impl Rng,
) -> Result<(DistrictId, DistrictId)> {
    let cut_edges: Vec<(DistrictId, DistrictId)> = graph
        .edges()
        .filter_map(|(a, b)| {
            let (da, db) = (plan.district_of(a), plan.district_of(b));
            (da != db).then_some((da.min(db), da.max(db)))
        })
        .collect();
    if cut_edges.is_empty() {
        return Err(Error::DegeneratePlan);
    }
    Ok(cut_edges[rng.random_range(0..cut_edges.len())])
}

/// Draws a random spanning tree of the induced subgraph on `subset` by
/// shuffling its edges and running Kruskal.
pub fn random_spanning_tree(
    graph: &DualGraph,
    subset: &[VertexId],
    rng: &mut impl Rng,
) -> Result<SpanningTree> {
    if subset.is_empty() {
        return Err(Error::InvalidSubset);
    }
    let n = graph.num_vertices();
    let mut local = vec![u32::MAX; n];
    let mut vertices = Vec::with_capacity(subset.len());
    for &v in subset {
        if v.index() >= n {
            return Err(Error::UnknownVertex {
                id: format!("#{}", v.0),
            });
        }
        if local[v.index()] == u32::MAX {
            local[v.index()] = vertices.len() as u32;
            vertices.push(v);
        }
    }

    let mut induced: Vec<(VertexId, VertexId)> = Vec::new();
    for &v in &vertices {
        for w in graph.neighbors(v) {
            if v < w && local[w.index()] != u32::MAX {
                induced.push((v, w));
            }
        }
    }
    induced.shuffle(rng);

    let mut dsu = Dsu::new(vertices.len());
    let mut edges = Vec::with_capacity(vertices.len() - 1);
    for &(a, b) in &induced {
        if dsu.union(local[a.index()], local[b.index()]) {
            edges.push((a, b));
            if edges.len() == vertices.len() - 1 {
                break;
            }
        }
    }
    if edges.len() != vertices.len() - 1 {
        return Err(Error::NotConnected);
    }
    Ok(SpanningTree { vertices, edges })
}

/// Among tree edges whose removal leaves both sides within
/// `epsilon * ideal` of `ideal`, returns one uniformly at random; `None`
/// when no such edge exists.
pub fn find_balanced_cut(
    tree: &SpanningTree,
    graph: &DualGraph,
    ideal: f64,
    epsilon: f64,
    rng: &mut impl Rng,
) -> Option<(VertexId, VertexId)> {
    let n = tree.vertices.len();
    if n < 2 {
        return None;
    }
    let mut local = std::collections::HashMap::with_capacity(n);
    for (i, &v) in tree.vertices.iter().enumerate() {
        local.insert(v, i as u32);
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &tree.edges {
        let (la, lb) = (local[&a], local[&b]);
        adj[la as usize].push(lb);
        adj[lb as usize].push(la);
    }

    // root at local 0, record parents in visit order
    let mut parent = vec![u32::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0u32];
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                parent[w as usize] = v;
                stack.push(w);
            }
        }
    }

    let mut subtree: Vec<f64> = tree
        .vertices
        .iter()
        .map(|&v| graph.population(v) as f64)
        .collect();
    for &v in order.iter().rev() {
        if parent[v as usize] != u32::MAX {
            subtree[parent[v as usize] as usize] += subtree[v as usize];
        }
    }
    let total = subtree[0];

    let tolerance = epsilon * ideal;
    let balanced: Vec<(VertexId, VertexId)> = order
        .iter()
        .filter(|&&v| parent[v as usize] != u32::MAX)
        .filter(|&&v| {
            let below = subtree[v as usize];
            let above = total - below;
            (below - ideal).abs() <= tolerance && (above - ideal).abs() <= tolerance
        })
        .map(|&v| {
            (
                tree.vertices[v as usize],
                tree.vertices[parent[v as usize] as usize],
            )
        })
        .collect();
    if balanced.is_empty() {
        None
    } else {
        Some(balanced[rng.random_range(0..balanced.len())])
    }
}

/// One recombination step with a fixed merge pair: retries `(tree, cut)` up
/// to `config.max_tree_attempts` times, then reports failure.
pub fn recom_step(
    graph: &DualGraph,
    plan: &Plan,
    config: &RecomConfig,
    rng: &mut impl Rng,
) -> Result<Plan> {
    let (da, db) = select_merge_pair(graph, plan, rng)?;
    let mut region = plan.district_members(da);
    region.extend(plan.district_members(db));
    let ideal = config.ideal_population(graph);

    for _ in 0..config.max_tree_attempts {
        let tree = random_spanning_tree(graph, &region, rng)?;
        if let Some((child, parent)) = find_balanced_cut(&tree, graph, ideal, config.epsilon, rng) {
            let side = tree_side(&tree, child, parent);
            let mut next = plan.clone();
            for &v in &region {
                next.set_assignment(v, db);
            }
            for v in side {
                next.set_assignment(v, da);
            }
            return Ok(next);
        }
    }
    Err(Error::StepFailed {
        attempts: config.max_tree_attempts,
    })
}

/// Vertices on `child`'s side of the tree once the edge to `parent` is cut.
fn tree_side(tree: &SpanningTree, child: VertexId, parent: VertexId) -> Vec<VertexId> {
    let mut adj: std::collections::HashMap<VertexId, Vec<VertexId>> =
        std::collections::HashMap::with_capacity(tree.vertices.len());
    for &(a, b) in &tree.edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut side = Vec::new();
    let mut stack = vec![child];
    let mut seen: std::collections::HashSet<VertexId> = [child, parent].into_iter().collect();
    while let Some(v) = stack.pop() {
        side.push(v);
        for &w in adj.get(&v).map(|v| v.as_slice()).unwrap_or(&[]) {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    side
}

/// A step with the run-level retry policy: on a pair whose budget runs out,
/// redraw a fresh merge pair, bounded by the same guard.
pub fn recom_step_with_retry(
    graph: &DualGraph,
    plan: &Plan,
    config: &RecomConfig,
    rng: &mut impl Rng,
) -> Result<Plan> {
    let mut last = Error::StepFailed {
        attempts: config.max_tree_attempts,
    };
    for _ in 0..config.max_tree_attempts {
        match recom_step(graph, plan, config, rng) {
            Ok(next) => return Ok(next),
            Err(e @ Error::StepFailed { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Streaming recombination run; yields exactly `config.steps` records and is
/// a deterministic function of `(graph, initial, config)`.
pub struct RecomRun<'g> {
    graph: &'g DualGraph,
    plan: Plan,
    config: RecomConfig,
    rng: Pcg64Mcg,
    observers: Vec<Box<dyn Observer + 'g>>,
    emitted: u64,
    failed: bool,
}

impl<'g> RecomRun<'g> {
    pub fn plan(&self) -> &Plan {
        &self.plan
    }
}

impl<'g> Iterator for RecomRun<'g> {
    type Item = Result<EnsembleRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.emitted == self.config.steps {
            return None;
        }
        self.emitted += 1;
        match recom_step_with_retry(self.graph, &self.plan, &self.config, &mut self.rng) {
            Ok(next) => self.plan = next,
            Err(e) => {
                self.failed = true;
                return Some(Err(e));
            }
        }
        let record = observe_step(&self.observers, self.graph, &self.plan, self.emitted);
        if record.is_err() {
            self.failed = true;
        }
        Some(record)
    }
}

/// Starts a recombination run from `initial`, which must be contiguous,
/// match `config.num_districts`, and sit within the population tolerance.
pub fn run_recom<'g>(
    graph: &'g DualGraph,
    initial: &Plan,
    config: &RecomConfig,
    observers: Vec<Box<dyn Observer + 'g>>,
) -> Result<RecomRun<'g>> {
    if initial.num_districts() != config.num_districts {
        return Err(Error::InvalidSeed {
            reason: format!(
                "plan has {} districts, config expects {}",
                initial.num_districts(),
                config.num_districts
            ),
        });
    }
    if !is_contiguous_plan(graph, initial)? {
        return Err(Error::InvalidSeed {
            reason: "plan has a disconnected district".into(),
        });
    }
    let deviation = population_deviation(graph, initial)?;
    if deviation > config.epsilon {
        return Err(Error::InvalidSeed {
            reason: format!(
                "population deviation {deviation:.4} exceeds epsilon {}",
                config.epsilon
            ),
        });
    }
    Ok(RecomRun {
        graph,
        plan: initial.clone(),
        config: config.clone(),
        rng: Pcg64Mcg::seed_from_u64(config.rng_seed),
        observers,
        emitted: 0,
        failed: false,
    })
}
