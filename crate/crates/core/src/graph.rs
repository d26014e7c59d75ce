//! Dual-graph and districting-plan data model.
//!
//! A [`DualGraph`] holds the adjacency structure of geographic units
//! (precincts, wards, or lower-house districts) together with per-unit
//! populations and election tallies. A [`Plan`] assigns every unit to a
//! district. Values are immutable once built and safe to share across
//! threads; the operations here are pure functions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::election::Election;
use crate::error::{Error, Result};
use crate::util::fnv1a64;

/// Dense index of a unit (vertex) in a [`DualGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Dense index of a district within a [`Plan`].
///
/// Internally districts are `0..n`; files and diagnostics use the 1-based
/// [`DistrictId::label`] form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DistrictId(pub u32);

impl DistrictId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// 1-based label used in plan files and error messages.
    pub fn label(self) -> u32 {
        self.0 + 1
    }
}

/// Arity of the nesting rule: upper-chamber districts are unions of exactly
/// `arity` adjacent lower-chamber districts. The default is 3 (the Ohio and
/// Wisconsin rule); 2 matches the pairing rule used in several other states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NestingSpec {
    arity: u32,
}

impl NestingSpec {
    pub fn new(arity: u32) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidConfig {
                reason: "nesting arity must be at least 1".into(),
            });
        }
        Ok(NestingSpec { arity })
    }

    pub fn arity(self) -> u32 {
        self.arity
    }
}

impl Default for NestingSpec {
    fn default() -> Self {
        NestingSpec { arity: 3 }
    }
}

/// Undirected dual graph over named units.
///
/// Construction validates the structural invariants once: unique vertex ids,
/// edges between declared vertices, no self-loops or duplicate edges, and
/// global connectivity (disconnected inputs are rejected outright since every
/// chain assumes a connected substrate).
#[derive(Debug, Clone)]
pub struct DualGraph {
    ids: Vec<String>,
    index: HashMap<String, u32>,
    pops: Vec<u64>,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
    elections: BTreeMap<String, Election>,
}

impl DualGraph {
    /// Builds a graph from `(id, population)` pairs and an edge list of id
    /// pairs.
    pub fn new(vertices: Vec<(String, u64)>, edges: Vec<(String, String)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut ids = Vec::with_capacity(vertices.len());
        let mut pops = Vec::with_capacity(vertices.len());
        let mut index = HashMap::with_capacity(vertices.len());
        for (name, pop) in vertices {
            if index.contains_key(&name) {
                return Err(Error::DuplicateVertex { id: name });
            }
            index.insert(name.clone(), ids.len() as u32);
            ids.push(name);
            pops.push(pop);
        }

        let mut seen = BTreeSet::new();
        let mut norm_edges = Vec::with_capacity(edges.len());
        for (a, b) in &edges {
            let ia = *index
                .get(a)
                .ok_or_else(|| Error::UnknownVertex { id: a.clone() })?;
            let ib = *index
                .get(b)
                .ok_or_else(|| Error::UnknownVertex { id: b.clone() })?;
            if ia == ib {
                return Err(Error::SelfLoop { id: a.clone() });
            }
            let key = (ia.min(ib), ia.max(ib));
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
            norm_edges.push(key);
        }
        norm_edges.sort_unstable();

        let mut adj = vec![Vec::new(); ids.len()];
        for &(a, b) in &norm_edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }

        let graph = DualGraph {
            ids,
            index,
            pops,
            edges: norm_edges,
            adj,
            elections: BTreeMap::new(),
        };
        let comps = graph.component_sizes();
        if comps.len() > 1 {
            return Err(Error::DisconnectedGraph {
                component_sizes: comps,
            });
        }
        Ok(graph)
    }

    /// Attaches an election; its vote vectors must cover every vertex.
    pub fn add_election(&mut self, election: Election) -> Result<()> {
        if election.num_vertices() != self.num_vertices() {
            let missing = election.num_vertices().min(self.num_vertices());
            return Err(Error::IncompleteElection {
                election: election.name().to_string(),
                vertex: self
                    .ids
                    .get(missing)
                    .cloned()
                    .unwrap_or_else(|| format!("#{missing}")),
            });
        }
        self.elections.insert(election.name().to_string(), election);
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.ids.len() as u32).map(VertexId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.ids[v.index()]
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).map(|&i| VertexId(i))
    }

    pub fn population(&self, v: VertexId) -> u64 {
        self.pops[v.index()]
    }

    pub fn total_population(&self) -> u64 {
        self.pops.iter().sum()
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v.index()].iter().map(|&i| VertexId(i))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v.index()].len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().map(|&(a, b)| (VertexId(a), VertexId(b)))
    }

    pub fn elections(&self) -> impl Iterator<Item = &Election> {
        self.elections.values()
    }

    pub fn election(&self, name: &str) -> Result<&Election> {
        self.elections
            .get(name)
            .ok_or_else(|| Error::UnknownElection { name: name.into() })
    }

    pub fn election_names(&self) -> Vec<String> {
        self.elections.keys().cloned().collect()
    }

    /// Rook-adjacency grid with unit populations; vertex `(r, c)` is named
    /// `"r-c"`. Handy for tests and toy experiments.
    pub fn rook_grid(rows: usize, cols: usize) -> DualGraph {
        let name = |r: usize, c: usize| format!("{r}-{c}");
        let mut vertices = Vec::with_capacity(rows * cols);
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                vertices.push((name(r, c), 1));
                if c + 1 < cols {
                    edges.push((name(r, c), name(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((name(r, c), name(r + 1, c)));
                }
            }
        }
        DualGraph::new(vertices, edges).expect("grid is always a valid graph")
    }

    /// Path graph on `n` vertices named `"0".."n-1"`, unit populations.
    pub fn path_graph(n: usize) -> DualGraph {
        let vertices = (0..n).map(|i| (i.to_string(), 1)).collect();
        let edges = (1..n)
            .map(|i| ((i - 1).to_string(), i.to_string()))
            .collect();
        DualGraph::new(vertices, edges).expect("path is always a valid graph")
    }

    fn component_sizes(&self) -> Vec<usize> {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start as u32);
            let mut size = 0usize;
            while let Some(v) = stack.pop() {
                size += 1;
                for &w in &self.adj[v as usize] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
            sizes.push(size);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

/// Assignment of every vertex to one of `num_districts` districts.
///
/// Every district index in `0..num_districts` is nonempty; this is checked at
/// construction so downstream code can rely on it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Plan {
    assignment: Vec<u32>,
    num_districts: u32,
}

impl Plan {
    /// Builds a plan from a dense assignment (vertex index -> district index).
    pub fn from_assignment(assignment: Vec<u32>, num_districts: u32) -> Result<Self> {
        if num_districts == 0 {
            return Err(Error::InvalidConfig {
                reason: "a plan needs at least one district".into(),
            });
        }
        let mut counts = vec![0u64; num_districts as usize];
        for &d in &assignment {
            if d >= num_districts {
                return Err(Error::DistrictOutOfRange {
                    label: d + 1,
                    num_districts,
                });
            }
            counts[d as usize] += 1;
        }
        if let Some(empty) = counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyDistrict {
                district: empty as u32 + 1,
            });
        }
        Ok(Plan {
            assignment,
            num_districts,
        })
    }

    /// Builds a plan from explicit district vertex sets covering `0..num_vertices`.
    pub fn from_district_sets(num_vertices: usize, sets: &[Vec<VertexId>]) -> Result<Self> {
        let mut assignment = vec![u32::MAX; num_vertices];
        for (d, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::EmptyDistrict {
                    district: d as u32 + 1,
                });
            }
            for &v in set {
                if v.index() >= num_vertices {
                    return Err(Error::UnknownVertex {
                        id: format!("#{}", v.0),
                    });
                }
                if assignment[v.index()] != u32::MAX {
                    return Err(Error::DuplicateVertex {
                        id: format!("#{}", v.0),
                    });
                }
                assignment[v.index()] = d as u32;
            }
        }
        if let Some(missing) = assignment.iter().position(|&d| d == u32::MAX) {
            return Err(Error::UnassignedVertex {
                id: format!("#{missing}"),
            });
        }
        Plan::from_assignment(assignment, sets.len() as u32)
    }

    /// The one-district plan over `n` vertices.
    pub fn single_district(num_vertices: usize) -> Plan {
        Plan {
            assignment: vec![0; num_vertices],
            num_districts: 1,
        }
    }

    pub fn num_districts(&self) -> u32 {
        self.num_districts
    }

    pub fn num_vertices(&self) -> usize {
        self.assignment.len()
    }

    pub fn district_of(&self, v: VertexId) -> DistrictId {
        DistrictId(self.assignment[v.index()])
    }

    pub fn assignments(&self) -> impl Iterator<Item = (VertexId, DistrictId)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .map(|(i, &d)| (VertexId(i as u32), DistrictId(d)))
    }

    pub fn district_members(&self, d: DistrictId) -> Vec<VertexId> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a == d.0)
            .map(|(i, _)| VertexId(i as u32))
            .collect()
    }

    /// All districts as vertex sets, indexed by district.
    pub fn districts(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.num_districts as usize];
        for (i, &d) in self.assignment.iter().enumerate() {
            out[d as usize].push(VertexId(i as u32));
        }
        out
    }

    pub fn district_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_districts as usize];
        for &d in &self.assignment {
            sizes[d as usize] += 1;
        }
        sizes
    }

    /// Copy of this plan with the assignments of `u` and `v` exchanged.
    pub fn with_swapped(&self, u: VertexId, v: VertexId) -> Plan {
        let mut plan = self.clone();
        plan.assignment.swap(u.index(), v.index());
        plan
    }

    pub(crate) fn swap_in_place(&mut self, u: VertexId, v: VertexId) {
        self.assignment.swap(u.index(), v.index());
    }

    pub(crate) fn set_assignment(&mut self, v: VertexId, d: DistrictId) {
        self.assignment[v.index()] = d.0;
    }

    /// Label-free canonical form: district labels renumbered by first
    /// appearance in vertex order (a restricted growth string).
    pub fn canonical_key(&self) -> Vec<u32> {
        let mut relabel = vec![u32::MAX; self.num_districts as usize];
        let mut next = 0u32;
        let mut key = Vec::with_capacity(self.assignment.len());
        for &d in &self.assignment {
            if relabel[d as usize] == u32::MAX {
                relabel[d as usize] = next;
                next += 1;
            }
            key.push(relabel[d as usize]);
        }
        key
    }

    /// Plan with districts relabeled to canonical (first-appearance) order.
    pub fn relabel_canonical(&self) -> Plan {
        Plan {
            assignment: self.canonical_key(),
            num_districts: self.num_districts,
        }
    }

    /// Stable, label-invariant digest of the partition.
    pub fn digest(&self) -> String {
        let key = self.canonical_key();
        let mut bytes = Vec::with_capacity(key.len() * 4);
        for d in key {
            bytes.extend_from_slice(&d.to_le_bytes());
        }
        format!("{:016x}", fnv1a64(&bytes))
    }
}

fn check_plan(graph: &DualGraph, plan: &Plan) -> Result<()> {
    if plan.num_vertices() != graph.num_vertices() {
        return Err(Error::PlanGraphMismatch {
            expected: graph.num_vertices(),
            actual: plan.num_vertices(),
        });
    }
    Ok(())
}

/// True iff the induced subgraph on `subset` is connected. Duplicate entries
/// are tolerated (set semantics).
pub fn is_connected(graph: &DualGraph, subset: &[VertexId]) -> Result<bool> {
    if subset.is_empty() {
        return Err(Error::InvalidSubset);
    }
    let n = graph.num_vertices();
    let mut member = vec![false; n];
    let mut distinct = 0usize;
    for &v in subset {
        if v.index() >= n {
            return Err(Error::UnknownVertex {
                id: format!("#{}", v.0),
            });
        }
        if !member[v.index()] {
            member[v.index()] = true;
            distinct += 1;
        }
    }
    Ok(connected_within(graph, &member, subset[0], distinct))
}

/// BFS restricted to `member`; true iff `distinct` vertices are reached
/// from `start`.
fn connected_within(graph: &DualGraph, member: &[bool], start: VertexId, distinct: usize) -> bool {
    let mut seen = vec![false; member.len()];
    let mut stack = vec![start.0];
    seen[start.index()] = true;
    let mut reached = 0usize;
    while let Some(v) = stack.pop() {
        reached += 1;
        for &w in &graph.adj[v as usize] {
            if member[w as usize] && !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    reached == distinct
}

/// True iff every district of `plan` induces a connected subgraph.
pub fn is_contiguous_plan(graph: &DualGraph, plan: &Plan) -> Result<bool> {
    check_plan(graph, plan)?;
    for members in plan.districts() {
        if !is_connected(graph, &members)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff every district has exactly `spec.arity()` vertices and is
/// contiguous.
pub fn is_k_nested(graph: &DualGraph, plan: &Plan, spec: NestingSpec) -> Result<bool> {
    check_plan(graph, plan)?;
    let arity = spec.arity() as usize;
    for members in plan.districts() {
        if members.len() != arity || !is_connected(graph, &members)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Maximum relative deviation of any district population from the ideal
/// (total population divided by the number of districts).
pub fn population_deviation(graph: &DualGraph, plan: &Plan) -> Result<f64> {
    check_plan(graph, plan)?;
    let total = graph.total_population();
    if total == 0 {
        return Err(Error::DegeneratePopulation);
    }
    let mut sums = vec![0u64; plan.num_districts() as usize];
    for (v, d) in plan.assignments() {
        sums[d.index()] += graph.population(v);
    }
    let ideal = total as f64 / plan.num_districts() as f64;
    Ok(sums
        .iter()
        .map(|&s| (s as f64 - ideal).abs() / ideal)
        .fold(0.0, f64::max))
}

/// Collapses a contiguous plan into its district-level graph: one vertex per
/// district (named by its 1-based label), an edge wherever any cross-district
/// edge exists, populations and election tallies summed per district.
pub fn quotient_graph(graph: &DualGraph, plan: &Plan) -> Result<DualGraph> {
    check_plan(graph, plan)?;
    for (d, members) in plan.districts().iter().enumerate() {
        if !is_connected(graph, members)? {
            return Err(Error::NotContiguous {
                district: d as u32 + 1,
            });
        }
    }

    let n = plan.num_districts() as usize;
    let mut pops = vec![0u64; n];
    for (v, d) in plan.assignments() {
        pops[d.index()] += graph.population(v);
    }
    let vertices: Vec<(String, u64)> = (0..n)
        .map(|d| ((d as u32 + 1).to_string(), pops[d]))
        .collect();

    let mut cross = BTreeSet::new();
    for (a, b) in graph.edges() {
        let (da, db) = (plan.district_of(a), plan.district_of(b));
        if da != db {
            cross.insert((da.0.min(db.0), da.0.max(db.0)));
        }
    }
    let edges: Vec<(String, String)> = cross
        .into_iter()
        .map(|(a, b)| ((a + 1).to_string(), (b + 1).to_string()))
        .collect();

    let mut quotient = DualGraph::new(vertices, edges)?;
    for election in graph.elections() {
        let mut a = vec![0u64; n];
        let mut b = vec![0u64; n];
        for (v, d) in plan.assignments() {
            let (va, vb) = election.votes(v);
            a[d.index()] += va;
            b[d.index()] += vb;
        }
        quotient.add_election(Election::new(election.name(), a, b))?;
    }
    Ok(quotient)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vid(i: u32) -> VertexId {
        VertexId(i)
    }

    fn grid_vertex(graph: &DualGraph, r: usize, c: usize) -> VertexId {
        graph.vertex_id(&format!("{r}-{c}")).unwrap()
    }

    #[test]
    fn rejects_malformed_graphs() {
        let dup = DualGraph::new(
            vec![("a".into(), 1), ("a".into(), 1)],
            vec![("a".into(), "a".into())],
        );
        assert!(matches!(dup, Err(Error::DuplicateVertex { .. })));

        let unknown = DualGraph::new(
            vec![("a".into(), 1), ("b".into(), 1)],
            vec![("a".into(), "c".into())],
        );
        assert!(matches!(unknown, Err(Error::UnknownVertex { .. })));

        let self_loop = DualGraph::new(
            vec![("a".into(), 1), ("b".into(), 1)],
            vec![("a".into(), "b".into()), ("a".into(), "a".into())],
        );
        assert!(matches!(self_loop, Err(Error::SelfLoop { .. })));

        let dup_edge = DualGraph::new(
            vec![("a".into(), 1), ("b".into(), 1)],
            vec![("a".into(), "b".into()), ("b".into(), "a".into())],
        );
        assert!(matches!(dup_edge, Err(Error::DuplicateEdge { .. })));

        let disconnected = DualGraph::new(
            vec![("a".into(), 1), ("b".into(), 1), ("c".into(), 1)],
            vec![("a".into(), "b".into())],
        );
        match disconnected {
            Err(Error::DisconnectedGraph { component_sizes }) => {
                assert_eq!(component_sizes, vec![2, 1]);
            }
            other => panic!("expected DisconnectedGraph, got {other:?}"),
        }

        assert!(matches!(
            DualGraph::new(vec![], vec![]),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn connectivity_on_paths() {
        let path = DualGraph::path_graph(3);
        // endpoints of a path with the middle removed
        assert!(!is_connected(&path, &[vid(0), vid(2)]).unwrap());
        assert!(is_connected(&path, &[vid(0), vid(1)]).unwrap());
        assert!(is_connected(&path, &[vid(1)]).unwrap());
        assert!(matches!(
            is_connected(&path, &[]),
            Err(Error::InvalidSubset)
        ));
        assert!(matches!(
            is_connected(&path, &[vid(9)]),
            Err(Error::UnknownVertex { .. })
        ));
    }

    #[test]
    fn contiguity_of_plans() {
        let grid = DualGraph::rook_grid(2, 3);
        // rows 0-0,0-1,0-2 / 1-0,1-1,1-2
        let rows = Plan::from_district_sets(
            6,
            &[
                vec![
                    grid_vertex(&grid, 0, 0),
                    grid_vertex(&grid, 0, 1),
                    grid_vertex(&grid, 0, 2),
                ],
                vec![
                    grid_vertex(&grid, 1, 0),
                    grid_vertex(&grid, 1, 1),
                    grid_vertex(&grid, 1, 2),
                ],
            ],
        )
        .unwrap();
        assert!(is_contiguous_plan(&grid, &rows).unwrap());

        // checkerboard split disconnects
        let checker = Plan::from_district_sets(
            6,
            &[
                vec![
                    grid_vertex(&grid, 0, 0),
                    grid_vertex(&grid, 0, 2),
                    grid_vertex(&grid, 1, 1),
                ],
                vec![
                    grid_vertex(&grid, 0, 1),
                    grid_vertex(&grid, 1, 0),
                    grid_vertex(&grid, 1, 2),
                ],
            ],
        )
        .unwrap();
        assert!(!is_contiguous_plan(&grid, &checker).unwrap());

        // whole-graph plan is connected for any loaded graph
        assert!(is_contiguous_plan(&grid, &Plan::single_district(6)).unwrap());

        let mismatch = is_contiguous_plan(&grid, &Plan::single_district(4));
        assert!(matches!(mismatch, Err(Error::PlanGraphMismatch { .. })));
    }

    #[test]
    fn nesting_checks() {
        let grid = DualGraph::rook_grid(2, 3);
        let k3 = NestingSpec::new(3).unwrap();
        let rows = Plan::from_assignment(
            grid.vertices()
                .map(|v| {
                    if grid.vertex_name(v).starts_with('0') {
                        0
                    } else {
                        1
                    }
                })
                .collect(),
            2,
        )
        .unwrap();
        assert!(is_k_nested(&grid, &rows, k3).unwrap());

        let lopsided = Plan::from_assignment(vec![0, 0, 1, 1, 1, 1], 2).unwrap();
        assert!(!is_k_nested(&grid, &lopsided, k3).unwrap());

        let triangle = DualGraph::new(
            vec![("a".into(), 1), ("b".into(), 1), ("c".into(), 1)],
            vec![
                ("a".into(), "b".into()),
                ("b".into(), "c".into()),
                ("a".into(), "c".into()),
            ],
        )
        .unwrap();
        assert!(is_k_nested(&triangle, &Plan::single_district(3), k3).unwrap());
    }

    #[test]
    fn nesting_implies_contiguity_and_size() {
        let grid = DualGraph::rook_grid(3, 3);
        let k3 = NestingSpec::new(3).unwrap();
        let rows = Plan::from_assignment(vec![0, 0, 0, 1, 1, 1, 2, 2, 2], 3).unwrap();
        assert!(is_k_nested(&grid, &rows, k3).unwrap());
        assert!(is_contiguous_plan(&grid, &rows).unwrap());
        assert!(rows.district_sizes().iter().all(|&s| s == 3));
    }

    #[test]
    fn population_deviation_cases() {
        let path = DualGraph::path_graph(4);
        let halves = Plan::from_assignment(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(population_deviation(&path, &halves).unwrap(), 0.0);

        let two = DualGraph::new(
            vec![("a".into(), 3), ("b".into(), 1)],
            vec![("a".into(), "b".into())],
        )
        .unwrap();
        let singletons = Plan::from_assignment(vec![0, 1], 2).unwrap();
        assert_eq!(population_deviation(&two, &singletons).unwrap(), 0.5);

        let lopsided = Plan::from_assignment(vec![0, 0, 0, 1], 2).unwrap();
        assert_eq!(population_deviation(&path, &lopsided).unwrap(), 0.5);

        let zero = DualGraph::new(
            vec![("a".into(), 0), ("b".into(), 0)],
            vec![("a".into(), "b".into())],
        )
        .unwrap();
        assert!(matches!(
            population_deviation(&zero, &singletons),
            Err(Error::DegeneratePopulation)
        ));
    }

    #[test]
    fn deviation_is_label_invariant() {
        let path = DualGraph::path_graph(4);
        let a = Plan::from_assignment(vec![0, 0, 0, 1], 2).unwrap();
        let b = Plan::from_assignment(vec![1, 1, 1, 0], 2).unwrap();
        assert_eq!(
            population_deviation(&path, &a).unwrap(),
            population_deviation(&path, &b).unwrap()
        );
    }

    #[test]
    fn quotient_of_grid_rows() {
        let grid = DualGraph::rook_grid(2, 3);
        let rows = Plan::from_assignment(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let q = quotient_graph(&grid, &rows).unwrap();
        assert_eq!(q.num_vertices(), 2);
        assert_eq!(q.num_edges(), 1);
        assert_eq!(q.population(vid(0)), 3);
        assert_eq!(q.population(vid(1)), 3);

        let path = DualGraph::path_graph(4);
        let halves = Plan::from_assignment(vec![0, 0, 1, 1], 2).unwrap();
        let q2 = quotient_graph(&path, &halves).unwrap();
        assert_eq!((q2.num_vertices(), q2.num_edges()), (2, 1));
    }

    #[test]
    fn quotient_of_3x3_rows_is_a_path() {
        let grid = DualGraph::rook_grid(3, 3);
        let rows = Plan::from_assignment(vec![0, 0, 0, 1, 1, 1, 2, 2, 2], 3).unwrap();
        let q = quotient_graph(&grid, &rows).unwrap();
        assert_eq!(q.num_vertices(), 3);
        assert_eq!(q.num_edges(), 2);
        // top row touches only the middle row
        let ends: Vec<usize> = q.vertices().map(|v| q.degree(v)).collect();
        assert_eq!(ends, vec![1, 2, 1]);
    }

    #[test]
    fn quotient_rejects_disconnected_districts() {
        let path = DualGraph::path_graph(4);
        let split = Plan::from_assignment(vec![0, 1, 0, 1], 2).unwrap();
        assert!(matches!(
            quotient_graph(&path, &split),
            Err(Error::NotContiguous { .. })
        ));
    }

    #[test]
    fn quotient_conserves_population_and_votes() {
        let mut grid = DualGraph::rook_grid(2, 3);
        grid.add_election(Election::new(
            "E1",
            vec![1, 2, 3, 4, 5, 6],
            vec![6, 5, 4, 3, 2, 1],
        ))
        .unwrap();
        let rows = Plan::from_assignment(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let q = quotient_graph(&grid, &rows).unwrap();
        assert_eq!(q.total_population(), grid.total_population());
        let (qa, qb) = (q.election("E1").unwrap(), grid.election("E1").unwrap());
        assert_eq!(
            qa.total(crate::election::Party::A),
            qb.total(crate::election::Party::A)
        );
        assert_eq!(
            qa.total(crate::election::Party::B),
            qb.total(crate::election::Party::B)
        );
    }

    #[test]
    fn plan_construction_errors() {
        assert!(matches!(
            Plan::from_assignment(vec![0, 2], 2),
            Err(Error::DistrictOutOfRange { .. })
        ));
        assert!(matches!(
            Plan::from_assignment(vec![0, 0], 2),
            Err(Error::EmptyDistrict { .. })
        ));
    }

    #[test]
    fn digest_is_label_invariant() {
        let a = Plan::from_assignment(vec![0, 0, 1, 1], 2).unwrap();
        let b = Plan::from_assignment(vec![1, 1, 0, 0], 2).unwrap();
        let c = Plan::from_assignment(vec![0, 1, 0, 1], 2).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
    }
}
