//! Exhaustive enumeration and reachability oracles for small instances.
//!
//! Connected k-partition is NP-complete in general, so every entry point is
//! guarded by a vertex limit and works over u64 bitmasks. The search assigns
//! the lowest unassigned vertex to a fresh district, enumerates connected
//! extensions of exact size, and prunes whenever a leftover component's size
//! stops being a multiple of the district size. Districts therefore come out
//! in canonical (minimum-vertex) order, and each partition is produced
//! exactly once.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{DualGraph, NestingSpec, Plan, VertexId};
use crate::swap::is_valid_swap;

/// Default vertex guard for nesting enumeration.
pub const DEFAULT_NESTING_LIMIT: usize = 30;
/// Default vertex guard for exact-size partition enumeration.
pub const DEFAULT_PARTITION_LIMIT: usize = 40;
/// Hard cap imposed by the bitmask representation.
const BITMASK_LIMIT: usize = 64;

struct BitGraph {
    n: usize,
    neighbors: Vec<u64>,
}

impl BitGraph {
    fn new(graph: &DualGraph) -> BitGraph {
        let n = graph.num_vertices();
        debug_assert!(n <= BITMASK_LIMIT);
        let mut neighbors = vec![0u64; n];
        for (a, b) in graph.edges() {
            neighbors[a.index()] |= 1 << b.0;
            neighbors[b.index()] |= 1 << a.0;
        }
        BitGraph { n, neighbors }
    }

    fn full_mask(&self) -> u64 {
        if self.n == BITMASK_LIMIT {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Neighborhood of a whole set, restricted to `within`.
    fn frontier(&self, set: u64, within: u64) -> u64 {
        let mut out = 0u64;
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= self.neighbors[v];
        }
        out & within & !set
    }

    /// True iff every connected component of `mask` has size divisible by `k`.
    fn components_divisible(&self, mask: u64, k: usize) -> bool {
        let mut rest = mask;
        while rest != 0 {
            let seed = 1u64 << rest.trailing_zeros();
            let mut comp = seed;
            loop {
                let grow = self.frontier(comp, rest);
                if grow == 0 {
                    break;
                }
                comp |= grow;
            }
            if !(comp.count_ones() as usize).is_multiple_of(k) {
                return false;
            }
            rest &= !comp;
        }
        true
    }
}

/// Enumerates connected subsets of `allowed` of exactly `size` vertices that
/// contain `root`. Each subset is emitted exactly once: candidates are
/// consumed in ascending order, and a vertex skipped at one branch stays
/// banned in every later branch of that level and below.
struct SubsetSearch<'a> {
    bg: &'a BitGraph,
    size: usize,
    allowed: u64,
    out: Vec<u64>,
}

impl SubsetSearch<'_> {
    fn run(bg: &BitGraph, root: usize, size: usize, allowed: u64) -> Vec<u64> {
        let root_bit = 1u64 << root;
        let mut search = SubsetSearch {
            bg,
            size,
            allowed,
            out: Vec::new(),
        };
        if size == 1 {
            search.out.push(root_bit);
        } else {
            search.extend(root_bit, 1, bg.neighbors[root] & allowed & !root_bit, 0);
        }
        search.out
    }

    fn extend(&mut self, current: u64, count: usize, ext: u64, banned: u64) {
        if count == self.size {
            self.out.push(current);
            return;
        }
        let mut ext = ext;
        let mut banned = banned;
        while ext != 0 {
            let u = ext.trailing_zeros() as usize;
            let ubit = 1u64 << u;
            ext &= !ubit;
            let grown = current | ubit;
            let new_ext = (ext | self.bg.neighbors[u]) & self.allowed & !grown & !banned;
            self.extend(grown, count + 1, new_ext, banned);
            banned |= ubit;
        }
    }
}

/// Depth-first generation of all partitions into connected districts of
/// exactly `size` vertices, visiting each once in canonical order.
fn for_each_partition(bg: &BitGraph, size: usize, visit: &mut impl FnMut(&[u64])) {
    fn descend(
        bg: &BitGraph,
        size: usize,
        unassigned: u64,
        acc: &mut Vec<u64>,
        visit: &mut impl FnMut(&[u64]),
    ) {
        if unassigned == 0 {
            visit(acc);
            return;
        }
        let root = unassigned.trailing_zeros() as usize;
        for district in SubsetSearch::run(bg, root, size, unassigned) {
            let rest = unassigned & !district;
            if rest != 0 && !bg.components_divisible(rest, size) {
                continue;
            }
            acc.push(district);
            descend(bg, size, rest, acc, visit);
            acc.pop();
        }
    }

    let mut acc = Vec::new();
    descend(bg, size, bg.full_mask(), &mut acc, visit);
}

fn masks_to_plan(num_vertices: usize, masks: &[u64]) -> Plan {
    let mut assignment = vec![0u32; num_vertices];
    for (d, &mask) in masks.iter().enumerate() {
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            assignment[v] = d as u32;
        }
    }
    Plan::from_assignment(assignment, masks.len() as u32).expect("masks partition the vertex set")
}

fn check_guard(graph: &DualGraph, limit: usize) -> Result<()> {
    let n = graph.num_vertices();
    if n > limit.min(BITMASK_LIMIT) {
        return Err(Error::TooLarge {
            vertices: n,
            limit: limit.min(BITMASK_LIMIT),
        });
    }
    Ok(())
}

/// All partitions of the graph into connected districts of exactly
/// `spec.arity()` vertices, under the default guard.
pub fn enumerate_nestings(graph: &DualGraph, spec: NestingSpec) -> Result<Vec<Plan>> {
    enumerate_nestings_with_limit(graph, spec, DEFAULT_NESTING_LIMIT)
}

pub fn enumerate_nestings_with_limit(
    graph: &DualGraph,
    spec: NestingSpec,
    max_vertices: usize,
) -> Result<Vec<Plan>> {
    check_guard(graph, max_vertices)?;
    let n = graph.num_vertices();
    let arity = spec.arity() as usize;
    if !n.is_multiple_of(arity) {
        return Err(Error::NoNestingExists {
            vertices: n,
            arity: spec.arity(),
        });
    }
    let bg = BitGraph::new(graph);
    let mut plans = Vec::new();
    for_each_partition(&bg, arity, &mut |masks| plans.push(masks_to_plan(n, masks)));
    Ok(plans)
}

/// Count-only variant of [`enumerate_nestings`]; does not materialize plans.
pub fn count_nestings(graph: &DualGraph, spec: NestingSpec, max_vertices: usize) -> Result<u64> {
    check_guard(graph, max_vertices)?;
    let n = graph.num_vertices();
    let arity = spec.arity() as usize;
    if !n.is_multiple_of(arity) {
        return Err(Error::NoNestingExists {
            vertices: n,
            arity: spec.arity(),
        });
    }
    let bg = BitGraph::new(graph);
    let mut count = 0u64;
    for_each_partition(&bg, arity, &mut |_| count += 1);
    Ok(count)
}

/// All partitions into `num_districts` connected districts of exactly `size`
/// vertices each, under the default guard. District labels are canonical
/// (ordered by minimum vertex), so each partition appears exactly once.
pub fn enumerate_balanced_partitions(
    graph: &DualGraph,
    num_districts: u32,
    size: u32,
) -> Result<Vec<Plan>> {
    enumerate_balanced_partitions_with_limit(graph, num_districts, size, DEFAULT_PARTITION_LIMIT)
}

pub fn enumerate_balanced_partitions_with_limit(
    graph: &DualGraph,
    num_districts: u32,
    size: u32,
    max_vertices: usize,
) -> Result<Vec<Plan>> {
    check_partition_args(graph, num_districts, size, max_vertices)?;
    let bg = BitGraph::new(graph);
    let n = graph.num_vertices();
    let mut plans = Vec::new();
    for_each_partition(&bg, size as usize, &mut |masks| {
        plans.push(masks_to_plan(n, masks))
    });
    Ok(plans)
}

/// Count-only variant of [`enumerate_balanced_partitions`].
pub fn count_balanced_partitions(
    graph: &DualGraph,
    num_districts: u32,
    size: u32,
    max_vertices: usize,
) -> Result<u64> {
    check_partition_args(graph, num_districts, size, max_vertices)?;
    let bg = BitGraph::new(graph);
    let mut count = 0u64;
    for_each_partition(&bg, size as usize, &mut |_| count += 1);
    Ok(count)
}

fn check_partition_args(
    graph: &DualGraph,
    num_districts: u32,
    size: u32,
    max_vertices: usize,
) -> Result<()> {
    check_guard(graph, max_vertices)?;
    let n = graph.num_vertices();
    if size == 0 || num_districts == 0 || num_districts as usize * size as usize != n {
        return Err(Error::NoPartitionExists {
            vertices: n,
            num_districts,
            size,
        });
    }
    Ok(())
}

/// Breadth-first closure of `start` under valid non-no-op swap moves.
/// Always a subset of [`enumerate_nestings`] output; strict subsets witness
/// that the swap chain is not irreducible on the instance.
pub fn swap_reachability(graph: &DualGraph, spec: NestingSpec, start: &Plan) -> Result<Vec<Plan>> {
    swap_reachability_with_limit(graph, spec, start, DEFAULT_NESTING_LIMIT)
}

pub fn swap_reachability_with_limit(
    graph: &DualGraph,
    spec: NestingSpec,
    start: &Plan,
    max_vertices: usize,
) -> Result<Vec<Plan>> {
    check_guard(graph, max_vertices)?;
    if !crate::graph::is_k_nested(graph, start, spec)? {
        return Err(Error::InvalidSeed {
            reason: format!("plan is not a valid {}:1 nesting", spec.arity()),
        });
    }
    let n = graph.num_vertices();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut queue = VecDeque::new();
    let canonical = start.relabel_canonical();
    seen.insert(canonical.canonical_key());
    queue.push_back(canonical);
    let mut closure = Vec::new();

    while let Some(plan) = queue.pop_front() {
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                let (u, v) = (VertexId(u), VertexId(v));
                if plan.district_of(u) == plan.district_of(v) {
                    continue;
                }
                if !is_valid_swap(graph, &plan, u, v) {
                    continue;
                }
                let next = plan.with_swapped(u, v).relabel_canonical();
                if seen.insert(next.canonical_key()) {
                    queue.push_back(next);
                }
            }
        }
        closure.push(plan);
    }
    closure.sort_by_key(Plan::canonical_key);
    Ok(closure)
}
