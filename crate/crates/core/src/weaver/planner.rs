use alloc::vec;
use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::schedule::compile_schedule;
use super::validate::{predict_bridge, validate_plan};
use super::{Bridge, WeavePlan, MAX_DYNAMIC_CONNECTORS};
use crate::error::{Result, WeaveError};
use crate::floquet::FloquetSchedule;
use crate::model::{DeviceLattice, TargetGraph, WalkSpeed};
use crate::units::Frequency;

/// One attempt (phase and bridge limit) may use this fraction of the budget.
const ATTEMPT_SHARE: usize = 8;
/// Candidates kept per vertex during a restart.
const RESTART_BEAM: usize = 3;
/// Expansions per restart.
const RESTART_SLICE: usize = 20_000;

/// Planner preferences.
#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    pub allow_static: bool,
    pub allow_dynamic: bool,
    /// Let a static connector serve three or more endpoints at once.
    pub allow_hubs: bool,
    pub max_dynamic_connectors: usize,
    /// Node expansions before the search gives up.
    pub node_budget: usize,
    pub seed: u64,
    /// `omega_node - omega_connector` for new static bridges.
    pub connector_detuning: Frequency,
    /// Iterative deepening on the bridge count.
    pub minimize_bridges: bool,
    /// Randomized narrow searches tried when the exhaustive ones run out of budget.
    pub restarts: usize,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            allow_static: true,
            allow_dynamic: true,
            allow_hubs: true,
            max_dynamic_connectors: MAX_DYNAMIC_CONNECTORS,
            node_budget: 200_000,
            seed: 0,
            connector_detuning: Frequency::mhz(-200.0),
            minimize_bridges: true,
            restarts: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Role {
    Free,
    Node,
    Connector,
}

#[derive(Clone)]
struct State {
    map: Vec<Option<usize>>,
    role: Vec<Role>,
    direct: Vec<(usize, usize)>,
    bridges: Vec<Bridge>,
    /// `done[a * n + b]` for realized target edges.
    done: Vec<bool>,
}

impl State {
    fn vertex_at(&self, q: usize) -> Option<usize> {
        self.map.iter().position(|&m| m == Some(q))
    }
}

enum Outcome {
    Found(WeavePlan),
    Exhausted,
}

struct Search<'a> {
    target: &'a TargetGraph,
    device: &'a DeviceLattice,
    policy: &'a Policy,
    order: Vec<usize>,
    keys: Vec<u64>,
    dynamic: bool,
    bridge_limit: usize,
    limit_hit: bool,
    expansions: usize,
    /// Expansions left for the current attempt.
    slice_left: usize,
    /// Keep only the best few candidates per vertex.
    beam: Option<usize>,
    witness: Option<(usize, (usize, usize))>,
}

/// Places the target on the device, preferring direct couplers, then static
/// bridges, then dynamic ones.
///
/// Static-only layouts are searched first; dynamic bridges are enabled only
/// if those run out. Ties between equally good qubits are broken by keys
/// drawn from `policy.seed`, so the result is reproducible.
pub fn plan_embedding(target: &TargetGraph, device: &DeviceLattice, policy: &Policy) -> Result<WeavePlan> {
    let n = target.vertex_count();
    if n > device.qubit_count() {
        return Err(WeaveError::Capacity {
            vertices: n,
            qubits: device.qubit_count(),
        });
    }
    if policy.max_dynamic_connectors > MAX_DYNAMIC_CONNECTORS {
        return Err(WeaveError::invalid(
            "max_dynamic_connectors",
            "dynamic bridges are limited to 7 connectors",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let keys = (0..device.qubit_count()).map(|_| rng.next_u64()).collect();
    let mut search = Search {
        target,
        device,
        policy,
        order: vertex_order(target),
        keys,
        dynamic: false,
        bridge_limit: 0,
        limit_hit: false,
        expansions: 0,
        slice_left: 0,
        beam: None,
        witness: None,
    };

    let fresh = || State {
        map: vec![None; n],
        role: vec![Role::Free; device.qubit_count()],
        direct: Vec::new(),
        bridges: Vec::new(),
        done: vec![false; n * n],
    };
    let slice = (policy.node_budget / ATTEMPT_SHARE).max(1);

    let mut phases = Vec::new();
    if policy.allow_static || !policy.allow_dynamic {
        phases.push(false);
    }
    if policy.allow_dynamic {
        phases.push(true);
    }
    let max_bridges = target.edge_count();
    let mut inconclusive = false;
    for &dynamic in &phases {
        search.dynamic = dynamic;
        let mut limits: Vec<usize> = if policy.minimize_bridges {
            (0..=max_bridges).collect()
        } else {
            vec![max_bridges]
        };
        let mut i = 0;
        while i < limits.len() {
            search.bridge_limit = limits[i];
            search.limit_hit = false;
            // an attempt that burns its slice is inconclusive; skip to the loosest limit
            search.slice_left = slice;
            match search.place(0, fresh()) {
                Ok(Outcome::Found(plan)) => return Ok(plan),
                Ok(Outcome::Exhausted) if !search.limit_hit => break,
                Ok(Outcome::Exhausted) => {}
                Err(WeaveError::SearchBudget(_)) if search.expansions < policy.node_budget => {
                    inconclusive = true;
                    limits.truncate(i + 1);
                    if limits[i] != max_bridges {
                        limits.push(max_bridges);
                    }
                }
                Err(e) => return Err(e),
            }
            i += 1;
        }
    }
    if !inconclusive {
        let (a, b) = search.witness.map(|(_, e)| e).unwrap_or((0, 0));
        return Err(WeaveError::Infeasible(a, b));
    }

    // Randomized restarts with a narrow candidate list. Incomplete, but it
    // finds layouts the exhaustive order never reaches within budget.
    search.dynamic = policy.allow_dynamic;
    search.bridge_limit = max_bridges;
    search.beam = Some(RESTART_BEAM);
    for _ in 0..policy.restarts {
        if search.expansions >= policy.node_budget {
            break;
        }
        search.keys = (0..device.qubit_count()).map(|_| rng.next_u64()).collect();
        let start = (rng.next_u64() % n.max(1) as u64) as usize;
        let ties: Vec<u64> = (0..n).map(|_| rng.next_u64()).collect();
        search.order = vertex_order_from(target, start, &ties);
        search.slice_left = RESTART_SLICE;
        match search.place(0, fresh()) {
            Ok(Outcome::Found(plan)) => return Ok(plan),
            Ok(Outcome::Exhausted) => {}
            Err(WeaveError::SearchBudget(_)) if search.expansions < policy.node_budget => {}
            Err(e) => return Err(e),
        }
    }
    Err(WeaveError::SearchBudget(policy.node_budget))
}

/// Highest degree first, then the vertex with most already-ordered neighbours.
fn vertex_order(target: &TargetGraph) -> Vec<usize> {
    let n = target.vertex_count();
    let start = (0..n)
        .max_by(|&a, &b| target.degree(a).cmp(&target.degree(b)).then(b.cmp(&a)))
        .unwrap_or(0);
    let ties: Vec<u64> = (0..n).map(|v| u64::MAX - v as u64).collect();
    vertex_order_from(target, start, &ties)
}

/// Greedy order from `start`: most already-ordered neighbours, then degree,
/// then the larger tie key.
fn vertex_order_from(target: &TargetGraph, start: usize, ties: &[u64]) -> Vec<usize> {
    let n = target.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let mut linked = vec![0usize; n];
    let mut next = Some(start);
    while let Some(v) = next {
        placed[v] = true;
        order.push(v);
        for u in target.neighbors(v) {
            linked[u] += 1;
        }
        next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (linked[v], target.degree(v), ties[v]));
    }
    order
}

impl Search<'_> {
    fn tick(&mut self) -> Result<()> {
        self.expansions += 1;
        if self.expansions >= self.policy.node_budget || self.slice_left == 0 {
            return Err(WeaveError::SearchBudget(self.policy.node_budget));
        }
        self.slice_left -= 1;
        Ok(())
    }

    fn reach(&self) -> usize {
        let mut r = 1;
        if self.policy.allow_static {
            r = 2;
        }
        if self.dynamic {
            r = r.max(self.policy.max_dynamic_connectors + 1);
        }
        r
    }

    fn note_failure(&mut self, depth: usize, edge: (usize, usize)) {
        if self.witness.map_or(true, |(d, _)| depth > d) {
            self.witness = Some((depth, edge));
        }
    }

    fn place(&mut self, k: usize, state: State) -> Result<Outcome> {
        self.tick()?;
        if k == self.order.len() {
            return Ok(self.finish(state));
        }
        let v = self.order[k];
        let placed: Vec<usize> = self
            .target
            .neighbors(v)
            .into_iter()
            .filter_map(|u| state.map[u])
            .collect();
        let reach = self.reach();
        let nq = self.device.qubit_count();
        let mut candidates: Vec<(usize, u64, usize)> = (0..nq)
            .filter(|&q| state.role[q] == Role::Free)
            .filter(|&q| placed.iter().all(|&p| self.device.manhattan(q, p) <= reach))
            .map(|q| {
                let score = if k == 0 {
                    (0..nq).map(|p| self.device.manhattan(q, p)).sum()
                } else {
                    placed.iter().map(|&p| self.device.manhattan(q, p)).sum()
                };
                (score, self.keys[q], q)
            })
            .collect();
        if let Some(width) = self.beam {
            // rank by route cost plus crowding around vertices still waiting on neighbours
            if k > 0 {
                for c in candidates.iter_mut() {
                    c.0 = self.restart_score(&state, v, c.2, &placed);
                }
            }
            candidates.sort_unstable();
            candidates.truncate(width);
        }
        candidates.sort_unstable();
        for (_, _, q) in candidates {
            let mut next = state.clone();
            next.map[v] = Some(q);
            next.role[q] = Role::Node;
            if !self.room_left(&next, k + 1) {
                continue;
            }
            let pending: Vec<usize> = self
                .target
                .neighbors(v)
                .into_iter()
                .filter(|&u| next.map[u].is_some())
                .collect();
            if let Outcome::Found(p) = self.route(k, v, &pending, next)? {
                return Ok(Outcome::Found(p));
            }
        }
        Ok(Outcome::Exhausted)
    }

    fn restart_score(&self, state: &State, v: usize, q: usize, placed: &[usize]) -> usize {
        let mut cost = 0;
        for &p in placed {
            cost += match self.device.manhattan(q, p) {
                1 => 0,
                2 => 1,
                d => 3 * d,
            };
        }
        let free_near = |x: usize| {
            self.device
                .neighbors(x)
                .into_iter()
                .filter(|&y| y != q && state.role[y] == Role::Free)
                .count()
        };
        for (w, m) in state.map.iter().enumerate() {
            let qw = if w == v { Some(q) } else { *m };
            let Some(qw) = qw else { continue };
            let need = self
                .target
                .neighbors(w)
                .into_iter()
                .filter(|&u| u != v && state.map[u].is_none())
                .count();
            let free = free_near(qw);
            if need > free {
                cost += 5 * (need - free);
            }
        }
        cost
    }

    /// Enough free qubits overall and near every vertex still waiting on neighbours.
    fn room_left(&self, state: &State, k: usize) -> bool {
        let free: Vec<usize> = (0..state.role.len()).filter(|&q| state.role[q] == Role::Free).collect();
        if free.len() < self.order.len() - k {
            return false;
        }
        let reach = self.reach();
        for (w, m) in state.map.iter().enumerate() {
            let Some(qw) = *m else { continue };
            let waiting = self
                .target
                .neighbors(w)
                .into_iter()
                .filter(|&u| state.map[u].is_none())
                .count();
            if waiting > 0 && free.iter().filter(|&&q| self.device.manhattan(q, qw) <= reach).count() < waiting {
                return false;
            }
        }
        true
    }

    fn route(&mut self, k: usize, v: usize, pending: &[usize], state: State) -> Result<Outcome> {
        self.tick()?;
        let n = self.target.vertex_count();
        let Some(&u) = pending.iter().find(|&&u| !state.done[v * n + u]) else {
            return self.place(k + 1, state);
        };
        let q = state.map[v].unwrap_or(0);
        let qu = state.map[u].unwrap_or(0);
        let mark = |s: &mut State, a: usize, b: usize| {
            s.done[a * n + b] = true;
            s.done[b * n + a] = true;
        };
        let floor = self.device.g_floor().value();
        let mut tried = false;

        // direct coupler
        if self.device.coupler(q, qu).is_some() {
            tried = true;
            let mut next = state.clone();
            next.direct.push((v.min(u), v.max(u)));
            mark(&mut next, v, u);
            if let Outcome::Found(p) = self.route(k, v, pending, next)? {
                return Ok(Outcome::Found(p));
            }
            if self.beam.is_some() {
                return Ok(Outcome::Exhausted);
            }
        }

        if self.policy.allow_static {
            // join an existing hub whose endpoints are all pending neighbours
            if self.policy.allow_hubs {
                for (i, b) in state.bridges.iter().enumerate() {
                    if !b.is_static() || !b.endpoints.contains(&qu) {
                        continue;
                    }
                    let c = b.connectors[0];
                    if self.device.coupler(q, c).is_none() {
                        continue;
                    }
                    let others: Option<Vec<usize>> = b.endpoints.iter().map(|&e| state.vertex_at(e)).collect();
                    let Some(others) = others else { continue };
                    if !others
                        .iter()
                        .all(|&w| self.target.has_edge(v, w) && !state.done[v * n + w])
                    {
                        continue;
                    }
                    let mut joined = b.clone();
                    joined.endpoints.push(q);
                    if !matches!(predict_bridge(self.device, &joined), Ok(g) if g.abs() >= floor) {
                        continue;
                    }
                    tried = true;
                    let mut next = state.clone();
                    next.bridges[i] = joined;
                    for &w in &others {
                        mark(&mut next, v, w);
                    }
                    if let Outcome::Found(p) = self.route(k, v, pending, next)? {
                        return Ok(Outcome::Found(p));
                    }
                    if self.beam.is_some() {
                        // restarts commit to the first workable route
                        return Ok(Outcome::Exhausted);
                    }
                }
            }

            // new single-connector bridge
            if state.bridges.len() < self.bridge_limit {
                let mut connectors: Vec<usize> = self
                    .device
                    .neighbors(q)
                    .into_iter()
                    .filter(|&c| state.role[c] == Role::Free && self.device.coupler(c, qu).is_some())
                    .collect();
                connectors.sort_unstable_by_key(|&c| self.keys[c]);
                for c in connectors {
                    let b = Bridge::new_static(vec![qu, q], c, self.policy.connector_detuning);
                    if !matches!(predict_bridge(self.device, &b), Ok(g) if g.abs() >= floor) {
                        continue;
                    }
                    tried = true;
                    let mut next = state.clone();
                    next.role[c] = Role::Connector;
                    next.bridges.push(b);
                    mark(&mut next, v, u);
                    if !self.room_left(&next, k + 1) {
                        continue;
                    }
                    if let Outcome::Found(p) = self.route(k, v, pending, next)? {
                        return Ok(Outcome::Found(p));
                    }
                    if self.beam.is_some() {
                        // restarts commit to the first workable route
                        return Ok(Outcome::Exhausted);
                    }
                }
            } else if self.device.manhattan(q, qu) == 2 {
                self.limit_hit = true;
            }
        }

        if self.dynamic {
            let busy = |s: &State, x: usize| {
                s.bridges
                    .iter()
                    .any(|b| !b.is_static() && b.endpoints.contains(&x))
            };
            if state.bridges.len() >= self.bridge_limit {
                self.limit_hit = true;
            } else if !busy(&state, q) && !busy(&state, qu) {
                for path in self.chain_paths(&state, q, qu) {
                    let b = Bridge::new_dynamic(q, path.clone(), qu);
                    if !matches!(predict_bridge(self.device, &b), Ok(g) if g.abs() >= floor) {
                        continue;
                    }
                    tried = true;
                    let mut next = state.clone();
                    for &c in &path {
                        next.role[c] = Role::Connector;
                    }
                    next.bridges.push(b);
                    mark(&mut next, v, u);
                    if !self.room_left(&next, k + 1) {
                        continue;
                    }
                    if let Outcome::Found(p) = self.route(k, v, pending, next)? {
                        return Ok(Outcome::Found(p));
                    }
                    if self.beam.is_some() {
                        // restarts commit to the first workable route
                        return Ok(Outcome::Exhausted);
                    }
                }
            }
        }

        if !tried {
            self.note_failure(k, (u.min(v), u.max(v)));
        }
        Ok(Outcome::Exhausted)
    }

    /// Simple paths of free qubits from `from` to `to` with uniform coupler
    /// strength, shortest first, at most a handful.
    fn chain_paths(&self, state: &State, from: usize, to: usize) -> Vec<Vec<usize>> {
        const MAX_PATHS: usize = 6;
        let max_len = self.policy.max_dynamic_connectors;
        let mut found: Vec<Vec<usize>> = Vec::new();
        for len in 1..=max_len {
            if self.device.manhattan(from, to) > len + 1 {
                continue;
            }
            let mut stack = Vec::new();
            self.extend_path(state, from, to, len, None, &mut stack, &mut found, MAX_PATHS);
            if found.len() >= MAX_PATHS {
                break;
            }
        }
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_path(
        &self,
        state: &State,
        at: usize,
        to: usize,
        len: usize,
        g0: Option<f64>,
        stack: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if found.len() >= cap {
            return;
        }
        let g_of = |a: usize, b: usize| self.device.coupler(a, b).map(|c| c.g.value());
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs();
        if stack.len() == len {
            if let (Some(g), Some(first)) = (g_of(at, to), g0) {
                if same(first, g) {
                    found.push(stack.clone());
                }
            }
            return;
        }
        let mut next: Vec<usize> = self
            .device
            .neighbors(at)
            .into_iter()
            .filter(|&c| state.role[c] == Role::Free && !stack.contains(&c))
            .filter(|&c| self.device.manhattan(c, to) <= len - stack.len())
            .collect();
        next.sort_unstable_by_key(|&c| (self.device.manhattan(c, to), self.keys[c]));
        for c in next {
            let Some(g) = g_of(at, c) else { continue };
            if g0.is_some_and(|first| !same(first, g)) {
                continue;
            }
            stack.push(c);
            self.extend_path(state, c, to, len, g0.or(Some(g)), stack, found, cap);
            stack.pop();
        }
    }

    fn finish(&mut self, state: State) -> Outcome {
        let floor = self.device.g_floor();
        let mut j = f64::INFINITY;
        for b in &state.bridges {
            match predict_bridge(self.device, b) {
                Ok(g) => j = j.min(g.abs()),
                Err(_) => return Outcome::Exhausted,
            }
        }
        if state.bridges.is_empty() {
            for &(a, b) in &state.direct {
                let (qa, qb) = (state.map[a].unwrap_or(0), state.map[b].unwrap_or(0));
                if let Some(c) = self.device.coupler(qa, qb) {
                    j = j.min(c.g_max.value());
                }
            }
        }
        if !j.is_finite() {
            j = floor.value();
        }
        let j = j.max(floor.value());
        let Ok(walk_speed) = WalkSpeed::new(Frequency::mhz(j), floor) else {
            return Outcome::Exhausted;
        };
        let mut direct = state.direct;
        direct.sort_unstable();
        let mut plan = WeavePlan {
            target: self.target.clone(),
            vertex_map: state.map.iter().map(|m| m.unwrap_or(0)).collect(),
            direct_edges: direct,
            bridges: state.bridges,
            walk_speed,
            schedule: FloquetSchedule::empty(),
        };
        match compile_schedule(&plan, self.device) {
            Ok(s) => plan.schedule = s,
            Err(_) => return Outcome::Exhausted,
        }
        if validate_plan(&plan, self.device).passed() {
            Outcome::Found(plan)
        } else {
            Outcome::Exhausted
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete, glued_binary_tree};
    use crate::model::TransmonSpec;

    fn grid(rows: usize, cols: usize) -> DeviceLattice {
        let spec = TransmonSpec::new(Frequency::mhz(4500.0), Frequency::mhz(-250.0));
        DeviceLattice::uniform_grid(rows, cols, spec, Frequency::mhz(25.0), Frequency::mhz(50.0)).unwrap()
    }

    #[test]
    fn k2_is_one_direct_edge() {
        let plan = plan_embedding(&complete(2), &grid(3, 3), &Policy::default()).unwrap();
        assert_eq!(plan.direct_edges, [(0, 1)]);
        assert!(plan.bridges.is_empty());
        assert!(plan.schedule.is_empty());
    }

    #[test]
    fn k5_exceeds_a_2x2_grid() {
        let err = plan_embedding(&complete(5), &grid(2, 2), &Policy::default()).unwrap_err();
        assert_eq!(err, WeaveError::Capacity { vertices: 5, qubits: 4 });
    }

    #[test]
    fn glued_tree_uses_two_static_bridges() {
        let d = grid(3, 4);
        let plan = plan_embedding(&glued_binary_tree(3), &d, &Policy::default()).unwrap();
        assert_eq!(plan.vertex_map.len(), 10);
        assert_eq!(plan.static_count(), 2);
        assert_eq!(plan.dynamic_count(), 0);
        assert!(validate_plan(&plan, &d).passed());
    }

    #[test]
    fn planning_is_deterministic() {
        let d = grid(3, 4);
        let p = Policy { seed: 7, ..Policy::default() };
        let a = plan_embedding(&glued_binary_tree(3), &d, &p).unwrap();
        let b = plan_embedding(&glued_binary_tree(3), &d, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn static_only_triangle_on_a_line_is_infeasible() {
        // three qubits in a row cannot host a triangle without a spare connector
        let d = grid(1, 3);
        let policy = Policy { allow_dynamic: false, ..Policy::default() };
        assert!(matches!(
            plan_embedding(&complete(3), &d, &policy),
            Err(WeaveError::Infeasible(_, _))
        ));
    }

    #[test]
    fn long_edge_falls_back_to_a_dynamic_bridge() {
        // a triangle on a bipartite grid needs one bridged edge
        let d = grid(2, 3);
        let target = TargetGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let policy = Policy { allow_static: false, ..Policy::default() };
        let plan = plan_embedding(&target, &d, &policy).unwrap();
        assert_eq!(plan.dynamic_count(), 1);
        assert!(!plan.schedule.is_empty());
        assert!(validate_plan(&plan, &d).passed());
    }

    #[test]
    fn tight_budget_reports_timeout() {
        let policy = Policy { node_budget: 3, ..Policy::default() };
        assert_eq!(
            plan_embedding(&glued_binary_tree(3), &grid(3, 4), &policy).unwrap_err(),
            WeaveError::SearchBudget(3)
        );
    }
}
