//! On-line tree exploration and the adaptive lower-bound tree family.

use std::collections::HashMap;

use crate::env::{Environment, Observation, OnlineTrace, PortView, TraceLog, TreeEnvironment};
use crate::error::{GenError, ProtocolError};
use crate::graph::{RootedTree, VertexId};
use crate::strategy::{strategy_cost, AgentId, CostModel, Move, Strategy};
use crate::tree_offline::cost_expl;
use crate::weight::{Rational, Weight};

/// Number of discovered vertices not yet explored, as seen by the team.
///
/// In a tree every unexplored vertex is visible from exactly one explored vertex, so
/// counting unexplored ports on first arrival is exact.
#[derive(Debug, Clone, Copy)]
struct Frontier {
    open: usize,
}

impl Frontier {
    fn at_root(obs: &Observation) -> Self {
        Frontier {
            open: unexplored_ports(obs).count(),
        }
    }

    fn arrived_new(&mut self, obs: &Observation) {
        self.open = self.open - 1 + unexplored_ports(obs).count();
    }

    fn done(self) -> bool {
        self.open == 0
    }
}

fn unexplored_ports(obs: &Observation) -> impl Iterator<Item = (usize, &PortView)> {
    obs.ports.iter().enumerate().filter(|(_, p)| !p.explored)
}

/// Lightest unexplored port, lowest port number on ties.
fn pick_port(obs: &Observation) -> Option<usize> {
    unexplored_ports(obs)
        .min_by_key(|&(i, p)| (p.weight, i))
        .map(|(i, _)| i)
}

/// Moves `group` through `port`, leader first. Returns `false` once the graph is done.
fn step_group<E: Environment + ?Sized>(
    env: &mut E,
    group: &[AgentId],
    port: usize,
    frontier: &mut Frontier,
    back: &mut Vec<usize>,
) -> Result<bool, ProtocolError> {
    let leader = group[0];
    let fresh = !env.observe(leader)?.ports[port].explored;
    env.traverse(leader, port)?;
    let obs = env.observe(leader)?;
    if fresh {
        frontier.arrived_new(&obs);
    }
    back.push(obs.entry_port.expect("just moved"));
    if frontier.done() {
        return Ok(false);
    }
    for &a in &group[1..] {
        env.traverse(a, port)?;
    }
    Ok(true)
}

/// Depth-first walk of `group` from its current vertex.
///
/// Returns when the graph is fully explored, or when the walk is back where it
/// started with nothing left below.
fn depth_first<E: Environment + ?Sized>(
    env: &mut E,
    group: &[AgentId],
    frontier: &mut Frontier,
) -> Result<(), ProtocolError> {
    let leader = group[0];
    let mut back: Vec<usize> = Vec::new();
    while !frontier.done() {
        let obs = env.observe(leader)?;
        match pick_port(&obs) {
            Some(port) => {
                if !step_group(env, group, port, frontier, &mut back)? {
                    return Ok(());
                }
            }
            None => {
                let Some(port) = back.pop() else {
                    return Ok(());
                };
                for &a in group {
                    env.traverse(a, port)?;
                }
            }
        }
    }
    Ok(())
}

/// One agent, depth-first, stopping at the last newly explored vertex.
pub fn dfs_prime<E: Environment + ?Sized>(
    env: &mut E,
    model: CostModel,
) -> Result<OnlineTrace, ProtocolError> {
    let a = env.invoke()?;
    let mut frontier = Frontier::at_root(&env.observe(a)?);
    depth_first(env, &[a], &mut frontier)?;
    Ok(env.trace(model))
}

/// Two agents walking depth-first in lockstep.
pub fn escort<E: Environment + ?Sized>(
    env: &mut E,
    model: CostModel,
) -> Result<OnlineTrace, ProtocolError> {
    let a1 = env.invoke()?;
    let mut frontier = Frontier::at_root(&env.observe(a1)?);
    if !frontier.done() {
        let a2 = env.invoke()?;
        depth_first(env, &[a1, a2], &mut frontier)?;
    }
    Ok(env.trace(model))
}

/// Depth-first explorer that, at every branching, peeks one step into each branch,
/// keeps the last one, and calls a helper from the homebase to clear the others.
pub fn probe_and_call<E: Environment + ?Sized>(
    env: &mut E,
    model: CostModel,
) -> Result<OnlineTrace, ProtocolError> {
    let a1 = env.invoke()?;
    let mut frontier = Frontier::at_root(&env.observe(a1)?);
    let mut back: Vec<usize> = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    while !frontier.done() {
        let obs = env.observe(a1)?;
        let mut open: Vec<(usize, Weight)> =
            unexplored_ports(&obs).map(|(i, p)| (i, p.weight)).collect();
        open.sort_by_key(|&(i, w)| (w, i));
        match open.len() {
            0 => {
                let Some(port) = back.pop() else { break };
                path.pop();
                env.traverse(a1, port)?;
            }
            1 => {
                let port = open[0].0;
                if !step_group(env, &[a1], port, &mut frontier, &mut back)? {
                    break;
                }
                path.push(port);
            }
            _ => {
                let (keep, others) = open.split_last().expect("two or more");
                for &(port, _) in others {
                    let mut probe_back = Vec::new();
                    if !step_group(env, &[a1], port, &mut frontier, &mut probe_back)? {
                        return Ok(env.trace(model));
                    }
                    env.traverse(a1, probe_back[0])?;
                }
                if !step_group(env, &[a1], keep.0, &mut frontier, &mut back)? {
                    break;
                }
                let helper = env.invoke()?;
                for &port in &path {
                    env.traverse(helper, port)?;
                }
                path.push(keep.0);
                for (n, &(port, _)) in others.iter().enumerate() {
                    env.traverse(helper, port)?;
                    let up = env.observe(helper)?.entry_port.expect("just moved");
                    depth_first(env, &[helper], &mut frontier)?;
                    if frontier.done() {
                        return Ok(env.trace(model));
                    }
                    if n + 1 < others.len() {
                        env.traverse(helper, up)?;
                    }
                }
            }
        }
    }
    Ok(env.trace(model))
}

/// On-line tree strategies available to experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeSubject {
    DfsPrime,
    Escort,
    ProbeAndCall,
}

impl TreeSubject {
    pub fn run(
        self,
        env: &mut dyn Environment,
        model: CostModel,
    ) -> Result<OnlineTrace, ProtocolError> {
        match self {
            TreeSubject::DfsPrime => dfs_prime(env, model),
            TreeSubject::Escort => escort(env, model),
            TreeSubject::ProbeAndCall => probe_and_call(env, model),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TreeSubject::DfsPrime => "dfs-prime",
            TreeSubject::Escort => "escort",
            TreeSubject::ProbeAndCall => "probe-and-call",
        }
    }
}

/// Parameters of the lower-bound tree family: a spine of `l + 1` unit paths of
/// length `l` through `v_0 … v_{l+1}`, with a pendant path of length `l_list[i-1]`
/// hanging from each `v_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyTParams {
    pub l: usize,
    pub l_list: Vec<usize>,
}

impl FamilyTParams {
    pub fn new(l: usize, l_list: Vec<usize>) -> Result<Self, GenError> {
        let params = FamilyTParams { l, l_list };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.l < 1 {
            return Err(GenError::InvalidParameter("l must be at least 1".into()));
        }
        if self.l_list.len() != self.l {
            return Err(GenError::InvalidParameter(format!(
                "expected {} pendant lengths, got {}",
                self.l,
                self.l_list.len()
            )));
        }
        if let Some(bad) = self.l_list.iter().find(|&&x| x < 1 || x > self.l) {
            return Err(GenError::InvalidParameter(format!(
                "pendant length {bad} outside 1..={}",
                self.l
            )));
        }
        Ok(())
    }

    pub fn pendant_total(&self) -> usize {
        self.l_list.iter().sum()
    }

    /// Spine vertex id of `v_i`.
    pub fn decision_vertex(&self, i: usize) -> VertexId {
        i * self.l
    }

    pub fn spine_len(&self) -> usize {
        (self.l + 1) * self.l
    }
}

/// Spine vertex at depth `t` gets id `t`; pendant vertices follow, `v_1`'s first.
pub fn gen_family_t(params: &FamilyTParams) -> Result<RootedTree, GenError> {
    params.validate()?;
    let l = params.l;
    let spine = params.spine_len();
    let n = spine + 1 + params.pendant_total();
    let mut parent = Vec::with_capacity(n);
    parent.push(None);
    for t in 1..=spine {
        parent.push(Some(t - 1));
    }
    for (idx, &len) in params.l_list.iter().enumerate() {
        let mut above = (idx + 1) * l;
        for _ in 0..len {
            parent.push(Some(above));
            above = parent.len() - 1;
        }
    }
    let mut weights = vec![Weight::from_int(1); n];
    weights[0] = Weight::ZERO;
    Ok(RootedTree::from_parents(0, parent, weights)?)
}

/// `q + l² + 2 Σ l_i + l`: one agent detouring into every pendant and stopping at `v_{l+1}`.
pub fn family_t_opt_upper(params: &FamilyTParams, model: CostModel) -> Weight {
    let l = params.l as u64;
    model.q + Weight::from_int(l * l + 2 * params.pendant_total() as u64 + l)
}

/// The strategy achieving [`family_t_opt_upper`] on [`gen_family_t`]'s labeling.
pub fn family_t_upper_strategy(params: &FamilyTParams) -> Strategy {
    let l = params.l;
    let mut s = Strategy::new();
    let a = s.invoke();
    let mut pendant_start = params.spine_len() + 1;
    for t in 0..params.spine_len() {
        if t > 0 && t % l == 0 {
            let len = params.l_list[t / l - 1];
            let mut down = vec![t];
            down.extend(pendant_start..pendant_start + len);
            s.walk(a, &down);
            down.reverse();
            s.walk(a, &down);
            pendant_start += len;
        }
        s.traverse(a, t, t + 1);
    }
    s
}

/// Finite-`l` lower bound `2 - (5l + 2q) / (q + l² + 2 Σ l_i + l)` on the ratio
/// against [`family_t_opt_upper`].
pub fn family_t_ratio_bound(params: &FamilyTParams, model: CostModel) -> Rational {
    let l = params.l as i128;
    let q = model.q.ratio();
    let int = Rational::from_integer;
    let denom = family_t_opt_upper(params, model).ratio();
    int(2) - (int(5 * l) + q * int(2)) / denom
}

/// Total weight of the moves of `strategy` whose both ends lie in `on_path`.
pub fn spine_distance(strategy: &Strategy, tree: &RootedTree, on_path: &[bool]) -> Weight {
    strategy
        .moves()
        .iter()
        .filter_map(|mv| match *mv {
            Move::Traverse { from, to, .. } if on_path[from] && on_path[to] => {
                let child = if tree.parent(to) == Some(from) {
                    to
                } else {
                    from
                };
                Some(tree.parent_weight(child))
            }
            _ => None,
        })
        .sum()
}

/// Rooted isomorphism respecting edge weights, by bottom-up canonical ids.
pub fn rooted_isomorphic(a: &RootedTree, b: &RootedTree) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut table: HashMap<Vec<(usize, Weight)>, usize> = HashMap::new();
    let mut canon = |t: &RootedTree| -> usize {
        let mut id = vec![0usize; t.len()];
        for &v in t.bfs_order().iter().rev() {
            let mut key: Vec<(usize, Weight)> = t
                .children(v)
                .iter()
                .map(|&c| (id[c], t.parent_weight(c)))
                .collect();
            key.sort_unstable();
            let next = table.len();
            id[v] = *table.entry(key).or_insert(next);
        }
        id[t.root()]
    };
    canon(a) == canon(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    /// Spine vertex at depth `t`.
    Spine(usize),
    /// Unresolved branch `b` below `v_i`, at distance `depth` from it.
    Branch { i: usize, b: usize, depth: usize },
    /// Pendant path of `v_i`, at distance `depth` from it.
    Pendant { i: usize, depth: usize },
}

#[derive(Debug, Clone)]
struct Node {
    parent: Option<VertexId>,
    role: Role,
    children: Vec<VertexId>,
    explored: bool,
}

/// How a decision vertex was fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeCase {
    /// A second agent arrived before either branch was entered.
    A,
    /// One branch reached depth `l`; the other had depth `h`.
    B { h: usize },
    /// A second agent arrived after the branches reached depths `h1` (pendant) and
    /// `h2` (spine).
    C { h1: usize, h2: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeCaseRecord {
    pub i: usize,
    pub case: TreeCase,
    pub l_i: usize,
}

#[derive(Debug, Clone)]
struct OpenDecision {
    i: usize,
    vertex: VertexId,
    reached: Vec<AgentId>,
    depth: [usize; 2],
    latest: Option<usize>,
    members: [Vec<VertexId>; 2],
}

/// Tree of the lower-bound family whose pendant lengths are fixed while the
/// strategy runs.
///
/// Vertices are created lazily when their parent is explored, numbered in creation
/// order; ports follow ascending neighbor id. Below each decision vertex `v_i` two
/// identical-looking paths grow until either a second agent arrives at `v_i` or one
/// path reaches depth `l`. At that moment one path is declared the spine and the
/// other the pendant, cut just below its deepest explored vertex.
#[derive(Debug, Clone)]
pub struct AdversaryTreeEnv {
    l: usize,
    nodes: Vec<Node>,
    l_list: Vec<Option<usize>>,
    cases: Vec<TreeCaseRecord>,
    open: Option<OpenDecision>,
    positions: Vec<VertexId>,
    entry: Vec<Option<usize>>,
    unexplored: usize,
    log: TraceLog,
}

impl AdversaryTreeEnv {
    pub fn new(l: usize) -> Result<Self, GenError> {
        if l < 1 {
            return Err(GenError::InvalidParameter("l must be at least 1".into()));
        }
        let mut env = AdversaryTreeEnv {
            l,
            nodes: Vec::new(),
            l_list: vec![None; l],
            cases: Vec::new(),
            open: None,
            positions: Vec::new(),
            entry: Vec::new(),
            unexplored: 0,
            log: TraceLog::default(),
        };
        env.create(None, Role::Spine(0));
        env.explore(0);
        Ok(env)
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn cases(&self) -> &[TreeCaseRecord] {
        &self.cases
    }

    /// Pendant lengths, once every decision vertex is fixed.
    pub fn l_list(&self) -> Option<Vec<usize>> {
        self.l_list.iter().copied().collect()
    }

    pub fn all_explored(&self) -> bool {
        self.unexplored == 0
            && self.l_list.iter().all(Option::is_some)
            && !self.positions.is_empty()
    }

    /// The realized tree in creation-order ids, once fully explored.
    pub fn realized_tree(&self) -> Option<RootedTree> {
        if !self.all_explored() {
            return None;
        }
        let parent = self.nodes.iter().map(|n| n.parent).collect();
        let mut weights = vec![Weight::from_int(1); self.nodes.len()];
        weights[0] = Weight::ZERO;
        RootedTree::from_parents(0, parent, weights).ok()
    }

    /// Membership in the spine path from `v_1` to `v_{l+1}`.
    pub fn spine_path(&self) -> Vec<bool> {
        self.nodes
            .iter()
            .map(|n| matches!(n.role, Role::Spine(t) if t >= self.l))
            .collect()
    }

    fn create(&mut self, parent: Option<VertexId>, role: Role) -> VertexId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent,
            role,
            children: Vec::new(),
            explored: false,
        });
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        if let Role::Branch { b, .. } = role {
            if let Some(open) = &mut self.open {
                open.members[b].push(id);
            }
        }
        self.unexplored += 1;
        id
    }

    fn explore(&mut self, v: VertexId) {
        let node = &mut self.nodes[v];
        if node.explored {
            return;
        }
        node.explored = true;
        self.unexplored -= 1;
        if let Role::Branch { b, depth, .. } = node.role {
            let open = self
                .open
                .as_mut()
                .expect("branches exist only below an open vertex");
            open.depth[b] = open.depth[b].max(depth);
            open.latest = Some(b);
            if depth == self.l {
                let h = open.depth[1 - b];
                self.resolve(b, TreeCase::B { h }, h + 1);
            }
        }
        self.grow(v);
    }

    /// Creates the children of a freshly explored vertex.
    fn grow(&mut self, v: VertexId) {
        let l = self.l;
        match self.nodes[v].role {
            Role::Spine(t) if t == (l + 1) * l => {}
            Role::Spine(t) if t > 0 && t % l == 0 => {
                debug_assert!(self.open.is_none());
                self.open = Some(OpenDecision {
                    i: t / l,
                    vertex: v,
                    reached: Vec::new(),
                    depth: [0, 0],
                    latest: None,
                    members: [Vec::new(), Vec::new()],
                });
                let i = t / l;
                self.create(Some(v), Role::Branch { i, b: 0, depth: 1 });
                self.create(Some(v), Role::Branch { i, b: 1, depth: 1 });
            }
            Role::Spine(t) => {
                self.create(Some(v), Role::Spine(t + 1));
            }
            Role::Branch { i, b, depth } => {
                self.create(
                    Some(v),
                    Role::Branch {
                        i,
                        b,
                        depth: depth + 1,
                    },
                );
            }
            Role::Pendant { i, depth } => {
                if depth < self.l_list[i - 1].expect("pendant of a fixed vertex") {
                    self.create(
                        Some(v),
                        Role::Pendant {
                            i,
                            depth: depth + 1,
                        },
                    );
                }
            }
        }
    }

    fn resolve(&mut self, spine: usize, case: TreeCase, l_i: usize) {
        let open = self.open.take().expect("resolving an open vertex");
        let i = open.i;
        for &v in &open.members[spine] {
            if let Role::Branch { depth, .. } = self.nodes[v].role {
                self.nodes[v].role = Role::Spine(i * self.l + depth);
            }
        }
        for &v in &open.members[1 - spine] {
            if let Role::Branch { depth, .. } = self.nodes[v].role {
                self.nodes[v].role = Role::Pendant { i, depth };
            }
        }
        self.l_list[i - 1] = Some(l_i);
        self.cases.push(TreeCaseRecord { i, case, l_i });
    }

    fn arrived(&mut self, agent: AgentId, v: VertexId) {
        let Some(open) = &mut self.open else { return };
        if open.vertex != v || open.reached.contains(&agent) {
            return;
        }
        open.reached.push(agent);
        if open.reached.len() < 2 {
            return;
        }
        match open.latest {
            None => self.resolve(0, TreeCase::A, 1),
            Some(spine) => {
                let h1 = open.depth[1 - spine];
                let h2 = open.depth[spine];
                self.resolve(spine, TreeCase::C { h1, h2 }, h1 + 1);
            }
        }
    }

    fn ports(&self, v: VertexId) -> Vec<VertexId> {
        let node = &self.nodes[v];
        let mut out = Vec::with_capacity(node.children.len() + 1);
        out.extend(node.parent);
        out.extend_from_slice(&node.children);
        out.sort_unstable();
        out
    }
}

impl Environment for AdversaryTreeEnv {
    fn invoke(&mut self) -> Result<AgentId, ProtocolError> {
        if self.all_explored() {
            return Err(ProtocolError::Exhausted);
        }
        let agent = AgentId::from_index(self.positions.len());
        self.positions.push(0);
        self.entry.push(None);
        self.log.record_move(Move::Invoke { agent });
        Ok(agent)
    }

    fn observe(&mut self, agent: AgentId) -> Result<Observation, ProtocolError> {
        let at = *self
            .positions
            .get(agent.index())
            .ok_or(ProtocolError::UnknownAgent(agent))?;
        let ports = self
            .ports(at)
            .into_iter()
            .map(|u| PortView {
                weight: Weight::from_int(1),
                explored: self.nodes[u].explored,
            })
            .collect();
        let obs = Observation {
            agent,
            ports,
            entry_port: self.entry[agent.index()],
        };
        self.log.record_observation(&obs);
        Ok(obs)
    }

    fn traverse(&mut self, agent: AgentId, port: usize) -> Result<(), ProtocolError> {
        if self.all_explored() {
            return Err(ProtocolError::Exhausted);
        }
        let from = *self
            .positions
            .get(agent.index())
            .ok_or(ProtocolError::UnknownAgent(agent))?;
        let to = *self
            .ports(from)
            .get(port)
            .ok_or(ProtocolError::BadPort { agent, port })?;
        self.explore(to);
        self.positions[agent.index()] = to;
        self.entry[agent.index()] = self.ports(to).iter().position(|&u| u == from);
        self.log.distance += Weight::from_int(1);
        self.log.record_move(Move::Traverse { agent, from, to });
        self.arrived(agent, to);
        Ok(())
    }

    fn trace(&self, model: CostModel) -> OnlineTrace {
        self.log.trace(model)
    }
}

/// Result of running a tree strategy against [`AdversaryTreeEnv`].
#[derive(Debug, Clone)]
pub struct TreeAdversaryOutcome {
    pub params: FamilyTParams,
    pub cases: Vec<TreeCaseRecord>,
    /// Realized tree in creation-order ids.
    pub tree: RootedTree,
    pub trace: OnlineTrace,
    pub online_cost: Weight,
    pub opt_upper: Weight,
    /// Exact optimum of the realized tree.
    pub opt_exact: Weight,
    /// `online_cost / opt_upper`.
    pub ratio: Rational,
    pub ratio_bound: Rational,
    pub spine_distance: Weight,
    /// The realized tree is the family member with the recorded pendant lengths.
    pub isomorphic: bool,
    /// The subject replayed on the realized tree produced the identical event log.
    pub replay_consistent: bool,
}

/// Fresh adaptive environment over the family with spine parameter `l`.
pub fn adversary_tree_env(l: usize) -> Result<AdversaryTreeEnv, GenError> {
    AdversaryTreeEnv::new(l)
}

pub fn tree_adversary(
    subject: TreeSubject,
    l: usize,
    model: CostModel,
) -> Result<TreeAdversaryOutcome, GenError> {
    let failed = |e: ProtocolError| GenError::InvalidParameter(format!("subject failed: {e}"));
    let mut env = adversary_tree_env(l)?;
    let trace = subject.run(&mut env, model).map_err(failed)?;
    let l_list = env
        .l_list()
        .ok_or_else(|| GenError::InvalidParameter("subject stopped early".into()))?;
    let tree = env
        .realized_tree()
        .ok_or_else(|| GenError::InvalidParameter("subject stopped early".into()))?;
    let params = FamilyTParams::new(l, l_list)?;
    let isomorphic = rooted_isomorphic(&tree, &gen_family_t(&params)?);

    let mut concrete = TreeEnvironment::new(tree.clone());
    let replay = subject.run(&mut concrete, model).map_err(failed)?;
    let online_cost = strategy_cost(&trace.strategy, model, &tree)
        .map_err(|e| GenError::InvalidParameter(format!("illegal move log: {e}")))?;
    let opt_upper = family_t_opt_upper(&params, model);
    let opt_exact = strategy_cost(&cost_expl(&tree, model), model, &tree).expect("legal");
    let ratio = online_cost
        .checked_div(opt_upper)
        .expect("positive upper bound");
    let spine = spine_distance(&trace.strategy, &tree, &env.spine_path());
    Ok(TreeAdversaryOutcome {
        cases: env.cases().to_vec(),
        ratio_bound: family_t_ratio_bound(&params, model),
        params,
        tree,
        replay_consistent: replay.events == trace.events,
        trace,
        online_cost,
        opt_upper,
        opt_exact,
        ratio,
        spine_distance: spine,
        isomorphic,
    })
}
