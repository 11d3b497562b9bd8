//! On-line ring exploration and the lower-bound ring families.

use crate::env::{
    Environment, HiddenGraph, Observation, OnlineTrace, PortView, RingEnvironment, TraceLog,
};
use crate::error::{GenError, ProtocolError};
use crate::graph::{Ring, VertexId};
use crate::ring_offline::ring_offline;
use crate::strategy::{strategy_cost, AgentId, CostModel, Move};
use crate::weight::{Rational, Weight};

/// Greedy two-frontier ring strategy.
///
/// `a1` starts on the lighter homebase edge (port 0 on ties) and keeps going while
/// its next edge costs no more than the other frontier edge plus `q`. A second agent
/// is called at most once, onto the heavier homebase edge; afterwards the cheaper
/// frontier advances, with `a1` winning ties. The run stops the moment the two
/// frontiers meet.
pub fn ring_online<E: Environment + ?Sized>(
    env: &mut E,
    model: CostModel,
) -> Result<OnlineTrace, ProtocolError> {
    let q = model.q;
    let a1 = env.invoke()?;
    let home = env.observe(a1)?;
    let (right_dir, left_dir) = if home.ports[1].weight < home.ports[0].weight {
        (1, 0)
    } else {
        (0, 1)
    };
    let first_left = home.ports[left_dir].weight;
    let mut a2: Option<AgentId> = None;

    // frontier edge ahead of a1; `explored` means the frontiers already met
    let right =
        |env: &mut E| -> Result<PortView, ProtocolError> { Ok(env.observe(a1)?.ports[right_dir]) };
    let left = |env: &mut E, a2: Option<AgentId>| -> Result<PortView, ProtocolError> {
        match a2 {
            Some(a) => Ok(env.observe(a)?.ports[left_dir]),
            None => Ok(home.ports[left_dir]),
        }
    };

    loop {
        loop {
            let r = right(env)?;
            if r.explored {
                return Ok(env.trace(model));
            }
            let l = left(env, a2)?;
            let slack = if a2.is_none() { q } else { Weight::ZERO };
            if l.weight + slack >= r.weight {
                env.traverse(a1, right_dir)?;
            } else {
                break;
            }
        }
        let r = right(env)?;
        if a2.is_none() && first_left + q < r.weight {
            let agent = env.invoke()?;
            env.traverse(agent, left_dir)?;
            a2 = Some(agent);
        }
        if let Some(agent) = a2 {
            loop {
                if right(env)?.explored {
                    return Ok(env.trace(model));
                }
                let l = left(env, Some(agent))?;
                let r = right(env)?;
                if l.weight < r.weight {
                    env.traverse(agent, left_dir)?;
                } else {
                    break;
                }
            }
        }
    }
}

/// Baseline: one agent walks around the ring from the lighter homebase edge.
pub fn ring_sweep<E: Environment + ?Sized>(
    env: &mut E,
    model: CostModel,
) -> Result<OnlineTrace, ProtocolError> {
    let a1 = env.invoke()?;
    let home = env.observe(a1)?;
    let dir = usize::from(home.ports[1].weight < home.ports[0].weight);
    loop {
        let ahead = env.observe(a1)?.ports[dir];
        if ahead.explored {
            return Ok(env.trace(model));
        }
        env.traverse(a1, dir)?;
    }
}

/// On-line ring strategies available to experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingSubject {
    RingOnline,
    Sweep,
}

impl RingSubject {
    pub fn run(
        self,
        env: &mut dyn Environment,
        model: CostModel,
    ) -> Result<OnlineTrace, ProtocolError> {
        match self {
            RingSubject::RingOnline => ring_online(env, model),
            RingSubject::Sweep => ring_sweep(env, model),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RingSubject::RingOnline => "ring-online",
            RingSubject::Sweep => "sweep",
        }
    }
}

/// Ring of order `h1 + h2 + 2`, every edge `eps`.
pub fn gen_ring_c1(h1: usize, h2: usize, eps: Weight) -> Result<Ring, GenError> {
    if h1 < 1 {
        return Err(GenError::InvalidParameter("h1 must be at least 1".into()));
    }
    if h2 > h1 {
        return Err(GenError::InvalidParameter("h2 must not exceed h1".into()));
    }
    if eps.is_zero() {
        return Err(GenError::InvalidParameter("eps must be positive".into()));
    }
    Ok(Ring::new(vec![eps; h1 + h2 + 2], 0)?)
}

/// Ring of order `j` with `(v_i, v_{i+1})` weighing `2q` and every other edge `eps`.
pub fn gen_ring_c2(i: usize, j: usize, eps: Weight, model: CostModel) -> Result<Ring, GenError> {
    if i < 1 {
        return Err(GenError::InvalidParameter("i must be at least 1".into()));
    }
    if j < i + 2 {
        return Err(GenError::InvalidParameter(
            "j must be at least i + 2".into(),
        ));
    }
    check_eps(eps, model)?;
    let mut weights = vec![eps; j];
    weights[i] = model.q + model.q;
    Ok(Ring::new(weights, 0)?)
}

fn check_eps(eps: Weight, model: CostModel) -> Result<(), GenError> {
    if eps.is_zero() {
        return Err(GenError::InvalidParameter("eps must be positive".into()));
    }
    if model.q.is_zero() {
        return Err(GenError::InvalidParameter("q must be positive".into()));
    }
    match model.q.checked_div(eps) {
        Some(steps) if steps.is_integer() => Ok(()),
        _ => Err(GenError::InvalidParameter(
            "q must be a multiple of eps".into(),
        )),
    }
}

/// How the adaptive ring was fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingCase {
    /// Second agent called while only `eps` edges were visible.
    A { h1: usize, h2: usize },
    /// First agent reached distance `q` from the homebase alone.
    B { h1: usize, h2: usize },
}

/// Explored part before the ring is fixed: two arms out of the homebase.
#[derive(Debug)]
struct PendingRing {
    eps: Weight,
    model: CostModel,
    /// Explored depth of the port-0 and port-1 arms.
    depth: [usize; 2],
    /// Signed arm position: positive on the port-0 arm.
    positions: Vec<i64>,
    entry: Vec<Option<usize>>,
    log: TraceLog,
}

impl PendingRing {
    fn steps_to_q(&self) -> usize {
        let steps = self.model.q.checked_div(self.eps).expect("eps checked");
        steps.to_integer() as usize
    }

    fn ahead(&self, depth: usize) -> Weight {
        if depth == self.steps_to_q() {
            self.model.q + self.model.q
        } else {
            self.eps
        }
    }

    /// Provisional vertex id: port-0 arm odd, port-1 arm even.
    fn provisional(pos: i64) -> VertexId {
        match pos {
            0 => 0,
            p if p > 0 => 2 * p as usize - 1,
            p => 2 * (-p) as usize,
        }
    }

    fn ports(&self, pos: i64) -> [PortView; 2] {
        let eps_back = PortView {
            weight: self.eps,
            explored: true,
        };
        match pos {
            0 => [
                PortView {
                    weight: self.ahead(0),
                    explored: self.depth[0] >= 1,
                },
                PortView {
                    weight: self.ahead(0),
                    explored: self.depth[1] >= 1,
                },
            ],
            p if p > 0 => {
                let d = p as usize;
                [
                    PortView {
                        weight: self.ahead(d),
                        explored: self.depth[0] > d,
                    },
                    eps_back,
                ]
            }
            p => {
                let d = (-p) as usize;
                [
                    eps_back,
                    PortView {
                        weight: self.ahead(d),
                        explored: self.depth[1] > d,
                    },
                ]
            }
        }
    }
}

#[derive(Debug)]
enum Phase {
    Pending(PendingRing),
    Fixed(RingEnvironment),
}

/// Ring that stays undecided while one agent explores it.
///
/// Edges revealed by the first agent weigh `eps` until its arm reaches distance `q`
/// from the homebase, where the next edge weighs `2q`. The ring is fixed as soon as a
/// second agent is called (a member of the all-`eps` family) or the first agent
/// reaches distance `q` (a member of the one-heavy-edge family); in both cases
/// exactly one vertex is still unexplored at that moment.
#[derive(Debug)]
pub struct AdaptiveRingEnv {
    phase: Phase,
    case: Option<RingCase>,
}

impl AdaptiveRingEnv {
    pub fn new(eps: Weight, model: CostModel) -> Result<Self, GenError> {
        check_eps(eps, model)?;
        Ok(AdaptiveRingEnv {
            phase: Phase::Pending(PendingRing {
                eps,
                model,
                depth: [0, 0],
                positions: Vec::new(),
                entry: Vec::new(),
                log: TraceLog::default(),
            }),
            case: None,
        })
    }

    pub fn case(&self) -> Option<RingCase> {
        self.case
    }

    /// The concrete ring, once fixed.
    pub fn ring(&self) -> Option<&Ring> {
        match &self.phase {
            Phase::Fixed(env) => Some(env.graph()),
            Phase::Pending(_) => None,
        }
    }

    fn fix(&mut self, case: RingCase, heavy_on_port1: bool) -> Result<(), ProtocolError> {
        let Phase::Pending(pending) = &mut self.phase else {
            return Ok(());
        };
        let [cw, ccw] = pending.depth;
        let eps = pending.eps;
        let model = pending.model;
        let ring = match case {
            RingCase::A { h1: 0, h2 } => {
                debug_assert_eq!(h2, 0);
                Ring::new(vec![eps; 3], 0).expect("triangle")
            }
            RingCase::A { h1, h2 } => gen_ring_c1(h1, h2, eps).expect("valid c1 parameters"),
            RingCase::B { h1, h2 } => {
                let n = h1 + h2 + 2;
                let heavy = if heavy_on_port1 { h2 + 1 } else { h1 };
                gen_ring_c2(heavy, n, eps, model).expect("valid c2 parameters")
            }
        };
        let n = ring.len();
        debug_assert!(cw + ccw + 1 < n);
        let mut log = std::mem::take(&mut pending.log);
        let unmap = move |id: VertexId| match id {
            0 => 0,
            odd if odd % 2 == 1 => odd.div_ceil(2),
            even => n - even / 2,
        };
        log.relabel(unmap);
        let mut fixed = HiddenGraph::new(ring);
        for mv in log.strategy.moves() {
            fixed.apply_move(*mv)?;
        }
        *fixed.log_mut() = log;
        self.phase = Phase::Fixed(fixed);
        self.case = Some(case);
        Ok(())
    }
}

impl Environment for AdaptiveRingEnv {
    fn invoke(&mut self) -> Result<AgentId, ProtocolError> {
        if let Phase::Pending(p) = &self.phase {
            if !p.positions.is_empty() {
                let (h1, h2) = (p.depth[0].max(p.depth[1]), p.depth[0].min(p.depth[1]));
                self.fix(RingCase::A { h1, h2 }, false)?;
            }
        }
        match &mut self.phase {
            Phase::Fixed(env) => env.invoke(),
            Phase::Pending(p) => {
                let agent = AgentId::from_index(p.positions.len());
                p.positions.push(0);
                p.entry.push(None);
                p.log.record_move(Move::Invoke { agent });
                Ok(agent)
            }
        }
    }

    fn observe(&mut self, agent: AgentId) -> Result<Observation, ProtocolError> {
        match &mut self.phase {
            Phase::Fixed(env) => env.observe(agent),
            Phase::Pending(p) => {
                let pos = *p
                    .positions
                    .get(agent.index())
                    .ok_or(ProtocolError::UnknownAgent(agent))?;
                let obs = Observation {
                    agent,
                    ports: p.ports(pos).to_vec(),
                    entry_port: p.entry[agent.index()],
                };
                p.log.record_observation(&obs);
                Ok(obs)
            }
        }
    }

    fn traverse(&mut self, agent: AgentId, port: usize) -> Result<(), ProtocolError> {
        let trigger = match &mut self.phase {
            Phase::Fixed(env) => return env.traverse(agent, port),
            Phase::Pending(p) => {
                let from = *p
                    .positions
                    .get(agent.index())
                    .ok_or(ProtocolError::UnknownAgent(agent))?;
                let weight = p
                    .ports(from)
                    .get(port)
                    .ok_or(ProtocolError::BadPort { agent, port })?
                    .weight;
                let to = if port == 0 { from + 1 } else { from - 1 };
                p.positions[agent.index()] = to;
                p.entry[agent.index()] = Some(1 - port);
                p.log.distance += weight;
                p.log.record_move(Move::Traverse {
                    agent,
                    from: PendingRing::provisional(from),
                    to: PendingRing::provisional(to),
                });
                let arm = usize::from(to < 0);
                let depth = to.unsigned_abs() as usize;
                if depth > p.depth[arm] {
                    p.depth[arm] = depth;
                }
                (to != 0 && depth == p.steps_to_q()).then(|| {
                    (
                        RingCase::B {
                            h1: depth,
                            h2: p.depth[1 - arm],
                        },
                        arm == 1,
                    )
                })
            }
        };
        if let Some((case, heavy_on_port1)) = trigger {
            self.fix(case, heavy_on_port1)?;
        }
        Ok(())
    }

    fn trace(&self, model: CostModel) -> OnlineTrace {
        match &self.phase {
            Phase::Fixed(env) => env.trace(model),
            Phase::Pending(p) => p.log.trace(model),
        }
    }
}

/// Result of running a ring strategy against the adaptive ring and re-scoring it.
#[derive(Debug, Clone)]
pub struct RingAdversaryOutcome {
    pub case: RingCase,
    pub ring: Ring,
    pub trace: OnlineTrace,
    pub online_cost: Weight,
    pub opt_cost: Weight,
    pub ratio: Rational,
    /// Finite-`eps` lower bound on the ratio implied by the case analysis.
    pub case_bound: Rational,
    /// `3/2 - case_bound`.
    pub delta: Rational,
    /// The subject replayed on the fixed ring produced the identical event log.
    pub replay_consistent: bool,
}

/// Lower bound on `S(C) / S'(C)` for the resolved case at finite `eps`.
pub fn ring_case_bound(case: RingCase, eps: Weight, model: CostModel) -> Rational {
    let q = model.q.ratio();
    let e = eps.ratio();
    let int = |x: usize| Rational::from_integer(x as i128);
    match case {
        // triangle: two agents plus two eps edges against one agent on two edges
        RingCase::A { h1: 0, .. } => (q * int(2) + e * int(2)) / (q + e * int(2)),
        RingCase::A { h1, h2 } => {
            (q * int(2) + e * int(2 * h2 + h1 + 1)) / (q + e * int(h1 + h2 + 1))
        }
        RingCase::B { h2, .. } => {
            (q * int(3) + e * int(3 * h2 + 1)) / (q * int(2) + e * int(2 * (h2 + 1)))
        }
    }
}

/// Two-pass lower-bound experiment: run `subject` against [`AdaptiveRingEnv`], take
/// the ring it fixed, then re-run `subject` on that ring from scratch and compare
/// with the off-line optimum.
pub fn ring_adversary(
    subject: RingSubject,
    eps: Weight,
    model: CostModel,
) -> Result<RingAdversaryOutcome, crate::error::GenError> {
    let mut adaptive = AdaptiveRingEnv::new(eps, model)?;
    let first = subject
        .run(&mut adaptive, model)
        .map_err(|e| GenError::InvalidParameter(format!("subject failed: {e}")))?;
    let case = adaptive
        .case()
        .ok_or_else(|| GenError::InvalidParameter("subject never fixed the ring".into()))?;
    let ring = adaptive.ring().expect("fixed with case").clone();

    let mut concrete = RingEnvironment::new(ring.clone());
    let second = subject
        .run(&mut concrete, model)
        .map_err(|e| GenError::InvalidParameter(format!("subject failed: {e}")))?;
    let online_cost = strategy_cost(&second.strategy, model, &ring)
        .map_err(|e| GenError::InvalidParameter(format!("illegal replay: {e}")))?;
    let opt = ring_offline(&ring, model);
    let opt_cost = strategy_cost(&opt, model, &ring).expect("offline strategy is legal");
    let ratio = online_cost.checked_div(opt_cost).expect("opt is positive");
    let case_bound = ring_case_bound(case, eps, model);
    let three_halves = Rational::new(3, 2);
    Ok(RingAdversaryOutcome {
        case,
        ring,
        replay_consistent: first.events == second.events,
        trace: second,
        online_cost,
        opt_cost,
        ratio,
        delta: three_halves - case_bound,
        case_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::validate_strategy;

    fn w(x: u64) -> Weight {
        Weight::from_int(x)
    }

    fn run(weights: &[u64], q: u64) -> OnlineTrace {
        let ring = Ring::from_ints(weights, 0).unwrap();
        let mut env = RingEnvironment::new(ring.clone());
        let trace = ring_online(&mut env, CostModel::from_int(q)).unwrap();
        let report = validate_strategy(&ring, &trace.strategy, CostModel::from_int(q));
        assert!(report.valid);
        assert_eq!(report.total_cost, trace.cost);
        trace
    }

    #[test]
    fn c_prime_walks_the_heavy_edge() {
        let trace = run(&[1, 4, 1], 4);
        assert_eq!(trace.cost, w(9));
        assert_eq!(trace.strategy.agent_walks(0), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn heavy_middle_calls_second_agent() {
        let trace = run(&[1, 100, 1], 2);
        assert_eq!(trace.cost, w(6));
        assert_eq!(trace.strategy.agent_walks(0), vec![vec![0, 1], vec![0, 2]]);
    }

    #[test]
    fn unit_square_single_agent() {
        for q in [0, 1, 5] {
            let trace = run(&[1, 1, 1, 1], q);
            assert_eq!(trace.cost, w(q + 3));
            assert_eq!(trace.strategy.agent_count(), 1);
        }
    }

    #[test]
    fn lighter_edge_first() {
        let trace = run(&[5, 1, 1, 1], 0);
        assert_eq!(trace.strategy.agent_walks(0)[0][1], 3);
    }

    #[test]
    fn generators() {
        let eps = Weight::new(1, 10).unwrap();
        assert_eq!(gen_ring_c1(1, 0, eps).unwrap().len(), 3);
        assert_eq!(gen_ring_c1(2, 2, eps).unwrap().len(), 6);
        assert_eq!(
            gen_ring_c1(1, 1, w(1)).unwrap(),
            Ring::from_ints(&[1; 4], 0).unwrap()
        );
        assert!(gen_ring_c1(0, 0, eps).is_err());
        assert!(gen_ring_c1(1, 2, eps).is_err());

        let model = CostModel::from_int(1);
        let tri = gen_ring_c2(1, 3, eps, model).unwrap();
        assert_eq!(tri.weights(), &[eps, w(2), eps]);
        let five = gen_ring_c2(2, 5, eps, model).unwrap();
        assert_eq!(five.weight(2), w(2));
        assert!(gen_ring_c2(1, 3, eps, CostModel::from_int(0)).is_err());
        assert!(gen_ring_c2(1, 2, eps, model).is_err());
        assert!(gen_ring_c2(
            1,
            3,
            Weight::new(1, 3).unwrap(),
            CostModel::new(Weight::new(1, 2).unwrap())
        )
        .is_err());
    }

    #[test]
    fn adversary_forces_case_b_on_ring_online() {
        let eps = Weight::new(1, 10).unwrap();
        let out = ring_adversary(RingSubject::RingOnline, eps, CostModel::from_int(1)).unwrap();
        assert_eq!(out.case, RingCase::B { h1: 10, h2: 0 });
        assert!(out.replay_consistent);
        assert_eq!(out.ring.len(), 12);
        // 3q + eps against 2q + 2 eps
        assert_eq!(out.online_cost, Weight::new(31, 10).unwrap());
        assert_eq!(out.opt_cost, Weight::new(22, 10).unwrap());
        assert!(out.ratio >= out.case_bound);
    }

    #[test]
    fn adversary_punishes_sweep() {
        let eps = Weight::new(1, 10).unwrap();
        let out = ring_adversary(RingSubject::Sweep, eps, CostModel::from_int(1)).unwrap();
        assert!(matches!(out.case, RingCase::B { .. }));
        assert!(out.replay_consistent);
        assert!(out.ratio > Rational::new(3, 2));
    }
}
