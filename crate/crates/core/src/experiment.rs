//! Ratio sweeps: on-line cost against a reference optimum over instance families.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::HiddenGraph;
use crate::error::GenError;
use crate::graph::{Instance, Ring, RootedTree};
use crate::instances::{c_prime, derive_seed, random_ring, random_tree, seeded_rng, star};
use crate::oracle::{optimal_cost, SearchBound};
use crate::ring_offline::ring_offline;
use crate::ring_online::{gen_ring_c1, gen_ring_c2, ring_adversary, RingSubject};
use crate::strategy::{strategy_cost, CostModel};
use crate::tree_offline::cost_expl;
use crate::tree_online::{tree_adversary, TreeSubject};
use crate::weight::{format_rational, rational_to_f64, Rational, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `(1, q, 1)`; sizes are ignored.
    CPrime,
    /// All-`eps` ring of order `2s + 2`.
    C1,
    /// Ring with a `2q` edge at distance `q` and `s + 1` further `eps` edges.
    C2,
    /// Ring fixed by the adaptive adversary; sizes are ignored.
    AdaptiveRing,
    /// Tree fixed by the adaptive adversary with spine parameter `l = s`.
    FamilyT,
    RandomRing,
    RandomTree,
    /// `s` leaves on edges of weight `max_weight`.
    Star,
}

impl Family {
    fn is_ring(self) -> bool {
        matches!(
            self,
            Family::CPrime | Family::C1 | Family::C2 | Family::AdaptiveRing | Family::RandomRing
        )
    }

    fn is_random(self) -> bool {
        matches!(self, Family::RandomRing | Family::RandomTree)
    }

    fn uses_sizes(self) -> bool {
        !matches!(self, Family::CPrime | Family::AdaptiveRing)
    }

    fn uses_eps(self) -> bool {
        matches!(self, Family::C1 | Family::C2 | Family::AdaptiveRing)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::CPrime => "c-prime",
            Family::C1 => "c1",
            Family::C2 => "c2",
            Family::AdaptiveRing => "adaptive-ring",
            Family::FamilyT => "family-t",
            Family::RandomRing => "random-ring",
            Family::RandomTree => "random-tree",
            Family::Star => "star",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subject {
    RingOnline,
    Sweep,
    DfsPrime,
    Escort,
    ProbeAndCall,
}

impl Subject {
    pub fn ring(self) -> Option<RingSubject> {
        match self {
            Subject::RingOnline => Some(RingSubject::RingOnline),
            Subject::Sweep => Some(RingSubject::Sweep),
            _ => None,
        }
    }

    pub fn tree(self) -> Option<TreeSubject> {
        match self {
            Subject::DfsPrime => Some(TreeSubject::DfsPrime),
            Subject::Escort => Some(TreeSubject::Escort),
            Subject::ProbeAndCall => Some(TreeSubject::ProbeAndCall),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match (self.ring(), self.tree()) {
            (Some(r), _) => r.name(),
            (_, Some(t)) => t.name(),
            _ => unreachable!("every subject is a ring or tree strategy"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// Linear-time exact solver.
    #[default]
    Offline,
    /// Exhaustive search; rows too large for it fail.
    Oracle,
    /// Closed-form upper bound on the optimum (family-t only).
    Upper,
}

fn one() -> usize {
    1
}

fn default_max_weight() -> u64 {
    10
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub family: Family,
    #[serde(default)]
    pub sizes: Vec<usize>,
    pub q: Vec<Weight>,
    pub subject: Subject,
    #[serde(default)]
    pub reference: Reference,
    #[serde(default)]
    pub seed: u64,
    /// Instances per (size, q) for random families.
    #[serde(default = "one")]
    pub samples: usize,
    #[serde(default = "default_max_weight")]
    pub max_weight: u64,
    #[serde(default)]
    pub eps: Vec<Weight>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::InvalidParameter(m.to_string()));
        if self.q.is_empty() {
            return bad("q range is empty");
        }
        if self.family.uses_sizes() && self.sizes.is_empty() {
            return bad("size range is empty");
        }
        if self.family.uses_eps() && self.eps.is_empty() {
            return bad("eps range is empty");
        }
        if self.samples < 1 {
            return bad("samples must be at least 1");
        }
        if self.family.is_ring() && self.subject.ring().is_none() {
            return bad("ring families need a ring subject");
        }
        if !self.family.is_ring() && self.subject.tree().is_none() {
            return bad("tree families need a tree subject");
        }
        if self.reference == Reference::Upper && self.family != Family::FamilyT {
            return bad("the upper reference exists only for family-t");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioRow {
    pub index: usize,
    pub size: Option<usize>,
    pub eps: Option<Weight>,
    pub q: Weight,
    pub sample: usize,
    pub online: Option<Weight>,
    pub reference: Option<Weight>,
    pub ratio: Option<Rational>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioReport {
    pub family: Family,
    pub subject: Subject,
    pub rows: Vec<RatioRow>,
    pub max_ratio: Option<Rational>,
    /// Row index of `max_ratio`; the first one on ties.
    pub argmax: Option<usize>,
}

impl RatioReport {
    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let opt = |x: Option<String>| x.unwrap_or_default();
        w.write_record([
            "index",
            "family",
            "subject",
            "size",
            "eps",
            "q",
            "sample",
            "online",
            "reference",
            "ratio",
            "ratio_approx",
            "status",
        ])
        .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.index.to_string(),
                self.family.name().to_string(),
                self.subject.name().to_string(),
                opt(r.size.map(|s| s.to_string())),
                opt(r.eps.map(|e| e.to_string())),
                r.q.to_string(),
                r.sample.to_string(),
                opt(r.online.map(|c| c.to_string())),
                opt(r.reference.map(|c| c.to_string())),
                opt(r.ratio.map(|x| format_rational(&x))),
                opt(r.ratio.map(|x| format!("{:.6}", rational_to_f64(x)))),
                r.error.clone().unwrap_or_else(|| "ok".to_string()),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn summary(&self) -> String {
        match (self.max_ratio, self.argmax) {
            (Some(m), Some(i)) => format!(
                "rows {} failed {} max ratio {} (~{:.6}) at row {}",
                self.rows.len(),
                self.failed(),
                format_rational(&m),
                rational_to_f64(m),
                i
            ),
            _ => format!("rows {} failed {} no ratio", self.rows.len(), self.failed()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Job {
    index: usize,
    size: Option<usize>,
    eps: Option<Weight>,
    q: Weight,
    sample: usize,
}

fn ring_reference(ring: &Ring, model: CostModel, reference: Reference) -> Result<Weight, String> {
    match reference {
        Reference::Oracle => optimal_cost(ring, model, ring.default_cap())
            .map(|r| r.cost)
            .map_err(|e| e.to_string()),
        _ => strategy_cost(&ring_offline(ring, model), model, ring).map_err(|e| e.to_string()),
    }
}

fn tree_reference(
    tree: &RootedTree,
    model: CostModel,
    reference: Reference,
) -> Result<Weight, String> {
    match reference {
        Reference::Oracle => optimal_cost(tree, model, tree.default_cap())
            .map(|r| r.cost)
            .map_err(|e| e.to_string()),
        _ => strategy_cost(&cost_expl(tree, model), model, tree).map_err(|e| e.to_string()),
    }
}

fn build(spec: &ExperimentSpec, job: &Job, model: CostModel) -> Result<Instance, String> {
    let size = job.size.unwrap_or(0);
    let eps = job.eps.unwrap_or_else(Weight::one);
    let err = |e: GenError| e.to_string();
    let mut rng = seeded_rng(derive_seed(spec.seed, size as u64, job.sample as u64));
    Ok(match spec.family {
        Family::CPrime => Instance::Ring(c_prime(job.q).map_err(err)?),
        Family::C1 => Instance::Ring(gen_ring_c1(size, size, eps).map_err(err)?),
        Family::C2 => {
            let steps = model
                .q
                .checked_div(eps)
                .filter(|s| s.is_integer())
                .ok_or("q must be a positive multiple of eps")?
                .to_integer() as usize;
            Instance::Ring(gen_ring_c2(steps, steps + size + 2, eps, model).map_err(err)?)
        }
        Family::RandomRing => {
            Instance::Ring(random_ring(&mut rng, size, spec.max_weight).map_err(err)?)
        }
        Family::RandomTree => {
            Instance::Tree(random_tree(&mut rng, size, spec.max_weight).map_err(err)?)
        }
        Family::Star => Instance::Tree(star(size, Weight::from_int(spec.max_weight)).map_err(err)?),
        Family::AdaptiveRing | Family::FamilyT => {
            unreachable!("adaptive families build no static instance")
        }
    })
}

fn run_job(spec: &ExperimentSpec, job: &Job) -> Result<(Weight, Weight), String> {
    let model = CostModel::new(job.q);
    match spec.family {
        Family::AdaptiveRing => {
            let subject = spec.subject.ring().expect("validated");
            let out = ring_adversary(subject, job.eps.expect("eps sweep"), model)
                .map_err(|e| e.to_string())?;
            let reference = ring_reference(&out.ring, model, spec.reference)?;
            Ok((out.online_cost, reference))
        }
        Family::FamilyT => {
            let subject = spec.subject.tree().expect("validated");
            let out = tree_adversary(subject, job.size.expect("size sweep"), model)
                .map_err(|e| e.to_string())?;
            let reference = match spec.reference {
                Reference::Upper => out.opt_upper,
                Reference::Offline => out.opt_exact,
                Reference::Oracle => tree_reference(&out.tree, model, Reference::Oracle)?,
            };
            Ok((out.online_cost, reference))
        }
        _ => match build(spec, job, model)? {
            Instance::Ring(ring) => {
                let subject = spec.subject.ring().expect("validated");
                let mut env = HiddenGraph::new(ring.clone());
                let trace = subject.run(&mut env, model).map_err(|e| e.to_string())?;
                Ok((trace.cost, ring_reference(&ring, model, spec.reference)?))
            }
            Instance::Tree(tree) => {
                let subject = spec.subject.tree().expect("validated");
                let mut env = HiddenGraph::new(tree.clone());
                let trace = subject.run(&mut env, model).map_err(|e| e.to_string())?;
                Ok((trace.cost, tree_reference(&tree, model, spec.reference)?))
            }
        },
    }
}

/// Runs every row in parallel; rows come back in sweep order, so identical specs give
/// identical reports.
pub fn run_ratio_experiment(spec: &ExperimentSpec) -> Result<RatioReport, GenError> {
    spec.validate()?;
    let sizes: Vec<Option<usize>> = if spec.family.uses_sizes() {
        spec.sizes.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let eps: Vec<Option<Weight>> = if spec.family.uses_eps() {
        spec.eps.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let samples = if spec.family.is_random() {
        spec.samples
    } else {
        1
    };
    let mut jobs = Vec::new();
    for &size in &sizes {
        for &q in &spec.q {
            for &e in &eps {
                for sample in 0..samples {
                    jobs.push(Job {
                        index: jobs.len(),
                        size,
                        eps: e,
                        q,
                        sample,
                    });
                }
            }
        }
    }
    let rows: Vec<RatioRow> = jobs
        .par_iter()
        .map(|job| {
            let (online, reference, ratio, error) = match run_job(spec, job) {
                Ok((on, re)) => match on.checked_div(re) {
                    Some(r) => (Some(on), Some(re), Some(r), None),
                    None => (
                        Some(on),
                        Some(re),
                        None,
                        Some("reference cost is zero".to_string()),
                    ),
                },
                Err(e) => (None, None, None, Some(e)),
            };
            RatioRow {
                index: job.index,
                size: job.size,
                eps: job.eps,
                q: job.q,
                sample: job.sample,
                online,
                reference,
                ratio,
                error,
            }
        })
        .collect();
    let mut max_ratio: Option<Rational> = None;
    let mut argmax = None;
    for row in &rows {
        if let Some(r) = row.ratio {
            if max_ratio.is_none_or(|m| r > m) {
                max_ratio = Some(r);
                argmax = Some(row.index);
            }
        }
    }
    Ok(RatioReport {
        family: spec.family,
        subject: spec.subject,
        rows,
        max_ratio,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, subject: Subject) -> ExperimentSpec {
        ExperimentSpec {
            family,
            sizes: vec![],
            q: vec![Weight::from_int(1)],
            subject,
            reference: Reference::Offline,
            seed: 0,
            samples: 1,
            max_weight: 10,
            eps: vec![],
        }
    }

    #[test]
    fn c_prime_ratios_are_exact() {
        let mut s = spec(Family::CPrime, Subject::RingOnline);
        s.q = [1, 2, 10, 100, 1000]
            .into_iter()
            .map(Weight::from_int)
            .collect();
        let report = run_ratio_experiment(&s).unwrap();
        // at q = 1 the ring is uniform and both sides pay q + 2
        assert_eq!(report.rows[0].ratio, Some(Rational::from_integer(1)));
        for (row, q) in report.rows[1..].iter().zip([2i128, 10, 100, 1000]) {
            assert_eq!(row.ratio, Some(Rational::new(2 * q + 1, q + 3)));
        }
        assert_eq!(report.argmax, Some(4));
    }

    #[test]
    fn random_sweeps_are_reproducible() {
        let mut s = spec(Family::RandomRing, Subject::RingOnline);
        s.sizes = vec![5, 9];
        s.samples = 4;
        s.seed = 11;
        let a = run_ratio_experiment(&s).unwrap();
        let b = run_ratio_experiment(&s).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 8);
        assert!(a.max_ratio.unwrap() <= Rational::from_integer(2));
    }

    #[test]
    fn failed_rows_do_not_stop_the_sweep() {
        let mut s = spec(Family::RandomTree, Subject::DfsPrime);
        s.sizes = vec![5, 30];
        s.reference = Reference::Oracle;
        let report = run_ratio_experiment(&s).unwrap();
        assert!(report.rows[0].error.is_none());
        assert!(report.rows[1].error.is_some());
        assert_eq!(report.failed(), 1);
        assert!(report
            .to_csv()
            .lines()
            .nth(2)
            .unwrap()
            .contains("limited to 12"));
    }

    #[test]
    fn family_t_sweep() {
        let mut s = spec(Family::FamilyT, Subject::DfsPrime);
        s.sizes = vec![2, 5, 10];
        s.q = vec![Weight::ZERO];
        s.reference = Reference::Upper;
        let report = run_ratio_experiment(&s).unwrap();
        let ratios: Vec<_> = report.rows.iter().map(|r| r.ratio.unwrap()).collect();
        assert!(ratios.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn invalid_specs() {
        assert!(run_ratio_experiment(&spec(Family::CPrime, Subject::DfsPrime)).is_err());
        assert!(run_ratio_experiment(&spec(Family::Star, Subject::DfsPrime)).is_err());
        let json = r#"{"family":"star","sizes":[3],"q":["1"],"subject":"dfs-prime"}"#;
        let parsed: ExperimentSpec = serde_json::from_str(json).unwrap();
        assert_eq!(parsed.max_weight, 10);
        assert!(run_ratio_experiment(&parsed).is_ok());
    }
}
