use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use teamcost::dot::export_dot;
use teamcost::experiment::{run_ratio_experiment, ExperimentSpec, Family, Reference, Subject};
use teamcost::format::{
    parse_strategy, read_graph, write_graph, write_labels, write_strategy, GraphFile,
};
use teamcost::instances::{c_prime, path, random_ring, random_tree, seeded_rng, spider, star};
use teamcost::oracle::{optimal_cost_with, OracleConfig, SearchBound};
use teamcost::ring_online::{ring_adversary, RingCase, RingSubject};
use teamcost::tree_offline::cost_expl_with_labels;
use teamcost::tree_online::{tree_adversary, TreeSubject};
use teamcost::weight::{format_rational, rational_to_f64};
use teamcost::{
    competitive_ratio, gen_family_t, gen_ring_c1, gen_ring_c2, ring_offline, strategy_cost,
    validate_strategy, CostModel, Environment, FamilyTParams, Instance, Strategy, Topology, Weight,
};

const Q_VAR: &str = "TEAMCOST_Q";

/// Team exploration of weighted rings and trees.
#[derive(Parser)]
#[command(name = "teamcost", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal off-line strategy for a graph file: `solve [ring|tree] FILE`.
    Solve(SolveArgs),
    /// Exhaustive optimum for a small graph file.
    Oracle(OracleArgs),
    /// Run an on-line strategy on a graph file or against an adaptive adversary.
    Simulate(SimulateArgs),
    /// Write a generated instance as a graph file.
    Gen(GenArgs),
    /// Sweep an instance family and report on-line / optimal ratios as CSV.
    Ratio(RatioArgs),
    /// Graphviz rendering of a graph file, optionally annotated with a strategy.
    Dot(DotArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Optional expected kind followed by the graph file.
    #[arg(num_args = 1..=2, value_names = ["KIND", "FILE"], required = true)]
    args: Vec<String>,
    #[arg(long, value_parser = parse_weight)]
    q: Option<Weight>,
    /// Write the strategy listing here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the tree labeling dump here.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    file: PathBuf,
    #[arg(long, value_parser = parse_weight)]
    q: Option<Weight>,
    /// Agent cap; defaults to 2 on rings and the leaf count on trees.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, default_value_t = 12)]
    limit: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnlineKind {
    RingOnline,
    TreeOnline,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    RingOnline,
    Sweep,
    DfsPrime,
    Escort,
    ProbeAndCall,
}

#[derive(Args)]
struct SimulateArgs {
    kind: OnlineKind,
    /// Graph file; omit when using --adversary.
    file: Option<PathBuf>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyName>,
    /// `eps=<rational>` for rings, `l=<int>` for trees.
    #[arg(long)]
    adversary: Option<String>,
    #[arg(long, value_parser = parse_weight)]
    q: Option<Weight>,
    /// Write the move listing here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    family: GenFamily,
    /// Invoking cost recorded in the file.
    #[arg(long, global = true, value_parser = parse_weight)]
    q: Option<Weight>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenFamily {
    /// Ring (1, q, 1); needs --q.
    CPrime,
    /// All-eps ring of order h1 + h2 + 2.
    C1 {
        #[arg(long)]
        h1: usize,
        #[arg(long)]
        h2: usize,
        #[arg(long, value_parser = parse_weight)]
        eps: Weight,
    },
    /// Order-j ring with e_i = 2q and eps elsewhere; needs --q.
    C2 {
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, value_parser = parse_weight)]
        eps: Weight,
    },
    /// Lower-bound tree with spine parameter l and pendant lengths.
    FamilyT {
        #[arg(long)]
        l: usize,
        /// Comma-separated pendant lengths; defaults to all 1.
        #[arg(long, value_delimiter = ',')]
        pendants: Option<Vec<usize>>,
    },
    Star {
        #[arg(long)]
        leaves: usize,
        #[arg(long, value_parser = parse_weight, default_value = "1")]
        weight: Weight,
    },
    Path {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_weight, default_value = "1")]
        weight: Weight,
    },
    Spider {
        #[arg(long, value_delimiter = ',', required = true)]
        legs: Vec<usize>,
    },
    RandomRing {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        max_weight: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    RandomTree {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        max_weight: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct RatioArgs {
    /// JSON experiment spec; flags below are ignored when given.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_weight)]
    q: Vec<Weight>,
    #[arg(long, value_parser = parse_subject)]
    subject: Option<Subject>,
    #[arg(long, value_parser = parse_reference, default_value = "offline")]
    reference: Reference,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    samples: usize,
    #[arg(long, default_value_t = 10)]
    max_weight: u64,
    #[arg(long, value_delimiter = ',', value_parser = parse_weight)]
    eps: Vec<Weight>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DotArgs {
    file: PathBuf,
    /// Strategy listing to annotate the drawing with.
    #[arg(long)]
    strategy: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes, mapped to exit codes 2 and 3.
enum Failure {
    Input(anyhow::Error),
    Invariant(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<(), Failure>;

fn invariant(msg: impl Into<String>) -> Failure {
    Failure::Invariant(anyhow!(msg.into()))
}

fn parse_weight(s: &str) -> Result<Weight, String> {
    s.parse::<Weight>().map_err(|e| e.to_string())
}

fn parse_json_enum<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    parse_json_enum(s)
}

fn parse_subject(s: &str) -> Result<Subject, String> {
    parse_json_enum(s)
}

fn parse_reference(s: &str) -> Result<Reference, String> {
    parse_json_enum(s)
}

fn load_graph(path: &Path) -> anyhow::Result<GraphFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Flag first, then the file, then the environment.
fn resolve_q(flag: Option<Weight>, file: Option<Weight>) -> anyhow::Result<CostModel> {
    if let Some(q) = flag.or(file) {
        return Ok(CostModel::new(q));
    }
    match std::env::var(Q_VAR) {
        Ok(v) => Ok(CostModel::new(
            v.parse().map_err(|e| anyhow!("{Q_VAR}={v}: {e}"))?,
        )),
        Err(_) => bail!("no invoking cost: pass --q, set q in the file, or set {Q_VAR}"),
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes the listing and prints the cost line; fails on an invalid strategy.
fn report_strategy<G: Topology + ?Sized>(
    strategy: &Strategy,
    graph: &G,
    model: CostModel,
    out: Option<&Path>,
) -> Result<Weight, Failure> {
    let report = validate_strategy(graph, strategy, model);
    if !report.valid {
        return Err(invariant(format!(
            "emitted strategy is invalid: {:?}",
            report.error
        )));
    }
    let listing =
        write_strategy(strategy, graph, model).map_err(|e| Failure::Invariant(e.into()))?;
    if out.is_some() {
        emit(out, &listing)?;
        println!("COST {}", report.total_cost);
    } else {
        print!("{listing}");
    }
    Ok(report.total_cost)
}

fn solve(args: SolveArgs) -> Outcome {
    let (kind, file) = match args.args.as_slice() {
        [file] => (None, file),
        [kind, file] => (Some(kind.as_str()), file),
        _ => unreachable!("clap enforces one or two values"),
    };
    let graph = load_graph(Path::new(file))?;
    let model = resolve_q(args.q, graph.q)?;
    match (kind, &graph.instance) {
        (Some("ring") | None, Instance::Ring(ring)) => {
            if args.labels.is_some() {
                return Err(anyhow!("--labels applies to trees only").into());
            }
            report_strategy(&ring_offline(ring, model), ring, model, args.out.as_deref())?;
        }
        (Some("tree") | None, Instance::Tree(tree)) => {
            let (strategy, ctree, labels) = cost_expl_with_labels(tree, model);
            if let Some(p) = &args.labels {
                emit(Some(p), &write_labels(&ctree, &labels))?;
            }
            report_strategy(&strategy, tree, model, args.out.as_deref())?;
        }
        (Some(k @ ("ring" | "tree")), _) => {
            return Err(anyhow!("{file} does not hold a {k}").into());
        }
        (Some(k), _) => return Err(anyhow!("unknown kind `{k}`, expected ring or tree").into()),
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> Outcome {
    let graph = load_graph(&args.file)?;
    let model = resolve_q(args.q, graph.q)?;
    let config = OracleConfig {
        vertex_limit: args.limit,
        ..OracleConfig::default()
    };
    let cap = args.cap.unwrap_or_else(|| graph.instance.default_cap());
    let result = optimal_cost_with(&graph.instance, model, cap, &config)
        .map_err(|e| Failure::Input(e.into()))?;
    let cost = report_strategy(&result.witness, &graph.instance, model, args.out.as_deref())?;
    if cost != result.cost {
        return Err(invariant("witness cost differs from the search cost"));
    }
    eprintln!("STATES {}", result.expanded_states);
    Ok(())
}

fn adversary_param(spec: &str, key: &str) -> anyhow::Result<String> {
    match spec.split_once('=') {
        Some((k, v)) if k == key => Ok(v.to_string()),
        _ => bail!("--adversary expects {key}=<value>, got `{spec}`"),
    }
}

fn simulate(args: SimulateArgs) -> Outcome {
    match args.kind {
        OnlineKind::RingOnline => simulate_ring(args),
        OnlineKind::TreeOnline => simulate_tree(args),
    }
}

fn simulate_ring(args: SimulateArgs) -> Outcome {
    let subject = match args.strategy {
        None | Some(StrategyName::RingOnline) => RingSubject::RingOnline,
        Some(StrategyName::Sweep) => RingSubject::Sweep,
        Some(_) => return Err(anyhow!("not a ring strategy").into()),
    };
    if let Some(adv) = &args.adversary {
        let eps: Weight = adversary_param(adv, "eps")?
            .parse()
            .map_err(anyhow::Error::from)?;
        let model = resolve_q(args.q, None)?;
        let out = ring_adversary(subject, eps, model).map_err(|e| Failure::Input(e.into()))?;
        if !out.replay_consistent {
            return Err(invariant("replay on the fixed ring diverged"));
        }
        report_strategy(&out.trace.strategy, &out.ring, model, args.out.as_deref())?;
        let (name, h1, h2) = match out.case {
            RingCase::A { h1, h2 } => ("A", h1, h2),
            RingCase::B { h1, h2 } => ("B", h1, h2),
        };
        println!("CASE {name} h1={h1} h2={h2}");
        println!(
            "RING n={} weights={}",
            out.ring.len(),
            join(out.ring.weights())
        );
        println!("OPT {}", out.opt_cost);
        println!(
            "RATIO {} ~{:.6}",
            format_rational(&out.ratio),
            rational_to_f64(out.ratio)
        );
        println!(
            "DELTA {} ~{:.6}",
            format_rational(&out.delta),
            rational_to_f64(out.delta)
        );
        return Ok(());
    }
    let file = args
        .file
        .ok_or_else(|| anyhow!("give a graph file or --adversary"))?;
    let graph = load_graph(&file)?;
    let model = resolve_q(args.q, graph.q)?;
    let Instance::Ring(ring) = graph.instance else {
        return Err(anyhow!("{} does not hold a ring", file.display()).into());
    };
    let mut env = teamcost::RingEnvironment::new(ring.clone());
    let trace = subject
        .run(&mut env, model)
        .map_err(|e| Failure::Invariant(e.into()))?;
    print_online(&trace.strategy, &ring, model, args.out.as_deref(), |s| {
        strategy_cost(&ring_offline(&ring, s), s, &ring).expect("offline is legal")
    })
}

fn print_online<G: Topology + ?Sized>(
    strategy: &Strategy,
    graph: &G,
    model: CostModel,
    out: Option<&Path>,
    opt: impl Fn(CostModel) -> Weight,
) -> Outcome {
    let cost = report_strategy(strategy, graph, model, out)?;
    let opt = opt(model);
    println!("OPT {opt}");
    match competitive_ratio(cost, opt) {
        Ok(r) => println!("RATIO {} ~{:.6}", format_rational(&r), rational_to_f64(r)),
        Err(e) => println!("RATIO undefined ({e})"),
    }
    Ok(())
}

fn simulate_tree(args: SimulateArgs) -> Outcome {
    let subject = match args.strategy {
        None | Some(StrategyName::DfsPrime) => TreeSubject::DfsPrime,
        Some(StrategyName::Escort) => TreeSubject::Escort,
        Some(StrategyName::ProbeAndCall) => TreeSubject::ProbeAndCall,
        Some(_) => return Err(anyhow!("not a tree strategy").into()),
    };
    if let Some(adv) = &args.adversary {
        let l: usize = adversary_param(adv, "l")?
            .parse()
            .map_err(|e| anyhow!("l: {e}"))?;
        let model = resolve_q(args.q, None)?;
        let out = tree_adversary(subject, l, model).map_err(|e| Failure::Input(e.into()))?;
        if !out.replay_consistent || !out.isomorphic {
            return Err(invariant("realized tree is inconsistent with the run"));
        }
        report_strategy(&out.trace.strategy, &out.tree, model, args.out.as_deref())?;
        let l_list: Vec<String> = out.params.l_list.iter().map(|x| x.to_string()).collect();
        println!("L_LIST {}", l_list.join(","));
        println!("OPT_UPPER {}", out.opt_upper);
        println!("OPT {}", out.opt_exact);
        println!("SPINE_DISTANCE {}", out.spine_distance);
        println!(
            "RATIO {} ~{:.6}",
            format_rational(&out.ratio),
            rational_to_f64(out.ratio)
        );
        println!(
            "RATIO_BOUND {} ~{:.6}",
            format_rational(&out.ratio_bound),
            rational_to_f64(out.ratio_bound)
        );
        return Ok(());
    }
    let file = args
        .file
        .ok_or_else(|| anyhow!("give a graph file or --adversary"))?;
    let graph = load_graph(&file)?;
    let model = resolve_q(args.q, graph.q)?;
    let Instance::Tree(tree) = graph.instance else {
        return Err(anyhow!("{} does not hold a tree", file.display()).into());
    };
    let mut env = teamcost::TreeEnvironment::new(tree.clone());
    let trace = subject
        .run(&mut env as &mut dyn Environment, model)
        .map_err(|e| Failure::Invariant(e.into()))?;
    print_online(&trace.strategy, &tree, model, args.out.as_deref(), |m| {
        strategy_cost(&teamcost::cost_expl(&tree, m), m, &tree).expect("offline is legal")
    })
}

fn join(weights: &[Weight]) -> String {
    weights
        .iter()
        .map(|w| w.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn generate(args: GenArgs) -> Outcome {
    let need_q = || args.q.ok_or_else(|| anyhow!("this family needs --q"));
    let gen = |e: teamcost::GenError| Failure::Input(e.into());
    let instance = match args.family {
        GenFamily::CPrime => Instance::Ring(c_prime(need_q()?).map_err(gen)?),
        GenFamily::C1 { h1, h2, eps } => Instance::Ring(gen_ring_c1(h1, h2, eps).map_err(gen)?),
        GenFamily::C2 { i, j, eps } => {
            Instance::Ring(gen_ring_c2(i, j, eps, CostModel::new(need_q()?)).map_err(gen)?)
        }
        GenFamily::FamilyT { l, pendants } => {
            let list = pendants.unwrap_or_else(|| vec![1; l]);
            let params = FamilyTParams::new(l, list).map_err(gen)?;
            Instance::Tree(gen_family_t(&params).map_err(gen)?)
        }
        GenFamily::Star { leaves, weight } => Instance::Tree(star(leaves, weight).map_err(gen)?),
        GenFamily::Path { n, weight } => Instance::Tree(path(n, weight).map_err(gen)?),
        GenFamily::Spider { legs } => Instance::Tree(spider(&legs).map_err(gen)?),
        GenFamily::RandomRing {
            n,
            max_weight,
            seed,
        } => Instance::Ring(random_ring(&mut seeded_rng(seed), n, max_weight).map_err(gen)?),
        GenFamily::RandomTree {
            n,
            max_weight,
            seed,
        } => Instance::Tree(random_tree(&mut seeded_rng(seed), n, max_weight).map_err(gen)?),
    };
    emit(
        args.out.as_deref(),
        &write_graph(&GraphFile::new(instance, args.q)),
    )?;
    Ok(())
}

fn ratio(args: RatioArgs) -> Outcome {
    let spec = match &args.spec {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<ExperimentSpec>(&text)
                .with_context(|| format!("parsing {}", p.display()))?
        }
        None => ExperimentSpec {
            family: args
                .family
                .ok_or_else(|| anyhow!("--family or --spec is required"))?,
            sizes: args.sizes,
            q: if args.q.is_empty() {
                vec![resolve_q(None, None)?.q]
            } else {
                args.q
            },
            subject: args
                .subject
                .ok_or_else(|| anyhow!("--subject is required"))?,
            reference: args.reference,
            seed: args.seed,
            samples: args.samples,
            max_weight: args.max_weight,
            eps: args.eps,
        },
    };
    let report = run_ratio_experiment(&spec).map_err(|e| Failure::Input(e.into()))?;
    emit(args.out.as_deref(), &report.to_csv())?;
    eprintln!("{}", report.summary());
    Ok(())
}

fn dot(args: DotArgs) -> Outcome {
    let graph = load_graph(&args.file)?;
    let strategy = match &args.strategy {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let listing = parse_strategy(&text).map_err(anyhow::Error::from)?;
            let model = CostModel::new(graph.q.unwrap_or(Weight::ZERO));
            if let Err(e) = strategy_cost(&listing.strategy, model, &graph.instance) {
                return Err(anyhow!("strategy does not fit the graph: {e}").into());
            }
            Some(listing.strategy)
        }
        None => None,
    };
    emit(
        args.out.as_deref(),
        &export_dot(&graph.instance, strategy.as_ref()),
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::Simulate(a) => simulate(a),
        Command::Gen(a) => generate(a),
        Command::Ratio(a) => ratio(a),
        Command::Dot(a) => dot(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(e)) => {
            eprintln!("invariant violation: {e:#}");
            ExitCode::from(3)
        }
    }
}
