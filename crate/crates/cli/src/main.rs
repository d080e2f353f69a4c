//! Command-line front end: topology tools, single placements, the exact
//! oracle, LP export and full experiment sweeps.
//!
//! Exit status: 0 on success, 1 when a run completes with failures
//! (infeasible cells, constraint violations), 2 on usage or input errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cdnplace::harness::{
    emit_plotdata, gen_scenario, rows_from_csv, run_experiment, write_outputs, Axis, PlotFilter, ScenarioKind, Settings,
};
use cdnplace::heuristics::{place, priority_sna, surrogate_ranking, HeuristicError, PriorityKind};
use cdnplace::model::{
    export_ilp, validate, violations_to_csv, Configuration, CostReport, DemandMatrix, IlpOptions, Instance, Params,
    SlaMode,
};
use cdnplace::oracle::{exact_optimal, OracleError, OracleLimits};
use cdnplace::topology::{
    amazon_na_fixture, generate_amazon_na, generate_random, Network, RandomTopology, StorageCosts, Topology,
};

#[derive(Parser)]
#[command(name = "cdnplace", version, about = "QoS-aware content placement across cloud availability zones")]
struct Cli {
    /// Settings file (TOML). Command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or check a topology file
    #[command(subcommand)]
    Topo(TopoCommand),
    /// List candidate paths with their zero-load latency
    Paths(PathsArgs),
    /// Betweenness centrality and priority of every zone
    Bc(BcArgs),
    /// Generate a demand matrix
    #[command(subcommand)]
    Scenario(ScenarioCommand),
    /// Run one placement heuristic and print the configuration
    Place(PlaceArgs),
    /// Check a configuration file against every model constraint
    Validate(ValidateArgs),
    /// Exhaustive optimum for a tiny instance
    Oracle(OracleArgs),
    /// Write the placement model as an LP file
    ExportLp(ExportArgs),
    /// Sweep scenarios, access rates and heuristics
    Experiment(ExperimentArgs),
    /// Extract one plot panel from a results table
    Plotdata(PlotArgs),
}

#[derive(Subcommand)]
enum TopoCommand {
    /// Print a generated topology
    Gen(TopoGenArgs),
    /// Parse a topology file and print a summary
    Check {
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Print a seeded demand matrix as CSV
    Gen(ScenarioGenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    AmazonNa,
    Random,
}

#[derive(Args)]
struct TopoGenArgs {
    #[arg(long, value_enum, default_value = "amazon-na")]
    shape: Shape,
    /// Zone count for random topologies
    #[arg(long, default_value_t = 8)]
    zones: usize,
    /// Region count for random topologies
    #[arg(long, default_value_t = 2)]
    regions: usize,
    #[arg(long, default_value_t = 0.3)]
    extra_edge_probability: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    inter_region_capacity: Option<f64>,
    #[arg(long)]
    inter_zone_capacity: Option<f64>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TopoSource {
    /// Topology file; defaults to the North America cloud
    #[arg(long, value_name = "FILE")]
    topology: Option<PathBuf>,
}

#[derive(Args)]
struct DemandSource {
    /// Demand CSV (`zone,content,requests`); overrides the scenario flags
    #[arg(long, value_name = "FILE")]
    demand: Option<PathBuf>,
    /// Scenario used when no demand file is given
    #[arg(long, default_value = "dense")]
    scenario: ScenarioKind,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    topology: TopoSource,
    #[command(flatten)]
    demand: DemandSource,
    /// Access rate per request, Mbps
    #[arg(long)]
    rate: Option<f64>,
    /// QoS latency threshold, ms
    #[arg(long)]
    q: Option<f64>,
    /// SLA percentage of paths that must meet the threshold
    #[arg(long)]
    sla: Option<f64>,
    /// Candidate paths per zone pair
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct PathsArgs {
    #[command(flatten)]
    topology: TopoSource,
    #[arg(long)]
    k: Option<usize>,
    /// Only paths from this zone id
    #[arg(long)]
    from: Option<u32>,
    /// Only paths to this zone id
    #[arg(long)]
    to: Option<u32>,
}

#[derive(Args)]
struct BcArgs {
    #[command(flatten)]
    topology: TopoSource,
}

#[derive(Args)]
struct ScenarioGenArgs {
    #[command(flatten)]
    topology: TopoSource,
    #[arg(long, default_value = "dense")]
    kind: ScenarioKind,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlaceArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = "wsna")]
    kind: PriorityKind,
    /// Configuration output; stdout when absent
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Configuration CSV (`x,m,k` and `y,m,n,x,k,amount` rows)
    config_file: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    /// Skip the SLA constraint
    #[arg(long)]
    lenient: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Drop the SLA constraint from the search
    #[arg(long)]
    lenient: bool,
    #[arg(long, default_value_t = OracleLimits::default().work_budget)]
    budget: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = IlpOptions::default().max_variables)]
    max_variables: usize,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    topology: TopoSource,
    /// Comma-separated scenarios
    #[arg(long, value_delimiter = ',')]
    scenarios: Vec<ScenarioKind>,
    /// `start:end:step` or a comma-separated list, Mbps
    #[arg(long)]
    rates: Option<String>,
    /// Comma-separated heuristics
    #[arg(long, value_delimiter = ',')]
    kinds: Vec<PriorityKind>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// `results.csv` written by `experiment`
    #[arg(long)]
    results: PathBuf,
    /// cost, providers, latency, sla or degree
    #[arg(long)]
    axis: String,
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

const FAILED: u8 = 1;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            // a closed pipe (`| head`) is not an error
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            r => r.context("writing to stdout"),
        },
    }
}

fn load_settings(path: Option<&Path>) -> Result<Settings<f64>> {
    match path {
        Some(p) => Ok(Settings::from_toml(&read(p)?)?),
        None => Ok(Settings::default()),
    }
}

/// The bundled North America cloud, rebuilt when the settings change its
/// link capacities.
fn default_topology(settings: &Settings<f64>) -> Result<Topology<f64>> {
    let fixture = amazon_na_fixture::<f64>();
    let costs = fixture.zones().iter().map(|z| z.storage_cost).collect();
    Ok(generate_amazon_na(settings.inter_region_capacity, settings.inter_zone_capacity, &StorageCosts::Fixed(costs))?)
}

fn load_topology(source: &TopoSource, settings: &Settings<f64>) -> Result<Topology<f64>> {
    match &source.topology {
        Some(path) => Topology::parse(&read(path)?).with_context(|| format!("parsing {}", path.display())),
        None => default_topology(settings),
    }
}

fn load_demand(source: &DemandSource, topo: &Topology<f64>, settings: &Settings<f64>) -> Result<DemandMatrix> {
    match &source.demand {
        Some(path) => DemandMatrix::from_csv(&read(path)?, topo).with_context(|| format!("parsing {}", path.display())),
        None => {
            let mut scenario = settings.scenario(source.scenario);
            scenario.seed = source.seed.unwrap_or(settings.seed);
            Ok(gen_scenario(topo, &scenario)?)
        }
    }
}

fn params(args: &ModelArgs, settings: &Settings<f64>) -> Params<f64> {
    let base = &settings.params;
    Params {
        access_rate: args.rate.unwrap_or(base.access_rate),
        qos_ms: args.q.unwrap_or(base.qos_ms),
        sla_pct: args.sla.unwrap_or(base.sla_pct),
        k_paths: args.k.unwrap_or(base.k_paths),
        ..base.clone()
    }
}

fn load_instance(args: &ModelArgs, settings: &Settings<f64>) -> Result<Instance<f64>> {
    let topo = load_topology(&args.topology, settings)?;
    let demand = load_demand(&args.demand, &topo, settings)?;
    Ok(Instance::build(topo, &settings.links, demand, params(args, settings))?)
}

fn parse_rates(text: &str) -> Result<Vec<f64>> {
    let number = |s: &str| s.trim().parse::<f64>().with_context(|| format!("invalid rate `{s}`"));
    let parts: Vec<&str> = text.split(':').collect();
    let rates = match parts.as_slice() {
        [start, end, step] => {
            let (start, end, step) = (number(start)?, number(end)?, number(step)?);
            if !(step > 0.0) || end < start {
                bail!("rate range `{text}` needs start <= end and a positive step");
            }
            let count = ((end - start) / step + 1e-9).floor() as usize;
            (0..=count).map(|i| start + step * i as f64).collect()
        }
        [_] => text.split(',').map(number).collect::<Result<Vec<_>>>()?,
        _ => bail!("rates must be `start:end:step` or a comma-separated list"),
    };
    if rates.is_empty() {
        bail!("no access rates given");
    }
    Ok(rates)
}

fn zone_ids(topo: &Topology<f64>, zones: &[usize]) -> String {
    zones.iter().map(|&m| topo.zones()[m].id.to_string()).collect::<Vec<_>>().join(" ")
}

fn summary(label: &str, report: &CostReport<f64>) -> String {
    format!(
        "{label}: storage {:.4}, bandwidth {:.4}, violation degree {:.4}, objective {:.4}; {} of {} paths over QoS ({:.2}%), SLA {}",
        report.storage,
        report.bandwidth,
        report.violation_degree,
        report.total,
        report.violating_paths,
        report.used_paths,
        100.0 * report.sla_violation_rate,
        if report.sla_met { "met" } else { "not met" }
    )
}

fn topo_gen(args: &TopoGenArgs, settings: &Settings<f64>) -> Result<u8> {
    let inter_region = args.inter_region_capacity.unwrap_or(settings.inter_region_capacity);
    let inter_zone = args.inter_zone_capacity.unwrap_or(settings.inter_zone_capacity);
    let topo = match args.shape {
        Shape::AmazonNa => {
            default_topology(&Settings { inter_region_capacity: inter_region, inter_zone_capacity: inter_zone, ..settings.clone() })?
        }
        Shape::Random => {
            let shape = RandomTopology {
                zones: args.zones,
                regions: args.regions,
                inter_zone_capacity: inter_zone,
                inter_region_capacity: inter_region,
                extra_edge_probability: args.extra_edge_probability,
            };
            generate_random(&shape, args.seed)?
        }
    };
    emit(args.out.as_deref(), &topo.to_text())?;
    Ok(0)
}

fn topo_check(file: &Path) -> Result<u8> {
    let topo: Topology<f64> = Topology::parse(&read(file)?).with_context(|| format!("parsing {}", file.display()))?;
    println!(
        "{}: {} zones, {} regions, {} links",
        file.display(),
        topo.zone_count(),
        topo.regions().len(),
        topo.undirected_count()
    );
    for &r in topo.regions() {
        let zones: Vec<usize> = topo.zones_in_region(r).collect();
        println!("region {r}: zones {}", zone_ids(&topo, &zones));
    }
    Ok(0)
}

fn paths(args: &PathsArgs, settings: &Settings<f64>) -> Result<u8> {
    let topo = load_topology(&args.topology, settings)?;
    let lookup = |id: Option<u32>| -> Result<Option<usize>> {
        id.map(|id| topo.index_of(id).with_context(|| format!("unknown zone {id}"))).transpose()
    };
    let (from, to) = (lookup(args.from)?, lookup(args.to)?);
    let p = &settings.params;
    let net = Network::build(topo, &settings.links, p.mu, p.latency_bound)?;
    let set = net.enumerate_paths(args.k.unwrap_or(p.k_paths));
    let topo = &net.topology;
    let mut out = String::from("provider,consumer,index,zones,base_latency_ms\n");
    for key in set.keys() {
        if from.is_some_and(|m| m != key.provider) || to.is_some_and(|n| n != key.consumer) {
            continue;
        }
        let path = set.get(key).unwrap();
        let hops = if path.is_empty() { topo.zones()[key.provider].id.to_string() } else { zone_ids(topo, &path.zones) };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            topo.zones()[key.provider].id,
            topo.zones()[key.consumer].id,
            key.index + 1,
            hops.replace(' ', "-"),
            path.base_latency
        ));
    }
    emit(None, &out)?;
    Ok(0)
}

fn bc(args: &BcArgs, settings: &Settings<f64>) -> Result<u8> {
    let topo = load_topology(&args.topology, settings)?;
    let p = &settings.params;
    let net = Network::build(topo, &settings.links, p.mu, p.latency_bound)?;
    let values = net.betweenness();
    let mut out = String::from("zone,region,betweenness,sna_priority\n");
    for (m, z) in net.topology.zones().iter().enumerate() {
        out.push_str(&format!("{},{},{},{}\n", z.id, z.region, values[m], priority_sna(m, &values)));
    }
    emit(None, &out)?;
    Ok(0)
}

fn scenario_gen(args: &ScenarioGenArgs, settings: &Settings<f64>) -> Result<u8> {
    let topo = load_topology(&args.topology, settings)?;
    let mut scenario = settings.scenario(args.kind);
    scenario.seed = args.seed.unwrap_or(settings.seed);
    let demand = gen_scenario(&topo, &scenario)?;
    emit(args.out.as_deref(), &demand.to_csv(&topo))?;
    Ok(0)
}

fn place_cmd(args: &PlaceArgs, settings: &Settings<f64>) -> Result<u8> {
    let inst = load_instance(&args.model, settings)?;
    let out = match place(&inst, args.kind) {
        Ok(out) => out,
        Err(e @ HeuristicError::Infeasible { .. }) => {
            eprintln!("{}: {e}", args.kind);
            return Ok(FAILED);
        }
        Err(e) => return Err(e.into()),
    };
    emit(args.out.as_deref(), &out.config.to_csv(inst.topology()))?;
    eprintln!("{}", summary(&args.kind.to_string(), &out.report));
    let ranking = surrogate_ranking(&inst, args.kind);
    eprintln!("surrogate order: {}", zone_ids(inst.topology(), &ranking));
    for (k, providers) in out.providers.iter().enumerate() {
        eprintln!("content {} providers: {}", k + 1, zone_ids(inst.topology(), providers));
    }
    if out.best_effort {
        eprintln!("warning: SLA cannot be met even with every zone hosting; best-effort configuration");
    }
    Ok(0)
}

fn validate_cmd(args: &ValidateArgs, settings: &Settings<f64>) -> Result<u8> {
    let inst = load_instance(&args.model, settings)?;
    let text = read(&args.config_file)?;
    let cfg = Configuration::from_csv(&text, inst.topology(), inst.content_count())
        .with_context(|| format!("parsing {}", args.config_file.display()))?;
    let mode = if args.lenient { SlaMode::Lenient } else { SlaMode::Strict };
    let violations = validate(&inst, &cfg, mode);
    if violations.is_empty() {
        let report = cdnplace::model::evaluate(&inst, &cfg)?.report;
        eprintln!("{}", summary("valid", &report));
        return Ok(0);
    }
    emit(None, &violations_to_csv(&violations))?;
    eprintln!("{} constraint violations", violations.len());
    Ok(FAILED)
}

fn oracle_cmd(args: &OracleArgs, settings: &Settings<f64>) -> Result<u8> {
    let inst = load_instance(&args.model, settings)?;
    let limits = OracleLimits { work_budget: args.budget, ..OracleLimits::default() };
    let mode = if args.lenient { SlaMode::Lenient } else { SlaMode::Strict };
    match exact_optimal(&inst, &limits, mode) {
        Ok(sol) => {
            emit(args.out.as_deref(), &sol.config.to_csv(inst.topology()))?;
            eprintln!("{}", summary("optimum", &sol.report));
            let s = &sol.stats;
            eprintln!("searched {} placements, {} nodes, {} complete assignments", s.placements, s.nodes, s.leaves);
            Ok(0)
        }
        Err(e @ (OracleError::Infeasible | OracleError::Budget { .. })) => {
            eprintln!("oracle: {e}");
            Ok(FAILED)
        }
        Err(e) => Err(e.into()),
    }
}

fn export_cmd(args: &ExportArgs, settings: &Settings<f64>) -> Result<u8> {
    let inst = load_instance(&args.model, settings)?;
    let model = export_ilp(&inst, &IlpOptions { max_variables: args.max_variables })?;
    emit(args.out.as_deref(), &model.to_lp_string())?;
    eprintln!("{} variables, {} constraints", model.variable_count(), model.rows.len());
    Ok(0)
}

fn experiment_cmd(args: &ExperimentArgs, settings: &Settings<f64>) -> Result<u8> {
    let mut settings = settings.clone();
    if !args.scenarios.is_empty() {
        settings.scenarios = args.scenarios.clone();
    }
    if let Some(rates) = &args.rates {
        settings.rates = parse_rates(rates)?;
    }
    if !args.kinds.is_empty() {
        settings.kinds = args.kinds.clone();
    }
    if let Some(seed) = args.seed {
        settings.seed = seed;
    }
    let topo = load_topology(&args.topology, &settings)?;
    let rows = run_experiment(&topo, &settings.links, &settings.params, &settings.scenario_list(), &settings.rates, &settings.kinds)?;
    let written = write_outputs(&args.out, &rows)?;
    let failed: Vec<_> = rows.iter().filter(|r| !r.is_ok()).collect();
    println!("{} cells, {} failed; wrote {} files to {}", rows.len(), failed.len(), written.len(), args.out.display());
    for r in &failed {
        eprintln!("{} @ {} Mbps {}: {}", r.scenario, r.rate, r.kind, r.status);
    }
    Ok(if failed.is_empty() { 0 } else { FAILED })
}

fn plot_cmd(args: &PlotArgs) -> Result<u8> {
    let axis: Axis = args.axis.parse()?;
    let rows = rows_from_csv(&read(&args.results)?)?;
    let filter = PlotFilter { scenario: args.scenario, rate: args.rate };
    emit(args.out.as_deref(), &emit_plotdata(&rows, axis, &filter)?)?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    let settings = load_settings(cli.config.as_deref())?;
    match &cli.command {
        Command::Topo(TopoCommand::Gen(args)) => topo_gen(args, &settings),
        Command::Topo(TopoCommand::Check { file }) => topo_check(file),
        Command::Paths(args) => paths(args, &settings),
        Command::Bc(args) => bc(args, &settings),
        Command::Scenario(ScenarioCommand::Gen(args)) => scenario_gen(args, &settings),
        Command::Place(args) => place_cmd(args, &settings),
        Command::Validate(args) => validate_cmd(args, &settings),
        Command::Oracle(args) => oracle_cmd(args, &settings),
        Command::ExportLp(args) => export_cmd(args, &settings),
        Command::Experiment(args) => experiment_cmd(args, &settings),
        Command::Plotdata(args) => plot_cmd(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
