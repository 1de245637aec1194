//! `agentcast`: batch front end for the solvers, the validator and the oracle.
//!
//! Structured results go to stdout as JSON, a one-line summary to stderr.
//! Exit codes: 0 feasible / ok, 1 infeasible / rejected, 2 usage or input
//! error, 3 internal invariant failure.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use agentcast::generators::{random_line, random_tree, LineParams, TreeParams};
use agentcast::hardness::{build_digraph_reduction, build_graph_reduction};
use agentcast::line::{
    broadcast_cuts, broadcast_schedule, broadcast_set, convergecast_cuts, convergecast_decide, convergecast_schedule,
    delivery_decide, delivery_plan, potentials,
};
use agentcast::oracle::{
    max_surplus, oracle_broadcast_set, search_feasible, validate_line, validate_line_agents, validate_schedule,
    SearchConfig, SearchOutcome, SurplusOutcome, ValidationReport,
};
use agentcast::tree::{
    all_edge_potentials, broadcast_sources, broadcast_tables, convergecast_points, tree_delivery,
};
use agentcast::{
    instance_to_json, parse_instance, parse_schedule, Instance, InstanceDoc, LineInstance, Network, Point, Rational,
    Schedule, SolveError, Task,
};

#[derive(Parser)]
#[command(name = "agentcast", version, about = "Delivery, convergecast and broadcast by energy-sharing mobile agents")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide a task with the exact line and tree solvers.
    Solve(SolveArgs),
    /// Produce a schedule, validate it, and print it.
    Schedule(ScheduleArgs),
    /// Replay a schedule file against an instance.
    Validate(ValidateArgs),
    /// Brute-force search on a grid (small instances only).
    Oracle(OracleArgs),
    /// Write a generated instance document.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Time the line solvers across sizes and check linear scaling.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TaskKind {
    Delivery,
    Convergecast,
    Broadcast,
}

#[derive(Args)]
struct TaskArgs {
    /// Defaults to the task stored in the instance document.
    #[arg(long, value_enum)]
    task: Option<TaskKind>,
    /// Delivery: a coordinate (line) or node label. Broadcast: an agent index.
    #[arg(long)]
    source: Option<String>,
    /// Delivery target: a coordinate (line) or node label.
    #[arg(long)]
    target: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    task: TaskArgs,
    /// Include potentials, cut values and broadcast tables.
    #[arg(long)]
    emit_tables: bool,
    /// Instance document, or `-` for stdin.
    instance: String,
}

#[derive(Args)]
struct ScheduleArgs {
    #[command(flatten)]
    task: TaskArgs,
    /// Also write the bare schedule document here.
    #[arg(long, short)]
    out: Option<PathBuf>,
    instance: String,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    task: TaskArgs,
    instance: String,
    /// Schedule document, or any JSON object with a `schedule` field.
    schedule: String,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    task: TaskArgs,
    /// Grid step for positions and energies.
    #[arg(long, default_value = "1/4")]
    resolution: Rational,
    #[arg(long, default_value_t = 2_000_000)]
    max_states: usize,
    instance: String,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Random line: gaps in 1..=max-gap, energies in 0..=max-energy.
    Line {
        #[arg(long, default_value_t = 10)]
        agents: usize,
        #[arg(long, default_value_t = 5)]
        max_gap: i64,
        #[arg(long, default_value_t = 10)]
        max_energy: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random recursive tree with agents at random nodes.
    Tree {
        #[arg(long, default_value_t = 8)]
        nodes: usize,
        #[arg(long, default_value_t = 4)]
        agents: usize,
        #[arg(long, default_value_t = 3)]
        max_length: i64,
        #[arg(long, default_value_t = 4)]
        max_energy: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Directed partition gadget with a delivery task from s to t.
    PartitionDigraph(GadgetArgs),
    /// Undirected partition gadget with a delivery task from s to t.
    PartitionGraph(GadgetArgs),
}

#[derive(Args)]
struct GadgetArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<u64>,
    /// Multiplier for lengths and energies; 6 makes every length an integer.
    #[arg(long, default_value = "6")]
    scale: Rational,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [100_000usize, 1_000_000])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest accepted ratio between consecutive timings.
    #[arg(long, default_value_t = 15.0)]
    max_ratio: f64,
    /// Largest accepted time per size, in seconds.
    #[arg(long, default_value_t = 10.0)]
    max_seconds: f64,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Internal(m) => Failure::Internal(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<agentcast::ModelError> for Failure {
    fn from(e: agentcast::ModelError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// The printed document, whether the answer is positive, and a summary.
struct Report {
    doc: Value,
    ok: bool,
    summary: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Solve(a) => solve(&a),
        Cmd::Schedule(a) => schedule(&a),
        Cmd::Validate(a) => validate(&a),
        Cmd::Oracle(a) => oracle(&a),
        Cmd::Gen(g) => generate(&g),
        Cmd::Bench(a) => bench(&a),
    };
    match result {
        Ok(r) => {
            let text = serde_json::to_string_pretty(&r.doc).expect("json");
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout(), "{text}");
            eprintln!("{}", r.summary);
            ExitCode::from(if r.ok { 0 } else { 1 })
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn read_text(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))
    }
}

fn load(path: &str) -> Result<InstanceDoc, Failure> {
    Ok(parse_instance(&read_text(path)?)?)
}

fn net_of(inst: &Instance) -> Option<&Network> {
    match inst {
        Instance::Line(_) => None,
        Instance::Tree(t) => Some(&t.net),
        Instance::Graph(g) => Some(&g.net),
    }
}

fn agent_count(doc: &InstanceDoc) -> usize {
    match &doc.instance {
        Instance::Line(_) => doc.line_energies.len(),
        Instance::Tree(t) => t.agents.len(),
        Instance::Graph(g) => g.agents.len(),
    }
}

fn parse_point(doc: &InstanceDoc, s: &str) -> Result<Point, Failure> {
    match net_of(&doc.instance) {
        None => s
            .parse::<Rational>()
            .map(Point::Coord)
            .map_err(|e| Failure::Usage(format!("`{s}` is not a coordinate: {e}"))),
        Some(net) => {
            net.node_id(s)?;
            Ok(Point::node(s))
        }
    }
}

/// The task in document terms: flags override the document's task.
fn resolve_task(doc: &InstanceDoc, args: &TaskArgs) -> Result<Task, Failure> {
    let stored = doc.task.clone();
    let kind = match (args.task, &stored) {
        (Some(k), _) => k,
        (None, Some(Task::Delivery { .. })) => TaskKind::Delivery,
        (None, Some(Task::Convergecast)) => TaskKind::Convergecast,
        (None, Some(Task::Broadcast { .. })) => TaskKind::Broadcast,
        (None, None) => return Err(Failure::Usage("no --task given and the document has none".into())),
    };
    match kind {
        TaskKind::Convergecast => Ok(Task::Convergecast),
        TaskKind::Broadcast => {
            let source = match (&args.source, stored) {
                (Some(s), _) => {
                    let a: usize = s.parse().map_err(|_| Failure::Usage(format!("`{s}` is not an agent index")))?;
                    if a >= agent_count(doc) {
                        return Err(Failure::Usage(format!("no agent {a}")));
                    }
                    Some(a)
                }
                (None, Some(Task::Broadcast { source })) => source,
                _ => None,
            };
            Ok(Task::Broadcast { source })
        }
        TaskKind::Delivery => {
            let (mut s, mut t) = match stored {
                Some(Task::Delivery { source, target }) => (Some(source), Some(target)),
                _ => (None, None),
            };
            if let Some(x) = &args.source {
                s = Some(parse_point(doc, x)?);
            }
            if let Some(x) = &args.target {
                t = Some(parse_point(doc, x)?);
            }
            if let Instance::Line(l) = &doc.instance {
                s = s.or_else(|| Some(Point::Coord(l.position(0).clone())));
                t = t.or_else(|| Some(Point::Coord(l.position(l.n() - 1).clone())));
            }
            match (s, t) {
                (Some(source), Some(target)) => Ok(Task::Delivery { source, target }),
                _ => Err(Failure::Usage("delivery needs --source and --target".into())),
            }
        }
    }
}

fn coords(task: &Task) -> Result<(Rational, Rational), Failure> {
    match task {
        Task::Delivery { source, target } => match (source.coord(), target.coord()) {
            (Some(s), Some(t)) => Ok((s.clone(), t.clone())),
            _ => Err(Failure::Usage("line delivery needs coordinates".into())),
        },
        _ => unreachable!("delivery only"),
    }
}

/// Line documents may hold co-located agents; the solvers see them merged.
struct LineView<'a> {
    doc: &'a InstanceDoc,
}

impl<'a> LineView<'a> {
    fn new(doc: &'a InstanceDoc) -> Option<Self> {
        match &doc.instance {
            Instance::Line(_) => Some(LineView { doc }),
            _ => None,
        }
    }

    fn merge(&self) -> &agentcast::AgentMerge {
        self.doc.line_merge.as_ref().expect("line documents carry their merge")
    }

    fn merged_task(&self, task: &Task) -> Task {
        match task {
            Task::Broadcast { source: Some(a) } => Task::Broadcast { source: self.merge().merged_of(*a) },
            other => other.clone(),
        }
    }

    /// Document agents of merged agents.
    fn members(&self, merged: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let groups = self.merge().groups();
        let mut out: Vec<usize> = merged.into_iter().flat_map(|m| groups[m].iter().copied()).collect();
        out.sort();
        out
    }

    fn colocated(&self) -> bool {
        self.merge().groups().iter().any(|g| g.len() > 1)
    }

    /// Document agents as a path tree, co-located agents kept apart.
    fn unmerged_tree(&self, inst: &LineInstance) -> Result<agentcast::TreeInstance, Failure> {
        let base = inst.to_path_tree();
        let agents = self
            .doc
            .line_energies
            .iter()
            .enumerate()
            .map(|(d, e)| agentcast::Agent { node: self.merge().merged_of(d).expect("every agent is merged"), energy: e.clone() })
            .collect();
        Ok(agentcast::TreeInstance::new(base.net, agents)?)
    }

    /// Broadcast sources as document agents. Merging co-located agents loses
    /// bodies that could split up, so those instances also consult the tree
    /// tables on the unmerged path.
    fn broadcast_sources(&self, inst: &LineInstance) -> Result<(Vec<usize>, Vec<usize>), Failure> {
        let from_line = self.members(broadcast_set(inst));
        if !self.colocated() {
            return Ok((from_line.clone(), from_line));
        }
        let tree = self.unmerged_tree(inst)?;
        let nodes = broadcast_sources(&tree)?;
        let mut all: Vec<usize> = (0..tree.agents.len()).filter(|&a| nodes.contains(&tree.agents[a].node)).collect();
        all.extend(from_line.iter().copied());
        all.sort();
        all.dedup();
        Ok((from_line, all))
    }

    fn lift(&self, s: &Schedule) -> Result<Schedule, Failure> {
        Ok(self.merge().lift_with_energies(s, &self.doc.line_energies)?)
    }

    fn validate(&self, task: &Task, s: &Schedule) -> ValidationReport {
        validate_line_agents(self.merge().original_positions(), &self.doc.line_energies, task, s)
    }
}

fn task_json(task: &Task) -> Value {
    serde_json::to_value(task).expect("json")
}

fn describe(task: &Task) -> &'static str {
    match task {
        Task::Delivery { .. } => "delivery",
        Task::Convergecast => "convergecast",
        Task::Broadcast { .. } => "broadcast",
    }
}

fn verdict(task: &Task, feasible: bool) -> String {
    format!("{}: {}", describe(task), if feasible { "feasible" } else { "infeasible" })
}

// ---------------------------------------------------------------------------
// solve

fn solve(a: &SolveArgs) -> Result<Report, Failure> {
    let doc = load(&a.instance)?;
    let task = resolve_task(&doc, &a.task)?;
    let mut out = json!({ "task": task_json(&task) });
    let feasible = match (&doc.instance, &task) {
        (Instance::Line(inst), _) => solve_line(&LineView::new(&doc).expect("line"), inst, &task, a.emit_tables, &mut out)?,
        (Instance::Tree(tree), _) => solve_tree(tree, &task, a.emit_tables, &mut out)?,
        (Instance::Graph(_), _) => {
            // no polynomial solver exists for general graphs; small ones go to the oracle
            let cfg = SearchConfig::default();
            let found = decided(search_feasible(&doc.instance, &task, &cfg)?)?;
            out["method"] = json!("oracle");
            out["feasible"] = json!(found.is_some());
            out["surplus_or_deficit"] = Value::Null;
            out["witness"] = Value::Null;
            found.is_some()
        }
    };
    let summary = verdict(&task, feasible);
    Ok(Report { doc: out, ok: feasible, summary })
}

fn solve_line(view: &LineView, inst: &LineInstance, task: &Task, tables: bool, out: &mut Value) -> Result<bool, Failure> {
    let feasible = match task {
        Task::Delivery { .. } => {
            let (s, t) = coords(task)?;
            let d = delivery_decide(inst, &s, &t);
            out["feasible"] = json!(d.feasible);
            out["surplus_or_deficit"] = json!(d.surplus_or_deficit);
            out["witness"] = Value::Null;
            d.feasible
        }
        Task::Convergecast => {
            let d = convergecast_decide(inst);
            out["feasible"] = json!(d.feasible);
            let cuts = convergecast_cuts(inst);
            let best = cuts.iter().flatten().max().cloned();
            out["surplus_or_deficit"] = json!(best);
            out["witness"] = match &d.witness {
                Some((i, v)) if inst.n() > 1 => json!({
                    "cut": i,
                    "between": [inst.position(*i), inst.position(i + 1)],
                    "value": v,
                }),
                Some((_, v)) => json!({ "cut": 0, "value": v }),
                None => Value::Null,
            };
            d.feasible
        }
        Task::Broadcast { source } => {
            let (_, sources) = view.broadcast_sources(inst)?;
            let feasible = match source {
                Some(a) => sources.contains(a),
                None => !sources.is_empty(),
            };
            out["feasible"] = json!(feasible);
            // no single scalar; the per-cut values are in the tables
            out["surplus_or_deficit"] = Value::Null;
            out["witness"] = json!({ "sources": sources });
            feasible
        }
    };
    if tables {
        out["tables"] = json!({
            "positions": inst.positions(),
            "potentials": potentials(inst),
            "convergecast_cuts": convergecast_cuts(inst),
            "broadcast_cuts": broadcast_cuts(inst),
        });
    }
    Ok(feasible)
}

fn solve_tree(tree: &agentcast::TreeInstance, task: &Task, tables: bool, out: &mut Value) -> Result<bool, Failure> {
    let label = |u: usize| tree.net.label(u).to_string();
    let feasible = match task {
        Task::Delivery { source, target } => {
            let d = tree_delivery(tree, source, target)?;
            out["feasible"] = json!(d.feasible);
            out["surplus_or_deficit"] = json!(d.surplus_or_deficit);
            out["witness"] = Value::Null;
            d.feasible
        }
        Task::Convergecast => {
            let c = convergecast_points(tree)?;
            out["feasible"] = json!(c.feasible);
            out["surplus_or_deficit"] = json!(c.cuts.iter().filter_map(|x| x.value.clone()).max());
            out["witness"] = json!({
                "intervals": c.intervals,
                "node": c.node.map(label),
            });
            c.feasible
        }
        Task::Broadcast { source } => {
            let nodes = broadcast_sources(tree)?;
            let sources: Vec<usize> = (0..tree.agents.len()).filter(|&a| nodes.contains(&tree.agents[a].node)).collect();
            let feasible = match source {
                Some(a) => sources.contains(a),
                None => !sources.is_empty(),
            };
            out["feasible"] = json!(feasible);
            out["surplus_or_deficit"] = Value::Null;
            out["witness"] = json!({ "sources": sources, "nodes": nodes.into_iter().map(label).collect::<Vec<_>>() });
            feasible
        }
    };
    if tables {
        let pot = all_edge_potentials(tree);
        let edges: Vec<Value> = tree
            .net
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                json!({
                    "edge": e,
                    "u": label(edge.u),
                    "v": label(edge.v),
                    "potential_u": pot.from_side(&tree.net, e, edge.u),
                    "potential_v": pot.from_side(&tree.net, e, edge.v),
                })
            })
            .collect();
        let bt = broadcast_tables(tree)?;
        let n = bt.tree.agents.len();
        let broadcast: Vec<Value> = bt
            .tables
            .iter()
            .flatten()
            .map(|t| {
                let e = bt.tree.net.edge(t.edge);
                json!({
                    "from": bt.tree.net.label(t.from),
                    "to": bt.tree.net.label(e.other(t.from)),
                    "agents": t.agents,
                    "evacuation": t.evacuation,
                    "entries": t.matrix(n),
                })
            })
            .collect();
        out["tables"] = json!({ "edge_potentials": edges, "broadcast": broadcast });
    }
    Ok(feasible)
}

// ---------------------------------------------------------------------------
// schedule

fn schedule(a: &ScheduleArgs) -> Result<Report, Failure> {
    let doc = load(&a.instance)?;
    let task = resolve_task(&doc, &a.task)?;
    let plan = match &doc.instance {
        Instance::Line(inst) => line_schedule(&LineView::new(&doc).expect("line"), inst, &task)?,
        Instance::Tree(tree) => match &task {
            Task::Delivery { source, target } => tree_delivery(tree, source, target)?.schedule,
            _ => {
                return Err(Failure::Usage(
                    "tree schedules are built for delivery only; use `oracle` on small instances".into(),
                ))
            }
        },
        Instance::Graph(_) => decided(search_feasible(&doc.instance, &task, &SearchConfig::default())?)?,
    };
    let Some(plan) = plan else {
        let out = json!({ "task": task_json(&task), "feasible": false, "schedule": Value::Null });
        return Ok(Report { doc: out, ok: false, summary: verdict(&task, false) });
    };
    let report = match LineView::new(&doc) {
        Some(view) => view.validate(&task, &plan),
        None => validate_schedule(&doc.instance, &task, &plan),
    };
    if !report.passed() {
        return Err(Failure::Internal(format!(
            "generated schedule failed validation: {}",
            serde_json::to_string(&report).expect("json")
        )));
    }
    if let Some(path) = &a.out {
        let text = serde_json::to_string_pretty(&plan).expect("json");
        std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    let out = json!({
        "task": task_json(&task),
        "feasible": true,
        "surplus_or_deficit": report.surplus_at_target,
        "steps": plan.len(),
        "schedule": plan,
    });
    let summary = format!("{}, {} steps, validated", verdict(&task, true), plan.len());
    Ok(Report { doc: out, ok: true, summary })
}

fn line_schedule(view: &LineView, inst: &LineInstance, task: &Task) -> Result<Option<Schedule>, Failure> {
    let merged = view.merged_task(task);
    let made = match &merged {
        Task::Delivery { .. } => {
            let (s, t) = coords(task)?;
            delivery_plan(inst, &s, &t).map(|(_, s)| s)
        }
        Task::Convergecast => convergecast_schedule(inst),
        Task::Broadcast { source } => {
            let candidates: Vec<usize> = match source {
                Some(s) => vec![*s],
                None => broadcast_set(inst).into_iter().collect(),
            };
            if view.colocated() && candidates.iter().all(|c| !broadcast_set(inst).contains(c)) {
                let (_, all) = view.broadcast_sources(inst)?;
                let wanted = match task {
                    Task::Broadcast { source: Some(d) } => all.contains(d),
                    _ => !all.is_empty(),
                };
                if wanted {
                    return Err(Failure::Usage(
                        "broadcast here needs co-located agents to split up; no schedule construction for that case, \
                         use `oracle` on small instances"
                            .into(),
                    ));
                }
            }
            let Some(&src) = candidates.first() else { return Ok(None) };
            let check = |s: &Schedule| validate_line(inst, &Task::Broadcast { source: Some(src) }, s).passed();
            broadcast_schedule(inst, src, check)
        }
    };
    match made {
        Ok(s) => Ok(Some(view.lift(&s)?)),
        Err(SolveError::Infeasible) | Err(SolveError::NotASource(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

// ---------------------------------------------------------------------------
// validate

fn validate(a: &ValidateArgs) -> Result<Report, Failure> {
    let doc = load(&a.instance)?;
    let task = resolve_task(&doc, &a.task)?;
    let text = read_text(&a.schedule)?;
    let plan = match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) if m.contains_key("schedule") => {
            serde_json::from_value::<Schedule>(m["schedule"].clone()).map_err(|e| Failure::Usage(e.to_string()))?
        }
        _ => parse_schedule(&text)?,
    };
    let report = match LineView::new(&doc) {
        Some(view) => view.validate(&task, &plan),
        None => validate_schedule(&doc.instance, &task, &plan),
    };
    let ok = report.passed();
    let summary = match &report.violation {
        Some(v) => format!("rejected at step {}: {}", v.step, v.reason),
        None if ok => format!("{}: schedule valid", describe(&task)),
        None => format!("{}: schedule runs but does not achieve the task", describe(&task)),
    };
    Ok(Report { doc: serde_json::to_value(&report).expect("json"), ok, summary })
}

// ---------------------------------------------------------------------------
// oracle

fn decided(o: SearchOutcome) -> Result<Option<Schedule>, Failure> {
    match o {
        SearchOutcome::Found(s) => Ok(Some(s)),
        SearchOutcome::NotFound => Ok(None),
        SearchOutcome::Exhausted => Err(Failure::Usage("oracle state budget exhausted; raise --max-states".into())),
    }
}

fn oracle(a: &OracleArgs) -> Result<Report, Failure> {
    let doc = load(&a.instance)?;
    let task = resolve_task(&doc, &a.task)?;
    let cfg = SearchConfig { resolution: a.resolution.clone(), max_states: a.max_states };
    let view = LineView::new(&doc);
    if let (Some(v), Task::Broadcast { .. }) = (&view, &task) {
        if v.colocated() {
            // merged agents cannot split up, so search the path with every body kept
            let Instance::Line(inst) = &doc.instance else { unreachable!() };
            let tree = Instance::Tree(v.unmerged_tree(inst)?);
            return oracle_on(&tree, &task, &cfg, json!({ "task": task_json(&task), "resolution": a.resolution, "on": "path" }), None);
        }
    }
    let merged = view.as_ref().map_or(task.clone(), |v| v.merged_task(&task));
    let out = json!({ "task": task_json(&task), "resolution": a.resolution });
    oracle_on(&doc.instance, &merged, &cfg, out, view.as_ref())
}

fn oracle_on(
    inst: &Instance,
    task: &Task,
    cfg: &SearchConfig,
    mut out: Value,
    view: Option<&LineView>,
) -> Result<Report, Failure> {
    let lift = |s: Schedule| match view {
        Some(v) => v.lift(&s),
        None => Ok(s),
    };
    let feasible = match task {
        Task::Delivery { .. } => match max_surplus(inst, task, cfg)? {
            SurplusOutcome::Best { surplus, schedule } => {
                out["surplus"] = json!(surplus);
                out["schedule"] = json!(lift(schedule)?);
                true
            }
            SurplusOutcome::NotFound => false,
            SurplusOutcome::Exhausted => {
                return Err(Failure::Usage("oracle state budget exhausted; raise --max-states".into()))
            }
        },
        Task::Broadcast { source: None } => {
            let set = oracle_broadcast_set(inst, cfg)?;
            let sources = match view {
                Some(v) => v.members(set),
                None => set,
            };
            let ok = !sources.is_empty();
            out["sources"] = json!(sources);
            ok
        }
        _ => match decided(search_feasible(inst, task, cfg)?)? {
            Some(s) => {
                out["schedule"] = json!(lift(s)?);
                true
            }
            None => false,
        },
    };
    out["feasible"] = json!(feasible);
    Ok(Report { doc: out, ok: feasible, summary: format!("oracle {}", verdict(task, feasible)) })
}

// ---------------------------------------------------------------------------
// gen

fn generate(g: &GenCmd) -> Result<Report, Failure> {
    let (inst, task, summary) = match g {
        GenCmd::Line { agents, max_gap, max_energy, seed } => {
            let p = LineParams { agents: *agents, max_gap: *max_gap, max_energy: *max_energy };
            (Instance::Line(random_line(&p, *seed)), None, format!("line with {agents} agents, seed {seed}"))
        }
        GenCmd::Tree { nodes, agents, max_length, max_energy, seed } => {
            let p = TreeParams { nodes: *nodes, agents: *agents, max_length: *max_length, max_energy: *max_energy };
            (Instance::Tree(random_tree(&p, *seed)), None, format!("tree with {nodes} nodes, seed {seed}"))
        }
        GenCmd::PartitionDigraph(w) | GenCmd::PartitionGraph(w) => {
            let r = match g {
                GenCmd::PartitionDigraph(_) => build_digraph_reduction(&w.weights)?,
                _ => build_graph_reduction(&w.weights)?,
            };
            let r = r.scaled(&w.scale);
            let task = r.delivery();
            (Instance::Graph(r.instance), Some(task), format!("partition gadget for {:?}", w.weights))
        }
    };
    Ok(Report { doc: instance_to_json(&inst, task.as_ref()), ok: true, summary })
}

// ---------------------------------------------------------------------------
// bench

fn bench(a: &BenchArgs) -> Result<Report, Failure> {
    if a.sizes.is_empty() {
        return Err(Failure::Usage("no sizes".into()));
    }
    let mut rows = Vec::new();
    let mut times: Vec<f64> = Vec::new();
    for &n in &a.sizes {
        let inst = random_line(&LineParams { agents: n, max_gap: 10, max_energy: 20 }, a.seed);
        let (s, t) = (inst.position(0).clone(), inst.position(n - 1).clone());
        let mut parts = [f64::INFINITY; 3];
        let mut sink = 0usize;
        for _ in 0..3 {
            let clock = Instant::now();
            sink += usize::from(delivery_decide(&inst, &s, &t).feasible);
            parts[0] = parts[0].min(clock.elapsed().as_secs_f64());
            let clock = Instant::now();
            sink += usize::from(convergecast_decide(&inst).feasible);
            parts[1] = parts[1].min(clock.elapsed().as_secs_f64());
            let clock = Instant::now();
            sink += broadcast_set(&inst).len();
            parts[2] = parts[2].min(clock.elapsed().as_secs_f64());
        }
        let total: f64 = parts.iter().sum();
        rows.push(json!({
            "agents": n,
            "seconds": total,
            "delivery": parts[0],
            "convergecast": parts[1],
            "broadcast": parts[2],
            "checksum": sink,
        }));
        times.push(total);
    }
    let ratios: Vec<f64> = times.windows(2).map(|w| w[1] / w[0]).collect();
    let ok = ratios.iter().all(|&r| r <= a.max_ratio) && times.iter().all(|&t| t < a.max_seconds);
    let summary = format!(
        "bench: {} (ratios {:?}, limit {})",
        if ok { "linear" } else { "FAILED" },
        ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>(),
        a.max_ratio
    );
    let doc = json!({ "runs": rows, "ratios": ratios, "max_ratio": a.max_ratio, "ok": ok });
    Ok(Report { doc, ok, summary })
}
