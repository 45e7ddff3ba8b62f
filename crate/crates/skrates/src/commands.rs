use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use skrates_core::becbsc::{self, SweepTable};
use skrates_core::models::{
    classify_source_regime, regime_thresholds, BecBscModel, BinaryStateModel, GaussianStateModel,
};
use skrates_core::sim::{JointSim, SeparateSim, SimReport};
use skrates_core::state::{
    binary_state_inner, binary_state_outer, gaussian_inner_closed, gaussian_inner_full, gaussian_outer,
};
use skrates_core::{BoundResult, Prob};

use crate::config::{self, Acceptance, Check, JointFile, SeparateFile};
use crate::{
    BecBscCommand, BoundChoice, Cli, CliError, Command, Format, Scheme, SimulateArgs, StateCommand, SweepArgs,
};

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn prob(what: &str, x: f64) -> Result<Prob, CliError> {
    Prob::new(x).map_err(|_| CliError::Usage(format!("--{what} must lie in [0, 1], got {x}")))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

/// CSV with header `beta,outer,i_sep,i_sep_1l,i_jscc`, six decimals, `\n`
/// line endings.
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut s = String::from("beta,outer,i_sep,i_sep_1l,i_jscc\n");
    for r in &table.rows {
        writeln!(s, "{:.6},{:.6},{:.6},{:.6},{:.6}", r.beta, r.outer, r.i_sep, r.i_sep_1l, r.i_jscc).unwrap();
    }
    s
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    if a.steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    prob("beta-min", a.beta_min)?;
    prob("beta-max", a.beta_max)?;
    if a.beta_min > a.beta_max {
        return Err(usage("--beta-min exceeds --beta-max"));
    }
    let grid = becbsc::linear_grid(a.beta_min, a.beta_max, a.steps).map_err(usage)?;
    let table = becbsc::sweep(prob("zeta", a.zeta)?, prob("eps", a.eps)?, &grid).map_err(usage)?;
    let text = match a.format {
        Format::Csv => sweep_csv(&table),
        Format::Json => pretty(&table),
    };
    emit(&text, a.out.as_deref())
}

fn cmd_point(zeta: f64, eps: f64, beta: f64, bound: BoundChoice) -> Result<(), CliError> {
    let model = BecBscModel::new(zeta, beta, eps).map_err(usage)?;
    let all: [(BoundChoice, &str, fn(&BecBscModel) -> BoundResult); 4] = [
        (BoundChoice::Outer, "outer", becbsc::outer_bound),
        (BoundChoice::Sep, "i_sep", becbsc::inner_separate),
        (BoundChoice::Sep1l, "i_sep_1l", becbsc::inner_separate_1layer),
        (BoundChoice::Joint, "i_jscc", becbsc::inner_joint),
    ];
    let mut obj = serde_json::Map::new();
    obj.insert("zeta".into(), json!(zeta));
    obj.insert("epsilon".into(), json!(eps));
    obj.insert("beta".into(), json!(beta));
    for (choice, name, f) in all {
        if bound == BoundChoice::All || bound == choice {
            obj.insert(name.into(), serde_json::to_value(f(&model)).expect("serializable"));
        }
    }
    emit(&pretty(&Value::Object(obj)), None)
}

fn cmd_classify(eps: f64, beta: f64) -> Result<(), CliError> {
    let (e, b) = (prob("eps", eps)?, prob("beta", beta)?);
    let regime = classify_source_regime(b, e).map_err(usage)?;
    let [t1, t2, t3] = regime_thresholds(e);
    let v = json!({
        "beta": beta,
        "epsilon": eps,
        "regime": regime,
        "thresholds": {"degraded_below": t1, "less_noisy_below": t2, "more_capable_below": t3},
    });
    emit(&pretty(&v), None)
}

fn state_json(outer: &BoundResult, inner: &BoundResult, extra: Value) -> Value {
    let mut v = json!({
        "outer": outer.rk,
        "inner": inner.rk,
        "gap": outer.rk - inner.rk,
        "argmax": {"outer": outer.argmax, "inner": inner.argmax},
        "inner_feasible": inner.feasible,
        "inner_certified": inner.certified,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn cmd_state(c: &StateCommand) -> Result<(), CliError> {
    let v = match *c {
        StateCommand::Binary { a, zeta, beta, eps } => {
            let m = BinaryStateModel::new(a, zeta, beta, eps).map_err(usage)?;
            state_json(&binary_state_outer(&m), &binary_state_inner(&m), json!({}))
        }
        StateCommand::Gaussian { p, q, n1, n2, full } => {
            let m = GaussianStateModel::new(p, q, n1, n2).map_err(usage)?;
            let outer = gaussian_outer(&m).map_err(usage)?;
            let inner = if full { gaussian_inner_full(&m) } else { gaussian_inner_closed(&m) }.map_err(usage)?;
            state_json(&outer, &inner, json!({"method": if full { "full" } else { "closed_form" }}))
        }
    };
    emit(&pretty(&v), None)
}

#[derive(Serialize)]
struct SimOutput<'a, C: Serialize, B: Serialize> {
    scheme: &'static str,
    config: &'a C,
    bits: B,
    region: skrates_core::generic::InnerEval,
    report: &'a SimReport,
    acceptance: Vec<Check>,
}

fn finish<C: Serialize, B: Serialize>(
    scheme: &'static str,
    cfg: &C,
    bits: B,
    region: skrates_core::generic::InnerEval,
    report: &SimReport,
    acc: &Acceptance,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let checks = acc.evaluate(report);
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} = {} vs threshold {}", c.name, c.value, c.threshold))
        .collect();
    let doc = SimOutput { scheme, config: cfg, bits, region, report, acceptance: checks };
    emit(&pretty(&doc), out)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Acceptance(failed.join("; ")))
    }
}

fn sim_error(e: skrates_core::Error) -> CliError {
    use skrates_core::Error as E;
    match e {
        // Codebook construction can fail for sampling reasons at run time;
        // everything else reflects the configuration.
        e @ E::EmptyTypicalSet(_) => CliError::Config(format!("delta: {e}")),
        e => CliError::Config(e.to_string()),
    }
}

fn cmd_simulate(a: &SimulateArgs) -> Result<(), CliError> {
    match a.scheme {
        Scheme::Joint => {
            let mut f: JointFile = config::read(&a.config)?;
            f.trials = a.trials.unwrap_or(f.trials);
            f.seed = a.seed.unwrap_or(f.seed);
            let sys = f.model.system()?;
            let sim = JointSim::new(f.sim_config(), &sys, &f.aux()?).map_err(sim_error)?;
            let report = sim.run().map_err(sim_error)?;
            finish("joint", &f, sim.bits(), sim.region(), &report, &f.acceptance, a.out.as_deref())
        }
        Scheme::Separate => {
            let mut f: SeparateFile = config::read(&a.config)?;
            f.trials = a.trials.unwrap_or(f.trials);
            f.seed = a.seed.unwrap_or(f.seed);
            let sys = f.model.system()?;
            let sim = SeparateSim::new(f.sim_config(), &sys, &f.aux()?).map_err(sim_error)?;
            let report = sim.run().map_err(sim_error)?;
            finish("separate", &f, sim.bits(), sim.region(), &report, &f.acceptance, a.out.as_deref())
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Becbsc { command: BecBscCommand::Sweep(a) } => cmd_sweep(a),
        Command::Becbsc { command: BecBscCommand::Point { zeta, eps, beta, bound } } => {
            cmd_point(*zeta, *eps, *beta, *bound)
        }
        Command::Classify { eps, beta } => cmd_classify(*eps, *beta),
        Command::State { command } => cmd_state(command),
        Command::Simulate(a) => cmd_simulate(a),
    }
}
