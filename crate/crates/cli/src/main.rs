mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use valuelearn::distribution::Distribution;
use valuelearn::ext_f64;
use valuelearn::harness::{
    adversarial_demo, empirical_factor_with, rng_stream, run_pmac_experiment, streams,
    uniform_half, DemoOptions, ExperimentConfig, FactorReport, LearnerSpec,
};
use valuelearn::instances::{
    build_fb, gen_goemans_pair, gen_intersection_family, gen_random, RandomClass, RandomParams,
};
use valuelearn::oracles::Check;
use valuelearn::price_learning::{
    default_price_sample_size, pmac_with_prices, vq_with_prices, AgentOracle, PriceParams,
};
use valuelearn::query_learners::{
    vq_hypothesis_check, vq_learn_item_based, ClassTag, ValueOracle, VQ_CHECK_LIMIT,
};
use valuelearn::valuation::SetTable;
use valuelearn::{ItemSet, Sample, SetFunction, Valuation};

use io::{csv_string, items_text, Evaluable, Format, Output, SetLine};

/// Valuation classes, class checkers, and learners from samples, prices and
/// value queries.
#[derive(Parser)]
#[command(name = "valuelearn", version)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Family,
    #[value(name = "fB")]
    FB,
    Goemans,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnClass {
    Xos,
    Subadditive,
    OxsRLeaves,
    XosRTrees,
    UnitDemand,
    OxsConstTrees,
}

impl LearnClass {
    fn tag(self) -> &'static str {
        match self {
            LearnClass::Xos => "xos",
            LearnClass::Subadditive => "subadditive",
            LearnClass::OxsRLeaves => "oxs-r-leaves",
            LearnClass::XosRTrees => "xos-r-trees",
            LearnClass::UnitDemand => "unit-demand",
            LearnClass::OxsConstTrees => "oxs-const-trees",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PriceMode {
    Pmac,
    Vq,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance: an intersection family, its f_B target, a
    /// Goemans pair, or a random valuation.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        /// JSON object (or `@file`). family: {n,k}. fB: {n,k,b?}. goemans:
        /// {n,x}. random: {class,n,...shape}.
        #[arg(long)]
        params: Option<String>,
    },
    /// Train a sample-based learner on a JSONL file of samples.
    Learn {
        #[arg(long, value_enum)]
        class: LearnClass,
        /// Learner parameters as JSON (or `@file`), e.g. {"eps":0.1,"r":4}.
        #[arg(long)]
        params: Option<String>,
        /// One `{"set":{"n":..,"items":[..]},"value":..}` per line.
        #[arg(long)]
        train: PathBuf,
    },
    /// Evaluate a valuation or hypothesis on sets, or measure its empirical
    /// factor against a target.
    Eval {
        #[arg(long)]
        input: PathBuf,
        /// JSONL of sets; without it (and without --target) every subset is listed.
        #[arg(long)]
        sets: Option<PathBuf>,
        /// Target valuation; switches to empirical-factor mode.
        #[arg(long)]
        target: Option<PathBuf>,
        /// Test distribution JSON; uniform over subsets when absent.
        #[arg(long)]
        dist: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long = "M", default_value_t = 1000)]
        m_test: usize,
    },
    /// Run class checkers and report pass or a violation witness.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated subset of monotone,subadd,submod,gs,polyhedron.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "monotone,subadd,submod,gs,polyhedron"
        )]
        checks: Vec<String>,
    },
    /// Learn an item-based hypothesis from singleton value queries.
    VqLearn {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        class: ClassTag,
        #[arg(long = "R")]
        r: f64,
        /// Check the factor-R guarantee on every subset.
        #[arg(long)]
        verify: bool,
    },
    /// Learn from buy/no-buy answers of a simulated agent.
    PriceSim {
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum, default_value_t = PriceMode::Pmac)]
        mode: PriceMode,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Value bound; the next power of two above f([n]) when absent.
        #[arg(long = "H")]
        h: Option<u64>,
        /// Rounds; the sample-size bound from n, H, eta, eps, delta when absent.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        approx_beta: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Set distribution JSON; uniform over subsets when absent.
        #[arg(long)]
        dist: Option<PathBuf>,
        #[arg(long = "M", default_value_t = 1000)]
        m_test: usize,
        /// Class for vq mode.
        #[arg(long, default_value = "oxs-r-trees")]
        class: ClassTag,
        #[arg(long = "R", default_value_t = 1.0)]
        r: f64,
        /// Also write the decision log CSV here.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run a multi-seed experiment from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Train on draws from an intersection family and measure the error on
    /// members never seen.
    DemoLowerBound {
        #[arg(long, default_value_t = 65536)]
        n: usize,
        #[arg(long, default_value_t = 128)]
        k: usize,
        #[arg(long)]
        train_draws: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output {
        path: cli.out.clone(),
        format: cli.format,
    };
    match run(cli.command, cli.seed, &out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command, seed: u64, out: &Output) -> Result<()> {
    match cmd {
        Command::Gen { kind, params } => gen(kind, params.as_deref(), seed, out),
        Command::Learn {
            class,
            params,
            train,
        } => learn(class, params.as_deref(), &train, seed, out),
        Command::Eval {
            input,
            sets,
            target,
            dist,
            eps,
            m_test,
        } => eval(&input, sets, target, dist, eps, m_test, seed, out),
        Command::Verify { input, checks } => verify(&input, &checks, out),
        Command::VqLearn {
            target,
            class,
            r,
            verify,
        } => vq_learn(&target, class, r, verify, out),
        Command::PriceSim {
            target,
            mode,
            eta,
            eps,
            delta,
            h,
            m,
            approx_beta,
            p,
            dist,
            m_test,
            class,
            r,
            log,
        } => {
            let target = io::read_valuation(&target)?;
            let dist = load_dist(dist, target.ground_size())?;
            let h = match h {
                Some(h) => h,
                None => (target
                    .value_of(&ItemSet::full(target.ground_size()))
                    .ceil()
                    .max(1.0) as u64)
                    .next_power_of_two(),
            };
            match mode {
                PriceMode::Pmac => {
                    let m = m.unwrap_or_else(|| {
                        default_price_sample_size(target.ground_size(), h, eta, eps, delta)
                    });
                    let params = PriceParams {
                        approx_beta,
                        p,
                        eta,
                        m,
                    };
                    price_pmac(&target, &dist, h, &params, eps, m_test, seed, log, out)
                }
                PriceMode::Vq => price_vq(&target, class, r, h, out),
            }
        }
        Command::Experiment { config } => experiment(&config, out),
        Command::DemoLowerBound { n, k, train_draws } => {
            let report = adversarial_demo(
                n,
                k,
                seed,
                &DemoOptions {
                    train_draws,
                    ..Default::default()
                },
            )?;
            out.emit(&report, || {
                let v = serde_json::to_value(&report)?;
                let obj = v.as_object().context("report is an object")?;
                let keys: Vec<&str> = obj
                    .iter()
                    .filter(|(_, x)| !x.is_array() && !x.is_object())
                    .map(|(k, _)| k.as_str())
                    .collect();
                let row = keys.iter().map(|k| scalar_text(&obj[*k])).collect();
                csv_string(&keys, [row])
            })
        }
    }
}

fn scalar_text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn load_dist(path: Option<PathBuf>, n: usize) -> Result<Distribution> {
    let dist = match path {
        Some(p) => io::read_json(&p)?,
        None => Distribution::UniformSubsets { n },
    };
    let dn = dist.validate()?;
    if dn != n {
        bail!("distribution is over {dn} items but the target has {n}");
    }
    Ok(dist)
}

/// All subsets as a `mask,items,value` table.
fn table_csv(f: &dyn SetFunction) -> Result<String> {
    let table = SetTable::tabulate(f, 16)?;
    let n = f.ground_size();
    let rows = table.values().iter().enumerate().map(|(mask, v)| {
        let s = ItemSet::from_mask(n, mask as u128);
        vec![mask.to_string(), items_text(&s), v.to_string()]
    });
    csv_string(&["mask", "items", "value"], rows)
}

fn emit_valuation(v: &Valuation, out: &Output) -> Result<()> {
    match out.format {
        Format::Json => out.write(&(v.to_json() + "\n")),
        Format::Csv => out.write(&table_csv(v)?),
    }
}

#[derive(Deserialize)]
struct FamilyParams {
    n: usize,
    k: usize,
    #[serde(default)]
    b: Option<Vec<usize>>,
}

#[derive(Deserialize)]
struct GoemansParams {
    n: usize,
    x: f64,
}

#[derive(Deserialize)]
struct RandomGenParams {
    class: RandomClass,
    n: usize,
    #[serde(flatten)]
    shape: RandomParams,
}

fn gen(kind: GenKind, params: Option<&str>, seed: u64, out: &Output) -> Result<()> {
    match kind {
        GenKind::Family => {
            let p: FamilyParams = io::parse_params(params, "family params")?;
            let fam = gen_intersection_family(p.n, p.k, seed)?;
            out.emit(&fam, || {
                let rows = fam
                    .sets
                    .iter()
                    .enumerate()
                    .map(|(i, s)| vec![i.to_string(), s.len().to_string(), items_text(s)]);
                csv_string(&["index", "size", "items"], rows)
            })
        }
        GenKind::FB => {
            let p: FamilyParams = io::parse_params(params, "fB params")?;
            let fam = gen_intersection_family(p.n, p.k, seed)?;
            let b = p.b.unwrap_or_else(|| uniform_half(p.k, seed));
            let v: Valuation = build_fb(&fam, &b)?.into();
            emit_valuation(&v, out)
        }
        GenKind::Goemans => {
            let p: GoemansParams = io::parse_params(params, "goemans params")?;
            let pair = gen_goemans_pair(p.n, p.x, seed)?;
            match out.format {
                Format::Json => out.json(&pair),
                Format::Csv => bail!("goemans pairs are written as JSON only"),
            }
        }
        GenKind::Random => {
            let p: RandomGenParams = io::parse_params(params, "random params")?;
            emit_valuation(&gen_random(p.class, p.n, &p.shape, seed)?, out)
        }
    }
}

fn learn(
    class: LearnClass,
    params: Option<&str>,
    train: &std::path::Path,
    seed: u64,
    out: &Output,
) -> Result<()> {
    let mut spec: serde_json::Value = io::parse_params(params, "learner params")?;
    let obj = spec
        .as_object_mut()
        .context("learner params must be a JSON object")?;
    obj.insert("class".into(), json!(class.tag()));
    let spec: LearnerSpec = serde_json::from_value(spec).context("learner params")?;
    let samples: Vec<Sample> = io::read_jsonl(train)?;
    let Some(first) = samples.first() else {
        bail!("{} holds no samples", train.display());
    };
    let n = first.set.n();
    let samples = samples
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            if s.set.n() != n {
                bail!("sample {} is over {} items, expected {n}", i + 1, s.set.n());
            }
            Ok(Sample::new(s.set, s.value)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let hyp = spec.train_on_samples(n, &samples, &mut rng_stream(seed, streams::COINS))?;
    match out.format {
        Format::Json => out.write(&(hyp.to_json() + "\n")),
        Format::Csv => out.write(&table_csv(&hyp)?),
    }
}

#[allow(clippy::too_many_arguments)]
fn eval(
    input: &std::path::Path,
    sets: Option<PathBuf>,
    target: Option<PathBuf>,
    dist: Option<PathBuf>,
    eps: f64,
    m_test: usize,
    seed: u64,
    out: &Output,
) -> Result<()> {
    let f = Evaluable::load(input)?;
    let f = f.as_fn();
    let n = f.ground_size();
    if let Some(t) = target {
        let target = io::read_valuation(&t)?;
        let dist = load_dist(dist, n)?;
        let report = empirical_factor_with(
            f,
            &target,
            &dist,
            eps,
            m_test,
            &mut rng_stream(seed, streams::TEST),
        )?;
        return out.emit(&report, || factor_csv(&report));
    }
    let Some(sets) = sets else {
        return match out.format {
            Format::Csv => out.write(&table_csv(f)?),
            Format::Json => {
                let table = SetTable::tabulate(f, 16)?;
                out.json(&json!({ "n": n, "values": table.values() }))
            }
        };
    };
    let sets = io::read_jsonl::<SetLine>(&sets)?
        .into_iter()
        .map(|l| l.into_set(n))
        .collect::<Result<Vec<_>>>()?;
    let values = sets
        .iter()
        .map(|s| Ok((s, f.eval(s)?)))
        .collect::<Result<Vec<_>>>()?;
    #[derive(Serialize)]
    struct Eval<'a> {
        set: &'a ItemSet,
        value: f64,
    }
    let rows: Vec<Eval> = values
        .iter()
        .map(|(s, v)| Eval { set: s, value: *v })
        .collect();
    out.emit(&rows, || {
        csv_string(
            &["items", "value"],
            values
                .iter()
                .map(|(s, v)| vec![items_text(s), v.to_string()]),
        )
    })
}

fn factor_csv(r: &FactorReport) -> Result<String> {
    csv_string(
        &["eps", "M", "alpha_hat", "median_ratio", "violation_mass"],
        [vec![
            r.eps.to_string(),
            r.m_test.to_string(),
            ext_f64::to_text(r.alpha_hat),
            ext_f64::to_text(r.median_ratio),
            r.violation_mass.to_string(),
        ]],
    )
}

fn verify(input: &std::path::Path, checks: &[String], out: &Output) -> Result<()> {
    let v = io::read_valuation(input)?;
    let checks = checks
        .iter()
        .map(|c| c.trim().parse::<Check>().map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    let mut results = Vec::new();
    for c in checks {
        let verdict = c.run(&v).with_context(|| format!("check {}", c.name()))?;
        results.push(json!({ "check": c.name(), "passed": verdict.passed(), "result": verdict }));
    }
    let passed = results.iter().all(|r| r["passed"] == json!(true));
    let report =
        json!({ "n": v.ground_size(), "kind": v.kind(), "passed": passed, "checks": results });
    out.emit(&report, || {
        csv_string(
            &["check", "passed", "violation"],
            results.iter().map(|r| {
                let violation = r["result"]
                    .get("violation")
                    .map(|x| x.to_string())
                    .unwrap_or_default();
                vec![scalar_text(&r["check"]), r["passed"].to_string(), violation]
            }),
        )
    })
}

fn vq_learn(
    target: &std::path::Path,
    class: ClassTag,
    r: f64,
    verify: bool,
    out: &Output,
) -> Result<()> {
    let target = io::read_valuation(target)?;
    let oracle = ValueOracle::new(&target);
    let hyp = vq_learn_item_based(&oracle, class, r)?;
    let queries = oracle.queries();
    let check = if verify {
        if target.ground_size() > VQ_CHECK_LIMIT {
            bail!("--verify enumerates subsets and needs n <= {VQ_CHECK_LIMIT}");
        }
        Some(vq_hypothesis_check(&ValueOracle::new(&target), &hyp, r)?)
    } else {
        None
    };
    let report = json!({ "class": class.name(), "R": r, "queries": queries, "hypothesis": hyp, "check": check });
    out.emit(&report, || {
        let (passed, worst) = match &check {
            Some(c) => (c.passed().to_string(), ext_f64::to_text(c.worst().ratio)),
            None => (String::new(), String::new()),
        };
        csv_string(
            &["class", "R", "queries", "passed", "worst_ratio"],
            [vec![
                class.name().to_string(),
                r.to_string(),
                queries.to_string(),
                passed,
                worst,
            ]],
        )
    })
}

#[derive(Serialize)]
struct PriceReport<'a> {
    mode: &'static str,
    n: usize,
    h: u64,
    params: &'a PriceParams,
    rounds: usize,
    explored: usize,
    zero_sets: usize,
    queries: usize,
    grid: &'a valuelearn::price_learning::PriceGrid,
    hypothesis: &'a valuelearn::hypothesis::RootedLinearHypothesis,
    factor: FactorReport,
}

#[allow(clippy::too_many_arguments)]
fn price_pmac(
    target: &Valuation,
    dist: &Distribution,
    h: u64,
    params: &PriceParams,
    eps: f64,
    m_test: usize,
    seed: u64,
    log: Option<PathBuf>,
    out: &Output,
) -> Result<()> {
    let agent = AgentOracle::new(target, h)?;
    let run = pmac_with_prices(&agent, dist, params, &mut rng_stream(seed, streams::TRAIN))?;
    let factor = empirical_factor_with(
        &run.hypothesis,
        target,
        dist,
        eps,
        m_test,
        &mut rng_stream(seed, streams::TEST),
    )?;
    let log_csv = || {
        csv_string(
            &["round", "set", "price", "bought"],
            run.log.iter().map(|d| {
                vec![
                    d.round.to_string(),
                    items_text(&d.set),
                    d.price.to_string(),
                    d.bought.to_string(),
                ]
            }),
        )
    };
    if let Some(path) = log {
        std::fs::write(&path, log_csv()?).with_context(|| format!("writing {}", path.display()))?;
    }
    let report = PriceReport {
        mode: "pmac",
        n: target.ground_size(),
        h,
        params,
        rounds: run.log.len(),
        explored: run.explored,
        zero_sets: run.zero_sets,
        queries: agent.queries(),
        grid: &run.grid,
        hypothesis: &run.hypothesis,
        factor,
    };
    out.emit(&report, log_csv)
}

fn price_vq(target: &Valuation, class: ClassTag, r: f64, h: u64, out: &Output) -> Result<()> {
    let agent = AgentOracle::new(target, h)?;
    let run = vq_with_prices(&agent, class, r, h)?;
    let check = if target.ground_size() <= VQ_CHECK_LIMIT {
        Some(vq_hypothesis_check(
            &ValueOracle::new(target),
            &run.hypothesis,
            2.0 * r,
        )?)
    } else {
        None
    };
    let report = json!({
        "mode": "vq", "class": class.name(), "R": r, "h": h,
        "queries": run.queries, "item_estimates": run.item_estimates,
        "hypothesis": run.hypothesis, "check": check,
    });
    out.emit(&report, || {
        csv_string(
            &["item", "estimate"],
            run.item_estimates
                .iter()
                .enumerate()
                .map(|(i, e)| vec![i.to_string(), e.to_string()]),
        )
    })
}

fn experiment(config: &std::path::Path, out: &Output) -> Result<()> {
    let cfg = ExperimentConfig::from_json(&io::read_text(config)?)?;
    let report = run_pmac_experiment(&cfg)?;
    for row in report.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "seed {}: {}",
            row.seed,
            row.error.as_deref().unwrap_or_default()
        );
    }
    out.emit(&report, || {
        csv_string(
            &[
                "experiment_id",
                "seed",
                "m",
                "M",
                "eps",
                "alpha_hat",
                "violation_mass",
                "wall_ms",
            ],
            report.rows.iter().map(|r| {
                vec![
                    r.experiment_id.clone(),
                    r.seed.to_string(),
                    r.m.to_string(),
                    r.m_test.to_string(),
                    r.eps.to_string(),
                    ext_f64::to_text(r.alpha_hat),
                    r.violation_mass.to_string(),
                    r.wall_ms.to_string(),
                ]
            }),
        )
    })
}
