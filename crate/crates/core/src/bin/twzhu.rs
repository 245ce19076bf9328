use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use twzhu::suite::{
    describe_quotient, run_suite, Config, RawConfig, RawGrid, RawRational, Report, Suite, SCHEMA,
};
use twzhu::text::{format_element, format_monomial, parse_monomial};
use twzhu::ueva::{FiltrationCtx, Straightener, UPoly};
use twzhu::zhu::quotient;
use twzhu::{Error, Mode, Result};

/// Exact twisted Zhu algebra computations.
#[derive(Parser, Debug)]
#[command(name = "twzhu", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,

    /// TOML file with the same keys as the flags; flags win.
    #[arg(long, global = true)]
    config: Option<String>,

    /// heisenberg | virasoro
    #[arg(long, global = true)]
    backend: Option<String>,

    /// Central charge (virasoro only), e.g. 1/2.
    #[arg(long, global = true)]
    c: Option<String>,

    /// n, or a comma-separated grid.
    #[arg(long, global = true)]
    n: Option<String>,

    /// m, or a comma-separated grid.
    #[arg(long, global = true)]
    m: Option<String>,

    /// Truncation weight N of the quotient slice
    #[arg(long = "cutoff-N", global = true)]
    cutoff_n: Option<i64>,

    /// Weight bound G on O-generators
    #[arg(long = "cutoff-G", global = true)]
    cutoff_g: Option<i64>,

    /// Bound P on the p-index of O-generators
    #[arg(long = "cutoff-P", global = true)]
    cutoff_p: Option<String>,

    /// Weight bound for test vectors.
    #[arg(long, global = true)]
    w: Option<i64>,

    /// Largest |mode| in module checks
    #[arg(long, global = true)]
    imax: Option<String>,

    /// Largest weight of module test states
    #[arg(long, global = true)]
    kmax: Option<String>,

    /// Write the JSON output here.
    #[arg(long, global = true)]
    out: Option<String>,

    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Axiom checks of the backend.
    Axioms,
    /// Twisted module checks.
    Modules,
    /// Truncated A_{g,n}(V) for each n.
    Zhu,
    /// Truncated A_{g,n,m}(V) for each (n, m).
    Bimodule,
    /// Straighten a monomial such as "J[1/2](a[-1]|0>) * J[-1/2](a[-1]|0>)".
    Straighten { monomial: String },
    /// Run one suite: axioms, modules, zhu, straighten, lemma84, theorem11.
    Verify { suite: String },
    /// Run every suite selected in the config.
    Report,
}

fn grid(text: &Option<String>) -> Option<RawGrid> {
    let t = text.as_ref()?;
    let parts: Vec<RawRational> = t.split(',').map(|s| RawRational::from(s.trim())).collect();
    Some(RawGrid::Many(parts))
}

fn load(cli: &Cli) -> Result<Config> {
    let base = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
            RawConfig::from_toml(&text)?
        }
        None => RawConfig::default(),
    };
    let rat = |s: &Option<String>| s.as_deref().map(RawRational::from);
    let flags = RawConfig {
        backend: cli.backend.clone(),
        c: rat(&cli.c),
        n: grid(&cli.n),
        m: grid(&cli.m),
        cutoff_n: cli.cutoff_n,
        cutoff_g: cli.cutoff_g,
        cutoff_p: rat(&cli.cutoff_p),
        w: cli.w,
        imax: rat(&cli.imax),
        kmax: rat(&cli.kmax),
        out: cli.out.clone(),
        json: cli.json.then_some(true),
        ..RawConfig::default()
    };
    Config::from_raw(&base.overridden_by(flags))
}

fn emit(cfg: &Config, value: &serde_json::Value, text: &str) -> Result<()> {
    let pretty = serde_json::to_string_pretty(value).expect("json");
    if let Some(path) = &cfg.out {
        fs::write(path, format!("{pretty}\n")).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    }
    if cfg.json {
        println!("{pretty}");
    } else {
        print!("{text}");
    }
    Ok(())
}

fn report(cfg: &Config, suites: Vec<Suite>) -> Result<bool> {
    let mut cfg = cfg.clone();
    if !suites.is_empty() {
        cfg.suites = suites;
    }
    let r: Report = run_suite(&cfg)?;
    let mut text = String::new();
    for c in &r.checks {
        let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        text.push_str(&format!(
            "{:<12} {}/{} [{}] checked={}\n",
            format!("{:?}", c.verdict).to_lowercase(),
            c.suite,
            c.name,
            params.join(" "),
            c.checked
        ));
        if let Some(w) = &c.witness {
            text.push_str(&format!("             witness: {w}\n"));
        }
    }
    let s = &r.summary;
    text.push_str(&format!(
        "pass {} fail {} inconclusive {}\n",
        s.pass, s.fail, s.inconclusive
    ));
    let value = serde_json::to_value(&r).expect("json");
    emit(&cfg, &value, &text)?;
    Ok(r.passed())
}

fn quotients(cfg: &Config, pairs: Vec<(Mode, Mode)>) -> Result<bool> {
    let voa = cfg.voa();
    let mut all = Vec::new();
    let mut text = String::new();
    for (n, m) in pairs {
        let q = quotient(&voa, n, m, cfg.cutoffs)?;
        let d = describe_quotient(&voa, &q);
        text.push_str(&format!(
            "(n, m) = ({n}, {m}): dim {} (slice {}, O rank {})\n",
            q.dim(),
            q.o.slice_dim(),
            q.o.rank()
        ));
        for b in d["basis"].as_array().expect("array") {
            text.push_str(&format!("  [{}]\n", b.as_str().expect("str")));
        }
        for (label, table) in [("*", "mult"), ("left", "left"), ("right", "right")] {
            for row in d[table].as_array().expect("array") {
                text.push_str(&format!(
                    "  {label}: {} , {} -> {}\n",
                    row[0].as_str().unwrap(),
                    row[1].as_str().unwrap(),
                    row[2].as_str().unwrap()
                ));
            }
        }
        all.push(d);
    }
    emit(
        cfg,
        &json!({ "schema": SCHEMA, "config": cfg.echo(), "quotients": all }),
        &text,
    )?;
    Ok(true)
}

fn straighten(cfg: &Config, text: &str, explicit_n: bool) -> Result<bool> {
    let voa = cfg.voa();
    let x: UPoly = parse_monomial(&voa, text)?;
    let degrees: Vec<Mode> = x.keys().map(|k| k.degree()).collect();
    let Some(&d) = degrees.first() else {
        return Err(Error::InvalidParameter("monomial is zero".into()));
    };
    if degrees.iter().any(|&e| e != d) {
        return Err(Error::InvalidParameter(
            "monomial is not homogeneous".into(),
        ));
    }
    let m = cfg.ms[0];
    let n = if explicit_n { cfg.ns[0] } else { m + d };
    let ctx = FiltrationCtx::new(n, m, voa.order())?;
    let mut st = Straightener::new(&voa, ctx, cfg.budget);
    let u = st.poly(&x)?;
    let terms: Vec<String> = x.keys().map(|k| format_monomial(&voa, k)).collect();
    let result = format_element(&voa, &u);
    let out = format!(
        "J[{}]({result})  (n = {n}, m = {m}, {} steps)\n",
        m - n,
        st.steps()
    );
    let value = json!({
        "schema": SCHEMA,
        "monomial": terms,
        "n": n.to_string(),
        "m": m.to_string(),
        "result": result,
        "steps": st.steps(),
    });
    emit(cfg, &value, &out)?;
    Ok(true)
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = load(cli)?;
    match &cli.verb {
        Verb::Axioms => report(&cfg, vec![Suite::Axioms]),
        Verb::Modules => report(&cfg, vec![Suite::Modules]),
        Verb::Verify { suite } => report(&cfg, vec![suite.parse()?]),
        Verb::Report => report(&cfg, Vec::new()),
        Verb::Zhu => quotients(&cfg, cfg.ns.iter().map(|&n| (n, n)).collect()),
        Verb::Bimodule => quotients(&cfg, cfg.pairs.clone()),
        Verb::Straighten { monomial } => straighten(&cfg, monomial, cli.n.is_some()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("twzhu: {e}");
            ExitCode::from(2)
        }
    }
}
