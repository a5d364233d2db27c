//! Command-line front end.
//!
//! Every invocation produces one output in the selected format: human text,
//! a single JSON record (`{"schema_version", "command", "payload"}`), or CSV.
//! Exit codes: 0 success, 1 failed verification (or a never-sorting word
//! under `depth --strict`), 2 usage error, 3 indeterminate depth or probe.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::enumeration::{
    find_witnesses_parallel, witness_table, CellSpec, WitnessProfile, DEFAULT_SHARD_DEPTH,
};
use crate::machine::{self, default_cap, sorting_depth, Depth, EventKind, MachineError, Pattern};
use crate::partition::{format_letter, SetPartition};
use crate::verification::{probe_sigma, run_suite, CheckResult, ProbeOutcome, SuiteBounds, SUITES};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INDETERMINATE: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "stacksort",
    version,
    about = "Pattern-avoiding stack-sorting of set partitions"
)]
pub struct Cli {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Worker threads for enumeration and verification (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Records,
    Csv,
}

#[derive(Debug, Args)]
pub struct WordArgs {
    /// Word as lowercase letters (`abcac`) or comma-separated ids (`1,2,3,1,3`).
    pub partition: String,
    /// Forbidden pattern for the stack.
    #[arg(long, default_value = "aba")]
    pub sigma: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the stack-sorting map one or more times.
    Apply {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, default_value_t = 1)]
        iterations: usize,
    },
    /// Print every push and pop of one pass.
    Trace {
        #[command(flatten)]
        word: WordArgs,
    },
    /// Number of passes needed to sort a word.
    Depth {
        #[command(flatten)]
        word: WordArgs,
        /// Maximum passes (default N(p) for aba, 4|p| otherwise).
        #[arg(long)]
        cap: Option<usize>,
        /// Exit with status 1 when the word never sorts.
        #[arg(long)]
        strict: bool,
    },
    /// Word statistics.
    Stats {
        /// Word as lowercase letters or comma-separated ids.
        partition: String,
    },
    /// Count classes and witnesses in one cell, or tabulate a range of cells.
    Enumerate {
        /// Number of distinct letters N (the smallest N of a table).
        #[arg(long)]
        n: usize,
        /// Word length L; omit for a table over N <= L <= 2N + offset.
        #[arg(long)]
        length: Option<usize>,
        /// List each witness with its profile.
        #[arg(long)]
        witnesses: bool,
        /// Largest N of a table.
        #[arg(long)]
        n_max: Option<usize>,
        /// Table rows run up to L = 2N + offset.
        #[arg(long, default_value_t = 1)]
        offset: usize,
    },
    /// Run verification checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name, `all`, or `probe`.
    pub suite: String,
    /// Run per-N checks for this N only.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,
    #[arg(long, default_value_t = 5)]
    pub n_max: usize,
    /// Length bound of the exhaustive corpus.
    #[arg(long, default_value_t = 8)]
    pub corpus_len: usize,
    /// Length bound for the N(p)-pass bound.
    #[arg(long, default_value_t = 9)]
    pub upper_len: usize,
    #[arg(long, default_value_t = 20)]
    pub identity_n_max: usize,
    /// Pattern for `probe`.
    #[arg(long, default_value = "ab")]
    pub sigma: String,
    /// Length bound for `probe`.
    #[arg(long, default_value_t = 6)]
    pub lmax: usize,
    /// Pass budget per word for `probe`.
    #[arg(long, default_value_t = 32)]
    pub cap: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

/// Rendered output and exit status of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: u8,
}

struct Rendered {
    command: &'static str,
    payload: Value,
    human: String,
    csv: Vec<Vec<String>>,
    code: u8,
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(usage)?;
    let rendered = pool.install(|| dispatch(&cli.command))?;
    let text = match cli.format {
        Format::Human => rendered.human,
        Format::Records => {
            let record = json!({
                "schema_version": SCHEMA_VERSION,
                "command": rendered.command,
                "payload": rendered.payload,
            });
            format!("{record}\n")
        }
        Format::Csv => to_csv(&rendered.csv),
    };
    Ok(Output {
        text,
        code: rendered.code,
    })
}

fn to_csv(rows: &[Vec<String>]) -> String {
    let field = |f: &String| {
        if f.contains([',', '"', '\n']) {
            format!("\"{}\"", f.replace('"', "\"\""))
        } else {
            f.clone()
        }
    };
    rows.iter()
        .map(|r| r.iter().map(field).collect::<Vec<_>>().join(",") + "\n")
        .collect()
}

fn parse_word(text: &str) -> Result<SetPartition, CliError> {
    SetPartition::parse(text).map_err(usage)
}

fn parse_sigma(text: &str) -> Result<Pattern, CliError> {
    Pattern::parse(text).map_err(|e| usage(format!("sigma: {e}")))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn dispatch(command: &Command) -> Result<Rendered, CliError> {
    match command {
        Command::Apply { word, iterations } => cmd_apply(word, *iterations),
        Command::Trace { word } => cmd_trace(word),
        Command::Depth { word, cap, strict } => cmd_depth(word, *cap, *strict),
        Command::Stats { partition } => cmd_stats(partition),
        Command::Enumerate {
            n,
            length,
            witnesses,
            n_max,
            offset,
        } => cmd_enumerate(*n, *length, *witnesses, *n_max, *offset),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn cmd_apply(args: &WordArgs, iterations: usize) -> Result<Rendered, CliError> {
    let p = parse_word(&args.partition)?;
    let sigma = parse_sigma(&args.sigma)?;
    let out = machine::iterate(&p, &sigma, iterations);
    Ok(Rendered {
        command: "apply",
        payload: json!({ "input": p, "sigma": sigma, "k": iterations, "output": out }),
        human: format!("{out}\n"),
        csv: vec![
            vec!["input".into(), "sigma".into(), "k".into(), "output".into()],
            vec![
                p.format(),
                sigma.to_string(),
                iterations.to_string(),
                out.format(),
            ],
        ],
        code: EXIT_OK,
    })
}

fn cmd_trace(args: &WordArgs) -> Result<Rendered, CliError> {
    let p = parse_word(&args.partition)?;
    let sigma = parse_sigma(&args.sigma)?;
    let t = machine::trace(&p, &sigma);
    let max = p.max_letter();
    let render = |letters: &[u32]| {
        SetPartition::new(letters.to_vec())
            .expect("letters from input")
            .format()
    };
    let mut csv = vec![vec![
        "step".into(),
        "kind".into(),
        "letter".into(),
        "stack".into(),
        "out".into(),
    ]];
    for (i, ev) in t.events.iter().enumerate() {
        csv.push(vec![
            (i + 1).to_string(),
            match ev.kind {
                EventKind::Push => "push".into(),
                EventKind::Pop => "pop".into(),
            },
            format_letter(ev.letter, max),
            render(&ev.stack_after),
            render(&ev.output_after),
        ]);
    }
    let human = format!("{}output={}\n", t.to_text(), t.output);
    Ok(Rendered {
        command: "trace",
        payload: to_value(&t),
        human,
        csv,
        code: EXIT_OK,
    })
}

fn cmd_depth(args: &WordArgs, cap: Option<usize>, strict: bool) -> Result<Rendered, CliError> {
    let p = parse_word(&args.partition)?;
    let sigma = parse_sigma(&args.sigma)?;
    let cap_used = cap.unwrap_or_else(|| default_cap(&p, &sigma));
    let (payload, human, code) = match sorting_depth(&p, &sigma, Some(cap_used)) {
        Ok(d @ Depth::Sorted { passes }) => (to_value(&d), format!("{passes}\n"), EXIT_OK),
        Ok(d @ Depth::NeverSorts { .. }) => (
            to_value(&d),
            "never-sorts (cycle)\n".to_string(),
            if strict { EXIT_FAILED } else { EXIT_OK },
        ),
        Err(MachineError::Indeterminate { cap }) => (
            json!({ "outcome": "indeterminate", "cap": cap }),
            "indeterminate (cap)\n".to_string(),
            EXIT_INDETERMINATE,
        ),
        Err(e) => return Err(usage(e)),
    };
    let outcome = payload["outcome"].as_str().unwrap_or_default().to_string();
    let passes = payload
        .get("passes")
        .map(|v| v.to_string())
        .unwrap_or_default();
    let payload = json!({ "input": p, "sigma": sigma, "cap": cap_used, "result": payload });
    Ok(Rendered {
        command: "depth",
        payload,
        human,
        csv: vec![
            vec![
                "input".into(),
                "sigma".into(),
                "outcome".into(),
                "passes".into(),
            ],
            vec![p.format(), sigma.to_string(), outcome, passes],
        ],
        code,
    })
}

fn cmd_stats(text: &str) -> Result<Rendered, CliError> {
    let p = parse_word(text)?;
    let max = p.max_letter();
    let nc = p.leftmost_nonclumped().map(|l| format_letter(l, max));
    let fields: Vec<(&str, String)> = vec![
        ("word", p.format()),
        ("length", p.len().to_string()),
        ("N", p.distinct().to_string()),
        ("C", p.clumped_count().to_string()),
        ("nc", nc.clone().unwrap_or_else(|| "none".into())),
        ("mcount", p.mcount().to_string()),
        ("sorted", p.is_sorted().to_string()),
        ("trunc", p.truncate().format()),
        ("reverse", p.reverse().format()),
        ("canonical", p.canonicalize().format()),
    ];
    let payload = json!({
        "word": p,
        "length": p.len(),
        "N": p.distinct(),
        "C": p.clumped_count(),
        "nc": nc,
        "mcount": p.mcount(),
        "sorted": p.is_sorted(),
        "trunc": p.truncate(),
        "reverse": p.reverse(),
        "canonical": p.canonicalize(),
    });
    let human = fields.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    Ok(Rendered {
        command: "stats",
        payload,
        human,
        csv: vec![
            fields.iter().map(|(k, _)| k.to_string()).collect(),
            fields.iter().map(|(_, v)| v.clone()).collect(),
        ],
        code: EXIT_OK,
    })
}

fn profile_fields(w: &WitnessProfile) -> Vec<String> {
    let max = w.witness.max_letter();
    vec![
        w.witness.format(),
        w.multiplicities
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(" "),
        w.triple_letter
            .map(|l| format_letter(l, max))
            .unwrap_or_else(|| "-".into()),
        w.first_letter_mult.to_string(),
        w.family
            .map(|f| f.name().to_string())
            .unwrap_or_else(|| "-".into()),
    ]
}

fn cmd_enumerate(
    n: usize,
    length: Option<usize>,
    list: bool,
    n_max: Option<usize>,
    offset: usize,
) -> Result<Rendered, CliError> {
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let Some(length) = length else {
        let rows = witness_table(n, n_max.unwrap_or(n), offset).map_err(usage)?;
        let mut csv = vec![vec![
            "n".into(),
            "length".into(),
            "total_classes".into(),
            "witness_count".into(),
        ]];
        let mut human = String::new();
        for r in &rows {
            csv.push(vec![
                r.n_letters.to_string(),
                r.length.to_string(),
                r.total_classes.to_string(),
                r.witness_count.to_string(),
            ]);
            human.push_str(&format!(
                "N={} L={} total={} witnesses={}\n",
                r.n_letters, r.length, r.total_classes, r.witness_count
            ));
        }
        return Ok(Rendered {
            command: "enumerate",
            payload: json!({ "rows": rows }),
            human,
            csv,
            code: EXIT_OK,
        });
    };
    if length < n {
        return Err(usage(format!("--length {length} is shorter than --n {n}")));
    }
    let report =
        find_witnesses_parallel(CellSpec::new(n, length), DEFAULT_SHARD_DEPTH).map_err(usage)?;
    let mut human = format!(
        "N={n} L={length} total={} witnesses={}\n",
        report.total_classes,
        report.witness_count()
    );
    let mut csv = Vec::new();
    if list {
        csv.push(vec![
            "witness".into(),
            "multiplicities".into(),
            "triple_letter".into(),
            "first_letter_mult".into(),
            "family".into(),
        ]);
        for w in &report.witnesses {
            let f = profile_fields(w);
            human.push_str(&format!(
                "{} mult={} triple={} head-mult={} family={}\n",
                f[0], f[1], f[2], f[3], f[4]
            ));
            csv.push(f);
        }
    } else {
        csv.push(vec![
            "n".into(),
            "length".into(),
            "total_classes".into(),
            "witness_count".into(),
        ]);
        csv.push(vec![
            n.to_string(),
            length.to_string(),
            report.total_classes.to_string(),
            report.witness_count().to_string(),
        ]);
    }
    let mut payload = to_value(&report);
    payload["witness_count"] = json!(report.witness_count());
    if !list {
        payload.as_object_mut().expect("object").remove("witnesses");
    }
    Ok(Rendered {
        command: "enumerate",
        payload,
        human,
        csv,
        code: EXIT_OK,
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<Rendered, CliError> {
    if args.suite == "probe" {
        return cmd_probe(args);
    }
    let (n_min, n_max) = match args.n {
        Some(n) => (n, n),
        None => (args.n_min, args.n_max),
    };
    if n_min < 3 || n_min > n_max {
        return Err(usage(format!(
            "need 3 <= n-min <= n-max, got {n_min}..{n_max}"
        )));
    }
    let bounds = SuiteBounds {
        n_min,
        n_max,
        corpus_len: args.corpus_len,
        upper_len: args.upper_len,
        identity_n_max: args.identity_n_max,
    };
    let results = run_suite(&args.suite, &bounds).ok_or_else(|| {
        usage(format!(
            "unknown suite {:?}; expected all, probe, or one of: {}",
            args.suite,
            SUITES.join(", ")
        ))
    })?;
    let failed = results.iter().filter(|r| !r.passed).count();
    let mut human = String::new();
    let mut csv = vec![vec![
        "name".into(),
        "scope".into(),
        "passed".into(),
        "checked".into(),
        "detail".into(),
        "counterexample".into(),
    ]];
    for r in &results {
        human.push_str(&summary_line(r));
        csv.push(vec![
            r.name.clone(),
            r.scope.clone(),
            r.passed.to_string(),
            r.checked.to_string(),
            r.detail.clone(),
            r.counterexample
                .as_ref()
                .map(|c| c.word.format())
                .unwrap_or_default(),
        ]);
    }
    human.push_str(&format!("{} checks, {} failed\n", results.len(), failed));
    Ok(Rendered {
        command: "verify",
        payload: json!({ "suite": args.suite, "checks": results, "failed": failed }),
        human,
        csv,
        code: if failed == 0 { EXIT_OK } else { EXIT_FAILED },
    })
}

fn summary_line(r: &CheckResult) -> String {
    let status = if r.passed { "PASS" } else { "FAIL" };
    let mut line = format!(
        "{status} {:<22} {:<34} checked={}",
        r.name, r.scope, r.checked
    );
    if !r.detail.is_empty() {
        line.push_str(&format!(" {}", r.detail));
    }
    if let Some(cx) = &r.counterexample {
        line.push_str(&format!(
            " counterexample={} expected={} actual={}",
            cx.word, cx.expected, cx.actual
        ));
    }
    line.push('\n');
    line
}

fn cmd_probe(args: &VerifyArgs) -> Result<Rendered, CliError> {
    let sigma = parse_sigma(&args.sigma)?;
    let report = probe_sigma(&sigma, args.lmax, args.cap).map_err(usage)?;
    let (human, code, word) = match &report.outcome {
        ProbeOutcome::Found { word, cycle_start, period } => (
            format!("found {word} never sorts under {sigma} (cycle from pass {cycle_start}, period {period})\n"),
            EXIT_OK,
            word.format(),
        ),
        ProbeOutcome::Indeterminate => (
            format!("indeterminate: no never-sorting word of length <= {} under {sigma}\n", args.lmax),
            EXIT_INDETERMINATE,
            String::new(),
        ),
    };
    let found = matches!(report.outcome, ProbeOutcome::Found { .. });
    Ok(Rendered {
        command: "verify",
        payload: json!({ "suite": "probe", "probe": report }),
        human,
        csv: vec![
            vec!["sigma".into(), "lmax".into(), "found".into(), "word".into()],
            vec![
                sigma.to_string(),
                args.lmax.to_string(),
                found.to_string(),
                word,
            ],
        ],
        code,
    })
}
