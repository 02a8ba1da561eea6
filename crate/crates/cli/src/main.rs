//! `multree`: command-line access to ranked multifurcating tree shapes.
//!
//! Exit status is 0 on success, 1 when the input is well formed but
//! rejected (invalid shape, size cap, I/O failure) and 2 on usage errors.

mod input;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use multree::chains::{
    chain_rng, overall_acceptance, run_chains, semi_random_init, ChainKind, ChainSpec, Init, RunConfig,
};
use multree::coalescent::{CoalescentSampler, LambdaBeta};
use multree::enumerate::{count_row, count_shapes};
use multree::exact::{exact_bottleneck, exact_gap, exact_kernel, mixing_bounds, mixing_bounds_exact, BOTTLENECK_CAP};
use multree::lattice::{build_hasse, deg_minus, deg_plus, lattice_distance, lub_trace};
use multree::stats::{aggregate, shape_stats, ShapeStats};
use multree::{DMatrix, FMatrix, TreeShape};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::input::{load_shape, parse_fmatrix, parse_shape, read_shapes};

/// Coalescent draws per random stream; fixes the output independently of
/// the thread count.
const COALESCENT_BLOCK: usize = 1024;

#[derive(Parser)]
#[command(
    name = "multree",
    version,
    about = "Ranked multifurcating tree shapes: counting, lattice, sampling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Symmetric chain with holding, uniform law.
    Sym,
    /// Simple random walk, law proportional to degree.
    Rw,
    /// Metropolis-Hastings, uniform law.
    Mh,
}

impl From<Kind> for ChainKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Sym => ChainKind::Symmetric,
            Kind::Rw => ChainKind::RandomWalk,
            Kind::Mh => ChainKind::MetropolisUniform,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Text,
    Json,
    Fmatrix,
    Dmatrix,
}

#[derive(Subcommand)]
enum Command {
    /// Count shapes: one CSV row per N with a column per K and the total.
    Enumerate {
        /// A single row.
        #[arg(long, conflicts_with = "max_n")]
        n: Option<usize>,
        /// Rows 2..=MAX_N [default: 12].
        #[arg(long)]
        max_n: Option<usize>,
        /// Only the count with K internal nodes (needs --n).
        #[arg(long, requires = "n")]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Check a shape against the encoding constraints.
    Validate {
        /// Shape as `t|l` or JSON.
        #[arg(long, required_unless_present = "fmatrix", conflicts_with = "fmatrix")]
        tree: Option<String>,
        /// F-matrix lower triangle, rows separated by `;`.
        #[arg(long)]
        fmatrix: Option<String>,
        /// Also require this many tips.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Translate between the text, JSON, F-matrix and D-matrix forms.
    Convert {
        /// Shape in any accepted form, or a file holding one.
        input: String,
        #[arg(long, value_enum, default_value = "fmatrix")]
        to: Target,
    },
    /// Least upper bound of two shapes.
    Lub {
        /// Shape or file.
        #[arg(long)]
        a: String,
        /// Shape or file.
        #[arg(long)]
        b: String,
        /// Print the intermediate matrices too.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Lattice distance through the least upper bound.
    Distance {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Up, down and total degree in the covering graph.
    Degree {
        #[arg(long)]
        tree: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Covering relations for all shapes with N tips (N <= 9).
    Hasse {
        #[arg(long)]
        n: usize,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<String>,
        /// `text` gives one `coarser<TAB>finer` line per edge.
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Mixing-time bounds for N >= 4.
    Bounds {
        #[arg(long)]
        n: usize,
        /// Add exact diameter, gaps and (N <= 5) bottleneck ratios; N <= 9.
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exact kernel diagnostics for N <= 9.
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "sym")]
        chain: Kind,
        #[arg(long)]
        lazy: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run Markov chains on the lattice and print visited shapes.
    SampleUniform {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[arg(long)]
        steps: u64,
        /// Keep every THIN-th state.
        #[arg(long, default_value_t = 1)]
        thin: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "mh")]
        chain: Kind,
        #[arg(long)]
        lazy: bool,
        /// Start every chain here instead of a semi-random shape.
        #[arg(long)]
        start: Option<String>,
        /// Worker threads (default: all cores). Output does not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// `text`: one shape per line; `jsonl`: chain, step and shape per
        /// line; `json`: per-chain records with acceptance counts.
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Topologies from the Beta(a, b) coalescent.
    SampleCoalescent {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0, conflicts_with = "alpha")]
        a: f64,
        #[arg(long, default_value_t = 1.0, conflicts_with = "alpha")]
        b: f64,
        /// Beta(2 - alpha, alpha), alpha in [1, 2).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Random valid shapes built from random F-matrix diagonals.
    SemiRandom {
        #[arg(long)]
        n: usize,
        /// Internal nodes; drawn uniformly from 1..N-1 per shape if absent.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// Print F-matrices instead of shapes.
        #[arg(long)]
        fmatrix: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Per-shape statistics and a summary for a file of shapes.
    Stats {
        /// One shape per line (text or JSON lines); `-` reads standard input.
        #[arg(long = "in")]
        input: String,
        /// Largest cherry size reported.
        #[arg(long, default_value_t = 6)]
        max_cherry: usize,
        /// Also write the JSON summary to this file.
        #[arg(long)]
        summary: Option<String>,
        /// `csv`: one row per shape; `json`: summary only; `text`: summary table.
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

fn usage(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(clap::error::ErrorKind::InvalidValue, msg).exit()
}

fn allow(format: Format, allowed: &[Format], cmd: &str) {
    if !allowed.contains(&format) {
        let names: Vec<String> = allowed
            .iter()
            .map(|f| f.to_possible_value().expect("named").get_name().to_string())
            .collect();
        usage(format!("{cmd} supports --format {}", names.join(", ")));
    }
}

fn set_threads(threads: Option<usize>) -> Result<()> {
    if let Some(t) = threads {
        if t == 0 {
            usage("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    Ok(())
}

fn json_line(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn json_pretty(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out).and_then(|()| out.flush().map_err(Into::into));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Enumerate { n, max_n, k, format } => enumerate(n, max_n, k, format, out),
        Command::Validate {
            tree,
            fmatrix,
            n,
            format,
        } => validate(tree, fmatrix, n, format, out),
        Command::Convert { input, to } => convert(&input, to, out),
        Command::Lub { a, b, trace, format } => lub(&a, &b, trace, format, out),
        Command::Distance { a, b, format } => {
            allow(format, &[Format::Text, Format::Json], "distance");
            let (x, y) = (load_shape(&a)?, load_shape(&b)?);
            let d = lattice_distance(&x, &y)?;
            match format {
                Format::Json => json_line(out, &json!({ "distance": d }))?,
                _ => writeln!(out, "{d}")?,
            }
            Ok(())
        }
        Command::Degree { tree, format } => {
            allow(format, &[Format::Text, Format::Json], "degree");
            let s = load_shape(&tree)?;
            let (up, down) = (deg_plus(&s), deg_minus(&s));
            match format {
                Format::Json => json_line(
                    out,
                    &json!({ "deg_plus": up as u64, "deg_minus": down as u64, "total": (up + down) as u64 }),
                )?,
                _ => writeln!(out, "deg_plus\t{up}\ndeg_minus\t{down}\ntotal\t{}", up + down)?,
            }
            Ok(())
        }
        Command::Hasse { n, out: path, format } => hasse(n, path, format, out),
        Command::Bounds { n, exact, format } => {
            allow(format, &[Format::Text, Format::Json], "bounds");
            let report = if exact {
                mixing_bounds_exact(n)?
            } else {
                mixing_bounds(n)?
            };
            match format {
                Format::Json => json_pretty(out, &report)?,
                _ => {
                    let value = serde_json::to_value(&report)?;
                    print_flat(out, "", &value)?;
                }
            }
            Ok(())
        }
        Command::Exact { n, chain, lazy, format } => exact(n, chain, lazy, format, out),
        Command::SampleUniform {
            n,
            chains,
            steps,
            thin,
            seed,
            chain,
            lazy,
            start,
            threads,
            format,
        } => {
            allow(format, &[Format::Text, Format::Jsonl, Format::Json], "sample-uniform");
            set_threads(threads)?;
            let spec = ChainSpec::new(chain.into(), lazy, n)?;
            let init = match start {
                Some(s) => Init::Given(load_shape(&s)?),
                None => Init::SemiRandom,
            };
            let config = RunConfig {
                n_chains: chains,
                n_steps: steps,
                thin,
                init,
                seed,
            };
            let outputs = run_chains(&spec, &config)?;
            match format {
                Format::Json => json_pretty(
                    out,
                    &json!({ "acceptance": overall_acceptance(&outputs), "chains": outputs }),
                )?,
                Format::Jsonl => {
                    for o in &outputs {
                        for (step, s) in &o.samples {
                            json_line(out, &json!({ "chain": o.chain, "step": step, "shape": s }))?;
                        }
                    }
                }
                _ => {
                    for o in &outputs {
                        for (_, s) in &o.samples {
                            writeln!(out, "{s}")?;
                        }
                    }
                }
            }
            Ok(())
        }
        Command::SampleCoalescent {
            n,
            a,
            b,
            alpha,
            count,
            seed,
            threads,
            format,
        } => {
            allow(format, &[Format::Text, Format::Jsonl], "sample-coalescent");
            set_threads(threads)?;
            let measure = match alpha {
                Some(al) => LambdaBeta::from_alpha(al)?,
                None => LambdaBeta::new(a, b)?,
            };
            let sampler = CoalescentSampler::new(n, measure)?;
            let blocks = count.div_ceil(COALESCENT_BLOCK);
            let shapes: Vec<Vec<TreeShape>> = (0..blocks)
                .into_par_iter()
                .map(|i| {
                    let mut rng = chain_rng(seed, i as u64);
                    let len = COALESCENT_BLOCK.min(count - i * COALESCENT_BLOCK);
                    (0..len).map(|_| sampler.sample(&mut rng)).collect()
                })
                .collect();
            for (i, s) in shapes.iter().flatten().enumerate() {
                match format {
                    Format::Jsonl => json_line(out, &json!({ "index": i, "shape": s }))?,
                    _ => writeln!(out, "{s}")?,
                }
            }
            Ok(())
        }
        Command::SemiRandom {
            n,
            k,
            count,
            seed,
            fmatrix,
            format,
        } => {
            allow(format, &[Format::Text, Format::Jsonl], "semi-random");
            if n < 2 {
                bail!("semi-random shapes need N >= 2, got {n}");
            }
            let mut rng = chain_rng(seed, 0);
            for _ in 0..count {
                let kk = match k {
                    Some(k) => k,
                    None => rng.gen_range(1..n),
                };
                let s = semi_random_init(n, kk, &mut rng)?;
                let f = FMatrix::from_shape(&s);
                match (format, fmatrix) {
                    (Format::Jsonl, _) => json_line(out, &json!({ "k": kk, "shape": s, "fmatrix": f }))?,
                    (_, true) => writeln!(out, "{f}")?,
                    (_, false) => writeln!(out, "{s}")?,
                }
            }
            Ok(())
        }
        Command::Stats {
            input,
            max_cherry,
            summary,
            format,
        } => stats(&input, max_cherry, summary, format, out),
    }
}

fn enumerate(
    n: Option<usize>,
    max_n: Option<usize>,
    k: Option<usize>,
    format: Format,
    out: &mut dyn Write,
) -> Result<()> {
    allow(format, &[Format::Csv, Format::Json, Format::Text], "enumerate");
    if let (Some(n), Some(k)) = (n, k) {
        let r = count_shapes(n, k);
        if !r.in_range {
            bail!("K must lie in 1..=N-1 for N = {n}, got {k}");
        }
        match format {
            Format::Json => json_line(out, &json!({ "n": n, "k": k, "count": r.value.to_string() }))?,
            _ => writeln!(out, "{}", r.value)?,
        }
        return Ok(());
    }
    let rows: Vec<usize> = match (n, max_n) {
        (Some(n), _) => vec![n],
        (None, m) => (2..=m.unwrap_or(12)).collect(),
    };
    if rows.iter().any(|&n| n < 2) {
        bail!("N must be at least 2");
    }
    let kmax = rows.iter().max().expect("nonempty") - 1;
    let table: Vec<(usize, Vec<String>, String)> = rows
        .iter()
        .map(|&n| {
            let row = count_row(n);
            let total: num_bigint::BigUint = row.iter().sum();
            (n, row.iter().map(ToString::to_string).collect(), total.to_string())
        })
        .collect();
    match format {
        Format::Json => {
            let value: Vec<serde_json::Value> = table
                .iter()
                .map(|(n, row, total)| json!({ "n": n, "counts": row, "total": total }))
                .collect();
            json_pretty(out, &value)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["N".to_string()];
            header.extend((1..=kmax).map(|k| k.to_string()));
            header.push("Total".into());
            w.write_record(&header)?;
            for (n, row, total) in &table {
                let mut rec = vec![n.to_string()];
                rec.extend((0..kmax).map(|i| row.get(i).cloned().unwrap_or_default()));
                rec.push(total.clone());
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
        _ => {
            let width = table.iter().map(|(_, _, t)| t.len()).max().unwrap_or(1).max(5);
            write!(out, "{:>4}", "N\\K")?;
            for k in 1..=kmax {
                write!(out, " {k:>width$}")?;
            }
            writeln!(out, " {:>width$}", "Total")?;
            for (n, row, total) in &table {
                write!(out, "{n:>4}")?;
                for i in 0..kmax {
                    write!(out, " {:>width$}", row.get(i).map(String::as_str).unwrap_or(""))?;
                }
                writeln!(out, " {total:>width$}")?;
            }
        }
    }
    Ok(())
}

fn validate(
    tree: Option<String>,
    fmatrix: Option<String>,
    n: Option<usize>,
    format: Format,
    out: &mut dyn Write,
) -> Result<()> {
    allow(format, &[Format::Text, Format::Json], "validate");
    let s = match (tree, fmatrix) {
        (Some(t), _) => parse_shape(&t)?,
        (None, Some(f)) => {
            let f = parse_fmatrix(&f)?;
            f.validate().context("invalid F-matrix")?;
            f.to_shape()?
        }
        (None, None) => usage("one of --tree or --fmatrix is required"),
    };
    if let Some(n) = n {
        if s.n_tips() != n {
            bail!("shape has {} tips, expected {n}", s.n_tips());
        }
    }
    match format {
        Format::Json => json_line(
            out,
            &json!({ "valid": true, "n": s.n_tips(), "k": s.n_internal(), "shape": s }),
        )?,
        _ => writeln!(out, "valid: N={} K={}", s.n_tips(), s.n_internal())?,
    }
    Ok(())
}

fn convert(input: &str, to: Target, out: &mut dyn Write) -> Result<()> {
    let s = load_shape(input)?;
    match to {
        Target::Text => writeln!(out, "{s}")?,
        Target::Json => writeln!(out, "{}", s.to_json())?,
        Target::Fmatrix => writeln!(out, "{}", FMatrix::from_shape(&s))?,
        Target::Dmatrix => {
            let d = DMatrix::from_shape(&s);
            let rows: Vec<String> = (0..d.dim())
                .map(|i| (0..=i).map(|j| d.get(i, j).to_string()).collect::<Vec<_>>().join(","))
                .collect();
            writeln!(out, "{}", rows.join(";"))?;
        }
    }
    Ok(())
}

fn lub(a: &str, b: &str, trace: bool, format: Format, out: &mut dyn Write) -> Result<()> {
    allow(format, &[Format::Text, Format::Json], "lub");
    let (x, y) = (load_shape(a)?, load_shape(b)?);
    let t = lub_trace(&x, &y)?;
    let f = t.steps.last().expect("trace ends in the bound");
    let j = f.to_shape()?;
    match format {
        Format::Json => {
            let mut value = json!({ "lub": j, "fmatrix": f.lower_rows() });
            if trace {
                value["aligned"] = json!([t.aligned.0.lower_rows(), t.aligned.1.lower_rows()]);
                value["steps"] = json!(t.steps.iter().map(FMatrix::lower_rows).collect::<Vec<_>>());
            }
            json_line(out, &value)?;
        }
        _ => {
            if trace {
                writeln!(out, "aligned a\t{}", t.aligned.0)?;
                writeln!(out, "aligned b\t{}", t.aligned.1)?;
                for (i, m) in t.steps.iter().enumerate() {
                    writeln!(out, "step {i}\t{m}")?;
                }
            }
            writeln!(out, "{j}")?;
        }
    }
    Ok(())
}

fn hasse(n: usize, path: Option<String>, format: Format, out: &mut dyn Write) -> Result<()> {
    allow(format, &[Format::Text, Format::Json], "hasse");
    let g = build_hasse(n)?;
    let mut file;
    let sink: &mut dyn Write = match &path {
        Some(p) => {
            file = BufWriter::new(File::create(p).with_context(|| format!("cannot create {p}"))?);
            &mut file
        }
        None => out,
    };
    let v = g.vertices();
    match format {
        Format::Json => {
            let edges: Vec<[usize; 2]> = g.edges().into_iter().map(|(a, b)| [a, b]).collect();
            json_pretty(sink, &json!({ "n": n, "vertices": v, "edges": edges }))?;
        }
        _ => {
            for (a, b) in g.edges() {
                writeln!(sink, "{}\t{}", v[a], v[b])?;
            }
        }
    }
    sink.flush()?;
    Ok(())
}

fn exact(n: usize, kind: Kind, lazy: bool, format: Format, out: &mut dyn Write) -> Result<()> {
    allow(format, &[Format::Text, Format::Json], "exact");
    let spec = ChainSpec::new(kind.into(), lazy, n)?;
    let chain = exact_kernel(&spec)?;
    let gap = exact_gap(&chain);
    let bottleneck = if n <= BOTTLENECK_CAP {
        Some(exact_bottleneck(&chain)?)
    } else {
        None
    };
    let value = json!({
        "n": n,
        "chain": spec.kind,
        "lazy": lazy,
        "states": chain.len(),
        "m_n": spec.m_n().map(|m| m as u64),
        "row_sum_residual": chain.row_sum_residual(),
        "stationarity_residual": chain.stationarity_residual(),
        "detailed_balance_residual": chain.detailed_balance_residual(),
        "irreducible": chain.is_irreducible(),
        "gap": gap.gamma,
        "absolute_gap": gap.gamma_star,
        // a periodic kernel has no finite relaxation time
        "relaxation_time": (gap.gamma_star > 1e-12).then_some(gap.t_rel),
        "bottleneck": bottleneck,
    });
    match format {
        Format::Json => json_pretty(out, &value)?,
        _ => print_flat(out, "", &value)?,
    }
    Ok(())
}

/// `key<TAB>value` lines for nested JSON, keys joined with dots.
fn print_flat(out: &mut dyn Write, prefix: &str, value: &serde_json::Value) -> Result<()> {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                print_flat(out, &key, v)?;
            }
        }
        serde_json::Value::Array(items) if items.iter().all(|v| !v.is_object()) => {
            let parts: Vec<String> = items.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{prefix}\t{}", parts.join(" "))?;
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                print_flat(out, &format!("{prefix}.{i}"), v)?;
            }
        }
        serde_json::Value::String(s) => writeln!(out, "{prefix}\t{s}")?,
        other => writeln!(out, "{prefix}\t{other}")?,
    }
    Ok(())
}

fn stats(input: &str, max_cherry: usize, summary: Option<String>, format: Format, out: &mut dyn Write) -> Result<()> {
    allow(format, &[Format::Csv, Format::Json, Format::Text], "stats");
    if max_cherry < 2 {
        usage("--max-cherry must be at least 2");
    }
    let shapes = read_shapes(input)?;
    let per: Vec<ShapeStats> = shapes.iter().map(shape_stats).collect();
    let sum = aggregate(&per, 2..=max_cherry)?;
    if let Some(path) = &summary {
        let mut f = BufWriter::new(File::create(path).with_context(|| format!("cannot create {path}"))?);
        json_pretty(&mut f, &sum)?;
        f.flush()?;
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header: Vec<String> = ["n", "k", "max_block", "avg_block"].map(String::from).to_vec();
            header.extend((2..=max_cherry).map(|m| format!("cherry_{m}")));
            w.write_record(&header)?;
            for st in &per {
                let mut rec = vec![
                    st.n.to_string(),
                    st.k.to_string(),
                    st.max_block.to_string(),
                    st.avg_block.to_string(),
                ];
                rec.extend((2..=max_cherry).map(|m| st.cherry(m).to_string()));
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
        Format::Json => json_pretty(out, &sum)?,
        _ => print_flat(out, "", &serde_json::to_value(&sum)?)?,
    }
    Ok(())
}
