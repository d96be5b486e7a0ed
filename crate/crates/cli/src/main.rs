//! Command-line pipeline for classifying hyperfocused arcs in PG(2,2^h):
//! enumerate or ingest 1-factorizations, filter them by the two geometric
//! necessary conditions, decide embeddability per field, and construct or
//! verify the subgroup-derived arcs.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use hyperfocus_core::arcs::{
    cyclic_subgroup_arc, find_focus_lines, induced_factorization, is_hyperfocused,
    mult_subgroup_arc, parse_arc_file, write_arc_file, Arc,
};
use hyperfocus_core::embed::{
    embed_with, extract_conic_parameter, scan_fields, Contradiction, EmbedOptions, EmbeddingResult,
    UnsatReason,
};
use hyperfocus_core::filters::{filter_stream, FilterReport, Stages, StreamOptions};
use hyperfocus_core::gf2m::FieldCtx;
use hyperfocus_core::onefact::{canonical_form, enumerate, isomorphic, OneFactorization};
use hyperfocus_core::pg2::{Conic, LineClass};

/// Exit codes beyond success/failure: embed reports its verdict, iso its
/// answer.
const EXIT_UNSAT: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_NOT_ISOMORPHIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hyperfocus",
    version,
    about = "Hyperfocused-arc toolkit: 1-factorizations, filters, embeddability, constructions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConstructMode {
    /// Multiplicative subgroup of GF(q)*; secant focus line.
    Mult,
    /// Cyclic subgroup of order dividing q+1; external focus line.
    Cyclic,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate all nonisomorphic 1-factorizations of K_n (even n <= 10),
    /// one compact record per line.
    Enumerate {
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stream compact records through the necessary-condition filters.
    Filter {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated subset of c4,k4e; empty validates only.
        #[arg(long, default_value = "c4,k4e")]
        stages: String,
        #[arg(long)]
        survivors: PathBuf,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Append the report to this file as key=value lines.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Expected vertex count (inferred from the first record if absent).
        #[arg(long)]
        n: Option<usize>,
        /// Worker threads (default: HYPERFOCUS_WORKERS or all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Stop after this many records; resume later from the checkpoint.
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Decide embeddability of a 1-factorization over GF(2^h).
    /// Exit code: 0 Sat, 3 Unsat, 4 budget exceeded.
    Embed {
        #[arg(long = "in")]
        input: PathBuf,
        /// Field degree for a single decision.
        #[arg(long, conflicts_with = "scan")]
        h: Option<u32>,
        /// Scan h = 1..=H and print a verdict table.
        #[arg(long)]
        scan: Option<u32>,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Record index within the input (0-based).
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Build a hyperfocused (d+1)-arc from a subgroup construction and
    /// write it in the arc file format.
    Construct {
        #[arg(long, value_enum)]
        mode: ConstructMode,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        order: u32,
        /// Re-verify the construction and report the focus-line class.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the induced factorization as a compact record.
        #[arg(long)]
        factorization: Option<PathBuf>,
    },
    /// Check an arc file: arc property, plus hyperfocus on its line (or a
    /// full focus-line search when the file has no line).
    VerifyArc {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Canonical forms of the input records, one compact record per line.
    Canon {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test two 1-factorizations for isomorphism.
    /// Exit code: 0 isomorphic, 3 not.
    Iso {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Full cascade over a compact-format dataset: both filters, then an
    /// embedding scan of the survivors, then isomorphism comparison
    /// against the subgroup construction.
    Classify {
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long = "in")]
        input: PathBuf,
        /// Scan fields h = 1..=SCAN for each survivor.
        #[arg(long, default_value_t = 7)]
        scan: u32,
        /// Survivor stream path (default: the input path plus `.survivors`).
        #[arg(long)]
        survivors: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Write the report here as well as to stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe closes
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Enumerate { n, out } => {
            let all = enumerate(n)?;
            let mut text = String::new();
            for f in &all {
                text.push_str(&f.to_compact());
                text.push('\n');
            }
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Filter {
            input,
            stages,
            survivors,
            checkpoint,
            report,
            n,
            workers,
            limit,
        } => {
            let opts = StreamOptions {
                stages: Stages::parse(&stages)?,
                expected_n: n,
                workers: worker_count(workers),
                limit,
                ..StreamOptions::default()
            };
            let r = filter_stream(&input, &survivors, checkpoint.as_deref(), &opts)?;
            println!("{r}");
            if let Some(path) = report {
                append(&path, &format!("{r}\n"))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Embed {
            input,
            h,
            scan,
            budget,
            index,
        } => {
            let f = read_record(&input, index)?;
            let opts = EmbedOptions {
                budget,
                ..EmbedOptions::default()
            };
            if let Some(h_max) = scan {
                let mut any_budget = false;
                for (h, r) in scan_fields(&f, h_max, &opts) {
                    println!("h={h}: {}", verdict_line(&FieldCtx::new(h)?, &r));
                    any_budget |= matches!(r, EmbeddingResult::Budget(_));
                }
                return Ok(if any_budget {
                    ExitCode::from(EXIT_BUDGET)
                } else {
                    ExitCode::SUCCESS
                });
            }
            let h = h.context("pass --h H for a single field or --scan H for a range")?;
            let ctx = FieldCtx::new(h)?;
            match embed_with(&f, &ctx, &opts) {
                EmbeddingResult::Sat(emb) => {
                    let arc = Arc::new(&ctx, emb.vertex_points.clone())?;
                    print!("{}", write_arc_file(&ctx, &arc, Some(&emb.focus_line)));
                    for (c, p) in emb.focus_points.iter().enumerate() {
                        println!("# focus {} {:?}", (b'A' + c as u8) as char, p);
                    }
                    if let Some(a) = extract_conic_parameter(&ctx, &emb) {
                        println!("# conic parameter a={a} min_poly={}", ctx.min_poly(a));
                    }
                    Ok(ExitCode::SUCCESS)
                }
                r @ EmbeddingResult::Unsat(_) => {
                    println!("{}", verdict_line(&ctx, &r));
                    Ok(ExitCode::from(EXIT_UNSAT))
                }
                r @ EmbeddingResult::Budget(_) => {
                    println!("{}", verdict_line(&ctx, &r));
                    Ok(ExitCode::from(EXIT_BUDGET))
                }
            }
        }
        Cmd::Construct {
            mode,
            h,
            order,
            verify,
            out,
            factorization,
        } => {
            let ctx = FieldCtx::new(h)?;
            let (arc, line) = match mode {
                ConstructMode::Mult => mult_subgroup_arc(&ctx, order)?,
                ConstructMode::Cyclic => cyclic_subgroup_arc(&ctx, order)?,
            };
            emit(out.as_deref(), &write_arc_file(&ctx, &arc, Some(&line)))?;
            let focus = is_hyperfocused(&ctx, &arc, &line)
                .context("constructed arc failed hyperfocus re-verification")?;
            let induced = induced_factorization(&arc, &focus)?;
            if let Some(path) = factorization {
                std::fs::write(&path, format!("{}\n", induced.to_compact()))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if verify {
                let class = Conic::standard(&ctx).classify_line(&ctx, &line)?;
                eprintln!(
                    "verified: {}-arc hyperfocused on {:?} ({} focus points, line {})",
                    arc.len(),
                    line,
                    focus.focus_points.len(),
                    class_name(class),
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::VerifyArc { input } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let file = parse_arc_file(&text)?;
            let k = file.arc.len();
            match file.line {
                Some(line) => {
                    let Some(focus) = is_hyperfocused(&file.ctx, &file.arc, &line) else {
                        bail!("{k}-arc is valid but not hyperfocused on {line:?}");
                    };
                    println!(
                        "ok: {k}-arc hyperfocused on {:?} with {} focus points",
                        line,
                        focus.focus_points.len()
                    );
                }
                None => {
                    let lines = find_focus_lines(&file.ctx, &file.arc)?;
                    if lines.is_empty() {
                        println!("ok: {k}-arc; no focus lines");
                    } else {
                        for (l, fd) in &lines {
                            println!(
                                "ok: {k}-arc hyperfocused on {:?} with {} focus points",
                                l,
                                fd.focus_points.len()
                            );
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Canon { input, out } => {
            let records = read_records(&input)?;
            let mut text = String::new();
            for f in &records {
                text.push_str(&canonical_form(f).to_compact());
                text.push('\n');
            }
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Iso { a, b } => {
            let fa = read_record(&a, 0)?;
            let fb = read_record(&b, 0)?;
            match isomorphic(&fa, &fb) {
                Some(map) => {
                    let colors: String = map
                        .color
                        .iter()
                        .map(|&c| (b'A' + c as u8) as char)
                        .collect();
                    println!("isomorphic: vertices {:?} colors {colors}", map.vertex);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("not isomorphic");
                    Ok(ExitCode::from(EXIT_NOT_ISOMORPHIC))
                }
            }
        }
        Cmd::Classify {
            n,
            input,
            scan,
            survivors,
            checkpoint,
            report,
            budget,
            workers,
        } => {
            let text = classify(
                n,
                &input,
                scan,
                survivors,
                checkpoint.as_deref(),
                budget,
                worker_count(workers),
            )?;
            print!("{text}");
            if let Some(path) = report {
                append(&path, &text)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn worker_count(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("HYPERFOCUS_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn append(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Read 1-factorizations from a `.1f` text file (one record) or a `.1fc`
/// compact file (one record per line).
fn read_records(path: &Path) -> Result<Vec<OneFactorization>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with("onefact") {
        return Ok(vec![OneFactorization::parse_text(&text)?]);
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            OneFactorization::parse_compact(line)
                .with_context(|| format!("{}:{}", path.display(), i + 1))?,
        );
    }
    if out.is_empty() {
        bail!("{}: no records", path.display());
    }
    Ok(out)
}

fn read_record(path: &Path, index: usize) -> Result<OneFactorization> {
    let records = read_records(path)?;
    records
        .get(index)
        .cloned()
        .with_context(|| format!("{}: no record at index {index}", path.display()))
}

fn class_name(c: LineClass) -> &'static str {
    match c {
        LineClass::External => "external",
        LineClass::Tangent => "tangent",
        LineClass::Secant => "secant",
    }
}

fn contradiction_line(c: &Contradiction) -> String {
    match c {
        Contradiction::FocusCollision { colors, point } => format!(
            "focus collision: colors {} and {} forced onto the same point {:?}",
            (b'A' + colors.0) as char,
            (b'A' + colors.1) as char,
            point
        ),
        other => format!("{other:?}"),
    }
}

fn verdict_line(ctx: &FieldCtx, r: &EmbeddingResult) -> String {
    match r {
        EmbeddingResult::Sat(emb) => {
            let mut s = "Sat".to_string();
            if let Some(a) = extract_conic_parameter(ctx, emb) {
                let _ = write!(s, " (conic parameter a={a}, min_poly {})", ctx.min_poly(a));
            }
            s
        }
        EmbeddingResult::Unsat(rep) => {
            let mut s = match rep.reason {
                UnsatReason::SizeBound { k, q } => {
                    format!("Unsat (size bound: no hyperfocused {k}-arc in PG(2,{q}))")
                }
                UnsatReason::Exhausted => format!(
                    "Unsat (exhausted after {} branch nodes, {} contradictions)",
                    rep.stats.nodes,
                    rep.stats.total_contradictions()
                ),
            };
            if let Some(c) = &rep.stats.focus_collision_sample {
                let _ = write!(s, "; {}", contradiction_line(c));
            }
            s
        }
        EmbeddingResult::Budget(stats) => format!(
            "budget exceeded ({} branch nodes tried; not a verdict)",
            stats.nodes
        ),
    }
}

fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

/// The cascade: validate + filter the dataset, scan fields for every
/// survivor, and compare Sat survivors against the subgroup construction.
fn classify(
    n: usize,
    input: &Path,
    scan: u32,
    survivors: Option<PathBuf>,
    checkpoint: Option<&Path>,
    budget: u64,
    workers: usize,
) -> Result<String> {
    let started = Instant::now();
    let survivors = survivors.unwrap_or_else(|| {
        let mut p = input.as_os_str().to_owned();
        p.push(".survivors");
        PathBuf::from(p)
    });
    let opts = StreamOptions {
        stages: Stages::both(),
        expected_n: Some(n),
        workers,
        ..StreamOptions::default()
    };
    let filter_report: FilterReport = filter_stream(input, &survivors, checkpoint, &opts)?;
    anyhow::ensure!(
        filter_report.read
            == filter_report.rejected_c4 + filter_report.rejected_k4e + filter_report.survived,
        "filter counts do not add up"
    );

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "# hyperfocus classify report");
    let _ = writeln!(w);
    let _ = writeln!(w, "- input: {}", input.display());
    let _ = writeln!(w, "- sha256: {}", sha256_hex(input)?);
    let _ = writeln!(w, "- n: {n}");
    let _ = writeln!(w, "- scan: h = 1..{scan}");
    let _ = writeln!(w, "- workers: {workers}");
    let _ = writeln!(w);
    let _ = writeln!(w, "## filters");
    let _ = writeln!(w);
    let _ = writeln!(w, "- read: {}", filter_report.read);
    let _ = writeln!(w, "- rejected_c4: {}", filter_report.rejected_c4);
    let _ = writeln!(w, "- rejected_k4e: {}", filter_report.rejected_k4e);
    let _ = writeln!(w, "- survived: {}", filter_report.survived);
    let _ = writeln!(w, "- survivors: {}", survivors.display());
    let _ = writeln!(w);

    let survivors_list = if filter_report.survived > 0 {
        read_records(&survivors)?
    } else {
        Vec::new()
    };

    // reference: the order-11 cyclic-subgroup 12-arc over GF(2^5)
    let reference = if n == 12 {
        let ctx = FieldCtx::new(5)?;
        let (arc, line) = cyclic_subgroup_arc(&ctx, 11)?;
        let focus = is_hyperfocused(&ctx, &arc, &line)
            .context("reference construction failed verification")?;
        Some(induced_factorization(&arc, &focus)?)
    } else {
        None
    };

    let _ = writeln!(w, "## embedding verdicts");
    let _ = writeln!(w);
    let embed_opts = EmbedOptions {
        budget,
        ..EmbedOptions::default()
    };
    for (idx, f) in survivors_list.iter().enumerate() {
        let _ = writeln!(w, "### survivor {}", idx + 1);
        let _ = writeln!(w);
        let _ = writeln!(w, "- record: {}", f.to_compact());
        let mut sat_h = Vec::new();
        for (h, r) in scan_fields(f, scan, &embed_opts) {
            let ctx = FieldCtx::new(h)?;
            let _ = writeln!(w, "- h={h}: {}", verdict_line(&ctx, &r));
            if r.is_sat() {
                sat_h.push(h);
            }
        }
        if let Some(reference) = &reference {
            let verdict = match isomorphic(f, reference) {
                Some(_) => "isomorphic",
                None => "not isomorphic",
            };
            let _ = writeln!(
                w,
                "- vs cyclic-subgroup construction (GF(2^5), order 11): {verdict}"
            );
        }
        if !sat_h.is_empty() {
            let _ = writeln!(w, "- embeddable at h in {sat_h:?}");
        }
        let _ = writeln!(w);
    }

    let _ = writeln!(w, "## summary");
    let _ = writeln!(w);
    let _ = writeln!(w, "- {}", filter_report.summary_line());
    let _ = writeln!(w, "- wall_time_ms: {}", started.elapsed().as_millis());
    Ok(out)
}
