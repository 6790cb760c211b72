//! Command-line front end: Hamiltonian files in, verified pattern
//! libraries out, plus inspection and rewriting of existing libraries.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use mbqs::grouping::{anticommutation_graph, validate_partition};
use mbqs::io::jsonl::{LibraryFile, ReadMode};
use mbqs::pipeline::{EntryOutcome, LibraryValidation};
use mbqs::{
    build_library, circuit_to_pattern, compactify_library, concat_library, group, pattern_to_ascii,
    read_library, report_csv, synth_subset_circuit, validate_library, write_library, BuildOptions,
    CompactMethod, Hamiltonian, Strategy,
};

#[derive(Parser)]
#[command(name = "mbqs", version, about = "Measurement-pattern library compiler and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a Hamiltonian file and summarize it.
    Ingest {
        /// Text file: one `<index> <coefficient> <pauli string>` per line.
        hamiltonian: PathBuf,
    },
    /// Partition the terms into commuting subsets.
    Group {
        hamiltonian: PathBuf,
        /// one-to-one, smallest-last, or full.
        #[arg(long, default_value = "one-to-one")]
        strategy: String,
    },
    /// Print the circuit synthesized for one subset.
    Synth {
        hamiltonian: PathBuf,
        #[arg(long, default_value = "one-to-one")]
        strategy: String,
        /// Subset index within the partition.
        #[arg(long, default_value_t = 0)]
        subset: usize,
        /// 0 as synthesized, 1 peephole-optimized.
        #[arg(long, default_value_t = 1)]
        opt: u8,
    },
    /// Transpile a circuit file into a measurement pattern.
    Transpile { circuit: PathBuf },
    /// Build the full pattern library and write it as JSONL.
    Export {
        hamiltonian: PathBuf,
        #[arg(long, default_value = "one-to-one")]
        strategy: String,
        #[arg(long, default_value_t = 1)]
        opt: u8,
        /// Recorded in the header; validation seeds derive from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print per-entry metrics for a library.
    Metrics {
        library: PathBuf,
        /// Tolerate meta blocks that disagree with the patterns.
        #[arg(long)]
        lenient: bool,
    },
    /// Replay library patterns against their circuits; exits nonzero on
    /// any failure.
    Validate {
        library: PathBuf,
        /// The Hamiltonian the library was built from.
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Entries wider than this many wires are skipped.
        #[arg(long, default_value_t = 6)]
        max_qubits: usize,
    },
    /// Chain all entries into one pattern (one Trotter step).
    Concat {
        library: PathBuf,
        /// Write the result as a one-entry library instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite a library with a compactification pass.
    Compactify {
        library: PathBuf,
        /// wires (contract zero-angle pairs) or pauli (eliminate
        /// Pauli-basis measurements).
        method: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Metric table for a library, as CSV.
    Report {
        library: PathBuf,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // die quietly when piped into head and friends instead of
    // panicking on the closed descriptor
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    if let Ok(workers) = std::env::var("MBQS_WORKERS") {
        match workers.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: could not set worker count: {e}");
                }
            }
            _ => eprintln!("warning: ignoring MBQS_WORKERS={workers} (not a positive integer)"),
        }
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_hamiltonian(path: &Path) -> Result<Hamiltonian> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Hamiltonian::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_library(path: &Path, mode: ReadMode) -> Result<LibraryFile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let lib =
        read_library(&text, mode).with_context(|| format!("parsing {}", path.display()))?;
    for w in &lib.warnings {
        eprintln!("warning: {w}");
    }
    Ok(lib)
}

fn parse_strategy(name: &str) -> Result<Strategy> {
    Strategy::from_name(name)
        .ok_or_else(|| anyhow::anyhow!("unknown strategy `{name}` (one-to-one, smallest-last, full)"))
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "library".into(), |s| s.to_string_lossy().into_owned())
}

fn print_pattern(p: &mbqs::Pattern) -> Result<()> {
    let inputs: Vec<String> = p.inputs().iter().map(usize::to_string).collect();
    let outputs: Vec<String> = p.outputs().iter().map(usize::to_string).collect();
    println!("inputs: {}", inputs.join(" "));
    println!("outputs: {}", outputs.join(" "));
    println!("{}", pattern_to_ascii(p)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Cmd::Ingest { hamiltonian } => {
            let h = load_hamiltonian(&hamiltonian)?;
            let adj = anticommutation_graph(&h);
            let pairs: usize = adj.iter().map(Vec::len).sum::<usize>() / 2;
            let max_weight = h.terms().iter().map(|t| t.string.weight()).max().unwrap_or(0);
            println!("qubits: {}", h.num_qubits());
            println!("terms: {}", h.len());
            println!("anticommuting pairs: {pairs}");
            println!("max weight: {max_weight}");
        }
        Cmd::Group { hamiltonian, strategy } => {
            let h = load_hamiltonian(&hamiltonian)?;
            let strategy = parse_strategy(&strategy)?;
            let partition = group(&h, strategy);
            let report = validate_partition(&partition, &h);
            for (k, subset) in partition.subsets.iter().enumerate() {
                let ids: Vec<String> = subset.iter().map(usize::to_string).collect();
                println!("subset {k} ({} terms): {}", subset.len(), ids.join(" "));
            }
            if !report.is_ok() {
                bail!("partition failed its own validation: {report:?}");
            }
            println!("subsets: {}", partition.subsets.len());
        }
        Cmd::Synth { hamiltonian, strategy, subset, opt } => {
            let h = load_hamiltonian(&hamiltonian)?;
            let strategy = parse_strategy(&strategy)?;
            let partition = group(&h, strategy);
            if subset >= partition.subsets.len() {
                bail!("subset {subset} out of range ({} subsets)", partition.subsets.len());
            }
            let c = synth_subset_circuit(&h, &partition, subset);
            let c = match opt {
                0 => mbqs::circuit::optimize_level0(&c),
                _ => mbqs::circuit::optimize_level1(&c),
            };
            print!("{}", mbqs::circuit_to_text(&c));
        }
        Cmd::Transpile { circuit } => {
            let text = fs::read_to_string(&circuit)
                .with_context(|| format!("reading {}", circuit.display()))?;
            let c = mbqs::parse_circuit_text(&text)
                .with_context(|| format!("parsing {}", circuit.display()))?;
            let p = circuit_to_pattern(&c)?;
            print_pattern(&p)?;
        }
        Cmd::Export { hamiltonian, strategy, opt, seed, out } => {
            let h = load_hamiltonian(&hamiltonian)?;
            let mut opts = BuildOptions::new(parse_strategy(&strategy)?, instance_name(&hamiltonian));
            opts.opt_level = opt;
            opts.seed = seed;
            let lib = build_library(&h, &opts)?;
            fs::write(&out, write_library(&lib)?)
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} entries to {}", lib.entries.len(), out.display());
        }
        Cmd::Metrics { library, lenient } => {
            let mode = if lenient { ReadMode::Lenient } else { ReadMode::Strict };
            let lib = load_library(&library, mode)?;
            print!("{}", report_csv(&lib).replace(',', "\t"));
        }
        Cmd::Validate { library, hamiltonian, trials, seed, max_qubits } => {
            let lib = load_library(&library, ReadMode::Strict)?;
            let h = load_hamiltonian(&hamiltonian)?;
            let result = validate_library(&lib, &h, trials, seed, max_qubits);
            print_validation(&result);
            if !result.pass {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Concat { library, out } => {
            let lib = load_library(&library, ReadMode::Strict)?;
            let chained = concat_library(&lib)?;
            match out {
                None => print_pattern(&chained)?,
                Some(path) => {
                    let terms = lib
                        .entries
                        .iter()
                        .map(|e| e.terms.clone())
                        .collect::<Option<Vec<_>>>()
                        .map(|lists| lists.into_iter().flatten().collect::<Vec<_>>());
                    let mut header = lib.header.clone();
                    if let Some(h) = &mut header {
                        h.strategy = format!("{}+concat", h.strategy);
                        h.subsets = 1;
                    }
                    let single = LibraryFile {
                        header,
                        entries: vec![mbqs::LibraryEntry {
                            subset: 0,
                            terms,
                            pattern: chained,
                            compact: None,
                        }],
                        warnings: Vec::new(),
                    };
                    fs::write(&path, write_library(&single)?)
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("wrote chained pattern to {}", path.display());
                }
            }
        }
        Cmd::Compactify { library, method, out } => {
            let method = CompactMethod::from_name(&method)
                .ok_or_else(|| anyhow::anyhow!("unknown method `{method}` (wires, pauli)"))?;
            let lib = load_library(&library, ReadMode::Strict)?;
            let (packed, reports) = compactify_library(&lib, method)?;
            let removed: usize = reports.iter().map(|r| r.measurements_removed).sum();
            let before: usize = reports.iter().map(|r| r.nodes_before).sum();
            let after: usize = reports.iter().map(|r| r.nodes_after).sum();
            fs::write(&out, write_library(&packed)?)
                .with_context(|| format!("writing {}", out.display()))?;
            println!(
                "removed {removed} measurements ({before} -> {after} nodes) across {} entries",
                reports.len()
            );
        }
        Cmd::Report { library, out } => {
            let lib = load_library(&library, ReadMode::Strict)?;
            let csv = report_csv(&lib);
            match out {
                None => print!("{csv}"),
                Some(path) => fs::write(&path, csv)
                    .with_context(|| format!("writing {}", path.display()))?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_validation(result: &LibraryValidation) {
    for entry in &result.entries {
        match &entry.outcome {
            EntryOutcome::Skipped(reason) => {
                println!("subset {}: skipped ({reason})", entry.subset);
            }
            EntryOutcome::Error(e) => println!("subset {}: error ({e})", entry.subset),
            EntryOutcome::Checked { report, deterministic } => {
                let verdict = if report.pass && *deterministic { "ok" } else { "FAILED" };
                println!(
                    "subset {}: {verdict} (min fidelity {:.9}, min overlap {:.6}, deterministic: {})",
                    entry.subset, report.min_fidelity, report.min_bhattacharyya, deterministic
                );
            }
        }
    }
    println!("verdict: {}", if result.pass { "pass" } else { "fail" });
}
