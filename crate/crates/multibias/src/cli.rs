//! Command-line front end over the library: one subcommand per
//! capability, text files in and out.
//!
//! Exit codes: 0 success / verified; 1 verification failure (with a
//! witness on standard output) or search exhaustion; 2 input error;
//! 3 budget exceeded.

use crate::bias::{bias, bias_oracle, bias_oracle_affine};
use crate::battery::{run_lemma_battery, run_main_term_battery, BatteryConfig};
use crate::enclose::certified_decimal;
use crate::format::{emit_mlcert, emit_mlmap, parse_mlcert, parse_mlmap, MlmapDocument};
use crate::group::FinAbGroup;
use crate::map::from_group_map;
use crate::spectrum::{enumerate_bias_set, enumerate_bias_set_affine, gauss_sum, SpectrumWitness};
use crate::structure::{
    crush_decomposition, decompose_by_induction, extend_domain, extend_range, extend_rank_one,
    search_decomposition, verify_certificate, verify_crush, RankOneWitness, Verification,
};
use crate::{Budget, Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "multibias", version, about = "Exact bias computation for multilinear maps of finite abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Kernel-counting method (exact rational; multilinear maps only).
    Kernel,
    /// Literal averaging of e(φ(x)) (exact cyclotomic value).
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    /// Bounded exhaustive search in canonical order.
    Search,
    /// Primary splitting plus one proof-style induction step, with
    /// search at the base.
    Induction,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtendMode {
    /// Enlarge the first domain from pA_1 to A_1 (codomain Z/q to Z/pq).
    Domain,
    /// Enlarge the codomain from Z/q to Z/pq.
    Range,
    /// Extend a map factoring through m_q to one through m_pq
    /// (requires a single-term certificate as the witness).
    Rank1,
}

#[derive(Subcommand)]
enum Command {
    /// Exact bias of the map in an MLMAP file.
    Bias {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Kernel)]
        method: Method,
        /// Maximum number of domain points the oracle may enumerate.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Search for a partition-rank certificate.
    Decompose {
        file: PathBuf,
        #[arg(long = "max-q")]
        max_q: u64,
        #[arg(long = "max-rank")]
        max_rank: usize,
        #[arg(long, value_enum, default_value_t = Strategy::Search)]
        strategy: Strategy,
        /// Write the certificate to this MLCERT file.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Maximum number of candidate tensors to try.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Verify a certificate against a map.
    Verify { map: PathBuf, cert: PathBuf },
    /// Run one of the extension constructions on a map file.
    Extend {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: ExtendMode,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        /// Single-term MLCERT witness (rank1 mode).
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Write the extended object here instead of stdout.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Rewrite a group-valued map into crush form using a certificate
    /// for its dualization.
    Crush { map: PathBuf, cert: PathBuf },
    /// Enumerate a slice of the bias spectrum.
    Spectrum {
        #[arg(long)]
        k: usize,
        #[arg(long = "max-order")]
        max_order: u64,
        /// Enumerate multiaffine maps of this degree instead of
        /// multilinear ones.
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long)]
        out: PathBuf,
        /// Also write a CSV of (value, witness-file) pairs.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Directory for witness MLMAP files referenced by the CSV.
        #[arg(long = "witness-dir")]
        witness_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Run the seeded lemma batteries and print per-lemma pass counts.
    Lemmas {
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long = "max-order")]
        max_order: u64,
        #[arg(long = "max-k")]
        max_k: usize,
    },
    /// The quadratic Gauss sum G(p), exactly and as a certified decimal.
    Gauss {
        #[arg(long)]
        p: u64,
    },
}

fn exit_code_of(e: &Error) -> i32 {
    match e {
        Error::Budget(_) => 3,
        _ => 2,
    }
}

/// Dispatches a subcommand; returns the process exit code.
pub fn run_command(argv: &[String]) -> i32 {
    let full = std::iter::once("multibias".to_string()).chain(argv.iter().cloned());
    let cli = match Cli::try_parse_from(full) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with exit 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_of(&e)
        }
    }
}

fn read_doc(path: &Path) -> Result<MlmapDocument> {
    parse_mlmap(&std::fs::read_to_string(path)?)
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Bias { file, method, budget } => {
            let doc = read_doc(&file)?;
            let budget = budget.map(Budget::with_points).unwrap_or_default();
            match (method, doc) {
                (Method::Kernel, MlmapDocument::Linear(map)) => {
                    let b = bias(&map);
                    println!("{}/{}", b.numer(), b.denom());
                }
                (Method::Kernel, MlmapDocument::GroupValued(map)) => {
                    // bias of the dualized map, which equals P(F = 0)
                    let b = bias(&from_group_map(&map)?);
                    println!("{}/{}", b.numer(), b.denom());
                }
                (Method::Kernel, MlmapDocument::Affine(_)) => {
                    return Err(Error::invalid(
                        "the kernel method needs a multilinear map; use --method oracle",
                    ));
                }
                (Method::Oracle, doc) => {
                    let value = match doc {
                        MlmapDocument::Linear(map) => bias_oracle(&map, &budget)?,
                        MlmapDocument::GroupValued(map) => {
                            bias_oracle(&from_group_map(&map)?, &budget)?
                        }
                        MlmapDocument::Affine(aff) => bias_oracle_affine(&aff, &budget)?,
                    };
                    match value.as_rational() {
                        Some(r) => println!("{}/{}", r.numer(), r.denom()),
                        None => {
                            println!("{value}");
                            println!("~= {}", certified_decimal(&value, 15));
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Decompose { file, max_q, max_rank, strategy, emit, budget } => {
            let doc = read_doc(&file)?;
            let MlmapDocument::Linear(map) = doc else {
                return Err(Error::invalid("decompose needs a multilinear torus-valued map"));
            };
            let mut b = Budget::default();
            if let Some(steps) = budget {
                b.max_search_steps = steps;
            }
            let found = match strategy {
                Strategy::Search => search_decomposition(&map, max_q, max_rank, &b)?,
                Strategy::Induction => decompose_by_induction(&map, max_q, max_rank, &b)?,
            };
            match found {
                Some(cert) => {
                    let bound = cert.bias_bound();
                    println!("rank {}", cert.rank());
                    println!("bound {}/{}", bound.numer(), bound.denom());
                    let text = emit_mlcert(&cert);
                    match emit {
                        Some(path) => std::fs::write(path, text)?,
                        None => print!("{text}"),
                    }
                    Ok(0)
                }
                None => {
                    println!("no certificate within max-q {max_q} and max-rank {max_rank}");
                    Ok(1)
                }
            }
        }
        Command::Verify { map, cert } => {
            let doc = read_doc(&map)?;
            let MlmapDocument::Linear(map) = doc else {
                return Err(Error::invalid("verify needs a multilinear torus-valued map"));
            };
            let cert = parse_mlcert(&std::fs::read_to_string(cert)?)?;
            match verify_certificate(&map, &cert)? {
                Verification::Verified => {
                    let bound = cert.bias_bound();
                    println!("verified rank={} bound={}/{}", cert.rank(), bound.numer(), bound.denom());
                    Ok(0)
                }
                Verification::Failed(w) => {
                    println!("FAILED {w}");
                    Ok(1)
                }
            }
        }
        Command::Extend { file, mode, p, q, cert, emit } => {
            let doc = read_doc(&file)?;
            let write_out = |text: String, emit: Option<PathBuf>| -> Result<()> {
                match emit {
                    Some(path) => Ok(std::fs::write(path, text)?),
                    None => {
                        print!("{text}");
                        Ok(())
                    }
                }
            };
            match mode {
                ExtendMode::Domain => {
                    let MlmapDocument::GroupValued(map) = doc else {
                        return Err(Error::invalid("domain mode needs a group-valued map"));
                    };
                    check_q(&map, q)?;
                    let a1 = enlarge_first_domain(&map, p)?;
                    let psi = extend_domain(&map, &a1, p)?;
                    write_out(emit_mlmap(&MlmapDocument::GroupValued(psi)), emit)?;
                }
                ExtendMode::Range => {
                    let MlmapDocument::GroupValued(map) = doc else {
                        return Err(Error::invalid("range mode needs a group-valued map"));
                    };
                    check_q(&map, q)?;
                    let psi = extend_range(&map, p)?;
                    write_out(emit_mlmap(&MlmapDocument::GroupValued(psi)), emit)?;
                }
                ExtendMode::Rank1 => {
                    let MlmapDocument::Linear(map) = doc else {
                        return Err(Error::invalid("rank1 mode needs a torus-valued map"));
                    };
                    let cert_path = cert.ok_or_else(|| {
                        Error::invalid("rank1 mode needs --cert with a single-term witness")
                    })?;
                    let cert = parse_mlcert(&std::fs::read_to_string(cert_path)?)?;
                    if cert.terms.len() != 1 {
                        return Err(Error::invalid("the rank1 witness must have exactly one term"));
                    }
                    let term = &cert.terms[0];
                    if term.q != q {
                        return Err(Error::invalid(format!(
                            "witness q = {} does not match --q {q}",
                            term.q
                        )));
                    }
                    // normalize: axis 1 belongs to the left block
                    let witness = if term.i_axes.contains(&0) {
                        RankOneWitness {
                            q: term.q,
                            i_axes: term.i_axes.clone(),
                            left: term.left.clone(),
                            right: term.right.clone(),
                        }
                    } else {
                        let comp: Vec<usize> =
                            (0..map.arity()).filter(|i| !term.i_axes.contains(i)).collect();
                        RankOneWitness {
                            q: term.q,
                            i_axes: comp,
                            left: term.right.clone(),
                            right: term.left.clone(),
                        }
                    };
                    let a1 = enlarge_first_domain(&witness.left, p)?;
                    let (psi, new_witness) = extend_rank_one(&map, &witness, &a1, p)?;
                    println!("# extends through m_{}", new_witness.q);
                    write_out(emit_mlmap(&MlmapDocument::Linear(psi)), emit)?;
                }
            }
            Ok(0)
        }
        Command::Crush { map, cert } => {
            let doc = read_doc(&map)?;
            let MlmapDocument::GroupValued(f) = doc else {
                return Err(Error::invalid("crush needs a group-valued map"));
            };
            let cert = parse_mlcert(&std::fs::read_to_string(cert)?)?;
            let d = crush_decomposition(&f, &cert)?;
            println!("terms {}", d.terms.len());
            for term in &d.terms {
                let axes: Vec<String> =
                    term.i_axes.iter().map(|&a| (a + 1).to_string()).collect();
                println!(
                    "crush I={} cod(g)={} ({})",
                    axes.join(","),
                    term.compressor.codomain().order(),
                    term.compressor.codomain()
                );
            }
            match verify_crush(&f, &d)? {
                Verification::Verified => {
                    println!("verified");
                    Ok(0)
                }
                Verification::Failed(w) => {
                    println!("FAILED {w}");
                    Ok(1)
                }
            }
        }
        Command::Spectrum { k, max_order, degree, out, csv, witness_dir, jobs, budget } => {
            let budget = budget.map(Budget::with_points).unwrap_or_default();
            let report = match degree {
                Some(d) => enumerate_bias_set_affine(k, d, max_order, &budget, jobs)?,
                None => enumerate_bias_set(k, max_order, &budget, jobs)?,
            };
            std::fs::write(&out, report.render())?;
            if let Some(csv_path) = csv {
                let mut rows = String::from("value,witness\n");
                for (i, entry) in report.entries.iter().enumerate() {
                    let name = match &witness_dir {
                        Some(dir) => {
                            std::fs::create_dir_all(dir)?;
                            let file = dir.join(format!("witness_{i:04}.mlmap"));
                            let doc = match &entry.witness {
                                SpectrumWitness::Linear(m) => MlmapDocument::Linear(m.clone()),
                                SpectrumWitness::Affine(m) => MlmapDocument::Affine(m.clone()),
                            };
                            std::fs::write(&file, emit_mlmap(&doc))?;
                            file.display().to_string()
                        }
                        None => "-".to_string(),
                    };
                    rows.push_str(&format!("{},{}\n", entry.value, name));
                }
                std::fs::write(csv_path, rows)?;
            }
            println!("values {}", report.entries.len());
            Ok(0)
        }
        Command::Lemmas { trials, seed, max_order, max_k } => {
            let cfg = BatteryConfig { trials, seed, max_order, max_k, budget: Budget::default() };
            let lemmas = run_lemma_battery(&cfg)?;
            let affine = run_main_term_battery(&cfg)?;
            print!("{}", lemmas.render());
            print!("{}", affine.render());
            let violations = lemmas.total_violations() + affine.total_violations();
            println!("total violations {violations}");
            Ok(if violations == 0 { 0 } else { 1 })
        }
        Command::Gauss { p } => {
            let g = gauss_sum(p)?;
            println!("{g}");
            println!("~= {}", certified_decimal(&g, 15));
            let sq = g.mul(&g);
            println!("square {}", sq.as_rational().map(|r| r.to_string()).unwrap_or_default());
            Ok(0)
        }
    }
}

fn check_q(map: &crate::map::MultiMapG, q: u64) -> Result<()> {
    if map.codomain().factors() != [q] {
        return Err(Error::invalid(format!(
            "--q {q} does not match the map codomain {}",
            map.codomain()
        )));
    }
    Ok(())
}

/// The canonical enlargement `A_1` with `pA_1` equal to the map's first
/// domain: each p-power factor is multiplied by p, coprime factors stay.
fn enlarge_first_domain(map: &crate::map::MultiMapG, p: u64) -> Result<FinAbGroup> {
    if crate::group::prime_power_base(p) != Some((p, 1)) {
        return Err(Error::invalid(format!("--p {p} is not prime")));
    }
    let sub = &map.domains()[0];
    let orders: Vec<u64> = sub
        .factors()
        .iter()
        .map(|&f| if f % p == 0 { f * p } else { f })
        .collect();
    FinAbGroup::new(&orders)
}
