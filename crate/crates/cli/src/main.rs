use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use slp_core::bench::{run_bench, BenchConfig};
use slp_core::builders::{build_via_ctph, repair_build, CtphParams};
use slp_core::corpus::gen_corpus;
use slp_core::{EncodeOptions, NaiveSlpEncoding, ShapedSlpEncoding, Slp, TextAccess};

/// Grammar-compressed texts with random access.
#[derive(Parser)]
#[command(name = "slp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a text file into an SLP1 grammar.
    Build {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Builder::Repair)]
        builder: Builder,
        /// Chunking window in bytes (ctph+repair only).
        #[arg(long, default_value_t = 16)]
        window: usize,
        /// Chunking modulus (ctph+repair only).
        #[arg(long, default_value_t = 64)]
        modulus: u64,
    },
    /// Encode an SLP1 grammar for random access.
    Encode {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Scheme::Shaped)]
        scheme: Scheme,
        /// Seed for the size hash.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Omit the per-group size table (smaller, but loading skips verification).
        #[arg(long)]
        compact: bool,
    },
    /// Print the character at a position.
    Access {
        input: PathBuf,
        #[arg(long)]
        pos: u64,
        #[arg(long)]
        zero_based: bool,
    },
    /// Write a substring to standard output.
    Extract {
        input: PathBuf,
        #[arg(long)]
        pos: u64,
        #[arg(long)]
        len: u64,
        #[arg(long)]
        zero_based: bool,
    },
    /// Decompress any SLP1, SSLP or NSLP file.
    Decode {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report grammar statistics and encoding sizes.
    Stats { input: PathBuf },
    /// Time random extraction on one or more encodings of the same text.
    Bench {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 10, 100, 1000])]
        lengths: Vec<u64>,
        #[arg(long, default_value_t = 10_000)]
        queries: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3, 4, 5, 6, 7, 8])]
        threads: Vec<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate a synthetic repetitive corpus.
    Gen {
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        base_len: usize,
        #[arg(long, default_value_t = 100)]
        copies: usize,
        #[arg(long, default_value_t = 0.001)]
        mutation_rate: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Builder {
    Repair,
    #[value(name = "ctph+repair")]
    CtphRepair,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Naive,
    Shaped,
}

/// A bad invocation that clap cannot catch.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

enum Loaded {
    Grammar(Slp),
    Shaped(Box<ShapedSlpEncoding>),
    Naive(NaiveSlpEncoding),
}

impl Loaded {
    fn open(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let loaded = match bytes.get(..4) {
            Some(b"SLP1") => Self::Grammar(Slp::from_bytes(&bytes)?),
            Some(b"SSLP") => Self::Shaped(Box::new(ShapedSlpEncoding::from_bytes(&bytes)?)),
            Some(b"NSLP") => Self::Naive(NaiveSlpEncoding::from_bytes(&bytes)?),
            _ => {
                return Err(slp_core::Error::Corrupt(format!(
                    "{} is not an SLP1, SSLP or NSLP file",
                    path.display()
                ))
                .into())
            }
        };
        Ok(loaded)
    }

    fn encoding(self, path: &Path) -> Result<Box<dyn TextAccess>> {
        match self {
            Self::Shaped(e) => Ok(e),
            Self::Naive(e) => Ok(Box::new(e)),
            Self::Grammar(_) => Err(Usage(format!(
                "{} is a grammar; run `slp encode` first",
                path.display()
            ))
            .into()),
        }
    }
}

fn read_text(path: &Path) -> Result<Vec<u8>> {
    let text = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if text.is_empty() {
        return Err(slp_core::Error::Corrupt(format!("{} is empty", path.display())).into());
    }
    Ok(text)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn position(pos: u64, zero_based: bool) -> Result<u64> {
    if zero_based {
        pos.checked_add(1)
            .ok_or_else(|| Usage("position overflows".into()).into())
    } else if pos == 0 {
        Err(Usage("positions are 1-based; pass --zero-based for 0-based".into()).into())
    } else {
        Ok(pos)
    }
}

fn stats_line(slp: &Slp) -> String {
    let s = slp.stats();
    format!(
        "sigma={} n={} s={} r={} d={} h={}",
        s.sigma, s.n, s.s, s.r, s.d, s.h
    )
}

fn run(cli: Cli) -> Result<()> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Build {
            input,
            output,
            builder,
            window,
            modulus,
        } => {
            let text = read_text(&input)?;
            let slp = match builder {
                Builder::Repair => repair_build(&text)?,
                Builder::CtphRepair => {
                    let params =
                        CtphParams::new(window, modulus).map_err(|e| Usage(e.to_string()))?;
                    build_via_ctph(&text, &params)?
                }
            };
            write_file(&output, &slp.to_bytes())?;
            writeln!(stdout, "{}", stats_line(&slp))?;
        }
        Command::Encode {
            input,
            output,
            scheme,
            seed,
            compact,
        } => {
            let Loaded::Grammar(slp) = Loaded::open(&input)? else {
                return Err(Usage(format!("{} is not an SLP1 grammar", input.display())).into());
            };
            let bytes = match scheme {
                Scheme::Naive => NaiveSlpEncoding::encode(&slp).to_bytes(),
                Scheme::Shaped => {
                    let options = EncodeOptions {
                        seed,
                        keep_size_table: !compact,
                        ..Default::default()
                    };
                    ShapedSlpEncoding::encode(&slp, &options)?.to_bytes()
                }
            };
            write_file(&output, &bytes)?;
            writeln!(stdout, "wrote {} bytes", bytes.len())?;
        }
        Command::Access {
            input,
            pos,
            zero_based,
        } => {
            let i = position(pos, zero_based)?;
            let enc = Loaded::open(&input)?.encoding(&input)?;
            stdout.write_all(&[enc.access(i)?, b'\n'])?;
        }
        Command::Extract {
            input,
            pos,
            len,
            zero_based,
        } => {
            let i = position(pos, zero_based)?;
            let enc = Loaded::open(&input)?.encoding(&input)?;
            stdout.write_all(&enc.extract(i, len)?)?;
        }
        Command::Decode { input, output } => {
            let text = match Loaded::open(&input)? {
                Loaded::Grammar(slp) => slp.decompress(),
                other => {
                    let enc = other.encoding(&input)?;
                    enc.extract(1, enc.text_len())?
                }
            };
            match output {
                Some(path) => write_file(&path, &text)?,
                None => stdout.write_all(&text)?,
            }
        }
        Command::Stats { input } => match Loaded::open(&input)? {
            Loaded::Grammar(slp) => writeln!(stdout, "{}", stats_line(&slp))?,
            Loaded::Shaped(e) => {
                let r = e.size_report();
                writeln!(
                    stdout,
                    "sigma={} n={} s={} r={} d={}",
                    e.sigma(),
                    e.text_len(),
                    e.start_len(),
                    e.num_rules(),
                    e.num_sizes()
                )?;
                writeln!(
                    stdout,
                    "bytes total={} header={} mphf={} groups={} size_table={} triples={} start={}",
                    r.total, r.header, r.mphf, r.groups, r.size_table, r.triples, r.start
                )?;
            }
            Loaded::Naive(e) => {
                writeln!(
                    stdout,
                    "sigma={} n={} r={} symbol_bits={} length_bits={}",
                    e.sigma(),
                    e.text_len(),
                    e.num_rules(),
                    e.symbol_width(),
                    e.length_width()
                )?;
                writeln!(stdout, "bytes total={}", e.size_bytes())?;
            }
        },
        Command::Bench {
            inputs,
            lengths,
            queries,
            threads,
            seed,
            csv,
        } => {
            let config = BenchConfig {
                lengths,
                queries,
                threads,
                seed,
            };
            let mut names = Vec::new();
            let mut encodings = Vec::new();
            for path in &inputs {
                encodings.push(Loaded::open(path)?.encoding(path)?);
                names.push(path.file_name().map_or_else(
                    || path.display().to_string(),
                    |n| n.to_string_lossy().into_owned(),
                ));
            }
            let text = encodings[0].extract(1, encodings[0].text_len())?;
            config
                .validate(text.len() as u64)
                .map_err(|e| Usage(e.to_string()))?;
            for (name, enc) in names.iter().zip(&encodings).skip(1) {
                if enc.extract(1, enc.text_len())? != text {
                    return Err(slp_core::Error::MismatchedTexts(format!(
                        "{name} decodes to a different text than {}",
                        names[0]
                    ))
                    .into());
                }
            }
            let refs: Vec<(&str, &dyn TextAccess)> = names
                .iter()
                .zip(&encodings)
                .map(|(n, e)| (n.as_str(), e.as_ref()))
                .collect();
            let report = run_bench(&refs, &text, &config)?.to_csv();
            match csv {
                Some(path) => write_file(&path, report.as_bytes())?,
                None => stdout.write_all(report.as_bytes())?,
            }
        }
        Command::Gen {
            output,
            base_len,
            copies,
            mutation_rate,
            seed,
        } => {
            let text = gen_corpus(base_len, copies, mutation_rate, seed)
                .map_err(|e| Usage(e.to_string()))?;
            write_file(&output, &text)?;
        }
    }
    stdout.flush()?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use slp_core::Error as E;
    if err.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    match err.downcast_ref::<E>() {
        Some(E::ChecksumMismatch { .. } | E::MismatchedTexts(_)) => 3,
        Some(E::PositionOutOfRange { .. } | E::RangeOutOfBounds { .. } | E::InvalidArgument(_)) => {
            1
        }
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if err
                .downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
            {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
