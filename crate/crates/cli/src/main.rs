use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qshape::corpus::{self, CorpusConfig, RunOptions, DEFAULT_TOP, MERGE_EPS};
use qshape::dce::DEFAULT_VERTICES;
use qshape::descriptor::DEFAULT_GRANULARITY;
use qshape::geometry::{read_poly_file, validate_polygon, write_poly_file};
use qshape::outline::{
    load_mask_file, merge_collinear, prune_spurs, trace_largest_boundary, DEFAULT_THRESHOLD,
};
use qshape::reconstruct::SearchParams;
use qshape::render::{polygon_svg, render_svg};
use qshape::similarity::{compare_shapes, compute_weights, Weights};
use qshape::synthetic::{demo_corpus, write_corpus};
use qshape::{describe, reconstruct, simplify, Error, Execution, QualShape};

/// Qualitative shape descriptors: extraction, comparison and reconstruction.
#[derive(Parser)]
#[command(name = "qshape", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MaskOpts {
    /// PGM samples below this value are foreground.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: u8,
    /// Swap foreground and background.
    #[arg(long)]
    invert: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the outline of the largest foreground region of a PBM/PGM mask.
    Extract {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        mask: MaskOpts,
        /// Turn angle (radians) below which boundary vertices are merged.
        #[arg(long, default_value_t = MERGE_EPS)]
        eps: f64,
    },
    /// Reduce a polygon to k vertices by discrete curve evolution.
    Simplify {
        #[arg(long, default_value_t = DEFAULT_VERTICES)]
        k: usize,
        input: PathBuf,
        output: PathBuf,
    },
    /// Write the eOPRA descriptor of a polygon as JSON.
    Describe {
        #[arg(long, default_value_t = DEFAULT_GRANULARITY)]
        m: u32,
        input: PathBuf,
        output: PathBuf,
    },
    /// Align descriptors pairwise and print the pairs CSV.
    Compare {
        /// Descriptor JSON files (at least two).
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Build a prototype polygon from a descriptor.
    Reconstruct {
        input: PathBuf,
        output: PathBuf,
        /// Mismatch evaluations allowed per starting candidate.
        #[arg(long, default_value_t = SearchParams::default().eval_budget)]
        budget: u64,
        /// Also draw the result.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Process a directory of masks and polygons and report the best matches.
    Corpus {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRANULARITY)]
        m: u32,
        #[arg(long, default_value_t = DEFAULT_VERTICES)]
        k_vertices: usize,
        /// Length of each per-entry match list.
        #[arg(long, default_value_t = DEFAULT_TOP)]
        top: usize,
        #[command(flatten)]
        mask: MaskOpts,
        /// Worker threads; 1 runs sequentially. Defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also write one match gallery per entry into OUT/matches.
        #[arg(long)]
        svg: bool,
    },
    /// Draw polygons side by side into one SVG.
    Render {
        output: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Write the seeded synthetic demo corpus (originals plus noisy duplicates).
    Synth {
        output: PathBuf,
        #[arg(long, default_value_t = 20)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        originals: usize,
        /// Vertex jitter as a fraction of the bounding-box diagonal.
        #[arg(long, default_value_t = 0.02)]
        jitter: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Extract {
            input,
            output,
            mask,
            eps,
        } => {
            let mask = load_mask_file(&input, mask.threshold, mask.invert)?;
            let chain = trace_largest_boundary(&mask)?;
            let merged = merge_collinear(&prune_spurs(&chain)?, eps)?;
            let polygon = validate_polygon(&merged)?;
            write_poly_file(&output, polygon.vertices())?;
            println!("{} vertices", polygon.len());
        }
        Command::Simplify { k, input, output } => {
            let polygon = validate_polygon(&read_poly_file(&input)?)?;
            let simple = simplify(&polygon, k)?;
            write_poly_file(&output, simple.vertices())?;
            println!("{} -> {} vertices", polygon.len(), simple.len());
        }
        Command::Describe { m, input, output } => {
            let polygon = validate_polygon(&read_poly_file(&input)?)?;
            describe(&polygon, m)?.write_file(&output)?;
        }
        Command::Compare { inputs, out, jobs } => {
            let shapes = inputs
                .iter()
                .map(|p| QualShape::read_file(p))
                .collect::<qshape::Result<Vec<_>>>()?;
            let matrix = compare_shapes(&shapes, Execution::from_jobs(jobs))?;
            let (weights, degenerate) = match compute_weights(matrix.mean_dir(), matrix.mean_dist())
            {
                Ok(w) => (w, false),
                Err(Error::ZeroDirectionError) => {
                    log::warn!("mean direction error is zero; using equal weights");
                    (Weights::EQUAL, true)
                }
                Err(e) => return Err(e.into()),
            };
            let csv = matrix.to_csv(&weights);
            match out {
                Some(path) => {
                    std::fs::write(&path, csv).with_context(|| path.display().to_string())?
                }
                None => print!("{csv}"),
            }
            if degenerate {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Reconstruct {
            input,
            output,
            budget,
            svg,
        } => {
            let shape = QualShape::read_file(&input)?;
            let params = SearchParams {
                eval_budget: budget,
                ..SearchParams::default()
            };
            let result = reconstruct(&shape, &params)?;
            for w in &result.warnings {
                log::warn!("{w}");
            }
            write_poly_file(&output, &result.vertices)?;
            if let Some(path) = svg {
                std::fs::write(&path, polygon_svg(&result.vertices))
                    .with_context(|| path.display().to_string())?;
            }
            println!(
                "score {:.6} -> {:.6} after {} evaluations ({} moves){}",
                result.initial_score,
                result.final_score,
                result.evaluations,
                result.moves(),
                if result.exact_match { ", exact" } else { "" }
            );
        }
        Command::Corpus {
            input,
            m,
            k_vertices,
            top,
            mask,
            jobs,
            out,
            svg,
        } => {
            let options = RunOptions {
                input,
                out,
                config: CorpusConfig {
                    m,
                    k_vertices,
                    threshold: mask.threshold,
                    invert: mask.invert,
                },
                top,
                exec: Execution::from_jobs(jobs),
                svg,
            };
            let report = corpus::run(&options)?;
            let w = report.comparison.weights;
            println!(
                "{} entries, {} failed, {} pairs; dst2dir {:.4}, w_dir {:.4}, w_dist {:.4}",
                report.entries.len(),
                report.failures.len(),
                report.comparison.matrix.entries().len(),
                w.dst2dir,
                w.w_dir,
                w.w_dist
            );
            if report.comparison.degenerate {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Render { output, inputs } => {
            let mut polygons = Vec::with_capacity(inputs.len());
            let mut labels = Vec::with_capacity(inputs.len());
            for path in &inputs {
                polygons.push(validate_polygon(&read_poly_file(path)?)?);
                labels.push(
                    path.file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                );
            }
            render_svg(&polygons, &labels, &output)?;
        }
        Command::Synth {
            output,
            seed,
            originals,
            jitter,
        } => {
            if !(0.0..0.5).contains(&jitter) {
                bail!("jitter must be in [0, 0.5)");
            }
            let shapes = demo_corpus(seed, originals, jitter);
            write_corpus(&output, &shapes)?;
            println!("{} shapes written to {}", shapes.len(), output.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
