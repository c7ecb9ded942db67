//! Command-line front end: sampling, counting, and the experiment suite.
//!
//! Exit codes: 0 success/CONFIRMED, 2 REFUTED, 3 INCONCLUSIVE,
//! 1 usage or I/O error.

use clap::{Args, Parser, Subcommand};
use iset_core::counting::{boost_repetitions, count_fpras, median};
use iset_core::graph::{parse_graph, Graph};
use iset_core::pipeline::{
    derive_parameters, sample_independent_set, PmBackend, SamplerConfig,
};
use iset_core::report::{ExperimentReport, Verdict};
use iset_core::verify::{
    measure_sampler_uniformity, verify_distance_lemma, verify_independence_property,
    verify_p_robustness, verify_pm_bound,
};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const SEED_ENV: &str = "ISET_SEED";

#[derive(Parser)]
#[command(name = "iset", version, about = "Independent-set sampling and counting lab")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// RNG seed; defaults to $ISET_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Graph file: "N m" header, then one "u v" edge per line.
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Matching sampler: `exact` or `mcmc:<steps>`.
    #[arg(long, global = true, default_value = "exact")]
    backend: PmBackend,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one independent set and print it with outcome metadata.
    Sample {
        /// Uniformity budget of the sampler.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Approximately count independent sets.
    Count {
        /// Overall relative accuracy target.
        #[arg(long, default_value_t = 0.2)]
        eps0: f64,
        /// Optional failure budget; enables median boosting.
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Property-check the distance kernel on random distributions.
    VerifyDistances {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Chi-square the matching value vector against the product form.
    VerifyIndependence {
        /// Matrix dimension (number of chains).
        #[arg(long, default_value_t = 2)]
        chains: usize,
        /// Edge index: ambient is the prefix before it, target includes it.
        #[arg(long, default_value_t = 0)]
        round: usize,
        #[arg(long, default_value_t = 20_000)]
        survivors: usize,
    },
    /// Monte Carlo the no-matching probability bound on a size/density grid.
    VerifyPmBound {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Comma-separated matrix sizes.
        #[arg(long, default_value = "20,30,40,50", value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Comma-separated densities.
        #[arg(long, default_value = "0.3,0.5,0.7", value_delimiter = ',')]
        densities: Vec<f64>,
    },
    /// Estimate conditional skeleton-bit floors on a pipeline round.
    VerifyRobustness {
        #[arg(long, default_value_t = 0)]
        round: usize,
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
        /// Same-row conditioning window in bits.
        #[arg(long, default_value_t = 4)]
        window: u32,
    },
    /// Measure the sampler's distance from uniform against the oracle.
    MeasureUniformity {
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Time the core kernels on small fixtures.
    Bench,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 on usage errors by default; the contract is 1.
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn seed_of(common: &Common) -> u64 {
    common.seed.unwrap_or_else(|| {
        std::env::var(SEED_ENV)
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(0)
    })
}

fn load_graph(common: &Common) -> Result<Graph, iset_core::Error> {
    let path = common.graph.as_ref().ok_or_else(|| {
        iset_core::Error::InvalidConfig("this subcommand requires --graph <file>".into())
    })?;
    parse_graph(&std::fs::read_to_string(path)?)
}

fn emit(common: &Common, mut report: ExperimentReport, started: Instant) -> Result<ExitCode, iset_core::Error> {
    report.runtime = Some(started.elapsed().as_secs_f64());
    let text = report.render();
    match &common.out {
        Some(path) => std::fs::write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(match report.verdict {
        Verdict::Confirmed => ExitCode::SUCCESS,
        Verdict::Refuted => ExitCode::from(2),
        Verdict::Inconclusive => ExitCode::from(3),
    })
}

fn run(cli: Cli) -> Result<ExitCode, iset_core::Error> {
    let common = cli.common;
    let seed = seed_of(&common);
    let started = Instant::now();
    match cli.command {
        Command::Sample { epsilon } => {
            let g = load_graph(&common)?;
            let mut cfg = SamplerConfig::new(epsilon, seed).with_trace();
            cfg.backend = common.backend;
            let out = sample_independent_set(&g, &cfg)?;
            println!("set: {}", out.output);
            println!("failed: {}", out.failed);
            println!("repetitions_used: {}", out.repetitions_used);
            println!("failures: {}", out.failures);
            if g.num_edges() > 0 {
                let p = derive_parameters(&g, epsilon)?;
                println!(
                    "parameters: chains<={} repetitions<={} log2(delta)={}",
                    p.chains, p.max_repetitions, p.delta_exponent
                );
            }
            for t in &out.trace {
                println!(
                    "round: rep={} k={} matching_found={} skeleton_density={:.4}",
                    t.repetition, t.round, t.h_pm_found, t.skeleton_density
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Count { eps0, rho } => {
            let g = load_graph(&common)?;
            let estimate = match rho {
                None => {
                    let c = count_fpras(&g, eps0, common.backend, seed)?;
                    println!(
                        "samples_per_ratio: {}  sampler_epsilon: {:.6}",
                        c.samples_per_ratio, c.sampler_epsilon
                    );
                    c.estimate
                }
                Some(rho) => {
                    let k = boost_repetitions(rho)?;
                    println!("median_of: {k}");
                    let estimates: Vec<f64> = (0..k as u64)
                        .map(|i| {
                            count_fpras(&g, eps0, common.backend, seed.wrapping_add(i))
                                .map(|c| c.estimate)
                        })
                        .collect::<Result<_, _>>()?;
                    median(&estimates)?
                }
            };
            println!("estimate: {estimate}");
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyDistances { trials } => {
            emit(&common, verify_distance_lemma(trials, seed)?, started)
        }
        Command::VerifyIndependence {
            chains,
            round,
            survivors,
        } => {
            let g = match &common.graph {
                Some(_) => load_graph(&common)?,
                None => parse_graph("2 1\n0 1")?,
            };
            let ambient = g.prefix_graph(round)?;
            let target = g.prefix_graph(round + 1)?;
            emit(
                &common,
                verify_independence_property(&ambient, &target, chains, survivors, seed)?,
                started,
            )
        }
        Command::VerifyPmBound {
            trials,
            sizes,
            densities,
        } => emit(
            &common,
            verify_pm_bound(&sizes, &densities, trials, seed)?,
            started,
        ),
        Command::VerifyRobustness {
            round,
            trials,
            window,
        } => {
            let g = match &common.graph {
                Some(_) => load_graph(&common)?,
                None => parse_graph("4 1\n0 1")?,
            };
            emit(
                &common,
                verify_p_robustness(&g, round, trials, window, seed)?,
                started,
            )
        }
        Command::MeasureUniformity { epsilon, samples } => {
            let g = load_graph(&common)?;
            emit(
                &common,
                measure_sampler_uniformity(&g, epsilon, samples, common.backend, seed)?,
                started,
            )
        }
        Command::Bench => {
            bench(seed);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn bench(seed: u64) {
    use iset_core::chain::run_realization;
    use iset_core::graph::VertexSet;
    use iset_core::matching::{count_pm, has_perfect_matching, sample_pm_exact, Skeleton};
    use iset_core::rng::stream;

    let g = parse_graph("4 4\n0 1\n1 2\n2 3\n0 3").expect("fixture parses");
    let mut rng = stream(seed, &[90]);

    let t = Instant::now();
    let steps = 1_000_000;
    for _ in 0..steps / 1000 {
        run_realization(&g, &VertexSet::empty(4), 1000, &mut rng).expect("empty set valid");
    }
    println!(
        "chain_steps_per_sec: {:.3e}",
        steps as f64 / t.elapsed().as_secs_f64()
    );

    let skel = Skeleton::bernoulli(32, 0.8, &mut rng).expect("valid density");
    let t = Instant::now();
    let reps = 10_000;
    let mut acc = 0usize;
    for _ in 0..reps {
        acc += usize::from(has_perfect_matching(&skel));
    }
    println!(
        "matching_checks_per_sec: {:.3e} (witness {acc})",
        reps as f64 / t.elapsed().as_secs_f64()
    );

    let small = Skeleton::bernoulli(20, 0.5, &mut rng).expect("valid density");
    let t = Instant::now();
    let perms = 100;
    for _ in 0..perms {
        count_pm(&small).expect("within limit");
    }
    println!(
        "permanents_20_per_sec: {:.3}",
        perms as f64 / t.elapsed().as_secs_f64()
    );

    if has_perfect_matching(&skel) {
        let t = Instant::now();
        let draws = 1000;
        for _ in 0..draws {
            sample_pm_exact(&skel, &mut rng).expect("matching exists");
        }
        println!(
            "exact_pm_draws_per_sec: {:.3e}",
            draws as f64 / t.elapsed().as_secs_f64()
        );
    }
}
