//! The end-to-end almost-uniform sampler: parameter derivation,
//! repetition/round bookkeeping, per-round matrix construction, uniform
//! matching selection, and the fallback output.

use crate::anchored::AnchoredMatrix;
use crate::chain::{run_realization, Realization};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::matching::{has_perfect_matching, sample_pm_exact, sample_pm_mcmc};
use crate::rng::stream;
use rand::Rng;

// Stream path tags; keep stable so runs replay bit-exactly.
const TAG_INIT: u64 = 1;
const TAG_CHAIN: u64 = 2;
const TAG_PM: u64 = 3;
const TAG_ISOLATED: u64 = 4;

/// Which perfect-matching sampler backs Step 6.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmBackend {
    /// Exactly uniform; the in-repo replacement for the cited
    /// approximately-uniform sampler (deviation 0, so the logged delta
    /// budget is slack).
    Exact,
    /// Metropolis chain on matchings with the given step count.
    Mcmc { steps: usize },
}

impl std::fmt::Display for PmBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PmBackend::Exact => write!(f, "exact"),
            PmBackend::Mcmc { steps } => write!(f, "mcmc:{steps}"),
        }
    }
}

impl std::str::FromStr for PmBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(PmBackend::Exact);
        }
        if let Some(steps) = s.strip_prefix("mcmc:") {
            let steps = steps
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad mcmc step count in {s:?}")))?;
            return Ok(PmBackend::Mcmc { steps });
        }
        Err(Error::InvalidConfig(format!(
            "unknown backend {s:?}; expected `exact` or `mcmc:<steps>`"
        )))
    }
}

/// Sampler configuration. Derived defaults (`n = 2 N^2`,
/// `R = ceil(log2(2/eps))`, `delta = 2^-(n + R m + 1)`) may be overridden
/// for experiments.
#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub epsilon: f64,
    pub seed: u64,
    pub backend: PmBackend,
    pub override_chains: Option<usize>,
    pub override_repetitions: Option<usize>,
    pub record_trace: bool,
}

impl SamplerConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        SamplerConfig {
            epsilon,
            seed,
            backend: PmBackend::Exact,
            override_chains: None,
            override_repetitions: None,
            record_trace: false,
        }
    }

    pub fn with_backend(mut self, backend: PmBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon {} not in (0,1]",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Derived run parameters. The matching-sampler tolerance is kept as an
/// exact power-of-two exponent, never a float.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parameters {
    /// Number of chains per round = matrix dimension (`2 N^2` by default).
    pub chains: usize,
    /// Maximum repetition count `R = ceil(log2(2/eps))`.
    pub max_repetitions: usize,
    /// `delta = 2^delta_exponent` with exponent `-(n + R m + 1)`.
    pub delta_exponent: i64,
}

/// Computes `(n, R, delta)` from the graph and the error budget.
pub fn derive_parameters(g: &Graph, epsilon: f64) -> Result<Parameters> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidConfig(format!("epsilon {epsilon} not in (0,1]")));
    }
    let n_vertices = g.num_vertices();
    let chains = 2 * n_vertices * n_vertices;
    // Smallest R with 2^R >= 2/eps, computed without log rounding.
    let mut r = 0usize;
    while (1u64 << r) as f64 * epsilon < 2.0 {
        r += 1;
    }
    let max_repetitions = r.max(1);
    let delta_exponent = -((chains + max_repetitions * g.num_edges() + 1) as i64);
    Ok(Parameters {
        chains,
        max_repetitions,
        delta_exponent,
    })
}

/// Step 2: `count` subsets of V, each vertex included independently with
/// probability 1/2 — the uniform distribution on the edgeless graph's
/// independent sets.
pub fn initial_sets(g0: &Graph, count: usize, rng: &mut impl Rng) -> Result<Vec<VertexSet>> {
    if g0.num_edges() != 0 {
        return Err(Error::InvalidConfig(
            "initial sets are only drawn on the edgeless prefix".into(),
        ));
    }
    let n = g0.num_vertices();
    Ok((0..count)
        .map(|_| {
            let mut bits = 0u128;
            for v in 0..n {
                if rng.gen_bool(0.5) {
                    bits |= 1 << v;
                }
            }
            VertexSet::from_bits(bits, n)
        })
        .collect())
}

/// One per-round record for failure forensics.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundTrace {
    pub repetition: usize,
    pub round: usize,
    pub h_pm_found: bool,
    pub skeleton_density: f64,
}

/// Outcome of one round: new starts, or the failure marker (a value, not
/// an error).
#[derive(Clone, Debug)]
pub enum RoundOutcome {
    Success {
        next_starts: Vec<VertexSet>,
        skeleton_density: f64,
    },
    Failure {
        skeleton_density: f64,
    },
}

/// Steps 3-7 for one `(G_k, G_{k+1})` pair: run one chain per start in the
/// ambient graph, assemble the matrix, check for an H-matching, and on
/// success hand the uniformly drawn matching's value vector back as the
/// next round's starts.
pub fn run_round(
    ambient: &Graph,
    target: &Graph,
    starts: &[VertexSet],
    backend: PmBackend,
    seed: u64,
    repetition: usize,
    round: usize,
) -> Result<RoundOutcome> {
    let n = starts.len();
    let realizations: Vec<Realization> = starts
        .iter()
        .enumerate()
        .map(|(i, init)| {
            let mut rng = stream(seed, &[TAG_CHAIN, repetition as u64, round as u64, i as u64]);
            run_realization(ambient, init, n, &mut rng)
        })
        .collect::<Result<_>>()?;
    let matrix = AnchoredMatrix::build(ambient.clone(), target.clone(), &realizations)?;
    let skeleton = matrix.h_skeleton();
    let density = skeleton.density();
    if !has_perfect_matching(&skeleton) {
        return Ok(RoundOutcome::Failure { skeleton_density: density });
    }
    let mut pm_rng = stream(seed, &[TAG_PM, repetition as u64, round as u64]);
    let pm = match backend {
        PmBackend::Exact => sample_pm_exact(&skeleton, &mut pm_rng)?,
        PmBackend::Mcmc { steps } => sample_pm_mcmc(&skeleton, steps, &mut pm_rng)?,
    };
    let new_starts = matrix.value_vector(&pm)?;
    debug_assert!(new_starts.iter().all(|s| target.is_independent(s).unwrap()));
    Ok(RoundOutcome::Success {
        next_starts: new_starts,
        skeleton_density: density,
    })
}

/// The sampler's result plus its bookkeeping counters.
#[derive(Clone, Debug)]
pub struct SamplerOutcome {
    pub output: VertexSet,
    /// True iff all repetitions failed and the fallback `{v_0}` was output.
    pub failed: bool,
    pub repetitions_used: usize,
    pub failures: usize,
    pub trace: Vec<RoundTrace>,
}

/// Runs the full sampler on `g` and returns one independent set.
///
/// Isolated vertices are removed up front, the pipeline runs on the rest,
/// and each isolated vertex is re-added independently with probability 1/2.
/// After all repetitions fail the output is `{v_0}` with `v_0 = 0` and
/// `failed = true`.
pub fn sample_independent_set(g: &Graph, cfg: &SamplerConfig) -> Result<SamplerOutcome> {
    cfg.validate()?;
    let n_vertices = g.num_vertices();

    // Split off isolated vertices.
    let core_vertices: Vec<usize> = (0..n_vertices).filter(|&v| g.degree(v) > 0).collect();
    let isolated: Vec<usize> = (0..n_vertices).filter(|&v| g.degree(v) == 0).collect();

    let mut output = VertexSet::empty(n_vertices);
    let mut failed = false;
    let mut repetitions_used = 0;
    let mut failures = 0;
    let mut trace = Vec::new();

    if core_vertices.is_empty() {
        // Fully edgeless: the Step-2 draw is the output, no rounds run.
        let mut rng = stream(cfg.seed, &[TAG_INIT, 1]);
        output = initial_sets(g, 1, &mut rng)?.remove(0);
        return Ok(SamplerOutcome {
            output,
            failed,
            repetitions_used,
            failures,
            trace,
        });
    }

    let old_of_new = &core_vertices;
    let mut new_of_old = vec![usize::MAX; n_vertices];
    for (new, &old) in old_of_new.iter().enumerate() {
        new_of_old[old] = new;
    }
    let core = Graph::new(
        old_of_new.len(),
        g.edges().iter().map(|&(u, v)| (new_of_old[u], new_of_old[v])).collect(),
    )?;

    let params = derive_parameters(&core, cfg.epsilon)?;
    let chains = cfg.override_chains.unwrap_or(params.chains);
    let max_reps = cfg.override_repetitions.unwrap_or(params.max_repetitions);
    if chains == 0 || chains > 128 {
        return Err(Error::InvalidConfig(format!(
            "chain count {chains} out of supported range 1..=128 \
             (graphs with more than 8 non-isolated vertices exceed the desk-scale build)"
        )));
    }
    let m = core.num_edges();
    let prefixes: Vec<Graph> = (0..=m).map(|k| core.prefix_graph(k).unwrap()).collect();

    let mut core_output: Option<VertexSet> = None;
    'repetitions: for rep in 1..=max_reps {
        repetitions_used = rep;
        let mut starts = {
            let mut rng = stream(cfg.seed, &[TAG_INIT, rep as u64]);
            initial_sets(&prefixes[0], chains, &mut rng)?
        };
        for k in 0..m {
            let outcome = run_round(
                &prefixes[k],
                &prefixes[k + 1],
                &starts,
                cfg.backend,
                cfg.seed,
                rep,
                k,
            )?;
            match outcome {
                RoundOutcome::Success {
                    next_starts,
                    skeleton_density,
                } => {
                    if cfg.record_trace {
                        trace.push(RoundTrace {
                            repetition: rep,
                            round: k,
                            h_pm_found: true,
                            skeleton_density,
                        });
                    }
                    starts = next_starts;
                }
                RoundOutcome::Failure { skeleton_density } => {
                    failures += 1;
                    if cfg.record_trace {
                        trace.push(RoundTrace {
                            repetition: rep,
                            round: k,
                            h_pm_found: false,
                            skeleton_density,
                        });
                    }
                    continue 'repetitions;
                }
            }
        }
        core_output = Some(starts[0]);
        break;
    }

    match core_output {
        Some(core_set) => {
            for (new, &old) in old_of_new.iter().enumerate() {
                if core_set.contains(new) {
                    output.insert(old);
                }
            }
            // Re-add isolated vertices independently with probability 1/2.
            let mut rng = stream(cfg.seed, &[TAG_ISOLATED]);
            for &v in &isolated {
                if rng.gen_bool(0.5) {
                    output.insert(v);
                }
            }
        }
        None => {
            failed = true;
            output.insert(0);
        }
    }
    debug_assert!(g.is_independent(&output).unwrap());
    Ok(SamplerOutcome {
        output,
        failed,
        repetitions_used,
        failures,
        trace,
    })
}
