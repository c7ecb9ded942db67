//! Experiment suite: each function turns one claimed property into a
//! seeded measurement with an explicit verdict and logged thresholds.

use crate::chain::run_realization;
use crate::dist::{mixture_decompose, separation_distance, total_variation, Distribution};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::matching::{enumerate_pms, has_perfect_matching, Skeleton};
use crate::pipeline::{derive_parameters, sample_independent_set, PmBackend, SamplerConfig};
use crate::report::{ExperimentReport, Verdict};
use crate::rng::stream;
use crate::stats::chi_square_p_value;
use rand::Rng;
use rayon::prelude::*;

const FLOAT_TOL: f64 = 1e-12;

// Stream path tags per experiment; disjoint from the sampler's tags.
const TAG_DIST: u64 = 20;
const TAG_INDEP: u64 = 30;
const TAG_PM_BOUND: u64 = 40;
const TAG_ROBUST: u64 = 50;
const TAG_UNIFORMITY: u64 = 60;

/// Random distribution on keys `0..size`, with some mass-zero keys mixed
/// in to exercise the zero-probability edge cases.
fn random_distribution(size: usize, rng: &mut impl Rng) -> Distribution<usize> {
    loop {
        let mut weights: Vec<f64> = (0..size)
            .map(|_| {
                if rng.gen_bool(0.15) {
                    0.0
                } else {
                    rng.gen::<f64>()
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total == 0.0 {
            continue;
        }
        for w in &mut weights {
            *w /= total;
        }
        return Distribution::from_pairs(weights.into_iter().enumerate())
            .expect("normalized weights form a distribution");
    }
}

/// Checks the separation-distance properties (self-identity, triangle
/// inequality, domination of total variation, and the uniform-case
/// reverse bound) plus the mixture round-trip, on random distribution
/// triples sharing a common support universe.
pub fn verify_distance_lemma(trials: usize, seed: u64) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("distance suite needs trials >= 1".into()));
    }
    let mut report = ExperimentReport::new("distance-lemma", seed);
    report
        .config("trials", trials)
        .config("tolerance", FLOAT_TOL)
        .config("support_sizes", "2..=6");

    let violation_counts: Vec<[u64; 5]> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, &[TAG_DIST, t as u64]);
            let size = rng.gen_range(2..=6);
            let a = random_distribution(size, &mut rng);
            let b = random_distribution(size, &mut rng);
            let c = random_distribution(size, &mut rng);
            let uniform = Distribution::uniform_over(0..size).expect("nonempty support");
            let mut v = [0u64; 5];

            // Self-identity.
            if separation_distance(&a, &a) > FLOAT_TOL {
                v[0] += 1;
            }
            // Triangle inequality.
            let s_ab = separation_distance(&a, &b);
            let s_bc = separation_distance(&b, &c);
            let s_ac = separation_distance(&a, &c);
            if s_ac > s_ab + s_bc + FLOAT_TOL {
                v[1] += 1;
            }
            // Separation dominates total variation, in both argument orders.
            if total_variation(&a, &b) > s_ab + FLOAT_TOL
                || total_variation(&b, &a) > separation_distance(&b, &a) + FLOAT_TOL
            {
                v[2] += 1;
            }
            // Reverse bound against the uniform distribution.
            let s_au = separation_distance(&a, &uniform);
            if s_au > 2.0 * size as f64 * total_variation(&a, &uniform) + FLOAT_TOL {
                v[3] += 1;
            }
            // Mixture round-trip: a = (1-eps) b + eps gamma with eps = s(a,b).
            let eps = s_ab.max(FLOAT_TOL).min(1.0);
            match mixture_decompose(&a, &b, eps) {
                Ok(gamma) => {
                    for key in 0..size {
                        let rebuilt = (1.0 - eps) * b.prob(&key) + eps * gamma.prob(&key);
                        if (rebuilt - a.prob(&key)).abs() > FLOAT_TOL {
                            v[4] += 1;
                            break;
                        }
                    }
                }
                Err(_) => v[4] += 1,
            }
            v
        })
        .collect();
    let mut totals = [0u64; 5];
    for v in &violation_counts {
        for (t, x) in totals.iter_mut().zip(v) {
            *t += x;
        }
    }

    // Fixture with disjoint supports: both distances are maximal.
    let pa = Distribution::from_pairs([(0usize, 0.0), (1, 1.0)])?;
    let pb = Distribution::from_pairs([(0usize, 1.0), (1, 0.0)])?;
    let fixture_ok = (separation_distance(&pa, &pb) - 1.0).abs() <= FLOAT_TOL
        && (total_variation(&pa, &pb) - 1.0).abs() <= FLOAT_TOL;

    report
        .measure("violations.self_identity", totals[0])
        .measure("violations.triangle", totals[1])
        .measure("violations.tv_upper_bound", totals[2])
        .measure("violations.uniform_reverse_bound", totals[3])
        .measure("violations.mixture_round_trip", totals[4])
        .measure("disjoint_support_fixture_ok", fixture_ok);
    report.verdict = if totals.iter().all(|&x| x == 0) && fixture_ok {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    };
    Ok(report)
}

/// Tests the product form of a target-respecting matching's value vector.
/// Matrices are built from exactly uniform starts evolved by the
/// insert/delete chain. Each trial draws one uniform matching among all
/// n! and keeps it only if every selected value lies in the target family;
/// discarded trials are counted (matrices without any valid matching can
/// never survive). This selection rule is the one the product-form proof
/// actually establishes: picking uniformly among each surviving matrix's
/// valid matchings instead would overweight matrices with few of them,
/// and measurably breaks the product form already at n = 2.
/// Chi-square is run on the full joint and every single and pair marginal.
pub fn verify_independence_property(
    ambient: &Graph,
    target: &Graph,
    chains: usize,
    survivors_needed: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if chains == 0 || chains > 8 {
        return Err(Error::InvalidConfig(
            "independence fixture supports 1..=8 chains (matching enumeration)".into(),
        ));
    }
    if survivors_needed == 0 {
        return Err(Error::EmptySamples);
    }
    let ambient_sets = ambient.enumerate_independent_sets()?;
    let h: Vec<VertexSet> = ambient_sets
        .iter()
        .copied()
        .filter(|s| target.is_independent(s).unwrap_or(false))
        .collect();
    let h_size = h.len();
    let joint_cells = h_size.checked_pow(chains as u32).filter(|&c| c <= 10_000);
    let joint_cells = joint_cells.ok_or(Error::OverLimit {
        what: "independence experiment",
        what_limit: "joint value-vector cells",
        limit: 10_000,
        value: h_size.pow(chains as u32),
    })?;
    let h_index = |s: &VertexSet| h.iter().position(|x| x == s).expect("value in target family");

    let mut joint = vec![0u64; joint_cells];
    let mut singles = vec![vec![0u64; h_size]; chains];
    let mut pairs = vec![vec![0u64; h_size * h_size]; chains * chains];
    let mut discarded = 0u64;
    let mut discarded_no_matching = 0u64;
    let mut survivors = 0usize;
    let mut trial = 0u64;
    while survivors < survivors_needed {
        let mut rng = stream(seed, &[TAG_INDEP, trial]);
        trial += 1;
        let realizations: Result<Vec<_>> = (0..chains)
            .map(|_| {
                let start = ambient_sets[rng.gen_range(0..ambient_sets.len())];
                run_realization(ambient, &start, chains, &mut rng)
            })
            .collect();
        let matrix =
            crate::anchored::AnchoredMatrix::build(ambient.clone(), target.clone(), &realizations?)?;
        if enumerate_pms(&matrix.h_skeleton())?.is_empty() {
            discarded_no_matching += 1;
        }
        // Uniform matching among all n!, independent of the matrix.
        let mut rows: Vec<usize> = (0..chains).collect();
        for i in (1..chains).rev() {
            rows.swap(i, rng.gen_range(0..=i));
        }
        let pm = crate::matching::PerfectMatching::new(rows)?;
        if !matrix.is_h_pm(&pm)? {
            discarded += 1;
            continue;
        }
        survivors += 1;
        let values = matrix.value_vector(&pm)?;
        let idx: Vec<usize> = values.iter().map(|v| h_index(v)).collect();
        let mut cell = 0usize;
        for &i in &idx {
            cell = cell * h_size + i;
        }
        joint[cell] += 1;
        for (k, &i) in idx.iter().enumerate() {
            singles[k][i] += 1;
        }
        for k in 0..chains {
            for l in (k + 1)..chains {
                pairs[k * chains + l][idx[k] * h_size + idx[l]] += 1;
            }
        }
    }

    let mut report = ExperimentReport::new("independence-property", seed);
    report
        .config("chains", chains)
        .config("target_family_size", h_size)
        .config("survivors", survivors_needed)
        .config("significance", 0.01);
    report
        .measure("trials_discarded_invalid_draw", discarded)
        .measure("matrices_with_no_valid_matching", discarded_no_matching)
        .measure("trials_total", trial);

    let mut min_p = f64::INFINITY;
    let uniform_joint = vec![1.0 / joint_cells as f64; joint_cells];
    let (stat, p) = chi_square_p_value(&joint, &uniform_joint)?;
    report.measure("joint.chi_square", format!("{stat:.6}"));
    report.measure("joint.p_value", format!("{p:.6}"));
    min_p = min_p.min(p);
    let uniform_single = vec![1.0 / h_size as f64; h_size];
    for (k, counts) in singles.iter().enumerate() {
        let (_, p) = chi_square_p_value(counts, &uniform_single)?;
        report.measure(&format!("component_{k}.p_value"), format!("{p:.6}"));
        min_p = min_p.min(p);
    }
    let uniform_pair = vec![1.0 / (h_size * h_size) as f64; h_size * h_size];
    for k in 0..chains {
        for l in (k + 1)..chains {
            let (_, p) = chi_square_p_value(&pairs[k * chains + l], &uniform_pair)?;
            report.measure(&format!("pair_{k}_{l}.p_value"), format!("{p:.6}"));
            min_p = min_p.min(p);
        }
    }
    report.measure("min_p_value", format!("{min_p:.6}"));
    report.verdict = if min_p > 0.01 {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    };
    Ok(report)
}

/// Monte Carlo check of the matching-probability bound
/// `Pr(no PM) <= (n+1)^3 (1-p)^floor(n/2)` for i.i.d. Bernoulli(p)
/// skeletons, over a grid of sizes and densities.
pub fn verify_pm_bound(
    n_grid: &[usize],
    p_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if n_grid.is_empty() || p_grid.is_empty() || trials == 0 {
        return Err(Error::InvalidConfig("pm-bound grid and trials must be nonempty".into()));
    }
    let mut report = ExperimentReport::new("pm-probability-bound", seed);
    report
        .config("n_grid", format!("{n_grid:?}"))
        .config("p_grid", format!("{p_grid:?}"))
        .config("trials_per_point", trials)
        .config("slack", "3 binomial sigma on the clipped bound");

    let mut all_ok = true;
    let mut table = String::new();
    table.push_str("n p bound no_pm_rate status\n");
    for (ni, &n) in n_grid.iter().enumerate() {
        for (pi, &p) in p_grid.iter().enumerate() {
            let no_pm: u64 = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng =
                        stream(seed, &[TAG_PM_BOUND, ni as u64, pi as u64, t as u64]);
                    let s = Skeleton::bernoulli(n, p, &mut rng).expect("valid density");
                    u64::from(!has_perfect_matching(&s))
                })
                .sum();
            let rate = no_pm as f64 / trials as f64;
            let bound =
                (((n + 1) as f64).powi(3) * (1.0 - p).powi((n / 2) as i32)).min(1.0);
            let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
            let ok = bound >= 1.0 || rate <= bound + 3.0 * sigma;
            all_ok &= ok;
            table.push_str(&format!(
                "{n} {p} {bound:.6e} {rate:.6e} {}\n",
                if ok { "within" } else { "exceeded" }
            ));
        }
    }
    report.table("grid", table.trim_end());
    report.verdict = if all_ok { Verdict::Confirmed } else { Verdict::Refuted };
    Ok(report)
}

/// Estimates the conditional 1-probability of skeleton bits given the
/// trailing window of same-row predecessor bits, over skeletons produced
/// by one pipeline round from exactly stationary starts. The claimed
/// floor is `2/N`; rows are independent, so same-row conditioning is the
/// full conditioning, and windowing only averages conditionals, which
/// preserves the floor.
pub fn verify_p_robustness(
    g: &Graph,
    round: usize,
    trials: usize,
    window_bits: u32,
    seed: u64,
) -> Result<ExperimentReport> {
    let n_vertices = g.num_vertices();
    if n_vertices < 4 {
        return Err(Error::InvalidConfig(
            "the conditional floor 2/N is only claimed for N >= 4".into(),
        ));
    }
    if round >= g.num_edges() {
        return Err(Error::InvalidConfig(format!(
            "round {round} out of range for {} edges",
            g.num_edges()
        )));
    }
    if window_bits == 0 || window_bits > 16 {
        return Err(Error::InvalidConfig("window must be 1..=16 bits".into()));
    }
    let ambient = g.prefix_graph(round)?;
    let target = g.prefix_graph(round + 1)?;
    let ambient_sets = ambient.enumerate_independent_sets()?;
    let chains = 2 * n_vertices * n_vertices;
    if chains > 128 {
        return Err(Error::OverLimit {
            what: "robustness experiment",
            what_limit: "chains",
            limit: 128,
            value: chains,
        });
    }
    let patterns = 1usize << window_bits;
    let floor = 2.0 / n_vertices as f64;

    // occurrences and ones, flat-indexed by column * patterns + pattern.
    let (occ, ones) = (0..trials)
        .into_par_iter()
        .fold(
            || (vec![0u64; chains * patterns], vec![0u64; chains * patterns]),
            |(mut occ, mut ones), t| {
                let mut rng = stream(seed, &[TAG_ROBUST, t as u64]);
                for _ in 0..chains {
                    let start = ambient_sets[rng.gen_range(0..ambient_sets.len())];
                    let real = run_realization(&ambient, &start, chains, &mut rng)
                        .expect("stationary start is independent");
                    let mut row_bits = 0u64;
                    for (j, state) in real.states[1..].iter().enumerate() {
                        let bit = target.is_independent(state).expect("in-range state");
                        let window = if j == 0 {
                            0
                        } else {
                            (row_bits & ((1 << window_bits.min(j as u32)) - 1)) as usize
                        };
                        let cell = j * patterns + window;
                        occ[cell] += 1;
                        if bit {
                            ones[cell] += 1;
                        }
                        row_bits = (row_bits << 1) | u64::from(bit);
                    }
                }
                (occ, ones)
            },
        )
        .reduce(
            || (vec![0u64; chains * patterns], vec![0u64; chains * patterns]),
            |(mut a_occ, mut a_ones), (b_occ, b_ones)| {
                for (a, b) in a_occ.iter_mut().zip(&b_occ) {
                    *a += b;
                }
                for (a, b) in a_ones.iter_mut().zip(&b_ones) {
                    *a += b;
                }
                (a_occ, a_ones)
            },
        );

    let mut report = ExperimentReport::new("p-robustness", seed);
    report
        .config("graph", crate::graph::format_graph(g).replace('\n', "; "))
        .config("round", round)
        .config("chains", chains)
        .config("trials", trials)
        .config("window_bits", window_bits)
        .config("floor", floor)
        .config("min_cell_occurrences", 500)
        .config("slack", "3 sigma, sigma = sqrt(floor (1-floor) / occurrences)");

    let mut tested = 0u64;
    let mut violations = 0u64;
    let mut worst_margin = f64::INFINITY;
    for cell in 0..chains * patterns {
        if occ[cell] < 500 {
            continue;
        }
        tested += 1;
        let phat = ones[cell] as f64 / occ[cell] as f64;
        let sigma = (floor * (1.0 - floor) / occ[cell] as f64).sqrt();
        let margin = phat - (floor - 3.0 * sigma);
        worst_margin = worst_margin.min(margin);
        if margin < 0.0 {
            violations += 1;
        }
    }
    report
        .measure("cells_tested", tested)
        .measure("violations", violations)
        .measure(
            "worst_margin",
            if tested > 0 {
                format!("{worst_margin:.6}")
            } else {
                "n/a".to_string()
            },
        );
    report.verdict = if tested == 0 {
        Verdict::Inconclusive
    } else if violations == 0 {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    };
    Ok(report)
}

/// End-to-end uniformity measurement: empirical total variation of the
/// sampler's output against oracle-enumerated uniform, with failure-path
/// frequency. The verdict records whether the measured distance sits
/// within `epsilon` plus statistical slack.
pub fn measure_sampler_uniformity(
    g: &Graph,
    epsilon: f64,
    samples: usize,
    backend: PmBackend,
    seed: u64,
) -> Result<ExperimentReport> {
    if samples == 0 {
        return Err(Error::EmptySamples);
    }
    let support = g.enumerate_independent_sets()?;
    let support_bits: Vec<u128> = support.iter().map(|s| s.bits()).collect();
    let outcomes: Vec<(u128, bool)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let sub_seed = stream(seed, &[TAG_UNIFORMITY, i as u64]).gen::<u64>();
            let mut cfg = SamplerConfig::new(epsilon, sub_seed);
            cfg.backend = backend;
            let out = sample_independent_set(g, &cfg)?;
            Ok((out.output.bits(), out.failed))
        })
        .collect::<Result<_>>()?;
    let empirical =
        Distribution::empirical(outcomes.iter().map(|o| o.0), Some(&support_bits))?;
    let uniform = Distribution::uniform_over(support_bits.iter().copied())?;
    let tv = total_variation(&empirical, &uniform);
    let failures = outcomes.iter().filter(|o| o.1).count();
    let slack = 3.0 * (support.len() as f64 / samples as f64).sqrt();
    let threshold = epsilon + slack;

    let mut report = ExperimentReport::new("sampler-uniformity", seed);
    report
        .config("graph", crate::graph::format_graph(g).replace('\n', "; "))
        .config("epsilon", epsilon)
        .config("backend", backend)
        .config("samples", samples)
        .config("support_size", support.len())
        .config("threshold", format!("{threshold:.6} (epsilon + 3 sqrt(|I|/samples))"));
    if g.num_edges() > 0 {
        let params = derive_parameters(g, epsilon)?;
        report
            .config("chains_upper_bound", params.chains)
            .config("max_repetitions", params.max_repetitions);
    }
    let mut table = String::new();
    for (set, bits) in support.iter().zip(&support_bits) {
        table.push_str(&format!("{set} {:.6}\n", empirical.prob(bits)));
    }
    report.table("empirical_distribution", table.trim_end());
    report
        .measure("tv_to_uniform", format!("{tv:.6}"))
        .measure("failure_frequency", failures as f64 / samples as f64);
    report.verdict = if tv <= threshold {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    };
    Ok(report)
}

/// All connected graphs on at most four vertices, one per isomorphism
/// class, on vertex set {0..N-1}.
pub fn connected_graphs_n_le_4() -> Vec<(&'static str, Graph)> {
    let mk = |n: usize, edges: &[(usize, usize)]| Graph::new(n, edges.to_vec()).unwrap();
    vec![
        ("K1", mk(1, &[])),
        ("K2", mk(2, &[(0, 1)])),
        ("P3", mk(3, &[(0, 1), (1, 2)])),
        ("K3", mk(3, &[(0, 1), (1, 2), (0, 2)])),
        ("P4", mk(4, &[(0, 1), (1, 2), (2, 3)])),
        ("star4", mk(4, &[(0, 1), (0, 2), (0, 3)])),
        ("paw", mk(4, &[(0, 1), (1, 2), (0, 2), (2, 3)])),
        ("C4", mk(4, &[(0, 1), (1, 2), (2, 3), (0, 3)])),
        ("diamond", mk(4, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 3)])),
        (
            "K4",
            mk(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        ),
    ]
}
