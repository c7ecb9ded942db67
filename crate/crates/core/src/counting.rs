//! Randomized approximate counting of independent sets via the telescoping
//! product `|I(G)| = 2^N * prod_k |I(G_k)| / |I(G_{k-1})|`, each ratio
//! estimated by sampling from the smaller-prefix sampler.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pipeline::{sample_independent_set, PmBackend, SamplerConfig};
use crate::rng::stream;
use rayon::prelude::*;

/// One ratio estimate with its audit counters.
#[derive(Clone, Debug)]
pub struct RatioEstimate {
    /// Edge index: ratio |I(G_k)| / |I(G_{k-1})| for k = edge_index + 1.
    pub edge_index: usize,
    pub samples: usize,
    pub hits: usize,
    pub fallback_outputs: usize,
    pub estimate: f64,
}

/// A full count estimate and its per-ratio breakdown.
#[derive(Clone, Debug)]
pub struct CountEstimate {
    pub estimate: f64,
    pub ratios: Vec<RatioEstimate>,
    pub samples_per_ratio: usize,
    pub sampler_epsilon: f64,
}

/// Per-call sampler accuracy for an overall budget `eps0` over `m` ratios.
pub fn per_call_epsilon(eps0: f64, m: usize) -> f64 {
    eps0 / (6.0 * m as f64)
}

/// Sample count per ratio: `ceil(128 m / eps0^2)`.
pub fn samples_per_ratio(eps0: f64, m: usize) -> usize {
    (128.0 * m as f64 / (eps0 * eps0)).ceil() as usize
}

/// Estimates `|I(G_k)| / |I(G_{k-1})|` for `k = edge_index + 1` by drawing
/// `samples` sets from the sampler on `G_{k-1}` and counting how many are
/// still independent once edge `k` is added.
pub fn estimate_ratio(
    g: &Graph,
    edge_index: usize,
    samples: usize,
    sampler_epsilon: f64,
    backend: PmBackend,
    seed: u64,
) -> Result<RatioEstimate> {
    if edge_index >= g.num_edges() {
        return Err(Error::InvalidConfig(format!(
            "edge index {edge_index} out of range for {} edges",
            g.num_edges()
        )));
    }
    if samples == 0 {
        return Err(Error::EmptySamples);
    }
    let prev = g.prefix_graph(edge_index)?;
    let next = g.prefix_graph(edge_index + 1)?;
    let results: Vec<(bool, bool)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            // One independent seed per draw keeps draws independent and the
            // whole estimate replayable.
            let sub_seed = {
                use rand::Rng;
                stream(seed, &[10, edge_index as u64, i as u64]).gen::<u64>()
            };
            let mut cfg = SamplerConfig::new(sampler_epsilon, sub_seed);
            cfg.backend = backend;
            let out = sample_independent_set(&prev, &cfg)?;
            Ok((
                next.is_independent(&out.output)?,
                out.failed,
            ))
        })
        .collect::<Result<_>>()?;
    let hits = results.iter().filter(|r| r.0).count();
    let fallback_outputs = results.iter().filter(|r| r.1).count();
    Ok(RatioEstimate {
        edge_index,
        samples,
        hits,
        fallback_outputs,
        estimate: hits as f64 / samples as f64,
    })
}

/// Full count estimate: `2^N` times the product of the m ratio estimates,
/// with per-call accuracy `eps0 / (6 m)` and `ceil(128 m / eps0^2)` draws
/// per ratio. Succeeds with probability at least 3/4; boost externally.
pub fn count_fpras(
    g: &Graph,
    eps0: f64,
    backend: PmBackend,
    seed: u64,
) -> Result<CountEstimate> {
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::InvalidConfig(format!("eps0 {eps0} not in (0,1)")));
    }
    let m = g.num_edges();
    if m == 0 {
        return Ok(CountEstimate {
            estimate: 2f64.powi(g.num_vertices() as i32),
            ratios: Vec::new(),
            samples_per_ratio: 0,
            sampler_epsilon: 0.0,
        });
    }
    let samples = samples_per_ratio(eps0, m);
    let sampler_epsilon = per_call_epsilon(eps0, m);
    let mut ratios = Vec::with_capacity(m);
    let mut product = 2f64.powi(g.num_vertices() as i32);
    for k in 0..m {
        let r = estimate_ratio(g, k, samples, sampler_epsilon, backend, seed)?;
        product *= r.estimate;
        ratios.push(r);
    }
    Ok(CountEstimate {
        estimate: product,
        ratios,
        samples_per_ratio: samples,
        sampler_epsilon,
    })
}

/// Median boosting repetition count `k = ceil(16 ln(2/rho))`.
pub fn boost_repetitions(rho: f64) -> Result<usize> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidConfig(format!("rho {rho} not in (0,1)")));
    }
    Ok((16.0 * (2.0 / rho).ln()).ceil() as usize)
}

/// Median of `values` (the lower of the two middles when even).
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN estimates"));
    Ok(sorted[(sorted.len() - 1) / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    #[test]
    fn parameter_formulas() {
        assert_eq!(samples_per_ratio(0.5, 1), 512);
        assert_eq!(samples_per_ratio(0.2, 2), 6400);
        assert!((per_call_epsilon(0.3, 5) - 0.01).abs() < 1e-15);
        assert_eq!(boost_repetitions(0.05).unwrap(), 60);
        assert!(boost_repetitions(0.0).is_err());
    }

    #[test]
    fn median_lower_of_two() {
        assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.0);
        assert!(median(&[]).is_err());
    }

    #[test]
    fn edgeless_count_exact() {
        let g = Graph::edgeless(5);
        let c = count_fpras(&g, 0.5, PmBackend::Exact, 1).unwrap();
        assert_eq!(c.estimate, 32.0);
        assert!(c.ratios.is_empty());
    }

    #[test]
    fn single_edge_ratio_concentrates() {
        // |I(G_1)| / |I(G_0)| = 3/4 for one edge on two vertices.
        let g = parse_graph("2 1\n0 1").unwrap();
        let r = estimate_ratio(&g, 0, 4000, 0.05, PmBackend::Exact, 42).unwrap();
        assert!((r.estimate - 0.75).abs() < 0.03, "estimate {}", r.estimate);
        assert_eq!(r.samples, 4000);
        assert_eq!(r.hits + (r.samples - r.hits), r.samples);
    }

    #[test]
    fn path_count_close() {
        // |I(P3)| = 5.
        let g = parse_graph("3 2\n0 1\n1 2").unwrap();
        let c = count_fpras(&g, 0.4, PmBackend::Exact, 7).unwrap();
        assert!(
            (c.estimate - 5.0).abs() / 5.0 < 0.4,
            "estimate {}",
            c.estimate
        );
        assert_eq!(c.ratios.len(), 2);
    }

    #[test]
    fn ratio_estimate_deterministic() {
        let g = parse_graph("2 1\n0 1").unwrap();
        let a = estimate_ratio(&g, 0, 200, 0.2, PmBackend::Exact, 9).unwrap();
        let b = estimate_ratio(&g, 0, 200, 0.2, PmBackend::Exact, 9).unwrap();
        assert_eq!(a.hits, b.hits);
    }

    #[test]
    fn bad_inputs_rejected() {
        let g = parse_graph("2 1\n0 1").unwrap();
        assert!(estimate_ratio(&g, 1, 10, 0.2, PmBackend::Exact, 0).is_err());
        assert!(estimate_ratio(&g, 0, 0, 0.2, PmBackend::Exact, 0).is_err());
        assert!(count_fpras(&g, 0.0, PmBackend::Exact, 0).is_err());
    }
}
