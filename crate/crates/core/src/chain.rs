//! The basic insert/delete chain on independent sets: single steps,
//! fixed-length realizations, and an exact transition-matrix oracle for
//! tiny state spaces.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use rand::Rng;

/// Default cap on `|I(G)|` for the dense transition-matrix oracle.
pub const DEFAULT_STATE_LIMIT: usize = 4096;

/// The state sequence `X_0 ... X_T` of one chain run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub states: Vec<VertexSet>,
}

impl Realization {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// One transition: draw a uniform vertex `u`; delete it if present, insert
/// it if absent and the result stays independent, otherwise stay put.
pub fn bidc_step(g: &Graph, state: &VertexSet, rng: &mut impl Rng) -> Result<VertexSet> {
    if !g.is_independent(state)? {
        return Err(Error::NotIndependent);
    }
    Ok(bidc_step_unchecked(g, state, rng))
}

#[inline]
pub(crate) fn bidc_step_unchecked(g: &Graph, state: &VertexSet, rng: &mut impl Rng) -> VertexSet {
    let u = rng.gen_range(0..g.num_vertices());
    let mut next = *state;
    if state.contains(u) {
        next.remove(u);
    } else if g.neighbors(u) & state.bits() == 0 {
        next.insert(u);
    }
    next
}

/// Runs the chain for `steps` transitions from `init`; the result holds
/// `steps + 1` states including the initial one.
pub fn run_realization(
    g: &Graph,
    init: &VertexSet,
    steps: usize,
    rng: &mut impl Rng,
) -> Result<Realization> {
    if !g.is_independent(init)? {
        return Err(Error::NotIndependent);
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(*init);
    let mut cur = *init;
    for _ in 0..steps {
        cur = bidc_step_unchecked(g, &cur, rng);
        states.push(cur);
    }
    Ok(Realization { states })
}

/// Dense row-stochastic transition matrix over `I(G)` in the oracle's
/// canonical order. `P[x][y]` is the number of vertex draws mapping `x` to
/// `y`, divided by `N`.
pub fn transition_matrix(g: &Graph) -> Result<(Vec<VertexSet>, Vec<Vec<f64>>)> {
    transition_matrix_with_limit(g, DEFAULT_STATE_LIMIT)
}

pub fn transition_matrix_with_limit(
    g: &Graph,
    limit: usize,
) -> Result<(Vec<VertexSet>, Vec<Vec<f64>>)> {
    let states = g.enumerate_independent_sets()?;
    if states.len() > limit {
        return Err(Error::OverLimit {
            what: "transition_matrix",
            what_limit: "state count",
            limit,
            value: states.len(),
        });
    }
    let index: std::collections::HashMap<u128, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.bits(), i))
        .collect();
    let n = g.num_vertices() as f64;
    let mut matrix = vec![vec![0.0; states.len()]; states.len()];
    for (i, s) in states.iter().enumerate() {
        for u in 0..g.num_vertices() {
            let mut next = *s;
            if s.contains(u) {
                next.remove(u);
            } else if g.neighbors(u) & s.bits() == 0 {
                next.insert(u);
            }
            matrix[i][index[&next.bits()]] += 1.0 / n;
        }
    }
    Ok((states, matrix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::rng::stream;

    #[test]
    fn step_three_cases() {
        let g = parse_graph("2 1\n0 1").unwrap();
        let a = VertexSet::from_vertices(&[0], 2);
        // Force the drawn vertex by scanning seeds for each branch.
        let mut saw_delete = false;
        let mut saw_blocked = false;
        for seed in 0..64 {
            let mut rng = stream(seed, &[]);
            let next = bidc_step(&g, &a, &mut rng).unwrap();
            if next.is_empty() {
                saw_delete = true; // drew u=0
            } else {
                assert_eq!(next, a); // drew u=1, insertion blocked
                saw_blocked = true;
            }
        }
        assert!(saw_delete && saw_blocked);

        let edgeless = Graph::edgeless(1);
        let mut rng = stream(0, &[]);
        let next = bidc_step(&edgeless, &VertexSet::empty(1), &mut rng).unwrap();
        assert!(next.contains(0));
    }

    #[test]
    fn step_rejects_dependent_state() {
        let g = parse_graph("2 1\n0 1").unwrap();
        let bad = VertexSet::from_vertices(&[0, 1], 2);
        let mut rng = stream(0, &[]);
        assert!(matches!(bidc_step(&g, &bad, &mut rng), Err(Error::NotIndependent)));
    }

    #[test]
    fn realization_contracts() {
        let g = parse_graph("3 2\n0 1\n1 2").unwrap();
        let init = VertexSet::empty(3);
        let r0 = run_realization(&g, &init, 0, &mut stream(1, &[])).unwrap();
        assert_eq!(r0.states, vec![init]);

        let a = run_realization(&g, &init, 100, &mut stream(5, &[])).unwrap();
        let b = run_realization(&g, &init, 100, &mut stream(5, &[])).unwrap();
        assert_eq!(a, b);
        for w in a.states.windows(2) {
            assert!(w[0].symmetric_difference_size(&w[1]) <= 1);
            assert!(g.is_independent(&w[1]).unwrap());
        }
    }

    #[test]
    fn long_run_visits_all_states() {
        let g = parse_graph("3 2\n0 1\n1 2").unwrap();
        let r = run_realization(&g, &VertexSet::empty(3), 10_000, &mut stream(2, &[])).unwrap();
        let mut seen: std::collections::BTreeSet<u128> =
            r.states.iter().map(|s| s.bits()).collect();
        let all: std::collections::BTreeSet<u128> = g
            .enumerate_independent_sets()
            .unwrap()
            .iter()
            .map(|s| s.bits())
            .collect();
        seen.retain(|b| all.contains(b));
        assert_eq!(seen, all);
    }

    #[test]
    fn single_vertex_matrix_alternates() {
        let g = Graph::edgeless(1);
        let (states, p) = transition_matrix(&g).unwrap();
        assert_eq!(states.len(), 2);
        assert_eq!(p, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn matrix_is_doubly_stochastic_and_stationary() {
        let g = parse_graph("3 2\n0 1\n1 2").unwrap();
        let (states, p) = transition_matrix(&g).unwrap();
        let k = states.len();
        for i in 0..k {
            let row: f64 = p[i].iter().sum();
            assert!((row - 1.0).abs() < 1e-12);
            for j in 0..k {
                assert!((p[i][j] - p[j][i]).abs() < 1e-12);
            }
        }
        let pi = 1.0 / k as f64;
        for j in 0..k {
            let mass: f64 = (0..k).map(|i| pi * p[i][j]).sum();
            assert!((mass - pi).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_row_matches_matrix() {
        use crate::dist::{total_variation, Distribution};
        let g = parse_graph("3 2\n0 1\n1 2").unwrap();
        let (states, p) = transition_matrix(&g).unwrap();
        let x = VertexSet::from_vertices(&[0], 3);
        let xi = states.iter().position(|s| *s == x).unwrap();
        let mut rng = stream(9, &[]);
        let samples: Vec<u128> = (0..1_000_000)
            .map(|_| bidc_step(&g, &x, &mut rng).unwrap().bits())
            .collect();
        let emp = Distribution::empirical(samples, None).unwrap();
        let row = Distribution::from_pairs(
            states
                .iter()
                .enumerate()
                .filter(|(j, _)| p[xi][*j] > 0.0)
                .map(|(j, s)| (s.bits(), p[xi][j])),
        )
        .unwrap();
        assert!(total_variation(&emp, &row) < 0.01);
    }
}
