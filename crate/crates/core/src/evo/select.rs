use std::cmp::Ordering;

use rand::Rng;

use super::config::Selection;
use super::engine::Individual;

/// The elitist ranking: higher fitness first, then fewer gates, fewer
/// edges, earlier birth.
pub fn elitist_order(a: &Individual, b: &Individual) -> Ordering {
    b.fitness
        .total_cmp(&a.fitness)
        .then(a.ft.gate_count().cmp(&b.ft.gate_count()))
        .then(a.ft.edge_count().cmp(&b.ft.edge_count()))
        .then(a.birth.cmp(&b.birth))
}

/// Indices into `pool` of the selected individuals, in selection order.
pub fn select_indices<R: Rng + ?Sized>(
    pool: &[Individual],
    target: usize,
    strategy: Selection,
    rng: &mut R,
) -> Vec<usize> {
    let n = pool.len();
    if n == 0 || target == 0 {
        return Vec::new();
    }
    match strategy {
        Selection::Elitist => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| elitist_order(&pool[i], &pool[j]));
            order.truncate(target);
            order
        }
        Selection::Random => (0..target).map(|_| rng.gen_range(0..n)).collect(),
        Selection::Roulette => {
            let Some(cumulative) = cumulative_fitness(pool) else {
                return (0..target).map(|_| rng.gen_range(0..n)).collect();
            };
            let total = cumulative[n - 1];
            (0..target)
                .map(|_| locate(&cumulative, rng.gen::<f64>() * total))
                .collect()
        }
        Selection::Sus => {
            let Some(cumulative) = cumulative_fitness(pool) else {
                return (0..target).map(|_| rng.gen_range(0..n)).collect();
            };
            let step = cumulative[n - 1] / target as f64;
            let start = rng.gen::<f64>() * step;
            (0..target)
                .map(|i| locate(&cumulative, start + i as f64 * step))
                .collect()
        }
        Selection::Tournament(size) => (0..target)
            .map(|_| {
                (0..size.max(1))
                    .map(|_| rng.gen_range(0..n))
                    .min_by(|&i, &j| elitist_order(&pool[i], &pool[j]).then(i.cmp(&j)))
                    .expect("tournament size is positive")
            })
            .collect(),
    }
}

/// Running fitness sums, or `None` when every fitness is zero.
fn cumulative_fitness(pool: &[Individual]) -> Option<Vec<f64>> {
    let mut acc = 0.0;
    let cumulative: Vec<f64> = pool
        .iter()
        .map(|ind| {
            acc += ind.fitness.max(0.0);
            acc
        })
        .collect();
    (acc > 0.0).then_some(cumulative)
}

/// First index whose cumulative weight exceeds `x`.
fn locate(cumulative: &[f64], x: f64) -> usize {
    cumulative
        .partition_point(|&c| c <= x)
        .min(cumulative.len() - 1)
}
