//! Real-coded genetic algorithm with tournament selection.
//!
//! Population and selection strategy follow the reference setup
//! (population 100, tournament); the remaining operators are
//! conventional: uniform crossover, per-gene Gaussian mutation with a
//! linearly decaying scale, and a small elite carried unchanged.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{FitConfig, Recorder, Selection};
use crate::channel::ShapingParams;
use crate::error::{Error, Result};
use crate::fit::Objective;
use crate::seeding::{derive_seed, STREAM_FIT_EVAL, STREAM_OPTIMIZER};

#[derive(Debug, Clone, Copy)]
struct Genome {
    r: f64,
    sigma_z2: f64,
    k: usize,
}

pub(super) fn run<O: Objective + ?Sized>(
    objective: &O,
    cfg: &FitConfig,
    start: Option<(ShapingParams, usize)>,
    recorder: &mut Recorder,
) -> Result<()> {
    let ga = &cfg.ga;
    let bounds = &cfg.bounds;
    let master = cfg.llf.seed;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, STREAM_OPTIMIZER, 0));
    let mut eval_counter = 0usize;

    let random_genome = |rng: &mut ChaCha8Rng| Genome {
        r: rng.random_range(bounds.r.0..=bounds.r.1),
        sigma_z2: rng.random_range(bounds.sigma_z2.0..=bounds.sigma_z2.1),
        k: rng.random_range(bounds.k.0..=bounds.k.1),
    };

    let mut population: Vec<Genome> = Vec::with_capacity(ga.population);
    if let Some((p, k)) = start {
        let p = bounds.clamp_params(p);
        population.push(Genome { r: p.r, sigma_z2: p.sigma_z2, k: bounds.clamp_k(k) });
    }
    while population.len() < ga.population {
        population.push(random_genome(&mut rng));
    }

    let mut fitness =
        evaluate_batch(objective, master, &population, &mut eval_counter, recorder)?;

    for generation in 1..ga.generations {
        // scale decays linearly toward zero over the run
        let decay = 1.0 - generation as f64 / ga.generations as f64;
        let sd_r = ga.mutation_scale * (bounds.r.1 - bounds.r.0) * decay;
        let sd_s2 = ga.mutation_scale * (bounds.sigma_z2.1 - bounds.sigma_z2.0) * decay;
        let sd_k = ga.mutation_scale * (bounds.k.1 - bounds.k.0) as f64 * decay;

        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));

        let mut next: Vec<Genome> = Vec::with_capacity(ga.population);
        let mut next_fitness: Vec<f64> = Vec::with_capacity(ga.population);
        for &i in order.iter().take(ga.elitism) {
            next.push(population[i]);
            next_fitness.push(fitness[i]);
        }

        let mut offspring: Vec<Genome> = Vec::with_capacity(ga.population - next.len());
        while offspring.len() < ga.population - next.len() {
            let a = select(&mut rng, &fitness, ga.tournament_size, ga.selection);
            let b = select(&mut rng, &fitness, ga.tournament_size, ga.selection);
            let (mut c1, mut c2) = crossover(&mut rng, population[a], population[b], ga.crossover_rate);
            for child in [&mut c1, &mut c2] {
                if rng.random::<f64>() < ga.mutation_rate {
                    child.r = (child.r + sd_r * gaussian(&mut rng)).clamp(bounds.r.0, bounds.r.1);
                }
                if rng.random::<f64>() < ga.mutation_rate {
                    child.sigma_z2 = (child.sigma_z2 + sd_s2 * gaussian(&mut rng))
                        .clamp(bounds.sigma_z2.0, bounds.sigma_z2.1);
                }
                if rng.random::<f64>() < ga.mutation_rate {
                    let shift = (sd_k * gaussian(&mut rng)).round() as i64;
                    let k = (child.k as i64 + shift)
                        .clamp(bounds.k.0 as i64, bounds.k.1 as i64);
                    child.k = k as usize;
                }
            }
            offspring.push(c1);
            if offspring.len() < ga.population - next.len() {
                offspring.push(c2);
            }
        }

        let offspring_fitness =
            evaluate_batch(objective, master, &offspring, &mut eval_counter, recorder)?;
        next.extend(offspring);
        next_fitness.extend(offspring_fitness);
        population = next;
        fitness = next_fitness;
    }
    Ok(())
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample::<f64, _>(rand_distr::StandardNormal)
}

fn select(rng: &mut ChaCha8Rng, fitness: &[f64], size: usize, strategy: Selection) -> usize {
    match strategy {
        Selection::Tournament => {
            let mut best = rng.random_range(0..fitness.len());
            for _ in 1..size {
                let challenger = rng.random_range(0..fitness.len());
                if fitness[challenger] > fitness[best] {
                    best = challenger;
                }
            }
            best
        }
    }
}

fn crossover(rng: &mut ChaCha8Rng, a: Genome, b: Genome, rate: f64) -> (Genome, Genome) {
    if rng.random::<f64>() >= rate {
        return (a, b);
    }
    let mut c1 = a;
    let mut c2 = b;
    if rng.random::<bool>() {
        std::mem::swap(&mut c1.r, &mut c2.r);
    }
    if rng.random::<bool>() {
        std::mem::swap(&mut c1.sigma_z2, &mut c2.sigma_z2);
    }
    if rng.random::<bool>() {
        std::mem::swap(&mut c1.k, &mut c2.k);
    }
    (c1, c2)
}

/// Evaluates a batch of genomes. Seeds are assigned by evaluation index
/// before the (possibly concurrent) evaluation, and results are recorded
/// in index order, so the trace is schedule-independent.
fn evaluate_batch<O: Objective + ?Sized>(
    objective: &O,
    master: u64,
    genomes: &[Genome],
    eval_counter: &mut usize,
    recorder: &mut Recorder,
) -> Result<Vec<f64>> {
    let base = *eval_counter;
    *eval_counter += genomes.len();
    let jobs: Vec<(Genome, u64)> = genomes
        .iter()
        .enumerate()
        .map(|(i, g)| (*g, derive_seed(master, STREAM_FIT_EVAL, (base + i) as u64)))
        .collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|(g, seed)| {
            let p = ShapingParams { r: g.r, sigma_z2: g.sigma_z2 };
            match objective.evaluate(&p, g.k, *seed) {
                Ok(v) => Ok(v),
                Err(Error::EmptyOverlap { .. }) => Ok(f64::NEG_INFINITY),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    for ((g, seed), v) in jobs.iter().zip(&values) {
        recorder.record(ShapingParams { r: g.r, sigma_z2: g.sigma_z2 }, g.k, *v, *seed);
    }
    Ok(values)
}
