//! (μ+λ) evolution strategy over bit genomes.
//!
//! Offspring are bit-flip mutants of uniformly drawn parents. The mutation
//! rate follows the 1/5 success rule, with an extra doubling whenever fewer
//! than `min_flip_events` bits were flipped in a generation.
//!
//! Every random draw comes from a generator seeded by (run seed,
//! generation, offspring index), so a run is bit-identical for any number
//! of worker threads.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::cartpole::CartState;
use crate::controller::{evaluate_genome, ControllerConfig, Evaluation};
use crate::error::{invalid, Result};
use crate::genome::{BitGenome, DEFAULT_RANDOM_LENGTH};
use crate::seeds::rng_for;

const STREAM_INIT: u64 = 0;
const STREAM_MUTATION: u64 = 1;
const STREAM_EVAL: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenomeInit {
    Random {
        length: usize,
    },
    /// Duplication-and-mutation from a random 32-bit seed word.
    Dm {
        events: u32,
        rate: f64,
    },
}

impl Default for GenomeInit {
    fn default() -> Self {
        GenomeInit::Dm { events: 7, rate: 0.02 }
    }
}

impl GenomeInit {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BitGenome> {
        match *self {
            GenomeInit::Random { length } => BitGenome::random(length, rng),
            GenomeInit::Dm { events, rate } => BitGenome::duplication_mutation(events, rate, rng),
        }
    }

    pub fn random_default() -> Self {
        GenomeInit::Random {
            length: DEFAULT_RANDOM_LENGTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsConfig {
    pub mu: usize,
    pub lambda: usize,
    /// Generations after the initial population.
    pub max_generations: usize,
    pub initial_mutation_rate: f64,
    /// Below this many flipped bits in a generation the rate is doubled.
    pub min_flip_events: usize,
    pub rate_bounds: (f64, f64),
    pub genome_init: GenomeInit,
    pub seed: u64,
    /// The run stops once the best fitness is at or below this value.
    pub target_fitness: f64,
}

impl Default for EsConfig {
    fn default() -> Self {
        EsConfig {
            mu: 250,
            lambda: 250,
            max_generations: 50,
            initial_mutation_rate: 0.01,
            min_flip_events: 250,
            rate_bounds: (1e-5, 0.5),
            genome_init: GenomeInit::default(),
            seed: 0,
            target_fitness: 1.0,
        }
    }
}

impl EsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mu == 0 {
            return Err(invalid("mu must be at least 1"));
        }
        if self.lambda == 0 {
            return Err(invalid("lambda must be at least 1"));
        }
        let (lo, hi) = self.rate_bounds;
        if !(0.0 < lo && lo <= hi && hi <= 1.0) {
            return Err(invalid(format!(
                "rate bounds must satisfy 0 < min <= max <= 1, got [{lo}, {hi}]"
            )));
        }
        let r = self.initial_mutation_rate;
        if !(r > 0.0 && r < 1.0) {
            return Err(invalid(format!("initial mutation rate must be in (0, 1), got {r}")));
        }
        Ok(())
    }
}

/// 1/5 rule: double above a 1/5 success rate, halve otherwise; then double
/// again if too few bits flipped; then clamp to the bounds.
pub fn adapt_rate(rate: f64, success_rate: f64, flip_events: usize, cfg: &EsConfig) -> f64 {
    let mut next = if success_rate > 0.2 { rate * 2.0 } else { rate / 2.0 };
    if flip_events < cfg.min_flip_events {
        next *= 2.0;
    }
    next.clamp(cfg.rate_bounds.0, cfg.rate_bounds.1)
}

/// Identifies one evaluation within a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalContext {
    pub run_seed: u64,
    pub generation: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: BitGenome,
    pub fitness: f64,
    pub p_index: Option<usize>,
    pub valid: bool,
}

impl Individual {
    fn new(genome: BitGenome, eval: Evaluation) -> Self {
        Individual {
            genome,
            fitness: eval.fitness,
            p_index: eval.p_index,
            valid: eval.valid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
    /// Rate used to produce this generation's offspring.
    pub mut_rate: f64,
    pub flips: usize,
    /// Fraction of offspring strictly better than their parent.
    pub success_rate: f64,
}

#[derive(Debug, Clone)]
pub struct RunLog {
    pub generations: Vec<GenerationRecord>,
    /// Final parents, best first.
    pub population: Vec<Individual>,
    pub best: Individual,
    pub success: bool,
    pub elapsed: Duration,
}

pub const RUNLOG_HEADER: &str = "generation,best,mean,worst,mut_rate,flips,success_rate";

impl RunLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(RUNLOG_HEADER);
        out.push('\n');
        for r in &self.generations {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.generation, r.best, r.mean, r.worst, r.mut_rate, r.flips, r.success_rate
            )
            .expect("writing to a String");
        }
        out
    }
}

fn record(generation: usize, pop: &[Individual], mut_rate: f64, flips: usize, success_rate: f64) -> GenerationRecord {
    let fits = pop.iter().map(|i| i.fitness);
    GenerationRecord {
        generation,
        best: fits.clone().fold(f64::INFINITY, f64::min),
        mean: fits.clone().sum::<f64>() / pop.len() as f64,
        worst: fits.fold(f64::NEG_INFINITY, f64::max),
        mut_rate,
        flips,
        success_rate,
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))
}

/// Runs the strategy. `eval` must be a pure function of its arguments;
/// lower fitness is better.
pub fn evolve<F>(cfg: &EsConfig, workers: usize, eval: F) -> Result<RunLog>
where
    F: Fn(&BitGenome, &EvalContext) -> Evaluation + Sync,
{
    cfg.validate()?;
    let started = Instant::now();
    let pool = thread_pool(workers)?;
    let ctx = |generation, index| EvalContext {
        run_seed: cfg.seed,
        generation,
        index,
    };

    let mut parents: Vec<Individual> = pool.install(|| {
        (0..cfg.mu)
            .into_par_iter()
            .map(|i| {
                let genome = cfg
                    .genome_init
                    .sample(&mut rng_for(cfg.seed, &[STREAM_INIT, i as u64]))?;
                let e = eval(&genome, &ctx(0, i));
                Ok(Individual::new(genome, e))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    sort_population(&mut parents);

    let mut rate = cfg.initial_mutation_rate.clamp(cfg.rate_bounds.0, cfg.rate_bounds.1);
    let mut log = vec![record(0, &parents, rate, 0, 0.0)];

    for generation in 1..=cfg.max_generations {
        if parents[0].fitness <= cfg.target_fitness {
            break;
        }
        let offspring: Vec<(Individual, usize, usize)> = pool.install(|| {
            (0..cfg.lambda)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_for(cfg.seed, &[STREAM_MUTATION, generation as u64, i as u64]);
                    let parent = rng.gen_range(0..parents.len());
                    let (genome, flips) = parents[parent].genome.mutate(rate, &mut rng)?;
                    let e = eval(&genome, &ctx(generation, i));
                    Ok((Individual::new(genome, e), parent, flips))
                })
                .collect::<Result<Vec<_>>>()
        })?;

        let flips: usize = offspring.iter().map(|(_, _, f)| f).sum();
        let successes = offspring
            .iter()
            .filter(|(child, parent, _)| child.fitness < parents[*parent].fitness)
            .count();
        let success_rate = successes as f64 / cfg.lambda as f64;

        let mut pool_all = std::mem::take(&mut parents);
        pool_all.extend(offspring.into_iter().map(|(child, _, _)| child));
        sort_population(&mut pool_all);
        pool_all.truncate(cfg.mu);
        parents = pool_all;

        log.push(record(generation, &parents, rate, flips, success_rate));
        rate = adapt_rate(rate, success_rate, flips, cfg);
    }

    let best = parents[0].clone();
    Ok(RunLog {
        generations: log,
        success: best.fitness <= cfg.target_fitness,
        best,
        population: parents,
        elapsed: started.elapsed(),
    })
}

/// Ascending fitness. The sort is stable, so parents (listed first) win
/// ties against offspring, and earlier indices against later ones.
fn sort_population(pop: &mut [Individual]) {
    pop.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
}

/// Which cart state an evaluation starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum EvalStatePolicy {
    /// A fresh random state for every evaluation.
    #[default]
    PerIndividual,
    /// One random state shared by a generation.
    PerGeneration,
    /// One random state for the whole run.
    Fixed,
}

impl EvalStatePolicy {
    pub fn initial_state(self, ctx: &EvalContext) -> CartState {
        let path: Vec<u64> = match self {
            EvalStatePolicy::PerIndividual => vec![STREAM_EVAL, ctx.generation as u64, ctx.index as u64],
            EvalStatePolicy::PerGeneration => vec![STREAM_EVAL, ctx.generation as u64],
            EvalStatePolicy::Fixed => vec![STREAM_EVAL],
        };
        CartState::random(&mut rng_for(ctx.run_seed, &path))
    }
}

/// Pole-balancing fitness for [`evolve`].
pub fn pole_fitness(
    cfg: ControllerConfig,
    policy: EvalStatePolicy,
) -> impl Fn(&BitGenome, &EvalContext) -> Evaluation + Sync {
    move |genome, ctx| evaluate_genome(genome, &cfg, &policy.initial_state(ctx))
}
