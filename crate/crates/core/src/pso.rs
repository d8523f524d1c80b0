//! Bound-constrained particle swarm optimizer in its original form: no
//! inertia weight, no velocity limit, asynchronous best updates.
//!
//! Velocity and position update for particle `i`:
//!
//! ```text
//! v' = v + c1·u1·(p_i − x) + c2·u2·(g − x)
//! x' = x + v'
//! ```
//!
//! `u1` and `u2` are *scalars* drawn from U(0,1) once per particle per move,
//! applied to the whole difference vector (not one draw per component).
//! After the move each component outside `[lower, upper]` is clamped to the
//! violated bound and that velocity component is set to zero.
//!
//! Draw order from the seeded generator is fixed: initial positions
//! particle-major, component-minor; then per move `u1` before `u2`, particles
//! in index order. Two runs with the same seed are bit-identical.
//!
//! Minimisation. A particle is evaluated, its personal best and the global
//! best are updated with `<=` (ties replace the incumbent), and the next
//! particle then moves against the updated global best.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Concrete generator behind every seeded run.
pub type SwarmRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsoConfigError {
    #[error("swarm_size must be positive")]
    EmptySwarm,
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("bounds have length {lower}/{upper}, expected {dimension}")]
    BoundsLength {
        dimension: usize,
        lower: usize,
        upper: usize,
    },
    #[error("bound {index}: lower {lower} must be finite and below upper {upper}")]
    BadBound { index: usize, lower: f64, upper: f64 },
    #[error("learning factors must be finite and non-negative (c1 = {c1}, c2 = {c2})")]
    BadLearningFactor { c1: f64, c2: f64 },
    #[error("max_evaluations ({max}) must be at least swarm_size ({swarm})")]
    BudgetTooSmall { max: usize, swarm: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub dimension: usize,
    pub c1: f64,
    pub c2: f64,
    pub max_evaluations: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rng_seed: u64,
}

impl PsoConfig {
    pub const DEFAULT_SWARM_SIZE: usize = 50;
    pub const DEFAULT_MAX_EVALUATIONS: usize = 10_000;
    pub const DEFAULT_LEARNING_FACTOR: f64 = 2.0;

    /// Np = 50, maxFes = 10 000, C1 = C2 = 2.0 over the given box.
    pub fn with_bounds(lower: Vec<f64>, upper: Vec<f64>, rng_seed: u64) -> Self {
        PsoConfig {
            swarm_size: Self::DEFAULT_SWARM_SIZE,
            dimension: lower.len(),
            c1: Self::DEFAULT_LEARNING_FACTOR,
            c2: Self::DEFAULT_LEARNING_FACTOR,
            max_evaluations: Self::DEFAULT_MAX_EVALUATIONS,
            lower,
            upper,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<(), PsoConfigError> {
        if self.swarm_size == 0 {
            return Err(PsoConfigError::EmptySwarm);
        }
        if self.dimension == 0 {
            return Err(PsoConfigError::ZeroDimension);
        }
        if self.lower.len() != self.dimension || self.upper.len() != self.dimension {
            return Err(PsoConfigError::BoundsLength {
                dimension: self.dimension,
                lower: self.lower.len(),
                upper: self.upper.len(),
            });
        }
        for (index, (&lower, &upper)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(lower.is_finite() && upper.is_finite() && lower < upper) {
                return Err(PsoConfigError::BadBound { index, lower, upper });
            }
        }
        let ok = |c: f64| c.is_finite() && c >= 0.0;
        if !(ok(self.c1) && ok(self.c2)) {
            return Err(PsoConfigError::BadLearningFactor {
                c1: self.c1,
                c2: self.c2,
            });
        }
        if self.max_evaluations < self.swarm_size {
            return Err(PsoConfigError::BudgetTooSmall {
                max: self.max_evaluations,
                swarm: self.swarm_size,
            });
        }
        Ok(())
    }

    pub fn rng(&self) -> SwarmRng {
        SwarmRng::seed_from_u64(self.rng_seed)
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub personal_best_position: Vec<f64>,
    pub personal_best_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub global_best_position: Vec<f64>,
    pub global_best_value: f64,
    pub evaluations_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoOutcome {
    pub best_position: Vec<f64>,
    pub best_value: f64,
    pub evaluations_used: usize,
    /// Global best after each generation, the initial one included.
    pub history: Vec<f64>,
}

/// Non-finite fitness values rank below every finite one.
fn sanitize(value: f64) -> f64 {
    if value.is_finite() {
        value
    } else {
        f64::INFINITY
    }
}

/// Whether `value` may replace an incumbent best of `best`.
fn improves(value: f64, best: f64) -> bool {
    value.is_finite() && value <= best
}

/// Random positions, zero velocities, one evaluation per particle.
pub fn init_swarm<F, R>(config: &PsoConfig, fitness: &F, rng: &mut R) -> SwarmState
where
    F: Fn(&[f64]) -> f64 + ?Sized,
    R: Rng + ?Sized,
{
    let mut particles = Vec::with_capacity(config.swarm_size);
    for _ in 0..config.swarm_size {
        let position: Vec<f64> = config
            .lower
            .iter()
            .zip(&config.upper)
            .map(|(&lo, &hi)| rng.gen_range(lo..=hi))
            .collect();
        particles.push(Particle {
            velocity: vec![0.0; config.dimension],
            personal_best_position: position.clone(),
            personal_best_value: f64::INFINITY,
            position,
        });
    }

    let mut state = SwarmState {
        global_best_position: particles[0].position.clone(),
        global_best_value: f64::INFINITY,
        particles,
        evaluations_used: 0,
    };
    for i in 0..state.particles.len() {
        evaluate(&mut state, i, fitness);
    }
    state
}

fn evaluate<F>(state: &mut SwarmState, i: usize, fitness: &F)
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let p = &mut state.particles[i];
    let value = sanitize(fitness(&p.position));
    state.evaluations_used += 1;
    if improves(value, p.personal_best_value) {
        p.personal_best_position.clone_from(&p.position);
        p.personal_best_value = value;
    }
    if improves(value, state.global_best_value) {
        state.global_best_position.clone_from(&p.position);
        state.global_best_value = value;
    }
}

/// One velocity/position update followed by bound repair.
#[allow(clippy::needless_range_loop)]
pub fn step_particle<R>(particle: &Particle, global_best: &[f64], config: &PsoConfig, rng: &mut R) -> Particle
where
    R: Rng + ?Sized,
{
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    let mut next = particle.clone();
    for j in 0..config.dimension {
        let x = particle.position[j];
        let mut v = particle.velocity[j]
            + config.c1 * u1 * (particle.personal_best_position[j] - x)
            + config.c2 * u2 * (global_best[j] - x);
        let mut moved = x + v;
        if moved > config.upper[j] {
            moved = config.upper[j];
            v = 0.0;
        } else if moved < config.lower[j] {
            moved = config.lower[j];
            v = 0.0;
        }
        next.position[j] = moved;
        next.velocity[j] = v;
    }
    next
}

/// Runs until the evaluation budget is spent.
///
/// # Panics
///
/// If `config` does not validate.
pub fn run<F>(config: &PsoConfig, fitness: &F) -> PsoOutcome
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    if let Err(e) = config.validate() {
        panic!("invalid PSO configuration: {e}");
    }
    let mut rng = config.rng();
    let mut state = init_swarm(config, fitness, &mut rng);
    let mut history = vec![state.global_best_value];

    while state.evaluations_used < config.max_evaluations {
        for i in 0..state.particles.len() {
            if state.evaluations_used >= config.max_evaluations {
                break;
            }
            let moved = step_particle(&state.particles[i], &state.global_best_position, config, &mut rng);
            state.particles[i] = moved;
            evaluate(&mut state, i, fitness);
        }
        history.push(state.global_best_value);
    }

    PsoOutcome {
        best_position: state.global_best_position,
        best_value: state.global_best_value,
        evaluations_used: state.evaluations_used,
        history,
    }
}
