use rayon::prelude::*;

use super::{evolve_with, vectorize, LindbladGenerator, Trajectory};
use crate::error::{DqlsError, Result};
use crate::linalg::{self, c, CMatrix};
use crate::tensor::DensityMatrix;

/// Generators applied cyclically, each for a duration `tau`.
///
/// At time `t` generator `⌊t/τ⌋ mod M` is active, so one cycle lasts `Mτ`
/// and generator 0 runs again at the start of every cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingSchedule {
    tau: f64,
    generators: Vec<LindbladGenerator>,
}

impl SwitchingSchedule {
    pub fn new(tau: f64, generators: Vec<LindbladGenerator>) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(DqlsError::InvalidSchedule(format!("switching interval {tau} must be non-negative")));
        }
        let first = generators
            .first()
            .ok_or_else(|| DqlsError::InvalidSchedule("schedule has no generators".into()))?;
        if generators.iter().any(|g| g.dim() != first.dim()) {
            return Err(DqlsError::InvalidSchedule("generators act on different spaces".into()));
        }
        Ok(SwitchingSchedule { tau, generators })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn generators(&self) -> &[LindbladGenerator] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn cycle_time(&self) -> f64 {
        self.tau * self.generators.len() as f64
    }

    /// Index of the generator active at time `t`.
    pub fn active_index(&self, t: f64) -> usize {
        if self.tau == 0.0 {
            return 0;
        }
        ((t / self.tau).floor() as usize) % self.generators.len()
    }
}

/// One-cycle map `exp(τ L̂_M) ⋯ exp(τ L̂_1)` on column-stacked states.
pub fn switched_map(schedule: &SwitchingSchedule, dim_cap: usize) -> Result<CMatrix> {
    let d = schedule.dim();
    if d > dim_cap {
        return Err(DqlsError::DimensionCap { dim: d, cap: dim_cap });
    }
    let tau = c(schedule.tau, 0.0);
    let steps: Vec<CMatrix> = schedule
        .generators
        .par_iter()
        .map(|g| linalg::expm(&(vectorize(g) * tau)))
        .collect();
    let mut total = linalg::identity(d * d);
    for step in &steps {
        total = step * total;
    }
    Ok(total)
}

/// Runs `cycles` full cycles from `rho0`, integrating each segment with the
/// same fixed-step scheme as [`super::evolve`].
///
/// The trajectory holds the initial state and the state at the end of every
/// segment.
pub fn simulate_switched(
    schedule: &SwitchingSchedule,
    rho0: &DensityMatrix,
    cycles: usize,
    dt: f64,
) -> Result<Trajectory> {
    if cycles == 0 {
        return Err(DqlsError::InvalidSchedule("at least one cycle is required".into()));
    }
    if rho0.space().total_dim() != schedule.dim() {
        return Err(DqlsError::DimensionMismatch(format!(
            "state of dimension {} for a schedule of dimension {}",
            rho0.space().total_dim(),
            schedule.dim()
        )));
    }
    let m = schedule.generators.len();
    let mut rho = rho0.matrix().clone();
    let mut traj = evolve_with(&schedule.generators[0], &rho, 0.0, 0.0, dt, 1)?;
    for segment in 0..cycles * m {
        let t0 = segment as f64 * schedule.tau;
        let gen = &schedule.generators[schedule.active_index(t0 + 0.5 * schedule.tau).min(m - 1)];
        let gen = if schedule.tau == 0.0 { &schedule.generators[segment % m] } else { gen };
        let piece = evolve_with(gen, &rho, t0, schedule.tau, dt, usize::MAX)?;
        rho = piece.final_state().clone();
        traj.extend_from(piece);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve;
    use crate::linalg::{ONE, ZERO};
    use crate::random;
    use crate::tensor::{PureState, TensorSpace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn damping(rate: f64) -> LindbladGenerator {
        let lowering = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]) * c(rate, 0.0);
        LindbladGenerator::new(TensorSpace::qubits(1).unwrap(), None, vec![lowering]).unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(SwitchingSchedule::new(-1.0, vec![damping(1.0)]).is_err());
        assert!(SwitchingSchedule::new(1.0, vec![]).is_err());
        let other = LindbladGenerator::new(TensorSpace::qubits(2).unwrap(), None, vec![CMatrix::zeros(4, 4)]).unwrap();
        assert!(SwitchingSchedule::new(1.0, vec![damping(1.0), other]).is_err());
    }

    #[test]
    fn cyclic_index() {
        let s = SwitchingSchedule::new(0.5, vec![damping(1.0), damping(2.0), damping(3.0)]).unwrap();
        let seq: Vec<usize> = [0.0, 0.49, 0.5, 1.2, 1.5, 1.99, 2.0, 3.1].iter().map(|&t| s.active_index(t)).collect();
        assert_eq!(seq, vec![0, 0, 1, 2, 0, 0, 1, 0]);
    }

    #[test]
    fn single_generator_map_is_exponential() {
        let g = damping(1.0);
        let s = SwitchingSchedule::new(0.7, vec![g.clone()]).unwrap();
        let expect = linalg::expm(&(vectorize(&g) * c(0.7, 0.0)));
        assert!(linalg::max_abs(&(switched_map(&s, 64).unwrap() - expect)) < 1e-14);
    }

    #[test]
    fn zero_interval_is_identity() {
        let s = SwitchingSchedule::new(0.0, vec![damping(1.0), damping(2.0)]).unwrap();
        assert!(linalg::max_abs(&(switched_map(&s, 64).unwrap() - linalg::identity(4))) < 1e-15);
    }

    #[test]
    fn map_is_trace_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let space = TensorSpace::qubits(2).unwrap();
        let gens = (0..3)
            .map(|_| LindbladGenerator::new(space.clone(), None, vec![random::ginibre(4, 4, &mut rng)]).unwrap())
            .collect();
        let s = SwitchingSchedule::new(0.3, gens).unwrap();
        let map = switched_map(&s, 64).unwrap();
        for _ in 0..10 {
            let rho = random::random_density(&space, 4, &mut rng);
            let out = linalg::unstack(&(&map * linalg::stack(rho.matrix())), 4);
            assert!((linalg::trace(&out).re - 1.0).abs() < 1e-12);
            assert!(linalg::hermitian_deviation(&out) < 1e-12);
        }
    }

    #[test]
    fn single_generator_schedule_matches_plain_evolution() {
        let g = damping(1.3);
        let s = SwitchingSchedule::new(0.5, vec![g.clone()]).unwrap();
        let excited = PureState::basis(TensorSpace::qubits(1).unwrap(), 1).unwrap().density();
        let switched = simulate_switched(&s, &excited, 6, 0.01).unwrap();
        let plain = evolve(&g, &excited, 3.0, 0.01).unwrap();
        assert_eq!(switched.len(), 7);
        for (t, state) in switched.times.iter().zip(&switched.states) {
            let k = plain.times.iter().position(|s| (s - t).abs() < 1e-9).unwrap();
            assert!(linalg::max_abs(&(state - &plain.states[k])) < 1e-8);
        }
    }

    #[test]
    fn segments_use_cyclic_generators() {
        // Generator 0 does nothing to |1>, generator 1 damps it: the
        // population only moves during odd segments.
        let idle = LindbladGenerator::new(TensorSpace::qubits(1).unwrap(), None, vec![CMatrix::zeros(2, 2)]).unwrap();
        let s = SwitchingSchedule::new(1.0, vec![idle, damping(1.0)]).unwrap();
        let excited = PureState::basis(TensorSpace::qubits(1).unwrap(), 1).unwrap().density();
        let traj = simulate_switched(&s, &excited, 2, 0.01).unwrap();
        let p1: Vec<f64> = traj.states.iter().map(|r| r[(1, 1)].re).collect();
        assert!((p1[1] - 1.0).abs() < 1e-12);
        assert!((p1[2] - (-1f64).exp()).abs() < 1e-8);
        assert!((p1[3] - p1[2]).abs() < 1e-12);
        assert!((p1[4] - (-2f64).exp()).abs() < 1e-8);
    }
}
