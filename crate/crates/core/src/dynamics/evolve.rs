use super::LindbladGenerator;
use crate::error::{DqlsError, Result};
use crate::linalg::{self, c, CMatrix, ONE};
use crate::tensor::DensityMatrix;

/// Abort threshold on `|tr ρ - 1|`.
const TRACE_ABORT: f64 = 1e-6;
/// Abort threshold on the Hermiticity defect of a snapshot.
const HERMITIAN_ABORT: f64 = 1e-7;
/// Abort threshold on `||ρ||_F - 1`. Trace and Hermiticity are preserved
/// exactly by the linear update, so an unstable step only shows up here.
const NORM_ABORT: f64 = 1e-6;

/// Time-stamped snapshots of an integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
    pub max_trace_drift: f64,
    pub max_hermitian_defect: f64,
}

impl Trajectory {
    fn start(t0: f64, rho: CMatrix) -> Self {
        Trajectory { times: vec![t0], states: vec![rho], max_trace_drift: 0.0, max_hermitian_defect: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &CMatrix {
        self.states.last().expect("trajectories hold at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectories hold at least the initial state")
    }

    pub(crate) fn push(&mut self, t: f64, rho: CMatrix) {
        self.times.push(t);
        self.states.push(rho);
    }

    /// Appends `other` minus its initial snapshot, which must coincide with
    /// this trajectory's last one.
    pub(crate) fn extend_from(&mut self, other: Trajectory) {
        self.max_trace_drift = self.max_trace_drift.max(other.max_trace_drift);
        self.max_hermitian_defect = self.max_hermitian_defect.max(other.max_hermitian_defect);
        for (t, s) in other.times.into_iter().zip(other.states).skip(1) {
            self.push(t, s);
        }
    }
}

/// `min(0.01, 0.1 / ||L̂||)` with the norm replaced by a cheap upper bound.
pub fn default_dt(gen: &LindbladGenerator) -> f64 {
    let bound = gen.norm_bound();
    if bound > 0.0 {
        (0.1 / bound).min(0.01)
    } else {
        0.01
    }
}

/// Fixed-step classical Runge-Kutta integration of `dρ/dt = L(ρ)`, keeping
/// every step.
pub fn evolve(gen: &LindbladGenerator, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<Trajectory> {
    evolve_with(gen, rho0.matrix(), 0.0, t_final, dt, 1)
}

/// Integrates from `t0` to `t0 + duration`, keeping every `stride`-th step
/// and always the last one.
///
/// States are never renormalized; a trace drift above 1e-6, a Hermiticity
/// defect above 1e-7 or a Frobenius norm above `1 + 1e-6` aborts with
/// [`DqlsError::IntegratorDrift`].
pub fn evolve_with(
    gen: &LindbladGenerator,
    rho0: &CMatrix,
    t0: f64,
    duration: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DqlsError::InvalidArgument(format!("time step {dt} must be positive")));
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(DqlsError::InvalidArgument(format!("duration {duration} must be non-negative")));
    }
    let d = gen.dim();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(DqlsError::DimensionMismatch(format!(
            "{}x{} state for a generator of dimension {d}",
            rho0.nrows(),
            rho0.ncols()
        )));
    }
    let stride = stride.max(1);
    let ratio = duration / dt;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 { ratio.round() as usize } else { ratio.ceil() as usize };

    let mut traj = Trajectory::start(t0, rho0.clone());
    let mut rho = rho0.clone();
    let half = c(0.5, 0.0);
    for step in 0..steps {
        let t_prev = t0 + step as f64 * dt;
        let t_next = if step + 1 == steps { t0 + duration } else { t0 + (step + 1) as f64 * dt };
        let h = t_next - t_prev;
        let hc = c(h, 0.0);
        let k1 = gen.apply(&rho);
        let k2 = gen.apply(&(&rho + &k1 * (hc * half)));
        let k3 = gen.apply(&(&rho + &k2 * (hc * half)));
        let k4 = gen.apply(&(&rho + &k3 * hc));
        rho += (k1 + (k2 + k3) * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);

        let drift = (linalg::trace(&rho) - ONE).norm();
        let defect = linalg::hermitian_deviation(&rho);
        traj.max_trace_drift = traj.max_trace_drift.max(drift);
        traj.max_hermitian_defect = traj.max_hermitian_defect.max(defect);
        if !drift.is_finite() || drift > TRACE_ABORT {
            return Err(DqlsError::IntegratorDrift { t: t_next, dt, reason: format!("trace drifted by {drift:.3e}") });
        }
        if defect > HERMITIAN_ABORT {
            return Err(DqlsError::IntegratorDrift {
                t: t_next,
                dt,
                reason: format!("Hermiticity defect {defect:.3e}"),
            });
        }
        let norm = linalg::frobenius(&rho);
        if norm > 1.0 + NORM_ABORT {
            return Err(DqlsError::IntegratorDrift {
                t: t_next,
                dt,
                reason: format!("state norm grew to {norm:.3e}, the step is outside the stability region"),
            });
        }
        if (step + 1) % stride == 0 || step + 1 == steps {
            traj.push(t_next, rho.clone());
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::random;
    use crate::synthesis::{synthesize_stabilizers, GainsPolicy};
    use crate::tensor::{make_psi_t, LocalityPattern, PureState, TensorSpace};
    use crate::tol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn damping() -> LindbladGenerator {
        let lowering = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        LindbladGenerator::new(TensorSpace::qubits(1).unwrap(), None, vec![lowering]).unwrap()
    }

    #[test]
    fn amplitude_damping_closed_form() {
        let gen = damping();
        let excited = PureState::basis(TensorSpace::qubits(1).unwrap(), 1).unwrap().density();
        let traj = evolve(&gen, &excited, 2.0, 0.01).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let k = traj.times.iter().position(|&s| (s - t).abs() < 1e-9).unwrap();
            let p0 = traj.states[k][(0, 0)].re;
            assert!((p0 - (1.0 - (-t).exp())).abs() < 1e-6);
        }
        assert!(traj.max_trace_drift < 1e-7);
        assert!(traj.max_hermitian_defect < 1e-7);
    }

    #[test]
    fn zero_duration_keeps_only_initial_state() {
        let gen = damping();
        let rho = DensityMatrix::maximally_mixed(TensorSpace::qubits(1).unwrap());
        let traj = evolve(&gen, &rho, 0.0, 0.01).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.final_state(), rho.matrix());
    }

    #[test]
    fn partial_final_step_lands_on_t_final() {
        let gen = damping();
        let rho = DensityMatrix::maximally_mixed(TensorSpace::qubits(1).unwrap());
        let traj = evolve(&gen, &rho, 0.025, 0.01).unwrap();
        assert_eq!(traj.len(), 4);
        assert!((traj.final_time() - 0.025).abs() < 1e-15);
    }

    #[test]
    fn invalid_step_rejected() {
        let gen = damping();
        let rho = DensityMatrix::maximally_mixed(TensorSpace::qubits(1).unwrap());
        assert!(evolve(&gen, &rho, 1.0, 0.0).is_err());
        assert!(evolve(&gen, &rho, -1.0, 0.1).is_err());
    }

    #[test]
    fn huge_step_aborts_with_diagnostic() {
        let gen = damping();
        let excited = PureState::basis(TensorSpace::qubits(1).unwrap(), 1).unwrap().density();
        // Step size far outside the stability region.
        let big = LindbladGenerator::new(
            TensorSpace::qubits(1).unwrap(),
            None,
            vec![gen.noise_ops()[0].clone() * c(1e4, 0.0)],
        )
        .unwrap();
        match evolve(&big, &excited, 1.0, 0.5) {
            Err(DqlsError::IntegratorDrift { .. }) => {}
            other => panic!("expected drift abort, got {other:?}"),
        }
    }

    #[test]
    fn unstable_step_with_exact_trace_aborts() {
        // Trace and Hermiticity stay exact here; only the norm guard fires.
        let t = make_psi_t().unwrap();
        let p = LocalityPattern::from_indices(t.space().clone(), &[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let set = synthesize_stabilizers(&t, &p, &GainsPolicy::Uniform, tol::SUPPORT, false).unwrap();
        let gen = set.generator(t.space()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random::haar_state(t.space(), &mut rng).density();
        match evolve(&gen, &rho, 10.0, 5.0) {
            Err(DqlsError::IntegratorDrift { reason, .. }) => assert!(reason.contains("norm"), "{reason}"),
            other => panic!("expected drift abort, got {other:?}"),
        }
    }

    #[test]
    fn target_is_stationary_under_its_stabilizers() {
        let t = make_psi_t().unwrap();
        let p = LocalityPattern::from_indices(t.space().clone(), &[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let set = synthesize_stabilizers(&t, &p, &GainsPolicy::Uniform, tol::SUPPORT, false).unwrap();
        let gen = set.generator(t.space()).unwrap();
        let traj = evolve(&gen, &t.density(), 5.0, 0.01).unwrap();
        let start = t.projector();
        let worst = traj.states.iter().map(|s| linalg::max_abs(&(s - &start))).fold(0.0, f64::max);
        assert!(worst < 1e-8);
    }

    #[test]
    fn default_step_is_capped() {
        assert_eq!(default_dt(&damping()), 0.01);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let big = LindbladGenerator::new(
            TensorSpace::qubits(1).unwrap(),
            None,
            vec![random::ginibre(2, 2, &mut rng) * c(50.0, 0.0)],
        )
        .unwrap();
        assert!(default_dt(&big) < 0.01);
    }
}
