//! The three dual-space ODE systems and a fixed-step RK4 integrator.
//!
//! ```text
//! MD:   ż = γ U(C_ε(z))
//! DMD:  ż = γ (−z + U(C_ε(z)))
//! AC:   ż = γ U(x),   ẋ = r (C_ε(z) − x)
//! ```
//!
//! For MD/DMD the primal strategy is read out as `x = C_ε(z)`; AC carries a
//! separate primal state that low-pass filters the mirror-map output, and
//! its pseudo-gradient is evaluated at that primal state.

use crate::error::{Error, Result};
use crate::games::Game;
use crate::geometry::MirrorSpec;
use crate::scalar::{norm_inf, Scalar};

/// Aborting threshold on `‖z‖∞`; undiscounted dynamics legitimately spiral
/// out in hypo-monotone games and must fail loudly.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicsKind {
    Md,
    Dmd,
    Ac,
}

/// Dynamics selector with gain `γ` and, for AC, the primal filter rate `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsSpec<T> {
    kind: DynamicsKind,
    gamma: T,
    r: Option<T>,
}

impl<T: Scalar> DynamicsSpec<T> {
    pub fn md(gamma: T) -> Result<Self> {
        Self::new(DynamicsKind::Md, gamma, None)
    }

    pub fn dmd(gamma: T) -> Result<Self> {
        Self::new(DynamicsKind::Dmd, gamma, None)
    }

    pub fn ac(gamma: T, r: T) -> Result<Self> {
        Self::new(DynamicsKind::Ac, gamma, Some(r))
    }

    pub fn new(kind: DynamicsKind, gamma: T, r: Option<T>) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
        match (kind, r) {
            (DynamicsKind::Ac, Some(r)) if r > T::zero() => {}
            (DynamicsKind::Ac, _) => {
                return Err(Error::InvalidParameter("AC requires r > 0".into()));
            }
            (_, Some(_)) => {
                return Err(Error::InvalidParameter("r is only meaningful for AC".into()));
            }
            (_, None) => {}
        }
        Ok(Self { kind, gamma, r })
    }

    pub fn kind(&self) -> DynamicsKind {
        self.kind
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn r(&self) -> Option<T> {
        self.r
    }

    /// State dimension: `n` for MD/DMD, `2n` for AC (dual then primal).
    pub fn state_dim(&self, n: usize) -> usize {
        match self.kind {
            DynamicsKind::Ac => 2 * n,
            _ => n,
        }
    }
}

/// Fixed-step integration setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub dt: T,
    pub t_end: T,
    pub sample_every: usize,
}

impl<T: Scalar> IntegratorConfig<T> {
    pub fn new(dt: T, t_end: T, sample_every: usize) -> Result<Self> {
        if !(dt > T::zero()) || !(t_end > T::zero()) || dt > t_end {
            return Err(Error::InvalidParameter(format!(
                "need 0 < dt <= t_end, got dt = {dt}, t_end = {t_end}"
            )));
        }
        if sample_every == 0 {
            return Err(Error::InvalidParameter("sample_every must be at least 1".into()));
        }
        Ok(Self { dt, t_end, sample_every })
    }
}

/// Sampled trajectory. `x_samples[k] = C_ε(z_samples[k])` always; for AC the
/// filtered primal state is recorded separately in `primal_samples`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub z_samples: Vec<Vec<T>>,
    pub x_samples: Vec<Vec<T>>,
    pub primal_samples: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The strategy samples the rate bounds are measured on: the filtered
    /// primal state for AC, the mirror-map output otherwise.
    pub fn strategy_samples(&self) -> &[Vec<T>] {
        self.primal_samples.as_deref().unwrap_or(&self.x_samples)
    }

    pub fn final_x(&self) -> &[T] {
        self.strategy_samples().last().expect("non-empty trajectory")
    }

    pub fn final_z(&self) -> &[T] {
        self.z_samples.last().expect("non-empty trajectory")
    }
}

/// Right-hand side of the selected dynamics at `state`.
///
/// State layout: `z` for MD/DMD; `[z, x]` for AC.
pub fn vector_field<T: Scalar>(
    dspec: &DynamicsSpec<T>,
    game: &Game<T>,
    mspec: &MirrorSpec<T>,
    state: &[T],
) -> Result<Vec<T>> {
    vector_field_at(dspec, game, mspec, state, T::zero())
}

fn vector_field_at<T: Scalar>(
    dspec: &DynamicsSpec<T>,
    game: &Game<T>,
    mspec: &MirrorSpec<T>,
    state: &[T],
    t: T,
) -> Result<Vec<T>> {
    let n = game.dim();
    if state.len() != dspec.state_dim(n) {
        return Err(Error::DimensionMismatch {
            expected: dspec.state_dim(n),
            actual: state.len(),
        });
    }
    for (i, v) in state.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteState { index: i, t: t.as_f64() });
        }
    }
    let gamma = dspec.gamma();
    match dspec.kind() {
        DynamicsKind::Md => {
            let x = mspec.mirror_map(state)?;
            let u = game.pseudo_gradient(&x)?;
            Ok(u.into_iter().map(|v| gamma * v).collect())
        }
        DynamicsKind::Dmd => {
            let x = mspec.mirror_map(state)?;
            let u = game.pseudo_gradient(&x)?;
            Ok(state
                .iter()
                .zip(u)
                .map(|(&z, v)| gamma * (v - z))
                .collect())
        }
        DynamicsKind::Ac => {
            let r = dspec.r().expect("validated at construction");
            let (z, x) = state.split_at(n);
            let u = game.pseudo_gradient(x)?;
            let c = mspec.mirror_map(z)?;
            let mut out: Vec<T> = u.into_iter().map(|v| gamma * v).collect();
            out.extend(c.iter().zip(x).map(|(&ci, &xi)| r * (ci - xi)));
            Ok(out)
        }
    }
}

/// Integrates the dynamics with classical fixed-step RK4.
///
/// `x0` supplies AC's initial primal state and defaults to `C_ε(z0)`; it is
/// rejected for MD/DMD. Samples are recorded every `sample_every` steps plus
/// the final time. Deterministic: identical inputs give identical output.
pub fn integrate<T: Scalar>(
    dspec: &DynamicsSpec<T>,
    game: &Game<T>,
    mspec: &MirrorSpec<T>,
    z0: &[T],
    x0: Option<&[T]>,
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    let n = game.dim();
    if z0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: z0.len() });
    }
    let mut state = z0.to_vec();
    match (dspec.kind(), x0) {
        (DynamicsKind::Ac, Some(x0)) => {
            if x0.len() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: x0.len() });
            }
            state.extend_from_slice(x0);
        }
        (DynamicsKind::Ac, None) => {
            state.extend(mspec.mirror_map(z0)?);
        }
        (_, Some(_)) => {
            return Err(Error::InvalidParameter(
                "x0 is only meaningful for AC dynamics".into(),
            ));
        }
        (_, None) => {}
    }

    let steps = (cfg.t_end / cfg.dt).round().to_usize().unwrap_or(0).max(1);
    let dt = cfg.t_end / T::from_usize(steps).unwrap();
    let half = dt / T::lit(2.0);
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);

    let mut traj = Trajectory {
        times: Vec::new(),
        z_samples: Vec::new(),
        x_samples: Vec::new(),
        primal_samples: if dspec.kind() == DynamicsKind::Ac { Some(Vec::new()) } else { None },
    };
    let record = |traj: &mut Trajectory<T>, t: T, state: &[T]| -> Result<()> {
        let z = &state[0..n];
        traj.times.push(t);
        traj.z_samples.push(z.to_vec());
        traj.x_samples.push(mspec.mirror_map(z)?);
        if let Some(prim) = traj.primal_samples.as_mut() {
            prim.push(state[n..].to_vec());
        }
        Ok(())
    };
    record(&mut traj, T::zero(), &state)?;

    let limit = T::lit(DIVERGENCE_LIMIT);
    for k in 0..steps {
        let t = dt * T::from_usize(k).unwrap();
        let k1 = vector_field_at(dspec, game, mspec, &state, t)?;
        let s2: Vec<T> = state.iter().zip(&k1).map(|(&s, &d)| s + half * d).collect();
        let k2 = vector_field_at(dspec, game, mspec, &s2, t + half)?;
        let s3: Vec<T> = state.iter().zip(&k2).map(|(&s, &d)| s + half * d).collect();
        let k3 = vector_field_at(dspec, game, mspec, &s3, t + half)?;
        let s4: Vec<T> = state.iter().zip(&k3).map(|(&s, &d)| s + dt * d).collect();
        let k4 = vector_field_at(dspec, game, mspec, &s4, t + dt)?;
        for i in 0..state.len() {
            state[i] = state[i] + sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
        }
        let t_next = dt * T::from_usize(k + 1).unwrap();
        let z_norm = norm_inf(&state[0..n]);
        if z_norm > limit {
            return Err(Error::Divergence { t: t_next.as_f64(), max_abs: z_norm.as_f64() });
        }
        if (k + 1) % cfg.sample_every == 0 || k + 1 == steps {
            record(&mut traj, t_next, &state)?;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{build_rps, network_mp_instance, Game};
    use crate::geometry::{Domain, RegularizerKind};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn entropy_spec(dim: usize, blocks: usize, eps: f64) -> MirrorSpec<f64> {
        MirrorSpec::uniform(RegularizerKind::NegativeEntropy { dim }, blocks, eps).unwrap()
    }

    /// Game with a constant pseudo-gradient, for closed-form checks.
    fn constant_game(c: Vec<f64>) -> Game<f64> {
        let n = c.len();
        Game::new(
            vec![Domain::Simplex { dim: n }],
            Arc::new(move |_: &[f64]| Ok(c.clone())),
            None,
        )
        .unwrap()
    }

    #[test]
    fn md_rest_point_has_zero_velocity() {
        // Network MP: U(uniform) = 0 and C(0) = uniform, so z⋆ = 0 rests.
        let game = network_mp_instance::<f64>();
        let mspec = entropy_spec(2, 3, 1.0);
        let dspec = DynamicsSpec::md(1.0).unwrap();
        let dz = vector_field(&dspec, &game, &mspec, &[0.0; 6]).unwrap();
        for v in dz {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn dmd_rest_point_condition() {
        // z = U(C(z)) ⇒ ż = 0. For MP, z = 0 qualifies.
        let game = network_mp_instance::<f64>();
        let mspec = entropy_spec(2, 3, 1.0);
        let dspec = DynamicsSpec::dmd(1.0).unwrap();
        let dz = vector_field(&dspec, &game, &mspec, &[0.0; 6]).unwrap();
        for v in dz {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn ac_primal_velocity_vanishes_when_filtered_state_matches_mirror() {
        let game = network_mp_instance::<f64>();
        let mspec = entropy_spec(2, 3, 1.0);
        let dspec = DynamicsSpec::ac(1.0, 5.0).unwrap();
        let z = [0.3, -0.2, 0.1, 0.0, 0.5, -0.5];
        let x = mspec.mirror_map(&z).unwrap();
        let mut state = z.to_vec();
        state.extend_from_slice(&x);
        let d = vector_field(&dspec, &game, &mspec, &state).unwrap();
        let u = game.pseudo_gradient(&x).unwrap();
        for i in 0..6 {
            assert_abs_diff_eq!(d[i], u[i], epsilon = 1e-14); // ż = γU(x), γ = 1
            assert_abs_diff_eq!(d[6 + i], 0.0, epsilon = 1e-14); // ẋ = 0
        }
    }

    #[test]
    fn vector_field_reports_first_non_finite_index() {
        let game = network_mp_instance::<f64>();
        let mspec = entropy_spec(2, 3, 1.0);
        let dspec = DynamicsSpec::md(1.0).unwrap();
        let state = [0.0, 0.0, f64::NAN, 0.0, 0.0, 0.0];
        assert!(matches!(
            vector_field(&dspec, &game, &mspec, &state),
            Err(Error::NonFiniteState { index: 2, .. })
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(DynamicsSpec::md(0.0).is_err());
        assert!(DynamicsSpec::ac(1.0, 0.0).is_err());
        assert!(DynamicsSpec::new(DynamicsKind::Md, 1.0, Some(2.0)).is_err());
        assert!(IntegratorConfig::new(2.0, 1.0, 1).is_err());
        assert!(IntegratorConfig::new(0.1, 1.0, 0).is_err());
    }

    #[test]
    fn dmd_exponential_memory_closed_form() {
        // With U ≡ c, z(t) = e^{−γt} z0 + (1 − e^{−γt}) c.
        let c = vec![0.7, -0.3, 0.1];
        let game = constant_game(c.clone());
        let mspec = entropy_spec(3, 1, 1.0);
        let gamma = 1.3;
        let dspec = DynamicsSpec::dmd(gamma).unwrap();
        let z0 = [2.0, -1.0, 0.5];
        let cfg = IntegratorConfig::new(1e-3, 2.0, 100).unwrap();
        let traj = integrate(&dspec, &game, &mspec, &z0, None, &cfg).unwrap();
        for (k, t) in traj.times.iter().enumerate() {
            let decay = (-gamma * t).exp();
            for i in 0..3 {
                let expected = decay * z0[i] + (1.0 - decay) * c[i];
                assert!((traj.z_samples[k][i] - expected).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn sampled_strategies_are_feasible_and_interior() {
        let game = build_rps(1.0, 5.0).unwrap();
        let mspec = entropy_spec(3, 2, 2.1);
        let dspec = DynamicsSpec::dmd(1.0).unwrap();
        let z0 = [1.0, 2.0, 3.0, 1.0, 2.0, 3.0];
        let cfg = IntegratorConfig::new(1e-2, 10.0, 10).unwrap();
        let traj = integrate(&dspec, &game, &mspec, &z0, None, &cfg).unwrap();
        for x in &traj.x_samples {
            let s1: f64 = x[0..3].iter().sum();
            let s2: f64 = x[3..6].iter().sum();
            assert_abs_diff_eq!(s1, 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(s2, 1.0, epsilon = 1e-9);
            assert!(x.iter().all(|&v| v > 0.0)); // steep map keeps interior
        }
    }

    #[test]
    fn rest_point_stationarity_over_time() {
        let game = network_mp_instance::<f64>();
        let mspec = entropy_spec(2, 3, 1.0);
        let dspec = DynamicsSpec::md(1.0).unwrap();
        let cfg = IntegratorConfig::new(1e-2, 10.0, 100).unwrap();
        let traj = integrate(&dspec, &game, &mspec, &[0.0; 6], None, &cfg).unwrap();
        let x0 = &traj.x_samples[0];
        let xt = traj.final_x();
        for i in 0..6 {
            assert!((xt[i] - x0[i]).abs() <= 1e-8);
        }
    }

    #[test]
    fn integration_is_deterministic() {
        let game = build_rps(1.0, 5.0).unwrap();
        let mspec = entropy_spec(3, 2, 2.1);
        let dspec = DynamicsSpec::dmd(1.0).unwrap();
        let z0 = [1.0, 2.0, 3.0, 0.5, 0.1, -0.3];
        let cfg = IntegratorConfig::new(1e-2, 5.0, 7).unwrap();
        let a = integrate(&dspec, &game, &mspec, &z0, None, &cfg).unwrap();
        let b = integrate(&dspec, &game, &mspec, &z0, None, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn divergence_guard_trips_on_unstable_md() {
        // MD on a game with U(x) = +x grows exponentially; the guard must
        // abort rather than run forever.
        let game = Game::new(
            vec![Domain::Box { lo: vec![-1.0], hi: vec![1.0] }],
            Arc::new(|z: &[f64]| Ok(vec![z[0].max(1.0) * 2.0])),
            None,
        )
        .unwrap();
        let mspec = MirrorSpec::new(
            vec![RegularizerKind::SquaredEuclidean(Domain::Box { lo: vec![-1.0], hi: vec![1.0] })],
            1.0,
        )
        .unwrap();
        let dspec = DynamicsSpec::md(1e8).unwrap();
        let cfg = IntegratorConfig::new(1.0, 1e5, 1000).unwrap();
        let out = integrate(&dspec, &game, &mspec, &[1.0], None, &cfg);
        assert!(matches!(out, Err(Error::Divergence { .. })));
    }

    #[test]
    fn richardson_order_estimate_on_dmd_rps() {
        // Step halving: observed order ≥ 3.8 for RK4.
        let game = build_rps(1.0, 5.0).unwrap();
        let mspec = entropy_spec(3, 2, 2.1);
        let dspec = DynamicsSpec::dmd(1.0).unwrap();
        let z0 = [1.0, 2.0, 3.0, 1.0, 2.0, 3.0];
        let run = |dt: f64| {
            let cfg = IntegratorConfig::new(dt, 5.0, usize::MAX).unwrap();
            integrate(&dspec, &game, &mspec, &z0, None, &cfg)
                .unwrap()
                .final_z()
                .to_vec()
        };
        let coarse = run(1e-2);
        let mid = run(5e-3);
        let fine = run(2.5e-3);
        let d1: f64 = coarse.iter().zip(&mid).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let d2: f64 = mid.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let order = (d1 / d2).log2();
        assert!(order >= 3.8, "observed order {order}");
    }

    #[test]
    fn ac_default_primal_state_is_mirror_of_z0() {
        let game = network_mp_instance::<f64>();
        let mspec = entropy_spec(2, 3, 1.0);
        let dspec = DynamicsSpec::ac(1.0, 2.0).unwrap();
        let z0 = [0.5, -0.5, 0.2, 0.1, 0.0, -0.1];
        let cfg = IntegratorConfig::new(1e-2, 0.5, 10).unwrap();
        let traj = integrate(&dspec, &game, &mspec, &z0, None, &cfg).unwrap();
        let prim = traj.primal_samples.as_ref().unwrap();
        let c0 = mspec.mirror_map(&z0).unwrap();
        assert_eq!(prim[0], c0);
    }
}
