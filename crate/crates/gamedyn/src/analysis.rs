//! Equilibrium solvers, Lyapunov observables and exponential rate bounds.
//!
//! The rate results all take the form of an envelope `C₀ e^{−βt}` on a
//! distance-to-target metric along the trajectory:
//!
//! ```text
//! MD  (η-relatively strongly monotone):  β = γη/ε,        D_h(x⋆, x) ≤ e^{−βt} D_h(x⋆, x₀)
//! DMD (μ-relatively hypo-monotone):      β = γ(ε − μ)/ε,  D_h(x̄, x) ≤ e^{−βt} D_h(x̄, x₀)
//! AC  (η-relatively strongly concave P): β = γη/ε,        P(x⋆) − P(x) ≤ e^{−βt} (gap₀ + rεγ⁻¹ D_h(x⋆, x₀))
//! ```
//!
//! with Euclidean companions scaled by `2/ρ` (ρ the regularizer's
//! strong-convexity modulus). Envelopes hold from `t = 0` when the mirror
//! map is steep and the trajectory stays in the relative interior;
//! otherwise they hold asymptotically and are checked from a supplied
//! onset time.

use crate::error::{Error, Result};
use crate::games::{Game, StrategyProfile};
use crate::geometry::{MirrorSpec, RegularizerKind};
use crate::scalar::{norm2, norm_inf, Scalar};

/// What a [`RateBound`] envelope is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// `D_h(target, x(t))` — the MD/DMD orientation.
    BregmanToTarget,
    /// `D_h(x(t), target)` — the AC orientation.
    BregmanFromTarget,
    /// `‖target − x(t)‖₂²`.
    EuclidSqToTarget,
    /// `P(target) − P(x(t))`; requires the game to carry a potential.
    PotentialGap,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::BregmanToTarget => "bregman_to_target",
            Metric::BregmanFromTarget => "bregman_from_target",
            Metric::EuclidSqToTarget => "euclid_sq_to_target",
            Metric::PotentialGap => "potential_gap",
        }
    }
}

/// Envelope validity mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Validity<T> {
    /// Checked at every sample from `t = 0` (steep mirror maps).
    AllT,
    /// Checked only for `t ≥ t_min` (non-steep mirror maps, boundary
    /// transients).
    Asymptotic { t_min: T },
}

/// Exponential envelope `C₀ e^{−βt}` on `metric` relative to `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBound<T> {
    pub beta: T,
    pub c0: T,
    pub metric: Metric,
    pub target: StrategyProfile<T>,
    pub validity: Validity<T>,
}

impl<T: Scalar> RateBound<T> {
    pub fn new(
        beta: T,
        c0: T,
        metric: Metric,
        target: StrategyProfile<T>,
        validity: Validity<T>,
    ) -> Result<Self> {
        if !(beta >= T::zero()) {
            return Err(Error::InvalidParameter(format!("beta must be nonnegative, got {beta}")));
        }
        if !(c0 >= T::zero()) {
            return Err(Error::InvalidParameter(format!("C0 must be nonnegative, got {c0}")));
        }
        Ok(Self { beta, c0, metric, target, validity })
    }

    /// Envelope value at time `t`; `eval(0) = C₀`.
    pub fn eval(&self, t: T) -> T {
        self.c0 * (-self.beta * t).exp()
    }
}

/// One sample exceeding its envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<T> {
    pub t: T,
    pub measured: T,
    pub bound: T,
}

/// Result of checking a trajectory against a [`RateBound`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub checked_times: usize,
    pub violations: Vec<Violation<T>>,
    pub max_ratio: T,
    pub mode: Validity<T>,
}

impl<T: Scalar> BoundReport<T> {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// MD envelopes: Bregman bound `(β, C₀) = (γη/ε, D₀)` and Euclidean bound
/// `(γη/ε, 2D₀/ρ)`. `eta = 0` gives the degenerate constant envelope of the
/// null-monotone case.
pub fn md_rate_bound<T: Scalar>(
    gamma: T,
    eta: T,
    epsilon: T,
    d0: T,
    rho: T,
    target: StrategyProfile<T>,
    validity: Validity<T>,
) -> Result<(RateBound<T>, RateBound<T>)> {
    if !(gamma > T::zero()) || !(epsilon > T::zero()) || !(rho > T::zero()) {
        return Err(Error::InvalidParameter("gamma, epsilon, rho must be positive".into()));
    }
    if !(eta >= T::zero()) {
        return Err(Error::InvalidParameter(format!("eta must be nonnegative, got {eta}")));
    }
    let beta = gamma * eta / epsilon;
    let two = T::lit(2.0);
    Ok((
        RateBound::new(beta, d0, Metric::BregmanToTarget, target.clone(), validity)?,
        RateBound::new(beta, two * d0 / rho, Metric::EuclidSqToTarget, target, validity)?,
    ))
}

/// DMD envelopes with `β = γ(ε − μ)/ε`; requires `ε > μ`. A relatively
/// strongly monotone game passes `mu = −η` and gets `β > γ`.
pub fn dmd_rate_bound<T: Scalar>(
    gamma: T,
    mu: T,
    epsilon: T,
    d0: T,
    rho: T,
    target: StrategyProfile<T>,
    validity: Validity<T>,
) -> Result<(RateBound<T>, RateBound<T>)> {
    if !(gamma > T::zero()) || !(epsilon > T::zero()) || !(rho > T::zero()) {
        return Err(Error::InvalidParameter("gamma, epsilon, rho must be positive".into()));
    }
    if !(epsilon > mu) {
        return Err(Error::InvalidParameter(format!(
            "no convergence guarantee unless epsilon > mu (epsilon = {epsilon}, mu = {mu})"
        )));
    }
    let beta = gamma * (epsilon - mu) / epsilon;
    let two = T::lit(2.0);
    Ok((
        RateBound::new(beta, d0, Metric::BregmanToTarget, target.clone(), validity)?,
        RateBound::new(beta, two * d0 / rho, Metric::EuclidSqToTarget, target, validity)?,
    ))
}

/// AC envelopes: potential-gap bound `(γη/ε, gap₀ + rεγ⁻¹D₀)`, Bregman
/// bound with `C₀/η`, Euclidean bound with `2C₀/(ρη)`; requires
/// `ε > ηγ/r`.
#[allow(clippy::too_many_arguments)]
pub fn ac_rate_bound<T: Scalar>(
    gamma: T,
    eta: T,
    epsilon: T,
    r: T,
    potential_gap0: T,
    d0: T,
    rho: T,
    target: StrategyProfile<T>,
    validity: Validity<T>,
) -> Result<(RateBound<T>, RateBound<T>, RateBound<T>)> {
    if !(gamma > T::zero()) || !(eta > T::zero()) || !(epsilon > T::zero()) || !(r > T::zero())
        || !(rho > T::zero())
    {
        return Err(Error::InvalidParameter("gamma, eta, epsilon, r, rho must be positive".into()));
    }
    if !(epsilon > eta * gamma / r) {
        return Err(Error::InvalidParameter(format!(
            "AC requires epsilon > eta*gamma/r ({epsilon} <= {})",
            eta * gamma / r
        )));
    }
    let beta = gamma * eta / epsilon;
    let c0 = potential_gap0 + r * epsilon / gamma * d0;
    let two = T::lit(2.0);
    Ok((
        RateBound::new(beta, c0, Metric::PotentialGap, target.clone(), validity)?,
        RateBound::new(beta, c0 / eta, Metric::BregmanFromTarget, target.clone(), validity)?,
        RateBound::new(beta, two * c0 / (rho * eta), Metric::EuclidSqToTarget, target, validity)?,
    ))
}

/// Converts a standard modulus to its relative counterpart: `η/ℓ` for
/// strong monotonicity against an `ℓ`-smooth reference, `μ/ρ` for
/// hypo-monotonicity against a `ρ`-strongly convex reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelativeConversion<T> {
    StrongMonotone { ell_smooth: T },
    HypoMonotone { rho_strong_convexity: T },
}

pub fn convert_relative<T: Scalar>(constant: T, kind: RelativeConversion<T>) -> Result<T> {
    match kind {
        RelativeConversion::StrongMonotone { ell_smooth } => {
            if !(ell_smooth > T::zero()) {
                return Err(Error::InvalidParameter("smoothness modulus must be positive".into()));
            }
            Ok(constant / ell_smooth)
        }
        RelativeConversion::HypoMonotone { rho_strong_convexity } => {
            if !(rho_strong_convexity > T::zero()) {
                return Err(Error::InvalidParameter(
                    "strong-convexity modulus must be positive".into(),
                ));
            }
            Ok(constant / rho_strong_convexity)
        }
    }
}

/// The MD Lyapunov observable `V_z = γ⁻¹ Σ_p D_{ψ_ε⋆}(zᵖ, z_targetᵖ)`.
///
/// By conjugate duality it equals `γ⁻¹ D_{ψ_ε}(x_target, x)` with
/// `x = C_ε(z)`, `x_target = C_ε(z_target)`. Constant along MD in null
/// monotone games, nonincreasing in relatively strongly monotone ones.
pub fn lyapunov_md<T: Scalar>(
    mspec: &MirrorSpec<T>,
    gamma: T,
    z: &[T],
    z_target: &[T],
) -> Result<T> {
    Ok(mspec.dual_bregman(z, z_target)? / gamma)
}

/// Measures a [`Metric`] between a strategy sample `x` and `target`.
/// Bregman metrics use the (unscaled) reference `h = Σ ϑᵖ` assembled from
/// `reg_for_metric`; the potential gap requires `game` to carry a potential.
pub fn metric_value<T: Scalar>(
    metric: Metric,
    target: &[T],
    x: &[T],
    reg_for_metric: &[RegularizerKind<T>],
    game: &Game<T>,
) -> Result<T> {
    match metric {
        Metric::EuclidSqToTarget => {
            let d: T = target.iter().zip(x).map(|(&a, &b)| (a - b) * (a - b)).sum();
            Ok(d)
        }
        Metric::BregmanToTarget | Metric::BregmanFromTarget => {
            let spec = MirrorSpec::new(reg_for_metric.to_vec(), T::one())?;
            match metric {
                Metric::BregmanToTarget => spec.bregman_h(target, x),
                _ => spec.bregman_h(x, target),
            }
        }
        Metric::PotentialGap => {
            let p_target = game
                .potential(target)
                .ok_or_else(|| Error::MetricMismatch("potential_gap metric needs a potential".into()))??;
            let p_x = game.potential(x).expect("checked above")?;
            Ok(p_target - p_x)
        }
    }
}

/// The per-sample envelope values (without slack) used by [`verify_bound`].
///
/// In `AllT` mode this is `C₀ e^{−βt}` everywhere. In `Asymptotic` mode the
/// envelope re-anchors at the first sample with `t ≥ t_min` — the claim
/// being verified is exponential decay at rate `β` from the onset onwards,
/// `m(t) ≤ m(t_anchor) e^{−β(t − t_anchor)}`; samples before the onset keep
/// the nominal `C₀ e^{−βt}` curve for display but are not checked.
pub fn envelope_series<T: Scalar>(
    traj: &crate::dynamics::Trajectory<T>,
    bound: &RateBound<T>,
    game: &Game<T>,
    reg_for_metric: &[RegularizerKind<T>],
) -> Result<Vec<T>> {
    let anchor = match bound.validity {
        Validity::AllT => None,
        Validity::Asymptotic { t_min } => {
            match traj.times.iter().position(|&t| t >= t_min) {
                Some(k) => {
                    let m = metric_value(
                        bound.metric,
                        bound.target.values(),
                        &traj.strategy_samples()[k],
                        reg_for_metric,
                        game,
                    )?;
                    Some((traj.times[k], m))
                }
                None => None,
            }
        }
    };
    Ok(traj
        .times
        .iter()
        .map(|&t| match anchor {
            Some((t_anchor, m_anchor)) if t >= t_anchor => {
                m_anchor * (-bound.beta * (t - t_anchor)).exp()
            }
            _ => bound.eval(t),
        })
        .collect())
}

/// Checks every trajectory sample against its envelope inflated by
/// `(1 + slack)`; see [`envelope_series`] for the envelope semantics.
/// Asymptotic mode skips samples before `t_min`. The metric is evaluated on
/// [`crate::dynamics::Trajectory::strategy_samples`] (the AC primal state
/// when present, `C_ε(z)` otherwise).
pub fn verify_bound<T: Scalar>(
    traj: &crate::dynamics::Trajectory<T>,
    bound: &RateBound<T>,
    game: &Game<T>,
    reg_for_metric: &[RegularizerKind<T>],
    slack: T,
) -> Result<BoundReport<T>> {
    let target = bound.target.values();
    let mut report = BoundReport {
        checked_times: 0,
        violations: Vec::new(),
        max_ratio: T::zero(),
        mode: bound.validity,
    };
    let t_min = match bound.validity {
        Validity::AllT => T::neg_infinity(),
        Validity::Asymptotic { t_min } => t_min,
    };
    let envelopes = envelope_series(traj, bound, game, reg_for_metric)?;
    for (k, &t) in traj.times.iter().enumerate() {
        if t < t_min {
            continue;
        }
        let x = &traj.strategy_samples()[k];
        let measured = metric_value(bound.metric, target, x, reg_for_metric, game)?;
        let envelope = envelopes[k] * (T::one() + slack);
        let ratio = if envelope > T::zero() {
            measured / envelope
        } else if measured <= T::zero() {
            T::zero()
        } else {
            T::infinity()
        };
        report.max_ratio = report.max_ratio.max(ratio);
        if measured > envelope {
            report.violations.push(Violation { t, measured, bound: envelope });
        }
        report.checked_times += 1;
    }
    Ok(report)
}

/// Whether every block of `x` sits strictly inside its domain.
fn strictly_interior<T: Scalar>(x: &[T], game: &Game<T>) -> bool {
    let mut off = 0;
    for domain in game.domains() {
        let n = domain.dim();
        let block = &x[off..off + n];
        let inside = match domain {
            crate::geometry::Domain::Simplex { .. } => block.iter().all(|&v| v > T::zero()),
            crate::geometry::Domain::Box { lo, hi } => block
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&v, (&l, &h))| v > l && v < h),
        };
        if !inside {
            return false;
        }
        off += n;
    }
    true
}

/// Default onset time for asymptotic verification: the earliest sample from
/// which the strategy profile stays strictly inside its domain for the rest
/// of the trajectory (non-steep mirror maps can pin early iterates to the
/// boundary, where the envelopes need not hold). Falls back to the final
/// sample time if the trajectory never settles in the interior.
pub fn default_asymptotic_onset<T: Scalar>(
    traj: &crate::dynamics::Trajectory<T>,
    game: &Game<T>,
) -> Result<T> {
    let xs = traj.strategy_samples();
    let mut onset = traj.times.len() - 1;
    for k in (0..traj.times.len()).rev() {
        if strictly_interior(&xs[k], game) {
            onset = k;
        } else {
            break;
        }
    }
    Ok(traj.times[onset])
}

/// Solves for a Nash equilibrium.
///
/// Builtins carrying an analytic NE return it directly; otherwise a
/// projected pseudo-gradient fixed-point iteration runs with step
/// `σ = 1/L` when a Lipschitz hint exists, else backtracking halving from
/// 1. Terminates on the step-scaled natural residual
/// `‖x − Π(x + σU(x))‖₂ / σ ≤ tol`, which is independent of σ at a
/// solution.
pub fn solve_ne<T: Scalar>(game: &Game<T>, tol: T, max_iter: usize) -> Result<StrategyProfile<T>> {
    if let Some(ne) = game.known_ne() {
        return game.profile(ne.to_vec());
    }
    let mut sigma = game.lipschitz_hint().map(|l| T::one() / l).unwrap_or_else(T::one);
    let mut x: Vec<T> = game.domains().iter().flat_map(|d| d.interior_point()).collect();
    let mut last_residual = T::infinity();
    // Floor on σ: below ~1e-12 the update σU(x) is absorbed by rounding and
    // the natural residual degenerates to zero at non-solutions.
    while sigma >= T::lit(1e-12) {
        for _ in 0..max_iter {
            let u = game.pseudo_gradient(&x)?;
            let stepped: Vec<T> = x.iter().zip(&u).map(|(&xi, &ui)| xi + sigma * ui).collect();
            let y = game.project(&stepped)?;
            let res =
                norm2(&x.iter().zip(&y).map(|(&a, &b)| a - b).collect::<Vec<_>>()) / sigma;
            x = y;
            last_residual = res;
            if res <= tol {
                return game.profile(x);
            }
            if !res.is_finite() {
                break;
            }
        }
        sigma = sigma / T::lit(2.0);
    }
    Err(Error::SolverFailure {
        iterations: max_iter,
        residual: last_residual.as_f64(),
        hint: "; game may not be strongly monotone".into(),
    })
}

/// Solves the perturbed fixed point `x̄ = C_ε(U(x̄))` by damped iteration
/// `x ← (1 − α)x + α C_ε(U(x))`, `α ∈ (0, 1]`.
pub fn solve_perturbed_ne<T: Scalar>(
    game: &Game<T>,
    mspec: &MirrorSpec<T>,
    tol: T,
    max_iter: usize,
    damping: T,
) -> Result<StrategyProfile<T>> {
    if !(damping > T::zero() && damping <= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "damping must lie in (0, 1], got {damping}"
        )));
    }
    if mspec.total_dim() != game.dim() {
        return Err(Error::DimensionMismatch { expected: game.dim(), actual: mspec.total_dim() });
    }
    let mut x: Vec<T> = game.domains().iter().flat_map(|d| d.interior_point()).collect();
    let mut residual = T::infinity();
    for _ in 0..max_iter {
        let mapped = mspec.mirror_map(&game.pseudo_gradient(&x)?)?;
        residual = norm_inf(&x.iter().zip(&mapped).map(|(&a, &b)| a - b).collect::<Vec<_>>());
        x = x
            .iter()
            .zip(&mapped)
            .map(|(&xi, &mi)| (T::one() - damping) * xi + damping * mi)
            .collect();
        if residual <= tol {
            return game.profile(x);
        }
    }
    Err(Error::SolverFailure {
        iterations: max_iter,
        residual: residual.as_f64(),
        hint: "; try a smaller damping factor or a larger epsilon".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{
        build_quadratic_diag, build_rps, network_mp_instance, perturb_game,
    };
    use crate::geometry::{Domain, MirrorSpec, RegularizerKind};
    use approx::assert_abs_diff_eq;

    fn entropy_spec(dim: usize, blocks: usize, eps: f64) -> MirrorSpec<f64> {
        MirrorSpec::uniform(RegularizerKind::NegativeEntropy { dim }, blocks, eps).unwrap()
    }

    fn box2(lo: f64, hi: f64) -> Domain<f64> {
        Domain::Box { lo: vec![lo, lo], hi: vec![hi, hi] }
    }

    #[test]
    fn solve_ne_network_mp_is_uniform() {
        let ne = solve_ne(&network_mp_instance::<f64>(), 1e-10, 1000).unwrap();
        for &v in ne.values() {
            assert_abs_diff_eq!(v, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn solve_ne_rps_is_uniform() {
        let ne = solve_ne(&build_rps(2.0, 7.0).unwrap(), 1e-10, 1000).unwrap();
        for &v in ne.values() {
            assert_abs_diff_eq!(v, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn solve_ne_quadratic_interior_maximizer() {
        // Q = I, b interior of the box: x⋆ = b.
        let b = [0.3, -0.4];
        let game = build_quadratic_diag(&[1.0, 1.0], &b, vec![box2(-1.0, 1.0)]).unwrap();
        let ne = solve_ne(&game, 1e-10, 20_000).unwrap();
        assert_abs_diff_eq!(ne.values()[0], 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(ne.values()[1], -0.4, epsilon = 1e-8);
    }

    #[test]
    fn solve_ne_reports_failure_with_residual() {
        // Null monotone game U(x) = Sx + b with skew S: the projected
        // iteration spirals around the rest point (0, −0.3) and never meets
        // the tolerance. The iteration starts at the box center, away from
        // the rest point.
        let game = crate::games::Game::new(
            vec![box2(-1.0, 1.0)],
            std::sync::Arc::new(|x: &[f64]| Ok(vec![x[1] + 0.3, -x[0]])),
            None,
        )
        .unwrap();
        let out = solve_ne(&game, 1e-14, 5);
        assert!(matches!(out, Err(Error::SolverFailure { .. })));
    }

    #[test]
    fn perturbed_ne_rps_is_uniform_for_any_epsilon_above_mu() {
        for eps in [2.1, 3.0, 5.0] {
            let game = build_rps(1.0, 5.0).unwrap();
            let spec = entropy_spec(3, 2, eps);
            let x = solve_perturbed_ne(&game, &spec, 1e-10, 10_000, 0.5).unwrap();
            for &v in x.values() {
                assert_abs_diff_eq!(v, 1.0 / 3.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn perturbed_ne_network_mp_is_uniform() {
        let game = network_mp_instance::<f64>();
        let spec = entropy_spec(2, 3, 1.0);
        let x = solve_perturbed_ne(&game, &spec, 1e-10, 10_000, 0.5).unwrap();
        for &v in x.values() {
            assert_abs_diff_eq!(v, 0.5, epsilon = 1e-8);
        }
    }

    #[test]
    fn perturbed_ne_quadratic_origin() {
        // Q = I, b = 0, Euclidean mirror on [−1,1]²: C_ε(U(0)) = Π(0) = 0.
        let game = build_quadratic_diag(&[1.0, 1.0], &[0.0, 0.0], vec![box2(-1.0, 1.0)]).unwrap();
        let spec = MirrorSpec::new(
            vec![RegularizerKind::SquaredEuclidean(box2(-1.0, 1.0))],
            0.5,
        )
        .unwrap();
        let x = solve_perturbed_ne(&game, &spec, 1e-12, 10_000, 1.0).unwrap();
        for &v in x.values() {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn perturbed_ne_fixed_point_residual_holds_post_hoc() {
        let game = build_rps(1.0, 5.0).unwrap();
        let spec = entropy_spec(3, 2, 2.1);
        let tol = 1e-9;
        let x = solve_perturbed_ne(&game, &spec, tol, 10_000, 0.5).unwrap();
        let mapped = spec.mirror_map(&game.pseudo_gradient(x.values()).unwrap()).unwrap();
        let res = x
            .values()
            .iter()
            .zip(&mapped)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(res <= tol * 2.0, "residual {res}");
    }

    #[test]
    fn lyapunov_zero_at_target() {
        let spec = entropy_spec(3, 2, 1.0);
        let z = [1.0, 2.0, 3.0, 0.0, -1.0, 0.5];
        let v = lyapunov_md(&spec, 2.0, &z, &z).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lyapunov_duality_with_primal_bregman() {
        // γ V_z = D_{ψ_ε}(x_target, x) = ε D_h(x_target, x).
        let spec = entropy_spec(3, 1, 1.7);
        let gamma = 0.8;
        let z = [1.0, -0.5, 0.25];
        let z_t = [0.1, 0.2, 0.3];
        let v = lyapunov_md(&spec, gamma, &z, &z_t).unwrap();
        let x = spec.mirror_map(&z).unwrap();
        let x_t = spec.mirror_map(&z_t).unwrap();
        let primal = 1.7 * spec.bregman_h(&x_t, &x).unwrap();
        assert_abs_diff_eq!(v * gamma, primal, epsilon = 1e-9);
    }

    fn dummy_target() -> StrategyProfile<f64> {
        let game = network_mp_instance::<f64>();
        solve_ne(&game, 1e-10, 10).unwrap()
    }

    #[test]
    fn md_bound_values_at_zero_and_decay() {
        let (breg, euc) =
            md_rate_bound(1.0, 0.0037, 0.1, 2.5, 1.0, dummy_target(), Validity::AllT).unwrap();
        assert_abs_diff_eq!(breg.eval(0.0), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(euc.eval(0.0), 5.0, epsilon = 1e-15);
        // multiplier at t = 100: e^{−γηε⁻¹·100} = e^{−3.7}.
        let mult = breg.eval(100.0) / breg.c0;
        assert_abs_diff_eq!(mult, (-3.7f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(mult, 0.0247235, epsilon = 1e-6);
    }

    #[test]
    fn md_bound_doubling_gamma_halves_time_scale() {
        let t = 3.21;
        let (a, _) = md_rate_bound(1.0, 0.5, 0.2, 1.0, 1.0, dummy_target(), Validity::AllT).unwrap();
        let (b, _) = md_rate_bound(2.0, 0.5, 0.2, 1.0, 1.0, dummy_target(), Validity::AllT).unwrap();
        assert_abs_diff_eq!(a.eval(t), b.eval(t / 2.0), epsilon = 1e-12);
    }

    #[test]
    fn dmd_bound_null_monotone_exponent() {
        let (breg, _) = dmd_rate_bound(1.0, 0.0, 1.0, 1.0, 1.0, dummy_target(), Validity::AllT).unwrap();
        assert_abs_diff_eq!(breg.beta, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn dmd_bound_rps_exponent() {
        let (breg, _) =
            dmd_rate_bound(1.0, 2.0, 2.1, 1.0, 1.0, dummy_target(), Validity::AllT).unwrap();
        assert_abs_diff_eq!(breg.beta, 0.1 / 2.1, epsilon = 1e-15);
    }

    #[test]
    fn dmd_bound_rejects_epsilon_below_mu() {
        assert!(dmd_rate_bound(1.0, 2.0, 1.9, 1.0, 1.0, dummy_target(), Validity::AllT).is_err());
    }

    #[test]
    fn dmd_bound_strongly_monotone_passes_negative_mu() {
        // μ = −η gives β = γ(ε + η)/ε > γ, faster than MD's γη/ε for small ε.
        let eta = 0.5;
        let eps = 0.2;
        let (breg, _) =
            dmd_rate_bound(1.0, -eta, eps, 1.0, 1.0, dummy_target(), Validity::AllT).unwrap();
        assert!(breg.beta > 1.0);
        assert!(breg.beta > 1.0 * eta / eps * 0.0 + 1.0); // strictly above γ
    }

    #[test]
    fn ac_bound_arithmetic() {
        let (gap, breg, euc) = ac_rate_bound(
            1.0,
            1.0,
            0.1,
            20.0,
            0.3,
            0.7,
            1.0,
            dummy_target(),
            Validity::AllT,
        )
        .unwrap();
        // condition 0.1 > 1·1/20 = 0.05 holds; β = γη/ε = 10.
        assert_abs_diff_eq!(gap.beta, 10.0, epsilon = 1e-15);
        // C0 = gap0 + (rε/γ) D0 = 0.3 + 2·0.7.
        assert_abs_diff_eq!(gap.eval(0.0), 0.3 + 2.0 * 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(breg.c0, gap.c0, epsilon = 1e-15);
        assert_abs_diff_eq!(euc.c0, 2.0 * gap.c0, epsilon = 1e-15);
    }

    #[test]
    fn ac_bound_rejects_condition_violation() {
        assert!(ac_rate_bound(
            1.0,
            1.0,
            0.04,
            20.0,
            0.3,
            0.7,
            1.0,
            dummy_target(),
            Validity::AllT
        )
        .is_err());
    }

    #[test]
    fn convert_relative_formulas() {
        assert_abs_diff_eq!(
            convert_relative(2.0, RelativeConversion::StrongMonotone { ell_smooth: 4.0 }).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            convert_relative(2.0, RelativeConversion::HypoMonotone { rho_strong_convexity: 1.0 })
                .unwrap(),
            2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            convert_relative(0.7, RelativeConversion::StrongMonotone { ell_smooth: 1.0 }).unwrap(),
            0.7,
            epsilon = 1e-15
        );
        assert!(convert_relative(1.0, RelativeConversion::StrongMonotone { ell_smooth: 0.0 })
            .is_err());
    }

    #[test]
    fn verify_bound_rejects_potential_gap_without_potential() {
        let game = build_rps(1.0, 5.0).unwrap();
        let target = solve_ne(&game, 1e-10, 10).unwrap();
        let bound =
            RateBound::new(1.0, 1.0, Metric::PotentialGap, target, Validity::AllT).unwrap();
        let mspec = entropy_spec(3, 2, 2.1);
        let dspec = crate::dynamics::DynamicsSpec::dmd(1.0).unwrap();
        let cfg = crate::dynamics::IntegratorConfig::new(0.1, 1.0, 1).unwrap();
        let traj =
            crate::dynamics::integrate(&dspec, &game, &mspec, &[0.0; 6], None, &cfg).unwrap();
        let regs: Vec<_> = vec![RegularizerKind::NegativeEntropy { dim: 3 }; 2];
        assert!(matches!(
            verify_bound(&traj, &bound, &game, &regs, 1e-6),
            Err(Error::MetricMismatch(_))
        ));
    }

    #[test]
    fn asymptotic_mode_reanchors_at_onset() {
        // DMD with Euclidean projection on RPS(1, 5): the early trajectory
        // rides the simplex boundary and overshoots the nominal envelope,
        // but decay at rate β holds from the interior onset.
        let game = build_rps(1.0, 5.0).unwrap();
        let spec = MirrorSpec::new(
            vec![
                RegularizerKind::SquaredEuclidean(Domain::Simplex { dim: 3 }),
                RegularizerKind::SquaredEuclidean(Domain::Simplex { dim: 3 }),
            ],
            2.1,
        )
        .unwrap();
        let dspec = crate::dynamics::DynamicsSpec::dmd(1.0).unwrap();
        let cfg = crate::dynamics::IntegratorConfig::new(1e-2, 30.0, 10).unwrap();
        let z0 = [1.0, 2.0, 3.0, 1.0, 2.0, 3.0];
        let traj = crate::dynamics::integrate(&dspec, &game, &spec, &z0, None, &cfg).unwrap();
        let target = game.profile(vec![1.0 / 3.0; 6]).unwrap();
        let x0 = spec.mirror_map(&z0).unwrap();
        let regs = vec![
            RegularizerKind::SquaredEuclidean(Domain::Simplex { dim: 3 }),
            RegularizerKind::SquaredEuclidean(Domain::Simplex { dim: 3 }),
        ];
        let d0 =
            metric_value(Metric::BregmanToTarget, target.values(), &x0, &regs, &game).unwrap();
        let beta = (2.1 - 2.0) / 2.1;

        // All-t verification overshoots during the boundary phase...
        let all_t = RateBound::new(beta, 2.0 * d0, Metric::EuclidSqToTarget, target.clone(), Validity::AllT)
            .unwrap();
        let rep = verify_bound(&traj, &all_t, &game, &regs, 1e-6).unwrap();
        assert!(!rep.pass(), "expected early-boundary violations");

        // ...but the re-anchored asymptotic envelope holds from the
        // interior onset.
        let t_min = default_asymptotic_onset(&traj, &game).unwrap();
        assert!(t_min > 0.0 && t_min < 30.0, "onset {t_min}");
        let asym = RateBound::new(
            beta,
            2.0 * d0,
            Metric::EuclidSqToTarget,
            target,
            Validity::Asymptotic { t_min },
        )
        .unwrap();
        let rep = verify_bound(&traj, &asym, &game, &regs, 1e-6).unwrap();
        assert!(rep.pass(), "violations: {:?}", rep.violations.first());
        assert!(rep.checked_times < traj.times.len());
    }

    #[test]
    fn monotone_decrease_of_lyapunov_in_relatively_strongly_monotone_game() {
        // MD on the ε-perturbed RPS game with matching entropy geometry:
        // V_z must be nonincreasing at every sample.
        let eps = 2.1;
        let game = build_rps(1.0, 5.0).unwrap();
        let spec = entropy_spec(3, 2, eps);
        let pert = perturb_game(&game, &spec).unwrap();
        let dspec = crate::dynamics::DynamicsSpec::md(1.0).unwrap();
        let cfg = crate::dynamics::IntegratorConfig::new(1e-3, 20.0, 100).unwrap();
        let z0 = [1.0, 2.0, 3.0, 1.0, 2.0, 3.0];
        let traj = crate::dynamics::integrate(&dspec, &pert, &spec, &z0, None, &cfg).unwrap();
        let z_target = [0.0; 6]; // C(0) = uniform = the perturbed NE
        let mut prev = f64::INFINITY;
        for z in &traj.z_samples {
            let v = lyapunov_md(&spec, 1.0, z, &z_target).unwrap();
            assert!(v <= prev + 1e-9, "V increased: {prev} -> {v}");
            prev = v;
        }
    }
}
