//! Game representations and builders.
//!
//! A [`Game`] is a block partition, per-player domains, a pseudo-gradient
//! evaluator `U(x) = (∇_{xᵖ} 𝒰ᵖ(x))_p` and, when the game is an exact
//! potential game, the potential `P` with `U = ∇P`. Builders cover the
//! bilinear case studies (rock-paper-scissors, network zero-sum games),
//! the adversarial-attack saddle game and synthetic quadratic potential
//! games, plus sampled monotonicity estimation:
//!
//! ```text
//! r₂(x, x′)  = (U(x) − U(x′))ᵀ(x − x′) / ‖x − x′‖₂²
//! r_h(x, x′) = (U(x) − U(x′))ᵀ(x − x′) / (D_h(x, x′) + D_h(x′, x))
//! ```
//!
//! The game is η-strongly monotone when `sup r₂ = −η < 0` and μ-hypo-monotone
//! when `sup r₂ = μ > 0`; the `r_h` ratios give the relative counterparts.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{BlockPartition, Domain, MirrorSpec, RegularizerKind};
use crate::scalar::{dot, Scalar};

/// Sampled suprema with magnitude below this are reported as exactly zero;
/// skew-symmetric pseudo-gradients produce roundoff at the 1e-16 scale.
const MODULUS_SNAP: f64 = 1e-9;

type GradFn<T> = Arc<dyn Fn(&[T]) -> Result<Vec<T>> + Send + Sync>;
type PotFn<T> = Arc<dyn Fn(&[T]) -> Result<T> + Send + Sync>;

/// Stacked strategy vector with its per-player block partition.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile<T> {
    values: Vec<T>,
    partition: BlockPartition,
}

impl<T: Scalar> StrategyProfile<T> {
    pub fn new(values: Vec<T>, partition: BlockPartition) -> Result<Self> {
        if values.len() != partition.total() {
            return Err(Error::DimensionMismatch {
                expected: partition.total(),
                actual: values.len(),
            });
        }
        Ok(Self { values, partition })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn block(&self, p: usize) -> &[T] {
        self.partition.block(&self.values, p)
    }

    /// Checks each block against its domain with tolerance `tol`.
    pub fn is_feasible(&self, domains: &[Domain<T>], tol: T) -> bool {
        domains.len() == self.partition.num_blocks()
            && domains
                .iter()
                .enumerate()
                .all(|(p, d)| d.contains(self.block(p), tol))
    }
}

/// Per-player domains, pseudo-gradient, optional potential.
#[derive(Clone)]
pub struct Game<T> {
    partition: BlockPartition,
    domains: Vec<Domain<T>>,
    pseudo_gradient: GradFn<T>,
    potential: Option<PotFn<T>>,
    lipschitz_hint: Option<T>,
    known_ne: Option<Vec<T>>,
}

impl<T: Scalar> Game<T> {
    pub fn new(
        domains: Vec<Domain<T>>,
        pseudo_gradient: GradFn<T>,
        potential: Option<PotFn<T>>,
    ) -> Result<Self> {
        let partition = BlockPartition::new(domains.iter().map(|d| d.dim()).collect())?;
        Ok(Self {
            partition,
            domains,
            pseudo_gradient,
            potential,
            lipschitz_hint: None,
            known_ne: None,
        })
    }

    pub fn with_lipschitz_hint(mut self, l: T) -> Self {
        self.lipschitz_hint = Some(l);
        self
    }

    pub fn with_known_ne(mut self, ne: Vec<T>) -> Self {
        self.known_ne = Some(ne);
        self
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn domains(&self) -> &[Domain<T>] {
        &self.domains
    }

    pub fn dim(&self) -> usize {
        self.partition.total()
    }

    pub fn lipschitz_hint(&self) -> Option<T> {
        self.lipschitz_hint
    }

    pub fn known_ne(&self) -> Option<&[T]> {
        self.known_ne.as_deref()
    }

    pub fn has_potential(&self) -> bool {
        self.potential.is_some()
    }

    /// Evaluates `U(x)`.
    pub fn pseudo_gradient(&self, x: &[T]) -> Result<Vec<T>> {
        let u = (self.pseudo_gradient)(x)?;
        if u.len() != self.dim() {
            return Err(Error::InvalidGame(format!(
                "pseudo-gradient returned {} components, expected {}",
                u.len(),
                self.dim()
            )));
        }
        Ok(u)
    }

    /// Evaluates the potential `P(x)`, if the game has one.
    pub fn potential(&self, x: &[T]) -> Option<Result<T>> {
        self.potential.as_ref().map(|p| p(x))
    }

    /// Euclidean projection onto the joint strategy set, blockwise.
    pub fn project(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: v.len() });
        }
        let mut out = Vec::with_capacity(v.len());
        for (p, d) in self.domains.iter().enumerate() {
            out.extend(d.project(self.partition.block(v, p))?);
        }
        Ok(out)
    }

    pub fn profile(&self, values: Vec<T>) -> Result<StrategyProfile<T>> {
        let prof = StrategyProfile::new(values, self.partition.clone())?;
        if !prof.is_feasible(&self.domains, T::lit(1e-12)) {
            return Err(Error::InvalidDomain("profile outside joint strategy set".into()));
        }
        Ok(prof)
    }

    /// Draws a profile from the relative interior of the joint strategy set:
    /// symmetric Dirichlet(1) on simplex blocks, uniform over a slightly
    /// shrunk box on box blocks.
    pub fn sample_interior(&self, rng: &mut impl Rng) -> Vec<T> {
        let mut out = Vec::with_capacity(self.dim());
        for d in &self.domains {
            match d {
                Domain::Simplex { dim } => {
                    let mut w = Vec::with_capacity(*dim);
                    let mut sum = 0.0f64;
                    for _ in 0..*dim {
                        let e = -(1.0 - rng.gen::<f64>()).ln();
                        w.push(e);
                        sum += e;
                    }
                    out.extend(w.into_iter().map(|e| T::lit(e / sum)));
                }
                Domain::Box { lo, hi } => {
                    for (&l, &h) in lo.iter().zip(hi) {
                        let width = h - l;
                        let shrink = width * T::lit(1e-6);
                        let u = T::lit(rng.gen::<f64>());
                        out.push(l + shrink + u * (width - shrink - shrink));
                    }
                }
            }
        }
        out
    }
}

impl<T: Scalar> std::fmt::Debug for Game<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Game")
            .field("domains", &self.domains)
            .field("has_potential", &self.potential.is_some())
            .field("lipschitz_hint", &self.lipschitz_hint)
            .finish()
    }
}

/// Sampled one-sided monotonicity bounds. These are estimates, not
/// certificates: `sup r` over finitely many pairs lower-bounds the true
/// supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport<T> {
    /// Largest strong-monotonicity modulus consistent with the samples
    /// (0 when the sampled supremum is nonnegative).
    pub eta_est: T,
    /// Smallest hypo-monotonicity modulus consistent with the samples
    /// (0 when the sampled supremum is nonpositive).
    pub mu_est: T,
    /// Same ratio with the symmetrized Bregman denominator.
    pub relative_eta_est: T,
    /// Same ratio with the symmetrized Bregman denominator.
    pub relative_mu_est: T,
    pub samples_used: usize,
}

/// How the two RPS payoff-vector blocks couple to the strategy blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RpsCoupling {
    /// `U(x) = (A x², A x¹)`: each block is driven by the opponent's mixed
    /// strategy. This is the standard bilinear payoff vector of the
    /// two-player game with payoff matrices `(A, Aᵀ)`.
    #[default]
    Cross,
    /// `U(x) = (A x¹, A x²)`: each block is driven by the player's own
    /// strategy. Selectable for comparison; both couplings share the same
    /// hypo-monotonicity modulus.
    SelfCoupled,
}

/// Two-player rock-paper-scissors on `Δ³ × Δ³` with win value `w` and loss
/// value `l`:
///
/// ```text
///     ⎡  0  −l   w ⎤
/// A = ⎢  w   0  −l ⎥ ,   B = Aᵀ.
///     ⎣ −l   w   0 ⎦
/// ```
///
/// Null monotone for `l = w`, otherwise μ-hypo-monotone with `μ = ½|l − w|`.
/// The unique NE is uniform for both players.
pub fn build_rps<T: Scalar>(w: T, l: T) -> Result<Game<T>> {
    build_rps_with_coupling(w, l, RpsCoupling::default())
}

pub fn build_rps_with_coupling<T: Scalar>(w: T, l: T, coupling: RpsCoupling) -> Result<Game<T>> {
    if !(w > T::zero()) || !(l > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "rps win/loss values must be positive, got w = {w}, l = {l}"
        )));
    }
    let z = T::zero();
    let a = [[z, -l, w], [w, z, -l], [-l, w, z]];
    let mul = move |v: &[T]| -> Vec<T> {
        (0..3).map(|i| (0..3).map(|j| a[i][j] * v[j]).sum()).collect()
    };
    let grad: GradFn<T> = Arc::new(move |x: &[T]| {
        if x.len() != 6 {
            return Err(Error::DimensionMismatch { expected: 6, actual: x.len() });
        }
        let (x1, x2) = (&x[0..3], &x[3..6]);
        let (u1, u2) = match coupling {
            RpsCoupling::Cross => (mul(x2), mul(x1)),
            RpsCoupling::SelfCoupled => (mul(x1), mul(x2)),
        };
        Ok(u1.into_iter().chain(u2).collect())
    });
    let third = T::one() / T::lit(3.0);
    Ok(Game::new(
        vec![Domain::Simplex { dim: 3 }, Domain::Simplex { dim: 3 }],
        grad,
        None,
    )?
    .with_known_ne(vec![third; 6])
    .with_lipschitz_hint((w.abs().max(l.abs())) * T::lit(3.0)))
}

/// Network zero-sum game assembled from pairwise payoff matrices.
///
/// `edges` holds blocks `A^{p,q}` (rows `n_p`, cols `n_q`); the reverse
/// block must satisfy `A^{q,p} = −(A^{p,q})ᵀ` and is filled in when absent.
/// The pseudo-gradient is `U(x) = Φx` with `Φ + Φᵀ = 0`, which is verified
/// at build time.
pub fn build_network_zero_sum<T: Scalar>(
    sizes: &[usize],
    edges: &[(usize, usize, Vec<Vec<T>>)],
) -> Result<Game<T>> {
    let part = BlockPartition::new(sizes.to_vec())?;
    let n = part.total();
    let np = sizes.len();
    let mut phi = vec![vec![T::zero(); n]; n];
    let mut stored = vec![vec![false; np]; np];
    for (p, q, block) in edges {
        let (p, q) = (*p, *q);
        if p >= np || q >= np || p == q {
            return Err(Error::InvalidGame(format!("invalid edge ({p}, {q})")));
        }
        if block.len() != sizes[p] || block.iter().any(|row| row.len() != sizes[q]) {
            return Err(Error::InvalidGame(format!(
                "edge ({p}, {q}) block has wrong shape"
            )));
        }
        let (rp, rq) = (part.range(p), part.range(q));
        for (i, row) in block.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let (gi, gj) = (rp.start + i, rq.start + j);
                if stored[p][q] && phi[gi][gj] != v {
                    return Err(Error::InvalidGame(format!("edge ({p}, {q}) specified twice")));
                }
                if stored[q][p] && phi[gj][gi] != -v {
                    return Err(Error::InvalidGame(format!(
                        "edge ({q}, {p}) is not the negative transpose of edge ({p}, {q})"
                    )));
                }
                phi[gi][gj] = v;
                phi[gj][gi] = -v;
            }
        }
        stored[p][q] = true;
        stored[q][p] = true;
    }
    // Skew-symmetry of the assembled matrix.
    for i in 0..n {
        for j in 0..n {
            if phi[i][j] + phi[j][i] != T::zero() {
                return Err(Error::InvalidGame(format!(
                    "assembled coupling matrix not skew-symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let l_hint = phi
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<T>())
        .fold(T::zero(), |a, b| a.max(b));
    let grad: GradFn<T> = Arc::new(move |x: &[T]| {
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: x.len() });
        }
        Ok(phi.iter().map(|row| dot(row, x)).collect())
    });
    let domains = sizes.iter().map(|&d| Domain::Simplex { dim: d }).collect();
    Ok(Game::new(domains, grad, None)?.with_lipschitz_hint(l_hint))
}

/// The three-player network matching-pennies instance: players on `Δ²`,
/// edge matrices `A(k) = [[k, −k], [−k, k]]` for edges (0,1), (0,2), (1,2)
/// with k = 1, 2, 3. The unique NE is uniform for every player.
pub fn network_mp_instance<T: Scalar>() -> Game<T> {
    let mp = |k: f64| -> Vec<Vec<T>> {
        let k = T::lit(k);
        vec![vec![k, -k], vec![-k, k]]
    };
    let game = build_network_zero_sum(&[2, 2, 2], &[(0, 1, mp(1.0)), (0, 2, mp(2.0)), (1, 2, mp(3.0))])
        .expect("builtin instance is well-formed");
    let half = T::lit(0.5);
    game.with_known_ne(vec![half; 6])
}

/// Logistic function `φ(s) = 1/(1 + e^{−s})`.
fn logistic<T: Scalar>(s: T) -> T {
    if s >= T::zero() {
        T::one() / (T::one() + (-s).exp())
    } else {
        let e = s.exp();
        e / (T::one() + e)
    }
}

/// `log(1 + e^s)` without overflow.
fn log1p_exp<T: Scalar>(s: T) -> T {
    if s > T::zero() {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

/// Two-player saddle game for the dataset-wide adversarial attack.
///
/// Player 1 picks a scalar perturbation `ι` in `iota_box`; player 2 picks a
/// convex combination `p ∈ Δᴺ` of per-sample logistic losses evaluated on
/// the perturbed examples against the flipped labels `b̂_n = −b_n`:
///
/// ```text
/// U¹(x) = Σ_n x²_n b̂_n w₁ φ(−b̂_n (w₀ + w₁(a_n + x¹)))
/// U²(x) = F(x¹) − r (x² − 1/N),  F_n = log(1 + exp(−b̂_n (w₀ + w₁(a_n + x¹))))
/// ```
pub fn build_adversarial_attack<T: Scalar>(
    dataset: &[(T, T)],
    weights: (T, T),
    r_reg: T,
    iota_box: (T, T),
) -> Result<Game<T>> {
    if dataset.is_empty() {
        return Err(Error::InvalidGame("empty dataset".into()));
    }
    if !(r_reg > T::zero()) {
        return Err(Error::InvalidParameter(format!("r_reg must be positive, got {r_reg}")));
    }
    for (i, &(_, b)) in dataset.iter().enumerate() {
        if b != T::one() && b != -T::one() {
            return Err(Error::InvalidGame(format!("label at row {i} is not in {{-1, +1}}")));
        }
    }
    let n = dataset.len();
    let (w0, w1) = weights;
    let data: Vec<(T, T)> = dataset.iter().map(|&(a, b)| (a, -b)).collect(); // (a_n, b̂_n)
    let inv_n = T::one() / T::from_usize(n).unwrap();
    let grad: GradFn<T> = Arc::new(move |x: &[T]| {
        if x.len() != 1 + n {
            return Err(Error::DimensionMismatch { expected: 1 + n, actual: x.len() });
        }
        let iota = x[0];
        let p = &x[1..];
        let mut u1 = T::zero();
        let mut u2 = Vec::with_capacity(n);
        for (k, &(a, bh)) in data.iter().enumerate() {
            let s = -bh * (w0 + w1 * (a + iota));
            u1 = u1 + p[k] * bh * w1 * logistic(s);
            u2.push(log1p_exp(s) - r_reg * (p[k] - inv_n));
        }
        Ok(std::iter::once(u1).chain(u2).collect())
    });
    let (lo, hi) = iota_box;
    Ok(Game::new(
        std::iter::once(Domain::Box { lo: vec![lo], hi: vec![hi] })
            .chain(std::iter::once(Domain::Simplex { dim: n }))
            .collect(),
        grad,
        None,
    )?)
}

/// Grid search for the strong-monotonicity modulus of the adversarial game:
/// the curvature terms `−(b̂_n w₁)² φ(s)(1 − φ(s))` and `−r` are all
/// negative, and `η` is the magnitude of their maximum over the dataset and
/// a uniform grid of perturbation values.
pub fn adversarial_eta_grid_search<T: Scalar>(
    dataset: &[(T, T)],
    weights: (T, T),
    r_reg: T,
    iota_box: (T, T),
    grid_points: usize,
) -> T {
    let (w0, w1) = weights;
    let (lo, hi) = iota_box;
    let mut best = -r_reg;
    let m = grid_points.max(2);
    for g in 0..m {
        let frac = T::from_usize(g).unwrap() / T::from_usize(m - 1).unwrap();
        let iota = lo + frac * (hi - lo);
        for &(a, b) in dataset {
            let bh = -b;
            let s = -bh * (w0 + w1 * (a + iota));
            let phi = logistic(s);
            let term = -(bh * w1) * (bh * w1) * phi * (T::one() - phi);
            best = best.max(term);
        }
    }
    best.abs()
}

/// Symmetric Cholesky-based positive-definiteness check.
fn is_spd<T: Scalar>(q: &[Vec<T>]) -> bool {
    let n = q.len();
    if q.iter().any(|row| row.len() != n) {
        return false;
    }
    for i in 0..n {
        for j in 0..i {
            if (q[i][j] - q[j][i]).abs() > T::lit(1e-12) * (T::one() + q[i][j].abs()) {
                return false;
            }
        }
    }
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = q[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            if i == j {
                if s <= T::zero() {
                    return false;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

/// Quadratic potential game: `P(x) = −½ xᵀQx + bᵀx`, `U(x) = −Qx + b`,
/// strong-monotonicity modulus `λ_min(Q)`.
pub fn build_quadratic_potential<T: Scalar>(
    q: Vec<Vec<T>>,
    b: Vec<T>,
    domains: Vec<Domain<T>>,
) -> Result<Game<T>> {
    let n: usize = domains.iter().map(|d| d.dim()).sum();
    if q.len() != n || b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: q.len() });
    }
    if !is_spd(&q) {
        return Err(Error::InvalidParameter(
            "Q must be symmetric positive-definite".into(),
        ));
    }
    let l_hint = q
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<T>())
        .fold(T::zero(), |a, c| a.max(c));
    let qg = q.clone();
    let bg = b.clone();
    let grad: GradFn<T> = Arc::new(move |x: &[T]| {
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: x.len() });
        }
        Ok(qg.iter().zip(&bg).map(|(row, &bi)| bi - dot(row, x)).collect())
    });
    let pot: PotFn<T> = Arc::new(move |x: &[T]| {
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: x.len() });
        }
        let quad: T = (0..n).map(|i| dot(&q[i], x) * x[i]).sum();
        Ok(dot(&b, x) - quad / T::lit(2.0))
    });
    Ok(Game::new(domains, grad, Some(pot))?.with_lipschitz_hint(l_hint))
}

/// Diagonal convenience wrapper for [`build_quadratic_potential`].
pub fn build_quadratic_diag<T: Scalar>(
    diag: &[T],
    b: &[T],
    domains: Vec<Domain<T>>,
) -> Result<Game<T>> {
    let n = diag.len();
    let mut q = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        q[i][i] = diag[i];
    }
    build_quadratic_potential(q, b.to_vec(), domains)
}

/// Estimates monotonicity moduli by sampling interior pairs.
///
/// Pairs are streamed from a seeded generator, so a larger `n_pairs` with
/// the same seed evaluates a superset of the pairs of a smaller run.
pub fn estimate_monotonicity<T: Scalar>(
    game: &Game<T>,
    h: &[RegularizerKind<T>],
    n_pairs: usize,
    rng_seed: u64,
) -> Result<MonotonicityReport<T>> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter("n_pairs must be at least 1".into()));
    }
    if h.len() != game.partition().num_blocks() {
        return Err(Error::DimensionMismatch {
            expected: game.partition().num_blocks(),
            actual: h.len(),
        });
    }
    let h_spec = MirrorSpec::new(h.to_vec(), T::one())?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut sup_r2 = T::neg_infinity();
    let mut sup_rh = T::neg_infinity();
    let mut used = 0usize;
    for _ in 0..n_pairs {
        let x = game.sample_interior(&mut rng);
        let y = game.sample_interior(&mut rng);
        let d: Vec<T> = x.iter().zip(&y).map(|(&a, &b)| a - b).collect();
        let d2: T = d.iter().map(|&v| v * v).sum();
        if d2 < T::lit(1e-24) {
            continue;
        }
        let du: Vec<T> = game
            .pseudo_gradient(&x)?
            .into_iter()
            .zip(game.pseudo_gradient(&y)?)
            .map(|(a, b)| a - b)
            .collect();
        let num = dot(&du, &d);
        let denom_h = h_spec.bregman_h(&x, &y)? + h_spec.bregman_h(&y, &x)?;
        sup_r2 = sup_r2.max(num / d2);
        sup_rh = sup_rh.max(num / denom_h);
        used += 1;
    }
    if used == 0 {
        return Err(Error::InvalidDomain("sampler produced no usable interior pairs".into()));
    }
    let snap = T::lit(MODULUS_SNAP);
    let split = |sup: T| -> (T, T) {
        if sup < -snap {
            (-sup, T::zero())
        } else if sup > snap {
            (T::zero(), sup)
        } else {
            (T::zero(), T::zero())
        }
    };
    let (eta_est, mu_est) = split(sup_r2);
    let (relative_eta_est, relative_mu_est) = split(sup_rh);
    Ok(MonotonicityReport { eta_est, mu_est, relative_eta_est, relative_mu_est, samples_used: used })
}

/// True iff the central-difference Jacobian of `U` is symmetric within `tol`
/// at `n_points` sampled interior profiles (the second-order test for an
/// exact potential game).
pub fn check_potential<T: Scalar>(
    game: &Game<T>,
    n_points: usize,
    fd_step: T,
    tol: T,
    rng_seed: u64,
) -> Result<bool> {
    let n = game.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..n_points {
        let x = game.sample_interior(&mut rng);
        let mut jac = vec![vec![T::zero(); n]; n];
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] = xp[j] + fd_step;
            xm[j] = xm[j] - fd_step;
            let up = game.pseudo_gradient(&xp)?;
            let um = game.pseudo_gradient(&xm)?;
            for i in 0..n {
                jac[i][j] = (up[i] - um[i]) / (fd_step + fd_step);
            }
        }
        for i in 0..n {
            for j in 0..i {
                if (jac[i][j] - jac[j][i]).abs() > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Game with the regularization-perturbed payoffs: `Ũ = U − Ψ_ε` where
/// `Ψ_ε = (ε ∇ϑᵖ)_p`, and `P̃ = P − ε Σ_p ϑᵖ` when a potential exists.
pub fn perturb_game<T: Scalar>(game: &Game<T>, spec: &MirrorSpec<T>) -> Result<Game<T>> {
    if spec.total_dim() != game.dim() || spec.blocks().len() != game.partition().num_blocks() {
        return Err(Error::DimensionMismatch {
            expected: game.dim(),
            actual: spec.total_dim(),
        });
    }
    for (p, reg) in spec.blocks().iter().enumerate() {
        if reg.domain() != game.domains()[p] {
            return Err(Error::InvalidDomain(format!(
                "mirror spec block {p} domain does not match the game"
            )));
        }
    }
    let base = game.pseudo_gradient.clone();
    let spec_g = spec.clone();
    let grad: GradFn<T> = Arc::new(move |x: &[T]| {
        let u = base(x)?;
        let psi = spec_g.psi_gradient(x)?;
        Ok(u.into_iter().zip(psi).map(|(a, b)| a - b).collect())
    });
    let potential = game.potential.as_ref().map(|p| {
        let base_p = p.clone();
        let spec_p = spec.clone();
        let eps = spec.epsilon();
        let f: PotFn<T> = Arc::new(move |x: &[T]| Ok(base_p(x)? - eps * spec_p.theta_value(x)));
        f
    });
    Ok(Game {
        partition: game.partition.clone(),
        domains: game.domains.clone(),
        pseudo_gradient: grad,
        potential,
        lipschitz_hint: None,
        known_ne: None,
    })
}
