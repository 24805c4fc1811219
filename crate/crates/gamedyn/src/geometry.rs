//! Regularizers, projections, mirror maps and Bregman divergences.
//!
//! A regularizer `ϑ` is a 1-strongly convex function whose domain is a
//! player's strategy set. Scaling by `ε > 0` gives `ψ_ε = ε ϑ`; the mirror
//! map induced by `ψ_ε` is
//!
//! ```text
//! C_ε(z) = argmax_{y ∈ Ω} [ yᵀz − ε ϑ(y) ] = ∇ψ_ε⋆(z),
//! ```
//!
//! which for the squared-Euclidean regularizer is the projection of `z/ε`
//! onto `Ω` and for negative entropy on the simplex is the softmax with
//! temperature `ε`. The entropy regularizer is steep: its gradient blows up
//! at the simplex boundary, so mirror-map outputs stay in the relative
//! interior.

use crate::error::{ensure_finite, Error, Result};
use crate::scalar::{dot, Scalar};

/// Coordinates below this threshold count as boundary points of the simplex
/// for steepness purposes (entropy gradients are rejected there).
pub const ENTROPY_BOUNDARY: f64 = 1e-300;

/// Per-player stacking convention: `x = (xᵖ)_p` with block `p` occupying
/// `offsets[p]..offsets[p] + sizes[p]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl BlockPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidParameter("empty block partition".into()));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidParameter("zero-sized block".into()));
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut total = 0;
        for &s in &sizes {
            offsets.push(total);
            total += s;
        }
        Ok(Self { sizes, offsets, total })
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn range(&self, block: usize) -> std::ops::Range<usize> {
        let o = self.offsets[block];
        o..o + self.sizes[block]
    }

    pub fn block<'a, T>(&self, v: &'a [T], block: usize) -> &'a [T] {
        &v[self.range(block)]
    }
}

/// A player's strategy set: probability simplex or axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain<T> {
    Simplex { dim: usize },
    Box { lo: Vec<T>, hi: Vec<T> },
}

impl<T: Scalar> Domain<T> {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Simplex { dim } => *dim,
            Domain::Box { lo, .. } => lo.len(),
        }
    }

    /// Euclidean projection onto the domain.
    pub fn project(&self, v: &[T]) -> Result<Vec<T>> {
        match self {
            Domain::Simplex { dim } => {
                if v.len() != *dim {
                    return Err(Error::DimensionMismatch { expected: *dim, actual: v.len() });
                }
                project_simplex(v)
            }
            Domain::Box { lo, hi } => project_box(v, lo, hi),
        }
    }

    /// Membership check with absolute tolerance `tol`.
    pub fn contains(&self, v: &[T], tol: T) -> bool {
        if v.len() != self.dim() {
            return false;
        }
        match self {
            Domain::Simplex { .. } => {
                let sum: T = v.iter().copied().sum();
                (sum - T::one()).abs() <= tol && v.iter().all(|&x| x >= -tol)
            }
            Domain::Box { lo, hi } => v
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&x, (&l, &h))| x >= l - tol && x <= h + tol),
        }
    }

    /// A point in the relative interior (simplex barycenter, box midpoint).
    pub fn interior_point(&self) -> Vec<T> {
        match self {
            Domain::Simplex { dim } => {
                let w = T::one() / T::from_usize(*dim).unwrap();
                vec![w; *dim]
            }
            Domain::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(&l, &h)| (l + h) / T::lit(2.0))
                .collect(),
        }
    }
}

/// Builtin regularizers. Both are 1-strongly convex (`ρ = 1`); negative
/// entropy is steep, the squared-Euclidean one is not.
#[derive(Debug, Clone, PartialEq)]
pub enum RegularizerKind<T> {
    /// `ϑ(x) = ½‖x‖₂²` over a box or simplex domain.
    SquaredEuclidean(Domain<T>),
    /// `ϑ(x) = Σ xᵢ log xᵢ` over the simplex (`0 log 0 = 0`).
    NegativeEntropy { dim: usize },
}

impl<T: Scalar> RegularizerKind<T> {
    pub fn dim(&self) -> usize {
        match self {
            RegularizerKind::SquaredEuclidean(d) => d.dim(),
            RegularizerKind::NegativeEntropy { dim } => *dim,
        }
    }

    pub fn domain(&self) -> Domain<T> {
        match self {
            RegularizerKind::SquaredEuclidean(d) => d.clone(),
            RegularizerKind::NegativeEntropy { dim } => Domain::Simplex { dim: *dim },
        }
    }

    /// Strong-convexity modulus `ρ` (1 for both builtin variants).
    pub fn strong_convexity(&self) -> T {
        T::one()
    }

    /// Whether the gradient norm diverges at the domain boundary.
    pub fn is_steep(&self) -> bool {
        matches!(self, RegularizerKind::NegativeEntropy { .. })
    }

    /// `ϑ(x)`.
    pub fn value(&self, x: &[T]) -> T {
        match self {
            RegularizerKind::SquaredEuclidean(_) => {
                x.iter().map(|&v| v * v).sum::<T>() / T::lit(2.0)
            }
            RegularizerKind::NegativeEntropy { .. } => x
                .iter()
                .map(|&v| if v > T::zero() { v * v.ln() } else { T::zero() })
                .sum(),
        }
    }

    /// `∇ϑ(x)`; errors for entropy when `x` touches the simplex boundary.
    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        match self {
            RegularizerKind::SquaredEuclidean(_) => Ok(x.to_vec()),
            RegularizerKind::NegativeEntropy { .. } => {
                let floor = T::lit(ENTROPY_BOUNDARY);
                for (i, &v) in x.iter().enumerate() {
                    if v < floor {
                        return Err(Error::BoundaryPoint { index: i, value: v.as_f64() });
                    }
                }
                Ok(x.iter().map(|&v| T::one() + v.ln()).collect())
            }
        }
    }

    /// Bregman divergence `D_ϑ(x, y) = ϑ(x) − ϑ(y) − ∇ϑ(y)ᵀ(x − y)`.
    ///
    /// For the Euclidean regularizer this is `½‖x − y‖₂²`; for entropy on
    /// the simplex it is the KL divergence `Σ xᵢ log(xᵢ/yᵢ)`. The second
    /// argument must lie in `dom(∂ϑ)` (relative interior for entropy).
    pub fn bregman(&self, x: &[T], y: &[T]) -> Result<T> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), actual: y.len() });
        }
        match self {
            RegularizerKind::SquaredEuclidean(_) => Ok(x
                .iter()
                .zip(y)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<T>()
                / T::lit(2.0)),
            RegularizerKind::NegativeEntropy { .. } => {
                let floor = T::lit(ENTROPY_BOUNDARY);
                let mut acc = T::zero();
                for (i, (&a, &b)) in x.iter().zip(y).enumerate() {
                    if b < floor {
                        return Err(Error::BoundaryPoint { index: i, value: b.as_f64() });
                    }
                    if a > T::zero() {
                        acc = acc + a * (a / b).ln();
                    }
                }
                Ok(acc)
            }
        }
    }

    /// Mirror map `C_ε(z)` of this regularizer block.
    ///
    /// The result is invariant to adding a constant to every coordinate of
    /// `z` on simplex domains; the entropy branch enforces this numerically
    /// by max-shifting before exponentiation.
    pub fn mirror(&self, z: &[T], epsilon: T) -> Result<Vec<T>> {
        ensure_finite(z)?;
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: z.len() });
        }
        match self {
            RegularizerKind::SquaredEuclidean(domain) => {
                let scaled: Vec<T> = z.iter().map(|&v| v / epsilon).collect();
                domain.project(&scaled)
            }
            RegularizerKind::NegativeEntropy { .. } => {
                let m = z.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
                let w: Vec<T> = z.iter().map(|&v| ((v - m) / epsilon).exp()).collect();
                let s: T = w.iter().copied().sum();
                Ok(w.into_iter().map(|v| v / s).collect())
            }
        }
    }

    /// Conjugate value `ψ_ε⋆(z) = C_ε(z)ᵀz − ε ϑ(C_ε(z))`.
    pub fn conjugate_value(&self, z: &[T], epsilon: T) -> Result<T> {
        let x = self.mirror(z, epsilon)?;
        Ok(dot(&x, z) - epsilon * self.value(&x))
    }

    /// Dual Bregman divergence `D_{ψ_ε⋆}(z, z_ref)`.
    ///
    /// By conjugacy this equals `D_{ψ_ε}(x_ref, x)` with `x = C_ε(z)`,
    /// `x_ref = C_ε(z_ref)`.
    pub fn dual_bregman(&self, z: &[T], z_ref: &[T], epsilon: T) -> Result<T> {
        if z.len() != z_ref.len() {
            return Err(Error::DimensionMismatch { expected: z.len(), actual: z_ref.len() });
        }
        let f_z = self.conjugate_value(z, epsilon)?;
        let f_r = self.conjugate_value(z_ref, epsilon)?;
        let x_ref = self.mirror(z_ref, epsilon)?;
        let diff: Vec<T> = z.iter().zip(z_ref).map(|(&a, &b)| a - b).collect();
        Ok(f_z - f_r - dot(&x_ref, &diff))
    }
}

/// Mirror map specification: one regularizer per player block plus the
/// scaling `ε > 0` shared by all blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorSpec<T> {
    blocks: Vec<RegularizerKind<T>>,
    epsilon: T,
}

impl<T: Scalar> MirrorSpec<T> {
    pub fn new(blocks: Vec<RegularizerKind<T>>, epsilon: T) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidParameter("mirror spec needs at least one block".into()));
        }
        if !(epsilon > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                epsilon
            )));
        }
        Ok(Self { blocks, epsilon })
    }

    /// Same regularizer shape for every block.
    pub fn uniform(block: RegularizerKind<T>, n_blocks: usize, epsilon: T) -> Result<Self> {
        Self::new(vec![block; n_blocks], epsilon)
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn blocks(&self) -> &[RegularizerKind<T>] {
        &self.blocks
    }

    pub fn partition(&self) -> BlockPartition {
        BlockPartition::new(self.blocks.iter().map(|b| b.dim()).collect())
            .expect("blocks validated at construction")
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim()).sum()
    }

    /// Stacked mirror map `C_ε(z) = (C_εᵖ(zᵖ))_p`.
    pub fn mirror_map(&self, z: &[T]) -> Result<Vec<T>> {
        self.check_len(z)?;
        let part = self.partition();
        let mut out = Vec::with_capacity(z.len());
        for (p, reg) in self.blocks.iter().enumerate() {
            out.extend(reg.mirror(part.block(z, p), self.epsilon)?);
        }
        Ok(out)
    }

    /// `ψ_ε⋆(z)` summed over blocks.
    pub fn conjugate_value(&self, z: &[T]) -> Result<T> {
        self.check_len(z)?;
        let part = self.partition();
        let mut acc = T::zero();
        for (p, reg) in self.blocks.iter().enumerate() {
            acc = acc + reg.conjugate_value(part.block(z, p), self.epsilon)?;
        }
        Ok(acc)
    }

    /// `Σ_p D_{ψ_ε⋆}(zᵖ, z_refᵖ)`.
    pub fn dual_bregman(&self, z: &[T], z_ref: &[T]) -> Result<T> {
        self.check_len(z)?;
        self.check_len(z_ref)?;
        let part = self.partition();
        let mut acc = T::zero();
        for (p, reg) in self.blocks.iter().enumerate() {
            acc = acc + reg.dual_bregman(part.block(z, p), part.block(z_ref, p), self.epsilon)?;
        }
        Ok(acc)
    }

    /// Bregman divergence of `h = Σ_p ϑᵖ` (unscaled by `ε`).
    pub fn bregman_h(&self, x: &[T], y: &[T]) -> Result<T> {
        self.check_len(x)?;
        self.check_len(y)?;
        let part = self.partition();
        let mut acc = T::zero();
        for (p, reg) in self.blocks.iter().enumerate() {
            acc = acc + reg.bregman(part.block(x, p), part.block(y, p))?;
        }
        Ok(acc)
    }

    /// `Ψ_ε(x) = (ε ∇ϑᵖ(xᵖ))_p`, the gradient of `Σ_p ψ_εᵖ`.
    pub fn psi_gradient(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_len(x)?;
        let part = self.partition();
        let mut out = Vec::with_capacity(x.len());
        for (p, reg) in self.blocks.iter().enumerate() {
            out.extend(reg.gradient(part.block(x, p))?.into_iter().map(|g| g * self.epsilon));
        }
        Ok(out)
    }

    /// `Σ_p ϑᵖ(xᵖ)`.
    pub fn theta_value(&self, x: &[T]) -> T {
        let part = self.partition();
        self.blocks
            .iter()
            .enumerate()
            .map(|(p, reg)| reg.value(part.block(x, p)))
            .sum()
    }

    fn check_len(&self, v: &[T]) -> Result<()> {
        let n = self.total_dim();
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: v.len() });
        }
        Ok(())
    }
}

/// Euclidean projection onto the unit simplex (sort-then-threshold).
pub fn project_simplex<T: Scalar>(v: &[T]) -> Result<Vec<T>> {
    ensure_finite(v)?;
    if v.is_empty() {
        return Err(Error::InvalidParameter("empty vector".into()));
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = T::zero();
    let mut tau = T::zero();
    for (k, &u) in sorted.iter().enumerate() {
        cumsum = cumsum + u;
        let k1 = T::from_usize(k + 1).unwrap();
        let t = (cumsum - T::one()) / k1;
        if u - t > T::zero() {
            tau = t;
        } else {
            break;
        }
    }
    Ok(v.iter().map(|&u| (u - tau).max(T::zero())).collect())
}

/// Componentwise clamp to `[lo, hi]`.
pub fn project_box<T: Scalar>(v: &[T], lo: &[T], hi: &[T]) -> Result<Vec<T>> {
    ensure_finite(v)?;
    if lo.len() != v.len() || hi.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: v.len(), actual: lo.len().max(hi.len()) });
    }
    for (i, (&l, &h)) in lo.iter().zip(hi).enumerate() {
        if l > h {
            return Err(Error::InvalidDomain(format!(
                "box bounds inverted at coordinate {i}: lo = {l} > hi = {h}"
            )));
        }
    }
    Ok(v.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&x, (&l, &h))| x.max(l).min(h))
        .collect())
}
