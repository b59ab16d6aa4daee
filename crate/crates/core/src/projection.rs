//! Parametrices and projection lifting.
//!
//! Two independent routes lift an idempotent principal symbol to a
//! projection in the truncated symbol algebra: a cubic Newton iteration
//! (exact-arithmetic capable, defect level doubles per step) and the
//! Riesz contour integral P = (1/2πi)∮ (λ − P₁)^{-1} dλ evaluated by
//! trapezoid quadrature (float mode, spectrally accurate). Both produce
//! functions of the input under holomorphic calculus, so they agree
//! wherever both apply — the acceptance suite leans on exactly that.

use crate::error::CoreError;
use crate::mat::Mat;
use crate::scalar::{FloatScalar, Scalar, C64};
use crate::symbol::{adjoint, compose, ClassicalSymbol, Floor, HomComponent};
use crate::trig::TrigPoly;
use num_traits::Zero;

/// Candidate principal symbol of a projection: its values on the
/// two-point co-sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalProjection<S> {
    pub plus: TrigPoly<S>,
    pub minus: TrigPoly<S>,
}

impl<S: Scalar> PrincipalProjection<S> {
    pub fn new(plus: TrigPoly<S>, minus: TrigPoly<S>) -> Result<Self, CoreError> {
        if plus.k() != minus.k() {
            return Err(CoreError::DimensionMismatch(
                "the two co-sphere values must share the matrix dimension".into(),
            ));
        }
        Ok(PrincipalProjection { plus, minus })
    }

    pub fn k(&self) -> usize {
        self.plus.k()
    }

    /// p² = p on both half-lines (exact or within the float tolerance).
    pub fn is_idempotent(&self) -> bool {
        self.plus.mul(&self.plus).eq_mode(&self.plus)
            && self.minus.mul(&self.minus).eq_mode(&self.minus)
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.plus.conj_transpose().eq_mode(&self.plus)
            && self.minus.conj_transpose().eq_mode(&self.minus)
    }

    /// The order-0 symbol with this principal part and exactly zero
    /// lower-order components.
    pub fn embed(&self) -> ClassicalSymbol<S> {
        ClassicalSymbol::homogeneous(HomComponent::new(
            0,
            self.plus.clone(),
            self.minus.clone(),
        ))
    }

    /// The Szegő principal: 1 for ξ > 0, 0 for ξ < 0.
    pub fn szego(k: usize) -> Self {
        PrincipalProjection {
            plus: TrigPoly::identity(k),
            minus: TrigPoly::zero(k),
        }
    }

    /// The winding family p(x, ±1) = (1 + cos(x)σ₃ ± sin(x)σ₁)/2,
    /// an exact trig-polynomial idempotent with winding frame.
    pub fn winding_family() -> Self {
        let s3 = Mat::diag(vec![S::one(), -S::one()]);
        let mut s1 = Mat::zero(2);
        s1.set(0, 1, S::one());
        s1.set(1, 0, S::one());
        let half = S::from_ratio(1, 2);
        let cos_s3 = {
            let m = s3.scale(&half);
            TrigPoly::mode(1, m.clone()).add(&TrigPoly::mode(-1, m))
        };
        let sin_s1 = {
            // sin x = (e^{ix} − e^{−ix})/(2i), and 1/(2i) = −i/2
            let c = S::from_ratio(-1, 2) * S::i();
            let m = s1.scale(&c);
            TrigPoly::mode(1, m.clone()).add(&TrigPoly::mode(-1, m.neg()))
        };
        let base = TrigPoly::constant(Mat::identity(2).scale(&half)).add(&cos_s3.scale(&half));
        PrincipalProjection {
            plus: base.add(&sin_s1.scale(&half)),
            minus: base.sub(&sin_s1.scale(&half)),
        }
    }
}

/// How many degrees below −m the exact-parametrix search explores before
/// concluding the expansion does not terminate.
const EXACT_PARAMETRIX_SEARCH: usize = 64;

/// Parametrix of an elliptic symbol by homogeneous recursion:
/// q_{−m} = (a_m)^{-1} pointwise; each lower term kills the leading
/// remainder of q#a − 1. Afterwards q#a ≡ 1 and a#q ≡ 1 down to the
/// requested floor.
pub fn parametrix<S: Scalar>(
    a: &ClassicalSymbol<S>,
    floor: Floor,
) -> Result<ClassicalSymbol<S>, CoreError> {
    let k = a.k();
    let m = a.order();
    let principal = a.principal();
    if principal.is_zero() {
        return Err(CoreError::Ellipticity(
            "principal symbol vanishes identically".into(),
        ));
    }
    let inv_plus = principal.plus.pointwise_inverse()?;
    let inv_minus = principal.minus.pointwise_inverse()?;

    match (floor, a.floor()) {
        (Floor::At(f), Floor::At(fa)) => {
            let attainable = fa - 2 * m;
            if f < attainable {
                return Err(CoreError::Precision {
                    requested: f.to_string(),
                    attainable: attainable.to_string(),
                });
            }
        }
        (Floor::Exact, Floor::At(fa)) => {
            return Err(CoreError::Precision {
                requested: "exact".into(),
                attainable: (fa - 2 * m).to_string(),
            });
        }
        _ => {}
    }

    let mut q = ClassicalSymbol::zero(k, -m, Floor::Exact);
    q.set_component(HomComponent::new(-m, inv_plus.clone(), inv_minus.clone()));
    let one = ClassicalSymbol::one(k);

    let rem_floor = match floor {
        Floor::At(f) => Floor::At(f + m),
        Floor::Exact => Floor::Exact,
    };
    let max_steps = match floor {
        Floor::At(f) => (m - f).unsigned_abs() as usize + 2,
        Floor::Exact => EXACT_PARAMETRIX_SEARCH,
    };

    let nonterminating = || CoreError::Precision {
        requested: "exact".into(),
        attainable: "any finite floor (the parametrix expansion does not terminate)".into(),
    };

    for _ in 0..=max_steps {
        let rem = compose(&q, a, rem_floor)
            .map_err(|e| match e {
                CoreError::Precision { .. } => nonterminating(),
                other => other,
            })?
            .sub(&one)?;
        let top = rem
            .components()
            .rev()
            .find(|c| {
                if S::EXACT {
                    !c.is_zero()
                } else {
                    c.plus.max_abs_coeff() > crate::config::FLOAT_OP_TOL
                        || c.minus.max_abs_coeff() > crate::config::FLOAT_OP_TOL
                }
            })
            .map(|c| (c.degree, c.plus.clone(), c.minus.clone()));
        match top {
            None => {
                return match floor {
                    Floor::Exact => Ok(q),
                    Floor::At(_) => q.truncate_to(floor),
                };
            }
            Some((degree, rp, rm)) => {
                debug_assert!(degree < 0, "the principal remainder must already vanish");
                let corr = HomComponent::new(
                    degree - m,
                    rp.mul(&inv_plus).neg(),
                    rm.mul(&inv_minus).neg(),
                );
                q.set_component(corr);
            }
        }
    }
    Err(nonterminating())
}

/// Cubic Newton iteration P ← 3P#P − 2P#P#P in the symbol algebra,
/// starting from an order-0 symbol whose principal part is idempotent.
/// The idempotency defect doubles its filtration level each step, so the
/// result is a projection exactly (to the requested floor).
pub fn newton_lift_symbol<S: Scalar>(
    x0: &ClassicalSymbol<S>,
    floor: Floor,
) -> Result<ClassicalSymbol<S>, CoreError> {
    if x0.order() != 0 {
        return Err(CoreError::Precondition(
            "projection lifting needs an order-0 symbol".into(),
        ));
    }
    let p = x0.principal();
    if !(p.plus.mul(&p.plus).eq_mode(&p.plus) && p.minus.mul(&p.minus).eq_mode(&p.minus)) {
        return Err(CoreError::Precondition(
            "the principal symbol is not idempotent".into(),
        ));
    }
    let max_iters = match floor {
        Floor::At(f) => (f.unsigned_abs().max(2).ilog2() as usize) + 4,
        Floor::Exact => 8,
    };
    let three = S::from_int(3);
    let two = S::from_int(2);
    let mut x = x0.clone();
    for _ in 0..max_iters {
        let xx = compose(&x, &x, floor)?;
        let defect = xx.sub(&x)?;
        if defect.is_zero_mode() {
            return x.truncate_to(floor.join(x.floor()));
        }
        let xxx = compose(&xx, &x, floor)?;
        x = xx.scale(&three).sub(&xxx.scale(&two))?;
    }
    Err(CoreError::Conditioning(
        "projection iteration did not converge; request a finite floor or check the input".into(),
    ))
}

/// Lift an idempotent principal symbol to a projection in the symbol
/// algebra with that principal part, exactly in exact mode.
pub fn algebraic_lift<S: Scalar>(
    p: &PrincipalProjection<S>,
    floor: Floor,
) -> Result<ClassicalSymbol<S>, CoreError> {
    if !p.is_idempotent() {
        return Err(CoreError::Precondition(
            "the candidate principal symbol is not idempotent".into(),
        ));
    }
    newton_lift_symbol(&p.embed(), floor)
}

/// Rerun the lift on P*#P, producing a self-adjoint projection with the
/// same principal symbol. Requires a self-adjoint principal part.
pub fn self_adjointize<S: Scalar>(
    p: &ClassicalSymbol<S>,
    floor: Floor,
) -> Result<ClassicalSymbol<S>, CoreError> {
    let principal = p.principal();
    if !(principal.plus.conj_transpose().eq_mode(&principal.plus)
        && principal.minus.conj_transpose().eq_mode(&principal.minus))
    {
        return Err(CoreError::Precondition(
            "self-adjointization needs a self-adjoint principal symbol".into(),
        ));
    }
    let defect = compose(p, p, floor)?.sub(p)?;
    if !defect.is_zero_mode() {
        return Err(CoreError::Precondition(
            "input of self_adjointize is not a projection to the requested floor".into(),
        ));
    }
    let pstar = adjoint(p, floor)?;
    let pstar_p = compose(&pstar, p, floor)?;
    newton_lift_symbol(&pstar_p, floor)
}

/// Trapezoid quadrature of the Riesz integral
/// P = (1/2πi) ∮_{|λ−1|=1/2} Q(λ) dλ with Q(λ) the parametrix of λ − P₁.
pub fn contour_lift<S: FloatScalar>(
    p1: &ClassicalSymbol<S>,
    nodes: usize,
    floor: Floor,
) -> Result<ClassicalSymbol<S>, CoreError> {
    if p1.order() != 0 {
        return Err(CoreError::Precondition(
            "contour lifting needs an order-0 symbol".into(),
        ));
    }
    if nodes < 4 {
        return Err(CoreError::Precondition(
            "contour quadrature needs at least 4 nodes".into(),
        ));
    }
    let f = match floor {
        Floor::At(f) => f,
        Floor::Exact => {
            return Err(CoreError::Precision {
                requested: "exact".into(),
                attainable: "any finite floor (quadrature output is float)".into(),
            })
        }
    };

    // Spectrum of the principal values must stay clear of the contour.
    let principal = p1.principal();
    let grid = (4 * (principal.plus.cutoff().max(principal.minus.cutoff()) as usize + 1)).max(16);
    for half in [&principal.plus, &principal.minus] {
        for gi in 0..grid {
            let x = 2.0 * std::f64::consts::PI * gi as f64 / grid as f64;
            let mat = half.eval(x);
            for ev in complex_eigenvalues(&mat)? {
                let dist = ((ev - C64::new(1.0, 0.0)).norm() - 0.5).abs();
                if dist < 0.05 {
                    return Err(CoreError::Conditioning(format!(
                        "eigenvalue {ev} of the principal symbol lies within 0.05 \
                         of the contour |λ−1| = 1/2"
                    )));
                }
            }
        }
    }
    if !(principal.plus.mul(&principal.plus).approx_eq(&principal.plus, 0.05)
        && principal.minus.mul(&principal.minus).approx_eq(&principal.minus, 0.05))
    {
        return Err(CoreError::Precondition(
            "the principal symbol is not idempotent".into(),
        ));
    }

    let k = p1.k();
    let one = ClassicalSymbol::one(k);
    let mut acc = ClassicalSymbol::zero(k, 0, Floor::At(f));
    for t in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * t as f64 / nodes as f64;
        let on_circle = C64::from_polar(0.5, theta);
        let lambda = S::from_c64(C64::new(1.0, 0.0) + on_circle);
        let a_t = one.scale(&lambda).sub(p1)?;
        let q_t = parametrix(&a_t, Floor::At(f))?;
        // (1/2πi)·Q·dλ with dλ = i·(e^{iθ}/2)·(2π/nodes)
        let w = S::from_c64(on_circle / nodes as f64);
        acc = acc.add(&q_t.scale(&w))?;
    }
    acc.truncate_to(Floor::At(f))
}

fn complex_eigenvalues(m: &Mat<C64>) -> Result<Vec<C64>, CoreError> {
    let k = m.dim();
    let dm = nalgebra::DMatrix::from_fn(k, k, |i, j| *m.get(i, j));
    let schur = nalgebra::linalg::Schur::try_new(dm, 1e-12, 10_000)
        .ok_or_else(|| CoreError::Conditioning("Schur decomposition did not converge".into()))?;
    let eigs = schur
        .eigenvalues()
        .ok_or_else(|| CoreError::Conditioning("eigenvalues not resolved".into()))?;
    Ok(eigs.iter().copied().collect())
}

/// Hermitian eigendecomposition: eigenvalues with an orthonormal
/// eigenbasis (column per eigenvalue).
fn hermitian_eigen(m: &Mat<C64>) -> (Vec<f64>, Vec<Vec<C64>>) {
    let k = m.dim();
    let dm = nalgebra::DMatrix::from_fn(k, k, |i, j| *m.get(i, j));
    let se = nalgebra::linalg::SymmetricEigen::new(dm);
    let vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
    let vecs: Vec<Vec<C64>> = (0..k)
        .map(|c| (0..k).map(|r| se.eigenvectors[(r, c)]).collect())
        .collect();
    (vals, vecs)
}

/// Spectral projection onto the positive eigenvalues of a Hermitian matrix.
fn positive_projector(m: &Mat<C64>) -> Result<Mat<C64>, CoreError> {
    let k = m.dim();
    let (vals, vecs) = hermitian_eigen(m);
    for v in &vals {
        if v.abs() < 1e-8 {
            return Err(CoreError::Ellipticity(format!(
                "eigenvalue {v:e} within 1e-8 of zero; the system is not elliptic"
            )));
        }
    }
    let mut p = Mat::zero(k);
    for (val, vec) in vals.iter().zip(&vecs) {
        if *val > 0.0 {
            let outer = Mat::from_fn(k, |i, j| vec[i] * vec[j].conj());
            p = p.add(&outer);
        }
    }
    Ok(p)
}

/// Principal symbol of the positive spectral projection of the
/// first-order self-adjoint system with symbol ξ·A(x) + B(x):
/// p(x, ±1) is the projection onto the positive eigenvalues of ±A(x),
/// sampled on a grid and fitted back to trigonometric polynomials.
pub fn positive_spectral_projection_symbol(
    a: &TrigPoly<C64>,
    b: &TrigPoly<C64>,
    grid: usize,
) -> Result<PrincipalProjection<C64>, CoreError> {
    if a.k() != b.k() {
        return Err(CoreError::DimensionMismatch(
            "A and B must share the matrix dimension".into(),
        ));
    }
    if !a.conj_transpose().approx_eq(a, 1e-10) || !b.conj_transpose().approx_eq(b, 1e-10) {
        return Err(CoreError::Precondition(
            "the system ξA + B must have self-adjoint coefficients".into(),
        ));
    }
    let grid = grid.max(4 * (a.cutoff() as usize + 1)).max(64);
    let mut plus_samples = Vec::with_capacity(grid);
    let mut minus_samples = Vec::with_capacity(grid);
    for gi in 0..grid {
        let x = 2.0 * std::f64::consts::PI * gi as f64 / grid as f64;
        let ax = a.eval(x);
        plus_samples.push(positive_projector(&ax)?);
        minus_samples.push(positive_projector(&ax.neg())?);
    }
    let plus = TrigPoly::fit_from_samples(&plus_samples, 1e-13);
    let minus = TrigPoly::fit_from_samples(&minus_samples, 1e-13);
    // The projection is analytic in x, so its Fourier coefficients decay
    // exponentially; verify the fit resolves it on the sample grid.
    for (gi, (ps, ms)) in plus_samples.iter().zip(&minus_samples).enumerate() {
        let x = 2.0 * std::f64::consts::PI * gi as f64 / grid as f64;
        if !plus.eval(x).approx_eq(ps, 1e-10) || !minus.eval(x).approx_eq(ms, 1e-10) {
            return Err(CoreError::Conditioning(
                "Fourier fit of the spectral projection misses 1e-10 on the grid; \
                 the spectral gap is too small for this grid size"
                    .into(),
            ));
        }
    }
    PrincipalProjection::new(plus, minus)
}
