//! Matrix jet rings `Mat(k) ⊗ F[t]/(t^N)` and their residue traces.
//!
//! The jet ring is the concrete filtered ring on which the
//! projection-trace theorem is verified exhaustively: the filtration is
//! by t-order, `L^{-j} = {A : A_0 = … = A_{j−1} = 0}`, and for every
//! `0 ≤ j < N` the functional τ_j(A) = tr(A_j) is a residue trace.

use crate::error::CoreError;
use crate::mat::Mat;
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

/// An element Σ_{j<N} A_j t^j of Mat(k) ⊗ F[t]/(t^N).
#[derive(Clone, PartialEq, Debug)]
pub struct MatrixJet<S> {
    k: usize,
    coeffs: Vec<Mat<S>>,
}

/// Which residue trace τ_j to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueTraceSpec {
    pub j: usize,
}

impl<S: Scalar> MatrixJet<S> {
    pub fn zero(k: usize, n_levels: usize) -> Self {
        assert!(n_levels > 0, "filtration depth must be positive");
        MatrixJet {
            k,
            coeffs: vec![Mat::zero(k); n_levels],
        }
    }

    pub fn identity(k: usize, n_levels: usize) -> Self {
        let mut a = MatrixJet::zero(k, n_levels);
        a.coeffs[0] = Mat::identity(k);
        a
    }

    pub fn from_coeffs(coeffs: Vec<Mat<S>>) -> Result<Self, CoreError> {
        if coeffs.is_empty() {
            return Err(CoreError::DepthMismatch("need at least one level".into()));
        }
        let k = coeffs[0].dim();
        if coeffs.iter().any(|m| m.dim() != k) {
            return Err(CoreError::DimensionMismatch(
                "all jet coefficients must share the matrix dimension".into(),
            ));
        }
        Ok(MatrixJet { k, coeffs })
    }

    /// The constant jet `m · t^0`.
    pub fn constant(m: Mat<S>, n_levels: usize) -> Self {
        let mut a = MatrixJet::zero(m.dim(), n_levels);
        a.coeffs[0] = m;
        a
    }

    /// The jet `m · t^level`.
    pub fn monomial(m: Mat<S>, level: usize, n_levels: usize) -> Self {
        assert!(level < n_levels, "level out of range");
        let mut a = MatrixJet::zero(m.dim(), n_levels);
        a.coeffs[level] = m;
        a
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_levels(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, level: usize) -> &Mat<S> {
        &self.coeffs[level]
    }

    fn check_compatible(&self, other: &Self) -> Result<(), CoreError> {
        if self.k != other.k {
            return Err(CoreError::DimensionMismatch(format!(
                "jet matrix dimensions differ: {} vs {}",
                self.k, other.k
            )));
        }
        if self.coeffs.len() != other.coeffs.len() {
            return Err(CoreError::DepthMismatch(format!(
                "jet filtration depths differ: {} vs {}",
                self.coeffs.len(),
                other.coeffs.len()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CoreError> {
        self.check_compatible(other)?;
        Ok(MatrixJet {
            k: self.k,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CoreError> {
        self.check_compatible(other)?;
        Ok(MatrixJet {
            k: self.k,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        })
    }

    pub fn neg(&self) -> Self {
        MatrixJet {
            k: self.k,
            coeffs: self.coeffs.iter().map(Mat::neg).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        MatrixJet {
            k: self.k,
            coeffs: self.coeffs.iter().map(|m| m.scale(s)).collect(),
        }
    }

    /// Truncated product: (AB)_m = Σ_{i+j=m} A_i B_j.
    pub fn mul(&self, other: &Self) -> Result<Self, CoreError> {
        self.check_compatible(other)?;
        let n = self.coeffs.len();
        let mut out = MatrixJet::zero(self.k, n);
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, CoreError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn conj_transpose(&self) -> Self {
        MatrixJet {
            k: self.k,
            coeffs: self.coeffs.iter().map(Mat::conj_transpose).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Mat::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Mat::max_abs).fold(0.0, f64::max)
    }

    /// Filtration level: smallest j with A_j ≠ 0, or N when A = 0.
    pub fn level(&self) -> usize {
        self.coeffs
            .iter()
            .position(|m| !m.is_zero())
            .unwrap_or(self.coeffs.len())
    }

    /// Level with a float cutoff: coefficients of norm ≤ tol count as zero.
    pub fn level_with_tol(&self, tol: f64) -> usize {
        self.coeffs
            .iter()
            .position(|m| m.max_abs() > tol)
            .unwrap_or(self.coeffs.len())
    }

    pub fn is_idempotent(&self) -> bool {
        match self.mul(self) {
            Ok(sq) => {
                let defect = sq.sub(self).expect("same shape");
                if S::EXACT {
                    defect.is_zero()
                } else {
                    defect.max_abs() <= crate::config::FLOAT_OP_TOL
                }
            }
            Err(_) => false,
        }
    }

    /// Inverse of a jet with invertible constant term: write
    /// A = A_0 (1 + T) with T nilpotent and expand (1 + T)^{-1} = Σ (−T)^m,
    /// a finite sum in the truncated ring.
    pub fn try_inverse(&self) -> Option<Self> {
        let n = self.coeffs.len();
        let head_inv = self.coeffs[0].try_inverse()?;
        let head_inv_jet = MatrixJet::constant(head_inv, n);
        let tail = head_inv_jet
            .mul(self)
            .ok()?
            .sub(&MatrixJet::identity(self.k, n))
            .ok()?;
        let mut inv_unipotent = MatrixJet::identity(self.k, n);
        let mut term = MatrixJet::identity(self.k, n);
        for _ in 1..n {
            term = term.mul(&tail).ok()?.neg();
            if term.is_zero() {
                break;
            }
            inv_unipotent = inv_unipotent.add(&term).ok()?;
        }
        inv_unipotent.mul(&head_inv_jet).ok()
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "k": self.k,
            "n_levels": self.coeffs.len(),
            "coeffs": self.coeffs.iter().map(Mat::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, pointer: &str) -> Result<Self, CoreError> {
        let obj = v
            .as_object()
            .ok_or_else(|| CoreError::parse(pointer, "expected a MatrixJet object"))?;
        let k = obj
            .get("k")
            .and_then(|k| k.as_u64())
            .ok_or_else(|| CoreError::parse(format!("{pointer}/k"), "expected an integer"))?
            as usize;
        let n = obj
            .get("n_levels")
            .and_then(|n| n.as_u64())
            .ok_or_else(|| CoreError::parse(format!("{pointer}/n_levels"), "expected an integer"))?
            as usize;
        if n == 0 {
            return Err(CoreError::parse(
                format!("{pointer}/n_levels"),
                "filtration depth must be positive",
            ));
        }
        let coeffs = obj
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| CoreError::parse(format!("{pointer}/coeffs"), "expected an array"))?;
        if coeffs.len() != n {
            return Err(CoreError::parse(
                format!("{pointer}/coeffs"),
                format!("expected {n} levels, got {}", coeffs.len()),
            ));
        }
        let mut out = Vec::with_capacity(n);
        for (i, c) in coeffs.iter().enumerate() {
            let m = Mat::from_json(c, &format!("{pointer}/coeffs/{i}"))?;
            if m.dim() != k {
                return Err(CoreError::parse(
                    format!("{pointer}/coeffs/{i}"),
                    format!("expected a {k}×{k} matrix"),
                ));
            }
            out.push(m);
        }
        MatrixJet::from_coeffs(out)
    }
}

/// τ_j(A) = tr(A_j). Linear, vanishes on commutators and on every jet of
/// filtration level > j.
pub fn residue_trace<S: Scalar>(a: &MatrixJet<S>, spec: ResidueTraceSpec) -> Result<S, CoreError> {
    if spec.j >= a.n_levels() {
        return Err(CoreError::Precondition(format!(
            "trace index {} out of range for depth {}",
            spec.j,
            a.n_levels()
        )));
    }
    Ok(a.coeff(spec.j).trace())
}

/// Lift an approximate idempotent (X² − X of level ≥ 1) to an exact
/// idempotent of the truncated ring with the same principal part,
/// by the cubic iteration X ← 3X² − 2X³. Each step squares the level of
/// the defect X² − X, so ⌈log₂ N⌉ + 1 steps suffice.
pub fn newton_idempotent_lift<S: Scalar>(x0: &MatrixJet<S>) -> Result<MatrixJet<S>, CoreError> {
    let defect = x0.mul(x0)?.sub(x0)?;
    let defect_level = if S::EXACT {
        defect.level()
    } else {
        defect.level_with_tol(crate::config::FLOAT_OP_TOL)
    };
    if defect_level == 0 {
        return Err(CoreError::Precondition(
            "X₀² − X₀ has filtration level 0: X₀ is not idempotent modulo L⁻¹".into(),
        ));
    }
    let n = x0.n_levels();
    let steps = (usize::BITS - (n - 1).leading_zeros()) as usize + 1;
    let mut x = x0.clone();
    for _ in 0..steps {
        let x2 = x.mul(&x)?;
        let x3 = x2.mul(&x)?;
        x = x2.scale(&S::from_int(3)).sub(&x3.scale(&S::from_int(2)))?;
    }
    Ok(x)
}

/// The corner decomposition of R = P̃ − P with respect to P:
/// A = PRP, B = PR(1−P), C = (1−P)RP, D = (1−P)R(1−P).
pub fn abcd_decompose<S: Scalar>(
    p: &MatrixJet<S>,
    ptilde: &MatrixJet<S>,
) -> Result<(MatrixJet<S>, MatrixJet<S>, MatrixJet<S>, MatrixJet<S>), CoreError> {
    if !p.is_idempotent() {
        return Err(CoreError::Precondition("P is not idempotent".into()));
    }
    if !ptilde.is_idempotent() {
        return Err(CoreError::Precondition("P̃ is not idempotent".into()));
    }
    let r = ptilde.sub(p)?;
    let level = if S::EXACT {
        r.level()
    } else {
        r.level_with_tol(crate::config::FLOAT_OP_TOL)
    };
    if level == 0 {
        return Err(CoreError::Precondition(
            "P̃ − P has filtration level 0; the decomposition needs P̃ − P ∈ L⁻¹".into(),
        ));
    }
    let one = MatrixJet::identity(p.k(), p.n_levels());
    let q = one.sub(p)?;
    let a = p.mul(&r)?.mul(p)?;
    let b = p.mul(&r)?.mul(&q)?;
    let c = q.mul(&r)?.mul(p)?;
    let d = q.mul(&r)?.mul(&q)?;
    Ok((a, b, c, d))
}

/// Coefficients c_1..c_ℓ of the power-series solution x(y) of
/// x² + x + y = 0 with x(0) = 0; c_k = −Catalan(k−1).
pub fn expansion_coefficients<S: Scalar>(ell: usize) -> Result<Vec<S>, CoreError> {
    if ell == 0 {
        return Err(CoreError::Precondition(
            "expansion order must be at least 1".into(),
        ));
    }
    Ok(catalan_numbers(ell)
        .into_iter()
        .map(|c| -S::from_rational_parts(&BigRational::from_integer(c), &BigRational::zero()))
        .collect())
}

/// Catalan(0), …, Catalan(n−1) via Cat(m+1) = Cat(m)·2(2m+1)/(m+2).
fn catalan_numbers(n: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n);
    let mut c = BigInt::one();
    for m in 0..n {
        out.push(c.clone());
        c = c * BigInt::from(2 * (2 * m + 1)) / BigInt::from(m + 2);
    }
    out
}

/// Full verification record for a pair of projections with common
/// principal part.
#[derive(Clone, Debug)]
pub struct TraceInvarianceReport<S> {
    /// A² + A + BC (must be zero).
    pub identity_a_residual: MatrixJet<S>,
    /// D² − D + CB (must be zero).
    pub identity_d_residual: MatrixJet<S>,
    /// Level of A + D − Σ_k c_k [B, (CB)^{k−1}C] for each ℓ = 1..=ℓ_max,
    /// paired with the required minimum 2 + ℓ.
    pub commutator_defect_levels: Vec<(usize, usize, usize)>,
    pub tau_p: S,
    pub tau_ptilde: S,
    pub difference: S,
}

impl<S: Scalar> TraceInvarianceReport<S> {
    pub fn passes(&self) -> bool {
        let zero_ok = |j: &MatrixJet<S>| {
            if S::EXACT {
                j.is_zero()
            } else {
                j.max_abs() <= crate::config::FLOAT_OP_TOL
            }
        };
        let diff_ok = if S::EXACT {
            self.difference.is_zero()
        } else {
            self.difference.abs() <= crate::config::FLOAT_OP_TOL
        };
        zero_ok(&self.identity_a_residual)
            && zero_ok(&self.identity_d_residual)
            && diff_ok
            && self
                .commutator_defect_levels
                .iter()
                .all(|(_, level, required)| level >= required)
    }
}

/// Check, for one trace index j, that τ_j takes the same value on two
/// projections with P̃ − P ∈ L⁻¹, together with the algebraic identities
/// that drive the proof.
pub fn verify_projection_trace_invariance<S: Scalar>(
    p: &MatrixJet<S>,
    ptilde: &MatrixJet<S>,
    spec: ResidueTraceSpec,
) -> Result<TraceInvarianceReport<S>, CoreError> {
    let (a, b, c, d) = abcd_decompose(p, ptilde)?;
    let identity_a_residual = a.mul(&a)?.add(&a)?.add(&b.mul(&c)?)?;
    let identity_d_residual = d.mul(&d)?.sub(&d)?.add(&c.mul(&b)?)?;

    let n = p.n_levels();
    let mut commutator_defect_levels = Vec::new();
    if n >= 3 {
        let ell_max = n - 2;
        let coeffs: Vec<S> = expansion_coefficients(ell_max)?;
        let bc = b.mul(&c)?;
        let cb = c.mul(&b)?;
        for ell in 1..=ell_max {
            // A + D − Σ_{k≤ℓ} c_k [B, (CB)^{k−1} C]
            let mut acc = a.add(&d)?;
            let mut cb_pow = MatrixJet::identity(p.k(), n); // (CB)^{k−1}
            for ck in coeffs.iter().take(ell) {
                let bracket = b.mul(&cb_pow.mul(&c)?)?.sub(&cb_pow.mul(&c)?.mul(&b)?)?;
                acc = acc.sub(&bracket.scale(ck))?;
                cb_pow = cb_pow.mul(&cb)?;
            }
            commutator_defect_levels.push((ell, acc.level(), 2 + ell));
            // Also the one-sided expansions from the proof:
            // A − Σ c_k (BC)^k and −D − Σ c_k (CB)^k have level ≥ 2 + ℓ.
            let mut a_defect = a.clone();
            let mut d_defect = d.neg();
            let mut bc_pow = MatrixJet::identity(p.k(), n);
            for ck in coeffs.iter().take(ell) {
                bc_pow = bc_pow.mul(&bc)?;
                a_defect = a_defect.sub(&bc_pow.scale(ck))?;
            }
            let mut cb_pow2 = MatrixJet::identity(p.k(), n);
            for ck in coeffs.iter().take(ell) {
                cb_pow2 = cb_pow2.mul(&cb)?;
                d_defect = d_defect.sub(&cb_pow2.scale(ck))?;
            }
            commutator_defect_levels.push((ell, a_defect.level().min(d_defect.level()), 2 + ell));
        }
    }

    let tau_p = residue_trace(p, spec)?;
    let tau_ptilde = residue_trace(ptilde, spec)?;
    let difference = tau_ptilde.clone() - tau_p.clone();
    Ok(TraceInvarianceReport {
        identity_a_residual,
        identity_d_residual,
        commutator_defect_levels,
        tau_p,
        tau_ptilde,
        difference,
    })
}
