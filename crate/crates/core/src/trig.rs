//! Matrix-valued truncated Fourier series on the circle.
//!
//! A `TrigPoly` is a finite sum Σ_j C_j e^{ijx} with k×k matrix
//! coefficients. Addition, multiplication (coefficient convolution),
//! the derivative D_x = −i ∂_x and pointwise conjugate transpose are
//! exact over an exact scalar field. Products grow the cutoff J
//! additively; coefficients beyond the global cap ([`crate::config::cap_j`])
//! are dropped and the result carries a `truncated` flag.

use crate::config;
use crate::error::CoreError;
use crate::mat::Mat;
use crate::scalar::{FloatScalar, Scalar, C64};
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Debug)]
pub struct TrigPoly<S> {
    k: usize,
    coeffs: BTreeMap<i64, Mat<S>>,
    truncated: bool,
}

impl<S: Scalar> TrigPoly<S> {
    pub fn zero(k: usize) -> Self {
        TrigPoly {
            k,
            coeffs: BTreeMap::new(),
            truncated: false,
        }
    }

    /// The constant function with value `m`.
    pub fn constant(m: Mat<S>) -> Self {
        let k = m.dim();
        let mut p = TrigPoly::zero(k);
        p.add_coeff(0, m);
        p
    }

    pub fn identity(k: usize) -> Self {
        TrigPoly::constant(Mat::identity(k))
    }

    /// The single mode `m · e^{ijx}`.
    pub fn mode(j: i64, m: Mat<S>) -> Self {
        let k = m.dim();
        let mut p = TrigPoly::zero(k);
        p.add_coeff(j, m);
        p
    }

    /// Scalar (k = 1) constant.
    pub fn scalar_constant(s: S) -> Self {
        TrigPoly::constant(Mat::from_vec(1, vec![s]).expect("1x1"))
    }

    /// Scalar (k = 1) mode `s · e^{ijx}`.
    pub fn scalar_mode(j: i64, s: S) -> Self {
        TrigPoly::mode(j, Mat::from_vec(1, vec![s]).expect("1x1"))
    }

    /// cos(x) · I_k, exactly (e^{ix} + e^{−ix})/2.
    pub fn cos_identity(k: usize) -> Self {
        let half = Mat::identity(k).scale(&S::from_ratio(1, 2));
        let mut p = TrigPoly::zero(k);
        p.add_coeff(1, half.clone());
        p.add_coeff(-1, half);
        p
    }

    /// sin(x) · I_k, exactly (e^{ix} − e^{−ix})/(2i).
    pub fn sin_identity(k: usize) -> Self {
        // 1/(2i) = -i/2
        let c = S::from_ratio(-1, 2) * S::i();
        let m = Mat::identity(k).scale(&c);
        let mut p = TrigPoly::zero(k);
        p.add_coeff(1, m.clone());
        p.add_coeff(-1, m.neg());
        p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Largest |j| with a stored coefficient.
    pub fn cutoff(&self) -> i64 {
        self.coeffs.keys().map(|j| j.abs()).max().unwrap_or(0)
    }

    /// True when some product dropped coefficients beyond the cap.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn coeff(&self, j: i64) -> Mat<S> {
        self.coeffs
            .get(&j)
            .cloned()
            .unwrap_or_else(|| Mat::zero(self.k))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&i64, &Mat<S>)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|m| m.is_zero())
    }

    fn add_coeff(&mut self, j: i64, m: Mat<S>) {
        if m.is_zero() {
            return;
        }
        match self.coeffs.remove(&j) {
            Some(prev) => {
                let sum = prev.add(&m);
                if !sum.is_zero() {
                    self.coeffs.insert(j, sum);
                }
            }
            None => {
                self.coeffs.insert(j, m);
            }
        }
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, m| !m.is_zero());
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k, "TrigPoly dimension mismatch");
        let mut out = self.clone();
        out.truncated |= other.truncated;
        for (j, m) in &other.coeffs {
            out.add_coeff(*j, m.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TrigPoly {
            k: self.k,
            coeffs: self.coeffs.iter().map(|(j, m)| (*j, m.neg())).collect(),
            truncated: self.truncated,
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = TrigPoly {
            k: self.k,
            coeffs: self.coeffs.iter().map(|(j, m)| (*j, m.scale(s))).collect(),
            truncated: self.truncated,
        };
        out.prune();
        out
    }

    /// Pointwise product. The cutoff grows additively; modes beyond the
    /// global cap are dropped and flagged.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k, "TrigPoly dimension mismatch");
        let cap = config::cap_j();
        let mut out = TrigPoly::zero(self.k);
        out.truncated = self.truncated || other.truncated;
        for (j1, m1) in &self.coeffs {
            for (j2, m2) in &other.coeffs {
                let j = j1 + j2;
                if j.abs() > cap {
                    out.truncated = true;
                    continue;
                }
                out.add_coeff(j, m1.mul(m2));
            }
        }
        out
    }

    /// Multiply by a scalar trig polynomial (k = 1 factor on a k×k series).
    pub fn mul_scalar_poly(&self, s: &TrigPoly<S>) -> Self {
        assert_eq!(s.k, 1, "scalar factor must be 1×1");
        self.mul(&s.promote(self.k))
    }

    /// Embed a scalar series as `f(x) · I_k`.
    pub fn promote(&self, k: usize) -> TrigPoly<S> {
        assert_eq!(self.k, 1, "promote applies to scalar series");
        TrigPoly {
            k,
            coeffs: self
                .coeffs
                .iter()
                .map(|(j, m)| (*j, Mat::identity(k).scale(m.get(0, 0))))
                .collect(),
            truncated: self.truncated,
        }
    }

    /// D_x = −i ∂_x: multiplies the coefficient of e^{ijx} by j.
    pub fn dx(&self) -> Self {
        let mut out = TrigPoly {
            k: self.k,
            coeffs: self
                .coeffs
                .iter()
                .map(|(j, m)| (*j, m.scale(&S::from_int(*j))))
                .collect(),
            truncated: self.truncated,
        };
        out.prune();
        out
    }

    /// Pointwise transpose (no conjugation, modes unchanged).
    pub fn transpose_poly(&self) -> Self {
        TrigPoly {
            k: self.k,
            coeffs: self
                .coeffs
                .iter()
                .map(|(j, m)| (*j, m.transpose()))
                .collect(),
            truncated: self.truncated,
        }
    }

    /// Pointwise conjugate transpose: coefficient of e^{ijx} becomes the
    /// conjugate transpose of the coefficient of e^{−ijx}.
    pub fn conj_transpose(&self) -> Self {
        TrigPoly {
            k: self.k,
            coeffs: self
                .coeffs
                .iter()
                .map(|(j, m)| (-*j, m.conj_transpose()))
                .collect(),
            truncated: self.truncated,
        }
    }

    /// Matrix trace, pointwise: a scalar series.
    pub fn trace(&self) -> TrigPoly<S> {
        let mut out = TrigPoly::zero(1);
        out.truncated = self.truncated;
        for (j, m) in &self.coeffs {
            out.add_coeff(*j, Mat::from_vec(1, vec![m.trace()]).expect("1x1"));
        }
        out
    }

    /// The (r, c) entry as a scalar series.
    pub fn entry(&self, r: usize, c: usize) -> TrigPoly<S> {
        let mut out = TrigPoly::zero(1);
        out.truncated = self.truncated;
        for (j, m) in &self.coeffs {
            out.add_coeff(*j, Mat::from_vec(1, vec![m.get(r, c).clone()]).expect("1x1"));
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|m| m.max_abs()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.k == other.k && self.sub(other).max_abs_coeff() <= tol
    }

    /// Exact in exact mode, within [`config::FLOAT_OP_TOL`] otherwise.
    pub fn eq_mode(&self, other: &Self) -> bool {
        if S::EXACT {
            self.sub(other).is_zero()
        } else {
            self.approx_eq(other, config::FLOAT_OP_TOL)
        }
    }

    /// Determinant, pointwise, as a scalar series (Laplace expansion;
    /// fine for the small k used here).
    pub fn det(&self) -> TrigPoly<S> {
        let k = self.k;
        if k == 1 {
            return self.entry(0, 0);
        }
        let mut acc = TrigPoly::zero(1);
        for c in 0..k {
            let minor = self.minor(0, c);
            let term = self.entry(0, c).mul(&minor.det());
            acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }

    fn minor(&self, row: usize, col: usize) -> TrigPoly<S> {
        let k = self.k;
        let mut out = TrigPoly::zero(k - 1);
        out.truncated = self.truncated;
        for (j, m) in &self.coeffs {
            let sub = Mat::from_fn(k - 1, |i, c| {
                let si = if i < row { i } else { i + 1 };
                let sc = if c < col { c } else { c + 1 };
                m.get(si, sc).clone()
            });
            out.add_coeff(*j, sub);
        }
        out.prune();
        out
    }

    /// True when this scalar series is a unit of the trig-polynomial ring,
    /// i.e. a single mode c·e^{ijx} with c ≠ 0.
    pub fn is_unit_scalar(&self) -> bool {
        self.k == 1 && self.coeffs.len() == 1 && !self.is_zero()
    }

    /// Pointwise inverse. Exists in the trig-polynomial ring exactly when
    /// the determinant is a single nonzero mode; otherwise the inverse is
    /// an infinite series and an ellipticity error is returned.
    pub fn pointwise_inverse(&self) -> Result<Self, CoreError> {
        let det = self.det();
        if !det.is_unit_scalar() {
            return Err(CoreError::Ellipticity(format!(
                "pointwise inverse requires a unit determinant (single Fourier mode); \
                 det has {} modes",
                det.coeffs.len()
            )));
        }
        let (j, c) = det.coeffs.iter().next().map(|(j, m)| (*j, m.get(0, 0).clone())).expect("unit");
        let cinv = c.try_inv().ok_or_else(|| {
            CoreError::Ellipticity("determinant mode is zero".into())
        })?;
        let det_inv = TrigPoly::scalar_mode(-j, cinv);
        let k = self.k;
        if k == 1 {
            return Ok(det_inv);
        }
        // adjugate: adj[i][j] = (−1)^{i+j} det(minor(j, i))
        let mut adj = TrigPoly::zero(k);
        for i in 0..k {
            for j2 in 0..k {
                let cofactor = self.minor(j2, i).det();
                let signed = if (i + j2) % 2 == 0 { cofactor } else { cofactor.neg() };
                for (m, v) in &signed.coeffs {
                    let mut mat = Mat::zero(k);
                    mat.set(i, j2, v.get(0, 0).clone());
                    adj.add_coeff(*m, mat);
                }
            }
        }
        Ok(adj.mul_scalar_poly(&det_inv))
    }

    /// Pointwise unitarity as a coefficient identity: f·f† = I.
    pub fn is_pointwise_unitary(&self) -> bool {
        self.mul(&self.conj_transpose())
            .eq_mode(&TrigPoly::identity(self.k))
    }

    /// For a scalar series: pointwise |g| = 1, i.e. g·ḡ = 1.
    pub fn is_unimodular_scalar(&self) -> bool {
        self.k == 1 && self.mul(&self.conj_transpose()).eq_mode(&TrigPoly::identity(1))
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "J": self.cutoff(),
            "coeffs": self
                .coeffs
                .iter()
                .map(|(j, m)| serde_json::json!({ "j": j, "matrix": m.to_json() }))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, k: usize, pointer: &str) -> Result<Self, CoreError> {
        let obj = v
            .as_object()
            .ok_or_else(|| CoreError::parse(pointer, "expected a TrigPoly object"))?;
        let coeffs = obj
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| CoreError::parse(format!("{pointer}/coeffs"), "expected an array"))?;
        let mut out = TrigPoly::zero(k);
        for (idx, item) in coeffs.iter().enumerate() {
            let ptr = format!("{pointer}/coeffs/{idx}");
            let io = item
                .as_object()
                .ok_or_else(|| CoreError::parse(&ptr, "expected {j, matrix}"))?;
            let j = io
                .get("j")
                .and_then(|j| j.as_i64())
                .ok_or_else(|| CoreError::parse(format!("{ptr}/j"), "expected an integer"))?;
            let m = Mat::from_json(
                io.get("matrix")
                    .ok_or_else(|| CoreError::parse(&ptr, "missing field `matrix`"))?,
                &format!("{ptr}/matrix"),
            )?;
            if m.dim() != k {
                return Err(CoreError::parse(
                    format!("{ptr}/matrix"),
                    format!("expected a {k}×{k} matrix, got {}×{}", m.dim(), m.dim()),
                ));
            }
            out.add_coeff(j, m);
        }
        Ok(out)
    }
}

impl<S: FloatScalar> TrigPoly<S> {
    /// Evaluate at a point of the circle (float mode).
    pub fn eval(&self, x: f64) -> Mat<C64> {
        let mut acc = Mat::zero(self.k);
        for (j, m) in &self.coeffs {
            let phase = C64::from_polar(1.0, *j as f64 * x);
            let term = Mat::from_fn(self.k, |r, c| m.get(r, c).approx() * phase);
            acc = acc.add(&term);
        }
        acc
    }
}

impl TrigPoly<C64> {
    /// Least-squares-free Fourier fit from equispaced samples: the DFT of
    /// `samples[m] = f(2πm/M)`, keeping modes with |j| < M/2 whose
    /// coefficient norm exceeds `threshold`.
    pub fn fit_from_samples(samples: &[Mat<C64>], threshold: f64) -> Self {
        let m_len = samples.len();
        assert!(m_len > 0, "need at least one sample");
        let k = samples[0].dim();
        let half = (m_len as i64 - 1) / 2;
        let mut out = TrigPoly::zero(k);
        for j in -half..=half {
            let mut acc = Mat::zero(k);
            for (m, s) in samples.iter().enumerate() {
                let x = 2.0 * std::f64::consts::PI * m as f64 / m_len as f64;
                let phase = C64::from_polar(1.0 / m_len as f64, -(j as f64) * x);
                acc = acc.add(&s.scale(&phase));
            }
            if acc.max_abs() > threshold {
                out.add_coeff(j, acc);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gauss_int, ExactScalar};
    use num_traits::One;

    fn e_ix() -> TrigPoly<ExactScalar> {
        TrigPoly::scalar_mode(1, ExactScalar::one())
    }

    #[test]
    fn dx_multiplies_by_j() {
        // D_x e^{ijx} = j e^{ijx}
        let f = TrigPoly::scalar_mode(3, gauss_int::<ExactScalar>(1, 0));
        assert_eq!(f.dx(), f.scale(&gauss_int(3, 0)));
        let c = TrigPoly::scalar_constant(gauss_int::<ExactScalar>(5, 0));
        assert!(c.dx().is_zero());
    }

    #[test]
    fn product_convolves() {
        // e^{ix} · e^{ix} = e^{2ix}
        let f = e_ix();
        assert_eq!(f.mul(&f), TrigPoly::scalar_mode(2, ExactScalar::one()));
    }

    #[test]
    fn cos_sin_circle_identity() {
        let c = TrigPoly::<ExactScalar>::cos_identity(1);
        let s = TrigPoly::<ExactScalar>::sin_identity(1);
        let one = TrigPoly::identity(1);
        assert_eq!(c.mul(&c).add(&s.mul(&s)), one);
    }

    #[test]
    fn conj_transpose_flips_modes() {
        let f = e_ix();
        assert_eq!(f.conj_transpose(), TrigPoly::scalar_mode(-1, ExactScalar::one()));
        assert!(f.is_unimodular_scalar());
    }

    #[test]
    fn rotation_matrix_is_special_unitary() {
        let r = rotation::<ExactScalar>();
        assert!(r.is_pointwise_unitary());
        assert_eq!(r.det(), TrigPoly::identity(1).entry(0, 0));
    }

    /// R(x) = [[cos x, −sin x], [sin x, cos x]] with exact entries.
    fn rotation<S: Scalar>() -> TrigPoly<S> {
        let c = TrigPoly::<S>::cos_identity(1);
        let s = TrigPoly::<S>::sin_identity(1);
        let mut out = TrigPoly::zero(2);
        for (j, m) in c.coeffs() {
            let mut mat = Mat::zero(2);
            mat.set(0, 0, m.get(0, 0).clone());
            mat.set(1, 1, m.get(0, 0).clone());
            out.add_coeff(*j, mat);
        }
        for (j, m) in s.coeffs() {
            let mut mat = Mat::zero(2);
            mat.set(0, 1, -m.get(0, 0).clone());
            mat.set(1, 0, m.get(0, 0).clone());
            out.add_coeff(*j, mat);
        }
        out
    }

    #[test]
    fn pointwise_inverse_of_rotation() {
        let r = rotation::<ExactScalar>();
        let rinv = r.pointwise_inverse().unwrap();
        assert_eq!(r.mul(&rinv), TrigPoly::identity(2));
        assert_eq!(rinv, r.conj_transpose());
    }

    #[test]
    fn pointwise_inverse_rejects_non_unit_det() {
        // 2 + cos(x) is everywhere nonzero but its reciprocal is not a
        // trig polynomial.
        let f = TrigPoly::<ExactScalar>::cos_identity(1)
            .add(&TrigPoly::scalar_constant(gauss_int(2, 0)));
        assert!(matches!(
            f.pointwise_inverse(),
            Err(CoreError::Ellipticity(_))
        ));
    }

    #[test]
    fn truncation_flag_set_beyond_cap() {
        let big = TrigPoly::scalar_mode(40, gauss_int::<ExactScalar>(1, 0));
        let prod = big.mul(&big); // mode 80 > default cap 64
        assert!(prod.is_truncated());
        assert!(prod.is_zero());
    }

    #[test]
    fn fit_recovers_exact_modes() {
        let f = TrigPoly::mode(2, Mat::<C64>::identity(1).scale(&C64::new(0.5, -0.25)));
        let samples: Vec<Mat<C64>> = (0..32)
            .map(|m| f.eval(2.0 * std::f64::consts::PI * m as f64 / 32.0))
            .collect();
        let fit = TrigPoly::fit_from_samples(&samples, 1e-12);
        assert!(fit.approx_eq(&f, 1e-12));
    }
}
