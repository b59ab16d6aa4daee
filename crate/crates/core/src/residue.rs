//! The noncommutative residue on the circle.
//!
//! With counting measure on the two-point co-sphere and Lebesgue measure
//! dx on [0, 2π), the residue density of a symbol is
//! density(x) = tr a_{−1}(x, +1) + tr a_{−1}(x, −1), and the residue is
//! the mean of the density: the returned value r is the zeroth Fourier
//! coefficient, so the geometric residue is 2π·r. Keeping r avoids the
//! transcendental factor in exact mode.

use crate::error::CoreError;
use crate::scalar::Scalar;
use crate::symbol::{ClassicalSymbol, Floor};
use crate::trig::TrigPoly;

fn check_floor<S: Scalar>(a: &ClassicalSymbol<S>) -> Result<(), CoreError> {
    match a.floor() {
        Floor::Exact => Ok(()),
        Floor::At(f) if f <= -1 => Ok(()),
        Floor::At(f) => Err(CoreError::Precision {
            requested: "-1 (degree −1 component not determined)".into(),
            attainable: f.to_string(),
        }),
    }
}

/// The residue density as a scalar trigonometric polynomial.
pub fn wres_density<S: Scalar>(a: &ClassicalSymbol<S>) -> Result<TrigPoly<S>, CoreError> {
    check_floor(a)?;
    let c = a.component(-1);
    Ok(c.plus.trace().add(&c.minus.trace()))
}

/// The residue r: the mean of the density over the circle. The geometric
/// Wodzicki residue is 2π·r.
pub fn wres<S: Scalar>(a: &ClassicalSymbol<S>) -> Result<S, CoreError> {
    let density = wres_density(a)?;
    Ok(density.coeff(0).get(0, 0).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gauss_int, ExactScalar};
    use num_traits::{One, Zero};
    use crate::symbol::{compose, HomComponent};

    type Sym = ClassicalSymbol<ExactScalar>;

    fn e_ix(j: i64) -> TrigPoly<ExactScalar> {
        TrigPoly::scalar_mode(j, ExactScalar::one())
    }

    #[test]
    fn density_of_odd_symbol_vanishes() {
        // a = ξ^{-1}: values (1, −1), traces cancel.
        let a = Sym::homogeneous(HomComponent::new(
            -1,
            TrigPoly::identity(1),
            TrigPoly::identity(1).neg(),
        ));
        assert!(wres_density(&a).unwrap().is_zero());
        assert!(wres(&a).unwrap().is_zero());
    }

    #[test]
    fn density_of_abs_xi_inverse() {
        // a = |ξ|^{-1}·I_k → density ≡ 2k, r = 2k
        for k in 1..=3usize {
            let a = Sym::abs_xi_pow(k, -1);
            let d = wres_density(&a).unwrap();
            assert_eq!(
                d,
                TrigPoly::scalar_constant(gauss_int(2 * k as i64, 0))
            );
            assert_eq!(wres(&a).unwrap(), gauss_int(2 * k as i64, 0));
        }
    }

    #[test]
    fn density_with_oscillation_has_zero_mean() {
        // a = |ξ|^{-1} e^{ix} → density = 2 e^{ix}, r = 0
        let a = Sym::homogeneous(HomComponent::new(-1, e_ix(1), e_ix(1)));
        let d = wres_density(&a).unwrap();
        assert_eq!(d, e_ix(1).scale(&gauss_int(2, 0)));
        assert!(wres(&a).unwrap().is_zero());
    }

    #[test]
    fn commutator_residue_vanishes() {
        // wres([ξ, |ξ|^{-1}e^{ix}]) = 0 with density 2e^{ix}
        let xi = Sym::xi(1);
        let b = Sym::homogeneous(HomComponent::new(-1, e_ix(1), e_ix(1)));
        let floor = Floor::At(-2);
        let comm = compose(&xi, &b, floor)
            .unwrap()
            .sub(&compose(&b, &xi, floor).unwrap())
            .unwrap();
        let d = wres_density(&comm).unwrap();
        assert_eq!(d, e_ix(1).scale(&gauss_int(2, 0)));
        assert!(wres(&comm).unwrap().is_zero());
    }

    #[test]
    fn undetermined_density_is_refused() {
        let a = Sym::xi(1).truncate_to(Floor::At(0)).unwrap();
        assert!(matches!(
            wres_density(&a),
            Err(CoreError::Precision { .. })
        ));
    }

    #[test]
    fn linearity() {
        let a = Sym::abs_xi_pow(1, -1);
        let b = Sym::homogeneous(HomComponent::new(-1, e_ix(2), e_ix(-1)));
        let alpha = gauss_int::<ExactScalar>(3, -2);
        let beta = gauss_int::<ExactScalar>(-1, 5);
        let lhs = wres(&a.scale(&alpha).add(&b.scale(&beta)).unwrap()).unwrap();
        let rhs = alpha * wres(&a).unwrap() + beta * wres(&b).unwrap();
        assert_eq!(lhs, rhs);
    }
}
