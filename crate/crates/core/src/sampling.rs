//! Seeded random generators for the verification suites.
//!
//! Everything samples through a caller-provided RNG so trials are
//! reproducible; the suite drivers hand each trial its own ChaCha stream.
//! Exact-mode objects are built from small Gaussian rationals, unitary
//! frames from Pythagorean units and exact rotation blocks, so every
//! structural identity they satisfy is literal.

use crate::jet::MatrixJet;
use crate::mat::Mat;
use crate::projection::PrincipalProjection;
use crate::scalar::Scalar;
use crate::symbol::{ClassicalSymbol, Floor, HomComponent};
use crate::trig::TrigPoly;
use rand::Rng;

/// Small Gaussian rational with numerators in [−bound, bound] and
/// denominators in {1, 2, 3}.
pub fn small_scalar<S: Scalar>(rng: &mut impl Rng, bound: i64) -> S {
    let re_n = rng.gen_range(-bound..=bound);
    let im_n = rng.gen_range(-bound..=bound);
    let re_d = rng.gen_range(1..=3);
    let im_d = rng.gen_range(1..=3);
    S::from_ratio(re_n, re_d) + S::i() * S::from_ratio(im_n, im_d)
}

pub fn small_matrix<S: Scalar>(rng: &mut impl Rng, k: usize, bound: i64) -> Mat<S> {
    Mat::from_fn(k, |_, _| small_scalar(rng, bound))
}

/// Random trig polynomial with modes |j| ≤ j_max, each kept with
/// probability 2/3.
pub fn small_trig<S: Scalar>(rng: &mut impl Rng, k: usize, j_max: i64, bound: i64) -> TrigPoly<S> {
    let mut out = TrigPoly::zero(k);
    for j in -j_max..=j_max {
        if rng.gen_range(0..3) < 2 {
            out = out.add(&TrigPoly::mode(j, small_matrix(rng, k, bound)));
        }
    }
    out
}

/// Pointwise self-adjoint trig polynomial: C_{-j} = C_j†.
pub fn hermitian_trig<S: Scalar>(
    rng: &mut impl Rng,
    k: usize,
    j_max: i64,
    bound: i64,
) -> TrigPoly<S> {
    let mut out = TrigPoly::zero(k);
    let c0 = small_matrix::<S>(rng, k, bound);
    out = out.add(&TrigPoly::constant(
        c0.add(&c0.conj_transpose()).scale(&S::from_ratio(1, 2)),
    ));
    for j in 1..=j_max {
        if rng.gen_range(0..3) < 2 {
            let c = small_matrix::<S>(rng, k, bound);
            out = out.add(&TrigPoly::mode(j, c.clone()));
            out = out.add(&TrigPoly::mode(-j, c.conj_transpose()));
        }
    }
    out
}

/// Random truncated symbol: components from degree `order` down to
/// `floor`, validity floor At(floor).
pub fn small_symbol<S: Scalar>(
    rng: &mut impl Rng,
    k: usize,
    j_max: i64,
    order: i64,
    floor: i64,
) -> ClassicalSymbol<S> {
    let mut out = ClassicalSymbol::zero(k, order, Floor::At(floor));
    for d in floor..=order {
        out.set_component(HomComponent::new(
            d,
            small_trig(rng, k, j_max, 3),
            small_trig(rng, k, j_max, 3),
        ));
    }
    out
}

/// Order −1 and below junk with exactly known components, used to
/// perturb order-0 embeddings before lifting.
pub fn junk_below_order_zero<S: Scalar>(
    rng: &mut impl Rng,
    k: usize,
    j_max: i64,
    depth: i64,
) -> ClassicalSymbol<S> {
    let mut out = ClassicalSymbol::zero(k, 0, Floor::Exact);
    for d in (-depth.max(1))..=-1 {
        if rng.gen_bool(0.8) {
            out.set_component(HomComponent::new(
                d,
                small_trig(rng, k, j_max, 2),
                small_trig(rng, k, j_max, 2),
            ));
        }
    }
    out
}

/// Exactly unimodular Gaussian rationals (Pythagorean units).
const UNIT_POOL: &[(i64, i64, i64)] = &[
    // (re_num, im_num, den) with re² + im² = den²
    (1, 0, 1),
    (0, 1, 1),
    (-1, 0, 1),
    (0, -1, 1),
    (3, 4, 5),
    (3, -4, 5),
    (-3, 4, 5),
    (4, 3, 5),
    (5, 12, 13),
    (12, -5, 13),
    (8, 15, 17),
];

pub fn unimodular_unit<S: Scalar>(rng: &mut impl Rng) -> S {
    let (re, im, den) = UNIT_POOL[rng.gen_range(0..UNIT_POOL.len())];
    S::from_ratio(re, den) + S::i() * S::from_ratio(im, den)
}

/// Scalar λ-frame g(x) = c·e^{imx} with |c| = 1: exactly unimodular.
pub fn unimodular_g<S: Scalar>(rng: &mut impl Rng) -> TrigPoly<S> {
    let m = rng.gen_range(-2..=2);
    TrigPoly::scalar_mode(m, unimodular_unit(rng))
}

/// Rotation block R(m·x) at rows/columns (i, j): cos/sin entries, exact.
pub fn rotation_block<S: Scalar>(k: usize, i: usize, j: usize, m: i64) -> TrigPoly<S> {
    assert!(i < j && j < k);
    let half = S::from_ratio(1, 2);
    let minus_half_i = S::from_ratio(-1, 2) * S::i();
    let mut out = TrigPoly::zero(k);
    // identity outside the block
    let mut id = Mat::zero(k);
    for d in 0..k {
        if d != i && d != j {
            id.set(d, d, S::one());
        }
    }
    out = out.add(&TrigPoly::constant(id));
    // cos(mx) on the diagonal of the block
    let mut c = Mat::zero(k);
    c.set(i, i, half.clone());
    c.set(j, j, half.clone());
    out = out.add(&TrigPoly::mode(m, c.clone()));
    out = out.add(&TrigPoly::mode(-m, c));
    // sin(mx) off the diagonal: −sin at (i,j), +sin at (j,i)
    let mut s = Mat::zero(k);
    s.set(i, j, -minus_half_i.clone());
    s.set(j, i, minus_half_i.clone());
    out = out.add(&TrigPoly::mode(m, s.clone()));
    out = out.add(&TrigPoly::mode(-m, s.neg()));
    out
}

/// Constant special-unitary matrix over exact scalars: a diagonal of
/// unimodular units whose product is corrected to 1, mixed by exact
/// rotation blocks.
pub fn constant_su<S: Scalar>(rng: &mut impl Rng, k: usize) -> Mat<S> {
    let mut diag = Vec::with_capacity(k);
    let mut prod = S::one();
    for _ in 0..k - 1 {
        let u: S = unimodular_unit(rng);
        prod = prod * u.clone();
        diag.push(u);
    }
    // last entry = conj(prod): determinant |prod|² = 1
    diag.push(prod.conj());
    let mut m = Mat::diag(diag);
    if k >= 2 {
        // one exact rotation by a Pythagorean angle: (3/5, 4/5)
        let i = rng.gen_range(0..k - 1);
        let j = rng.gen_range(i + 1..k);
        let mut r = Mat::identity(k);
        r.set(i, i, S::from_ratio(3, 5));
        r.set(i, j, S::from_ratio(-4, 5));
        r.set(j, i, S::from_ratio(4, 5));
        r.set(j, j, S::from_ratio(3, 5));
        m = m.mul(&r);
    }
    m
}

/// Pointwise special-unitary trig polynomial: a product of constant
/// SU(k) factors and exact rotation blocks R(m·x).
pub fn su_trig<S: Scalar>(rng: &mut impl Rng, k: usize) -> TrigPoly<S> {
    let mut out = TrigPoly::constant(constant_su(rng, k));
    if k >= 2 {
        let factors = rng.gen_range(1..=2);
        for _ in 0..factors {
            let i = rng.gen_range(0..k - 1);
            let j = rng.gen_range(i + 1..k);
            let m = rng.gen_range(-2..=2i64);
            out = out.mul(&rotation_block(k, i, j, m));
        }
    }
    out
}

/// Exactly idempotent principal projection: U(x)·diag(1..1, 0..0)·U(x)†
/// on each co-sphere half, with independent frames and ranks.
pub fn principal_projection<S: Scalar>(rng: &mut impl Rng, k: usize) -> PrincipalProjection<S> {
    let mut half = |rng: &mut dyn rand::RngCore| {
        let rank = rng.gen_range(0..=k);
        let diag = Mat::diag(
            (0..k)
                .map(|i| if i < rank { S::one() } else { S::zero() })
                .collect(),
        );
        let u: TrigPoly<S> = su_trig(rng, k);
        u.mul(&TrigPoly::constant(diag)).mul(&u.conj_transpose())
    };
    PrincipalProjection {
        plus: half(rng),
        minus: half(rng),
    }
}

/// Self-adjoint exactly idempotent principal (same construction; the
/// conjugated diagonal is Hermitian by unitarity).
pub fn self_adjoint_principal<S: Scalar>(rng: &mut impl Rng, k: usize) -> PrincipalProjection<S> {
    principal_projection(rng, k)
}

/// Random jet Σ A_j t^j with small entries.
pub fn small_jet<S: Scalar>(rng: &mut impl Rng, k: usize, n: usize, bound: i64) -> MatrixJet<S> {
    MatrixJet::from_coeffs((0..n).map(|_| small_matrix(rng, k, bound)).collect()).expect("shape")
}

/// Constant idempotent jet S·diag(1…1, 0…0)·S^{-1} with a random
/// invertible exact frame.
pub fn base_idempotent_jet<S: Scalar>(rng: &mut impl Rng, k: usize, n: usize) -> MatrixJet<S> {
    let rank = rng.gen_range(0..=k);
    let diag = Mat::diag(
        (0..k)
            .map(|i| if i < rank { S::one() } else { S::zero() })
            .collect(),
    );
    loop {
        let s = small_matrix::<S>(rng, k, 3);
        if let Some(sinv) = s.try_inverse() {
            return MatrixJet::constant(s.mul(&diag).mul(&sinv), n);
        }
    }
}

/// Unit 1 + t·Z of the jet ring.
pub fn jet_unit<S: Scalar>(rng: &mut impl Rng, k: usize, n: usize) -> MatrixJet<S> {
    MatrixJet::identity(k, n)
        .add(&MatrixJet::monomial(small_matrix(rng, k, 3), 1, n))
        .expect("same shape")
}

/// Level ≥ 1 jet perturbation.
pub fn jet_perturbation<S: Scalar>(rng: &mut impl Rng, k: usize, n: usize) -> MatrixJet<S> {
    let mut coeffs = vec![Mat::zero(k)];
    for _ in 1..n {
        coeffs.push(small_matrix(rng, k, 2));
    }
    MatrixJet::from_coeffs(coeffs).expect("shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactScalar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frames_are_exactly_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 1..=3usize {
            for _ in 0..5 {
                let u: TrigPoly<ExactScalar> = su_trig(&mut rng, k);
                assert!(u.is_pointwise_unitary());
                assert_eq!(u.det(), TrigPoly::identity(1).entry(0, 0));
                let g: TrigPoly<ExactScalar> = unimodular_g(&mut rng);
                assert!(g.is_unimodular_scalar());
            }
        }
    }

    #[test]
    fn principals_are_exactly_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 1..=3usize {
            for _ in 0..5 {
                let p: PrincipalProjection<ExactScalar> = principal_projection(&mut rng, k);
                assert!(p.is_idempotent());
                assert!(p.is_self_adjoint());
            }
        }
    }

    #[test]
    fn base_jets_are_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let p: MatrixJet<ExactScalar> = base_idempotent_jet(&mut rng, 3, 6);
            assert!(p.is_idempotent());
            let u: MatrixJet<ExactScalar> = jet_unit(&mut rng, 3, 6);
            assert!(u.try_inverse().is_some());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        let s1: ClassicalSymbol<ExactScalar> = small_symbol(&mut a, 2, 3, 1, -4);
        let s2: ClassicalSymbol<ExactScalar> = small_symbol(&mut b, 2, 3, 1, -4);
        assert_eq!(s1, s2);
    }
}
