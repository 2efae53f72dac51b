use crate::arith::poly::Poly;
use crate::arith::ratfunc::RationalFunction;
use crate::curve::place::{CurveDivisor, CurveField, CurvePlace};
use crate::linalg;

/// Basis of L(D) = { f : div(f) + D >= 0 } on P^1.
///
/// Elements are `g / A` with `A = prod_{n_P > 0} pi_P^{n_P}`, `deg g <= deg A + n_inf`;
/// the zero conditions at places with `n_P < 0` are imposed as linear equations
/// on the coefficients of `g` (the remainder of `g` modulo `B = prod pi_P^{-n_P}` vanishes).
pub fn rr_space<K: CurveField>(d: &CurveDivisor<K>, proto: &K) -> Vec<RationalFunction<K>> {
    let z = proto.zero_like();
    let mut a = Poly::one(&z);
    let mut b = Poly::one(&z);
    for (pi, n) in d.finite_terms() {
        if n > 0 {
            a = a.mul(&pi.pow(n as u32));
        } else {
            b = b.mul(&pi.pow((-n) as u32));
        }
    }
    let m = a.degree().unwrap() as i64 + d.mult(&CurvePlace::Infinity);
    if m < 0 {
        return Vec::new();
    }
    let ncols = (m + 1) as usize;
    let db = b.degree().unwrap();
    // column i: coefficients of t^i mod B
    let cols: Vec<Poly<K>> = (0..ncols).map(|i| Poly::monomial(z.one_like(), i).rem(&b).unwrap()).collect();
    let rows: Vec<Vec<K>> = (0..db).map(|r| cols.iter().map(|c| c.coeff(r)).collect()).collect();
    let ker = if rows.is_empty() {
        (0..ncols)
            .map(|i| (0..ncols).map(|j| if i == j { z.one_like() } else { z.zero_like() }).collect())
            .collect()
    } else {
        linalg::kernel(&rows, ncols, &z)
    };
    ker.into_iter()
        .map(|v| RationalFunction::new(Poly::new(z.clone(), v), a.clone()).unwrap())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fp::Fp;

    #[test]
    fn monomials_up_to_three() {
        let d = CurveDivisor::at_infinity(3);
        let b = rr_space(&d, &Fp::zero(5));
        assert_eq!(b.len(), 4);
    }

    #[test]
    fn negative_degree_is_empty() {
        assert!(rr_space(&CurveDivisor::<Fp>::at_infinity(-1), &Fp::zero(5)).is_empty());
    }

    #[test]
    fn poles_at_zero() {
        let z = Fp::zero(5);
        let d = CurveDivisor::from_terms(vec![(CurvePlace::point(&z), 2), (CurvePlace::Infinity, -1)]);
        let b = rr_space(&d, &z);
        assert_eq!(b.len(), 2);
        for f in &b {
            assert!(f.ord_at(&Poly::linear_root(&z)).unwrap() >= -2);
            assert!(f.ord_at_infinity().unwrap() >= 1);
        }
    }
}
