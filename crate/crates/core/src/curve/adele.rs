use crate::arith::poly::Poly;
use crate::arith::ratfunc::RationalFunction;
use crate::arith::scalar::Scalar;
use crate::ctx::PrecisionCtx;
use crate::curve::local::{digit_range, digits_at, residue_of_form};
use crate::curve::place::{CurveDivisor, CurveField, CurvePlace};
use crate::curve::rr::rr_space;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// A local component `sum_{j >= lo} r_j u^j + O(u^prec)` written with polynomial
/// digits `r_j` of degree below the degree of the place.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTail<K: Scalar> {
    pub lo: i64,
    pub digits: Vec<Poly<K>>,
    pub prec: i64,
}

impl<K: CurveField> LocalTail<K> {
    pub fn from_function(f: &RationalFunction<K>, place: &CurvePlace<K>, lo: i64, prec: i64) -> Result<Self> {
        Ok(LocalTail { lo, digits: digits_at(f, place, lo, prec)?, prec })
    }

    /// The single term `r u^j`, known modulo `u^prec`.
    pub fn monomial(r: Poly<K>, j: i64, prec: i64) -> Self {
        LocalTail { lo: j, digits: vec![r], prec }
    }

    fn digit(&self, j: i64, z: &K) -> Result<Poly<K>> {
        if j >= self.prec {
            return Err(Error::precision(format!("local digit u^{j} beyond precision u^{}", self.prec)));
        }
        if j < self.lo || j >= self.lo + self.digits.len() as i64 {
            return Ok(Poly::zero(z));
        }
        Ok(self.digits[(j - self.lo) as usize].clone())
    }

    /// Lowest exponent with a nonzero digit.
    fn valuation(&self) -> Option<i64> {
        self.digits.iter().position(|d| !d.is_zero()).map(|i| self.lo + i as i64)
    }

    fn combine(&self, o: &Self, sign: bool, z: &K) -> Self {
        let lo = self.lo.min(o.lo);
        let prec = self.prec.min(o.prec);
        let digits = (lo..prec.max(lo))
            .map(|j| {
                let a = self.digit(j, z).unwrap_or_else(|_| Poly::zero(z));
                let b = o.digit(j, z).unwrap_or_else(|_| Poly::zero(z));
                if sign { a.add(&b) } else { a.sub(&b) }
            })
            .collect();
        LocalTail { lo, digits, prec }
    }
}

/// Truncated adele on P^1: a diagonal rational function plus finitely many local
/// tails; at every unlisted place the tail component is 0.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveAdele<K: CurveField> {
    pub global: Option<RationalFunction<K>>,
    pub tails: Vec<(CurvePlace<K>, LocalTail<K>)>,
}

impl<K: CurveField> CurveAdele<K> {
    pub fn zero() -> Self {
        CurveAdele { global: None, tails: Vec::new() }
    }

    pub fn diagonal(f: RationalFunction<K>) -> Self {
        CurveAdele { global: Some(f), tails: Vec::new() }
    }

    pub fn single(place: CurvePlace<K>, tail: LocalTail<K>) -> Self {
        CurveAdele { global: None, tails: vec![(place, tail)] }
    }

    pub fn add(&self, o: &Self, z: &K) -> Self {
        self.combine(o, true, z)
    }

    pub fn sub(&self, o: &Self, z: &K) -> Self {
        self.combine(o, false, z)
    }

    fn combine(&self, o: &Self, sign: bool, z: &K) -> Self {
        let global = match (&self.global, &o.global) {
            (None, None) => None,
            (Some(f), None) => Some(f.clone()),
            (None, Some(g)) => Some(if sign { g.clone() } else { g.neg() }),
            (Some(f), Some(g)) => Some(if sign { f.add(g) } else { f.sub(g) }),
        };
        let mut tails = self.tails.clone();
        for (p, t) in &o.tails {
            if let Some(e) = tails.iter_mut().find(|(q, _)| q == p) {
                e.1 = e.1.combine(t, sign, z);
            } else {
                let zero = LocalTail { lo: t.lo, digits: Vec::new(), prec: t.prec };
                tails.push((p.clone(), zero.combine(t, sign, z)));
            }
        }
        CurveAdele { global, tails }
    }
}

/// First differential of the adelic complex `k(X) + A(D) -> A`: `(a0, a1) -> a1 - a0`.
pub fn boundary_d1<K: CurveField>(a0: &RationalFunction<K>, a1: &CurveAdele<K>) -> CurveAdele<K> {
    a1.sub(&CurveAdele::diagonal(a0.clone()), a0.proto())
}

/// Coordinates of one digit slot of `A(E')/A(D)`: place, exponent, coefficient index.
#[derive(Clone, Debug, PartialEq)]
pub struct Slot<K: CurveField> {
    pub place: CurvePlace<K>,
    pub exponent: i64,
    pub index: usize,
}

/// Finite model of H^1(D) = A / (k(X) + A(D)) as `A(E') / (A(D) + L(E'))`
/// for an auxiliary `E' >= D` with `H^1(E') = 0`.
#[derive(Clone, Debug)]
pub struct H1Model<K: CurveField> {
    pub d: CurveDivisor<K>,
    pub e_prime: CurveDivisor<K>,
    pub slots: Vec<Slot<K>>,
    /// Row-reduced image of L(E') in `A(E')/A(D)`.
    pub image: Mat<K>,
    /// Slots whose unit vectors span a complement of the image.
    pub complement: Vec<usize>,
}

impl<K: CurveField> H1Model<K> {
    pub fn build(d: &CurveDivisor<K>, e_prime: &CurveDivisor<K>, proto: &K) -> Result<Self> {
        let z = proto.zero_like();
        let mut places: Vec<CurvePlace<K>> = e_prime.terms().iter().map(|(p, _)| p.clone()).collect();
        for (p, _) in d.terms() {
            if !places.contains(p) {
                places.push(p.clone());
            }
        }
        let mut slots = Vec::new();
        for p in &places {
            let (ep, dp) = (e_prime.mult(p), d.mult(p));
            if ep < dp {
                return Err(Error::invalid("auxiliary divisor must dominate D"));
            }
            for j in -ep..-dp {
                for index in 0..p.degree() {
                    slots.push(Slot { place: p.clone(), exponent: j, index });
                }
            }
        }
        let basis = rr_space(e_prime, &z);
        let mut rows = Vec::with_capacity(basis.len());
        for f in &basis {
            rows.push(coordinates(&CurveAdele::diagonal(f.clone()), &slots, &z)?);
        }
        let (image, pivots) = linalg::rref(&rows, slots.len());
        let complement = (0..slots.len()).filter(|c| !pivots.contains(c)).collect();
        Ok(H1Model { d: d.clone(), e_prime: e_prime.clone(), slots, image, complement })
    }

    pub fn h1(&self) -> usize {
        self.complement.len()
    }

    /// dim A(E')/A(D).
    pub fn quotient_dim(&self) -> usize {
        self.slots.len()
    }

    /// The adele representing the complement basis vector for slot `i`.
    pub fn representative(&self, i: usize, proto: &K) -> CurveAdele<K> {
        let s = &self.slots[i];
        let r = Poly::monomial(proto.one_like(), s.index);
        CurveAdele::single(s.place.clone(), LocalTail::monomial(r, s.exponent, -self.d.mult(&s.place)))
    }
}

/// Digit coordinates of an adele in the given slots.
fn coordinates<K: CurveField>(a: &CurveAdele<K>, slots: &[Slot<K>], z: &K) -> Result<Vec<K>> {
    let mut out = Vec::with_capacity(slots.len());
    for s in slots {
        let mut digit = Poly::zero(z);
        if let Some(f) = &a.global {
            digit = digit_range(f, &s.place, s.exponent, s.exponent + 1)?.remove(0);
        }
        if let Some((_, t)) = a.tails.iter().find(|(p, _)| *p == s.place) {
            digit = digit.add(&t.digit(s.exponent, z)?);
        }
        out.push(digit.coeff(s.index));
    }
    Ok(out)
}

/// Whether the adele `a` is zero in H^1(D), i.e. lies in k(X) + A(D).
pub fn is_zero_in_h1<K: CurveField>(a: &CurveAdele<K>, d: &CurveDivisor<K>, proto: &K) -> Result<bool> {
    // the diagonal part is a coboundary; only the tails matter
    let tails = CurveAdele { global: None, tails: a.tails.clone() };
    let mut e = d.clone();
    for (p, t) in &tails.tails {
        if t.prec < -d.mult(p) {
            return Err(Error::precision(format!(
                "tail at {} known modulo u^{} but A(D) needs u^{}",
                p.label(),
                t.prec,
                -d.mult(p)
            )));
        }
        if let Some(v) = t.valuation() {
            let need = -v - d.mult(p);
            if need > 0 {
                e.add_term(p.clone(), need);
            }
        }
    }
    let extra = (-1 - e.degree()).max(0);
    e.add_term(CurvePlace::Infinity, extra);
    let model = H1Model::build(d, &e, proto)?;
    let v = coordinates(&tails, &model.slots, proto)?;
    Ok(linalg::contains(&model.image, &v, model.slots.len()))
}

/// Cohomology of O(D) on P^1 computed through the adelic complex.
#[derive(Clone, Debug)]
pub struct CurveCohomology<K: CurveField> {
    pub degree: i64,
    pub h0: usize,
    /// h^1 from the adelic quotient `A(E')/(A(D) + L(E'))`.
    pub h1: usize,
    /// h^1 from duality, `dim L(K - D)`.
    pub h1_dual: usize,
    pub basis: Vec<RationalFunction<K>>,
    pub model: H1Model<K>,
}

fn check_window<K: CurveField>(d: &CurveDivisor<K>, e: &CurveDivisor<K>, ctx: &PrecisionCtx) -> Result<()> {
    let mut low = 0i64;
    let mut high = 2i64; // the canonical divisor -2 inf
    for (p, _) in e.terms().iter().chain(d.terms()) {
        low = low.min(-e.mult(p));
        high = high.max(-d.mult(p));
    }
    if low < ctx.v_lo {
        return Err(Error::WindowTooSmall { what: "lower Laurent bound".into(), needed: low });
    }
    if high > ctx.v_hi {
        return Err(Error::WindowTooSmall { what: "upper Laurent bound".into(), needed: high });
    }
    Ok(())
}

/// h^0 and h^1 of O(D), the latter computed both adelically and by duality.
pub fn adelic_h0_h1<K: CurveField>(d: &CurveDivisor<K>, proto: &K, ctx: &PrecisionCtx) -> Result<CurveCohomology<K>> {
    let h1_bound = (-d.degree() - 1).max(0);
    let e_prime = d.add(&CurveDivisor::at_infinity(h1_bound + 2));
    check_window(d, &e_prime, ctx)?;
    let basis = rr_space(d, proto);
    let model = H1Model::build(d, &e_prime, proto)?;
    let dual = CurveDivisor::canonical().sub(d);
    Ok(CurveCohomology {
        degree: d.degree(),
        h0: basis.len(),
        h1: model.h1(),
        h1_dual: rr_space(&dual, proto).len(),
        basis,
        model,
    })
}

/// Residue pairing between `L(K - D)` (as forms `g dt`) and the complement basis of the H^1 model.
///
/// Entry `(i, j)` is `sum_P Res_P(e_j g_i dt)` where `e_j` is the adele supported at a single place.
pub fn serre_pairing_matrix<K: CurveField>(d: &CurveDivisor<K>, proto: &K, ctx: &PrecisionCtx) -> Result<Mat<K>> {
    let coh = adelic_h0_h1(d, proto, ctx)?;
    let forms = rr_space(&CurveDivisor::canonical().sub(d), proto);
    let z = proto.zero_like();
    let mut m = Vec::with_capacity(forms.len());
    for g in &forms {
        let mut row = Vec::with_capacity(coh.model.complement.len());
        for &c in &coh.model.complement {
            let s = &coh.model.slots[c];
            // e = t^index * u^exponent at the place, as a global function
            let u = match &s.place {
                CurvePlace::Infinity => RationalFunction::t(&z).inv()?,
                CurvePlace::Finite(pi) => RationalFunction::from_poly(pi.clone()),
            };
            let e = RationalFunction::from_poly(Poly::monomial(z.one_like(), s.index)).mul(&u.pow(s.exponent)?);
            row.push(residue_of_form(&e.mul(g), &s.place)?);
        }
        m.push(row);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fp::Fp;

    #[test]
    fn worked_cases_over_f5() {
        let z = Fp::zero(5);
        let ctx = PrecisionCtx::default();
        for (n, h0, h1) in [(3, 4, 0), (-3, 0, 2), (-1, 0, 0)] {
            let c = adelic_h0_h1(&CurveDivisor::at_infinity(n), &z, &ctx).unwrap();
            assert_eq!((c.h0, c.h1, c.h1_dual), (h0, h1, h1));
        }
    }

    #[test]
    fn serre_matrices() {
        let ctx = PrecisionCtx::default();
        let m = serre_pairing_matrix(&CurveDivisor::at_infinity(-3), &Fp::zero(5), &ctx).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(linalg::rank(&m, 2), 2);
        let m = serre_pairing_matrix(&CurveDivisor::at_infinity(-2), &Fp::zero(2), &ctx).unwrap();
        assert_eq!(m.len(), 1);
        assert!(!m[0][0].vanishes());
        assert!(serre_pairing_matrix(&CurveDivisor::at_infinity(4), &Fp::zero(2), &ctx).unwrap().is_empty());
    }

    #[test]
    fn classes_in_h1() {
        let z = Fp::zero(2);
        let one = RationalFunction::one(&z);
        // d1(1, 0) = -1 diagonally: always zero in H^1
        let a = boundary_d1(&one, &CurveAdele::zero());
        assert!(is_zero_in_h1(&a, &CurveDivisor::at_infinity(-3), &z).unwrap());
        // 1 at infinity alone is the coboundary of the constant 1
        let one_inf = CurveAdele::single(CurvePlace::Infinity, LocalTail::monomial(Poly::one(&z), 0, 3));
        assert!(is_zero_in_h1(&one_inf, &CurveDivisor::at_infinity(-3), &z).unwrap());
        // 1/t at infinity alone is a nonzero class in H^1(-3 inf)
        let e = CurveAdele::single(CurvePlace::Infinity, LocalTail::monomial(Poly::one(&z), 1, 3));
        assert!(!is_zero_in_h1(&e, &CurveDivisor::at_infinity(-3), &z).unwrap());
        // but zero in H^1(-1 inf) where H^1 vanishes
        assert!(is_zero_in_h1(&e, &CurveDivisor::at_infinity(-1), &z).unwrap());
    }
}
