//! Finite models of the residue pairing
//! A12(D)/A12(D - C) × A12((ω) + C - D)/A12((ω) - D) → R/Z
//! along a vertical curve C = V_p, restricted to a finite set of rational fiber
//! points and a window of u-exponents. Both quotients are F_p-spaces and the
//! pairing lands in (1/p)Z/Z, so it is stored as a matrix over F_p.

use std::collections::HashMap;

use num_bigint::BigInt;
use rand::Rng;

use crate::arith::factor::factor_fp;
use crate::arith::fp::Fp;
use crate::arith::padic::PAdic;
use crate::arith::rational::Rational;
use crate::arith::scalar::Scalar;
use crate::ctx::PrecisionCtx;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::local2d::{CircleValue, MixedSeries, TwoDimLocalElem};

use super::adele::{global_pairing, SurfaceAdele};
use super::expand::RationalForm;
use super::geometry::{FiberPoint, SurfaceCurve, SurfaceDivisor, SurfaceFlag};
use super::zq::{fiber_reduction, fiber_valuation};

#[derive(Clone, Debug)]
pub struct PairingSpace {
    pub p: u64,
    /// ord_C(D).
    pub n: i64,
    /// ord_C(ω).
    pub e: i64,
    pub points: Vec<FiberPoint>,
    /// ord_x of the reduction of p^{-e} ω, one per point.
    pub orders: Vec<i64>,
    /// Exponents lo..hi of u on the left.
    pub window: (i64, i64),
    /// (point index, exponent) of p^{-n} u^i.
    pub left: Vec<(usize, i64)>,
    /// (point index, exponent) of p^{n-e-1} u^j.
    pub right: Vec<(usize, i64)>,
    /// Pairing of left basis vectors (rows) with right ones (columns), times p.
    pub matrix: Mat<Fp>,
}

/// Orders of the reduced form ω̄ at every point of its support on the fiber.
fn reduced_divisor(omega: &RationalForm, p: u64) -> Result<Vec<(FiberPoint, i64)>> {
    let h = fiber_reduction(omega.coeff(), p).ok_or_else(|| Error::invalid("the zero form has no divisor"))?;
    let mut out = Vec::new();
    for (poly, sign) in [(h.num(), 1i64), (h.den(), -1)] {
        for (q, m) in factor_fp(poly) {
            out.push((FiberPoint::from_poly(&q)?, sign * m as i64));
        }
    }
    let at_inf = h.ord_at_infinity()? - 2;
    if at_inf != 0 {
        out.push((FiberPoint::Infinity, at_inf));
    }
    Ok(out)
}

fn scaled_monomial(p: u64, v: i64, k: i64, ctx: &PrecisionCtx) -> TwoDimLocalElem {
    let pb = Rational::from_integer(BigInt::from(p).pow(v.unsigned_abs() as u32));
    let c = if v >= 0 { pb } else { pb.recip() };
    TwoDimLocalElem::Mixed(MixedSeries::monomial(PAdic::from_rational(&c, p, ctx.padic_digits), k))
}

fn to_fp(v: &CircleValue, p: u64) -> Result<Fp> {
    let CircleValue::Exact(r) = v else {
        return Err(Error::invalid("a finite-flag residue came out approximate"));
    };
    let x = r * Rational::from_integer(BigInt::from(p));
    if !x.is_integer() {
        return Err(Error::precision(format!("pairing value {r} is not in (1/{p})Z/Z")));
    }
    let n: i64 = x.to_integer().try_into().map_err(|_| Error::invalid("pairing value out of range"))?;
    Ok(Fp::new(p, n))
}

/// Builds the finite model for D, C = V_p, ω on the points S with left
/// exponents in `window`.
///
/// The left basis is p^{-n} u^i (i in the window) at each x ∈ S; the right one
/// is p^{n-e-1} u^j with j running over [-hi - m_x, -lo - m_x), which makes the
/// matrix triangular with the leading coefficients of ω̄ on the diagonal. S must
/// contain the support of div(ω̄), and only rational fiber points are allowed.
pub fn quotient_pairing_space(
    d: &SurfaceDivisor,
    c: &SurfaceCurve,
    omega: &RationalForm,
    s: &[FiberPoint],
    window: (i64, i64),
    ctx: &PrecisionCtx,
) -> Result<PairingSpace> {
    let SurfaceCurve::Vertical(p) = c else {
        return Err(Error::Unsupported(format!("pairing spaces along the horizontal curve {c}")));
    };
    let p = *p;
    let (lo, hi) = window;
    if lo >= hi {
        return Err(Error::invalid("empty exponent window"));
    }
    if let Some(x) = s.iter().find(|x| x.degree() > 1) {
        return Err(Error::Unsupported(format!("pairing spaces at the point {} of degree > 1", x.label())));
    }
    let mut points = s.to_vec();
    points.sort();
    points.dedup();
    let e = fiber_valuation(omega.coeff(), p).ok_or_else(|| Error::invalid("ω must be nonzero"))?;
    let support = reduced_divisor(omega, p)?;
    if let Some((x, m)) = support.iter().find(|(x, _)| !points.contains(x)) {
        return Err(Error::invalid(format!(
            "the point set misses {} where the reduced form has order {m}",
            x.label()
        )));
    }
    let orders: Vec<i64> =
        points.iter().map(|x| support.iter().find(|(y, _)| y == x).map_or(0, |(_, m)| *m)).collect();
    let n = d.mult(c);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (k, m) in orders.iter().enumerate() {
        left.extend((lo..hi).map(|i| (k, i)));
        right.extend((-hi - m..-lo - m).map(|j| (k, j)));
    }
    let mut space = PairingSpace { p, n, e, points, orders, window, left, right, matrix: Vec::new() };
    let lv: Vec<SurfaceAdele> = (0..space.left.len()).map(|k| space.left_vector(k, ctx)).collect::<Result<_>>()?;
    let rv: Vec<SurfaceAdele> = (0..space.right.len()).map(|k| space.right_vector(k, ctx)).collect::<Result<_>>()?;
    let mut matrix = Vec::with_capacity(lv.len());
    for (a, (ka, _)) in lv.iter().zip(&space.left) {
        let mut row = Vec::with_capacity(rv.len());
        for (b, (kb, _)) in rv.iter().zip(&space.right) {
            // Different points never meet.
            row.push(if ka == kb { to_fp(&global_pairing(a, b, omega, ctx)?, p)? } else { Fp::zero(p) });
        }
        matrix.push(row);
    }
    space.matrix = matrix;
    Ok(space)
}

impl PairingSpace {
    pub fn dim(&self) -> usize {
        self.left.len()
    }

    fn flag(&self, k: usize) -> Result<SurfaceFlag> {
        SurfaceFlag::vertical(self.p, self.points[k].clone())
    }

    /// The adele representing the k-th left basis vector.
    pub fn left_vector(&self, k: usize, ctx: &PrecisionCtx) -> Result<SurfaceAdele> {
        let (x, i) = self.left[k];
        SurfaceAdele::at_flag(self.flag(x)?, scaled_monomial(self.p, -self.n, i, ctx))
    }

    /// The adele representing the k-th right basis vector.
    pub fn right_vector(&self, k: usize, ctx: &PrecisionCtx) -> Result<SurfaceAdele> {
        let (x, j) = self.right[k];
        SurfaceAdele::at_flag(self.flag(x)?, scaled_monomial(self.p, self.n - self.e - 1, j, ctx))
    }

    pub fn zero(&self) -> Fp {
        Fp::zero(self.p)
    }

    pub fn is_nonsingular(&self) -> bool {
        linalg::rank(&self.matrix, self.dim()) == self.dim() && self.right.len() == self.dim()
    }

    pub fn pair(&self, x: &[Fp], y: &[Fp]) -> Fp {
        let my = linalg::mat_vec(&self.matrix, y, &self.zero());
        x.iter().zip(&my).fold(self.zero(), |acc, (a, b)| acc.plus(&a.times(b)))
    }

    fn require_nonsingular(&self) -> Result<()> {
        if self.is_nonsingular() {
            Ok(())
        } else {
            Err(Error::invalid("singular pairing matrix: the window model is inconsistent"))
        }
    }

    /// W^⊥ in the right space for a subspace W of the left one.
    pub fn orth_complement(&self, w: &[Vec<Fp>]) -> Result<Mat<Fp>> {
        self.require_nonsingular()?;
        let mt = linalg::transpose(&self.matrix, self.dim());
        let wm: Mat<Fp> = w.iter().map(|x| linalg::mat_vec(&mt, x, &self.zero())).collect();
        Ok(linalg::span(&linalg::kernel(&wm, self.dim(), &self.zero()), self.dim()))
    }

    /// ⊥V in the left space for a subspace V of the right one.
    pub fn left_orth(&self, v: &[Vec<Fp>]) -> Result<Mat<Fp>> {
        self.require_nonsingular()?;
        let vm: Mat<Fp> = v.iter().map(|y| linalg::mat_vec(&self.matrix, y, &self.zero())).collect();
        Ok(linalg::span(&linalg::kernel(&vm, self.dim(), &self.zero()), self.dim()))
    }

    fn units(&self, keep: impl Fn(usize, i64) -> bool, side: &[(usize, i64)]) -> Mat<Fp> {
        side.iter()
            .enumerate()
            .filter(|(_, &(x, i))| keep(x, i))
            .map(|(k, _)| {
                let mut v = vec![self.zero(); side.len()];
                v[k] = Fp::one(self.p);
                v
            })
            .collect()
    }

    /// Image of A12(D') ∩ A12(D) in the left quotient. Along C the only
    /// condition is ord_C ≥ -ord_C(D'), so the image is everything or nothing.
    pub fn a12_image_left(&self, d_prime: &SurfaceDivisor) -> Mat<Fp> {
        let full = d_prime.mult(&SurfaceCurve::Vertical(self.p)) >= self.n;
        self.units(|_, _| full, &self.left)
    }

    /// Image of A12(D'') in the right quotient A12((ω) + C - D)/A12((ω) - D).
    pub fn a12_image_right(&self, d_second: &SurfaceDivisor) -> Mat<Fp> {
        let full = d_second.mult(&SurfaceCurve::Vertical(self.p)) >= self.e - self.n + 1;
        self.units(|_, _| full, &self.right)
    }

    /// Image on the left of the fiber subspace with u-order at least -E_x at
    /// each point (the curve-level A12(E) of the fiber).
    pub fn fiber_image_left(&self, e: &[i64]) -> Mat<Fp> {
        self.units(|x, i| i >= -e[x], &self.left)
    }

    /// The fiber subspace for (ω̄) - E on the right.
    pub fn fiber_image_right(&self, e: &[i64]) -> Mat<Fp> {
        self.units(|x, j| j >= e[x] - self.orders[x], &self.right)
    }
}

/// Outcome of checking the three orthogonality identities on one space.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OrthReport {
    pub singles: usize,
    pub pairs: usize,
    /// Whether every subspace (and every pair of subspaces) was visited.
    pub exhaustive_singles: bool,
    pub exhaustive_pairs: bool,
    pub failures: Vec<String>,
}

/// (W1 + W2)^⊥ = W1^⊥ ∩ W2^⊥, (W1 ∩ W2)^⊥ = W1^⊥ + W2^⊥ and ⊥(W^⊥) = W for
/// the given subspaces of the left space.
pub fn orth_identities(space: &PairingSpace, w1: &[Vec<Fp>], w2: &[Vec<Fp>]) -> Result<Vec<String>> {
    let n = space.dim();
    let z = space.zero();
    let mut bad = Vec::new();
    let (p1, p2) = (space.orth_complement(w1)?, space.orth_complement(w2)?);
    let sum = linalg::subspace_sum(w1, w2, n);
    if !linalg::same_subspace(&space.orth_complement(&sum)?, &linalg::subspace_intersection(&p1, &p2, n, &z), n) {
        bad.push("(W1 + W2)^⊥ ≠ W1^⊥ ∩ W2^⊥".to_string());
    }
    let meet = linalg::subspace_intersection(w1, w2, n, &z);
    if !linalg::same_subspace(&space.orth_complement(&meet)?, &linalg::subspace_sum(&p1, &p2, n), n) {
        bad.push("(W1 ∩ W2)^⊥ ≠ W1^⊥ + W2^⊥".to_string());
    }
    for w in [w1, w2] {
        if !linalg::same_subspace(&space.left_orth(&space.orth_complement(w)?)?, w, n) {
            bad.push("(W^⊥)^⊥ ≠ W".to_string());
        }
    }
    Ok(bad)
}

/// A random subspace of F_p^n spanned by up to n random vectors.
pub fn random_subspace(p: u64, n: usize, rng: &mut impl Rng) -> Mat<Fp> {
    let k = rng.gen_range(0..=n);
    let vs: Mat<Fp> = (0..k).map(|_| (0..n).map(|_| Fp::new(p, rng.gen_range(0..p) as i64)).collect()).collect();
    linalg::span(&vs, n)
}

/// Subsets of F_2^n (n ≤ 8) as 256-bit membership masks.
type Mask = [u64; 4];

fn mask_has(m: &Mask, v: usize) -> bool {
    m[v >> 6] >> (v & 63) & 1 == 1
}

fn mask_set(m: &mut Mask, v: usize) {
    m[v >> 6] |= 1 << (v & 63);
}

/// {x ^ v : x ∈ m}.
fn mask_xor(m: &Mask, v: usize) -> Mask {
    const LOW: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0f0f_0f0f_0f0f_0f0f,
        0x00ff_00ff_00ff_00ff,
        0x0000_ffff_0000_ffff,
        0x0000_0000_ffff_ffff,
    ];
    let mut out = *m;
    for (b, low) in LOW.iter().enumerate() {
        if v >> b & 1 == 1 {
            let s = 1u32 << b;
            for w in out.iter_mut() {
                *w = ((*w & low) << s) | ((*w >> s) & low);
            }
        }
    }
    if v >> 6 & 1 == 1 {
        out.swap(0, 1);
        out.swap(2, 3);
    }
    if v >> 7 & 1 == 1 {
        out.swap(0, 2);
        out.swap(1, 3);
    }
    out
}

fn mask_and(a: &Mask, b: &Mask) -> Mask {
    [a[0] & b[0], a[1] & b[1], a[2] & b[2], a[3] & b[3]]
}

fn members(m: &Mask, n: usize) -> impl Iterator<Item = usize> + '_ {
    (0..1usize << n).filter(move |&v| mask_has(m, v))
}

/// The span of a ∪ b, for subspaces a and b.
fn mask_sum(a: &Mask, b: &Mask, n: usize) -> Mask {
    let mut m = *a;
    for v in members(b, n) {
        if !mask_has(&m, v) {
            let x = mask_xor(&m, v);
            for (w, y) in m.iter_mut().zip(x) {
                *w |= y;
            }
        }
    }
    m
}

fn span_mask(basis: &[usize]) -> Mask {
    let mut m = [0; 4];
    mask_set(&mut m, 0);
    for &v in basis {
        let x = mask_xor(&m, v);
        for (w, y) in m.iter_mut().zip(x) {
            *w |= y;
        }
    }
    m
}

/// Every subspace of F_2^n, from its reduced row echelon bases.
fn all_subspaces_f2(n: usize) -> Vec<Mask> {
    let mut out = Vec::new();
    for pivots in 0..1usize << n {
        let piv: Vec<usize> = (0..n).filter(|&b| pivots >> b & 1 == 1).collect();
        // Row r has its pivot at piv[r] and free entries at non-pivot bits above it.
        let free: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| ((c + 1)..n).filter(|b| pivots >> b & 1 == 0).map(move |b| (r, b)))
            .collect();
        for fill in 0..1usize << free.len() {
            let mut rows: Vec<usize> = piv.iter().map(|&c| 1 << c).collect();
            for (k, &(r, b)) in free.iter().enumerate() {
                if fill >> k & 1 == 1 {
                    rows[r] |= 1 << b;
                }
            }
            out.push(span_mask(&rows));
        }
    }
    out
}

/// Orthogonality identities over F_2 on bitmask subspaces: every single
/// subspace for dim ≤ 8, every pair for dim ≤ `pair_limit`, otherwise
/// `samples` random pairs.
pub fn orth_identities_f2_exhaustive(
    space: &PairingSpace,
    pair_limit: usize,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<OrthReport> {
    let n = space.dim();
    if space.p != 2 || n > 8 {
        return Err(Error::invalid("bitmask checks need p = 2 and dimension at most 8"));
    }
    space.require_nonsingular()?;
    let bits = |row: &[Fp]| row.iter().enumerate().fold(0usize, |a, (k, x)| a | ((x.value() as usize) << k));
    let rows_m: Vec<usize> = space.matrix.iter().map(|r| bits(r)).collect();
    // x M y over F_2.
    let form = |x: usize, y: usize| {
        let xm = (0..n).filter(|&k| x >> k & 1 == 1).fold(0usize, |a, k| a ^ rows_m[k]);
        (xm & y).count_ones() & 1
    };
    let size = 1usize << n;
    let mut zr = vec![[0u64; 4]; size];
    let mut zl = vec![[0u64; 4]; size];
    for x in 0..size {
        for y in 0..size {
            if form(x, y) == 0 {
                mask_set(&mut zr[x], y);
                mask_set(&mut zl[y], x);
            }
        }
    }
    let full = {
        let mut m = [0; 4];
        for v in 0..size {
            mask_set(&mut m, v);
        }
        m
    };
    let perp = |w: &Mask, z: &[Mask]| members(w, n).fold(full, |acc, x| mask_and(&acc, &z[x]));
    let subs = all_subspaces_f2(n);
    let index: HashMap<Mask, usize> = subs.iter().enumerate().map(|(k, m)| (*m, k)).collect();
    let right: Vec<Mask> = subs.iter().map(|w| perp(w, &zr)).collect();
    let mut report = OrthReport { exhaustive_singles: true, ..Default::default() };
    for (w, r) in subs.iter().zip(&right) {
        report.singles += 1;
        if perp(r, &zl) != *w {
            report.failures.push(format!("(W^⊥)^⊥ ≠ W for a subspace of dimension {}", members(w, n).count().trailing_zeros()));
        }
    }
    let check = |a: usize, b: usize, report: &mut OrthReport| {
        report.pairs += 1;
        let s = mask_sum(&subs[a], &subs[b], n);
        if right[index[&s]] != mask_and(&right[a], &right[b]) {
            report.failures.push("(W1 + W2)^⊥ ≠ W1^⊥ ∩ W2^⊥".into());
        }
        let m = mask_and(&subs[a], &subs[b]);
        if right[index[&m]] != mask_sum(&right[a], &right[b], n) {
            report.failures.push("(W1 ∩ W2)^⊥ ≠ W1^⊥ + W2^⊥".into());
        }
    };
    if n <= pair_limit {
        report.exhaustive_pairs = true;
        for a in 0..subs.len() {
            for b in a..subs.len() {
                check(a, b, &mut report);
            }
        }
    } else {
        for _ in 0..samples {
            let (a, b) = (rng.gen_range(0..subs.len()), rng.gen_range(0..subs.len()));
            check(a, b, &mut report);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::Poly;
    use crate::arith::ratfunc::RationalFunction;
    use crate::arith::rational::int;
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(8, -16, 16, 1e-10).unwrap()
    }

    fn pts(v: &[Option<u64>]) -> Vec<FiberPoint> {
        v.iter().map(|x| x.map_or(FiberPoint::Infinity, FiberPoint::Class)).collect()
    }

    #[test]
    fn dt_on_the_fiber_over_two() {
        let s = pts(&[Some(0), Some(1), None]);
        let space = quotient_pairing_space(&SurfaceDivisor::zero(), &SurfaceCurve::Vertical(2), &RationalForm::dt(), &s, (-2, 2), &ctx()).unwrap();
        assert_eq!(space.dim(), 12);
        assert_eq!(space.orders, vec![0, 0, -2]);
        assert!(space.is_nonsingular());
        // u^{-1} at t ≡ 0 against u^0 there.
        let i = space.left.iter().position(|&l| l == (0, -1)).unwrap();
        let j = space.right.iter().position(|&r| r == (0, 0)).unwrap();
        assert_eq!(space.matrix[i][j], Fp::one(2));
        // Integral against integral.
        let i = space.left.iter().position(|&l| l == (0, 1)).unwrap();
        assert_eq!(space.matrix[i][j], Fp::zero(2));
    }

    #[test]
    fn point_set_must_cover_the_form() {
        let s = pts(&[Some(0), Some(1)]);
        let err = quotient_pairing_space(&SurfaceDivisor::zero(), &SurfaceCurve::Vertical(2), &RationalForm::dt(), &s, (-1, 1), &ctx());
        assert!(err.is_err());
    }

    #[test]
    fn perpendicular_images() {
        let z = Rational::zero();
        let h = RationalFunction::new(Poly::new(z.clone(), vec![int(3)]), Poly::new(z, vec![int(0), int(1)])).unwrap();
        let omega = RationalForm::new(h);
        let s = pts(&[Some(0), Some(1), Some(2), None]);
        let d = SurfaceDivisor::from_terms([(SurfaceCurve::Vertical(3), 1)]);
        let space = quotient_pairing_space(&d, &SurfaceCurve::Vertical(3), &omega, &s, (-1, 2), &ctx()).unwrap();
        assert_eq!((space.e, space.n), (1, 1));
        assert!(space.is_nonsingular());
        for e in [[0, 0, 0, 0], [1, -1, 0, 2], [-1, 1, 1, -3]] {
            let w = space.fiber_image_left(&e);
            let c = space.orth_complement(&w).unwrap();
            assert!(linalg::same_subspace(&c, &space.fiber_image_right(&e), space.dim()), "{e:?}");
        }
        for k in [0, 1, 2] {
            let dp = SurfaceDivisor::from_terms([(SurfaceCurve::Vertical(3), k)]);
            let omega_minus = SurfaceDivisor::from_terms([(SurfaceCurve::Vertical(3), space.e - k)]);
            let c = space.orth_complement(&space.a12_image_left(&dp)).unwrap();
            assert!(linalg::same_subspace(&c, &space.a12_image_right(&omega_minus), space.dim()), "{k}");
        }
    }

    #[test]
    fn orthogonality_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = pts(&[Some(0), None]);
        let space = quotient_pairing_space(&SurfaceDivisor::zero(), &SurfaceCurve::Vertical(2), &RationalForm::dt(), &s, (-1, 1), &ctx()).unwrap();
        assert_eq!(space.dim(), 4);
        let r = orth_identities_f2_exhaustive(&space, 4, 0, &mut rng).unwrap();
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        assert_eq!(r.singles, 67);
        assert!(r.exhaustive_pairs);
        for _ in 0..20 {
            let (a, b) = (random_subspace(2, 4, &mut rng), random_subspace(2, 4, &mut rng));
            assert!(orth_identities(&space, &a, &b).unwrap().is_empty());
        }
    }

    #[test]
    fn subspace_counts_over_f2() {
        let counts: Vec<usize> = (0..=5).map(|n| all_subspaces_f2(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 16, 67, 374]);
    }
}
