//! Spec Z as an arithmetic curve: divisors, adeles, metrized lattices and
//! their theta-sum cohomology counts.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::padic::PAdic;
use crate::arith::rational::{factor_u64, format_rational, is_prime, ord_p, Rational};
use crate::arith::scalar::{rational_to_f64, Scalar};
use crate::error::{Error, Result};

/// Enumeration stops with an error rather than visit more lattice points than this.
const MAX_POINTS: f64 = 2.0e8;

/// A lattice Z^n with the quadratic form x ↦ xᵀ·G·x.
#[derive(Clone, Debug, PartialEq)]
pub struct MetrizedLattice {
    gram: DMatrix<f64>,
}

impl MetrizedLattice {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("gram matrix is empty"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("gram matrix is not square"));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::invalid("gram matrix has a non-finite entry"));
        }
        let gram = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (gram[(i, j)], gram[(j, i)]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::invalid("gram matrix is not symmetric"));
                }
            }
        }
        let gram = (&gram + gram.transpose()) * 0.5;
        if Cholesky::new(gram.clone()).is_none() {
            return Err(Error::invalid("gram matrix is not positive definite"));
        }
        Ok(MetrizedLattice { gram })
    }

    pub fn identity(n: usize) -> Self {
        MetrizedLattice { gram: DMatrix::identity(n, n) }
    }

    pub fn rank_one(g: f64) -> Result<Self> {
        Self::new(vec![vec![g]])
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> Vec<Vec<f64>> {
        (0..self.rank())
            .map(|i| (0..self.rank()).map(|j| self.gram[(i, j)]).collect())
            .collect()
    }

    /// Rescale the form by s.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::invalid("scale must be positive"));
        }
        Ok(MetrizedLattice { gram: &self.gram * s })
    }

    /// The dual lattice, with the inverse form.
    pub fn dual(&self) -> Self {
        let inv = Cholesky::new(self.gram.clone()).expect("validated").inverse();
        let sym = (&inv + inv.transpose()) * 0.5;
        MetrizedLattice { gram: sym }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> =
            SymmetricEigen::new(self.gram.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    pub fn condition_number(&self) -> f64 {
        let ev = self.eigenvalues();
        ev[ev.len() - 1] / ev[0]
    }

    fn log_det(&self) -> f64 {
        let l = Cholesky::new(self.gram.clone()).expect("validated").unpack();
        2.0 * (0..self.rank()).map(|i| l[(i, i)].ln()).sum::<f64>()
    }
}

impl fmt::Display for MetrizedLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .gram()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

pub fn deg_ar(l: &MetrizedLattice) -> f64 {
    -0.5 * l.log_det()
}

/// Neumaier's compensated summation.
#[derive(Default)]
struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Radius² of an ellipsoid outside which the theta tail is below `bound`.
///
/// For q(x) > R², e^{-πq} ≤ e^{-πR²/2}·e^{-πq/2}, and q ≥ λ_min·|x|² gives
/// Σ_x e^{-πq/2} ≤ (1 + √(2/λ_min))^n.
fn tail_radius_sq(n: usize, lambda_min: f64, bound: f64) -> f64 {
    let per_axis = 1.0 + (2.0 / lambda_min).sqrt();
    (2.0 / PI) * ((1.0 / bound).ln() + n as f64 * per_axis.ln()).max(0.0)
}

fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

/// Σ_{x ≠ 0} e^{-π q(x)} with truncation error below `tail`.
fn theta_minus_one(l: &MetrizedLattice, tail: f64) -> Result<f64> {
    let n = l.rank();
    // Slightly undershoot λ_min so rounding in the eigensolver cannot shrink R.
    let lambda_min = l.eigenvalues()[0] * (1.0 - 1e-9);
    let r2 = tail_radius_sq(n, lambda_min, tail);
    let est = unit_ball_volume(n) * r2.powf(n as f64 / 2.0) * (-0.5 * l.log_det()).exp();
    let axis = (r2 / lambda_min).sqrt();
    if est > MAX_POINTS || axis > MAX_POINTS {
        return Err(Error::Unsupported(format!(
            "theta sum needs about {est:.3e} lattice points"
        )));
    }
    let r = Cholesky::new(l.gram.clone()).expect("validated").unpack().transpose();
    let budget = r2 * (1.0 + 1e-12) + 1e-12;
    let mut acc = Accumulator::default();
    let mut x = vec![0i64; n];
    fincke_pohst(&r, n, budget, 0.0, &mut x, &mut acc);
    Ok(acc.total())
}

/// Enumerate coordinates i-1, …, 0 given x[i..], with `used` = q restricted to those.
fn fincke_pohst(
    r: &DMatrix<f64>,
    i: usize,
    budget: f64,
    used: f64,
    x: &mut Vec<i64>,
    acc: &mut Accumulator,
) {
    if i == 0 {
        if x.iter().any(|&v| v != 0) {
            acc.add((-PI * used).exp());
        }
        return;
    }
    let k = i - 1;
    let rkk = r[(k, k)];
    let shift: f64 = (i..x.len()).map(|j| r[(k, j)] * x[j] as f64).sum::<f64>() / rkk;
    let centre = -shift;
    let room = ((budget - used).max(0.0)).sqrt() / rkk;
    let lo = (centre - room).ceil() as i64;
    let hi = (centre + room).floor() as i64;
    for v in lo..=hi {
        let d = rkk * (v as f64 - centre);
        let q = used + d * d;
        if q <= budget {
            x[k] = v;
            fincke_pohst(r, k, budget, q, x, acc);
        }
    }
    x[k] = 0;
}

/// log of the theta sum Σ_{x ∈ Z^n} exp(-π xᵀGx).
pub fn h0_ar(l: &MetrizedLattice, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be positive"));
    }
    Ok(theta_minus_one(l, tol / 10.0)?.ln_1p())
}

/// h0 of the dual lattice.
pub fn h1_ar(l: &MetrizedLattice, tol: f64) -> Result<f64> {
    h0_ar(&l.dual(), tol)
}

/// h0 - h1 - deg, which vanishes by Poisson summation.
pub fn rr_defect(l: &MetrizedLattice, tol: f64) -> Result<f64> {
    Ok(h0_ar(l, tol)? - h1_ar(l, tol)? - deg_ar(l))
}

/// The constant in front of the effective vanishing bound at rank 1 over Q.
pub fn vanishing_constant() -> f64 {
    3.0 / (1.0 - 3f64.ln() / PI)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VanishingCheck {
    pub degree: f64,
    pub h0: f64,
    pub bound: f64,
    /// Logarithms stay meaningful after h0 and the bound underflow.
    pub log_h0: f64,
    pub log_bound: f64,
    pub ok: bool,
}

/// Compare h0 of the rank-one lattice of degree d with the effective vanishing bound.
pub fn vanishing_bound_check(d: f64, tol: f64) -> Result<VanishingCheck> {
    if !(d <= 0.0) {
        return Err(Error::invalid(format!("degree must be <= 0, got {d}")));
    }
    let g = (-2.0 * d).exp();
    let l = MetrizedLattice::rank_one(g)?;
    let h0 = h0_ar(&l, tol)?;
    // θ - 1 = 2e^{-πg}·S with S = Σ_{k≥1} e^{-πg(k²-1)}.
    let mut s = Accumulator::default();
    for k in 1..=64i64 {
        let term = (-PI * g * ((k * k - 1) as f64)).exp();
        s.add(term);
        if term < 1e-18 {
            break;
        }
    }
    let log_x = 2f64.ln() - PI * g + s.total().ln();
    let log_h0 = if log_x < -20.0 {
        // log(log(1+x)) = log x + log(1 - x/2 + …)
        log_x + (-(log_x.exp()) / 2.0).ln_1p()
    } else {
        h0.ln()
    };
    let log_bound = vanishing_constant().ln() - PI * (-d).exp();
    Ok(VanishingCheck {
        degree: d,
        h0,
        bound: log_bound.exp(),
        log_h0,
        log_bound,
        ok: log_h0 <= log_bound,
    })
}

/// A divisor Σ n_p·(p) + r·∞ on Spec Z.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ArithDivisor {
    finite: BTreeMap<u64, i64>,
    real: f64,
}

impl ArithDivisor {
    pub fn new(finite: impl IntoIterator<Item = (u64, i64)>, real: f64) -> Result<Self> {
        let mut d = ArithDivisor { finite: BTreeMap::new(), real: 0.0 };
        for (p, n) in finite {
            d.add_prime(p, n)?;
        }
        d.set_real(real)?;
        Ok(d)
    }

    pub fn add_prime(&mut self, p: u64, n: i64) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        let e = self.finite.entry(p).or_insert(0);
        *e += n;
        if *e == 0 {
            self.finite.remove(&p);
        }
        Ok(())
    }

    pub fn set_real(&mut self, r: f64) -> Result<()> {
        if !r.is_finite() {
            return Err(Error::invalid("infinite-place coefficient must be finite"));
        }
        self.real = r;
        Ok(())
    }

    pub fn add_real(&mut self, r: f64) -> Result<()> {
        self.set_real(self.real + r)
    }

    pub fn finite(&self) -> &BTreeMap<u64, i64> {
        &self.finite
    }

    pub fn real(&self) -> f64 {
        self.real
    }

    pub fn mult(&self, p: u64) -> i64 {
        self.finite.get(&p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> f64 {
        self.finite.iter().map(|(&p, &n)| n as f64 * (p as f64).ln()).sum::<f64>() + self.real
    }
}

impl fmt::Display for ArithDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(f64, String)> = self.finite.iter().map(|(p, &n)| (n as f64, format!("({p})"))).collect();
        if self.real != 0.0 || terms.is_empty() {
            terms.push((self.real, "inf".into()));
        }
        for (k, (c, place)) in terms.iter().enumerate() {
            match (k, *c < 0.0) {
                (0, _) => write!(f, "{c}*{place}")?,
                (_, true) => write!(f, " - {}*{place}", -c)?,
                (_, false) => write!(f, " + {c}*{place}")?,
            }
        }
        Ok(())
    }
}

/// An adele of Q: listed p-adic components, a real component, and integral
/// (but otherwise unspecified) components at every unlisted prime.
#[derive(Clone, Debug, PartialEq)]
pub struct ArithAdele {
    pub finite: BTreeMap<u64, PAdic>,
    pub real: f64,
}

impl ArithAdele {
    /// The diagonal image of q, listing every prime in its denominator and in `extra`.
    pub fn diagonal(q: &Rational, extra: &[u64], digits: u32) -> Result<Self> {
        let mut primes: Vec<u64> = extra.to_vec();
        let den = q
            .denom()
            .to_u64()
            .ok_or_else(|| Error::Unsupported("denominator exceeds 64 bits".into()))?;
        primes.extend(factor_u64(den).into_iter().map(|(p, _)| p));
        primes.sort_unstable();
        primes.dedup();
        Ok(ArithAdele {
            finite: primes.into_iter().map(|p| (p, PAdic::from_rational(q, p, digits))).collect(),
            real: rational_to_f64(q),
        })
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut finite = self.finite.clone();
        for (p, b) in &o.finite {
            let v = match finite.get(p) {
                Some(a) => a.minus(b),
                None => b.negated(),
            };
            finite.insert(*p, v);
        }
        ArithAdele { finite, real: self.real - o.real }
    }

    /// Membership in A₁(D) at the finite places: ord_p ≥ -n_p everywhere.
    pub fn in_a1(&self, d: &ArithDivisor) -> Result<bool> {
        for (&p, &n) in d.finite() {
            if n < 0 && !self.finite.contains_key(&p) {
                return Err(Error::InsufficientPrecision(format!(
                    "component at {p} is unlisted but must be divisible by {p}^{}",
                    -n
                )));
            }
        }
        for (&p, a) in &self.finite {
            let need = -d.mult(p);
            if a.abs_prec() < need {
                return Err(Error::InsufficientPrecision(format!(
                    "component at {p} known only to absolute precision {}",
                    a.abs_prec()
                )));
            }
            if a.val_lower_bound() < need && !a.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// d¹(a₀, a₁) = a₁ - a₀ for a₀ ∈ Q and a₁ ∈ A₁(D).
pub fn d1_arith(a0: &Rational, a1: &ArithAdele, digits: u32) -> Result<ArithAdele> {
    let listed: Vec<u64> = a1.finite.keys().copied().collect();
    Ok(a1.sub(&ArithAdele::diagonal(a0, &listed, digits)?))
}

/// Q ∩ A₁(D) = generator·Z together with its metrized lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct ArithH0 {
    pub generator: Rational,
    pub lattice: MetrizedLattice,
}

impl ArithH0 {
    pub fn ideal_label(&self) -> String {
        format!("({})Z", format_rational(&self.generator))
    }
}

pub fn arith_h0_lattice(d: &ArithDivisor) -> ArithH0 {
    let mut generator = Rational::one();
    for (&p, &n) in d.finite() {
        let pp = Rational::from_integer(p.into());
        let pw = num_traits::pow(pp, n.unsigned_abs() as usize);
        generator = if n >= 0 { generator / pw } else { generator * pw };
    }
    let g = rational_to_f64(&generator);
    let gram = (-2.0 * d.real()).exp() * g * g;
    ArithH0 {
        generator,
        lattice: MetrizedLattice::rank_one(gram).expect("positive scalar"),
    }
}

/// Does f lie in Q ∩ A₁(D)? Used as the brute-force side of the lattice check.
pub fn in_h0(f: &Rational, d: &ArithDivisor) -> bool {
    if f.is_zero() {
        return true;
    }
    for (&p, &n) in d.finite() {
        if ord_p(f, p).unwrap() < -n {
            return false;
        }
    }
    // Away from supp D the denominator must be a unit.
    let mut den = f.denom().clone();
    for (&p, &n) in d.finite() {
        if n > 0 {
            let pb = BigInt::from(p);
            while (&den % &pb).is_zero() {
                den /= &pb;
            }
        }
    }
    den.is_one()
}

/// The two-term complex Q ⊕ A₁(D) → A_Q and its cohomology counts.
#[derive(Clone, Debug, PartialEq)]
pub struct ArithComplex {
    pub divisor: ArithDivisor,
    pub h0_group: ArithH0,
    pub degree: f64,
    pub h0: f64,
    pub h1: f64,
}

impl ArithComplex {
    pub fn rr_defect(&self) -> f64 {
        self.h0 - self.h1 - self.degree
    }

    /// The quotient A_Q/(Q + A₁(D)) is compact; only its count is materialized.
    pub fn h1_description(&self) -> String {
        format!(
            "A_Q/(Q + A_1(D)), compact, dual to the lattice {}",
            self.h0_group.ideal_label()
        )
    }
}

pub fn adelic_complex_arith(d: &ArithDivisor, tol: f64) -> Result<ArithComplex> {
    let h0_group = arith_h0_lattice(d);
    let h0 = h0_ar(&h0_group.lattice, tol)?;
    let h1 = h1_ar(&h0_group.lattice, tol)?;
    Ok(ArithComplex {
        divisor: d.clone(),
        degree: deg_ar(&h0_group.lattice),
        h0_group,
        h0,
        h1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    fn naive_theta_1d(g: f64) -> f64 {
        (-200i64..=200).map(|k| (-PI * g * (k * k) as f64).exp()).sum()
    }

    #[test]
    fn degrees() {
        assert_eq!(deg_ar(&MetrizedLattice::identity(3)), 0.0);
        let l = MetrizedLattice::rank_one(4.0).unwrap();
        assert!((deg_ar(&l) + 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rank_one_theta_values() {
        let h = h0_ar(&MetrizedLattice::rank_one(1.0).unwrap(), 1e-12).unwrap();
        assert!((h - naive_theta_1d(1.0).ln()).abs() < 1e-13);
        assert!((h - 0.0829015).abs() < 1e-6);
        let h = h0_ar(&MetrizedLattice::rank_one(4.0).unwrap(), 1e-12).unwrap();
        assert!((h - (2.0 * (-4.0 * PI).exp()).ln_1p()).abs() < 1e-15);
        let h1 = h1_ar(&MetrizedLattice::rank_one(4.0).unwrap(), 1e-12).unwrap();
        assert!((h1 - naive_theta_1d(0.25).ln()).abs() < 1e-13);
    }

    #[test]
    fn defect_small_for_skewed_forms() {
        let l = MetrizedLattice::new(vec![
            vec![2.0, 0.9, 0.1],
            vec![0.9, 0.7, -0.2],
            vec![0.1, -0.2, 0.3],
        ])
        .unwrap();
        assert!(rr_defect(&l, 1e-12).unwrap().abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_forms() {
        assert!(MetrizedLattice::new(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(MetrizedLattice::new(vec![vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
        assert!(MetrizedLattice::new(vec![]).is_err());
    }

    #[test]
    fn vanishing_at_zero_and_deep() {
        let c = vanishing_bound_check(0.0, 1e-12).unwrap();
        assert!(c.ok);
        assert!((c.bound - vanishing_constant() * (-PI).exp()).abs() < 1e-12);
        let c = vanishing_bound_check(-10.0, 1e-12).unwrap();
        assert!(c.ok && c.h0 == 0.0 && c.log_h0.is_finite());
        assert!(vanishing_bound_check(0.5, 1e-12).is_err());
    }

    #[test]
    fn h0_lattices() {
        let d = ArithDivisor::new([(2, 1)], 0.0).unwrap();
        assert_eq!(arith_h0_lattice(&d).generator, rat(1, 2));
        let d = ArithDivisor::new([(3, 2), (5, -1)], 0.0).unwrap();
        assert_eq!(arith_h0_lattice(&d).generator, rat(5, 9));
        assert!(in_h0(&rat(5, 9), &d) && in_h0(&rat(10, 3), &d) && !in_h0(&rat(1, 9), &d));
        let c = adelic_complex_arith(&ArithDivisor::new([(2, 1)], 0.0).unwrap(), 1e-12).unwrap();
        assert!((c.degree - 2f64.ln()).abs() < 1e-14);
        assert!(c.rr_defect().abs() < 1e-10);
    }

    #[test]
    fn adele_membership() {
        let d = ArithDivisor::new([(2, 1)], 0.0).unwrap();
        let a = ArithAdele::diagonal(&rat(3, 2), &[], 20).unwrap();
        assert!(a.in_a1(&d).unwrap());
        let b = ArithAdele::diagonal(&rat(1, 4), &[], 20).unwrap();
        assert!(!b.in_a1(&d).unwrap());
        let diff = d1_arith(&rat(1, 4), &b, 20).unwrap();
        assert!(diff.finite[&2].is_zero());
    }
}
