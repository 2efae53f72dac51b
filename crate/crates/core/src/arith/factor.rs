//! Factorization and irreducibility for polynomials over F_p and Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::fp::Fp;
use crate::arith::poly::Poly;
use crate::arith::rational::{factor_u64, Rational};
use crate::arith::scalar::Scalar;
use crate::error::{Error, Result};

/// `base^e mod m` for polynomials over F_p, `e` given as a big exponent.
pub fn powmod(base: &Poly<Fp>, e: u128, m: &Poly<Fp>) -> Poly<Fp> {
    let mut acc = Poly::one(m.proto());
    let mut b = base.rem(m).expect("monic modulus");
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b).rem(m).unwrap();
        }
        b = b.mul(&b).rem(m).unwrap();
        e >>= 1;
    }
    acc.rem(m).unwrap()
}

fn x_poly(p: u64) -> Poly<Fp> {
    Poly::monomial(Fp::one(p), 1)
}

/// Rabin-style test: a monic `f` of degree n is irreducible iff
/// `gcd(f, x^(p^i) - x) = 1` for all `i <= n/2`.
pub fn is_irreducible_fp(f: &Poly<Fp>) -> bool {
    let Some(n) = f.degree() else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let p = f.proto().p();
    let f = f.make_monic().unwrap();
    let x = x_poly(p);
    let mut h = x.clone();
    for _ in 1..=n / 2 {
        h = powmod(&h, p as u128, &f);
        let g = f.gcd(&h.sub(&x)).unwrap();
        if g.degree() != Some(0) {
            return false;
        }
    }
    true
}

/// All monic irreducible polynomials of degree `d` over F_p, in lexicographic order of coefficients.
pub fn irreducibles_fp(p: u64, d: usize) -> Vec<Poly<Fp>> {
    let count = (p as u128).pow(d as u32);
    let mut out = Vec::new();
    for idx in 0..count {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut r = idx;
        for _ in 0..d {
            coeffs.push(Fp::new(p, (r % p as u128) as i64));
            r /= p as u128;
        }
        coeffs.push(Fp::one(p));
        let f = Poly::new(Fp::zero(p), coeffs);
        if is_irreducible_fp(&f) {
            out.push(f);
        }
    }
    out
}

fn pth_root(f: &Poly<Fp>) -> Poly<Fp> {
    let p = f.proto().p() as usize;
    let v = f.coeffs().iter().step_by(p).cloned().collect();
    Poly::new(Fp::zero(f.proto().p()), v)
}

/// Squarefree decomposition of a monic polynomial over F_p: pairwise coprime
/// squarefree factors with multiplicities.
pub fn squarefree_fp(f: &Poly<Fp>) -> Vec<(Poly<Fp>, u32)> {
    let p = f.proto().p();
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let f = f.make_monic().unwrap();
    let mut c = f.gcd(&f.derivative()).unwrap();
    let mut w = f.div_exact(&c).unwrap();
    let mut i = 1;
    while w.degree() != Some(0) {
        let y = w.gcd(&c).unwrap();
        let z = w.div_exact(&y).unwrap();
        if z.degree() != Some(0) {
            out.push((z, i));
        }
        i += 1;
        w = y.clone();
        c = c.div_exact(&y).unwrap();
    }
    if c.degree() != Some(0) {
        for (g, m) in squarefree_fp(&pth_root(&c)) {
            out.push((g, m * p as u32));
        }
    }
    out
}

fn distinct_degree(f: &Poly<Fp>) -> Vec<(Poly<Fp>, usize)> {
    let p = f.proto().p();
    let x = x_poly(p);
    let mut out = Vec::new();
    let mut f = f.clone();
    let mut h = x.clone();
    let mut i = 1;
    while f.degree().unwrap_or(0) >= 2 * i {
        h = powmod(&h, p as u128, &f);
        let g = f.gcd(&h.sub(&x)).unwrap();
        if g.degree() != Some(0) {
            f = f.div_exact(&g).unwrap();
            h = h.rem(&f).unwrap();
            out.push((g, i));
        }
        i += 1;
    }
    if f.degree().unwrap_or(0) > 0 {
        let d = f.degree().unwrap();
        out.push((f, d));
    }
    out
}

fn equal_degree(g: &Poly<Fp>, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly<Fp>>) {
    let n = g.degree().unwrap();
    if n == d {
        out.push(g.clone());
        return;
    }
    let p = g.proto().p();
    loop {
        let a = Poly::new(Fp::zero(p), (0..n).map(|_| Fp::new(p, rng.gen_range(0..p) as i64)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            let mut acc = a.clone();
            let mut cur = a.clone();
            for _ in 1..d {
                cur = cur.mul(&cur).rem(g).unwrap();
                acc = acc.add(&cur);
            }
            acc
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            powmod(&a, e, g).sub(&Poly::one(&Fp::zero(p)))
        };
        let h = g.gcd(&b).unwrap();
        let hd = h.degree().unwrap_or(0);
        if hd > 0 && hd < n {
            equal_degree(&h, d, rng, out);
            equal_degree(&g.div_exact(&h).unwrap(), d, rng, out);
            return;
        }
    }
}

/// Complete factorization over F_p into monic irreducibles with multiplicities,
/// sorted by degree then coefficients. Constants are dropped.
pub fn factor_fp(f: &Poly<Fp>) -> Vec<(Poly<Fp>, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    for (sq, m) in squarefree_fp(f) {
        for (g, d) in distinct_degree(&sq) {
            let mut parts = Vec::new();
            equal_degree(&g, d, &mut rng, &mut parts);
            out.extend(parts.into_iter().map(|q| (q, m)));
        }
    }
    out.sort_by_key(|(q, _)| (q.degree(), q.coeffs().iter().map(|c| c.value()).collect::<Vec<_>>()));
    out
}

/// Squarefree decomposition over Q (Yun).
pub fn squarefree_q(f: &Poly<Rational>) -> Vec<(Poly<Rational>, u32)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let f = f.make_monic().unwrap();
    let df = f.derivative();
    let a0 = f.gcd(&df).unwrap();
    let mut b = f.div_exact(&a0).unwrap();
    let mut c = df.div_exact(&a0).unwrap();
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d).unwrap();
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a).unwrap();
        c = d.div_exact(&a).unwrap();
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

/// Primitive integer polynomial proportional to `f`, with positive leading coefficient.
pub fn primitive_integer(f: &Poly<Rational>) -> Vec<BigInt> {
    let l = f.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let v: Vec<BigInt> = f.coeffs().iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut v: Vec<BigInt> = v.into_iter().map(|c| c / &g).collect();
    if v.last().is_some_and(|c| c.is_negative()) {
        v = v.into_iter().map(|c| -c).collect();
    }
    v
}

fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (q, e) in factor_u64(n) {
        let cur = ds.clone();
        let mut pw = 1;
        for _ in 0..e {
            pw *= q;
            ds.extend(cur.iter().map(|d| d * pw));
        }
    }
    ds.sort_unstable();
    ds
}

/// Distinct rational roots of a nonzero polynomial over Q.
pub fn rational_roots(f: &Poly<Rational>) -> Result<Vec<Rational>> {
    let mut v = primitive_integer(f);
    let mut roots = Vec::new();
    if v.is_empty() {
        return Err(Error::invalid("roots of the zero polynomial"));
    }
    if v[0].is_zero() {
        roots.push(Rational::zero());
        let k = v.iter().take_while(|c| c.is_zero()).count();
        v.drain(..k);
    }
    if v.len() <= 1 {
        return Ok(roots);
    }
    let a0 = v[0].abs().to_u64();
    let an = v.last().unwrap().abs().to_u64();
    let (Some(a0), Some(an)) = (a0, an) else {
        return Err(Error::Unsupported("coefficients too large for rational-root search".into()));
    };
    let g = Poly::new(Rational::zero(), v.iter().map(|c| Rational::from_integer(c.clone())).collect());
    for u in divisors(a0) {
        for w in divisors(an) {
            for s in [1i64, -1] {
                let r = Rational::new(BigInt::from(u) * s, BigInt::from(w));
                if g.eval(&r).is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort();
    Ok(roots)
}

/// Reduction of a polynomial with p-integral coefficients modulo p.
pub fn reduce_mod_p(f: &Poly<Rational>, p: u64) -> Result<Poly<Fp>> {
    let pb = BigInt::from(p);
    let v = f
        .coeffs()
        .iter()
        .map(|c| {
            if (c.denom() % &pb).is_zero() {
                return Err(Error::invalid(format!("coefficient {c} is not {p}-integral")));
            }
            let d = Fp::new(p, (c.denom().mod_floor(&pb)).to_i64().unwrap());
            let n = Fp::new(p, (c.numer().mod_floor(&pb)).to_i64().unwrap());
            Ok(n.times(&d.inverse()?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(Fp::zero(p), v))
}

/// Irreducibility over Q. Degrees up to 3 are decided by the rational-root test;
/// higher degrees are certified by an irreducible reduction modulo a small prime
/// and reported as unsupported when no such prime is found.
pub fn is_irreducible_q(f: &Poly<Rational>) -> Result<bool> {
    let Some(n) = f.degree() else { return Ok(false) };
    match n {
        0 => Ok(false),
        1 => Ok(true),
        2 | 3 => Ok(rational_roots(f)?.is_empty()),
        _ => {
            let v = primitive_integer(f);
            let g = Poly::new(Rational::zero(), v.iter().map(|c| Rational::from_integer(c.clone())).collect());
            for p in (2u64..200).filter(|&p| crate::arith::rational::is_prime(p)) {
                if (v.last().unwrap() % BigInt::from(p)).is_zero() {
                    continue;
                }
                let r = reduce_mod_p(&g, p)?;
                if is_irreducible_fp(&r) {
                    return Ok(true);
                }
            }
            if !rational_roots(f)?.is_empty() {
                return Ok(false);
            }
            Err(Error::Unsupported(format!("cannot certify irreducibility of a degree-{n} polynomial over Q")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    fn fp(p: u64, v: &[i64]) -> Poly<Fp> {
        Poly::new(Fp::zero(p), v.iter().map(|&x| Fp::new(p, x)).collect())
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree d over F_p: (1/d) sum mu(d/e) p^e
        assert_eq!(irreducibles_fp(2, 2).len(), 1);
        assert_eq!(irreducibles_fp(2, 3).len(), 2);
        assert_eq!(irreducibles_fp(3, 2).len(), 3);
        assert_eq!(irreducibles_fp(5, 3).len(), 40);
        assert_eq!(irreducibles_fp(7, 3).len(), 112);
    }

    #[test]
    fn factorization_reassembles() {
        // (t^2+t+1)^2 (t+1)^3 t over F_2
        let f = fp(2, &[1, 1, 1]).pow(2).mul(&fp(2, &[1, 1]).pow(3)).mul(&fp(2, &[0, 1]));
        let fac = factor_fp(&f);
        let back = fac.iter().fold(Poly::one(&Fp::zero(2)), |acc, (q, m)| acc.mul(&q.pow(*m)));
        assert_eq!(back, f);
        assert_eq!(fac.len(), 3);
        // t^2 + 2 = t^2 over F_2
        assert_eq!(factor_fp(&fp(2, &[2, 0, 1])), vec![(fp(2, &[0, 1]), 2)]);
    }

    #[test]
    fn factorization_over_f7() {
        let f = fp(7, &[1, 0, 1]).mul(&fp(7, &[3, 0, 0, 1])).mul(&fp(7, &[2, 1]));
        let fac = factor_fp(&f);
        for (q, _) in &fac {
            assert!(is_irreducible_fp(q));
        }
        let back = fac.iter().fold(Poly::one(&Fp::zero(7)), |acc, (q, m)| acc.mul(&q.pow(*m)));
        assert_eq!(back, f);
    }

    #[test]
    fn rational_roots_and_irreducibility() {
        let f = Poly::new(int(0), vec![int(-2), int(1), int(1)]); // (t-1)(t+2)
        assert_eq!(rational_roots(&f).unwrap(), vec![int(-2), int(1)]);
        assert!(is_irreducible_q(&Poly::new(int(0), vec![int(1), int(0), int(1)])).unwrap());
        assert!(!is_irreducible_q(&f).unwrap());
        let sq = squarefree_q(&f.mul(&f).mul(&Poly::new(int(0), vec![int(0), int(1)])));
        assert_eq!(sq.len(), 2);
    }
}
