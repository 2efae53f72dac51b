use std::fmt;
use std::sync::Arc;

use crate::arith::poly::Poly;
use crate::arith::scalar::Scalar;
use crate::error::{Error, Result};

/// Element of the algebra `K[x]/(q)` for a squarefree monic `q`.
///
/// For irreducible `q` this is the residue field of a closed point of the line;
/// for squarefree `q` it is a product of such fields, which is all that a trace
/// over a group of conjugate roots needs.
#[derive(Clone, PartialEq)]
pub struct Ext<K: Scalar> {
    modulus: Arc<Poly<K>>,
    rep: Poly<K>,
}

impl<K: Scalar> Ext<K> {
    pub fn new(modulus: Arc<Poly<K>>, rep: &Poly<K>) -> Self {
        let r = rep.rem(&modulus).expect("modulus is monic");
        Ext { modulus, rep: r }
    }

    /// The class of `x`.
    pub fn generator(modulus: Arc<Poly<K>>) -> Self {
        let z = modulus.proto().clone();
        let x = Poly::monomial(z.one_like(), 1);
        Ext::new(modulus, &x)
    }

    pub fn from_base(modulus: Arc<Poly<K>>, c: K) -> Self {
        Ext::new(modulus, &Poly::constant(c))
    }

    pub fn modulus(&self) -> &Arc<Poly<K>> {
        &self.modulus
    }

    pub fn rep(&self) -> &Poly<K> {
        &self.rep
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap_or(0)
    }

    /// Trace to the base field: the trace of multiplication by `self`.
    pub fn trace(&self) -> K {
        let z = self.modulus.proto().clone();
        let mut acc = z.clone();
        let mut basis = Poly::one(&z);
        for i in 0..self.degree() {
            let prod = self.rep.mul(&basis).rem(&self.modulus).expect("monic modulus");
            acc = acc.plus(&prod.coeff(i));
            basis = basis.shift_up(1);
        }
        acc
    }
}

impl<K: Scalar> fmt::Debug for Ext<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?} mod {:?}]", self.rep, self.modulus)
    }
}

impl<K: Scalar> Scalar for Ext<K> {
    fn zero_like(&self) -> Self {
        Ext { modulus: self.modulus.clone(), rep: Poly::zero(self.modulus.proto()) }
    }
    fn one_like(&self) -> Self {
        Ext::from_base(self.modulus.clone(), self.modulus.proto().one_like())
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Ext::from_base(self.modulus.clone(), self.modulus.proto().from_i64_like(n))
    }
    fn vanishes(&self) -> bool {
        self.rep.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        Ext { modulus: self.modulus.clone(), rep: self.rep.add(&o.rep) }
    }
    fn minus(&self, o: &Self) -> Self {
        Ext { modulus: self.modulus.clone(), rep: self.rep.sub(&o.rep) }
    }
    fn times(&self, o: &Self) -> Self {
        Ext::new(self.modulus.clone(), &self.rep.mul(&o.rep))
    }
    fn negated(&self) -> Self {
        Ext { modulus: self.modulus.clone(), rep: self.rep.neg() }
    }
    fn inverse(&self) -> Result<Self> {
        let (g, s, _) = self.rep.ext_gcd(&self.modulus)?;
        if g.degree() != Some(0) {
            return Err(Error::DivisionByZero);
        }
        Ok(Ext::new(self.modulus.clone(), &s))
    }
    fn same_ring(&self, o: &Self) -> bool {
        self.modulus == o.modulus
    }
    fn ring_name(&self) -> String {
        format!("{}[x]/({:?})", self.modulus.proto().ring_name(), self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fp::Fp;

    #[test]
    fn f4_arithmetic_and_trace() {
        let one = Fp::one(2);
        let q = Arc::new(Poly::new(Fp::zero(2), vec![one, one, one]));
        let w = Ext::generator(q.clone());
        // w^2 = w + 1, w^3 = 1
        assert_eq!(w.pow_u(3), w.one_like());
        assert_eq!(w.times(&w.inverse().unwrap()), w.one_like());
        // trace of w is the sum of the roots of x^2+x+1: 1
        assert_eq!(w.trace(), one);
        assert_eq!(w.one_like().trace(), Fp::zero(2));
    }
}
