//! H^0 of a divisor on P^1 over Z, and the fiber pieces of the long exact
//! sequence attached to a vertical curve.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::fp::Fp;
use crate::arith::poly::Poly;
use crate::arith::rational::Rational;
use crate::ctx::PrecisionCtx;
use crate::curve::{adelic_h0_h1, CurveDivisor};
use crate::error::{Error, Result};

use super::expand::QFunction;
use super::geometry::{QPoint, SurfaceCurve, SurfaceDivisor};

/// {f ∈ Q(t) : div f + D ≥ 0} as the lattice `scale · Z[t]_{≤ degree} · factor`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceH0 {
    pub divisor: SurfaceDivisor,
    /// Generator of the coefficient ideal, Π p^{-ord_{V_p}(D)}.
    pub scale: Rational,
    /// Π (v t - u)^{-ord_{E_{u/v}}(D)} over finite horizontal curves.
    pub factor: QFunction,
    /// Bound on the polynomial degree, or `None` when the space is zero.
    pub degree: Option<usize>,
}

impl SurfaceH0 {
    pub fn rank(&self) -> usize {
        self.degree.map_or(0, |d| d + 1)
    }

    /// The Z-basis scale · t^k · factor.
    pub fn basis(&self) -> Vec<QFunction> {
        (0..self.rank())
            .map(|k| QFunction::from_poly(Poly::monomial(self.scale.clone(), k)).mul(&self.factor))
            .collect()
    }

    /// Whether f lies in the lattice.
    pub fn contains(&self, f: &QFunction) -> Result<bool> {
        if f.is_zero() {
            return Ok(true);
        }
        let Some(deg) = self.degree else { return Ok(false) };
        let l = f.div(&self.factor)?;
        if l.den().degree() != Some(0) {
            return Ok(false);
        }
        let num = l.num().scale(&l.den().coeff(0).recip());
        if num.degree().is_some_and(|d| d > deg) {
            return Ok(false);
        }
        Ok(num.coeffs().iter().all(|c| (c / &self.scale).is_integer()))
    }
}

/// The primitive integral linear form vanishing at a = u/v.
fn primitive_linear(a: &Rational) -> Poly<Rational> {
    Poly::new(Rational::zero(), vec![Rational::from_integer(-a.numer().clone()), Rational::from_integer(a.denom().clone())])
}

/// Global sections of O(D) on P^1 over Z.
///
/// Writing f = L · Π (v_i t - u_i)^{-b_i}, the horizontal conditions say L is a
/// polynomial of degree at most Σ b_i + b_∞, and by Gauss's lemma the vertical
/// ones bound the content of L one prime at a time.
pub fn h0_ar_surface(d: &SurfaceDivisor) -> Result<SurfaceH0> {
    let z = Rational::zero();
    let mut scale = Rational::one();
    let mut factor = QFunction::one(&z);
    let mut total = 0i64;
    for (c, n) in d.terms() {
        match c {
            SurfaceCurve::Vertical(p) => {
                let pp = Rational::from_integer(BigInt::from(*p));
                scale *= num_traits::pow(if n >= 0 { pp.recip() } else { pp }, n.unsigned_abs() as usize);
            }
            SurfaceCurve::Horizontal(QPoint::Finite(a)) => {
                factor = factor.mul(&QFunction::from_poly(primitive_linear(a)).pow(-n)?);
                total += n;
            }
            SurfaceCurve::Horizontal(QPoint::Infinity) => total += n,
        }
    }
    let degree = usize::try_from(total).ok();
    Ok(SurfaceH0 { divisor: d.clone(), scale, factor, degree })
}

/// Fiber data for the sequence 0 → H^0(D) → H^0(D + C) → H^0(C, (D + C)|_C) → ...
#[derive(Clone, Debug, PartialEq)]
pub struct Prop17Pieces {
    pub p: u64,
    pub restricted: CurveDivisor<Fp>,
    /// dim ker φ for φ(x, y) = x - y on A_{C,01} ⊕ A_{C,12}((D + C)|_C).
    pub kernel_dim: usize,
    /// dim coker φ at the window truncation.
    pub cokernel_dim: usize,
    pub h0_fiber: usize,
    pub h1_fiber: usize,
    pub identifications: Vec<String>,
}

/// The quotient pieces attached to a vertical curve C = V_p.
///
/// Since div(p) = V_p, the fiber has trivial normal bundle and (D + C)|_C is the
/// reduction of the horizontal part of D.
pub fn prop17_pieces(d: &SurfaceDivisor, c: &SurfaceCurve, ctx: &PrecisionCtx) -> Result<Prop17Pieces> {
    let SurfaceCurve::Vertical(p) = c else {
        return Err(Error::Unsupported(format!("quotient pieces along the horizontal curve {c}")));
    };
    let restricted = d.add(&SurfaceDivisor::from_terms([(c.clone(), 1)])).restrict_to_fiber(*p);
    let coh = adelic_h0_h1(&restricted, &Fp::zero(*p), ctx)?;
    let kernel_dim = coh.basis.len();
    let cokernel_dim = coh.model.h1();
    let identifications = vec![
        format!("A12(D + {c}) / A12(D) = A_{{{c},01}} + 0"),
        format!("A01 ∩ A12(D + {c}) / A01 ∩ A12(D) = k({c})"),
        format!("A02 ∩ A12(D + {c}) / A02 ∩ A12(D) = A_{{{c},12}}(({}))", restricted.label()),
        format!("ker φ = H0({c}, {})", restricted.label()),
        format!("coker φ = H1({c}, {})", restricted.label()),
    ];
    Ok(Prop17Pieces {
        p: *p,
        restricted,
        kernel_dim,
        cokernel_dim,
        h0_fiber: coh.h0,
        h1_fiber: coh.h1_dual,
        identifications,
    })
}
