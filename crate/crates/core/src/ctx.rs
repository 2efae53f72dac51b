use crate::error::{Error, Result};

/// Global truncation contract shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionCtx {
    /// Relative p-adic digits kept for expansions.
    pub padic_digits: u32,
    /// Lowest exponent that may be stored in a local expansion.
    pub v_lo: i64,
    /// Exponent at which local expansions are truncated.
    pub v_hi: i64,
    /// Tolerance for archimedean (floating point) values.
    pub arch_tol: f64,
}

impl Default for PrecisionCtx {
    fn default() -> Self {
        PrecisionCtx { padic_digits: 32, v_lo: -32, v_hi: 32, arch_tol: 1e-10 }
    }
}

impl PrecisionCtx {
    pub fn new(padic_digits: u32, v_lo: i64, v_hi: i64, arch_tol: f64) -> Result<Self> {
        let ctx = PrecisionCtx { padic_digits, v_lo, v_hi, arch_tol };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        if self.padic_digits == 0 {
            return Err(Error::invalid("p-adic precision must be positive"));
        }
        if self.v_lo >= self.v_hi {
            return Err(Error::invalid("Laurent window needs v_lo < v_hi"));
        }
        if !(self.arch_tol > 0.0) {
            return Err(Error::invalid("archimedean tolerance must be positive"));
        }
        Ok(())
    }
}
