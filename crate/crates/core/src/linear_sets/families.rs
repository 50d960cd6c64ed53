use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Felt, FieldCtx};
use crate::gcd;
use crate::linpoly::LinPoly;

/// The known maximum scattered subspaces U = {(x, f(x))}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KnownFamily {
    /// x^{q^s}, gcd(s, n) = 1 (pseudoregulus type).
    U1 { s: usize },
    /// δx^{q^s} + x^{q^{n−s}}, gcd(s, n) = 1, N_{q^n/q}(δ) ∉ {0, 1} (LP type).
    U2 { s: usize, delta: Felt },
    /// δx^{q^s} + x^{q^{s+n/2}}, n ∈ {6, 8}, gcd(s, n/2) = 1, N_{q^n/q^{n/2}}(δ) ∉ {0, 1}.
    U3 { s: usize, delta: Felt },
    /// x^q + x^{q³} + δx^{q⁵}, n = 6, δ² + δ = 1.
    U4 { delta: Felt },
    /// h^{q−1}x^q − h^{q²−1}x^{q²} + x^{q⁴} + x^{q⁵}, n = 6, h^{q³+1} = −1.
    U5 { h: Felt },
}

impl fmt::Display for KnownFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnownFamily::U1 { s } => write!(f, "U1(s={s})"),
            KnownFamily::U2 { s, delta } => write!(f, "U2(s={s}, δ=#{})", delta.handle()),
            KnownFamily::U3 { s, delta } => write!(f, "U3(s={s}, δ=#{})", delta.handle()),
            KnownFamily::U4 { delta } => write!(f, "U4(δ=#{})", delta.handle()),
            KnownFamily::U5 { h } => write!(f, "U5(h=#{})", h.handle()),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadParams(msg.into())
}

fn check_s(s: usize, n: usize, modulus: usize) -> Result<()> {
    if s == 0 || s >= n {
        return Err(bad(format!("s = {s} must satisfy 1 <= s < {n}")));
    }
    if gcd(s as u64, modulus as u64) != 1 {
        return Err(bad(format!("gcd(s, {modulus}) = 1 fails for s = {s}")));
    }
    Ok(())
}

impl KnownFamily {
    /// Check the parameter constraints of the family.
    pub fn validate(&self, ctx: &FieldCtx) -> Result<()> {
        let n = ctx.n();
        match *self {
            KnownFamily::U1 { s } => check_s(s, n, n),
            KnownFamily::U2 { s, delta } => {
                check_s(s, n, n)?;
                let nd = ctx.norm_over(delta, 1);
                if nd.is_zero() || nd == Felt::ONE {
                    return Err(bad("N_{q^n/q}(δ) must not be 0 or 1"));
                }
                Ok(())
            }
            KnownFamily::U3 { s, delta } => {
                if n != 6 && n != 8 {
                    return Err(bad(format!("U3 needs n in {{6, 8}}, got n = {n}")));
                }
                check_s(s, n, n / 2)?;
                let nd = ctx.norm_over(delta, n / 2);
                if nd.is_zero() || nd == Felt::ONE {
                    return Err(bad("N_{q^n/q^{n/2}}(δ) must not be 0 or 1"));
                }
                Ok(())
            }
            KnownFamily::U4 { delta } => {
                if n != 6 {
                    return Err(bad(format!("U4 needs n = 6, got n = {n}")));
                }
                if ctx.add(ctx.mul(delta, delta), delta) != Felt::ONE {
                    return Err(bad("δ² + δ = 1 fails"));
                }
                Ok(())
            }
            KnownFamily::U5 { h } => {
                if n != 6 {
                    return Err(bad(format!("U5 needs n = 6, got n = {n}")));
                }
                let e = ctx.mul(ctx.frob_q(h, 3), h);
                if e != ctx.neg(Felt::ONE) {
                    return Err(bad("h^{q³+1} = −1 fails"));
                }
                Ok(())
            }
        }
    }

    /// The defining polynomial, after validation.
    pub fn polynomial(&self, ctx: &Arc<FieldCtx>) -> Result<LinPoly> {
        self.validate(ctx)?;
        let n = ctx.n();
        let mut c = vec![Felt::ZERO; n];
        match *self {
            KnownFamily::U1 { s } => c[s] = Felt::ONE,
            KnownFamily::U2 { s, delta } => {
                c[s] = delta;
                c[n - s] = Felt::ONE;
            }
            KnownFamily::U3 { s, delta } => {
                c[s] = delta;
                let j = (s + n / 2) % n;
                c[j] = ctx.add(c[j], Felt::ONE);
            }
            KnownFamily::U4 { delta } => {
                c[1] = Felt::ONE;
                c[3] = Felt::ONE;
                c[5] = delta;
            }
            KnownFamily::U5 { h } => {
                let hq1 = ctx.div(ctx.frob_q(h, 1), h).unwrap();
                let hq2 = ctx.div(ctx.frob_q(h, 2), h).unwrap();
                c[1] = hq1;
                c[2] = ctx.neg(hq2);
                c[4] = Felt::ONE;
                c[5] = Felt::ONE;
            }
        }
        LinPoly::new(ctx, c)
    }
}

pub fn known_family(family: &KnownFamily, ctx: &Arc<FieldCtx>) -> Result<LinPoly> {
    family.polynomial(ctx)
}
