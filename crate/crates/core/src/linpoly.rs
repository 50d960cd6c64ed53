//! q-polynomials Σ c_i x^{q^i} over GF(q^n), reduced modulo x^{q^n} − x.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Felt, FieldCtx};
use crate::linalg::{self, Matrix, PrimeField};

/// A q-polynomial with exactly n coefficients; `coeffs[i]` multiplies x^{q^i}.
#[derive(Clone)]
pub struct LinPoly {
    ctx: Arc<FieldCtx>,
    coeffs: Vec<Felt>,
}

impl fmt::Debug for LinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("LinPoly").field(&self.to_indices()).finish()
    }
}

impl PartialEq for LinPoly {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_field(&other.ctx) && self.coeffs == other.coeffs
    }
}

impl Eq for LinPoly {}

impl LinPoly {
    pub fn new(ctx: &Arc<FieldCtx>, coeffs: Vec<Felt>) -> Result<Self> {
        if coeffs.len() != ctx.n() {
            return Err(Error::BadLength {
                expected: ctx.n(),
                got: coeffs.len(),
            });
        }
        Ok(LinPoly {
            ctx: Arc::clone(ctx),
            coeffs,
        })
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        LinPoly {
            ctx: Arc::clone(ctx),
            coeffs: vec![Felt::ZERO; ctx.n()],
        }
    }

    /// c·x^{q^i}, exponent taken modulo n.
    pub fn monomial(ctx: &Arc<FieldCtx>, i: usize, c: Felt) -> Self {
        let mut f = Self::zero(ctx);
        f.coeffs[i % ctx.n()] = c;
        f
    }

    pub fn identity(ctx: &Arc<FieldCtx>) -> Self {
        Self::monomial(ctx, 0, Felt::ONE)
    }

    /// x^{q^i}.
    pub fn frobenius(ctx: &Arc<FieldCtx>, i: usize) -> Self {
        Self::monomial(ctx, i, Felt::ONE)
    }

    /// λ·x.
    pub fn scalar(ctx: &Arc<FieldCtx>, lambda: Felt) -> Self {
        Self::monomial(ctx, 0, lambda)
    }

    /// Tr_{q^n/q}: x + x^q + … + x^{q^{n−1}}.
    pub fn trace_map(ctx: &Arc<FieldCtx>) -> Self {
        LinPoly {
            ctx: Arc::clone(ctx),
            coeffs: vec![Felt::ONE; ctx.n()],
        }
    }

    /// Parse polynomial-basis indices, one per coefficient.
    pub fn from_indices(ctx: &Arc<FieldCtx>, indices: &[u64]) -> Result<Self> {
        let coeffs = indices
            .iter()
            .map(|&i| ctx.from_index(i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ctx, coeffs)
    }

    pub fn to_indices(&self) -> Vec<u64> {
        self.coeffs.iter().map(|&c| self.ctx.to_index(c)).collect()
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Felt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Felt {
        self.coeffs[i % self.n()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Whether f(x) = λx for some λ.
    pub fn is_scalar(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &LinPoly) -> Result<()> {
        if self.ctx.same_field(&other.ctx) {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    #[inline]
    pub fn eval(&self, x: Felt) -> Felt {
        let f = &*self.ctx;
        let mut acc = Felt::ZERO;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = f.add(acc, f.mul(c, f.frob_q(x, i)));
            }
        }
        acc
    }

    /// f ∘ g.
    pub fn compose(&self, g: &LinPoly) -> Result<LinPoly> {
        self.check(g)?;
        let f = &*self.ctx;
        let n = self.n();
        let mut out = vec![Felt::ZERO; n];
        for (i, &fi) in self.coeffs.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, &gj) in g.coeffs.iter().enumerate() {
                if gj.is_zero() {
                    continue;
                }
                let term = f.mul(fi, f.frob_q(gj, i));
                out[(i + j) % n] = f.add(out[(i + j) % n], term);
            }
        }
        Ok(LinPoly {
            ctx: Arc::clone(&self.ctx),
            coeffs: out,
        })
    }

    /// f ∘ … ∘ f, `times` factors; the identity for `times = 0`.
    pub fn power(&self, times: u64) -> LinPoly {
        let mut acc = Self::identity(&self.ctx);
        for _ in 0..times {
            acc = self.compose(&acc).expect("same context");
        }
        acc
    }

    /// Adjoint with respect to (x, y) ↦ Tr_{q^n/q}(xy).
    pub fn adjoint(&self) -> LinPoly {
        let f = &*self.ctx;
        let n = self.n();
        let coeffs = (0..n)
            .map(|i| f.frob_q(self.coeffs[(n - i) % n], i))
            .collect();
        LinPoly {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    /// D[i][j] = c_{(j−i) mod n}^{q^i}.
    pub fn dickson(&self) -> Matrix<Felt> {
        let n = self.n();
        let mut m = Matrix::filled(n, n, Felt::ZERO);
        self.dickson_into(m.as_mut_slice());
        m
    }

    /// Write the Dickson matrix row-major into `buf` (length n²).
    pub fn dickson_into(&self, buf: &mut [Felt]) {
        let f = &*self.ctx;
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                buf[i * n + j] = f.frob_q(self.coeffs[(j + n - i) % n], i);
            }
        }
    }

    /// Rank over GF(q) of x ↦ f(x).
    pub fn rank(&self) -> usize {
        linalg::rank(&*self.ctx, &self.dickson())
    }

    /// dim_{GF(q)} ker f.
    pub fn kernel_dim(&self) -> usize {
        self.n() - self.rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n()
    }

    /// Least m ≥ 1 with f^(m) = id.
    pub fn map_order(&self) -> Result<u64> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let id = Self::identity(&self.ctx);
        let mut cur = self.clone();
        let mut m = 1u64;
        while cur != id {
            cur = self.compose(&cur)?;
            m += 1;
        }
        Ok(m)
    }

    /// Number of x ≠ 0 with f(x)/x = v, indexed by the handle of v.
    pub fn quotient_counts(&self) -> Vec<u32> {
        let f = &*self.ctx;
        let counts: Vec<AtomicU32> = (0..f.order()).map(|_| AtomicU32::new(0)).collect();
        (1..f.order()).into_par_iter().for_each(|h| {
            let x = f.element(h);
            let v = f.div(self.eval(x), x).expect("x is nonzero");
            counts[v.handle() as usize].fetch_add(1, Ordering::Relaxed);
        });
        counts.into_iter().map(AtomicU32::into_inner).collect()
    }

    /// Fiber size ↦ number of values f(x)/x with a fiber of that size.
    pub fn fiber_histogram(&self) -> BTreeMap<u64, u64> {
        let mut hist = BTreeMap::new();
        for c in self.quotient_counts() {
            if c > 0 {
                *hist.entry(c as u64).or_insert(0) += 1;
            }
        }
        hist
    }

    /// Coefficients raised to p^j: the conjugate of f under x ↦ x^{p^j}.
    pub fn twist(&self, j: usize) -> LinPoly {
        let f = &*self.ctx;
        LinPoly {
            ctx: Arc::clone(&self.ctx),
            coeffs: self.coeffs.iter().map(|&c| f.frob_p(c, j)).collect(),
        }
    }

    /// λ·f.
    pub fn scale(&self, lambda: Felt) -> LinPoly {
        let f = &*self.ctx;
        LinPoly {
            ctx: Arc::clone(&self.ctx),
            coeffs: self.coeffs.iter().map(|&c| f.mul(lambda, c)).collect(),
        }
    }

    /// x ↦ f(μx).
    pub fn scale_argument(&self, mu: Felt) -> LinPoly {
        let f = &*self.ctx;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f.mul(c, f.frob_q(mu, i)))
            .collect();
        LinPoly {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    pub fn checked_add(&self, other: &LinPoly) -> Result<LinPoly> {
        self.check(other)?;
        let f = &*self.ctx;
        Ok(LinPoly {
            ctx: Arc::clone(&self.ctx),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &LinPoly) -> Result<LinPoly> {
        self.checked_add(&-other)
    }

    /// Matrix over GF(p) of f in the polynomial basis: column j holds the
    /// coordinates of f(X^j).
    pub fn prime_matrix(&self) -> Matrix<u64> {
        let f = &*self.ctx;
        let m = f.m();
        let cols: Vec<Vec<u64>> = (0..m).map(|j| f.digits(self.eval(f.basis_element(j)))).collect();
        Matrix::from_columns(&cols, m, 0)
    }

    /// GF(p)-basis of ker f.
    pub fn kernel_basis(&self) -> Vec<Felt> {
        let f = &*self.ctx;
        linalg::nullspace(&PrimeField(f.p()), &self.prime_matrix())
            .iter()
            .map(|v| f.from_digits(v))
            .collect()
    }
}

impl Neg for &LinPoly {
    type Output = LinPoly;
    fn neg(self) -> LinPoly {
        let f = &*self.ctx;
        LinPoly {
            ctx: Arc::clone(&self.ctx),
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }
}

impl Add for &LinPoly {
    type Output = LinPoly;
    fn add(self, rhs: &LinPoly) -> LinPoly {
        self.checked_add(rhs).expect("polynomials over different fields")
    }
}

impl Sub for &LinPoly {
    type Output = LinPoly;
    fn sub(self, rhs: &LinPoly) -> LinPoly {
        self.checked_sub(rhs).expect("polynomials over different fields")
    }
}
