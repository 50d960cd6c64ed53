//! The tower GF(p) ⊂ GF(q) ⊂ GF(q^t) ⊂ GF(q^n), q = p^e, n = 2t, p odd.
//!
//! Elements are opaque [`Felt`] handles into a [`FieldCtx`]. Below
//! [`TABLE_LIMIT`] elements the context keeps Zech logarithm tables and every
//! operation is a table lookup; above it elements are polynomial-basis
//! indices and arithmetic is done on coefficient vectors.
//!
//! In both backends handle `0` is zero, handle `1` is one, and the handles of
//! a field with N elements are exactly `0..N`. The table backend numbers
//! nonzero elements by discrete logarithm (`ω^k` has handle `k + 1`), so
//! sweeping handles in increasing order visits `0, ω^0, ω^1, ...`.

mod prime_poly;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use prime_poly::inv_mod;

/// Fields with at most this many elements get log/Zech tables.
pub const TABLE_LIMIT: u64 = 1 << 26;
/// Largest field accepted at all.
pub const MAX_ORDER: u128 = 1 << 40;

/// Handle of an element of GF(q^n); only meaningful with its [`FieldCtx`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Felt(pub(crate) u64);

impl Felt {
    pub const ZERO: Felt = Felt(0);
    pub const ONE: Felt = Felt(1);

    /// Position of this element in the context's sweep order.
    pub fn handle(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

fn default_e() -> u32 {
    1
}

/// Parameters of the tower. `modulus` is the defining polynomial of
/// GF(q^n) over GF(p), little-endian and monic (`e * 2t + 1` coefficients).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "default_e")]
    pub e: u32,
    pub t: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

impl FieldSpec {
    pub fn new(p: u64, e: u32, t: u32) -> Self {
        FieldSpec { p, e, t, modulus: None }
    }

    pub fn with_modulus(mut self, modulus: Vec<u64>) -> Self {
        self.modulus = Some(modulus);
        self
    }

    /// Check everything that can be checked without building tables.
    pub fn validate(&self) -> Result<()> {
        let p = self.p;
        if !is_prime(p) {
            return Err(Error::NonPrimeP(p));
        }
        if p == 2 {
            return Err(Error::EvenP);
        }
        if self.t < 3 {
            return Err(Error::TSmall(self.t));
        }
        if self.e == 0 {
            return Err(Error::BadExtension);
        }
        let m = self.e as usize * 2 * self.t as usize;
        let order = (p as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if order > MAX_ORDER {
            return Err(Error::FieldTooLarge(order));
        }
        if let Some(given) = &self.modulus {
            if given.len() != m + 1 {
                return Err(Error::BadModulus(format!(
                    "expected {} coefficients (degree {m}), got {}",
                    m + 1,
                    given.len()
                )));
            }
            if given[m] != 1 {
                return Err(Error::BadModulus("modulus must be monic".into()));
            }
            if given.iter().any(|&c| c >= p) {
                return Err(Error::BadModulus(format!("coefficients must lie in 0..{p}")));
            }
            if !prime_poly::is_irreducible(given, p) {
                return Err(Error::ReducibleModulus { p });
            }
        }
        Ok(())
    }
}

/// Intermediate fields of the tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    /// GF(q)
    Q,
    /// GF(q^t)
    Qt,
}

struct Tables {
    // order - 1
    n1: u64,
    // exp[k] = polynomial index of ω^k
    exp: Vec<u32>,
    // log[index] = handle
    log: Vec<u32>,
    // zech[d] = handle of 1 + ω^d
    zech: Vec<u32>,
}

struct PolyArith {
    // row-major m×m matrix of the p-power map on coefficient vectors
    frob: Vec<u64>,
}

enum Backend {
    Table(Tables),
    Poly(PolyArith),
}

/// Immutable arithmetic context for GF(q^n). Shared behind an `Arc`.
pub struct FieldCtx {
    spec: FieldSpec,
    p: u64,
    e: usize,
    t: usize,
    n: usize,
    m: usize,
    q: u64,
    order: u64,
    modulus: Vec<u64>,
    omega: Felt,
    half: Felt,
    // q^i mod (order - 1), i < n
    q_pow: Vec<u64>,
    // p^j mod (order - 1), j < m
    p_pow: Vec<u64>,
    backend: Backend,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("t", &self.t)
            .field("modulus", &self.modulus)
            .finish()
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Validate `spec` and build the context.
pub fn build_field(spec: FieldSpec) -> Result<Arc<FieldCtx>> {
    FieldCtx::new(spec).map(Arc::new)
}

impl FieldCtx {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        Self::build(spec, false)
    }

    /// Same field, but with polynomial-basis arithmetic regardless of size.
    pub fn new_untabled(spec: FieldSpec) -> Result<Self> {
        Self::build(spec, true)
    }

    fn build(spec: FieldSpec, force_poly: bool) -> Result<Self> {
        spec.validate()?;
        let p = spec.p;
        let e = spec.e as usize;
        let t = spec.t as usize;
        let n = 2 * t;
        let m = e * n;
        let order = p.pow(m as u32);
        let q = p.pow(e as u32);
        let modulus = match &spec.modulus {
            Some(given) => given.clone(),
            None => prime_poly::smallest_irreducible(m, p),
        };

        let n1 = order - 1;
        let q_pow = (0..n)
            .map(|i| (q as u128).pow(i as u32) % n1 as u128)
            .map(|v| v as u64)
            .collect();
        let p_pow = (0..m)
            .map(|j| ((p as u128).pow(j as u32) % n1 as u128) as u64)
            .collect();

        let omega_index = find_primitive(&modulus, p, order);
        let backend = if order <= TABLE_LIMIT && !force_poly {
            Backend::Table(build_tables(&modulus, p, order, omega_index))
        } else {
            Backend::Poly(PolyArith {
                frob: frobenius_matrix(&modulus, p),
            })
        };

        let mut ctx = FieldCtx {
            spec: FieldSpec {
                p,
                e: spec.e,
                t: spec.t,
                modulus: Some(modulus.clone()),
            },
            p,
            e,
            t,
            n,
            m,
            q,
            order,
            modulus,
            omega: Felt::ZERO,
            half: Felt::ZERO,
            q_pow,
            p_pow,
            backend,
        };
        ctx.omega = ctx.from_index(omega_index).expect("generator index in range");
        ctx.half = ctx.inv(ctx.from_int(2)).expect("2 is invertible for odd p");
        Ok(ctx)
    }

    /// The spec with the modulus actually in use filled in.
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn e(&self) -> usize {
        self.e
    }
    pub fn t(&self) -> usize {
        self.t
    }
    pub fn n(&self) -> usize {
        self.n
    }
    /// Degree of GF(q^n) over GF(p).
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Number of elements, q^n.
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    /// Generator of the multiplicative group.
    pub fn omega(&self) -> Felt {
        self.omega
    }
    pub fn half(&self) -> Felt {
        self.half
    }
    pub fn uses_tables(&self) -> bool {
        matches!(self.backend, Backend::Table(_))
    }

    pub fn same_field(&self, other: &FieldCtx) -> bool {
        std::ptr::eq(self, other) || (self.spec == other.spec && self.uses_tables() == other.uses_tables())
    }

    /// All elements in sweep order.
    pub fn elements(&self) -> impl Iterator<Item = Felt> + '_ {
        (0..self.order).map(Felt)
    }

    /// Nonzero elements in sweep order (generator-power order for table fields).
    pub fn nonzero(&self) -> impl Iterator<Item = Felt> + '_ {
        (1..self.order).map(Felt)
    }

    /// Element with the given sweep position.
    pub fn element(&self, handle: u64) -> Felt {
        debug_assert!(handle < self.order);
        Felt(handle)
    }

    // ---- serialization ------------------------------------------------

    /// Polynomial-basis index: Σ c_i p^i for x = Σ c_i X^i.
    pub fn to_index(&self, x: Felt) -> u64 {
        match &self.backend {
            Backend::Table(tb) => {
                if x.0 == 0 {
                    0
                } else {
                    tb.exp[(x.0 - 1) as usize] as u64
                }
            }
            Backend::Poly(_) => x.0,
        }
    }

    pub fn from_index(&self, index: u64) -> Result<Felt> {
        if index >= self.order {
            return Err(Error::BadElement {
                index,
                order: self.order,
            });
        }
        Ok(match &self.backend {
            Backend::Table(tb) => Felt(tb.log[index as usize] as u64),
            Backend::Poly(_) => Felt(index),
        })
    }

    /// Coordinates over GF(p) in the polynomial basis, little-endian.
    pub fn digits(&self, x: Felt) -> Vec<u64> {
        let mut idx = self.to_index(x);
        let mut out = vec![0u64; self.m];
        for d in out.iter_mut() {
            *d = idx % self.p;
            idx /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u64]) -> Felt {
        let idx = digits
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.p + d % self.p);
        self.from_index(idx).expect("digit vector in range")
    }

    /// The element X^j of the polynomial basis.
    pub fn basis_element(&self, j: usize) -> Felt {
        self.from_index(self.p.pow(j as u32)).expect("basis index in range")
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, k: i64) -> Felt {
        let r = k.rem_euclid(self.p as i64) as u64;
        self.from_index(r).expect("prime field element")
    }

    // ---- arithmetic ---------------------------------------------------

    #[inline]
    pub fn add(&self, a: Felt, b: Felt) -> Felt {
        match &self.backend {
            Backend::Table(tb) => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let la = a.0 - 1;
                let lb = b.0 - 1;
                let d = if lb >= la { lb - la } else { lb + tb.n1 - la };
                let z = tb.zech[d as usize] as u64;
                if z == 0 {
                    Felt::ZERO
                } else {
                    let s = la + z - 1;
                    Felt(if s >= tb.n1 { s - tb.n1 } else { s } + 1)
                }
            }
            Backend::Poly(_) => {
                let (mut x, mut y) = (a.0, b.0);
                let mut out = 0u64;
                let mut place = 1u64;
                while x > 0 || y > 0 {
                    let d = (x % self.p + y % self.p) % self.p;
                    out += d * place;
                    place *= self.p;
                    x /= self.p;
                    y /= self.p;
                }
                Felt(out)
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Felt) -> Felt {
        match &self.backend {
            Backend::Table(tb) => {
                if a.0 == 0 {
                    return a;
                }
                // -1 = ω^((N-1)/2)
                let s = a.0 - 1 + tb.n1 / 2;
                Felt(if s >= tb.n1 { s - tb.n1 } else { s } + 1)
            }
            Backend::Poly(_) => {
                let mut x = a.0;
                let mut out = 0u64;
                let mut place = 1u64;
                while x > 0 {
                    let d = (self.p - x % self.p) % self.p;
                    out += d * place;
                    place *= self.p;
                    x /= self.p;
                }
                Felt(out)
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Felt, b: Felt) -> Felt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        if a.0 == 0 || b.0 == 0 {
            return Felt::ZERO;
        }
        match &self.backend {
            Backend::Table(tb) => {
                let s = (a.0 - 1) + (b.0 - 1);
                Felt(if s >= tb.n1 { s - tb.n1 } else { s } + 1)
            }
            Backend::Poly(_) => {
                let prod = prime_poly::mul_mod(
                    &self.digits(a),
                    &self.digits(b),
                    &self.modulus,
                    self.p,
                );
                self.from_digits(&prod)
            }
        }
    }

    pub fn inv(&self, a: Felt) -> Option<Felt> {
        if a.0 == 0 {
            return None;
        }
        Some(match &self.backend {
            Backend::Table(tb) => Felt(if a.0 == 1 { 1 } else { tb.n1 - (a.0 - 1) + 1 }),
            Backend::Poly(_) => self.pow(a, self.order - 2),
        })
    }

    pub fn div(&self, a: Felt, b: Felt) -> Option<Felt> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Felt, exp: u64) -> Felt {
        if exp == 0 {
            return Felt::ONE;
        }
        if a.0 == 0 {
            return Felt::ZERO;
        }
        match &self.backend {
            Backend::Table(tb) => {
                let l = ((a.0 - 1) as u128 * (exp % tb.n1) as u128 % tb.n1 as u128) as u64;
                Felt(l + 1)
            }
            Backend::Poly(_) => {
                let r = prime_poly::pow_poly_mod(&self.digits(a), exp as u128, &self.modulus, self.p);
                let mut r = r;
                r.resize(self.m, 0);
                self.from_digits(&r)
            }
        }
    }

    /// ω^k.
    pub fn omega_pow(&self, k: u64) -> Felt {
        self.pow(self.omega, k % (self.order - 1))
    }

    /// x^(q^i), exponent taken modulo n.
    #[inline]
    pub fn frob_q(&self, x: Felt, i: usize) -> Felt {
        let i = i % self.n;
        if i == 0 || x.0 == 0 {
            return x;
        }
        match &self.backend {
            Backend::Table(tb) => {
                let l = ((x.0 - 1) as u128 * self.q_pow[i] as u128 % tb.n1 as u128) as u64;
                Felt(l + 1)
            }
            Backend::Poly(pa) => self.apply_frob_p(pa, x, self.e * i),
        }
    }

    /// x^(p^j), exponent taken modulo m.
    pub fn frob_p(&self, x: Felt, j: usize) -> Felt {
        let j = j % self.m;
        if j == 0 || x.0 == 0 {
            return x;
        }
        match &self.backend {
            Backend::Table(tb) => {
                let l = ((x.0 - 1) as u128 * self.p_pow[j] as u128 % tb.n1 as u128) as u64;
                Felt(l + 1)
            }
            Backend::Poly(pa) => self.apply_frob_p(pa, x, j),
        }
    }

    fn apply_frob_p(&self, pa: &PolyArith, x: Felt, times: usize) -> Felt {
        let m = self.m;
        let mut v = self.digits(x);
        for _ in 0..times {
            let mut w = vec![0u64; m];
            for (r, wr) in w.iter_mut().enumerate() {
                let row = &pa.frob[r * m..(r + 1) * m];
                *wr = row.iter().zip(&v).map(|(a, b)| a * b % self.p).sum::<u64>() % self.p;
            }
            v = w;
        }
        self.from_digits(&v)
    }

    pub fn sum<I: IntoIterator<Item = Felt>>(&self, items: I) -> Felt {
        items.into_iter().fold(Felt::ZERO, |acc, x| self.add(acc, x))
    }

    // ---- tower structure ---------------------------------------------

    /// Degree over GF(q) of the named subfield.
    pub fn level_degree(&self, level: Level) -> usize {
        match level {
            Level::Q => 1,
            Level::Qt => self.t,
        }
    }

    /// x^(q^l) = x.
    pub fn in_subfield(&self, x: Felt, l: usize) -> bool {
        self.frob_q(x, l) == x
    }

    /// Elements of GF(q^l), l | n, in increasing exponent order after 0.
    pub fn subfield_elements(&self, l: usize) -> Vec<Felt> {
        assert!(l >= 1 && self.n % l == 0, "GF(q^{l}) is not a subfield");
        let size = self.q.pow(l as u32);
        let step = (self.order - 1) / (size - 1);
        let g = self.omega_pow(step);
        let mut out = Vec::with_capacity(size as usize);
        out.push(Felt::ZERO);
        let mut cur = Felt::ONE;
        for _ in 0..size - 1 {
            out.push(cur);
            cur = self.mul(cur, g);
        }
        out
    }

    /// Tr_{q^n/q^l}(x) for l | n.
    pub fn trace_over(&self, x: Felt, l: usize) -> Felt {
        assert!(l >= 1 && self.n % l == 0);
        self.sum((0..self.n / l).map(|j| self.frob_q(x, j * l)))
    }

    /// N_{q^n/q^l}(x) for l | n.
    pub fn norm_over(&self, x: Felt, l: usize) -> Felt {
        assert!(l >= 1 && self.n % l == 0);
        let big = self.order - 1;
        let small = self.q.pow(l as u32) - 1;
        self.pow(x, big / small)
    }

    pub fn trace(&self, x: Felt, level: Level) -> Felt {
        self.trace_over(x, self.level_degree(level))
    }

    pub fn norm(&self, x: Felt, level: Level) -> Felt {
        self.norm_over(x, self.level_degree(level))
    }

    /// x ∈ W, i.e. x + x^(q^t) = 0.
    pub fn in_w(&self, x: Felt) -> bool {
        self.add(x, self.frob_q(x, self.t)).is_zero()
    }

    /// Decompose x = x1 + x2 with x1 ∈ GF(q^t) and x2 ∈ W.
    pub fn split(&self, x: Felt) -> (Felt, Felt) {
        let conj = self.frob_q(x, self.t);
        let x1 = self.mul(self.half, self.add(x, conj));
        let x2 = self.mul(self.half, self.sub(x, conj));
        (x1, x2)
    }

    /// Elements of W. Uses W* = ξ·GF(q^t)* with ξ = ω^((q^t+1)/2).
    pub fn w_elements(&self) -> Vec<Felt> {
        let qt = self.q.pow(self.t as u32);
        let xi = self.omega_pow((qt + 1) / 2);
        self.subfield_elements(self.t)
            .into_iter()
            .map(|h| self.mul(xi, h))
            .collect()
    }

    /// First x ∈ W \ {0} (sweep order) with x^(q^k + 1) = 1, scanning the
    /// whole field.
    pub fn w_unity_root_exists(&self, k: u64) -> Option<Felt> {
        let k = (k % self.n as u64) as usize;
        self.nonzero()
            .filter(|&x| self.in_w(x))
            .find(|&x| self.mul(self.frob_q(x, k), x) == Felt::ONE)
    }
}

fn index_of(digits: &[u64], p: u64) -> u64 {
    digits.iter().rev().fold(0u64, |acc, &d| acc * p + d)
}

fn digits_of(mut idx: u64, p: u64, m: usize) -> Vec<u64> {
    let mut out = vec![0u64; m];
    for d in out.iter_mut() {
        *d = idx % p;
        idx /= p;
    }
    out
}

/// Smallest polynomial index whose element generates the multiplicative group.
fn find_primitive(modulus: &[u64], p: u64, order: u64) -> u64 {
    let m = modulus.len() - 1;
    let n1 = order - 1;
    let factors = prime_poly::factor_u64(n1);
    for cand in 2..order {
        let g = digits_of(cand, p, m);
        let is_gen = factors.iter().all(|&r| {
            let mut v = prime_poly::pow_poly_mod(&g, (n1 / r) as u128, modulus, p);
            prime_poly::trim(&mut v);
            v != [1]
        });
        if is_gen {
            return cand;
        }
    }
    // GF(3) style degenerate case cannot happen: order >= 3^6.
    unreachable!("multiplicative group has a generator")
}

fn build_tables(modulus: &[u64], p: u64, order: u64, omega_index: u64) -> Tables {
    let m = modulus.len() - 1;
    let n1 = order - 1;
    let omega = digits_of(omega_index, p, m);
    let mut exp = vec![0u32; n1 as usize];
    let mut log = vec![0u32; order as usize];
    let mut cur = vec![0u64; m];
    cur[0] = 1;
    let mut prod = vec![0u64; 2 * m];
    for k in 0..n1 {
        let idx = index_of(&cur, p);
        exp[k as usize] = idx as u32;
        log[idx as usize] = (k + 1) as u32;
        // cur <- cur * omega mod modulus
        prod.iter_mut().for_each(|c| *c = 0);
        for (i, &a) in cur.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in omega.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        for d in (m..2 * m - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (j, &mc) in modulus.iter().enumerate().take(m) {
                let pos = d - m + j;
                prod[pos] = (prod[pos] + p - c * mc % p) % p;
            }
        }
        cur.copy_from_slice(&prod[..m]);
    }
    let mut zech = vec![0u32; n1 as usize];
    for d in 0..n1 {
        let idx = exp[d as usize] as u64;
        let d0 = idx % p;
        let plus_one = if d0 == p - 1 { idx - (p - 1) } else { idx + 1 };
        zech[d as usize] = log[plus_one as usize];
    }
    Tables { n1, exp, log, zech }
}

fn frobenius_matrix(modulus: &[u64], p: u64) -> Vec<u64> {
    let m = modulus.len() - 1;
    let mut mat = vec![0u64; m * m];
    for j in 0..m {
        // (X^j)^p mod modulus
        let mut xj = vec![0u64; j + 1];
        xj[j] = 1;
        let img = prime_poly::pow_poly_mod(&xj, p as u128, modulus, p);
        for (r, &c) in img.iter().enumerate() {
            mat[r * m + j] = c;
        }
    }
    mat
}

#[cfg(test)]
mod tests;
