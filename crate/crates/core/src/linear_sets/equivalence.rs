//! ΓL(2, q^n)-equivalence of subspaces U_f = {(x, f(x))}.
//!
//! U_g = M·U_f^τ for M = (a b; c d) and τ: x ↦ x^{p^j} exactly when
//! g ∘ (a·id + b·F) = c·id + d·F with F = f^τ and ad − bc ≠ 0.
//! For fixed τ that identity is GF(p)-linear in (a, b, c, d).

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::families::KnownFamily;
use crate::error::{Error, Result};
use crate::field::{Felt, FieldCtx};
use crate::gcd;
use crate::linalg::{self, Matrix, PrimeField};
use crate::linpoly::LinPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivalenceMethod {
    /// Kernel of the GF(p)-linear system in (a, b, c, d), then a scan of
    /// the kernel for an invertible matrix.
    LinearSolve,
    /// Every (a, b) ≠ (0, 0), solving for (c, d) from two coefficient slots.
    Sweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivalenceOptions {
    pub with_automorphisms: bool,
    /// Cap on candidates examined per automorphism (kernel vectors or
    /// (a, b) pairs, depending on the method).
    pub budget: u128,
    pub method: EquivalenceMethod,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions {
            with_automorphisms: true,
            budget: 100_000_000,
            method: EquivalenceMethod::LinearSolve,
        }
    }
}

/// (a b; c d) with U_g = M·U_f^τ, τ: x ↦ x^{p^automorphism}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub a: Felt,
    pub b: Felt,
    pub c: Felt,
    pub d: Felt,
    pub automorphism: usize,
}

impl Certificate {
    pub fn identity() -> Self {
        Certificate {
            a: Felt::ONE,
            b: Felt::ZERO,
            c: Felt::ZERO,
            d: Felt::ONE,
            automorphism: 0,
        }
    }

    pub fn det(&self, ctx: &FieldCtx) -> Felt {
        ctx.sub(ctx.mul(self.a, self.d), ctx.mul(self.b, self.c))
    }

    /// Entries as polynomial-basis indices, row-major.
    pub fn to_indices(&self, ctx: &FieldCtx) -> [u64; 4] {
        [self.a, self.b, self.c, self.d].map(|x| ctx.to_index(x))
    }
}

/// Check the certificate as a polynomial identity.
pub fn verify_certificate(f: &LinPoly, g: &LinPoly, cert: &Certificate) -> bool {
    let ctx = f.ctx();
    if cert.det(ctx).is_zero() || !ctx.same_field(g.ctx()) {
        return false;
    }
    let ff = f.twist(cert.automorphism);
    let h = &LinPoly::scalar(ctx, cert.a) + &ff.scale(cert.b);
    let lhs = g.compose(&h).expect("same field");
    let rhs = &LinPoly::scalar(ctx, cert.c) + &ff.scale(cert.d);
    lhs == rhs
}

/// Check the certificate point by point: every M·(x^τ, f(x)^τ) lies in U_g.
/// Since M is invertible this makes the image all of U_g.
pub fn maps_onto(f: &LinPoly, g: &LinPoly, cert: &Certificate) -> bool {
    let ctx = f.ctx();
    if cert.det(ctx).is_zero() {
        return false;
    }
    let j = cert.automorphism;
    (0..ctx.order()).into_par_iter().all(|h| {
        let x = ctx.element(h);
        let u = ctx.frob_p(x, j);
        let v = ctx.frob_p(f.eval(x), j);
        let z = ctx.add(ctx.mul(cert.a, u), ctx.mul(cert.b, v));
        let w = ctx.add(ctx.mul(cert.c, u), ctx.mul(cert.d, v));
        g.eval(z) == w
    })
}

// Distinct conjugates f^τ, first exponent kept.
fn twists(f: &LinPoly, all: bool) -> Vec<(usize, LinPoly)> {
    let m = if all { f.ctx().m() } else { 1 };
    let mut out: Vec<(usize, LinPoly)> = Vec::new();
    for j in 0..m {
        let tw = f.twist(j);
        if !out.iter().any(|(_, p)| *p == tw) {
            out.push((j, tw));
        }
    }
    out
}

/// Search for M ∈ GL(2, q^n) (and τ, when automorphisms are allowed) with
/// U_g = M·U_f^τ. `Ok(None)` means the search was exhaustive.
pub fn subspace_equivalent(
    f: &LinPoly,
    g: &LinPoly,
    opts: &EquivalenceOptions,
) -> Result<Option<Certificate>> {
    if !f.ctx().same_field(g.ctx()) {
        return Err(Error::CtxMismatch);
    }
    let id = Certificate::identity();
    if verify_certificate(f, g, &id) {
        return Ok(Some(id));
    }
    let tw = twists(f, opts.with_automorphisms);
    match opts.method {
        EquivalenceMethod::Sweep => {
            let order = f.ctx().order() as u128;
            let needed = (order * order - 1) * tw.len() as u128;
            if needed > opts.budget {
                return Err(Error::BudgetExceeded {
                    needed,
                    budget: opts.budget,
                });
            }
            Ok(tw.iter().find_map(|(j, ff)| sweep_twist(g, ff, *j)))
        }
        EquivalenceMethod::LinearSolve => {
            for (j, ff) in &tw {
                if let Some(cert) = solve_twist(g, ff, *j, opts.budget)? {
                    return Ok(Some(cert));
                }
            }
            Ok(None)
        }
    }
}

fn support(p: &LinPoly) -> Vec<(usize, Felt)> {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, &c)| (i, c))
        .collect()
}

// All (a, b) ≠ (0, 0) in handle order; first certificate wins.
fn sweep_twist(g: &LinPoly, ff: &LinPoly, j: usize) -> Option<Certificate> {
    let ctx: &Arc<FieldCtx> = g.ctx();
    let n = g.n();
    let order = ctx.order();
    let gs = support(g);
    let fs = support(ff);
    let f0 = ff.coeff(0);
    // first slot ≥ 1 where F is nonzero, used to read off d
    let pivot = fs.iter().find(|(i, _)| *i > 0).copied();
    let mut allowed = vec![false; n];
    allowed[0] = true;
    for &(i, _) in &fs {
        allowed[i] = true;
    }
    let candidate = |buf: &mut Vec<Felt>, idx: u64| -> Option<Certificate> {
        let a = ctx.element(idx / order);
        let b = ctx.element(idx % order);
        // H = a·id + b·F, G = g ∘ H
        buf.iter_mut().for_each(|c| *c = Felt::ZERO);
        for &(i, gi) in &gs {
            let h0 = ctx.add(a, ctx.mul(b, f0));
            if !h0.is_zero() {
                buf[i] = ctx.add(buf[i], ctx.mul(gi, ctx.frob_q(h0, i)));
            }
            if b.is_zero() {
                continue;
            }
            for &(l, fl) in &fs {
                if l == 0 {
                    continue;
                }
                let m = (i + l) % n;
                let hl = ctx.mul(b, fl);
                buf[m] = ctx.add(buf[m], ctx.mul(gi, ctx.frob_q(hl, i)));
            }
        }
        if (0..n).any(|m| !allowed[m] && !buf[m].is_zero()) {
            return None;
        }
        let try_cd = |c: Felt, d: Felt| -> Option<Certificate> {
            let cert = Certificate {
                a,
                b,
                c,
                d,
                automorphism: j,
            };
            if cert.det(ctx).is_zero() {
                return None;
            }
            let ok = fs.iter().all(|&(l, fl)| l == 0 || buf[l] == ctx.mul(d, fl))
                && buf[0] == ctx.add(c, ctx.mul(d, f0));
            ok.then_some(cert)
        };
        match pivot {
            Some((l, fl)) => {
                let d = ctx.div(buf[l], fl).unwrap();
                let c = ctx.sub(buf[0], ctx.mul(d, f0));
                try_cd(c, d)
            }
            // F scalar: c + d·F_0 = G_0 leaves one degree of freedom and
            // d ∈ {0, 1} covers every invertible choice
            None => [Felt::ZERO, Felt::ONE]
                .into_iter()
                .find_map(|d| try_cd(ctx.sub(buf[0], ctx.mul(d, f0)), d)),
        }
    };
    (1..order * order)
        .into_par_iter()
        .map_init(|| vec![Felt::ZERO; n], |buf, idx| candidate(buf, idx))
        .find_first(Option::is_some)
        .flatten()
}

// Kernel of (a, b, c, d) ↦ g∘(a + bF) − c − dF over GF(p), scanned in
// counter order for an invertible matrix.
fn solve_twist(g: &LinPoly, ff: &LinPoly, j: usize, budget: u128) -> Result<Option<Certificate>> {
    let ctx = g.ctx();
    let (n, m, p) = (g.n(), ctx.m(), ctx.p());
    let flat = |poly: &LinPoly| -> Vec<u64> {
        poly.coeffs().iter().flat_map(|&c| ctx.digits(c)).collect()
    };
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(4 * m);
    for slot in 0..4 {
        for jj in 0..m {
            let e = ctx.basis_element(jj);
            let poly = match slot {
                0 => g.scale_argument(e),
                1 => g.compose(&ff.scale(e))?,
                2 => -&LinPoly::scalar(ctx, e),
                _ => -&ff.scale(e),
            };
            cols.push(flat(&poly));
        }
    }
    let mat = Matrix::from_columns(&cols, n * m, 0);
    let ker = linalg::nullspace(&PrimeField(p), &mat);
    let kappa = ker.len() as u32;
    let total = (p as u128).checked_pow(kappa).unwrap_or(u128::MAX);
    let limit = total.min(budget.saturating_add(1));
    let mut digits = vec![0u64; ker.len()];
    let mut vec = vec![0u64; 4 * m];
    let mut seen: u128 = 1;
    while seen < limit {
        // odometer step: each digit that moves adds its basis vector once
        let mut i = 0;
        loop {
            for (v, k) in vec.iter_mut().zip(&ker[i]) {
                *v = (*v + k) % p;
            }
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        seen += 1;
        let part = |s: usize| ctx.from_digits(&vec[s * m..(s + 1) * m]);
        let cert = Certificate {
            a: part(0),
            b: part(1),
            c: part(2),
            d: part(3),
            automorphism: j,
        };
        if !cert.det(ctx).is_zero() {
            return Ok(Some(cert));
        }
    }
    if total > budget {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    Ok(None)
}

/// A certified equivalence with a member of a known family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyMatch {
    pub family: KnownFamily,
    pub certificate: Certificate,
}

fn coprime_s(n: usize) -> impl Iterator<Item = usize> {
    (1..n).filter(move |&s| gcd(s as u64, n as u64) == 1)
}

/// Equivalence with some U1(s), gcd(s, n) = 1.
pub fn pseudoregulus_test(f: &LinPoly, opts: &EquivalenceOptions) -> Result<Option<FamilyMatch>> {
    let ctx = f.ctx();
    for s in coprime_s(ctx.n()) {
        let family = KnownFamily::U1 { s };
        let g = family.polynomial(ctx)?;
        if let Some(certificate) = subspace_equivalent(f, &g, opts)? {
            return Ok(Some(FamilyMatch {
                family,
                certificate,
            }));
        }
    }
    Ok(None)
}

/// Which δ an LP-type test tries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeltaSweep {
    /// Every δ with N_{q^n/q}(δ) ∉ {0, 1}.
    Full,
    /// This many valid δ at evenly spaced positions of the full list.
    Sampled(usize),
    Given(Vec<Felt>),
}

impl DeltaSweep {
    /// Full at q = 3, 10^4 samples otherwise.
    pub fn default_for(ctx: &FieldCtx) -> Self {
        if ctx.q() == 3 {
            DeltaSweep::Full
        } else {
            DeltaSweep::Sampled(10_000)
        }
    }

    pub fn deltas(&self, ctx: &FieldCtx) -> Vec<Felt> {
        let valid = || -> Vec<Felt> {
            ctx.nonzero()
                .filter(|&d| ctx.norm_over(d, 1) != Felt::ONE)
                .collect()
        };
        match self {
            DeltaSweep::Full => valid(),
            DeltaSweep::Sampled(count) => {
                let all = valid();
                if *count >= all.len() {
                    return all;
                }
                (0..*count).map(|i| all[i * all.len() / count]).collect()
            }
            DeltaSweep::Given(v) => v.clone(),
        }
    }
}

/// Equivalence with some U2(s, δ), gcd(s, n) = 1, δ from the sweep.
pub fn lp_type_test(
    f: &LinPoly,
    sweep: &DeltaSweep,
    opts: &EquivalenceOptions,
) -> Result<Option<FamilyMatch>> {
    let ctx = f.ctx();
    let deltas = sweep.deltas(ctx);
    for s in coprime_s(ctx.n()) {
        for &delta in &deltas {
            let family = KnownFamily::U2 { s, delta };
            let g = family.polynomial(ctx)?;
            if let Some(certificate) = subspace_equivalent(f, &g, opts)? {
                return Ok(Some(FamilyMatch {
                    family,
                    certificate,
                }));
            }
        }
    }
    Ok(None)
}
