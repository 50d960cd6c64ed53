//! The rank-metric codes C_f = {a·f(x) + b·x : a, b ∈ GF(q^n)}.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Felt, FieldCtx};
use crate::gcd;
use crate::linalg::{self, Matrix, PrimeField};
use crate::linear_sets::{subspace_equivalent, Certificate, EquivalenceOptions};
use crate::linpoly::LinPoly;

/// C_f, a left GF(q^n)-module spanned by f and the identity.
#[derive(Clone, Debug)]
pub struct RankCode {
    f: LinPoly,
}

pub fn build_code(f: &LinPoly) -> RankCode {
    RankCode { f: f.clone() }
}

impl RankCode {
    pub fn poly(&self) -> &LinPoly {
        &self.f
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.f.ctx()
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    /// f ∈ GF(q^n)·x, so the code collapses to {b·x}.
    pub fn is_degenerate(&self) -> bool {
        self.f.is_scalar()
    }

    /// GF(q^n)-dimension: 2, or 1 when degenerate.
    pub fn module_dim(&self) -> usize {
        if self.is_degenerate() {
            1
        } else {
            2
        }
    }

    /// log_q |C|.
    pub fn log_size(&self) -> usize {
        self.module_dim() * self.n()
    }

    pub fn codeword(&self, a: Felt, b: Felt) -> LinPoly {
        &self.f.scale(a) + &LinPoly::scalar(self.ctx(), b)
    }

    // The coordinates a codeword g = a·f + b·x must agree on, as a vector
    // that vanishes exactly when g ∈ C. GF(q^n)-linear in g.
    fn residual(&self, g: &LinPoly) -> Vec<Felt> {
        let ctx = self.ctx();
        let n = self.n();
        let fc = self.f.coeffs();
        match (1..n).find(|&i| !fc[i].is_zero()) {
            None => g.coeffs()[1..].to_vec(),
            Some(l) => {
                let a = ctx.div(g.coeff(l), fc[l]).unwrap();
                (1..n)
                    .filter(|&i| i != l)
                    .map(|i| ctx.sub(g.coeff(i), ctx.mul(a, fc[i])))
                    .collect()
            }
        }
    }

    pub fn contains(&self, g: &LinPoly) -> bool {
        self.residual(g).iter().all(|c| c.is_zero())
    }

    /// A GF(q)-basis: ω^j·f and ω^j·x for j < n (only the latter when degenerate).
    pub fn gf_q_basis(&self) -> Vec<LinPoly> {
        let ctx = self.ctx();
        let mut out = Vec::with_capacity(2 * self.n());
        for j in 0..self.n() {
            let w = ctx.omega_pow(j as u64);
            if !self.is_degenerate() {
                out.push(self.f.scale(w));
            }
            out.push(LinPoly::scalar(ctx, w));
        }
        out
    }
}

/// counts[r] = number of codewords of rank r.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankDistribution {
    pub counts: Vec<u128>,
}

impl RankDistribution {
    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    /// Least nonzero rank that occurs.
    pub fn min_distance(&self) -> usize {
        (1..self.counts.len())
            .find(|&r| self.counts[r] > 0)
            .unwrap_or(0)
    }
}

/// Ranks of a·f + b·x over the representatives (1, b) and (0, 1); every
/// other codeword is a GF(q^n)*-multiple of one of them.
pub fn rank_distribution(code: &RankCode) -> RankDistribution {
    let ctx = code.ctx();
    let n = code.n();
    let order = ctx.order();
    let orbit = (order - 1) as u128;
    let mut counts = vec![0u128; n + 1];
    counts[0] = 1;
    if code.is_degenerate() {
        counts[n] = orbit;
        return RankDistribution { counts };
    }
    let f = code.poly();
    let mut base = vec![Felt::ZERO; n * n];
    f.dickson_into(&mut base);
    let c0 = f.coeff(0);
    let per_rank = (0..order)
        .into_par_iter()
        .map_init(
            || vec![Felt::ZERO; n * n],
            |buf, h| {
                buf.copy_from_slice(&base);
                let d = ctx.add(c0, ctx.element(h));
                for i in 0..n {
                    buf[i * n + i] = ctx.frob_q(d, i);
                }
                linalg::rank_in_place(&**ctx, buf, n, n)
            },
        )
        .fold(
            || vec![0u128; n + 1],
            |mut acc, r| {
                acc[r] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u128; n + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    // (0, 1) is the identity
    let mut reps = per_rank;
    reps[n] += 1;
    for r in 0..=n {
        counts[r] += orbit * reps[r];
    }
    RankDistribution { counts }
}

pub fn min_rank_distance(code: &RankCode) -> usize {
    rank_distribution(code).min_distance()
}

/// Singleton bound with equality: log_q |C| = n(n − d + 1).
pub fn is_mrd(code: &RankCode) -> bool {
    let n = code.n();
    let d = min_rank_distance(code);
    d >= 1 && code.log_size() == n * (n - d + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// φ ∘ C ⊆ C
    Left,
    /// C ∘ φ ⊆ C
    Right,
}

/// Above this many elements the invertibility scan is skipped.
const FIELD_SCAN_LIMIT: u128 = 1 << 26;

#[derive(Clone, Debug)]
pub struct IdealiserReport {
    pub side: Side,
    /// GF(p)-basis.
    pub basis: Vec<LinPoly>,
    pub dim_p: usize,
    pub dim_q: usize,
    pub contains_identity: bool,
    pub closed_under_composition: bool,
    pub commutative: bool,
    /// `None` when the idealiser has more than 2^26 elements.
    pub all_nonzero_invertible: Option<bool>,
    pub is_field: bool,
}

/// {φ : φ∘C ⊆ C} or {φ : C∘φ ⊆ C} as the GF(p)-nullspace of the membership
/// residuals, one unknown per GF(p)-digit of each coefficient of φ.
pub fn idealiser(code: &RankCode, side: Side) -> IdealiserReport {
    let ctx = code.ctx();
    let (n, m, p) = (code.n(), ctx.m(), ctx.p());
    let basis_c = code.gf_q_basis();
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            let phi = LinPoly::monomial(ctx, i, ctx.basis_element(j));
            let mut col = Vec::new();
            for c in &basis_c {
                let g = match side {
                    Side::Left => phi.compose(c),
                    Side::Right => c.compose(&phi),
                }
                .expect("same field");
                col.extend(code.residual(&g).iter().flat_map(|&x| ctx.digits(x)));
            }
            cols.push(col);
        }
    }
    let rows = cols[0].len();
    let mat = Matrix::from_columns(&cols, rows, 0);
    let prime = PrimeField(p);
    let null = linalg::nullspace(&prime, &mat);
    let to_poly = |v: &[u64]| -> LinPoly {
        let coeffs = v.chunks(m).map(|d| ctx.from_digits(d)).collect();
        LinPoly::new(ctx, coeffs).expect("length n")
    };
    let basis: Vec<LinPoly> = null.iter().map(|v| to_poly(v)).collect();
    let dim_p = basis.len();
    let flat = |g: &LinPoly| -> Vec<u64> { g.coeffs().iter().flat_map(|&c| ctx.digits(c)).collect() };
    let in_span = |g: &LinPoly| linalg::in_row_space(&prime, &null, &flat(g));

    let contains_identity = dim_p > 0 && in_span(&LinPoly::identity(ctx));
    let mut closed_under_composition = true;
    let mut commutative = true;
    for a in &basis {
        for b in &basis {
            let ab = a.compose(b).expect("same field");
            if !in_span(&ab) {
                closed_under_composition = false;
            }
            if ab != b.compose(a).expect("same field") {
                commutative = false;
            }
        }
    }
    let all_nonzero_invertible = all_invertible(ctx, &basis);
    let is_field = contains_identity
        && closed_under_composition
        && commutative
        && all_nonzero_invertible == Some(true);
    IdealiserReport {
        side,
        basis,
        dim_p,
        dim_q: dim_p / ctx.e() as usize,
        contains_identity,
        closed_under_composition,
        commutative,
        all_nonzero_invertible,
        is_field,
    }
}

// Every nonzero GF(p)-combination of the basis is invertible.
fn all_invertible(ctx: &Arc<FieldCtx>, basis: &[LinPoly]) -> Option<bool> {
    let p = ctx.p();
    let dim = basis.len() as u32;
    let total = (p as u128).checked_pow(dim)?;
    if total > FIELD_SCAN_LIMIT {
        return None;
    }
    let n = ctx.n();
    let ok = (1..total as u64).into_par_iter().all(|idx| {
        let mut coeffs = vec![Felt::ZERO; n];
        let mut rest = idx;
        for b in basis {
            let digit = rest % p;
            rest /= p;
            if digit == 0 {
                continue;
            }
            let s = ctx.from_int(digit as i64);
            for (c, &bc) in coeffs.iter_mut().zip(b.coeffs()) {
                *c = ctx.add(*c, ctx.mul(s, bc));
            }
        }
        LinPoly::new(ctx, coeffs).expect("length n").is_invertible()
    });
    Some(ok)
}

/// C_{f^⊤}: the adjoint of the identity is the identity.
pub fn adjoint_code(code: &RankCode) -> RankCode {
    build_code(&code.f.adjoint())
}

/// Codes C_f and C_g are equivalent exactly when U_f and U_g are
/// ΓL(2, q^n)-equivalent.
pub fn code_equivalent(
    c1: &RankCode,
    c2: &RankCode,
    opts: &EquivalenceOptions,
) -> Result<Option<Certificate>> {
    subspace_equivalent(c1.poly(), c2.poly(), opts)
}

/// The k with 1 ≤ k < t and gcd(k, 2t) = 1 indexing the ψ-codes.
pub fn count_new_codes(q: u64, t: usize) -> Result<(usize, Vec<usize>)> {
    if t < 3 {
        return Err(Error::BadHypotheses(format!("t = {t} < 3")));
    }
    let ok = if t % 2 == 0 { q % 2 == 1 } else { q % 4 == 1 };
    if !ok {
        return Err(Error::BadHypotheses(format!(
            "need q odd for even t, q ≡ 1 (mod 4) for odd t; got q = {q}, t = {t}"
        )));
    }
    let ks: Vec<usize> = (1..t).filter(|&k| gcd(k as u64, 2 * t as u64) == 1).collect();
    Ok((ks.len(), ks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, FieldSpec};
    use crate::scattered::{build_psi, is_scattered_fibers};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    fn field(p: u64, t: u32) -> Arc<FieldCtx> {
        build_field(FieldSpec::new(p, 1, t)).unwrap()
    }

    fn f36() -> &'static Arc<FieldCtx> {
        static F: OnceLock<Arc<FieldCtx>> = OnceLock::new();
        F.get_or_init(|| field(3, 3))
    }

    fn f56() -> &'static Arc<FieldCtx> {
        static F: OnceLock<Arc<FieldCtx>> = OnceLock::new();
        F.get_or_init(|| field(5, 3))
    }

    fn psi(ctx: &Arc<FieldCtx>, k: usize) -> LinPoly {
        build_psi(ctx, k).unwrap().poly
    }

    #[test]
    fn psi_code_is_mrd() {
        let code = build_code(&psi(f56(), 1));
        assert_eq!(code.log_size(), 12);
        let dist = rank_distribution(&code);
        assert_eq!(dist.total(), 5u128.pow(12));
        assert_eq!(dist.counts[0], 1);
        assert!(dist.counts[1..5].iter().all(|&c| c == 0));
        assert_eq!(dist.min_distance(), 5);
        assert!(is_mrd(&code));
    }

    #[test]
    fn non_scattered_codes_are_not_mrd() {
        let code = build_code(&psi(f56(), 2));
        assert!(min_rank_distance(&code) <= 4);
        assert!(!is_mrd(&code));
        let code = build_code(&LinPoly::frobenius(f36(), 2));
        assert!(!is_mrd(&code));
        let code = build_code(&LinPoly::frobenius(f36(), 1));
        assert_eq!(min_rank_distance(&code), 5);
    }

    #[test]
    fn degenerate_code() {
        let ctx = f36();
        let code = build_code(&LinPoly::zero(ctx));
        assert!(code.is_degenerate());
        let dist = rank_distribution(&code);
        assert_eq!(dist.total(), 729);
        assert_eq!(dist.min_distance(), 6);
    }

    #[test]
    fn mrd_matches_scatteredness() {
        let ctx = f36();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..12 {
            let mut c = vec![Felt::ZERO; 6];
            for _ in 0..2 {
                c[rng.gen_range(1..6)] = ctx.element(rng.gen_range(1..729));
            }
            let f = LinPoly::new(ctx, c).unwrap();
            if f.is_scalar() {
                continue;
            }
            assert_eq!(is_mrd(&build_code(&f)), is_scattered_fibers(&f).scattered);
        }
    }

    #[test]
    fn adjoint_codes() {
        let ctx = f36();
        let f = LinPoly::frobenius(ctx, 1);
        let code = build_code(&f);
        let adj = adjoint_code(&code);
        assert_eq!(adj.poly(), &LinPoly::frobenius(ctx, 5));
        assert_eq!(adjoint_code(&adj).poly(), &f);
        assert_eq!(rank_distribution(&code), rank_distribution(&adj));
        let c = build_code(&psi(f56(), 1));
        assert_eq!(adjoint_code(&c).poly(), &psi(f56(), 5));
    }

    #[test]
    fn dickson_rank_matches_prime_rank() {
        let ctx = f36();
        let code = build_code(&psi(ctx, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = ctx.element(rng.gen_range(0..729));
            let b = ctx.element(rng.gen_range(0..729));
            let g = code.codeword(a, b);
            let r = linalg::rank(&PrimeField(3), &g.prime_matrix());
            assert_eq!(g.rank() * ctx.e() as usize, r);
            assert!(code.contains(&g));
        }
        assert!(!code.contains(&LinPoly::frobenius(ctx, 2)));
    }

    #[test]
    fn idealisers_of_psi_code() {
        let code = build_code(&psi(f56(), 1));
        let left = idealiser(&code, Side::Left);
        assert_eq!(left.dim_q, 6);
        assert!(left.is_field);
        let right = idealiser(&code, Side::Right);
        assert!(right.contains_identity && right.closed_under_composition);
    }

    #[test]
    fn idealisers_of_gabidulin_code() {
        let code = build_code(&LinPoly::frobenius(f36(), 1));
        for side in [Side::Left, Side::Right] {
            let r = idealiser(&code, side);
            assert_eq!(r.dim_q, 6, "{side:?}");
            assert!(r.is_field, "{side:?}");
            // GF(q)·x lies in every idealiser
            assert!(r.contains_identity);
        }
    }

    // Both idealisers sit inside C since the identity is a codeword, so
    // scanning every codeword gives their exact sizes.
    fn brute_idealiser_size(code: &RankCode, side: Side) -> u64 {
        let ctx = code.ctx();
        let basis = code.gf_q_basis();
        let order = ctx.order();
        (0..order * order)
            .into_par_iter()
            .filter(|&idx| {
                let phi = code.codeword(ctx.element(idx / order), ctx.element(idx % order));
                basis.iter().all(|c| {
                    let g = match side {
                        Side::Left => phi.compose(c),
                        Side::Right => c.compose(&phi),
                    };
                    code.contains(&g.unwrap())
                })
            })
            .count() as u64
    }

    #[test]
    fn idealiser_dimensions_match_brute_force() {
        let ctx = f36();
        for f in [psi(ctx, 1), LinPoly::frobenius(ctx, 1), psi(ctx, 2)] {
            let code = build_code(&f);
            for side in [Side::Left, Side::Right] {
                let r = idealiser(&code, side);
                assert_eq!(
                    brute_idealiser_size(&code, side),
                    3u64.pow(r.dim_q as u32),
                    "{f:?} {side:?}"
                );
                assert!(r.basis.iter().all(|phi| code.contains(phi)));
            }
        }
    }

    #[test]
    fn psi_right_idealiser_is_quadratic() {
        let r = idealiser(&build_code(&psi(f56(), 1)), Side::Right);
        assert_eq!(r.dim_q, 2);
        assert!(r.is_field);
    }

    #[test]
    fn code_equivalence_delegates() {
        let ctx = f36();
        let c = build_code(&psi(ctx, 1));
        let opts = EquivalenceOptions::default();
        assert_eq!(code_equivalent(&c, &c, &opts).unwrap(), Some(Certificate::identity()));
    }

    #[test]
    fn new_code_counts() {
        assert_eq!(count_new_codes(5, 3).unwrap(), (1, vec![1]));
        assert_eq!(count_new_codes(3, 4).unwrap(), (2, vec![1, 3]));
        assert_eq!(count_new_codes(5, 5).unwrap(), (2, vec![1, 3]));
        assert!(matches!(count_new_codes(3, 3), Err(Error::BadHypotheses(_))));
        assert!(matches!(count_new_codes(3, 2), Err(Error::BadHypotheses(_))));
    }
}
