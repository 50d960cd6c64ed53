//! The family ψ^(k), scatteredness checkers, non-scattered witnesses and the
//! Baer subline partition.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Felt, FieldCtx};
use crate::gcd;
use crate::linalg;
use crate::linpoly::LinPoly;

/// α(x) = Tr_{q^n/q^t}(x)^{q^{t−1}} / 2.
pub fn alpha(ctx: &FieldCtx, x: Felt) -> Felt {
    let t = ctx.t();
    let tr = ctx.add(x, ctx.frob_q(x, t));
    ctx.mul(ctx.half(), ctx.frob_q(tr, t - 1))
}

/// β(x) = (x − x^{q^t})^q / 2.
pub fn beta(ctx: &FieldCtx, x: Felt) -> Felt {
    let d = ctx.sub(x, ctx.frob_q(x, ctx.t()));
    ctx.mul(ctx.half(), ctx.frob_q(d, 1))
}

/// α^(k)(x) = α(x)^{q^{(k−1)(t−1)}}.
pub fn alpha_k(ctx: &FieldCtx, k: usize, x: Felt) -> Felt {
    ctx.frob_q(alpha(ctx, x), (k - 1) * (ctx.t() - 1))
}

/// β^(k)(x) = β(x)^{q^{k−1}}.
pub fn beta_k(ctx: &FieldCtx, k: usize, x: Felt) -> Felt {
    ctx.frob_q(beta(ctx, x), k - 1)
}

/// ψ^(k) together with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiFamily {
    pub t: usize,
    pub k: usize,
    pub poly: LinPoly,
}

impl PsiFamily {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.poly.ctx()
    }
}

/// ψ^(k) = ½(x^{q^k} + x^{q^{t−k}} − x^{q^{t+k}} + x^{q^{2t−k}}), exponents mod 2t.
pub fn build_psi(ctx: &Arc<FieldCtx>, k: usize) -> Result<PsiFamily> {
    let t = ctx.t();
    let n = ctx.n();
    if k == 0 || k >= n {
        return Err(Error::BadK {
            k: k as u64,
            reason: format!("need 1 <= k < {n}"),
        });
    }
    let half = ctx.half();
    let mhalf = ctx.neg(half);
    let mut coeffs = vec![Felt::ZERO; n];
    for (idx, c) in [
        (k, half),
        ((t + n - k) % n, half),
        ((t + k) % n, mhalf),
        ((2 * t - k) % n, half),
    ] {
        coeffs[idx] = ctx.add(coeffs[idx], c);
    }
    Ok(PsiFamily {
        t,
        k,
        poly: LinPoly::new(ctx, coeffs)?,
    })
}

/// The characterization of scattered ψ^(k): t even and gcd(k, t) = 1, or
/// t odd, gcd(k, 2t) = 1 and q ≡ 1 (mod 4).
pub fn theorem_predicate(q: u64, t: u64, k: u64) -> bool {
    if t % 2 == 0 {
        gcd(k, t) == 1
    } else {
        gcd(k, 2 * t) == 1 && q % 4 == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Fibers,
    Ranks,
}

/// Outcome of a scatteredness check. A negative verdict always carries
/// GF(q)-independent y, z with f(y)/y = f(z)/z.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatterVerdict {
    pub scattered: bool,
    pub witness: Option<(Felt, Felt)>,
    pub criterion: Criterion,
}

/// Whether y and z are GF(q)-independent nonzero elements with f(y)/y = f(z)/z.
pub fn verify_pair(f: &LinPoly, y: Felt, z: Felt) -> bool {
    let ctx = f.ctx();
    if y.is_zero() || z.is_zero() {
        return false;
    }
    let ratio = ctx.div(z, y).expect("y is nonzero");
    !ctx.in_subfield(ratio, 1) && ctx.mul(f.eval(y), z) == ctx.mul(f.eval(z), y)
}

/// Scattered iff f(x)/x takes (q^n − 1)/(q − 1) distinct values.
pub fn is_scattered_fibers(f: &LinPoly) -> ScatterVerdict {
    let ctx = f.ctx();
    let counts = f.quotient_counts();
    let limit = (ctx.q() - 1) as u32;
    let scattered = counts.iter().all(|&c| c <= limit);
    let witness = if scattered {
        None
    } else {
        fiber_pair(f, &counts)
    };
    ScatterVerdict {
        scattered,
        witness,
        criterion: Criterion::Fibers,
    }
}

// First y in sweep order lying in an oversized fiber, paired with the first
// later z in that fiber outside GF(q)·y.
fn fiber_pair(f: &LinPoly, counts: &[u32]) -> Option<(Felt, Felt)> {
    let ctx = f.ctx();
    let limit = (ctx.q() - 1) as u32;
    let quot = |x: Felt| ctx.div(f.eval(x), x).expect("x is nonzero");
    let y = ctx.nonzero().find(|&x| counts[quot(x).handle() as usize] > limit)?;
    let v = quot(y);
    let z = ctx
        .nonzero()
        .filter(|&z| quot(z) == v)
        .find(|&z| !ctx.in_subfield(ctx.div(z, y).unwrap(), 1))?;
    Some((y, z))
}

/// Scattered iff dim ker(f + m·id) ≤ 1 for every m.
pub fn is_scattered_ranks(f: &LinPoly) -> ScatterVerdict {
    let ctx = f.ctx();
    let n = f.n();
    let mut base = vec![Felt::ZERO; n * n];
    f.dickson_into(&mut base);
    let c0 = f.coeff(0);
    let bad = (0..ctx.order())
        .into_par_iter()
        .map_init(
            || vec![Felt::ZERO; n * n],
            |buf, h| {
                let m = ctx.element(h);
                buf.copy_from_slice(&base);
                let d = ctx.add(c0, m);
                for i in 0..n {
                    buf[i * n + i] = ctx.frob_q(d, i);
                }
                (m, linalg::rank_in_place(&**ctx, buf, n, n))
            },
        )
        .find_first(|&(_, r)| r + 1 < n)
        .map(|(m, _)| m);
    let witness = bad.and_then(|m| {
        let g = &LinPoly::scalar(ctx, m) + f;
        independent_pair(ctx, &g.kernel_basis())
    });
    ScatterVerdict {
        scattered: bad.is_none(),
        witness,
        criterion: Criterion::Ranks,
    }
}

// Two GF(q)-independent vectors among a GF(p)-spanning set.
fn independent_pair(ctx: &FieldCtx, basis: &[Felt]) -> Option<(Felt, Felt)> {
    let y = *basis.iter().find(|b| !b.is_zero())?;
    let z = *basis
        .iter()
        .find(|&&z| !z.is_zero() && !ctx.in_subfield(ctx.div(z, y).unwrap(), 1))?;
    Some((y, z))
}

/// Whether ρ ∉ GF(q), x ≠ 0 and f(ρx) = ρ f(x).
pub fn verify_rho_witness(f: &LinPoly, rho: Felt, x: Felt) -> bool {
    let ctx = f.ctx();
    !x.is_zero()
        && !ctx.in_subfield(rho, 1)
        && f.eval(ctx.mul(rho, x)) == ctx.mul(rho, f.eval(x))
}

/// Some ρ ∉ GF(q) and x ≠ 0 with f(ρx) = ρ f(x), from the first oversized
/// fiber in sweep order; `None` exactly when f is scattered.
pub fn nonscattered_witness_search(f: &LinPoly) -> Option<(Felt, Felt)> {
    let ctx = f.ctx();
    let (y, z) = is_scattered_fibers(f).witness?;
    Some((ctx.div(z, y).unwrap(), y))
}

/// The construction used for a witness of non-scatteredness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// gcd(k, t) = d > 1: ρ ∈ GF(q^d) \ GF(q), x = 1.
    SubfieldPolynomial,
    /// k even: x ∈ W*, ρ = μ·x^{−(q^k+1)} with μ ∈ W ∩ GF(q²)*.
    EvenK,
    /// t, k odd and q ≡ 3 (mod 4): x = 1 + x₂ with x₂ ∈ W, x₂^{q^k+1} = 1.
    UnityRootInW,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuredWitness {
    pub rho: Felt,
    pub x: Felt,
    pub kind: WitnessKind,
}

/// Witness built directly from the shape of ψ^(k) rather than by search.
/// `None` when the characterization says ψ^(k) is scattered.
pub fn structured_witness(psi: &PsiFamily) -> Option<StructuredWitness> {
    let ctx = psi.ctx();
    let (t, k) = (psi.t, psi.k);
    let q = ctx.q();
    let f = &psi.poly;
    let d = gcd(k as u64, t as u64) as usize;
    let found = if d > 1 {
        let rho = ctx
            .subfield_elements(d)
            .into_iter()
            .find(|&r| !ctx.in_subfield(r, 1))?;
        StructuredWitness {
            rho,
            x: Felt::ONE,
            kind: WitnessKind::SubfieldPolynomial,
        }
    } else if k % 2 == 0 {
        let mu = ctx
            .subfield_elements(2)
            .into_iter()
            .find(|&m| !m.is_zero() && ctx.in_w(m))?;
        let x2 = ctx.w_elements().into_iter().find(|x| !x.is_zero())?;
        let e = ctx.mul(ctx.frob_q(x2, k), x2);
        let rho = ctx.div(mu, e).unwrap();
        StructuredWitness {
            rho,
            x: x2,
            kind: WitnessKind::EvenK,
        }
    } else if t % 2 == 1 && q % 4 == 3 {
        let x2 = ctx.w_unity_root_exists(k as u64)?;
        let x = ctx.add(Felt::ONE, x2);
        // ρ ↦ f(ρx) − ρ f(x) is GF(q)-linear; its kernel exceeds GF(q)
        let fx = f.eval(x);
        let lin = LinPoly::new(ctx, {
            let mut c: Vec<Felt> = f
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, &ci)| ctx.mul(ci, ctx.frob_q(x, i)))
                .collect();
            c[0] = ctx.sub(c[0], fx);
            c
        })
        .ok()?;
        let rho = lin
            .kernel_basis()
            .into_iter()
            .find(|&r| !ctx.in_subfield(r, 1))?;
        StructuredWitness {
            rho,
            x,
            kind: WitnessKind::UnityRootInW,
        }
    } else {
        return None;
    };
    verify_rho_witness(f, found.rho, found.x).then_some(found)
}

/// Σ ∩ L_{ψ^(k)} against its two pseudoregulus parts, Σ the subline over GF(q^t).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaerReport {
    pub intersection_size: usize,
    /// Points ⟨(h, h^{q^{t−k}})⟩, h ∈ GF(q^t)*.
    pub part_a_size: usize,
    /// Points ⟨(r, r^{q^k})⟩, r ∈ W*.
    pub part_b_size: usize,
    pub expected_part_size: u64,
    pub disjoint: bool,
    pub union_equals_intersection: bool,
}

impl BaerReport {
    pub fn holds(&self) -> bool {
        self.disjoint
            && self.union_equals_intersection
            && self.part_a_size as u64 == self.expected_part_size
            && self.part_b_size as u64 == self.expected_part_size
    }
}

pub fn baer_partition_check(psi: &PsiFamily) -> Result<BaerReport> {
    let ctx = psi.ctx();
    let (t, k) = (psi.t, psi.k);
    if k >= t {
        return Err(Error::BadK {
            k: k as u64,
            reason: format!("the partition needs 1 <= k < t = {t}"),
        });
    }
    let f = &psi.poly;
    let counts = f.quotient_counts();
    let limit = (ctx.q() - 1) as u32;
    if counts.iter().any(|&c| c > limit) {
        return Err(Error::NotScattered);
    }
    // every point of L is ⟨(1, v)⟩ with v = f(x)/x; it lies on Σ iff v ∈ GF(q^t)
    let inter: HashSet<Felt> = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(h, _)| ctx.element(h as u64))
        .filter(|&v| ctx.in_subfield(v, t))
        .collect();
    let ratio = |u: Felt, i: usize| ctx.div(ctx.frob_q(u, i), u).unwrap();
    let part_a: HashSet<Felt> = ctx
        .subfield_elements(t)
        .into_iter()
        .filter(|h| !h.is_zero())
        .map(|h| ratio(h, t - k))
        .collect();
    let part_b: HashSet<Felt> = ctx
        .w_elements()
        .into_iter()
        .filter(|r| !r.is_zero())
        .map(|r| ratio(r, k))
        .collect();
    let union: HashSet<Felt> = part_a.union(&part_b).copied().collect();
    Ok(BaerReport {
        intersection_size: inter.len(),
        part_a_size: part_a.len(),
        part_b_size: part_b.len(),
        expected_part_size: (ctx.q().pow(t as u32) - 1) / (ctx.q() - 1),
        disjoint: part_a.is_disjoint(&part_b),
        union_equals_intersection: union == inter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, FieldSpec};
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

    #[test]
    fn alpha_beta_kernels() {
        let ctx = f36();
        for x in ctx.w_elements() {
            assert!(alpha(ctx, x).is_zero());
        }
        for x in ctx.subfield_elements(3) {
            assert!(beta(ctx, x).is_zero());
        }
        let ctx = f56();
        for x in ctx.elements().step_by(101) {
            let a = alpha(ctx, x);
            let b = beta(ctx, x);
            assert_eq!(ctx.frob_q(a, 3), a);
            assert_eq!(ctx.frob_q(b, 3), ctx.neg(b));
        }
    }

    #[test]
    fn psi_one_for_t3() {
        let ctx = f56();
        let psi = build_psi(ctx, 1).unwrap();
        let two = ctx.from_int(2);
        let doubled: Vec<i64> = psi
            .poly
            .coeffs()
            .iter()
            .map(|&c| {
                let v = ctx.to_index(ctx.mul(two, c)) as i64;
                if v > 2 { v - 5 } else { v }
            })
            .collect();
        assert_eq!(doubled, vec![0, 1, 1, 0, -1, 1]);
    }

    #[test]
    fn psi_t_is_conjugation() {
        for ctx in [f36(), f56()] {
            let psi = build_psi(ctx, ctx.t()).unwrap();
            assert_eq!(psi.poly, LinPoly::frobenius(ctx, ctx.t()));
            for x in ctx.elements().step_by(37) {
                assert_eq!(psi.poly.eval(x), ctx.frob_q(x, ctx.t()));
            }
        }
    }

    #[test]
    fn bad_k() {
        let ctx = f36();
        assert!(matches!(build_psi(ctx, 0), Err(Error::BadK { .. })));
        assert!(matches!(build_psi(ctx, 6), Err(Error::BadK { .. })));
    }

    #[test]
    fn closed_form_is_iterated_composition() {
        for ctx in [f36(), &field(3, 4)] {
            let n = ctx.n();
            let psi = build_psi(ctx, 1).unwrap().poly;
            let mut cur = psi.clone();
            for k in 1..n {
                assert_eq!(build_psi(ctx, k).unwrap().poly, cur, "k = {k}");
                for x in ctx.elements().step_by(53) {
                    let split = ctx.add(alpha_k(ctx, k, x), beta_k(ctx, k, x));
                    assert_eq!(cur.eval(x), split);
                }
                cur = psi.compose(&cur).unwrap();
            }
            assert_eq!(cur, LinPoly::identity(ctx));
            assert_eq!(psi.map_order().unwrap(), n as u64);
        }
    }

    #[test]
    fn adjoint_of_psi_is_psi_five() {
        let ctx = f56();
        let psi = build_psi(ctx, 1).unwrap().poly;
        assert_eq!(psi.adjoint(), build_psi(ctx, 5).unwrap().poly);
    }

    #[test]
    fn predicate_examples() {
        assert!(theorem_predicate(5, 3, 1));
        assert!(!theorem_predicate(3, 3, 1));
        assert!(!theorem_predicate(3, 4, 2));
        assert!(theorem_predicate(3, 4, 3));
        assert!(!theorem_predicate(5, 3, 3));
    }

    #[test]
    fn checkers_on_examples() {
        let ctx36 = f36();
        let xq = LinPoly::frobenius(ctx36, 1);
        assert!(is_scattered_fibers(&xq).scattered);
        assert!(is_scattered_ranks(&xq).scattered);
        let ctx = f56();
        let psi1 = build_psi(ctx, 1).unwrap().poly;
        assert!(is_scattered_fibers(&psi1).scattered);
        assert!(is_scattered_ranks(&psi1).scattered);
        let psi2 = build_psi(ctx, 2).unwrap().poly;
        for v in [is_scattered_fibers(&psi2), is_scattered_ranks(&psi2)] {
            assert!(!v.scattered);
            let (y, z) = v.witness.unwrap();
            assert!(verify_pair(&psi2, y, z), "{:?}", v.criterion);
        }
    }

    #[test]
    fn witness_search_examples() {
        let ctx = f56();
        assert_eq!(nonscattered_witness_search(&build_psi(ctx, 1).unwrap().poly), None);
        let psi2 = build_psi(ctx, 2).unwrap();
        let (rho, x) = nonscattered_witness_search(&psi2.poly).unwrap();
        assert!(verify_rho_witness(&psi2.poly, rho, x));
        let w = structured_witness(&psi2).unwrap();
        assert_eq!(w.kind, WitnessKind::EvenK);
        assert!(ctx.in_w(w.x));

        let ctx = f36();
        let psi = build_psi(ctx, 1).unwrap();
        let w = structured_witness(&psi).unwrap();
        assert_eq!(w.kind, WitnessKind::UnityRootInW);
        let (_, x2) = ctx.split(w.x);
        assert_eq!(ctx.mul(ctx.frob_q(x2, 1), x2), Felt::ONE);
        assert!(nonscattered_witness_search(&psi.poly).is_some());
    }

    #[test]
    fn structured_witnesses_cover_every_nonscattered_case() {
        for (p, t) in [(3, 3), (5, 3), (3, 4), (7, 3)] {
            let ctx = field(p, t);
            for k in 1..ctx.n() {
                let psi = build_psi(&ctx, k).unwrap();
                let w = structured_witness(&psi);
                assert_eq!(
                    w.is_none(),
                    theorem_predicate(ctx.q(), t as u64, k as u64),
                    "q={p} t={t} k={k}"
                );
            }
        }
    }

    #[test]
    fn baer_examples() {
        let r = baer_partition_check(&build_psi(f56(), 1).unwrap()).unwrap();
        assert_eq!((r.intersection_size, r.part_a_size, r.part_b_size), (62, 31, 31));
        assert!(r.holds());
        let r = baer_partition_check(&build_psi(&field(3, 4), 1).unwrap()).unwrap();
        assert_eq!((r.intersection_size, r.part_a_size, r.part_b_size), (80, 40, 40));
        assert!(r.holds());
        assert_eq!(
            baer_partition_check(&build_psi(f56(), 2).unwrap()).unwrap_err(),
            Error::NotScattered
        );
        assert!(matches!(
            baer_partition_check(&build_psi(f56(), 4).unwrap()),
            Err(Error::BadK { .. })
        ));
    }
}
