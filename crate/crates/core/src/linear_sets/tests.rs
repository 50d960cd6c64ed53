use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::field::{build_field, FieldSpec};
use crate::scattered::{build_psi, is_scattered_fibers};

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

fn f38() -> &'static Arc<FieldCtx> {
    static F: OnceLock<Arc<FieldCtx>> = OnceLock::new();
    F.get_or_init(|| field(3, 4))
}

fn psi(ctx: &Arc<FieldCtx>, k: usize) -> LinPoly {
    build_psi(ctx, k).unwrap().poly
}

fn sparse_random(ctx: &Arc<FieldCtx>, rng: &mut ChaCha8Rng) -> LinPoly {
    let mut c = vec![Felt::ZERO; ctx.n()];
    for _ in 0..rng.gen_range(1..=3) {
        let i = rng.gen_range(0..ctx.n());
        c[i] = ctx.element(rng.gen_range(1..ctx.order()));
    }
    LinPoly::new(ctx, c).unwrap()
}

#[test]
fn point_normalization() {
    let ctx = f36();
    let w = ctx.omega();
    let p = ProjPoint::new(ctx, w, ctx.mul(w, w)).unwrap();
    assert_eq!(p.coords(), (Felt::ONE, w));
    let inf = ProjPoint::new(ctx, Felt::ZERO, w).unwrap();
    assert_eq!(inf.coords(), (Felt::ZERO, Felt::ONE));
    assert!(ProjPoint::new(ctx, Felt::ZERO, Felt::ZERO).is_none());
}

#[test]
fn linear_set_sizes() {
    let ctx = f36();
    let id = linear_set(&LinPoly::identity(ctx));
    assert_eq!(id.points.points(), &[ProjPoint::new(ctx, Felt::ONE, Felt::ONE).unwrap()]);
    let l = linear_set(&LinPoly::frobenius(ctx, 1));
    assert_eq!(l.size(), 364);
    assert!(l.is_maximum());
    let l = linear_set(&psi(f56(), 1));
    assert_eq!(l.size(), 3906);
}

#[test]
fn family_examples() {
    let ctx = f36();
    assert_eq!(
        known_family(&KnownFamily::U1 { s: 1 }, ctx).unwrap(),
        LinPoly::frobenius(ctx, 1)
    );
    assert!(matches!(
        known_family(&KnownFamily::U1 { s: 2 }, ctx),
        Err(Error::BadParams(_))
    ));
    let norm_one = ctx.nonzero().find(|&d| ctx.norm_over(d, 1) == Felt::ONE).unwrap();
    assert!(matches!(
        known_family(&KnownFamily::U2 { s: 1, delta: norm_one }, ctx),
        Err(Error::BadParams(_))
    ));
    assert!(matches!(
        known_family(&KnownFamily::U4 { delta: Felt::ONE }, ctx),
        Err(Error::BadParams(_))
    ));
    assert!(matches!(
        known_family(&KnownFamily::U3 { s: 1, delta: Felt::ONE }, f38()),
        Err(Error::BadParams(_))
    ));

    // h² = −1 with q ≡ 1 (mod 4): h lies in GF(q)
    let ctx = f56();
    let h = ctx.from_int(2);
    assert_eq!(ctx.mul(h, h), ctx.from_int(-1));
    let u5 = known_family(&KnownFamily::U5 { h }, ctx).unwrap();
    let one = Felt::ONE;
    let m1 = ctx.from_int(-1);
    assert_eq!(u5.coeffs(), &[Felt::ZERO, one, m1, Felt::ZERO, one, one]);
    // U5 is 2ψ^(5), the adjoint of 2ψ^(1)
    assert_eq!(psi(ctx, 5).scale(ctx.from_int(2)), u5);
    assert_eq!(
        linear_set(&psi(ctx, 1).scale(ctx.from_int(2))).points,
        linear_set(&u5).points
    );
}

#[test]
fn u4_and_u3_members_are_scattered_where_known() {
    // δ = 2 solves δ² + δ = 1 over GF(5), and q ≡ 0 (mod 5)
    let ctx = f56();
    let u4 = known_family(&KnownFamily::U4 { delta: ctx.from_int(2) }, ctx).unwrap();
    assert!(is_scattered_fibers(&u4).scattered);
    // U3 is scattered only for some δ; the constructor accepts any δ with the norm condition
    let ctx = f36();
    let delta = ctx
        .nonzero()
        .find(|&d| {
            let nd = ctx.norm_over(d, 3);
            nd != Felt::ONE
        })
        .unwrap();
    assert!(known_family(&KnownFamily::U3 { s: 1, delta }, ctx).is_ok());
}

#[test]
fn inclusion_examples() {
    let ctx = f36();
    let f = psi(ctx, 1);
    assert!(inclusion_dickson(&f, &f));
    let (x1, x2) = (LinPoly::frobenius(ctx, 1), LinPoly::frobenius(ctx, 2));
    assert!(!inclusion_dickson(&x1, &x2));
    assert!(!set_inclusion(&x1, &x2));
    // x^{q²−1} is a (q−1)-th power, so L_{x^{q²}} ⊂ L_{x^q}
    assert!(inclusion_dickson(&x2, &x1));
    assert!(set_inclusion(&x2, &x1));
}

#[test]
fn inclusion_oracles_agree_on_random_pairs() {
    let ctx = f36();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let f = sparse_random(ctx, &mut rng);
        let g = match i % 4 {
            0 => f.adjoint(),
            1 => f.compose(&LinPoly::frobenius(ctx, 2)).unwrap(),
            _ => sparse_random(ctx, &mut rng),
        };
        assert_eq!(inclusion_dickson(&f, &g), set_inclusion(&f, &g), "{f:?} {g:?}");
        assert_eq!(inclusion_dickson(&g, &f), set_inclusion(&g, &f), "{g:?} {f:?}");
        if i % 4 == 0 {
            assert!(set_inclusion(&f, &g) && set_inclusion(&g, &f));
        }
    }
}

#[test]
fn adjoint_preserves_linear_set() {
    let ctx = f56();
    let f = psi(ctx, 1);
    assert_eq!(linear_set(&f).points, linear_set(&f.adjoint()).points);
}

#[test]
fn coefficient_filter_examples() {
    let ctx = f36();
    let f = psi(ctx, 1);
    assert!(coefficient_filter(&f, &f));
    let g = &f + &LinPoly::identity(ctx);
    assert!(!coefficient_filter(&f, &g));
    let two = ctx.from_int(2);
    assert!(coefficient_filter(&f.scale(two), &psi(ctx, 5).scale(two)));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let f = sparse_random(ctx, &mut rng);
        assert!(coefficient_filter(&f, &f.adjoint()));
    }
}

#[test]
fn equivalence_basics() {
    let ctx = f36();
    let f = psi(ctx, 1);
    for method in [EquivalenceMethod::LinearSolve, EquivalenceMethod::Sweep] {
        let opts = EquivalenceOptions {
            method,
            ..Default::default()
        };
        let cert = subspace_equivalent(&f, &f, &opts).unwrap().unwrap();
        assert_eq!(cert, Certificate::identity(), "{method:?}");
        let lam = ctx.omega_pow(5);
        let cert = subspace_equivalent(&f, &f.scale(lam), &opts).unwrap().unwrap();
        assert!(verify_certificate(&f, &f.scale(lam), &cert));
        assert!(maps_onto(&f, &f.scale(lam), &cert));
        let g = psi(ctx, 5);
        let cert = subspace_equivalent(&f, &g, &opts).unwrap().unwrap();
        assert!(verify_certificate(&f, &g, &cert));
        assert!(maps_onto(&f, &g, &cert));
    }
}

#[test]
fn equivalence_respects_budget() {
    let ctx = f36();
    let f = psi(ctx, 1);
    let opts = EquivalenceOptions {
        method: EquivalenceMethod::Sweep,
        budget: 1000,
        ..Default::default()
    };
    assert!(matches!(
        subspace_equivalent(&f, &psi(ctx, 5), &opts),
        Err(Error::BudgetExceeded { .. })
    ));
}

#[test]
fn equivalence_methods_agree_at_q3_t3() {
    let ctx = f36();
    let f = LinPoly::frobenius(ctx, 1);
    let sweep = EquivalenceOptions {
        method: EquivalenceMethod::Sweep,
        ..Default::default()
    };
    let solve = EquivalenceOptions::default();
    let targets = [
        LinPoly::frobenius(ctx, 5),
        LinPoly::frobenius(ctx, 2),
        psi(ctx, 1),
        LinPoly::frobenius(ctx, 1).scale_argument(ctx.omega()),
    ];
    for g in targets {
        let a = subspace_equivalent(&f, &g, &sweep).unwrap();
        let b = subspace_equivalent(&f, &g, &solve).unwrap();
        assert_eq!(a.is_some(), b.is_some(), "{g:?}");
        for cert in a.iter().chain(b.iter()) {
            assert!(maps_onto(&f, &g, cert));
        }
    }
}

#[test]
fn automorphisms_matter() {
    // f = ω·x^q and its conjugate under x ↦ x^p share a ΓL class
    let ctx = build_field(FieldSpec::new(3, 2, 3)).unwrap();
    let f = LinPoly::frobenius(&ctx, 1).scale(ctx.omega());
    let g = f.twist(1);
    let with = EquivalenceOptions::default();
    let cert = subspace_equivalent(&f, &g, &with).unwrap().unwrap();
    assert!(verify_certificate(&f, &g, &cert));
}

#[test]
fn psi_pairs_at_q3_t4() {
    let ctx = f38();
    let opts = EquivalenceOptions::default();
    let cert = subspace_equivalent(&psi(ctx, 1), &psi(ctx, 7), &opts).unwrap().unwrap();
    assert!(verify_certificate(&psi(ctx, 1), &psi(ctx, 7), &cert));
    // ψ^(3) ∘ ψ^(1) = x^{q^4}, and an anti-diagonal M carries U_{ψ^(1)} onto U_{ψ^(3)}
    let (f, g) = (psi(ctx, 1), psi(ctx, 3));
    assert_eq!(g.compose(&f).unwrap(), LinPoly::frobenius(ctx, 4));
    let cert = subspace_equivalent(&f, &g, &opts).unwrap().unwrap();
    assert!(cert.a.is_zero() && cert.d.is_zero());
    assert!(maps_onto(&f, &g, &cert));
}

#[test]
fn pseudoregulus_examples() {
    let ctx = f36();
    let opts = EquivalenceOptions::default();
    assert!(pseudoregulus_test(&LinPoly::frobenius(ctx, 5), &opts).unwrap().is_some());
    let scaled = LinPoly::frobenius(ctx, 1).scale(ctx.omega());
    assert!(pseudoregulus_test(&scaled, &opts).unwrap().is_some());
    assert!(pseudoregulus_test(&psi(f38(), 1), &opts).unwrap().is_none());
}

#[test]
fn lp_type_examples() {
    let ctx = f36();
    let opts = EquivalenceOptions::default();
    let delta = DeltaSweep::Full.deltas(ctx)[3];
    let g = known_family(&KnownFamily::U2 { s: 1, delta }, ctx).unwrap();
    let m = lp_type_test(&g, &DeltaSweep::Given(vec![delta]), &opts).unwrap().unwrap();
    assert!(verify_certificate(&g, &m.family.polynomial(ctx).unwrap(), &m.certificate));
    assert_eq!(DeltaSweep::Sampled(10).deltas(ctx).len(), 10);
    assert_eq!(DeltaSweep::Full.deltas(ctx).len(), 364);
}

