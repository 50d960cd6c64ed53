use super::*;

fn field(p: u64, t: u32) -> FieldCtx {
    FieldCtx::new(FieldSpec::new(p, 1, t)).unwrap()
}

#[test]
fn sizes() {
    assert_eq!(field(3, 3).order(), 729);
    assert_eq!(field(5, 3).order(), 15625);
    let f = FieldCtx::new(FieldSpec::new(3, 2, 3)).unwrap();
    assert_eq!(f.q(), 9);
    assert_eq!(f.order(), 9u64.pow(6));
}

#[test]
fn construction_errors() {
    assert_eq!(FieldCtx::new(FieldSpec::new(2, 1, 3)).unwrap_err(), Error::EvenP);
    assert_eq!(FieldCtx::new(FieldSpec::new(9, 1, 3)).unwrap_err(), Error::NonPrimeP(9));
    assert_eq!(FieldCtx::new(FieldSpec::new(3, 1, 2)).unwrap_err(), Error::TSmall(2));
    // (x^3 + 2x + 1)(x^3 + 2x + 2) is reducible of degree 6 over GF(3)
    let reducible = vec![2, 0, 1, 0, 1, 0, 1];
    assert!(matches!(
        FieldCtx::new(FieldSpec::new(3, 1, 3).with_modulus(reducible)).unwrap_err(),
        Error::ReducibleModulus { .. }
    ));
    assert!(matches!(
        FieldCtx::new(FieldSpec::new(3, 1, 3).with_modulus(vec![1, 1])).unwrap_err(),
        Error::BadModulus(_)
    ));
}

#[test]
fn default_modulus_is_resolved_and_reusable() {
    let f = field(3, 3);
    let spec = f.spec().clone();
    assert_eq!(spec.modulus.as_ref().unwrap().len(), 7);
    let g = FieldCtx::new(spec).unwrap();
    assert!(f.same_field(&g));
    for x in f.elements().take(50) {
        assert_eq!(f.to_index(x), g.to_index(x));
    }
}

#[test]
fn omega_generates() {
    let f = field(3, 3);
    let mut seen = std::collections::HashSet::new();
    let mut cur = Felt::ONE;
    for _ in 0..f.order() - 1 {
        assert!(seen.insert(cur));
        cur = f.mul(cur, f.omega());
    }
    assert_eq!(cur, Felt::ONE);
}

#[test]
fn index_roundtrip_and_inverse() {
    let f = field(3, 3);
    for i in 0..f.order() {
        let x = f.from_index(i).unwrap();
        assert_eq!(f.to_index(x), i);
        if i != 0 {
            assert_eq!(f.mul(x, f.inv(x).unwrap()), Felt::ONE);
        }
    }
    assert!(f.inv(Felt::ZERO).is_none());
    assert!(f.from_index(729).is_err());
}

#[test]
fn frobenius_n_times_is_identity() {
    let f = field(5, 3);
    for x in f.elements().step_by(97) {
        let mut y = x;
        for _ in 0..f.n() {
            y = f.frob_q(y, 1);
        }
        assert_eq!(y, x);
        assert_eq!(f.frob_q(x, 1), f.pow(x, 5));
    }
}

#[test]
fn table_and_polynomial_backends_agree() {
    let spec = FieldSpec::new(3, 1, 3);
    let tab = FieldCtx::new(spec.clone()).unwrap();
    let poly = FieldCtx::new_untabled(spec).unwrap();
    assert!(!tab.same_field(&poly));
    assert_eq!(tab.to_index(tab.omega()), poly.to_index(poly.omega()));
    let conv = |x: Felt| poly.from_index(tab.to_index(x)).unwrap();
    for a in tab.elements().step_by(7) {
        for b in tab.elements().step_by(31) {
            assert_eq!(conv(tab.add(a, b)), poly.add(conv(a), conv(b)));
            assert_eq!(conv(tab.mul(a, b)), poly.mul(conv(a), conv(b)));
        }
        assert_eq!(conv(tab.frob_q(a, 2)), poly.frob_q(conv(a), 2));
        assert_eq!(conv(tab.neg(a)), poly.neg(conv(a)));
        if !a.is_zero() {
            assert_eq!(conv(tab.inv(a).unwrap()), poly.inv(conv(a)).unwrap());
        }
    }
}

#[test]
fn extension_q_power_is_e_fold_p_power() {
    let f = FieldCtx::new(FieldSpec::new(3, 2, 3)).unwrap();
    for x in f.elements().step_by(1013) {
        assert_eq!(f.frob_q(x, 1), f.frob_p(f.frob_p(x, 1), 1));
        assert_eq!(f.frob_q(x, 1), f.pow(x, 9));
    }
}

#[test]
fn trace_examples() {
    let f = field(5, 3);
    assert_eq!(f.trace(Felt::ZERO, Level::Q), Felt::ZERO);
    for x in f.elements().step_by(13) {
        assert_eq!(f.trace(x, Level::Qt), f.add(x, f.frob_q(x, 3)));
    }
    // 1000 elements spread over the field: trace to GF(5) is Frobenius-fixed
    let step = (f.order() / 1000) as usize;
    for x in f.elements().step_by(step).take(1000) {
        let tr = f.trace(x, Level::Q);
        assert!(f.in_subfield(tr, 1));
        assert!(f.in_subfield(f.trace(x, Level::Qt), 3));
    }
}

#[test]
fn norm_examples() {
    let f = field(5, 3);
    assert_eq!(f.norm(Felt::ONE, Level::Q), Felt::ONE);
    // order of N(ω) in GF(5)* by direct powering
    let nw = f.norm(f.omega(), Level::Q);
    let mut order = 1;
    let mut cur = nw;
    while cur != Felt::ONE {
        cur = f.mul(cur, nw);
        order += 1;
    }
    assert_eq!(order, 4);
    for x in f.elements().step_by(211) {
        let prod = (0..f.n()).fold(Felt::ONE, |acc, i| f.mul(acc, f.frob_q(x, i)));
        assert_eq!(f.norm(x, Level::Q), prod);
        assert!(f.in_subfield(f.norm(x, Level::Qt), 3));
    }
}

#[test]
fn w_is_a_line_over_gf_qt() {
    let f = field(3, 3);
    assert!(f.in_w(Felt::ZERO));
    let scanned: Vec<Felt> = f.elements().filter(|&x| f.in_w(x)).collect();
    assert_eq!(scanned.len(), 27);
    let mut built = f.w_elements();
    built.sort();
    assert_eq!(built, scanned);
    let x = f.omega_pow((27 + 1) / 2);
    assert!(f.in_w(x));
}

#[test]
fn gf_qt_and_w_are_complementary() {
    let f = field(3, 3);
    let sub: Vec<Felt> = f.subfield_elements(3);
    let w = f.w_elements();
    assert_eq!(sub.len(), 27);
    let both: Vec<_> = sub.iter().filter(|x| w.contains(x)).collect();
    assert_eq!(both, vec![&Felt::ZERO]);
    // every element is a unique sum h + r
    let mut sums = std::collections::HashSet::new();
    for &h in &sub {
        for &r in &w {
            assert!(sums.insert(f.add(h, r)));
        }
    }
    assert_eq!(sums.len() as u64, f.order());
    // W · W ⊆ GF(q^t)
    for &a in &w {
        for &b in &w {
            assert!(f.in_subfield(f.mul(a, b), 3));
        }
    }
}

#[test]
fn split_examples() {
    let f = field(3, 3);
    for x in f.elements() {
        let (x1, x2) = f.split(x);
        assert_eq!(f.add(x1, x2), x);
        assert!(f.in_subfield(x1, 3));
        assert!(f.in_w(x2));
    }
    for h in f.subfield_elements(3) {
        assert_eq!(f.split(h), (h, Felt::ZERO));
    }
    for r in f.w_elements() {
        assert_eq!(f.split(r), (Felt::ZERO, r));
    }
}

#[test]
fn w_unity_roots() {
    assert_eq!(field(5, 3).w_unity_root_exists(1), None);
    let f = field(3, 3);
    let x = f.w_unity_root_exists(1).expect("q = 3 mod 4, t and k odd");
    assert!(f.in_w(x));
    assert_eq!(f.mul(f.frob_q(x, 1), x), Felt::ONE);

    // q=3, t=4: compare against a scan of the 81 elements of W
    let f = field(3, 4);
    let w = f.w_elements();
    assert_eq!(w.len(), 81);
    let brute = w
        .iter()
        .filter(|x| !x.is_zero())
        .any(|&x| f.pow(x, 3 + 1) == Felt::ONE);
    assert_eq!(f.w_unity_root_exists(1).is_some(), brute);
}

#[test]
fn spec_json_roundtrip() {
    let spec: FieldSpec = serde_json::from_str(r#"{"p":5,"t":3}"#).unwrap();
    assert_eq!(spec, FieldSpec::new(5, 1, 3));
    let f = FieldCtx::new(spec).unwrap();
    let text = serde_json::to_string(f.spec()).unwrap();
    let back: FieldSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, f.spec());
}

mod props {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn f56() -> &'static FieldCtx {
        static F: OnceLock<FieldCtx> = OnceLock::new();
        F.get_or_init(|| field(5, 3))
    }

    proptest! {
        #[test]
        fn frobenius_is_an_automorphism(a in 0u64..15625, b in 0u64..15625, i in 0usize..6) {
            let f = f56();
            let (x, y) = (f.element(a), f.element(b));
            prop_assert_eq!(f.frob_q(f.add(x, y), i), f.add(f.frob_q(x, i), f.frob_q(y, i)));
            prop_assert_eq!(f.frob_q(f.mul(x, y), i), f.mul(f.frob_q(x, i), f.frob_q(y, i)));
        }

        #[test]
        fn field_axioms(a in 0u64..15625, b in 0u64..15625, c in 0u64..15625) {
            let f = f56();
            let (x, y, z) = (f.element(a), f.element(b), f.element(c));
            prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
            prop_assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
            prop_assert_eq!(f.sub(f.add(x, y), y), x);
            let idx = f.digits(f.add(x, y));
            let sum: Vec<u64> = f.digits(x).iter().zip(f.digits(y)).map(|(a, b)| (a + b) % 5).collect();
            prop_assert_eq!(idx, sum);
        }
    }
}
