//! The acceptance criteria as runnable checks with pinned time limits.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::field::{build_field, Felt, FieldCtx, FieldSpec};
use crate::geometry::{
    apply_sigma, gamma_k, intn, project_to_line, pseudoregulus_geometric_test,
    pseudoregulus_vertex,
};
use crate::linear_sets::{
    coefficient_filter, inclusion_dickson, linear_set, maps_onto, set_inclusion,
    subspace_equivalent, verify_certificate, DeltaSweep, EquivalenceMethod, EquivalenceOptions,
    KnownFamily,
};
use crate::linpoly::LinPoly;
use crate::rank_codes::{build_code, count_new_codes, idealiser, is_mrd, rank_distribution, Side};
use crate::scattered::{
    baer_partition_check, build_psi, is_scattered_fibers, is_scattered_ranks,
    nonscattered_witness_search, structured_witness, theorem_predicate, verify_rho_witness,
};

/// One verified fact inside a criterion.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub key: &'static str,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed_secs: f64,
    pub limit_secs: f64,
    pub passed: bool,
}

impl CriterionResult {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One status line.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} [{:>2}] {:<12} {:>8.2}s / {:>6.0}s  {}",
            self.id, self.key, self.elapsed_secs, self.limit_secs, self.title
        );
        for c in self.failed_checks() {
            s.push_str(&format!("\n       failed: {}: {}", c.label, c.detail));
        }
        if self.elapsed_secs > self.limit_secs {
            s.push_str("\n       failed: time limit exceeded");
        }
        s
    }

    /// The status line followed by every check.
    pub fn report(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} [{:>2}] {:<12} {:>8.2}s / {:>6.0}s  {}",
            self.id, self.key, self.elapsed_secs, self.limit_secs, self.title
        );
        for c in &self.checks {
            let mark = if c.passed { "ok" } else { "FAILED" };
            s.push_str(&format!("\n       {mark}: {}: {}", c.label, c.detail));
        }
        if self.elapsed_secs > self.limit_secs {
            s.push_str("\n       FAILED: time limit exceeded");
        }
        s
    }
}

/// (id, key, title, time limit in seconds)
pub const CRITERIA: [(u8, &str, &str, f64); 11] = [
    (1, "psi-order", "map order of ψ equals n", 4.0),
    (2, "theorem", "both scatteredness checkers agree with the characterization", 600.0),
    (3, "witnesses", "non-scatteredness witnesses re-verify", 1.0),
    (4, "max-size", "maximum scattered size of L_ψ", 1.0),
    (5, "baer", "subline intersection splits into two pseudoregulus sets", 5.0),
    (6, "mrd", "C_ψ is MRD, C_{ψ^(2)} is not", 30.0),
    (7, "idealisers", "idealisers of C_ψ are fields of order q^n", 30.0),
    (8, "geometry", "σ-intersections of Γ at n = 8", 1.0),
    (9, "projection", "projection from Γ_k rebuilds L_{2ψ}", 5.0),
    (10, "equivalence", "ΓL-equivalence at q = 3, t = 4", 1800.0),
    (11, "oracles", "inclusion oracles and coefficient filter agree", 60.0),
];

/// Fields swept by the characterization criterion, with a time limit each.
#[derive(Clone, Debug)]
pub struct Grid {
    pub theorem: Vec<(FieldSpec, f64)>,
}

impl Default for Grid {
    fn default() -> Self {
        let f = |p, t| FieldSpec::new(p, 1, t);
        Grid {
            theorem: vec![
                (f(5, 3), 5.0),
                (f(13, 3), 120.0),
                (f(3, 4), 120.0),
                (f(5, 4), 120.0),
                (f(3, 5), 120.0),
            ],
        }
    }
}

pub fn criterion_key(id: u8) -> Option<&'static str> {
    CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1)
}

pub fn criterion_id(key: &str) -> Option<u8> {
    CRITERIA
        .iter()
        .find(|c| c.1 == key || c.0.to_string() == key)
        .map(|c| c.0)
}

/// Validate every field of the grid before anything runs.
pub fn validate_grid(grid: &Grid) -> Result<()> {
    for (spec, _) in &grid.theorem {
        spec.validate()?;
    }
    Ok(())
}

pub fn run_criterion(id: u8, grid: &Grid) -> Result<CriterionResult> {
    let &(id, key, title, limit) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| crate::Error::BadParams(format!("no criterion {id}")))?;
    let start = Instant::now();
    let checks = match id {
        1 => psi_order()?,
        2 => theorem_grid(grid)?,
        3 => witnesses()?,
        4 => max_size()?,
        5 => baer()?,
        6 => mrd()?,
        7 => idealisers()?,
        8 => geometry_n8()?,
        9 => projection()?,
        10 => equivalence()?,
        _ => oracles()?,
    };
    let elapsed = start.elapsed().as_secs_f64();
    let passed = checks.iter().all(|c| c.passed) && elapsed <= limit;
    Ok(CriterionResult {
        id,
        key,
        title,
        checks,
        elapsed_secs: elapsed,
        limit_secs: limit,
        passed,
    })
}

/// Run the selected criteria (all when `only` is empty) in order.
pub fn run(only: &[u8], grid: &Grid) -> Result<Vec<CriterionResult>> {
    validate_grid(grid)?;
    CRITERIA
        .iter()
        .map(|c| c.0)
        .filter(|id| only.is_empty() || only.contains(id))
        .map(|id| run_criterion(id, grid))
        .collect()
}

fn check(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        label: label.into(),
        passed,
        detail: detail.into(),
    }
}

fn field(p: u64, t: u32) -> Result<Arc<FieldCtx>> {
    build_field(FieldSpec::new(p, 1, t))
}

fn psi(ctx: &Arc<FieldCtx>, k: usize) -> Result<LinPoly> {
    Ok(build_psi(ctx, k)?.poly)
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let s = Instant::now();
    let v = f()?;
    Ok((v, s.elapsed().as_secs_f64()))
}

fn psi_order() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (p, t) in [(3, 3), (5, 3), (3, 4), (3, 5)] {
        let (order, secs) = timed(|| {
            let ctx = field(p, t)?;
            psi(&ctx, 1)?.map_order()
        })?;
        let n = 2 * t as u64;
        out.push(check(
            format!("q={p},t={t}"),
            order == n && secs < 1.0,
            format!("order {order}, expected {n}, {secs:.3}s of 1s"),
        ));
    }
    Ok(out)
}

fn theorem_grid(grid: &Grid) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (spec, limit) in &grid.theorem {
        let (mismatches, secs) = timed(|| {
            let ctx = build_field(spec.clone())?;
            let (q, t) = (ctx.q(), ctx.t() as u64);
            let mut bad = Vec::new();
            for k in 1..2 * ctx.t() {
                let f = psi(&ctx, k)?;
                let expect = theorem_predicate(q, t, k as u64);
                let a = is_scattered_fibers(&f).scattered;
                let b = is_scattered_ranks(&f).scattered;
                if a != expect || b != expect {
                    bad.push(format!("k={k}: fibers {a}, ranks {b}, predicate {expect}"));
                }
            }
            Ok(bad)
        })?;
        out.push(check(
            format!("q={},t={}", spec.p.pow(spec.e), spec.t),
            mismatches.is_empty() && secs <= *limit,
            if mismatches.is_empty() {
                format!("all k agree, {secs:.2}s of {limit}s")
            } else {
                mismatches.join("; ")
            },
        ));
    }
    Ok(out)
}

fn witnesses() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (p, k) in [(3, 1), (5, 2)] {
        let ctx = field(p, 3)?;
        let fam = build_psi(&ctx, k)?;
        let searched = nonscattered_witness_search(&fam.poly);
        let ok_search = searched.is_some_and(|(rho, x)| verify_rho_witness(&fam.poly, rho, x));
        let structured = structured_witness(&fam);
        let ok_struct = structured
            .as_ref()
            .is_some_and(|w| verify_rho_witness(&fam.poly, w.rho, w.x));
        out.push(check(
            format!("q={p},t=3,k={k}"),
            ok_search && ok_struct,
            format!(
                "search witness {}, structured witness {}",
                if ok_search { "verified" } else { "missing" },
                if ok_struct { "verified" } else { "missing" }
            ),
        ));
    }
    let ctx3 = field(3, 3)?;
    let root = ctx3.w_unity_root_exists(1);
    out.push(check(
        "q=3: x in W with x^(q+1)=1",
        root.is_some_and(|x| ctx3.in_w(x) && ctx3.mul(ctx3.frob_q(x, 1), x) == Felt::ONE),
        format!("{root:?}"),
    ));
    let ctx5 = field(5, 3)?;
    let root = ctx5.w_unity_root_exists(1);
    out.push(check("q=5: no such x", root.is_none(), format!("{root:?}")));
    Ok(out)
}

fn max_size() -> Result<Vec<Check>> {
    let ctx = field(5, 3)?;
    let size = linear_set(&psi(&ctx, 1)?).size();
    Ok(vec![check(
        "|L| at q=5,t=3",
        size == 3906,
        format!("{size}, expected 3906"),
    )])
}

fn baer() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (p, t, total, part) in [(5, 3, 62, 31), (3, 4, 80, 40)] {
        let ctx = field(p, t)?;
        let r = baer_partition_check(&build_psi(&ctx, 1)?)?;
        out.push(check(
            format!("q={p},t={t}"),
            r.holds()
                && r.intersection_size == total
                && r.part_a_size == part
                && r.part_b_size == part,
            format!(
                "{} = {} + {}, disjoint {}, union {}",
                r.intersection_size,
                r.part_a_size,
                r.part_b_size,
                r.disjoint,
                r.union_equals_intersection
            ),
        ));
    }
    Ok(out)
}

fn mrd() -> Result<Vec<Check>> {
    let ctx = field(5, 3)?;
    let code = build_code(&psi(&ctx, 1)?);
    let dist = rank_distribution(&code);
    let d = dist.min_distance();
    let mut out = vec![check(
        "C_psi1 q=5,t=3",
        d == 5 && dist.total() == 5u128.pow(12) && code.log_size() == 12 && is_mrd(&code),
        format!("d = {d}, |C| = {}, classes {}", dist.total(), ctx.order() + 1),
    )];
    let code2 = build_code(&psi(&ctx, 2)?);
    let d2 = rank_distribution(&code2).min_distance();
    out.push(check(
        "C_psi2 not MRD",
        !is_mrd(&code2) && d2 <= 4,
        format!("d = {d2}"),
    ));
    Ok(out)
}

fn idealisers() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (p, t) in [(5, 3), (3, 4)] {
        let ctx = field(p, t)?;
        let code = build_code(&psi(&ctx, 1)?);
        for side in [Side::Left, Side::Right] {
            let r = idealiser(&code, side);
            out.push(check(
                format!("q={p},t={t} {side:?}"),
                r.dim_q == ctx.n() && r.is_field,
                format!(
                    "dim {} (n = {}), identity {}, closed {}, commutative {}, invertible {:?}",
                    r.dim_q,
                    ctx.n(),
                    r.contains_identity,
                    r.closed_under_composition,
                    r.commutative,
                    r.all_nonzero_invertible
                ),
            ));
        }
    }
    Ok(out)
}

fn geometry_n8() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [3, 5] {
        let ctx = field(p, 4)?;
        let g = gamma_k(&ctx, 1)?;
        let g1 = apply_sigma(&g, 1);
        let g2 = apply_sigma(&g, 2);
        let d1 = g.intersect(&g1).dim();
        let d2 = g.intersect(&g1).intersect(&g2).dim();
        out.push(check(
            format!("q={p}: dims"),
            d1 == 3 && d2 == 1,
            format!("dim(Γ∩Γ^σ) = {d1}, dim(Γ∩Γ^σ∩Γ^σ²) = {d2}"),
        ));
        for m in [1, 3, 5, 7] {
            let i = intn(&g, m)?;
            out.push(check(
                format!("q={p}: intn for σ^{m}"),
                i >= 3,
                format!("{i}"),
            ));
        }
    }
    Ok(out)
}

fn projection() -> Result<Vec<Check>> {
    let ctx = field(3, 3)?;
    let g = gamma_k(&ctx, 1)?;
    let proj = project_to_line(&g, 1)?;
    let expect = linear_set(&psi(&ctx, 1)?.scale(ctx.from_int(2))).points;
    let mut out = vec![check(
        "q=3,t=3,k=1 projection",
        proj == expect,
        format!("{} projected points, {} in L_2ψ", proj.len(), expect.len()),
    )];
    for (p, t, ks) in [(3, 3, vec![1, 5]), (5, 3, vec![1, 5]), (3, 4, vec![1, 3, 5, 7])] {
        let ctx = field(p, t)?;
        for k in ks {
            let pr = pseudoregulus_geometric_test(&gamma_k(&ctx, k)?);
            out.push(check(
                format!("q={p},t={t}: Γ_{k} not pseudoregulus"),
                !pr,
                format!("{pr}"),
            ));
        }
        let v = pseudoregulus_vertex(&ctx);
        let pr = pseudoregulus_geometric_test(&v);
        out.push(check(
            format!("q={p},t={t}: orbit vertex is pseudoregulus"),
            pr,
            format!("{pr}"),
        ));
    }
    Ok(out)
}

fn equivalence() -> Result<Vec<Check>> {
    let ctx = field(3, 4)?;
    let opts = EquivalenceOptions::default();
    let sweep = EquivalenceOptions {
        method: EquivalenceMethod::Sweep,
        ..opts
    };
    let psis: Vec<LinPoly> = (0..8)
        .map(|k| if k == 0 { Ok(LinPoly::zero(&ctx)) } else { psi(&ctx, k) })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();

    for (k, expect_found) in [(7usize, true), (3, false)] {
        let (f, g) = (&psis[1], &psis[k]);
        let solved = subspace_equivalent(f, g, &opts)?;
        let swept = subspace_equivalent(f, g, &sweep)?;
        let verified = solved
            .iter()
            .chain(swept.iter())
            .all(|c| verify_certificate(f, g, c) && maps_onto(f, g, c));
        let detail = match &solved {
            Some(c) => format!(
                "certificate (a, b, c, d) = {:?}, τ = p^{}, sweep {}, verified {verified}",
                c.to_indices(&ctx),
                c.automorphism,
                if swept.is_some() { "agrees" } else { "finds none" }
            ),
            None => format!(
                "exhaustive none, sweep {}",
                if swept.is_some() { "disagrees" } else { "agrees" }
            ),
        };
        let label = if expect_found {
            format!("psi1~psi{k}")
        } else {
            format!("psi1!~psi{k}")
        };
        out.push(check(
            label,
            solved.is_some() == expect_found && swept.is_some() == solved.is_some() && verified,
            detail,
        ));
    }

    let deltas = DeltaSweep::Full.deltas(&ctx);
    let mut hits = Vec::new();
    let mut tried = 0usize;
    for s in [1usize, 3, 5, 7] {
        for &delta in &deltas {
            let g = KnownFamily::U2 { s, delta }.polynomial(&ctx)?;
            tried += 1;
            if let Some(c) = subspace_equivalent(&psis[1], &g, &opts)? {
                hits.push(format!("U2({s}, #{}) via {:?}", ctx.to_index(delta), c));
            }
        }
    }
    out.push(check(
        "psi1 vs every U2(s,δ)",
        hits.is_empty(),
        if hits.is_empty() {
            format!("exhaustive none over {tried} subspaces ({} valid δ)", deltas.len())
        } else {
            hits.join("; ")
        },
    ));

    let (count, ks) = count_new_codes(3, 4)?;
    out.push(check(
        "new-code count t=4",
        count == 2 && ks == vec![1, 3],
        format!("{count} codes, k in {ks:?}"),
    ));
    Ok(out)
}

/// 20 deterministic pairs at q = 3, n = 6. Every fourth pair is (f, f^⊤),
/// which share a linear set.
pub fn oracle_corpus(ctx: &Arc<FieldCtx>) -> Vec<(LinPoly, LinPoly)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca7_7e4e);
    let random = |rng: &mut ChaCha8Rng| {
        let mut c = vec![Felt::ZERO; ctx.n()];
        for _ in 0..rng.gen_range(1..=3) {
            let i = rng.gen_range(0..ctx.n());
            c[i] = ctx.element(rng.gen_range(1..ctx.order()));
        }
        LinPoly::new(ctx, c).expect("length n")
    };
    (0..20)
        .map(|i| {
            let f = random(&mut rng);
            let g = match i % 4 {
                0 => f.adjoint(),
                1 => f.compose(&LinPoly::frobenius(ctx, 2)).expect("same field"),
                _ => random(&mut rng),
            };
            (f, g)
        })
        .collect()
}

fn oracles() -> Result<Vec<Check>> {
    let ctx = field(3, 3)?;
    let corpus = oracle_corpus(&ctx);
    let mut disagreements = Vec::new();
    let mut filter_rejects = Vec::new();
    let mut equal_pairs = 0;
    for (i, (f, g)) in corpus.iter().enumerate() {
        let fg = set_inclusion(f, g);
        let gf = set_inclusion(g, f);
        if inclusion_dickson(f, g) != fg || inclusion_dickson(g, f) != gf {
            disagreements.push(i);
        }
        if fg && gf {
            equal_pairs += 1;
            if !coefficient_filter(f, g) {
                filter_rejects.push(i);
            }
        }
    }
    Ok(vec![
        check(
            "dickson vs set inclusion",
            disagreements.is_empty(),
            format!("{} pairs, disagreements at {disagreements:?}", corpus.len()),
        ),
        check(
            "filter keeps equal pairs",
            filter_rejects.is_empty() && equal_pairs > 0,
            format!("{equal_pairs} equal pairs, rejected {filter_rejects:?}"),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_round_trip() {
        for c in CRITERIA {
            assert_eq!(criterion_id(c.1), Some(c.0));
            assert_eq!(criterion_key(c.0), Some(c.1));
        }
        assert_eq!(criterion_id("10"), Some(10));
        assert_eq!(criterion_id("nope"), None);
    }

    #[test]
    fn even_characteristic_grid_is_rejected() {
        let grid = Grid {
            theorem: vec![(FieldSpec::new(2, 1, 3), 1.0)],
        };
        assert!(matches!(run(&[2], &grid), Err(crate::Error::EvenP)));
    }

    #[test]
    fn corpus_is_deterministic() {
        let ctx = field(3, 3).unwrap();
        assert_eq!(oracle_corpus(&ctx), oracle_corpus(&ctx));
    }
}
