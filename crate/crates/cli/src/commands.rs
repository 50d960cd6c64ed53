use std::fs;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use scattered_core::acceptance::{self, Grid};
use scattered_core::geometry::{
    apply_sigma, gamma_k, intn, project_to_line, pseudoregulus_geometric_test,
};
use scattered_core::linear_sets::{
    linear_set, subspace_equivalent, Certificate, EquivalenceMethod, EquivalenceOptions,
};
use scattered_core::rank_codes::{
    adjoint_code, build_code, idealiser, is_mrd, rank_distribution, IdealiserReport, RankCode,
    Side,
};
use scattered_core::scattered::{
    baer_partition_check, build_psi, is_scattered_fibers, is_scattered_ranks,
    nonscattered_witness_search, structured_witness, theorem_predicate, BaerReport,
    ScatterVerdict, WitnessKind,
};
use scattered_core::{build_field, gcd, Error, FieldCtx, FieldSpec, LinPoly};

use crate::family::FamilySpec;
use crate::{CliError, Command, FieldArgs, Format, OutArgs, PolyArgs};

type CliResult<T> = Result<T, CliError>;

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: u32,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<FieldSpec>,
    #[serde(flatten)]
    body: T,
}

pub fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::VerifyScattered { field, poly, out } => verify_scattered(&field, &poly, &out),
        Command::Witness { field, k, out } => witness(&field, k, &out),
        Command::BaerCheck { field, k, out } => baer(&field, k, &out),
        Command::CodeReport { field, poly, out } => code_report(&field, &poly, &out),
        Command::Equiv {
            field,
            left,
            right,
            budget,
            method,
            no_automorphisms,
            out,
        } => {
            let opts = EquivalenceOptions {
                with_automorphisms: !no_automorphisms,
                budget,
                method: method.into(),
            };
            equiv(&field, &left, &right, &opts, &out)
        }
        Command::Geometry { field, k, out } => geometry(&field, k, &out),
        Command::Acceptance { only, grid, out } => run_acceptance(&only, &grid, &out),
    }
}

fn parse_modulus(text: &str) -> CliResult<Vec<u64>> {
    text.split(|c: char| c.is_whitespace() || matches!(c, ',' | '[' | ']'))
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Usage(format!("bad modulus coefficient {s:?}")))
        })
        .collect()
}

fn field_ctx(args: &FieldArgs) -> CliResult<Arc<FieldCtx>> {
    let mut spec = FieldSpec::new(args.p, args.e, args.t);
    if let Some(path) = &args.modulus_file {
        let text = fs::read_to_string(path)?;
        spec = spec.with_modulus(parse_modulus(&text)?);
    }
    Ok(build_field(spec)?)
}

fn poly_from(ctx: &Arc<FieldCtx>, args: &PolyArgs) -> CliResult<(String, LinPoly, Option<usize>)> {
    match (&args.family, args.k) {
        (Some(spec), _) => {
            let fam = FamilySpec::parse(ctx, spec)?;
            let (label, poly) = fam.single(ctx)?;
            let k = match fam {
                FamilySpec::Psi(k) => Some(k),
                _ => None,
            };
            Ok((label, poly, k))
        }
        (None, Some(k)) => Ok((format!("psi:{k}"), build_psi(ctx, k)?.poly, Some(k))),
        (None, None) => Err(CliError::Usage("give --k or --family".into())),
    }
}

fn indices(ctx: &FieldCtx, p: &LinPoly) -> Vec<u64> {
    p.coeffs().iter().map(|&c| ctx.to_index(c)).collect()
}

fn emit<T: Serialize>(
    out: &OutArgs,
    command: &'static str,
    field: Option<&FieldCtx>,
    body: T,
    csv: Option<&dyn Fn() -> CliResult<String>>,
    text: Option<&dyn Fn() -> String>,
    default: Format,
) -> CliResult<()> {
    let format = out.format.unwrap_or(default);
    let rendered = match format {
        Format::Json => {
            let env = Envelope {
                schema: 1,
                command,
                field: field.map(|f| f.spec().clone()),
                body,
            };
            let mut s = serde_json::to_string_pretty(&env).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Csv => match csv {
            Some(f) => f()?,
            None => {
                return Err(CliError::Usage(format!("{command} has no CSV output")));
            }
        },
        Format::Text => match text {
            Some(f) => f(),
            None => {
                return Err(CliError::Usage(format!("{command} has no text output")));
            }
        },
    };
    match &out.out {
        Some(path) => fs::write(path, rendered)?,
        None => std::io::stdout().write_all(rendered.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct VerdictOut {
    scattered: bool,
    /// Two GF(q)-independent y, z with f(y)/y = f(z)/z.
    witness: Option<[u64; 2]>,
}

fn verdict_out(ctx: &FieldCtx, v: &ScatterVerdict) -> VerdictOut {
    VerdictOut {
        scattered: v.scattered,
        witness: v.witness.map(|(y, z)| [ctx.to_index(y), ctx.to_index(z)]),
    }
}

#[derive(Serialize)]
struct VerifyOut {
    polynomial: String,
    coefficients: Vec<u64>,
    fibers: VerdictOut,
    ranks: VerdictOut,
    theorem_predicate: Option<bool>,
    agree: bool,
    scattered: bool,
}

fn verify_scattered(field: &FieldArgs, poly: &PolyArgs, out: &OutArgs) -> CliResult<()> {
    let ctx = field_ctx(field)?;
    let (label, f, k) = poly_from(&ctx, poly)?;
    let a = is_scattered_fibers(&f);
    let b = is_scattered_ranks(&f);
    let pred = k.map(|k| theorem_predicate(ctx.q(), ctx.t() as u64, k as u64));
    let agree = a.scattered == b.scattered && pred.is_none_or(|p| p == a.scattered);
    let body = VerifyOut {
        polynomial: label,
        coefficients: indices(&ctx, &f),
        fibers: verdict_out(&ctx, &a),
        ranks: verdict_out(&ctx, &b),
        theorem_predicate: pred,
        agree,
        scattered: a.scattered,
    };
    emit(out, "verify-scattered", Some(&ctx), body, None, None, Format::Json)
}

#[derive(Serialize)]
struct RhoOut {
    rho: u64,
    x: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<WitnessKind>,
}

#[derive(Serialize)]
struct WitnessOut {
    k: usize,
    theorem_predicate: bool,
    structured: Option<RhoOut>,
    search: Option<RhoOut>,
    /// First x ∈ W* with x^{q^k + 1} = 1.
    unity_root_in_w: Option<u64>,
}

fn witness(field: &FieldArgs, k: usize, out: &OutArgs) -> CliResult<()> {
    let ctx = field_ctx(field)?;
    let fam = build_psi(&ctx, k)?;
    let structured = structured_witness(&fam).map(|w| RhoOut {
        rho: ctx.to_index(w.rho),
        x: ctx.to_index(w.x),
        kind: Some(w.kind),
    });
    let search = nonscattered_witness_search(&fam.poly).map(|(rho, x)| RhoOut {
        rho: ctx.to_index(rho),
        x: ctx.to_index(x),
        kind: None,
    });
    let body = WitnessOut {
        k,
        theorem_predicate: theorem_predicate(ctx.q(), ctx.t() as u64, k as u64),
        structured,
        search,
        unity_root_in_w: ctx.w_unity_root_exists(k as u64).map(|x| ctx.to_index(x)),
    };
    emit(out, "witness", Some(&ctx), body, None, None, Format::Json)
}

#[derive(Serialize)]
struct BaerOut {
    k: usize,
    scattered: bool,
    report: Option<BaerReport>,
    holds: Option<bool>,
}

fn baer(field: &FieldArgs, k: usize, out: &OutArgs) -> CliResult<()> {
    let ctx = field_ctx(field)?;
    let fam = build_psi(&ctx, k)?;
    let body = match baer_partition_check(&fam) {
        Ok(r) => BaerOut {
            k,
            scattered: true,
            holds: Some(r.holds()),
            report: Some(r),
        },
        // a verdict, not a failure
        Err(Error::NotScattered) => BaerOut {
            k,
            scattered: false,
            report: None,
            holds: None,
        },
        Err(e) => return Err(e.into()),
    };
    emit(out, "baer-check", Some(&ctx), body, None, None, Format::Json)
}

#[derive(Serialize)]
struct Params {
    n: usize,
    q: u64,
    d: usize,
    log_q_size: usize,
}

#[derive(Serialize)]
struct IdealiserOut {
    dim_q: usize,
    dim_p: usize,
    contains_identity: bool,
    closed_under_composition: bool,
    commutative: bool,
    all_nonzero_invertible: Option<bool>,
    is_field: bool,
    basis: Vec<Vec<u64>>,
}

fn idealiser_out(ctx: &FieldCtx, r: IdealiserReport) -> IdealiserOut {
    IdealiserOut {
        dim_q: r.dim_q,
        dim_p: r.dim_p,
        contains_identity: r.contains_identity,
        closed_under_composition: r.closed_under_composition,
        commutative: r.commutative,
        all_nonzero_invertible: r.all_nonzero_invertible,
        is_field: r.is_field,
        basis: r.basis.iter().map(|b| indices(ctx, b)).collect(),
    }
}

#[derive(Serialize)]
struct Idealisers {
    left: IdealiserOut,
    right: IdealiserOut,
}

#[derive(Serialize)]
struct AdjointOut {
    coefficients: Vec<u64>,
    same_rank_distribution: bool,
}

#[derive(Serialize)]
struct CodeOut {
    polynomial: String,
    coefficients: Vec<u64>,
    parameters: Params,
    degenerate: bool,
    mrd: bool,
    rank_distribution: Vec<u128>,
    idealisers: Idealisers,
    adjoint: AdjointOut,
}

fn code_report(field: &FieldArgs, poly: &PolyArgs, out: &OutArgs) -> CliResult<()> {
    let ctx = field_ctx(field)?;
    let (label, f, _) = poly_from(&ctx, poly)?;
    let code: RankCode = build_code(&f);
    let dist = rank_distribution(&code);
    let counts = dist.counts.clone();
    let csv = move || -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["rank", "count"]).map_err(csv_err)?;
        for (r, c) in counts.iter().enumerate() {
            w.write_record([r.to_string(), c.to_string()]).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii"))
    };
    if out.format == Some(Format::Csv) {
        // skip the idealiser work when only the distribution is wanted
        return emit(out, "code-report", Some(&ctx), (), Some(&csv), None, Format::Json);
    }
    let adj = adjoint_code(&code);
    let body = CodeOut {
        polynomial: label,
        coefficients: indices(&ctx, &f),
        parameters: Params {
            n: code.n(),
            q: ctx.q(),
            d: dist.min_distance(),
            log_q_size: code.log_size(),
        },
        degenerate: code.is_degenerate(),
        mrd: is_mrd(&code),
        rank_distribution: dist.counts.clone(),
        idealisers: Idealisers {
            left: idealiser_out(&ctx, idealiser(&code, Side::Left)),
            right: idealiser_out(&ctx, idealiser(&code, Side::Right)),
        },
        adjoint: AdjointOut {
            coefficients: indices(&ctx, adj.poly()),
            same_rank_distribution: rank_distribution(&adj) == dist,
        },
    };
    emit(out, "code-report", Some(&ctx), body, Some(&csv), None, Format::Json)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Serialize)]
struct CertOut {
    /// Row-major (a, b; c, d) as field indices.
    matrix: [u64; 4],
    /// τ: x ↦ x^{p^automorphism}.
    automorphism: usize,
}

fn cert_out(ctx: &FieldCtx, c: &Certificate) -> CertOut {
    CertOut {
        matrix: c.to_indices(ctx),
        automorphism: c.automorphism,
    }
}

#[derive(Serialize)]
struct MatchOut {
    right: String,
    certificate: CertOut,
}

#[derive(Serialize)]
struct EquivOut {
    left: String,
    right: String,
    method: EquivalenceMethod,
    with_automorphisms: bool,
    budget: u128,
    tested: usize,
    equivalent: bool,
    matches: Vec<MatchOut>,
}

fn equiv(
    field: &FieldArgs,
    left: &str,
    right: &str,
    opts: &EquivalenceOptions,
    out: &OutArgs,
) -> CliResult<()> {
    let ctx = field_ctx(field)?;
    let (_, f) = FamilySpec::parse(&ctx, left)?.single(&ctx)?;
    let targets = FamilySpec::parse(&ctx, right)?.expand(&ctx)?;
    let mut matches = Vec::new();
    for (label, g) in &targets {
        if let Some(c) = subspace_equivalent(&f, g, opts)? {
            matches.push(MatchOut {
                right: label.clone(),
                certificate: cert_out(&ctx, &c),
            });
        }
    }
    let body = EquivOut {
        left: left.to_string(),
        right: right.to_string(),
        method: opts.method,
        with_automorphisms: opts.with_automorphisms,
        budget: opts.budget,
        tested: targets.len(),
        equivalent: !matches.is_empty(),
        matches,
    };
    emit(out, "equiv", Some(&ctx), body, None, None, Format::Json)
}

#[derive(Serialize)]
struct GeneratorOut {
    m: usize,
    /// dim(Γ ∩ Γ^τ ∩ … ∩ Γ^{τ^j}) for j = 1, 2, … until empty.
    chain_dims: Vec<i64>,
    intn: usize,
}

#[derive(Serialize)]
struct ProjectionOut {
    points: usize,
    equals_linear_set: bool,
}

#[derive(Serialize)]
struct GeometryOut {
    k: usize,
    gamma_equations: Vec<Vec<u64>>,
    gamma_dim: i64,
    disjoint_from_sigma: bool,
    generators: Vec<GeneratorOut>,
    pseudoregulus_geometric: bool,
    projection: ProjectionOut,
}

fn geometry(field: &FieldArgs, k: usize, out: &OutArgs) -> CliResult<()> {
    let ctx = field_ctx(field)?;
    let g = gamma_k(&ctx, k)?;
    let n = ctx.n();
    let mut generators = Vec::new();
    for m in (1..n).filter(|&m| gcd(m as u64, n as u64) == 1) {
        let mut chain_dims = Vec::new();
        let mut cur = g.clone();
        let mut img = g.clone();
        while cur.dim() >= 0 && chain_dims.len() < n {
            img = apply_sigma(&img, m);
            cur = cur.intersect(&img);
            chain_dims.push(cur.dim());
        }
        generators.push(GeneratorOut {
            m,
            chain_dims,
            intn: intn(&g, m)?,
        });
    }
    let proj = project_to_line(&g, k)?;
    let two_psi = build_psi(&ctx, k)?.poly.scale(ctx.from_int(2));
    let body = GeometryOut {
        k,
        gamma_equations: g
            .equations()
            .iter()
            .map(|r| r.iter().map(|&c| ctx.to_index(c)).collect())
            .collect(),
        gamma_dim: g.dim(),
        disjoint_from_sigma: g.disjoint_from_sigma(),
        pseudoregulus_geometric: pseudoregulus_geometric_test(&g),
        projection: ProjectionOut {
            points: proj.len(),
            equals_linear_set: proj == linear_set(&two_psi).points,
        },
        generators,
    };
    emit(out, "geometry", Some(&ctx), body, None, None, Format::Json)
}

fn parse_grid(items: &[String]) -> CliResult<Grid> {
    if items.is_empty() {
        return Ok(Grid::default());
    }
    let mut theorem = Vec::new();
    for item in items {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| -> CliResult<u64> {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad grid entry {item:?}")))
        };
        let spec = match parts.as_slice() {
            [p, t] => FieldSpec::new(num(p)?, 1, num(t)? as u32),
            [p, e, t] => FieldSpec::new(num(p)?, num(e)? as u32, num(t)? as u32),
            _ => return Err(CliError::Usage(format!("grid entries are p:t or p:e:t, got {item:?}"))),
        };
        theorem.push((spec, 120.0));
    }
    Ok(Grid { theorem })
}

#[derive(Serialize)]
struct AcceptanceOut {
    results: Vec<acceptance::CriterionResult>,
    passed: usize,
    failed: usize,
}

fn run_acceptance(only: &[String], grid: &[String], out: &OutArgs) -> CliResult<()> {
    let ids = only
        .iter()
        .map(|s| {
            acceptance::criterion_id(s.trim())
                .ok_or_else(|| CliError::Usage(format!("unknown criterion {s:?}")))
        })
        .collect::<CliResult<Vec<u8>>>()?;
    let grid = parse_grid(grid)?;
    let results = acceptance::run(&ids, &grid)?;
    let passed = results.iter().filter(|r| r.passed).count();
    let failed = results.len() - passed;
    let text = {
        let lines: Vec<String> = results.iter().map(|r| r.report()).collect();
        move || {
            let mut s = lines.join("\n");
            s.push_str(&format!("\n{passed} passed, {failed} failed\n"));
            s
        }
    };
    let body = AcceptanceOut {
        results,
        passed,
        failed,
    };
    emit(out, "acceptance", None, body, None, Some(&text), Format::Text)
}
