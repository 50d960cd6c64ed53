//! `psi:K`, `u1:S`, `u2:S,D`, `u3:S,D`, `u4:D`, `u5:H`.
//!
//! Field elements are polynomial-basis indices or `w^K` for a power of the
//! primitive element. `*` in place of D or H stands for every valid value.

use std::sync::Arc;

use scattered_core::linear_sets::{DeltaSweep, KnownFamily};
use scattered_core::scattered::build_psi;
use scattered_core::{Error, Felt, FieldCtx, LinPoly, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Param {
    Value(Felt),
    All,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Psi(usize),
    U1(usize),
    U2(usize, Param),
    U3(usize, Param),
    U4(Param),
    U5(Param),
}

fn bad(msg: String) -> Error {
    Error::BadParams(msg)
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| bad(format!("{what} must be a non-negative integer, got {s:?}")))
}

pub fn parse_element(ctx: &FieldCtx, s: &str) -> Result<Felt> {
    let s = s.trim();
    if let Some(exp) = s.strip_prefix("w^") {
        let k: u64 = exp
            .parse()
            .map_err(|_| bad(format!("bad exponent in {s:?}")))?;
        return Ok(ctx.omega_pow(k));
    }
    let idx: u64 = s
        .parse()
        .map_err(|_| bad(format!("field element must be an index or w^K, got {s:?}")))?;
    ctx.from_index(idx)
}

fn parse_param(ctx: &FieldCtx, s: &str) -> Result<Param> {
    if s.trim() == "*" {
        Ok(Param::All)
    } else {
        parse_element(ctx, s).map(Param::Value)
    }
}

impl FamilySpec {
    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<Self> {
        let (tag, rest) = s
            .split_once(':')
            .ok_or_else(|| bad(format!("family {s:?} needs the form tag:params")))?;
        let args: Vec<&str> = rest.split(',').collect();
        let want = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(bad(format!("{tag} takes {k} parameter(s), got {}", args.len())))
            }
        };
        match tag.trim().to_ascii_lowercase().as_str() {
            "psi" => {
                want(1)?;
                Ok(FamilySpec::Psi(parse_usize(args[0], "k")?))
            }
            "u1" => {
                want(1)?;
                Ok(FamilySpec::U1(parse_usize(args[0], "s")?))
            }
            "u2" => {
                want(2)?;
                Ok(FamilySpec::U2(parse_usize(args[0], "s")?, parse_param(ctx, args[1])?))
            }
            "u3" => {
                want(2)?;
                Ok(FamilySpec::U3(parse_usize(args[0], "s")?, parse_param(ctx, args[1])?))
            }
            "u4" => {
                want(1)?;
                Ok(FamilySpec::U4(parse_param(ctx, args[0])?))
            }
            "u5" => {
                want(1)?;
                Ok(FamilySpec::U5(parse_param(ctx, args[0])?))
            }
            other => Err(bad(format!("unknown family tag {other:?}"))),
        }
    }

    /// Every (label, polynomial) the spec denotes; a `*` expands to all
    /// parameter values that pass validation.
    pub fn expand(&self, ctx: &Arc<FieldCtx>) -> Result<Vec<(String, LinPoly)>> {
        let one = |fam: KnownFamily| -> Result<Vec<(String, LinPoly)>> {
            Ok(vec![(fam.to_string(), fam.polynomial(ctx)?)])
        };
        let all = |make: &dyn Fn(Felt) -> KnownFamily, values: Vec<Felt>| {
            let out: Vec<(String, LinPoly)> = values
                .into_iter()
                .map(make)
                .filter_map(|fam| fam.polynomial(ctx).ok().map(|p| (fam.to_string(), p)))
                .collect();
            if out.is_empty() {
                Err(bad("no parameter value satisfies the family constraints".into()))
            } else {
                Ok(out)
            }
        };
        let nonzero = || ctx.nonzero().collect::<Vec<_>>();
        match *self {
            FamilySpec::Psi(k) => Ok(vec![(format!("psi:{k}"), build_psi(ctx, k)?.poly)]),
            FamilySpec::U1(s) => one(KnownFamily::U1 { s }),
            FamilySpec::U2(s, Param::Value(delta)) => one(KnownFamily::U2 { s, delta }),
            FamilySpec::U2(s, Param::All) => {
                // surface a bad s before sweeping
                KnownFamily::U1 { s }.validate(ctx)?;
                all(&|delta| KnownFamily::U2 { s, delta }, DeltaSweep::Full.deltas(ctx))
            }
            FamilySpec::U3(s, Param::Value(delta)) => one(KnownFamily::U3 { s, delta }),
            FamilySpec::U3(s, Param::All) => all(&|delta| KnownFamily::U3 { s, delta }, nonzero()),
            FamilySpec::U4(Param::Value(delta)) => one(KnownFamily::U4 { delta }),
            FamilySpec::U4(Param::All) => all(&|delta| KnownFamily::U4 { delta }, nonzero()),
            FamilySpec::U5(Param::Value(h)) => one(KnownFamily::U5 { h }),
            FamilySpec::U5(Param::All) => all(&|h| KnownFamily::U5 { h }, nonzero()),
        }
    }

    /// The single polynomial of a spec without `*`.
    pub fn single(&self, ctx: &Arc<FieldCtx>) -> Result<(String, LinPoly)> {
        let mut v = self.expand(ctx)?;
        if v.len() != 1 {
            return Err(bad("this command needs a single polynomial, not a sweep".into()));
        }
        Ok(v.remove(0))
    }
}
