//! PG(n−1, q^n) around the canonical subgeometry Σ = {P_u = ⟨(u, u^q, …, u^{q^{n−1}})⟩}.
//!
//! Subspaces are kept as reduced equation systems: σ acts on equations
//! coordinatewise and intersections are stacked systems.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Felt, FieldCtx};
use crate::gcd;
use crate::linalg::{self, Matrix, PrimeField};
use crate::linear_sets::{PointSet, ProjPoint};
use crate::linpoly::LinPoly;

/// A subspace of PG(n−1, q^n) given by its equations in canonical
/// reduced echelon form.
#[derive(Clone, Debug)]
pub struct ProjSubspace {
    ctx: Arc<FieldCtx>,
    eqs: Matrix<Felt>,
}

impl PartialEq for ProjSubspace {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_field(&other.ctx) && self.eqs == other.eqs
    }
}

impl ProjSubspace {
    /// The subspace cut out by the given equations (rows of length n).
    pub fn from_equations(ctx: &Arc<FieldCtx>, rows: Vec<Vec<Felt>>) -> Result<Self> {
        let n = ctx.n();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::BadLength {
                expected: n,
                got: r.len(),
            });
        }
        let (eqs, _) = linalg::rref(&**ctx, &Matrix::from_rows(rows, n));
        Ok(ProjSubspace {
            ctx: ctx.clone(),
            eqs,
        })
    }

    /// The span of the given coordinate vectors.
    pub fn span(ctx: &Arc<FieldCtx>, points: Vec<Vec<Felt>>) -> Result<Self> {
        let n = ctx.n();
        if let Some(r) = points.iter().find(|r| r.len() != n) {
            return Err(Error::BadLength {
                expected: n,
                got: r.len(),
            });
        }
        let eqs = linalg::nullspace(&**ctx, &Matrix::from_rows(points, n));
        Self::from_equations(ctx, eqs)
    }

    pub fn whole(ctx: &Arc<FieldCtx>) -> Self {
        ProjSubspace {
            ctx: ctx.clone(),
            eqs: Matrix::filled(0, ctx.n(), Felt::ZERO),
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn equations(&self) -> Vec<Vec<Felt>> {
        self.eqs.to_rows()
    }

    /// Reduced echelon basis of the underlying vector space.
    pub fn basis(&self) -> Vec<Vec<Felt>> {
        let n = self.ctx.n();
        let null = linalg::nullspace(&*self.ctx, &self.eqs);
        let (red, _) = linalg::rref(&*self.ctx, &Matrix::from_rows(null, n));
        red.to_rows()
    }

    /// Projective dimension; the empty subspace has dimension −1.
    pub fn dim(&self) -> i64 {
        self.ctx.n() as i64 - self.eqs.rows() as i64 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.dim() < 0
    }

    pub fn contains_point(&self, x: &[Felt]) -> bool {
        let f = &*self.ctx;
        (0..self.eqs.rows()).all(|r| {
            let row = self.eqs.row(r);
            f.sum(row.iter().zip(x).map(|(&h, &v)| f.mul(h, v))).is_zero()
        })
    }

    pub fn intersect(&self, other: &ProjSubspace) -> ProjSubspace {
        let mut rows = self.equations();
        rows.extend(other.equations());
        Self::from_equations(&self.ctx, rows).expect("same ambient")
    }

    pub fn join(&self, other: &ProjSubspace) -> ProjSubspace {
        let mut pts = self.basis();
        pts.extend(other.basis());
        Self::span(&self.ctx, pts).expect("same ambient")
    }

    pub fn apply(&self, c: Collineation) -> ProjSubspace {
        let rows = self
            .equations()
            .iter()
            .map(|h| c.apply_equation(&self.ctx, h))
            .collect();
        Self::from_equations(&self.ctx, rows).expect("same ambient")
    }

    /// Each equation h as the q-polynomial Σ h_i x^{q^i}, so h(P_u) = L_h(u).
    fn equation_polys(&self) -> Vec<LinPoly> {
        self.equations()
            .into_iter()
            .map(|h| LinPoly::new(&self.ctx, h).expect("length n"))
            .collect()
    }

    /// Whether no P_u lies in the subspace: the q-polynomials of the
    /// equations have no common nonzero root.
    pub fn disjoint_from_sigma(&self) -> bool {
        let f = &*self.ctx;
        let m = f.m();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for poly in self.equation_polys() {
            rows.extend(poly.prime_matrix().to_rows());
        }
        if rows.is_empty() {
            return false;
        }
        linalg::rank(&PrimeField(f.p()), &Matrix::from_rows(rows, m)) == m
    }
}

/// x ↦ (x_{j−shift}^{q^frob})_j; σ is shift 1, frob 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Collineation {
    pub shift: usize,
    pub frob: usize,
}

impl Collineation {
    /// ⟨(x_0, …, x_{n−1})⟩ ↦ ⟨(x_{n−1}^q, x_0^q, …, x_{n−2}^q)⟩, fixing Σ pointwise.
    pub fn sigma() -> Self {
        Collineation { shift: 1, frob: 1 }
    }

    pub fn sigma_power(m: usize) -> Self {
        Collineation { shift: m, frob: m }
    }

    pub fn then(self, other: Collineation) -> Self {
        Collineation {
            shift: self.shift + other.shift,
            frob: self.frob + other.frob,
        }
    }

    pub fn apply_point(&self, ctx: &FieldCtx, x: &[Felt]) -> Vec<Felt> {
        let n = x.len();
        let mut y = vec![Felt::ZERO; n];
        for (j, &v) in x.iter().enumerate() {
            y[(j + self.shift) % n] = ctx.frob_q(v, self.frob % ctx.n());
        }
        y
    }

    // Σ h_i x_i = 0 maps to Σ h_i^{q^f} y_{i+s} = 0: the same rule as points.
    fn apply_equation(&self, ctx: &FieldCtx, h: &[Felt]) -> Vec<Felt> {
        self.apply_point(ctx, h)
    }
}

pub fn apply_sigma(s: &ProjSubspace, m: usize) -> ProjSubspace {
    s.apply(Collineation::sigma_power(m))
}

/// P_u as a coordinate vector.
pub fn sigma_point(ctx: &FieldCtx, u: Felt) -> Vec<Felt> {
    (0..ctx.n()).map(|i| ctx.frob_q(u, i)).collect()
}

fn check_k(ctx: &FieldCtx, k: usize) -> Result<()> {
    let n = ctx.n();
    if k == 0 || k >= n || gcd(k as u64, n as u64) != 1 {
        return Err(Error::BadK {
            k: k as u64,
            reason: format!("need 1 <= k < {n} and gcd(k, {n}) = 1"),
        });
    }
    Ok(())
}

/// Γ_k: x_0 = 0, x_k + x_{t−k} − x_{t+k} + x_{n−k} = 0.
pub fn gamma_k(ctx: &Arc<FieldCtx>, k: usize) -> Result<ProjSubspace> {
    check_k(ctx, k)?;
    let (n, t) = (ctx.n(), ctx.t());
    let mut e0 = vec![Felt::ZERO; n];
    e0[0] = Felt::ONE;
    let mut e1 = vec![Felt::ZERO; n];
    let one = Felt::ONE;
    let minus = ctx.neg(one);
    for (i, c) in [(k, one), (t + n - k, one), (t + k, minus), (n - k, one)] {
        let i = i % n;
        e1[i] = ctx.add(e1[i], c);
    }
    ProjSubspace::from_equations(ctx, vec![e0, e1])
}

/// The least k with dim(S ∩ S^τ ∩ … ∩ S^{τ^k}) > n − 3 − 2k, τ = σ^sigma_power.
pub fn intn(s: &ProjSubspace, sigma_power: usize) -> Result<usize> {
    if !s.disjoint_from_sigma() {
        return Err(Error::NotDisjointFromSigma);
    }
    let n = s.ctx().n() as i64;
    let mut cur = s.clone();
    let mut img = s.clone();
    let mut k = 0usize;
    loop {
        if cur.dim() > n - 3 - 2 * k as i64 {
            return Ok(k);
        }
        k += 1;
        img = apply_sigma(&img, sigma_power);
        cur = cur.intersect(&img);
    }
}

/// Project Σ from Γ onto the coordinate line ⟨e_a, e_b⟩. Points come out as
/// ⟨(x_a, x_b)⟩.
pub fn project_onto(gamma: &ProjSubspace, a: usize, b: usize) -> Result<PointSet> {
    let ctx = gamma.ctx();
    let n = ctx.n();
    if gamma.dim() != n as i64 - 3 || a >= n || b >= n || a == b {
        return Err(Error::BadParams(
            "projection needs an (n−3)-space and a coordinate line".into(),
        ));
    }
    let eqs = gamma.equations();
    let polys = gamma.equation_polys();
    let points: Option<Vec<ProjPoint>> = (1..ctx.order())
        .into_par_iter()
        .map(|h| {
            let u = ctx.element(h);
            let (v1, v2) = (polys[0].eval(u), polys[1].eval(u));
            // the hyperplane ⟨Γ, P_u⟩ is v2·e1 − v1·e2
            let coef = |i: usize| ctx.sub(ctx.mul(v2, eqs[0][i]), ctx.mul(v1, eqs[1][i]));
            let (ha, hb) = (coef(a), coef(b));
            ProjPoint::new(ctx, hb, ctx.neg(ha))
        })
        .collect();
    points
        .map(PointSet::from_points)
        .ok_or_else(|| Error::BadParams("some ⟨Γ, P_u⟩ contains the line".into()))
}

/// Project Σ from Γ onto ℓ: x_j = 0 for j ∉ {0, n−k}. For Γ = Γ_k this is L_{2ψ^(k)}.
pub fn project_to_line(gamma: &ProjSubspace, k: usize) -> Result<PointSet> {
    check_k(gamma.ctx(), k)?;
    project_onto(gamma, 0, gamma.ctx().n() - k)
}

/// Whether some τ = σ^m, gcd(m, n) = 1, has dim(Γ ∩ Γ^τ) = n − 4.
pub fn pseudoregulus_geometric_test(gamma: &ProjSubspace) -> bool {
    let n = gamma.ctx().n();
    (1..n)
        .filter(|&m| gcd(m as u64, n as u64) == 1)
        .any(|m| gamma.intersect(&apply_sigma(gamma, m)).dim() == n as i64 - 4)
}

/// ⟨P, P^τ, …, P^{τ^{count−1}}⟩ with τ = σ^sigma_power.
pub fn orbit_span(
    ctx: &Arc<FieldCtx>,
    point: &[Felt],
    sigma_power: usize,
    count: usize,
) -> Result<ProjSubspace> {
    let c = Collineation::sigma_power(sigma_power);
    let mut pts = Vec::with_capacity(count);
    let mut cur = point.to_vec();
    for _ in 0..count {
        let next = c.apply_point(ctx, &cur);
        pts.push(std::mem::replace(&mut cur, next));
    }
    ProjSubspace::span(ctx, pts)
}

/// ⟨P, P^σ, …, P^{σ^{n−3}}⟩ for P = e_0: the vertex of a pseudoregulus-type
/// projection.
pub fn pseudoregulus_vertex(ctx: &Arc<FieldCtx>) -> ProjSubspace {
    let mut e0 = vec![Felt::ZERO; ctx.n()];
    e0[0] = Felt::ONE;
    orbit_span(ctx, &e0, 1, ctx.n() - 2).expect("length n")
}
