//! F_q-linear sets L_f = {⟨(x, f(x))⟩ : x ≠ 0} of PG(1, q^n).

mod equivalence;
mod families;

pub use equivalence::{
    lp_type_test, maps_onto, pseudoregulus_test, subspace_equivalent, verify_certificate,
    Certificate, DeltaSweep, EquivalenceMethod, EquivalenceOptions, FamilyMatch,
};
pub use families::{known_family, KnownFamily};

use rayon::prelude::*;

use crate::field::{Felt, FieldCtx};
use crate::linalg;
use crate::linpoly::LinPoly;

/// A point of PG(1, q^n), normalized so its first nonzero coordinate is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    x: Felt,
    y: Felt,
}

impl ProjPoint {
    /// ⟨(a, b)⟩, or `None` for the zero vector.
    pub fn new(ctx: &FieldCtx, a: Felt, b: Felt) -> Option<Self> {
        if !a.is_zero() {
            Some(ProjPoint {
                x: Felt::ONE,
                y: ctx.div(b, a).unwrap(),
            })
        } else if !b.is_zero() {
            Some(ProjPoint {
                x: Felt::ZERO,
                y: Felt::ONE,
            })
        } else {
            None
        }
    }

    pub fn coords(self) -> (Felt, Felt) {
        (self.x, self.y)
    }

    /// Polynomial-basis indices of the normalized coordinates.
    pub fn to_indices(self, ctx: &FieldCtx) -> (u64, u64) {
        (ctx.to_index(self.x), ctx.to_index(self.y))
    }
}

/// Points sorted by handle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet(Vec<ProjPoint>);

impl PointSet {
    pub fn from_points<I: IntoIterator<Item = ProjPoint>>(points: I) -> Self {
        let mut v: Vec<ProjPoint> = points.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        PointSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.0.binary_search(p).is_ok()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.0.iter().all(|p| other.contains(p))
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.0
    }

    /// Points as index pairs, sorted.
    pub fn export(&self, ctx: &FieldCtx) -> Vec<(u64, u64)> {
        let mut v: Vec<(u64, u64)> = self.0.iter().map(|p| p.to_indices(ctx)).collect();
        v.sort_unstable();
        v
    }
}

#[derive(Clone, Debug)]
pub struct LinearSet {
    pub poly: LinPoly,
    pub points: PointSet,
}

impl LinearSet {
    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// Whether the set attains (q^n − 1)/(q − 1) points.
    pub fn is_maximum(&self) -> bool {
        let ctx = self.poly.ctx();
        self.size() as u64 == (ctx.order() - 1) / (ctx.q() - 1)
    }
}

pub fn linear_set(f: &LinPoly) -> LinearSet {
    let ctx = f.ctx();
    let counts = f.quotient_counts();
    let points = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(h, _)| ProjPoint {
            x: Felt::ONE,
            y: ctx.element(h as u64),
        });
    LinearSet {
        poly: f.clone(),
        points: PointSet::from_points(points),
    }
}

/// L_f ⊆ L_g by comparing point sets.
pub fn set_inclusion(f: &LinPoly, g: &LinPoly) -> bool {
    let vf = linear_set(f).points;
    let vg = linear_set(g).points;
    vf.is_subset(&vg)
}

/// L_f ⊆ L_g by the Dickson criterion: for every x the q-polynomial
/// F(Y) = f(x)Y − g(Y)x has singular Dickson matrix.
pub fn inclusion_dickson(f: &LinPoly, g: &LinPoly) -> bool {
    let ctx = f.ctx();
    let n = f.n();
    let mut gd = vec![Felt::ZERO; n * n];
    (-g).dickson_into(&mut gd);
    (1..ctx.order())
        .into_par_iter()
        .map_init(
            || vec![Felt::ZERO; n * n],
            |buf, h| {
                let x = ctx.element(h);
                let fx = f.eval(x);
                // D_F[i][j] = D_{−g}[i][j]·x^{q^i}, plus f(x)^{q^i} on the diagonal
                for i in 0..n {
                    let xi = ctx.frob_q(x, i);
                    for j in 0..n {
                        buf[i * n + j] = ctx.mul(gd[i * n + j], xi);
                    }
                    buf[i * n + i] = ctx.add(buf[i * n + i], ctx.frob_q(fx, i));
                }
                linalg::rank_in_place(&**ctx, buf, n, n) < n
            },
        )
        .all(|singular| singular)
}

/// The coefficient identities every pair with L_f = L_g satisfies; a cheap
/// necessary test.
pub fn coefficient_filter(f: &LinPoly, g: &LinPoly) -> bool {
    let ctx = f.ctx();
    let n = f.n();
    let (a, b) = (f.coeffs(), g.coeffs());
    let at = |c: &[Felt], i: usize| c[i % n];
    if a[0] != b[0] {
        return false;
    }
    let two = |c: &[Felt], k: usize| ctx.mul(at(c, k), ctx.frob_q(at(c, n - k), k));
    if (1..n).any(|k| two(a, k) != two(b, k)) {
        return false;
    }
    let three = |c: &[Felt], k: usize| {
        let t1 = ctx.mul(
            ctx.mul(at(c, 1), ctx.frob_q(at(c, k - 1), 1)),
            ctx.frob_q(at(c, n - k), k),
        );
        let t2 = ctx.mul(
            ctx.mul(at(c, k), ctx.frob_q(at(c, n - 1), 1)),
            ctx.frob_q(at(c, n - k + 1), k),
        );
        ctx.add(t1, t2)
    };
    (2..n).all(|k| three(a, k) == three(b, k))
}

#[cfg(test)]
mod tests;
