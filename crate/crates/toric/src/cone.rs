//! Inequality descriptions of finitely generated cones and the face machinery
//! used to validate fans: facet enumeration inside the linear span, membership,
//! minimal faces, and relative-interior points of intersections.
//!
//! Facets are found by brute force over generator subsets, which is exact and
//! entirely adequate for cones with a handful of generators.

use std::collections::BTreeSet;

use num::{One, Zero};

use crate::arith::{dot_rat, primitive_direction, rat_sign, to_rat_vec, Int, Rat};
use crate::error::Error;
use crate::matrix::RatMat;
use crate::polyhedron::{feasible_with_equalities, Inequality};

/// H-form of a pointed cone: linear span equalities plus facet inequalities.
#[derive(Clone, Debug)]
pub struct ConeGeometry {
    pub gens: Vec<Vec<Int>>,
    pub dim: usize,
    /// rank of the linear span
    pub rank: usize,
    /// <w, x> = 0 for all x in the span
    pub span_normals: Vec<Vec<Int>>,
    pub facets: Vec<Facet>,
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// primitive; nonnegative on every generator, zero exactly on the facet
    pub normal: Vec<Int>,
    /// generator indices lying on the facet
    pub tight_gens: Vec<usize>,
}

/// Does the cone generated by `gens` contain a line? (0 as a nontrivial
/// nonnegative combination.)
pub fn cone_contains_line(gens: &[Vec<Int>]) -> bool {
    let k = gens.len();
    if k == 0 {
        return false;
    }
    let dim = gens[0].len();
    let mut eqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for c in 0..dim {
        let row: Vec<Rat> = gens.iter().map(|g| to_rat_vec(g)[c].clone()).collect();
        eqs.push((row, Rat::zero()));
    }
    let mut ineqs: Vec<Inequality> = (0..k)
        .map(|i| {
            let mut n = vec![Rat::zero(); k];
            n[i] = Rat::one();
            Inequality::new(n, Rat::zero())
        })
        .collect();
    ineqs.push(Inequality::new(vec![Rat::one(); k], Rat::one()));
    feasible_with_equalities(k, &eqs, &ineqs).is_some()
}

impl ConeGeometry {
    /// Builds the H-form. The cone must be strongly convex.
    pub fn new(gens: Vec<Vec<Int>>, dim: usize) -> Result<Self, Error> {
        assert!(gens.iter().all(|g| g.len() == dim));
        if cone_contains_line(&gens) {
            return Err(Error::NotStronglyConvex);
        }
        let rat_gens: Vec<Vec<Rat>> = gens.iter().map(|g| to_rat_vec(g)).collect();
        let g_mat = if gens.is_empty() {
            RatMat::zero(0, dim)
        } else {
            RatMat::from_rows(rat_gens.clone())
        };
        let rank = g_mat.rank();
        let span_normals: Vec<Vec<Int>> = g_mat
            .kernel()
            .iter()
            .map(|w| primitive_direction(w).expect("kernel basis vector is nonzero"))
            .collect();

        let mut facets: Vec<Facet> = Vec::new();
        let mut seen: BTreeSet<Vec<Int>> = BTreeSet::new();
        if rank > 0 {
            let k = gens.len();
            let mut subset = Vec::new();
            enumerate_subsets(k, rank - 1, 0, &mut subset, &mut |s: &[usize]| {
                // normal candidates: in the span, orthogonal to the subset
                let mut rows: Vec<Vec<Rat>> =
                    span_normals.iter().map(|w| to_rat_vec(w)).collect();
                for &i in s {
                    rows.push(rat_gens[i].clone());
                }
                let kernel = RatMat::from_rows_or_empty(rows, dim).kernel();
                if kernel.len() != 1 {
                    return;
                }
                let mut normal = primitive_direction(&kernel[0]).expect("nonzero");
                let mut pos = false;
                let mut neg = false;
                for g in &gens {
                    match crate::arith::dot_int(&normal, g).sign() {
                        num::bigint::Sign::Plus => pos = true,
                        num::bigint::Sign::Minus => neg = true,
                        num::bigint::Sign::NoSign => {}
                    }
                }
                if pos && neg {
                    return;
                }
                if neg {
                    for c in normal.iter_mut() {
                        *c = -std::mem::take(c);
                    }
                }
                if !pos && !neg {
                    return; // orthogonal to the whole cone: not a facet
                }
                if seen.insert(normal.clone()) {
                    let tight_gens = (0..k)
                        .filter(|&i| crate::arith::dot_int(&normal, &gens[i]).is_zero())
                        .collect();
                    facets.push(Facet { normal, tight_gens });
                }
            });
        }
        facets.sort_by(|a, b| a.normal.cmp(&b.normal));
        Ok(ConeGeometry { gens, dim, rank, span_normals, facets })
    }

    pub fn contains_rat(&self, x: &[Rat]) -> bool {
        for w in &self.span_normals {
            if !dot_rat(&to_rat_vec(w), x).is_zero() {
                return false;
            }
        }
        self.facets.iter().all(|f| rat_sign(&dot_rat(&to_rat_vec(&f.normal), x)) >= 0)
    }

    pub fn contains_int(&self, x: &[Int]) -> bool {
        self.contains_rat(&to_rat_vec(x))
    }

    /// Indices of facets tight at `x`; `x` must lie in the cone.
    pub fn tight_facets_at(&self, x: &[Rat]) -> Vec<usize> {
        debug_assert!(self.contains_rat(x));
        (0..self.facets.len())
            .filter(|&i| dot_rat(&to_rat_vec(&self.facets[i].normal), x).is_zero())
            .collect()
    }

    /// Homogeneous constraint system of the full cone.
    pub fn system(&self) -> HomogeneousSystem {
        HomogeneousSystem {
            dim: self.dim,
            equalities: self.span_normals.iter().map(|w| to_rat_vec(w)).collect(),
            ineqs: self.facets.iter().map(|f| to_rat_vec(&f.normal)).collect(),
        }
    }

    /// System of the face obtained by tightening the given facets.
    pub fn face_system(&self, tight: &[usize]) -> HomogeneousSystem {
        let mut sys = self.system();
        // move tight facet normals into the equality block
        let mut keep = Vec::new();
        for (i, row) in sys.ineqs.drain(..).enumerate() {
            if tight.contains(&i) {
                sys.equalities.push(row);
            } else {
                keep.push(row);
            }
        }
        sys.ineqs = keep;
        sys
    }
}

fn enumerate_subsets(
    n: usize,
    size: usize,
    start: usize,
    current: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if current.len() == size {
        f(current);
        return;
    }
    for i in start..n {
        current.push(i);
        enumerate_subsets(n, size, i + 1, current, f);
        current.pop();
    }
}

/// A homogeneous system {x : E x = 0, A x >= 0} describing a cone (typically a
/// face or an intersection of fan cones).
#[derive(Clone, Debug)]
pub struct HomogeneousSystem {
    pub dim: usize,
    pub equalities: Vec<Vec<Rat>>,
    pub ineqs: Vec<Vec<Rat>>,
}

impl HomogeneousSystem {
    pub fn intersection(&self, other: &HomogeneousSystem) -> HomogeneousSystem {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        out.equalities.extend(other.equalities.iter().cloned());
        out.ineqs.extend(other.ineqs.iter().cloned());
        out
    }

    fn eq_pairs(&self) -> Vec<(Vec<Rat>, Rat)> {
        self.equalities.iter().map(|e| (e.clone(), Rat::zero())).collect()
    }

    fn base_ineqs(&self) -> Vec<Inequality> {
        self.ineqs.iter().map(|n| Inequality::new(n.clone(), Rat::zero())).collect()
    }

    /// Can the constraint `<c, x> >= 1` be met within the system? (Scale
    /// invariance makes this the strict-positivity test.)
    pub fn feasible_with_strict(&self, c: &[Rat]) -> Option<Vec<Rat>> {
        let mut ineqs = self.base_ineqs();
        ineqs.push(Inequality::new(c.to_vec(), Rat::one()));
        feasible_with_equalities(self.dim, &self.eq_pairs(), &ineqs)
    }

    /// A point in the relative interior (the zero vector when the cone is {0}).
    pub fn relative_interior_point(&self) -> Vec<Rat> {
        let mut point = vec![Rat::zero(); self.dim];
        for i in 0..self.ineqs.len() {
            let c = self.ineqs[i].clone();
            if let Some(w) = self.feasible_with_strict(&c) {
                for (p, v) in point.iter_mut().zip(&w) {
                    *p += v;
                }
            }
        }
        point
    }

    /// Is every point of this system contained in `other`?
    pub fn is_subset_of(&self, other: &HomogeneousSystem) -> bool {
        for e in &other.equalities {
            let neg: Vec<Rat> = e.iter().map(|v| -v.clone()).collect();
            if self.feasible_with_strict(e).is_some() || self.feasible_with_strict(&neg).is_some()
            {
                return false;
            }
        }
        for n in &other.ineqs {
            let neg: Vec<Rat> = n.iter().map(|v| -v.clone()).collect();
            if self.feasible_with_strict(&neg).is_some() {
                return false;
            }
        }
        true
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.equalities.iter().all(|e| dot_rat(e, x).is_zero())
            && self.ineqs.iter().all(|n| rat_sign(&dot_rat(n, x)) >= 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int_vec, rat_vec};

    #[test]
    fn quadrant_hform() {
        let c = ConeGeometry::new(vec![int_vec(&[1, 0]), int_vec(&[0, 1])], 2).unwrap();
        assert_eq!(c.rank, 2);
        assert!(c.span_normals.is_empty());
        assert_eq!(c.facets.len(), 2);
        assert!(c.contains_int(&int_vec(&[3, 5])));
        assert!(!c.contains_int(&int_vec(&[-1, 0])));
    }

    #[test]
    fn ray_hform() {
        let c = ConeGeometry::new(vec![int_vec(&[2, 4])], 2).unwrap();
        assert_eq!(c.rank, 1);
        assert_eq!(c.span_normals.len(), 1);
        assert_eq!(c.facets.len(), 1);
        assert!(c.contains_int(&int_vec(&[1, 2])));
        assert!(!c.contains_int(&int_vec(&[-1, -2])));
        assert!(!c.contains_int(&int_vec(&[1, 1])));
    }

    #[test]
    fn halfplane_is_rejected() {
        let gens = vec![int_vec(&[1, 0]), int_vec(&[-1, 0]), int_vec(&[0, 1])];
        assert!(cone_contains_line(&gens));
        assert!(matches!(ConeGeometry::new(gens, 2), Err(Error::NotStronglyConvex)));
    }

    #[test]
    fn non_simplicial_cone_facets() {
        // cone over a square in R^3
        let gens = vec![
            int_vec(&[1, 0, 1]),
            int_vec(&[0, 1, 1]),
            int_vec(&[-1, 0, 1]),
            int_vec(&[0, -1, 1]),
        ];
        let c = ConeGeometry::new(gens, 3).unwrap();
        assert_eq!(c.rank, 3);
        assert_eq!(c.facets.len(), 4);
        for f in &c.facets {
            assert_eq!(f.tight_gens.len(), 2);
        }
    }

    #[test]
    fn relint_and_subset() {
        let quad = ConeGeometry::new(vec![int_vec(&[1, 0]), int_vec(&[0, 1])], 2).unwrap();
        let narrow = ConeGeometry::new(vec![int_vec(&[1, 1]), int_vec(&[1, 0])], 2).unwrap();
        let x = narrow.system().relative_interior_point();
        assert!(narrow.system().contains(&x));
        assert!(rat_sign(&x[0]) > 0);
        assert!(narrow.system().is_subset_of(&quad.system()));
        assert!(!quad.system().is_subset_of(&narrow.system()));
        // the intersection of the quadrant with the narrow cone is the narrow cone
        let inter = quad.system().intersection(&narrow.system());
        assert!(inter.is_subset_of(&narrow.system()));
        let _ = rat_vec(&[0]);
    }
}
