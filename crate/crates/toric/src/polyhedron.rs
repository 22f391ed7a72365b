//! Exact rational polyhedra in inequality form, Fourier-Motzkin feasibility
//! with witnesses, bounded lattice-point enumeration, polytope vertices and
//! volumes, and extreme rays of generated cones.
//!
//! Everything is dense, exact and deterministic. The LP path is plain
//! Fourier-Motzkin with redundancy pruning; systems with many variables are
//! first shrunk by substituting out equality constraints.

use std::collections::BTreeSet;

use num::{One, Signed, Zero};

use crate::arith::{dot_rat, primitive_direction, rat_sign, to_rat, Int, Rat};
use crate::error::Error;
use crate::matrix::RatMat;

/// A single constraint `<normal, x> >= offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

impl Inequality {
    pub fn new(normal: Vec<Rat>, offset: Rat) -> Self {
        Inequality { normal, offset }
    }

    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        dot_rat(&self.normal, x) >= self.offset
    }

    /// Scales so that (normal, offset) is a primitive integer vector. `None`
    /// for a constant constraint (zero normal); `Some(row)` otherwise.
    fn normalized(&self) -> Option<Vec<Int>> {
        let mut joint = self.normal.clone();
        joint.push(-self.offset.clone());
        primitive_direction(&joint)
    }
}

/// Finitely many inequalities `<normal, x> >= offset` over Q^dim.
#[derive(Clone, Debug)]
pub struct Polyhedron {
    pub dim: usize,
    pub ineqs: Vec<Inequality>,
}

impl Polyhedron {
    pub fn new(dim: usize, ineqs: Vec<Inequality>) -> Self {
        assert!(ineqs.iter().all(|i| i.normal.len() == dim));
        Polyhedron { dim, ineqs }
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.ineqs.iter().all(|i| i.satisfied_by(x))
    }

    /// Exact feasibility over the rationals; the witness satisfies every
    /// inequality exactly.
    pub fn feasible_point(&self) -> Option<Vec<Rat>> {
        let rows: Vec<(Vec<Rat>, Rat)> =
            self.ineqs.iter().map(|i| (i.normal.clone(), i.offset.clone())).collect();
        fm_feasible(self.dim, rows, &(0..self.dim).collect::<Vec<_>>())
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible_point().is_some()
    }

    /// Tight lower/upper bounds of coordinate `coord` over the polyhedron,
    /// via projection. `Err` flags an empty polyhedron; `None` means unbounded
    /// on that side.
    pub fn coord_bounds(&self, coord: usize) -> Result<(Option<Rat>, Option<Rat>), ()> {
        let mut rows: Vec<(Vec<Rat>, Rat)> =
            self.ineqs.iter().map(|i| (i.normal.clone(), i.offset.clone())).collect();
        for j in 0..self.dim {
            if j != coord {
                rows = eliminate(rows, j);
                rows = prune(rows);
            }
        }
        let mut lower: Option<Rat> = None;
        let mut upper: Option<Rat> = None;
        for (normal, offset) in &rows {
            let a = &normal[coord];
            match rat_sign(a) {
                0 => {
                    if offset > &Rat::zero() {
                        return Err(());
                    }
                }
                1 => {
                    let b = offset / a;
                    if lower.as_ref().is_none_or(|l| &b > l) {
                        lower = Some(b);
                    }
                }
                _ => {
                    let b = offset / a;
                    if upper.as_ref().is_none_or(|u| &b < u) {
                        upper = Some(b);
                    }
                }
            }
        }
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if l > u {
                return Err(());
            }
        }
        Ok((lower, upper))
    }

    /// All integer points, in lexicographic order. Errors with the offending
    /// coordinate if the polyhedron is unbounded.
    pub fn lattice_points(&self) -> Result<Vec<Vec<Int>>, Error> {
        if !self.is_feasible() {
            return Ok(Vec::new());
        }
        for c in 0..self.dim {
            match self.coord_bounds(c) {
                Err(()) => return Ok(Vec::new()),
                Ok((lo, hi)) => {
                    if lo.is_none() || hi.is_none() {
                        return Err(Error::Unbounded(c));
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut prefix: Vec<Int> = Vec::new();
        self.enumerate_rec(&mut prefix, &mut out);
        Ok(out)
    }

    fn enumerate_rec(&self, prefix: &mut Vec<Int>, out: &mut Vec<Vec<Int>>) {
        let j = prefix.len();
        if j == self.dim {
            out.push(prefix.clone());
            return;
        }
        // substitute the fixed prefix, then bound coordinate j of the rest
        let reduced = self.substitute_prefix(prefix);
        let Ok((lo, hi)) = reduced.coord_bounds(0) else {
            return;
        };
        let (Some(lo), Some(hi)) = (lo, hi) else {
            return; // unbounded is caught up front; a projection here cannot be
        };
        let mut v = ceil_rat(&lo);
        let stop = floor_rat(&hi);
        while v <= stop {
            prefix.push(v.clone());
            self.enumerate_rec(prefix, out);
            prefix.pop();
            v += 1;
        }
    }

    /// Plugs fixed values for the first coordinates, returning the polyhedron
    /// in the remaining ones.
    fn substitute_prefix(&self, prefix: &[Int]) -> Polyhedron {
        let k = prefix.len();
        let ineqs = self
            .ineqs
            .iter()
            .map(|i| {
                let mut offset = i.offset.clone();
                for (c, v) in prefix.iter().enumerate() {
                    offset -= &i.normal[c] * to_rat(v);
                }
                Inequality::new(i.normal[k..].to_vec(), offset)
            })
            .collect();
        Polyhedron::new(self.dim - k, ineqs)
    }

    /// Vertices of a bounded polyhedron, deduplicated, in lexicographic order.
    pub fn vertices(&self) -> Vec<Vec<Rat>> {
        let n = self.dim;
        let m = self.ineqs.len();
        let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
        let mut verts: Vec<Vec<Rat>> = Vec::new();
        let mut subset: Vec<usize> = Vec::new();
        self.vertex_rec(0, n, m, &mut subset, &mut seen, &mut verts);
        verts.sort();
        verts
    }

    fn vertex_rec(
        &self,
        start: usize,
        n: usize,
        m: usize,
        subset: &mut Vec<usize>,
        seen: &mut BTreeSet<Vec<String>>,
        verts: &mut Vec<Vec<Rat>>,
    ) {
        if subset.len() == n {
            let a = RatMat::from_rows(subset.iter().map(|&i| self.ineqs[i].normal.clone()).collect());
            let b: Vec<Rat> = subset.iter().map(|&i| self.ineqs[i].offset.clone()).collect();
            if let Some((x, true)) = a.solve(&b) {
                if self.contains(&x) {
                    let key: Vec<String> = x.iter().map(|r| r.to_string()).collect();
                    if seen.insert(key) {
                        verts.push(x);
                    }
                }
            }
            return;
        }
        for i in start..m {
            subset.push(i);
            self.vertex_rec(i + 1, n, m, subset, seen, verts);
            subset.pop();
        }
    }

    /// n! times the Euclidean volume, exactly, via a triangulation fanned out
    /// from the lexicographically least vertex of every face.
    pub fn volume_times_factorial(&self) -> Rat {
        let verts = self.vertices();
        if verts.is_empty() {
            return Rat::zero();
        }
        if affine_rank(&verts) < self.dim {
            return Rat::zero();
        }
        let simplices = self.triangulate(&verts);
        let mut total = Rat::zero();
        for s in simplices {
            let v0 = &s[0];
            let rows: Vec<Vec<Rat>> = s[1..]
                .iter()
                .map(|v| v.iter().zip(v0).map(|(a, b)| a - b).collect())
                .collect();
            total += RatMat::from_rows(rows).det().abs();
        }
        total
    }

    /// Lex triangulation of the face poset: every full-dimensional simplex
    /// contains the lex-least vertex of each face it was fanned from.
    fn triangulate(&self, verts: &[Vec<Rat>]) -> Vec<Vec<Vec<Rat>>> {
        let all: Vec<usize> = (0..verts.len()).collect();
        let mut out = Vec::new();
        self.triangulate_face(verts, &all, self.dim, &mut Vec::new(), &mut out);
        out
    }

    fn triangulate_face(
        &self,
        verts: &[Vec<Rat>],
        face: &[usize],
        dim: usize,
        apexes: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<Rat>>>,
    ) {
        if face.len() == dim + 1 {
            let mut simplex: Vec<Vec<Rat>> = apexes.iter().map(|&i| verts[i].clone()).collect();
            simplex.extend(face.iter().map(|&i| verts[i].clone()));
            out.push(simplex);
            return;
        }
        let v0 = *face.iter().min_by_key(|&&i| &verts[i]).unwrap();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        for ineq in &self.ineqs {
            let sub: Vec<usize> = face
                .iter()
                .copied()
                .filter(|&i| dot_rat(&ineq.normal, &verts[i]) == ineq.offset)
                .collect();
            if sub.len() == face.len() || sub.contains(&v0) || sub.is_empty() {
                continue;
            }
            let pts: Vec<Vec<Rat>> = sub.iter().map(|&i| verts[i].clone()).collect();
            if affine_rank(&pts) != dim - 1 || !seen.insert(sub.clone()) {
                continue;
            }
            apexes.push(v0);
            self.triangulate_face(verts, &sub, dim - 1, apexes, out);
            apexes.pop();
        }
    }
}

pub fn ceil_rat(x: &Rat) -> Int {
    x.ceil().to_integer()
}

pub fn floor_rat(x: &Rat) -> Int {
    x.floor().to_integer()
}

/// Dimension of the affine hull of a point set (0 for a single point).
pub fn affine_rank(points: &[Vec<Rat>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    let rows: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    RatMat::from_rows(rows).rank()
}

/// Eliminates variable `j` (Fourier-Motzkin step). Rows keep full width; the
/// eliminated column becomes zero.
fn eliminate(rows: Vec<(Vec<Rat>, Rat)>, j: usize) -> Vec<(Vec<Rat>, Rat)> {
    let mut lower = Vec::new(); // coefficient > 0
    let mut upper = Vec::new(); // coefficient < 0
    let mut rest = Vec::new();
    for row in rows {
        match rat_sign(&row.0[j]) {
            1 => lower.push(row),
            -1 => upper.push(row),
            _ => rest.push(row),
        }
    }
    for (ln, lo) in &lower {
        for (un, uo) in &upper {
            // (−u_j)·L + l_j·U has zero j-coefficient; both multipliers > 0
            let a = -&un[j];
            let b = ln[j].clone();
            let normal: Vec<Rat> =
                ln.iter().zip(un).map(|(l, u)| l * &a + u * &b).collect();
            let offset = lo * &a + uo * &b;
            rest.push((normal, offset));
        }
    }
    rest
}

/// Drops duplicate rows (after primitive scaling), keeps only the strongest
/// offset per normal direction, and drops trivially true constant rows.
fn prune(rows: Vec<(Vec<Rat>, Rat)>) -> Vec<(Vec<Rat>, Rat)> {
    let mut seen: BTreeSet<Vec<Int>> = BTreeSet::new();
    let mut out = Vec::new();
    for (normal, offset) in rows {
        if normal.iter().all(Zero::is_zero) {
            if offset > Rat::zero() {
                // keep one witness of infeasibility
                if seen.insert(vec![Int::zero()]) {
                    out.push((normal, offset));
                }
            }
            continue;
        }
        let ineq = Inequality::new(normal.clone(), offset.clone());
        let key = ineq.normalized().expect("nonzero normal");
        if seen.insert(key) {
            out.push((normal, offset));
        }
    }
    out
}

/// Core Fourier-Motzkin feasibility with witness reconstruction. `order`
/// lists which variables to eliminate.
fn fm_feasible(dim: usize, rows: Vec<(Vec<Rat>, Rat)>, order: &[usize]) -> Option<Vec<Rat>> {
    let mut stages: Vec<(usize, Vec<(Vec<Rat>, Rat)>)> = Vec::new();
    let mut current = prune(rows);
    for &j in order {
        stages.push((j, current.clone()));
        current = prune(eliminate(current, j));
    }
    // all variables in `order` eliminated: remaining rows must be constant-true
    for (normal, offset) in &current {
        debug_assert!(order.iter().all(|&j| normal[j].is_zero()));
        if normal.iter().all(Zero::is_zero) && offset > &Rat::zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); dim];
    for (j, system) in stages.iter().rev() {
        let mut lower: Option<Rat> = None;
        let mut upper: Option<Rat> = None;
        for (normal, offset) in system {
            let a = &normal[*j];
            if a.is_zero() {
                continue;
            }
            let mut rhs = offset.clone();
            for (c, coef) in normal.iter().enumerate() {
                if c != *j {
                    rhs -= coef * &x[c];
                }
            }
            let bound = &rhs / a;
            if a.is_positive() {
                if lower.as_ref().is_none_or(|l| &bound > l) {
                    lower = Some(bound);
                }
            } else if upper.as_ref().is_none_or(|u| &bound < u) {
                upper = Some(bound);
            }
        }
        x[*j] = match (lower, upper) {
            (Some(l), _) => l,
            (None, Some(u)) => u,
            (None, None) => Rat::zero(),
        };
    }
    Some(x)
}

/// Feasibility of {x : eq_i . x = rhs_i, ineqs} with the equalities
/// substituted out by Gaussian elimination before Fourier-Motzkin runs.
pub fn feasible_with_equalities(
    dim: usize,
    equalities: &[(Vec<Rat>, Rat)],
    ineqs: &[Inequality],
) -> Option<Vec<Rat>> {
    if equalities.is_empty() {
        return Polyhedron::new(dim, ineqs.to_vec()).feasible_point();
    }
    let mut aug = RatMat::zero(equalities.len(), dim + 1);
    for (i, (normal, rhs)) in equalities.iter().enumerate() {
        for j in 0..dim {
            *aug.at_mut(i, j) = normal[j].clone();
        }
        *aug.at_mut(i, dim) = rhs.clone();
    }
    let pivots = aug.rref();
    if pivots.last() == Some(&dim) {
        return None; // 0 = 1
    }
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    // x_pivot = particular + sum over free of coef * x_free
    let expand = |y: &[Rat]| -> Vec<Rat> {
        let mut x = vec![Rat::zero(); dim];
        for (fi, &f) in free.iter().enumerate() {
            x[f] = y[fi].clone();
        }
        for (r, &p) in pivots.iter().enumerate() {
            let mut v = aug.at(r, dim).clone();
            for (fi, &f) in free.iter().enumerate() {
                v -= aug.at(r, f) * &y[fi];
            }
            x[p] = v;
        }
        x
    };
    let reduced: Vec<Inequality> = ineqs
        .iter()
        .map(|i| {
            // rewrite <normal, x> >= offset in the free coordinates
            let mut offset = i.offset.clone();
            let mut coefs = vec![Rat::zero(); free.len()];
            for (fi, &f) in free.iter().enumerate() {
                coefs[fi] = i.normal[f].clone();
            }
            for (r, &p) in pivots.iter().enumerate() {
                let c = &i.normal[p];
                if c.is_zero() {
                    continue;
                }
                offset -= c * aug.at(r, dim);
                for (fi, &f) in free.iter().enumerate() {
                    coefs[fi] -= c * aug.at(r, f);
                }
            }
            Inequality::new(coefs, offset)
        })
        .collect();
    let y = Polyhedron::new(free.len(), reduced).feasible_point()?;
    Some(expand(&y))
}

/// Indices of the generators spanning extreme rays of the generated cone.
/// Duplicate directions keep their first occurrence; zero generators are never
/// extreme. Errors if the cone contains a line.
pub fn extreme_ray_indices(generators: &[Vec<Rat>]) -> Result<Vec<usize>, Error> {
    let dim = generators.first().map_or(0, Vec::len);
    let nonzero: Vec<usize> = (0..generators.len())
        .filter(|&i| !generators[i].iter().all(Zero::is_zero))
        .collect();
    if nonzero.is_empty() {
        return Ok(Vec::new());
    }
    // a line exists iff 0 is a nontrivial nonnegative combination
    {
        let k = nonzero.len();
        let mut eqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
        for c in 0..dim {
            let row: Vec<Rat> = nonzero.iter().map(|&i| generators[i][c].clone()).collect();
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
        if feasible_with_equalities(k, &eqs, &ineqs).is_some() {
            return Err(Error::NotStronglyConvex);
        }
    }
    // one representative per direction
    let mut reps: Vec<usize> = Vec::new();
    let mut dirs: BTreeSet<Vec<Int>> = BTreeSet::new();
    for &i in &nonzero {
        let d = primitive_direction(&generators[i]).expect("nonzero");
        if dirs.insert(d) {
            reps.push(i);
        }
    }
    let mut extreme = Vec::new();
    for (ri, &i) in reps.iter().enumerate() {
        let others: Vec<usize> =
            reps.iter().enumerate().filter(|&(rj, _)| rj != ri).map(|(_, &j)| j).collect();
        if others.is_empty() {
            extreme.push(i);
            continue;
        }
        if !in_cone_of(&generators[i], &others.iter().map(|&j| generators[j].clone()).collect::<Vec<_>>()) {
            extreme.push(i);
        }
    }
    extreme.sort_unstable();
    Ok(extreme)
}

/// Is `target` a nonnegative combination of `gens`?
pub fn in_cone_of(target: &[Rat], gens: &[Vec<Rat>]) -> bool {
    let k = gens.len();
    if k == 0 {
        return target.iter().all(Zero::is_zero);
    }
    let dim = target.len();
    let mut eqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for c in 0..dim {
        let row: Vec<Rat> = gens.iter().map(|g| g[c].clone()).collect();
        eqs.push((row, target[c].clone()));
    }
    let ineqs: Vec<Inequality> = (0..k)
        .map(|i| {
            let mut n = vec![Rat::zero(); k];
            n[i] = Rat::one();
            Inequality::new(n, Rat::zero())
        })
        .collect();
    feasible_with_equalities(k, &eqs, &ineqs).is_some()
}

/// Convenience: the product of (hi - lo + 1) over all coordinates, used to
/// guard brute-force enumerations.
pub fn bounding_box_volume(p: &Polyhedron) -> Result<Int, Error> {
    let mut vol = Int::one();
    for c in 0..p.dim {
        match p.coord_bounds(c) {
            Err(()) => return Ok(Int::zero()),
            Ok((Some(lo), Some(hi))) => {
                let width: Int = floor_rat(&hi) - ceil_rat(&lo) + 1;
                if width.is_negative() {
                    return Ok(Int::zero());
                }
                vol *= width;
            }
            Ok(_) => return Err(Error::Unbounded(c)),
        }
    }
    Ok(vol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, int_vec, rat_int, rat_vec};
    use proptest::prelude::*;

    fn ineq(normal: &[i64], offset: i64) -> Inequality {
        Inequality::new(rat_vec(normal), rat_int(offset))
    }

    #[test]
    fn contradictory_half_lines_are_infeasible() {
        let p = Polyhedron::new(1, vec![ineq(&[1], 1), ineq(&[-1], 0)]);
        assert!(p.feasible_point().is_none());
    }

    #[test]
    fn simplex_feasible_with_origin_witness() {
        let p = Polyhedron::new(
            2,
            vec![ineq(&[1, 0], 0), ineq(&[0, 1], 0), ineq(&[-1, -1], -1)],
        );
        let w = p.feasible_point().unwrap();
        assert!(p.contains(&w));
        assert_eq!(w, rat_vec(&[0, 0]));
    }

    #[test]
    fn unit_square_lattice_points() {
        let p = Polyhedron::new(
            2,
            vec![ineq(&[1, 0], 0), ineq(&[0, 1], 0), ineq(&[-1, 0], -1), ineq(&[0, -1], -1)],
        );
        let pts = p.lattice_points().unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], int_vec(&[0, 0])); // lexicographic order
        assert_eq!(pts[3], int_vec(&[1, 1]));
    }

    #[test]
    fn standard_triangle_has_three_points() {
        // conv{(0,0),(1,0),(0,1)}
        let p = Polyhedron::new(
            2,
            vec![ineq(&[1, 0], 0), ineq(&[0, 1], 0), ineq(&[-1, -1], -1)],
        );
        assert_eq!(p.lattice_points().unwrap().len(), 3);
    }

    #[test]
    fn stretched_triangle_has_four_points() {
        // conv{(0,0),(2,0),(0,1)}: x >= 0, y >= 0, x + 2y <= 2
        let p = Polyhedron::new(
            2,
            vec![ineq(&[1, 0], 0), ineq(&[0, 1], 0), ineq(&[-1, -2], -2)],
        );
        let pts = p.lattice_points().unwrap();
        assert_eq!(pts, brute_force(&p));
        assert_eq!(pts.len(), 4);
    }

    #[test]
    fn unbounded_is_reported() {
        let p = Polyhedron::new(2, vec![ineq(&[1, 0], 0), ineq(&[0, 1], 0)]);
        assert!(matches!(p.lattice_points(), Err(Error::Unbounded(0))));
    }

    #[test]
    fn extreme_rays_drop_interior_generator() {
        let gens = vec![rat_vec(&[1, 0]), rat_vec(&[1, 1]), rat_vec(&[0, 1])];
        assert_eq!(extreme_ray_indices(&gens).unwrap(), vec![0, 2]);
        let single = vec![rat_vec(&[2, 3])];
        assert_eq!(extreme_ray_indices(&single).unwrap(), vec![0]);
    }

    #[test]
    fn extreme_rays_reject_lines() {
        let gens = vec![rat_vec(&[1, 0]), rat_vec(&[-1, 0]), rat_vec(&[0, 1])];
        assert!(matches!(extreme_ray_indices(&gens), Err(Error::NotStronglyConvex)));
    }

    #[test]
    fn extreme_rays_keep_one_duplicate() {
        let gens = vec![rat_vec(&[1, 0]), rat_vec(&[2, 0]), rat_vec(&[0, 1])];
        assert_eq!(extreme_ray_indices(&gens).unwrap(), vec![0, 2]);
    }

    #[test]
    fn triangle_volume() {
        // conv{(0,0),(2,0),(0,1)}: 2! * area = 2
        let p = Polyhedron::new(
            2,
            vec![ineq(&[1, 0], 0), ineq(&[0, 1], 0), ineq(&[-1, -2], -2)],
        );
        assert_eq!(p.volume_times_factorial(), rat_int(2));
    }

    #[test]
    fn vertex_enumeration() {
        let p = Polyhedron::new(
            2,
            vec![ineq(&[1, 0], 0), ineq(&[0, 1], 0), ineq(&[-1, -2], -2)],
        );
        let v = p.vertices();
        assert_eq!(v, vec![rat_vec(&[0, 0]), rat_vec(&[0, 1]), rat_vec(&[2, 0])]);
    }

    fn brute_force(p: &Polyhedron) -> Vec<Vec<Int>> {
        // independent oracle: scan the bounding box
        let mut ranges = Vec::new();
        for c in 0..p.dim {
            let Ok((lo, hi)) = p.coord_bounds(c) else {
                return Vec::new(); // empty polyhedron
            };
            ranges.push((ceil_rat(&lo.unwrap()), floor_rat(&hi.unwrap())));
        }
        let mut out = Vec::new();
        let mut point = vec![Int::zero(); p.dim];
        fn rec(
            p: &Polyhedron,
            ranges: &[(Int, Int)],
            c: usize,
            point: &mut Vec<Int>,
            out: &mut Vec<Vec<Int>>,
        ) {
            if c == p.dim {
                let x: Vec<Rat> = point.iter().map(to_rat).collect();
                if p.contains(&x) {
                    out.push(point.clone());
                }
                return;
            }
            let mut v = ranges[c].0.clone();
            while v <= ranges[c].1 {
                point[c] = v.clone();
                rec(p, ranges, c + 1, point, out);
                v += 1;
            }
        }
        rec(p, &ranges, 0, &mut point, &mut out);
        out
    }

    proptest! {
        // random small polytopes: enumeration agrees with the bounding-box oracle
        #[test]
        fn lattice_points_match_brute_force(coeffs in prop::collection::vec(-3i64..=3, 12),
                                            bounds in prop::collection::vec(0i64..=4, 4)) {
            let mut ineqs = vec![
                ineq(&[1, 0], -bounds[0]), ineq(&[0, 1], -bounds[1]),
                ineq(&[-1, 0], -bounds[2]), ineq(&[0, -1], -bounds[3]),
            ];
            for ch in coeffs.chunks(3) {
                ineqs.push(ineq(&[ch[0], ch[1]], ch[2]));
            }
            let p = Polyhedron::new(2, ineqs);
            match bounding_box_volume(&p) {
                Ok(vol) if vol <= int(10_000) => {
                    prop_assert_eq!(p.lattice_points().unwrap(), brute_force(&p));
                }
                Ok(_) => {}
                Err(_) => {
                    // unbounded bounding box: enumeration must refuse too
                    prop_assert!(p.lattice_points().is_err() || !p.is_feasible());
                }
            }
        }

        // feasibility witnesses re-satisfy every inequality exactly
        #[test]
        fn witness_recheck(coeffs in prop::collection::vec(-4i64..=4, 15)) {
            let ineqs: Vec<Inequality> =
                coeffs.chunks(3).map(|ch| ineq(&[ch[0], ch[1]], ch[2])).collect();
            let p = Polyhedron::new(2, ineqs);
            if let Some(w) = p.feasible_point() {
                prop_assert!(p.contains(&w));
            }
        }

        // removing an extreme generator changes the cone; non-extreme ones are
        // recovered as combinations of the extreme set
        #[test]
        fn extreme_rays_minimality(raw in prop::collection::vec((-3i64..=3, -3i64..=3), 1..6)) {
            let gens: Vec<Vec<Rat>> = raw.iter().map(|&(a, b)| rat_vec(&[a, b])).collect();
            match extreme_ray_indices(&gens) {
                Err(_) => {}
                Ok(ext) => {
                    let ext_gens: Vec<Vec<Rat>> =
                        ext.iter().map(|&i| gens[i].clone()).collect();
                    for (i, g) in gens.iter().enumerate() {
                        if g.iter().all(Zero::is_zero) { continue; }
                        if !ext.contains(&i) {
                            prop_assert!(in_cone_of(g, &ext_gens));
                        }
                    }
                    for (k, &i) in ext.iter().enumerate() {
                        let without: Vec<Vec<Rat>> = ext.iter().enumerate()
                            .filter(|&(j, _)| j != k)
                            .map(|(_, &j)| gens[j].clone()).collect();
                        prop_assert!(!in_cone_of(&gens[i], &without));
                    }
                }
            }
        }
    }
}
