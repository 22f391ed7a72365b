//! Torus-invariant divisors: support-function data and Cartier indices, the
//! canonical divisor, pullbacks and discrepancies along refinements, divisor
//! polytopes and section counts, pseudo-effectivity, top self-intersection,
//! and the chart-module oracles for global generation and very ampleness of
//! Weil divisors.

use std::collections::{BTreeMap, BTreeSet};

use num::{Integer, One, Signed, Zero};

use crate::arith::{dot_int, dot_rat_int, to_rat, to_rat_vec, Int, Rat};
use crate::error::Error;
use crate::fan::{Fan, RefinementMap};
use crate::matrix::RatMat;
use crate::polyhedron::{feasible_with_equalities, Inequality, Polyhedron};

/// One exact rational coefficient per ray of the parent fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusDivisor {
    pub coefficients: Vec<Rat>,
}

impl TorusDivisor {
    pub fn new(fan: &Fan, coefficients: Vec<Rat>) -> Result<Self, Error> {
        if coefficients.len() != fan.rays().len() {
            return Err(Error::InvalidDivisor(format!(
                "expected {} coefficients, got {}",
                fan.rays().len(),
                coefficients.len()
            )));
        }
        Ok(TorusDivisor { coefficients })
    }

    pub fn zero(fan: &Fan) -> Self {
        TorusDivisor { coefficients: vec![Rat::zero(); fan.rays().len()] }
    }

    /// The prime divisor D_rho.
    pub fn prime(fan: &Fan, ray: usize) -> Self {
        let mut d = Self::zero(fan);
        d.coefficients[ray] = Rat::one();
        d
    }

    pub fn add(&self, other: &TorusDivisor) -> TorusDivisor {
        TorusDivisor {
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &TorusDivisor) -> TorusDivisor {
        TorusDivisor {
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &Rat) -> TorusDivisor {
        TorusDivisor { coefficients: self.coefficients.iter().map(|a| a * k).collect() }
    }

    pub fn neg(&self) -> TorusDivisor {
        TorusDivisor { coefficients: self.coefficients.iter().map(|a| -a).collect() }
    }

    pub fn is_integral(&self) -> bool {
        self.coefficients.iter().all(Rat::is_integer)
    }
}

/// Minus the sum of all torus-invariant prime divisors: coefficient -1 on
/// every ray.
pub fn canonical_divisor(fan: &Fan) -> TorusDivisor {
    TorusDivisor { coefficients: vec![-Rat::one(); fan.rays().len()] }
}

/// div(chi^u): coefficient <u, v_rho> on each ray.
pub fn principal_divisor(fan: &Fan, u: &[Int]) -> TorusDivisor {
    TorusDivisor {
        coefficients: fan.rays().iter().map(|r| to_rat(&dot_int(u, r))).collect(),
    }
}

/// Per-maximal-cone functionals u with <u, v> = -d_v on the cone's rays.
#[derive(Clone, Debug)]
pub struct SupportFunctionData {
    pub per_cone: Vec<Vec<Rat>>,
    /// smallest positive integer m with mD Cartier
    pub cartier_index: Int,
}

impl SupportFunctionData {
    pub fn is_cartier(&self) -> bool {
        self.cartier_index.is_one()
    }

    pub fn evaluate(&self, cone: usize, v: &[Int]) -> Rat {
        dot_rat_int(&self.per_cone[cone], v)
    }
}

/// Solves for the support functional of `d` on the single cone `cone_idx`,
/// without requiring global Q-Cartier-ness.
pub fn local_support(fan: &Fan, d: &TorusDivisor, cone_idx: usize) -> Result<Vec<Rat>, Error> {
    let cone = &fan.max_cones()[cone_idx];
    let rows: Vec<Vec<Rat>> = cone.rays().iter().map(|&r| to_rat_vec(fan.ray(r))).collect();
    let rhs: Vec<Rat> = cone.rays().iter().map(|&r| -&d.coefficients[r]).collect();
    let mat = RatMat::from_rows_or_empty(rows, fan.rank());
    match mat.solve(&rhs) {
        Some((u, _)) => Ok(u),
        None => {
            let desc: Vec<String> =
                cone.rays().iter().map(|&r| format!("{:?}", fan.ray(r))).collect();
            Err(Error::NotQCartier(desc.join(", ")))
        }
    }
}

/// Support-function data on every maximal cone, plus the Cartier index (lcm of
/// the functional denominators). Errors when some cone admits no functional.
pub fn q_cartier_data(fan: &Fan, d: &TorusDivisor) -> Result<SupportFunctionData, Error> {
    fan.require_valid()?;
    let mut per_cone = Vec::new();
    let mut index = Int::one();
    for ci in 0..fan.max_cones().len() {
        let u = local_support(fan, d, ci)?;
        for c in &u {
            index = index.lcm(c.denom());
        }
        per_cone.push(u);
    }
    Ok(SupportFunctionData { per_cone, cartier_index: index })
}

pub fn is_q_cartier(fan: &Fan, d: &TorusDivisor) -> bool {
    q_cartier_data(fan, d).is_ok()
}

pub fn is_cartier(fan: &Fan, d: &TorusDivisor) -> Result<bool, Error> {
    Ok(d.is_integral() && q_cartier_data(fan, d)?.is_cartier())
}

/// Pullback of a Q-Cartier divisor along a refinement: the coefficient on a
/// fine ray is minus the coarse support function evaluated there.
pub fn pullback(map: &RefinementMap, d_coarse: &TorusDivisor) -> Result<TorusDivisor, Error> {
    let data = q_cartier_data(&map.coarse, d_coarse)?;
    let coefficients = map
        .fine
        .rays()
        .iter()
        .enumerate()
        .map(|(ri, r)| -data.evaluate(map.ray_hosts[ri], r))
        .collect();
    Ok(TorusDivisor { coefficients })
}

/// Discrepancies of the exceptional rays: the coefficients of
/// K_fine - f*(K_coarse) there. Crepant means all zero.
pub fn discrepancies(map: &RefinementMap) -> Result<Vec<(usize, Rat)>, Error> {
    let k_coarse = canonical_divisor(&map.coarse);
    let pulled = pullback(map, &k_coarse)?;
    Ok(map
        .exceptional_rays
        .iter()
        .map(|&ri| (ri, -Rat::one() - &pulled.coefficients[ri]))
        .collect())
}

/// P_D = { u in M_Q : <u, v_rho> >= -d_rho for every ray }.
pub fn divisor_polytope(fan: &Fan, d: &TorusDivisor) -> Polyhedron {
    let ineqs = fan
        .rays()
        .iter()
        .zip(&d.coefficients)
        .map(|(r, c)| Inequality::new(to_rat_vec(r), -c.clone()))
        .collect();
    Polyhedron::new(fan.rank(), ineqs)
}

/// Number of lattice points of P_D; for integral D on a complete fan this
/// counts global sections. Errors with `Unbounded` on non-complete fans.
pub fn sections_count(fan: &Fan, d: &TorusDivisor) -> Result<usize, Error> {
    Ok(divisor_polytope(fan, d).lattice_points()?.len())
}

/// Is there an ample divisor at all? Decided by the strict-convexity LP over
/// per-cone functionals. The witness, when it exists, carries an ample
/// Q-divisor.
pub fn projective_witness(fan: &Fan) -> Result<Option<Vec<Vec<Rat>>>, Error> {
    fan.require_valid()?;
    if !fan.is_complete() {
        return Err(Error::NotComplete);
    }
    let n = fan.rank();
    let m = fan.max_cones().len();
    let dim = n * m;
    let mut equalities: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (ri, ray) in fan.rays().iter().enumerate() {
        let containing: Vec<usize> = (0..m)
            .filter(|&ci| fan.max_cones()[ci].rays().contains(&ri))
            .collect();
        for pair in containing.windows(2) {
            let mut row = vec![Rat::zero(); dim];
            for c in 0..n {
                row[pair[0] * n + c] = to_rat(&ray[c]);
                row[pair[1] * n + c] = -to_rat(&ray[c]);
            }
            equalities.push((row, Rat::zero()));
        }
    }
    let mut ineqs = Vec::new();
    for wall in fan.walls()? {
        let Some(right) = wall.right else { continue };
        let lift = fan.wall_lift(wall)?;
        let mut row = vec![Rat::zero(); dim];
        for c in 0..n {
            row[wall.left * n + c] = to_rat(&lift[c]);
            row[right * n + c] = -to_rat(&lift[c]);
        }
        ineqs.push(Inequality::new(row, Rat::one()));
    }
    Ok(feasible_with_equalities(dim, &equalities, &ineqs)
        .map(|x| (0..m).map(|ci| x[ci * n..(ci + 1) * n].to_vec()).collect()))
}

pub fn is_projective(fan: &Fan) -> Result<bool, Error> {
    Ok(projective_witness(fan)?.is_some())
}

/// Pseudo-effectivity of a Q-Cartier divisor on a complete projective-type
/// fan: exactly P_D != {} (the rational polytope is nonempty iff some
/// multiple of D has sections).
pub fn is_pseudo_effective(fan: &Fan, d: &TorusDivisor) -> Result<bool, Error> {
    q_cartier_data(fan, d)?;
    if !is_projective(fan)? {
        return Err(Error::InvalidFan(
            "fan is complete but admits no ample divisor".to_string(),
        ));
    }
    Ok(divisor_polytope(fan, d).is_feasible())
}

/// D ~ D' iff D - D' = div(chi^u) for a lattice functional u; returns that u.
pub fn linearly_equivalent(fan: &Fan, d1: &TorusDivisor, d2: &TorusDivisor) -> Option<Vec<Int>> {
    let rows: Vec<Vec<Rat>> = fan.rays().iter().map(|r| to_rat_vec(r)).collect();
    let rhs: Vec<Rat> = d1
        .coefficients
        .iter()
        .zip(&d2.coefficients)
        .map(|(a, b)| a - b)
        .collect();
    let mat = RatMat::from_rows_or_empty(rows, fan.rank());
    let (u, _) = mat.solve(&rhs)?;
    // the solve gives one solution; linear equivalence needs an integral one
    crate::arith::rat_vec_to_int(&u)
}

/// D^n = n! vol(P_D) for a nef Cartier divisor on a complete fan. D is big
/// iff the result is positive.
pub fn top_self_intersection(fan: &Fan, d: &TorusDivisor) -> Result<Rat, Error> {
    if !fan.is_complete() {
        return Err(Error::NotComplete);
    }
    let data = q_cartier_data(fan, d)?;
    if !d.is_integral() || !data.is_cartier() {
        return Err(Error::NotCartier);
    }
    if !crate::mori::is_nef(fan, d)? {
        return Err(Error::NotNef);
    }
    Ok(divisor_polytope(fan, d).volume_times_factorial())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Yes => write!(f, "yes"),
            Verdict::No => write!(f, "no"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

pub const DEFAULT_SEARCH_BOUND: u64 = 12;

/// Reads TORUS_SEARCH_BOUND, falling back to the default of 12.
pub fn search_bound_from_env() -> u64 {
    std::env::var("TORUS_SEARCH_BOUND")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEARCH_BOUND)
}

fn enumeration_cap(search_bound: u64) -> Int {
    Int::from(20_000u64) * Int::from(search_bound.max(1))
}

/// Hilbert basis of the dual semigroup of a full-dimensional pointed cone.
/// Exact: irreducible elements live in the fundamental parallelepipeds of the
/// full-rank facet-normal subsets. `None` when enumeration would exceed the
/// cap.
fn dual_hilbert_basis(
    fan: &Fan,
    cone_idx: usize,
    cap: &Int,
) -> Result<Option<Vec<Vec<Int>>>, Error> {
    let geom = fan.geometry(cone_idx)?;
    let n = fan.rank();
    let duals: Vec<Vec<Int>> = geom.facets.iter().map(|f| f.normal.clone()).collect();
    let in_dual = |x: &[Int]| -> bool { geom.gens.iter().all(|g| !dot_int(x, g).is_negative()) };
    let height = |x: &[Int]| -> Int { geom.gens.iter().map(|g| dot_int(x, g)).sum() };
    let mut candidates: BTreeSet<Vec<Int>> = BTreeSet::new();
    let mut all_subsets = Vec::new();
    let mut cur = Vec::new();
    subsets(duals.len(), n, 0, &mut cur, &mut all_subsets);
    for s in &all_subsets {
        let rows: Vec<Vec<Rat>> = s.iter().map(|&i| to_rat_vec(&duals[i])).collect();
        let mat = RatMat::from_rows(rows);
        let Some(inv) = mat.inverse() else { continue };
        // {t * U : 0 <= t <= 1} in x-coordinates: t = x * U^{-1}
        let mut ineqs = Vec::new();
        for i in 0..n {
            let col: Vec<Rat> = (0..n).map(|j| inv.at(j, i).clone()).collect();
            ineqs.push(Inequality::new(col.clone(), Rat::zero()));
            ineqs.push(Inequality::new(col.iter().map(|c| -c.clone()).collect(), -Rat::one()));
        }
        let par = Polyhedron::new(n, ineqs);
        if crate::polyhedron::bounding_box_volume(&par)? > *cap {
            return Ok(None);
        }
        for p in par.lattice_points()? {
            if !p.iter().all(Zero::is_zero) {
                candidates.insert(p);
            }
        }
    }
    let mut ordered: Vec<Vec<Int>> = candidates.into_iter().collect();
    ordered.sort_by_key(|x| (height(x), x.clone()));
    let mut basis: Vec<Vec<Int>> = Vec::new();
    'outer: for x in ordered {
        for b in &basis {
            let diff: Vec<Int> = x.iter().zip(b).map(|(a, c)| a - c).collect();
            if diff.iter().all(Zero::is_zero) || in_dual(&diff) {
                continue 'outer; // reducible
            }
        }
        basis.push(x);
    }
    Ok(Some(basis))
}

fn subsets(k: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == size {
        out.push(cur.clone());
        return;
    }
    for i in start..k {
        cur.push(i);
        subsets(k, size, i + 1, cur, out);
        cur.pop();
    }
}

/// Minimal monomial generators of the section module of O(D) on one chart.
/// Exact; `None` when the enumeration would exceed the cap.
fn chart_module_generators(
    fan: &Fan,
    d: &TorusDivisor,
    cone_idx: usize,
    cap: &Int,
) -> Result<Option<Vec<Vec<Int>>>, Error> {
    let n = fan.rank();
    let cone = &fan.max_cones()[cone_idx];
    let geom = fan.geometry(cone_idx)?;
    let Some(hilb) = dual_hilbert_basis(fan, cone_idx, cap)? else {
        return Ok(None);
    };
    let module_ineqs: Vec<Inequality> = cone
        .rays()
        .iter()
        .map(|&r| Inequality::new(to_rat_vec(fan.ray(r)), -d.coefficients[r].clone()))
        .collect();
    let module = Polyhedron::new(n, module_ineqs.clone());
    // generators lie in (vertices of the module polyhedron) + (fundamental
    // zonotope of the dual cone); bound them by the height functional
    // h(x) = <x, sum of rays> + sum of coefficients, which is proper on the
    // module polyhedron
    let ray_sum: Vec<Int> = (0..n)
        .map(|c| cone.rays().iter().map(|&r| fan.ray(r)[c].clone()).sum())
        .collect();
    let offset_sum: Rat = cone.rays().iter().map(|&r| d.coefficients[r].clone()).sum();
    let mut vertex_height_max = Rat::zero();
    for v in module.vertices() {
        let h: Rat = dot_rat_int(&v, &ray_sum) + &offset_sum;
        if h > vertex_height_max {
            vertex_height_max = h;
        }
    }
    let corner: Vec<Int> = (0..n)
        .map(|c| geom.facets.iter().map(|f| f.normal[c].clone()).sum())
        .collect();
    let bound = vertex_height_max + to_rat(&dot_int(&corner, &ray_sum));
    let mut region_ineqs = module_ineqs;
    let h_row: Vec<Rat> = to_rat_vec(&ray_sum).iter().map(|c| -c.clone()).collect();
    region_ineqs.push(Inequality::new(h_row, &offset_sum - &bound));
    let region = Polyhedron::new(n, region_ineqs);
    if crate::polyhedron::bounding_box_volume(&region)? > *cap {
        return Ok(None);
    }
    let in_module = |x: &[Int]| -> bool { module.contains(&to_rat_vec(x)) };
    let mut gens = Vec::new();
    'point: for w in region.lattice_points()? {
        for h in &hilb {
            let diff: Vec<Int> = w.iter().zip(h).map(|(a, b)| a - b).collect();
            if in_module(&diff) {
                continue 'point; // w = (w - h) + h is a proper decomposition
            }
        }
        gens.push(w);
    }
    Ok(Some(gens))
}

/// Global generation of the reflexive sheaf O(D) for integral D on a complete
/// fan. Cartier divisors reduce to nefness; otherwise every chart-module
/// generator must be a global section times a chart monomial.
pub fn global_generation(fan: &Fan, d: &TorusDivisor, search_bound: u64) -> Result<Verdict, Error> {
    if !fan.is_complete() {
        return Err(Error::NotComplete);
    }
    if !d.is_integral() {
        return Err(Error::InvalidDivisor(
            "global generation concerns Weil divisors; coefficients must be integers".to_string(),
        ));
    }
    if let Ok(data) = q_cartier_data(fan, d) {
        if data.is_cartier() {
            return Ok(if crate::mori::is_nef(fan, d)? { Verdict::Yes } else { Verdict::No });
        }
    }
    let cap = enumeration_cap(search_bound);
    let sections = divisor_polytope(fan, d).lattice_points()?;
    for ci in 0..fan.max_cones().len() {
        let geom = fan.geometry(ci)?;
        let Some(gens) = chart_module_generators(fan, d, ci, &cap)? else {
            return Ok(Verdict::Inconclusive);
        };
        for w in &gens {
            let covered = sections.iter().any(|u| {
                let diff: Vec<Int> = w.iter().zip(u).map(|(a, b)| a - b).collect();
                geom.facets.iter().all(|f| !dot_int(&f.normal, &diff).is_negative())
            });
            if !covered {
                return Ok(Verdict::No);
            }
        }
    }
    Ok(Verdict::Yes)
}

/// Very ampleness of an ample Cartier divisor: on every chart, the semigroup
/// generated by (P_D cap M) - u_sigma must equal the full dual semigroup,
/// which is checked on its Hilbert basis.
pub fn very_ample(fan: &Fan, d: &TorusDivisor, search_bound: u64) -> Result<Verdict, Error> {
    if !fan.is_complete() {
        return Err(Error::NotComplete);
    }
    let data = q_cartier_data(fan, d)?;
    if !d.is_integral() || !data.is_cartier() {
        return Err(Error::NotCartier);
    }
    if !crate::mori::is_ample(fan, d)? {
        return Err(Error::NotAmple);
    }
    let cap = enumeration_cap(search_bound);
    let sections = divisor_polytope(fan, d).lattice_points()?;
    for ci in 0..fan.max_cones().len() {
        let geom = fan.geometry(ci)?;
        let u_sigma: Vec<Int> = data.per_cone[ci]
            .iter()
            .map(|c| {
                debug_assert!(c.is_integer());
                c.to_integer()
            })
            .collect();
        let gens: Vec<Vec<Int>> = sections
            .iter()
            .map(|p| p.iter().zip(&u_sigma).map(|(a, b)| a - b).collect::<Vec<Int>>())
            .filter(|g: &Vec<Int>| !g.iter().all(Zero::is_zero))
            .collect();
        let Some(hilb) = dual_hilbert_basis(fan, ci, &cap)? else {
            return Ok(Verdict::Inconclusive);
        };
        let in_dual = |x: &[Int]| geom.gens.iter().all(|g| !dot_int(x, g).is_negative());
        let mut memo: BTreeMap<Vec<Int>, bool> = BTreeMap::new();
        for h in &hilb {
            if !semigroup_member(h, &gens, &in_dual, &mut memo) {
                return Ok(Verdict::No);
            }
        }
    }
    Ok(Verdict::Yes)
}

fn semigroup_member(
    x: &[Int],
    gens: &[Vec<Int>],
    in_dual: &impl Fn(&[Int]) -> bool,
    memo: &mut BTreeMap<Vec<Int>, bool>,
) -> bool {
    if x.iter().all(Zero::is_zero) {
        return true;
    }
    if let Some(&v) = memo.get(x) {
        return v;
    }
    memo.insert(x.to_vec(), false);
    let mut ok = false;
    for g in gens {
        let rest: Vec<Int> = x.iter().zip(g).map(|(a, b)| a - b).collect();
        if in_dual(&rest) && semigroup_member(&rest, gens, in_dual, memo) {
            ok = true;
            break;
        }
    }
    memo.insert(x.to_vec(), ok);
    ok
}
