//! The Kleiman-Mori cone of a complete (or relative, convex-support)
//! simplicial toric variety: extremal rays, lengths, Reid contraction
//! profiles, contraction fans, nef/ample tests, nef thresholds, adjoint
//! reports, divisorial-ray classification, and the bound suite for lengths of
//! extremal rays of birational type.

use std::collections::BTreeMap;

use num::{Integer, One, Signed, Zero};

use crate::arith::{dot_int, int, rat_sign, to_rat, to_rat_vec, Int, Rat};
use crate::divisor::{
    canonical_divisor, is_pseudo_effective, projective_witness, q_cartier_data, sections_count,
    TorusDivisor,
};
use crate::error::Error;
use crate::fan::{refinement_map, unimodular_isomorphism, Cone, Fan, RefinementMap, Wall};
use crate::intersect::{curve_class, wall_degree};
use crate::matrix::{IntMat, RatMat};
use crate::polyhedron::extreme_ray_indices;

/// An extremal ray of NE(X) (or NE(X/W) in the relative setting), with the
/// interior walls whose curve classes lie on it.
#[derive(Clone, Debug)]
pub struct ExtremalRay {
    /// primitive integer representative of the class ray
    pub generator: Vec<Int>,
    /// indices into `fan.walls()`
    pub member_walls: Vec<usize>,
}

/// Extreme rays of the cone spanned by all interior-wall classes.
pub fn mori_cone(fan: &Fan) -> Result<Vec<ExtremalRay>, Error> {
    fan.require_valid()?;
    if !fan.has_curve_support() {
        return Err(Error::NotComplete);
    }
    if !fan.is_simplicial() {
        return Err(Error::NotSimplicial);
    }
    let walls = fan.walls()?;
    let mut interior: Vec<(usize, Vec<Rat>)> = Vec::new();
    for (wi, w) in walls.iter().enumerate() {
        if w.is_interior() {
            interior.push((wi, curve_class(fan, w)?.pairings));
        }
    }
    if interior.is_empty() {
        return Ok(Vec::new());
    }
    let classes: Vec<Vec<Rat>> = interior.iter().map(|(_, c)| c.clone()).collect();
    let extreme = extreme_ray_indices(&classes)?;
    let mut rays = Vec::new();
    for &e in &extreme {
        let generator = crate::arith::primitive_direction(&classes[e])
            .expect("wall classes are nonzero on strongly convex NE");
        let member_walls: Vec<usize> = interior
            .iter()
            .filter(|(_, c)| {
                crate::arith::primitive_direction(c).as_ref() == Some(&generator)
            })
            .map(|&(wi, _)| wi)
            .collect();
        rays.push(ExtremalRay { generator, member_walls });
    }
    rays.sort_by(|a, b| a.generator.cmp(&b.generator));
    Ok(rays)
}

/// l(R) = min over the ray's invariant curves of -(K+Delta).C. With no
/// boundary this is the length of the extremal ray.
pub fn ray_length(
    fan: &Fan,
    ray: &ExtremalRay,
    boundary: Option<&TorusDivisor>,
) -> Result<Rat, Error> {
    let mut d = canonical_divisor(fan);
    if let Some(delta) = boundary {
        d = d.add(delta);
    }
    q_cartier_data(fan, &d)?;
    let walls = fan.walls()?;
    let mut best: Option<Rat> = None;
    for &wi in &ray.member_walls {
        let deg = -wall_degree(fan, &d, &walls[wi])?;
        best = Some(match best {
            None => deg,
            Some(m) => m.min(deg),
        });
    }
    best.ok_or_else(|| Error::WrongProfile("extremal ray has no member walls".to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionKind {
    Fano,
    Divisorial,
    Small,
}

impl std::fmt::Display for ContractionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ContractionKind::Fano => write!(f, "fano"),
            ContractionKind::Divisorial => write!(f, "divisorial"),
            ContractionKind::Small => write!(f, "small"),
        }
    }
}

/// Reid's numerical profile of an extremal contraction: alpha rays negative on
/// R cut out the exceptional locus A, the positive rays restrict to the fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionProfile {
    pub alpha: usize,
    pub beta: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub dim_f: usize,
    /// maximal fiber dimension of the contraction (= dim F)
    pub d: usize,
    pub kind: ContractionKind,
}

pub fn reid_profile(fan: &Fan, ray: &ExtremalRay) -> Result<ContractionProfile, Error> {
    let n = fan.rank();
    let negatives = ray.generator.iter().filter(|p| p.is_negative()).count();
    let positives = ray.generator.iter().filter(|p| p.is_positive()).count();
    if positives > n + 1 || positives + negatives > fan.rays().len() {
        return Err(Error::WrongProfile("impossible sign pattern".to_string()));
    }
    let alpha = negatives;
    let beta = n + 1 - positives;
    if alpha > beta || beta > n {
        return Err(Error::WrongProfile(format!(
            "alpha = {alpha}, beta = {beta} violates Reid's inequalities"
        )));
    }
    let kind = match alpha {
        0 => ContractionKind::Fano,
        1 => ContractionKind::Divisorial,
        _ => ContractionKind::Small,
    };
    Ok(ContractionProfile {
        alpha,
        beta,
        dim_a: n - alpha,
        dim_b: beta - alpha,
        dim_f: n - beta,
        d: n - beta,
        kind,
    })
}

/// The target of the extremal contraction: a coarser fan for birational rays,
/// a quotient-lattice base fan for Fano (fibration) rays.
pub enum Contraction {
    Birational { fan: Fan, map: RefinementMap },
    Fibration { base: Fan, projection: IntMat },
}

pub fn contract_ray(fan: &Fan, ray: &ExtremalRay) -> Result<Contraction, Error> {
    let profile = reid_profile(fan, ray)?;
    let walls = fan.walls()?;
    if profile.kind == ContractionKind::Fano {
        // quotient by the span of the fiber (the rays positive on R)
        let pos: Vec<Vec<Int>> = (0..fan.rays().len())
            .filter(|&r| ray.generator[r].is_positive())
            .map(|r| fan.ray(r).clone())
            .collect();
        let snf = IntMat::from_rows(pos).smith_normal_form();
        let k = snf.rank();
        let n = fan.rank();
        let project = |x: &[Int]| -> Vec<Int> {
            (k..n)
                .map(|j| (0..n).map(|i| &x[i] * snf.v.at(i, j)).sum())
                .collect()
        };
        let mut new_rays: Vec<Vec<Int>> = Vec::new();
        let mut cones: Vec<Cone> = Vec::new();
        for cone in fan.max_cones() {
            let mut image_gens: Vec<Vec<Rat>> = Vec::new();
            let mut image_prims: Vec<Vec<Int>> = Vec::new();
            for &r in cone.rays() {
                let img = project(fan.ray(r));
                if let Some(p) = crate::arith::primitive_direction(&to_rat_vec(&img)) {
                    image_gens.push(to_rat_vec(&img));
                    image_prims.push(p);
                }
            }
            let keep = extreme_ray_indices(&image_gens)
                .map_err(|_| Error::MergeNotAFan("fiber span is not contracted".to_string()))?;
            let mut cone_rays = Vec::new();
            for &g in &keep {
                let prim = image_prims[g].clone();
                let idx = match new_rays.iter().position(|r| *r == prim) {
                    Some(i) => i,
                    None => {
                        new_rays.push(prim);
                        new_rays.len() - 1
                    }
                };
                cone_rays.push(idx);
            }
            cones.push(Cone::new(cone_rays));
        }
        cones.sort();
        cones.dedup();
        let proj_cols = {
            let mut m = IntMat::zero(n, n - k);
            for i in 0..n {
                for j in 0..n - k {
                    *m.at_mut(i, j) = snf.v.at(i, k + j).clone();
                }
            }
            m
        };
        let base = Fan::new(n - k, new_rays, cones)?;
        base.require_valid()
            .map_err(|e| Error::MergeNotAFan(e.to_string()))?;
        return Ok(Contraction::Fibration { base, projection: proj_cols });
    }
    // birational: merge the maximal cones across every member wall
    let m = fan.max_cones().len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn root(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = root(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for &wi in &ray.member_walls {
        let w = &walls[wi];
        let (a, b) = (w.left, w.right.expect("member walls are interior"));
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..m {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut new_cones_old_idx: Vec<Vec<usize>> = Vec::new();
    for group in groups.values() {
        let mut ray_set: Vec<usize> = group
            .iter()
            .flat_map(|&ci| fan.max_cones()[ci].rays().iter().copied())
            .collect();
        ray_set.sort_unstable();
        ray_set.dedup();
        if group.len() == 1 {
            new_cones_old_idx.push(ray_set);
            continue;
        }
        let gens: Vec<Vec<Rat>> = ray_set.iter().map(|&r| to_rat_vec(fan.ray(r))).collect();
        let keep = extreme_ray_indices(&gens).map_err(|_| {
            Error::MergeNotAFan(format!("merged cone over rays {ray_set:?} contains a line"))
        })?;
        new_cones_old_idx.push(keep.iter().map(|&k| ray_set[k]).collect());
    }
    let mut used: Vec<usize> = new_cones_old_idx.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let reindex: BTreeMap<usize, usize> =
        used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let rays: Vec<Vec<Int>> = used.iter().map(|&r| fan.ray(r).clone()).collect();
    let cones: Vec<Cone> = new_cones_old_idx
        .iter()
        .map(|c| Cone::new(c.iter().map(|r| reindex[r]).collect()))
        .collect();
    let target = Fan::new(fan.rank(), rays, cones)?;
    target
        .require_valid()
        .map_err(|e| Error::MergeNotAFan(e.to_string()))?;
    let map = refinement_map(fan, &target)?;
    Ok(Contraction::Birational { fan: target, map })
}

/// Degree of `d` on the wall using precomputed global support data.
fn wall_degree_with_data(
    fan: &Fan,
    data: &crate::divisor::SupportFunctionData,
    wall: &Wall,
) -> Result<Rat, Error> {
    let right = wall.right.ok_or(Error::BoundaryWall)?;
    let lift = fan.wall_lift(wall)?;
    Ok(data.evaluate(wall.left, &lift) - data.evaluate(right, &lift))
}

/// Nef: degree >= 0 on every interior wall (relative nef over the base for
/// convex-support fans).
pub fn is_nef(fan: &Fan, d: &TorusDivisor) -> Result<bool, Error> {
    if !fan.has_curve_support() {
        return Err(Error::NotComplete);
    }
    let data = q_cartier_data(fan, d)?;
    for w in fan.walls()? {
        if !w.is_interior() {
            continue;
        }
        if wall_degree_with_data(fan, &data, w)?.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Ample: strictly positive on every interior wall. On a complete fan this is
/// exactly strict convexity of the support function, wall by wall.
pub fn is_ample(fan: &Fan, d: &TorusDivisor) -> Result<bool, Error> {
    if !fan.has_curve_support() {
        return Err(Error::NotComplete);
    }
    let data = q_cartier_data(fan, d)?;
    for w in fan.walls()? {
        if !w.is_interior() {
            continue;
        }
        if rat_sign(&wall_degree_with_data(fan, &data, w)?) <= 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The largest tau with K + tau D nef: the maximum over interior walls of
/// (-K.C)/(D.C) for an ample Cartier D on a complete fan.
pub fn nef_threshold(fan: &Fan, d: &TorusDivisor) -> Result<Rat, Error> {
    if !fan.is_complete() {
        return Err(Error::NotComplete);
    }
    let d_data = q_cartier_data(fan, d)?;
    if !d.is_integral() || !d_data.is_cartier() {
        return Err(Error::NotCartier);
    }
    if !is_ample(fan, d)? {
        return Err(Error::NotAmple);
    }
    let k = canonical_divisor(fan);
    let k_data = q_cartier_data(fan, &k)?;
    let mut tau: Option<Rat> = None;
    for w in fan.walls()? {
        if !w.is_interior() {
            continue;
        }
        let kc = -wall_degree_with_data(fan, &k_data, w)?;
        let dc = wall_degree_with_data(fan, &d_data, w)?;
        let ratio = kc / dc;
        if tau.as_ref().is_none_or(|t| &ratio > t) {
            tau = Some(ratio);
        }
    }
    tau.ok_or(Error::NotComplete)
}

#[derive(Clone, Debug)]
pub struct AdjointReport {
    pub coeff: Rat,
    pub pseudo_effective: bool,
    pub nef: bool,
    pub sections: usize,
    /// pe iff nef, asserted when coeff = n-1; vacuously true otherwise
    pub consistent_with_adjoint_theorem: bool,
}

/// Positivity report for K + c D with D ample Cartier.
pub fn adjoint_report(fan: &Fan, d: &TorusDivisor, coeff: &Rat) -> Result<AdjointReport, Error> {
    if !fan.is_complete() {
        return Err(Error::NotComplete);
    }
    let d_data = q_cartier_data(fan, d)?;
    if !d.is_integral() || !d_data.is_cartier() {
        return Err(Error::NotCartier);
    }
    if !is_ample(fan, d)? {
        return Err(Error::NotAmple);
    }
    let adj = canonical_divisor(fan).add(&d.scale(coeff));
    let pe = is_pseudo_effective(fan, &adj)?;
    let nef = is_nef(fan, &adj)?;
    let sections = sections_count(fan, &adj)?;
    let n_minus_one = to_rat(&int(fan.rank() as i64 - 1));
    let consistent = if *coeff == n_minus_one { pe == nef } else { true };
    Ok(AdjointReport {
        coeff: coeff.clone(),
        pseudo_effective: pe,
        nef,
        sections,
        consistent_with_adjoint_theorem: consistent,
    })
}

#[derive(Clone, Debug)]
pub struct DivisorialClassification {
    pub center_smooth: bool,
    /// a, when the subdivision vector is e_1 + a e_2 + ... + a e_n over the
    /// contracted smooth cone (b = 1)
    pub weight: Option<Int>,
    pub exceptional_is_pn1: bool,
}

/// For a divisorial ray contracting to a point (d = n-1): when the length
/// equals n-1, the contraction must be a weighted blow-up with weight
/// (1, a, ..., a) at a smooth invariant point, with exceptional divisor
/// P^{n-1}. Returns `None` when the length is below n-1.
pub fn classify_divisorial(
    fan: &Fan,
    ray: &ExtremalRay,
) -> Result<Option<DivisorialClassification>, Error> {
    let n = fan.rank();
    let profile = reid_profile(fan, ray)?;
    if profile.kind != ContractionKind::Divisorial || profile.dim_b != 0 {
        return Err(Error::WrongProfile(format!(
            "expected a divisorial ray contracting to a point, found {} with dim B = {}",
            profile.kind, profile.dim_b
        )));
    }
    let length = ray_length(fan, ray, None)?;
    let n_minus_one = to_rat(&int(n as i64 - 1));
    if length < n_minus_one {
        return Ok(None);
    }
    let Contraction::Birational { fan: target, map } = contract_ray(fan, ray)? else {
        return Err(Error::WrongProfile("divisorial ray gave a fibration".to_string()));
    };
    if map.exceptional_rays.len() != 1 {
        return Err(Error::WrongProfile(format!(
            "divisorial contraction with {} exceptional rays",
            map.exceptional_rays.len()
        )));
    }
    let exc = map.exceptional_rays[0];
    let host = map.ray_hosts[exc];
    let host_rays = target.max_cones()[host].rays().to_vec();
    let center_smooth = matches!(target.multiplicity(&host_rays), Ok(m) if m.is_one());
    // b e_{n+1} = a_1 e_1 + ... + a_n e_n over the contracted cone
    let weight = (|| -> Option<Int> {
        let rows: Vec<Vec<Rat>> = host_rays
            .iter()
            .map(|&r| to_rat_vec(target.ray(r)))
            .collect();
        let mat = RatMat::from_rows(rows).transpose();
        let rhs = to_rat_vec(fan.ray(exc));
        let (coeffs, unique) = mat.solve(&rhs)?;
        if !unique {
            return None;
        }
        let mut b = Int::one();
        for c in &coeffs {
            b = b.lcm(c.denom());
        }
        if !b.is_one() {
            return None;
        }
        let mut nums: Vec<Int> = coeffs.iter().map(|c| c.to_integer()).collect();
        nums.sort();
        if nums.is_empty() || !nums[0].is_one() || nums.iter().any(|a| !a.is_positive()) {
            return None;
        }
        let a = nums.last().unwrap().clone();
        if nums[1..].iter().all(|x| *x == a) {
            Some(a)
        } else {
            None
        }
    })();
    let quotient = fan.star_quotient(&[exc])?;
    let pn1 = crate::constructions::projective_space(n - 1)?;
    let exceptional_is_pn1 = unimodular_isomorphism(&quotient.fan, &pn1).is_some();
    Ok(Some(DivisorialClassification { center_smooth, weight, exceptional_is_pn1 }))
}

/// ro(X) = #rays - n for complete simplicial fans.
pub fn picard_number(fan: &Fan) -> Result<usize, Error> {
    if !fan.is_complete() {
        return Err(Error::NotComplete);
    }
    if !fan.is_simplicial() {
        return Err(Error::NotSimplicial);
    }
    Ok(fan.rays().len() - fan.rank())
}

#[derive(Clone, Debug)]
pub struct BundleDetection {
    pub a_plus: Int,
    pub a_minus: Int,
    /// fiber coordinates of v_+ (the twisting data) when the fibration is a
    /// genuine bundle
    pub twists: Vec<Int>,
    pub fiber_is_pn1: bool,
    pub is_bundle: bool,
}

/// Recognition of P^{n-1}-bundles over P^1 in the rho = 2 normal form: one
/// Fano ray fibers over P^1, the kernel rays form the fan of P^{n-1}, and the
/// two off-kernel rays sit at heights a_+ = a_- = 1.
pub fn detect_pn1_bundle_over_p1(fan: &Fan) -> Result<Option<BundleDetection>, Error> {
    let n = fan.rank();
    if n < 2 || !fan.is_complete() || !fan.is_simplicial() || fan.rays().len() != n + 2 {
        return Ok(None);
    }
    for ray in mori_cone(fan)? {
        let profile = reid_profile(fan, &ray)?;
        if profile.kind != ContractionKind::Fano || profile.dim_f != n - 1 {
            continue;
        }
        let Contraction::Fibration { base, projection } = contract_ray(fan, &ray)? else {
            continue;
        };
        if base.rank() != 1 || !base.is_complete() {
            continue;
        }
        let functional: Vec<Int> = (0..n).map(|i| projection.at(i, 0).clone()).collect();
        let mut fiber = Vec::new();
        let mut plus: Option<(usize, Int)> = None;
        let mut minus: Option<(usize, Int)> = None;
        for (ri, r) in fan.rays().iter().enumerate() {
            let h = dot_int(&functional, r);
            if h.is_zero() {
                fiber.push(ri);
            } else if h.is_positive() {
                if plus.is_some() {
                    plus = None;
                    break;
                }
                plus = Some((ri, h));
            } else {
                if minus.is_some() {
                    minus = None;
                    break;
                }
                minus = Some((ri, -h));
            }
        }
        let (Some((vp, a_plus)), Some((vm, a_minus))) = (plus, minus) else {
            continue;
        };
        if fiber.len() != n {
            continue;
        }
        // unimodular coordinates in which the projection is the first entry
        let p_col = IntMat::from_rows(functional.iter().map(|c| vec![c.clone()]).collect());
        let snf = p_col.smith_normal_form();
        let t = snf.u.to_rat().inverse().expect("unimodular");
        let in_fiber_coords = |x: &[Int]| -> Vec<Int> {
            (1..n)
                .map(|j| {
                    let v: Rat = (0..n).map(|i| to_rat(&x[i]) * t.at(i, j)).sum();
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        };
        let fiber_rays: Vec<Vec<Int>> = fiber.iter().map(|&ri| in_fiber_coords(fan.ray(ri))).collect();
        let mut fiber_cones = Vec::new();
        for cone in fan.max_cones() {
            if !cone.rays().contains(&vp) {
                continue;
            }
            let local: Vec<usize> = cone
                .rays()
                .iter()
                .filter(|&&r| r != vp)
                .map(|&r| fiber.iter().position(|&f| f == r).expect("fiber ray"))
                .collect();
            fiber_cones.push(Cone::new(local));
        }
        let fiber_fan = Fan::new(n - 1, fiber_rays, fiber_cones)?;
        let fiber_is_pn1 = if n == 2 {
            fiber_fan.is_complete() && fiber_fan.rays().len() == 2
        } else {
            match crate::intersect::fake_wps_audit(&fiber_fan) {
                Ok(report) => report.weights.iter().all(One::is_one) && report.is_wps,
                Err(_) => false,
            }
        };
        let is_bundle = fiber_is_pn1 && a_plus.is_one() && a_minus.is_one();
        let twists = in_fiber_coords(fan.ray(vp));
        let _ = vm;
        return Ok(Some(BundleDetection { a_plus, a_minus, twists, fiber_is_pn1, is_bundle }));
    }
    Ok(None)
}

/// One verified inequality of the bound suite.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct RayVerdict {
    pub generator: Vec<Int>,
    pub length: Rat,
    pub length_with_boundary: Option<Rat>,
    pub profile: ContractionProfile,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub rays: Vec<RayVerdict>,
    pub all_pass: bool,
}

/// Runs the length-bound suite over every K-negative extremal ray: birational
/// rays satisfy l(R) < d+1, divisorial rays contracting to a point satisfy
/// l(R) <= n-1 with the weighted-blow-up classification at equality, small
/// rays satisfy l(R) < n-1, and any ray longer than n-1 forces a
/// P^{n-1}-bundle over P^1 with rho = 2. A boundary divisor adds the
/// exceptional-support check for rays with -(K+Delta).C > n-1.
pub fn theorem_suite(fan: &Fan, boundary: Option<&TorusDivisor>) -> Result<SuiteReport, Error> {
    let n = fan.rank();
    if let Some(delta) = boundary {
        let ok = delta
            .coefficients
            .iter()
            .all(|c| !c.is_negative() && *c <= to_rat(&int(1)));
        if !ok {
            return Err(Error::InvalidDivisor(
                "boundary coefficients must lie in [0, 1]".to_string(),
            ));
        }
    }
    let n_minus_one = to_rat(&int(n as i64 - 1));
    let mut rays_out = Vec::new();
    let mut all_pass = true;
    for ray in mori_cone(fan)? {
        let length = ray_length(fan, &ray, None)?;
        let lwb = match boundary {
            Some(delta) => Some(ray_length(fan, &ray, Some(delta))?),
            None => None,
        };
        let profile = reid_profile(fan, &ray)?;
        let mut checks = Vec::new();
        if length.is_positive() {
            // the K-negative bound suite
            if profile.kind != ContractionKind::Fano {
                let bound = to_rat(&int(profile.d as i64 + 1));
                checks.push(Check {
                    name: "birational: l(R) < d+1".to_string(),
                    pass: length < bound,
                    detail: format!("l = {length}, d = {}", profile.d),
                });
            }
            if profile.kind == ContractionKind::Divisorial && profile.d == n - 1 {
                checks.push(Check {
                    name: "divisorial to a point: l(R) <= n-1".to_string(),
                    pass: length <= n_minus_one,
                    detail: format!("l = {length}"),
                });
                if length == n_minus_one {
                    let class = classify_divisorial(fan, &ray)?;
                    let pass = class.as_ref().is_some_and(|c| {
                        c.center_smooth && c.weight.is_some() && c.exceptional_is_pn1
                    });
                    checks.push(Check {
                        name: "l(R) = n-1: weighted blow-up of a smooth point with E = P^{n-1}"
                            .to_string(),
                        pass,
                        detail: format!("{class:?}"),
                    });
                }
            }
            if profile.kind == ContractionKind::Small {
                checks.push(Check {
                    name: "small: l(R) < n-1".to_string(),
                    pass: length < n_minus_one,
                    detail: format!("l = {length}"),
                });
            }
            if length > n_minus_one && fan.is_complete() && picard_number(fan)? >= 2 {
                // the bundle structure is forced only at Picard number >= 2
                let rho = picard_number(fan)?;
                let bundle = detect_pn1_bundle_over_p1(fan)?;
                let pass = rho == 2 && bundle.as_ref().is_some_and(|b| b.is_bundle);
                checks.push(Check {
                    name: "l(R) > n-1: rho = 2 and X is a P^{n-1}-bundle over P^1".to_string(),
                    pass,
                    detail: format!("rho = {rho}, bundle = {bundle:?}"),
                });
            }
        }
        if let (Some(delta), Some(lwb_val)) = (boundary, lwb.as_ref()) {
            if *lwb_val > n_minus_one && profile.kind != ContractionKind::Fano {
                // -(K+Delta)-long birational rays must be the weighted blow-up
                // with Supp Delta containing E
                let negative: Vec<usize> = (0..fan.rays().len())
                    .filter(|&r| ray.generator[r].is_negative())
                    .collect();
                let pass = profile.kind == ContractionKind::Divisorial
                    && negative.iter().all(|&r| delta.coefficients[r].is_positive());
                checks.push(Check {
                    name: "-(K+Delta)-long ray: Supp Delta contains E".to_string(),
                    pass,
                    detail: format!("negative rays {negative:?}"),
                });
            }
        }
        // every extremal ray carries an invariant curve of low degree
        {
            let reference = lwb.clone().unwrap_or_else(|| length.clone());
            let n_plus_one = to_rat(&int(n as i64 + 1));
            checks.push(Check {
                name: "some invariant curve has -(K+Delta).C <= n+1".to_string(),
                pass: reference <= n_plus_one,
                detail: format!("min degree = {reference}"),
            });
            let exempt = fan.is_complete()
                && unimodular_isomorphism(fan, &crate::constructions::projective_space(n)?)
                    .is_some();
            if reference > to_rat(&int(n as i64)) && !exempt {
                checks.push(Check {
                    name: "degree <= n unless X = P^n".to_string(),
                    pass: false,
                    detail: format!("min degree = {reference}"),
                });
            }
        }
        all_pass &= checks.iter().all(|c| c.pass);
        rays_out.push(RayVerdict {
            generator: ray.generator.clone(),
            length,
            length_with_boundary: lwb,
            profile,
            checks,
        });
    }
    Ok(SuiteReport { rays: rays_out, all_pass })
}

/// An ample Cartier divisor on a complete projective fan, from the
/// strict-convexity LP witness.
pub fn some_ample_cartier(fan: &Fan) -> Result<Option<TorusDivisor>, Error> {
    let Some(witness) = projective_witness(fan)? else {
        return Ok(None);
    };
    let mut denial = Int::one();
    for u in &witness {
        for c in u {
            denial = denial.lcm(c.denom());
        }
    }
    let scale = to_rat(&denial);
    let coefficients: Vec<Rat> = fan
        .rays()
        .iter()
        .enumerate()
        .map(|(ri, r)| {
            let host = (0..fan.max_cones().len())
                .find(|&ci| fan.max_cones()[ci].rays().contains(&ri))
                .expect("every ray lies in a maximal cone");
            -crate::arith::dot_rat_int(&witness[host], r) * &scale
        })
        .collect();
    let d = TorusDivisor { coefficients };
    debug_assert!(is_ample(fan, &d).unwrap_or(false));
    debug_assert!(crate::divisor::is_cartier(fan, &d).unwrap_or(false));
    Ok(Some(d))
}

/// For rays to be meaningful, `local_support` is re-exported through the
/// intersect module; this helper mirrors the support-side checks for tests.
pub fn k_negative_rays(fan: &Fan) -> Result<Vec<ExtremalRay>, Error> {
    let mut out = Vec::new();
    for ray in mori_cone(fan)? {
        if ray_length(fan, &ray, None)?.is_positive() {
            out.push(ray);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int_vec, rat, rat_int};
    use crate::divisor::TorusDivisor;

    fn fan(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
        Fan::new(
            rank,
            rays.iter().map(|r| int_vec(r)).collect(),
            cones.iter().map(|c| Cone::new(c.to_vec())).collect(),
        )
        .unwrap()
    }

    fn p2() -> Fan {
        fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]])
    }

    fn ex_4_3_1() -> Fan {
        fan(
            2,
            &[&[1, 0], &[0, 1], &[-1, -1], &[1, 2]],
            &[&[0, 3], &[1, 3], &[1, 2], &[0, 2]],
        )
    }

    fn divisor(f: &Fan, coeffs: &[i64]) -> TorusDivisor {
        TorusDivisor::new(f, coeffs.iter().map(|&c| rat_int(c)).collect()).unwrap()
    }

    #[test]
    fn p2_has_one_ray_of_length_three() {
        let f = p2();
        let rays = mori_cone(&f).unwrap();
        assert_eq!(rays.len(), 1);
        assert_eq!(rays[0].member_walls.len(), 3);
        assert_eq!(ray_length(&f, &rays[0], None).unwrap(), rat_int(3));
        let profile = reid_profile(&f, &rays[0]).unwrap();
        assert_eq!(profile.kind, ContractionKind::Fano);
        assert_eq!(profile.alpha, 0);
    }

    #[test]
    fn ex_4_3_1_has_two_rays_and_golden_contractions() {
        let f = ex_4_3_1();
        let rays = mori_cone(&f).unwrap();
        assert_eq!(rays.len(), 2);
        let mut targets = Vec::new();
        for ray in &rays {
            match contract_ray(&f, ray).unwrap() {
                Contraction::Birational { fan: w, .. } => targets.push(w),
                Contraction::Fibration { .. } => panic!("both contractions are birational"),
            }
        }
        let p2_fan = p2();
        let p112 = fan(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0, 1], &[1, 2], &[0, 2]]);
        let to_p2 = targets
            .iter()
            .filter(|t| unimodular_isomorphism(t, &p2_fan).is_some())
            .count();
        let to_p112 = targets
            .iter()
            .filter(|t| unimodular_isomorphism(t, &p112).is_some())
            .count();
        assert_eq!((to_p2, to_p112), (1, 1));
    }

    #[test]
    fn blown_up_quadric_surface_has_three_rays() {
        // Example: blow-up of P^1 x P^1 at the point D_1 cap D_3
        let f = fan(
            2,
            &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1], &[1, 1]],
            &[&[0, 4], &[4, 2], &[0, 3], &[1, 2], &[1, 3]],
        );
        let rays = mori_cone(&f).unwrap();
        assert_eq!(rays.len(), 3);
        // classes of E, D'_1, D'_3 span: E = V((1,1)), D'_1 = V(e1), D'_3 = V(e2)
        let gens: Vec<&Vec<Int>> = rays.iter().map(|r| &r.generator).collect();
        let walls = f.walls().unwrap();
        for target_ray in [4usize, 0, 2] {
            let w = walls.iter().find(|w| w.rays == vec![target_ray]).unwrap();
            let class = curve_class(&f, w).unwrap();
            let prim = class.primitive().unwrap();
            assert!(gens.contains(&&prim), "class of wall {target_ray} is extremal");
        }
        // contracting the exceptional ray returns P^1 x P^1
        let e_wall_class = {
            let w = walls.iter().find(|w| w.rays == vec![4]).unwrap();
            curve_class(&f, w).unwrap().primitive().unwrap()
        };
        let e_ray = rays.iter().find(|r| r.generator == e_wall_class).unwrap();
        let Contraction::Birational { fan: w, .. } = contract_ray(&f, e_ray).unwrap() else {
            panic!("divisorial");
        };
        let p1xp1 = fan(
            2,
            &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]],
            &[&[0, 2], &[0, 3], &[1, 2], &[1, 3]],
        );
        assert!(unimodular_isomorphism(&w, &p1xp1).is_some());
    }

    #[test]
    fn nef_and_ample_on_the_blowup_of_p2() {
        let coarse = p2();
        let f = coarse.star_subdivision(&int_vec(&[1, 1])).unwrap();
        let map = crate::fan::refinement_map(&f, &coarse).unwrap();
        let h = divisor(&coarse, &[1, 0, 0]);
        let pulled = crate::divisor::pullback(&map, &h).unwrap();
        assert!(is_nef(&f, &pulled).unwrap());
        assert!(!is_ample(&f, &pulled).unwrap());
        let minus_k = canonical_divisor(&f).neg();
        assert!(is_ample(&f, &minus_k).unwrap());
    }

    #[test]
    fn nef_threshold_of_p2_is_three() {
        let f = p2();
        let d = divisor(&f, &[1, 0, 0]);
        assert_eq!(nef_threshold(&f, &d).unwrap(), rat_int(3));
        // scale invariance: threshold of 2D is half
        let d2 = d.scale(&rat_int(2));
        assert_eq!(nef_threshold(&f, &d2).unwrap(), rat(3, 2));
    }

    #[test]
    fn adjoint_report_on_p2() {
        let f = p2();
        let d = divisor(&f, &[1, 0, 0]);
        let report = adjoint_report(&f, &d, &rat_int(1)).unwrap();
        assert!(!report.pseudo_effective && !report.nef);
        assert!(report.consistent_with_adjoint_theorem);
        assert_eq!(report.sections, 0);
    }

    #[test]
    fn exceptional_ray_of_blown_up_p3_profile() {
        let p3 = fan(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]],
            &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
        );
        let f = p3.star_subdivision(&int_vec(&[1, 1, 1])).unwrap();
        let rays = mori_cone(&f).unwrap();
        let (e_ray, profile) = rays
            .iter()
            .find_map(|r| {
                let p = reid_profile(&f, r).unwrap();
                (p.kind == ContractionKind::Divisorial).then_some((r, p))
            })
            .unwrap();
        assert_eq!(profile.alpha, 1);
        assert_eq!(profile.dim_b, 0);
        assert_eq!(profile.d, 2);
        assert_eq!(ray_length(&f, e_ray, None).unwrap(), rat_int(2));
        let class = classify_divisorial(&f, e_ray).unwrap().unwrap();
        assert!(class.center_smooth && class.exceptional_is_pn1);
        assert_eq!(class.weight, Some(int(1)));
    }

    #[test]
    fn ex_3_2_10_is_a_fibration_but_not_a_bundle() {
        let f = fan(
            2,
            &[&[0, 1], &[0, -1], &[2, 1], &[-1, 0]],
            &[&[0, 2], &[1, 2], &[1, 3], &[0, 3]],
        );
        let rays = mori_cone(&f).unwrap();
        let fiber_ray = rays
            .iter()
            .find(|r| reid_profile(&f, r).unwrap().kind == ContractionKind::Fano)
            .unwrap();
        assert_eq!(ray_length(&f, fiber_ray, None).unwrap(), rat_int(1));
        let Contraction::Fibration { base, .. } = contract_ray(&f, fiber_ray).unwrap() else {
            panic!("fano ray must fiber");
        };
        assert_eq!(base.rank(), 1);
        assert!(base.is_complete());
        let detection = detect_pn1_bundle_over_p1(&f).unwrap().unwrap();
        assert!(!detection.is_bundle);
        assert_eq!(detection.a_plus, int(2));
        let suite = theorem_suite(&f, None).unwrap();
        assert!(suite.all_pass);
    }

    #[test]
    fn suite_passes_on_small_examples() {
        for f in [p2(), ex_4_3_1()] {
            let suite = theorem_suite(&f, None).unwrap();
            assert!(suite.all_pass, "{:?}", suite.rays);
        }
    }

    #[test]
    fn ample_witness_is_found() {
        let f = ex_4_3_1();
        let d = some_ample_cartier(&f).unwrap().unwrap();
        assert!(is_ample(&f, &d).unwrap());
        assert!(crate::divisor::is_cartier(&f, &d).unwrap());
    }
}
