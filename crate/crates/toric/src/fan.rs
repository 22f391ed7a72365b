//! Fans of rational polyhedral cones: validation, walls, multiplicities, star
//! subdivisions, quotient (star) fans, lattice rebasing, refinement morphisms,
//! and unimodular fan isomorphism.
//!
//! A `Fan` is immutable after construction. Derived data (cone H-forms, the
//! validation report, walls) is computed on demand and cached, so fans are
//! cheap to query repeatedly and safe to share across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num::{One, Signed, Zero};

use crate::arith::{
    dot_int, int, is_primitive, primitive_direction, to_rat, to_rat_vec, Int, Rat,
};
use crate::cone::ConeGeometry;
use crate::error::Error;
use crate::matrix::{IntMat, RatMat};
use crate::polyhedron::extreme_ray_indices;

pub type LatticeVector = Vec<Int>;

/// A cone of a fan, stored as the sorted set of indices of its extreme rays.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cone {
    rays: Vec<usize>,
}

impl Cone {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        Cone { rays }
    }

    pub fn rays(&self) -> &[usize] {
        &self.rays
    }

    pub fn contains_all(&self, other: &[usize]) -> bool {
        other.iter().all(|r| self.rays.binary_search(r).is_ok())
    }
}

/// A codimension-one cone with its adjacent maximal cones. `right` is absent
/// for walls on the boundary of the support; only interior walls carry curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub rays: Vec<usize>,
    pub left: usize,
    pub right: Option<usize>,
}

impl Wall {
    pub fn is_interior(&self) -> bool {
        self.right.is_some()
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub is_fan: bool,
    pub is_complete: bool,
    pub is_convex_support: bool,
    pub is_simplicial: bool,
    pub is_smooth: bool,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    max_cones: Vec<Cone>,
    geoms: OnceLock<Vec<Option<ConeGeometry>>>,
    report: OnceLock<ValidationReport>,
    walls: OnceLock<Option<Vec<Wall>>>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays && self.max_cones == other.max_cones
    }
}

impl Eq for Fan {}

impl Fan {
    /// Shape-checks only; geometric fan conditions are computed by
    /// [`Fan::validate`] and reported, not thrown.
    pub fn new(
        rank: usize,
        rays: Vec<LatticeVector>,
        max_cones: Vec<Cone>,
    ) -> Result<Self, Error> {
        for r in &rays {
            if r.len() != rank {
                return Err(Error::InvalidFan(format!(
                    "ray {:?} has length {} but the fan has rank {}",
                    r,
                    r.len(),
                    rank
                )));
            }
        }
        for c in &max_cones {
            for &i in c.rays() {
                if i >= rays.len() {
                    return Err(Error::InvalidFan(format!("cone ray index {i} out of range")));
                }
            }
        }
        let max_cones = if rank == 0 { vec![Cone::new(Vec::new())] } else { max_cones };
        Ok(Fan {
            rank,
            rays,
            max_cones,
            geoms: OnceLock::new(),
            report: OnceLock::new(),
            walls: OnceLock::new(),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.rays[i]
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    pub fn ray_index(&self, v: &[Int]) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    fn cone_gens(&self, cone: &Cone) -> Vec<LatticeVector> {
        cone.rays().iter().map(|&i| self.rays[i].clone()).collect()
    }

    fn geometries(&self) -> &[Option<ConeGeometry>] {
        self.geoms.get_or_init(|| {
            self.max_cones
                .iter()
                .map(|c| ConeGeometry::new(self.cone_gens(c), self.rank).ok())
                .collect()
        })
    }

    pub fn geometry(&self, cone_idx: usize) -> Result<&ConeGeometry, Error> {
        self.geometries()[cone_idx]
            .as_ref()
            .ok_or(Error::NotStronglyConvex)
    }

    /// Geometric H-form of an arbitrary ray-index set (not necessarily a cone
    /// of the fan).
    pub fn cone_geometry_of(&self, rays: &[usize]) -> Result<ConeGeometry, Error> {
        let gens = rays.iter().map(|&i| self.rays[i].clone()).collect();
        ConeGeometry::new(gens, self.rank)
    }

    /// The full validation report (cached).
    pub fn validate(&self) -> &ValidationReport {
        self.report.get_or_init(|| self.compute_report())
    }

    pub fn require_valid(&self) -> Result<(), Error> {
        let rep = self.validate();
        if rep.is_fan {
            Ok(())
        } else {
            Err(Error::InvalidFan(rep.errors.join("; ")))
        }
    }

    pub fn is_complete(&self) -> bool {
        self.validate().is_complete
    }

    pub fn is_simplicial(&self) -> bool {
        self.validate().is_simplicial
    }

    /// Complete, or convex full-dimensional support (the relative setting).
    pub fn has_curve_support(&self) -> bool {
        let rep = self.validate();
        rep.is_complete || rep.is_convex_support
    }

    fn compute_report(&self) -> ValidationReport {
        let mut errors = Vec::new();
        if self.rank == 0 {
            return ValidationReport {
                is_fan: true,
                is_complete: true,
                is_convex_support: true,
                is_simplicial: true,
                is_smooth: true,
                errors,
            };
        }
        let mut seen_rays: BTreeSet<&LatticeVector> = BTreeSet::new();
        for (i, r) in self.rays.iter().enumerate() {
            if r.iter().all(Zero::is_zero) {
                errors.push(format!("ray {i} is zero"));
            } else if !is_primitive(r) {
                errors.push(format!("ray {i} = {r:?} is not primitive"));
            }
            if !seen_rays.insert(r) {
                errors.push(format!("ray {i} = {r:?} is a duplicate"));
            }
        }
        if self.max_cones.is_empty() {
            errors.push("fan has no maximal cones".to_string());
        }
        let geoms = self.geometries();
        for (ci, g) in geoms.iter().enumerate() {
            match g {
                None => errors.push(format!("cone {ci} contains a line")),
                Some(geom) => {
                    let gens_rat: Vec<Vec<Rat>> =
                        geom.gens.iter().map(|g| to_rat_vec(g)).collect();
                    match extreme_ray_indices(&gens_rat) {
                        Ok(ext) => {
                            if ext.len() != geom.gens.len() {
                                errors.push(format!(
                                    "cone {ci} lists generators that are not extreme rays"
                                ));
                            }
                        }
                        Err(_) => errors.push(format!("cone {ci} contains a line")),
                    }
                }
            }
        }
        // listed maximal cones must not be nested
        for i in 0..self.max_cones.len() {
            for j in 0..self.max_cones.len() {
                if i == j {
                    continue;
                }
                if let (Some(_), Some(gj)) = (&geoms[i], &geoms[j]) {
                    let inside = self.max_cones[i]
                        .rays()
                        .iter()
                        .all(|&r| gj.contains_int(&self.rays[r]));
                    if inside {
                        errors.push(format!("maximal cone {i} is contained in cone {j}"));
                    }
                }
            }
        }
        // pairwise: the intersection of two cones is a face of each
        if errors.is_empty() {
            for i in 0..self.max_cones.len() {
                for j in i + 1..self.max_cones.len() {
                    let (Some(gi), Some(gj)) = (&geoms[i], &geoms[j]) else {
                        continue;
                    };
                    if !intersection_is_common_face(gi, gj) {
                        errors.push(format!(
                            "cones {i} and {j} do not intersect in a common face"
                        ));
                    }
                }
            }
        }
        let is_fan = errors.is_empty();
        let is_simplicial = is_fan
            && geoms
                .iter()
                .flatten()
                .all(|g| g.gens.len() == g.rank);
        let is_smooth = is_fan
            && is_simplicial
            && self
                .max_cones
                .iter()
                .all(|c| self.multiplicity(c.rays()).map(|m| m.is_one()).unwrap_or(false));
        let pure = is_fan && geoms.iter().flatten().all(|g| g.rank == self.rank);
        let (is_complete, is_convex_support) = if !pure {
            (false, false)
        } else {
            match self.compute_walls() {
                None => (false, false),
                Some(walls) => {
                    let complete = walls.iter().all(Wall::is_interior);
                    let convex = complete
                        || walls.iter().all(|w| {
                            w.right.is_some() || self.boundary_wall_supports_all_rays(w)
                        });
                    (complete, convex)
                }
            }
        };
        ValidationReport {
            is_fan,
            is_complete,
            is_convex_support,
            is_simplicial,
            is_smooth,
            errors,
        }
    }

    /// Supporting-hyperplane test for convex support: the facet normal of the
    /// boundary wall must be nonnegative on every ray of the fan.
    fn boundary_wall_supports_all_rays(&self, wall: &Wall) -> bool {
        let Ok(geom) = self.geometry(wall.left) else {
            return false;
        };
        let cone = &self.max_cones[wall.left];
        let normal = geom.facets.iter().find_map(|f| {
            let tight: Vec<usize> = f.tight_gens.iter().map(|&g| cone.rays()[g]).collect();
            let mut sorted = tight;
            sorted.sort_unstable();
            (sorted == wall.rays).then(|| f.normal.clone())
        });
        let Some(normal) = normal else {
            return false;
        };
        self.rays.iter().all(|r| !dot_int(&normal, r).is_negative())
    }

    fn compute_walls(&self) -> Option<Vec<Wall>> {
        let geoms = self.geometries();
        let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            let geom = geoms[ci].as_ref()?;
            if geom.rank != self.rank {
                return None;
            }
            for f in &geom.facets {
                let mut key: Vec<usize> =
                    f.tight_gens.iter().map(|&g| cone.rays()[g]).collect();
                key.sort_unstable();
                map.entry(key).or_default().push(ci);
            }
        }
        let mut walls = Vec::new();
        for (rays, mut adj) in map {
            adj.sort_unstable();
            adj.dedup();
            match adj.len() {
                1 => walls.push(Wall { rays, left: adj[0], right: None }),
                2 => walls.push(Wall { rays, left: adj[0], right: Some(adj[1]) }),
                _ => return None, // three cones on a wall: not a fan
            }
        }
        Some(walls)
    }

    /// All codimension-one cones with adjacency. Requires a valid fan whose
    /// support is complete or a convex full-dimensional cone.
    pub fn walls(&self) -> Result<&[Wall], Error> {
        self.require_valid()?;
        if !self.has_curve_support() {
            return Err(Error::NotComplete);
        }
        self.walls
            .get_or_init(|| self.compute_walls())
            .as_deref()
            .ok_or(Error::NotComplete)
    }

    pub fn interior_walls(&self) -> Result<Vec<&Wall>, Error> {
        Ok(self.walls()?.iter().filter(|w| w.is_interior()).collect())
    }

    /// Index of the lattice generated by the cone's primitive ray generators
    /// inside the lattice spanned by the cone. 1 exactly for smooth cones.
    pub fn multiplicity(&self, cone_rays: &[usize]) -> Result<Int, Error> {
        let gens: Vec<LatticeVector> =
            cone_rays.iter().map(|&i| self.rays[i].clone()).collect();
        if gens.is_empty() {
            return Ok(Int::one());
        }
        let mat = RatMat::from_rows(gens.iter().map(|g| to_rat_vec(g)).collect());
        if mat.rank() != gens.len() {
            return Err(Error::NotSimplicial);
        }
        let rows: Vec<LatticeVector> = gens;
        Ok(IntMat::from_rows(rows).elementary_divisor_product())
    }

    pub fn support_contains(&self, v: &[Int]) -> bool {
        (0..self.max_cones.len()).any(|ci| {
            self.geometries()[ci]
                .as_ref()
                .is_some_and(|g| g.contains_int(v))
        })
    }

    /// Star subdivision at a primitive vector in the support: every cone
    /// containing `v` is replaced by the joins of `v` with its facets not
    /// containing `v`.
    pub fn star_subdivision(&self, v: &[Int]) -> Result<Fan, Error> {
        self.require_valid()?;
        if !is_primitive(v) {
            return Err(Error::BadParameters(
                "star subdivision point must be primitive".to_string(),
            ));
        }
        if self.ray_index(v).is_some() {
            return Err(Error::AlreadyARay);
        }
        if !self.support_contains(v) {
            return Err(Error::NotInSupport);
        }
        let mut rays = self.rays.clone();
        let new_ray = rays.len();
        rays.push(v.to_vec());
        let mut cones = Vec::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            let geom = self.geometry(ci)?;
            if !geom.contains_int(v) {
                cones.push(cone.clone());
                continue;
            }
            for f in &geom.facets {
                if dot_int(&f.normal, v).is_zero() {
                    continue; // facet contains v
                }
                let mut c: Vec<usize> =
                    f.tight_gens.iter().map(|&g| cone.rays()[g]).collect();
                c.push(new_ray);
                cones.push(Cone::new(c));
            }
        }
        cones.sort();
        cones.dedup();
        Fan::new(self.rank, rays, cones)
    }

    /// The fan Star(tau) in the quotient lattice N/N_tau together with the
    /// projection matrix (acting on row vectors on the right).
    pub fn star_quotient(&self, tau: &[usize]) -> Result<StarQuotient, Error> {
        self.require_valid()?;
        let tau = Cone::new(tau.to_vec());
        let host = self
            .max_cones
            .iter()
            .position(|c| c.contains_all(tau.rays()))
            .ok_or(Error::ConeNotInFan)?;
        // tau must be an actual face of its host cone
        if !tau.rays().is_empty() {
            let geom = self.geometry(host)?;
            let sum: Vec<Rat> = (0..self.rank)
                .map(|c| {
                    tau.rays()
                        .iter()
                        .map(|&r| to_rat(&self.rays[r][c]))
                        .sum()
                })
                .collect();
            let tight = geom.tight_facets_at(&sum);
            let mut face_rays: Vec<usize> = self.max_cones[host]
                .rays()
                .iter()
                .enumerate()
                .filter(|&(g, _)| {
                    tight
                        .iter()
                        .all(|&f| geom.facets[f].tight_gens.contains(&g))
                })
                .map(|(_, &r)| r)
                .collect();
            face_rays.sort_unstable();
            if face_rays != tau.rays() {
                return Err(Error::ConeNotInFan);
            }
        }
        let gens: Vec<LatticeVector> =
            tau.rays().iter().map(|&i| self.rays[i].clone()).collect();
        let k = if gens.is_empty() {
            0
        } else {
            RatMat::from_rows(gens.iter().map(|g| to_rat_vec(g)).collect()).rank()
        };
        let quotient_rank = self.rank - k;
        // SNF of the generator matrix: the last columns of V project onto N/N_tau
        let projection = if gens.is_empty() {
            IntMat::identity(self.rank)
        } else {
            IntMat::from_rows(gens).smith_normal_form().v
        };
        let project = |x: &[Int]| -> Vec<Int> {
            (k..self.rank)
                .map(|j| (0..self.rank).map(|i| &x[i] * projection.at(i, j)).sum())
                .collect()
        };
        let mut new_rays: Vec<LatticeVector> = Vec::new();
        let mut cones: Vec<Cone> = Vec::new();
        for cone in &self.max_cones {
            if !cone.contains_all(tau.rays()) {
                continue;
            }
            let mut image_gens: Vec<Vec<Rat>> = Vec::new();
            let mut image_prims: Vec<LatticeVector> = Vec::new();
            for &r in cone.rays() {
                let img = project(&self.rays[r]);
                if let Some(p) = primitive_direction(&to_rat_vec(&img)) {
                    image_gens.push(to_rat_vec(&img));
                    image_prims.push(p);
                }
            }
            let keep = extreme_ray_indices(&image_gens)?;
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
            let mut m = IntMat::zero(self.rank, quotient_rank);
            for i in 0..self.rank {
                for j in 0..quotient_rank {
                    *m.at_mut(i, j) = projection.at(i, k + j).clone();
                }
            }
            m
        };
        Ok(StarQuotient {
            fan: Fan::new(quotient_rank, new_rays, cones)?,
            projection: proj_cols,
        })
    }

    /// A lattice vector `w` generating N modulo the wall's span, oriented
    /// toward the `right` cone: the quotient functional takes value 1 on `w`
    /// and is positive on the right cone's off-wall rays.
    pub fn wall_lift(&self, wall: &Wall) -> Result<Vec<Int>, Error> {
        let right = wall.right.ok_or(Error::BoundaryWall)?;
        let opp = self.max_cones[right]
            .rays()
            .iter()
            .copied()
            .find(|r| !wall.rays.contains(r))
            .ok_or_else(|| Error::InvalidFan("wall equals its adjacent cone".to_string()))?;
        let n = self.rank;
        let (functional, mut lift) = if wall.rays.is_empty() {
            if n != 1 {
                return Err(Error::InvalidFan("empty wall in rank > 1".to_string()));
            }
            (vec![Int::one()], vec![Int::one()])
        } else {
            let gens: Vec<LatticeVector> =
                wall.rays.iter().map(|&i| self.rays[i].clone()).collect();
            let snf = IntMat::from_rows(gens).smith_normal_form();
            if snf.rank() != n - 1 {
                return Err(Error::InvalidFan("wall is not of codimension one".to_string()));
            }
            let functional: Vec<Int> = (0..n).map(|i| snf.v.at(i, n - 1).clone()).collect();
            let v_rat = snf.v.to_rat();
            let v_inv = v_rat.inverse().expect("unimodular");
            let lift: Vec<Int> = (0..n)
                .map(|j| {
                    debug_assert!(v_inv.at(n - 1, j).is_integer());
                    v_inv.at(n - 1, j).to_integer()
                })
                .collect();
            (functional, lift)
        };
        let side = dot_int(&functional, &self.rays[opp]);
        debug_assert!(!side.is_zero());
        if side.is_negative() {
            for c in lift.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        Ok(lift)
    }

    /// The minimal cone of the fan containing all the given vectors: a host
    /// maximal cone index and the ray set of the minimal face. Errors when the
    /// vectors leave the support.
    pub fn minimal_cone_containing(&self, vectors: &[LatticeVector]) -> Result<(usize, Vec<usize>), Error> {
        self.require_valid()?;
        let host = (0..self.max_cones.len())
            .find(|&ci| {
                self.geometries()[ci]
                    .as_ref()
                    .is_some_and(|g| vectors.iter().all(|v| g.contains_int(v)))
            })
            .ok_or(Error::NotInSupport)?;
        let geom = self.geometry(host)?;
        let cone = &self.max_cones[host];
        if vectors.is_empty() {
            return Ok((host, Vec::new()));
        }
        let sum: Vec<Rat> = (0..self.rank)
            .map(|c| vectors.iter().map(|v| to_rat(&v[c])).sum())
            .collect();
        let tight = geom.tight_facets_at(&sum);
        let mut rays: Vec<usize> = cone
            .rays()
            .iter()
            .enumerate()
            .filter(|&(g, _)| tight.iter().all(|&f| geom.facets[f].tight_gens.contains(&g)))
            .map(|(_, &r)| r)
            .collect();
        rays.sort_unstable();
        Ok((host, rays))
    }

    /// The primitive functional generating (N/N_wall)^*, positive on the
    /// right cone. Pairs with `wall_lift`: functional(lift) = 1.
    pub fn wall_functional(&self, wall: &Wall) -> Result<Vec<Int>, Error> {
        let right = wall.right.ok_or(Error::BoundaryWall)?;
        let opp = self.max_cones[right]
            .rays()
            .iter()
            .copied()
            .find(|r| !wall.rays.contains(r))
            .ok_or_else(|| Error::InvalidFan("wall equals its adjacent cone".to_string()))?;
        let n = self.rank;
        let mut functional = if wall.rays.is_empty() {
            if n != 1 {
                return Err(Error::InvalidFan("empty wall in rank > 1".to_string()));
            }
            vec![Int::one()]
        } else {
            let gens: Vec<LatticeVector> =
                wall.rays.iter().map(|&i| self.rays[i].clone()).collect();
            let snf = IntMat::from_rows(gens).smith_normal_form();
            if snf.rank() != n - 1 {
                return Err(Error::InvalidFan("wall is not of codimension one".to_string()));
            }
            (0..n).map(|i| snf.v.at(i, n - 1).clone()).collect()
        };
        if dot_int(&functional, &self.rays[opp]).is_negative() {
            for c in functional.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        Ok(functional)
    }

    /// Rewrites the fan over a finer lattice. Row i of `new_basis` gives the
    /// coordinates of old basis vector e_i in the new basis; rays are
    /// re-primitivized.
    pub fn rebase_lattice(&self, new_basis: &IntMat) -> Result<Fan, Error> {
        if new_basis.rows != self.rank || new_basis.cols != self.rank {
            return Err(Error::NotAFinerLattice(format!(
                "expected a {0}x{0} matrix",
                self.rank
            )));
        }
        if new_basis.det().is_zero() {
            return Err(Error::NotAFinerLattice("matrix is singular".to_string()));
        }
        let rays = self
            .rays
            .iter()
            .map(|r| {
                let image: Vec<Int> = (0..self.rank)
                    .map(|j| (0..self.rank).map(|i| &r[i] * new_basis.at(i, j)).sum())
                    .collect();
                crate::arith::primitivize(&image).expect("nonsingular image of a ray")
            })
            .collect();
        Fan::new(self.rank, rays, self.max_cones.clone())
    }
}

pub struct StarQuotient {
    pub fan: Fan,
    /// n x (n-k) integer matrix; x maps to x * projection (row vector).
    pub projection: IntMat,
}

/// Is the intersection of two pointed cones a face of each? Decided exactly:
/// take a relative-interior point of the intersection, form the minimal face
/// of each cone containing it, and check both minimal faces land inside the
/// other cone.
fn intersection_is_common_face(a: &ConeGeometry, b: &ConeGeometry) -> bool {
    let inter = a.system().intersection(&b.system());
    let x = inter.relative_interior_point();
    debug_assert!(a.contains_rat(&x) && b.contains_rat(&x));
    let face_a = a.face_system(&a.tight_facets_at(&x));
    let face_b = b.face_system(&b.tight_facets_at(&x));
    face_a.is_subset_of(&b.system()) && face_b.is_subset_of(&a.system())
}

/// Image data of a refinement of fans: for each cone of the fine fan, the
/// minimal cone of the coarse fan containing it.
#[derive(Clone, Debug)]
pub struct RefinementMap {
    pub fine: Fan,
    pub coarse: Fan,
    /// for each fine maximal cone: a coarse maximal cone containing it
    pub cone_hosts: Vec<usize>,
    /// for each fine maximal cone: ray set (coarse indices) of the minimal
    /// coarse cone containing it
    pub minimal_cones: Vec<Vec<usize>>,
    /// for each fine ray: a coarse maximal cone containing it
    pub ray_hosts: Vec<usize>,
    /// fine ray indices that are not rays of the coarse fan
    pub exceptional_rays: Vec<usize>,
    /// ray sets coincide as sets of primitive vectors
    pub is_small: bool,
}

/// Computes the refinement morphism data of `fine` over `coarse`. Errors when
/// some cone of `fine` is contained in no cone of `coarse` or the lattices
/// differ.
pub fn refinement_map(fine: &Fan, coarse: &Fan) -> Result<RefinementMap, Error> {
    if fine.rank() != coarse.rank() {
        return Err(Error::NotARefinement("lattice ranks differ".to_string()));
    }
    fine.require_valid()?;
    coarse.require_valid()?;
    let mut cone_hosts = Vec::new();
    let mut minimal_cones = Vec::new();
    for (ci, cone) in fine.max_cones().iter().enumerate() {
        let host = (0..coarse.max_cones().len())
            .find(|&cj| {
                coarse.geometries()[cj].as_ref().is_some_and(|g| {
                    cone.rays().iter().all(|&r| g.contains_int(fine.ray(r)))
                })
            })
            .ok_or_else(|| {
                Error::NotARefinement(format!(
                    "fine cone {ci} is contained in no coarse cone"
                ))
            })?;
        cone_hosts.push(host);
        minimal_cones.push(minimal_face_rays(coarse, host, fine, cone.rays())?);
    }
    let mut ray_hosts = Vec::new();
    for r in fine.rays() {
        let host = (0..coarse.max_cones().len())
            .find(|&cj| {
                coarse.geometries()[cj]
                    .as_ref()
                    .is_some_and(|g| g.contains_int(r))
            })
            .ok_or_else(|| {
                Error::NotARefinement(format!("fine ray {r:?} is outside the coarse support"))
            })?;
        ray_hosts.push(host);
    }
    let coarse_ray_set: BTreeSet<&LatticeVector> = coarse.rays().iter().collect();
    let exceptional_rays: Vec<usize> = (0..fine.rays().len())
        .filter(|&i| !coarse_ray_set.contains(fine.ray(i)))
        .collect();
    let fine_ray_set: BTreeSet<&LatticeVector> = fine.rays().iter().collect();
    let is_small = exceptional_rays.is_empty()
        && coarse.rays().iter().all(|r| fine_ray_set.contains(r));
    Ok(RefinementMap {
        fine: fine.clone(),
        coarse: coarse.clone(),
        cone_hosts,
        minimal_cones,
        ray_hosts,
        exceptional_rays,
        is_small,
    })
}

/// Rays of the minimal face of coarse cone `host` containing the given rays of
/// the fine fan.
fn minimal_face_rays(
    coarse: &Fan,
    host: usize,
    fine: &Fan,
    fine_rays: &[usize],
) -> Result<Vec<usize>, Error> {
    let geom = coarse.geometry(host)?;
    let cone = &coarse.max_cones()[host];
    if fine_rays.is_empty() {
        return Ok(Vec::new());
    }
    let sum: Vec<Rat> = (0..fine.rank())
        .map(|c| fine_rays.iter().map(|&r| to_rat(&fine.ray(r)[c])).sum())
        .collect();
    let tight = geom.tight_facets_at(&sum);
    let mut rays: Vec<usize> = cone
        .rays()
        .iter()
        .enumerate()
        .filter(|&(g, _)| tight.iter().all(|&f| geom.facets[f].tight_gens.contains(&g)))
        .map(|(_, &r)| r)
        .collect();
    rays.sort_unstable();
    Ok(rays)
}

/// Searches for a unimodular change of coordinates carrying the rays and
/// maximal cones of `a` onto those of `b`. Acts on row vectors: x maps to x*U.
pub fn unimodular_isomorphism(a: &Fan, b: &Fan) -> Option<IntMat> {
    let n = a.rank();
    if n != b.rank()
        || a.rays().len() != b.rays().len()
        || a.max_cones().len() != b.max_cones().len()
    {
        return None;
    }
    if n == 0 {
        return Some(IntMat::identity(0));
    }
    // first linearly independent n-subset of a's rays
    let mut base: Vec<usize> = Vec::new();
    for i in 0..a.rays().len() {
        let mut trial = base.clone();
        trial.push(i);
        let m = RatMat::from_rows(trial.iter().map(|&r| to_rat_vec(a.ray(r))).collect());
        if m.rank() == trial.len() {
            base = trial;
        }
        if base.len() == n {
            break;
        }
    }
    if base.len() < n {
        return None;
    }
    let a_mat = RatMat::from_rows(base.iter().map(|&r| to_rat_vec(a.ray(r))).collect());
    let a_inv = a_mat.inverse()?;
    let b_count = b.rays().len();
    let mut pick: Vec<usize> = Vec::new();
    let mut used = vec![false; b_count];
    fn search(
        a: &Fan,
        b: &Fan,
        base: &[usize],
        a_inv: &RatMat,
        pick: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> Option<IntMat> {
        let n = a.rank();
        if pick.len() == n {
            let b_mat = RatMat::from_rows(pick.iter().map(|&r| to_rat_vec(b.ray(r))).collect());
            // solve base_rays * U = picked_rays
            let mut u = RatMat::zero(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut s = Rat::zero();
                    for k in 0..n {
                        s += a_inv.at(i, k) * b_mat.at(k, j);
                    }
                    *u.at_mut(i, j) = s;
                }
            }
            let mut u_int = IntMat::zero(n, n);
            for i in 0..n {
                for j in 0..n {
                    if !u.at(i, j).is_integer() {
                        return None;
                    }
                    *u_int.at_mut(i, j) = u.at(i, j).to_integer();
                }
            }
            if u_int.det().abs() != int(1) {
                return None;
            }
            // the ray map must be a bijection respecting the cone sets
            let mut perm = vec![0usize; a.rays().len()];
            for (ri, r) in a.rays().iter().enumerate() {
                let img: Vec<Int> = (0..n)
                    .map(|j| (0..n).map(|i| &r[i] * u_int.at(i, j)).sum())
                    .collect();
                match b.ray_index(&img) {
                    Some(bi) => perm[ri] = bi,
                    None => return None,
                }
            }
            let mut mapped: Vec<Cone> = a
                .max_cones()
                .iter()
                .map(|c| Cone::new(c.rays().iter().map(|&r| perm[r]).collect()))
                .collect();
            mapped.sort();
            let mut target = b.max_cones().to_vec();
            target.sort();
            if mapped == target {
                return Some(u_int);
            }
            return None;
        }
        for cand in 0..b.rays().len() {
            if used[cand] {
                continue;
            }
            used[cand] = true;
            pick.push(cand);
            if let Some(u) = search(a, b, base, a_inv, pick, used) {
                return Some(u);
            }
            pick.pop();
            used[cand] = false;
        }
        None
    }
    search(a, b, &base, &a_inv, &mut pick, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int_vec;

    pub fn fan(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
        Fan::new(
            rank,
            rays.iter().map(|r| int_vec(r)).collect(),
            cones.iter().map(|c| Cone::new(c.to_vec())).collect(),
        )
        .unwrap()
    }

    pub fn p2() -> Fan {
        fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]])
    }

    fn p1xp1() -> Fan {
        fan(
            2,
            &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]],
            &[&[0, 2], &[0, 3], &[1, 2], &[1, 3]],
        )
    }

    #[test]
    fn p2_validates_complete_smooth() {
        let f = p2();
        let rep = f.validate();
        assert!(rep.is_fan && rep.is_complete && rep.is_smooth && rep.is_simplicial);
        assert!(rep.is_convex_support);
    }

    #[test]
    fn overlapping_cones_are_not_a_fan() {
        // second cone's ray (1,1) is interior to the first quadrant, so the
        // second cone is nested inside the first
        let f = fan(2, &[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 1], &[0, 2]]);
        let rep = f.validate();
        assert!(!rep.is_fan);
        assert!(rep.errors.iter().any(|e| e.contains("contained")));
    }

    #[test]
    fn improper_overlap_is_not_a_common_face() {
        // the cones overlap in a two-dimensional region that is a face of
        // neither
        let f = fan(
            2,
            &[&[1, 0], &[1, 2], &[1, 1], &[0, 1]],
            &[&[0, 1], &[2, 3]],
        );
        let rep = f.validate();
        assert!(!rep.is_fan);
        assert!(rep.errors.iter().any(|e| e.contains("common face")));
    }

    #[test]
    fn duplicate_and_nonprimitive_rays_are_reported() {
        let f = fan(2, &[&[2, 0], &[0, 1], &[2, 0]], &[&[0, 1]]);
        let rep = f.validate();
        assert!(!rep.is_fan);
        assert!(rep.errors.iter().any(|e| e.contains("not primitive")));
        assert!(rep.errors.iter().any(|e| e.contains("duplicate")));
    }

    #[test]
    fn wall_counts() {
        assert_eq!(p2().interior_walls().unwrap().len(), 3);
        assert_eq!(p1xp1().interior_walls().unwrap().len(), 4);
    }

    #[test]
    fn affine_chart_has_convex_support() {
        let f = fan(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]);
        let rep = f.validate();
        assert!(rep.is_fan && !rep.is_complete && rep.is_convex_support);
        let walls = f.walls().unwrap();
        assert_eq!(walls.len(), 2);
        assert!(walls.iter().all(|w| !w.is_interior()));
    }

    #[test]
    fn multiplicities() {
        let f = fan(2, &[&[1, 0], &[1, 2]], &[&[0, 1]]);
        assert_eq!(f.multiplicity(&[0, 1]).unwrap(), int(2));
        assert_eq!(p2().multiplicity(&[0, 1]).unwrap(), int(1));
        // a 2-cone in rank 3: SNF elementary divisors 1, 2
        let g = fan(3, &[&[2, -1, 0], &[0, 1, 0]], &[&[0, 1]]);
        assert_eq!(g.multiplicity(&[0, 1]).unwrap(), int(2));
    }

    #[test]
    fn multiplicity_requires_simplicial() {
        let f = fan(
            3,
            &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]],
            &[&[0, 1, 2, 3]],
        );
        assert!(matches!(f.multiplicity(&[0, 1, 2, 3]), Err(Error::NotSimplicial)));
    }

    #[test]
    fn star_subdivision_blowup_of_p2() {
        let x = p2().star_subdivision(&int_vec(&[1, 1])).unwrap();
        assert_eq!(x.rays().len(), 4);
        let rep = x.validate();
        assert!(rep.is_fan && rep.is_complete && rep.is_smooth);
        assert_eq!(x.interior_walls().unwrap().len(), 4);
    }

    #[test]
    fn star_subdivision_rejects_bad_points() {
        assert!(matches!(
            p2().star_subdivision(&int_vec(&[1, 0])),
            Err(Error::AlreadyARay)
        ));
        assert!(matches!(
            p2().star_subdivision(&int_vec(&[2, 2])),
            Err(Error::BadParameters(_))
        ));
        let affine = fan(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]);
        assert!(matches!(
            affine.star_subdivision(&int_vec(&[-1, 2])),
            Err(Error::NotInSupport)
        ));
    }

    #[test]
    fn star_quotient_of_maximal_cone_is_a_point() {
        let q = p2().star_quotient(&[0, 1]).unwrap();
        assert_eq!(q.fan.rank(), 0);
        assert!(q.fan.validate().is_fan);
        assert!(q.fan.validate().is_complete);
    }

    #[test]
    fn star_quotient_of_ray_on_p2_is_p1() {
        let q = p2().star_quotient(&[0]).unwrap();
        assert_eq!(q.fan.rank(), 1);
        assert!(q.fan.is_complete());
        assert_eq!(q.fan.rays().len(), 2);
    }

    #[test]
    fn star_quotient_requires_a_cone_of_the_fan() {
        // {0, 1} with rays (1,0) and (0,1) is a cone of p2 but {0, 1, 2} is not
        assert!(p2().star_quotient(&[0, 1, 2]).is_err());
    }

    #[test]
    fn rebase_identity_and_ex_3_1_10_rays() {
        let p3 = fan(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]],
            &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
        );
        let same = p3.rebase_lattice(&IntMat::identity(3)).unwrap();
        assert_eq!(same, p3);
        // N + (1/2,1/2,0)Z: e1 = 2*f1 - f2, e2 = f2, e3 = f3
        let m = IntMat::from_rows(vec![
            int_vec(&[2, -1, 0]),
            int_vec(&[0, 1, 0]),
            int_vec(&[0, 0, 1]),
        ]);
        let x = p3.rebase_lattice(&m).unwrap();
        assert_eq!(
            x.rays().to_vec(),
            vec![
                int_vec(&[2, -1, 0]),
                int_vec(&[0, 1, 0]),
                int_vec(&[0, 0, 1]),
                int_vec(&[-2, 0, -1]),
            ]
        );
        assert!(x.validate().is_fan && x.is_complete());
    }

    #[test]
    fn rebase_rejects_singular() {
        let m = IntMat::zero(2, 2);
        assert!(matches!(
            p2().rebase_lattice(&m),
            Err(Error::NotAFinerLattice(_))
        ));
    }

    #[test]
    fn identity_refinement_is_small() {
        let f = p2();
        let m = refinement_map(&f, &f).unwrap();
        assert!(m.is_small);
        assert!(m.exceptional_rays.is_empty());
    }

    #[test]
    fn blowup_refinement_has_exceptional_ray() {
        let x = p2().star_subdivision(&int_vec(&[1, 1])).unwrap();
        let m = refinement_map(&x, &p2()).unwrap();
        assert!(!m.is_small);
        assert_eq!(m.exceptional_rays, vec![3]);
        assert!(refinement_map(&p2(), &x).is_err());
    }

    #[test]
    fn fan_isomorphism_detects_relabeling() {
        let a = p2();
        // same fan in a sheared basis
        let m = IntMat::from_rows(vec![int_vec(&[1, 1]), int_vec(&[0, 1])]);
        let b = a.rebase_lattice(&m).unwrap();
        let u = unimodular_isomorphism(&a, &b).unwrap();
        assert_eq!(u.det().abs(), int(1));
        assert!(unimodular_isomorphism(&a, &p1xp1()).is_none());
    }
}
