//! Intersection numbers of Q-Cartier divisors with torus-invariant curves,
//! numerical curve classes, and the fake-weighted-projective-space audit that
//! cross-checks the support-function formula against the multiplicity-ratio
//! closed form.

use num::{One, Signed, Zero};

use crate::arith::{dot_rat_int, primitive_direction, to_rat, to_rat_vec, Int, Rat};
use crate::divisor::{canonical_divisor, local_support, TorusDivisor};
use crate::error::Error;
use crate::fan::{Fan, Wall};
use crate::matrix::{IntMat, RatMat};

/// D . V(mu) for an interior wall mu: the kink of the support function across
/// the wall, <u_left - u_right, w> with w a lattice lift of the primitive
/// quotient generator pointing to the right side. Swapping the two charts
/// gives the same value.
pub fn wall_degree(fan: &Fan, d: &TorusDivisor, wall: &Wall) -> Result<Rat, Error> {
    let right = wall.right.ok_or(Error::BoundaryWall)?;
    let u_left = local_support(fan, d, wall.left)?;
    let u_right = local_support(fan, d, right)?;
    let lift = fan.wall_lift(wall)?;
    let diff: Vec<Rat> = u_left.iter().zip(&u_right).map(|(a, b)| a - b).collect();
    Ok(dot_rat_int(&diff, &lift))
}

/// The numerical class of a wall curve: its pairing vector against all prime
/// divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveClass {
    pub pairings: Vec<Rat>,
}

impl CurveClass {
    /// Pairing against an arbitrary divisor, by linearity.
    pub fn degree(&self, d: &TorusDivisor) -> Rat {
        self.pairings
            .iter()
            .zip(&d.coefficients)
            .map(|(p, c)| p * c)
            .sum()
    }

    /// Primitive integer representative of the ray spanned by this class.
    pub fn primitive(&self) -> Option<Vec<Int>> {
        primitive_direction(&self.pairings)
    }
}

/// Pairings (D_rho . V(mu))_rho of an interior wall on a simplicial fan.
pub fn curve_class(fan: &Fan, wall: &Wall) -> Result<CurveClass, Error> {
    if !fan.is_simplicial() {
        return Err(Error::NotSimplicial);
    }
    let right = wall.right.ok_or(Error::BoundaryWall)?;
    let lift = fan.wall_lift(wall)?;
    // one local solve per chart, reused for all prime divisors
    let left_cone = &fan.max_cones()[wall.left];
    let right_cone = &fan.max_cones()[right];
    let solve_chart = |cone: &crate::fan::Cone| -> Result<RatMat, Error> {
        let rows: Vec<Vec<Rat>> = cone.rays().iter().map(|&r| to_rat_vec(fan.ray(r))).collect();
        RatMat::from_rows(rows)
            .inverse()
            .ok_or(Error::NotSimplicial)
    };
    let inv_left = solve_chart(left_cone)?;
    let inv_right = solve_chart(right_cone)?;
    // u for D = D_rho on a chart: column of the inverse, negated, when rho is
    // in the chart; zero otherwise
    let chart_u = |inv: &RatMat, cone: &crate::fan::Cone, rho: usize| -> Vec<Rat> {
        match cone.rays().iter().position(|&r| r == rho) {
            None => vec![Rat::zero(); fan.rank()],
            Some(k) => (0..fan.rank()).map(|i| -inv.at(i, k).clone()).collect(),
        }
    };
    let pairings = (0..fan.rays().len())
        .map(|rho| {
            let ul = chart_u(&inv_left, left_cone, rho);
            let ur = chart_u(&inv_right, right_cone, rho);
            let diff: Vec<Rat> = ul.iter().zip(&ur).map(|(a, b)| a - b).collect();
            dot_rat_int(&diff, &lift)
        })
        .collect();
    Ok(CurveClass { pairings })
}

/// Audit of a fake weighted projective space (complete simplicial fan with
/// n+1 rays): the weight relation, per-wall multiplicity ratios, anticanonical
/// wall degrees computed both ways, the paper's degree bound on the wall
/// dropping the two largest weights, and the equality analysis.
#[derive(Clone, Debug)]
pub struct FakeWpsReport {
    /// positive integers with gcd 1, aligned with the rays: sum a_i v_i = 0
    pub weights: Vec<Int>,
    /// per interior wall: its ray set, the two dropped ray indices,
    /// mult(mu)/mult(sigma_left), -K degree by the support-function formula,
    /// and by the closed form
    pub walls: Vec<WpsWallLine>,
    pub min_degree: Rat,
    /// -K degree of the wall dropping the two largest weights
    pub extreme_wall_degree: Rat,
    /// min-wall degree <= n+1
    pub bound_holds: bool,
    /// all weights are 1 and mult(mu_{n,n+1}) = mult(sigma_n)
    pub equality_case: bool,
    /// support-function and multiplicity-ratio formulas agree on every wall
    pub oracle_agrees: bool,
    /// index of the sublattice spanned by the rays; 1 iff a genuine weighted
    /// projective space
    pub lattice_index: Int,
    pub is_wps: bool,
}

#[derive(Clone, Debug)]
pub struct WpsWallLine {
    pub wall_rays: Vec<usize>,
    pub dropped: (usize, usize),
    pub mult_ratio: Rat,
    pub degree: Rat,
    pub closed_form: Rat,
}

pub fn fake_wps_audit(fan: &Fan) -> Result<FakeWpsReport, Error> {
    let n = fan.rank();
    let rep = fan.validate();
    if !rep.is_fan || !rep.is_complete || !rep.is_simplicial || fan.rays().len() != n + 1 {
        return Err(Error::NotFakeWPS(format!(
            "need a complete simplicial fan with {} rays",
            n + 1
        )));
    }
    // the unique positive relation sum a_i v_i = 0
    let ray_mat = RatMat::from_rows(fan.rays().iter().map(|r| to_rat_vec(r)).collect());
    let kernel = ray_mat.transpose().kernel();
    if kernel.len() != 1 {
        return Err(Error::NotFakeWPS("rays admit no unique relation".to_string()));
    }
    let mut weights = primitive_direction(&kernel[0]).expect("nonzero kernel vector");
    if weights.iter().any(Signed::is_negative) {
        for w in weights.iter_mut() {
            *w = -std::mem::take(w);
        }
    }
    if !weights.iter().all(Signed::is_positive) {
        return Err(Error::NotFakeWPS(
            "rays are not positively spanning".to_string(),
        ));
    }
    let weight_sum: Int = weights.iter().cloned().sum();
    let k = canonical_divisor(fan);
    let mut lines = Vec::new();
    let mut oracle_agrees = true;
    for wall in fan.walls()? {
        let right = wall.right.expect("complete fan walls are interior");
        let degree = -wall_degree(fan, &k, wall)?;
        // the two rays missing from the wall; the left chart misses exactly one
        let dropped_left = (0..fan.rays().len())
            .find(|r| !fan.max_cones()[wall.left].rays().contains(r))
            .expect("chart misses one ray");
        let dropped_right = (0..fan.rays().len())
            .find(|r| !fan.max_cones()[right].rays().contains(r))
            .expect("chart misses one ray");
        let mult_wall = fan.multiplicity(&wall.rays)?;
        let mult_left = fan.multiplicity(fan.max_cones()[wall.left].rays())?;
        let mult_ratio = Rat::new(mult_wall, mult_left);
        // -K . V(mu_{i,j}) = (1/a_j) (sum a) mult(mu)/mult(sigma_i) on the
        // chart sigma_i, where v_j is the chart's off-wall ray
        let closed_form = to_rat(&weight_sum) / to_rat(&weights[dropped_right]) * &mult_ratio;
        if closed_form != degree {
            oracle_agrees = false;
        }
        lines.push(WpsWallLine {
            wall_rays: wall.rays.clone(),
            dropped: (dropped_left, dropped_right),
            mult_ratio,
            degree,
            closed_form,
        });
    }
    let min_degree = lines
        .iter()
        .map(|l| l.degree.clone())
        .min()
        .expect("a fake wps has walls");
    // wall dropping the two largest weights (ties broken by ray index)
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by_key(|&i| (weights[i].clone(), i));
    let top = (order[n - 1].min(order[n]), order[n - 1].max(order[n]));
    let extreme_wall_degree = lines
        .iter()
        .find(|l| {
            let d = (l.dropped.0.min(l.dropped.1), l.dropped.0.max(l.dropped.1));
            d == top
        })
        .map(|l| l.degree.clone())
        .expect("every ray pair spans a wall");
    let bound_holds = min_degree <= to_rat(&Int::from(n as i64 + 1));
    let top_wall_rays: Vec<usize> =
        (0..fan.rays().len()).filter(|r| *r != top.0 && *r != top.1).collect();
    let sigma_n_rays: Vec<usize> =
        (0..fan.rays().len()).filter(|r| *r != top.1).collect();
    let equality_case = weights.iter().all(One::is_one)
        && fan.multiplicity(&top_wall_rays)? == fan.multiplicity(&sigma_n_rays)?;
    let lattice_index =
        IntMat::from_rows(fan.rays().to_vec()).elementary_divisor_product();
    let is_wps = lattice_index.is_one();
    Ok(FakeWpsReport {
        weights,
        walls: lines,
        min_degree,
        extreme_wall_degree,
        bound_holds,
        equality_case,
        oracle_agrees,
        lattice_index,
        is_wps,
    })
}
