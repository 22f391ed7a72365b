//! Parameterized builders for the named varieties exercised throughout the
//! library: projective spaces, weighted projective spaces, the blow-up
//! examples, the weighted-blow-up family, the flip family, the rho = 2
//! fibrations, and seeded random fake weighted projective spaces. Together
//! they form the shipped corpus of the verification harness.

use std::collections::BTreeMap;

use num::{Integer, One, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{int, rat, to_rat, Int, Rat};
use crate::divisor::{canonical_divisor, pullback, TorusDivisor};
use crate::error::Error;
use crate::fan::{refinement_map, Cone, Fan};
use crate::matrix::IntMat;

/// A named example with integer parameters.
#[derive(Clone, Debug)]
pub struct ExampleSpec {
    pub name: String,
    pub params: BTreeMap<String, i64>,
}

impl ExampleSpec {
    pub fn new(name: &str) -> Self {
        ExampleSpec { name: name.to_string(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: i64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn get(&self, key: &str) -> Result<i64, Error> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::BadParameters(format!("missing parameter `{key}`")))
    }

    fn get_or(&self, key: &str, default: i64) -> i64 {
        self.params.get(key).copied().unwrap_or(default)
    }
}

/// A built example: the fan, its marked divisors, the values the source
/// formulas predict for it, and any companion fans (contraction targets,
/// flips).
#[derive(Clone, Debug)]
pub struct BuiltExample {
    pub name: String,
    pub fan: Fan,
    pub divisors: BTreeMap<String, TorusDivisor>,
    pub expected: BTreeMap<String, Rat>,
    pub related: BTreeMap<String, Fan>,
}

impl BuiltExample {
    fn new(name: String, fan: Fan) -> Self {
        BuiltExample {
            name,
            fan,
            divisors: BTreeMap::new(),
            expected: BTreeMap::new(),
            related: BTreeMap::new(),
        }
    }

    pub fn divisor(&self, name: &str) -> Option<&TorusDivisor> {
        self.divisors.get(name)
    }
}

/// The fan of P^n.
pub fn projective_space(n: usize) -> Result<Fan, Error> {
    if n == 0 {
        return Fan::new(0, Vec::new(), Vec::new());
    }
    let mut rays: Vec<Vec<Int>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    rays.push(vec![-Int::one(); n]);
    let cones = (0..=n)
        .map(|drop| Cone::new((0..=n).filter(|&i| i != drop).collect()))
        .collect();
    Fan::new(n, rays, cones)
}

pub fn p1xp1() -> Result<Fan, Error> {
    Fan::new(
        2,
        vec![
            vec![int(1), int(0)],
            vec![int(-1), int(0)],
            vec![int(0), int(1)],
            vec![int(0), int(-1)],
        ],
        vec![
            Cone::new(vec![0, 2]),
            Cone::new(vec![0, 3]),
            Cone::new(vec![1, 2]),
            Cone::new(vec![1, 3]),
        ],
    )
}

/// P(w_0, w_1, ..., w_n) with w_0 = 1: rays e_1, ..., e_n and
/// -(w_1 e_1 + ... + w_n e_n). The ray order is e_1, ..., e_n, v_0.
pub fn weighted_projective(weights: &[i64]) -> Result<Fan, Error> {
    if weights.len() < 2 || weights[0] != 1 || weights.iter().any(|&w| w <= 0) {
        return Err(Error::BadParameters(
            "weights must be positive with first weight 1".to_string(),
        ));
    }
    let n = weights.len() - 1;
    let mut rays: Vec<Vec<Int>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    rays.push((0..n).map(|j| int(-weights[j + 1])).collect());
    let cones = (0..=n)
        .map(|drop| Cone::new((0..=n).filter(|&i| i != drop).collect()))
        .collect();
    Fan::new(n, rays, cones)
}

/// Star subdivision of a smooth maximal cone at sum w_i g_i, the weighted
/// blow-up with the given weights (aligned with the cone's sorted ray list).
pub fn weighted_blowup(fan: &Fan, cone_rays: &[usize], weights: &[i64]) -> Result<Fan, Error> {
    if weights.len() != cone_rays.len() || weights.iter().any(|&w| w <= 0) {
        return Err(Error::BadParameters(
            "need one positive weight per cone generator".to_string(),
        ));
    }
    let mut g = Int::zero();
    for &w in weights {
        g = g.gcd(&int(w));
    }
    if !g.is_one() {
        return Err(Error::BadParameters("weights must have gcd 1".to_string()));
    }
    match fan.multiplicity(cone_rays) {
        Ok(m) if m.is_one() => {}
        _ => return Err(Error::NotSmoothCone),
    }
    let n = fan.rank();
    let mut center = vec![Int::zero(); n];
    for (&r, &w) in cone_rays.iter().zip(weights) {
        for c in 0..n {
            center[c] += int(w) * &fan.ray(r)[c];
        }
    }
    fan.star_subdivision(&center)
}

/// The weighted blow-up family over the cyclic-quotient chart: the cone
/// <e_1, ..., e_n> over N + Z(1/b)(1, a, ..., a), subdivided at that extra
/// lattice point. gcd(a, b) = 1.
///
/// Marked: E (exceptional), K. Expected: the discrepancy of E, the degree of
/// -K on the curve V(<e_2, ..., e_{n-1}, e_{n+1}>), E's degree on it, and the
/// boundary threshold (b-1)/b.
pub fn ex_3_2_7(n: usize, a: i64, b: i64) -> Result<BuiltExample, Error> {
    if n < 2 || a < 1 || b < 1 || int(a).gcd(&int(b)) != int(1) {
        return Err(Error::BadParameters(
            "need n >= 2 and coprime positive a, b".to_string(),
        ));
    }
    // affine chart over the original lattice
    let mut rays: Vec<Vec<Int>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    let chart = Fan::new(n, rays.clone(), vec![Cone::new((0..n).collect())])?;
    // basis of N' = N + Z e_{n+1}: f_1 = e_{n+1}, f_i = e_i for i >= 2, so
    // e_1 = b f_1 - a f_2 - ... - a f_n
    let mut basis_rows: Vec<Vec<Int>> = Vec::new();
    let mut row0 = vec![-int(a); n];
    row0[0] = int(b);
    basis_rows.push(row0);
    for i in 1..n {
        basis_rows.push((0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect());
    }
    let coarse = chart.rebase_lattice(&IntMat::from_rows(basis_rows))?;
    let mut center = vec![Int::zero(); n];
    center[0] = Int::one();
    let fine = coarse.star_subdivision(&center)?;
    rays.clear();
    let mut built = BuiltExample::new(format!("ex_3_2_7(n={n},a={a},b={b})"), fine.clone());
    let e_ray = fine.rays().len() - 1;
    built.divisors.insert("E".to_string(), TorusDivisor::prime(&fine, e_ray));
    built.divisors.insert("K".to_string(), canonical_divisor(&fine));
    built
        .expected
        .insert("discrepancy".to_string(), rat(1 + (n as i64 - 1) * a, b) - to_rat(&int(1)));
    built
        .expected
        .insert("wall_degree".to_string(), to_rat(&int(n as i64 - 1)) - rat(b - 1, a));
    built.expected.insert("e_degree".to_string(), rat(-b, a));
    built.expected.insert("boundary_threshold".to_string(), rat(b - 1, b));
    built.related.insert("coarse".to_string(), coarse);
    Ok(built)
}

/// The ray set of the distinguished curve V(<e_2, ..., e_{n-1}, e_{n+1}>) in
/// the `ex_3_2_7` fan.
pub fn ex_3_2_7_curve_wall(n: usize) -> Vec<usize> {
    let mut rays: Vec<usize> = (1..n.saturating_sub(1)).collect();
    rays.push(n);
    rays
}

/// Lengths violating the ascending chain condition: `ex_3_2_7` at a = k^2,
/// b = mk + 1, with expected length n - 1 - m/k.
pub fn ex_3_3_1(n: usize, k: i64, m: i64) -> Result<BuiltExample, Error> {
    if k < 1 || m < 1 {
        return Err(Error::BadParameters("need positive k and m".to_string()));
    }
    let mut built = ex_3_2_7(n, k * k, m * k + 1)?;
    built.name = format!("ex_3_3_1(n={n},k={k},m={m})");
    built
        .expected
        .insert("length".to_string(), to_rat(&int(n as i64 - 1)) - rat(m, k));
    built.expected.insert(
        "discrepancy".to_string(),
        rat(1 + k * k * (n as i64 - 1), m * k + 1) - to_rat(&int(1)),
    );
    Ok(built)
}

/// The flip family: X and X^+ subdivide the cone over
/// v_{n+1} = (a, ..., a, -1, ..., -1) in the two ways; W is the common single
/// cone. The relative ray of X is K-negative of length n-k+1-k/a, the X^+ ray
/// is K-positive.
pub fn ex_3_3_2(n: usize, k: usize, a: i64) -> Result<BuiltExample, Error> {
    if n < 3 || k < 2 || k > n - 1 {
        return Err(Error::BadParameters("need n >= 3 and 2 <= k <= n-1".to_string()));
    }
    if a < 1 || a * (n as i64 - k as i64 + 1) <= k as i64 {
        return Err(Error::BadParameters(
            "need a > k/(n-k+1) for the antiflipping side".to_string(),
        ));
    }
    let mut rays: Vec<Vec<Int>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    let mut last: Vec<Int> = vec![int(a); n - k + 1];
    last.extend(std::iter::repeat_n(-Int::one(), k - 1));
    rays.push(last);
    let all: Vec<usize> = (0..=n).collect();
    let drop = |i: usize| Cone::new(all.iter().copied().filter(|&r| r != i).collect());
    let x = Fan::new(n, rays.clone(), (0..=n - k).map(drop).collect())?;
    let x_plus = Fan::new(n, rays.clone(), (n - k + 1..=n).map(drop).collect())?;
    let w = Fan::new(n, rays, vec![Cone::new(all)])?;
    let mut built = BuiltExample::new(format!("ex_3_3_2(n={n},k={k},a={a})"), x);
    built.divisors.insert("K".to_string(), canonical_divisor(&built.fan));
    built.expected.insert(
        "length".to_string(),
        to_rat(&int(n as i64 - k as i64 + 1)) - rat(k as i64, a),
    );
    built
        .expected
        .insert("exceptional_dim".to_string(), to_rat(&int(n as i64 - k as i64)));
    built.related.insert("flip".to_string(), x_plus);
    built.related.insert("base".to_string(), w);
    Ok(built)
}

/// The sharpness example for the fibration bound: a projective surface with
/// rho = 2 fibering over P^1 that is not a P^1-bundle; the fiber ray has
/// length 1 = n - 1.
pub fn ex_3_2_10() -> Result<BuiltExample, Error> {
    let fan = Fan::new(
        2,
        vec![
            vec![int(0), int(1)],
            vec![int(0), int(-1)],
            vec![int(2), int(1)],
            vec![int(-1), int(0)],
        ],
        vec![
            Cone::new(vec![0, 2]),
            Cone::new(vec![1, 2]),
            Cone::new(vec![1, 3]),
            Cone::new(vec![0, 3]),
        ],
    )?;
    let mut built = BuiltExample::new("ex_3_2_10".to_string(), fan);
    built.divisors.insert("K".to_string(), canonical_divisor(&built.fan));
    built.expected.insert("fiber_length".to_string(), to_rat(&int(1)));
    Ok(built)
}

/// The blow-up of P^1 x P^1 at the invariant point D_1 cap D_3, whose Mori
/// cone is spanned by E, D'_1, D'_3.
pub fn ex_2_2_4() -> Result<BuiltExample, Error> {
    let base = p1xp1()?;
    let fan = base.star_subdivision(&[int(1), int(1)])?;
    let mut built = BuiltExample::new("ex_2_2_4".to_string(), fan.clone());
    built.divisors.insert("E".to_string(), TorusDivisor::prime(&fan, 4));
    built.divisors.insert("K".to_string(), canonical_divisor(&fan));
    built.divisors.insert("D".to_string(), canonical_divisor(&fan).neg());
    built.related.insert("coarse".to_string(), base);
    built.expected.insert("extremal_rays".to_string(), to_rat(&int(3)));
    Ok(built)
}

/// P^3 rewritten over N + (1/2, 1/2, 0)Z: a fake weighted projective space
/// that is not a weighted projective space. -K ~ 4 D_4, with 2 D_4 Cartier.
pub fn ex_3_1_10() -> Result<BuiltExample, Error> {
    let p3 = projective_space(3)?;
    let basis = IntMat::from_rows(vec![
        vec![int(2), int(-1), int(0)],
        vec![int(0), int(1), int(0)],
        vec![int(0), int(0), int(1)],
    ]);
    let fan = p3.rebase_lattice(&basis)?;
    let mut built = BuiltExample::new("ex_3_1_10".to_string(), fan.clone());
    let d4 = TorusDivisor::prime(&fan, 3);
    built.divisors.insert("D4".to_string(), d4.clone());
    built.divisors.insert("D".to_string(), d4.scale(&to_rat(&int(2))));
    built.divisors.insert("K".to_string(), canonical_divisor(&fan));
    built.expected.insert("lattice_index".to_string(), to_rat(&int(2)));
    built.expected.insert("d4_cartier_index".to_string(), to_rat(&int(2)));
    built.expected.insert("k_multiple_of_d4".to_string(), to_rat(&int(4)));
    Ok(built)
}

/// The counterexample to the claimed freeness lemma: X the blow-up of P^n at
/// an invariant point, D = f*B - E with B the full invariant boundary of P^n.
/// D is ample, K + aD has sections for every a >= 1, and K + aD is nef only
/// from a = n-1 on.
pub fn ex_4_2_2(n: usize) -> Result<BuiltExample, Error> {
    if n < 2 {
        return Err(Error::BadParameters("need n >= 2".to_string()));
    }
    let coarse = projective_space(n)?;
    let fine = coarse.star_subdivision(&vec![Int::one(); n])?;
    let map = refinement_map(&fine, &coarse)?;
    let b = canonical_divisor(&coarse).neg();
    let f_b = pullback(&map, &b)?;
    let e = TorusDivisor::prime(&fine, n + 1);
    let d = f_b.sub(&e);
    let mut built = BuiltExample::new(format!("ex_4_2_2(n={n})"), fine.clone());
    built.divisors.insert("D".to_string(), d);
    built.divisors.insert("E".to_string(), e);
    built.divisors.insert("fB".to_string(), f_b);
    built.divisors.insert("K".to_string(), canonical_divisor(&fine));
    built.expected.insert("threshold".to_string(), to_rat(&int(n as i64 - 1)));
    built.related.insert("coarse".to_string(), coarse);
    Ok(built)
}

/// The Gorenstein del Pezzo surface with one half-point: P^2 blown up with
/// weight (1, 2). NE(X) is spanned by E = V(e_4) and E' = V(e_2); the two
/// contractions land on P^2 and P(1,1,2).
pub fn ex_4_3_1() -> Result<BuiltExample, Error> {
    let p2 = projective_space(2)?;
    let fan = weighted_blowup(&p2, &[0, 1], &[1, 2])?;
    let mut built = BuiltExample::new("ex_4_3_1".to_string(), fan.clone());
    built.divisors.insert("E".to_string(), TorusDivisor::prime(&fan, 3));
    built.divisors.insert("Eprime".to_string(), TorusDivisor::prime(&fan, 1));
    built.divisors.insert("K".to_string(), canonical_divisor(&fan));
    built.divisors.insert("D".to_string(), canonical_divisor(&fan).neg());
    built.expected.insert("minus_k_dot_e".to_string(), to_rat(&int(1)));
    built.expected.insert("e_self".to_string(), rat(-1, 2));
    built.expected.insert("e_cartier_index".to_string(), to_rat(&int(2)));
    built.related.insert("coarse".to_string(), p2);
    Ok(built)
}

/// rho = 2 fibration fans in normal form: fiber rays e_1, ..., e_{n-1} and
/// -(e_1 + ... + e_{n-1}), plus v_+ = (b, a_+) and v_- = (c, -a_-). With
/// a_+ = a_- = 1 and c = 0 this is the projectivized bundle
/// P(O + O(b_1) + ... + O(b_{n-1})) over P^1.
pub fn rho2_fibration(
    n: usize,
    twists: &[i64],
    a_plus: i64,
    a_minus: i64,
    c: &[i64],
) -> Result<Fan, Error> {
    if n < 2 || twists.len() != n - 1 || c.len() != n - 1 || a_plus < 1 || a_minus < 1 {
        return Err(Error::BadParameters(
            "need n-1 twists, n-1 lower coefficients, positive heights".to_string(),
        ));
    }
    let mut rays: Vec<Vec<Int>> = (0..n - 1)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    let mut v_n = vec![-Int::one(); n];
    v_n[n - 1] = Int::zero();
    rays.push(v_n);
    let mut v_plus: Vec<Int> = twists.iter().map(|&b| int(b)).collect();
    v_plus.push(int(a_plus));
    rays.push(v_plus);
    let mut v_minus: Vec<Int> = c.iter().map(|&x| int(x)).collect();
    v_minus.push(int(-a_minus));
    rays.push(v_minus);
    let mut cones = Vec::new();
    for drop in 0..n {
        for side in [n, n + 1] {
            let mut rays_of_cone: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
            rays_of_cone.push(side);
            cones.push(Cone::new(rays_of_cone));
        }
    }
    Fan::new(n, rays, cones)
}

/// P_{P^1}(O + O(b_1) + ... + O(b_{n-1})) as a named example.
pub fn pn1_bundle(n: usize, twists: &[i64]) -> Result<BuiltExample, Error> {
    let fan = rho2_fibration(n, twists, 1, 1, &vec![0; twists.len()])?;
    let mut built = BuiltExample::new(
        format!(
            "pn1_bundle(n={n},twists=[{}])",
            twists.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
        ),
        fan.clone(),
    );
    built.divisors.insert("K".to_string(), canonical_divisor(&fan));
    built.expected.insert("fiber_length".to_string(), to_rat(&int(n as i64)));
    Ok(built)
}

/// A seeded random fake weighted projective space: a random primitive
/// all-negative vector closes the standard basis into a positively spanning
/// set; a random unimodular change of basis and, half the time, a finer
/// lattice of index 2 or 3 are applied.
pub fn random_fake_wps(n: usize, seed: u64) -> Result<Fan, Error> {
    if n < 2 {
        return Err(Error::BadParameters("need n >= 2".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |lo: i64, hi: i64| -> i64 { lo + (rng.next_u64() % (hi - lo + 1) as u64) as i64 };
    let mut rays: Vec<Vec<Int>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    let last: Vec<Int> = (0..n).map(|_| int(-draw(1, 4))).collect();
    let last = crate::arith::primitivize(&last).expect("nonzero");
    rays.push(last);
    let cones = (0..=n)
        .map(|drop| Cone::new((0..=n).filter(|&i| i != drop).collect()))
        .collect();
    let mut fan = Fan::new(n, rays, cones)?;
    // random unimodular change of coordinates: a few elementary shears
    let mut u = IntMat::identity(n);
    for _ in 0..2 * n {
        let i = draw(0, n as i64 - 1) as usize;
        let j = draw(0, n as i64 - 1) as usize;
        if i == j {
            continue;
        }
        let f = int(draw(-2, 2));
        let mut shear = IntMat::identity(n);
        *shear.at_mut(i, j) = f;
        u = u.mul(&shear);
    }
    fan = fan.rebase_lattice(&u)?;
    if draw(0, 1) == 1 {
        // extend the lattice by index 2 or 3 along a random coordinate
        let idx = draw(2, 3);
        let coord = draw(0, n as i64 - 1) as usize;
        let mut m = IntMat::identity(n);
        *m.at_mut(coord, coord) = int(idx);
        let mut shear = IntMat::identity(n);
        let other = (coord + 1) % n;
        *shear.at_mut(coord, other) = int(draw(-1, 1));
        fan = fan.rebase_lattice(&m.mul(&shear))?;
    }
    Ok(fan)
}

/// Builds an example by name. Parameter names follow the builders: n, a, b,
/// k, m, seed, w1..wk (weights), b1..b{n-1} (twists), a_plus, a_minus,
/// c1..c{n-1}.
pub fn build(spec: &ExampleSpec) -> Result<BuiltExample, Error> {
    match spec.name.as_str() {
        "pn" => {
            let n = spec.get("n")? as usize;
            let fan = projective_space(n)?;
            let mut built = BuiltExample::new(format!("pn(n={n})"), fan.clone());
            built.divisors.insert("K".to_string(), canonical_divisor(&fan));
            built.divisors.insert("D".to_string(), TorusDivisor::prime(&fan, 0));
            built.expected.insert("line_degree".to_string(), to_rat(&int(n as i64 + 1)));
            Ok(built)
        }
        "p1xp1" => {
            let fan = p1xp1()?;
            let mut built = BuiltExample::new("p1xp1".to_string(), fan.clone());
            built.divisors.insert("K".to_string(), canonical_divisor(&fan));
            let d = TorusDivisor::prime(&fan, 0).add(&TorusDivisor::prime(&fan, 2));
            built.divisors.insert("D".to_string(), d);
            Ok(built)
        }
        "wps" => {
            let mut weights = Vec::new();
            for i in 1.. {
                match spec.params.get(&format!("w{i}")) {
                    Some(&w) => weights.push(w),
                    None => break,
                }
            }
            let fan = weighted_projective(&weights)?;
            let mut built = BuiltExample::new(
                format!(
                    "wps({})",
                    weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
                ),
                fan.clone(),
            );
            built.divisors.insert("K".to_string(), canonical_divisor(&fan));
            // the structure sheaf twist O(max weight) is Cartier on P(1,...,w)
            // exactly when every weight divides it; mark the evident ample
            // Cartier pick for the shipped weight patterns
            let max_w = *weights.iter().max().unwrap();
            if let Some(pos) = weights[1..].iter().position(|&w| w == max_w) {
                built
                    .divisors
                    .insert("D".to_string(), TorusDivisor::prime(&fan, pos));
            }
            built.expected.insert("weight_sum".to_string(), to_rat(&int(weights.iter().sum())));
            Ok(built)
        }
        "ex_2_2_4" => ex_2_2_4(),
        "ex_3_1_10" => ex_3_1_10(),
        "ex_3_2_7" => ex_3_2_7(spec.get("n")? as usize, spec.get("a")?, spec.get("b")?),
        "ex_3_3_1" => ex_3_3_1(spec.get("n")? as usize, spec.get("k")?, spec.get("m")?),
        "ex_3_3_2" => {
            ex_3_3_2(spec.get("n")? as usize, spec.get("k")? as usize, spec.get("a")?)
        }
        "ex_3_2_10" => ex_3_2_10(),
        "ex_4_2_2" => ex_4_2_2(spec.get("n")? as usize),
        "ex_4_3_1" => ex_4_3_1(),
        "pn1_bundle" => {
            let n = spec.get("n")? as usize;
            if n < 2 {
                return Err(Error::BadParameters("need n >= 2".to_string()));
            }
            let twists: Vec<i64> = (1..n).map(|i| spec.get_or(&format!("b{i}"), 0)).collect();
            pn1_bundle(n, &twists)
        }
        "rho2_fibration" => {
            let n = spec.get("n")? as usize;
            if n < 2 {
                return Err(Error::BadParameters("need n >= 2".to_string()));
            }
            let twists: Vec<i64> = (1..n).map(|i| spec.get_or(&format!("b{i}"), 0)).collect();
            let c: Vec<i64> = (1..n).map(|i| spec.get_or(&format!("c{i}"), 0)).collect();
            let fan =
                rho2_fibration(n, &twists, spec.get_or("a_plus", 1), spec.get_or("a_minus", 1), &c)?;
            let mut built = BuiltExample::new("rho2_fibration".to_string(), fan.clone());
            built.divisors.insert("K".to_string(), canonical_divisor(&fan));
            Ok(built)
        }
        "fake_wps_random" => {
            let n = spec.get("n")? as usize;
            let seed = spec.get_or("seed", 0) as u64;
            let fan = random_fake_wps(n, seed)?;
            let mut built = BuiltExample::new(format!("fake_wps_random(n={n},seed={seed})"), fan.clone());
            built.divisors.insert("K".to_string(), canonical_divisor(&fan));
            Ok(built)
        }
        other => Err(Error::BadParameters(format!("unknown example `{other}`"))),
    }
}

/// The shipped corpus: every named example at the parameters the verification
/// suites run on.
pub fn corpus() -> Result<Vec<BuiltExample>, Error> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push(build(&ExampleSpec::new("pn").with("n", n))?);
    }
    out.push(build(&ExampleSpec::new("p1xp1"))?);
    out.push(ex_2_2_4()?);
    for weights in [vec![1, 1, 2], vec![1, 1, 2, 2], vec![1, 1, 1, 2]] {
        let mut spec = ExampleSpec::new("wps");
        for (i, w) in weights.iter().enumerate() {
            spec = spec.with(&format!("w{}", i + 1), *w);
        }
        out.push(build(&spec)?);
    }
    out.push(ex_3_1_10()?);
    out.push(ex_4_3_1()?);
    for n in [3, 4, 5] {
        out.push(ex_4_2_2(n)?);
    }
    for (n, a, b) in [(2, 2, 1), (3, 2, 3), (3, 4, 3), (4, 3, 2), (5, 5, 2)] {
        out.push(ex_3_2_7(n, a, b)?);
    }
    for (n, k, m) in [(3, 2, 1), (4, 2, 1), (4, 3, 2)] {
        out.push(ex_3_3_1(n, k, m)?);
    }
    for (n, k, a) in [(3, 2, 2), (4, 2, 1), (4, 3, 2), (5, 3, 2)] {
        out.push(ex_3_3_2(n, k, a)?);
    }
    out.push(ex_3_2_10()?);
    out.push(pn1_bundle(2, &[1])?);
    out.push(pn1_bundle(3, &[0, 2])?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int_vec, rat_int};
    use crate::divisor::{linearly_equivalent, q_cartier_data};
    use crate::intersect::fake_wps_audit;

    #[test]
    fn every_built_fan_validates() {
        for entry in corpus().unwrap() {
            let rep = entry.fan.validate();
            assert!(rep.is_fan, "{}: {:?}", entry.name, rep.errors);
            for (name, related) in &entry.related {
                assert!(
                    related.validate().is_fan,
                    "{}/{name}: {:?}",
                    entry.name,
                    related.validate().errors
                );
            }
        }
    }

    #[test]
    fn ex_3_3_2_shapes() {
        let built = ex_3_3_2(3, 2, 2).unwrap();
        let rep = built.fan.validate();
        assert!(rep.is_fan && !rep.is_complete && rep.is_convex_support);
        // exactly one interior wall <v_3, v_4>
        let interior = built.fan.interior_walls().unwrap();
        assert_eq!(interior.len(), 1);
        assert_eq!(interior[0].rays, vec![2, 3]);
        let base = &built.related["base"];
        assert!(base.validate().is_fan && !base.is_simplicial());
        let map = refinement_map(&built.fan, base).unwrap();
        assert!(map.is_small);
    }

    #[test]
    fn ex_3_2_7_matches_ex_4_3_1_at_n2_a2_b1() {
        // the weight-(1,2) blow-up chart agrees with the projective example
        let local = ex_3_2_7(2, 2, 1).unwrap();
        assert_eq!(local.expected["wall_degree"], rat_int(1));
        assert_eq!(local.expected["e_degree"], rat(-1, 2));
        assert_eq!(local.expected["discrepancy"], rat_int(2));
    }

    #[test]
    fn ex_3_1_10_is_a_fake_wps_of_index_two() {
        let built = ex_3_1_10().unwrap();
        let report = fake_wps_audit(&built.fan).unwrap();
        assert_eq!(report.lattice_index, int(2));
        assert!(!report.is_wps);
        assert!(report.bound_holds);
        // -K ~ 4 D_4 and 2 D_4 is Cartier
        let k = built.divisors["K"].clone();
        let d4 = built.divisors["D4"].clone();
        assert!(linearly_equivalent(&built.fan, &k.neg(), &d4.scale(&rat_int(4))).is_some());
        assert_eq!(q_cartier_data(&built.fan, &d4).unwrap().cartier_index, int(2));
        assert_eq!(q_cartier_data(&built.fan, &k).unwrap().cartier_index, int(1));
    }

    #[test]
    fn weighted_blowup_rejects_singular_centers() {
        let p112 = weighted_projective(&[1, 1, 2]).unwrap();
        // the cone <e_1, v_0> has multiplicity 2
        assert!(matches!(
            weighted_blowup(&p112, &[0, 2], &[1, 1]),
            Err(Error::NotSmoothCone)
        ));
    }

    #[test]
    fn weighted_blowup_of_p2_with_weight_1_2() {
        let built = ex_4_3_1().unwrap();
        assert_eq!(built.fan.rays()[3], int_vec(&[1, 2]));
        assert!(built.fan.validate().is_fan);
        assert!(built.fan.is_complete());
    }

    #[test]
    fn random_fake_wps_is_deterministic_and_valid() {
        let a = random_fake_wps(3, 42).unwrap();
        let b = random_fake_wps(3, 42).unwrap();
        assert_eq!(a, b);
        for seed in 0..10 {
            let f = random_fake_wps(3, seed).unwrap();
            let rep = f.validate();
            assert!(rep.is_fan && rep.is_complete && rep.is_simplicial, "{seed}");
            assert!(fake_wps_audit(&f).is_ok());
        }
    }

    #[test]
    fn unknown_example_is_rejected() {
        assert!(matches!(
            build(&ExampleSpec::new("nope")),
            Err(Error::BadParameters(_))
        ));
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(ex_3_2_7(3, 2, 2).is_err()); // gcd(a,b) != 1
        assert!(ex_3_3_2(3, 2, 1).is_err()); // a <= k/(n-k+1)
        assert!(weighted_projective(&[2, 1, 1]).is_err());
    }
}
