//! Projective plane-curve computations: intersection multiplicities along
//! parameterized branches, the explicit tangency-certified conics, the nodal
//! cubic and its parameterization, dual-curve singularity budgets, and the
//! six-point singularity-pattern classifier.
//!
//! Exact rational arithmetic is used whenever the inputs are rational;
//! algebraic data (square roots) runs in complex doubles against the
//! certificate tolerance.

use crate::error::{Error, Result};
use crate::poly::{Magnitude, Poly, Ring};
use crate::types::TypeVector;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Homogeneous plane curve with sparse monomial storage.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneCurve<T> {
    terms: BTreeMap<[u32; 3], T>,
    degree: u32,
}

impl<T: Ring + Magnitude> PlaneCurve<T> {
    pub fn new(terms: Vec<([u32; 3], T)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut degree = None;
        for (expo, c) in terms {
            if c.is_zero() {
                continue;
            }
            let d = expo[0] + expo[1] + expo[2];
            match degree {
                None => degree = Some(d),
                Some(existing) if existing != d => {
                    return Err(Error::InvalidInput(format!(
                        "non-homogeneous term {expo:?} (degree {d} vs {existing})"
                    )))
                }
                _ => {}
            }
            let slot = map.entry(expo).or_insert_with(T::zero);
            *slot = slot.clone() + c;
        }
        map.retain(|_, c: &mut T| !c.is_zero());
        let degree = degree.ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
        if map.is_empty() {
            return Err(Error::InvalidInput("zero polynomial".into()));
        }
        Ok(PlaneCurve { terms: map, degree })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &T)> {
        self.terms.iter()
    }

    pub fn eval(&self, p: &[T; 3]) -> T {
        let mut acc = T::zero();
        for (expo, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in expo.iter().enumerate() {
                for _ in 0..e {
                    t = t * p[i].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn gradient(&self, p: &[T; 3]) -> [T; 3] {
        let mut out = [T::zero(), T::zero(), T::zero()];
        for (expo, c) in &self.terms {
            for axis in 0..3 {
                if expo[axis] == 0 {
                    continue;
                }
                let mut t = c.clone();
                // multiply by the exponent
                let mut mult = T::zero();
                for _ in 0..expo[axis] {
                    mult = mult + T::one();
                }
                t = t * mult;
                for (i, &e) in expo.iter().enumerate() {
                    let reps = if i == axis { e - 1 } else { e };
                    for _ in 0..reps {
                        t = t * p[i].clone();
                    }
                }
                out[axis] = out[axis].clone() + t;
            }
        }
        out
    }

    /// Scale of the curve's coefficients, for float-mode thresholds.
    pub fn coeff_scale(&self) -> f64 {
        self.terms.values().map(|c| c.mag()).fold(0.0, f64::max)
    }

    /// Substitute a polynomial parameterization, yielding a univariate
    /// polynomial in the parameter.
    pub fn compose(&self, branch: &Branch<T>) -> Poly<T> {
        let maxdeg = self.degree as usize;
        // precompute powers of the three coordinate polynomials
        let pow = |p: &Poly<T>| -> Vec<Poly<T>> {
            let mut v = vec![Poly::constant(T::one())];
            for k in 1..=maxdeg {
                v.push(v[k - 1].mul(p));
            }
            v
        };
        let (xs, ys, zs) = (pow(&branch.x), pow(&branch.y), pow(&branch.z));
        let mut acc = Poly::zero_poly();
        for (expo, c) in &self.terms {
            let t = xs[expo[0] as usize]
                .mul(&ys[expo[1] as usize])
                .mul(&zs[expo[2] as usize])
                .scale(c);
            acc = acc.add(&t);
        }
        acc
    }

    /// Whether p satisfies the equation, exactly or within the certificate
    /// tolerance scaled by the coefficient and coordinate sizes.
    pub fn contains(&self, p: &[T; 3], tol: f64) -> bool {
        let v = self.eval(p);
        if T::EXACT {
            v.is_zero()
        } else {
            let coord = p.iter().map(|c| c.mag()).fold(1.0, f64::max);
            v.mag() <= tol * self.coeff_scale() * coord.powi(self.degree as i32)
        }
    }
}

impl PlaneCurve<Rat> {
    /// Reinterpret with complex-double coefficients.
    pub fn to_complex(&self) -> PlaneCurve<Complex64> {
        PlaneCurve {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, Complex64::new(c.mag(), 0.0)))
                .collect(),
            degree: self.degree,
        }
    }
}

impl<T: Ring + Magnitude + CoeffJson> PlaneCurve<T> {
    /// JSON map from "i,j,k" exponent keys to coefficients.
    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (e, c) in &self.terms {
            map.insert(format!("{},{},{}", e[0], e[1], e[2]), c.to_json());
        }
        json!({ "degree": self.degree, "coefficients": Value::Object(map) })
    }
}

/// Coefficient rendering for curve serialization.
pub trait CoeffJson {
    fn to_json(&self) -> Value;
}

impl CoeffJson for Complex64 {
    fn to_json(&self) -> Value {
        json!([self.re, self.im])
    }
}

impl CoeffJson for Rat {
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

/// Polynomial local parameterization of a branch, with the parameter value
/// of the point of interest.
#[derive(Clone, Debug)]
pub struct Branch<T> {
    pub x: Poly<T>,
    pub y: Poly<T>,
    pub z: Poly<T>,
    pub t0: T,
}

impl<T: Ring + Magnitude> Branch<T> {
    pub fn at(&self, t: &T) -> [T; 3] {
        [self.x.eval(t), self.y.eval(t), self.z.eval(t)]
    }

    /// Projective equality of branch(t0) and p, exact or within tolerance.
    pub fn passes_through(&self, p: &[T; 3], tol: f64) -> bool {
        let q = self.at(&self.t0);
        let minors = [
            q[0].clone() * p[1].clone() - q[1].clone() * p[0].clone(),
            q[0].clone() * p[2].clone() - q[2].clone() * p[0].clone(),
            q[1].clone() * p[2].clone() - q[2].clone() * p[1].clone(),
        ];
        let scale: f64 = q.iter().map(|c| c.mag()).fold(0.0, f64::max)
            * p.iter().map(|c| c.mag()).fold(0.0, f64::max);
        minors.iter().all(|m| {
            if T::EXACT {
                m.is_zero()
            } else {
                m.mag() <= tol * scale.max(1e-300)
            }
        })
    }
}

/// Intersection multiplicity, or the infinite sentinel when the curve
/// vanishes along the whole branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Finite(usize),
    Infinite,
}

/// Vanishing order of the curve along the branch at the branch's marked
/// parameter. The marked point must match `p` projectively.
pub fn intersection_multiplicity<T: Ring + Magnitude>(
    curve: &PlaneCurve<T>,
    branch: &Branch<T>,
    p: &[T; 3],
    tol: f64,
) -> Result<Multiplicity> {
    if !branch.passes_through(p, tol) {
        return Err(Error::BranchNotThroughPoint);
    }
    let composed = curve.compose(branch);
    if composed.is_zero_poly() {
        return Ok(Multiplicity::Infinite);
    }
    let shifted = composed.taylor_shift(&branch.t0);
    let coeffs = shifted.coeffs();
    let order = if T::EXACT {
        coeffs.iter().take_while(|c| c.is_zero()).count()
    } else {
        let scale = coeffs.iter().map(|c| c.mag()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Ok(Multiplicity::Infinite);
        }
        coeffs.iter().take_while(|c| c.mag() <= tol * scale).count()
    };
    if order == coeffs.len() {
        Ok(Multiplicity::Infinite)
    } else {
        Ok(Multiplicity::Finite(order))
    }
}

/// Tangency of two curves at a common point: both vanish and the gradients
/// are proportional (all 2x2 minors vanish).
pub fn certify_tangency<T: Ring + Magnitude>(
    a: &PlaneCurve<T>,
    b: &PlaneCurve<T>,
    p: &[T; 3],
    tol: f64,
) -> Result<bool> {
    if !a.contains(p, tol) || !b.contains(p, tol) {
        return Err(Error::PointNotOnCurve);
    }
    let ga = a.gradient(p);
    let gb = b.gradient(p);
    let minors = [
        ga[0].clone() * gb[1].clone() - ga[1].clone() * gb[0].clone(),
        ga[0].clone() * gb[2].clone() - ga[2].clone() * gb[0].clone(),
        ga[1].clone() * gb[2].clone() - ga[2].clone() * gb[1].clone(),
    ];
    if T::EXACT {
        Ok(minors.iter().all(|m| m.is_zero()))
    } else {
        let sa: f64 = ga.iter().map(|c| c.mag()).fold(0.0, f64::max);
        let sb: f64 = gb.iter().map(|c| c.mag()).fold(0.0, f64::max);
        let scale = (sa * sb).max(1e-300);
        Ok(minors.iter().all(|m| m.mag() <= tol * scale))
    }
}

fn lit<T: Ring>(n: i64) -> T {
    let mut acc = T::zero();
    for _ in 0..n.abs() {
        acc = acc + T::one();
    }
    if n < 0 {
        -acc
    } else {
        acc
    }
}

/// The reference conic x^2 + y^2 - 2 z^2.
pub fn conic_c0<T: Ring + Magnitude>() -> PlaneCurve<T> {
    PlaneCurve::new(vec![
        ([2, 0, 0], T::one()),
        ([0, 2, 0], T::one()),
        ([0, 0, 2], lit(-2)),
    ])
    .expect("static curve")
}

/// The line y - z.
pub fn line_h0<T: Ring + Magnitude>() -> PlaneCurve<T> {
    PlaneCurve::new(vec![([0, 1, 0], T::one()), ([0, 0, 1], lit(-1))]).expect("static curve")
}

/// The line y + z.
pub fn line_h3<T: Ring + Magnitude>() -> PlaneCurve<T> {
    PlaneCurve::new(vec![([0, 1, 0], T::one()), ([0, 0, 1], T::one())]).expect("static curve")
}

/// The nodal cubic x y z - x^3 - y^3.
pub fn nodal_cubic<T: Ring + Magnitude>() -> PlaneCurve<T> {
    PlaneCurve::new(vec![
        ([1, 1, 1], T::one()),
        ([3, 0, 0], lit(-1)),
        ([0, 3, 0], lit(-1)),
    ])
    .expect("static curve")
}

/// Parameterization [u v^2 : u^2 v : u^3 + v^3] of the nodal cubic.
pub fn nodal_cubic_param<T: Ring>(u: &T, v: &T) -> [T; 3] {
    [
        u.clone() * v.clone() * v.clone(),
        u.clone() * u.clone() * v.clone(),
        u.clone() * u.clone() * u.clone() + v.clone() * v.clone() * v.clone(),
    ]
}

/// Global degree-2 parameterization of the reference conic:
/// t -> [t^2 - 2t - 1 : 1 - 2t - t^2 : 1 + t^2].
pub fn conic_c0_param<T: Ring + Magnitude>(t0: T) -> Branch<T> {
    Branch {
        x: Poly::new(vec![lit(-1), lit(-2), T::one()]),
        y: Poly::new(vec![T::one(), lit(-2), lit(-1)]),
        z: Poly::new(vec![T::one(), T::zero(), T::one()]),
        t0,
    }
}

/// A degree-1 parameterization of the line through two points.
pub fn line_branch<T: Ring + Magnitude>(p: &[T; 3], q: &[T; 3], t0: T) -> Branch<T> {
    Branch {
        x: Poly::new(vec![p[0].clone(), q[0].clone()]),
        y: Poly::new(vec![p[1].clone(), q[1].clone()]),
        z: Poly::new(vec![p[2].clone(), q[2].clone()]),
        t0,
    }
}

/// The conic through q = [a : b : c] on the reference conic that meets it
/// only at q while staying tangent to the line y = z:
/// (b-2c)^2 x^2 + (3b^2-4bc+2c^2) y^2 + 2ab xy - 4ac xz - 4bc yz
/// + 4b(2c-b) z^2.
pub fn conic_c411<T: Ring + Magnitude>(q: &[T; 3], tol: f64) -> Result<PlaneCurve<T>> {
    if !conic_c0::<T>().contains(q, tol) {
        return Err(Error::PointNotOnCurve);
    }
    let (a, b, c) = (q[0].clone(), q[1].clone(), q[2].clone());
    let off_h0 = b.clone() - c.clone();
    if T::EXACT {
        if off_h0.is_zero() {
            return Err(Error::InvalidInput("base point lies on y = z".into()));
        }
    } else if off_h0.mag() <= tol * (b.mag() + c.mag()).max(1.0) {
        return Err(Error::InvalidInput("base point lies on y = z".into()));
    }
    let two = lit::<T>(2);
    let three = lit::<T>(3);
    let four = lit::<T>(4);
    let b2c = b.clone() - two.clone() * c.clone();
    PlaneCurve::new(vec![
        ([2, 0, 0], b2c.clone() * b2c.clone()),
        (
            [0, 2, 0],
            three * b.clone() * b.clone() - four.clone() * b.clone() * c.clone()
                + two.clone() * c.clone() * c.clone(),
        ),
        ([1, 1, 0], two.clone() * a.clone() * b.clone()),
        ([1, 0, 1], -(four.clone() * a.clone() * c.clone())),
        ([0, 1, 1], -(four.clone() * b.clone() * c.clone())),
        (
            [0, 0, 2],
            four * b.clone() * (two * c.clone() - b.clone()),
        ),
    ])
}

/// Where the order-4 conic of q touches the line y = z: [a : 2c-b : 2c-b].
pub fn c411_tangency_point<T: Ring>(q: &[T; 3]) -> [T; 3] {
    let w = lit::<T>(2) * q[2].clone() - q[1].clone();
    [q[0].clone(), w.clone(), w]
}

/// The symmetric conic x^2 + (1-c^2) y^2 - 2c xz + (2c^2-1) z^2, tangent to
/// y = z at [c:1:1], to y = -z at [c:-1:1], and twice to the reference
/// conic. Rejects c = 1 and c = -1.
pub fn conic_c222<T: Ring + Magnitude>(c: &T, tol: f64) -> Result<PlaneCurve<T>> {
    let one = T::one();
    for s in [one.clone(), -one.clone()] {
        let d = c.clone() - s;
        let bad = if T::EXACT {
            d.is_zero()
        } else {
            d.mag() <= tol * (1.0 + c.mag())
        };
        if bad {
            return Err(Error::InvalidInput("c must avoid 1 and -1".into()));
        }
    }
    let two = lit::<T>(2);
    let csq = c.clone() * c.clone();
    PlaneCurve::new(vec![
        ([2, 0, 0], T::one()),
        ([0, 2, 0], T::one() - csq.clone()),
        ([1, 0, 1], -(two.clone() * c.clone())),
        ([0, 0, 2], two * csq - T::one()),
    ])
}

/// Tangency points of the symmetric conic: on y = z, on y = -z, and the
/// complex pair on the reference conic.
pub fn c222_tangency_points(c: Complex64) -> ([Complex64; 3], [Complex64; 3], [[Complex64; 3]; 2]) {
    let one = Complex64::new(1.0, 0.0);
    let s = (2.0 * c * c - one).sqrt();
    (
        [c, one, one],
        [c, -one, one],
        [[one, s, c], [one, -s, c]],
    )
}

/// Dual degree from the genus formula 2 - 2g = 2d - d_dual - sum (m_p - nu_p).
pub fn plucker_dual_degree(d: i64, g: i64, singular: &[(i64, i64)]) -> i64 {
    let correction: i64 = singular.iter().map(|(m, nu)| m - nu).sum();
    2 * d - (2 - 2 * g) - correction
}

/// Singularity budget of the dual discriminant curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityBudget {
    pub dual_degree: i64,
    pub cusps: i64,
    pub nodes: i64,
    pub triple_points: i64,
    /// Delta invariant of the distinguished triple-branch point.
    pub delta_h: i64,
    pub genus: i64,
}

fn valid_zero_one_counts(i0: i64, i1: i64) -> bool {
    if !(0..=3).contains(&i0) || !(0..=3).contains(&i1) {
        return false;
    }
    // realizable by some class-0 vector: an odd head with even tail gives
    // i1 <= 1, an even head with odd tail gives i0 <= 1
    i1 <= 1 || i0 <= 1
}

/// Budget of the dual sextic: degree 12 - 2 I0, 18 - 6 I0 cusps,
/// 27 - 14 I0 + 2 I0^2 - 3 I1 nodes, I1 triple points, and the delta-9
/// distinguished singularity. The delta sum
/// (d-1)(d-2)/2 - genus = nodes + cusps + 3 I1 + 9 is enforced.
pub fn dual_budget(i0: i64, i1: i64) -> Result<SingularityBudget> {
    if !valid_zero_one_counts(i0, i1) {
        return Err(Error::InvalidInput(format!(
            "no class-0 vector has {i0} zeros and {i1} ones"
        )));
    }
    let budget = SingularityBudget {
        dual_degree: 12 - 2 * i0,
        cusps: 18 - 6 * i0,
        nodes: 27 - 14 * i0 + 2 * i0 * i0 - 3 * i1,
        triple_points: i1,
        delta_h: 9,
        genus: 1 - i0,
    };
    let d = budget.dual_degree;
    let delta_sum = (d - 1) * (d - 2) / 2 - budget.genus;
    if delta_sum != budget.nodes + budget.cusps + 3 * budget.triple_points + budget.delta_h {
        return Err(Error::InvariantViolation(format!(
            "delta sum violated for (I0, I1) = ({i0}, {i1})"
        )));
    }
    Ok(budget)
}

/// Classification of a depth-2 system member by the multiset of its contact
/// orders with the ramification curve (six in total).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PatternClass {
    /// (2,2,1,1): two nodes — the generic rational member.
    TwoNodes,
    /// (3,2,1): a node and a cusp.
    NodeAndCusp,
    /// (3,3): two cusps.
    TwoCusps,
    /// (4,1,1): a tacnode.
    Tacnode,
    /// (5,1): a higher cusp.
    HigherCusp,
    /// (1,1,1,1,1,1): smooth irreducible of geometric genus 2.
    GenusTwoSmooth,
    /// (2,1,1,1,1): irreducible of genus 1 with a node.
    GenusOneNode,
    /// (3,1,1,1): irreducible of genus 1 with a cusp.
    GenusOneCusp,
    /// (2,2,2), (4,2) or (6): reduced but not rational.
    ReducedNotRational,
    NotClassified,
}

impl PatternClass {
    /// Members of the depth-2 rational family have exactly two odd contact
    /// orders.
    pub fn is_severi_member(&self) -> bool {
        matches!(
            self,
            PatternClass::TwoNodes
                | PatternClass::NodeAndCusp
                | PatternClass::TwoCusps
                | PatternClass::Tacnode
                | PatternClass::HigherCusp
        )
    }
}

/// Classify a contact-order multiset summing to six.
pub fn classify_pattern(pattern: &[u32]) -> Result<PatternClass> {
    if pattern.iter().any(|&p| p == 0) {
        return Err(Error::InvalidInput("contact orders must be positive".into()));
    }
    if pattern.iter().sum::<u32>() != 6 {
        return Err(Error::InvalidInput(format!(
            "contact orders {pattern:?} do not sum to 6"
        )));
    }
    let mut sorted: Vec<u32> = pattern.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    Ok(match sorted.as_slice() {
        [2, 2, 1, 1] => PatternClass::TwoNodes,
        [3, 2, 1] => PatternClass::NodeAndCusp,
        [3, 3] => PatternClass::TwoCusps,
        [4, 1, 1] => PatternClass::Tacnode,
        [5, 1] => PatternClass::HigherCusp,
        [1, 1, 1, 1, 1, 1] => PatternClass::GenusTwoSmooth,
        [2, 1, 1, 1, 1] => PatternClass::GenusOneNode,
        [3, 1, 1, 1] => PatternClass::GenusOneCusp,
        [2, 2, 2] | [4, 2] | [6] => PatternClass::ReducedNotRational,
        _ => PatternClass::NotClassified,
    })
}

/// Component shape of the degree-6 discriminant curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DiscriminantShape {
    Irreducible,
    ConicPlusQuartic,
    ThreeConics,
}

/// Structured profile of the discriminant sextic attached to mu.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantProfile {
    pub degree: i64,
    pub components: i64,
    pub geometric_genus: i64,
    /// Nodes at the contracted-fiber images.
    pub extra_nodes: i64,
    /// Delta invariant of the distinguished singular point.
    pub delta_m: i64,
    pub shape: DiscriminantShape,
}

pub fn discriminant_profile(mu: &TypeVector) -> Result<DiscriminantProfile> {
    mu.require_class_zero()?;
    let zeros = mu.stats().zeros;
    let shape = match zeros {
        0 | 1 => DiscriminantShape::Irreducible,
        2 => DiscriminantShape::ConicPlusQuartic,
        _ => DiscriminantShape::ThreeConics,
    };
    Ok(DiscriminantProfile {
        degree: 6,
        components: zeros.max(1),
        geometric_genus: 1 - zeros,
        extra_nodes: zeros,
        delta_m: 9,
        shape,
    })
}

/// Cross-ratio and j-invariant of the smooth cubic attached to a type with
/// all coordinates positive:
/// lambda = prod 2 mu_i / (sum mu - 2 mu_i),
/// j = 2^8 (lambda^2 - lambda + 1)^3 / (lambda^2 (lambda - 1)^2).
pub fn j_invariant(mu: &TypeVector) -> Result<(Rat, Rat)> {
    mu.require_class_zero()?;
    if mu.stats().zeros > 0 {
        return Err(Error::OmegaNotElliptic);
    }
    let total = mu.sum();
    let mut lambda = Rat::one();
    for i in 0..4 {
        let num = BigInt::from(2 * mu.get(i));
        let den = BigInt::from(total - 2 * mu.get(i));
        lambda *= Rat::new(num, den);
    }
    if lambda.is_zero() || lambda == Rat::one() {
        return Err(Error::DegenerateCrossRatio);
    }
    let j = j_of_lambda(&lambda);
    Ok((lambda, j))
}

/// The modular j as a function of the cross-ratio.
pub fn j_of_lambda(lambda: &Rat) -> Rat {
    let num = lambda.clone() * lambda.clone() - lambda.clone() + Rat::one();
    let den = lambda.clone() * lambda.clone()
        * (lambda.clone() - Rat::one())
        * (lambda.clone() - Rat::one());
    Rat::from_integer(BigInt::from(256)) * num.clone() * num.clone() * num / den
}
