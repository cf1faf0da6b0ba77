//! Exact intersection theory on the rank-10 Picard lattice of the quotient
//! surface, and the weak del Pezzo data attached to a class-0 type vector.
//!
//! Classes are integer vectors over the ordered basis
//! (C0, l, S0..S3, r0..r3); the Gram matrix is fixed once. Statements about
//! the contracted del Pezzo surface are evaluated on representatives
//! orthogonal to the contracted classes, so no second lattice type is
//! needed.

use crate::error::{Error, Result};
use crate::plane;
use crate::types::{exceptional_neighbors, TypeVector};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

/// Basis legend for serialized class vectors.
pub const BASIS: [&str; 10] = [
    "C0", "l", "S0", "S1", "S2", "S3", "r0", "r1", "r2", "r3",
];

/// Gram matrix of the fixed basis: C0^2 = r_i^2 = -2, C0.l = 1, S_i^2 = -1,
/// S_i.r_j = delta_ij, everything else zero.
pub const GRAM: [[i64; 10]; 10] = {
    let mut g = [[0i64; 10]; 10];
    g[0][0] = -2;
    g[0][1] = 1;
    g[1][0] = 1;
    let mut i = 0;
    while i < 4 {
        g[2 + i][2 + i] = -1;
        g[6 + i][6 + i] = -2;
        g[2 + i][6 + i] = 1;
        g[6 + i][2 + i] = 1;
        i += 1;
    }
    g
};

/// An integer divisor class over the fixed basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivClass(pub [i64; 10]);

impl std::fmt::Debug for DivClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c != 0 {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{c:+}{}", BASIS[i])?;
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl DivClass {
    pub fn zero() -> Self {
        DivClass([0; 10])
    }

    pub fn c0() -> Self {
        let mut v = [0; 10];
        v[0] = 1;
        DivClass(v)
    }

    pub fn fiber() -> Self {
        let mut v = [0; 10];
        v[1] = 1;
        DivClass(v)
    }

    pub fn s_fiber(i: usize) -> Self {
        let mut v = [0; 10];
        v[2 + i] = 1;
        DivClass(v)
    }

    pub fn r_curve(i: usize) -> Self {
        let mut v = [0; 10];
        v[6 + i] = 1;
        DivClass(v)
    }

    /// The (-2)-curve s_i = l - 2 S_i - r_i.
    pub fn s_curve(i: usize) -> Self {
        Self::fiber()
            .sub(&Self::s_fiber(i).scale(2))
            .sub(&Self::r_curve(i))
    }

    /// Canonical class K = -2 C0 - sum_i s_i.
    pub fn canonical() -> Self {
        let mut k = Self::c0().scale(-2);
        for i in 0..4 {
            k = k.sub(&Self::s_curve(i));
        }
        k
    }

    pub fn anticanonical() -> Self {
        Self::canonical().scale(-1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut v = self.0;
        for i in 0..10 {
            v[i] += other.0[i];
        }
        DivClass(v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut v = self.0;
        for i in 0..10 {
            v[i] -= other.0[i];
        }
        DivClass(v)
    }

    pub fn scale(&self, s: i64) -> Self {
        let mut v = self.0;
        for c in v.iter_mut() {
            *c *= s;
        }
        DivClass(v)
    }
}

/// Intersection number through the fixed Gram matrix.
pub fn intersect(a: &DivClass, b: &DivClass) -> i64 {
    let mut acc = 0i64;
    for i in 0..10 {
        if a.0[i] == 0 {
            continue;
        }
        for j in 0..10 {
            acc += a.0[i] * GRAM[i][j] * b.0[j];
        }
    }
    acc
}

/// Arithmetic genus by adjunction: 1 + (D.D + D.K)/2.
pub fn arithmetic_genus(d: &DivClass) -> Result<i64> {
    let self_int = intersect(d, d);
    let k_deg = intersect(d, &DivClass::canonical());
    let twice = self_int + k_deg;
    if twice % 2 != 0 {
        return Err(Error::InvariantViolation(format!(
            "adjunction not integral for {d:?}"
        )));
    }
    Ok(1 + twice / 2)
}

/// The unique exceptional class labeled by a type vector nu in T_k.
///
/// The class is pinned down by matching its degree-2 pullback
/// n C0* + f* - s_k - nu . r against the pullbacks of the basis; the linear
/// system solves in closed form.
pub fn class_of_gamma(nu: &TypeVector) -> DivClass {
    let k = nu.class();
    let n = nu.stats().n;
    let mut v = [0i64; 10];
    v[0] = n;
    v[1] = 2 * n;
    for i in 0..4 {
        let yi = if i == k { 1 - n } else { -n };
        v[2 + i] = yi;
        let zi_twice = yi - nu.get(i);
        debug_assert!(zi_twice % 2 == 0, "pullback solution must be integral");
        v[6 + i] = zi_twice / 2;
    }
    DivClass(v)
}

/// One admissible component of the depth-d linear system of type mu: an
/// irreducible core of type nu at depth e, padded with the anticanonical
/// pencil class and the r-curves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemComponent {
    pub nu: TypeVector,
    pub e: i64,
    /// Multiplicity of the residual pencil class 2 C0 + sum s_i.
    pub pencil_coeff: i64,
    /// Multiplicities of the residual r-curves, (nu - mu)/2.
    pub r_coeffs: [i64; 4],
}

/// All (nu, e) with nu - mu in 2 N^4 and depth budget
/// mu.gamma + gamma_sq + e <= d; contains (mu, d) itself.
pub fn decompose_linear_system(mu: &TypeVector, d: i64) -> Result<Vec<SystemComponent>> {
    mu.require_class_zero()?;
    if d < 0 {
        return Err(Error::InvalidInput("negative depth".into()));
    }
    let mut out = Vec::new();
    for g0 in 0..=d {
        for g1 in 0..=d {
            for g2 in 0..=d {
                for g3 in 0..=d {
                    let gamma = [g0, g1, g2, g3];
                    let mudot: i64 = (0..4).map(|i| mu.get(i) * gamma[i]).sum();
                    let gsq: i64 = gamma.iter().map(|x| x * x).sum();
                    let slack = d - mudot - gsq;
                    if slack < 0 {
                        continue;
                    }
                    let nu = mu.offset([2 * g0, 2 * g1, 2 * g2, 2 * g3])?;
                    for e in 0..=slack {
                        out.push(SystemComponent {
                            nu,
                            e,
                            pencil_coeff: slack - e,
                            r_coeffs: gamma,
                        });
                    }
                }
            }
        }
    }
    out.sort_by_key(|c| (c.nu, c.e));
    Ok(out)
}

/// Contraction-data predicate: four classes, one per parity family, pairwise
/// difference of square length 2, and a coordinate-positive sum.
pub fn is_contraction_data(t: &[TypeVector; 4]) -> Result<bool> {
    for (i, ti) in t.iter().enumerate() {
        if ti.class() != i {
            return Err(Error::InvalidInput(format!(
                "component {i} lies in T_{} instead of T_{i}",
                ti.class()
            )));
        }
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut dsq = 0i64;
            for c in 0..4 {
                let d = t[i].get(c) - t[j].get(c);
                dsq += d * d;
            }
            if dsq != 2 {
                return Ok(false);
            }
        }
    }
    for c in 0..4 {
        let s: i64 = t.iter().map(|ti| ti.get(c)).sum();
        if s <= 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The standard completion of mu to contraction data:
/// (mu, mu + (1,1,0,0), mu + (1,0,1,0), mu + (1,0,0,1)).
pub fn standard_contraction_data(mu: &TypeVector) -> Result<[TypeVector; 4]> {
    mu.require_class_zero()?;
    Ok([
        *mu,
        mu.offset([1, 1, 0, 0])?,
        mu.offset([1, 0, 1, 0])?,
        mu.offset([1, 0, 0, 1])?,
    ])
}

/// Pull a class through the two-step contraction (the exceptional class of
/// mu, then the image of s_0): add the multiples of the contracted
/// (-1)-classes that make the result orthogonal to both.
pub fn pushdown_orthogonalize(d: &DivClass, mu: &TypeVector) -> Result<DivClass> {
    mu.require_class_zero()?;
    let gamma = class_of_gamma(mu);
    let second = DivClass::s_curve(0).add(&gamma);
    let a = intersect(d, &gamma);
    let mut out = d.add(&gamma.scale(a));
    let b = intersect(&out, &second);
    out = out.add(&second.scale(b));
    debug_assert_eq!(intersect(&out, &gamma), 0);
    debug_assert_eq!(intersect(&out, &DivClass::s_curve(0)), 0);
    Ok(out)
}

fn ser_rat<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Shape of the downstairs ramification curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum OmegaProfile {
    /// Smooth irreducible of genus one, with the cross-ratio and j-invariant
    /// of its plane cubic image.
    SmoothGenusOne {
        #[serde(serialize_with = "ser_rat")]
        lambda: BigRational,
        #[serde(serialize_with = "ser_rat")]
        j: BigRational,
    },
    /// Irreducible rational with one node.
    NodalRational,
    /// A line plus an irreducible conic.
    LinePlusConic,
    /// Three exceptional lines.
    ThreeLines,
}

/// Summary of the weak del Pezzo surface attached to mu.
#[derive(Clone, Debug, Serialize)]
pub struct DelPezzoReport {
    pub mu: TypeVector,
    /// Number of exceptional curves downstairs (neighbors plus the section).
    pub exceptional_count: usize,
    /// Positive-dimensional fibers of the degree-2 projection: 3 + zeros.
    pub positive_dim_fibers: i64,
    /// Reducible members of the anticanonical pencil through a base point.
    pub pencil_reducibles: i64,
    /// Ramification class, 2 L.
    pub ramification: DivClass,
    /// Fiber components of the ramification divisor.
    pub ramification_fibers: DivClass,
    /// The moving ramification curve.
    pub omega: DivClass,
    pub omega_genus: i64,
    pub profile: OmegaProfile,
}

/// Assemble the del Pezzo report: exceptional census, fiber counts,
/// ramification classes (evaluated upstairs on orthogonalized
/// representatives), and the profile of the moving ramification curve.
pub fn delpezzo_report(mu: &TypeVector) -> Result<DelPezzoReport> {
    mu.require_class_zero()?;
    let st = mu.stats();
    let neighbors = exceptional_neighbors(mu)?;

    let c0_down = pushdown_orthogonalize(&DivClass::c0(), mu)?;
    let anticanonical_down = pushdown_orthogonalize(&DivClass::anticanonical(), mu)?;

    let mut omega = c0_down.scale(3);
    let mut ram_fibers = DivClass::zero();
    for jdx in 1..4 {
        omega = omega.add(&DivClass::s_curve(jdx));
        ram_fibers = ram_fibers.add(&DivClass::s_curve(jdx));
    }
    for i in 0..4 {
        if mu.get(i) == 0 {
            omega = omega.sub(&DivClass::r_curve(i));
            ram_fibers = ram_fibers.add(&DivClass::r_curve(i));
        }
    }
    let ramification = anticanonical_down.scale(2);

    // ramification = omega + section + fiber components, as classes
    let recombined = omega.add(&c0_down).add(&ram_fibers);
    if recombined != ramification {
        return Err(Error::InvariantViolation(
            "ramification class does not decompose".into(),
        ));
    }

    let omega_genus = {
        let self_int = intersect(&omega, &omega);
        let k_down = anticanonical_down.scale(-1);
        1 + (self_int + intersect(&omega, &k_down)) / 2
    };

    let profile = match st.zeros {
        0 => {
            let (lambda, j) = plane::j_invariant(mu)?;
            OmegaProfile::SmoothGenusOne { lambda, j }
        }
        1 => OmegaProfile::NodalRational,
        2 => OmegaProfile::LinePlusConic,
        _ => OmegaProfile::ThreeLines,
    };

    Ok(DelPezzoReport {
        mu: *mu,
        exceptional_count: neighbors.len() + 1,
        positive_dim_fibers: 3 + st.zeros,
        pencil_reducibles: 1 + st.zeros,
        ramification,
        ramification_fibers: ram_fibers,
        omega,
        omega_genus,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{class_zero_sweep, gamma_intersection};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tv(v: [i64; 4]) -> TypeVector {
        TypeVector::new(v).unwrap()
    }

    #[test]
    fn gram_is_symmetric_with_signature_one_nine() {
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(GRAM[i][j], GRAM[j][i]);
            }
        }
        // crude eigenvalue count by Jacobi sweeps on the float matrix
        let mut a = [[0f64; 10]; 10];
        for i in 0..10 {
            for j in 0..10 {
                a[i][j] = GRAM[i][j] as f64;
            }
        }
        for _ in 0..200 {
            // one Jacobi rotation on the largest off-diagonal entry
            let (mut p, mut q, mut big) = (0, 1, 0.0f64);
            for i in 0..10 {
                for j in (i + 1)..10 {
                    if a[i][j].abs() > big {
                        big = a[i][j].abs();
                        p = i;
                        q = j;
                    }
                }
            }
            if big < 1e-12 {
                break;
            }
            let theta = 0.5 * (2.0 * a[p][q]).atan2(a[p][p] - a[q][q]);
            let (c, s) = (theta.cos(), theta.sin());
            for k in 0..10 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp + s * akq;
                a[k][q] = -s * akp + c * akq;
            }
            for k in 0..10 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk + s * aqk;
                a[q][k] = -s * apk + c * aqk;
            }
        }
        let positive = (0..10).filter(|&i| a[i][i] > 1e-9).count();
        assert_eq!(positive, 1, "signature must be (1,9)");
    }

    #[test]
    fn canonical_class_is_isotropic() {
        let k = DivClass::canonical();
        assert_eq!(intersect(&k, &k), 0);
    }

    #[test]
    fn s_curves_are_minus_two() {
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { -2 } else { 0 };
                assert_eq!(
                    intersect(&DivClass::s_curve(i), &DivClass::s_curve(j)),
                    want
                );
            }
            assert_eq!(
                intersect(&DivClass::s_curve(i), &DivClass::canonical()),
                0
            );
        }
    }

    #[test]
    fn gamma_classes_are_exceptional() {
        for nu in [tv([1, 0, 0, 0]), tv([3, 2, 2, 2]), tv([4, 3, 2, 2]), tv([0, 1, 1, 1])] {
            let c = class_of_gamma(&nu);
            assert_eq!(intersect(&c, &c), -1, "nu = {nu:?}");
            assert_eq!(intersect(&c, &DivClass::canonical()), -1);
            assert_eq!(arithmetic_genus(&c).unwrap(), 0);
        }
    }

    #[test]
    fn gamma_meets_only_its_s_curve() {
        let c = class_of_gamma(&tv([1, 0, 0, 0]));
        assert_eq!(intersect(&c, &DivClass::s_curve(0)), 1);
        for j in 1..4 {
            assert_eq!(intersect(&c, &DivClass::s_curve(j)), 0);
        }
        // and r-multiplicities equal the type coordinates
        let mu = tv([3, 2, 2, 2]);
        let g = class_of_gamma(&mu);
        for i in 0..4 {
            assert_eq!(intersect(&g, &DivClass::r_curve(i)), mu.get(i));
        }
    }

    #[test]
    fn intersection_matches_type_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 200 {
            let v1: [i64; 4] = [
                rng.gen_range(0..6),
                rng.gen_range(0..6),
                rng.gen_range(0..6),
                rng.gen_range(0..6),
            ];
            let v2: [i64; 4] = [
                rng.gen_range(0..6),
                rng.gen_range(0..6),
                rng.gen_range(0..6),
                rng.gen_range(0..6),
            ];
            let (nu, sigma) = match (TypeVector::new(v1), TypeVector::new(v2)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            assert_eq!(
                intersect(&class_of_gamma(&nu), &class_of_gamma(&sigma)),
                gamma_intersection(&nu, &sigma),
                "nu = {nu:?}, sigma = {sigma:?}"
            );
            checked += 1;
        }
    }

    #[test]
    fn genus_of_padded_systems() {
        let anticanonical = DivClass::anticanonical();
        for mu in class_zero_sweep(5) {
            let base = class_of_gamma(&mu);
            for d in 0..=4 {
                let cls = base.add(&anticanonical.scale(d));
                assert_eq!(intersect(&cls, &cls), 2 * d - 1);
                assert_eq!(arithmetic_genus(&cls).unwrap(), d, "mu = {mu:?}, d = {d}");
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let mu = tv([3, 2, 2, 2]);
        let list = decompose_linear_system(&mu, 2).unwrap();
        assert_eq!(list.len(), 3);
        assert!(list.iter().all(|c| c.nu == mu));
        let es: Vec<i64> = list.iter().map(|c| c.e).collect();
        assert_eq!(es, vec![0, 1, 2]);

        let mu = tv([1, 0, 0, 0]);
        let list = decompose_linear_system(&mu, 2).unwrap();
        assert!(list.iter().any(|c| c.nu == tv([1, 2, 0, 0])));
        assert!(list.iter().any(|c| c.nu == tv([3, 0, 0, 0])));
        assert!(list.iter().any(|c| c.nu == mu && c.e == 2));

        let list = decompose_linear_system(&mu, 0).unwrap();
        assert_eq!(list.len(), 1);
        assert_eq!((list[0].nu, list[0].e), (mu, 0));
    }

    #[test]
    fn contraction_data_examples() {
        let mu = tv([3, 2, 2, 2]);
        let t = standard_contraction_data(&mu).unwrap();
        assert!(is_contraction_data(&t).unwrap());

        let mu = tv([1, 0, 0, 0]);
        let t = standard_contraction_data(&mu).unwrap();
        assert!(is_contraction_data(&t).unwrap());

        // duplicate entry (zero difference) must fail the predicate; it is
        // also in the wrong parity family, which the declared-class check
        // reports as an input error
        let bad = [t[0], t[0], t[2], t[3]];
        assert!(is_contraction_data(&bad).is_err());

        // valid classes but a non-neighboring pair
        let far = [
            tv([3, 0, 0, 0]),
            tv([0, 1, 0, 0]),
            tv([0, 0, 1, 0]),
            tv([0, 0, 0, 1]),
        ];
        assert!(!is_contraction_data(&far).unwrap());
    }

    #[test]
    fn pushdown_kills_contracted_classes() {
        let mu = tv([3, 2, 2, 2]);
        let gamma = class_of_gamma(&mu);
        for cls in [DivClass::c0(), DivClass::fiber(), DivClass::anticanonical()] {
            let down = pushdown_orthogonalize(&cls, &mu).unwrap();
            assert_eq!(intersect(&down, &gamma), 0);
            assert_eq!(intersect(&down, &DivClass::s_curve(0)), 0);
        }
        // anticanonical pushes down to self-intersection 2
        let l = pushdown_orthogonalize(&DivClass::anticanonical(), &mu).unwrap();
        assert_eq!(intersect(&l, &l), 2);
        // and equals 2 C0 + s_1 + s_2 + s_3 downstairs
        let mut alt = pushdown_orthogonalize(&DivClass::c0(), &mu).unwrap().scale(2);
        for j in 1..4 {
            alt = alt.add(&DivClass::s_curve(j));
        }
        assert_eq!(l, alt);
    }

    #[test]
    fn delpezzo_report_examples() {
        let r = delpezzo_report(&tv([3, 2, 2, 2])).unwrap();
        assert_eq!(r.exceptional_count, 25);
        assert_eq!(r.positive_dim_fibers, 3);
        assert_eq!(r.pencil_reducibles, 1);
        assert_eq!(r.omega_genus, 1);
        assert!(matches!(r.profile, OmegaProfile::SmoothGenusOne { .. }));

        let r = delpezzo_report(&tv([1, 0, 0, 2])).unwrap();
        assert_eq!(r.exceptional_count, 14);
        assert_eq!(r.positive_dim_fibers, 5);
        assert!(matches!(r.profile, OmegaProfile::LinePlusConic));

        let r = delpezzo_report(&tv([1, 0, 0, 0])).unwrap();
        assert_eq!(r.exceptional_count, 10);
        assert!(matches!(r.profile, OmegaProfile::ThreeLines));

        let r = delpezzo_report(&tv([0, 1, 1, 1])).unwrap();
        assert!(matches!(r.profile, OmegaProfile::NodalRational));
        assert_eq!(r.omega_genus, 0);
    }

    #[test]
    fn omega_genus_tracks_zero_count() {
        for mu in class_zero_sweep(4) {
            let r = delpezzo_report(&mu).unwrap();
            assert_eq!(r.omega_genus, 1 - mu.stats().zeros, "mu = {mu:?}");
            // the image of omega is a plane cubic
            let l = pushdown_orthogonalize(&DivClass::anticanonical(), &mu).unwrap();
            assert_eq!(intersect(&r.omega, &l), 3);
        }
    }
}
