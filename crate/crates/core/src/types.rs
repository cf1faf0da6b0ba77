//! Exact integer arithmetic on cover type vectors.
//!
//! A type vector lives in one of the four parity families T_k of N^4: the
//! k-th coordinate has parity opposite to the other three (equivalently the
//! coordinate sum is odd, and k is the odd one out). Everything in this
//! module is exact; no floats.

use crate::error::{Error, Result};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// A vector in some parity family T_k, with its class index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeVector {
    v: [i64; 4],
    class: u8,
}

impl fmt::Debug for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})@T{}",
            self.v[0], self.v[1], self.v[2], self.v[3], self.class
        )
    }
}

/// Summary statistics of a type vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MuStats {
    /// Coordinate sum.
    pub sum: i64,
    /// Sum of squared coordinates.
    pub sum_sq: i64,
    /// n = (sum_sq - 1) / 2, the intersection-free cover degree.
    pub n: i64,
    /// g = (sum - 1) / 2, the arithmetic genus.
    pub g: i64,
    /// Number of vanishing coordinates.
    pub zeros: i64,
    /// Number of coordinates equal to one.
    pub ones: i64,
}

impl TypeVector {
    /// Validate membership in some parity family and record the class.
    pub fn new(v: [i64; 4]) -> Result<Self> {
        if v.iter().any(|&x| x < 0) {
            return Err(Error::InvalidTypeVector(v, "negative coordinate".into()));
        }
        let odd: Vec<usize> = (0..4).filter(|&i| v[i] % 2 != 0).collect();
        let class = match odd.len() {
            1 => odd[0],
            3 => (0..4).find(|i| !odd.contains(i)).unwrap(),
            _ => {
                return Err(Error::InvalidTypeVector(
                    v,
                    "coordinate sum must be odd".into(),
                ))
            }
        };
        Ok(TypeVector {
            v,
            class: class as u8,
        })
    }

    pub fn get(&self, i: usize) -> i64 {
        self.v[i]
    }

    pub fn as_array(&self) -> [i64; 4] {
        self.v
    }

    /// Index k of the parity family T_k this vector belongs to.
    pub fn class(&self) -> usize {
        self.class as usize
    }

    pub fn is_class_zero(&self) -> bool {
        self.class == 0
    }

    pub fn require_class_zero(&self) -> Result<()> {
        if self.is_class_zero() {
            Ok(())
        } else {
            Err(Error::NotClassZero(self.v))
        }
    }

    pub fn sum(&self) -> i64 {
        self.v.iter().sum()
    }

    pub fn sum_sq(&self) -> i64 {
        self.v.iter().map(|x| x * x).sum()
    }

    pub fn stats(&self) -> MuStats {
        let sum = self.sum();
        let sum_sq = self.sum_sq();
        debug_assert!(sum_sq % 2 == 1, "parity family forces odd square sum");
        MuStats {
            sum,
            sum_sq,
            n: (sum_sq - 1) / 2,
            g: (sum - 1) / 2,
            zeros: self.v.iter().filter(|&&x| x == 0).count() as i64,
            ones: self.v.iter().filter(|&&x| x == 1).count() as i64,
        }
    }

    /// Offset by an integer vector, revalidating the result.
    pub fn offset(&self, d: [i64; 4]) -> Result<Self> {
        TypeVector::new([
            self.v[0] + d[0],
            self.v[1] + d[1],
            self.v[2] + d[2],
            self.v[3] + d[3],
        ])
    }
}

/// Statistics of mu: coordinate sums, degree, genus and the zero/one counts.
pub fn mu_stats(mu: &TypeVector) -> MuStats {
    mu.stats()
}

/// Degree of a depth-d cover of type mu: n = (mu_sq - 1)/2 + 2 d.
pub fn degree_of(mu: &TypeVector, d: i64) -> Result<i64> {
    mu.require_class_zero()?;
    if d < 0 {
        return Err(Error::InvalidInput("negative depth".into()));
    }
    Ok(mu.stats().n + 2 * d)
}

/// Coefficient vector of an even potential; no parity constraint.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlphaVector(pub [i64; 4]);

impl fmt::Debug for AlphaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a({},{},{},{})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl AlphaVector {
    pub fn new(a: [i64; 4]) -> Result<Self> {
        if a.iter().any(|&x| x < 0) {
            return Err(Error::InvalidInput(format!(
                "alpha coordinates must be non-negative, got {a:?}"
            )));
        }
        Ok(AlphaVector(a))
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn as_array(&self) -> [i64; 4] {
        self.0
    }

    pub fn max_entry(&self) -> i64 {
        *self.0.iter().max().unwrap()
    }

    pub fn min_entry(&self) -> i64 {
        *self.0.iter().min().unwrap()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    /// sum alpha_i (alpha_i + 1); always even.
    pub fn weight_sum(&self) -> i64 {
        self.0.iter().map(|&a| a * (a + 1)).sum()
    }
}

fn alpha_from_product(t: i64) -> i64 {
    // unique non-negative a with a(a+1) = t(t+1): a = (|2t + 1| - 1) / 2
    ((2 * t + 1).abs() - 1) / 2
}

/// The eight coefficient maps T_0 -> N^4 indexed by (j, k) in Z_2 x Z_4.
///
/// For (0,0): alpha_0 = g, and alpha_j solves
/// alpha_j(alpha_j + 1) = (g - mu_0 - mu_j)(g - mu_0 - mu_j + 1).
/// For (1,0): alpha_i solves alpha_i(alpha_i + 1) = (g - mu_i)(g - mu_i + 1).
///
/// For other k the (j,0) image is index-shifted by the half-period
/// translation: indices compose in the Klein four-group (xor), which is the
/// group the two-torsion points actually form. A cyclic shift would land the
/// distinguished coefficient at the wrong slot and break injectivity across
/// the eight maps.
pub fn c_map(j: u8, k: u8, mu: &TypeVector) -> Result<AlphaVector> {
    mu.require_class_zero()?;
    if j > 1 || k > 3 {
        return Err(Error::InvalidInput(format!("(j,k) = ({j},{k}) out of range")));
    }
    let g = mu.stats().g;
    let base: [i64; 4] = if j == 0 {
        let mut a = [0i64; 4];
        a[0] = g;
        for idx in 1..4 {
            a[idx] = alpha_from_product(g - mu.get(0) - mu.get(idx));
        }
        a
    } else {
        let mut a = [0i64; 4];
        for idx in 0..4 {
            a[idx] = alpha_from_product(g - mu.get(idx));
        }
        a
    };
    let mut out = [0i64; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = base[i ^ k as usize];
    }
    AlphaVector::new(out)
}

/// All mu in the class-0 family with the given square sum.
fn class_zero_with_sum_sq(target: i64) -> Vec<TypeVector> {
    let mut out = Vec::new();
    if target <= 0 {
        return out;
    }
    let bound = (target as f64).sqrt() as i64 + 1;
    for m0 in 0..=bound {
        let r0 = target - m0 * m0;
        if r0 < 0 {
            break;
        }
        for m1 in 0..=bound {
            let r1 = r0 - m1 * m1;
            if r1 < 0 {
                break;
            }
            for m2 in 0..=bound {
                let r2 = r1 - m2 * m2;
                if r2 < 0 {
                    break;
                }
                let m3 = (r2 as f64).sqrt().round() as i64;
                if m3 >= 0 && m3 * m3 == r2 {
                    if let Ok(tv) = TypeVector::new([m0, m1, m2, m3]) {
                        if tv.is_class_zero() {
                            out.push(tv);
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Invert the coefficient maps: the unique class-0 mu with c_map(j,k,mu) =
/// alpha for some (j,k), plus every matching (j,k) pair.
///
/// The search space is pinned down exactly by
/// mu_sq = sum alpha_i(alpha_i + 1) + 1.
pub fn c_map_inverse(alpha: &AlphaVector) -> Result<(TypeVector, Vec<(u8, u8)>)> {
    let target = alpha.weight_sum() + 1;
    let mut found: Option<TypeVector> = None;
    let mut pairs = Vec::new();
    for mu in class_zero_with_sum_sq(target) {
        for j in 0..2u8 {
            for k in 0..4u8 {
                if c_map(j, k, &mu)? == *alpha {
                    match found {
                        None => found = Some(mu),
                        Some(prev) if prev != mu => {
                            return Err(Error::InvariantViolation(format!(
                                "coefficient map not injective: {prev:?} and {mu:?} both map to {alpha:?}"
                            )))
                        }
                        _ => {}
                    }
                    pairs.push((j, k));
                }
            }
        }
    }
    match found {
        Some(mu) => Ok((mu, pairs)),
        None => Err(Error::InvariantViolation(format!(
            "no class-0 preimage for {alpha:?}; the inversion search is broken"
        ))),
    }
}

/// Arithmetic genus attached to a coefficient vector:
/// g = Max(2M, S + 1 - (1 + (-1)^S)(m + 1/2)) / 2, always an integer.
pub fn g_alpha(alpha: &AlphaVector) -> i64 {
    let m_max = alpha.max_entry();
    let s = alpha.sum();
    let m_min = alpha.min_entry();
    let second = if s % 2 == 0 { s - 2 * m_min } else { s + 1 };
    let v = (2 * m_max).max(second);
    debug_assert!(v % 2 == 0);
    v / 2
}

/// The involution nu_i -> |2 mu_i - nu_i| induced by the degree-2 del Pezzo
/// projection attached to mu.
pub fn geiser(mu: &TypeVector, nu: &TypeVector) -> Result<TypeVector> {
    mu.require_class_zero()?;
    let mut out = [0i64; 4];
    for i in 0..4 {
        out[i] = (2 * mu.get(i) - nu.get(i)).abs();
    }
    TypeVector::new(out)
}

/// All nu with (nu - mu) of square length 2 — the candidate exceptional
/// curves on the contracted surface, excluding the section class.
pub fn exceptional_neighbors(mu: &TypeVector) -> Result<Vec<TypeVector>> {
    mu.require_class_zero()?;
    let mut out = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            for si in [-1i64, 1] {
                for sj in [-1i64, 1] {
                    let mut d = [0i64; 4];
                    d[i] = si;
                    d[j] = sj;
                    if let Ok(nu) = mu.offset(d) {
                        out.push(nu);
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Intersection number of the exceptional classes labeled by nu and sigma:
/// ((nu - sigma)_sq - 2)/4 across classes, ((nu - sigma)_sq - 4)/4 within
/// one class.
pub fn gamma_intersection(nu: &TypeVector, sigma: &TypeVector) -> i64 {
    let mut dsq = 0i64;
    for i in 0..4 {
        let d = nu.get(i) - sigma.get(i);
        dsq += d * d;
    }
    let num = if nu.class() == sigma.class() {
        dsq - 4
    } else {
        dsq - 2
    };
    debug_assert!(num % 4 == 0, "intersection number must be integral");
    num / 4
}

/// Number of rational irreducible members of the depth-d linear system of
/// type mu, for a generic base curve. Closed forms exist for d <= 2.
pub fn severi_count(mu: &TypeVector, d: i64) -> Result<i64> {
    mu.require_class_zero()?;
    let st = mu.stats();
    match d {
        0 => Ok(1),
        1 => Ok(6 - 2 * st.zeros),
        2 => Ok(27 - 14 * st.zeros + 2 * st.zeros * st.zeros - 3 * st.ones),
        _ => Err(Error::UnsupportedDepth(d)),
    }
}

/// Symbolic theta-characteristic label: the distinguished pair (j, k) plus
/// optional marked-point shifts, one entry per added ramification point over
/// the recorded half-period (each balanced by subtracting the marked point).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaLabel {
    pub j: u8,
    pub k: u8,
    /// Half-period indices of the added ramification points.
    pub shifts: Vec<u8>,
}

/// One stratum of the depth-2 spectral enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralDatum {
    pub nu: TypeVector,
    pub degree_n: i64,
    pub genus_g: i64,
    pub theta: ThetaLabel,
    pub count: i64,
}

impl SpectralDatum {
    /// Stratum depth h recovered from 2n + 1 = nu_sq + 4h.
    pub fn depth(&self) -> i64 {
        (2 * self.degree_n + 1 - self.nu.sum_sq()) / 4
    }

    pub fn validate(&self) -> Result<()> {
        let h = 2 * self.degree_n + 1 - self.nu.sum_sq();
        if h % 4 != 0 || h < 0 {
            return Err(Error::InvariantViolation(format!(
                "degree/type mismatch in {self:?}"
            )));
        }
        if self.genus_g != (self.nu.sum() - 1) / 2 {
            return Err(Error::InvariantViolation(format!(
                "genus/type mismatch in {self:?}"
            )));
        }
        Ok(())
    }
}

/// The full depth-2 spectral enumeration attached to a coefficient vector.
///
/// Strata, in order: the type-mu stratum counted by the generic depth-2
/// Severi number; for each vanishing coordinate a bumped type of genus g+1
/// counted twice per depth-1 Severi member; for each coordinate equal to one
/// an exceptional bumped type of genus g+1 with three marked-point choices;
/// for each vanishing pair an exceptional type of genus g+2 with four.
/// Counts always total 27.
pub fn spectral_enumeration(alpha: &AlphaVector) -> Result<Vec<SpectralDatum>> {
    let (mu, pairs) = c_map_inverse(alpha)?;
    let (j, k) = *pairs.first().expect("inverse always returns a pair");
    let st = mu.stats();
    let n = degree_of(&mu, 2)?;
    let g = st.g;
    let mut out = Vec::new();

    out.push(SpectralDatum {
        nu: mu,
        degree_n: n,
        genus_g: g,
        theta: ThetaLabel { j, k, shifts: vec![] },
        count: severi_count(&mu, 2)?,
    });

    for i in 0..4 {
        if mu.get(i) == 0 {
            let mut d = [0i64; 4];
            d[i] = 2;
            let nu = mu.offset(d)?;
            out.push(SpectralDatum {
                nu,
                degree_n: n,
                genus_g: g + 1,
                theta: ThetaLabel { j, k, shifts: vec![i as u8] },
                count: 2 * severi_count(&nu, 1)?,
            });
        }
    }

    for i in 0..4 {
        if mu.get(i) == 1 {
            let mut d = [0i64; 4];
            d[i] = 2;
            let nu = mu.offset(d)?;
            out.push(SpectralDatum {
                nu,
                degree_n: n,
                genus_g: g + 1,
                theta: ThetaLabel { j, k, shifts: vec![i as u8] },
                count: 3,
            });
        }
    }

    for a in 1..4usize {
        for b in (a + 1)..4 {
            if mu.get(a) == 0 && mu.get(b) == 0 {
                let mut d = [0i64; 4];
                d[a] = 2;
                d[b] = 2;
                let tau = mu.offset(d)?;
                out.push(SpectralDatum {
                    nu: tau,
                    degree_n: n,
                    genus_g: g + 2,
                    theta: ThetaLabel { j, k, shifts: vec![a as u8, b as u8] },
                    count: 4,
                });
            }
        }
    }

    for d in &out {
        d.validate()?;
    }
    let total: i64 = out.iter().map(|d| d.count).sum();
    if total != 27 {
        return Err(Error::InvariantViolation(format!(
            "spectral strata for {alpha:?} total {total}, expected 27"
        )));
    }
    Ok(out)
}

/// Divisor record of the distinguished theta-characteristic labeled (j, k)
/// on a degree-n genus-g cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaCharacteristic {
    pub j: u8,
    pub k: u8,
    pub degree_n: i64,
    pub genus_g: i64,
    /// Coefficient of the marked point.
    pub point_coefficient: i64,
    /// Half-period indices pulled back through the cover.
    pub pullbacks: Vec<u8>,
}

impl ThetaCharacteristic {
    /// Total degree, using deg(pullback of a point) = n. Always g - 1.
    pub fn degree(&self) -> i64 {
        self.point_coefficient + self.degree_n * self.pullbacks.len() as i64
    }
}

pub fn theta_char(j: u8, k: u8, n: i64, g: i64) -> Result<ThetaCharacteristic> {
    if j > 1 || k > 3 {
        return Err(Error::InvalidInput(format!("(j,k) = ({j},{k}) out of range")));
    }
    if n < 0 || g < 0 {
        return Err(Error::InvalidInput("negative degree or genus".into()));
    }
    let (coeff, pulls) = if j == 0 {
        (g - 1 - 2 * n, vec![k, 0])
    } else {
        (g - 1 - n, vec![k])
    };
    Ok(ThetaCharacteristic {
        j,
        k,
        degree_n: n,
        genus_g: g,
        point_coefficient: coeff,
        pullbacks: pulls,
    })
}

/// Base data for the depth recursion: generic Severi counts per (type,
/// depth), plus the base-type potential counts per depth.
pub type SeveriBase = BTreeMap<(TypeVector, i64), i64>;
pub type PotZeroTable = BTreeMap<i64, i64>;

/// Every (nu, l) entry `recursion_count` will look up for the given (mu, d).
pub fn required_base_entries(mu: &TypeVector, d: i64) -> Result<Vec<(TypeVector, i64)>> {
    mu.require_class_zero()?;
    let mut out = Vec::new();
    for g0 in 0..=d {
        for g1 in 0..=d {
            for g2 in 0..=d {
                for g3 in 0..=d {
                    let gamma = [g0, g1, g2, g3];
                    if gamma == [0, 0, 0, 0] {
                        continue;
                    }
                    let mudot: i64 = (0..4).map(|i| mu.get(i) * gamma[i]).sum();
                    let gsq: i64 = gamma.iter().map(|x| x * x).sum();
                    let l = d - mudot - gsq;
                    if l < 0 {
                        continue;
                    }
                    let nu = mu.offset([2 * g0, 2 * g1, 2 * g2, 2 * g3])?;
                    out.push((nu, l));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Depth-d count by the downward recursion
/// count(mu, d) = pot0[d] - sum over (nu = mu + 2 gamma, l) of
/// base[(nu, l)] * prod binom(nu_i, gamma_i), the sum running over gamma != 0
/// with mu.gamma + gamma_sq + l = d.
pub fn recursion_count(
    mu: &TypeVector,
    d: i64,
    base: &SeveriBase,
    pot0: &PotZeroTable,
) -> Result<i64> {
    mu.require_class_zero()?;
    if d < 0 {
        return Err(Error::InvalidInput("negative depth".into()));
    }
    let total = *pot0.get(&d).ok_or_else(|| {
        Error::MissingBaseEntries(format!("base-type potential count for depth {d}"))
    })?;
    let mut correction = 0i64;
    let mut missing = Vec::new();
    for g0 in 0..=d {
        for g1 in 0..=d {
            for g2 in 0..=d {
                for g3 in 0..=d {
                    let gamma = [g0, g1, g2, g3];
                    if gamma == [0, 0, 0, 0] {
                        continue;
                    }
                    let mudot: i64 = (0..4).map(|i| mu.get(i) * gamma[i]).sum();
                    let gsq: i64 = gamma.iter().map(|x| x * x).sum();
                    let l = d - mudot - gsq;
                    if l < 0 {
                        continue;
                    }
                    let nu = mu.offset([2 * g0, 2 * g1, 2 * g2, 2 * g3])?;
                    match base.get(&(nu, l)) {
                        None => missing.push(format!("({:?}, {l})", nu)),
                        Some(&count) => {
                            let mut weight = 1i64;
                            for i in 0..4 {
                                weight *= binomial(nu.get(i), gamma[i]);
                            }
                            correction += count * weight;
                        }
                    }
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingBaseEntries(missing.join(", ")));
    }
    Ok(total - correction)
}

/// Severi base entries from the closed forms, for every (nu, l) required by
/// (mu, d) with l <= 2; errors if a deeper entry would be needed.
pub fn standard_base(mu: &TypeVector, d: i64) -> Result<SeveriBase> {
    let mut base = SeveriBase::new();
    for (nu, l) in required_base_entries(mu, d)? {
        if l > 2 {
            return Err(Error::MissingBaseEntries(format!(
                "({nu:?}, {l}): no closed form beyond depth 2"
            )));
        }
        base.insert((nu, l), severi_count(&nu, l)?);
    }
    Ok(base)
}

/// The known base-type potential counts: 1, 6 and 27 at depths 0, 1, 2.
pub fn standard_pot_zero() -> PotZeroTable {
    let mut t = PotZeroTable::new();
    t.insert(0, 1);
    t.insert(1, 6);
    t.insert(2, 27);
    t
}

pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1i64;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// All class-0 vectors with coordinates bounded by `max_entry`.
pub fn class_zero_sweep(max_entry: i64) -> Vec<TypeVector> {
    let mut out = Vec::new();
    for m0 in 0..=max_entry {
        for m1 in 0..=max_entry {
            for m2 in 0..=max_entry {
                for m3 in 0..=max_entry {
                    if let Ok(tv) = TypeVector::new([m0, m1, m2, m3]) {
                        if tv.is_class_zero() {
                            out.push(tv);
                        }
                    }
                }
            }
        }
    }
    out
}

/// All class-0 vectors with coordinate sum at most `max_sum`.
pub fn class_zero_by_sum(max_sum: i64) -> Vec<TypeVector> {
    class_zero_sweep(max_sum)
        .into_iter()
        .filter(|tv| tv.sum() <= max_sum)
        .collect()
}

impl Serialize for TypeVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TypeVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <[i64; 4]>::deserialize(d)?;
        TypeVector::new(v).map_err(serde::de::Error::custom)
    }
}

impl Serialize for AlphaVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlphaVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <[i64; 4]>::deserialize(d)?;
        AlphaVector::new(v).map_err(serde::de::Error::custom)
    }
}

impl Serialize for SpectralDatum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SpectralDatum", 5)?;
        st.serialize_field("nu", &self.nu)?;
        st.serialize_field("n", &self.degree_n)?;
        st.serialize_field("g", &self.genus_g)?;
        st.serialize_field("theta", &self.theta)?;
        st.serialize_field("count", &self.count)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tv(v: [i64; 4]) -> TypeVector {
        TypeVector::new(v).unwrap()
    }

    fn av(a: [i64; 4]) -> AlphaVector {
        AlphaVector::new(a).unwrap()
    }

    #[test]
    fn stats_examples() {
        let s = mu_stats(&tv([1, 0, 0, 0]));
        assert_eq!((s.sum, s.sum_sq, s.n, s.g, s.zeros, s.ones), (1, 1, 0, 0, 3, 1));
        let s = mu_stats(&tv([3, 2, 2, 2]));
        assert_eq!((s.sum, s.sum_sq, s.n, s.g, s.zeros, s.ones), (9, 21, 10, 4, 0, 0));
        let s = mu_stats(&tv([1, 0, 0, 2]));
        assert_eq!((s.zeros, s.ones), (2, 1));
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree_of(&tv([1, 0, 0, 0]), 2).unwrap(), 4);
        assert_eq!(degree_of(&tv([3, 2, 2, 2]), 2).unwrap(), 14);
        assert_eq!(degree_of(&tv([1, 0, 0, 0]), 0).unwrap(), 0);
    }

    #[test]
    fn class_detection() {
        assert_eq!(tv([1, 0, 0, 0]).class(), 0);
        assert_eq!(tv([0, 1, 0, 0]).class(), 1);
        assert_eq!(tv([1, 1, 1, 0]).class(), 3);
        assert_eq!(tv([4, 3, 2, 2]).class(), 1);
        assert!(TypeVector::new([1, 1, 0, 0]).is_err());
    }

    #[test]
    fn c_map_examples() {
        assert_eq!(c_map(1, 0, &tv([1, 0, 0, 0])).unwrap(), av([0, 0, 0, 0]));
        assert_eq!(c_map(1, 0, &tv([3, 2, 2, 2])).unwrap(), av([1, 2, 2, 2]));
        assert_eq!(c_map(0, 0, &tv([1, 0, 0, 0])).unwrap(), av([0, 0, 0, 0]));
        assert_eq!(c_map(0, 0, &tv([3, 2, 2, 2])).unwrap(), av([4, 0, 0, 0]));
    }

    #[test]
    fn c_map_inverse_examples() {
        let (mu, pairs) = c_map_inverse(&av([0, 0, 0, 0])).unwrap();
        assert_eq!(mu, tv([1, 0, 0, 0]));
        assert_eq!(pairs.len(), 8);

        let (mu, pairs) = c_map_inverse(&av([1, 2, 2, 2])).unwrap();
        assert_eq!(mu, tv([3, 2, 2, 2]));
        assert!(pairs.contains(&(1, 0)));

        let (mu, _) = c_map_inverse(&av([4, 0, 0, 0])).unwrap();
        assert_eq!(mu, tv([3, 2, 2, 2]));
    }

    #[test]
    fn weight_sum_identity() {
        for mu in class_zero_by_sum(9) {
            for j in 0..2 {
                for k in 0..4 {
                    let a = c_map(j, k, &mu).unwrap();
                    assert_eq!(a.weight_sum(), mu.sum_sq() - 1, "mu = {mu:?}, ({j},{k})");
                }
            }
        }
    }

    #[test]
    fn g_alpha_examples() {
        assert_eq!(g_alpha(&av([0, 0, 0, 0])), 0);
        assert_eq!(g_alpha(&av([1, 2, 2, 2])), 4);
        assert_eq!(g_alpha(&av([4, 0, 0, 0])), 4);
    }

    #[test]
    fn geiser_examples() {
        let mu = tv([3, 2, 2, 2]);
        let nu = tv([4, 3, 2, 2]);
        let img = geiser(&mu, &nu).unwrap();
        assert_eq!(img.as_array(), [2, 1, 2, 2]);
        let n_nu = nu.stats().n;
        let n_img = img.stats().n;
        assert_eq!(n_nu + n_img, mu.sum_sq() + 1);

        // the offset pair mu +- (1,1,0,0) is swapped
        let up = mu.offset([1, 1, 0, 0]).unwrap();
        let down = mu.offset([-1, -1, 0, 0]).unwrap();
        assert_eq!(geiser(&mu, &up).unwrap(), down);
        assert_eq!(geiser(&mu, &down).unwrap(), up);
    }

    #[test]
    fn neighbor_census() {
        assert_eq!(exceptional_neighbors(&tv([3, 2, 2, 2])).unwrap().len(), 24);
        assert_eq!(exceptional_neighbors(&tv([1, 0, 0, 0])).unwrap().len(), 9);
        for mu in [tv([3, 2, 2, 2]), tv([1, 0, 0, 2]), tv([1, 0, 0, 0]), tv([5, 0, 2, 0])] {
            let zeros = mu.stats().zeros as usize;
            let expect = [24usize, 18, 13, 9][zeros];
            assert_eq!(exceptional_neighbors(&mu).unwrap().len(), expect, "mu = {mu:?}");
        }
    }

    #[test]
    fn geiser_is_involution_on_neighbors() {
        for mu in [tv([3, 2, 2, 2]), tv([1, 0, 0, 2]), tv([1, 0, 0, 0]), tv([0, 1, 1, 1])] {
            let nbrs = exceptional_neighbors(&mu).unwrap();
            let mut fixed = 0;
            for nu in &nbrs {
                let img = geiser(&mu, nu).unwrap();
                assert!(nbrs.contains(&img), "image left the neighbor set");
                assert_eq!(geiser(&mu, &img).unwrap(), *nu);
                if img == *nu {
                    fixed += 1;
                }
            }
            // fixed points exist iff two coordinates of mu vanish
            let zero_pairs = {
                let z = mu.stats().zeros;
                z >= 2
            };
            assert_eq!(fixed > 0, zero_pairs, "mu = {mu:?}");
        }
    }

    #[test]
    fn gamma_intersection_examples() {
        let nu = tv([1, 0, 0, 0]);
        assert_eq!(gamma_intersection(&nu, &nu), -1);
        let sigma = tv([0, 1, 0, 0]);
        assert_eq!(gamma_intersection(&nu, &sigma), 0);
    }

    #[test]
    fn severi_examples() {
        assert_eq!(severi_count(&tv([3, 2, 2, 2]), 2).unwrap(), 27);
        assert_eq!(severi_count(&tv([1, 0, 0, 2]), 2).unwrap(), 4);
        assert_eq!(severi_count(&tv([1, 0, 0, 0]), 2).unwrap(), 0);
        assert!(matches!(
            severi_count(&tv([1, 0, 0, 0]), 3),
            Err(Error::UnsupportedDepth(3))
        ));
    }

    #[test]
    fn spectral_enumeration_examples() {
        let strata = spectral_enumeration(&av([1, 2, 2, 2])).unwrap();
        assert_eq!(strata.len(), 1);
        assert_eq!(strata[0].nu, tv([3, 2, 2, 2]));
        assert_eq!(strata[0].genus_g, 4);
        assert_eq!(strata[0].count, 27);
        assert_eq!((strata[0].theta.j, strata[0].theta.k), (1, 0));

        let strata = spectral_enumeration(&av([0, 0, 0, 0])).unwrap();
        let total: i64 = strata.iter().map(|s| s.count).sum();
        assert_eq!(total, 27);
        let mut geni: Vec<i64> = strata.iter().filter(|s| s.count > 0).map(|s| s.genus_g).collect();
        geni.sort();
        geni.dedup();
        assert_eq!(geni, vec![1, 2]);
        // the empty top stratum is still listed
        assert_eq!(strata[0].count, 0);
        assert_eq!(strata[0].genus_g, 0);
    }

    #[test]
    fn theta_char_examples() {
        let t = theta_char(0, 0, 5, 3).unwrap();
        assert_eq!(t.point_coefficient, 3 - 1 - 10);
        assert_eq!(t.pullbacks, vec![0, 0]);
        assert_eq!(t.degree(), 2);

        let t = theta_char(1, 2, 14, 4).unwrap();
        assert_eq!(t.point_coefficient, -11);
        assert_eq!(t.degree(), 3);
    }

    #[test]
    fn theta_char_degree_is_genus_minus_one() {
        for j in 0..2 {
            for k in 0..4 {
                for n in [0, 1, 5, 14] {
                    for g in [0, 2, 4, 7] {
                        let t = theta_char(j, k, n, g).unwrap();
                        assert_eq!(t.degree(), g - 1);
                    }
                }
            }
        }
    }

    #[test]
    fn recursion_examples() {
        let pot0 = standard_pot_zero();

        let mu = tv([3, 2, 2, 2]);
        let base = standard_base(&mu, 2).unwrap();
        assert_eq!(recursion_count(&mu, 2, &base, &pot0).unwrap(), 27);

        let mu = tv([1, 0, 0, 0]);
        let base = standard_base(&mu, 2).unwrap();
        assert_eq!(recursion_count(&mu, 2, &base, &pot0).unwrap(), 0);
    }

    #[test]
    fn recursion_missing_base_reported() {
        let mu = tv([1, 0, 0, 0]);
        let base = SeveriBase::new();
        match recursion_count(&mu, 2, &base, &standard_pot_zero()) {
            Err(Error::MissingBaseEntries(s)) => assert!(s.contains("(3,0,0,0)")),
            other => panic!("expected missing base entries, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_small() {
        for mu in class_zero_by_sum(9) {
            for j in 0..2 {
                for k in 0..4 {
                    let a = c_map(j, k, &mu).unwrap();
                    let (back, pairs) = c_map_inverse(&a).unwrap();
                    assert_eq!(back, mu, "alpha = {a:?}");
                    assert!(pairs.contains(&(j, k)));
                }
            }
        }
    }

    #[test]
    fn json_shapes() {
        let mu = tv([1, 0, 0, 2]);
        assert_eq!(serde_json::to_string(&mu).unwrap(), "[1,0,0,2]");
        let strata = spectral_enumeration(&av([0, 0, 0, 0])).unwrap();
        let js = serde_json::to_value(&strata[1]).unwrap();
        assert!(js.get("nu").is_some());
        assert!(js.get("theta").unwrap().get("shifts").is_some());
    }

    proptest! {
        #[test]
        fn geiser_involution_random(raw in prop::array::uniform4(0i64..7), flip in 0usize..4, other in 0usize..4) {
            // build a valid class-0 mu from raw by parity adjustment
            let mut v = raw;
            v[0] |= 1;
            for x in v.iter_mut().skip(1) { *x &= !1; }
            let mu = TypeVector::new(v).unwrap();
            prop_assume!(flip != other);
            let mut d = [0i64; 4];
            d[flip] = 1;
            d[other] = 1;
            if let Ok(nu) = mu.offset(d) {
                let img = geiser(&mu, &nu).unwrap();
                prop_assert_eq!(geiser(&mu, &img).unwrap(), nu);
                prop_assert_eq!(img.stats().n + nu.stats().n, mu.sum_sq() + 1);
            }
        }
    }
}
