//! Weierstrass elliptic functions over an arbitrary complex period lattice.
//!
//! A [`Lattice`] owns half-periods (omega_a, omega_b), the invariants g2, g3,
//! the branch values e_j = wp(omega_j), and everything needed to evaluate
//! wp, wp' and wp'' in double precision:
//!
//! * the full-period basis {2 omega_a, 2 omega_b} is Gauss-reduced once,
//! * g2, g3 come from the Eisenstein q-series on the reduced basis,
//! * arguments are translated to the fundamental cell, fed to the truncated
//!   Laurent series wp(z) = 1/z^2 + sum c_k z^(2k-2), and doubled back with
//!   the duplication formula whenever they fall outside the series' trust
//!   radius.
//!
//! All operations are pure; `Lattice` is immutable after construction.

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
/// Laurent coefficients c_2 .. c_(LAURENT_TERMS+1) are kept; at the trust
/// radius 0.45 the tail is below 1e-16.
const LAURENT_TERMS: usize = 30;
const EISENSTEIN_TERMS: usize = 64;

/// An elliptic curve C/Lambda presented by a half-period pair, together with
/// its derived data. `omegas` holds the four two-torsion representatives
/// (0, omega_a, omega_a + omega_b, omega_b) in that order.
#[derive(Clone, Debug)]
pub struct Lattice {
    half_period_a: Complex64,
    half_period_b: Complex64,
    g2: Complex64,
    g3: Complex64,
    e: [Complex64; 3],
    omegas: [Complex64; 4],
    /// Gauss-reduced basis of the full period lattice {2wa, 2wb}.
    v1: Complex64,
    v2: Complex64,
    shortest: f64,
    laurent: Vec<Complex64>,
    tol: ToleranceConfig,
}

/// wp, wp' and wp'' at one point.
#[derive(Clone, Copy, Debug)]
pub struct WpValues {
    pub p: Complex64,
    pub dp: Complex64,
    pub ddp: Complex64,
}

/// Residuals of the two addition identities behind the pole-system
/// reduction, both raw and normalized by the magnitude of their terms.
#[derive(Clone, Copy, Debug)]
pub struct AdditionResiduals {
    /// Identity (i), wp'(z - omega_j) (wp(z) - e_j)^2 + wp'(z) E_j, per j.
    pub half_period: [Complex64; 3],
    pub half_period_rel: f64,
    /// Identity (ii), the paired-argument formula.
    pub pair: Complex64,
    pub pair_rel: f64,
}

fn gauss_reduce(mut v1: Complex64, mut v2: Complex64) -> (Complex64, Complex64) {
    if v1.norm_sqr() > v2.norm_sqr() {
        std::mem::swap(&mut v1, &mut v2);
    }
    loop {
        let m = ((v2 * v1.conj()).re / v1.norm_sqr()).round();
        if m != 0.0 {
            v2 -= Complex64::new(m, 0.0) * v1;
        }
        if v2.norm_sqr() >= v1.norm_sqr() {
            break;
        }
        std::mem::swap(&mut v1, &mut v2);
    }
    if (v2 / v1).im < 0.0 {
        v2 = -v2;
    }
    (v1, v2)
}

impl Lattice {
    /// Build a lattice from half-periods. The orientation Im(wb/wa) > 0 is
    /// enforced by swapping the pair when necessary; a collinear pair is
    /// rejected.
    pub fn from_periods(omega_a: Complex64, omega_b: Complex64) -> Result<Self> {
        Self::from_periods_with(omega_a, omega_b, ToleranceConfig::default())
    }

    pub fn from_periods_with(
        mut omega_a: Complex64,
        mut omega_b: Complex64,
        tol: ToleranceConfig,
    ) -> Result<Self> {
        if !omega_a.is_finite() || !omega_b.is_finite() {
            return Err(Error::DegenerateLattice("non-finite period".into()));
        }
        let area = (omega_a.conj() * omega_b).im;
        if area.abs() <= 1e-14 * omega_a.norm() * omega_b.norm() || omega_a.norm() == 0.0 {
            return Err(Error::DegenerateLattice(
                "collinear or vanishing periods".into(),
            ));
        }
        if area < 0.0 {
            std::mem::swap(&mut omega_a, &mut omega_b);
        }

        let (v1, v2) = gauss_reduce(2.0 * omega_a, 2.0 * omega_b);
        let shortest = v1.norm();

        // Eisenstein series on the reduced basis; Im(tau) >= sqrt(3)/2 so the
        // nome is tiny and a short sum is plenty.
        let tau = v2 / v1;
        let q = (Complex64::new(0.0, TWO_PI) * tau).exp();
        let mut e4 = Complex64::new(1.0, 0.0);
        let mut e6 = Complex64::new(1.0, 0.0);
        let mut qn = Complex64::new(1.0, 0.0);
        for n in 1..=EISENSTEIN_TERMS {
            qn *= q;
            let f = qn / (Complex64::new(1.0, 0.0) - qn);
            let nf = n as f64;
            e4 += 240.0 * nf.powi(3) * f;
            e6 -= 504.0 * nf.powi(5) * f;
        }
        let pref = Complex64::new(TWO_PI, 0.0) / v1;
        let g2 = pref.powu(4) * e4 / 12.0;
        let g3 = pref.powu(6) * e6 / 216.0;

        let laurent = laurent_coefficients(g2, g3);

        let omegas = [
            Complex64::new(0.0, 0.0),
            omega_a,
            omega_a + omega_b,
            omega_b,
        ];
        let mut lat = Lattice {
            half_period_a: omega_a,
            half_period_b: omega_b,
            g2,
            g3,
            e: [Complex64::new(0.0, 0.0); 3],
            omegas,
            v1,
            v2,
            shortest,
            laurent,
            tol,
        };
        for j in 1..=3 {
            lat.e[j - 1] = lat.wp(lat.omegas[j])?;
        }
        lat.validate()?;
        Ok(lat)
    }

    pub fn half_period_a(&self) -> Complex64 {
        self.half_period_a
    }

    pub fn half_period_b(&self) -> Complex64 {
        self.half_period_b
    }

    pub fn g2(&self) -> Complex64 {
        self.g2
    }

    pub fn g3(&self) -> Complex64 {
        self.g3
    }

    /// Branch values (e_1, e_2, e_3) = wp at (wa, wa + wb, wb).
    pub fn e(&self) -> [Complex64; 3] {
        self.e
    }

    /// Two-torsion representatives (0, wa, wa + wb, wb).
    pub fn omegas(&self) -> [Complex64; 4] {
        self.omegas
    }

    pub fn shortest_vector(&self) -> f64 {
        self.shortest
    }

    pub fn tolerances(&self) -> &ToleranceConfig {
        &self.tol
    }

    /// The cubic prod_j (x - e_j).
    pub fn branch_cubic(&self, x: Complex64) -> Complex64 {
        (x - self.e[0]) * (x - self.e[1]) * (x - self.e[2])
    }

    /// Check every construction invariant within tolerance.
    pub fn validate(&self) -> Result<()> {
        let scale = self.e.iter().map(|e| e.norm()).fold(1.0, f64::max);
        let sum = self.e[0] + self.e[1] + self.e[2];
        if sum.norm() > 1e-8 * scale {
            return Err(Error::InvariantViolation(format!(
                "branch values do not sum to zero: {sum}"
            )));
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if (self.e[i] - self.e[j]).norm() < 1e-10 * scale {
                    return Err(Error::InvariantViolation(
                        "branch values not pairwise distinct".into(),
                    ));
                }
            }
        }
        let g2_check = 2.0 * (self.e[0] * self.e[0] + self.e[1] * self.e[1] + self.e[2] * self.e[2]);
        if (g2_check - self.g2).norm() > 1e-8 * (1.0 + self.g2.norm()) {
            return Err(Error::InvariantViolation(format!(
                "g2 mismatch: series {} vs branch values {}",
                self.g2, g2_check
            )));
        }
        let g3_check = 4.0 * self.e[0] * self.e[1] * self.e[2];
        if (g3_check - self.g3).norm() > 1e-8 * (1.0 + self.g3.norm()) {
            return Err(Error::InvariantViolation(format!(
                "g3 mismatch: series {} vs branch values {}",
                self.g3, g3_check
            )));
        }
        for j in 1..=3 {
            let v = self.wp_all(self.omegas[j])?;
            if (v.p - self.e[j - 1]).norm() > 1e-8 * scale {
                return Err(Error::InvariantViolation(format!(
                    "wp(omega_{j}) differs from e_{j}"
                )));
            }
            let dp_scale = 1.0 + v.ddp.norm() * self.shortest;
            if v.dp.norm() > 1e-6 * dp_scale {
                return Err(Error::InvariantViolation(format!(
                    "wp'(omega_{j}) = {} not negligible",
                    v.dp
                )));
            }
        }
        Ok(())
    }

    /// Coordinates of z in the reduced basis (v1, v2).
    fn coords(&self, z: Complex64) -> (f64, f64) {
        let det = (self.v1.conj() * self.v2).im;
        let b = (self.v1.conj() * z).im / det;
        let a = -(self.v2.conj() * z).im / det;
        (a, b)
    }

    /// Translate z by a lattice vector to (approximately) the nearest-point
    /// representative around the origin.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let (a, b) = self.coords(z);
        self.reduce_from(z - a.round() * self.v1 - b.round() * self.v2)
    }

    fn reduce_from(&self, z: Complex64) -> Complex64 {
        let mut best = z;
        let mut improved = true;
        while improved {
            improved = false;
            for dm in [-1.0, 0.0, 1.0] {
                for dn in [-1.0, 0.0, 1.0] {
                    let cand = best - dm * self.v1 - dn * self.v2;
                    if cand.norm_sqr() < best.norm_sqr() {
                        best = cand;
                        improved = true;
                    }
                }
            }
        }
        best
    }

    /// Distance from z to the period lattice.
    pub fn dist_to_lattice(&self, z: Complex64) -> f64 {
        self.reduce(z).norm()
    }

    /// Distance from z to the nearest two-torsion point.
    pub fn dist_to_two_torsion(&self, z: Complex64) -> f64 {
        self.omegas
            .iter()
            .map(|&w| self.dist_to_lattice(z - w))
            .fold(f64::INFINITY, f64::min)
    }

    fn series(&self, w: Complex64) -> (Complex64, Complex64) {
        let u = w * w;
        // p  = 1/w^2 + sum_{k>=2} c_k u^(k-1)
        // p' = -2/w^3 + (1/w) sum_{k>=2} (2k-2) c_k u^(k-1)
        let mut s = Complex64::new(0.0, 0.0);
        let mut ds = Complex64::new(0.0, 0.0);
        let mut upow = u;
        for (idx, c) in self.laurent.iter().enumerate() {
            let k = (idx + 2) as f64;
            s += c * upow;
            ds += (2.0 * k - 2.0) * c * upow;
            upow *= u;
        }
        let p = 1.0 / u + s;
        let dp = -2.0 / (u * w) + ds / w;
        (p, dp)
    }

    /// wp, wp', wp'' at z. Errors inside the pole guard radius.
    pub fn wp_all(&self, z: Complex64) -> Result<WpValues> {
        let zr = self.reduce(z);
        let dist = zr.norm();
        let guard = self.tol.pole_guard_factor * self.shortest;
        if dist < guard {
            return Err(Error::Pole { dist, guard });
        }
        let radius = self.tol.series_radius_factor * self.shortest;
        let mut w = zr;
        let mut halvings = 0u32;
        while w.norm() >= radius {
            w *= 0.5;
            halvings += 1;
        }
        let (mut p, mut dp) = self.series(w);
        let mut ddp = 6.0 * p * p - self.g2 / 2.0;
        for _ in 0..halvings {
            let a = ddp / (2.0 * dp);
            let p2 = a * a - 2.0 * p;
            let dp2 = -dp + 6.0 * p * a - 2.0 * a * a * a;
            p = p2;
            dp = dp2;
            ddp = 6.0 * p * p - self.g2 / 2.0;
        }
        Ok(WpValues { p, dp, ddp })
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.wp_all(z)?.p)
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.wp_all(z)?.dp)
    }

    pub fn wp_second(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.wp_all(z)?.ddp)
    }

    /// Canonical representative of the orbit {z, -z} + Lambda: among the two
    /// reduced candidates, the lexicographically larger basis-coordinate
    /// pair (b, a) wins. Two-torsion points are their own image.
    pub fn canonical_signed(&self, z: Complex64) -> Complex64 {
        let zp = self.reduce(z);
        let zm = self.reduce(-z);
        let (ap, bp) = self.coords(zp);
        let (am, bm) = self.coords(zm);
        let eps = 1e-9;
        if (bp - bm).abs() > eps {
            if bp > bm {
                zp
            } else {
                zm
            }
        } else if (ap - am).abs() > eps {
            if ap > am {
                zp
            } else {
                zm
            }
        } else {
            zp
        }
    }

    /// Solve wp(z) = x for z in the fundamental cell.
    ///
    /// Without a hint the canonical representative of {z, -z} is returned
    /// (both lift to the same even potential). With `sign_hint` the branch
    /// with wp'(z) closest to the hint is chosen.
    pub fn invert_wp(&self, x: Complex64, sign_hint: Option<Complex64>) -> Result<Complex64> {
        let scale = 1.0f64.max(x.norm());
        // branch points go straight to their half-period
        for (j, &ej) in self.e.iter().enumerate() {
            if (x - ej).norm() <= 1e-9 * scale.max(ej.norm()) {
                return Ok(self.apply_hint(self.omegas[j + 1], sign_hint));
            }
        }

        let mut seeds = Vec::with_capacity(40);
        if x.norm() > 4.0 * self.e.iter().map(|e| e.norm()).fold(1.0, f64::max) {
            let s = 1.0 / x.sqrt();
            seeds.push(s);
            seeds.push(-s);
        }
        let grid = 6;
        for i in 0..grid {
            for j in 0..grid {
                let a = (i as f64 + 0.5) / grid as f64 - 0.5;
                let b = (j as f64 + 0.5) / grid as f64 - 0.5;
                seeds.push(a * self.v1 + b * self.v2);
            }
        }

        let tol = self.tol.invert_tol * scale;
        let mut best: Option<(f64, Complex64)> = None;
        for round in 0..4u64 {
            for (si, &seed) in seeds.iter().enumerate() {
                let mut z = if round == 0 {
                    seed
                } else {
                    // deterministic jitter for retry rounds
                    let j = splitmix(round * 1000 + si as u64);
                    seed + 0.07 * self.shortest * Complex64::new(j.0, j.1)
                };
                let mut ok = false;
                for _ in 0..60 {
                    let v = match self.wp_all(z) {
                        Ok(v) => v,
                        Err(_) => break,
                    };
                    let f = v.p - x;
                    if f.norm() <= tol {
                        ok = true;
                        break;
                    }
                    if v.dp.norm() == 0.0 {
                        break;
                    }
                    let mut step = f / v.dp;
                    let cap = 0.25 * self.shortest;
                    if step.norm() > cap {
                        step *= cap / step.norm();
                    }
                    z -= step;
                }
                if ok {
                    // polish
                    for _ in 0..3 {
                        if let Ok(v) = self.wp_all(z) {
                            if v.dp.norm() > 0.0 {
                                z -= (v.p - x) / v.dp;
                            }
                        }
                    }
                    let resid = self.wp(z).map(|p| (p - x).norm()).unwrap_or(f64::MAX);
                    if resid <= tol {
                        return Ok(self.apply_hint(self.canonical_signed(z), sign_hint));
                    }
                    if best.as_ref().map_or(true, |(r, _)| resid < *r) {
                        best = Some((resid, z));
                    }
                }
            }
        }
        Err(Error::NonConvergence(format!(
            "invert_wp failed for x = {x}; best residual {}",
            best.map(|(r, _)| r).unwrap_or(f64::INFINITY)
        )))
    }

    fn apply_hint(&self, z: Complex64, sign_hint: Option<Complex64>) -> Complex64 {
        match sign_hint {
            None => z,
            Some(h) => match self.wp_prime(z) {
                Ok(dp) if (dp * h.conj()).re < 0.0 => self.reduce(-z),
                _ => z,
            },
        }
    }

    /// Residuals of the two addition identities used by the pole-system
    /// reduction. Both vanish identically; the returned values measure
    /// evaluation error only.
    pub fn check_addition_identities(
        &self,
        z: Complex64,
        w: Complex64,
    ) -> Result<AdditionResiduals> {
        let vz = self.wp_all(z)?;
        let vw = self.wp_all(w)?;

        let mut half_period = [Complex64::new(0.0, 0.0); 3];
        let mut half_rel = 0.0f64;
        for j in 0..3 {
            let ej = self.e[j];
            let (k, l) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let big_e = (ej - self.e[k]) * (ej - self.e[l]);
            let dshift = self.wp_prime(z - self.omegas[j + 1])?;
            let t1 = dshift * (vz.p - ej) * (vz.p - ej);
            let t2 = vz.dp * big_e;
            half_period[j] = t1 + t2;
            let scale = t1.norm().max(t2.norm()).max(f64::MIN_POSITIVE);
            half_rel = half_rel.max(half_period[j].norm() / scale);
        }

        let dm = self.wp_prime(z - w)?;
        let dp_ = self.wp_prime(z + w)?;
        let diff = vz.p - vw.p;
        let t1 = 2.0 * (dm + dp_) * diff * diff * diff;
        let inner = (12.0 * vw.p * vw.p - self.g2) * diff + 16.0 * self.branch_cubic(vw.p);
        let t2 = vz.dp * inner;
        let pair = t1 + t2;
        let pair_scale = t1.norm().max(t2.norm()).max(f64::MIN_POSITIVE);

        Ok(AdditionResiduals {
            half_period,
            half_period_rel: half_rel,
            pair,
            pair_rel: pair.norm() / pair_scale,
        })
    }
}

/// Laurent coefficients c_2 = g2/20, c_3 = g3/28, and the convolution
/// recursion c_k = 3 / ((2k+1)(k-3)) * sum_{m=2}^{k-2} c_m c_{k-m}.
fn laurent_coefficients(g2: Complex64, g3: Complex64) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(LAURENT_TERMS);
    c.push(g2 / 20.0);
    c.push(g3 / 28.0);
    for k in 4..(LAURENT_TERMS + 2) {
        let mut s = Complex64::new(0.0, 0.0);
        for m in 2..=(k - 2) {
            s += c[m - 2] * c[k - m - 2];
        }
        let factor = 3.0 / ((2 * k + 1) as f64 * (k - 3) as f64);
        c.push(factor * s);
    }
    c
}

fn splitmix(seed: u64) -> (f64, f64) {
    let mut s = seed.wrapping_add(0x9E3779B97F4A7C15);
    let mut next = || {
        s = s.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = s;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    };
    let a = (next() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    let b = (next() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    (a, b)
}

impl Serialize for Lattice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Lattice", 2)?;
        st.serialize_field(
            "omega_a",
            &[self.half_period_a.re, self.half_period_a.im],
        )?;
        st.serialize_field(
            "omega_b",
            &[self.half_period_b.re, self.half_period_b.im],
        )?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Lattice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            omega_a: [f64; 2],
            omega_b: [f64; 2],
        }
        let raw = Raw::deserialize(d)?;
        Lattice::from_periods(
            Complex64::new(raw.omega_a[0], raw.omega_a[1]),
            Complex64::new(raw.omega_b[0], raw.omega_b[1]),
        )
        .map_err(D::Error::custom)
    }
}
