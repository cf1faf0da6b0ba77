//! Dense polynomial arithmetic over a generic coefficient ring, plus the
//! numeric kernels the solvers are built on: Aberth-Ehrlich simultaneous
//! root finding and Sylvester determinant evaluation.
//!
//! Polynomials are stored with ascending coefficients and exact trailing
//! zeros trimmed. Float-specific routines (deflation, root finding) live on
//! the `Complex64` instantiation; exact routines (gcd, square-free part) on
//! the `BigRational` one.

use crate::error::{Error, Result};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// Minimal ring bound for dense polynomial arithmetic.
pub trait Ring:
    Clone
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
{
}

/// Magnitude estimate used for float-mode zero thresholds. Exact scalars
/// report `EXACT = true` and are compared against literal zero instead.
pub trait Magnitude {
    const EXACT: bool;
    fn mag(&self) -> f64;
}

impl Magnitude for Complex64 {
    const EXACT: bool = false;
    fn mag(&self) -> f64 {
        self.norm()
    }
}

impl Magnitude for BigRational {
    const EXACT: bool = true;
    fn mag(&self) -> f64 {
        self.to_f64().unwrap_or(f64::MAX)
    }
}

/// Dense univariate polynomial, ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Ring> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero_poly() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: T, deg: usize) -> Self {
        let mut v = vec![T::zero(); deg + 1];
        v[deg] = c;
        Poly::new(v)
    }

    pub fn identity() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    pub fn is_zero_poly(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero_poly();
        }
        let mut v = Vec::with_capacity(self.coeffs.len() - 1);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let mut m = T::zero();
            for _ in 0..k {
                m = m + T::one();
            }
            v.push(m * c.clone());
        }
        Poly::new(v)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(self.coeff(k) + other.coeff(k));
        }
        Poly::new(v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(self.coeff(k) - other.coeff(k));
        }
        Poly::new(v)
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero_poly() || other.is_zero_poly() {
            return Poly::zero_poly();
        }
        let mut v = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(v)
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Poly::constant(T::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Product of linear factors (x - r) over the given roots.
    pub fn from_roots(roots: &[T]) -> Self {
        let mut acc = Poly::constant(T::one());
        for r in roots {
            acc = acc.mul(&Poly::new(vec![-r.clone(), T::one()]));
        }
        acc
    }

    /// Coefficients of p(x + a) via repeated synthetic (Horner) shifts.
    pub fn taylor_shift(&self, a: &T) -> Self {
        if self.is_zero_poly() {
            return Poly::zero_poly();
        }
        let n = self.coeffs.len();
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            // divide work by (x - a): remainder is the next shifted coefficient
            let mut rem = T::zero();
            for c in work.iter_mut().rev() {
                let t = c.clone() + rem.clone() * a.clone();
                rem = t.clone();
                *c = t;
            }
            // after the loop, work[0] holds p(a); pop it off
            let r = work.remove(0);
            out.push(r);
            if work.is_empty() {
                break;
            }
        }
        Poly::new(out)
    }
}

impl Poly<Complex64> {
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop leading coefficients below `rel_eps * max |c_k|`.
    pub fn trim_leading_small(&self, rel_eps: f64) -> Self {
        let scale = self.max_coeff_norm();
        if scale == 0.0 {
            return Poly::zero_poly();
        }
        let mut v = self.coeffs.clone();
        while v.len() > 1 && v.last().unwrap().norm() < rel_eps * scale {
            v.pop();
        }
        Poly::new(v)
    }

    /// Synthetic division by (x - root); the remainder is discarded and
    /// returned for inspection.
    pub fn deflate(&self, root: Complex64) -> (Self, Complex64) {
        if self.coeffs.len() <= 1 {
            return (Poly::zero_poly(), self.coeff(0));
        }
        let n = self.coeffs.len();
        let mut q = vec![Complex64::new(0.0, 0.0); n - 1];
        let mut acc = self.coeffs[n - 1];
        for k in (0..n - 1).rev() {
            q[k] = acc;
            acc = self.coeffs[k] + acc * root;
        }
        (Poly::new(q), acc)
    }

    /// All roots by the Aberth-Ehrlich simultaneous iteration, with a final
    /// Newton polish per root. Deterministic; no random restarts. Roots of
    /// high-multiplicity clusters come back as slowly-converged cluster
    /// approximations; callers are expected to verify what they use.
    pub fn roots(&self, tol: f64, max_iter: usize) -> Result<Vec<Complex64>> {
        let p = self.trim_leading_small(1e-14);
        let n = match p.degree() {
            None | Some(0) => return Ok(Vec::new()),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(vec![-p.coeff(0) / p.coeff(1)]);
        }
        let lead = p.coeff(n);
        // Fujiwara bound; the plain Cauchy bound is hopeless for bulged
        // coefficient profiles and overflows the iteration
        let mut bound = 0.0f64;
        for k in 1..=n {
            let a = (p.coeff(n - k) / lead).norm();
            if a > 0.0 {
                bound = bound.max(a.powf(1.0 / k as f64));
            }
        }
        let bound = (2.0 * bound).max(1e-3);
        let dp = p.derivative();

        // staggered ring of initial guesses
        let reset = |k: usize| -> Complex64 {
            let r = bound * (0.35 + 0.6 * (k as f64 + 1.0) / n as f64);
            let th =
                2.0 * std::f64::consts::PI * (k as f64) * 0.618_033_988_75 + 0.5 / n as f64;
            Complex64::from_polar(r, th)
        };
        let mut z: Vec<Complex64> = (0..n).map(reset).collect();

        for it in 0..max_iter {
            let mut worst: f64 = 0.0;
            for i in 0..n {
                if !z[i].is_finite() {
                    z[i] = reset(i + it);
                }
                let pv = p.eval(&z[i]);
                let dv = dp.eval(&z[i]);
                if !pv.is_finite() || !dv.is_finite() {
                    z[i] = reset(i + it + 1);
                    worst = f64::INFINITY;
                    continue;
                }
                if pv.norm() == 0.0 {
                    continue;
                }
                let newton = if dv.norm() > 0.0 {
                    pv / dv
                } else {
                    Complex64::new(tol, tol)
                };
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    if j != i {
                        let d = z[i] - z[j];
                        if d.norm() > 1e-300 {
                            s += Complex64::new(1.0, 0.0) / d;
                        }
                    }
                }
                let denom = Complex64::new(1.0, 0.0) - newton * s;
                let w = if denom.norm() > 1e-300 {
                    newton / denom
                } else {
                    newton
                };
                z[i] -= w;
                worst = worst.max(w.norm() / (1.0 + z[i].norm()));
            }
            if worst < tol {
                break;
            }
        }
        // Newton polish
        for r in z.iter_mut() {
            for _ in 0..3 {
                if !r.is_finite() {
                    break;
                }
                let pv = p.eval(r);
                let dv = dp.eval(r);
                if pv.is_finite() && dv.is_finite() && dv.norm() > 0.0 {
                    *r -= pv / dv;
                }
            }
        }
        let finite: Vec<Complex64> = z.into_iter().filter(|r| r.is_finite()).collect();
        if finite.is_empty() {
            return Err(Error::NonConvergence(format!(
                "no finite root approximations for degree {n}"
            )));
        }
        Ok(finite)
    }
}

impl Poly<BigRational> {
    /// Exact Euclidean division; panics if `div` is zero.
    pub fn divrem(&self, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero_poly(), "division by the zero polynomial");
        let dd = div.degree().unwrap();
        let lead = div.coeff(dd);
        let mut rem = self.coeffs.clone();
        let mut quo = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let q = rem[k].clone() / lead.clone();
            if !q.is_zero() {
                quo[k - dd] = q.clone();
                for j in 0..=dd {
                    let t = rem[k - dd + j].clone() - q.clone() * div.coeff(j);
                    rem[k - dd + j] = t;
                }
            }
            rem.pop();
        }
        (Poly::new(quo), Poly::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.degree() {
            None => Poly::zero_poly(),
            Some(d) => {
                let lead = self.coeff(d);
                Poly::new(
                    self.coeffs
                        .iter()
                        .map(|c| c.clone() / lead.clone())
                        .collect(),
                )
            }
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero_poly() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// p / gcd(p, p'), the product of distinct irreducible factors.
    pub fn squarefree_part(&self) -> Self {
        if self.is_zero_poly() {
            return Poly::zero_poly();
        }
        let g = self.gcd(&self.derivative());
        let (q, r) = self.divrem(&g);
        debug_assert!(r.is_zero_poly());
        q.monic()
    }
}

/// Bivariate polynomial stored as ascending powers of y with univariate
/// x-polynomials for coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly<T> {
    ycoeffs: Vec<Poly<T>>,
}

impl<T: Ring> BiPoly<T> {
    pub fn new(mut ycoeffs: Vec<Poly<T>>) -> Self {
        while ycoeffs.last().map_or(false, |p| p.is_zero_poly()) {
            ycoeffs.pop();
        }
        BiPoly { ycoeffs }
    }

    pub fn zero_poly() -> Self {
        BiPoly { ycoeffs: Vec::new() }
    }

    /// Embed a univariate polynomial in x.
    pub fn from_x(p: Poly<T>) -> Self {
        BiPoly::new(vec![p])
    }

    pub fn deg_y(&self) -> Option<usize> {
        self.ycoeffs.len().checked_sub(1)
    }

    pub fn deg_x(&self) -> Option<usize> {
        self.ycoeffs.iter().filter_map(|p| p.degree()).max()
    }

    pub fn ycoeff(&self, k: usize) -> Poly<T> {
        self.ycoeffs.get(k).cloned().unwrap_or_else(Poly::zero_poly)
    }

    pub fn ycoeffs(&self) -> &[Poly<T>] {
        &self.ycoeffs
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        let mut acc = T::zero();
        for p in self.ycoeffs.iter().rev() {
            acc = acc * y.clone() + p.eval(x);
        }
        acc
    }

    /// The cubic-in-y (or lower) slice F(x0, y) as a univariate in y.
    pub fn at_x(&self, x0: &T) -> Poly<T> {
        Poly::new(self.ycoeffs.iter().map(|p| p.eval(x0)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.ycoeffs.len().max(other.ycoeffs.len());
        BiPoly::new((0..n).map(|k| self.ycoeff(k).add(&other.ycoeff(k))).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.ycoeffs.len().max(other.ycoeffs.len());
        BiPoly::new((0..n).map(|k| self.ycoeff(k).sub(&other.ycoeff(k))).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.ycoeffs.is_empty() || other.ycoeffs.is_empty() {
            return BiPoly::zero_poly();
        }
        let mut v = vec![Poly::zero_poly(); self.ycoeffs.len() + other.ycoeffs.len() - 1];
        for (i, a) in self.ycoeffs.iter().enumerate() {
            for (j, b) in other.ycoeffs.iter().enumerate() {
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        BiPoly::new(v)
    }

    /// Multiply every y-coefficient by a univariate in x.
    pub fn scale_x(&self, p: &Poly<T>) -> Self {
        BiPoly::new(self.ycoeffs.iter().map(|c| c.mul(p)).collect())
    }

    /// Swap the roles of x and y.
    pub fn swap_vars(&self) -> Self {
        let dx = match self.deg_x() {
            None => return BiPoly::zero_poly(),
            Some(d) => d,
        };
        let mut rows = vec![vec![T::zero(); self.ycoeffs.len()]; dx + 1];
        for (k, p) in self.ycoeffs.iter().enumerate() {
            for (i, c) in p.coeffs().iter().enumerate() {
                rows[i][k] = c.clone();
            }
        }
        BiPoly::new(rows.into_iter().map(Poly::new).collect())
    }

    /// Substitute y := x, producing a univariate polynomial.
    pub fn on_diagonal(&self) -> Poly<T> {
        let mut acc = Poly::zero_poly();
        let x = Poly::<T>::identity();
        for p in self.ycoeffs.iter().rev() {
            acc = acc.mul(&x).add(p);
        }
        acc
    }

    /// Coefficients of F(x + a, y + b), as a bivariate in the local offsets.
    pub fn taylor_shift2(&self, a: &T, b: &T) -> Self {
        // shift x in every coefficient, then expand the (y + b)^k binomials
        let shifted: Vec<Poly<T>> = self.ycoeffs.iter().map(|p| p.taylor_shift(a)).collect();
        let mut out = vec![Poly::zero_poly(); self.ycoeffs.len()];
        for (k, p) in shifted.iter().enumerate() {
            // (y + b)^k = sum_j C(k,j) b^(k-j) y^j
            let mut bpow = vec![T::one()];
            for _ in 0..k {
                bpow.push(bpow.last().unwrap().clone() * b.clone());
            }
            for j in 0..=k {
                let factor = binomial_ring::<T>(k, j) * bpow[k - j].clone();
                out[j] = out[j].add(&p.scale(&factor));
            }
        }
        BiPoly::new(out)
    }
}

/// Binomial coefficient lifted into an arbitrary ring by repeated addition.
fn binomial_ring<T: Ring>(n: usize, k: usize) -> T {
    let mut value: u128 = 1;
    for j in 0..k {
        value = value * (n - j) as u128 / (j + 1) as u128;
    }
    let mut acc = T::zero();
    for _ in 0..value {
        acc = acc + T::one();
    }
    acc
}

/// Determinant of a square complex matrix by LU with partial pivoting.
pub fn lu_det(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col][col].norm();
        for row in col + 1..n {
            let v = a[row][col].norm();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let t = a[col][k];
                a[row][k] -= f * t;
            }
        }
    }
    det
}

/// Sylvester resultant of two univariate complex polynomials with the given
/// formal degrees (leading zeros are allowed and kept).
pub fn sylvester_resultant(f: &[Complex64], m: usize, g: &[Complex64], n: usize) -> Complex64 {
    let size = m + n;
    let zero = Complex64::new(0.0, 0.0);
    let mut mat = vec![vec![zero; size]; size];
    let fc = |k: usize| f.get(k).copied().unwrap_or(zero);
    let gc = |k: usize| g.get(k).copied().unwrap_or(zero);
    for row in 0..n {
        for k in 0..=m {
            mat[row][row + m - k] = fc(k);
        }
    }
    for row in 0..m {
        for k in 0..=n {
            mat[n + row][row + n - k] = gc(k);
        }
    }
    lu_det(mat)
}

/// Recover ascending coefficients (in the scaled variable u = x / r) of a
/// polynomial of degree < N from its values on the N-th roots of unity.
pub fn interpolate_on_unit_circle(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut coeffs = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, v) in values.iter().enumerate() {
            let ang = -2.0 * std::f64::consts::PI * (s * k % n) as f64 / n as f64;
            acc += v * Complex64::from_polar(1.0, ang);
        }
        coeffs.push(acc / n as f64);
    }
    coeffs
}
