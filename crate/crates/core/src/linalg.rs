//! Fixed-size complex kernels: 4×4 matrices, column spinors and row co-spinors.
//!
//! Everything here is `Copy` and allocation-free so that the stencil loops can
//! call it per grid point.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 4×4 complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl Mat4 {
    pub const fn zero() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::diag([ONE; 4])
    }

    pub fn diag(d: [Complex64; 4]) -> Self {
        let mut m = Self::zero();
        for (i, &v) in d.iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    /// Assembles a matrix from four 2×2 blocks `[[a, b], [c, d]]`.
    pub fn from_blocks(
        a: [[Complex64; 2]; 2],
        b: [[Complex64; 2]; 2],
        c: [[Complex64; 2]; 2],
        d: [[Complex64; 2]; 2],
    ) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a[i][j];
                m.0[i][j + 2] = b[i][j];
                m.0[i + 2][j] = c[i][j];
                m.0[i + 2][j + 2] = d[i][j];
            }
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z = f(*z));
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Mat4) -> Self {
        *self * *other - *other * *self
    }

    /// `{self, other} = self·other + other·self`.
    pub fn anticommutator(&self, other: &Mat4) -> Self {
        *self * *other + *other * *self
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..4)
            .map(|j| (0..4).map(|i| self.0[i][j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    pub fn column(&self, j: usize) -> Spinor {
        Spinor([self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]])
    }

    pub fn row(&self, i: usize) -> CoSpinor {
        CoSpinor(self.0[i])
    }

    pub fn from_columns(cols: [Spinor; 4]) -> Self {
        let mut m = Self::zero();
        for (j, c) in cols.iter().enumerate() {
            for i in 0..4 {
                m.0[i][j] = c.0[i];
            }
        }
        m
    }

    /// LU factorization with partial pivoting; `None` when a pivot vanishes.
    pub fn lu(&self) -> Option<Lu4> {
        Lu4::new(self)
    }

    pub fn inverse(&self) -> Option<Mat4> {
        self.lu().map(|lu| lu.inverse())
    }

    /// Matrix exponential by scaling and squaring around a truncated Taylor core.
    pub fn expm(&self) -> Mat4 {
        let norm = self.norm_1();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scaled = self.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));
        // ‖scaled‖₁ ≤ 0.5, so 20 terms leave a remainder below 0.5²¹/21!.
        let mut term = Mat4::identity();
        let mut sum = Mat4::identity();
        for k in 1..=20 {
            term = (term * scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum += term;
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }
}

impl Default for Mat4 {
    fn default() -> Self {
        Self::zero()
    }
}

impl Index<(usize, usize)> for Mat4 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(mut self, rhs: Mat4) -> Mat4 {
        self += rhs;
        self
    }
}

impl AddAssign for Mat4 {
    fn add_assign(&mut self, rhs: Mat4) {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(mut self, rhs: Mat4) -> Mat4 {
        self -= rhs;
        self
    }
}

impl SubAssign for Mat4 {
    fn sub_assign(&mut self, rhs: Mat4) {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
    }
}

impl Neg for Mat4 {
    type Output = Mat4;
    fn neg(self) -> Mat4 {
        self.map(|z| -z)
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut m = Mat4::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl Mul<Complex64> for Mat4 {
    type Output = Mat4;
    fn mul(self, s: Complex64) -> Mat4 {
        self.scale(s)
    }
}

impl Mul<f64> for Mat4 {
    type Output = Mat4;
    fn mul(self, s: f64) -> Mat4 {
        self.map(|z| z * s)
    }
}

impl Mul<Spinor> for Mat4 {
    type Output = Spinor;
    fn mul(self, v: Spinor) -> Spinor {
        &self * v
    }
}

impl Mul<Spinor> for &Mat4 {
    type Output = Spinor;
    #[inline]
    fn mul(self, v: Spinor) -> Spinor {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.0[i];
            *o = r[0] * v.0[0] + r[1] * v.0[1] + r[2] * v.0[2] + r[3] * v.0[3];
        }
        Spinor(out)
    }
}

// JSON layout: flat row-major list of 16 `[re, im]` pairs.
impl Serialize for Mat4 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let flat: Vec<[f64; 2]> = self.0.iter().flatten().map(|z| [z.re, z.im]).collect();
        flat.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat4 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let flat = Vec::<[f64; 2]>::deserialize(d)?;
        if flat.len() != 16 {
            return Err(serde::de::Error::invalid_length(
                flat.len(),
                &"16 row-major [re, im] pairs",
            ));
        }
        let mut m = Mat4::zero();
        for (k, [re, im]) in flat.into_iter().enumerate() {
            m.0[k / 4][k % 4] = Complex64::new(re, im);
        }
        Ok(m)
    }
}

/// Partial-pivoting LU of a [`Mat4`].
#[derive(Clone, Copy, Debug)]
pub struct Lu4 {
    lu: [[Complex64; 4]; 4],
    perm: [usize; 4],
}

impl Lu4 {
    pub fn new(m: &Mat4) -> Option<Self> {
        let mut lu = m.0;
        let mut perm = [0, 1, 2, 3];
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..4 {
            let p = (k..4)
                .max_by(|&a, &b| lu[a][k].norm().total_cmp(&lu[b][k].norm()))
                .unwrap();
            if lu[p][k].norm() <= 1e-14 * scale {
                return None;
            }
            lu.swap(k, p);
            perm.swap(k, p);
            let inv = lu[k][k].inv();
            for i in (k + 1)..4 {
                let f = lu[i][k] * inv;
                lu[i][k] = f;
                for j in (k + 1)..4 {
                    let t = lu[k][j];
                    lu[i][j] -= f * t;
                }
            }
        }
        Some(Lu4 { lu, perm })
    }

    pub fn solve(&self, b: Spinor) -> Spinor {
        let mut y = [ZERO; 4];
        for i in 0..4 {
            let mut s = b.0[self.perm[i]];
            for j in 0..i {
                s -= self.lu[i][j] * y[j];
            }
            y[i] = s;
        }
        for i in (0..4).rev() {
            let mut s = y[i];
            for j in (i + 1)..4 {
                s -= self.lu[i][j] * y[j];
            }
            y[i] = s / self.lu[i][i];
        }
        Spinor(y)
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &Mat4) -> Mat4 {
        Mat4::from_columns([
            self.solve(b.column(0)),
            self.solve(b.column(1)),
            self.solve(b.column(2)),
            self.solve(b.column(3)),
        ])
    }

    pub fn inverse(&self) -> Mat4 {
        self.solve_mat(&Mat4::identity())
    }
}

/// A four-component column spinor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Spinor(pub [Complex64; 4]);

impl Spinor {
    pub const fn zero() -> Self {
        Spinor([ZERO; 4])
    }

    pub fn new(c: [Complex64; 4]) -> Self {
        Spinor(c)
    }

    pub fn from_real(c: [f64; 4]) -> Self {
        Spinor(c.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn basis(i: usize) -> Self {
        let mut s = Self::zero();
        s.0[i] = ONE;
        s
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Hermitian inner product `self† · other`.
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        (0..4).map(|i| self.0[i].conj() * other.0[i]).sum()
    }

    pub fn conj(&self) -> Spinor {
        Spinor(self.0.map(|z| z.conj()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    /// Reinterprets the column as a row without conjugation (plain transpose).
    pub fn transpose(&self) -> CoSpinor {
        CoSpinor(self.0)
    }
}

impl Index<usize> for Spinor {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Spinor {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl Add for Spinor {
    type Output = Spinor;
    #[inline]
    fn add(self, o: Spinor) -> Spinor {
        Spinor([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }
}

impl AddAssign for Spinor {
    #[inline]
    fn add_assign(&mut self, o: Spinor) {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    #[inline]
    fn sub(self, o: Spinor) -> Spinor {
        Spinor([
            self.0[0] - o.0[0],
            self.0[1] - o.0[1],
            self.0[2] - o.0[2],
            self.0[3] - o.0[3],
        ])
    }
}

impl SubAssign for Spinor {
    #[inline]
    fn sub_assign(&mut self, o: Spinor) {
        for i in 0..4 {
            self.0[i] -= o.0[i];
        }
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor(self.0.map(|z| -z))
    }
}

impl Mul<Complex64> for Spinor {
    type Output = Spinor;
    #[inline]
    fn mul(self, s: Complex64) -> Spinor {
        Spinor(self.0.map(|z| z * s))
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    #[inline]
    fn mul(self, s: f64) -> Spinor {
        Spinor(self.0.map(|z| z * s))
    }
}

/// A four-component row spinor, e.g. a Dirac adjoint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoSpinor(pub [Complex64; 4]);

impl CoSpinor {
    pub const fn zero() -> Self {
        CoSpinor([ZERO; 4])
    }

    /// Row–column contraction `self · v`.
    #[inline]
    pub fn apply(&self, v: &Spinor) -> Complex64 {
        self.0[0] * v.0[0] + self.0[1] * v.0[1] + self.0[2] * v.0[2] + self.0[3] * v.0[3]
    }

    /// Row times matrix.
    pub fn mul_mat(&self, m: &Mat4) -> CoSpinor {
        let mut out = [ZERO; 4];
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|i| self.0[i] * m.0[i][j]).sum();
        }
        CoSpinor(out)
    }

    /// Plain transpose into a column.
    pub fn transpose(&self) -> Spinor {
        Spinor(self.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }
}

impl Sub for CoSpinor {
    type Output = CoSpinor;
    fn sub(self, o: CoSpinor) -> CoSpinor {
        CoSpinor([
            self.0[0] - o.0[0],
            self.0[1] - o.0[1],
            self.0[2] - o.0[2],
            self.0[3] - o.0[3],
        ])
    }
}

impl Mul<Complex64> for CoSpinor {
    type Output = CoSpinor;
    fn mul(self, s: Complex64) -> CoSpinor {
        CoSpinor(self.0.map(|z| z * s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Mat4 {
        let mut m = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] =
                    Complex64::new((i * 4 + j) as f64 * 0.1 - 0.7, (i as f64 - j as f64) * 0.3);
            }
            m.0[i][i] += Complex64::new(2.0, 0.0);
        }
        m
    }

    #[test]
    fn lu_inverse_roundtrip() {
        let m = sample();
        let inv = m.inverse().unwrap();
        assert!((m * inv).max_abs_diff(&Mat4::identity()) < 1e-13);
    }

    #[test]
    fn singular_matrix_has_no_lu() {
        let mut m = sample();
        m.0[3] = m.0[2];
        assert!(m.lu().is_none());
    }

    #[test]
    fn expm_of_diagonal() {
        let d = Mat4::diag([
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-3.0, 0.5),
            ZERO,
        ]);
        let e = d.expm();
        for i in 0..4 {
            assert!((e.0[i][i] - d.0[i][i].exp()).norm() < 1e-12 * d.0[i][i].exp().norm().max(1.0));
        }
    }

    #[test]
    fn expm_inverse_is_expm_of_negation() {
        let m = sample();
        let prod = m.expm() * (-m).expm();
        assert!(prod.max_abs_diff(&Mat4::identity()) < 1e-10);
    }

    #[test]
    fn json_layout_is_flat_row_major() {
        let mut m = Mat4::zero();
        m.0[0][1] = Complex64::new(2.0, -1.0);
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with("[[0.0,0.0],[2.0,-1.0],"));
        let back: Mat4 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Mat4>("[[1.0,0.0]]").is_err());
    }
}
