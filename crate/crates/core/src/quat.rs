//! Quaternions as Cayley-Dickson pairs of complex numbers.
//!
//! A quaternion `q = a + bi + cj + dk` is stored as the pair `(z, w)` with
//! `z = a + bi` and `w = c + di`, so that `q = z + w j`. The 2×2 complex
//! representation is
//!
//! ```text
//!   [  z   w ]
//!   [ -w̄   z̄ ]
//! ```
//!
//! whose first row is the pair itself. Products follow
//! `(z, w)(v, y) = (zv − wȳ, zy + wv̄)`, which agrees with matrix
//! multiplication of the representations.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::C64;

/// Squared norms below this are treated as the zero quaternion.
pub const ZERO_NORM_SQR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    /// First Cayley-Dickson part `F(q) = z`.
    pub first: C64,
    /// Second Cayley-Dickson part `S(q) = w`.
    pub second: C64,
}

/// Which side a rotated copy is taken on: `[q]^L = U q U†`, `[q]^R = U† q U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    pub const ONE: Quaternion = Quaternion::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    pub const I: Quaternion = Quaternion::new(C64::new(0.0, 1.0), C64::new(0.0, 0.0));
    pub const J: Quaternion = Quaternion::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    pub const K: Quaternion = Quaternion::new(C64::new(0.0, 0.0), C64::new(0.0, 1.0));

    pub const fn new(first: C64, second: C64) -> Self {
        Quaternion { first, second }
    }

    /// Embeds a complex number as `(z, 0)`.
    pub const fn from_complex(z: C64) -> Self {
        Quaternion::new(z, C64::new(0.0, 0.0))
    }

    /// Builds `a + bi + cj + dk`.
    pub fn from_real_parts(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion::new(C64::new(a, b), C64::new(c, d))
    }

    pub fn is_finite(&self) -> bool {
        self.first.is_finite() && self.second.is_finite()
    }

    /// `q* = (z̄, −w)`, the hermitian conjugate of the matrix form.
    pub fn conj(&self) -> Self {
        Quaternion::new(self.first.conj(), -self.second)
    }

    /// `‖q‖² = |z|² + |w|² = det q`.
    pub fn norm_sqr(&self) -> f64 {
        self.first.norm_sqr() + self.second.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: f64) -> Self {
        Quaternion::new(self.first * k, self.second * k)
    }

    /// `q⁻¹ = q* / ‖q‖²`.
    pub fn inv(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 >= ZERO_NORM_SQR) {
            return Err(Error::SingularInput("quaternion inverse of zero"));
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// Rotated copy used by the multiplication law. With
    /// `U = diag(e^{iφ/4}, e^{−iφ/4})` the left copy multiplies the second
    /// part by `e^{iφ/2}` and the right copy by `e^{−iφ/2}`.
    pub fn rotate(&self, phi: f64, side: Side) -> Self {
        let angle = match side {
            Side::Left => 0.5 * phi,
            Side::Right => -0.5 * phi,
        };
        Quaternion::new(self.first, self.second * C64::from_polar(1.0, angle))
    }

    pub fn to_matrix(&self) -> [[C64; 2]; 2] {
        [
            [self.first, self.second],
            [-self.second.conj(), self.first.conj()],
        ]
    }

    /// Reads the pair off the first row of a 2×2 representation.
    pub fn from_matrix(m: &[[C64; 2]; 2]) -> Self {
        Quaternion::new(m[0][0], m[0][1])
    }

    /// Largest componentwise modulus, used for residual reporting.
    pub fn max_abs(&self) -> f64 {
        self.first.norm().max(self.second.norm())
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(self.first + rhs.first, self.second + rhs.second)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Quaternion) {
        *self = *self + rhs;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(self.first - rhs.first, self.second - rhs.second)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, rhs: Quaternion) {
        *self = *self - rhs;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.first, -self.second)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        let (z, w) = (self.first, self.second);
        let (v, y) = (rhs.first, rhs.second);
        Quaternion::new(z * v - w * y.conj(), z * y + w * v.conj())
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: f64) -> Quaternion {
        self.scale(rhs)
    }
}

impl From<C64> for Quaternion {
    fn from(z: C64) -> Self {
        Quaternion::from_complex(z)
    }
}

/// Quaternionic `N×N` matrix `𝒬 = (X, Y)` with dense form `[[X, Y], [−Y†, X†]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockQuaternionMatrix {
    x_block: CMatrix,
    y_block: CMatrix,
}

impl BlockQuaternionMatrix {
    pub fn new(x_block: CMatrix, y_block: CMatrix) -> Result<Self> {
        let n = x_block.nrows();
        for m in [&x_block, &y_block] {
            if m.nrows() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
            }
            if m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
            }
        }
        if n == 0 {
            return Err(Error::InvalidParameter("block dimension must be positive".into()));
        }
        Ok(BlockQuaternionMatrix { x_block, y_block })
    }

    /// `q ⊗ 1_N`.
    pub fn scalar(q: Quaternion, n: usize) -> Result<Self> {
        let eye = CMatrix::identity(n, n);
        Self::new(&eye * q.first, &eye * q.second)
    }

    /// `𝒳 = (X, 0)`.
    pub fn from_matrix(x: CMatrix) -> Result<Self> {
        let n = x.nrows();
        Self::new(x, CMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.x_block.nrows()
    }

    pub fn x_block(&self) -> &CMatrix {
        &self.x_block
    }

    pub fn y_block(&self) -> &CMatrix {
        &self.y_block
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, 0), (n, n)).copy_from(&self.x_block);
        out.view_mut((0, n), (n, n)).copy_from(&self.y_block);
        out.view_mut((n, 0), (n, n)).copy_from(&(-self.y_block.adjoint()));
        out.view_mut((n, n), (n, n)).copy_from(&self.x_block.adjoint());
        out
    }

    /// `Tr_b 𝒬 = (Tr X, Tr Y)`.
    pub fn block_trace(&self) -> Quaternion {
        Quaternion::new(self.x_block.trace(), self.y_block.trace())
    }
}

/// Normalized block trace of `(q ⊗ 1 − 𝒳)⁻¹` for a single matrix `X`.
///
/// Uses the closed-form inverse
///
/// ```text
///   [ zI−X   wI    ]⁻¹   [ (z̄I−X†) H_L⁻¹   −w H_R⁻¹     ]
///   [ −w̄I   z̄I−X† ]   = [  w̄ H_L⁻¹      (zI−X) H_R⁻¹ ]
/// ```
///
/// with `H_L = (zI−X)(z̄I−X†) + |w|²` and `H_R = (z̄I−X†)(zI−X) + |w|²`,
/// both hermitian positive definite for `w ≠ 0`.
pub fn block_resolvent(x: &CMatrix, q: Quaternion) -> Result<Quaternion> {
    let n = x.nrows();
    if x.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.ncols() });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let (z, w) = (q.first, q.second);
    let w2 = w.norm_sqr();
    let mut a = -x.clone();
    for i in 0..n {
        a[(i, i)] += z;
    }
    let a_adj = a.adjoint();

    let mut h_l = &a * &a_adj;
    for i in 0..n {
        h_l[(i, i)] += C64::new(w2, 0.0);
    }
    let chol_l = h_l
        .cholesky()
        .ok_or_else(|| Error::Singular(format!("H_L not positive definite at q = {q}")))?;
    // Tr[(z̄ − X†) H_L⁻¹] = Tr[H_L⁻¹ (z̄ − X†)]
    let first = chol_l.solve(&a_adj).trace() / n as f64;

    let second = if w2 == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        let mut h_r = &a_adj * &a;
        for i in 0..n {
            h_r[(i, i)] += C64::new(w2, 0.0);
        }
        let chol_r = h_r
            .cholesky()
            .ok_or_else(|| Error::Singular(format!("H_R not positive definite at q = {q}")))?;
        // Tr H⁻¹ = ‖L⁻¹‖_F²
        let l_inv = chol_r
            .l()
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .ok_or_else(|| Error::Singular("triangular solve".into()))?;
        let tr_inv = l_inv.iter().map(|c| c.norm_sqr()).sum::<f64>();
        -w * (tr_inv / n as f64)
    };
    Ok(Quaternion::new(first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_quat(rng: &mut ChaCha8Rng) -> Quaternion {
        Quaternion::from_real_parts(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )
    }

    fn mat_mul(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    #[test]
    fn addition_conjugate_norm() {
        let sum = Quaternion::new(c(1.0, 0.0), c(0.0, 0.0)) + Quaternion::new(c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(sum, Quaternion::new(c(1.0, 0.0), c(1.0, 0.0)));
        assert_eq!(Quaternion::I.conj(), Quaternion::new(c(0.0, -1.0), c(0.0, 0.0)));
        assert_eq!(Quaternion::from_complex(c(3.0, 4.0)).norm_sqr(), 25.0);
    }

    #[test]
    fn hamilton_relations() {
        let minus_one = -Quaternion::ONE;
        assert_eq!(Quaternion::I * Quaternion::I, minus_one);
        assert_eq!(Quaternion::J * Quaternion::J, minus_one);
        assert_eq!(Quaternion::K * Quaternion::K, minus_one);
        assert_eq!(Quaternion::I * Quaternion::J * Quaternion::K, minus_one);
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
    }

    #[test]
    fn ginibre_reconstruction_from_two_hermitian_parts() {
        let q = Quaternion::new(c(0.3, -1.1), c(0.7, 0.2));
        let sandwich = Quaternion::I * q * Quaternion::I;
        assert_eq!(sandwich, Quaternion::new(-q.first, q.second));
        let r = q.scale(0.5) + sandwich.scale(0.5);
        assert!(r.first.norm() < 1e-16);
        assert_eq!(r.second, q.second);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Quaternion::J.inv().unwrap(), -Quaternion::J);
        let q = Quaternion::new(c(1.0, 0.0), c(1.0, 0.0));
        let inv = q.inv().unwrap();
        assert_eq!(inv, Quaternion::new(c(0.5, 0.0), c(-0.5, 0.0)));
        assert_eq!(q * inv, Quaternion::ONE);
        let z = c(0.3, -2.0);
        let inv = Quaternion::from_complex(z).inv().unwrap();
        assert!((inv.first - 1.0 / z).norm() < 1e-16);
        assert_eq!(inv.second, c(0.0, 0.0));
        assert!(matches!(Quaternion::ZERO.inv(), Err(Error::SingularInput(_))));
    }

    #[test]
    fn matrix_round_trip_and_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = random_quat(&mut rng);
            let b = random_quat(&mut rng);
            assert_eq!(Quaternion::from_matrix(&a.to_matrix()), a);
            let m = mat_mul(&a.to_matrix(), &b.to_matrix());
            let p = (a * b).to_matrix();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((m[i][j] - p[i][j]).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = random_quat(&mut rng);
        assert_eq!(q.rotate(0.0, Side::Left), q);
        assert_eq!(q.rotate(0.0, Side::Right), q);
        let phi = 0.9;
        let w = c(0.4, -0.3);
        let left = Quaternion::new(c(0.0, 0.0), w).rotate(phi, Side::Left);
        assert!((left.second - w * C64::from_polar(1.0, phi / 2.0)).norm() < 1e-15);
        // explicit U q U† in the matrix form
        let u = [
            [C64::from_polar(1.0, phi / 4.0), c(0.0, 0.0)],
            [c(0.0, 0.0), C64::from_polar(1.0, -phi / 4.0)],
        ];
        let u_adj = [[u[0][0].conj(), c(0.0, 0.0)], [c(0.0, 0.0), u[1][1].conj()]];
        for _ in 0..20 {
            let q = random_quat(&mut rng);
            let phi = rng.random_range(-3.0..3.0);
            let u = [
                [C64::from_polar(1.0, phi / 4.0), c(0.0, 0.0)],
                [c(0.0, 0.0), C64::from_polar(1.0, -phi / 4.0)],
            ];
            let u_adj = [[u[0][0].conj(), c(0.0, 0.0)], [c(0.0, 0.0), u[1][1].conj()]];
            let l = mat_mul(&mat_mul(&u, &q.to_matrix()), &u_adj);
            let r = mat_mul(&mat_mul(&u_adj, &q.to_matrix()), &u);
            let ql = q.rotate(phi, Side::Left);
            let qr = q.rotate(phi, Side::Right);
            assert!((Quaternion::from_matrix(&l) - ql).max_abs() < 1e-14);
            assert!((Quaternion::from_matrix(&r) - qr).max_abs() < 1e-14);
            assert_eq!(ql.first, q.first);
        }
        let _ = (u, u_adj);
    }

    #[test]
    fn block_trace_examples() {
        let eye = CMatrix::identity(2, 2);
        let m = BlockQuaternionMatrix::new(eye.clone(), eye).unwrap();
        assert_eq!(m.block_trace(), Quaternion::new(c(2.0, 0.0), c(2.0, 0.0)));

        let mut x = CMatrix::zeros(2, 2);
        x[(0, 0)] = c(1.0, 0.0);
        x[(1, 1)] = c(2.0, 0.0);
        let m = BlockQuaternionMatrix::from_matrix(x).unwrap();
        assert_eq!(m.block_trace(), Quaternion::new(c(3.0, 0.0), c(0.0, 0.0)));

        let q = Quaternion::new(c(0.5, -1.0), c(2.0, 0.25));
        let m = BlockQuaternionMatrix::scalar(q, 5).unwrap();
        assert_eq!(m.block_trace(), q.scale(5.0));

        let bad = BlockQuaternionMatrix::new(CMatrix::zeros(2, 2), CMatrix::zeros(3, 3));
        assert!(matches!(bad, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dense_form_matches_pauli_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 3;
        let x = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let y = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let m = BlockQuaternionMatrix::new(x.clone(), y.clone()).unwrap();
        let d = m.to_dense();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(d[(i, j)], x[(i, j)]);
                assert_eq!(d[(i, n + j)], y[(i, j)]);
                assert_eq!(d[(n + i, j)], -y[(j, i)].conj());
                assert_eq!(d[(n + i, n + j)], x[(j, i)].conj());
            }
        }
    }

    #[test]
    fn resolvent_of_zero_matrix_is_inverse() {
        let q = Quaternion::new(c(0.7, -0.2), c(0.3, 0.4));
        let g = block_resolvent(&CMatrix::zeros(4, 4), q).unwrap();
        assert!((g - q.inv().unwrap()).max_abs() < 1e-14);
    }

    #[test]
    fn resolvent_of_diagonal_matrix() {
        let lambdas = [c(0.5, 0.1), c(-1.0, 0.3), c(0.2, -0.7)];
        let x = CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&lambdas));
        let q = Quaternion::new(c(0.1, 0.2), c(0.05, -0.02));
        let g = block_resolvent(&x, q).unwrap();
        let w2 = q.second.norm_sqr();
        let expected: C64 = lambdas
            .iter()
            .map(|&l| (q.first - l).conj() / ((q.first - l).norm_sqr() + w2))
            .sum::<C64>()
            / 3.0;
        assert!((g.first - expected).norm() < 1e-13);
        let expected_second: C64 = lambdas
            .iter()
            .map(|&l| -q.second / ((q.first - l).norm_sqr() + w2))
            .sum::<C64>()
            / 3.0;
        assert!((g.second - expected_second).norm() < 1e-13);
    }

    #[test]
    fn resolvent_matches_dense_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 6;
        let x = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let q = Quaternion::new(c(0.3, 0.1), c(0.2, -0.4));
        let g = block_resolvent(&x, q).unwrap();
        let shifted = BlockQuaternionMatrix::new(
            &CMatrix::identity(n, n) * q.first - &x,
            &CMatrix::identity(n, n) * q.second,
        )
        .unwrap();
        let inv = shifted.to_dense().try_inverse().unwrap();
        let tr_x: C64 = (0..n).map(|i| inv[(i, i)]).sum::<C64>() / n as f64;
        let tr_y: C64 = (0..n).map(|i| inv[(i, n + i)]).sum::<C64>() / n as f64;
        assert!((g.first - tr_x).norm() < 1e-12);
        assert!((g.second - tr_y).norm() < 1e-12);
    }

    #[test]
    fn hermitian_resolvent_on_real_axis_is_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 8;
        let a = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let h = (&a + a.adjoint()) * c(0.5, 0.0);
        let g = block_resolvent(&h, Quaternion::new(c(0.37, 0.0), c(0.1, 0.0))).unwrap();
        assert!(g.first.im.abs() < 1e-12);
    }

    #[test]
    fn singular_resolvent_reports_error() {
        let x = CMatrix::identity(3, 3);
        let err = block_resolvent(&x, Quaternion::ONE).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn quat() -> impl Strategy<Value = Quaternion> {
            (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
                .prop_map(|(a, b, c, d)| Quaternion::from_real_parts(a, b, c, d))
        }

        fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
            (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
        }

        proptest! {
            #[test]
            fn associative(a in quat(), b in quat(), c in quat()) {
                prop_assert!(close((a * b) * c, a * (b * c), 1e-14));
            }

            #[test]
            fn distributive(a in quat(), b in quat(), c in quat()) {
                prop_assert!(close(a * (b + c), a * b + a * c, 1e-13));
                prop_assert!(close((b + c) * a, b * a + c * a, 1e-13));
            }

            #[test]
            fn inverse_involution(a in quat()) {
                prop_assume!(a.norm_sqr() > 1e-6);
                prop_assert!(close(a.inv().unwrap().inv().unwrap(), a, 1e-13));
                prop_assert!(close(a * a.inv().unwrap(), Quaternion::ONE, 1e-13));
            }

            #[test]
            fn norm_multiplicative(a in quat(), b in quat()) {
                let lhs = (a * b).norm_sqr();
                let rhs = a.norm_sqr() * b.norm_sqr();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
            }

            #[test]
            fn left_rotation_keeps_first_part(a in quat(), phi in -3.2..3.2f64) {
                prop_assert_eq!(a.rotate(phi, Side::Left).first, a.first);
                prop_assert!(close(a.rotate(phi, Side::Left).rotate(phi, Side::Right), a, 1e-15));
            }
        }
    }
}
