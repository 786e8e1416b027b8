//! R transforms of gaussian elliptic laws, the addition and scaling laws,
//! and scalar (hermitian) series machinery: moments and free cumulants,
//! Green's functions, S transforms and the hermitian multiplication law.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::C64;

/// Gaussian elliptic law with cumulants `K¹ = diag(x, x̄)` and
/// `K² = σ² [[μe^{2iφ}, 1], [1, μe^{−2iφ}]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticLaw {
    pub x: C64,
    pub sigma: f64,
    pub mu: f64,
    pub phi: f64,
}

/// Wraps an angle into `[−π, π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let t = (a + PI).rem_euclid(2.0 * PI) - PI;
    if t >= PI {
        -PI
    } else {
        t
    }
}

impl EllipticLaw {
    pub fn new(x: C64, sigma: f64, mu: f64, phi: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if !(mu.abs() <= 1.0) {
            return Err(Error::InvalidParameter(format!("mu must lie in [-1, 1], got {mu}")));
        }
        if !x.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter("non-finite law parameter".into()));
        }
        Ok(EllipticLaw { x, sigma, mu, phi: wrap_angle(phi) })
    }

    /// Standardized elliptic law `E(μ)` centred at the origin.
    pub fn standard(mu: f64) -> Result<Self> {
        Self::new(C64::new(0.0, 0.0), 1.0, mu, 0.0)
    }

    pub fn gue() -> Self {
        EllipticLaw { x: C64::new(0.0, 0.0), sigma: 1.0, mu: 1.0, phi: 0.0 }
    }

    pub fn ginibre() -> Self {
        EllipticLaw { x: C64::new(0.0, 0.0), sigma: 1.0, mu: 0.0, phi: 0.0 }
    }

    /// Deterministic `x𝟙`, the σ → 0 limit.
    pub fn point(x: C64) -> Self {
        EllipticLaw { x, sigma: 0.0, mu: 0.0, phi: 0.0 }
    }

    pub fn is_deterministic(&self) -> bool {
        self.sigma == 0.0
    }

    /// `σ₁² = σ²(1+μ)/2`.
    pub fn sigma1(&self) -> f64 {
        self.sigma * ((1.0 + self.mu) / 2.0).max(0.0).sqrt()
    }

    /// `σ₂² = σ²(1−μ)/2`.
    pub fn sigma2(&self) -> f64 {
        self.sigma * ((1.0 - self.mu) / 2.0).max(0.0).sqrt()
    }

    /// `μσ²e^{2iφ}`, the (1,1) entry of `K²`.
    pub fn k2_diagonal(&self) -> C64 {
        C64::from_polar(self.mu * self.sigma * self.sigma, 2.0 * self.phi)
    }

    pub fn k1_matrix(&self) -> [[C64; 2]; 2] {
        let zero = C64::new(0.0, 0.0);
        [[self.x, zero], [zero, self.x.conj()]]
    }

    pub fn k2_matrix(&self) -> [[C64; 2]; 2] {
        let s2 = C64::new(self.sigma * self.sigma, 0.0);
        let d = self.k2_diagonal();
        [[d, s2], [s2, d.conj()]]
    }

    /// Semi-axes of the support ellipse, `σ(1+|μ|)` and `σ(1−|μ|)`; the
    /// longer one points along angle `φ` (or `φ + π/2` for `μ < 0`).
    pub fn support_semi_axes(&self) -> (f64, f64) {
        (self.sigma * (1.0 + self.mu.abs()), self.sigma * (1.0 - self.mu.abs()))
    }

    pub fn r_transform(&self, q: Quaternion) -> Quaternion {
        elliptic_r_transform(self, q)
    }
}

/// `ℛ(z, w) = (x + μσ²e^{2iφ} z, σ² w)`.
pub fn elliptic_r_transform(law: &EllipticLaw, q: Quaternion) -> Quaternion {
    let s2 = law.sigma * law.sigma;
    Quaternion::new(law.x + law.k2_diagonal() * q.first, q.second * s2)
}

/// Sum of free elliptic laws by adding first and second cumulants.
pub fn add_elliptic(a: &EllipticLaw, b: &EllipticLaw) -> EllipticLaw {
    let x = a.x + b.x;
    let s2 = a.sigma * a.sigma + b.sigma * b.sigma;
    let d = a.k2_diagonal() + b.k2_diagonal();
    if s2 == 0.0 {
        return EllipticLaw::point(x);
    }
    let (mu, phi) = if d.norm() == 0.0 {
        (0.0, 0.0)
    } else {
        ((d.norm() / s2).min(1.0), wrap_angle(0.5 * d.arg()))
    };
    EllipticLaw { x, sigma: s2.sqrt(), mu, phi }
}

/// Law of `x₀ + αA`: `x → x₀ + αx`, `σ → |α|σ`, `φ → φ + Arg α`.
pub fn scale_shift_law(law: &EllipticLaw, alpha: C64, x0: C64) -> Result<EllipticLaw> {
    if alpha.norm() == 0.0 {
        return Err(Error::DegenerateScale);
    }
    Ok(EllipticLaw {
        x: x0 + alpha * law.x,
        sigma: alpha.norm() * law.sigma,
        mu: law.mu,
        phi: if law.is_deterministic() { 0.0 } else { wrap_angle(law.phi + alpha.arg()) },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    Moments,
    FreeCumulants,
}

/// Coefficients `c₁, …, c_{n_max}` of moments `m_n` or free cumulants `κ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSeries {
    coeffs: Vec<C64>,
    kind: SeriesKind,
}

pub const DEFAULT_SERIES_ORDER: usize = 16;

impl ScalarSeries {
    /// `coeffs[k]` is the coefficient of order `k + 1`.
    pub fn new(coeffs: Vec<C64>, kind: SeriesKind) -> Self {
        ScalarSeries { coeffs, kind }
    }

    pub fn from_real(coeffs: &[f64], kind: SeriesKind) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(), kind)
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn max_order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of order `n ≥ 1`; zero beyond the stored range.
    pub fn get(&self, n: usize) -> C64 {
        assert!(n >= 1, "series orders start at 1");
        self.coeffs.get(n - 1).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }
}

/// Truncated product of power series stored with the constant term first.
fn series_mul(a: &[C64], b: &[C64], order: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); order + 1];
    for (i, &x) in a.iter().enumerate().take(order + 1) {
        for (j, &y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficient of `zⁿ` in `Σ_{k<limit} κ_k z^k M(z)^k`, given `M` known up to
/// order `n − 1` (constant term first).
fn cumulant_sum_coeff(kappa: &[C64], m: &[C64], n: usize, limit: usize) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    let mut power = vec![C64::new(1.0, 0.0)];
    for k in 1..limit {
        power = series_mul(&power, m, n - k);
        total += kappa[k - 1] * power.get(n - k).copied().unwrap_or_default();
    }
    total
}

/// Free cumulants from moments by matching orders in `M(z) = 1 + Σ κ_n zⁿ M(z)ⁿ`.
pub fn cumulants_from_moments(m: &ScalarSeries) -> ScalarSeries {
    let nmax = m.max_order();
    let mut moments = vec![C64::new(1.0, 0.0)];
    moments.extend_from_slice(m.coeffs());
    let mut kappa = Vec::with_capacity(nmax);
    for n in 1..=nmax {
        let lower = cumulant_sum_coeff(&kappa, &moments[..n], n, n);
        kappa.push(moments[n] - lower);
    }
    ScalarSeries::new(kappa, SeriesKind::FreeCumulants)
}

/// Moments from free cumulants, the inverse of [`cumulants_from_moments`].
pub fn moments_from_cumulants(k: &ScalarSeries) -> ScalarSeries {
    let nmax = k.max_order();
    let kappa = k.coeffs();
    let mut moments = vec![C64::new(1.0, 0.0)];
    for n in 1..=nmax {
        let mn = cumulant_sum_coeff(kappa, &moments, n, n) + kappa[n - 1];
        moments.push(mn);
    }
    ScalarSeries::new(moments[1..].to_vec(), SeriesKind::Moments)
}

/// A holomorphic scalar transform (R or S) near the origin.
pub trait HermitianTransform: Sync {
    fn eval(&self, z: C64) -> C64;

    fn derivative(&self, z: C64) -> C64 {
        let h = 1e-6 * (1.0 + z.norm());
        let hr = C64::new(h, 0.0);
        (self.eval(z + hr) - self.eval(z - hr)) / (2.0 * h)
    }
}

/// `R(z) = Σ κ_n z^{n−1}` from a cumulant series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTransform {
    kappa: Vec<C64>,
}

impl SeriesTransform {
    pub fn new(kappa: Vec<C64>) -> Self {
        SeriesTransform { kappa }
    }

    pub fn from_real(kappa: &[f64]) -> Self {
        Self::new(kappa.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn from_series(s: &ScalarSeries) -> Result<Self> {
        match s.kind() {
            SeriesKind::FreeCumulants => Ok(Self::new(s.coeffs().to_vec())),
            SeriesKind::Moments => Err(Error::InvalidParameter(
                "R transform needs free cumulants, got moments".into(),
            )),
        }
    }
}

impl HermitianTransform for SeriesTransform {
    fn eval(&self, z: C64) -> C64 {
        self.kappa.iter().rev().fold(C64::new(0.0, 0.0), |acc, &k| acc * z + k)
    }

    fn derivative(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (p, &k) in self.kappa.iter().enumerate().skip(1).rev() {
            acc = acc * z + k * p as f64;
        }
        acc
    }
}

/// Closed-form transform given by a function.
pub struct FnTransform<F>(pub F);

impl<F: Fn(C64) -> C64 + Sync> HermitianTransform for FnTransform<F> {
    fn eval(&self, z: C64) -> C64 {
        (self.0)(z)
    }
}

const SCALAR_TOL: f64 = 1e-13;

/// Damped complex Newton on `f(x) = 0` with analytic derivative `df`.
fn scalar_newton(
    f: impl Fn(C64) -> C64,
    df: impl Fn(C64) -> C64,
    mut x: C64,
    tol: f64,
    max_iter: usize,
) -> (C64, f64, usize) {
    let mut fx = f(x);
    let mut it = 0;
    while fx.norm() > tol && it < max_iter {
        it += 1;
        let d = df(x);
        if d.norm() == 0.0 || !d.is_finite() {
            break;
        }
        let step = fx / d;
        let mut lambda = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let cand = x - step * lambda;
            let fc = f(cand);
            if fc.is_finite() && fc.norm() < fx.norm() {
                x = cand;
                fx = fc;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (x, fx.norm(), it)
}

/// Resolvent `G(z)` solving `G (z − R(G)) = 1`.
///
/// The solution is continued down the vertical line from `z + iD` (or
/// `z − iD` below the real axis) where `G ≈ 1/z`, which keeps it on the
/// Herglotz branch; real `z` inside the support yields the boundary value
/// from above.
pub fn hermitian_greens(r: &dyn HermitianTransform, z: C64) -> Result<C64> {
    let dir = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let height = 10.0 * (1.0 + z.norm());
    let steps = 60;
    let mut g = C64::new(1.0, 0.0) / (z + C64::new(0.0, dir * height));
    let mut total = 0;
    let mut last_res = 0.0;
    for k in 0..=steps {
        let t = 1.0 - k as f64 / steps as f64;
        let zk = z + C64::new(0.0, dir * height * t * t);
        let f = |g: C64| g * (zk - r.eval(g)) - 1.0;
        let df = |g: C64| zk - r.eval(g) - g * r.derivative(g);
        let (gn, res, it) = scalar_newton(f, df, g, SCALAR_TOL, 100);
        total += it;
        last_res = res;
        if !gn.is_finite() {
            break;
        }
        g = gn;
    }
    if last_res > 1e-11 || !g.is_finite() {
        return Err(Error::no_convergence("hermitian Green's function", last_res, total));
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SrDirection {
    RToS,
    SToR,
}

/// Converts between R and S transforms: `S(z) = 1/R(zS(z))` or
/// `R(z) = 1/S(zR(z))`. Both directions solve `y · t(zy) = 1`, continued
/// along `[0, z]` from `y(0) = 1/t(0)`.
pub fn s_r_convert(t: &dyn HermitianTransform, direction: SrDirection, z: C64) -> Result<C64> {
    let t0 = t.eval(C64::new(0.0, 0.0));
    if t0.norm() < 1e-14 {
        return match direction {
            SrDirection::RToS => Err(Error::UndefinedS),
            SrDirection::SToR => Err(Error::InvalidParameter("S transform vanishes at 0".into())),
        };
    }
    let mut y = 1.0 / t0;
    let steps = 20;
    let mut res = 0.0;
    let mut total = 0;
    for k in 1..=steps {
        let zk = z * (k as f64 / steps as f64);
        let f = |y: C64| y * t.eval(zk * y) - 1.0;
        let df = |y: C64| t.eval(zk * y) + y * zk * t.derivative(zk * y);
        let (yn, r, it) = scalar_newton(f, df, y, SCALAR_TOL, 100);
        y = yn;
        res = r;
        total += it;
    }
    if res > 1e-11 || !y.is_finite() {
        return Err(Error::no_convergence("S/R conversion", res, total));
    }
    Ok(y)
}

/// `R_AB(z)` for free hermitian factors from `R_AB(z) = R_A(w) R_B(v)`,
/// `v = z R_A(w)`, `w = z R_B(v)`, by Newton seeded at `v = w = 0`.
pub fn multiply_hermitian(ra: &dyn HermitianTransform, rb: &dyn HermitianTransform, z: C64) -> Result<C64> {
    const TOL: f64 = 1e-12;
    const MAX_ITER: usize = 200;
    let resid = |v: C64, w: C64| (v - z * ra.eval(w), w - z * rb.eval(v));
    let norm = |r: (C64, C64)| r.0.norm().max(r.1.norm());
    let (mut v, mut w) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let mut r = resid(v, w);
    let mut it = 0;
    while norm(r) > TOL && it < MAX_ITER {
        it += 1;
        // [[1, −z R_A'(w)], [−z R_B'(v), 1]] (δv, δw) = −r
        let a12 = -z * ra.derivative(w);
        let a21 = -z * rb.derivative(v);
        let det = 1.0 - a12 * a21;
        if det.norm() < 1e-300 {
            break;
        }
        let dv = (-r.0 + a12 * r.1) / det;
        let dw = (-r.1 + a21 * r.0) / det;
        let mut lambda = 1.0;
        let mut rn = resid(v + dv, w + dw);
        while norm(rn) > norm(r) && lambda > 1e-6 {
            lambda *= 0.5;
            rn = resid(v + dv * lambda, w + dw * lambda);
        }
        v += dv * lambda;
        w += dw * lambda;
        r = rn;
    }
    if !(norm(r) <= TOL) {
        return Err(Error::no_convergence("hermitian multiplication law", norm(r), it));
    }
    Ok(ra.eval(w) * rb.eval(v))
}

/// Independent route for [`multiply_hermitian`]: `S_AB = S_A S_B`, then
/// `R_AB(z) = 1/S_AB(z R_AB(z))`.
pub fn multiply_hermitian_via_s(
    ra: &dyn HermitianTransform,
    rb: &dyn HermitianTransform,
    z: C64,
) -> Result<C64> {
    let s_ab = |u: C64| -> C64 {
        let sa = s_r_convert(ra, SrDirection::RToS, u);
        let sb = s_r_convert(rb, SrDirection::RToS, u);
        match (sa, sb) {
            (Ok(a), Ok(b)) => a * b,
            _ => C64::new(f64::NAN, f64::NAN),
        }
    };
    for t in [ra, rb] {
        if t.eval(C64::new(0.0, 0.0)).norm() < 1e-14 {
            return Err(Error::UndefinedS);
        }
    }
    let s = FnTransform(s_ab);
    s_r_convert(&s, SrDirection::SToR, z)
}
