//! Free multiplication of two elliptic laws.
//!
//! The generic route solves the three coupled quaternionic equations at
//! `q̂ = (z, 0)` with `φ = Arg z`:
//!
//! ```text
//! P     = [ℛ_A(𝒢_B)]^L [ℛ_B(𝒢_A)]^R
//! 𝒢_AB  = (q̂ − P)⁻¹
//! [𝒢_A]^R = 𝒢_AB [ℛ_A(𝒢_B)]^L
//! [𝒢_B]^L = [ℛ_B(𝒢_A)]^R 𝒢_AB
//! ```
//!
//! with `𝒢_A = (w_A, v_A)`, `𝒢_B = (w_B, v_B)`. The second parts are gauge
//! fixed to real nonnegative numbers, leaving 6 real unknowns against 8
//! real equations. Three products have reduced real equations of their
//! own, used for contours and for fast density fields.

use std::f64::consts::PI;

use crate::contour::{trace_branches, ContourCurve, SupportRegion};
use crate::error::{Error, Result};
use crate::greens::{density_field_with, DensityGrid, GreensEvaluator, GridSpec, Regime, INTERIOR_GAMMA_MIN};
use crate::laws::EllipticLaw;
use crate::linalg::{poly_eval, poly_roots};
use crate::newton::{gauss_newton, NewtonOptions};
use crate::quat::{Quaternion, Side};
use crate::C64;

const NEWTON: NewtonOptions = NewtonOptions { tol: 1e-13, max_iter: 80, fd_step: 1e-7 };
/// Accepted residual for a solution of the multiplication law.
pub const PRODUCT_TOL: f64 = 1e-10;
const RAY_STEPS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductLaw {
    pub a: EllipticLaw,
    pub b: EllipticLaw,
}

/// Products with a dedicated reduced system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reduction {
    /// `u (s + X)(t + Y)` with Ginibre `X`, `Y` and `s·t > 0`.
    ShiftedGinibre { s: f64, t: f64, u: C64 },
    /// `(1 + E(μ))(1 + E(μ))` for two independent copies.
    SymmetricElliptic { mu: f64 },
    /// `(1 + H)(1 + X)` or its mirror, GUE `H` and Ginibre `X`.
    GueGinibre,
    Generic,
}

impl ProductLaw {
    pub fn new(a: EllipticLaw, b: EllipticLaw) -> Result<Self> {
        if a.is_deterministic() || b.is_deterministic() {
            return Err(Error::InvalidParameter(
                "deterministic factors are scalings; fold them into the other factor".into(),
            ));
        }
        Ok(ProductLaw { a, b })
    }

    pub fn swapped(&self) -> Self {
        ProductLaw { a: self.b, b: self.a }
    }

    /// `(s, t, u)` with `AB ≅ u (s + X)(t + Y)` when both factors are
    /// shifted Ginibre matrices.
    pub fn ginibre_parameters(&self) -> Option<(f64, f64, C64)> {
        let (a, b) = (&self.a, &self.b);
        (a.mu == 0.0 && b.mu == 0.0).then(|| {
            let u = C64::from_polar(a.sigma * b.sigma, a.x.arg() + b.x.arg());
            (a.x.norm() / a.sigma, b.x.norm() / b.sigma, u)
        })
    }

    pub fn reduction(&self) -> Reduction {
        let (a, b) = (&self.a, &self.b);
        if let Some((s, t, u)) = self.ginibre_parameters() {
            if s * t > 0.0 {
                return Reduction::ShiftedGinibre { s, t, u };
            }
        }
        let one = C64::new(1.0, 0.0);
        let unit_shift = |l: &EllipticLaw| l.x == one && l.sigma == 1.0 && l.phi == 0.0;
        if unit_shift(a) && unit_shift(b) {
            if a.mu == b.mu && a.mu.abs() < 1.0 {
                return Reduction::SymmetricElliptic { mu: a.mu };
            }
            if (a.mu == 1.0 && b.mu == 0.0) || (a.mu == 0.0 && b.mu == 1.0) {
                return Reduction::GueGinibre;
            }
        }
        Reduction::Generic
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductPointSolution {
    pub z: C64,
    pub w_a: C64,
    pub v_a: f64,
    pub w_b: C64,
    pub v_b: f64,
    /// `G_AB(z)`, the first part of `𝒢_AB`.
    pub g_ab: C64,
    /// Second part of `𝒢_AB`.
    pub gamma_ab: C64,
    pub regime: Regime,
    pub residual: f64,
}

/// The two quaternionic residuals and `𝒢_AB` at the given unknowns.
pub fn product_residual(
    p: &ProductLaw,
    z: C64,
    ga: Quaternion,
    gb: Quaternion,
) -> Option<([Quaternion; 2], Quaternion)> {
    let phi = z.arg();
    let ra = p.a.r_transform(gb).rotate(phi, Side::Left);
    let rb = p.b.r_transform(ga).rotate(phi, Side::Right);
    let g_ab = (Quaternion::from_complex(z) - ra * rb).inv().ok()?;
    let e_a = ga.rotate(phi, Side::Right) - g_ab * ra;
    let e_b = gb.rotate(phi, Side::Left) - rb * g_ab;
    (e_a.is_finite() && e_b.is_finite()).then_some(([e_a, e_b], g_ab))
}

fn flatten(e: &[Quaternion; 2]) -> Vec<f64> {
    let mut v = Vec::with_capacity(8);
    for q in e {
        v.extend_from_slice(&[q.first.re, q.first.im, q.second.re, q.second.im]);
    }
    v
}

fn interior_unknowns(x: &[f64]) -> (Quaternion, Quaternion) {
    (
        Quaternion::new(C64::new(x[0], x[1]), C64::new(x[2].abs(), 0.0)),
        Quaternion::new(C64::new(x[3], x[4]), C64::new(x[5].abs(), 0.0)),
    )
}

fn exterior_unknowns(x: &[f64]) -> (Quaternion, Quaternion) {
    (Quaternion::from_complex(C64::new(x[0], x[1])), Quaternion::from_complex(C64::new(x[2], x[3])))
}

fn finish(p: &ProductLaw, z: C64, ga: Quaternion, gb: Quaternion, regime: Regime, residual: f64) -> Option<ProductPointSolution> {
    let (_, g_ab) = product_residual(p, z, ga, gb)?;
    Some(ProductPointSolution {
        z,
        w_a: ga.first,
        v_a: ga.second.re,
        w_b: gb.first,
        v_b: gb.second.re,
        g_ab: g_ab.first,
        gamma_ab: g_ab.second,
        regime,
        residual,
    })
}

fn solve_interior(p: &ProductLaw, z: C64, w_a: C64, v_a: f64, w_b: C64, v_b: f64) -> Option<ProductPointSolution> {
    let f = |x: &[f64]| {
        let (ga, gb) = interior_unknowns(x);
        product_residual(p, z, ga, gb).map(|(e, _)| flatten(&e))
    };
    let out = gauss_newton(f, &[w_a.re, w_a.im, v_a, w_b.re, w_b.im, v_b], &NEWTON);
    let (ga, gb) = interior_unknowns(&out.x);
    if out.residual > PRODUCT_TOL || ga.second.re + gb.second.re <= INTERIOR_GAMMA_MIN {
        return None;
    }
    finish(p, z, ga, gb, Regime::Interior, out.residual)
}

fn solve_exterior(p: &ProductLaw, z: C64, w_a: C64, w_b: C64) -> Option<ProductPointSolution> {
    let f = |x: &[f64]| {
        let (ga, gb) = exterior_unknowns(x);
        product_residual(p, z, ga, gb).map(|(e, _)| flatten(&e))
    };
    let out = gauss_newton(f, &[w_a.re, w_a.im, w_b.re, w_b.im], &NEWTON);
    if out.residual > PRODUCT_TOL {
        return None;
    }
    let (ga, gb) = exterior_unknowns(&out.x);
    finish(p, z, ga, gb, Regime::Exterior, out.residual)
}

fn law_scale(l: &EllipticLaw) -> f64 {
    l.x.norm() + 2.0 * l.sigma
}

/// Holomorphic solution continued inward along the ray through `z` from a
/// point far outside the support, where `𝒢_A, 𝒢_B ≈ 0`.
fn exterior_by_ray(p: &ProductLaw, z: C64) -> Option<ProductPointSolution> {
    let far = 10.0 * (1.0 + z.norm() + law_scale(&p.a) * law_scale(&p.b));
    let dir = z / z.norm();
    let mut cur = solve_exterior(p, dir * far, C64::new(0.0, 0.0), C64::new(0.0, 0.0))?;
    let mut r_prev = far;
    for k in 1..=RAY_STEPS {
        let target = far * (z.norm() / far).powf(k as f64 / RAY_STEPS as f64);
        let mut pending = vec![target];
        let mut depth = 0;
        while let Some(rk) = pending.pop() {
            match solve_exterior(p, dir * rk, cur.w_a, cur.w_b) {
                Some(s) => {
                    cur = s;
                    r_prev = rk;
                }
                None => {
                    depth += 1;
                    if depth > 10 {
                        return None;
                    }
                    pending.push(rk);
                    pending.push(0.5 * (rk + r_prev));
                }
            }
        }
    }
    Some(ProductPointSolution { z, ..cur })
}

/// Deterministic `(v_A, v_B)` starting points on a log grid of
/// `[1e−3, 2]²`: the diagonal and the anti-diagonal of a 4 × 4 grid.
pub fn interior_seeds() -> [(f64, f64); 8] {
    let g: [f64; 4] = std::array::from_fn(|k| 1e-3 * 2000f64.powf(k as f64 / 3.0));
    [
        (g[2], g[2]),
        (g[3], g[3]),
        (g[1], g[1]),
        (g[0], g[0]),
        (g[0], g[3]),
        (g[3], g[0]),
        (g[1], g[2]),
        (g[2], g[1]),
    ]
}

/// Solves the multiplication law at `q̂ = (z, 0)`, `z ≠ 0`.
///
/// A `seed` is trusted in its regime and tried first. Otherwise the
/// holomorphic branch is continued in from infinity, and the interior
/// system is started from its `w` values (and from zero) with the
/// [`interior_seeds`] for `v`. The first interior solution with
/// `v_A + v_B > 1e−7` wins; the holomorphic one is the fallback.
pub fn multiplication_law_solve(
    p: &ProductLaw,
    z: C64,
    seed: Option<&ProductPointSolution>,
) -> Result<ProductPointSolution> {
    if !(z.norm() > 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!("multiplication law needs finite z ≠ 0, got {z}")));
    }
    if let Some(s) = seed {
        let hit = match s.regime {
            Regime::Interior => solve_interior(p, z, s.w_a, s.v_a, s.w_b, s.v_b),
            _ => solve_exterior(p, z, s.w_a, s.w_b),
        };
        if let Some(h) = hit {
            return Ok(h);
        }
    }
    let exterior = exterior_by_ray(p, z).or_else(|| solve_exterior(p, z, 1.0 / z, 1.0 / z));
    let zero = C64::new(0.0, 0.0);
    let mut w_seeds = vec![(zero, zero)];
    if let Some(e) = &exterior {
        w_seeds.insert(0, (e.w_a, e.w_b));
    }
    for (wa, wb) in &w_seeds {
        for (va, vb) in interior_seeds() {
            if let Some(s) = solve_interior(p, z, *wa, va, *wb, vb) {
                return Ok(s);
            }
        }
    }
    exterior.ok_or_else(|| Error::no_convergence(format!("multiplication law at z = {z}"), f64::NAN, 0))
}

/// Generic evaluator over [`multiplication_law_solve`].
pub struct ProductGreens<'a>(pub &'a ProductLaw);

impl GreensEvaluator for ProductGreens<'_> {
    type State = ProductPointSolution;

    fn greens_at(&self, z: C64, warm: Option<&ProductPointSolution>) -> Result<(C64, ProductPointSolution)> {
        let s = multiplication_law_solve(self.0, z, warm)?;
        Ok((s.g_ab, s))
    }

    fn greens_near(&self, z: C64, neighbour: Option<&ProductPointSolution>) -> Result<(C64, ProductPointSolution)> {
        let interior = neighbour.filter(|n| n.regime == Regime::Interior);
        if let Some(n) = interior {
            if let Some(s) = solve_interior(self.0, z, n.w_a, n.v_a, n.w_b, n.v_b) {
                return Ok((s.g_ab, s));
            }
        }
        self.greens_at(z, None)
    }
}

// ---------------------------------------------------------------------------
// (s + X)(t + X)

/// Reduced real equations `(f₁, f₂)` for `(s + X)(t + Y)` at `z = r e^{iφ}`.
pub fn shifted_ginibre_equations(s: f64, t: f64, z: C64, v_a: f64, v_b: f64) -> [f64; 2] {
    let (r, c) = (z.norm(), z.arg().cos());
    let (a2, b2) = (v_a * v_a, v_b * v_b);
    let f1 = v_a * (-1.0 + a2 + t * t) * (b2 + s * s) + (-1.0 + 2.0 * a2) * v_b * r + v_a * r * r
        - 2.0 * s * t * v_a * r * c;
    let f2 = v_b * (-1.0 + b2 + s * s) * (a2 + t * t) + (-1.0 + 2.0 * b2) * v_a * r + v_b * r * r
        - 2.0 * s * t * v_b * r * c;
    [f1, f2]
}

/// `G_AB` of `(s + X)(t + Y)` from the reduced unknowns; at `v = 0` this is
/// `1/(z − st)`.
pub fn shifted_ginibre_greens(s: f64, t: f64, z: C64, v_a: f64, v_b: f64) -> C64 {
    let (r, phi) = (z.norm(), z.arg());
    let p = v_a * v_b;
    let num = C64::from_polar(r + p, -phi) - s * t;
    let den = r * r + 2.0 * r * p + p * p + s * s * t * t - 2.0 * s * t * r * phi.cos() + s * s * v_a * v_a
        + t * t * v_b * v_b;
    num / den
}

fn reduced_solve(s: f64, t: f64, z: C64, v_a: f64, v_b: f64) -> Option<(f64, f64)> {
    let f = |x: &[f64]| Some(shifted_ginibre_equations(s, t, z, x[0].abs(), x[1].abs()).to_vec());
    let opts = NewtonOptions { tol: 1e-13 * (1.0 + z.norm_sqr()) * (1.0 + s * s) * (1.0 + t * t), ..NEWTON };
    let out = gauss_newton(f, &[v_a, v_b], &opts);
    let (a, b) = (out.x[0].abs(), out.x[1].abs());
    (out.converged && a + b > INTERIOR_GAMMA_MIN).then_some((a, b))
}

/// Nontrivial `(v_A, v_B)` of the reduced system, or `(0, 0)` when only the
/// trivial solution is found. Requires `s·t > 0`.
pub fn shifted_ginibre_interior(s: f64, t: f64, z: C64) -> Result<(f64, f64)> {
    shifted_ginibre_interior_from(s, t, z, None)
}

fn shifted_ginibre_interior_from(s: f64, t: f64, z: C64, warm: Option<(f64, f64)>) -> Result<(f64, f64)> {
    if !(s * t > 0.0) {
        return Err(Error::InvalidParameter(
            "reduced (s+X)(t+X) system needs s·t > 0; use the generic solver".into(),
        ));
    }
    if !(z.norm() > 0.0) {
        return Err(Error::InvalidParameter("z must be nonzero".into()));
    }
    if let Some((a, b)) = warm {
        if let Some(v) = reduced_solve(s, t, z, a, b) {
            return Ok(v);
        }
    }
    for (a, b) in interior_seeds() {
        if let Some(v) = reduced_solve(s, t, z, a, b) {
            return Ok(v);
        }
    }
    Ok((0.0, 0.0))
}

/// Coefficients `c₀..c₄` (lowest first) of the boundary quartic in `r`.
pub fn shifted_ginibre_quartic(s: f64, t: f64, phi: f64) -> [f64; 5] {
    let c = phi.cos();
    let (s2, t2) = (s * s, t * t);
    [
        s2 * t2 - s2 * s2 * t2 - s2 * t2 * t2 + s2 * s2 * t2 * t2,
        (2.0 * s2 * s * t + 2.0 * s * t2 * t - 4.0 * s2 * s * t2 * t) * c,
        -1.0 - s2 - t2 + 2.0 * s2 * t2 + 4.0 * s2 * t2 * c * c,
        -4.0 * s * t * c,
        1.0,
    ]
}

/// Positive real roots of `coeffs`, polished and sorted ascending.
fn positive_real_roots(coeffs: &[f64]) -> Result<Vec<f64>> {
    let cc: Vec<C64> = coeffs.iter().map(|&c| C64::new(c, 0.0)).collect();
    let mut lo = 0;
    while lo < cc.len() && cc[lo] == C64::new(0.0, 0.0) {
        lo += 1;
    }
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut out: Vec<f64> = Vec::new();
    for z in poly_roots(&cc[lo..])? {
        if z.im.abs() > 1e-7 * (1.0 + z.re.abs()) || z.re <= 1e-12 {
            continue;
        }
        let mut x = z.re;
        for _ in 0..4 {
            let (p, dp) = poly_eval(&cc, C64::new(x, 0.0));
            if dp.re == 0.0 || p.re.abs() <= 1e-16 * scale {
                break;
            }
            let next = x - p.re / dp.re;
            if poly_eval(&cc, C64::new(next, 0.0)).0.re.abs() < p.re.abs() {
                x = next;
            } else {
                break;
            }
        }
        out.push(x);
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(out)
}

/// Boundary radii at angle `φ` for `(s + X)(t + Y)`, sorted ascending. The
/// root `r = 0` (double at `s·t = 0`) is dropped.
pub fn shifted_ginibre_contour(s: f64, t: f64, phi: f64) -> Result<Vec<f64>> {
    positive_real_roots(&shifted_ginibre_quartic(s, t, phi))
}

pub fn shifted_ginibre_contour_residual(s: f64, t: f64, phi: f64, r: f64) -> f64 {
    let c: Vec<C64> = shifted_ginibre_quartic(s, t, phi).iter().map(|&x| C64::new(x, 0.0)).collect();
    poly_eval(&c, C64::new(r, 0.0)).0.norm()
}

// ---------------------------------------------------------------------------
// (1 + E(μ))(1 + E(μ))

/// Residuals of the symmetric-ansatz equations `w_A = w_B = w`,
/// `v_A = v_B = v`; the second is divided by `v`.
pub fn shifted_elliptic_equations(mu: f64, z: C64, w: C64, v: f64) -> [C64; 2] {
    let (r, phi) = (z.norm(), z.arg());
    let e = C64::from_polar(1.0, phi);
    let wc = w.conj();
    let v2 = v * v;
    let one = C64::new(1.0, 0.0);
    let e1 = e * (w * r + (one + w + wc * mu) * v2) - (one + w * mu) * (one + w + w * w * mu - v2);
    let e2 = e * (-1.0 + r + v2 - wc * (one + wc * mu)) - (one + w * mu) * (one + w * mu + wc);
    [e1, e2]
}

/// `G_AB` of `(1 + E(μ))²` from the symmetric unknowns.
pub fn shifted_elliptic_greens(mu: f64, z: C64, w: C64, v: f64) -> C64 {
    let (r, phi) = (z.norm(), z.arg());
    let e = C64::from_polar(1.0, phi);
    let wc = w.conj();
    let v2 = v * v;
    let one = C64::new(1.0, 0.0);
    let num = e * (one + wc * mu) * (one + wc * mu) - r - v2;
    let den = (r - e - wc * wc * e * mu * mu - 2.0 * e * wc * mu) * ((one + w * mu) * (one + w * mu) - r * e)
        - v2 * e * (2.0 * (1.0 + r + mu * (w + wc + mu * w.norm_sqr())) + v2);
    num / den
}

fn symmetric_solve(mu: f64, z: C64, w: C64, v: f64) -> Option<(C64, f64)> {
    let f = |x: &[f64]| {
        let [a, b] = shifted_elliptic_equations(mu, z, C64::new(x[0], x[1]), x[2].abs());
        Some(vec![a.re, a.im, b.re, b.im])
    };
    let opts = NewtonOptions { tol: 1e-13 * (1.0 + z.norm_sqr()), ..NEWTON };
    let out = gauss_newton(f, &[w.re, w.im, v], &opts);
    let v = out.x[2].abs();
    (out.converged && v > INTERIOR_GAMMA_MIN).then_some((C64::new(out.x[0], out.x[1]), v))
}

/// Holomorphic `w` of the symmetric system: `z w = (1 + wμ)(1 + w + w²μ)`,
/// continued from `w ≈ 1/z` at infinity.
fn symmetric_exterior_w(mu: f64, z: C64) -> Option<C64> {
    let f = |w: C64, z: C64| z * w - (1.0 + w * mu) * (1.0 + w + w * w * mu);
    let far = 10.0 * (4.0 + z.norm());
    let dir = z / z.norm();
    let mut w = 1.0 / (dir * far);
    for k in 0..=RAY_STEPS {
        let zk = dir * far * (z.norm() / far).powf(k as f64 / RAY_STEPS as f64);
        for _ in 0..50 {
            let h = 1e-7 * (1.0 + w.norm());
            let d = (f(w + h, zk) - f(w - h, zk)) / (2.0 * h);
            let step = f(w, zk) / d;
            w -= step;
            if step.norm() < 1e-15 * (1.0 + w.norm()) {
                break;
            }
        }
    }
    (f(w, z).norm() < 1e-10).then_some(w)
}

/// Interior `(w, v)` of `(1 + E(μ))²` with `v > 0`, or `v = 0` with the
/// holomorphic `w` when no nontrivial solution is found.
pub fn shifted_elliptic_interior(mu: f64, z: C64) -> Result<(C64, f64)> {
    shifted_elliptic_interior_from(mu, z, None)
}

fn shifted_elliptic_interior_from(mu: f64, z: C64, warm: Option<(C64, f64)>) -> Result<(C64, f64)> {
    if !(z.norm() > 0.0) {
        return Err(Error::InvalidParameter("z must be nonzero".into()));
    }
    if let Some((w, v)) = warm {
        if v > 0.0 {
            if let Some(s) = symmetric_solve(mu, z, w, v) {
                return Ok(s);
            }
        }
    }
    let ext = symmetric_exterior_w(mu, z);
    let zero = C64::new(0.0, 0.0);
    let mut w_seeds = vec![zero, C64::new(-0.5, 0.0)];
    if let Some(w) = ext {
        w_seeds.insert(0, w);
    }
    for w in &w_seeds {
        for (v, _) in interior_seeds().into_iter().take(4) {
            if let Some(s) = symmetric_solve(mu, z, *w, v) {
                return Ok(s);
            }
        }
    }
    ext.map(|w| (w, 0.0))
        .ok_or_else(|| Error::no_convergence(format!("symmetric elliptic product at z = {z}"), f64::NAN, 0))
}

/// Residuals of the boundary equations at `(φ, r, w)`.
pub fn shifted_elliptic_boundary_equations(mu: f64, phi: f64, r: f64, w: C64) -> [C64; 2] {
    let e = C64::from_polar(1.0, phi);
    let wc = w.conj();
    let one = C64::new(1.0, 0.0);
    [
        r * e * w - (one + w * mu) * (one + w + w * w * mu),
        e * (-1.0 + r - wc * (one + wc * mu)) - (one + w * mu) * (one + w * mu + wc),
    ]
}

fn boundary_solve(mu: f64, phi: f64, w: C64, r: f64) -> Option<(C64, f64)> {
    let f = |x: &[f64]| {
        let [a, b] = shifted_elliptic_boundary_equations(mu, phi, x[2], C64::new(x[0], x[1]));
        Some(vec![a.re, a.im, b.re, b.im])
    };
    let out = gauss_newton(f, &[w.re, w.im, r], &NEWTON);
    let w = C64::new(out.x[0], out.x[1]);
    (out.residual <= 1e-11 * (1.0 + w.norm_sqr()) && out.x[2] > 1e-9 && w.norm() < 1e6).then_some((w, out.x[2]))
}

/// Boundary points `(r, w)` of `(1 + E(μ))²` at angle `φ`, sorted by `r`.
pub fn shifted_elliptic_boundary(mu: f64, phi: f64, extra_seeds: &[(C64, f64)]) -> Vec<(f64, C64)> {
    let mut seeds: Vec<(C64, f64)> = extra_seeds.to_vec();
    let e = C64::from_polar(1.0, phi);
    for &rho in &[0.1, 0.3, 0.6, 1.0, 1.6, 3.0] {
        for k in 0..12 {
            let w = C64::from_polar(rho, 2.0 * PI * k as f64 / 12.0 + 0.1);
            let zw = (1.0 + w * mu) * (1.0 + w + w * w * mu) / w;
            seeds.push((w, (zw / e).re.max(0.1)));
        }
    }
    let mut found: Vec<(f64, C64)> = Vec::new();
    for (w0, r0) in seeds {
        if let Some((w, r)) = boundary_solve(mu, phi, w0, r0) {
            if !found.iter().any(|(rr, ww)| (rr - r).abs() < 1e-8 && (ww - w).norm() < 1e-6) {
                found.push((r, w));
            }
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    found
}

/// Boundary radii of `(1 + E(μ))²` at angle `φ`, sorted ascending.
pub fn shifted_elliptic_contour(mu: f64, phi: f64) -> Vec<f64> {
    let mut r: Vec<f64> = shifted_elliptic_boundary(mu, phi, &[]).into_iter().map(|(r, _)| r).collect();
    r.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    r
}

// ---------------------------------------------------------------------------
// (1 + H)(1 + X)

/// Boundary points `(r, w_B)` of `(1 + H)(1 + X)` at angle `φ`.
///
/// `w_B e^{2iφ} = x` must be real, with `(1 + 2cos2φ)x² + x − 1 = 0`; then
/// `r = (1 + w_B + w_B²)e^{−iφ}/w_B`. Only `|w_B| < 1` and `r > 0` are
/// kept (the other root continues the holomorphic branch past `|w_B| = 1`).
pub fn gue_ginibre_boundary(phi: f64) -> Vec<(f64, C64)> {
    let mut out = Vec::new();
    for x in gue_ginibre_x_roots(phi) {
        let w = C64::from_polar(x, -2.0 * phi);
        if !(w.norm() < 1.0) || x == 0.0 {
            continue;
        }
        let r = (1.0 + w + w * w) * C64::from_polar(1.0, -phi) / w;
        if r.re > 1e-12 && r.im.abs() <= 1e-9 * (1.0 + r.re) {
            out.push((r.re, w));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

pub fn gue_ginibre_contour(phi: f64) -> Vec<f64> {
    gue_ginibre_boundary(phi).into_iter().map(|(r, _)| r).collect()
}

fn gue_ginibre_x_roots(phi: f64) -> Vec<f64> {
    let a = 1.0 + 2.0 * (2.0 * phi).cos();
    if a.abs() < 1e-14 {
        return vec![1.0];
    }
    let disc = 1.0 + 4.0 * a;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (1.0 + disc.sqrt());
    vec![q / a, -1.0 / q]
}

/// `max(|a x² + x − 1|, |z w_B − (1 + w_B + w_B²)|)` minimised over the
/// real roots `x` at `φ`.
pub fn gue_ginibre_contour_residual(phi: f64, r: f64) -> f64 {
    let a = 1.0 + 2.0 * (2.0 * phi).cos();
    let z = C64::from_polar(r, phi);
    gue_ginibre_x_roots(phi)
        .into_iter()
        .map(|x| {
            let w = C64::from_polar(x, -2.0 * phi);
            (a * x * x + x - 1.0).abs().max((z * w - (1.0 + w + w * w)).norm())
        })
        .fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------------------
// Contours and support

/// Boundary curve of a product with a reduced contour system, traced on `n`
/// angles. All roots are kept, including the ones that do not separate the
/// interior from the exterior; see [`physical_support`].
pub fn product_contour(p: &ProductLaw, n: usize) -> Result<ContourCurve> {
    match p.reduction() {
        Reduction::SymmetricElliptic { mu } => Ok(trace_branches(|phi| shifted_elliptic_contour(mu, phi), n)),
        Reduction::GueGinibre => Ok(trace_branches(gue_ginibre_contour, n)),
        Reduction::ShiftedGinibre { .. } | Reduction::Generic => match p.ginibre_parameters() {
            Some((s, t, u)) => {
                let mut curve = trace_branches(|phi| shifted_ginibre_contour(s, t, phi - u.arg()).unwrap_or_default(), n);
                rescale(&mut curve, u.norm());
                Ok(curve)
            }
            None => Err(Error::Unsupported("no contour system for this product".into())),
        },
    }
}

fn rescale(curve: &mut ContourCurve, k: f64) {
    for b in &mut curve.branches {
        for s in &mut b.samples {
            s.r *= k;
        }
    }
}

/// Largest residual of the defining equations over the samples of a curve
/// produced by [`product_contour`].
pub fn product_contour_residual(p: &ProductLaw, curve: &ContourCurve) -> Result<f64> {
    let mut worst = 0.0f64;
    for b in &curve.branches {
        for smp in &b.samples {
            let res = match p.reduction() {
                Reduction::SymmetricElliptic { mu } => shifted_elliptic_boundary(mu, smp.phi, &[])
                    .into_iter()
                    .filter(|(r, _)| (r - smp.r).abs() < 1e-6)
                    .map(|(r, w)| {
                        let [a, b] = shifted_elliptic_boundary_equations(mu, smp.phi, r, w);
                        a.norm().max(b.norm())
                    })
                    .fold(f64::INFINITY, f64::min),
                Reduction::GueGinibre => gue_ginibre_contour_residual(smp.phi, smp.r),
                Reduction::ShiftedGinibre { .. } | Reduction::Generic => {
                    let (s, t, u) = p.ginibre_parameters().ok_or_else(|| Error::Unsupported("no contour system for this product".into()))?;
                    shifted_ginibre_contour_residual(s, t, smp.phi - u.arg(), smp.r / u.norm())
                }
            };
            worst = worst.max(res);
        }
    }
    Ok(worst)
}

/// Whether the multiplication law has an interior solution at `z`.
pub fn is_interior(p: &ProductLaw, z: C64) -> bool {
    matches!(multiplication_law_solve(p, z, None), Ok(s) if s.regime == Regime::Interior)
}

/// Keeps the branches across which the solution changes regime. Each
/// branch is probed at up to 12 samples away from the origin, just inside
/// and just outside along the ray; a majority decides.
pub fn physical_branches(p: &ProductLaw, curve: &ContourCurve) -> ContourCurve {
    const EPS: f64 = 0.03;
    let mut out = ContourCurve { branches: Vec::new(), warnings: curve.warnings.clone() };
    for b in &curve.branches {
        let probes: Vec<_> = b.samples.iter().filter(|s| s.r > 0.1).collect();
        if probes.is_empty() {
            continue;
        }
        let stride = (probes.len() / 12).max(1);
        let (mut yes, mut total) = (0, 0);
        for smp in probes.iter().step_by(stride) {
            let z = smp.z();
            total += 1;
            if is_interior(p, z * (1.0 - EPS)) != is_interior(p, z * (1.0 + EPS)) {
                yes += 1;
            }
        }
        if 2 * yes > total {
            out.branches.push(b.clone());
        }
    }
    out
}

/// Support region of a product bounded by its physical contour branches.
pub fn physical_support(p: &ProductLaw, n: usize) -> Result<SupportRegion> {
    Ok(physical_branches(p, &product_contour(p, n)?).region())
}

// ---------------------------------------------------------------------------
// Density

struct ShiftedGinibreGreens {
    s: f64,
    t: f64,
    u: C64,
}

impl GreensEvaluator for ShiftedGinibreGreens {
    type State = (f64, f64);

    fn greens_at(&self, z: C64, warm: Option<&(f64, f64)>) -> Result<(C64, (f64, f64))> {
        let zr = z / self.u;
        let v = match warm {
            Some(&(0.0, 0.0)) => (0.0, 0.0),
            Some(&w) => shifted_ginibre_interior_from(self.s, self.t, zr, Some(w))?,
            None => shifted_ginibre_interior(self.s, self.t, zr)?,
        };
        Ok((shifted_ginibre_greens(self.s, self.t, zr, v.0, v.1) / self.u, v))
    }

    fn greens_near(&self, z: C64, neighbour: Option<&(f64, f64)>) -> Result<(C64, (f64, f64))> {
        let warm = neighbour.copied().filter(|v| v.0 + v.1 > 0.0);
        let zr = z / self.u;
        let v = shifted_ginibre_interior_from(self.s, self.t, zr, warm)?;
        Ok((shifted_ginibre_greens(self.s, self.t, zr, v.0, v.1) / self.u, v))
    }
}

struct SymmetricEllipticGreens {
    mu: f64,
}

impl GreensEvaluator for SymmetricEllipticGreens {
    type State = (C64, f64);

    fn greens_at(&self, z: C64, warm: Option<&(C64, f64)>) -> Result<(C64, (C64, f64))> {
        let sol = match warm {
            Some(&(w, v)) if v == 0.0 => {
                let f = |x: &[f64]| {
                    let [a, _] = shifted_elliptic_equations(self.mu, z, C64::new(x[0], x[1]), 0.0);
                    Some(vec![a.re, a.im])
                };
                let out = gauss_newton(f, &[w.re, w.im], &NEWTON);
                if out.converged {
                    (C64::new(out.x[0], out.x[1]), 0.0)
                } else {
                    shifted_elliptic_interior(self.mu, z)?
                }
            }
            Some(&w) => shifted_elliptic_interior_from(self.mu, z, Some(w))?,
            None => shifted_elliptic_interior(self.mu, z)?,
        };
        Ok((shifted_elliptic_greens(self.mu, z, sol.0, sol.1), sol))
    }

    fn greens_near(&self, z: C64, neighbour: Option<&(C64, f64)>) -> Result<(C64, (C64, f64))> {
        let sol = shifted_elliptic_interior_from(self.mu, z, neighbour.copied())?;
        Ok((shifted_elliptic_greens(self.mu, z, sol.0, sol.1), sol))
    }
}

/// Density of a product on `grid`. Products with a reduced system use it;
/// everything else (including `s·t = 0`) goes through
/// [`multiplication_law_solve`].
pub fn product_density_field(p: &ProductLaw, grid: &GridSpec) -> Result<DensityGrid> {
    match p.reduction() {
        Reduction::ShiftedGinibre { s, t, u } => density_field_with(&ShiftedGinibreGreens { s, t, u }, grid),
        Reduction::SymmetricElliptic { mu } => density_field_with(&SymmetricEllipticGreens { mu }, grid),
        _ => density_field_with(&ProductGreens(p), grid),
    }
}

/// Density through the generic solver regardless of any reduction.
pub fn product_density_field_generic(p: &ProductLaw, grid: &GridSpec) -> Result<DensityGrid> {
    density_field_with(&ProductGreens(p), grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::density_at;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn shifted(x: f64, mu: f64) -> EllipticLaw {
        EllipticLaw::new(c(x, 0.0), 1.0, mu, 0.0).unwrap()
    }

    #[test]
    fn ginibre_squared_interior() {
        let p = ProductLaw::new(EllipticLaw::ginibre(), EllipticLaw::ginibre()).unwrap();
        let s = multiplication_law_solve(&p, c(0.5, 0.0), None).unwrap();
        assert_eq!(s.regime, Regime::Interior);
        assert!((s.g_ab - 1.0).norm() < 1e-9, "{:?}", s);
    }

    #[test]
    fn gue_squared_density() {
        let p = ProductLaw::new(EllipticLaw::gue(), EllipticLaw::gue()).unwrap();
        for z in [c(0.3, 0.1), c(-0.2, 0.6), c(0.0, -0.9)] {
            let rho = density_at(&ProductGreens(&p), z).unwrap();
            assert!((rho.re - 1.0 / (2.0 * PI * z.norm())).abs() < 1e-4, "{z} {rho}");
        }
    }

    #[test]
    fn quartic_factorisations() {
        assert_eq!(shifted_ginibre_quartic(0.0, 0.0, 0.7), [0.0, 0.0, -1.0, 0.0, 1.0]);
        let q = shifted_ginibre_quartic(1.0, 1.0, 0.0);
        let expect = [0.0, 0.0, 3.0, -4.0, 1.0];
        for (a, b) in q.iter().zip(expect) {
            assert!((a - b).abs() <= 1e-12);
        }
        assert_eq!(shifted_ginibre_contour(0.0, 0.0, 1.3).unwrap(), vec![1.0]);
        let r = shifted_ginibre_contour(1.0, 1.0, 0.0).unwrap();
        assert!(r.len() == 2 && (r[0] - 1.0).abs() < 1e-12 && (r[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_matches_generic() {
        for (s, t) in [(0.9, 1.2), (1.2, 1.3), (1.0, 1.0)] {
            let p = ProductLaw::new(shifted(s, 0.0), shifted(t, 0.0)).unwrap();
            for z in [c(1.0, 0.3), c(0.4, -0.5), c(2.0, 0.9), c(-0.3, 0.2), c(4.0, 1.0)] {
                let g = multiplication_law_solve(&p, z, None).unwrap();
                let (va, vb) = shifted_ginibre_interior(s, t, z).unwrap();
                let gr = shifted_ginibre_greens(s, t, z, va, vb);
                assert!((g.g_ab - gr).norm() < 1e-8, "{s} {t} {z}: {} vs {gr} ({va},{vb}) {:?}", g.g_ab, g);
            }
        }
    }

    #[test]
    fn symmetric_matches_generic() {
        for mu in [1.0 / 3.0, 0.8] {
            let p = ProductLaw::new(shifted(1.0, mu), shifted(1.0, mu)).unwrap();
            for z in [c(1.0, 0.3), c(0.4, -0.5), c(2.0, 0.9), c(-0.3, 0.2), c(5.0, 1.0)] {
                let g = multiplication_law_solve(&p, z, None).unwrap();
                let (w, v) = shifted_elliptic_interior(mu, z).unwrap();
                let gr = shifted_elliptic_greens(mu, z, w, v);
                assert!((g.g_ab - gr).norm() < 1e-8, "{mu} {z}: {} vs {gr} ({w},{v}) {:?}", g.g_ab, g);
            }
        }
    }

    #[test]
    fn gue_ginibre_loops() {
        let r0 = gue_ginibre_contour(0.0);
        assert_eq!(r0.len(), 1);
        assert!((r0[0] - 3.737).abs() < 1e-3, "{r0:?}");
        assert!(gue_ginibre_contour(PI / 2.0).is_empty());
        assert_eq!(gue_ginibre_contour(PI).len(), 1);
    }
}
