//! Quaternionic Green's functions `𝒢(q) = (q − ℛ(𝒢))⁻¹`, spectral densities
//! from `ρ = (1/π) ∂G/∂z̄`, and the delta-representation and localization
//! checks.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laws::EllipticLaw;
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::newton::{gauss_newton, NewtonOptions};
use crate::quat::Quaternion;
use crate::C64;

/// A quaternionic R transform `ℛ(q)`.
pub trait QuaternionicLaw: Sync {
    fn r_transform(&self, q: Quaternion) -> Quaternion;
}

impl QuaternionicLaw for EllipticLaw {
    fn r_transform(&self, q: Quaternion) -> Quaternion {
        crate::laws::elliptic_r_transform(self, q)
    }
}

impl<F: Fn(Quaternion) -> Quaternion + Sync> QuaternionicLaw for F {
    fn r_transform(&self, q: Quaternion) -> Quaternion {
        self(q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Non-holomorphic branch, `Γ > 0` at `w = 0`.
    Interior,
    /// Holomorphic branch, `Γ = 0` at `w = 0`.
    Exterior,
    /// Solved at `w ≠ 0`, where `Γ` never vanishes.
    Regularized,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreensResult {
    pub value: Quaternion,
    pub regime: Regime,
    pub residual: f64,
    pub iterations: usize,
}

/// Converged solutions have a residual at or below this.
pub const GREENS_TOL: f64 = 1e-10;
/// Interior solutions need `Γ` above this.
pub const INTERIOR_GAMMA_MIN: f64 = 1e-7;

const NEWTON: NewtonOptions = NewtonOptions { tol: 1e-14, max_iter: 60, fd_step: 1e-7 };
const CONTINUATION_STEPS: usize = 30;
const W_FLOOR: f64 = 1e-6;

/// `‖𝒢 (q − ℛ(𝒢)) − 1‖`.
pub fn greens_residual(law: &dyn QuaternionicLaw, q: Quaternion, g: Quaternion) -> f64 {
    (g * (q - law.r_transform(g)) - Quaternion::ONE).norm()
}

fn residual_vec(law: &dyn QuaternionicLaw, q: Quaternion, g: Quaternion) -> Option<Vec<f64>> {
    let r = g * (q - law.r_transform(g)) - Quaternion::ONE;
    r.is_finite().then(|| vec![r.first.re, r.first.im, r.second.re, r.second.im])
}

fn solve_full(law: &dyn QuaternionicLaw, q: Quaternion, seed: Quaternion) -> (Quaternion, f64, usize) {
    let f = |x: &[f64]| residual_vec(law, q, Quaternion::from_real_parts(x[0], x[1], x[2], x[3]));
    let x0 = [seed.first.re, seed.first.im, seed.second.re, seed.second.im];
    let out = gauss_newton(f, &x0, &NEWTON);
    let g = Quaternion::from_real_parts(out.x[0], out.x[1], out.x[2], out.x[3]);
    (g, out.residual, out.iterations)
}

fn solve_interior(law: &dyn QuaternionicLaw, z: C64, g0: C64, gamma0: f64) -> (Quaternion, f64, usize) {
    let q = Quaternion::from_complex(z);
    let f = |x: &[f64]| residual_vec(law, q, Quaternion::new(C64::new(x[0], x[1]), C64::new(x[2].abs(), 0.0)));
    let out = gauss_newton(f, &[g0.re, g0.im, gamma0], &NEWTON);
    let g = Quaternion::new(C64::new(out.x[0], out.x[1]), C64::new(out.x[2].abs(), 0.0));
    (g, out.residual, out.iterations)
}

fn solve_exterior(law: &dyn QuaternionicLaw, z: C64, g0: C64) -> (Quaternion, f64, usize) {
    let q = Quaternion::from_complex(z);
    let f = |x: &[f64]| residual_vec(law, q, Quaternion::from_complex(C64::new(x[0], x[1])));
    let out = gauss_newton(f, &[g0.re, g0.im], &NEWTON);
    (Quaternion::from_complex(C64::new(out.x[0], out.x[1])), out.residual, out.iterations)
}

/// Continues the unique `w ≠ 0` solution from `|w| = W₀` (seed `q⁻¹`) down
/// to `|w| = w_end` along a fixed phase.
fn continue_in_w(
    law: &dyn QuaternionicLaw,
    z: C64,
    phase: C64,
    w_end: f64,
    iterations: &mut usize,
) -> Result<(Quaternion, f64)> {
    let w0 = 10.0 * (1.0 + z.norm());
    let mut g = Quaternion::new(z, phase * w0).inv()?;
    let mut res = 0.0;
    let mut w_prev = w0;
    for k in 0..=CONTINUATION_STEPS {
        let target = w0 * (w_end / w0).powf(k as f64 / CONTINUATION_STEPS as f64);
        // bisect the step in w on failure
        let mut pending = vec![target];
        let mut depth = 0;
        while let Some(wk) = pending.pop() {
            let (gn, r, it) = solve_full(law, Quaternion::new(z, phase * wk), g);
            *iterations += it;
            if r <= GREENS_TOL {
                g = gn;
                res = r;
                w_prev = wk;
            } else {
                depth += 1;
                if depth > 12 {
                    return Err(Error::no_convergence(format!("w-continuation at z = {z}, |w| = {wk:e}"), r, *iterations));
                }
                pending.push(wk);
                pending.push((wk * w_prev).sqrt());
            }
        }
    }
    Ok((g, res))
}

/// Solves `𝒢 (q − ℛ(𝒢)) = 1`.
///
/// For `w ≠ 0` the solution is continued from large `|w|`, where `𝒢 ≈ q⁻¹`,
/// at the fixed phase of `w`. For `w = 0` the continuation stops at a small
/// `|w|` and the limit is solved directly in both gauges: interior with
/// `Γ` real nonnegative as an unknown, exterior with `Γ = 0`. The interior
/// solution is preferred when it converges with `Γ > 1e−7`.
///
/// A `seed` (typically a neighbouring solution) is tried first at `w = 0`.
pub fn solve_quaternionic_greens(
    law: &dyn QuaternionicLaw,
    q: Quaternion,
    seed: Option<&GreensResult>,
) -> Result<GreensResult> {
    if !q.is_finite() {
        return Err(Error::InvalidParameter("non-finite quaternion".into()));
    }
    let z = q.first;
    let mut iterations = 0;

    if q.second != C64::new(0.0, 0.0) {
        let phase = q.second / q.second.norm();
        let (g, res) = continue_in_w(law, z, phase, q.second.norm(), &mut iterations)?;
        return Ok(GreensResult { value: g, regime: Regime::Regularized, residual: res, iterations });
    }

    if let Some(s) = seed {
        let attempt = match s.regime {
            Regime::Interior => {
                let (g, r, it) = solve_interior(law, z, s.value.first, s.value.second.norm());
                iterations += it;
                (r <= GREENS_TOL && g.second.re > INTERIOR_GAMMA_MIN).then_some((g, r, Regime::Interior))
            }
            Regime::Exterior => {
                let (g, r, it) = solve_exterior(law, z, s.value.first);
                iterations += it;
                (r <= GREENS_TOL).then_some((g, r, Regime::Exterior))
            }
            Regime::Regularized => None,
        };
        if let Some((value, residual, regime)) = attempt {
            return Ok(GreensResult { value, regime, residual, iterations });
        }
    }

    let (g, _) = continue_in_w(law, z, C64::new(1.0, 0.0), W_FLOOR, &mut iterations)?;
    let (gi, ri, it) = solve_interior(law, z, g.first, g.second.norm());
    iterations += it;
    if ri <= GREENS_TOL && gi.second.re > INTERIOR_GAMMA_MIN {
        return Ok(GreensResult { value: gi, regime: Regime::Interior, residual: ri, iterations });
    }
    let (ge, re, it) = solve_exterior(law, z, g.first);
    iterations += it;
    if re <= GREENS_TOL {
        return Ok(GreensResult { value: ge, regime: Regime::Exterior, residual: re, iterations });
    }
    Err(Error::no_convergence(format!("Green's function at z = {z}"), ri.min(re), iterations))
}

/// Closed-form elliptic solution at `w = 0`: returns `(G, Γ)` with `Γ ≥ 0`.
///
/// With `u = z − x` and `c = μσ²e^{2iφ}`, the interior branch is
/// `G = (σ²ū − c̄u)/(σ⁴ − |c|²)`, `Γ² = (1 − σ²|G|²)/σ²`; outside the
/// ellipse `G` is the holomorphic root of `cG² − uG + 1 = 0` that behaves
/// like `1/u` at infinity.
pub fn elliptic_greens_closed_form(law: &EllipticLaw, z: C64) -> Quaternion {
    let u = z - law.x;
    let s2 = law.sigma * law.sigma;
    let c = law.k2_diagonal();
    let denom = s2 * s2 - c.norm_sqr();
    if denom > 0.0 {
        let g = (u.conj() * s2 - c.conj() * u) / denom;
        let gamma2 = (1.0 - s2 * g.norm_sqr()) / s2;
        if gamma2 > 0.0 {
            return Quaternion::new(g, C64::new(gamma2.sqrt(), 0.0));
        }
    }
    if c.norm() == 0.0 {
        return Quaternion::from_complex(1.0 / u);
    }
    let disc = (u * u - 4.0 * c).sqrt();
    let g1 = (u - disc) / (2.0 * c);
    let g2 = (u + disc) / (2.0 * c);
    // 1/u asymptotics selects the root of smaller modulus
    Quaternion::from_complex(if g1.norm() <= g2.norm() { g1 } else { g2 })
}

/// Rectangular grid of cell centres in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = GridSpec { x_min, x_max, y_min, y_max, nx, ny };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::InvalidParameter("grid bounds must be finite with min < max".into()));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidParameter("grid resolution must be positive".into()));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Centre of cell `(ix, iy)`; cells are stored row by row in `iy`.
    pub fn center(&self, ix: usize, iy: usize) -> C64 {
        C64::new(
            self.x_min + (ix as f64 + 0.5) * self.dx(),
            self.y_min + (iy as f64 + 0.5) * self.dy(),
        )
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Cell containing `z`, if inside the half-open bounds.
    pub fn locate(&self, z: C64) -> Option<(usize, usize)> {
        if !(z.re >= self.x_min && z.re < self.x_max && z.im >= self.y_min && z.im < self.y_max) {
            return None;
        }
        let ix = (((z.re - self.x_min) / self.dx()) as usize).min(self.nx - 1);
        let iy = (((z.im - self.y_min) / self.dy()) as usize).min(self.ny - 1);
        Some((ix, iy))
    }
}

/// Density per unit area on a [`GridSpec`]; invalid cells carry `0` and
/// are excluded from mass and comparisons.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
    /// Largest `|Im ρ|` over valid cells.
    pub max_imag: f64,
    /// Invalid cells whose solve failed outright (the rest failed the
    /// `|Im ρ|` sentinel).
    pub unsolved: usize,
}

impl DensityGrid {
    pub fn mass(&self) -> f64 {
        let area = self.grid.cell_area();
        self.values.iter().zip(&self.valid).filter(|(_, &ok)| ok).map(|(v, _)| v * area).sum()
    }

    pub fn value_at(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.grid.index(ix, iy)]
    }

    pub fn invalid_count(&self) -> usize {
        self.valid.iter().filter(|v| !**v).count()
    }
}

/// Densities with `|Im ρ|` above this are flagged invalid.
pub const IMAG_SENTINEL: f64 = 1e-6;

/// Anything that yields the first Cayley-Dickson part `G(z)` at `w = 0`,
/// optionally warm-started from a nearby solution.
pub trait GreensEvaluator: Sync {
    type State: Clone + Send;
    fn greens_at(&self, z: C64, warm: Option<&Self::State>) -> Result<(C64, Self::State)>;

    /// Like [`greens_at`](Self::greens_at) from scratch, with the solution
    /// at a neighbouring grid cell as a hint that must not bias the regime.
    fn greens_near(&self, z: C64, _neighbour: Option<&Self::State>) -> Result<(C64, Self::State)> {
        self.greens_at(z, None)
    }
}

/// Generic elliptic-style evaluator over a quaternionic law.
pub struct QuaternionicGreens<'a, L: QuaternionicLaw + ?Sized>(pub &'a L);

impl<L: QuaternionicLaw + ?Sized> GreensEvaluator for QuaternionicGreens<'_, L> {
    type State = GreensResult;

    fn greens_at(&self, z: C64, warm: Option<&GreensResult>) -> Result<(C64, GreensResult)> {
        let law = |q: Quaternion| self.0.r_transform(q);
        let r = solve_quaternionic_greens(&law, Quaternion::from_complex(z), warm)?;
        Ok((r.value.first, r))
    }
}

/// Finite-difference step for `∂/∂z̄` at `z`.
pub fn stencil_step(z: C64) -> f64 {
    1e-4 * (1.0 + z.norm())
}

/// `ρ(z) = (1/π) ∂G/∂z̄` with `∂/∂z̄ = ½(∂ₓ + i∂ᵧ)` on a central 4-point
/// stencil; stencil points are warm-started from the centre solution.
/// Returns the complex value so that the imaginary residue can be checked.
/// When that residue exceeds [`IMAG_SENTINEL`] a second stencil at `2h`
/// is combined with the first by Richardson extrapolation.
pub fn density_at<E: GreensEvaluator>(e: &E, z: C64) -> Result<C64> {
    density_near(e, z, None).map(|r| r.0)
}

fn density_near<E: GreensEvaluator>(e: &E, z: C64, neighbour: Option<&E::State>) -> Result<(C64, E::State)> {
    let (_, center) = e.greens_near(z, neighbour)?;
    let h = stencil_step(z);
    let rho = stencil(e, z, h, &center)?;
    if rho.im.abs() <= IMAG_SENTINEL {
        return Ok((rho, center));
    }
    // Truncation-limited cells (steep G): Richardson with a 2h stencil
    // cancels the O(h²) term. Branch errors survive this and stay flagged.
    let wide = stencil(e, z, 2.0 * h, &center)?;
    let extrapolated = (rho * 4.0 - wide) / 3.0;
    Ok((if extrapolated.im.abs() < rho.im.abs() { extrapolated } else { rho }, center))
}

fn stencil<E: GreensEvaluator>(e: &E, z: C64, h: f64, center: &E::State) -> Result<C64> {
    let eval = |dz: C64| e.greens_at(z + dz, Some(center)).map(|r| r.0);
    let gxp = eval(C64::new(h, 0.0))?;
    let gxm = eval(C64::new(-h, 0.0))?;
    let gyp = eval(C64::new(0.0, h))?;
    let gym = eval(C64::new(0.0, -h))?;
    let dx = (gxp - gxm) / (2.0 * h);
    let dy = (gyp - gym) / (2.0 * h);
    Ok((dx + C64::new(0.0, 1.0) * dy) * (0.5 / PI))
}

/// Density on every cell of `grid`. Rows are evaluated in parallel; along
/// a row each centre solve gets the previous cell as a hint.
pub fn density_field_with<E: GreensEvaluator>(e: &E, grid: &GridSpec) -> Result<DensityGrid> {
    grid.validate()?;
    let rows: Vec<Vec<(f64, bool, f64)>> = (0..grid.ny)
        .into_par_iter()
        .map(|iy| {
            let mut hint: Option<E::State> = None;
            (0..grid.nx)
                .map(|ix| match density_near(e, grid.center(ix, iy), hint.as_ref()) {
                    Ok((rho, state)) => {
                        hint = Some(state);
                        if rho.im.abs() <= IMAG_SENTINEL && rho.re.is_finite() {
                            (rho.re.max(0.0), true, rho.im.abs())
                        } else {
                            (0.0, false, 0.0)
                        }
                    }
                    Err(_) => {
                        hint = None;
                        (0.0, false, f64::NAN)
                    }
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(grid.len());
    let mut valid = Vec::with_capacity(grid.len());
    let mut max_imag = 0.0f64;
    let mut unsolved = 0;
    for row in rows {
        for (v, ok, im) in row {
            values.push(v);
            valid.push(ok);
            if im.is_nan() {
                unsolved += 1;
            } else {
                max_imag = max_imag.max(im);
            }
        }
    }
    Ok(DensityGrid { grid: *grid, values, valid, max_imag, unsolved })
}

/// Density field of a quaternionic law.
pub fn density_field(law: &dyn QuaternionicLaw, grid: &GridSpec) -> Result<DensityGrid> {
    density_field_with(&QuaternionicGreens(law), grid)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaPart {
    First,
    Second,
}

/// Regularized two-dimensional delta, `(1/π)|w|²/(|z|²+|w|²)²`, or its
/// second-part form multiplied by `w/w̄`.
pub fn delta_representation(z: C64, w: C64, part: DeltaPart) -> Result<C64> {
    let w2 = w.norm_sqr();
    if w2 == 0.0 {
        if z.norm_sqr() == 0.0 {
            return Err(Error::SingularInput("delta representation at z = w = 0"));
        }
        return Ok(C64::new(0.0, 0.0));
    }
    let d = z.norm_sqr() + w2;
    let first = w2 / (PI * d * d);
    Ok(match part {
        DeltaPart::First => C64::new(first, 0.0),
        DeltaPart::Second => (w / w.conj()) * first,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalizationReport {
    pub eigenvalue: C64,
    pub probe: C64,
    pub min_eig_hl: f64,
}

/// Smallest eigenvalue of `H_L = (λ − X)(λ̄ − X†) + |w|²`.
pub fn localization_check(x: &CMatrix, lambda: C64, w: C64) -> LocalizationReport {
    let n = x.nrows();
    let mut a = -x.clone();
    for i in 0..n {
        a[(i, i)] += lambda;
    }
    let mut h = &a * a.adjoint();
    for i in 0..n {
        h[(i, i)] += C64::new(w.norm_sqr(), 0.0);
    }
    let min = hermitian_eigenvalues(&h).first().copied().unwrap_or(w.norm_sqr());
    LocalizationReport { eigenvalue: lambda, probe: w, min_eig_hl: min.max(0.0) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn ginibre_interior_and_exterior() {
        let law = EllipticLaw::ginibre();
        let r = solve_quaternionic_greens(&law, Quaternion::from_complex(c(0.5, 0.0)), None).unwrap();
        assert_eq!(r.regime, Regime::Interior);
        assert!((r.value.first - c(0.5, 0.0)).norm() < 1e-12);
        assert!((r.value.second.re - 0.75f64.sqrt()).abs() < 1e-12);
        assert!(r.residual <= GREENS_TOL);

        let r = solve_quaternionic_greens(&law, Quaternion::from_complex(c(2.0, 0.0)), None).unwrap();
        assert_eq!(r.regime, Regime::Exterior);
        assert!((r.value.first - c(0.5, 0.0)).norm() < 1e-12);
        assert_eq!(r.value.second, c(0.0, 0.0));
    }

    #[test]
    fn gue_on_real_axis_outside() {
        let r = solve_quaternionic_greens(&EllipticLaw::gue(), Quaternion::from_complex(c(3.0, 0.0)), None).unwrap();
        assert_eq!(r.regime, Regime::Exterior);
        assert!((r.value.first - c((3.0 - 5f64.sqrt()) / 2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn regularized_solution_satisfies_equation() {
        let law = EllipticLaw::standard(0.5).unwrap();
        let q = Quaternion::new(c(2.0, 0.0), c(0.1, 0.0));
        let r = solve_quaternionic_greens(&law, q, None).unwrap();
        assert_eq!(r.regime, Regime::Regularized);
        assert!(greens_residual(&law, q, r.value) <= 1e-10);
        // Γ = −w · (positive) from the block structure
        assert!(r.value.second.re < 0.0 && r.value.second.im.abs() < 1e-12);
    }

    #[test]
    fn matches_closed_form_for_elliptic_laws() {
        let laws = [
            EllipticLaw::standard(0.5).unwrap(),
            EllipticLaw::new(c(0.3, -0.2), 1.4, -0.3, 0.6).unwrap(),
            EllipticLaw::new(c(0.0, 0.0), 0.7, 0.9, -1.2).unwrap(),
        ];
        for law in &laws {
            for k in 0..24 {
                let t = k as f64 * 0.7;
                let z = law.x + C64::from_polar(0.15 * k as f64, t);
                let r = solve_quaternionic_greens(law, Quaternion::from_complex(z), None).unwrap();
                let exact = elliptic_greens_closed_form(law, z);
                assert!(
                    (r.value - exact).max_abs() < 1e-9,
                    "law {law:?} z={z}: {} vs {}",
                    r.value,
                    exact
                );
                assert!(greens_residual(law, Quaternion::from_complex(z), r.value) <= GREENS_TOL);
            }
        }
    }

    #[test]
    fn density_examples() {
        let law = EllipticLaw::ginibre();
        let e = QuaternionicGreens(&law);
        let rho = density_at(&e, c(0.3, 0.0)).unwrap();
        assert!((rho.re - 1.0 / PI).abs() < 1e-6);
        assert!(rho.im.abs() < 1e-6);
        let rho = density_at(&e, c(2.0, 0.0)).unwrap();
        assert!(rho.norm() < 1e-8);
        let law = EllipticLaw::standard(0.4).unwrap();
        let rho = density_at(&QuaternionicGreens(&law), c(0.2, 0.3)).unwrap();
        assert!((rho.re - 1.0 / (PI * (1.0 - 0.16))).abs() < 1e-6);
    }

    #[test]
    fn exterior_is_holomorphic() {
        let law = EllipticLaw::standard(0.3).unwrap();
        for z in [c(2.5, 0.5), c(-1.5, 2.0), c(0.0, -2.0)] {
            let rho = density_at(&QuaternionicGreens(&law), z).unwrap();
            assert!(rho.norm() * PI <= 1e-8, "z={z}: {rho}");
        }
    }

    #[test]
    fn coarse_density_field_mass() {
        let law = EllipticLaw::standard(0.5).unwrap();
        let grid = GridSpec::new(-1.8, 1.8, -1.0, 1.0, 36, 20).unwrap();
        let d = density_field(&law, &grid).unwrap();
        assert_eq!(d.invalid_count(), 0);
        assert!((d.mass() - 1.0).abs() < 0.02, "mass {}", d.mass());
    }

    #[test]
    fn grid_geometry() {
        let g = GridSpec::new(-1.0, 1.0, 0.0, 1.0, 4, 2).unwrap();
        assert_eq!(g.center(0, 0), c(-0.75, 0.25));
        assert_eq!(g.locate(c(0.9, 0.9)), Some((3, 1)));
        assert_eq!(g.locate(c(1.0, 0.5)), None);
        assert_eq!(g.index(1, 1), 5);
        assert!(GridSpec::new(1.0, -1.0, 0.0, 1.0, 4, 4).is_err());
    }

    #[test]
    fn delta_examples() {
        let d = delta_representation(c(0.0, 0.0), c(1.0, 0.0), DeltaPart::First).unwrap();
        assert_eq!(d, c(1.0 / PI, 0.0));
        let z = c(0.3, -0.2);
        let w = c(0.7, 0.0);
        assert_eq!(
            delta_representation(z, w, DeltaPart::First).unwrap(),
            delta_representation(z, w, DeltaPart::Second).unwrap()
        );
        assert_eq!(delta_representation(c(1.0, 0.0), c(0.0, 0.0), DeltaPart::First).unwrap(), c(0.0, 0.0));
        assert!(delta_representation(c(0.0, 0.0), c(0.0, 0.0), DeltaPart::First).is_err());
    }

    #[test]
    fn localization_examples() {
        let r = localization_check(&CMatrix::zeros(4, 4), c(0.0, 0.0), c(0.1, 0.0));
        assert!((r.min_eig_hl - 0.01).abs() < 1e-15);
        // normal matrix away from its spectrum
        let diag = [c(1.0, 0.0), c(0.0, 2.0), c(-1.0, -1.0)];
        let x = CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&diag));
        let z = c(0.5, 0.2);
        let r = localization_check(&x, z, c(0.0, 0.3));
        let dist2 = diag.iter().map(|l| (z - l).norm_sqr()).fold(f64::INFINITY, f64::min);
        assert!((r.min_eig_hl - (0.09 + dist2)).abs() < 1e-12);
    }
}
