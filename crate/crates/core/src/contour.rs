//! Support boundaries as polar branches `r(φ)` and the planar regions they
//! enclose.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::laws::EllipticLaw;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSample {
    pub phi: f64,
    pub r: f64,
}

impl ContourSample {
    pub fn z(&self) -> C64 {
        C64::from_polar(self.r, self.phi)
    }
}

/// One polyline of a boundary. Closed branches wrap once around the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourBranch {
    pub samples: Vec<ContourSample>,
    pub closed: bool,
}

impl ContourBranch {
    pub fn points(&self) -> Vec<C64> {
        self.samples.iter().map(|s| s.z()).collect()
    }

    /// The two end points, if open.
    pub fn ends(&self) -> Option<(C64, C64)> {
        if self.closed || self.samples.is_empty() {
            return None;
        }
        Some((self.samples[0].z(), self.samples[self.samples.len() - 1].z()))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContourCurve {
    pub branches: Vec<ContourBranch>,
    /// Non-fatal tracing problems, e.g. a branch lost during continuation.
    pub warnings: Vec<String>,
}

impl ContourCurve {
    pub fn sample_count(&self) -> usize {
        self.branches.iter().map(|b| b.samples.len()).sum()
    }

    pub fn region(&self) -> SupportRegion {
        SupportRegion::from_branches(&self.branches)
    }
}

/// Evenly spaced angles `2πk/n`, `k = 0..n`.
pub fn phi_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

fn jump_tolerance(r: f64) -> f64 {
    0.08 + 0.25 * r
}

fn nearest(roots: &[f64], r: f64) -> Option<(usize, f64)> {
    roots
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, (x - r).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Narrows down where a branch stops existing between `phi_in` (alive with
/// radius `r_in`) and `phi_out`.
fn refine_end<F: Fn(f64) -> Vec<f64>>(roots: &F, mut phi_in: f64, mut phi_out: f64, mut r_in: f64) -> ContourSample {
    for _ in 0..48 {
        let mid = 0.5 * (phi_in + phi_out);
        let rs = roots(mid);
        match nearest(&rs, r_in) {
            Some((i, d)) if d <= jump_tolerance(r_in) => {
                phi_in = mid;
                r_in = rs[i];
            }
            _ => phi_out = mid,
        }
    }
    ContourSample { phi: phi_in, r: r_in }
}

struct Open {
    samples: Vec<ContourSample>,
    start_k: usize,
    last_k: usize,
}

/// Traces the positive roots of `roots(φ)` on `n` equally spaced angles
/// into branches single-valued in `φ`.
///
/// Consecutive roots are linked by nearest radius. Branches that appear or
/// disappear between samples get their end located by bisection in `φ`;
/// a branch alive at both `φ = 0` and `φ = 2π⁻` is stitched across the
/// seam, and ends meeting at a fold (away from the origin) are joined.
pub fn trace_branches<F>(roots: F, n: usize) -> ContourCurve
where
    F: Fn(f64) -> Vec<f64> + Sync,
{
    let phis = phi_grid(n.max(8));
    let n = phis.len();
    let all: Vec<Vec<f64>> = phis.par_iter().map(|&p| roots(p)).collect();
    let step = TAU / n as f64;

    let mut finished: Vec<Open> = Vec::new();
    let mut active: Vec<Open> = Vec::new();
    for k in 0..n {
        let rs = &all[k];
        let mut used = vec![false; rs.len()];
        let mut next_active = Vec::new();
        // greedy nearest matching, closest pairs first
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (bi, b) in active.iter().enumerate() {
            let last = b.samples.last().unwrap().r;
            for (ri, &r) in rs.iter().enumerate() {
                let d = (r - last).abs();
                if d <= jump_tolerance(last) {
                    pairs.push((d, bi, ri));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut matched = vec![None; active.len()];
        for (_, bi, ri) in pairs {
            if matched[bi].is_none() && !used[ri] {
                matched[bi] = Some(ri);
                used[ri] = true;
            }
        }
        for (bi, mut b) in active.into_iter().enumerate() {
            match matched[bi] {
                Some(ri) => {
                    b.samples.push(ContourSample { phi: phis[k], r: rs[ri] });
                    b.last_k = k;
                    next_active.push(b);
                }
                None => {
                    let last = *b.samples.last().unwrap();
                    b.samples.push(refine_end(&roots, last.phi, last.phi + step, last.r));
                    finished.push(b);
                }
            }
        }
        for (ri, &r) in rs.iter().enumerate() {
            if !used[ri] {
                let mut samples = Vec::new();
                if k > 0 {
                    samples.push(refine_end(&roots, phis[k], phis[k] - step, r));
                }
                samples.push(ContourSample { phi: phis[k], r });
                next_active.push(Open { samples, start_k: k, last_k: k });
            }
        }
        active = next_active;
    }

    // seam at φ = 2π ≡ 0
    let mut curve = ContourCurve::default();
    let mut starters: Vec<Option<Open>> = Vec::new();
    let mut others: Vec<Open> = Vec::new();
    for b in finished {
        if b.start_k == 0 {
            starters.push(Some(b));
        } else {
            others.push(b);
        }
    }
    let mut tails: Vec<Open> = Vec::new();
    for b in active {
        if b.start_k == 0 {
            // alive at every sample
            if b.last_k == n - 1 && b.samples.len() == n {
                let mut samples = b.samples;
                samples.push(ContourSample { phi: TAU, r: samples[0].r });
                curve.branches.push(ContourBranch { samples, closed: true });
                continue;
            }
            starters.push(Some(b));
        } else {
            tails.push(b);
        }
    }
    for mut t in tails {
        let last = t.samples.last().unwrap().r;
        let best = starters
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|s| (i, (s.samples[0].r - last).abs())))
            .filter(|&(_, d)| d <= jump_tolerance(last))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, _)) => {
                let s = starters[i].take().unwrap();
                t.samples.extend(s.samples.into_iter().map(|p| ContourSample { phi: p.phi + TAU, ..p }));
                others.push(t);
            }
            None => {
                let lastp = *t.samples.last().unwrap();
                t.samples.push(refine_end(&roots, lastp.phi, lastp.phi + step, lastp.r));
                others.push(t);
            }
        }
    }
    others.extend(starters.into_iter().flatten());

    let mut branches: Vec<ContourBranch> =
        others.into_iter().map(|b| ContourBranch { samples: b.samples, closed: false }).collect();
    join_folds(&mut branches);
    curve.branches.extend(branches);
    for b in &mut curve.branches {
        for s in &mut b.samples {
            s.phi = s.phi.rem_euclid(TAU);
        }
    }
    curve
}

/// Joins open branches whose ends coincide away from the origin.
fn join_folds(branches: &mut Vec<ContourBranch>) {
    const TOL: f64 = 1e-3;
    loop {
        let mut joined = false;
        'outer: for i in 0..branches.len() {
            for j in 0..branches.len() {
                if i == j || branches[i].closed || branches[j].closed {
                    continue;
                }
                let (_, end_i) = branches[i].ends().unwrap();
                let (start_j, end_j) = branches[j].ends().unwrap();
                if end_i.norm() > TOL && (end_i - start_j).norm() < TOL {
                    let tail = branches.remove(j);
                    let i = if j < i { i - 1 } else { i };
                    branches[i].samples.extend(tail.samples);
                    joined = true;
                    break 'outer;
                }
                if end_i.norm() > TOL && (end_i - end_j).norm() < TOL {
                    let mut tail = branches.remove(j);
                    tail.samples.reverse();
                    let i = if j < i { i - 1 } else { i };
                    branches[i].samples.extend(tail.samples);
                    joined = true;
                    break 'outer;
                }
            }
        }
        if !joined {
            break;
        }
    }
    for b in branches.iter_mut() {
        if let Some((s, e)) = b.ends() {
            if s.norm() > TOL && (s - e).norm() < TOL {
                b.closed = true;
            }
        }
    }
}

/// Boundary ellipse of an elliptic law as a single closed branch.
pub fn elliptic_contour(law: &EllipticLaw, n: usize) -> ContourCurve {
    let (a, b) = law.support_semi_axes();
    let axis = if law.mu >= 0.0 { law.phi } else { law.phi + PI / 2.0 };
    let rot = C64::from_polar(1.0, axis);
    let samples = (0..=n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            let z = law.x + rot * C64::new(a * t.cos(), b * t.sin());
            ContourSample { phi: z.arg(), r: z.norm() }
        })
        .collect();
    ContourCurve { branches: vec![ContourBranch { samples, closed: true }], warnings: Vec::new() }
}

/// Region bounded by closed polygons under the even-odd rule.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SupportRegion {
    pub polygons: Vec<Vec<C64>>,
}

impl SupportRegion {
    /// Each branch becomes a polygon; open branches are closed by the
    /// segment joining their ends (which is degenerate when both ends sit
    /// at the origin).
    pub fn from_branches(branches: &[ContourBranch]) -> Self {
        let polygons = branches
            .iter()
            .map(|b| b.points())
            .filter(|p| p.len() >= 3)
            .collect();
        SupportRegion { polygons }
    }

    pub fn contains(&self, z: C64) -> bool {
        let mut inside = false;
        for poly in &self.polygons {
            let n = poly.len();
            for i in 0..n {
                let a = poly[i];
                let b = poly[(i + 1) % n];
                if (a.im > z.im) != (b.im > z.im) {
                    let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                    if z.re < x {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }

    pub fn boundary_distance(&self, z: C64) -> f64 {
        let mut best = f64::INFINITY;
        for poly in &self.polygons {
            let n = poly.len();
            for i in 0..n {
                let a = poly[i];
                let b = poly[(i + 1) % n];
                let ab = b - a;
                let len2 = ab.norm_sqr();
                let t = if len2 == 0.0 { 0.0 } else { (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0) };
                best = best.min((a + ab * t - z).norm());
            }
        }
        best
    }

    /// Membership in the region grown by `delta`.
    pub fn contains_dilated(&self, z: C64, delta: f64) -> bool {
        self.contains(z) || self.boundary_distance(z) <= delta
    }

    pub fn area(&self) -> f64 {
        self.polygons
            .iter()
            .map(|p| {
                let n = p.len();
                0.5 * (0..n).map(|i| p[i].re * p[(i + 1) % n].im - p[(i + 1) % n].re * p[i].im).sum::<f64>()
            })
            .map(f64::abs)
            .sum()
    }
}
