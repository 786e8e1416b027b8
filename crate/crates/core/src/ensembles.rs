//! Random matrix sampling from ensemble expression trees and comparison of
//! empirical spectra with the theory.
//!
//! Every repetition draws from its own ChaCha20 stream: the generator is
//! seeded from the 64-bit master seed and the stream number is the
//! repetition index, so batches are bit-identical however the repetitions
//! are scheduled. Gaussian variates come from `rand_distr::StandardNormal`
//! (ziggurat).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::contour::{elliptic_contour, ContourCurve, SupportRegion};
use crate::error::{Error, Result};
use crate::greens::{density_field, DensityGrid, GridSpec};
use crate::laws::{add_elliptic, scale_shift_law, EllipticLaw};
use crate::linalg::{eigenvalues, CMatrix};
use crate::product::{physical_branches, product_contour, product_density_field, ProductLaw};
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub enum EnsembleSpec {
    Elliptic(EllipticLaw),
    Gue,
    Ginibre,
    Shift { x: C64, of: Box<EnsembleSpec> },
    Scale { alpha: C64, of: Box<EnsembleSpec> },
    Sum(Vec<EnsembleSpec>),
    Product(Box<EnsembleSpec>, Box<EnsembleSpec>),
}

/// What the theory side can evaluate for a spec.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TheoryModel {
    Elliptic(EllipticLaw),
    Product(ProductLaw),
}

impl EnsembleSpec {
    pub fn shift(x: C64, of: EnsembleSpec) -> Self {
        EnsembleSpec::Shift { x, of: Box::new(of) }
    }

    pub fn scale(alpha: C64, of: EnsembleSpec) -> Self {
        EnsembleSpec::Scale { alpha, of: Box::new(of) }
    }

    pub fn product(a: EnsembleSpec, b: EnsembleSpec) -> Self {
        EnsembleSpec::Product(Box::new(a), Box::new(b))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EnsembleSpec::Elliptic(_) | EnsembleSpec::Gue | EnsembleSpec::Ginibre => Ok(()),
            EnsembleSpec::Shift { x, of } => {
                if !x.is_finite() {
                    return Err(Error::InvalidParameter("shift must be finite".into()));
                }
                of.validate()
            }
            EnsembleSpec::Scale { alpha, of } => {
                if !alpha.is_finite() || alpha.norm() == 0.0 {
                    return Err(Error::DegenerateScale);
                }
                of.validate()
            }
            EnsembleSpec::Sum(terms) => {
                if terms.is_empty() {
                    return Err(Error::InvalidParameter("sum needs at least one term".into()));
                }
                terms.iter().try_for_each(|t| t.validate())
            }
            EnsembleSpec::Product(a, b) => {
                a.validate()?;
                b.validate()
            }
        }
    }

    /// Law of a product-free tree: sums of independent elliptic matrices
    /// stay elliptic, and so do shifts and scalings.
    fn elliptic_law(&self) -> Result<EllipticLaw> {
        match self {
            EnsembleSpec::Elliptic(l) => Ok(*l),
            EnsembleSpec::Gue => Ok(EllipticLaw::gue()),
            EnsembleSpec::Ginibre => Ok(EllipticLaw::ginibre()),
            EnsembleSpec::Shift { x, of } => scale_shift_law(&of.elliptic_law()?, C64::new(1.0, 0.0), *x),
            EnsembleSpec::Scale { alpha, of } => scale_shift_law(&of.elliptic_law()?, *alpha, C64::new(0.0, 0.0)),
            EnsembleSpec::Sum(terms) => {
                let mut acc = terms
                    .first()
                    .ok_or_else(|| Error::InvalidParameter("sum needs at least one term".into()))?
                    .elliptic_law()?;
                for t in &terms[1..] {
                    acc = add_elliptic(&acc, &t.elliptic_law()?);
                }
                Ok(acc)
            }
            EnsembleSpec::Product(..) => {
                Err(Error::Unsupported("products inside sums or shifts have no theory model".into()))
            }
        }
    }

    pub fn theory(&self) -> Result<TheoryModel> {
        self.validate()?;
        match self {
            EnsembleSpec::Product(a, b) => Ok(TheoryModel::Product(ProductLaw::new(a.elliptic_law()?, b.elliptic_law()?)?)),
            EnsembleSpec::Scale { alpha, of } => match of.theory()? {
                TheoryModel::Elliptic(l) => Ok(TheoryModel::Elliptic(scale_shift_law(&l, *alpha, C64::new(0.0, 0.0))?)),
                TheoryModel::Product(p) => {
                    let a = scale_shift_law(&p.a, *alpha, C64::new(0.0, 0.0))?;
                    Ok(TheoryModel::Product(ProductLaw::new(a, p.b)?))
                }
            },
            _ => {
                let l = self.elliptic_law()?;
                if l.is_deterministic() {
                    return Err(Error::InvalidParameter("deterministic spec has no density".into()));
                }
                Ok(TheoryModel::Elliptic(l))
            }
        }
    }
}

impl TheoryModel {
    pub fn density(&self, grid: &GridSpec) -> Result<DensityGrid> {
        match self {
            TheoryModel::Elliptic(l) => density_field(l, grid),
            TheoryModel::Product(p) => product_density_field(p, grid),
        }
    }

    /// Support boundary with `n` samples. For products only the branches
    /// that separate the interior from the exterior are returned.
    pub fn contour(&self, n: usize) -> Result<ContourCurve> {
        match self {
            TheoryModel::Elliptic(l) => Ok(elliptic_contour(l, n)),
            TheoryModel::Product(p) => Ok(physical_branches(p, &product_contour(p, n)?)),
        }
    }
}

/// Standardized GUE draw: off-diagonal entries complex with variance `1/N`,
/// diagonal real with variance `1/N`.
pub fn sample_gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut h = CMatrix::zeros(n, n);
    let off = (0.5 / n as f64).sqrt();
    let diag = (1.0 / n as f64).sqrt();
    for j in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        h[(j, j)] = C64::new(diag * d, 0.0);
        for i in 0..j {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            let v = C64::new(off * a, off * b);
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    h
}

/// `X = x𝟙 + e^{iφ}(σ₁H₁ + iσ₂H₂)`; a GUE factor whose weight is exactly
/// zero is not drawn.
pub fn sample_elliptic<R: Rng + ?Sized>(law: &EllipticLaw, n: usize, rng: &mut R) -> CMatrix {
    let (s1, s2) = (law.sigma1(), law.sigma2());
    let rot = C64::from_polar(1.0, law.phi);
    let mut x = CMatrix::zeros(n, n);
    if s1 != 0.0 {
        x += sample_gue(n, rng) * C64::new(s1, 0.0);
    }
    if s2 != 0.0 {
        x += sample_gue(n, rng) * C64::new(0.0, s2);
    }
    if rot != C64::new(1.0, 0.0) {
        x *= rot;
    }
    for i in 0..n {
        x[(i, i)] += law.x;
    }
    x
}

/// One draw of the tree, every leaf independent.
pub fn sample_spec<R: Rng + ?Sized>(spec: &EnsembleSpec, n: usize, rng: &mut R) -> CMatrix {
    match spec {
        EnsembleSpec::Elliptic(l) => sample_elliptic(l, n, rng),
        EnsembleSpec::Gue => sample_gue(n, rng),
        EnsembleSpec::Ginibre => sample_elliptic(&EllipticLaw::ginibre(), n, rng),
        EnsembleSpec::Shift { x, of } => {
            let mut m = sample_spec(of, n, rng);
            for i in 0..n {
                m[(i, i)] += *x;
            }
            m
        }
        EnsembleSpec::Scale { alpha, of } => sample_spec(of, n, rng) * *alpha,
        EnsembleSpec::Sum(terms) => {
            let mut acc = CMatrix::zeros(n, n);
            for t in terms {
                acc += sample_spec(t, n, rng);
            }
            acc
        }
        EnsembleSpec::Product(a, b) => {
            let ma = sample_spec(a, n, rng);
            let mb = sample_spec(b, n, rng);
            ma * mb
        }
    }
}

/// Generator for repetition `rep` of a run seeded with `seed`.
pub fn rep_rng(seed: u64, rep: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

/// The `reps` matrices of a run, in repetition order.
pub fn sample_matrices(spec: &EnsembleSpec, n: usize, reps: usize, seed: u64) -> Result<Vec<CMatrix>> {
    check_size(spec, n, reps)?;
    Ok((0..reps).into_par_iter().map(|rep| sample_spec(spec, n, &mut rep_rng(seed, rep))).collect())
}

fn check_size(spec: &EnsembleSpec, n: usize, reps: usize) -> Result<()> {
    spec.validate()?;
    if n < 2 || reps == 0 {
        return Err(Error::InvalidParameter(format!("need N ≥ 2 and reps ≥ 1, got N = {n}, reps = {reps}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub spec: EnsembleSpec,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    /// `N` eigenvalues per repetition, repetition-major.
    pub eigenvalues: Vec<C64>,
}

impl SampleBatch {
    pub fn generate(spec: &EnsembleSpec, n: usize, reps: usize, seed: u64) -> Result<Self> {
        check_size(spec, n, reps)?;
        let per_rep: Vec<Vec<C64>> = (0..reps)
            .into_par_iter()
            .map(|rep| eigenvalues(&sample_spec(spec, n, &mut rep_rng(seed, rep))))
            .collect::<Result<_>>()?;
        let eigenvalues = per_rep.into_iter().flatten().collect();
        Ok(SampleBatch { spec: spec.clone(), n, reps, seed, eigenvalues })
    }

    pub fn rep(&self, r: usize) -> &[C64] {
        &self.eigenvalues[r * self.n..(r + 1) * self.n]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    X,
    Adjoint,
}

/// Parses a word over `X` and `X†` (`X*` is accepted for `X†`).
pub fn parse_word(word: &str) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    let mut chars = word.chars().filter(|c| !c.is_whitespace()).peekable();
    while let Some(c) = chars.next() {
        if c != 'X' {
            return Err(Error::InvalidWord(format!("unexpected {c:?} in {word:?}")));
        }
        if matches!(chars.peek(), Some('†') | Some('*')) {
            chars.next();
            out.push(Letter::Adjoint);
        } else {
            out.push(Letter::X);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidWord("empty word".into()));
    }
    Ok(out)
}

/// `⟨(1/N) Tr w(X, X†)⟩` over the batch.
pub fn mixed_moment(batch: &[CMatrix], word: &str) -> Result<C64> {
    let letters = parse_word(word)?;
    if batch.is_empty() {
        return Err(Error::InvalidParameter("empty batch".into()));
    }
    let total: C64 = batch
        .iter()
        .map(|x| {
            let adj = x.adjoint();
            let pick = |l: &Letter| if *l == Letter::X { x } else { &adj };
            let mut m = pick(&letters[0]).clone();
            for l in &letters[1..] {
                m = &m * pick(l);
            }
            m.trace() / x.nrows() as f64
        })
        .sum();
    Ok(total / batch.len() as f64)
}

/// Counts per cell divided by `(number of points) × (cell area)`, so that
/// the field integrates to the fraction of points inside the grid.
pub fn histogram_density(eigs: &[C64], grid: &GridSpec) -> Result<DensityGrid> {
    grid.validate()?;
    let mut counts = vec![0usize; grid.len()];
    for &z in eigs {
        if let Some((ix, iy)) = grid.locate(z) {
            counts[grid.index(ix, iy)] += 1;
        }
    }
    let norm = if eigs.is_empty() { 0.0 } else { 1.0 / (eigs.len() as f64 * grid.cell_area()) };
    Ok(DensityGrid {
        grid: *grid,
        values: counts.iter().map(|&c| c as f64 * norm).collect(),
        valid: vec![true; grid.len()],
        max_imag: 0.0,
        unsolved: 0,
    })
}

/// Dilation of the support used for coverage.
pub const COVERAGE_DILATION: f64 = 0.05;
/// Cells enter the density error only with at least this many expected
/// eigenvalues.
pub const MIN_EXPECTED_COUNT: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonReport {
    pub coverage: f64,
    pub l1_error: f64,
    pub mass_theory: f64,
    pub mass_empirical: f64,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
}

/// Mean `|ρ_emp − ρ_theory|` over valid theory cells whose expected count
/// among `total` points is at least [`MIN_EXPECTED_COUNT`]; zero when no
/// cell qualifies.
pub fn density_l1(theory: &DensityGrid, empirical: &DensityGrid, total: usize) -> Result<f64> {
    if theory.grid != empirical.grid {
        return Err(Error::InvalidParameter("density grids differ".into()));
    }
    let area = theory.grid.cell_area();
    let (mut sum, mut cells) = (0.0, 0usize);
    for i in 0..theory.values.len() {
        if theory.valid[i] && theory.values[i] * area * total as f64 >= MIN_EXPECTED_COUNT {
            sum += (empirical.values[i] - theory.values[i]).abs();
            cells += 1;
        }
    }
    Ok(if cells == 0 { 0.0 } else { sum / cells as f64 })
}

/// Where eigenvalues are expected: the region bounded by a contour, or the
/// cells of positive theory density when no contour is known.
pub enum Support<'a> {
    Region(SupportRegion),
    Cells(&'a DensityGrid),
}

impl Support<'_> {
    pub fn contains_dilated(&self, z: C64, delta: f64) -> bool {
        match self {
            Support::Region(r) => r.contains_dilated(z, delta),
            Support::Cells(d) => {
                let g = &d.grid;
                let reach = delta + 0.5 * g.dx().hypot(g.dy());
                let span = |lo: f64, step: f64, c: f64, n: usize| {
                    let a = ((c - reach - lo) / step).floor().max(0.0) as usize;
                    let b = (((c + reach - lo) / step).ceil().max(0.0) as usize).min(n);
                    a..b
                };
                let xs = span(g.x_min, g.dx(), z.re, g.nx);
                span(g.y_min, g.dy(), z.im, g.ny).any(|iy| {
                    xs.clone().any(|ix| {
                        let i = g.index(ix, iy);
                        d.valid[i] && d.values[i] > 0.0 && (g.center(ix, iy) - z).norm() <= reach
                    })
                })
            }
        }
    }
}

pub fn compare(theory: &DensityGrid, contour: Option<&ContourCurve>, batch: &SampleBatch) -> Result<ComparisonReport> {
    let support = match contour {
        Some(c) => Support::Region(c.region()),
        None => Support::Cells(theory),
    };
    compare_with(theory, &support, batch)
}

pub fn compare_with(theory: &DensityGrid, support: &Support, batch: &SampleBatch) -> Result<ComparisonReport> {
    let eigs = &batch.eigenvalues;
    let hist = histogram_density(eigs, &theory.grid)?;
    let inside = eigs.par_iter().filter(|&&z| support.contains_dilated(z, COVERAGE_DILATION)).count();
    Ok(ComparisonReport {
        coverage: if eigs.is_empty() { 0.0 } else { inside as f64 / eigs.len() as f64 },
        l1_error: density_l1(theory, &hist, eigs.len())?,
        mass_theory: theory.mass(),
        mass_empirical: hist.mass(),
        n: batch.n,
        reps: batch.reps,
        seed: batch.seed,
    })
}

/// One-dimensional histogram of `values` on `bins` equal bins of
/// `[lo, hi)`, normalised by the total number of values.
pub fn histogram_1d(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    let width = (hi - lo) / bins as f64;
    for &v in values {
        let k = ((v - lo) / width).floor();
        if k >= 0.0 && (k as usize) < bins {
            h[k as usize] += 1.0;
        }
    }
    let norm = 1.0 / (values.len().max(1) as f64 * width);
    h.iter_mut().for_each(|x| *x *= norm);
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gue_is_hermitian_and_standardized() {
        let mut rng = rep_rng(7, 0);
        let h = sample_gue(64, &mut rng);
        assert_eq!(h, h.adjoint());
        let law = EllipticLaw::gue();
        let x = sample_elliptic(&law, 32, &mut rng);
        assert_eq!(x, x.adjoint());
    }

    #[test]
    fn batches_are_reproducible() {
        let spec = EnsembleSpec::product(EnsembleSpec::shift(C64::new(1.0, 0.0), EnsembleSpec::Ginibre), EnsembleSpec::Gue);
        let a = SampleBatch::generate(&spec, 12, 5, 99).unwrap();
        let b = SampleBatch::generate(&spec, 12, 5, 99).unwrap();
        assert_eq!(a, b);
        let c = SampleBatch::generate(&spec, 12, 5, 100).unwrap();
        assert_ne!(a.eigenvalues, c.eigenvalues);
        assert_eq!(a.rep(3).len(), 12);
    }

    #[test]
    fn words() {
        assert_eq!(parse_word("XX†").unwrap(), vec![Letter::X, Letter::Adjoint]);
        assert_eq!(parse_word("X*X").unwrap(), vec![Letter::Adjoint, Letter::X]);
        assert!(matches!(parse_word(""), Err(Error::InvalidWord(_))));
        assert!(parse_word("XY").is_err());
    }

    #[test]
    fn moment_of_fixed_matrix() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 2.0), C64::new(0.0, 0.0), C64::new(3.0, 0.0)]);
        // (1/2) Tr M M† = (1 + 4 + 9)/2
        let v = mixed_moment(std::slice::from_ref(&m), "XX†").unwrap();
        assert!((v - C64::new(7.0, 0.0)).norm() < 1e-14);
        let t = mixed_moment(&[m], "X").unwrap();
        assert!((t - C64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn single_cell_histogram() {
        let g = GridSpec::new(0.0, 1.0, 0.0, 1.0, 4, 4).unwrap();
        let pts = vec![C64::new(0.3, 0.6); 10];
        let h = histogram_density(&pts, &g).unwrap();
        let (ix, iy) = g.locate(pts[0]).unwrap();
        assert!((h.value_at(ix, iy) - 1.0 / g.cell_area()).abs() < 1e-12);
        assert!((h.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theory_models() {
        let s = EnsembleSpec::Sum(vec![EnsembleSpec::Ginibre, EnsembleSpec::Gue]);
        match s.theory().unwrap() {
            TheoryModel::Elliptic(l) => {
                assert!((l.sigma * l.sigma - 2.0).abs() < 1e-14);
                assert!((l.mu - 0.5).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
        let p = EnsembleSpec::scale(C64::new(2.0, 0.0), EnsembleSpec::product(EnsembleSpec::Ginibre, EnsembleSpec::Ginibre));
        assert!(matches!(p.theory().unwrap(), TheoryModel::Product(pl) if (pl.a.sigma - 2.0).abs() < 1e-15));
        let bad = EnsembleSpec::shift(C64::new(1.0, 0.0), EnsembleSpec::product(EnsembleSpec::Gue, EnsembleSpec::Gue));
        assert!(matches!(bad.theory(), Err(Error::Unsupported(_))));
        assert!(EnsembleSpec::Sum(vec![]).validate().is_err());
        assert!(matches!(EnsembleSpec::scale(C64::new(0.0, 0.0), EnsembleSpec::Gue).validate(), Err(Error::DegenerateScale)));
    }
}
