//! Dense complex linear algebra: eigenvalues of general matrices and
//! polynomial roots through companion matrices.
//!
//! The eigenvalue path is balancing, Householder reduction to upper
//! Hessenberg form, then single-shift implicit QR sweeps with Wilkinson
//! shifts and the Ahues–Tisseur deflation test.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

pub type CMatrix = DMatrix<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Sweeps allowed per deflation before giving up.
const MAX_SWEEPS_PER_BLOCK: usize = 300;
const EXCEPTIONAL_EVERY: usize = 10;

#[inline]
fn abs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Column-major scratch copy used by the QR iteration.
struct Work {
    n: usize,
    a: Vec<C64>,
}

impl Work {
    #[inline]
    fn at(&self, i: usize, j: usize) -> C64 {
        self.a[i + j * self.n]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: C64) {
        self.a[i + j * self.n] = v;
    }

    #[inline]
    fn col_mut(&mut self, j: usize) -> &mut [C64] {
        let n = self.n;
        &mut self.a[j * n..(j + 1) * n]
    }
}

/// All eigenvalues of a square complex matrix, in the order they deflate.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
    }
    if m.iter().any(|z| !z.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let mut w = Work { n, a: m.as_slice().to_vec() };
    balance(&mut w);
    hessenberg(&mut w);
    hessenberg_qr(&mut w)
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable.
fn balance(w: &mut Work) {
    let n = w.n;
    if n < 2 {
        return;
    }
    const RADIX: f64 = 2.0;
    let mut converged = false;
    let mut guard = 0;
    while !converged && guard < 100 {
        converged = true;
        guard += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(w.at(j, i));
                    r += abs1(w.at(i, j));
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let mut rr = r;
            while cc < rr / RADIX {
                cc *= RADIX;
                rr /= RADIX;
                f *= RADIX;
            }
            while cc >= rr * RADIX {
                cc /= RADIX;
                rr *= RADIX;
                f /= RADIX;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                let g = 1.0 / f;
                for j in 0..n {
                    let v = w.at(i, j) * g;
                    w.set(i, j, v);
                }
                for v in w.col_mut(i) {
                    *v *= f;
                }
            }
        }
    }
}

/// In-place unitary reduction to upper Hessenberg form with Householder
/// reflectors `H = I − τ v v†`.
fn hessenberg(w: &mut Work) {
    let n = w.n;
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut acc = vec![ZERO; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let alpha = w.at(k + 1, k);
        let xnorm = (k + 2..n).map(|i| w.at(i, k).norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 && alpha.im == 0.0 {
            continue;
        }
        let mut beta = (alpha.norm_sqr() + xnorm * xnorm).sqrt();
        if alpha.re >= 0.0 {
            beta = -beta;
        }
        let tau = C64::new((beta - alpha.re) / beta, -alpha.im / beta);
        let scale = C64::new(1.0, 0.0) / (alpha - beta);
        v[0] = C64::new(1.0, 0.0);
        for i in 1..len {
            v[i] = w.at(k + 1 + i, k) * scale;
        }
        w.set(k + 1, k, C64::new(beta, 0.0));
        for i in k + 2..n {
            w.set(i, k, ZERO);
        }

        // A ← A (I − τ v v†) on columns k+1..n
        acc.iter_mut().for_each(|a| *a = ZERO);
        for j in 0..len {
            let vj = v[j];
            let col = &w.a[(k + 1 + j) * n..(k + 2 + j) * n];
            for (a, &x) in acc.iter_mut().zip(col) {
                *a += x * vj;
            }
        }
        for j in 0..len {
            let f = tau * v[j].conj();
            let col = w.col_mut(k + 1 + j);
            for (x, &a) in col.iter_mut().zip(acc.iter()) {
                *x -= a * f;
            }
        }

        // A ← (I − τ̄ v v†) A on rows k+1..n, columns k+1..n
        let tau_c = tau.conj();
        for j in k + 1..n {
            let col = &mut w.a[j * n + k + 1..(j + 1) * n];
            let s: C64 = col.iter().zip(v.iter()).map(|(&x, &vi)| vi.conj() * x).sum();
            let f = tau_c * s;
            for (x, &vi) in col.iter_mut().zip(v.iter()) {
                *x -= vi * f;
            }
        }
    }
}

/// Complex Givens rotation `[c s; −s̄ c] [f; g] = [r; 0]` with real `c`.
fn givens(f: C64, g: C64) -> (f64, C64, C64) {
    if g == ZERO {
        return (1.0, ZERO, f);
    }
    if f == ZERO {
        let gn = g.norm();
        return (0.0, g.conj() / gn, C64::new(gn, 0.0));
    }
    let fn_ = f.norm();
    let norm = fn_.hypot(g.norm());
    let phase = f / fn_;
    let c = fn_ / norm;
    let s = phase * g.conj() / norm;
    (c, s, phase * norm)
}

/// Eigenvalues of `[[a, b], [c, d]]`.
fn eig22(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let s = abs1(a).max(abs1(b)).max(abs1(c)).max(abs1(d));
    if s == 0.0 {
        return (ZERO, ZERO);
    }
    let (a, b, c, d) = (a / s, b / s, c / s, d / s);
    let half_tr = (a + d) * 0.5;
    let disc = ((a - half_tr) * (a - half_tr) + b * c).sqrt();
    ((half_tr + disc) * s, (half_tr - disc) * s)
}

fn hessenberg_qr(w: &mut Work) -> Result<Vec<C64>> {
    let n = w.n;
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / eps);

    let mut istop = n;
    let mut sweeps = 0usize;
    while istop > 0 {
        if istop == 1 {
            eig[0] = w.at(0, 0);
            break;
        }

        let mut istart = 0;
        for i in (1..istop).rev() {
            let sub = w.at(i, i - 1);
            if abs1(sub) < smlnum {
                w.set(i, i - 1, ZERO);
                istart = i;
                break;
            }
            let mut tst = abs1(w.at(i - 1, i - 1)) + abs1(w.at(i, i));
            if tst == 0.0 {
                if i >= 2 {
                    tst += w.at(i - 1, i - 2).re.abs();
                }
                if i + 1 < istop {
                    tst += w.at(i + 1, i).re.abs();
                }
            }
            if abs1(sub) <= eps * tst {
                let sup = w.at(i - 1, i);
                let ab = abs1(sub).max(abs1(sup));
                let ba = abs1(sub).min(abs1(sup));
                let diff = w.at(i - 1, i - 1) - w.at(i, i);
                let aa = abs1(w.at(i, i)).max(abs1(diff));
                let bb = abs1(w.at(i, i)).min(abs1(diff));
                let s = aa + ab;
                if ba * (ab / s) <= smlnum.max(eps * (bb * (aa / s))) {
                    w.set(i, i - 1, ZERO);
                    istart = i;
                    break;
                }
            }
        }

        if istart + 1 == istop {
            eig[istop - 1] = w.at(istop - 1, istop - 1);
            istop -= 1;
            sweeps = 0;
            continue;
        }
        if istart + 2 == istop {
            let (l1, l2) = eig22(
                w.at(istart, istart),
                w.at(istart, istart + 1),
                w.at(istart + 1, istart),
                w.at(istart + 1, istart + 1),
            );
            eig[istart] = l1;
            eig[istart + 1] = l2;
            istop -= 2;
            sweeps = 0;
            continue;
        }

        sweeps += 1;
        if sweeps > MAX_SWEEPS_PER_BLOCK {
            return Err(Error::EigenNoConvergence(istop - 1));
        }

        let last = istop - 1;
        let shift = if sweeps % EXCEPTIONAL_EVERY == 0 {
            w.at(last, last) + 0.75 * abs1(w.at(last, last - 1))
        } else {
            let (l1, l2) = eig22(
                w.at(last - 1, last - 1),
                w.at(last - 1, last),
                w.at(last, last - 1),
                w.at(last, last),
            );
            let h = w.at(last, last);
            if (l1 - h).norm() <= (l2 - h).norm() {
                l1
            } else {
                l2
            }
        };

        for i in istart..last {
            let (c, s, r) = if i == istart {
                let (c, s, _) = givens(w.at(i, i) - shift, w.at(i + 1, i));
                (c, s, None)
            } else {
                let (c, s, r) = givens(w.at(i, i - 1), w.at(i + 1, i - 1));
                (c, s, Some(r))
            };
            let jstart = match r {
                Some(r) => {
                    w.set(i, i - 1, r);
                    w.set(i + 1, i - 1, ZERO);
                    i
                }
                None => i,
            };
            for j in jstart..istop {
                let a = w.at(i, j);
                let b = w.at(i + 1, j);
                w.set(i, j, a * c + s * b);
                w.set(i + 1, j, -s.conj() * a + b * c);
            }
            let kend = (i + 3).min(istop);
            for k in istart..kend {
                let a = w.at(k, i);
                let b = w.at(k, i + 1);
                w.set(k, i, a * c + b * s.conj());
                w.set(k, i + 1, -a * s + b * c);
            }
        }
    }
    Ok(eig)
}

/// Eigenvalues of a hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Roots of `Σ c_k x^k` (coefficients lowest order first).
///
/// Leading zero coefficients are dropped; the remaining polynomial is
/// solved through the eigenvalues of its companion matrix and each root is
/// polished by a few Newton steps on the original coefficients.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1] == ZERO {
        deg -= 1;
    }
    if deg <= 1 {
        return Ok(Vec::new());
    }
    let c = &coeffs[..deg];
    let n = deg - 1;
    let lead = c[n];
    let mut comp = CMatrix::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let mut roots = eigenvalues(&comp)?;
    for r in roots.iter_mut() {
        *r = polish_root(c, *r);
    }
    Ok(roots)
}

/// Evaluates the polynomial and its derivative by Horner's scheme.
pub fn poly_eval(c: &[C64], x: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

fn polish_root(c: &[C64], mut x: C64) -> C64 {
    let (mut p, _) = poly_eval(c, x);
    for _ in 0..5 {
        let (_, dp) = poly_eval(c, x);
        if dp == ZERO {
            break;
        }
        let cand = x - p / dp;
        let (pc, _) = poly_eval(c, cand);
        if pc.norm() < p.norm() {
            x = cand;
            p = pc;
        } else {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn diagonal_matrix() {
        let d = [C64::new(1.0, 2.0), C64::new(-3.0, 0.5), C64::new(0.0, 0.0), C64::new(7.0, -1.0)];
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d));
        let ev = sorted(eigenvalues(&m).unwrap());
        assert_eq!(ev, sorted(d.to_vec()));
    }

    #[test]
    fn cube_roots_of_unity() {
        let one = C64::new(1.0, 0.0);
        let roots = poly_roots(&[-one, ZERO, ZERO, one]).unwrap();
        assert_eq!(roots.len(), 3);
        for k in 0..3 {
            let target = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0);
            let best = roots.iter().map(|r| (r - target).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "root {k} off by {best}");
        }
    }

    #[test]
    fn trace_identity_random() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (10, 4), (57, 5), (100, 6)] {
            let m = random_matrix(n, seed);
            let ev = eigenvalues(&m).unwrap();
            let sum: C64 = ev.iter().sum();
            let norm = m.norm();
            assert!((sum - m.trace()).norm() <= 1e-8 * n as f64 * norm, "n={n}");
        }
    }

    #[test]
    fn determinant_identity() {
        let m = random_matrix(12, 99);
        let prod: C64 = eigenvalues(&m).unwrap().iter().product();
        let det = m.determinant();
        assert!((prod - det).norm() <= 1e-9 * det.norm().max(1.0));
    }

    #[test]
    fn hermitian_spectrum_is_real_and_matches_symmetric_solver() {
        let a = random_matrix(40, 8);
        let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        let ev = eigenvalues(&h).unwrap();
        let norm = h.norm();
        assert!(ev.iter().all(|z| z.im.abs() <= 1e-10 * norm));
        let mut re: Vec<f64> = ev.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        let reference = hermitian_eigenvalues(&h);
        for (a, b) in re.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-10 * norm);
        }
    }

    #[test]
    fn adjoint_gives_conjugate_spectrum() {
        let m = random_matrix(30, 21);
        let a = sorted(eigenvalues(&m).unwrap().iter().map(|z| z.conj()).collect());
        let b = sorted(eigenvalues(&m.adjoint()).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-8);
        }
    }

    #[test]
    fn jordan_block_and_nilpotent() {
        let mut m = CMatrix::zeros(5, 5);
        for i in 0..4 {
            m[(i, i + 1)] = C64::new(1.0, 0.0);
        }
        let ev = eigenvalues(&m).unwrap();
        assert!(ev.iter().all(|z| z.norm() < 1e-12));
        let m = CMatrix::zeros(4, 4);
        assert_eq!(eigenvalues(&m).unwrap(), vec![ZERO; 4]);
    }

    #[test]
    fn badly_scaled_matrix() {
        let mut m = random_matrix(8, 44);
        for i in 0..8 {
            for j in 0..8 {
                m[(i, j)] *= 10f64.powi(i as i32 - j as i32);
            }
        }
        let ev = eigenvalues(&m).unwrap();
        let sum: C64 = ev.iter().sum();
        assert!((sum - m.trace()).norm() < 1e-6 * m.trace().norm().max(1.0));
    }

    #[test]
    fn rejects_non_square() {
        assert!(eigenvalues(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn quartic_with_repeated_zero_roots() {
        // r²(r² − 4r + 3)
        let c: Vec<C64> = [0.0, 0.0, 3.0, -4.0, 1.0].iter().map(|&x| C64::new(x, 0.0)).collect();
        let mut re: Vec<f64> = poly_roots(&c).unwrap().iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!(re[0].abs() < 1e-7 && re[1].abs() < 1e-7);
        assert!((re[2] - 1.0).abs() < 1e-12);
        assert!((re[3] - 3.0).abs() < 1e-12);
    }
}
