//! Fractional Poisson point process on a box window, sampled through the
//! mixture `τ ~ ν_β`, `N | τ ~ Poisson(τσ(Λ))`, points i.i.d. `σ/σ(Λ)`.

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::appell::DiscretizedIntensity;
use crate::error::{Error, Result};
use crate::fpm1d::poisson_draw;
use crate::specfun::{mittag_leffler, sample_nu_beta, Beta, PrecisionBudget};

/// Dimension cap for windows.
pub const MAX_DIM: usize = 8;
/// Cap on the number of partition cells.
pub const MAX_CELLS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intensity {
    /// `σ = c·Lebesgue` on the window.
    Density(f64),
    /// Piecewise-constant σ given by its mass on each cell (row-major).
    CellMasses(Vec<f64>),
}

/// A box `Λ = Π [lower_i, upper_i)` split into a regular grid of cells,
/// indexed row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    lower: Vec<f64>,
    upper: Vec<f64>,
    cells: Vec<usize>,
    masses: Vec<f64>,
}

impl Window {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, cells: Vec<usize>, intensity: Intensity) -> Result<Self> {
        let d = lower.len();
        if d == 0 || d > MAX_DIM {
            return Err(Error::invalid(format!("window dimension must be 1..={MAX_DIM}, got {d}")));
        }
        if upper.len() != d || cells.len() != d {
            return Err(Error::shape("corners and cell counts must have the window dimension"));
        }
        for i in 0..d {
            if !(lower[i].is_finite() && upper[i].is_finite() && upper[i] > lower[i]) {
                return Err(Error::invalid(format!("axis {i}: need finite lower < upper")));
            }
        }
        let mut n = 1usize;
        for &c in &cells {
            if c == 0 {
                return Err(Error::invalid("every axis needs at least one cell"));
            }
            n = n
                .checked_mul(c)
                .filter(|&v| v <= MAX_CELLS)
                .ok_or_else(|| Error::invalid(format!("at most {MAX_CELLS} cells")))?;
        }
        let vol: f64 = lower.iter().zip(&upper).map(|(a, b)| b - a).product();
        let masses = match intensity {
            Intensity::Density(c) => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::invalid(format!("density must be positive, got {c}")));
                }
                vec![c * vol / n as f64; n]
            }
            Intensity::CellMasses(m) => {
                if m.len() != n {
                    return Err(Error::shape(format!("expected {n} cell masses, got {}", m.len())));
                }
                if m.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(Error::invalid("cell masses must be finite and nonnegative"));
                }
                m
            }
        };
        let total: f64 = masses.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::invalid("σ(Λ) must be positive"));
        }
        Ok(Self {
            lower,
            upper,
            cells,
            masses,
        })
    }

    /// Unit-density-free shortcut: the box `[0,1)^d` with the given total mass
    /// spread evenly over `cells`.
    pub fn unit_box(d: usize, cells_per_axis: usize, total: f64) -> Result<Self> {
        Self::new(vec![0.0; d], vec![1.0; d], vec![cells_per_axis; d], Intensity::Density(total))
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn cell_masses(&self) -> &[f64] {
        &self.masses
    }

    /// `σ(Λ)`.
    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (a, b))| *v >= *a && *v < *b)
    }

    /// Row-major cell index of `x`, or `None` outside the window.
    pub fn cell_of(&self, x: &[f64]) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let mut idx = 0;
        for i in 0..self.dim() {
            let width = (self.upper[i] - self.lower[i]) / self.cells[i] as f64;
            let c = (((x[i] - self.lower[i]) / width) as usize).min(self.cells[i] - 1);
            idx = idx * self.cells[i] + c;
        }
        Some(idx)
    }

    /// Corners of cell `j`.
    pub fn cell_bounds(&self, j: usize) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut digits = vec![0; d];
        let mut rem = j;
        for i in (0..d).rev() {
            digits[i] = rem % self.cells[i];
            rem /= self.cells[i];
        }
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for i in 0..d {
            let width = (self.upper[i] - self.lower[i]) / self.cells[i] as f64;
            lo.push(self.lower[i] + digits[i] as f64 * width);
            hi.push(if digits[i] + 1 == self.cells[i] {
                self.upper[i]
            } else {
                self.lower[i] + (digits[i] + 1) as f64 * width
            });
        }
        (lo, hi)
    }

    /// The per-bin masses as the intensity of the algebra modules.
    pub fn discretized(&self) -> Result<DiscretizedIntensity> {
        DiscretizedIntensity::new(self.masses.clone())
    }
}

/// A finite point set in the window.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Configuration {
    pub points: Vec<Vec<f64>>,
}

impl Configuration {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("configurations serialize")
    }

    /// One JSON line `{"points": [[x, y, ..], ..]}`; every point must have
    /// `dim` finite coordinates.
    pub fn from_json_line(line: &str, dim: Option<usize>) -> Result<Self> {
        let c: Configuration = serde_json::from_str(line).map_err(|e| Error::Decode(e.to_string()))?;
        let d = dim.or_else(|| c.points.first().map(|p| p.len()));
        for p in &c.points {
            if Some(p.len()) != d || p.is_empty() || p.len() > MAX_DIM {
                return Err(Error::Decode("points have inconsistent dimension".into()));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::Decode("non-finite coordinate".into()));
            }
        }
        Ok(c)
    }

    /// Blank lines are skipped; the first point fixes the dimension.
    pub fn from_jsonl(text: &str) -> Result<Vec<Self>> {
        let mut dim = None;
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let c = Self::from_json_line(line, dim)
                .map_err(|e| Error::Decode(format!("line {}: {e}", i + 1)))?;
            if dim.is_none() {
                dim = c.points.first().map(|p| p.len());
            }
            out.push(c);
        }
        Ok(out)
    }
}

/// `τ ~ ν_β`, then the conditional Poisson configuration.
pub fn sample_configuration<R: Rng + ?Sized>(win: &Window, beta: Beta, rng: &mut R) -> Configuration {
    let tau = sample_nu_beta(beta, rng);
    sample_given_tau(win, tau, rng)
}

fn sample_given_tau<R: Rng + ?Sized>(win: &Window, tau: f64, rng: &mut R) -> Configuration {
    let n = poisson_draw(tau * win.total_mass(), rng);
    let pick = WeightedIndex::new(win.cell_masses()).expect("masses were validated");
    let mut points = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let (lo, hi) = win.cell_bounds(pick.sample(rng));
        let p = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| {
                let x = a + rng.random::<f64>() * (b - a);
                // guard against rounding onto the open upper face
                if x < *b { x } else { *a }
            })
            .collect();
        points.push(p);
    }
    Configuration { points }
}

/// `N_{B_j}(γ)` for every cell `B_j`. Points outside the window are an error.
pub fn bin_counts(gamma: &Configuration, win: &Window) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; win.bins()];
    for p in &gamma.points {
        let j = win
            .cell_of(p)
            .ok_or_else(|| Error::domain(format!("point {p:?} lies outside the window")))?;
        counts[j] += 1;
    }
    Ok(counts)
}

/// `|γ ∩ B|` for a sub-box `B = Π [lo_i, hi_i)`.
pub fn count_in_box(gamma: &Configuration, lo: &[f64], hi: &[f64]) -> u64 {
    gamma
        .points
        .iter()
        .filter(|p| p.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v < b))
        .count() as u64
}

/// `⟨γ, φ⟩ = Σ_j N_{B_j}(γ) φ_j` for a step function `φ`.
pub fn step_pairing(counts: &[u64], phi: &[f64]) -> f64 {
    counts.iter().zip(phi).map(|(c, f)| *c as f64 * f).sum()
}

/// Sample mean of `exp(i⟨γ,φ⟩)` with separate standard errors for the real
/// and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharEstimate {
    pub mean: Complex64,
    pub se_re: f64,
    pub se_im: f64,
    pub samples: usize,
}

impl CharEstimate {
    /// Largest of the two per-component deviations in units of SE. A
    /// component with zero SE must match exactly.
    pub fn z_score(&self, exact: Complex64) -> f64 {
        let z = |d: f64, se: f64| {
            if se > 0.0 {
                d.abs() / se
            } else if d.abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        };
        z(self.mean.re - exact.re, self.se_re).max(z(self.mean.im - exact.im, self.se_im))
    }
}

pub fn empirical_char_functional(samples: &[Configuration], win: &Window, phi: &[f64]) -> Result<CharEstimate> {
    if phi.len() != win.bins() {
        return Err(Error::shape(format!("φ has {} values for {} cells", phi.len(), win.bins())));
    }
    if samples.is_empty() {
        return Err(Error::invalid("need at least one sample"));
    }
    let mut vals = Vec::with_capacity(samples.len());
    for g in samples {
        let t = step_pairing(&bin_counts(g, win)?, phi);
        vals.push(Complex64::new(t.cos(), t.sin()));
    }
    Ok(char_estimate(&vals))
}

pub(crate) fn char_estimate(vals: &[Complex64]) -> CharEstimate {
    let n = vals.len() as f64;
    let mean: Complex64 = vals.iter().sum::<Complex64>() / n;
    let (mut vr, mut vi) = (0.0, 0.0);
    for v in vals {
        vr += (v.re - mean.re).powi(2);
        vi += (v.im - mean.im).powi(2);
    }
    let denom = (n - 1.0).max(1.0);
    CharEstimate {
        mean,
        se_re: (vr / denom / n).sqrt(),
        se_im: (vi / denom / n).sqrt(),
        samples: vals.len(),
    }
}

/// `E_β(Σ_j σ_j (e^{iφ_j} − 1))`.
pub fn char_functional_exact(win: &Window, beta: Beta, phi: &[f64], budget: &PrecisionBudget) -> Result<Complex64> {
    if phi.len() != win.bins() {
        return Err(Error::shape("φ must have one value per cell"));
    }
    let z: Complex64 = win
        .cell_masses()
        .iter()
        .zip(phi)
        .map(|(s, f)| (Complex64::new(0.0, *f).exp() - 1.0) * *s)
        .sum();
    mittag_leffler(beta, z, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn beta(v: f64) -> Beta {
        Beta::new(v).unwrap()
    }

    #[test]
    fn window_validation() {
        assert!(Window::unit_box(2, 2, 1.0).is_ok());
        assert!(Window::unit_box(0, 2, 1.0).is_err());
        assert!(Window::unit_box(2, 0, 1.0).is_err());
        assert!(Window::unit_box(2, 2, 0.0).is_err());
        assert!(Window::new(vec![0.0], vec![0.0], vec![1], Intensity::Density(1.0)).is_err());
        assert!(Window::new(vec![0.0], vec![1.0], vec![2], Intensity::CellMasses(vec![1.0])).is_err());
        assert!(Window::new(vec![0.0], vec![1.0], vec![2], Intensity::CellMasses(vec![0.0, 0.0])).is_err());
    }

    #[test]
    fn cells_are_row_major() {
        let w = Window::new(vec![0.0, 0.0], vec![2.0, 3.0], vec![2, 3], Intensity::Density(0.5)).unwrap();
        assert_eq!(w.bins(), 6);
        assert_eq!(w.total_mass(), 3.0);
        assert_eq!(w.cell_of(&[0.5, 2.5]), Some(2));
        assert_eq!(w.cell_of(&[1.5, 0.5]), Some(3));
        assert_eq!(w.cell_of(&[2.0, 0.5]), None);
        for j in 0..6 {
            let (lo, hi) = w.cell_bounds(j);
            let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
            assert_eq!(w.cell_of(&mid), Some(j));
        }
    }

    #[test]
    fn bin_count_examples() {
        let w = Window::unit_box(2, 2, 1.0).unwrap();
        assert_eq!(bin_counts(&Configuration::default(), &w).unwrap(), vec![0; 4]);
        let one = Configuration { points: vec![vec![0.7, 0.2]] };
        assert_eq!(bin_counts(&one, &w).unwrap(), vec![0, 0, 1, 0]);
        let outside = Configuration { points: vec![vec![1.5, 0.2]] };
        assert!(bin_counts(&outside, &w).is_err());
        let g = Configuration {
            points: vec![vec![0.1, 0.1], vec![0.9, 0.9], vec![0.2, 0.3]],
        };
        let phi = [0.5, -1.0, 2.0, 3.0];
        let direct: f64 = g.points.iter().map(|p| phi[w.cell_of(p).unwrap()]).sum();
        assert_eq!(step_pairing(&bin_counts(&g, &w).unwrap(), &phi), direct);
    }

    #[test]
    fn samples_stay_inside_and_counts_add_up() {
        let w = Window::new(vec![-1.0, 2.0], vec![1.0, 2.5], vec![2, 1], Intensity::CellMasses(vec![3.0, 0.5])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let g = sample_configuration(&w, beta(0.7), &mut rng);
            assert!(g.points.iter().all(|p| w.contains(p)));
            assert_eq!(bin_counts(&g, &w).unwrap().iter().sum::<u64>(), g.len() as u64);
        }
    }

    #[test]
    fn char_functional_at_zero_is_one() {
        let w = Window::unit_box(1, 3, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s: Vec<_> = (0..50).map(|_| sample_configuration(&w, beta(0.5), &mut rng)).collect();
        let e = empirical_char_functional(&s, &w, &[0.0; 3]).unwrap();
        assert_eq!(e.mean, Complex64::new(1.0, 0.0));
        assert_eq!(e.z_score(Complex64::new(1.0, 0.0)), 0.0);
        let exact = char_functional_exact(&w, beta(0.5), &[0.0; 3], &PrecisionBudget::default()).unwrap();
        assert_eq!(exact, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn poisson_case_char_functional() {
        let w = Window::unit_box(2, 2, 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s: Vec<_> = (0..20_000).map(|_| sample_configuration(&w, beta(1.0), &mut rng)).collect();
        let phi = [0.3, -0.8, 1.0, 0.1];
        let e = empirical_char_functional(&s, &w, &phi).unwrap();
        let z: Complex64 = phi.iter().map(|f| (Complex64::new(0.0, *f).exp() - 1.0) * 0.375).sum();
        assert!(e.z_score(z.exp()) < 4.0);
    }

    #[test]
    fn jsonl_roundtrip_and_rejects() {
        let g = Configuration {
            points: vec![vec![0.1, 0.25], vec![1.0 / 3.0, 0.0]],
        };
        let text = format!("{}\n\n{}\n", g.to_json_line(), Configuration::default().to_json_line());
        let back = Configuration::from_jsonl(&text).unwrap();
        assert_eq!(back, vec![g, Configuration::default()]);
        assert!(Configuration::from_jsonl("{\"points\":[[1.0],[1.0,2.0]]}").is_err());
        assert!(Configuration::from_jsonl("{\"points\":[[1.0]]}\n{\"points\":[[1.0,2.0]]}").is_err());
        assert!(Configuration::from_jsonl("{\"points\":[],\"x\":1}").is_err());
        assert!(Configuration::from_jsonl("[").is_err());
    }
}
