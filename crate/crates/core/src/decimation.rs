//! Spectral decimation for the gasket Laplacian.
//!
//! Eigenvalues of the probabilistic Laplacian `Δ_p` on `𝔾_ℓ` are generated
//! by pulling `{0, -3/4}` back through `R(z) = z(4z + 5)`. Points are kept on
//! the `Δ_p` scale (nonpositive); [`DecimationSpectrum::combinatorial`] gives
//! the `-4×` view used for `-Δ`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GasketError, Result};
use crate::operators::fmt_f64;

/// Left end of the domain of both inverse branches.
pub const BRANCH_DOMAIN_MIN: f64 = -25.0 / 16.0;

/// Limit of `S_m = Σ_{k<m} (k+1)² / 5^k`.
pub const S_INFINITY: f64 = 75.0 / 32.0;

/// Largest accepted depth for [`free_spectrum_approx`].
pub const MAX_FREE_DEPTH: u32 = 20;

/// Largest iteration count for [`iterate_f_bounds`].
pub const MAX_ITERATION_BOUND: u32 = 60;

/// Points closer than this are merged.
pub const DEDUP_TOLERANCE: f64 = 1e-12;

/// Generation tag for backward-orbit (Julia set) points.
pub const JULIA_GENERATION: i32 = -1;

/// Repelling fixed point of `R` used to seed backward orbits.
pub const JULIA_SEED: f64 = -1.0;

pub fn r(z: f64) -> f64 {
    z * (4.0 * z + 5.0)
}

/// Larger preimage of `x` under `R`.
///
/// Evaluated as `2x / (5 + √(25 + 16x))`, which equals `(-5 + √(25+16x))/8`
/// without the cancellation near `x = 0`.
pub fn f(x: f64) -> Result<f64> {
    check_branch_domain("f", x)?;
    Ok(2.0 * x / (5.0 + (25.0 + 16.0 * x).sqrt()))
}

/// Smaller preimage of `x` under `R`.
pub fn f_lower(x: f64) -> Result<f64> {
    check_branch_domain("f_lower", x)?;
    Ok((-5.0 - (25.0 + 16.0 * x).sqrt()) / 8.0)
}

fn check_branch_domain(function: &'static str, x: f64) -> Result<()> {
    if x >= BRANCH_DOMAIN_MIN && x.is_finite() {
        Ok(())
    } else {
        Err(GasketError::Domain { function, value: x })
    }
}

/// `f^{∘n}(x)`.
pub fn f_iter(x: f64, n: u32) -> Result<f64> {
    (0..n).try_fold(x, |acc, _| f(acc))
}

/// `S_m = Σ_{k=0}^{m-1} (k+1)² / 5^k`.
pub fn partial_s(m: u32) -> f64 {
    // Smallest terms first.
    (0..m).rev().map(|k| ((k + 1) as f64).powi(2) / 5f64.powi(k as i32)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scale {
    /// `Δ_p` eigenvalues, in `[-3/2, 0]`.
    Probabilistic,
    /// `-4×` the probabilistic values, in `[0, 6]`.
    Combinatorial,
}

impl Scale {
    pub fn label(self) -> &'static str {
        match self {
            Scale::Probabilistic => "prob",
            Scale::Combinatorial => "comb",
        }
    }
}

/// Sorted set of decimation points with the preimage depth of each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecimationSpectrum {
    points: Vec<f64>,
    generations: Vec<i32>,
}

impl DecimationSpectrum {
    fn from_tagged(mut tagged: Vec<(f64, i32)>) -> Self {
        tagged.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        let mut points: Vec<f64> = Vec::with_capacity(tagged.len());
        let mut generations: Vec<i32> = Vec::with_capacity(tagged.len());
        for (x, g) in tagged {
            match points.last() {
                Some(&last) if (x - last).abs() <= DEDUP_TOLERANCE => {
                    // Keep the shallowest nonnegative generation.
                    let slot = generations.last_mut().expect("nonempty");
                    if *slot == JULIA_GENERATION || (g != JULIA_GENERATION && g < *slot) {
                        *slot = g;
                    }
                }
                _ => {
                    points.push(x);
                    generations.push(g);
                }
            }
        }
        DecimationSpectrum { points, generations }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Probabilistic-scale points, ascending.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn generations(&self) -> &[i32] {
        &self.generations
    }

    /// Points of the combinatorial view `-4x`, ascending.
    pub fn combinatorial(&self) -> Vec<f64> {
        self.points.iter().rev().map(|x| -4.0 * x).collect()
    }

    pub fn values(&self, scale: Scale) -> Vec<f64> {
        match scale {
            Scale::Probabilistic => self.points.clone(),
            Scale::Combinatorial => self.combinatorial(),
        }
    }

    /// Points with a nonnegative generation (drops backward-orbit points).
    pub fn exact_points(&self) -> Vec<f64> {
        self.points
            .iter()
            .zip(&self.generations)
            .filter(|(_, g)| **g >= 0)
            .map(|(x, _)| *x)
            .collect()
    }

    /// CSV `value,generation,scale`: all probabilistic rows, then all
    /// combinatorial rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,generation,scale\n");
        for (x, g) in self.points.iter().zip(&self.generations) {
            let _ = writeln!(out, "{},{g},prob", fmt_f64(*x));
        }
        for (x, g) in self.points.iter().zip(&self.generations).rev() {
            let _ = writeln!(out, "{},{g},comb", fmt_f64(-4.0 * x));
        }
        out
    }
}

/// Appends both preimages of every point, `depth` times.
fn preimage_tree(roots: &[f64], depth: u32) -> Result<Vec<(f64, i32)>> {
    let mut all: Vec<(f64, i32)> = roots.iter().map(|&x| (x, 0)).collect();
    let mut frontier: Vec<f64> = roots.to_vec();
    for m in 1..=depth {
        let mut next = Vec::with_capacity(2 * frontier.len());
        for &y in &frontier {
            next.push(f(y)?);
            next.push(f_lower(y)?);
        }
        // f(0) = 0 reproduces its parent; drop such fixed points early.
        next.sort_by(f64::total_cmp);
        next.dedup_by(|a, b| (*a - *b).abs() <= DEDUP_TOLERANCE);
        all.extend(next.iter().map(|&x| (x, m as i32)));
        frontier = next;
    }
    Ok(all)
}

/// `σ(Δ_p^{𝔾_ℓ,N}) = {-3/2} ∪ ⋃_{m<ℓ} R^{-m}{0, -3/4}`.
pub fn neumann_spectrum(level: u32) -> Result<DecimationSpectrum> {
    if level == 0 {
        return Err(GasketError::InvalidArguments("neumann spectrum needs level >= 1".into()));
    }
    let mut tagged = preimage_tree(&[0.0, -0.75], level - 1)?;
    tagged.push((-1.5, 0));
    Ok(DecimationSpectrum::from_tagged(tagged))
}

/// `E₁(-Δ_p^{𝔾_ℓ,N}) = -f^{∘(ℓ-1)}(-3/4)`.
pub fn neumann_gap(level: u32) -> Result<f64> {
    if level == 0 {
        return Err(GasketError::InvalidArguments("neumann gap needs level >= 1".into()));
    }
    Ok(-f_iter(-0.75, level - 1)?)
}

/// `E₀(-Δ^{𝔾̃_ℓ}) = -4 f^{∘(ℓ-1)}(-1/2)`.
pub fn dirichlet_ground(level: u32) -> Result<f64> {
    if level == 0 {
        return Err(GasketError::InvalidArguments("dirichlet ground state needs level >= 1".into()));
    }
    Ok(-4.0 * f_iter(-0.5, level - 1)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IterationBound {
    /// `f^{∘m}(x) ≤ x / 5^m`.
    Upper,
    /// `f^{∘m}(x) ≥ 4x / 5^m`.
    Lower,
    /// `f^{∘m}(x) ≥ x (1 - S_m x) / 5^m`.
    Sharp,
    /// `S_m ≤ 75/32`.
    SeriesLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationViolation {
    pub x: f64,
    pub m: u32,
    pub bound: IterationBound,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationBoundsReport {
    pub n: u32,
    pub samples: usize,
    pub checks: usize,
    pub max_partial_s: f64,
    pub violations: Vec<IterationViolation>,
    pub pass: bool,
}

/// Checks the two-sided iteration bounds for every sample and `1 ≤ m ≤ n`.
pub fn iterate_f_bounds(n: u32, samples: &[f64]) -> Result<IterationBoundsReport> {
    if n > MAX_ITERATION_BOUND {
        return Err(GasketError::InvalidArguments(format!("n = {n} exceeds {MAX_ITERATION_BOUND}")));
    }
    if let Some(x) = samples.iter().find(|x| !(-1.0..=0.0).contains(*x)) {
        return Err(GasketError::InvalidArguments(format!("sample {x} outside [-1, 0]")));
    }
    // Rounding slack relative to the bound being tested.
    let slack = |limit: f64| 1e-12 * limit.abs();
    let mut violations = Vec::new();
    let mut checks = 0;
    let mut max_partial_s: f64 = 0.0;
    for m in 1..=n {
        let s = partial_s(m);
        max_partial_s = max_partial_s.max(s);
        checks += 1;
        if s > S_INFINITY + slack(S_INFINITY) {
            violations.push(IterationViolation { x: f64::NAN, m, bound: IterationBound::SeriesLimit, value: s, limit: S_INFINITY });
        }
    }
    for &x in samples {
        let mut y = x;
        for m in 1..=n {
            y = f(y)?;
            let scale = 5f64.powi(-(m as i32));
            let upper = x * scale;
            let lower = 4.0 * x * scale;
            let sharp = x * (1.0 - partial_s(m) * x) * scale;
            for (bound, limit, ok) in [
                (IterationBound::Upper, upper, y <= upper + slack(upper) && y <= 0.0),
                (IterationBound::Lower, lower, y >= lower - slack(lower)),
                (IterationBound::Sharp, sharp, y >= sharp - slack(sharp)),
            ] {
                checks += 1;
                if !ok {
                    violations.push(IterationViolation { x, m, bound, value: y, limit });
                }
            }
        }
    }
    Ok(IterationBoundsReport {
        n,
        samples: samples.len(),
        checks,
        max_partial_s,
        pass: violations.is_empty(),
        violations,
    })
}

/// Finite approximation of `σ(Δ_p) = 𝒟 ∪ 𝒥` on the infinite lattice.
///
/// `𝒟 = {-3/2} ∪ ⋃_{m≤depth} R^{-m}{-3/4}`; `𝒥` is approximated by a
/// backward orbit of `julia_points` random branch choices started at the
/// repelling fixed point `-1`.
pub fn free_spectrum_approx(depth: u32, julia_points: usize, seed: u64) -> Result<DecimationSpectrum> {
    if depth > MAX_FREE_DEPTH {
        return Err(GasketError::InvalidArguments(format!("depth {depth} exceeds {MAX_FREE_DEPTH}")));
    }
    let mut tagged = preimage_tree(&[-0.75], depth)?;
    tagged.push((-1.5, 0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = JULIA_SEED;
    for _ in 0..julia_points {
        z = if rng.random::<bool>() { f(z)? } else { f_lower(z)? };
        tagged.push((z, JULIA_GENERATION));
    }
    Ok(DecimationSpectrum::from_tagged(tagged))
}

/// Largest distance from a point of `a` to the nearest point of `b`, both
/// sorted ascending.
pub fn directed_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if b.is_empty() {
        return f64::INFINITY;
    }
    a.iter()
        .map(|&x| {
            let k = b.partition_point(|&y| y < x);
            let right = b.get(k).map_or(f64::INFINITY, |y| (y - x).abs());
            let left = if k > 0 { (x - b[k - 1]).abs() } else { f64::INFINITY };
            left.min(right)
        })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two sorted point sets.
pub fn set_distance(a: &[f64], b: &[f64]) -> f64 {
    directed_distance(a, b).max(directed_distance(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_values() {
        assert_eq!(r(0.0), 0.0);
        assert_eq!(r(-0.75), -1.5);
        assert_eq!(r(-1.0), -1.0);
    }

    #[test]
    fn f_values_against_closed_forms() {
        assert_eq!(f(0.0).unwrap(), 0.0);
        // (-5 + √13)/8 and (-5 + √17)/8 to 1e-15.
        assert!((f(-0.75).unwrap() - (-0.17430609056700134)).abs() < 1e-15);
        assert!((f(-0.5).unwrap() - (-0.10961179679779243)).abs() < 1e-15);
        assert!(matches!(f(-1.6), Err(GasketError::Domain { .. })));
        assert!(f(BRANCH_DOMAIN_MIN).is_ok());
    }

    #[test]
    fn f_stable_near_zero() {
        // f(x) ≈ x/5 for tiny x; the naive formula returns 0 here.
        let x = -1e-20;
        assert!((f(x).unwrap() / (x / 5.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branches_invert_r() {
        for k in 0..=100 {
            let x = BRANCH_DOMAIN_MIN * k as f64 / 100.0;
            assert!((r(f(x).unwrap()) - x).abs() < 1e-12);
            assert!((r(f_lower(x).unwrap()) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn neumann_level_one_and_two() {
        let s1 = neumann_spectrum(1).unwrap();
        assert_eq!(s1.points(), &[-1.5, -0.75, 0.0]);
        assert_eq!(s1.combinatorial(), vec![0.0, 3.0, 6.0]);
        let s2 = neumann_spectrum(2).unwrap();
        assert_eq!(s2.len(), 6);
        assert_eq!(s2.points()[4], f(-0.75).unwrap());
        assert!(neumann_spectrum(0).is_err());
    }

    #[test]
    fn generations_map_back_to_roots() {
        let s = neumann_spectrum(6).unwrap();
        for (&x, &g) in s.points().iter().zip(s.generations()) {
            let mut y = x;
            for _ in 0..g {
                y = r(y);
            }
            let ok = y.abs() < 1e-9 || (y + 0.75).abs() < 1e-9 || (x + 1.5).abs() < 1e-12;
            assert!(ok, "x={x} g={g} → {y}");
        }
    }

    #[test]
    fn gap_and_ground_closed_forms() {
        assert_eq!(neumann_gap(1).unwrap(), 0.75);
        assert!((neumann_gap(2).unwrap() - (5.0 - 13f64.sqrt()) / 8.0).abs() < 1e-15);
        assert_eq!(dirichlet_ground(1).unwrap(), 2.0);
        assert!((dirichlet_ground(2).unwrap() - (5.0 - 17f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn partial_sums() {
        assert_eq!(partial_s(1), 1.0);
        assert_eq!(partial_s(2), 1.8);
        assert!(partial_s(60) <= S_INFINITY * (1.0 + 1e-15));
        assert!((partial_s(60) - S_INFINITY).abs() < 1e-12);
    }

    #[test]
    fn iteration_bounds_zero_and_range_checks() {
        let rep = iterate_f_bounds(30, &[0.0, -0.75, -1.0]).unwrap();
        assert!(rep.pass, "{:?}", rep.violations);
        assert!(iterate_f_bounds(61, &[0.0]).is_err());
        assert!(iterate_f_bounds(3, &[0.5]).is_err());
    }

    #[test]
    fn free_spectrum_depth_zero() {
        let s = free_spectrum_approx(0, 0, 0).unwrap();
        assert_eq!(s.combinatorial(), vec![3.0, 6.0]);
        let big = free_spectrum_approx(3, 1000, 7).unwrap();
        assert!(big.combinatorial().iter().all(|x| (0.0..=6.0).contains(x)));
        assert!(big.generations().contains(&JULIA_GENERATION));
        assert!(free_spectrum_approx(21, 0, 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let csv = neumann_spectrum(1).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "value,generation,scale");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].ends_with(",0,prob"));
        assert!(lines[4].ends_with(",0,comb"));
    }

    #[test]
    fn hausdorff_distance() {
        assert_eq!(set_distance(&[0.0, 1.0], &[0.0, 1.0]), 0.0);
        assert_eq!(set_distance(&[0.0, 1.0], &[0.0]), 1.0);
    }
}
