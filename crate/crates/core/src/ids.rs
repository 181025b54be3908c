//! Integrated density of states and its low-energy tail.
//!
//! `N(E)` is estimated as the trial average of `𝒩(E; H^{A,bc}) / |A|` over
//! independently sampled potentials. Trial `t` draws its potential from
//! stream `t` of the seed, and results are reduced in trial order, so curves
//! do not depend on thread scheduling.

use std::f64::consts::LN_2;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimation;
use crate::error::{GasketError, Result};
use crate::lattice::{build_ball_with, build_triangle_with, Ambient, Capacity, LatticeRegion, TriangleSpec};
use crate::operators::{
    assemble, fmt_f64, sample_potential_trial, Assembler, BoundaryCondition, PotentialSpec,
};
use crate::spectra::{counting_curve, eigenvalues_dense, DENSE_THRESHOLD};

/// `α = log 3 / log 2`, the volume growth exponent.
pub fn alpha() -> f64 {
    3f64.ln() / LN_2
}

/// `β = log 5 / log 2`, the walk dimension.
pub fn beta() -> f64 {
    5f64.ln() / LN_2
}

/// `τ = α / β = log 3 / log 5`.
pub fn tau() -> f64 {
    3f64.ln() / 5f64.ln()
}

/// Neumann gap constant: `E₁(-Δ^{𝔾_ℓ,N}) ≥ c₀ 5^{-ℓ}`.
pub const TEMPLE_C0: f64 = 15.0 / 2.0;

/// Default fit window.
pub const DEFAULT_WINDOW: (f64, f64) = (1e-3, 5e-2);

/// Minimum number of usable grid points for a fit.
pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdsRegion {
    /// `𝔾_L` in the half lattice.
    Triangle,
    /// `B_L = 𝔾_L ∪ 𝔾_L'` in the full lattice.
    Ball,
}

/// Region used for IDS estimation at `level`.
pub fn ids_region(level: u32, region: IdsRegion, capacity: Capacity) -> Result<LatticeRegion> {
    match region {
        IdsRegion::Triangle => build_triangle_with(TriangleSpec::new(level), Ambient::Half, capacity),
        IdsRegion::Ball => build_ball_with(level, capacity),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdsCurve {
    pub energies: Vec<f64>,
    pub mean: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub trials: usize,
    pub level: u32,
    pub region: IdsRegion,
    pub region_size: usize,
    pub bc: BoundaryCondition,
    pub potential: PotentialSpec,
}

impl IdsCurve {
    pub fn is_monotone(&self) -> bool {
        self.mean.windows(2).all(|w| w[0] <= w[1])
    }

    /// Smallest positive value a single count can contribute to the mean.
    pub fn resolution(&self) -> f64 {
        1.0 / (self.trials as f64 * self.region_size as f64)
    }

    /// CSV `E,mean,stderr,trials`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("E,mean,stderr,trials\n");
        for ((e, m), s) in self.energies.iter().zip(&self.mean).zip(&self.std_errors) {
            let _ = writeln!(out, "{},{},{},{}", fmt_f64(*e), fmt_f64(*m), fmt_f64(*s), self.trials);
        }
        out
    }
}

/// Monte-Carlo estimate of `N(E)` on the grid.
pub fn estimate_ids(
    level: u32,
    region: IdsRegion,
    bc: BoundaryCondition,
    spec: &PotentialSpec,
    trials: usize,
    grid: &[f64],
) -> Result<IdsCurve> {
    let area = ids_region(level, region, Capacity::default())?;
    estimate_ids_on(&area, level, region, bc, spec, trials, grid)
}

/// [`estimate_ids`] on a prebuilt region.
pub fn estimate_ids_on(
    area: &LatticeRegion,
    level: u32,
    region: IdsRegion,
    bc: BoundaryCondition,
    spec: &PotentialSpec,
    trials: usize,
    grid: &[f64],
) -> Result<IdsCurve> {
    if trials == 0 {
        return Err(GasketError::InvalidArguments("at least one trial is required".into()));
    }
    spec.validate()?;
    let assembler = Assembler::new(area, bc);
    let size = area.len() as f64;
    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<Vec<f64>> {
            let v = sample_potential_trial(area, spec, t)?;
            let c = counting_curve(&assembler.assemble(&v)?, grid)?;
            Ok(c.counts.iter().map(|&k| k as f64 / size).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let (mean, std_errors) = mean_and_stderr(&per_trial, grid.len());
    Ok(IdsCurve {
        energies: grid.to_vec(),
        mean,
        std_errors,
        trials,
        level,
        region,
        region_size: area.len(),
        bc,
        potential: spec.clone(),
    })
}

/// Pointwise mean and `s / √n` over rows, summed in row order.
fn mean_and_stderr(rows: &[Vec<f64>], len: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut mean = vec![0.0; len];
    for r in rows {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; len];
    if rows.len() > 1 {
        for r in rows {
            for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        var.iter_mut().for_each(|v| *v /= n - 1.0);
    }
    (mean, var.iter().map(|v| (v / n).sqrt()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveComparisonPoint {
    pub energy: f64,
    pub max_difference: f64,
    /// Allowed difference for the pair attaining `max_difference`.
    pub allowed: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcIndependenceReport {
    pub level: u32,
    pub trials: usize,
    pub potential: String,
    /// `9 / |𝔾_L|`.
    pub count_bound: f64,
    pub points: Vec<CurveComparisonPoint>,
    pub pass: bool,
}

/// Pointwise comparison of curves: every pair must differ by at most
/// `offset + 4 √(se_i² + se_j²)`.
fn compare_curves(curves: &[&IdsCurve], offset: f64) -> Vec<CurveComparisonPoint> {
    let grid = &curves[0].energies;
    (0..grid.len())
        .map(|k| {
            let mut worst = CurveComparisonPoint { energy: grid[k], max_difference: 0.0, allowed: f64::INFINITY, pass: true };
            let mut worst_slack = f64::INFINITY;
            for i in 0..curves.len() {
                for j in i + 1..curves.len() {
                    let d = (curves[i].mean[k] - curves[j].mean[k]).abs();
                    let se = curves[i].std_errors[k].hypot(curves[j].std_errors[k]);
                    let allowed = offset + 4.0 * se;
                    if allowed - d < worst_slack {
                        worst_slack = allowed - d;
                        worst = CurveComparisonPoint { energy: grid[k], max_difference: d, allowed, pass: d <= allowed };
                    }
                }
            }
            worst
        })
        .collect()
}

/// IDS curves for the three boundary conditions on `𝔾_L` agree within
/// `9/|𝔾_L|` plus four combined standard errors at every grid point.
pub fn bc_independence_report(
    level: u32,
    spec: &PotentialSpec,
    trials: usize,
    grid: &[f64],
) -> Result<BcIndependenceReport> {
    let area = ids_region(level, IdsRegion::Triangle, Capacity::default())?;
    let curves = BoundaryCondition::ALL
        .iter()
        .map(|&bc| estimate_ids_on(&area, level, IdsRegion::Triangle, bc, spec, trials, grid))
        .collect::<Result<Vec<_>>>()?;
    let count_bound = 9.0 / area.len() as f64;
    let points = compare_curves(&curves.iter().collect::<Vec<_>>(), count_bound);
    Ok(BcIndependenceReport {
        level,
        trials,
        potential: spec.distribution.to_string(),
        count_bound,
        pass: points.iter().all(|p| p.pass),
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfFullReport {
    pub level: u32,
    pub offset: f64,
    pub points: Vec<CurveComparisonPoint>,
    pub pass: bool,
}

/// Half-lattice (`𝔾_L`) and full-lattice (`B_L`) curves agree within
/// `1/|𝔾_L|` plus four combined standard errors.
pub fn half_full_consistency(
    level: u32,
    bc: BoundaryCondition,
    spec: &PotentialSpec,
    trials: usize,
    grid: &[f64],
) -> Result<HalfFullReport> {
    let half = estimate_ids(level, IdsRegion::Triangle, bc, spec, trials, grid)?;
    let full = estimate_ids(level, IdsRegion::Ball, bc, spec, trials, grid)?;
    let offset = 1.0 / half.region_size as f64;
    let points = compare_curves(&[&half, &full], offset);
    Ok(HalfFullReport { level, offset, pass: points.iter().all(|p| p.pass), points })
}

/// `Ṽ(x) = min{V(x)/2, (c₀/3) 5^{-ℓ}}` with `c₀ = 15/2`.
pub fn truncated_potential(sample: &[f64], level: u32) -> Vec<f64> {
    let cap = truncation_cap(level);
    sample.iter().map(|v| (0.5 * v).min(cap)).collect()
}

/// `(c₀/3) 5^{-ℓ}`.
pub fn truncation_cap(level: u32) -> f64 {
    TEMPLE_C0 / 3.0 * 5f64.powi(-(level as i32))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TempleBound {
    pub level: u32,
    /// `(1 / 2|𝔾_ℓ|) Σ Ṽ(x)`.
    pub bound: f64,
    /// `⟨ψ, H̃ψ⟩ = mean Ṽ` for the normalized constant `ψ`.
    pub trial_energy: f64,
    /// Full Temple expression with `E₁` replaced by `c₀ 5^{-ℓ}`.
    pub temple_value: f64,
    /// `c₀ 5^{-ℓ}`.
    pub gap_lower_bound: f64,
    /// `⟨ψ, H̃ψ⟩ < c₀ 5^{-ℓ}`.
    pub hypothesis_holds: bool,
    /// Mean of `Ṽ` at the cap; the hypothesis then holds with the smallest
    /// margin allowed by the truncation.
    pub at_cap: bool,
    /// Dense `E₀(-Δ^{𝔾_ℓ,N} + V/2)` when the region is small enough.
    pub ground_state: Option<f64>,
    pub pass: bool,
}

/// Lower bound on `E₀(-Δ^{𝔾_ℓ,N} + V/2)` from Temple's inequality with the
/// truncated potential, checked against a dense ground state.
pub fn temple_lower_bound(level: u32, potential: &[f64]) -> Result<TempleBound> {
    let region = build_triangle_with(TriangleSpec::new(level), Ambient::Half, Capacity::default())?;
    if potential.len() != region.len() {
        return Err(GasketError::Validation(format!(
            "potential has length {}, 𝔾_{level} has {} vertices",
            potential.len(),
            region.len()
        )));
    }
    if potential.iter().any(|v| *v < 0.0) {
        return Err(GasketError::InvalidArguments("the Temple bound needs a nonnegative potential".into()));
    }
    let n = region.len() as f64;
    let vt = truncated_potential(potential, level);
    let m: f64 = vt.iter().sum::<f64>() / n;
    let second: f64 = vt.iter().map(|x| x * x).sum::<f64>() / n;
    let gap = TEMPLE_C0 * 5f64.powi(-(level as i32));
    let hypothesis_holds = m < gap;
    let temple_value = m - (second - m * m) / (gap - m);
    let bound = 0.5 * m;
    let ground_state = if region.len() <= DENSE_THRESHOLD {
        let half: Vec<f64> = potential.iter().map(|v| 0.5 * v).collect();
        let h = assemble(&region, BoundaryCondition::Neumann, &half)?;
        Some(eigenvalues_dense(&h)?[0])
    } else {
        None
    };
    let pass = hypothesis_holds && ground_state.is_none_or(|e0| bound <= e0 + 1e-12);
    Ok(TempleBound {
        level,
        bound,
        trial_energy: m,
        temple_value,
        gap_lower_bound: gap,
        hypothesis_holds,
        at_cap: m >= truncation_cap(level),
        ground_state,
        pass,
    })
}

/// Fit family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    /// `log|log N|` against `log E`; slope targets `-τ`.
    Lifshitz,
    /// `log N` against `log E`; slope targets `τ`.
    Power,
    /// `log N` against `E^{-τ}`, i.e. `N ≈ m₁ exp(m₂ E^{-τ})`.
    Exponential,
}

/// Acceptance band for a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitAcceptance {
    pub slope: (f64, f64),
    pub prefactor: Option<(f64, f64)>,
}

impl FitAcceptance {
    pub fn lifshitz() -> Self {
        FitAcceptance { slope: (-0.85, -0.50), prefactor: None }
    }

    pub fn power() -> Self {
        FitAcceptance { slope: (tau() - 0.05, tau() + 0.05), prefactor: Some((0.10, 0.17)) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub kind: FitKind,
    pub window: (f64, f64),
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub target: Option<f64>,
    /// `exp(intercept)` for the power and exponential families.
    pub prefactor: Option<f64>,
    pub usable_points: usize,
    pub acceptance: Option<FitAcceptance>,
    pub pass: Option<bool>,
}

/// Ordinary least squares `y = intercept + slope x`, with `R²`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r_squared)
}

/// Fits one family to `(E, N)` samples inside `window`, keeping points with
/// `min_value ≤ N < 1` and `N > 0`.
pub fn fit_curve(
    kind: FitKind,
    energies: &[f64],
    values: &[f64],
    window: (f64, f64),
    min_value: f64,
    acceptance: Option<FitAcceptance>,
) -> Result<FitReport> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi) {
        return Err(GasketError::InvalidArguments(format!("fit window [{lo}, {hi}] is not a positive interval")));
    }
    let usable: Vec<(f64, f64)> = energies
        .iter()
        .zip(values)
        .filter(|(e, n)| **e >= lo && **e <= hi && **n > 0.0 && **n < 1.0 && **n >= min_value)
        .map(|(e, n)| (*e, *n))
        .collect();
    if usable.len() < MIN_FIT_POINTS {
        return Err(GasketError::InsufficientData { usable: usable.len(), required: MIN_FIT_POINTS });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = usable
        .iter()
        .map(|&(e, n)| match kind {
            FitKind::Lifshitz => (e.ln(), n.ln().abs().ln()),
            FitKind::Power => (e.ln(), n.ln()),
            FitKind::Exponential => (e.powf(-tau()), n.ln()),
        })
        .unzip();
    let (slope, intercept, r_squared) = linear_fit(&x, &y);
    let (target, prefactor) = match kind {
        FitKind::Lifshitz => (Some(-tau()), None),
        FitKind::Power => (Some(tau()), Some(intercept.exp())),
        FitKind::Exponential => (None, Some(intercept.exp())),
    };
    let pass = acceptance.map(|a| {
        let slope_ok = slope >= a.slope.0 && slope <= a.slope.1;
        let pref_ok = match (a.prefactor, prefactor) {
            (Some((plo, phi)), Some(p)) => p >= plo && p <= phi,
            (Some(_), None) => false,
            (None, _) => true,
        };
        slope_ok && pref_ok
    });
    Ok(FitReport {
        kind,
        window,
        slope,
        intercept,
        r_squared,
        target,
        prefactor,
        usable_points: usable.len(),
        acceptance,
        pass,
    })
}

/// Smallest mean value trusted in a fit: three counts over all trials.
pub fn min_usable(curve: &IdsCurve) -> f64 {
    3.0 * curve.resolution()
}

/// Double-log tail fit of a Monte-Carlo curve.
pub fn lifshitz_fit(curve: &IdsCurve, window: (f64, f64)) -> Result<FitReport> {
    fit_curve(FitKind::Lifshitz, &curve.energies, &curve.mean, window, min_usable(curve), Some(FitAcceptance::lifshitz()))
}

/// Power-law fit `N ≈ c E^τ` of a free-Laplacian curve.
pub fn free_ids_exponent(curve: &IdsCurve, window: (f64, f64)) -> Result<FitReport> {
    fit_curve(FitKind::Power, &curve.energies, &curve.mean, window, min_usable(curve), Some(FitAcceptance::power()))
}

/// `N ≈ m₁ exp(m₂ E^{-τ})`; reported without an acceptance band.
pub fn exponential_fit(curve: &IdsCurve, window: (f64, f64)) -> Result<FitReport> {
    fit_curve(FitKind::Exponential, &curve.energies, &curve.mean, window, min_usable(curve), None)
}

/// Piece level for the upper tail bound:
/// `⌊ log(c₀ p₁ / (16 E)) / log 5 ⌋`, where `p₁ = P(V > 0)`.
pub fn ell_for_upper_bound(e: f64, p1: f64) -> Option<i64> {
    let x = (TEMPLE_C0 * p1 / (16.0 * e)).ln() / 5f64.ln();
    x.is_finite().then(|| x.floor() as i64)
}

/// Piece level for the lower tail bound: `⌈ log(2 c₁ / E) / log 5 ⌉`.
pub fn ell_for_lower_bound(e: f64, c1: f64) -> Option<i64> {
    let x = (2.0 * c1 / e).ln() / 5f64.ln();
    x.is_finite().then(|| x.ceil() as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllSelectionRow {
    pub energy: f64,
    pub ell_upper: Option<i64>,
    pub ell_lower: Option<i64>,
    /// `(c₀/3) 5^{-ℓ}` at the upper-bound level, when `ℓ ≥ 0`.
    pub truncation_cap: Option<f64>,
    /// `-4 f^{∘(ℓ-1)}(-1/2)` at the lower-bound level, when `ℓ ≥ 1`.
    pub dirichlet_ground: Option<f64>,
}

/// Diagnostic table of the bracketing levels over an energy grid.
pub fn ell_selection_table(energies: &[f64], p1: f64, c1: f64) -> Vec<EllSelectionRow> {
    energies
        .iter()
        .map(|&e| {
            let up = ell_for_upper_bound(e, p1);
            let low = ell_for_lower_bound(e, c1);
            EllSelectionRow {
                energy: e,
                ell_upper: up,
                ell_lower: low,
                truncation_cap: up.filter(|l| (0..=60).contains(l)).map(|l| truncation_cap(l as u32)),
                dirichlet_ground: low
                    .filter(|l| (1..=60).contains(l))
                    .and_then(|l| decimation::dirichlet_ground(l as u32).ok()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Distribution;
    use crate::spectra::{geometric_grid, uniform_grid};

    #[test]
    fn constants() {
        assert!((tau() - 0.6826061944859854).abs() < 1e-15);
        assert!((alpha() / beta() - tau()).abs() < 1e-15);
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(truncated_potential(&[0.0, 0.0], 2), vec![0.0, 0.0]);
        assert!((truncated_potential(&[100.0], 2)[0] - 0.1).abs() < 1e-15);
        assert_eq!(truncated_potential(&[0.01], 2), vec![0.005]);
    }

    #[test]
    fn temple_free_is_tight() {
        let t = temple_lower_bound(2, &[0.0; 15]).unwrap();
        assert_eq!(t.bound, 0.0);
        assert!(t.ground_state.unwrap().abs() < 1e-12);
        assert!(t.pass);
    }

    #[test]
    fn temple_bernoulli_level_two() {
        let spec = PotentialSpec::new("bernoulli:0,10,0.5".parse().unwrap(), 3);
        for trial in 0..10 {
            let v = spec.sample(15, trial).unwrap();
            let t = temple_lower_bound(2, &v).unwrap();
            assert!(t.pass, "{t:?}");
            assert!(t.temple_value >= t.bound - 1e-15);
        }
    }

    #[test]
    fn free_curve_at_top_is_one() {
        let spec = PotentialSpec::new(Distribution::Uniform { a: 0.0, b: 2.0 }, 1);
        let c = estimate_ids(3, IdsRegion::Triangle, BoundaryCondition::Neumann, &spec, 4, &[0.0, 18.0]).unwrap();
        assert_eq!(c.mean[1], 1.0);
        assert!(c.is_monotone());
        assert!(c.to_csv().starts_with("E,mean,stderr,trials\n"));
    }

    #[test]
    fn single_trial_has_zero_stderr() {
        let spec = PotentialSpec::new(Distribution::Constant(0.0), 0);
        let c = estimate_ids(2, IdsRegion::Ball, BoundaryCondition::Simple, &spec, 1, &uniform_grid(0.0, 6.0, 7)).unwrap();
        assert!(c.std_errors.iter().all(|s| *s == 0.0));
        assert_eq!(c.region_size, 29);
    }

    #[test]
    fn synthetic_lifshitz_slope() {
        let e = geometric_grid(1e-3, 1e-1, 30);
        let n: Vec<f64> = e.iter().map(|x| (-x.powf(-tau())).exp()).collect();
        let fit = fit_curve(FitKind::Lifshitz, &e, &n, (1e-3, 1e-1), 0.0, None).unwrap();
        assert!((fit.slope + tau()).abs() < 1e-6, "{fit:?}");

        let n2: Vec<f64> = e.iter().map(|x| (-2.0 * x.powf(-0.5)).exp()).collect();
        let fit2 = fit_curve(FitKind::Lifshitz, &e, &n2, (1e-3, 1e-1), 0.0, None).unwrap();
        assert!((fit2.slope + 0.5).abs() < 0.02, "{fit2:?}");
    }

    #[test]
    fn synthetic_power_fit() {
        let e = geometric_grid(1e-3, 5e-2, 20);
        let n: Vec<f64> = e.iter().map(|x| 0.135 * x.powf(tau())).collect();
        let fit = fit_curve(FitKind::Power, &e, &n, DEFAULT_WINDOW, 0.0, Some(FitAcceptance::power())).unwrap();
        assert!((fit.slope - tau()).abs() < 1e-12);
        assert!((fit.prefactor.unwrap() - 0.135).abs() < 1e-12);
        assert_eq!(fit.pass, Some(true));
        assert!(matches!(
            fit_curve(FitKind::Power, &e, &n, (1.0, 2.0), 0.0, None),
            Err(GasketError::InsufficientData { usable: 0, required: 5 })
        ));
    }

    #[test]
    fn synthetic_exponential_fit() {
        let e = geometric_grid(0.2, 1.0, 12);
        let n: Vec<f64> = e.iter().map(|x| 1.38 * (-4.64 * x.powf(-tau())).exp()).collect();
        let fit = fit_curve(FitKind::Exponential, &e, &n, (0.2, 1.0), 0.0, None).unwrap();
        assert!((fit.slope + 4.64).abs() < 1e-9);
        assert!((fit.prefactor.unwrap() - 1.38).abs() < 1e-9);
        assert_eq!(fit.pass, None);
    }

    #[test]
    fn ell_helpers() {
        // c₀ p₁ / 16 = 15/64 at p₁ = 1/2.
        assert_eq!(ell_for_upper_bound(15.0 / 64.0 / 30.0, 0.5), Some(2));
        assert_eq!(ell_for_lower_bound(2.0 / 100.0, 1.0), Some(3));
        let rows = ell_selection_table(&[1e-3, 1e-2], 0.5, 40.0);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].ell_upper.unwrap() > rows[1].ell_upper.unwrap());
    }
}
