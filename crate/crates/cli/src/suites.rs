//! Verification suites run by `gasket verify`.

use clap::ValueEnum;
use gasket_core::decimation;
use gasket_core::ids;
use gasket_core::lattice::{build_triangle, TriangleSpec};
use gasket_core::operators::{free_laplacian, probabilistic_laplacian, BoundaryCondition, Distribution, PotentialSpec};
use gasket_core::spectra::{
    self, compact_eigenfunction_at_six, eigenvalues_dense, uniform_grid, LemmaCheckRecord, VerificationReport,
};
use gasket_core::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma41,
    Interlacing,
    Psd,
    Iterf,
    Temple,
    Decimation,
    Eigen6,
    Containment,
    Bc,
    All,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Decimation,
        Suite::Iterf,
        Suite::Psd,
        Suite::Interlacing,
        Suite::Temple,
        Suite::Eigen6,
        Suite::Containment,
        Suite::Lemma41,
        Suite::Bc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma41 => "lemma41",
            Suite::Interlacing => "interlacing",
            Suite::Psd => "psd",
            Suite::Iterf => "iterf",
            Suite::Temple => "temple",
            Suite::Decimation => "decimation",
            Suite::Eigen6 => "eigen6",
            Suite::Containment => "containment",
            Suite::Bc => "bc",
            Suite::All => "all",
        }
    }
}

/// Suite parameters; `None` selects the suite default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub level: Option<u32>,
    pub seeds: usize,
    pub trials: Option<usize>,
    pub n: u32,
    pub dim: usize,
    pub samples: usize,
    pub grid_points: usize,
    pub seed: u64,
    pub dist: Option<Distribution>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            level: None,
            seeds: 20,
            trials: None,
            n: 30,
            dim: 40,
            samples: 100,
            grid_points: 64,
            seed: 0,
            dist: None,
        }
    }
}

/// Zero, Bernoulli(0, 10, 1/2) and Uniform(0, 1).
pub fn standard_distributions() -> Vec<Distribution> {
    vec![
        Distribution::Constant(0.0),
        Distribution::Bernoulli { a: 0.0, b: 10.0, prob_b: 0.5 },
        Distribution::Uniform { a: 0.0, b: 1.0 },
    ]
}

impl SuiteOptions {
    fn distributions(&self) -> Vec<Distribution> {
        match &self.dist {
            Some(d) => vec![d.clone()],
            None => standard_distributions(),
        }
    }

    fn levels(&self, default: std::ops::RangeInclusive<u32>) -> Vec<u32> {
        match self.level {
            Some(l) => vec![l],
            None => default.collect(),
        }
    }
}

/// Grid covering every spectrum of `H^{A,bc}` with potential in `[.., sup]`.
pub fn global_grid(dist: &Distribution, points: usize) -> Vec<f64> {
    uniform_grid(-0.5, 8.5 + dist.support().1, points)
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<VerificationReport> {
    let records = match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(run_suite(s, opts)?.records);
            }
            all
        }
        Suite::Lemma41 => lemma41(opts)?,
        Suite::Interlacing => interlacing(opts)?,
        Suite::Psd => spectra::verify_psd_product_bounds(opts.dim, opts.trials.unwrap_or(100), opts.seed)?,
        Suite::Iterf => iterf(opts)?,
        Suite::Temple => temple(opts)?,
        Suite::Decimation => decimation_checks(opts)?,
        Suite::Eigen6 => eigen6(opts)?,
        Suite::Containment => containment(opts)?,
        Suite::Bc => bc_independence(opts)?,
    };
    Ok(VerificationReport::new(suite.name(), records))
}

fn lemma41(opts: &SuiteOptions) -> Result<Vec<LemmaCheckRecord>> {
    let mut out = Vec::new();
    for level in opts.levels(2..=6) {
        for dist in opts.distributions() {
            let spec = PotentialSpec::new(dist.clone(), opts.seed);
            let grid = global_grid(&dist, opts.grid_points);
            out.extend(spectra::verify_lemma_4_1(level, &spec, opts.seeds, &grid)?);
        }
    }
    Ok(out)
}

fn interlacing(opts: &SuiteOptions) -> Result<Vec<LemmaCheckRecord>> {
    let mut out = spectra::verify_interlacing_lemmas(opts.dim, opts.trials.unwrap_or(200), opts.seed)?;
    let level = opts.level.unwrap_or(4);
    for piece in 1..=level.saturating_sub(1).max(1) {
        for dist in opts.distributions() {
            let spec = PotentialSpec::new(dist.clone(), opts.seed);
            let grid = global_grid(&dist, opts.grid_points);
            out.extend(spectra::verify_gasket_bracketing(level, piece, &spec, opts.seeds, &grid)?);
        }
    }
    Ok(out)
}

fn iterf(opts: &SuiteOptions) -> Result<Vec<LemmaCheckRecord>> {
    let samples = uniform_grid(-1.0, 0.0, opts.samples);
    let mut out = Vec::new();
    for n in 1..=opts.n {
        let report = decimation::iterate_f_bounds(n, &samples)?;
        out.push(LemmaCheckRecord::new(
            "B-iteration",
            format!("n={n} samples={} checks={}", report.samples, report.checks),
            report.violations.len() as f64,
            0.0,
        ));
    }
    Ok(out)
}

fn temple(opts: &SuiteOptions) -> Result<Vec<LemmaCheckRecord>> {
    let mut out = Vec::new();
    for level in opts.levels(2..=4) {
        let size = build_triangle(TriangleSpec::new(level))?.len();
        for dist in opts.distributions() {
            for s in 0..opts.trials.unwrap_or(100) as u64 {
                let spec = PotentialSpec::new(dist.clone(), opts.seed.wrapping_add(s));
                let v = spec.sample(size, 0)?;
                let t = ids::temple_lower_bound(level, &v)?;
                let tag = format!("l={level} dist={dist} seed={}", spec.seed);
                out.push(LemmaCheckRecord::new(
                    "temple-hypothesis",
                    tag.clone(),
                    if t.hypothesis_holds { 0.0 } else { 1.0 },
                    0.0,
                ));
                if let Some(e0) = t.ground_state {
                    out.push(LemmaCheckRecord::new("temple-bound", tag, t.bound - e0, 1e-12));
                }
            }
        }
    }
    Ok(out)
}

/// Amount by which `x` leaves `[lo, hi]`, with relative rounding slack.
fn band_violation(x: f64, lo: f64, hi: f64) -> f64 {
    let slack = 1e-12 * hi.abs();
    (lo - slack - x).max(x - hi - slack).max(0.0)
}

fn decimation_checks(opts: &SuiteOptions) -> Result<Vec<LemmaCheckRecord>> {
    let mut out = Vec::new();
    let dense_levels = opts.levels(1..=5);
    for &level in &dense_levels {
        let g = build_triangle(TriangleSpec::new(level))?;
        let mut dense: Vec<f64> = eigenvalues_dense(&probabilistic_laplacian(&g)?)?.iter().map(|x| -x).collect();
        dense.sort_by(f64::total_cmp);
        let exact = decimation::neumann_spectrum(level)?;
        out.push(LemmaCheckRecord::new(
            "decimation-vs-dense",
            format!("l={level} points={} dense={}", exact.len(), dense.len()),
            decimation::set_distance(exact.points(), &dense),
            1e-9,
        ));

        let trunc = build_triangle(TriangleSpec::new(level).truncated(true))?;
        let e0 = eigenvalues_dense(&free_laplacian(&trunc, BoundaryCondition::Simple))?[0];
        let formula = decimation::dirichlet_ground(level)?;
        out.push(LemmaCheckRecord::new("dirichlet-ground", format!("l={level}"), (e0 - formula).abs(), 1e-9));

        let e1 = eigenvalues_dense(&free_laplacian(&g, BoundaryCondition::Neumann))?[1];
        out.extend(gap_records(level, e1, e1, e0, "dense"));
    }
    if opts.level.is_none() {
        for level in 6..=10 {
            let gap = decimation::neumann_gap(level)?;
            // 2 E₁(-Δ_p) ≤ E₁(-Δ) ≤ 4 E₁(-Δ_p).
            out.extend(gap_records(level, 2.0 * gap, 4.0 * gap, decimation::dirichlet_ground(level)?, "decimation"));
        }
    }
    Ok(out)
}

/// `(15/2) 5^{-ℓ} ≤ E₁ ≤ 60 5^{-ℓ}` given `E₁ ∈ [e1_lo, e1_hi]`, and
/// `10 5^{-ℓ} ≤ E₀ ≤ 40 5^{-ℓ}`.
fn gap_records(level: u32, e1_lo: f64, e1_hi: f64, e0: f64, route: &str) -> Vec<LemmaCheckRecord> {
    let s = 5f64.powi(-(level as i32));
    vec![
        LemmaCheckRecord::new(
            "neumann-gap-constants",
            format!("l={level} route={route}"),
            band_violation(e1_lo, 7.5 * s, 60.0 * s).max(band_violation(e1_hi, 7.5 * s, 60.0 * s)),
            0.0,
        ),
        LemmaCheckRecord::new(
            "dirichlet-ground-constants",
            format!("l={level} route={route}"),
            band_violation(e0, 10.0 * s, 40.0 * s),
            0.0,
        ),
    ]
}

fn eigen6(opts: &SuiteOptions) -> Result<Vec<LemmaCheckRecord>> {
    let mut out = Vec::new();
    for level in opts.levels(3..=5) {
        let r = compact_eigenfunction_at_six(level)?;
        let tag = format!("L={level} kernel={} triangle_kernel={}", r.basis.len(), r.triangle_kernel_dim);
        let empty = if r.basis.is_empty() || r.translated.is_empty() { 1.0 } else { 0.0 };
        out.push(LemmaCheckRecord::new("six-kernel-nonempty", tag.clone(), empty, 0.0));
        out.push(LemmaCheckRecord::new("six-zero-extension", tag.clone(), r.max_residual, r.tolerance));
        out.push(LemmaCheckRecord::new(
            "six-translated",
            format!("{tag} copies={}", r.translated.len()),
            r.max_translated_residual,
            r.tolerance,
        ));
    }
    Ok(out)
}

fn containment(opts: &SuiteOptions) -> Result<Vec<LemmaCheckRecord>> {
    let level = opts.level.unwrap_or(6);
    let dists = match &opts.dist {
        Some(d) => vec![d.clone()],
        None => vec![
            Distribution::Bernoulli { a: 0.0, b: 10.0, prob_b: 0.5 },
            Distribution::Uniform { a: 0.0, b: 1.0 },
        ],
    };
    let mut out = Vec::new();
    for dist in dists {
        let spec = PotentialSpec::new(dist.clone(), opts.seed);
        let r = spectra::spectrum_containment_check(level, &spec, 3, 0.2)?;
        let tag = format!("L={level} dist={dist} eigenvalues={}", r.eigenvalue_count);
        out.push(LemmaCheckRecord::new("containment", tag.clone(), r.max_excursion, spectra::CONTAINMENT_TOLERANCE));
        if let Some(p) = r.proximity {
            out.push(LemmaCheckRecord::new(
                "proximity",
                format!("{tag} depth=3 worst_point={}", r.proximity_location.unwrap_or(f64::NAN)),
                p,
                r.proximity_tolerance,
            ));
        }
    }
    Ok(out)
}

fn bc_independence(opts: &SuiteOptions) -> Result<Vec<LemmaCheckRecord>> {
    let level = opts.level.unwrap_or(6);
    let mut out = Vec::new();
    for dist in opts.distributions() {
        let spec = PotentialSpec::new(dist.clone(), opts.seed);
        let grid = global_grid(&dist, opts.grid_points);
        let report = ids::bc_independence_report(level, &spec, opts.trials.unwrap_or(32), &grid)?;
        for p in report.points {
            out.push(LemmaCheckRecord::new(
                "bc-independence",
                format!("L={level} dist={dist} E={}", p.energy),
                p.max_difference,
                p.allowed,
            ));
        }
    }
    Ok(out)
}
