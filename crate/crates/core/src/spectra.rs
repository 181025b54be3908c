//! Eigenvalues, eigenvalue counting and the counting-lemma checks.
//!
//! Counting uses Sylvester's law of inertia: the number of eigenvalues of
//! `H` at or below `E` equals the number of negative pivots in a symmetric
//! factorization `P (H - (E + η) I) Pᵀ = L D Lᵀ`.
//!
//! Operators on gasket regions are factorized block by block in order of
//! dissection rank: the vertices of one rank that are connected in the
//! current Schur complement form a small block, whose inertia comes from a
//! dense eigensolve before it is eliminated. Blocks only couple to corners
//! of their sub-triangle, so there is no fill beyond those corners. Other
//! matrices use a sparse Bunch–Kaufman `LDLᵀ` with a minimum-degree ordering.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimation;
use crate::error::{GasketError, Result};
use crate::lattice::{
    build_ball, build_triangle, subdivide, translation_map, Coord, LatticeRegion, PartitionKind, RegionKind,
    TriangleSpec,
};
use crate::operators::{
    assemble, free_laplacian, fmt_f64, restrict_potential, sample_potential_trial, BoundaryCondition,
    HamiltonianMatrix, PotentialSpec,
};

/// Largest dimension accepted by [`eigenvalues_dense`].
pub const DENSE_THRESHOLD: usize = 4096;

/// Bunch–Kaufman growth parameter `(1 + √17) / 8`.
const BK_ALPHA: f64 = 0.640_388_203_202_208_4;

/// Shifts tried before a factorization is reported as broken down.
pub const MAX_SHIFT_ATTEMPTS: usize = 6;

/// Tie guard added to `E` so that `≤ E` is stable at eigenvalues.
pub fn tie_guard(e: f64) -> f64 {
    1e-9 * (1.0 + e.abs())
}

/// All eigenvalues in ascending order.
pub fn eigenvalues_dense(h: &HamiltonianMatrix) -> Result<Vec<f64>> {
    eigenvalues_dense_with(h, DENSE_THRESHOLD)
}

pub fn eigenvalues_dense_with(h: &HamiltonianMatrix, threshold: usize) -> Result<Vec<f64>> {
    if h.dim() > threshold {
        return Err(GasketError::Capacity(format!(
            "dimension {} exceeds the dense threshold {threshold}; use count_below",
            h.dim()
        )));
    }
    Ok(symmetric_eigenvalues(h.to_dense()))
}

/// Ascending eigenvalues of a dense symmetric matrix.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// `#{λ ≤ E}` for an ascending eigenvalue list, with the same tie guard as
/// [`count_below`].
pub fn count_sorted(eigenvalues: &[f64], e: f64) -> usize {
    let cut = e + tie_guard(e);
    eigenvalues.partition_point(|&x| x <= cut)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub negative: usize,
    pub positive: usize,
}

enum Pivot {
    One(usize),
    Two(usize, usize),
}

/// Active Schur complement during elimination.
struct Elimination {
    rows: Vec<Vec<(u32, f64)>>,
    diag: Vec<f64>,
    alive: Vec<bool>,
    heap: BinaryHeap<Reverse<(usize, usize)>>,
    negative: usize,
    positive: usize,
}

impl Elimination {
    fn new(h: &HamiltonianMatrix, shift: f64) -> Self {
        let n = h.dim();
        let mut rows = vec![Vec::new(); n];
        for (&(i, j), &v) in h.pattern().iter().zip(h.offdiagonal()) {
            if v != 0.0 {
                rows[i].push((j as u32, v));
                rows[j].push((i as u32, v));
            }
        }
        let heap = (0..n).map(|i| Reverse((rows[i].len(), i))).collect();
        Elimination {
            rows,
            diag: h.diagonal().iter().map(|d| d - shift).collect(),
            alive: vec![true; n],
            heap,
            negative: 0,
            positive: 0,
        }
    }

    fn touch(&mut self, i: usize) {
        self.heap.push(Reverse((self.rows[i].len(), i)));
    }

    fn detach(&mut self, from: usize, target: usize) -> Option<f64> {
        let row = &mut self.rows[from];
        let pos = row.iter().position(|&(j, _)| j as usize == target)?;
        Some(row.swap_remove(pos).1)
    }

    fn add(&mut self, i: usize, j: usize, x: f64) {
        if let Some(e) = self.rows[i].iter_mut().find(|(k, _)| *k as usize == j) {
            e.1 += x;
            let e = self.rows[j].iter_mut().find(|(k, _)| *k as usize == i).expect("symmetric storage");
            e.1 += x;
        } else {
            self.rows[i].push((j as u32, x));
            self.rows[j].push((i as u32, x));
        }
    }

    fn choose(&self, k: usize) -> Pivot {
        let d = self.diag[k].abs();
        let (mut lambda, mut r) = (0.0, k);
        for &(j, v) in &self.rows[k] {
            if v.abs() > lambda {
                lambda = v.abs();
                r = j as usize;
            }
        }
        if lambda == 0.0 || d >= BK_ALPHA * lambda {
            return Pivot::One(k);
        }
        let sigma = self.rows[r].iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
        if d * sigma >= BK_ALPHA * lambda * lambda {
            Pivot::One(k)
        } else if self.diag[r].abs() >= BK_ALPHA * sigma {
            Pivot::One(r)
        } else {
            Pivot::Two(k, r)
        }
    }

    fn eliminate_one(&mut self, p: usize) -> bool {
        let d = self.diag[p];
        if d == 0.0 || !d.is_finite() {
            return false;
        }
        if d < 0.0 {
            self.negative += 1;
        } else {
            self.positive += 1;
        }
        let nb = std::mem::take(&mut self.rows[p]);
        self.alive[p] = false;
        for &(i, _) in &nb {
            self.detach(i as usize, p);
        }
        for a in 0..nb.len() {
            let (i, vi) = (nb[a].0 as usize, nb[a].1);
            let li = vi / d;
            self.diag[i] -= li * vi;
            for &(j, vj) in &nb[a + 1..] {
                self.add(i, j as usize, -li * vj);
            }
        }
        for &(i, _) in &nb {
            self.touch(i as usize);
        }
        true
    }

    fn eliminate_two(&mut self, a: usize, b: usize) -> bool {
        let c = self.detach(a, b).expect("pivot pair is adjacent");
        self.detach(b, a);
        let (da, db) = (self.diag[a], self.diag[b]);
        let det = da * db - c * c;
        if det == 0.0 || !det.is_finite() {
            return false;
        }
        if det < 0.0 {
            self.negative += 1;
            self.positive += 1;
        } else if da < 0.0 {
            self.negative += 2;
        } else {
            self.positive += 2;
        }
        let mut merged: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        for (j, v) in std::mem::take(&mut self.rows[a]) {
            merged.entry(j as usize).or_default().0 = v;
        }
        for (j, v) in std::mem::take(&mut self.rows[b]) {
            merged.entry(j as usize).or_default().1 = v;
        }
        self.alive[a] = false;
        self.alive[b] = false;
        let nb: Vec<(usize, f64, f64)> = merged.into_iter().map(|(u, (x, y))| (u, x, y)).collect();
        for &(u, _, _) in &nb {
            self.detach(u, a);
            self.detach(u, b);
        }
        for s in 0..nb.len() {
            let (u, xu, yu) = nb[s];
            let wu = ((db * xu - c * yu) / det, (da * yu - c * xu) / det);
            self.diag[u] -= wu.0 * xu + wu.1 * yu;
            for &(v, xv, yv) in &nb[s + 1..] {
                self.add(u, v, -(wu.0 * xv + wu.1 * yv));
            }
        }
        for &(u, _, _) in &nb {
            self.touch(u);
        }
        true
    }

    fn run(mut self) -> Option<Inertia> {
        while let Some(Reverse((deg, k))) = self.heap.pop() {
            if !self.alive[k] || deg != self.rows[k].len() {
                continue;
            }
            let ok = match self.choose(k) {
                Pivot::One(p) => {
                    let ok = self.eliminate_one(p);
                    if p != k {
                        self.touch(k);
                    }
                    ok
                }
                Pivot::Two(a, b) => self.eliminate_two(a, b),
            };
            if !ok {
                return None;
            }
        }
        Some(Inertia { negative: self.negative, positive: self.positive })
    }
}

/// Block elimination along dissection ranks.
struct RankElimination {
    rows: Vec<Vec<(u32, f64)>>,
    diag: Vec<f64>,
    alive: Vec<bool>,
    negative: usize,
    positive: usize,
}

/// Block eigenvalues at most this fraction of the block norm count as zero.
const BLOCK_SINGULARITY: f64 = 1e-14;

impl RankElimination {
    fn new(h: &HamiltonianMatrix, shift: f64) -> Self {
        let n = h.dim();
        let mut rows = vec![Vec::new(); n];
        for (&(i, j), &v) in h.pattern().iter().zip(h.offdiagonal()) {
            if v != 0.0 {
                rows[i].push((j as u32, v));
                rows[j].push((i as u32, v));
            }
        }
        RankElimination {
            rows,
            diag: h.diagonal().iter().map(|d| d - shift).collect(),
            alive: vec![true; n],
            negative: 0,
            positive: 0,
        }
    }

    fn add(&mut self, i: usize, j: usize, x: f64) {
        if let Some(e) = self.rows[i].iter_mut().find(|(k, _)| *k as usize == j) {
            e.1 += x;
            let e = self.rows[j].iter_mut().find(|(k, _)| *k as usize == i).expect("symmetric storage");
            e.1 += x;
        } else {
            self.rows[i].push((j as u32, x));
            self.rows[j].push((i as u32, x));
        }
    }

    /// Eliminates the vertices of `block` (sorted) at once.
    fn eliminate(&mut self, block: &[usize]) -> bool {
        let k = block.len();
        let local = |v: usize| block.binary_search(&v).ok();
        let mut outer: Vec<usize> = block
            .iter()
            .flat_map(|&b| self.rows[b].iter().map(|&(j, _)| j as usize))
            .filter(|&j| local(j).is_none())
            .collect();
        outer.sort_unstable();
        outer.dedup();
        let m = outer.len();
        let mut a = DMatrix::<f64>::zeros(k, k);
        let mut c = DMatrix::<f64>::zeros(k, m);
        for (x, &b) in block.iter().enumerate() {
            a[(x, x)] = self.diag[b];
            for &(j, v) in &self.rows[b] {
                match local(j as usize) {
                    Some(y) => a[(x, y)] = v,
                    None => c[(x, outer.binary_search(&(j as usize)).expect("collected"))] = v,
                }
            }
        }
        let eig = a.symmetric_eigen();
        let norm = eig.eigenvalues.amax();
        if !norm.is_finite() || eig.eigenvalues.iter().any(|&l| l.abs() <= BLOCK_SINGULARITY * norm.max(1.0)) {
            return false;
        }
        for &l in eig.eigenvalues.iter() {
            if l < 0.0 {
                self.negative += 1;
            } else {
                self.positive += 1;
            }
        }
        for &b in block {
            self.alive[b] = false;
            self.rows[b].clear();
        }
        for &u in &outer {
            self.rows[u].retain(|&(j, _)| local(j as usize).is_none());
        }
        if m == 0 {
            return true;
        }
        // C^T A^{-1} C = (Λ^{-1/2}-scaled Q^T C)^T with signs.
        let qc = eig.eigenvectors.transpose() * &c;
        let mut scaled = qc.clone();
        for (x, &l) in eig.eigenvalues.iter().enumerate() {
            scaled.row_mut(x).scale_mut(1.0 / l);
        }
        let update = qc.transpose() * scaled;
        for s in 0..m {
            self.diag[outer[s]] -= update[(s, s)];
            for t in s + 1..m {
                self.add(outer[s], outer[t], -update[(s, t)]);
            }
        }
        true
    }

    fn run(mut self, ranks: &[u8]) -> Option<Inertia> {
        let mut order: Vec<usize> = (0..ranks.len()).collect();
        order.sort_by_key(|&i| (ranks[i], i));
        let mut block = Vec::new();
        let mut stack = Vec::new();
        for &start in &order {
            if !self.alive[start] {
                continue;
            }
            let r = ranks[start];
            block.clear();
            stack.push(start);
            self.alive[start] = false;
            while let Some(v) = stack.pop() {
                block.push(v);
                for &(j, _) in &self.rows[v] {
                    let j = j as usize;
                    if self.alive[j] && ranks[j] == r {
                        self.alive[j] = false;
                        stack.push(j);
                    }
                }
            }
            block.sort_unstable();
            for &b in &block {
                self.alive[b] = true;
            }
            let current = std::mem::take(&mut block);
            if !self.eliminate(&current) {
                return None;
            }
            block = current;
        }
        Some(Inertia { negative: self.negative, positive: self.positive })
    }
}

/// Inertia of `H - shift·I` (symmetric form), or `None` on an exactly
/// singular pivot.
fn try_inertia(h: &HamiltonianMatrix, shift: f64) -> Option<Inertia> {
    match h.dissection_ranks() {
        Some(ranks) => RankElimination::new(h, shift).run(ranks),
        None => Elimination::new(h, shift).run(),
    }
}

/// Inertia of `H - shift·I`, perturbing the shift on breakdown.
pub fn inertia(h: &HamiltonianMatrix, shift: f64) -> Result<Inertia> {
    let eta = tie_guard(shift);
    let mut s = shift;
    for attempt in 0..MAX_SHIFT_ATTEMPTS {
        if let Some(i) = try_inertia(h, s) {
            return Ok(i);
        }
        s = shift + eta * (1u64 << attempt) as f64;
    }
    Err(GasketError::FactorizationBreakdown { shift, attempts: MAX_SHIFT_ATTEMPTS })
}

/// `𝒩(E; H) = #{λ ≤ E}`, as the negative inertia of `H - (E + η) I`.
pub fn count_below(h: &HamiltonianMatrix, e: f64) -> Result<usize> {
    Ok(inertia(h, e + tie_guard(e))?.negative)
}

/// Eigenvalue counting function on an energy grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingFunction {
    pub energies: Vec<f64>,
    pub counts: Vec<usize>,
    pub dimension: usize,
}

impl CountingFunction {
    pub fn is_monotone(&self) -> bool {
        self.counts.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn normalized(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.dimension as f64).collect()
    }

    /// CSV `E,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("E,count\n");
        for (e, c) in self.energies.iter().zip(&self.counts) {
            let _ = writeln!(out, "{},{c}", fmt_f64(*e));
        }
        out
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|e| !e.is_finite()) {
        return Err(GasketError::InvalidArguments("energy grid contains a non-finite value".into()));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(GasketError::InvalidArguments("energy grid must be sorted ascending".into()));
    }
    Ok(())
}

/// [`count_below`] at every grid point (in parallel).
pub fn counting_curve(h: &HamiltonianMatrix, grid: &[f64]) -> Result<CountingFunction> {
    check_grid(grid)?;
    let counts = grid.par_iter().map(|&e| count_below(h, e)).collect::<Result<Vec<_>>>()?;
    Ok(CountingFunction { energies: grid.to_vec(), counts, dimension: h.dim() })
}

/// Counting curve from a dense eigendecomposition.
pub fn counting_curve_dense(h: &HamiltonianMatrix, grid: &[f64]) -> Result<CountingFunction> {
    check_grid(grid)?;
    let eig = eigenvalues_dense(h)?;
    Ok(CountingFunction {
        energies: grid.to_vec(),
        counts: grid.iter().map(|&e| count_sorted(&eig, e)).collect(),
        dimension: h.dim(),
    })
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` geometrically spaced points on `[lo, hi]`, `0 < lo ≤ hi`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}

/// Outcome of one inequality check over one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheckRecord {
    pub lemma: String,
    pub instance: String,
    pub max_deviation: f64,
    pub bound: f64,
    pub pass: bool,
}

impl LemmaCheckRecord {
    pub fn new(lemma: impl Into<String>, instance: impl Into<String>, max_deviation: f64, bound: f64) -> Self {
        LemmaCheckRecord {
            lemma: lemma.into(),
            instance: instance.into(),
            max_deviation,
            bound,
            pass: max_deviation <= bound,
        }
    }
}

/// Pass/fail summary of a verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checked: usize,
    pub failed: usize,
    pub pass: bool,
    pub records: Vec<LemmaCheckRecord>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, records: Vec<LemmaCheckRecord>) -> Self {
        let failed = records.iter().filter(|r| !r.pass).count();
        VerificationReport { suite: suite.into(), checked: records.len(), failed, pass: failed == 0, records }
    }

    pub fn failures(&self) -> impl Iterator<Item = &LemmaCheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }
}

fn max_abs_diff(a: &[usize], b: &[usize]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x as i64 - *y as i64).unsigned_abs()).max().unwrap_or(0) as f64
}

fn sum_counts(curves: &[Vec<usize>]) -> Vec<usize> {
    let mut out = vec![0; curves.first().map_or(0, Vec::len)];
    for c in curves {
        for (o, v) in out.iter_mut().zip(c) {
            *o += v;
        }
    }
    out
}

fn counts(h: &HamiltonianMatrix, grid: &[f64]) -> Result<Vec<usize>> {
    Ok(counting_curve(h, grid)?.counts)
}

/// Checks both counting bounds for the six operators
/// `{H^{𝔾_L,•}, H^{𝔾̃_L,•}}` on `trials` sampled potentials:
/// pairwise deviation at most 9, and deviation from the sum over the three
/// child triangles (same region type and boundary condition) at most 30.
pub fn verify_lemma_4_1(
    level: u32,
    spec: &PotentialSpec,
    trials: usize,
    grid: &[f64],
) -> Result<Vec<LemmaCheckRecord>> {
    if level == 0 {
        return Err(GasketError::InvalidArguments("the child decomposition needs level >= 1".into()));
    }
    check_grid(grid)?;
    let full = build_triangle(TriangleSpec::new(level))?;
    let trunc = build_triangle(TriangleSpec::new(level).truncated(true))?;
    let children = subdivide(&full, level - 1, PartitionKind::CoverP)?.pieces;
    let child_full: Vec<LatticeRegion> =
        children.iter().map(|c| build_triangle(*c)).collect::<Result<_>>()?;
    let child_trunc: Vec<LatticeRegion> =
        children.iter().map(|c| build_triangle(c.truncated(true))).collect::<Result<_>>()?;

    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Vec<LemmaCheckRecord>> {
            let v = sample_potential_trial(&full, spec, trial)?;
            let tag = format!("L={level} seed={} trial={trial}", spec.seed);
            let mut names = Vec::new();
            let mut curves = Vec::new();
            let mut triples = Vec::new();
            for (region, kids, label) in [(&full, &child_full, "G"), (&trunc, &child_trunc, "G~")] {
                let vr = restrict_potential(&full, &v, region)?;
                for bc in BoundaryCondition::ALL {
                    let parent = counts(&assemble(region, bc, &vr)?, grid)?;
                    let kid_counts = kids
                        .iter()
                        .map(|k| counts(&assemble(k, bc, &restrict_potential(&full, &v, k)?)?, grid))
                        .collect::<Result<Vec<_>>>()?;
                    let name = format!("{label}/{}", bc.short_name());
                    triples.push(LemmaCheckRecord::new(
                        "4.1-children",
                        format!("{tag} X={name}"),
                        max_abs_diff(&parent, &sum_counts(&kid_counts)),
                        30.0,
                    ));
                    names.push(name);
                    curves.push(parent);
                }
            }
            let mut out = Vec::new();
            for i in 0..curves.len() {
                for j in i + 1..curves.len() {
                    out.push(LemmaCheckRecord::new(
                        "4.1-pair",
                        format!("{tag} X={} Y={}", names[i], names[j]),
                        max_abs_diff(&curves[i], &curves[j]),
                        9.0,
                    ));
                }
            }
            out.extend(triples);
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Gaussian orthogonal ensemble sample scaled to spectral radius about 10.
pub fn goe_matrix(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let scale = 5.0 / (n.max(1) as f64).sqrt() / std::f64::consts::SQRT_2;
    (&g + g.transpose()) * scale
}

fn random_energies(rng: &mut impl Rng, n: usize, radius: f64) -> Vec<f64> {
    let mut e: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..radius)).collect();
    e.sort_by(f64::total_cmp);
    e
}

fn sorted_counts(eig: &[f64], grid: &[f64]) -> Vec<usize> {
    grid.iter().map(|&e| count_sorted(eig, e)).collect()
}

fn principal(m: &DMatrix<f64>, keep: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])])
}

/// Max over the grid of `a - b` (0 if never positive).
fn max_excess(a: &[usize], b: &[usize]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x as i64 - *y as i64).max(0)).max().unwrap_or(0) as f64
}

/// Projection and diagonal-perturbation interlacing, and the cover /
/// orthogonal-sum counting inequalities, on random symmetric matrices.
pub fn verify_interlacing_lemmas(dim: usize, trials: usize, seed: u64) -> Result<Vec<LemmaCheckRecord>> {
    if !(2..=200).contains(&dim) {
        return Err(GasketError::InvalidArguments(format!("dimension {dim} outside 2..=200")));
    }
    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let tag = format!("dim={dim} seed={seed} trial={trial}");
            let h = goe_matrix(dim, &mut rng);
            let grid = random_energies(&mut rng, 100, 12.0);
            let base = sorted_counts(&symmetric_eigenvalues(h.clone()), &grid);
            let mut out = Vec::new();

            // Projection onto a random coordinate subspace.
            let codim = 1 + (trial as usize % 5).min(dim - 2);
            let mut idx: Vec<usize> = (0..dim).collect();
            shuffle(&mut idx, &mut rng);
            let mut keep = idx[codim..].to_vec();
            keep.sort_unstable();
            let proj = sorted_counts(&symmetric_eigenvalues(principal(&h, &keep)), &grid);
            out.push(LemmaCheckRecord::new("A.1-projection-lower", format!("{tag} codim={codim}"), max_excess(&proj, &base), 0.0));
            out.push(LemmaCheckRecord::new(
                "A.1-projection-upper",
                format!("{tag} codim={codim}"),
                base.iter().zip(&proj).map(|(b, p)| *b as f64 - *p as f64).fold(0.0, f64::max),
                codim as f64,
            ));

            // Rank-m diagonal perturbation.
            let m = trial as usize % 4;
            let mut h2 = h.clone();
            for &i in &idx[..m] {
                h2[(i, i)] += 10.0 * rng.sample::<f64, _>(StandardNormal);
            }
            let pert = sorted_counts(&symmetric_eigenvalues(h2), &grid);
            out.push(LemmaCheckRecord::new("A.1-diagonal", format!("{tag} rank={m}"), max_abs_diff(&base, &pert), m as f64));

            // Overlapping cover with H ⪰ Σ Pᵢ* Hᵢ Pᵢ.
            let k = 2 + trial as usize % 3;
            let sets = random_cover(dim, k, 0.2, &mut rng);
            let blocks: Vec<DMatrix<f64>> = sets.iter().map(|s| goe_matrix(s.len(), &mut rng)).collect();
            let slack = random_gram(dim, 3, &mut rng);
            let mut cover = embed_sum(dim, &sets, &blocks);
            cover += &slack;
            // With overlapping pieces the cover bound needs E ≥ 0.
            let mut nonneg: Vec<f64> = grid.iter().map(|e| e.abs()).collect();
            nonneg.sort_by(f64::total_cmp);
            let lhs = sorted_counts(&symmetric_eigenvalues(cover), &nonneg);
            let rhs = sum_counts(&blocks.iter().map(|b| sorted_counts(&symmetric_eigenvalues(b.clone()), &nonneg)).collect::<Vec<_>>());
            out.push(LemmaCheckRecord::new("A.2-cover", format!("{tag} pieces={k}"), max_excess(&lhs, &rhs), 0.0));

            // Orthogonal pieces with H ⪯ ⊕ Hᵢ.
            let parts = random_cover(dim, k, 0.0, &mut rng);
            let blocks: Vec<DMatrix<f64>> = parts.iter().map(|s| goe_matrix(s.len(), &mut rng)).collect();
            let slack = random_gram(dim, 3, &mut rng);
            let mut sum = embed_sum(dim, &parts, &blocks);
            sum -= &slack;
            let lhs = sorted_counts(&symmetric_eigenvalues(sum), &grid);
            let rhs = sum_counts(&blocks.iter().map(|b| sorted_counts(&symmetric_eigenvalues(b.clone()), &grid)).collect::<Vec<_>>());
            out.push(LemmaCheckRecord::new("A.3-orthogonal", format!("{tag} pieces={k}"), max_excess(&rhs, &lhs), 0.0));
            out
        })
        .collect::<Vec<_>>();
    Ok(per_trial.into_iter().flatten().collect())
}

fn shuffle(v: &mut [usize], rng: &mut impl Rng) {
    for i in (1..v.len()).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
}

/// `k` nonempty index sets covering `0..n`; each index joins one extra set
/// with probability `overlap`.
fn random_cover(n: usize, k: usize, overlap: f64, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let mut sets = vec![Vec::new(); k];
    for i in 0..n {
        let home = if i < k { i } else { rng.random_range(0..k) };
        sets[home].push(i);
        if overlap > 0.0 && rng.random::<f64>() < overlap {
            let other = rng.random_range(0..k);
            if other != home {
                sets[other].push(i);
            }
        }
    }
    for s in &mut sets {
        s.sort_unstable();
    }
    sets
}

fn random_gram(n: usize, rank: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, rank, |_, _| rng.sample(StandardNormal));
    &g * g.transpose()
}

fn embed_sum(n: usize, sets: &[Vec<usize>], blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for (s, b) in sets.iter().zip(blocks) {
        for (a, &i) in s.iter().enumerate() {
            for (c, &j) in s.iter().enumerate() {
                m[(i, j)] += b[(a, c)];
            }
        }
    }
    m
}

/// Counting inequalities for the two gasket partitions of `𝔾_L` into
/// `2^l`-triangles, with the potential restricted to each piece.
///
/// Cover: `-Δ^{𝔾_L,N} + Ṽ`, with `Ṽ` multiplied by the number of pieces
/// containing a vertex, has a quadratic form equal to the sum over pieces,
/// so its count is at most the summed piece counts. Disjoint: every cut edge
/// `x ~ y` satisfies `(f(x) - f(y))² ≤ 2f(x)² + 2f(y)²`, so `H^{𝔾_L,N}` is
/// dominated by the pieces (truncated triangles and residual singletons)
/// with `2` added per cut edge, and its count is at least their sum.
pub fn verify_gasket_bracketing(
    level: u32,
    piece_level: u32,
    spec: &PotentialSpec,
    trials: usize,
    grid: &[f64],
) -> Result<Vec<LemmaCheckRecord>> {
    check_grid(grid)?;
    if piece_level == 0 || piece_level > level {
        return Err(GasketError::InvalidArguments(format!(
            "piece level {piece_level} must lie in 1..={level}"
        )));
    }
    let full = build_triangle(TriangleSpec::new(level))?;
    let cover = subdivide(&full, piece_level, PartitionKind::CoverP)?;
    let disjoint = subdivide(&full, piece_level, PartitionKind::DisjointPtilde)?;
    let cover_regions: Vec<LatticeRegion> = cover.pieces.iter().map(|p| build_triangle(*p)).collect::<Result<_>>()?;
    let disjoint_regions: Vec<LatticeRegion> =
        disjoint.pieces.iter().map(|p| build_triangle(*p)).collect::<Result<_>>()?;
    let mut multiplicity = vec![0.0; full.len()];
    for r in &cover_regions {
        for c in r.vertices() {
            multiplicity[full.index_of(*c).expect("piece inside parent")] += 1.0;
        }
    }
    let full_deg = full.region_degree();

    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Vec<LemmaCheckRecord>> {
            let v = sample_potential_trial(&full, spec, trial)?;
            let tag = format!("L={level} l={piece_level} seed={} trial={trial}", spec.seed);

            let weighted: Vec<f64> = v.iter().zip(&multiplicity).map(|(a, m)| a * m).collect();
            let lhs = counts(&assemble(&full, BoundaryCondition::Neumann, &weighted)?, grid)?;
            let pieces = cover_regions
                .iter()
                .map(|r| counts(&assemble(r, BoundaryCondition::Neumann, &restrict_potential(&full, &v, r)?)?, grid))
                .collect::<Result<Vec<_>>>()?;
            let cover_rec = LemmaCheckRecord::new("A.2-gasket-cover", tag.clone(), max_excess(&lhs, &sum_counts(&pieces)), 0.0);

            let h = counts(&assemble(&full, BoundaryCondition::Neumann, &v)?, grid)?;
            let mut parts = disjoint_regions
                .iter()
                .map(|r| {
                    let mut w = restrict_potential(&full, &v, r)?;
                    for (k, c) in r.vertices().iter().enumerate() {
                        let cut = full_deg[full.index_of(*c).expect("piece inside parent")] - r.region_degree()[k];
                        w[k] += 2.0 * cut as f64;
                    }
                    counts(&assemble(r, BoundaryCondition::Neumann, &w)?, grid)
                })
                .collect::<Result<Vec<_>>>()?;
            let residual_diag: Vec<f64> = disjoint
                .residual
                .iter()
                .map(|c| {
                    let i = full.index_of(*c).expect("residual inside parent");
                    v[i] + 2.0 * full_deg[i] as f64
                })
                .collect();
            let mut residual_diag = residual_diag;
            residual_diag.sort_by(f64::total_cmp);
            parts.push(sorted_counts(&residual_diag, grid));
            let disjoint_rec =
                LemmaCheckRecord::new("A.3-gasket-disjoint", tag, max_excess(&sum_counts(&parts), &h), 0.0);
            Ok(vec![cover_rec, disjoint_rec])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// Ascending eigenvalues of `AB` for symmetric positive semidefinite `A`,
/// `B`, via the similar symmetric matrix `B^{1/2} A B^{1/2}`.
pub fn psd_product_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let eb = b.clone().symmetric_eigen();
    let sqrt_vals = eb.eigenvalues.map(|x| x.max(0.0).sqrt());
    let root = &eb.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eb.eigenvectors.transpose();
    let c = &root * a * &root;
    symmetric_eigenvalues((&c + c.transpose()) * 0.5)
}

/// Real parts of the eigenvalues of `AB` from a general (Schur) solve,
/// ascending, with the largest imaginary part seen.
pub fn product_eigenvalues_schur(a: &DMatrix<f64>, b: &DMatrix<f64>) -> (Vec<f64>, f64) {
    let ev = (a * b).complex_eigenvalues();
    let max_imag = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let mut re: Vec<f64> = ev.iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    (re, max_imag)
}

/// Largest violation of `E₀(A)E_j(B) ≤ E_j(AB) ≤ E_{n-1}(A)E_j(B)`,
/// relative to `E_{n-1}(A)E_{n-1}(B)`; zero when the bounds hold.
pub fn psd_product_violation(a: &DMatrix<f64>, b: &DMatrix<f64>, ab: &[f64]) -> f64 {
    let ea = symmetric_eigenvalues(a.clone());
    let eb = symmetric_eigenvalues(b.clone());
    let (amin, amax) = (ea[0], ea[ea.len() - 1]);
    let scale = (amax * eb[eb.len() - 1]).abs().max(f64::MIN_POSITIVE);
    ab.iter()
        .zip(&eb)
        .map(|(&x, &e)| ((amin * e - x).max(x - amax * e)).max(0.0) / scale)
        .fold(0.0, f64::max)
}

/// Relative tolerance for the product bounds.
pub const PSD_TOLERANCE: f64 = 1e-9;

/// Product bounds on random Wishart pairs, with the similarity route checked
/// against a general nonsymmetric solve.
pub fn verify_psd_product_bounds(dim: usize, trials: usize, seed: u64) -> Result<Vec<LemmaCheckRecord>> {
    if !(1..=100).contains(&dim) {
        return Err(GasketError::InvalidArguments(format!("dimension {dim} outside 1..=100")));
    }
    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let tag = format!("dim={dim} seed={seed} trial={trial}");
            let extra = trial as usize % 3;
            let wishart = |rng: &mut ChaCha8Rng| {
                let g = DMatrix::<f64>::from_fn(dim, dim + extra, |_, _| rng.sample(StandardNormal));
                (&g * g.transpose()) / (dim + extra) as f64
            };
            let a = wishart(&mut rng);
            let b = wishart(&mut rng);
            let ab = psd_product_eigenvalues(&a, &b);
            let (schur, imag) = product_eigenvalues_schur(&a, &b);
            let scale = ab.last().copied().unwrap_or(1.0).abs().max(f64::MIN_POSITIVE);
            let agreement = ab
                .iter()
                .zip(&schur)
                .map(|(x, y)| (x - y).abs())
                .fold(imag, f64::max)
                / scale;
            vec![
                LemmaCheckRecord::new("C-product-bounds", tag.clone(), psd_product_violation(&a, &b, &ab), PSD_TOLERANCE),
                LemmaCheckRecord::new("C-routes-agree", tag, agreement, 1e-8),
            ]
        })
        .collect::<Vec<_>>();
    Ok(per_trial.into_iter().flatten().collect())
}

/// Residual `‖(-Δ - 6) f‖ / ‖f‖` of a vector given on `region`, extended by
/// zero into `host` and measured with the simple Laplacian of `host`.
fn zero_extension_residual(
    region: &LatticeRegion,
    f: &[f64],
    host: &LatticeRegion,
    host_op: &HamiltonianMatrix,
    map: impl Fn(Coord) -> Coord,
) -> f64 {
    let mut g = vec![0.0; host.len()];
    for (c, &x) in region.vertices().iter().zip(f) {
        if x != 0.0 {
            match host.index_of(map(*c)) {
                Some(i) => g[i] = x,
                None => return f64::INFINITY,
            }
        }
    }
    let r = host_op.symmetric_apply(&g);
    let num: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let den: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    num / den
}

/// Orthonormal basis of `{f : M f = 0}` for `M` = the rows of
/// `-Δ^{S} - 6` on `region`, restricted to the columns in `support`.
fn kernel_at_six(region: &LatticeRegion, support: &[usize]) -> Vec<Vec<f64>> {
    if support.is_empty() {
        return Vec::new();
    }
    let op = free_laplacian(region, BoundaryCondition::Simple).shifted(-6.0).to_dense();
    let cols = DMatrix::from_fn(region.len(), support.len(), |i, k| op[(i, support[k])]);
    let svd = cols.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.max();
    let mut basis = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= 1e-10 * smax.max(1.0) {
            let mut f = vec![0.0; region.len()];
            for (c, &col) in support.iter().enumerate() {
                let x = v_t[(k, c)];
                // Support pruning.
                f[col] = if x.abs() < 1e-12 { 0.0 } else { x };
            }
            basis.push(f);
        }
    }
    basis
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationCheck {
    pub target: TriangleSpec,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SixKernelReport {
    pub level: u32,
    /// Kernel vectors on `B_L`, canonical vertex order.
    pub basis: Vec<Vec<f64>>,
    /// Largest residual of the zero extensions into `B_{L+1}`.
    pub max_residual: f64,
    pub triangle: TriangleSpec,
    pub triangle_kernel_dim: usize,
    pub translated: Vec<TranslationCheck>,
    pub max_translated_residual: f64,
    /// Residual of the constant vector on `B_L`; must be far from zero.
    pub constant_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Residual tolerance for eigenvalue-6 eigenfunctions.
pub const SIX_TOLERANCE: f64 = 1e-8;

/// Compactly supported eigenfunctions of `-Δ` at eigenvalue 6.
///
/// The kernel of `-Δ^{B_L,S} - 6` is computed on vectors vanishing on the
/// interior boundary of `B_L` and its neighbours, so the zero extension is an
/// eigenfunction of the lattice operator; this is checked on `B_{L+1}`.
/// A kernel vector of one `2^l`-triangle, `l = max(L - 1, 2)`, vanishing at
/// its corners, is then translated onto every `2^l`-triangle of `B_{L+1}`.
pub fn compact_eigenfunction_at_six(level: u32) -> Result<SixKernelReport> {
    if level < 2 {
        return Err(GasketError::InvalidArguments("eigenvalue-6 kernel needs level >= 2".into()));
    }
    let ball = build_ball(level)?;
    let host = build_ball(level + 1)?;
    let host_op = free_laplacian(&host, BoundaryCondition::Simple).shifted(-6.0);

    let mut excluded = vec![false; ball.len()];
    let nbrs = ball.neighbors();
    for &b in ball.interior_boundary() {
        excluded[b] = true;
        for &n in &nbrs[b] {
            excluded[n] = true;
        }
    }
    let support: Vec<usize> = (0..ball.len()).filter(|&i| !excluded[i]).collect();
    let basis = kernel_at_six(&ball, &support);
    let max_residual = basis
        .iter()
        .map(|f| zero_extension_residual(&ball, f, &host, &host_op, |c| c))
        .fold(0.0, f64::max);

    let tri_level = (level - 1).max(2);
    let triangle = TriangleSpec::new(tri_level);
    let tri = build_triangle(triangle)?;
    let corners = triangle.extreme_vertices();
    let tri_support: Vec<usize> =
        (0..tri.len()).filter(|&i| !corners.contains(&tri.vertices()[i])).collect();
    let tri_basis = kernel_at_six(&tri, &tri_support);

    let host_triangle = build_triangle(TriangleSpec::new(level + 1))?;
    let mut targets = subdivide(&host_triangle, tri_level, PartitionKind::CoverP)?.pieces;
    let mirrored: Vec<TriangleSpec> = targets.iter().map(|t| t.mirrored(true)).collect();
    targets.extend(mirrored);
    let mut translated = Vec::new();
    if let Some(phi) = tri_basis.first() {
        for target in targets {
            let map = translation_map(&triangle, &target)?;
            let residual = zero_extension_residual(&tri, phi, &host, &host_op, |c| map.apply(c));
            translated.push(TranslationCheck { target, residual });
        }
    }
    let max_translated_residual = translated.iter().map(|t| t.residual).fold(0.0, f64::max);

    let ones = vec![1.0; ball.len()];
    let ball_op = free_laplacian(&ball, BoundaryCondition::Simple).shifted(-6.0);
    let r = ball_op.symmetric_apply(&ones);
    let constant_residual = (r.iter().map(|v| v * v).sum::<f64>() / ball.len() as f64).sqrt();

    let pass = !basis.is_empty()
        && max_residual <= SIX_TOLERANCE
        && !translated.is_empty()
        && max_translated_residual <= SIX_TOLERANCE
        && constant_residual > SIX_TOLERANCE;
    Ok(SixKernelReport {
        level,
        basis,
        max_residual,
        triangle,
        triangle_kernel_dim: tri_basis.len(),
        translated,
        max_translated_residual,
        constant_residual,
        tolerance: SIX_TOLERANCE,
        pass,
    })
}

/// Containment tolerance for eigenvalues.
pub const CONTAINMENT_TOLERANCE: f64 = 1e-9;

/// Backward-orbit points used for the free spectrum in proximity checks.
pub const JULIA_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub level: u32,
    pub potential: String,
    pub eigenvalue_count: usize,
    /// Allowed set `[0, 6] + supp P₀` as sorted intervals.
    pub allowed: Vec<(f64, f64)>,
    /// Largest distance of an eigenvalue outside the allowed set.
    pub max_excursion: f64,
    pub containment_pass: bool,
    pub decimation_depth: u32,
    /// Largest distance from a point of `σ(-Δ) + supp P₀` to the spectrum,
    /// when the support is an interval.
    pub proximity: Option<f64>,
    /// Point of `σ(-Δ) + supp P₀` attaining `proximity`.
    pub proximity_location: Option<f64>,
    pub proximity_tolerance: f64,
    pub proximity_pass: bool,
    pub pass: bool,
}

fn lo_of(iv: &[(f64, f64)]) -> f64 {
    iv.first().map_or(0.0, |i| i.0)
}

fn merge_intervals(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in iv {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Largest distance from a point of the interval `[lo, hi]` to the sorted
/// set `eig`, with a point attaining it.
fn interval_to_set_distance(lo: f64, hi: f64, eig: &[f64]) -> (f64, f64) {
    let mut candidates = vec![lo, hi];
    let start = eig.partition_point(|&x| x < lo);
    let end = eig.partition_point(|&x| x <= hi);
    for w in eig[start.saturating_sub(1)..(end + 1).min(eig.len())].windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if mid > lo && mid < hi {
            candidates.push(mid);
        }
    }
    candidates
        .into_iter()
        .map(|c| (decimation::directed_distance(&[c], eig), c))
        .fold((0.0, lo), |best, cur| if cur.0 > best.0 { cur } else { best })
}

/// Finite-volume spectrum checks on `H^{B_L,S}` with one sampled potential:
/// every eigenvalue lies in `[0, 6] + supp P₀`, and for interval support
/// every point of `σ(-Δ) + supp P₀` (decimation set to `depth`) is within
/// `proximity_tolerance` of an eigenvalue.
pub fn spectrum_containment_check(
    level: u32,
    spec: &PotentialSpec,
    depth: u32,
    proximity_tolerance: f64,
) -> Result<ContainmentReport> {
    let ball = build_ball(level)?;
    let v = sample_potential_trial(&ball, spec, 0)?;
    let h = assemble(&ball, BoundaryCondition::Simple, &v)?;
    let eig = eigenvalues_dense(&h)?;
    let components = spec.support_components();
    let allowed = merge_intervals(components.iter().map(|&(a, b)| (a, b + 6.0)).collect());
    let max_excursion = eig
        .iter()
        .map(|&x| {
            allowed
                .iter()
                .map(|&(lo, hi)| if x < lo { lo - x } else if x > hi { x - hi } else { 0.0 })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let containment_pass = max_excursion <= CONTAINMENT_TOLERANCE;

    let proximity = match components.as_slice() {
        [(a, b)] => {
            let free = decimation::free_spectrum_approx(depth, JULIA_POINTS, spec.seed)?.combinatorial();
            let shifted = merge_intervals(free.iter().map(|&x| (x + a, x + b)).collect());
            Some(
                shifted
                    .iter()
                    .map(|&(lo, hi)| interval_to_set_distance(lo, hi, &eig))
                    .fold((0.0, lo_of(&shifted)), |best, cur| if cur.0 > best.0 { cur } else { best }),
            )
        }
        _ => None,
    };
    let (proximity, proximity_location) = (proximity.map(|p| p.0), proximity.map(|p| p.1));
    let proximity_pass = proximity.is_none_or(|d| d <= proximity_tolerance);
    Ok(ContainmentReport {
        level,
        potential: spec.distribution.to_string(),
        eigenvalue_count: eig.len(),
        allowed,
        max_excursion,
        containment_pass,
        decimation_depth: depth,
        proximity,
        proximity_location,
        proximity_tolerance,
        proximity_pass,
        pass: containment_pass && proximity_pass,
    })
}

/// Region kinds used in instance labels.
pub fn region_label(region: &LatticeRegion) -> String {
    match region.kind() {
        RegionKind::Triangle(s) if s.truncated => format!("G~_{}", s.level),
        RegionKind::Triangle(s) => format!("G_{}", s.level),
        RegionKind::Ball { level } => format!("B_{level}"),
        RegionKind::Custom => "custom".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{probabilistic_laplacian, Distribution};

    fn diag3() -> HamiltonianMatrix {
        HamiltonianMatrix::from_triplets(3, [(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0)]).unwrap()
    }

    #[test]
    fn dense_small_cases() {
        assert_eq!(eigenvalues_dense(&diag3()).unwrap(), vec![1.0, 2.0, 3.0]);
        let g0 = build_triangle(TriangleSpec::new(0)).unwrap();
        let e = eigenvalues_dense(&free_laplacian(&g0, BoundaryCondition::Neumann)).unwrap();
        assert!((e[0]).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12 && (e[2] - 3.0).abs() < 1e-12);
        assert!(matches!(eigenvalues_dense_with(&diag3(), 2), Err(GasketError::Capacity(_))));
    }

    #[test]
    fn probabilistic_level_one_set() {
        let g1 = build_triangle(TriangleSpec::new(1)).unwrap();
        let e = eigenvalues_dense(&probabilistic_laplacian(&g1).unwrap()).unwrap();
        for x in e {
            assert!([0.0, 0.75, 1.5].iter().any(|y| (x - y).abs() < 1e-9), "{x}");
        }
    }

    #[test]
    fn count_below_small_cases() {
        assert_eq!(count_below(&diag3(), 2.5).unwrap(), 2);
        assert_eq!(count_below(&diag3(), 2.0).unwrap(), 2);
        assert_eq!(count_below(&diag3(), 0.0).unwrap(), 0);
        let g0 = build_triangle(TriangleSpec::new(0)).unwrap();
        let h = free_laplacian(&g0, BoundaryCondition::Simple);
        assert_eq!(count_below(&h, 4.0).unwrap(), 1);
        assert_eq!(count_below(&h, 5.0).unwrap(), 3);
    }

    #[test]
    fn count_below_matches_dense_on_gasket() {
        let g5 = build_triangle(TriangleSpec::new(5)).unwrap();
        let spec = PotentialSpec::new(Distribution::Uniform { a: 0.0, b: 1.0 }, 9);
        let v = sample_potential_trial(&g5, &spec, 0).unwrap();
        let h = assemble(&g5, BoundaryCondition::ModifiedDirichlet, &v).unwrap();
        let eig = eigenvalues_dense(&h).unwrap();
        let mut rng = trial_rng(1, 0);
        for _ in 0..50 {
            let e = rng.random_range(-1.0..10.0);
            assert_eq!(count_below(&h, e).unwrap(), count_sorted(&eig, e), "E={e}");
        }
        // At eigenvalues the tie guard counts them.
        for &x in eig.iter().step_by(37) {
            assert_eq!(count_below(&h, x).unwrap(), count_sorted(&eig, x));
        }
    }

    #[test]
    fn count_below_at_degenerate_free_eigenvalues() {
        // 3, 5 and 6 carry most of the free spectrum.
        for region in [build_triangle(TriangleSpec::new(5)).unwrap(), build_ball(4).unwrap()] {
            for bc in BoundaryCondition::ALL {
                let h = free_laplacian(&region, bc);
                let eig = eigenvalues_dense(&h).unwrap();
                for e in [3.0, 5.0, 6.0, 3.0 - 1e-6, 5.0 + 1e-6] {
                    assert_eq!(count_below(&h, e).unwrap(), count_sorted(&eig, e), "{bc} E={e}");
                }
            }
        }
    }

    #[test]
    fn block_and_pivoted_paths_agree() {
        let g = build_ball(3).unwrap();
        let spec = PotentialSpec::new(Distribution::Bernoulli { a: 0.0, b: 10.0, prob_b: 0.5 }, 4);
        let h = assemble(&g, BoundaryCondition::Neumann, &sample_potential_trial(&g, &spec, 0).unwrap()).unwrap();
        let plain = HamiltonianMatrix::from_dense(&h.to_dense()).unwrap();
        assert!(plain.dissection_ranks().is_none());
        for e in uniform_grid(-1.0, 17.0, 37) {
            assert_eq!(count_below(&h, e).unwrap(), count_below(&plain, e).unwrap(), "E={e}");
        }
    }

    #[test]
    fn count_below_indefinite_dense() {
        let mut rng = trial_rng(3, 0);
        let m = goe_matrix(40, &mut rng);
        let h = HamiltonianMatrix::from_dense(&m).unwrap();
        let eig = symmetric_eigenvalues(m);
        for e in uniform_grid(-12.0, 12.0, 49) {
            assert_eq!(count_below(&h, e).unwrap(), count_sorted(&eig, e));
        }
    }

    #[test]
    fn counting_curve_endpoints() {
        let g3 = build_triangle(TriangleSpec::new(3)).unwrap();
        let h = free_laplacian(&g3, BoundaryCondition::Simple);
        let c = counting_curve(&h, &uniform_grid(-1.0, 9.0, 41)).unwrap();
        assert!(c.is_monotone());
        assert_eq!(c.counts[0], 0);
        assert_eq!(*c.counts.last().unwrap(), g3.len());
        assert!(counting_curve(&h, &[1.0, 0.0]).is_err());
        assert!(c.to_csv().starts_with("E,count\n"));
    }

    #[test]
    fn lemma_4_1_free_level_three() {
        let spec = PotentialSpec::new(Distribution::Constant(0.0), 0);
        let recs = verify_lemma_4_1(3, &spec, 1, &uniform_grid(0.0, 8.0, 64)).unwrap();
        assert_eq!(recs.len(), 21);
        assert!(recs.iter().all(|r| r.pass), "{recs:?}");
    }

    #[test]
    fn interlacing_small() {
        let recs = verify_interlacing_lemmas(30, 8, 5).unwrap();
        assert!(recs.iter().all(|r| r.pass), "{recs:?}");
        let zero: Vec<_> = recs.iter().filter(|r| r.lemma == "A.1-diagonal" && r.instance.ends_with("rank=0")).collect();
        assert!(zero.iter().all(|r| r.max_deviation == 0.0));
    }

    #[test]
    fn gasket_bracketing_small() {
        let spec = PotentialSpec::new(Distribution::Uniform { a: 0.0, b: 1.0 }, 2);
        let recs = verify_gasket_bracketing(3, 1, &spec, 3, &uniform_grid(0.0, 9.0, 32)).unwrap();
        assert!(recs.iter().all(|r| r.pass), "{recs:?}");
    }

    #[test]
    fn psd_identity_and_scaling() {
        let mut rng = trial_rng(4, 0);
        let g = DMatrix::<f64>::from_fn(6, 6, |_, _| rng.sample(StandardNormal));
        let b = &g * g.transpose();
        let eb = symmetric_eigenvalues(b.clone());
        let id = DMatrix::<f64>::identity(6, 6);
        let e1 = psd_product_eigenvalues(&id, &b);
        let e2 = psd_product_eigenvalues(&(id.clone() * 2.0), &b);
        for j in 0..6 {
            assert!((e1[j] - eb[j]).abs() < 1e-10 * eb[5]);
            assert!((e2[j] - 2.0 * eb[j]).abs() < 1e-10 * eb[5]);
        }
        let recs = verify_psd_product_bounds(12, 5, 1).unwrap();
        assert!(recs.iter().all(|r| r.pass), "{recs:?}");
    }

    #[test]
    fn six_kernel_level_three() {
        let rep = compact_eigenfunction_at_six(3).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(compact_eigenfunction_at_six(1).is_err());
    }

    #[test]
    fn interval_distance() {
        assert_eq!(interval_to_set_distance(0.0, 1.0, &[0.0, 1.0]), (0.5, 0.5));
        assert_eq!(interval_to_set_distance(0.0, 1.0, &[0.5]), (0.5, 0.0));
        assert_eq!(interval_to_set_distance(2.0, 2.0, &[0.5]), (1.5, 2.0));
    }
}
