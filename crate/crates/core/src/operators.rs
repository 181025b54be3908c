//! Random potentials and finite-volume Hamiltonians `H = -Δ + V`.
//!
//! All three boundary conditions share the off-diagonal part (`-1` per region
//! edge) and differ only on the diagonal:
//!
//! | condition          | diagonal at `x`               |
//! |--------------------|-------------------------------|
//! | simple             | `deg(x)`                      |
//! | Neumann            | `deg_A(x)`                    |
//! | modified Dirichlet | `2 deg(x) - deg_A(x)`         |
//!
//! where `deg` is the degree in the ambient lattice and `deg_A` the degree
//! inside the region.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GasketError, Result};
use crate::lattice::LatticeRegion;

/// Formats a float with 17 significant digits (exact round trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Simple,
    Neumann,
    ModifiedDirichlet,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 3] =
        [BoundaryCondition::Simple, BoundaryCondition::Neumann, BoundaryCondition::ModifiedDirichlet];

    /// Laplacian diagonal entry for a vertex with ambient degree `full` and
    /// region degree `inside`.
    pub fn diagonal(self, full: u8, inside: u8) -> f64 {
        let (full, inside) = (full as f64, inside as f64);
        match self {
            BoundaryCondition::Simple => full,
            BoundaryCondition::Neumann => inside,
            BoundaryCondition::ModifiedDirichlet => 2.0 * full - inside,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            BoundaryCondition::Simple => "S",
            BoundaryCondition::Neumann => "N",
            BoundaryCondition::ModifiedDirichlet => "D",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Simple => "simple",
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::ModifiedDirichlet => "dirichlet",
        })
    }
}

impl FromStr for BoundaryCondition {
    type Err = GasketError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simple" | "s" => Ok(BoundaryCondition::Simple),
            "neumann" | "n" => Ok(BoundaryCondition::Neumann),
            "dirichlet" | "modified-dirichlet" | "d" => Ok(BoundaryCondition::ModifiedDirichlet),
            other => Err(GasketError::InvalidArguments(format!("unknown boundary condition `{other}`"))),
        }
    }
}

/// Single-site distribution of the random potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Distribution {
    Constant(f64),
    /// Value `a` with probability `1 - prob_b`, value `b` with probability `prob_b`.
    Bernoulli { a: f64, b: f64, prob_b: f64 },
    Uniform { a: f64, b: f64 },
    /// Discrete law given by `(value, cumulative probability)` pairs.
    TableCdf(Vec<(f64, f64)>),
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GasketError::Validation(msg));
        match self {
            Distribution::Constant(c) if !c.is_finite() => bad(format!("constant {c} is not finite")),
            Distribution::Bernoulli { a, b, prob_b } => {
                if !(a.is_finite() && b.is_finite()) {
                    bad("bernoulli values must be finite".into())
                } else if !(0.0..=1.0).contains(prob_b) {
                    bad(format!("bernoulli probability {prob_b} outside [0, 1]"))
                } else {
                    Ok(())
                }
            }
            Distribution::Uniform { a, b } if !(a.is_finite() && b.is_finite() && a <= b) => {
                bad(format!("uniform bounds [{a}, {b}] are not an interval"))
            }
            Distribution::TableCdf(table) => {
                if table.is_empty() {
                    return bad("empty cdf table".into());
                }
                let mut prev: Option<(f64, f64)> = None;
                for &(v, c) in table {
                    if !v.is_finite() || !(0.0..=1.0).contains(&c) {
                        return bad(format!("cdf entry ({v}, {c}) out of range"));
                    }
                    if let Some((pv, pc)) = prev {
                        if v <= pv || c < pc {
                            return bad("cdf table must be strictly increasing in value and monotone in probability".into());
                        }
                    }
                    prev = Some((v, c));
                }
                let last = table[table.len() - 1].1;
                if (last - 1.0).abs() > 1e-12 {
                    return bad(format!("cdf table ends at {last}, expected 1"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Inverse CDF applied to `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Distribution::Constant(c) => *c,
            Distribution::Bernoulli { a, b, prob_b } => {
                if u < *prob_b {
                    *b
                } else {
                    *a
                }
            }
            Distribution::Uniform { a, b } => a + (b - a) * u,
            Distribution::TableCdf(table) => table
                .iter()
                .find(|(_, c)| u < *c)
                .unwrap_or(&table[table.len() - 1])
                .0,
        }
    }

    /// `(inf supp, sup supp)`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Distribution::Constant(c) => (*c, *c),
            Distribution::Bernoulli { a, b, prob_b } => {
                if *prob_b <= 0.0 {
                    (*a, *a)
                } else if *prob_b >= 1.0 {
                    (*b, *b)
                } else {
                    (a.min(*b), a.max(*b))
                }
            }
            Distribution::Uniform { a, b } => (*a, *b),
            Distribution::TableCdf(table) => {
                let mut prev = 0.0;
                let mut atoms = table.iter().filter_map(|&(v, c)| {
                    let mass = c - prev;
                    prev = c;
                    (mass > 0.0).then_some(v)
                });
                let lo = atoms.next().unwrap_or(table[0].0);
                let hi = atoms.last().unwrap_or(lo);
                (lo, hi)
            }
        }
    }

    /// Support as a sorted union of closed intervals; atoms are degenerate
    /// intervals.
    pub fn support_components(&self) -> Vec<(f64, f64)> {
        match self {
            Distribution::Constant(c) => vec![(*c, *c)],
            Distribution::Bernoulli { a, b, prob_b } => {
                if *prob_b <= 0.0 || a == b {
                    vec![(*a, *a)]
                } else if *prob_b >= 1.0 {
                    vec![(*b, *b)]
                } else {
                    let (lo, hi) = (a.min(*b), a.max(*b));
                    vec![(lo, lo), (hi, hi)]
                }
            }
            Distribution::Uniform { a, b } => vec![(*a, *b)],
            Distribution::TableCdf(table) => {
                let mut prev = 0.0;
                table
                    .iter()
                    .filter_map(|&(v, c)| {
                        let mass = c - prev;
                        prev = c;
                        (mass > 0.0).then_some((v, v))
                    })
                    .collect()
            }
        }
    }

    /// Probability of the smallest support point, `P(V = inf supp)`.
    pub fn mass_at_bottom(&self) -> f64 {
        match self {
            Distribution::Constant(_) => 1.0,
            Distribution::Bernoulli { a, b, prob_b } => {
                if a < b {
                    1.0 - prob_b
                } else if a > b {
                    *prob_b
                } else {
                    1.0
                }
            }
            Distribution::Uniform { a, b } => {
                if a == b {
                    1.0
                } else {
                    0.0
                }
            }
            Distribution::TableCdf(table) => {
                table.iter().map(|(_, c)| *c).find(|c| *c > 0.0).unwrap_or(0.0)
            }
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Constant(c) => write!(f, "const:{c}"),
            Distribution::Bernoulli { a, b, prob_b } => write!(f, "bernoulli:{a},{b},{prob_b}"),
            Distribution::Uniform { a, b } => write!(f, "uniform:{a},{b}"),
            Distribution::TableCdf(table) => {
                f.write_str("table:")?;
                let mut first = true;
                for (v, c) in table {
                    if !first {
                        f.write_str(",")?;
                    }
                    first = false;
                    write!(f, "{v}:{c}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Distribution {
    type Err = GasketError;

    /// Parses `const:c`, `bernoulli:a,b,p`, `uniform:a,b` or
    /// `table:v1:c1,v2:c2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let invalid = || GasketError::InvalidArguments(format!("cannot parse distribution `{s}`"));
        let (name, args) = s.split_once(':').ok_or_else(invalid)?;
        let numbers = |text: &str| -> Result<Vec<f64>> {
            text.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| invalid()))
                .collect()
        };
        let dist = match name.to_ascii_lowercase().as_str() {
            "const" | "constant" => match numbers(args)?.as_slice() {
                [c] => Distribution::Constant(*c),
                _ => return Err(invalid()),
            },
            "bernoulli" => match numbers(args)?.as_slice() {
                [a, b, p] => Distribution::Bernoulli { a: *a, b: *b, prob_b: *p },
                _ => return Err(invalid()),
            },
            "uniform" => match numbers(args)?.as_slice() {
                [a, b] => Distribution::Uniform { a: *a, b: *b },
                _ => return Err(invalid()),
            },
            "table" => {
                let mut table = Vec::new();
                for pair in args.split(',') {
                    let (v, c) = pair.split_once(':').ok_or_else(invalid)?;
                    table.push((
                        v.trim().parse().map_err(|_| invalid())?,
                        c.trim().parse().map_err(|_| invalid())?,
                    ));
                }
                Distribution::TableCdf(table)
            }
            _ => return Err(invalid()),
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// A seeded i.i.d. potential law, optionally scaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub distribution: Distribution,
    pub seed: u64,
    pub scale: f64,
}

impl PotentialSpec {
    pub fn new(distribution: Distribution, seed: u64) -> Self {
        PotentialSpec { distribution, seed, scale: 1.0 }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.scale.is_finite() {
            return Err(GasketError::Validation(format!("scale {} is not finite", self.scale)));
        }
        self.distribution.validate()
    }

    /// Support of the scaled law.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.distribution.support();
        let (a, b) = (lo * self.scale, hi * self.scale);
        (a.min(b), a.max(b))
    }

    /// Support components of the scaled law.
    pub fn support_components(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = self
            .distribution
            .support_components()
            .into_iter()
            .map(|(lo, hi)| {
                let (a, b) = (lo * self.scale, hi * self.scale);
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }

    /// `n` i.i.d. draws for the given trial. Draw `i` depends only on
    /// `(seed, trial, i)`: the trial selects an independent ChaCha stream and
    /// vertex `i` consumes the `i`-th word pair of that stream.
    pub fn sample(&self, n: usize, trial: u64) -> Result<Vec<f64>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        Ok((0..n)
            .map(|_| self.scale * self.distribution.quantile(rng.random::<f64>()))
            .collect())
    }
}

/// Potential on `region` for trial 0.
pub fn sample_potential(region: &LatticeRegion, spec: &PotentialSpec) -> Result<Vec<f64>> {
    spec.sample(region.len(), 0)
}

pub fn sample_potential_trial(region: &LatticeRegion, spec: &PotentialSpec, trial: u64) -> Result<Vec<f64>> {
    spec.sample(region.len(), trial)
}

/// Restriction of a potential sampled on `parent` to the vertices of `child`.
pub fn restrict_potential(parent: &LatticeRegion, values: &[f64], child: &LatticeRegion) -> Result<Vec<f64>> {
    if values.len() != parent.len() {
        return Err(GasketError::Validation(format!(
            "potential has length {}, parent region has {} vertices",
            values.len(),
            parent.len()
        )));
    }
    child
        .vertices()
        .iter()
        .map(|c| {
            parent.index_of(*c).map(|i| values[i]).ok_or_else(|| {
                GasketError::InvalidArguments(format!("vertex {c} is not in the parent region"))
            })
        })
        .collect()
}

/// What a [`HamiltonianMatrix`] represents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OperatorKind {
    Schrodinger(BoundaryCondition),
    /// `-Δ_p = -D Δ^N` with `D = diag(1/deg_A)`. Stored in the symmetric
    /// similar form `D^{1/2} (-Δ^N) D^{1/2}`; `inverse_degree` is `D`.
    Probabilistic { inverse_degree: Vec<f64> },
    Generic,
}

/// Sparse real symmetric operator with shared integer structure.
///
/// The pattern lists each off-diagonal position `(i, j)`, `i < j`, once. It
/// is reference-counted so that Monte-Carlo trials over one region share it.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    dim: usize,
    pattern: Arc<Vec<(usize, usize)>>,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    kind: OperatorKind,
    potential: Vec<f64>,
    ranks: Option<Arc<Vec<u8>>>,
}

impl HamiltonianMatrix {
    /// Symmetric matrix from `(i, j, value)` triplets; only one triangle needs
    /// to be given, entries on both sides are summed.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut diag = vec![0.0; dim];
        let mut off: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
        for (i, j, v) in triplets {
            if i >= dim || j >= dim {
                return Err(GasketError::Validation(format!("entry ({i}, {j}) outside dimension {dim}")));
            }
            if i == j {
                diag[i] += v;
            } else {
                *off.entry((i.min(j), i.max(j))).or_insert(0.0) += v;
            }
        }
        let (pattern, offdiag): (Vec<_>, Vec<_>) = off.into_iter().unzip();
        Ok(HamiltonianMatrix {
            dim,
            pattern: Arc::new(pattern),
            diag,
            offdiag,
            kind: OperatorKind::Generic,
            potential: vec![0.0; dim],
            ranks: None,
        })
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GasketError::Validation("matrix is not square".into()));
        }
        let n = m.nrows();
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in i..n {
                if m[(i, j)] != 0.0 || i == j {
                    triplets.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(n, triplets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn pattern(&self) -> &[(usize, usize)] {
        &self.pattern
    }

    pub fn offdiagonal(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn dissection_ranks(&self) -> Option<&[u8]> {
        self.ranks.as_deref().map(|v| v.as_slice())
    }

    /// Upper-triangle entries of the symmetric form, diagonal included,
    /// sorted by `(i, j)`.
    pub fn upper_entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out: Vec<(usize, usize, f64)> = self
            .diag
            .iter()
            .enumerate()
            .map(|(i, v)| (i, i, *v))
            .chain(self.pattern.iter().zip(&self.offdiag).map(|(&(i, j), v)| (i, j, *v)))
            .collect();
        out.sort_by_key(|a| (a.0, a.1));
        out
    }

    /// Product with the symmetric form.
    pub fn symmetric_apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "vector length must match the dimension");
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for (&(i, j), &v) in self.pattern.iter().zip(&self.offdiag) {
            y[i] += v * x[j];
            y[j] += v * x[i];
        }
        y
    }

    /// Product with the represented operator (for the probabilistic
    /// Laplacian this is the non-symmetric `-D Δ^N`).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            OperatorKind::Probabilistic { inverse_degree } => {
                let sqrt_d: Vec<f64> = inverse_degree.iter().map(|d| d.sqrt()).collect();
                let scaled: Vec<f64> = x.iter().zip(&sqrt_d).map(|(v, s)| v / s).collect();
                self.symmetric_apply(&scaled).iter().zip(&sqrt_d).map(|(v, s)| v * s).collect()
            }
            _ => self.symmetric_apply(x),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diag));
        for (&(i, j), &v) in self.pattern.iter().zip(&self.offdiag) {
            m[(i, j)] += v;
            m[(j, i)] += v;
        }
        m
    }

    /// Copy with `shift` added to every diagonal entry.
    pub fn shifted(&self, shift: f64) -> HamiltonianMatrix {
        let mut out = self.clone();
        out.diag.iter_mut().for_each(|d| *d += shift);
        out
    }

    /// Copy with a different potential on the same structure (Schrödinger
    /// operators only).
    pub fn with_potential(&self, potential: &[f64]) -> Result<HamiltonianMatrix> {
        if potential.len() != self.dim {
            return Err(GasketError::Validation(format!(
                "potential has length {}, operator has dimension {}",
                potential.len(),
                self.dim
            )));
        }
        let mut out = self.clone();
        for i in 0..self.dim {
            out.diag[i] = self.diag[i] - self.potential[i] + potential[i];
        }
        out.potential = potential.to_vec();
        Ok(out)
    }

    /// Principal submatrix on the given (sorted, distinct) indices.
    pub fn principal_submatrix(&self, keep: &[usize]) -> HamiltonianMatrix {
        let mut map = vec![usize::MAX; self.dim];
        for (k, &i) in keep.iter().enumerate() {
            map[i] = k;
        }
        let mut triplets: Vec<(usize, usize, f64)> =
            keep.iter().enumerate().map(|(k, &i)| (k, k, self.diag[i])).collect();
        for (&(i, j), &v) in self.pattern.iter().zip(&self.offdiag) {
            if map[i] != usize::MAX && map[j] != usize::MAX {
                triplets.push((map[i], map[j], v));
            }
        }
        let mut out = Self::from_triplets(keep.len(), triplets).expect("indices are in range");
        if let Some(ranks) = &self.ranks {
            out.ranks = Some(Arc::new(keep.iter().map(|&i| ranks[i]).collect()));
        }
        out
    }

    /// Coordinate text: `i j value` per upper-triangle entry, 0-based,
    /// diagonal included.
    pub fn export_coordinate(&self) -> String {
        let mut out = String::new();
        for (i, j, v) in self.upper_entries() {
            let _ = writeln!(out, "{i} {j} {}", fmt_f64(v));
        }
        out
    }

    /// Parse the coordinate text format. Lines starting with `#` are skipped;
    /// the dimension is one more than the largest index seen.
    pub fn parse_coordinate(text: &str) -> Result<HamiltonianMatrix> {
        let mut triplets = Vec::new();
        let mut dim = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || GasketError::Validation(format!("line {}: expected `i j value`", lineno + 1));
            let mut it = line.split_whitespace();
            let i: usize = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let j: usize = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let v: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if it.next().is_some() {
                return Err(bad());
            }
            if i > j {
                continue;
            }
            dim = dim.max(j + 1);
            triplets.push((i, j, v));
        }
        Self::from_triplets(dim, triplets)
    }
}

/// Reusable assembly data for one region and boundary condition.
#[derive(Debug, Clone)]
pub struct Assembler {
    bc: BoundaryCondition,
    pattern: Arc<Vec<(usize, usize)>>,
    laplacian_diag: Vec<f64>,
    ranks: Arc<Vec<u8>>,
}

impl Assembler {
    pub fn new(region: &LatticeRegion, bc: BoundaryCondition) -> Self {
        let laplacian_diag = region
            .full_degree()
            .iter()
            .zip(region.region_degree())
            .map(|(&full, &inside)| bc.diagonal(full, inside))
            .collect();
        Assembler {
            bc,
            pattern: Arc::new(region.edges().to_vec()),
            laplacian_diag,
            ranks: Arc::new(region.dissection_ranks().to_vec()),
        }
    }

    pub fn dim(&self) -> usize {
        self.laplacian_diag.len()
    }

    pub fn assemble(&self, potential: &[f64]) -> Result<HamiltonianMatrix> {
        if potential.len() != self.dim() {
            return Err(GasketError::Validation(format!(
                "potential has length {}, region has {} vertices",
                potential.len(),
                self.dim()
            )));
        }
        Ok(HamiltonianMatrix {
            dim: self.dim(),
            pattern: Arc::clone(&self.pattern),
            diag: self.laplacian_diag.iter().zip(potential).map(|(l, v)| l + v).collect(),
            offdiag: vec![-1.0; self.pattern.len()],
            kind: OperatorKind::Schrodinger(self.bc),
            potential: potential.to_vec(),
            ranks: Some(Arc::clone(&self.ranks)),
        })
    }
}

/// `H = -Δ^{A,bc} + V` on `region`.
pub fn assemble(region: &LatticeRegion, bc: BoundaryCondition, potential: &[f64]) -> Result<HamiltonianMatrix> {
    Assembler::new(region, bc).assemble(potential)
}

/// The free operator `-Δ^{A,bc}`.
pub fn free_laplacian(region: &LatticeRegion, bc: BoundaryCondition) -> HamiltonianMatrix {
    Assembler::new(region, bc).assemble(&vec![0.0; region.len()]).expect("dimensions agree")
}

/// `-Δ_p^{A,N}`, the Neumann Laplacian normalised by region degrees.
pub fn probabilistic_laplacian(region: &LatticeRegion) -> Result<HamiltonianMatrix> {
    let deg = region.region_degree();
    if let Some(i) = deg.iter().position(|&d| d == 0) {
        return Err(GasketError::Validation(format!(
            "vertex {} is isolated; the probabilistic Laplacian is undefined",
            region.vertices()[i]
        )));
    }
    let inverse_degree: Vec<f64> = deg.iter().map(|&d| 1.0 / d as f64).collect();
    let offdiag = region
        .edges()
        .iter()
        .map(|&(i, j)| -(inverse_degree[i] * inverse_degree[j]).sqrt())
        .collect();
    Ok(HamiltonianMatrix {
        dim: region.len(),
        pattern: Arc::new(region.edges().to_vec()),
        diag: vec![1.0; region.len()],
        offdiag,
        kind: OperatorKind::Probabilistic { inverse_degree },
        potential: vec![0.0; region.len()],
        ranks: Some(Arc::new(region.dissection_ranks().to_vec())),
    })
}

/// `⟨f, H f⟩` for the represented operator.
pub fn quadratic_form(h: &HamiltonianMatrix, f: &[f64]) -> Result<f64> {
    if f.len() != h.dim() {
        return Err(GasketError::Validation(format!(
            "vector has length {}, operator has dimension {}",
            f.len(),
            h.dim()
        )));
    }
    Ok(h.apply(f).iter().zip(f).map(|(a, b)| a * b).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_triangle, TriangleSpec};

    fn dense_eigs(h: &HamiltonianMatrix) -> Vec<f64> {
        let mut e: Vec<f64> = h.to_dense().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn unit_triangle_spectra_per_condition() {
        let g0 = build_triangle(TriangleSpec::new(0)).unwrap();
        let zero = vec![0.0; 3];
        let cases = [
            (BoundaryCondition::Neumann, [0.0, 3.0, 3.0]),
            (BoundaryCondition::Simple, [2.0, 5.0, 5.0]),
            (BoundaryCondition::ModifiedDirichlet, [4.0, 7.0, 7.0]),
        ];
        for (bc, want) in cases {
            let h = assemble(&g0, bc, &zero).unwrap();
            assert_close(&dense_eigs(&h), &want, 1e-12);
        }
    }

    #[test]
    fn assemble_rejects_wrong_length() {
        let g0 = build_triangle(TriangleSpec::new(0)).unwrap();
        assert!(matches!(
            assemble(&g0, BoundaryCondition::Simple, &[0.0; 4]),
            Err(GasketError::Validation(_))
        ));
    }

    #[test]
    fn probabilistic_laplacian_small_cases() {
        let g0 = build_triangle(TriangleSpec::new(0)).unwrap();
        let p = probabilistic_laplacian(&g0).unwrap();
        assert_close(&dense_eigs(&p), &[0.0, 1.5, 1.5], 1e-12);

        let g1 = build_triangle(TriangleSpec::new(1)).unwrap();
        let p1 = probabilistic_laplacian(&g1).unwrap();
        assert!((dense_eigs(&p1)[1] - 0.75).abs() < 1e-12);

        // Constant vectors are annihilated by the non-symmetric operator.
        let ones = vec![1.0; g1.len()];
        assert!(p1.apply(&ones).iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn probabilistic_rows_are_quarters_and_halves() {
        let g1 = build_triangle(TriangleSpec::new(1)).unwrap();
        let p = probabilistic_laplacian(&g1).unwrap();
        for i in 0..g1.len() {
            let mut e = vec![0.0; g1.len()];
            e[i] = 1.0;
            let col = p.apply(&e);
            for (k, v) in col.iter().enumerate() {
                if k != i && *v != 0.0 {
                    let expect = -1.0 / g1.region_degree()[k] as f64;
                    assert!((v - expect).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn isolated_vertex_is_rejected() {
        let g1 = build_triangle(TriangleSpec::new(1)).unwrap();
        let single = g1.induced(crate::lattice::RegionKind::Custom, |c| c == crate::lattice::Coord::ORIGIN);
        assert!(probabilistic_laplacian(&single).is_err());
    }

    #[test]
    fn quadratic_form_cases() {
        let g2 = build_triangle(TriangleSpec::new(2)).unwrap();
        let h = free_laplacian(&g2, BoundaryCondition::Neumann);
        let ones = vec![1.0; g2.len()];
        assert!(quadratic_form(&h, &ones).unwrap().abs() < 1e-12);
        for i in 0..g2.len() {
            let mut e = vec![0.0; g2.len()];
            e[i] = 1.0;
            assert_eq!(quadratic_form(&h, &e).unwrap(), g2.region_degree()[i] as f64);
        }
        assert!(quadratic_form(&h, &[1.0]).is_err());
    }

    #[test]
    fn distribution_parsing() {
        assert_eq!("const:0".parse::<Distribution>().unwrap(), Distribution::Constant(0.0));
        assert_eq!(
            "bernoulli:0,10,0.5".parse::<Distribution>().unwrap(),
            Distribution::Bernoulli { a: 0.0, b: 10.0, prob_b: 0.5 }
        );
        assert_eq!("uniform:0,1".parse::<Distribution>().unwrap(), Distribution::Uniform { a: 0.0, b: 1.0 });
        let t: Distribution = "table:0:0.25,1:0.75,3:1".parse().unwrap();
        assert_eq!(t.support(), (0.0, 3.0));
        assert_eq!(t.quantile(0.1), 0.0);
        assert_eq!(t.quantile(0.5), 1.0);
        assert_eq!(t.quantile(0.99), 3.0);
        for bad in ["table:0:0.5,1:0.4", "table:0:0.5", "table:1:0.5,0:1", "gauss:0,1", "uniform:1", "bernoulli:0,1,2"] {
            assert!(bad.parse::<Distribution>().is_err(), "{bad}");
        }
    }

    #[test]
    fn sampling_is_reproducible_and_stream_separated() {
        let spec = PotentialSpec::new(Distribution::Uniform { a: 0.0, b: 1.0 }, 42);
        let a = spec.sample(100, 3).unwrap();
        assert_eq!(a, spec.sample(100, 3).unwrap());
        assert_ne!(a, spec.sample(100, 4).unwrap());
        // Prefix property: vertex i's draw does not depend on the region size.
        assert_eq!(&spec.sample(200, 3).unwrap()[..100], &a[..]);
        assert!(a.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn constant_potential_and_scale() {
        let spec = PotentialSpec::new(Distribution::Constant(0.0), 1);
        assert!(spec.sample(10, 0).unwrap().iter().all(|v| *v == 0.0));
        let half = PotentialSpec::new(Distribution::Constant(4.0), 1).with_scale(0.5);
        assert!(half.sample(5, 0).unwrap().iter().all(|v| *v == 2.0));
        assert_eq!(half.support(), (2.0, 2.0));
    }

    #[test]
    fn coordinate_round_trip() {
        let g1 = build_triangle(TriangleSpec::new(1)).unwrap();
        let v: Vec<f64> = (0..g1.len()).map(|i| 0.1 * i as f64 + 1.0 / 3.0).collect();
        let h = assemble(&g1, BoundaryCondition::Simple, &v).unwrap();
        let text = h.export_coordinate();
        assert!(text.starts_with("0 0 "));
        let back = HamiltonianMatrix::parse_coordinate(&text).unwrap();
        assert_eq!(back.to_dense(), h.to_dense());
    }
}
