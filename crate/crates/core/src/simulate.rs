//! Seeded generators for the four synthetic benchmark datasets.
//!
//! All generators draw through per-curve ChaCha8 streams: the RNG key is
//! the user seed and the stream id is `dataset_tag << 32 | curve_index`,
//! so per-curve generation is order-independent and the same seed yields
//! bit-identical output. Within a curve the draw order is fixed: random
//! coefficients first, then the dimension-1 noise sweep, then dimension 2.
//!
//! * `ds1` — two groups of Karhunen–Loève-style curves on `[0, 1]`
//!   (trigonometric basis, correlated bivariate normal scores), the groups
//!   differing by a mean shift spread over the high-order basis terms.
//! * `ds2` — two groups of tent-plus-trend curves on `[1, 21]` with shared
//!   random tent amplitudes and strongly heteroscedastic white noise.
//! * `ds3`/`ds4` — four groups each, built from two tent templates with a
//!   shared uniform amplitude and white noise; `ds4` narrows one tent and
//!   rebalances the recipes so the groups overlap differently.
//!
//! Generated values are computed in `f64` and converted to the target
//! scalar at the end, so every precision sees the same draw sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fda::{Grid, MultivariateFunctionalSample};
use crate::scalar::Real;

/// The benchmark dataset vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatasetId {
    Ds1,
    Ds2,
    Ds3,
    Ds4,
}

impl DatasetId {
    pub const ALL: [DatasetId; 4] = [
        DatasetId::Ds1,
        DatasetId::Ds2,
        DatasetId::Ds3,
        DatasetId::Ds4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DatasetId::Ds1 => "ds1",
            DatasetId::Ds2 => "ds2",
            DatasetId::Ds3 => "ds3",
            DatasetId::Ds4 => "ds4",
        }
    }

    pub fn parse(name: &str) -> Result<DatasetId> {
        DatasetId::ALL
            .iter()
            .copied()
            .find(|d| d.name() == name)
            .ok_or_else(|| {
                Error::UnknownName(format!(
                    "dataset '{name}' is not one of: ds1, ds2, ds3, ds4"
                ))
            })
    }

    /// Number of generating groups, the natural cluster count.
    pub fn k(&self) -> usize {
        match self {
            DatasetId::Ds1 | DatasetId::Ds2 => 2,
            DatasetId::Ds3 | DatasetId::Ds4 => 4,
        }
    }

    pub fn generate<F: Real>(&self, seed: u64) -> MultivariateFunctionalSample<F> {
        match self {
            DatasetId::Ds1 => gen_ds1(seed),
            DatasetId::Ds2 => gen_ds2(seed),
            DatasetId::Ds3 => gen_ds3(seed),
            DatasetId::Ds4 => gen_ds4(seed),
        }
    }
}

impl std::fmt::Display for DatasetId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn stream_rng(seed: u64, dataset_tag: u64, curve: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(dataset_tag << 32 | curve as u64);
    rng
}

// ---------------------------------------------------------------------------
// ds1: Karhunen-Loève style expansion
// ---------------------------------------------------------------------------

/// Parameters of the `ds1` generator.
#[derive(Debug, Clone)]
pub struct Ds1Params {
    pub n_per_group: usize,
    pub m: usize,
    pub k_terms: usize,
    pub seed: u64,
}

impl Ds1Params {
    pub fn new(seed: u64) -> Self {
        Ds1Params {
            n_per_group: 50,
            m: 150,
            k_terms: 100,
            seed,
        }
    }
}

/// Eigenvalue-like decay of the expansion: `1/(k+1)` for the first three
/// terms, `1/(k+1)^2` afterwards (1-based `k`), so the first three modes
/// carry most of the variance.
pub fn ds1_rho(k: usize) -> f64 {
    debug_assert!(k >= 1);
    if k <= 3 {
        1.0 / (k as f64 + 1.0)
    } else {
        1.0 / ((k as f64 + 1.0) * (k as f64 + 1.0))
    }
}

/// Orthonormal trigonometric basis on `[0, 1]` (1-based `k`): constant,
/// `sqrt(2) sin(k pi t)` for even `k`, `sqrt(2) cos((k-1) pi t)` for odd
/// `k >= 3`.
pub fn ds1_theta(k: usize, t: f64) -> f64 {
    debug_assert!(k >= 1);
    if k == 1 {
        1.0
    } else if k.is_multiple_of(2) {
        std::f64::consts::SQRT_2 * (k as f64 * std::f64::consts::PI * t).sin()
    } else {
        std::f64::consts::SQRT_2 * ((k as f64 - 1.0) * std::f64::consts::PI * t).cos()
    }
}

/// Group mean of `ds1` at time `t`: group 1 is `(t(1-t), 4t^2(1-t))`,
/// group 2 adds `sum_{k=4}^{k_terms} sqrt(rho_k) theta_k(t)` to both
/// components.
pub fn ds1_mean(group: usize, t: f64, k_terms: usize) -> [f64; 2] {
    let base = [t * (1.0 - t), 4.0 * t * t * (1.0 - t)];
    match group {
        1 => base,
        2 => {
            let shift: f64 = (4..=k_terms)
                .map(|k| ds1_rho(k).sqrt() * ds1_theta(k, t))
                .sum();
            [base[0] + shift, base[1] + shift]
        }
        _ => panic!("ds1 has groups 1 and 2"),
    }
}

pub fn gen_ds1<F: Real>(seed: u64) -> MultivariateFunctionalSample<F> {
    gen_ds1_with(&Ds1Params::new(seed))
}

pub fn gen_ds1_with<F: Real>(params: &Ds1Params) -> MultivariateFunctionalSample<F> {
    let n = 2 * params.n_per_group;
    let m = params.m;
    let grid_f64: Vec<f64> = (0..m).map(|j| j as f64 / (m as f64 - 1.0)).collect();

    // Scores Z_k are bivariate normal with unit variances and correlation
    // 0.5; built from the Cholesky factor of the covariance.
    let chol_off = 0.5;
    let chol_diag = (1.0f64 - 0.25).sqrt();

    let mut values: Vec<F> = Vec::with_capacity(n * 2 * m);
    let mut labels = Vec::with_capacity(n);
    for curve in 0..n {
        let group = if curve < params.n_per_group { 1 } else { 2 };
        let mut rng = stream_rng(params.seed, 1, curve);

        let mut scores = Vec::with_capacity(params.k_terms);
        for _ in 0..params.k_terms {
            let e1: f64 = rng.sample(StandardNormal);
            let e2: f64 = rng.sample(StandardNormal);
            scores.push([e1, chol_off * e1 + chol_diag * e2]);
        }

        for dim in 0..2 {
            for &t in &grid_f64 {
                let mut v = ds1_mean(group, t, params.k_terms)[dim];
                for (ki, z) in scores.iter().enumerate() {
                    let k = ki + 1;
                    v += z[dim] * ds1_rho(k).sqrt() * ds1_theta(k, t);
                }
                values.push(F::of(v));
            }
        }
        labels.push(group);
    }

    let grid = Grid::new(grid_f64.into_iter().map(F::of).collect()).expect("valid ds1 grid");
    MultivariateFunctionalSample::new(values, n, 2, grid, Some(labels)).expect("valid ds1 sample")
}

// ---------------------------------------------------------------------------
// ds2..ds4: tent-based generators
// ---------------------------------------------------------------------------

/// Piecewise-linear bump `(height - |t - center|)_+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tent {
    pub height: f64,
    pub center: f64,
}

impl Tent {
    pub fn eval(&self, t: f64) -> f64 {
        (self.height - (t - self.center).abs()).max(0.0)
    }
}

/// How the printed coefficient pairs of `ds2` are read.
///
/// The recipes print uniform-style `U(a, b)` symbols while the surrounding
/// description calls the coefficients independent Gaussians, and the pair
/// `(0.5, 1/12)` is ill-formed as a uniform range; the Gaussian
/// `(mean, variance)` reading is therefore the default. The uniform
/// reading (endpoints sorted) stays available for sensitivity runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientLaw {
    GaussianMeanVariance,
    UniformSortedEndpoints,
}

/// Shared knobs of the tent-based generators.
#[derive(Debug, Clone)]
pub struct TentParams {
    pub interval: (f64, f64),
    pub m: usize,
    pub group_sizes: Vec<usize>,
    pub tents: Vec<Tent>,
    /// Per-group noise standard deviations, one per dimension.
    pub noise_sd: Vec<[f64; 2]>,
    pub seed: u64,
    /// Reading of the `ds2` coefficient pairs; `ds3`/`ds4` always draw
    /// their shared amplitude uniformly.
    pub coefficient_law: CoefficientLaw,
    /// Scales every noise standard deviation; 0 disables noise (tests).
    pub noise_scale: f64,
    /// Fixes every random coefficient to a constant (tests).
    pub coefficient_override: Option<f64>,
}

impl TentParams {
    /// `ds2`: 50 + 50 curves, 1001 points on `[1, 21]`, three tents.
    pub fn ds2(seed: u64) -> Self {
        TentParams {
            interval: (1.0, 21.0),
            m: 1001,
            group_sizes: vec![50, 50],
            tents: vec![
                Tent { height: 6.0, center: 11.0 },
                Tent { height: 6.0, center: 7.0 },
                Tent { height: 6.0, center: 15.0 },
            ],
            noise_sd: vec![
                [0.1f64.sqrt(), 0.5f64.sqrt()],
                [10.0f64.sqrt(), 0.5f64.sqrt()],
            ],
            seed,
            coefficient_law: CoefficientLaw::GaussianMeanVariance,
            noise_scale: 1.0,
            coefficient_override: None,
        }
    }

    /// `ds3`: 4 x 250 curves, 101 points on `[1, 21]`, two tents.
    pub fn ds3(seed: u64) -> Self {
        TentParams {
            interval: (1.0, 21.0),
            m: 101,
            group_sizes: vec![250; 4],
            tents: vec![
                Tent { height: 6.0, center: 7.0 },
                Tent { height: 6.0, center: 15.0 },
            ],
            noise_sd: vec![[0.5, 0.5]; 4],
            seed,
            coefficient_law: CoefficientLaw::GaussianMeanVariance,
            noise_scale: 1.0,
            coefficient_override: None,
        }
    }

    /// `ds4`: 4 x 25 curves, the first tent narrowed to height 3.
    pub fn ds4(seed: u64) -> Self {
        let mut p = TentParams::ds3(seed);
        p.group_sizes = vec![25; 4];
        p.tents[0] = Tent { height: 3.0, center: 7.0 };
        p
    }

    fn validate(&self) -> Result<()> {
        if self.group_sizes.is_empty() || self.group_sizes.contains(&0) {
            return Err(Error::Argument("group sizes must be positive".into()));
        }
        if self.tents.iter().any(|t| t.height <= 0.0) {
            return Err(Error::Argument("tent heights must be positive".into()));
        }
        if self.noise_sd.len() != self.group_sizes.len() {
            return Err(Error::Dimension("need one noise pair per group".into()));
        }
        Ok(())
    }

    fn grid_f64(&self) -> Vec<f64> {
        let (a, b) = self.interval;
        let step = (b - a) / (self.m as f64 - 1.0);
        let mut g: Vec<f64> = (0..self.m).map(|j| a + step * j as f64).collect();
        g[self.m - 1] = b;
        g
    }
}

/// Draws one random coefficient from the printed pair `(a, b)`.
fn draw_coefficient(rng: &mut ChaCha8Rng, pair: (f64, f64), params: &TentParams) -> f64 {
    if let Some(fixed) = params.coefficient_override {
        return fixed;
    }
    match params.coefficient_law {
        CoefficientLaw::GaussianMeanVariance => {
            let z: f64 = rng.sample(StandardNormal);
            pair.0 + pair.1.sqrt() * z
        }
        CoefficientLaw::UniformSortedEndpoints => {
            let (lo, hi) = if pair.0 <= pair.1 {
                (pair.0, pair.1)
            } else {
                (pair.1, pair.0)
            };
            rng.gen_range(lo..hi)
        }
    }
}

fn assemble_sample<F: Real>(
    params: &TentParams,
    values: Vec<f64>,
    labels: Vec<usize>,
) -> MultivariateFunctionalSample<F> {
    let n = labels.len();
    let grid =
        Grid::new(params.grid_f64().into_iter().map(F::of).collect()).expect("valid tent grid");
    MultivariateFunctionalSample::new(
        values.into_iter().map(F::of).collect(),
        n,
        2,
        grid,
        Some(labels),
    )
    .expect("valid tent sample")
}

pub fn gen_ds2<F: Real>(seed: u64) -> MultivariateFunctionalSample<F> {
    gen_ds2_with(&TentParams::ds2(seed)).expect("default ds2 parameters are valid")
}

/// `ds2` recipes (tents indexed `h1, h2, h3` as configured):
///
/// * group 1: `x1 = -5 + t/2 + u2 h3 + u3 h2 + noise`,
///   `x2 = -5 + t/2 + u1 h1 + u2 h2 + u3 h3 + noise`;
/// * group 2: `x1 = u3 h2 + noise`, `x2 = u1 h1 + u3 h3 + noise`.
///
/// Coefficient pairs: `u1 (0.5, 1/12)`, `u2 (0, 1/12)`, `u3 (0, 2/3)`;
/// the coefficients are shared between the two dimensions of a curve, the
/// noise is drawn independently per dimension and grid point.
pub fn gen_ds2_with<F: Real>(params: &TentParams) -> Result<MultivariateFunctionalSample<F>> {
    params.validate()?;
    if params.tents.len() != 3 || params.group_sizes.len() != 2 {
        return Err(Error::Argument(
            "ds2 needs three tents and two groups".into(),
        ));
    }
    let grid = params.grid_f64();
    let (h1, h2, h3) = (params.tents[0], params.tents[1], params.tents[2]);

    let n: usize = params.group_sizes.iter().sum();
    let mut values = Vec::with_capacity(n * 2 * params.m);
    let mut labels = Vec::with_capacity(n);
    for curve in 0..n {
        let group = if curve < params.group_sizes[0] { 1 } else { 2 };
        let mut rng = stream_rng(params.seed, 2, curve);
        let u1 = draw_coefficient(&mut rng, (0.5, 1.0 / 12.0), params);
        let u2 = draw_coefficient(&mut rng, (0.0, 1.0 / 12.0), params);
        let u3 = draw_coefficient(&mut rng, (0.0, 2.0 / 3.0), params);
        let sd = params.noise_sd[group - 1];

        for dim in 0..2 {
            let sd_dim = sd[dim] * params.noise_scale;
            for &t in &grid {
                let mean = match (group, dim) {
                    (1, 0) => -5.0 + t / 2.0 + u2 * h3.eval(t) + u3 * h2.eval(t),
                    (1, 1) => {
                        -5.0 + t / 2.0 + u1 * h1.eval(t) + u2 * h2.eval(t) + u3 * h3.eval(t)
                    }
                    (2, 0) => u3 * h2.eval(t),
                    (2, 1) => u1 * h1.eval(t) + u3 * h3.eval(t),
                    _ => unreachable!(),
                };
                let eps: f64 = rng.sample(StandardNormal);
                values.push(mean + sd_dim * eps);
            }
        }
        labels.push(group);
    }
    Ok(assemble_sample(params, values, labels))
}

/// Per-group tent recipe of `ds3`/`ds4`: in each dimension the curve is
/// `u + (amplitude - u) * tent(t) + noise` with the per-curve shared
/// coefficient `u`.
struct TentRecipe {
    tent_index: [usize; 2],
    amplitude: [f64; 2],
}

fn gen_tent_four_groups<F: Real>(
    params: &TentParams,
    dataset_tag: u64,
    recipes: &[TentRecipe; 4],
) -> Result<MultivariateFunctionalSample<F>> {
    params.validate()?;
    if params.tents.len() != 2 || params.group_sizes.len() != 4 {
        return Err(Error::Argument(
            "tent generator needs two tents and four groups".into(),
        ));
    }
    let grid = params.grid_f64();
    let n: usize = params.group_sizes.iter().sum();

    let mut group_of_curve = Vec::with_capacity(n);
    for (g, &size) in params.group_sizes.iter().enumerate() {
        group_of_curve.extend(std::iter::repeat_n(g, size));
    }

    let mut values = Vec::with_capacity(n * 2 * params.m);
    let mut labels = Vec::with_capacity(n);
    for curve in 0..n {
        let group = group_of_curve[curve];
        let recipe = &recipes[group];
        let mut rng = stream_rng(params.seed, dataset_tag, curve);
        // The amplitude coefficient is uniform on (0, 0.1) regardless of
        // the ds2 coefficient reading.
        let u = if let Some(fixed) = params.coefficient_override {
            fixed
        } else {
            rng.gen_range(0.0..0.1)
        };
        let sd_pair = params.noise_sd[group];

        for dim in 0..2 {
            let tent = params.tents[recipe.tent_index[dim]];
            let amplitude = recipe.amplitude[dim];
            let sd = sd_pair[dim] * params.noise_scale;
            for &t in &grid {
                let eps: f64 = rng.sample(StandardNormal);
                values.push(u + (amplitude - u) * tent.eval(t) + sd * eps);
            }
        }
        labels.push(group + 1);
    }
    Ok(assemble_sample(params, values, labels))
}

pub fn gen_ds3<F: Real>(seed: u64) -> MultivariateFunctionalSample<F> {
    gen_ds3_with(&TentParams::ds3(seed)).expect("default ds3 parameters are valid")
}

pub fn gen_ds3_with<F: Real>(params: &TentParams) -> Result<MultivariateFunctionalSample<F>> {
    let recipes = [
        TentRecipe { tent_index: [0, 0], amplitude: [1.0, 0.5] },
        TentRecipe { tent_index: [1, 1], amplitude: [1.0, 0.5] },
        TentRecipe { tent_index: [0, 0], amplitude: [0.5, 1.0] },
        TentRecipe { tent_index: [1, 1], amplitude: [0.5, 1.0] },
    ];
    gen_tent_four_groups(params, 3, &recipes)
}

pub fn gen_ds4<F: Real>(seed: u64) -> MultivariateFunctionalSample<F> {
    gen_ds4_with(&TentParams::ds4(seed)).expect("default ds4 parameters are valid")
}

pub fn gen_ds4_with<F: Real>(params: &TentParams) -> Result<MultivariateFunctionalSample<F>> {
    let recipes = [
        TentRecipe { tent_index: [0, 0], amplitude: [1.5, 1.0] },
        TentRecipe { tent_index: [1, 1], amplitude: [1.0, 0.5] },
        TentRecipe { tent_index: [0, 1], amplitude: [1.0, 1.0] },
        TentRecipe { tent_index: [1, 0], amplitude: [0.5, 0.5] },
    ];
    gen_tent_four_groups(params, 4, &recipes)
}
