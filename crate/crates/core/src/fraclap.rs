//! Fractional Laplacian through the directional definition.
//!
//! `(-lap)^s u(x) = C_{2s,2} * integral over the unit circle of D_theta^{2s} u(x)`
//! where `D_theta^{a}` is the Riemann-Liouville derivative of order `a` along
//! `theta` with memory running along `-theta`. Each directional derivative
//! is approximated by a truncated Grunwald-Letnikov sum on samples
//! `u(x - k h theta)`, cut off where the ray leaves the domain (the field is
//! zero outside), and the circle integral by the periodic trapezoid rule.
//! Orders above 1 use the sums shifted by one sample (see [`GlShift`]).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Domain2D, Point, PointCloud};
use crate::rbf::Multiquadric;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler Gamma function. Arguments below 1/2 go through the reflection
/// formula; poles return NaN.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

fn is_pole(z: f64) -> bool {
    z <= 0.0 && z == z.floor()
}

/// `C_{alpha,d} = Gamma((1 - alpha)/2) Gamma((d + alpha)/2) / (2 pi^((1 + d)/2))`.
pub fn scaling_constant(alpha: f64, d: usize) -> Result<f64> {
    let a = 0.5 * (1.0 - alpha);
    let b = 0.5 * (d as f64 + alpha);
    for z in [a, b] {
        if is_pole(z) {
            return Err(Error::Domain(format!("Gamma pole at argument {z} for operator order {alpha}")));
        }
    }
    Ok(gamma(a) * gamma(b) / (2.0 * PI.powf(0.5 * (1.0 + d as f64))))
}

/// Signed binomial weights `w_k = (-1)^k binom(order, k)`.
///
/// For integer orders the tail is identically zero and is not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct GlWeights {
    order: f64,
    w: Vec<f64>,
}

impl GlWeights {
    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    /// Weight `k`; zero past a terminated integer-order tail.
    pub fn get(&self, k: usize) -> f64 {
        self.w.get(k).copied().unwrap_or(0.0)
    }

    /// Number of stored weights usable for a sum of `terms` terms.
    fn span(&self, terms: usize) -> usize {
        terms.min(self.w.len())
    }
}

pub fn gl_weights(order: f64, max_k: usize) -> GlWeights {
    let mut w = Vec::with_capacity(max_k + 1);
    w.push(1.0);
    for k in 1..=max_k {
        let next = w[k - 1] * (k as f64 - 1.0 - order) / k as f64;
        if next == 0.0 {
            break;
        }
        w.push(next);
    }
    GlWeights { order, w }
}

/// Upper summation index: `cutoff / h` rounded to the nearest integer,
/// halves rounding up.
pub fn gl_upper_index(cutoff: f64, h: f64) -> usize {
    (cutoff / h + 0.5).floor().max(0.0) as usize
}

/// Grunwald-Letnikov directional derivative of an arbitrary field sampled
/// at `eval - k h (cos theta, sin theta)`, `k = 0..=round(cutoff/h)`.
pub fn gl_directional_fn<F>(field: F, eval: Point, theta: f64, weights: &GlWeights, h: f64, cutoff: f64) -> f64
where
    F: Fn(Point) -> f64,
{
    gl_shifted_fn(field, eval, theta, weights, h, cutoff, 0)
}

/// Shifted sum: samples at `eval - (k - shift) h theta` for
/// `k = 0..=round(cutoff/h) + shift`, so the trailing sample still sits at
/// the cutoff and the first `shift` samples lead `eval`.
pub fn gl_shifted_fn<F>(field: F, eval: Point, theta: f64, weights: &GlWeights, h: f64, cutoff: f64, shift: usize) -> f64
where
    F: Fn(Point) -> f64,
{
    shifted_sum(field, eval, theta, weights, h, cutoff, shift, 0)
}

/// As [`gl_shifted_fn`], leaving out the first `skip` terms.
#[allow(clippy::too_many_arguments)]
fn shifted_sum<F>(field: F, eval: Point, theta: f64, weights: &GlWeights, h: f64, cutoff: f64, shift: usize, skip: usize) -> f64
where
    F: Fn(Point) -> f64,
{
    let (hc, hs) = (h * theta.cos(), h * theta.sin());
    let terms = weights.span(gl_upper_index(cutoff, h) + 1 + shift);
    let sum: f64 = weights.w[..terms]
        .iter()
        .enumerate()
        .skip(skip)
        .map(|(k, w)| {
            let kf = k as f64 - shift as f64;
            w * field(Point::new(eval.x - kf * hc, eval.y - kf * hs))
        })
        .sum();
    sum * h.powf(-weights.order)
}

/// Directional derivative of the basis function centred at `source`,
/// evaluated at `eval`.
pub fn gl_directional(basis: &Multiquadric, source: Point, eval: Point, theta: f64, order: f64, h: f64, cutoff: f64) -> f64 {
    let weights = gl_weights(order, gl_upper_index(cutoff, h));
    gl_directional_fn(|p| basis.between(p, source), eval, theta, &weights, h, cutoff)
}

/// Sample offset of the Grunwald-Letnikov sums.
///
/// The plain sum is first order with an error term whose sign flips the
/// real part of the discrete symbol for orders just above 1, where the
/// scaling constant is large; the operator then has negative eigenvalues
/// and the attenuation term amplifies instead of damping. Shifting by one
/// sample keeps first order but makes that error dissipative, and turns the
/// order 2 sum into the centred second difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GlShift {
    /// Unshifted sums for every order.
    None,
    /// Shift by one sample for orders above 1.
    #[default]
    Auto,
}

impl GlShift {
    pub fn for_order(self, order: f64) -> usize {
        match self {
            GlShift::None => 0,
            GlShift::Auto => usize::from(order > 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GlShift::None => "none",
            GlShift::Auto => "auto",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(GlShift::None),
            "auto" => Ok(GlShift::Auto),
            _ => Err(Error::Config(format!("unknown shift '{s}', expected none or auto"))),
        }
    }
}

/// Step size, direction count and sample shift of the discrete operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOpConfig {
    /// Grunwald-Letnikov step in metres.
    pub h: f64,
    /// Number of trapezoid directions `theta_l = 2 pi l / n_theta`.
    pub n_theta: usize,
    pub shift: GlShift,
}

impl Default for FracOpConfig {
    fn default() -> Self {
        Self { h: 1.0, n_theta: 20, shift: GlShift::Auto }
    }
}

impl FracOpConfig {
    pub fn new(h: f64, n_theta: usize) -> Self {
        Self { h, n_theta, shift: GlShift::Auto }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::Config(format!("operator step h must be positive, got {}", self.h)));
        }
        if self.n_theta < 4 || self.n_theta % 2 != 0 {
            return Err(Error::Config(format!("n_theta must be even and at least 4, got {}", self.n_theta)));
        }
        Ok(())
    }

    pub fn direction(&self, l: usize) -> f64 {
        2.0 * PI * l as f64 / self.n_theta as f64
    }
}

/// Per-exponent data shared by all rows.
struct Operator {
    weights: GlWeights,
    /// `2 pi C / n_theta`, the trapezoid weight times the scaling constant.
    quadrature: f64,
    /// `quadrature * h^-order`, applied to raw weighted sums.
    scale: f64,
    shift: usize,
}

impl Operator {
    fn new(exponent: f64, cfg: &FracOpConfig, max_k: usize) -> Result<Self> {
        let order = 2.0 * exponent;
        let quadrature = 2.0 * PI * scaling_constant(order, 2)? / cfg.n_theta as f64;
        let shift = cfg.shift.for_order(order);
        Ok(Self { weights: gl_weights(order, max_k + shift), quadrature, scale: quadrature * cfg.h.powf(-order), shift })
    }
}

/// Truncation distance for each direction at `p`: the exit distance along
/// `-theta_l`, since the samples trail behind `p`.
fn cutoffs(domain: &Domain2D, p: Point, cfg: &FracOpConfig) -> Result<Vec<f64>> {
    (0..cfg.n_theta).map(|l| domain.ray_exit_distance(p, cfg.direction(l) + PI)).collect()
}

/// Leading samples that stay inside the domain for direction `l`; samples
/// ahead of the exit point see the zero exterior and are dropped. `n_theta`
/// is even, so the forward exit along `theta_l` is the cutoff of `l + n/2`.
fn lead(cut: &[f64], l: usize, shift: usize, h: f64) -> usize {
    let forward = cut[(l + cut.len() / 2) % cut.len()];
    (0..shift).filter(|&k| (shift - k) as f64 * h < forward).count()
}

fn max_terms(domain: &Domain2D, cfg: &FracOpConfig) -> usize {
    gl_upper_index(domain.diameter(), cfg.h) + 1
}

/// Dot product with four interleaved accumulators so the loop vectorizes.
#[inline]
fn dot(w: &[f64], v: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut wc = w.chunks_exact(4);
    let mut vc = v.chunks_exact(4);
    for (a, b) in (&mut wc).zip(&mut vc) {
        for lane in 0..4 {
            acc[lane] += a[lane] * b[lane];
        }
    }
    let tail: f64 = wc.remainder().iter().zip(vc.remainder()).map(|(a, b)| a * b).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// One row of the discrete operators for all `exponents`, sharing the basis
/// samples between them.
fn operator_rows(
    basis: &Multiquadric,
    sources: &[Point],
    domain: &Domain2D,
    eval: Point,
    ops: &[Operator],
    cfg: &FracOpConfig,
) -> Result<Vec<Vec<f64>>> {
    let cut = cutoffs(domain, eval, cfg)?;
    let p2 = basis.shape() * basis.shape();
    let mut rows = vec![vec![0.0; sources.len()]; ops.len()];
    let max_shift = ops.iter().map(|o| o.shift).max().unwrap_or(0);
    let mut samples = Vec::new();
    for (l, &cutoff) in cut.iter().enumerate() {
        let theta = cfg.direction(l);
        let (hc, hs) = (cfg.h * theta.cos(), cfg.h * theta.sin());
        let terms = gl_upper_index(cutoff, cfg.h) + 1;
        // Samples are indexed by position `m = k - shift + max_shift`, so one
        // buffer serves operators with different shifts.
        let spans: Vec<(usize, usize)> = ops
            .iter()
            .map(|o| {
                let skip = o.shift - lead(&cut, l, o.shift, cfg.h);
                (skip, o.weights.span(terms + o.shift))
            })
            .collect();
        let longest = ops.iter().zip(&spans).map(|(o, s)| s.1 + max_shift - o.shift).max().unwrap_or(0);
        samples.resize(longest, 0.0);
        for (j, s) in sources.iter().enumerate() {
            let (dx, dy) = (eval.x - s.x, eval.y - s.y);
            for (m, v) in samples.iter_mut().enumerate() {
                let kf = m as f64 - max_shift as f64;
                let (ex, ey) = (dx - kf * hc, dy - kf * hs);
                *v = (ex * ex + ey * ey + p2).sqrt();
            }
            for (o, op) in ops.iter().enumerate() {
                let (skip, span) = spans[o];
                let base = max_shift - op.shift;
                rows[o][j] += dot(&op.weights.w[skip..span], &samples[base + skip..base + span]);
            }
        }
    }
    for (row, op) in rows.iter_mut().zip(ops) {
        row.iter_mut().for_each(|v| *v *= op.scale);
    }
    Ok(rows)
}

/// One row of `(-lap)^exponent` applied to every basis function, at `eval`.
pub fn frac_laplacian_row(
    basis: &Multiquadric,
    sources: &[Point],
    domain: &Domain2D,
    eval: Point,
    exponent: f64,
    cfg: &FracOpConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let op = Operator::new(exponent, cfg, max_terms(domain, cfg))?;
    Ok(operator_rows(basis, sources, domain, eval, std::slice::from_ref(&op), cfg)?.remove(0))
}

/// `M x (M + N)` matrix with entry `(i, j) = [(-lap)^exponent phi_j](x_i)` for
/// interior rows `i` and all sources `j`.
pub fn frac_laplacian_matrix(
    basis: &Multiquadric,
    cloud: &PointCloud,
    domain: &Domain2D,
    exponent: f64,
    cfg: &FracOpConfig,
) -> Result<DMatrix<f64>> {
    let [m] = frac_laplacian_matrices(basis, cloud, domain, [exponent], cfg)?;
    Ok(m)
}

/// Several exponents assembled in one pass over the sample points.
pub fn frac_laplacian_matrices<const K: usize>(
    basis: &Multiquadric,
    cloud: &PointCloud,
    domain: &Domain2D,
    exponents: [f64; K],
    cfg: &FracOpConfig,
) -> Result<[DMatrix<f64>; K]> {
    cfg.validate()?;
    let max_k = max_terms(domain, cfg);
    let ops = exponents.iter().map(|&e| Operator::new(e, cfg, max_k)).collect::<Result<Vec<_>>>()?;
    let sources = cloud.points();
    let rows = cloud
        .interior
        .par_iter()
        .map(|&p| operator_rows(basis, &sources, domain, p, &ops, cfg))
        .collect::<Result<Vec<_>>>()?;
    let (m, n) = (cloud.m(), sources.len());
    Ok(std::array::from_fn(|o| {
        let mut data = Vec::with_capacity(m * n);
        for r in &rows {
            data.extend_from_slice(&r[o]);
        }
        DMatrix::from_row_slice(m, n, &data)
    }))
}

/// `(-lap)^exponent` of a field that vanishes outside `domain`, at `eval`.
/// The field is only sampled inside the closed domain.
pub fn frac_laplacian_fn<F>(field: F, domain: &Domain2D, eval: Point, exponent: f64, cfg: &FracOpConfig) -> Result<f64>
where
    F: Fn(Point) -> f64,
{
    cfg.validate()?;
    let op = Operator::new(exponent, cfg, max_terms(domain, cfg))?;
    let cut = cutoffs(domain, eval, cfg)?;
    let total: f64 = cut
        .iter()
        .enumerate()
        .map(|(l, &cutoff)| {
            let skip = op.shift - lead(&cut, l, op.shift, cfg.h);
            shifted_sum(&field, eval, cfg.direction(l), &op.weights, cfg.h, cutoff, op.shift, skip)
        })
        .sum();
    Ok(total * op.quadrature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generate_cloud;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_matches_statrs() {
        for x in [0.1, 0.5, 1.0, 1.5, 2.5, 3.7, 10.2, -0.5, -1.5, -0.003, -2.7] {
            assert_relative_eq!(gamma(x), statrs::function::gamma::gamma(x), max_relative = 1e-12);
        }
        assert!(gamma(0.0).is_nan() && gamma(-2.0).is_nan());
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn scaling_constant_values() {
        assert_relative_eq!(scaling_constant(2.0, 2).unwrap(), -1.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(scaling_constant(2.5, 2).unwrap(), -0.491_808_582_923_373_4, max_relative = 1e-13);
        assert_relative_eq!(scaling_constant(1.5, 2).unwrap(), -0.404_514_450_891_284_5, max_relative = 1e-13);
        let err = scaling_constant(1.0, 2).unwrap_err();
        assert!(matches!(&err, Error::Domain(m) if m.contains("argument 0")), "{err}");
        assert!(scaling_constant(3.0, 2).is_err());
    }

    #[test]
    fn weights_match_binomials() {
        let w = gl_weights(1.5, 3);
        assert_eq!(w.as_slice(), &[1.0, -1.5, 0.375, 0.0625]);
        // Independent route: (-1)^k Gamma(b+1) / (Gamma(k+1) Gamma(b-k+1)).
        let b: f64 = 2.3;
        let w = gl_weights(b, 12);
        for k in 0..=12 {
            let g = statrs::function::gamma::gamma;
            let direct = (-1f64).powi(k as i32) * g(b + 1.0) / (g(k as f64 + 1.0) * g(b - k as f64 + 1.0));
            assert_relative_eq!(w.get(k), direct, max_relative = 1e-11);
        }
        let w = gl_weights(1.0, 6);
        assert_eq!(w.as_slice(), &[1.0, -1.0]);
        assert_eq!(w.get(4), 0.0);
        assert_eq!(gl_weights(2.0, 6).as_slice(), &[1.0, -2.0, 1.0]);
    }

    #[test]
    fn weight_partial_sums_shrink() {
        for b in [0.3, 1.2, 1.7] {
            let w = gl_weights(b, 400);
            let mut sums = Vec::new();
            let mut s = 0.0;
            for k in 0..=400 {
                s += w.get(k);
                sums.push(s.abs());
            }
            let start = b.ceil() as usize + 1;
            assert!(sums[start..].windows(2).all(|p| p[1] <= p[0]), "order {b}");
        }
    }

    #[test]
    fn upper_index_rounds_half_up() {
        assert_eq!(gl_upper_index(0.49, 1.0), 0);
        assert_eq!(gl_upper_index(0.5, 1.0), 1);
        assert_eq!(gl_upper_index(2.5, 1.0), 3);
        assert_eq!(gl_upper_index(2.49, 1.0), 2);
    }

    #[test]
    fn single_term_when_cutoff_is_short() {
        let b = Multiquadric::new(2.0).unwrap();
        let (s, e) = (Point::new(1.0, 1.0), Point::new(4.0, 5.0));
        let h = 0.5;
        let v = gl_directional(&b, s, e, 0.3, 1.4, h, 0.2);
        assert_relative_eq!(v, h.powf(-1.4) * b.between(e, s), max_relative = 1e-15);
    }

    #[test]
    fn second_order_reduces_to_difference() {
        // Order 2 on u = x^2 along theta = 0 gives exactly 2.
        let v = gl_directional_fn(|p| p.x * p.x, Point::new(3.0, 0.0), 0.0, &gl_weights(2.0, 100), 0.01, 100.0);
        assert_relative_eq!(v, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn direction_periodicity() {
        let d = Domain2D::rectangle(0.0, 100.0, 0.0, 100.0).unwrap();
        let b = Multiquadric::new(5.0).unwrap();
        let (s, e) = (Point::new(30.0, 60.0), Point::new(45.0, 40.0));
        for l in 0..8 {
            let th = 2.0 * PI * l as f64 / 8.0;
            let c1 = d.ray_exit_distance(e, th + PI).unwrap();
            let c2 = d.ray_exit_distance(e, th + 3.0 * PI).unwrap();
            let v1 = gl_directional(&b, s, e, th, 1.3, 1.0, c1);
            let v2 = gl_directional(&b, s, e, th + 2.0 * PI, 1.3, 1.0, c2);
            assert_relative_eq!(v1, v2, max_relative = 1e-10);
        }
    }

    fn small_setup() -> (Domain2D, PointCloud, Multiquadric) {
        let d = Domain2D::rectangle(0.0, 100.0, 0.0, 100.0).unwrap();
        let cloud = generate_cloud(&d, 12.5).unwrap();
        let b = Multiquadric::new(12.5).unwrap();
        (d, cloud, b)
    }

    #[test]
    fn mirror_symmetry_of_entries() {
        let (d, cloud, b) = small_setup();
        let cfg = FracOpConfig::new(1.0, 20);
        let m = frac_laplacian_matrix(&b, &cloud, &d, 0.75, &cfg).unwrap();
        let pts = cloud.points();
        let mirror = |p: Point| Point::new(100.0 - p.x, p.y);
        let find = |q: Point, set: &[Point]| set.iter().position(|p| p.dist(q) < 1e-9).unwrap();
        for i in 0..cloud.m() {
            let mi = find(mirror(cloud.interior[i]), &cloud.interior);
            for j in 0..pts.len() {
                let mj = find(mirror(pts[j]), &pts);
                assert_relative_eq!(m[(i, j)], m[(mi, mj)], max_relative = 1e-9, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rows_are_order_independent() {
        let (d, cloud, b) = small_setup();
        let cfg = FracOpConfig::new(2.0, 8);
        let m = frac_laplacian_matrix(&b, &cloud, &d, 1.1, &cfg).unwrap();
        let pts = cloud.points();
        for i in (0..cloud.m()).rev() {
            let row = frac_laplacian_row(&b, &pts, &d, cloud.interior[i], 1.1, &cfg).unwrap();
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, m[(i, j)]);
            }
        }
    }

    #[test]
    fn shared_pass_equals_separate() {
        let (d, cloud, b) = small_setup();
        let cfg = FracOpConfig::new(2.0, 8);
        let [a, c] = frac_laplacian_matrices(&b, &cloud, &d, [1.02, 0.52], &cfg).unwrap();
        assert_eq!(a, frac_laplacian_matrix(&b, &cloud, &d, 1.02, &cfg).unwrap());
        assert_eq!(c, frac_laplacian_matrix(&b, &cloud, &d, 0.52, &cfg).unwrap());
    }

    #[test]
    fn doubling_directions_changes_little_away_from_edges() {
        let d = Domain2D::rectangle(0.0, 100.0, 0.0, 100.0).unwrap();
        let b = Multiquadric::new(12.5).unwrap();
        let sources = [Point::new(50.0, 50.0), Point::new(37.5, 62.5), Point::new(62.5, 50.0)];
        let eval = Point::new(50.0, 50.0);
        for e in [1.0016, 0.75] {
            let r20 = frac_laplacian_row(&b, &sources, &d, eval, e, &FracOpConfig::new(1.0, 20)).unwrap();
            let r40 = frac_laplacian_row(&b, &sources, &d, eval, e, &FracOpConfig::new(1.0, 40)).unwrap();
            for (a, c) in r20.iter().zip(&r40) {
                assert!((a - c).abs() <= 0.01 * c.abs(), "exponent {e}: {a} vs {c}");
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(FracOpConfig::new(0.0, 20).validate().is_err());
        assert!(FracOpConfig::new(1.0, 7).validate().is_err());
        assert!(FracOpConfig::new(1.0, 2).validate().is_err());
        assert!(FracOpConfig::default().validate().is_ok());
    }

    #[test]
    fn shift_policy() {
        assert_eq!(GlShift::Auto.for_order(1.006), 1);
        assert_eq!(GlShift::Auto.for_order(0.8), 0);
        assert_eq!(GlShift::None.for_order(1.5), 0);
        assert_eq!(GlShift::parse("auto").unwrap(), GlShift::Auto);
        assert!(GlShift::parse("left").is_err());
    }

    #[test]
    fn shifted_order_two_is_centred_difference() {
        let w = gl_weights(2.0, 10);
        let h = 0.1;
        let u = |p: Point| p.x.powi(3);
        let eval = Point::new(1.0, 0.0);
        let v = gl_shifted_fn(u, eval, 0.0, &w, h, 5.0, 1);
        let centred = (u(Point::new(1.0 + h, 0.0)) - 2.0 * u(eval) + u(Point::new(1.0 - h, 0.0))) / (h * h);
        assert_relative_eq!(v, centred, max_relative = 1e-12);
        assert_relative_eq!(v, 6.0, max_relative = 1e-10);
        assert_eq!(gl_shifted_fn(u, eval, 0.0, &w, h, 5.0, 0), gl_directional_fn(u, eval, 0.0, &w, h, 5.0));
    }

    #[test]
    fn leading_samples_outside_are_dropped() {
        let d = Domain2D::rectangle(0.0, 10.0, 0.0, 10.0).unwrap();
        // Trailing samples overshoot by at most h/2, the dropped lead sample
        // sits at x = 10.6.
        let cfg = FracOpConfig::new(1.0, 4);
        let eval = Point::new(9.6, 5.0);
        let inside = |p: Point| if p.x > 10.5 { 0.0 } else { 1.0 + p.x };
        let leaking = |p: Point| if p.x > 10.5 { 1e6 } else { 1.0 + p.x };
        let a = frac_laplacian_fn(inside, &d, eval, 0.55, &cfg).unwrap();
        let b = frac_laplacian_fn(leaking, &d, eval, 0.55, &cfg).unwrap();
        assert_eq!(a, b);
    }

    fn half_order_spectrum(shift: GlShift) -> f64 {
        let d = Domain2D::rectangle(0.0, 1000.0, 0.0, 1000.0).unwrap();
        let cloud = generate_cloud(&d, 100.0).unwrap();
        let b = Multiquadric::new(100.0).unwrap();
        let pts = cloud.points();
        let inv = crate::rbf::kernel_matrix(&b, &pts, &pts).try_inverse().unwrap();
        let cfg = FracOpConfig { shift, ..FracOpConfig::default() };
        let op = frac_laplacian_matrix(&b, &cloud, &d, 0.5 + 0.0032, &cfg).unwrap();
        let nodal = &op * inv.columns(0, cloud.m());
        nodal.complex_eigenvalues().iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn shifted_half_order_operator_is_dissipative() {
        assert!(half_order_spectrum(GlShift::Auto) > 0.0);
        assert!(half_order_spectrum(GlShift::None) < 0.0);
    }
}
