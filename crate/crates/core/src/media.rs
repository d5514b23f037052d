//! Physical parameters of the constant-Q medium.
//!
//! The quality factor `Q` fixes the fractional exponent `gamma`, and the local
//! reference velocity `c0` together with the reference angular frequency
//! `omega0` fixes the dispersion coefficient `eta`, the attenuation
//! coefficient `tau` and the phase velocity `c` that appear in the governing
//! equation
//!
//! ```text
//! (1/c^2) d2s/dt2 = eta (-lap)^(gamma+1) s + tau d/dt (-lap)^(gamma+1/2) s + f
//! ```

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Fractional exponent from the quality factor, `atan(1/Q)/pi`.
///
/// `f64::INFINITY` is the lossless sentinel and maps to exactly zero.
pub fn gamma_from_q(q: f64) -> Result<f64> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::Domain(format!("quality factor must be positive, got {q}")));
    }
    if q.is_infinite() {
        return Ok(0.0);
    }
    Ok((1.0 / q).atan() / PI)
}

/// Coefficients of the governing equation at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub eta: f64,
    pub tau: f64,
    pub c_phase: f64,
}

pub fn derive_coefficients(c0: f64, gamma: f64, omega0: f64) -> Coefficients {
    debug_assert!(c0 > 0.0 && omega0 > 0.0);
    let scale = c0.powf(2.0 * gamma) * omega0.powf(-2.0 * gamma);
    Coefficients {
        eta: -scale * (PI * gamma).cos(),
        tau: -scale / c0 * (PI * gamma).sin(),
        c_phase: c0 * (0.5 * PI * gamma).cos(),
    }
}

/// Which terms of the governing equation are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EquationMode {
    /// Both fractional terms.
    #[default]
    Full,
    /// Classical Laplacian plus the fractional attenuation term.
    Attenuation,
    /// Fractional dispersion term only.
    Dispersion,
    /// Lossless acoustic wave equation (`gamma` forced to zero).
    Classical,
}

impl EquationMode {
    pub fn name(self) -> &'static str {
        match self {
            EquationMode::Full => "full",
            EquationMode::Attenuation => "attenuation",
            EquationMode::Dispersion => "dispersion",
            EquationMode::Classical => "classical",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full" => Some(EquationMode::Full),
            "attenuation" => Some(EquationMode::Attenuation),
            "dispersion" => Some(EquationMode::Dispersion),
            "classical" => Some(EquationMode::Classical),
            _ => None,
        }
    }
}

/// Quality factor, reference frequency and the derived exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    pub q_factor: f64,
    pub omega0: f64,
    pub gamma: f64,
    /// Density in g/cm^3. Kept for run manifests only; the scalar acoustic
    /// equation does not use it.
    pub rho0: f64,
}

impl MediumParams {
    pub fn new(q_factor: f64, omega0: f64, rho0: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::Domain(format!("omega0 must be positive, got {omega0}")));
        }
        Ok(Self { q_factor, omega0, gamma: gamma_from_q(q_factor)?, rho0 })
    }

    /// Coefficients with the local reference velocity `c0`.
    pub fn coefficients(&self, c0: f64) -> Coefficients {
        derive_coefficients(c0, self.gamma, self.omega0)
    }

    /// Exponent actually used by `mode`.
    pub fn effective_gamma(&self, mode: EquationMode) -> f64 {
        match mode {
            EquationMode::Classical => 0.0,
            _ => self.gamma,
        }
    }

    /// Per-point terms for `mode`: the dispersion operator exponent, `eta`,
    /// `tau` and the phase velocity.
    pub fn mode_terms(&self, mode: EquationMode, c0: f64) -> ModeTerms {
        let gamma = self.effective_gamma(mode);
        let k = derive_coefficients(c0, gamma, self.omega0);
        match mode {
            EquationMode::Full | EquationMode::Classical => ModeTerms {
                dispersion_exponent: gamma + 1.0,
                attenuation_exponent: gamma + 0.5,
                eta: k.eta,
                tau: k.tau,
                c_phase: k.c_phase,
            },
            EquationMode::Attenuation => ModeTerms {
                dispersion_exponent: 1.0,
                attenuation_exponent: gamma + 0.5,
                eta: -1.0,
                tau: k.tau,
                c_phase: k.c_phase,
            },
            EquationMode::Dispersion => ModeTerms {
                dispersion_exponent: gamma + 1.0,
                attenuation_exponent: gamma + 0.5,
                eta: k.eta,
                tau: 0.0,
                c_phase: k.c_phase,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTerms {
    pub dispersion_exponent: f64,
    pub attenuation_exponent: f64,
    pub eta: f64,
    pub tau: f64,
    pub c_phase: f64,
}

/// Frequency-dependent phase velocity and attenuation coefficient
/// `(c(omega), alpha(omega))` for each angular frequency.
pub fn dispersion_curve(params: &MediumParams, c0: f64, omegas: &[f64]) -> Vec<(f64, f64)> {
    let gamma = params.gamma;
    let w0 = params.omega0;
    let t = (0.5 * PI * gamma).tan();
    omegas
        .iter()
        .map(|&w| {
            let c = c0 * (w / w0).powf(gamma);
            let alpha = w0.powf(gamma) * t * w.powf(1.0 - gamma) / c0;
            (c, alpha)
        })
        .collect()
}

/// One horizontal layer, owning depths `y_low <= y < y_high`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub y_low: f64,
    pub y_high: f64,
    pub c0: f64,
}

/// Reference velocities sampled on a regular grid of nodes; row `i`, column
/// `j` sits at `(x0 + j dx, y0 + i dy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub rows: usize,
    pub cols: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
    pub values: Vec<f64>,
}

impl Raster {
    pub fn new(rows: usize, cols: usize, dx: f64, dy: f64, x0: f64, y0: f64, values: Vec<f64>) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::Config(format!("raster needs at least 2x2 nodes, got {rows}x{cols}")));
        }
        if !(dx > 0.0 && dy > 0.0) {
            return Err(Error::Config("raster cell sizes must be positive".into()));
        }
        if values.len() != rows * cols {
            return Err(Error::Config(format!(
                "raster declares {rows}x{cols} nodes but holds {} values",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::Config(format!("raster velocity must be positive, found {bad}")));
        }
        Ok(Self { rows, cols, dx, dy, x0, y0, values })
    }

    /// Reads the text format: a header `rows cols dx dy x0 y0` followed by
    /// `rows * cols` whitespace separated velocities in row-major order.
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                tokens.push((lineno + 1, tok));
            }
        }
        let parse_err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
        if tokens.len() < 6 {
            return Err(parse_err(1, "raster header needs `rows cols dx dy x0 y0`".into()));
        }
        let count = |i: usize| -> Result<usize> {
            let (line, tok) = tokens[i];
            tok.parse::<usize>().map_err(|_| parse_err(line, format!("expected a count, found `{tok}`")))
        };
        let real = |i: usize| -> Result<f64> {
            let (line, tok) = tokens[i];
            tok.parse::<f64>().map_err(|_| parse_err(line, format!("expected a number, found `{tok}`")))
        };
        let rows = count(0)?;
        let cols = count(1)?;
        let (dx, dy, x0, y0) = (real(2)?, real(3)?, real(4)?, real(5)?);
        let values = (6..tokens.len()).map(real).collect::<Result<Vec<_>>>()?;
        Self::new(rows, cols, dx, dy, x0, y0, values)
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + (self.cols - 1) as f64 * self.dx
    }

    pub fn y_max(&self) -> f64 {
        self.y0 + (self.rows - 1) as f64 * self.dy
    }

    fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    fn sample(&self, x: f64, y: f64) -> Result<f64> {
        let slack = 1e-9 * (self.dx + self.dy);
        if x < self.x0 - slack || x > self.x_max() + slack || y < self.y0 - slack || y > self.y_max() + slack {
            return Err(Error::Coverage { x, y });
        }
        let fx = ((x - self.x0) / self.dx).clamp(0.0, (self.cols - 1) as f64);
        let fy = ((y - self.y0) / self.dy).clamp(0.0, (self.rows - 1) as f64);
        let j = (fx.floor() as usize).min(self.cols - 2);
        let i = (fy.floor() as usize).min(self.rows - 2);
        let (sx, sy) = (fx - j as f64, fy - i as f64);
        let bottom = self.at(i, j) * (1.0 - sx) + self.at(i, j + 1) * sx;
        let top = self.at(i + 1, j) * (1.0 - sx) + self.at(i + 1, j + 1) * sx;
        Ok(bottom * (1.0 - sy) + top * sy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VelocityField {
    Constant(f64),
    Layered(Vec<Layer>),
    Raster(Raster),
}

impl VelocityField {
    pub fn constant(c0: f64) -> Result<Self> {
        if !(c0 > 0.0) || !c0.is_finite() {
            return Err(Error::Config(format!("velocity must be positive, got {c0}")));
        }
        Ok(VelocityField::Constant(c0))
    }

    pub fn layered(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("layered velocity needs at least one layer".into()));
        }
        for l in &layers {
            if !(l.y_high > l.y_low) {
                return Err(Error::Config(format!("empty layer [{}, {})", l.y_low, l.y_high)));
            }
            if !(l.c0 > 0.0) || !l.c0.is_finite() {
                return Err(Error::Config(format!("layer velocity must be positive, got {}", l.c0)));
            }
        }
        Ok(VelocityField::Layered(layers))
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, VelocityField::Constant(_))
    }
}

/// Reference velocity `c0` at `(x, y)`.
pub fn sample_velocity(field: &VelocityField, x: f64, y: f64) -> Result<f64> {
    match field {
        VelocityField::Constant(c0) => Ok(*c0),
        VelocityField::Layered(layers) => {
            if let Some(l) = layers.iter().find(|l| l.y_low <= y && y < l.y_high) {
                return Ok(l.c0);
            }
            // The deepest layer also owns its closing depth so that a
            // domain edge sitting exactly on it stays covered.
            layers
                .iter()
                .filter(|l| y == l.y_high)
                .max_by(|a, b| a.y_high.total_cmp(&b.y_high))
                .filter(|l| !layers.iter().any(|o| o.y_low == l.y_high))
                .map(|l| l.c0)
                .ok_or(Error::Coverage { x, y })
        }
        VelocityField::Raster(r) => r.sample(x, y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_reference_values() {
        assert_eq!(gamma_from_q(f64::INFINITY).unwrap(), 0.0);
        assert_relative_eq!(gamma_from_q(10.0).unwrap(), 0.031_725_517_430_553_57, max_relative = 1e-14);
        assert_relative_eq!(gamma_from_q(100.0).unwrap(), 0.003_182_992_764_908_255, max_relative = 1e-14);
    }

    #[test]
    fn gamma_rejects_nonpositive_q() {
        assert!(matches!(gamma_from_q(0.0), Err(Error::Domain(_))));
        assert!(matches!(gamma_from_q(-3.0), Err(Error::Domain(_))));
        assert!(gamma_from_q(f64::NAN).is_err());
    }

    #[test]
    fn coefficients_limits() {
        let k = derive_coefficients(2000.0, 0.0, 60.0);
        assert_eq!(k, Coefficients { eta: -1.0, tau: 0.0, c_phase: 2000.0 });

        let k = derive_coefficients(2000.0, 0.5, 60.0);
        // cos(pi/2) is 6e-17 in floating point; scale is c0/omega0.
        assert!(k.eta.abs() < 1e-15 * 2000.0 / 60.0);
        assert_relative_eq!(k.tau, -1.0 / 60.0, max_relative = 1e-14);
    }

    #[test]
    fn coefficients_q100() {
        let gamma = gamma_from_q(100.0).unwrap();
        let k = derive_coefficients(2000.0, gamma, 60.0);
        assert_relative_eq!(k.eta, -1.022_522_587_682_274_3, max_relative = 1e-13);
        assert_relative_eq!(k.tau, -5.112_612_938_411_371_5e-6, max_relative = 1e-13);
        assert_relative_eq!(k.c_phase, 1999.975_001_718_615_2, max_relative = 1e-14);
    }

    #[test]
    fn dispersion_curve_values() {
        let p = MediumParams::new(f64::INFINITY, 60.0, 1.0).unwrap();
        let curve = dispersion_curve(&p, 2000.0, &[10.0, 60.0, 600.0]);
        assert!(curve.iter().all(|&(c, a)| c == 2000.0 && a == 0.0));

        let p = MediumParams { q_factor: 1.0 / (0.1 * PI).tan(), omega0: 60.0, gamma: 0.1, rho0: 1.0 };
        let curve = dispersion_curve(&p, 2000.0, &[60.0, 120.0]);
        assert_relative_eq!(curve[0].0, 2000.0, max_relative = 1e-15);
        assert_relative_eq!(curve[1].0, 2143.546_925_072_586_3, max_relative = 1e-14);
        assert_relative_eq!(curve[1].1, 0.008_866_674_490_133_103, max_relative = 1e-13);
    }

    #[test]
    fn mode_terms() {
        let p = MediumParams::new(10.0, 60.0, 1.0).unwrap();
        let full = p.mode_terms(EquationMode::Full, 3000.0);
        assert!(full.tau < 0.0 && full.eta < 0.0);
        let att = p.mode_terms(EquationMode::Attenuation, 3000.0);
        assert_eq!((att.eta, att.dispersion_exponent), (-1.0, 1.0));
        assert_eq!(att.tau, full.tau);
        let disp = p.mode_terms(EquationMode::Dispersion, 3000.0);
        assert_eq!(disp.tau, 0.0);
        assert_eq!(disp.eta, full.eta);
        let classical = p.mode_terms(EquationMode::Classical, 3000.0);
        assert_eq!((classical.eta, classical.tau, classical.c_phase), (-1.0, 0.0, 3000.0));
        assert_eq!(classical.dispersion_exponent, 1.0);
    }

    #[test]
    fn velocity_sampling() {
        let f = VelocityField::constant(2000.0).unwrap();
        assert_eq!(sample_velocity(&f, -1e9, 3.0).unwrap(), 2000.0);

        let f = VelocityField::layered(vec![
            Layer { y_low: 0.0, y_high: 500.0, c0: 2000.0 },
            Layer { y_low: 500.0, y_high: 1000.0, c0: 3000.0 },
        ])
        .unwrap();
        assert_eq!(sample_velocity(&f, 0.0, 250.0).unwrap(), 2000.0);
        assert_eq!(sample_velocity(&f, 0.0, 500.0).unwrap(), 3000.0);
        assert_eq!(sample_velocity(&f, 0.0, 1000.0).unwrap(), 3000.0);
        assert!(matches!(sample_velocity(&f, 0.0, 1000.5), Err(Error::Coverage { .. })));

        let r = Raster::new(2, 2, 10.0, 10.0, 0.0, 0.0, vec![1000.0, 2000.0, 3000.0, 4000.0]).unwrap();
        let f = VelocityField::Raster(r);
        assert_eq!(sample_velocity(&f, 5.0, 5.0).unwrap(), 2500.0);
        assert_eq!(sample_velocity(&f, 10.0, 0.0).unwrap(), 2000.0);
        assert_eq!(sample_velocity(&f, 0.0, 10.0).unwrap(), 3000.0);
        assert!(sample_velocity(&f, 11.0, 5.0).is_err());
    }

    #[test]
    fn raster_text_format() {
        let r = Raster::parse("2 3 1 2 0 0\n1 2 3\n4 5 6\n", "inline").unwrap();
        assert_eq!((r.rows, r.cols), (2, 3));
        assert_eq!(r.x_max(), 2.0);
        assert_eq!(r.y_max(), 2.0);
        assert!(matches!(Raster::parse("2 2 1 1 0 0\n1 2 3\n", "x"), Err(Error::Config(_))));
        assert!(matches!(Raster::parse("2 2 1 1 0\n", "x"), Err(Error::Parse { .. })));
        assert!(matches!(Raster::parse("2 2 1 1 0 0\n1 a 3 4\n", "x"), Err(Error::Parse { line: 2, .. })));
    }
}
