//! Sampled characteristic functions and Wigner functions on square grids.
//!
//! Quadratures follow `α = (x + ip)/√2`, so the vacuum has `Var x = 1/2` and
//! `W(0,0) = 1/π`.

use std::fmt::Write as _;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default β-plane extent.
pub const DEFAULT_BETA_MAX: f64 = 10.0;
/// Default β-plane sample count per axis.
pub const DEFAULT_BETA_POINTS: usize = 401;

/// Symmetric, odd-sized sampling of `[-extent, extent]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub extent: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(extent: f64, points: usize) -> Result<Self> {
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::domain("grid extent must be positive"));
        }
        if points < 3 || points.is_multiple_of(2) {
            return Err(Error::domain(format!(
                "grid needs an odd number of points >= 3, got {points}"
            )));
        }
        Ok(Self { extent, points })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.extent / (self.points - 1) as f64
    }

    pub fn center(&self) -> usize {
        self.points / 2
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.step()
    }

    pub fn coords(&self) -> Array1<f64> {
        Array1::from_shape_fn(self.points, |i| self.coord(i))
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Array1<f64> {
        let h = self.step();
        Array1::from_shape_fn(self.points, |i| {
            if i == 0 || i + 1 == self.points {
                0.5 * h
            } else {
                h
            }
        })
    }
}

impl Default for Axis {
    fn default() -> Self {
        Self {
            extent: DEFAULT_BETA_MAX,
            points: DEFAULT_BETA_POINTS,
        }
    }
}

/// `χ(β)` sampled at `β = β_r + iβ_i`; `values[[a, b]]` holds `β_r = coord(a)`, `β_i = coord(b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharGrid {
    pub axis: Axis,
    pub values: Array2<C64>,
}

/// `W(x, p)`; `values[[a, b]]` holds `x = coord(a)`, `p = coord(b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub axis: Axis,
    pub values: Array2<f64>,
}

#[derive(Serialize, Deserialize)]
struct CharGridJson {
    beta_max: f64,
    points: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct WignerGridJson {
    x_max: f64,
    points: usize,
    values: Vec<f64>,
}

impl CharGrid {
    pub fn new(axis: Axis, values: Array2<C64>) -> Result<Self> {
        if values.dim() != (axis.points, axis.points) {
            return Err(Error::domain(
                "characteristic grid shape does not match its axis",
            ));
        }
        Ok(Self { axis, values })
    }

    pub fn at_origin(&self) -> C64 {
        let c = self.axis.center();
        self.values[[c, c]]
    }

    /// Largest `|χ(-β) - χ(β)*|` over the grid.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.axis.points;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let d = self.values[[n - 1 - a, n - 1 - b]] - self.values[[a, b]].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "beta_max,{}", self.axis.extent).unwrap();
        writeln!(s, "points,{}", self.axis.points).unwrap();
        writeln!(s, "beta_re,beta_im,re,im").unwrap();
        for a in 0..self.axis.points {
            for b in 0..self.axis.points {
                let v = self.values[[a, b]];
                writeln!(
                    s,
                    "{},{},{:e},{:e}",
                    self.axis.coord(a),
                    self.axis.coord(b),
                    v.re,
                    v.im
                )
                .unwrap();
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let doc = CharGridJson {
            beta_max: self.axis.extent,
            points: self.axis.points,
            re: self.values.iter().map(|z| z.re).collect(),
            im: self.values.iter().map(|z| z.im).collect(),
        };
        serde_json::to_string(&doc).expect("grid serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CharGridJson =
            serde_json::from_str(text).map_err(|e| Error::domain(e.to_string()))?;
        let axis = Axis::new(doc.beta_max, doc.points)?;
        if doc.re.len() != doc.points * doc.points || doc.im.len() != doc.re.len() {
            return Err(Error::domain(
                "characteristic grid has the wrong number of values",
            ));
        }
        let values = Array2::from_shape_fn((doc.points, doc.points), |(a, b)| {
            let i = a * doc.points + b;
            C64::new(doc.re[i], doc.im[i])
        });
        Self::new(axis, values)
    }
}

impl WignerGrid {
    pub fn new(axis: Axis, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (axis.points, axis.points) {
            return Err(Error::domain("Wigner grid shape does not match its axis"));
        }
        Ok(Self { axis, values })
    }

    /// Trapezoid integral of `f(W)` over the grid.
    pub fn integrate_with(&self, f: impl Fn(f64) -> f64) -> f64 {
        let w = self.axis.weights();
        let mut total = 0.0;
        for (a, row) in self.values.outer_iter().enumerate() {
            let mut acc = 0.0;
            for (b, v) in row.iter().enumerate() {
                acc += w[b] * f(*v);
            }
            total += w[a] * acc;
        }
        total
    }

    pub fn total_mass(&self) -> f64 {
        self.integrate_with(|v| v)
    }

    pub fn value_at_origin(&self) -> f64 {
        let c = self.axis.center();
        self.values[[c, c]]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "x_max,{}", self.axis.extent).unwrap();
        writeln!(s, "points,{}", self.axis.points).unwrap();
        writeln!(s, "x,p,w").unwrap();
        for a in 0..self.axis.points {
            for b in 0..self.axis.points {
                writeln!(
                    s,
                    "{},{},{:e}",
                    self.axis.coord(a),
                    self.axis.coord(b),
                    self.values[[a, b]]
                )
                .unwrap();
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let doc = WignerGridJson {
            x_max: self.axis.extent,
            points: self.axis.points,
            values: self.values.iter().copied().collect(),
        };
        serde_json::to_string(&doc).expect("grid serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WignerGridJson =
            serde_json::from_str(text).map_err(|e| Error::domain(e.to_string()))?;
        let axis = Axis::new(doc.x_max, doc.points)?;
        let values = Array2::from_shape_vec((doc.points, doc.points), doc.values)
            .map_err(|_| Error::domain("Wigner grid has the wrong number of values"))?;
        Self::new(axis, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_rules() {
        assert!(Axis::new(6.0, 200).is_err());
        assert!(Axis::new(-1.0, 201).is_err());
        let ax = Axis::new(6.0, 201).unwrap();
        assert_eq!(ax.center(), 100);
        assert!((ax.step() - 0.06).abs() < 1e-15);
        assert_eq!(ax.coord(100), 0.0);
        assert!((ax.weights().sum() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip() {
        let ax = Axis::new(1.0, 3).unwrap();
        let g = CharGrid::new(
            ax,
            Array2::from_shape_fn((3, 3), |(a, b)| C64::new(a as f64, b as f64)),
        )
        .unwrap();
        assert_eq!(CharGrid::from_json(&g.to_json()).unwrap(), g);
        let w = WignerGrid::new(
            ax,
            Array2::from_shape_fn((3, 3), |(a, b)| (a * 3 + b) as f64),
        )
        .unwrap();
        assert_eq!(WignerGrid::from_json(&w.to_json()).unwrap(), w);
    }

    #[test]
    fn csv_headers() {
        let ax = Axis::new(1.0, 3).unwrap();
        let w = WignerGrid::new(ax, Array2::zeros((3, 3))).unwrap();
        let csv = w.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(&lines[..3], &["x_max,1", "points,3", "x,p,w"]);
        assert_eq!(lines.len(), 3 + 9);
        let g = CharGrid::new(ax, Array2::zeros((3, 3))).unwrap();
        assert!(g
            .to_csv()
            .starts_with("beta_max,1\npoints,3\nbeta_re,beta_im,re,im\n"));
    }
}
