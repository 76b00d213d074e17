//! Mass-fraction windows and digital rotation of Wigner grids.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::grid::WignerGrid;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowShape {
    /// `max(|x|, |p|) ≤ r`.
    #[default]
    Square,
    /// `x² + p² ≤ r²`.
    Disk,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Windowed {
    pub grid: WignerGrid,
    /// Half-width (square) or radius (disk) of the kept region.
    pub half_width: f64,
    pub shape: WindowShape,
    /// Enclosed mass over total mass.
    pub fraction: f64,
}

fn radius(shape: WindowShape, x: f64, p: f64) -> f64 {
    match shape {
        WindowShape::Square => x.abs().max(p.abs()),
        WindowShape::Disk => x.hypot(p),
    }
}

/// Smallest centered window whose enclosed integral reaches `mass_fraction`
/// of the total; values outside are zeroed.
pub fn window_wigner(w: &WignerGrid, mass_fraction: f64) -> Windowed {
    window_wigner_shaped(w, mass_fraction, WindowShape::Square)
}

pub fn window_wigner_shaped(w: &WignerGrid, mass_fraction: f64, shape: WindowShape) -> Windowed {
    let ax = w.axis;
    if mass_fraction >= 1.0 {
        let half_width = match shape {
            WindowShape::Square => ax.extent,
            WindowShape::Disk => ax.extent * std::f64::consts::SQRT_2,
        };
        return Windowed {
            grid: w.clone(),
            half_width,
            shape,
            fraction: 1.0,
        };
    }
    let xs = ax.coords();
    let wts = ax.weights();
    let n = ax.points;
    let mut cells: Vec<(f64, f64)> = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            cells.push((
                radius(shape, xs[a], xs[b]),
                wts[a] * wts[b] * w.values[[a, b]],
            ));
        }
    }
    cells.sort_by(|u, v| u.0.total_cmp(&v.0));
    let total: f64 = cells.iter().map(|c| c.1).sum();
    let goal = mass_fraction * total;
    let mut acc = 0.0;
    let mut r = cells.last().map(|c| c.0).unwrap_or(0.0);
    let mut i = 0;
    while i < cells.len() {
        let shell = cells[i].0;
        while i < cells.len() && cells[i].0 == shell {
            acc += cells[i].1;
            i += 1;
        }
        if acc >= goal {
            r = shell;
            break;
        }
    }
    let values = Array2::from_shape_fn((n, n), |(a, b)| {
        if radius(shape, xs[a], xs[b]) <= r {
            w.values[[a, b]]
        } else {
            0.0
        }
    });
    let grid = WignerGrid { axis: ax, values };
    let fraction = if total != 0.0 {
        grid.total_mass() / total
    } else {
        1.0
    };
    Windowed {
        grid,
        half_width: r,
        shape,
        fraction,
    }
}

/// Rotation about the origin by `angle` with bilinear interpolation;
/// samples falling outside the grid read as zero.
pub fn rotate_wigner(w: &WignerGrid, angle: f64) -> WignerGrid {
    let ax = w.axis;
    let n = ax.points;
    let h = ax.step();
    let (s, c) = angle.sin_cos();
    let sample = |fx: f64, fp: f64| -> f64 {
        let i0 = fx.floor();
        let j0 = fp.floor();
        let (tx, tp) = (fx - i0, fp - j0);
        let mut acc = 0.0;
        for (di, wx) in [(0, 1.0 - tx), (1, tx)] {
            for (dj, wp) in [(0, 1.0 - tp), (1, tp)] {
                let i = i0 as i64 + di;
                let j = j0 as i64 + dj;
                if wx * wp != 0.0 && i >= 0 && j >= 0 && (i as usize) < n && (j as usize) < n {
                    acc += wx * wp * w.values[[i as usize, j as usize]];
                }
            }
        }
        acc
    };
    let values = Array2::from_shape_fn((n, n), |(a, b)| {
        let x = ax.coord(a);
        let p = ax.coord(b);
        // W'(x, p) = W(R(-angle)(x, p))
        let xr = c * x + s * p;
        let pr = -s * x + c * p;
        sample(xr / h + ax.center() as f64, pr / h + ax.center() as f64)
    });
    WignerGrid { axis: ax, values }
}
