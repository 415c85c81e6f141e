//! Uniform 3-D lattices: finite-difference weights, derivative operators on
//! whole grids, finite-difference jets at grid points, and CSV dump/load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{self, Jet};

/// Finite-difference weights (Fornberg). `weights[d][j]` approximates the
/// d-th derivative at `z` from values at `nodes[j]`, for d = 0..=max_deriv.
pub fn fornberg_weights(z: f64, nodes: &[f64], max_deriv: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let m = max_deriv;
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Half-width of the centred stencil for derivative `d` at accuracy `p`.
pub fn stencil_radius(d: usize, accuracy: usize) -> usize {
    if d == 0 {
        0
    } else {
        (accuracy + d - 1) / 2
    }
}

/// A 1-D stencil in units of the grid spacing: `Σ w_j f(i + offset_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    pub offsets: Vec<isize>,
    pub weights: Vec<f64>,
}

impl Stencil {
    /// Centred stencil for derivative `d`, spacing `h`.
    pub fn centered(d: usize, accuracy: usize, h: f64) -> Stencil {
        let r = stencil_radius(d, accuracy) as isize;
        Stencil::on_window(d, -r, r, 0, h)
    }

    /// Stencil on the offsets lo..=hi evaluated at offset `at`.
    pub fn on_window(d: usize, lo: isize, hi: isize, at: isize, h: f64) -> Stencil {
        let offsets: Vec<isize> = (lo..=hi).collect();
        let nodes: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
        let w = fornberg_weights(at as f64, &nodes, d);
        let scale = h.powi(d as i32);
        Stencil {
            offsets: offsets.iter().map(|o| o - at).collect(),
            weights: w[d].iter().map(|x| x / scale).collect(),
        }
    }
}

/// Uniform rectilinear grid; points `lo[a] + i·h[a]` for i in 0..n[a].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: [usize; 3],
    pub lo: [f64; 3],
    pub h: [f64; 3],
}

impl Grid {
    /// Cube [lo, hi]³ with `cells` intervals per axis.
    pub fn cube(lo: f64, hi: f64, cells: usize) -> Grid {
        let h = (hi - lo) / cells as f64;
        Grid {
            n: [cells + 1; 3],
            lo: [lo; 3],
            h: [h; 3],
        }
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.n[1] + i[1]) * self.n[2] + i[2]
    }

    pub fn multi(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.n[2];
        let j = (idx / self.n[2]) % self.n[1];
        let i = idx / (self.n[1] * self.n[2]);
        [i, j, k]
    }

    pub fn coord(&self, i: [usize; 3]) -> [f64; 3] {
        std::array::from_fn(|a| self.lo[a] + i[a] as f64 * self.h[a])
    }

    pub fn hi(&self) -> [f64; 3] {
        std::array::from_fn(|a| self.lo[a] + (self.n[a] - 1) as f64 * self.h[a])
    }

    /// Nearest grid index to a physical coordinate, if it lies on the grid.
    pub fn locate(&self, x: [f64; 3]) -> Option<[usize; 3]> {
        let mut out = [0; 3];
        for a in 0..3 {
            let f = (x[a] - self.lo[a]) / self.h[a];
            let r = f.round();
            if (f - r).abs() > 1e-9 || r < 0.0 || r as usize >= self.n[a] {
                return None;
            }
            out[a] = r as usize;
        }
        Some(out)
    }

    /// Distance in cells from `i` to the nearest face.
    pub fn boundary_distance(&self, i: [usize; 3]) -> usize {
        (0..3)
            .map(|a| i[a].min(self.n[a] - 1 - i[a]))
            .min()
            .unwrap_or(0)
    }

    pub fn zeros(&self) -> Vec<f64> {
        vec![0.0; self.len()]
    }

    pub fn sample(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| f(self.coord(self.multi(i))))
            .collect()
    }
}

/// First-derivative operator along one axis of a grid, centred in the
/// interior and shifted (same width) near the faces.
#[derive(Clone, Debug)]
pub struct AxisDerivative {
    axis: usize,
    stencils: Vec<Stencil>,
}

impl AxisDerivative {
    pub fn new(grid: &Grid, axis: usize, accuracy: usize) -> Result<AxisDerivative> {
        let n = grid.n[axis] as isize;
        let r = stencil_radius(1, accuracy) as isize;
        if n < 2 * r + 1 {
            return Err(Error::InvalidConfig(format!(
                "axis {axis} has {n} points, stencil needs {}",
                2 * r + 1
            )));
        }
        let stencils = (0..n)
            .map(|i| {
                let lo = (i - r).clamp(0, n - 1 - 2 * r);
                Stencil::on_window(1, lo, lo + 2 * r, i, grid.h[axis])
            })
            .collect();
        Ok(AxisDerivative { axis, stencils })
    }

    /// out = ∂_axis f over the whole grid.
    pub fn apply(&self, grid: &Grid, f: &[f64], out: &mut [f64]) {
        let stride = match self.axis {
            0 => grid.n[1] * grid.n[2],
            1 => grid.n[2],
            _ => 1,
        } as isize;
        for (idx, o) in out.iter_mut().enumerate() {
            let i = grid.multi(idx)[self.axis];
            let s = &self.stencils[i];
            let mut acc = 0.0;
            for (off, w) in s.offsets.iter().zip(&s.weights) {
                acc += w * f[(idx as isize + off * stride) as usize];
            }
            *o = acc;
        }
    }

    pub fn applied(&self, grid: &Grid, f: &[f64]) -> Vec<f64> {
        let mut out = grid.zeros();
        self.apply(grid, f, &mut out);
        out
    }
}

/// The three first-derivative operators of a grid.
#[derive(Clone, Debug)]
pub struct Gradient {
    pub d: [AxisDerivative; 3],
}

impl Gradient {
    pub fn new(grid: &Grid, accuracy: usize) -> Result<Gradient> {
        Ok(Gradient {
            d: [
                AxisDerivative::new(grid, 0, accuracy)?,
                AxisDerivative::new(grid, 1, accuracy)?,
                AxisDerivative::new(grid, 2, accuracy)?,
            ],
        })
    }
}

/// Spatial Taylor jet (time coefficients zero) of grid data at a grid point,
/// with centred stencils of the given accuracy for every partial.
pub fn lattice_jet(
    grid: &Grid,
    f: &[f64],
    at: [usize; 3],
    order: usize,
    accuracy: usize,
) -> Result<Jet> {
    if order > jet::MAX_ORDER {
        return Err(Error::OrderTooHigh(order));
    }
    let needed = stencil_radius(order, accuracy);
    if grid.boundary_distance(at) < needed {
        return Err(Error::BoundaryTooClose { index: at, needed });
    }
    let stencils: Vec<[Stencil; 3]> = (0..=order)
        .map(|d| std::array::from_fn(|a| Stencil::centered(d, accuracy, grid.h[a])))
        .collect();
    let mut out = Jet::zero(order);
    let mut fact = vec![1.0; order + 1];
    for k in 1..=order {
        fact[k] = fact[k - 1] * k as f64;
    }
    for i in 0..jet::jet_size(order) {
        let a = jet::multi_index(i);
        if a[0] != 0 {
            continue;
        }
        let (s1, s2, s3) = (&stencils[a[1]][0], &stencils[a[2]][1], &stencils[a[3]][2]);
        let mut acc = 0.0;
        for (o1, w1) in s1.offsets.iter().zip(&s1.weights) {
            for (o2, w2) in s2.offsets.iter().zip(&s2.weights) {
                let w12 = w1 * w2;
                for (o3, w3) in s3.offsets.iter().zip(&s3.weights) {
                    let p = [
                        (at[0] as isize + o1) as usize,
                        (at[1] as isize + o2) as usize,
                        (at[2] as isize + o3) as usize,
                    ];
                    acc += w12 * w3 * f[grid.index(p)];
                }
            }
        }
        out.coeffs_mut()[i] = acc / (fact[a[1]] * fact[a[2]] * fact[a[3]]);
    }
    Ok(out)
}

/// Writes named grid fields as CSV: `i,j,k,x1,x2,x3,<names>`, one row per point.
pub fn dump_csv(path: &Path, grid: &Grid, names: &[&str], fields: &[&[f64]]) -> Result<()> {
    if names.len() != fields.len() || fields.iter().any(|f| f.len() != grid.len()) {
        return Err(Error::InvalidConfig(
            "field/name mismatch in CSV dump".into(),
        ));
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    let mut header = vec!["i", "j", "k", "x1", "x2", "x3"];
    header.extend_from_slice(names);
    w.write_record(&header).map_err(csv_error)?;
    let mut row = Vec::with_capacity(header.len());
    for idx in 0..grid.len() {
        let m = grid.multi(idx);
        let x = grid.coord(m);
        row.clear();
        row.extend(m.iter().map(|v| v.to_string()));
        row.extend(x.iter().map(|v| format!("{v:e}")));
        row.extend(fields.iter().map(|f| format!("{:e}", f[idx])));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Grid fields read back from [`dump_csv`] output.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedGrid {
    pub grid: Grid,
    pub names: Vec<String>,
    pub fields: Vec<Vec<f64>>,
}

pub fn load_csv(path: &Path) -> Result<LoadedGrid> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_error)?;
    let header = reader.headers().map_err(csv_error)?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() < 6 || cols[..6] != ["i", "j", "k", "x1", "x2", "x3"] {
        return Err(Error::Io(format!("unexpected CSV header: {cols:?}")));
    }
    let names: Vec<String> = cols[6..].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for (ln, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let bad = |e: &dyn std::fmt::Display| Error::Io(format!("line {}: {e}", ln + 2));
        let idx: [usize; 3] = [
            rec[0].parse().map_err(|e| bad(&e))?,
            rec[1].parse().map_err(|e| bad(&e))?,
            rec[2].parse().map_err(|e| bad(&e))?,
        ];
        let vals: Vec<f64> = rec
            .iter()
            .skip(3)
            .map(|s| s.parse::<f64>().map_err(|e| bad(&e)))
            .collect::<Result<_>>()?;
        rows.push((idx, vals));
    }
    if rows.is_empty() {
        return Err(Error::Io("CSV has no rows".into()));
    }
    let n: [usize; 3] = std::array::from_fn(|a| rows.iter().map(|r| r.0[a]).max().unwrap_or(0) + 1);
    let find = |i: [usize; 3]| rows.iter().find(|r| r.0 == i).map(|r| &r.1);
    let origin = find([0, 0, 0]).ok_or_else(|| Error::Io("missing origin row".into()))?;
    let lo = [origin[0], origin[1], origin[2]];
    let h: [f64; 3] = std::array::from_fn(|a| {
        if n[a] < 2 {
            1.0
        } else {
            let mut i = [0; 3];
            i[a] = n[a] - 1;
            find(i).map_or(1.0, |r| (r[a] - lo[a]) / (n[a] - 1) as f64)
        }
    });
    let grid = Grid { n, lo, h };
    if rows.len() != grid.len() {
        return Err(Error::Io(format!(
            "expected {} rows, found {}",
            grid.len(),
            rows.len()
        )));
    }
    let mut fields = vec![grid.zeros(); names.len()];
    for (idx, vals) in &rows {
        let g = grid.index(*idx);
        for (f, v) in fields.iter_mut().zip(&vals[3..]) {
            f[g] = *v;
        }
    }
    Ok(LoadedGrid {
        grid,
        names,
        fields,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_textbook_weights() {
        let w = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let d1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for j in 0..5 {
            assert!((w[1][j] - d1[j]).abs() < 1e-14);
            assert!((w[2][j] - d2[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_data_gives_exact_gradient() {
        let g = Grid::cube(-1.0, 1.0, 16);
        let f = g.sample(|x| 2.0 + x[0]);
        let j = lattice_jet(&g, &f, [8, 8, 8], 3, 4).unwrap();
        assert!((j.value() - 2.0).abs() < 1e-14);
        assert!((j.coeff(&[0, 1, 0, 0]) - 1.0).abs() < 1e-12);
        assert!(j.coeff(&[0, 0, 1, 0]).abs() < 1e-12);
        assert!(j.coeff(&[0, 2, 0, 0]).abs() < 1e-10);
    }

    #[test]
    fn constant_data_has_no_derivatives() {
        let g = Grid::cube(0.0, 1.0, 12);
        let f = g.sample(|_| 3.5);
        let j = lattice_jet(&g, &f, [6, 6, 6], 4, 4).unwrap();
        assert_eq!(j.value(), 3.5);
        assert!(j.coeffs()[1..].iter().all(|c| c.abs() < 1e-9));
    }

    #[test]
    fn boundary_rejected() {
        let g = Grid::cube(0.0, 1.0, 12);
        let f = g.zeros();
        assert!(matches!(
            lattice_jet(&g, &f, [1, 6, 6], 2, 4),
            Err(Error::BoundaryTooClose { .. })
        ));
    }

    #[test]
    fn axis_derivative_on_polynomial_is_exact() {
        let g = Grid::cube(-1.0, 1.0, 10);
        let f = g.sample(|x| x[1].powi(3) - x[1]);
        let d = AxisDerivative::new(&g, 1, 4).unwrap().applied(&g, &f);
        for idx in 0..g.len() {
            let x = g.coord(g.multi(idx));
            assert!((d[idx] - (3.0 * x[1] * x[1] - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = Grid {
            n: [3, 4, 2],
            lo: [-1.0, 0.0, 0.5],
            h: [0.5, 0.25, 1.0],
        };
        let a = g.sample(|x| x[0] * x[1] + x[2]);
        let b = g.sample(|x| (x[0] - x[2]).sin());
        let dir = std::env::temp_dir().join(format!("lattice_csv_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g.csv");
        dump_csv(&path, &g, &["a", "b"], &[&a, &b]).unwrap();
        let back = load_csv(&path).unwrap();
        assert_eq!(back.grid.n, g.n);
        for a_ in 0..3 {
            assert!((back.grid.lo[a_] - g.lo[a_]).abs() < 1e-15);
            assert!((back.grid.h[a_] - g.h[a_]).abs() < 1e-15);
        }
        assert_eq!(back.names, vec!["a", "b"]);
        assert_eq!(back.fields[0], a);
        assert_eq!(back.fields[1], b);
        std::fs::remove_dir_all(dir).ok();
    }
}
