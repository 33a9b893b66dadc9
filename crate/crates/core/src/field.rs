//! Piecewise-constant sampled functions and weights on a bounded box.
//!
//! A field lives on `[-L, L]^n` with `N` cells per axis; both `L` and `N`
//! are powers of two so every cell boundary is an exact dyadic rational.
//! All integrals are exact sums over cells; regions of integration are
//! half-open boxes snapped to cell boundaries, so there is no quadrature
//! error inside the evaluation region.

use crate::error::{Error, Result};
use crate::grid::Cube;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Function,
    Weight,
}

/// A half-open box of whole cells, `lo[a] <= i < hi[a]` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRange {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
    pub n: u8,
}

impl CellRange {
    pub fn cell_count(&self) -> usize {
        (0..self.n as usize).map(|a| self.hi[a] - self.lo[a]).product()
    }

    pub fn is_empty(&self) -> bool {
        (0..self.n as usize).any(|a| self.hi[a] <= self.lo[a])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    n: u8,
    /// Box half-width `L`; the box is `[-L, L]^n`.
    half_width: f64,
    /// Cells per axis.
    cells: usize,
    kind: FieldKind,
    /// Row-major, axis 0 fastest.
    values: Vec<f64>,
}

impl SampledField {
    pub fn new(n: u8, half_width: f64, cells: usize, kind: FieldKind, values: Vec<f64>) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::Domain(format!("field dimension must be 1 or 2, got {n}")));
        }
        if !(half_width > 0.0) || half_width.log2().fract() != 0.0 {
            return Err(Error::Domain(format!("box half-width must be a power of two, got {half_width}")));
        }
        if cells == 0 || !cells.is_power_of_two() {
            return Err(Error::Domain(format!("cells per axis must be a power of two, got {cells}")));
        }
        if values.len() != cells.pow(n as u32) {
            return Err(Error::Domain(format!(
                "value count {} does not match {cells}^{n}",
                values.len()
            )));
        }
        for &v in &values {
            if !v.is_finite() {
                return Err(Error::Domain(format!("nonfinite cell value {v}")));
            }
            if kind == FieldKind::Weight && v <= 0.0 {
                return Err(Error::NotAWeight(format!("cell value {v} is not strictly positive")));
            }
        }
        Ok(Self {
            n,
            half_width,
            cells,
            kind,
            values,
        })
    }

    pub fn constant(n: u8, half_width: f64, cells: usize, kind: FieldKind, value: f64) -> Result<Self> {
        Self::new(n, half_width, cells, kind, vec![value; cells.pow(n as u32)])
    }

    pub fn dim(&self) -> u8 {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact cell side, a power of two.
    pub fn cell_width(&self) -> f64 {
        2.0 * self.half_width / self.cells as f64
    }

    /// Volume of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.cell_width().powi(self.n as i32)
    }

    /// Low coordinate of cell `i` on one axis.
    pub fn cell_low(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.cell_width()
    }

    /// Center coordinate of cell `i` on one axis.
    pub fn cell_center(&self, i: usize) -> f64 {
        self.cell_low(i) + 0.5 * self.cell_width()
    }

    /// Axis index of the cell containing coordinate `x`, clamped to the box.
    pub fn axis_index(&self, x: f64) -> usize {
        let i = ((x + self.half_width) / self.cell_width()).floor();
        (i.max(0.0) as usize).min(self.cells - 1)
    }

    #[inline]
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        match self.n {
            1 => idx[0],
            _ => idx[0] + self.cells * idx[1],
        }
    }

    /// Cell value at a point inside the box.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        let mut idx = [0usize; 2];
        for (a, &xa) in x.iter().take(self.n as usize).enumerate() {
            idx[a] = self.axis_index(xa);
        }
        self.values[self.flat_index(&idx)]
    }

    pub fn full_range(&self) -> CellRange {
        let mut hi = [1usize; 3];
        hi[..self.n as usize].fill(self.cells);
        CellRange {
            lo: [0; 3],
            hi,
            n: self.n,
        }
    }

    /// Snap a geometric half-open box (`low[a] <= x < low[a] + side`) to the
    /// mesh: each boundary is rounded to the nearest cell edge, then clipped
    /// to the field box. Returns `None` when the snapped region is empty.
    pub fn snap_box(&self, low: &[f64], side: f64) -> Option<CellRange> {
        let h = self.cell_width();
        let mut r = CellRange {
            lo: [0; 3],
            hi: [1; 3],
            n: self.n,
        };
        for a in 0..self.n as usize {
            let lo_edge = ((low[a] + self.half_width) / h).round().max(0.0);
            let hi_edge = ((low[a] + side + self.half_width) / h).round().min(self.cells as f64);
            if hi_edge <= lo_edge {
                return None;
            }
            r.lo[a] = lo_edge as usize;
            r.hi[a] = hi_edge as usize;
        }
        Some(r)
    }

    /// Snap a dyadic cube to the mesh.
    pub fn snap_cube(&self, q: &Cube) -> Option<CellRange> {
        if q.n != self.n {
            return None;
        }
        let low: Vec<f64> = (0..self.n as usize).map(|a| q.low(a)).collect();
        self.snap_box(&low, q.side())
    }

    /// Iterate flat indices of the cells in a range.
    pub fn iter_range<'a>(&'a self, r: &'a CellRange) -> impl Iterator<Item = usize> + 'a {
        let n = self.n as usize;
        let row = self.cells;
        let (l0, h0) = (r.lo[0], r.hi[0]);
        let (l1, h1) = if n == 2 { (r.lo[1], r.hi[1]) } else { (0, 1) };
        (l1..h1).flat_map(move |j| (l0..h0).map(move |i| i + row * j))
    }

    /// Exact integral of `g(value)` over a snapped region.
    pub fn integrate_map(&self, r: &CellRange, g: impl Fn(f64) -> f64) -> f64 {
        let vol = self.cell_volume();
        self.iter_range(r).map(|i| g(self.values[i])).sum::<f64>() * vol
    }

    /// Exact integral of the raw values over a snapped region.
    pub fn integrate(&self, r: &CellRange) -> f64 {
        self.integrate_map(r, |v| v)
    }

    /// Mean over a snapped region.
    pub fn mean(&self, r: &CellRange) -> f64 {
        let count = r.cell_count();
        if count == 0 {
            return 0.0;
        }
        self.iter_range(r).map(|i| self.values[i]).sum::<f64>() / count as f64
    }

    /// Minimum cell value over a snapped region (the essential infimum in
    /// the piecewise-constant model).
    pub fn min_over(&self, r: &CellRange) -> f64 {
        self.iter_range(r).map(|i| self.values[i]).fold(f64::INFINITY, f64::min)
    }

    pub fn max_over(&self, r: &CellRange) -> f64 {
        self.iter_range(r).map(|i| self.values[i]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise transform; the result is a plain function field unless
    /// `kind` says otherwise.
    pub fn map(&self, kind: FieldKind, g: impl Fn(f64) -> f64) -> Result<SampledField> {
        SampledField::new(
            self.n,
            self.half_width,
            self.cells,
            kind,
            self.values.iter().map(|&v| g(v)).collect(),
        )
    }

    /// Cellwise combination of two fields on the same mesh.
    pub fn zip_map(&self, other: &SampledField, kind: FieldKind, g: impl Fn(f64, f64) -> f64) -> Result<SampledField> {
        if self.n != other.n || self.cells != other.cells || self.half_width != other.half_width {
            return Err(Error::Domain("fields live on different meshes".into()));
        }
        SampledField::new(
            self.n,
            self.half_width,
            self.cells,
            kind,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| g(a, b))
                .collect(),
        )
    }

    /// Halve the resolution by averaging cell pairs (exact for the
    /// piecewise-constant model: integrals are preserved).
    pub fn coarsen(&self) -> Result<SampledField> {
        if self.cells < 2 {
            return Err(Error::Domain("cannot coarsen a single-cell field".into()));
        }
        let m = self.cells / 2;
        let values = match self.n {
            1 => (0..m)
                .map(|i| 0.5 * (self.values[2 * i] + self.values[2 * i + 1]))
                .collect(),
            _ => {
                let mut v = Vec::with_capacity(m * m);
                for j in 0..m {
                    for i in 0..m {
                        let idx = |a: usize, b: usize| self.values[a + self.cells * b];
                        v.push(0.25 * (idx(2 * i, 2 * j) + idx(2 * i + 1, 2 * j) + idx(2 * i, 2 * j + 1) + idx(2 * i + 1, 2 * j + 1)));
                    }
                }
                v
            }
        };
        SampledField::new(self.n, self.half_width, m, self.kind, values)
    }

    /// Indicator of a geometric box, snapped to the mesh.
    pub fn indicator(n: u8, half_width: f64, cells: usize, low: &[f64], side: f64) -> Result<SampledField> {
        let mut f = SampledField::constant(n, half_width, cells, FieldKind::Function, 0.0)?;
        let r = f
            .snap_box(low, side)
            .ok_or_else(|| Error::Domain("indicator support misses the box".into()))?;
        let idx: Vec<usize> = f.iter_range(&r).collect();
        for i in idx {
            f.values[i] = 1.0;
        }
        Ok(f)
    }
}

/// Exact cell-averaged `|x|^alpha` on `[-L, L]^n`. In `n = 1` the averages
/// are closed-form per cell; in `n = 2` the cell value is the midpoint
/// sample (cells never contain the origin for even `N`). Requires
/// `alpha > -n` for local integrability.
pub fn power_weight(alpha: f64, n: u8, half_width: f64, cells: usize) -> Result<SampledField> {
    if !(alpha > -(n as f64)) {
        return Err(Error::Domain(format!(
            "power weight |x|^{alpha} is not locally integrable in dimension {n}"
        )));
    }
    let probe = SampledField::constant(n, half_width, cells, FieldKind::Function, 0.0)?;
    let h = probe.cell_width();
    let values = match n {
        1 => (0..cells)
            .map(|i| {
                let a = probe.cell_low(i);
                let b = a + h;
                // antiderivative of |x|^alpha: sign(x)|x|^{alpha+1}/(alpha+1)
                let prim = |x: f64| x.signum() * x.abs().powf(alpha + 1.0) / (alpha + 1.0);
                (prim(b) - prim(a)) / h
            })
            .collect(),
        _ => {
            let mut v = Vec::with_capacity(cells * cells);
            for j in 0..cells {
                for i in 0..cells {
                    let x = probe.cell_center(i);
                    let y = probe.cell_center(j);
                    v.push((x * x + y * y).sqrt().powf(alpha));
                }
            }
            v
        }
    };
    SampledField::new(n, half_width, cells, FieldKind::Weight, values)
}
