//! Shifted dyadic grids and cube navigation.
//!
//! In dimension `n` there are `3^n` grids, indexed `1..=3^n`. Grid `i` shifts
//! the standard dyadic mesh axiswise by `(-1)^k 2^k c/3` at level `k`, where
//! `c in {0,1,2}` is the base-3 digit of `i - 1` for that axis. Grid 1 is the
//! standard grid. The alternating sign makes every grid nested across levels
//! while the three shifts per axis guarantee that any axis-parallel cube is
//! covered by a grid cube of at most three times its side length.
//!
//! Cubes are stored as integers (grid id, level, corner index); geometry is
//! derived on demand so equality, nesting and containment are exact. Corner
//! coordinates live in "thirds units": the low edge of a cube on one axis is
//! `2^k (3m + sigma c) / 3` with `sigma = (-1)^k`, and `3m + sigma c` is an
//! exact integer. Levels are clamped to `|k| <= 40` so `2^k` stays exact in
//! double precision.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest admissible `|level|`.
pub const MAX_LEVEL: i32 = 40;

/// `(-1)^k`.
#[inline]
pub fn level_sign(k: i32) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn check_level(k: i32) -> Result<()> {
    if k.abs() > MAX_LEVEL {
        return Err(Error::Domain(format!("level {k} outside |k| <= {MAX_LEVEL}")));
    }
    Ok(())
}

/// One of the `3^n` shifted dyadic grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicGrid {
    /// Dimension, `1..=3`.
    pub n: u8,
    /// Grid index, `1..=3^n`.
    pub id: u16,
}

impl DyadicGrid {
    pub fn new(n: u8, id: u16) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::Domain(format!("dimension must be 1..=3, got {n}")));
        }
        let count = 3u16.pow(n as u32);
        if !(1..=count).contains(&id) {
            return Err(Error::Domain(format!("grid id must be 1..={count}, got {id}")));
        }
        Ok(Self { n, id })
    }

    /// Shift numerator `c in {0,1,2}` for one axis; the geometric shift at
    /// level `k` is `(-1)^k 2^k c/3`.
    #[inline]
    pub fn shift_digit(&self, axis: usize) -> i64 {
        ((self.id as i64 - 1) / 3i64.pow(axis as u32)) % 3
    }

    /// Geometric shift vector at level `k`.
    pub fn shift(&self, k: i32) -> Vec<f64> {
        let s = level_sign(k) as f64 * (k as f64).exp2() / 3.0;
        (0..self.n as usize).map(|a| s * self.shift_digit(a) as f64).collect()
    }

    /// The unique level-`k` cube of this grid containing `x`.
    pub fn containing_cube(&self, x: &[f64], k: i32) -> Result<Cube> {
        if x.len() != self.n as usize {
            return Err(Error::Domain(format!(
                "point has {} coordinates, grid dimension is {}",
                x.len(),
                self.n
            )));
        }
        check_level(k)?;
        let scale = (-(k as f64)).exp2();
        let sign = level_sign(k);
        let mut m = [0i64; 3];
        for (a, &xa) in x.iter().enumerate() {
            if !xa.is_finite() {
                return Err(Error::Domain(format!("nonfinite coordinate {xa}")));
            }
            m[a] = (xa * scale - (sign * self.shift_digit(a)) as f64 / 3.0).floor() as i64;
        }
        Ok(Cube {
            grid: self.id,
            n: self.n,
            k,
            m,
        })
    }
}

/// All `3^n` grids of dimension `n`.
pub fn build_grids(n: u8) -> Result<Vec<DyadicGrid>> {
    let count = if (1..=3).contains(&n) { 3u16.pow(n as u32) } else { 0 };
    (1..=count).map(|id| DyadicGrid::new(n, id)).collect::<Result<Vec<_>>>().and_then(|v| {
        if v.is_empty() {
            Err(Error::Domain(format!("dimension must be 1..=3, got {n}")))
        } else {
            Ok(v)
        }
    })
}

/// A cube of a shifted dyadic grid: half-open product of intervals
/// `[2^k(m + sigma c/3), . + 2^k)` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CubeRepr", into = "CubeRepr")]
pub struct Cube {
    pub grid: u16,
    pub n: u8,
    pub k: i32,
    /// Corner indices; entries beyond `n` are zero.
    pub m: [i64; 3],
}

/// Wire format `{"grid":i,"k":k,"m":[...]}`; the dimension is the length of
/// `m`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CubeRepr {
    grid: u16,
    k: i32,
    m: Vec<i64>,
}

impl TryFrom<CubeRepr> for Cube {
    type Error = Error;

    fn try_from(r: CubeRepr) -> Result<Self> {
        let n = r.m.len();
        if !(1..=3).contains(&n) {
            return Err(Error::Config(format!("cube corner must have 1..=3 entries, got {n}")));
        }
        check_level(r.k).map_err(|e| Error::Config(e.to_string()))?;
        DyadicGrid::new(n as u8, r.grid).map_err(|e| Error::Config(e.to_string()))?;
        let mut m = [0i64; 3];
        for (a, &v) in r.m.iter().enumerate() {
            if v.abs() > 1 << 50 {
                return Err(Error::Config(format!("cube corner index {v} out of range")));
            }
            m[a] = v;
        }
        Ok(Cube {
            grid: r.grid,
            n: n as u8,
            k: r.k,
            m,
        })
    }
}

impl From<Cube> for CubeRepr {
    fn from(c: Cube) -> Self {
        CubeRepr {
            grid: c.grid,
            k: c.k,
            m: c.m[..c.n as usize].to_vec(),
        }
    }
}

impl Cube {
    pub fn grid_ref(&self) -> DyadicGrid {
        DyadicGrid { n: self.n, id: self.grid }
    }

    /// Side length `2^k`, exact.
    #[inline]
    pub fn side(&self) -> f64 {
        (self.k as f64).exp2()
    }

    /// Volume `2^{nk}`.
    #[inline]
    pub fn volume(&self) -> f64 {
        ((self.n as i32 * self.k) as f64).exp2()
    }

    /// Low edge in thirds units: the low coordinate equals
    /// `thirds * 2^k / 3`, with `thirds` an exact integer.
    #[inline]
    pub fn low_thirds(&self, axis: usize) -> i64 {
        3 * self.m[axis] + level_sign(self.k) * self.grid_ref().shift_digit(axis)
    }

    /// Low coordinate on one axis.
    #[inline]
    pub fn low(&self, axis: usize) -> f64 {
        self.low_thirds(axis) as f64 * self.side() / 3.0
    }

    /// High coordinate on one axis.
    #[inline]
    pub fn high(&self, axis: usize) -> f64 {
        (self.low_thirds(axis) + 3) as f64 * self.side() / 3.0
    }

    /// Half-open membership test.
    pub fn contains_point(&self, x: &[f64]) -> bool {
        (0..self.n as usize).all(|a| self.low(a) <= x[a] && x[a] < self.high(a))
    }

    /// The level-`k+1` cube of the same grid containing this cube.
    pub fn parent(&self) -> Result<Cube> {
        check_level(self.k + 1)?;
        let g = self.grid_ref();
        let sign = level_sign(self.k);
        let mut m = [0i64; 3];
        for a in 0..self.n as usize {
            m[a] = (self.m[a] + sign * g.shift_digit(a)).div_euclid(2);
        }
        Ok(Cube {
            grid: self.grid,
            n: self.n,
            k: self.k + 1,
            m,
        })
    }

    /// The `2^n` level-`k-1` cubes of the same grid partitioning this cube.
    pub fn children(&self) -> Result<Vec<Cube>> {
        check_level(self.k - 1)?;
        let g = self.grid_ref();
        let child_sign = level_sign(self.k - 1);
        let n = self.n as usize;
        let mut out = Vec::with_capacity(1 << n);
        for bits in 0..1u32 << n {
            let mut m = [0i64; 3];
            for (a, ma) in m.iter_mut().enumerate().take(n) {
                let half = ((bits >> a) & 1) as i64;
                *ma = 2 * self.m[a] + half - child_sign * g.shift_digit(a);
            }
            out.push(Cube {
                grid: self.grid,
                n: self.n,
                k: self.k - 1,
                m,
            });
        }
        Ok(out)
    }

    /// `levels` successive ancestors, nearest first.
    pub fn ancestors(&self, levels: u32) -> Result<Vec<Cube>> {
        let mut out = Vec::with_capacity(levels as usize);
        let mut cur = *self;
        for _ in 0..levels {
            cur = cur.parent()?;
            out.push(cur);
        }
        Ok(out)
    }

    /// Exact containment `other subset self` (half-open boxes, any grids).
    pub fn contains(&self, other: &Cube) -> bool {
        if self.n != other.n {
            return false;
        }
        let kmin = self.k.min(other.k);
        let ws = 3i128 << (self.k - kmin) as u32;
        let wo = 3i128 << (other.k - kmin) as u32;
        (0..self.n as usize).all(|a| {
            let ls = (self.low_thirds(a) as i128) << (self.k - kmin) as u32;
            let lo = (other.low_thirds(a) as i128) << (other.k - kmin) as u32;
            ls <= lo && lo + wo <= ls + ws
        })
    }

    /// Exact overlap test (half-open boxes, any grids).
    pub fn intersects(&self, other: &Cube) -> bool {
        if self.n != other.n {
            return false;
        }
        let kmin = self.k.min(other.k);
        let ws = 3i128 << (self.k - kmin) as u32;
        let wo = 3i128 << (other.k - kmin) as u32;
        (0..self.n as usize).all(|a| {
            let ls = (self.low_thirds(a) as i128) << (self.k - kmin) as u32;
            let lo = (other.low_thirds(a) as i128) << (other.k - kmin) as u32;
            ls < lo + wo && lo < ls + ws
        })
    }
}

/// Smallest shifted dyadic cube containing the axis-parallel cube
/// `[low, low + side)^n`, searched over all grids at the levels with
/// `2^k` between `side` and `3 side`. The covering theorem guarantees a hit
/// with side ratio at most 3; failure signals a shift-formula bug.
pub fn find_cover(n: u8, low: &[f64], side: f64) -> Result<(u16, Cube)> {
    if !(side > 0.0) || !side.is_finite() {
        return Err(Error::Domain(format!("cover target needs positive side, got {side}")));
    }
    if low.len() != n as usize {
        return Err(Error::Domain("cover target dimension mismatch".into()));
    }
    let grids = build_grids(n)?;
    let k_lo = side.log2().ceil() as i32;
    let eps = 1e-12 * side;
    for k in k_lo..=k_lo + 1 {
        check_level(k)?;
        if (k as f64).exp2() > 3.0 * side * (1.0 + 1e-12) {
            break;
        }
        for g in &grids {
            let cube = g.containing_cube(low, k)?;
            let fits = (0..n as usize)
                .all(|a| cube.low(a) <= low[a] + eps && low[a] + side <= cube.high(a) + eps);
            if fits {
                return Ok((g.id, cube));
            }
        }
    }
    Err(Error::Structural(format!(
        "no dyadic cover for box at {low:?} side {side}: shift formula violated"
    )))
}
