//! Uniform periodic-capable grids in one and two spatial dimensions.

use crate::error::{Error, Result};
use crate::linalg::SpatialVec;

/// Minimum cell count per axis; coarser grids cannot resolve anything the
/// solvers are used for and usually indicate a configuration mistake.
pub const MIN_CELLS_PER_AXIS: usize = 16;

/// A uniform cell-centered grid on an axis-aligned box.
#[derive(Clone, Debug)]
pub struct Grid {
    n: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    cells: [usize; 2],
    h: [f64; 2],
}

impl Grid {
    pub fn new_1d(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        Self::build(1, [lo, 0.0], [hi, 1.0], [cells, 1])
    }

    pub fn new_2d(extent_x: (f64, f64), cells_x: usize, extent_y: (f64, f64), cells_y: usize) -> Result<Self> {
        Self::build(
            2,
            [extent_x.0, extent_y.0],
            [extent_x.1, extent_y.1],
            [cells_x, cells_y],
        )
    }

    fn build(n: usize, lo: [f64; 2], hi: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        for axis in 0..n {
            if !(lo[axis].is_finite() && hi[axis].is_finite() && hi[axis] > lo[axis]) {
                return Err(Error::InvalidInput(format!(
                    "grid axis {axis} has empty or non-finite extent [{}, {}]",
                    lo[axis], hi[axis]
                )));
            }
            if cells[axis] < MIN_CELLS_PER_AXIS {
                return Err(Error::InvalidInput(format!(
                    "grid axis {axis} has {} cells, need at least {MIN_CELLS_PER_AXIS}",
                    cells[axis]
                )));
            }
        }
        let mut h = [1.0; 2];
        for axis in 0..n {
            h[axis] = (hi[axis] - lo[axis]) / cells[axis] as f64;
        }
        Ok(Self { n, lo, hi, cells, h })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self, axis: usize) -> usize {
        self.cells[axis]
    }

    pub fn h(&self, axis: usize) -> f64 {
        self.h[axis]
    }

    pub fn min_h(&self) -> f64 {
        (0..self.n).map(|a| self.h[a]).fold(f64::INFINITY, f64::min)
    }

    pub fn lo(&self, axis: usize) -> f64 {
        self.lo[axis]
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.hi[axis]
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn total_cells(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    /// Coordinate of the i-th cell center along one axis.
    pub fn center(&self, axis: usize, i: usize) -> f64 {
        self.lo[axis] + (i as f64 + 0.5) * self.h[axis]
    }

    /// Full spatial position of a cell by flat index.
    pub fn cell_center(&self, flat: usize) -> SpatialVec {
        let (i, j) = self.coords(flat);
        let mut c = [0.0; 2];
        c[0] = self.center(0, i);
        if self.n == 2 {
            c[1] = self.center(1, j);
        }
        SpatialVec::new(&c[..self.n])
    }

    /// Flat index of cell (i, j); the first axis varies fastest.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i + self.cells[0] * j
    }

    pub fn coords(&self, flat: usize) -> (usize, usize) {
        (flat % self.cells[0], flat / self.cells[0])
    }

    /// Periodic wrap of a possibly out-of-range cell index along one axis.
    pub fn wrap(&self, i: isize, axis: usize) -> usize {
        let m = self.cells[axis] as isize;
        (((i % m) + m) % m) as usize
    }

    /// True when the two grids have the same shape and extents.
    pub fn same_layout(&self, other: &Grid) -> bool {
        self.n == other.n
            && self.cells == other.cells
            && (0..self.n).all(|a| {
                (self.lo[a] - other.lo[a]).abs() < 1e-14 && (self.hi[a] - other.hi[a]).abs() < 1e-14
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_centers() {
        let g = Grid::new_1d(0.0, 1.0, 32).unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.total_cells(), 32);
        assert!((g.h(0) - 1.0 / 32.0).abs() < 1e-16);
        assert!((g.center(0, 0) - 1.0 / 64.0).abs() < 1e-16);
        let c = g.cell_center(31);
        assert!((c[0] - (1.0 - 1.0 / 64.0)).abs() < 1e-15);

        let g2 = Grid::new_2d((-1.0, 1.0), 16, (0.0, 2.0), 20).unwrap();
        assert_eq!(g2.total_cells(), 320);
        let (i, j) = g2.coords(g2.idx(3, 7));
        assert_eq!((i, j), (3, 7));
        assert_eq!(g2.cell_center(g2.idx(3, 7)).dim(), 2);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Grid::new_1d(0.0, 1.0, 8).is_err());
        assert!(Grid::new_1d(1.0, 0.0, 32).is_err());
        assert!(Grid::new_1d(0.0, f64::NAN, 32).is_err());
        assert!(Grid::new_2d((0.0, 1.0), 16, (0.0, 1.0), 15).is_err());
    }

    #[test]
    fn periodic_wrap() {
        let g = Grid::new_1d(0.0, 1.0, 16).unwrap();
        assert_eq!(g.wrap(-1, 0), 15);
        assert_eq!(g.wrap(16, 0), 0);
        assert_eq!(g.wrap(-17, 0), 15);
        assert_eq!(g.wrap(5, 0), 5);
    }
}
