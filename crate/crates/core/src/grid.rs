//! Cell-centered grids over axis-aligned boxes.
//!
//! A grid is the shared discretization for measures, sublevel-set masks, and
//! focus families. Sample points are cell centers, so the midpoint rule
//! integrates a density as `cell_volume * sum of center values`.

use serde::{Deserialize, Serialize};

use crate::Vector;

/// Axis-aligned box `[lo_i, hi_i]` in chart coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a < b), "box must have positive volume");
        Self { lo, hi }
    }

    /// Cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn center(&self) -> Vector {
        Vector::from_iterator(self.dim(), self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)))
    }

    pub fn contains(&self, p: &Vector, slack: f64) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&x, (&a, &b))| x >= a - slack && x <= b + slack)
    }

    /// Signed distance-like violation: max facet excess, negative inside.
    pub fn violation(&self, p: &Vector) -> f64 {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&x, (&a, &b))| (a - x).max(x - b))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Shrink every side by `margin`.
    pub fn shrunk(&self, margin: f64) -> Self {
        Self::new(
            self.lo.iter().map(|a| a + margin).collect(),
            self.hi.iter().map(|b| b - margin).collect(),
        )
    }

    pub fn corners(&self) -> Vec<Vector> {
        let dim = self.dim();
        (0..1usize << dim)
            .map(|mask| {
                Vector::from_iterator(
                    dim,
                    (0..dim).map(|i| if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] }),
                )
            })
            .collect()
    }
}

/// Uniform cell-centered grid on a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub domain: BoxDomain,
    /// Cells per axis.
    pub shape: Vec<usize>,
}

impl Grid {
    pub fn new(domain: BoxDomain, shape: Vec<usize>) -> Self {
        assert_eq!(domain.dim(), shape.len());
        assert!(shape.iter().all(|&n| n >= 1));
        Self { domain, shape }
    }

    /// Same resolution along every axis.
    pub fn uniform(domain: BoxDomain, n: usize) -> Self {
        let dim = domain.dim();
        Self::new(domain, vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self, axis: usize) -> f64 {
        (self.domain.hi[axis] - self.domain.lo[axis]) / self.shape[axis] as f64
    }

    /// Largest cell edge.
    pub fn max_step(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a)).fold(0.0, f64::max)
    }

    /// Length of a cell diagonal.
    pub fn cell_diagonal(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a).powi(2)).sum::<f64>().sqrt()
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a)).product()
    }

    pub fn index_to_multi(&self, mut idx: usize) -> Vec<usize> {
        let mut multi = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            multi[axis] = idx % self.shape[axis];
            idx /= self.shape[axis];
        }
        multi
    }

    pub fn multi_to_index(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        for axis in 0..self.dim() {
            idx = idx * self.shape[axis] + multi[axis];
        }
        idx
    }

    /// Center of cell `idx`.
    pub fn point(&self, idx: usize) -> Vector {
        let multi = self.index_to_multi(idx);
        Vector::from_iterator(
            self.dim(),
            multi
                .iter()
                .enumerate()
                .map(|(axis, &k)| self.domain.lo[axis] + (k as f64 + 0.5) * self.step(axis)),
        )
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, Vector)> + '_ {
        (0..self.len()).map(|i| (i, self.point(i)))
    }

    /// Cell containing `p`, or None outside the box.
    pub fn locate(&self, p: &Vector) -> Option<usize> {
        let mut multi = vec![0usize; self.dim()];
        for axis in 0..self.dim() {
            let rel = (p[axis] - self.domain.lo[axis]) / self.step(axis);
            if rel < 0.0 || rel > self.shape[axis] as f64 {
                return None;
            }
            multi[axis] = (rel as usize).min(self.shape[axis] - 1);
        }
        Some(self.multi_to_index(&multi))
    }

    /// Axis-neighbors of a cell.
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let multi = self.index_to_multi(idx);
        let mut out = Vec::with_capacity(2 * self.dim());
        for axis in 0..self.dim() {
            if multi[axis] > 0 {
                let mut m = multi.clone();
                m[axis] -= 1;
                out.push(self.multi_to_index(&m));
            }
            if multi[axis] + 1 < self.shape[axis] {
                let mut m = multi.clone();
                m[axis] += 1;
                out.push(self.multi_to_index(&m));
            }
        }
        out
    }

    /// Does the cell touch the boundary of the box?
    pub fn is_boundary_cell(&self, idx: usize) -> bool {
        let multi = self.index_to_multi(idx);
        multi.iter().zip(&self.shape).any(|(&k, &n)| k == 0 || k + 1 == n)
    }
}

/// Indicator mask on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMask {
    pub grid: Grid,
    pub inside: Vec<bool>,
}

impl GridMask {
    pub fn from_predicate(grid: &Grid, mut pred: impl FnMut(&Vector) -> bool) -> Self {
        let inside = (0..grid.len()).map(|i| pred(&grid.point(i))).collect();
        Self { grid: grid.clone(), inside }
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn volume(&self) -> f64 {
        self.count() as f64 * self.grid.cell_volume()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.inside.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn points(&self) -> impl Iterator<Item = Vector> + '_ {
        self.indices().map(|i| self.grid.point(i))
    }

    /// Midpoints of faces separating an inside cell from an outside cell or
    /// from the box boundary.
    pub fn boundary_face_midpoints(&self) -> Vec<Vector> {
        let mut out = Vec::new();
        for idx in self.indices() {
            let multi = self.grid.index_to_multi(idx);
            let center = self.grid.point(idx);
            for axis in 0..self.grid.dim() {
                let h = self.grid.step(axis);
                for (sign, at_edge) in [(-1.0, multi[axis] == 0), (1.0, multi[axis] + 1 == self.grid.shape[axis])]
                {
                    let outside = if at_edge {
                        true
                    } else {
                        let mut m = multi.clone();
                        if sign < 0.0 {
                            m[axis] -= 1;
                        } else {
                            m[axis] += 1;
                        }
                        !self.inside[self.grid.multi_to_index(&m)]
                    };
                    if outside {
                        let mut p = center.clone();
                        p[axis] += sign * 0.5 * h;
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    /// True when some inside cell touches the boundary of the grid box.
    pub fn touches_box_boundary(&self) -> bool {
        self.indices().any(|i| self.grid.is_boundary_cell(i))
    }

    /// Run-length encoding (value of the first run, then run lengths).
    pub fn run_length_encode(&self) -> RleMask {
        let first = self.inside.first().copied().unwrap_or(false);
        let mut runs = Vec::new();
        let mut current = first;
        let mut len = 0usize;
        for &b in &self.inside {
            if b == current {
                len += 1;
            } else {
                runs.push(len);
                current = b;
                len = 1;
            }
        }
        runs.push(len);
        RleMask { grid: self.grid.clone(), first, runs }
    }
}

/// Serialized form of a mask.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RleMask {
    pub grid: Grid,
    pub first: bool,
    pub runs: Vec<usize>,
}

impl RleMask {
    pub fn decode(&self) -> GridMask {
        let mut inside = Vec::with_capacity(self.grid.len());
        let mut value = self.first;
        for &len in &self.runs {
            inside.extend(std::iter::repeat(value).take(len));
            value = !value;
        }
        assert_eq!(inside.len(), self.grid.len());
        GridMask { grid: self.grid.clone(), inside }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_centers_and_locate_agree() {
        let grid = Grid::uniform(BoxDomain::cube(2, 0.0, 1.0), 8);
        for (i, p) in grid.points() {
            assert_eq!(grid.locate(&p), Some(i));
        }
        assert_eq!(grid.len(), 64);
        assert!((grid.cell_volume() - 1.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn disk_mask_volume_approximates_area() {
        let grid = Grid::uniform(BoxDomain::cube(2, -1.5, 1.5), 128);
        let mask = GridMask::from_predicate(&grid, |p| p.norm() <= 1.0);
        assert!((mask.volume() - std::f64::consts::PI).abs() < 0.01);
        assert!(!mask.touches_box_boundary());
        let boundary = mask.boundary_face_midpoints();
        assert!(!boundary.is_empty());
        for p in &boundary {
            assert!((p.norm() - 1.0).abs() < 2.0 * grid.cell_diagonal());
        }
    }

    #[test]
    fn rle_round_trip() {
        let grid = Grid::uniform(BoxDomain::cube(2, 0.0, 1.0), 16);
        let mask = GridMask::from_predicate(&grid, |p| p[0] + p[1] < 0.9);
        let decoded = mask.run_length_encode().decode();
        assert_eq!(mask, decoded);
    }
}
