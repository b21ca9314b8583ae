//! Computational domains: boolean cell masks inside a padded periodic box.
//!
//! Cells are classified by their centres. A built-in shape is resolved with
//! `resolution` cells across the largest side of its bounding box; the box
//! is then grown to at least `padding` times the domain diameter, rounded up
//! so that the number of box points per axis is a power of two.

mod edt;
pub mod mask_file;

pub use edt::squared_distance_to;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_PADDING: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Interval { a: f64, b: f64 },
    /// Axis-aligned rectangle centred at the origin.
    Rectangle { widths: [f64; 2] },
    Disk { radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
    /// Union of `[0, long] × [0, width]` and `[0, width] × [0, long]`.
    LShape { long: f64, width: f64 },
    Custom(CustomMask),
}

/// A mask given cell by cell, row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomMask {
    pub dims: Vec<usize>,
    pub cells: Vec<bool>,
    pub cell_size: f64,
}

impl Shape {
    pub fn dimension(&self) -> usize {
        match self {
            Shape::Interval { .. } => 1,
            Shape::Custom(m) => m.dims.len(),
            _ => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidDomain(msg.to_string()));
        match *self {
            Shape::Interval { a, b } if !(b > a) => bad("interval needs a < b"),
            Shape::Rectangle { widths } if !(widths[0] > 0.0 && widths[1] > 0.0) => {
                bad("rectangle widths must be positive")
            }
            Shape::Disk { radius } if !(radius > 0.0) => bad("disk radius must be positive"),
            Shape::Annulus { r_in, r_out } if !(r_in > 0.0 && r_out > r_in) => {
                bad("annulus needs 0 < r_in < r_out")
            }
            Shape::LShape { long, width } if !(long > width && width > 0.0) => {
                bad("L-shape needs 0 < width < long")
            }
            Shape::Custom(ref m) => {
                if m.dims.is_empty() || m.dims.len() > 2 {
                    return bad("custom mask must be 1-D or 2-D");
                }
                if m.dims.iter().product::<usize>() != m.cells.len() {
                    return bad("custom mask size does not match its dimensions");
                }
                if !(m.cell_size > 0.0) {
                    return bad("custom mask cell size must be positive");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Lower and upper corners of the bounding box.
    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match *self {
            Shape::Interval { a, b } => (vec![a], vec![b]),
            Shape::Rectangle { widths } => (
                vec![-widths[0] / 2.0, -widths[1] / 2.0],
                vec![widths[0] / 2.0, widths[1] / 2.0],
            ),
            Shape::Disk { radius: r } | Shape::Annulus { r_out: r, .. } => {
                (vec![-r, -r], vec![r, r])
            }
            Shape::LShape { long, .. } => (vec![0.0, 0.0], vec![long, long]),
            Shape::Custom(ref m) => (
                vec![0.0; m.dims.len()],
                m.dims.iter().map(|&n| n as f64 * m.cell_size).collect(),
            ),
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            Shape::Interval { a, b } => b - a,
            Shape::Rectangle { widths } => widths[0].hypot(widths[1]),
            Shape::Disk { radius } => 2.0 * radius,
            Shape::Annulus { r_out, .. } => 2.0 * r_out,
            Shape::LShape { long, width } => (long * 2f64.sqrt()).max(long.hypot(width)),
            Shape::Custom(ref m) => {
                // bounding-box diagonal of the true cells
                let d = m.dims.len();
                let mut lo = vec![usize::MAX; d];
                let mut hi = vec![0usize; d];
                for (idx, _) in m.cells.iter().enumerate().filter(|(_, &c)| c) {
                    let mut r = idx;
                    for a in (0..d).rev() {
                        let c = r % m.dims[a];
                        r /= m.dims[a];
                        lo[a] = lo[a].min(c);
                        hi[a] = hi[a].max(c);
                    }
                }
                if lo[0] == usize::MAX {
                    return 0.0;
                }
                lo.iter()
                    .zip(&hi)
                    .map(|(l, h)| ((h - l + 1) as f64 * m.cell_size).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }

    /// Open-set membership of a point.
    pub fn contains(&self, p: &[f64]) -> bool {
        match *self {
            Shape::Interval { a, b } => a < p[0] && p[0] < b,
            Shape::Rectangle { widths } => {
                p[0].abs() < widths[0] / 2.0 && p[1].abs() < widths[1] / 2.0
            }
            Shape::Disk { radius } => p[0].hypot(p[1]) < radius,
            Shape::Annulus { r_in, r_out } => {
                let r = p[0].hypot(p[1]);
                r_in < r && r < r_out
            }
            Shape::LShape { long, width } => {
                let (x, y) = (p[0], p[1]);
                (0.0 < x && x < long && 0.0 < y && y < width)
                    || (0.0 < x && x < width && 0.0 < y && y < long)
            }
            Shape::Custom(ref m) => {
                let mut idx = 0;
                for (a, &n) in m.dims.iter().enumerate() {
                    let c = (p[a] / m.cell_size).floor();
                    if c < 0.0 || c >= n as f64 {
                        return false;
                    }
                    idx = idx * n + c as usize;
                }
                m.cells[idx]
            }
        }
    }
}

/// A domain resolved on a grid.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub shape: Shape,
    /// Cells across the largest bounding-box side (for custom masks, the
    /// largest mask dimension).
    pub resolution: usize,
    /// Requested padding factor (box length / diameter).
    pub padding: f64,
    /// Grid points per axis of the periodic box.
    pub box_points: usize,
    pub cell_size: f64,
    /// Lower corner of the box per axis.
    pub origin: Vec<f64>,
    /// Box mask, row-major with axis 0 slowest.
    pub mask: Vec<bool>,
    /// Box indices of the true cells, ascending.
    pub interior: Vec<usize>,
    pub volume: f64,
    pub inradius: f64,
    pub diameter: f64,
}

impl DomainSpec {
    /// Resolve `shape` with `resolution` cells across its bounding box.
    pub fn build(shape: Shape, resolution: usize, padding: f64) -> Result<Self> {
        shape.validate()?;
        if !(padding >= 2.0) {
            return Err(Error::InvalidDomain(format!(
                "padding factor {padding} is below 2"
            )));
        }
        let d = shape.dimension();
        let diameter = shape.diameter();
        let (lo, hi) = shape.bounding_box();

        let (resolution, h) = match &shape {
            Shape::Custom(m) => (*m.dims.iter().max().unwrap(), m.cell_size),
            _ => {
                if !resolution.is_power_of_two() || resolution < 2 {
                    return Err(Error::InvalidDomain(format!(
                        "resolution {resolution} is not a power of two"
                    )));
                }
                let extent = lo
                    .iter()
                    .zip(&hi)
                    .map(|(l, h)| h - l)
                    .fold(0.0, f64::max);
                (resolution, extent / resolution as f64)
            }
        };

        let needed = (padding * diameter / h).ceil() as usize;
        let box_points = needed.max(resolution + 2).next_power_of_two();
        let length = box_points as f64 * h;

        // Centre the bounding box on cell faces of the periodic box.
        let origin: Vec<f64> = match &shape {
            Shape::Custom(m) => m
                .dims
                .iter()
                .map(|&n| -(((box_points - n) / 2) as f64) * h)
                .collect(),
            _ => lo
                .iter()
                .zip(&hi)
                .map(|(l, u)| 0.5 * (l + u) - length / 2.0)
                .collect(),
        };

        let total = box_points.pow(d as u32);
        let mut mask = vec![false; total];
        let mut p = vec![0.0; d];
        for (idx, slot) in mask.iter_mut().enumerate() {
            let mut r = idx;
            for a in (0..d).rev() {
                p[a] = origin[a] + ((r % box_points) as f64 + 0.5) * h;
                r /= box_points;
            }
            *slot = shape.contains(&p);
        }
        Self::from_parts(shape, resolution, padding, box_points, h, origin, mask, diameter)
    }

    /// Domain from an explicit box mask.
    pub fn from_box_mask(
        dim: usize,
        box_points: usize,
        cell_size: f64,
        mask: Vec<bool>,
    ) -> Result<Self> {
        if !box_points.is_power_of_two() {
            return Err(Error::InvalidDomain("box points must be a power of two".into()));
        }
        if mask.len() != box_points.pow(dim as u32) {
            return Err(Error::InvalidDomain("mask length does not match the box".into()));
        }
        let dims = vec![box_points; dim];
        let custom = CustomMask { dims, cells: mask.clone(), cell_size };
        let shape = Shape::Custom(custom);
        let diameter = shape.diameter();
        let origin = vec![0.0; dim];
        let padding = box_points as f64 * cell_size / diameter.max(f64::MIN_POSITIVE);
        let mut dom = Self::from_parts(
            shape, box_points, padding, box_points, cell_size, origin, mask, diameter,
        )?;
        dom.padding = padding;
        Ok(dom)
    }

    #[allow(clippy::too_many_arguments)]
    fn from_parts(
        shape: Shape,
        resolution: usize,
        padding: f64,
        box_points: usize,
        cell_size: f64,
        origin: Vec<f64>,
        mask: Vec<bool>,
        diameter: f64,
    ) -> Result<Self> {
        let d = shape.dimension();
        let interior: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        if interior.is_empty() {
            return Err(Error::InvalidDomain("mask has no interior cells".into()));
        }
        let on_edge = |idx: usize| {
            let mut r = idx;
            (0..d).any(|_| {
                let c = r % box_points;
                r /= box_points;
                c == 0 || c == box_points - 1
            })
        };
        if interior.iter().any(|&i| on_edge(i)) {
            return Err(Error::InvalidDomain(
                "insufficient padding: interior cell on the outer layer of the box".into(),
            ));
        }
        let volume = interior.len() as f64 * cell_size.powi(d as i32);
        let mut dom = DomainSpec {
            shape,
            resolution,
            padding,
            box_points,
            cell_size,
            origin,
            mask,
            interior,
            volume,
            inradius: 0.0,
            diameter,
        };
        dom.inradius = inradius(&dom);
        Ok(dom)
    }

    pub fn dimension(&self) -> usize {
        self.origin.len()
    }

    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    pub fn box_length(&self) -> f64 {
        self.box_points as f64 * self.cell_size
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_size.powi(self.dimension() as i32)
    }

    /// Grid index per axis of a box cell.
    pub fn cell_index(&self, idx: usize) -> Vec<usize> {
        let d = self.dimension();
        let mut c = vec![0; d];
        let mut r = idx;
        for a in (0..d).rev() {
            c[a] = r % self.box_points;
            r /= self.box_points;
        }
        c
    }

    /// Centre of a box cell.
    pub fn cell_center(&self, idx: usize) -> Vec<f64> {
        self.cell_index(idx)
            .iter()
            .enumerate()
            .map(|(a, &c)| self.origin[a] + (c as f64 + 0.5) * self.cell_size)
            .collect()
    }

    /// Coordinate `axis` of every interior cell centre, in interior order.
    pub fn interior_coordinates(&self, axis: usize) -> Vec<f64> {
        self.interior.iter().map(|&i| self.cell_center(i)[axis]).collect()
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        let name = match &self.shape {
            Shape::Interval { .. } => "interval",
            Shape::Rectangle { .. } => "rectangle",
            Shape::Disk { .. } => "disk",
            Shape::Annulus { .. } => "annulus",
            Shape::LShape { .. } => "l_shape",
            Shape::Custom(_) => "custom",
        };
        format!("{name}-N{}-M{}", self.resolution, self.box_points)
    }
}

/// Largest distance from an interior cell centre to the complement, via the
/// exact distance transform; half a cell is subtracted because the
/// boundary sits between the last true and the first false centre.
pub fn inradius(domain: &DomainSpec) -> f64 {
    let outside: Vec<bool> = domain.mask.iter().map(|&m| !m).collect();
    let shape = vec![domain.box_points; domain.dimension()];
    let d2 = squared_distance_to(&outside, &shape);
    let max = domain
        .interior
        .iter()
        .map(|&i| d2[i])
        .fold(0.0f64, f64::max);
    (max.sqrt() - 0.5) * domain.cell_size
}
