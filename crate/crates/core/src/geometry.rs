//! Points, planar array layouts and sampling grids.
//!
//! Arrays are regular `rows x cols` grids of isotropic point elements centred
//! on [`UniformPlanarArray::center`]. Element `(i, j)` sits at
//! `center + (i - (rows-1)/2) * spacing * u + (j - (cols-1)/2) * spacing * v`
//! where `(u, v)` are the in-plane unit vectors of [`ArrayPlane`].

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)] // shadowed by inherent f64 methods once std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Tolerance for orthonormality of grid axes.
pub const AXIS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3::new(0.0, 0.0, 0.0);
    pub const X: Point3 = Point3::new(1.0, 0.0, 0.0);
    pub const Y: Point3 = Point3::new(0.0, 1.0, 0.0);
    pub const Z: Point3 = Point3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(&self, other: &Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        (*self - *other).norm()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Point3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| *self * (1.0 / n))
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, rhs: f64) -> Point3 {
        Point3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Plane holding the aperture. The outward normal is the boresight direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArrayPlane {
    /// Rows along +x, columns along +z, boresight +y.
    #[default]
    XZ,
    /// Rows along +x, columns along +y, boresight +z.
    XY,
    /// Rows along +y, columns along +z, boresight +x.
    YZ,
}

impl ArrayPlane {
    /// In-plane unit vectors `(u, v)` for the row and column directions.
    pub fn axes(self) -> (Point3, Point3) {
        match self {
            ArrayPlane::XZ => (Point3::X, Point3::Z),
            ArrayPlane::XY => (Point3::X, Point3::Y),
            ArrayPlane::YZ => (Point3::Y, Point3::Z),
        }
    }

    pub fn normal(self) -> Point3 {
        match self {
            ArrayPlane::XZ => Point3::Y,
            ArrayPlane::XY => Point3::Z,
            ArrayPlane::YZ => Point3::X,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformPlanarArray {
    rows: usize,
    cols: usize,
    spacing_m: f64,
    center: Point3,
    plane: ArrayPlane,
    wavelength_m: f64,
}

impl UniformPlanarArray {
    pub fn new(
        rows: usize,
        cols: usize,
        spacing_m: f64,
        center: Point3,
        plane: ArrayPlane,
        wavelength_m: f64,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArray("rows and cols must be at least 1"));
        }
        if !(spacing_m > 0.0 && spacing_m.is_finite()) {
            return Err(Error::InvalidArray("spacing must be positive and finite"));
        }
        if !(wavelength_m > 0.0 && wavelength_m.is_finite()) {
            return Err(Error::InvalidArray("wavelength must be positive and finite"));
        }
        if !center.is_finite() {
            return Err(Error::InvalidArray("center must be finite"));
        }
        Ok(Self {
            rows,
            cols,
            spacing_m,
            center,
            plane,
            wavelength_m,
        })
    }

    /// Square array in the XZ plane centred at the origin, with spacing given
    /// as a multiple of the wavelength.
    pub fn square(side: usize, spacing_wavelengths: f64, wavelength_m: f64) -> Result<Self> {
        Self::new(
            side,
            side,
            spacing_wavelengths * wavelength_m,
            Point3::ORIGIN,
            ArrayPlane::XZ,
            wavelength_m,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_elements(&self) -> usize {
        self.rows * self.cols
    }

    pub fn spacing_m(&self) -> f64 {
        self.spacing_m
    }

    pub fn center(&self) -> Point3 {
        self.center
    }

    pub fn plane(&self) -> ArrayPlane {
        self.plane
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_m
    }

    /// Interelement spacing in wavelengths.
    pub fn spacing_wavelengths(&self) -> f64 {
        self.spacing_m / self.wavelength_m
    }

    /// Aperture diameter, taken as the grid diagonal.
    pub fn aperture_diameter_m(&self) -> f64 {
        let r = (self.rows - 1) as f64;
        let c = (self.cols - 1) as f64;
        self.spacing_m * (r * r + c * c).sqrt()
    }

    pub fn boresight(&self) -> Point3 {
        self.plane.normal()
    }

    pub fn with_size(&self, rows: usize, cols: usize) -> Result<Self> {
        Self::new(
            rows,
            cols,
            self.spacing_m,
            self.center,
            self.plane,
            self.wavelength_m,
        )
    }

    pub fn with_spacing(&self, spacing_m: f64) -> Result<Self> {
        Self::new(
            self.rows,
            self.cols,
            spacing_m,
            self.center,
            self.plane,
            self.wavelength_m,
        )
    }

    pub fn element_position(&self, row: usize, col: usize) -> Point3 {
        let (u, v) = self.plane.axes();
        let du = (row as f64 - (self.rows - 1) as f64 / 2.0) * self.spacing_m;
        let dv = (col as f64 - (self.cols - 1) as f64 / 2.0) * self.spacing_m;
        self.center + u * du + v * dv
    }

    /// Element positions in row-major order.
    pub fn element_positions(&self) -> Vec<Point3> {
        let mut out = Vec::with_capacity(self.num_elements());
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push(self.element_position(i, j));
            }
        }
        out
    }
}

/// One axis of a sampling grid: `samples` evenly spaced offsets in
/// `[start_m, end_m]` along a unit `direction`, measured from the grid origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub direction: Point3,
    pub start_m: f64,
    pub end_m: f64,
    pub samples: usize,
}

impl GridAxis {
    pub fn new(direction: Point3, start_m: f64, end_m: f64, samples: usize) -> Self {
        Self {
            direction,
            start_m,
            end_m,
            samples,
        }
    }

    pub fn step_m(&self) -> f64 {
        (self.end_m - self.start_m) / (self.samples - 1) as f64
    }

    pub fn offset(&self, k: usize) -> f64 {
        // Exact endpoints regardless of rounding in the step.
        if k + 1 == self.samples {
            self.end_m
        } else {
            self.start_m + self.step_m() * k as f64
        }
    }

    pub fn offsets(&self) -> Vec<f64> {
        (0..self.samples).map(|k| self.offset(k)).collect()
    }

    pub fn extent_m(&self) -> f64 {
        self.end_m - self.start_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Line,
    Plane,
}

/// Line or plane lattice of evaluation points.
///
/// Plane grids are row-major: the first axis is the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingGrid {
    origin: Point3,
    axes: Vec<GridAxis>,
}

impl SamplingGrid {
    pub fn line(origin: Point3, axis: GridAxis) -> Result<Self> {
        let grid = Self {
            origin,
            axes: alloc::vec![axis],
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn plane(origin: Point3, first: GridAxis, second: GridAxis) -> Result<Self> {
        let grid = Self {
            origin,
            axes: alloc::vec![first, second],
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Axis-aligned rectangular window with the origin at the coordinate origin,
    /// so axis offsets are plain coordinates along `first` and `second`.
    pub fn window(
        offset: Point3,
        first: (Point3, f64, f64),
        second: (Point3, f64, f64),
        resolution: usize,
    ) -> Result<Self> {
        Self::plane(
            offset,
            GridAxis::new(first.0, first.1, first.2, resolution),
            GridAxis::new(second.0, second.1, second.2, resolution),
        )
    }

    fn validate(&self) -> Result<()> {
        if !self.origin.is_finite() {
            return Err(Error::InvalidGrid("origin must be finite"));
        }
        for axis in &self.axes {
            if axis.samples < 2 {
                return Err(Error::InvalidGrid("resolution must be at least 2 per axis"));
            }
            if !(axis.start_m.is_finite() && axis.end_m.is_finite()) || axis.end_m <= axis.start_m {
                return Err(Error::InvalidGrid("axis range must be finite with end > start"));
            }
            if (axis.direction.norm() - 1.0).abs() > AXIS_TOLERANCE {
                return Err(Error::InvalidGrid("axis directions must be unit vectors"));
            }
        }
        if self.axes.len() == 2 && self.axes[0].direction.dot(&self.axes[1].direction).abs() > AXIS_TOLERANCE {
            return Err(Error::InvalidGrid("axis directions must be orthogonal"));
        }
        Ok(())
    }

    pub fn kind(&self) -> GridKind {
        if self.axes.len() == 1 {
            GridKind::Line
        } else {
            GridKind::Plane
        }
    }

    pub fn origin(&self) -> Point3 {
        self.origin
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.samples).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis sample indices of flat index `idx`.
    pub fn unflatten(&self, idx: usize) -> (usize, usize) {
        match self.kind() {
            GridKind::Line => (idx, 0),
            GridKind::Plane => {
                let n2 = self.axes[1].samples;
                (idx / n2, idx % n2)
            }
        }
    }

    /// Axis offsets of flat index `idx` (second offset is 0 for lines).
    pub fn offsets_of(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.unflatten(idx);
        match self.kind() {
            GridKind::Line => (self.axes[0].offset(i), 0.0),
            GridKind::Plane => (self.axes[0].offset(i), self.axes[1].offset(j)),
        }
    }

    pub fn point(&self, idx: usize) -> Point3 {
        let (a, b) = self.offsets_of(idx);
        let mut p = self.origin + self.axes[0].direction * a;
        if let Some(second) = self.axes.get(1) {
            p = p + second.direction * b;
        }
        p
    }

    pub fn points(&self) -> Vec<Point3> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Projects `p` onto the grid axes, returning offsets relative to the origin.
    pub fn project(&self, p: &Point3) -> (f64, f64) {
        let rel = *p - self.origin;
        let a = rel.dot(&self.axes[0].direction);
        let b = self.axes.get(1).map_or(0.0, |ax| rel.dot(&ax.direction));
        (a, b)
    }

    /// Whether the projection of `p` falls inside the sampled window.
    pub fn contains_projection(&self, p: &Point3) -> bool {
        let (a, b) = self.project(p);
        let inside = |ax: &GridAxis, v: f64| v >= ax.start_m && v <= ax.end_m;
        inside(&self.axes[0], a) && self.axes.get(1).is_none_or(|ax| inside(ax, b))
    }
}

/// Grid points of `grid` in row-major order.
pub fn grid_points(grid: &SamplingGrid) -> Vec<Point3> {
    grid.points()
}

/// Element positions of `array` in row-major order.
pub fn element_positions(array: &UniformPlanarArray) -> Vec<Point3> {
    array.element_positions()
}
