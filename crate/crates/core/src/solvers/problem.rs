use std::fmt;

use crate::space::{DistanceTable, ThetaTable};

use super::SolverError;

/// A point of a finite table (an index) or of the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Index(usize),
    Real(f64),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "{i}"),
            Point::Real(x) => write!(f, "{x}"),
        }
    }
}

/// `x ↦ a·x + b` on `[lo, hi]` with the usual metric. Pairwise checks use an
/// evenly spaced grid of `grid` points; iteration is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    a: f64,
    b: f64,
    lo: f64,
    hi: f64,
    grid: usize,
}

impl AffineMap {
    pub const DEFAULT_GRID: usize = 101;

    pub fn new(a: f64, b: f64, lo: f64, hi: f64) -> Result<Self, SolverError> {
        Self::with_grid(a, b, lo, hi, Self::DEFAULT_GRID)
    }

    pub fn with_grid(a: f64, b: f64, lo: f64, hi: f64, grid: usize) -> Result<Self, SolverError> {
        if ![a, b, lo, hi].iter().all(|x| x.is_finite()) || lo >= hi || grid < 2 {
            return Err(SolverError::BadInterval { lo, hi });
        }
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        for x in [lo, hi] {
            let y = a * x + b;
            if y < lo - slack || y > hi + slack {
                return Err(SolverError::NotSelfMap { x, image: y, lo, hi });
            }
        }
        Ok(Self { a, b, lo, hi, grid })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.a * x + self.b
    }

    pub fn grid_points(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.grid - 1) as f64;
        (0..self.grid).map(|i| if i + 1 == self.grid { self.hi } else { self.lo + step * i as f64 }).collect()
    }

    /// The unique solution of `x = a·x + b`, when `a ≠ 1`.
    pub fn fixed_point(&self) -> Option<f64> {
        (self.a != 1.0).then(|| self.b / (1.0 - self.a))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelfMap {
    Table(Vec<usize>),
    Affine(AffineMap),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Table(DistanceTable),
    /// The real line with `|x − y|`.
    Line,
}

/// The polygon coefficient of the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub enum Scale {
    Constant(f64),
    Theta(ThetaTable),
}

/// A space, a self-map on it, and the order and coefficient the space is
/// claimed to have.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    geometry: Geometry,
    map: SelfMap,
    v: usize,
    scale: Scale,
}

impl Problem {
    pub fn finite(space: DistanceTable, images: Vec<usize>, v: usize, scale: Scale) -> Result<Self, SolverError> {
        let n = space.n();
        if images.len() != n {
            return Err(SolverError::MapLength { expected: n, found: images.len() });
        }
        if let Some((point, &image)) = images.iter().enumerate().find(|(_, &m)| m >= n) {
            return Err(SolverError::ImageOutOfRange { point, image, n });
        }
        if v == 0 {
            return Err(SolverError::BadOrder);
        }
        match &scale {
            Scale::Constant(s) if !(s.is_finite() && *s >= 1.0) => return Err(SolverError::BadScale(*s)),
            Scale::Theta(t) if t.n() != n => return Err(SolverError::ThetaSize { expected: n, found: t.n() }),
            _ => {}
        }
        Ok(Self { geometry: Geometry::Table(space), map: SelfMap::Table(images), v, scale })
    }

    /// Demo problem on the real line: a metric, so `v = 1` and `s = 1`.
    pub fn affine(map: AffineMap) -> Self {
        Self { geometry: Geometry::Line, map: SelfMap::Affine(map), v: 1, scale: Scale::Constant(1.0) }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn map(&self) -> &SelfMap {
        &self.map
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    pub fn space(&self) -> Option<&DistanceTable> {
        match &self.geometry {
            Geometry::Table(d) => Some(d),
            Geometry::Line => None,
        }
    }

    pub fn images(&self) -> Option<&[usize]> {
        match &self.map {
            SelfMap::Table(m) => Some(m),
            SelfMap::Affine(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.geometry, Geometry::Table(_))
    }

    pub fn contains(&self, p: Point) -> bool {
        match (&self.geometry, &self.map, p) {
            (Geometry::Table(d), _, Point::Index(i)) => i < d.n(),
            (Geometry::Line, SelfMap::Affine(m), Point::Real(x)) => x >= m.lo && x <= m.hi,
            _ => false,
        }
    }

    pub fn dist(&self, p: Point, q: Point) -> f64 {
        match (&self.geometry, p, q) {
            (Geometry::Table(d), Point::Index(i), Point::Index(j)) => d.get(i, j),
            (Geometry::Line, Point::Real(x), Point::Real(y)) => (x - y).abs(),
            _ => panic!("point kind does not match the geometry"),
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        match (&self.map, p) {
            (SelfMap::Table(m), Point::Index(i)) => Point::Index(m[i]),
            (SelfMap::Affine(m), Point::Real(x)) => Point::Real(m.apply(x)),
            _ => panic!("point kind does not match the map"),
        }
    }

    /// Every point for finite tables, the grid for the line.
    pub fn points(&self) -> Vec<Point> {
        match (&self.geometry, &self.map) {
            (Geometry::Table(d), _) => (0..d.n()).map(Point::Index).collect(),
            (Geometry::Line, SelfMap::Affine(m)) => m.grid_points().into_iter().map(Point::Real).collect(),
            (Geometry::Line, SelfMap::Table(_)) => Vec::new(),
        }
    }

    pub fn coefficient_at(&self, p: Point, q: Point) -> f64 {
        match (&self.scale, p, q) {
            (Scale::Constant(s), _, _) => *s,
            (Scale::Theta(t), Point::Index(i), Point::Index(j)) => t.get(i, j),
            (Scale::Theta(t), _, _) => t.max_entry(),
        }
    }

    pub fn constant_scale(&self) -> Option<f64> {
        match self.scale {
            Scale::Constant(s) => Some(s),
            Scale::Theta(_) => None,
        }
    }

    pub fn coefficient_max(&self) -> f64 {
        match &self.scale {
            Scale::Constant(s) => *s,
            Scale::Theta(t) => t.max_entry(),
        }
    }

    /// Parses a starting point given on the command line.
    pub fn parse_point(&self, text: &str) -> Result<Point, SolverError> {
        let p = match self.geometry {
            Geometry::Table(_) => text.parse().ok().map(Point::Index),
            Geometry::Line => text.parse().ok().filter(|x: &f64| x.is_finite()).map(Point::Real),
        };
        match p {
            Some(p) if self.contains(p) => Ok(p),
            _ => Err(SolverError::BadPoint(text.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_validation() {
        assert!(AffineMap::new(0.5, 0.0, 0.0, 1.0).is_ok());
        assert!(matches!(AffineMap::new(2.0, 0.0, 0.0, 1.0), Err(SolverError::NotSelfMap { .. })));
        assert!(AffineMap::new(0.5, 0.0, 1.0, 1.0).is_err());
        let m = AffineMap::new(0.5, 0.25, 0.0, 1.0).unwrap();
        assert_eq!(m.fixed_point(), Some(0.5));
        let g = m.grid_points();
        assert_eq!((g.len(), g[0], g[100], g[50]), (101, 0.0, 1.0, 0.5));
    }

    #[test]
    fn finite_validation() {
        let d = DistanceTable::new(vec![vec![1.0, 2.0], vec![2.0, 0.0]]).unwrap();
        assert!(Problem::finite(d.clone(), vec![1, 1], 1, Scale::Constant(1.0)).is_ok());
        assert!(matches!(
            Problem::finite(d.clone(), vec![1, 2], 1, Scale::Constant(1.0)),
            Err(SolverError::ImageOutOfRange { point: 1, image: 2, n: 2 })
        ));
        assert!(Problem::finite(d.clone(), vec![1], 1, Scale::Constant(1.0)).is_err());
        assert!(Problem::finite(d, vec![1, 1], 1, Scale::Constant(0.5)).is_err());
    }

    #[test]
    fn points_and_distances() {
        let p = Problem::affine(AffineMap::new(0.5, 0.0, 0.0, 1.0).unwrap());
        assert_eq!(p.apply(Point::Real(1.0)), Point::Real(0.5));
        assert_eq!(p.dist(Point::Real(0.25), Point::Real(1.0)), 0.75);
        assert_eq!(p.parse_point("1").unwrap(), Point::Real(1.0));
        assert!(p.parse_point("2").is_err());
    }
}
