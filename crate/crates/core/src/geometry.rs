//! Planar primitives for the coverage field: convex workspace polygons,
//! circular obstacles, and the sweep direction that minimizes the sum of
//! altitudes (the number of back-and-forth passes).
//!
//! A sweep direction `θ` is the direction slices travel in. Successive slices
//! advance along the normal `n̂ = (−sin θ, cos θ)`, so the extent of a region
//! along `n̂` (its *diameter* for that direction) fixes how many slices it
//! takes to cover it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance for convexity and containment tests, in field units.
pub const GEOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point2<S> {
    #[inline]
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Self) -> S {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2-D cross product.
    #[inline]
    pub fn cross(self, other: Self) -> S {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> S {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Self) -> S {
        (self - other).norm()
    }

    #[inline]
    pub fn scale(self, k: S) -> Self {
        Self::new(self.x * k, self.y * k)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<S: Scalar> std::ops::Add for Point2<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Scalar> std::ops::Sub for Point2<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

/// Convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon<S> {
    vertices: Vec<Point2<S>>,
}

impl<S: Scalar> Polygon<S> {
    /// Validates that `vertices` form a simple convex polygon in
    /// counterclockwise order. Collinear vertices are allowed.
    pub fn new(vertices: Vec<Point2<S>>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("needs at least 3 vertices, got {n}")));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidPolygon(format!("vertex {i} is not finite")));
        }
        let tol = S::lit(GEOMETRY_TOL);
        let mut turning = S::zero();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let e1 = b - a;
            let e2 = c - b;
            if e1.norm() <= tol {
                return Err(Error::InvalidPolygon(format!("vertices {i} and {} coincide", (i + 1) % n)));
            }
            let cross = e1.cross(e2);
            if cross < -tol * e1.norm() * e2.norm().max(S::one()) {
                return Err(Error::InvalidPolygon(format!(
                    "not convex and counterclockwise at vertex {}",
                    (i + 1) % n
                )));
            }
            turning = turning + cross.atan2(e1.dot(e2));
        }
        // A convex CCW polygon turns exactly once.
        if (turning - S::TAU()).abs() > S::lit(1e-6) {
            return Err(Error::InvalidPolygon("boundary winds more than once (self-intersecting)".into()));
        }
        if signed_area(&vertices) <= tol {
            return Err(Error::InvalidPolygon("zero area".into()));
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned rectangle `[x0, x0+width] × [y0, y0+height]`.
    pub fn rectangle(x0: S, y0: S, width: S, height: S) -> Result<Self> {
        Self::new(vec![
            Point2::new(x0, y0),
            Point2::new(x0 + width, y0),
            Point2::new(x0 + width, y0 + height),
            Point2::new(x0, y0 + height),
        ])
    }

    #[inline]
    pub fn vertices(&self) -> &[Point2<S>] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2<S>, Point2<S>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> S {
        signed_area(&self.vertices)
    }

    /// Minimum distance from `p` to the edge lines, positive inside.
    /// For a convex polygon this is the signed distance to the boundary.
    pub fn inset_distance(&self, p: Point2<S>) -> S {
        self.edges()
            .map(|(a, b)| {
                let e = b - a;
                e.cross(p - a) / e.norm()
            })
            .fold(S::infinity(), S::min)
    }

    /// Closed containment with tolerance [`GEOMETRY_TOL`].
    pub fn contains(&self, p: Point2<S>) -> bool {
        self.inset_distance(p) >= -S::lit(GEOMETRY_TOL)
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bounding_box(&self) -> (Point2<S>, Point2<S>) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for p in &self.vertices[1..] {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// `(min, max)` of the vertex projections onto the advance normal.
    pub fn normal_extent(&self, sweep: SweepDirection<S>) -> (S, S) {
        projection_range(&self.vertices, sweep.normal())
    }

    /// Intersection of the polygon with the sweep line `v = offset`, as the
    /// `(min, max)` range of travel coordinates, or `None` if the line misses.
    pub fn chord(&self, sweep: SweepDirection<S>, offset: S) -> Option<(S, S)> {
        let tol = S::lit(GEOMETRY_TOL);
        let mut lo = S::infinity();
        let mut hi = S::neg_infinity();
        for (a, b) in self.edges() {
            let (ua, va) = sweep.to_frame(a);
            let (ub, vb) = sweep.to_frame(b);
            let (vmin, vmax) = (va.min(vb), va.max(vb));
            if offset < vmin - tol || offset > vmax + tol {
                continue;
            }
            if (vb - va).abs() <= tol {
                lo = lo.min(ua.min(ub));
                hi = hi.max(ua.max(ub));
            } else {
                let s = ((offset - va) / (vb - va)).max(S::zero()).min(S::one());
                let u = ua + s * (ub - ua);
                lo = lo.min(u);
                hi = hi.max(u);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

fn signed_area<S: Scalar>(vertices: &[Point2<S>]) -> S {
    let n = vertices.len();
    let twice: S = (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum();
    twice / S::lit(2.0)
}

fn projection_range<S: Scalar>(points: &[Point2<S>], axis: Point2<S>) -> (S, S) {
    points.iter().fold((S::infinity(), S::neg_infinity()), |(lo, hi), p| {
        let v = p.dot(axis);
        (lo.min(v), hi.max(v))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleObstacle<S> {
    pub center: Point2<S>,
    pub radius: S,
}

impl<S: Scalar> CircleObstacle<S> {
    pub fn new(center: Point2<S>, radius: S) -> Result<Self> {
        if !center.is_finite() || !radius.is_finite() {
            return Err(Error::InvalidObstacle("non-finite center or radius".into()));
        }
        if radius <= S::zero() {
            return Err(Error::InvalidObstacle(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    /// Closed-disc containment.
    pub fn contains(&self, p: Point2<S>) -> bool {
        self.center.distance(p) <= self.radius + S::lit(GEOMETRY_TOL)
    }

    /// How far `p` lies inside the disc (0 when outside).
    pub fn penetration(&self, p: Point2<S>) -> S {
        (self.radius - self.center.distance(p)).max(S::zero())
    }
}

/// Slice travel direction, normalized to `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepDirection<S> {
    theta: S,
}

impl<S: Scalar> SweepDirection<S> {
    pub fn new(theta: S) -> Self {
        let pi = S::PI();
        let mut t = theta % pi;
        if t < S::zero() {
            t = t + pi;
        }
        if t >= pi {
            t = t - pi;
        }
        Self { theta: t }
    }

    #[inline]
    pub fn theta(self) -> S {
        self.theta
    }

    /// Unit travel vector `(cos θ, sin θ)`.
    #[inline]
    pub fn travel(self) -> Point2<S> {
        Point2::new(self.theta.cos(), self.theta.sin())
    }

    /// Unit advance normal `(−sin θ, cos θ)`.
    #[inline]
    pub fn normal(self) -> Point2<S> {
        Point2::new(-self.theta.sin(), self.theta.cos())
    }

    /// Global point to sweep-frame `(travel, advance)` coordinates.
    #[inline]
    pub fn to_frame(self, p: Point2<S>) -> (S, S) {
        (p.dot(self.travel()), p.dot(self.normal()))
    }

    /// Sweep-frame coordinates back to a global point (also rotates vectors).
    #[inline]
    pub fn from_frame(self, u: S, v: S) -> Point2<S> {
        self.travel().scale(u) + self.normal().scale(v)
    }
}

/// Convex hull by the monotone-chain method, counterclockwise, with
/// collinear boundary points removed.
pub fn convex_hull<S: Scalar>(points: &[Point2<S>]) -> Result<Polygon<S>> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!("need at least 3 points, got {}", points.len())));
    }
    let mut pts: Vec<Point2<S>> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    pts.dedup();
    let tol = S::lit(GEOMETRY_TOL);
    let turn = |o: Point2<S>, a: Point2<S>, b: Point2<S>| (a - o).cross(b - o);

    let mut hull: Vec<Point2<S>> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        return Err(Error::DegenerateInput("all points are collinear".into()));
    }
    Polygon::new(hull)
}

/// Width of a point set measured along the advance normal of `sweep`.
pub fn normal_width<S: Scalar>(points: &[Point2<S>], sweep: SweepDirection<S>) -> S {
    let (lo, hi) = projection_range(points, sweep.normal());
    hi - lo
}

/// Diameter (altitude) function: extent of `polygon` along the advance normal.
pub fn diameter<S: Scalar>(polygon: &Polygon<S>, sweep: SweepDirection<S>) -> S {
    normal_width(polygon.vertices(), sweep)
}

/// Sum-of-altitudes cost `S(θ)`. A circle's width is `2r` in every direction.
pub fn msa_cost<S: Scalar>(boundary: &Polygon<S>, obstacles: &[CircleObstacle<S>], sweep: SweepDirection<S>) -> S {
    let holes: S = obstacles.iter().map(|o| o.radius + o.radius).sum();
    diameter(boundary, sweep) + holes
}

/// Minimizes `S(θ)` over directions parallel to a boundary edge; ties go to
/// the smallest angle.
pub fn optimal_sweep_direction<S: Scalar>(
    boundary: &Polygon<S>,
    obstacles: &[CircleObstacle<S>],
) -> (SweepDirection<S>, S) {
    let mut candidates: Vec<SweepDirection<S>> = boundary
        .edges()
        .map(|(a, b)| {
            let e = b - a;
            SweepDirection::new(e.y.atan2(e.x))
        })
        .collect();
    candidates.sort_by(|a, b| a.theta().partial_cmp(&b.theta()).unwrap());

    let tol = S::lit(GEOMETRY_TOL);
    let mut best = candidates[0];
    let mut best_cost = msa_cost(boundary, obstacles, best);
    for &c in &candidates[1..] {
        let cost = msa_cost(boundary, obstacles, c);
        if cost < best_cost - tol {
            best = c;
            best_cost = cost;
        }
    }
    (best, best_cost)
}

/// Obstacles whose disc meets the closed strip `lower ≤ v ≤ upper`, where `v`
/// is the coordinate along the advance normal of `frame`.
pub fn obstacles_in_corridor<S: Scalar>(
    obstacles: &[CircleObstacle<S>],
    corridor: (S, S),
    frame: SweepDirection<S>,
) -> Vec<CircleObstacle<S>> {
    obstacle_indices_in_corridor(obstacles, corridor, frame)
        .into_iter()
        .map(|i| obstacles[i])
        .collect()
}

pub(crate) fn obstacle_indices_in_corridor<S: Scalar>(
    obstacles: &[CircleObstacle<S>],
    (lower, upper): (S, S),
    frame: SweepDirection<S>,
) -> Vec<usize> {
    let tol = S::lit(GEOMETRY_TOL);
    obstacles
        .iter()
        .enumerate()
        .filter(|(_, o)| {
            let (_, v) = frame.to_frame(o.center);
            v + o.radius >= lower - tol && v - o.radius <= upper + tol
        })
        .map(|(i, _)| i)
        .collect()
}
