//! Convex domains, characteristics and boundary quadrature.
//!
//! Every domain here is convex, so the line through an interior point meets
//! the domain in a single segment and the chord length `ℓ(r, v)` is well
//! defined. Ray/boundary intersection is closed form for all three variants
//! (quadratic for the ball, slab clipping for boxes and half-space
//! intersections).

use crate::error::{Error, Result};
use crate::phase_space::VelocityQuadrature;
use crate::sphere::SpherePartition;
use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

/// Threshold on `|n·v̂|` below which a boundary pair counts as tangential.
pub const TANGENTIAL_TOLERANCE: f64 = 1e-10;

const CONTAIN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn axis(k: usize) -> Self {
        let mut a = [0.0; 3];
        a[k] = 1.0;
        Self::from_array(a)
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Some unit vector orthogonal to `self` (assumed unit).
    pub fn any_orthogonal(self) -> Self {
        let helper = if self.x.abs() < 0.9 {
            Vec3::axis(0)
        } else {
            Vec3::axis(1)
        };
        self.cross(helper).normalized().unwrap_or(Vec3::axis(2))
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        match k {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {k} out of range"),
        }
    }
}

/// A velocity `v ≠ 0` together with its direction `v̂ = v/|v|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Velocity {
    v: Vec3,
    dir: Vec3,
}

impl Velocity {
    pub fn new(v: Vec3) -> Result<Self> {
        let dir = v.normalized().ok_or(Error::ZeroVelocity)?;
        Ok(Self { v, dir })
    }

    pub fn vector(&self) -> Vec3 {
        self.v
    }

    pub fn direction(&self) -> Vec3 {
        self.dir
    }

    pub fn speed(&self) -> f64 {
        self.v.norm()
    }
}

/// The closed half-space `{x : n·x ≤ offset}` with unit `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfSpace {
    normal: Vec3,
    offset: f64,
}

impl HalfSpace {
    /// Normalises `normal` (and scales `offset` accordingly).
    pub fn new(normal: Vec3, offset: f64) -> Result<Self> {
        let len = normal.norm();
        if !(len > 0.0 && len.is_finite() && offset.is_finite()) {
            return Err(Error::InvalidDomain("half-space normal must be nonzero and finite".into()));
        }
        Ok(Self {
            normal: normal / len,
            offset: offset / len,
        })
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn slack(&self, x: Vec3) -> f64 {
        self.offset - self.normal.dot(x)
    }
}

#[derive(Clone, Debug)]
struct Face {
    plane: usize,
    /// Counter-clockwise seen from outside.
    vertices: Vec<Vec3>,
}

/// Bounded intersection of half-spaces, with its vertices and faces
/// precomputed for bounding boxes and surface quadrature.
#[derive(Clone, Debug)]
pub struct Polytope {
    planes: Vec<HalfSpace>,
    vertices: Vec<Vec3>,
    faces: Vec<Face>,
    lo: Vec3,
    hi: Vec3,
    centroid: Vec3,
}

impl Polytope {
    pub fn new(planes: Vec<HalfSpace>) -> Result<Self> {
        if planes.len() < 4 {
            return Err(Error::InvalidDomain("a bounded half-space intersection needs at least 4 planes".into()));
        }
        let scale = planes.iter().map(|h| h.offset.abs()).fold(1.0, f64::max);
        let tol = 1e-9 * scale;

        if let Some(d) = recession_direction(&planes) {
            return Err(Error::InvalidDomain(format!(
                "half-space intersection is unbounded along ({:.3}, {:.3}, {:.3})",
                d.x, d.y, d.z
            )));
        }

        let mut vertices: Vec<Vec3> = Vec::new();
        for a in 0..planes.len() {
            for b in a + 1..planes.len() {
                for c in b + 1..planes.len() {
                    let Some(x) = intersect_planes(&planes[a], &planes[b], &planes[c]) else {
                        continue;
                    };
                    if planes.iter().all(|h| h.slack(x) >= -tol)
                        && !vertices.iter().any(|v| (*v - x).norm() <= tol)
                    {
                        vertices.push(x);
                    }
                }
            }
        }
        if vertices.len() < 4 {
            return Err(Error::InvalidDomain("half-space intersection is empty or flat".into()));
        }
        let centroid = vertices.iter().fold(Vec3::ZERO, |acc, &v| acc + v) / vertices.len() as f64;
        if planes.iter().any(|h| h.slack(centroid) <= tol) {
            return Err(Error::InvalidDomain("half-space intersection has empty interior".into()));
        }

        let mut faces = Vec::new();
        for (index, plane) in planes.iter().enumerate() {
            let on_plane: Vec<Vec3> = vertices
                .iter()
                .copied()
                .filter(|&v| plane.slack(v).abs() <= tol)
                .collect();
            if on_plane.len() < 3 {
                continue;
            }
            let center = on_plane.iter().fold(Vec3::ZERO, |acc, &v| acc + v) / on_plane.len() as f64;
            let u = plane.normal.any_orthogonal();
            let w = plane.normal.cross(u);
            let mut keyed: Vec<(f64, Vec3)> = on_plane
                .into_iter()
                .map(|v| {
                    let d = v - center;
                    (d.dot(w).atan2(d.dot(u)), v)
                })
                .collect();
            keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
            faces.push(Face {
                plane: index,
                vertices: keyed.into_iter().map(|(_, v)| v).collect(),
            });
        }

        let mut lo = vertices[0];
        let mut hi = vertices[0];
        for v in &vertices {
            lo = Vec3::new(lo.x.min(v.x), lo.y.min(v.y), lo.z.min(v.z));
            hi = Vec3::new(hi.x.max(v.x), hi.y.max(v.y), hi.z.max(v.z));
        }
        Ok(Self {
            planes,
            vertices,
            faces,
            lo,
            hi,
            centroid,
        })
    }

    pub fn planes(&self) -> &[HalfSpace] {
        &self.planes
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    fn volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let h = self.planes[f.plane].slack(self.centroid);
                polygon_area(&f.vertices) * h / 3.0
            })
            .sum()
    }
}

fn intersect_planes(a: &HalfSpace, b: &HalfSpace, c: &HalfSpace) -> Option<Vec3> {
    let bc = b.normal.cross(c.normal);
    let det = a.normal.dot(bc);
    if det.abs() < 1e-12 {
        return None;
    }
    let x = (bc * a.offset + c.normal.cross(a.normal) * b.offset + a.normal.cross(b.normal) * c.offset) / det;
    Some(x)
}

/// A nonzero `d` with `n_i·d ≤ 0` for every plane, if one exists. Extreme
/// rays of the recession cone lie along pairwise cross products of normals,
/// so those (plus a few fallbacks for rank-deficient systems) suffice.
fn recession_direction(planes: &[HalfSpace]) -> Option<Vec3> {
    let mut candidates = Vec::new();
    for (i, a) in planes.iter().enumerate() {
        candidates.push(-a.normal);
        for k in 0..3 {
            candidates.push(a.normal.cross(Vec3::axis(k)));
        }
        for b in &planes[i + 1..] {
            candidates.push(a.normal.cross(b.normal));
        }
    }
    for k in 0..3 {
        candidates.push(Vec3::axis(k));
    }
    candidates
        .into_iter()
        .filter_map(|d| d.normalized())
        .flat_map(|d| [d, -d])
        .find(|&d| planes.iter().all(|h| h.normal.dot(d) <= 1e-12))
}

fn polygon_area(vertices: &[Vec3]) -> f64 {
    let c = vertices.iter().fold(Vec3::ZERO, |acc, &v| acc + v) / vertices.len() as f64;
    (0..vertices.len())
        .map(|i| {
            let a = vertices[i] - c;
            let b = vertices[(i + 1) % vertices.len()] - c;
            0.5 * a.cross(b).norm()
        })
        .sum()
}

#[derive(Clone, Debug)]
pub enum Domain {
    Ball { center: Vec3, radius: f64 },
    Box { lo: Vec3, hi: Vec3 },
    Polytope(Polytope),
}

/// Characteristic segment: starts at the inflow point `origin`, runs along
/// the unit `direction` for `length`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
    pub length: f64,
}

impl Ray {
    pub fn point(&self, s: f64) -> Vec3 {
        self.origin + self.direction * s
    }
}

/// The chord through an interior point together with the backward distance
/// `t` from the inflow point to that point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chord {
    pub ray: Ray,
    pub t: f64,
}

impl Chord {
    pub fn length(&self) -> f64 {
        self.ray.length
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub r: Vec3,
    /// Outward unit normal.
    pub n: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryClass {
    Inflow,
    Outflow,
    Tangential,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceNode {
    pub point: BoundaryPoint,
    pub area: f64,
}

/// One boundary phase-space node: a surface node paired with a velocity
/// index. `weight` already carries surface area, velocity weight and
/// `|n·v̂|`; `length` is the chord length of the characteristic through it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryNode {
    pub point: BoundaryPoint,
    pub velocity: usize,
    pub weight: f64,
    pub length: f64,
}

impl BoundaryNode {
    /// The full characteristic through this node, oriented along `dir`
    /// (which must be the node's velocity direction).
    pub fn ray(&self, dir: Vec3, side: BoundarySide) -> Ray {
        match side {
            BoundarySide::Inflow => Ray {
                origin: self.point.r,
                direction: dir,
                length: self.length,
            },
            BoundarySide::Outflow => Ray {
                origin: self.point.r - dir * self.length,
                direction: dir,
                length: self.length,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundarySide {
    /// Γ₋, where `n·v̂ < 0`.
    Inflow,
    /// Γ₊, where `n·v̂ > 0`.
    Outflow,
}

impl Domain {
    pub fn ball(center: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidDomain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn cuboid(lo: Vec3, hi: Vec3) -> Result<Self> {
        if !(lo.x < hi.x && lo.y < hi.y && lo.z < hi.z) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidDomain("box needs lo < hi componentwise".into()));
        }
        Ok(Domain::Box { lo, hi })
    }

    pub fn halfspaces(planes: Vec<HalfSpace>) -> Result<Self> {
        Polytope::new(planes).map(Domain::Polytope)
    }

    pub fn unit_ball() -> Self {
        Domain::Ball {
            center: Vec3::ZERO,
            radius: 1.0,
        }
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        match self {
            Domain::Ball { center, radius } => {
                let r = Vec3::new(*radius, *radius, *radius);
                (*center - r, *center + r)
            }
            Domain::Box { lo, hi } => (*lo, *hi),
            Domain::Polytope(p) => (p.lo, p.hi),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Domain::Ball { radius, .. } => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
            Domain::Box { lo, hi } => {
                let d = *hi - *lo;
                d.x * d.y * d.z
            }
            Domain::Polytope(p) => p.volume(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::Box { lo, hi } => (*hi - *lo).norm(),
            Domain::Polytope(p) => {
                let mut d: f64 = 0.0;
                for a in &p.vertices {
                    for b in &p.vertices {
                        d = d.max((*a - *b).norm());
                    }
                }
                d
            }
        }
    }

    /// Distance from `r` to the boundary, positive inside and negative
    /// outside (exact for balls and boxes, a lower bound for polytopes
    /// outside).
    pub fn inner_distance(&self, r: Vec3) -> f64 {
        match self {
            Domain::Ball { center, radius } => radius - (r - *center).norm(),
            Domain::Box { lo, hi } => (0..3)
                .map(|k| (r[k] - lo[k]).min(hi[k] - r[k]))
                .fold(f64::INFINITY, f64::min),
            Domain::Polytope(p) => p.planes.iter().map(|h| h.slack(r)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Closed-region membership; boundary points are contained.
    pub fn contains(&self, r: Vec3) -> bool {
        let tol = CONTAIN_TOL * self.scale();
        match self {
            Domain::Ball { center, radius } => (r - *center).norm() <= radius + tol,
            Domain::Box { lo, hi } => (0..3).all(|k| r[k] >= lo[k] - tol && r[k] <= hi[k] + tol),
            Domain::Polytope(p) => p.planes.iter().all(|h| h.slack(r) >= -tol),
        }
    }

    /// Parameter interval `[s0, s1]` of the closed segment `{origin + s·dir}`
    /// inside the domain, `dir` a unit vector. `None` if the line misses.
    pub fn line_span(&self, origin: Vec3, dir: Vec3) -> Option<(f64, f64)> {
        match self {
            Domain::Ball { center, radius } => {
                let oc = origin - *center;
                let b = oc.dot(dir);
                let c = oc.norm_squared() - radius * radius;
                let disc = b * b - c;
                if disc < 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                Some((-b - sq, -b + sq))
            }
            Domain::Box { lo, hi } => {
                let mut s0 = f64::NEG_INFINITY;
                let mut s1 = f64::INFINITY;
                for k in 0..3 {
                    let d = dir[k];
                    if d.abs() < 1e-300 {
                        if origin[k] < lo[k] || origin[k] > hi[k] {
                            return None;
                        }
                        continue;
                    }
                    let a = (lo[k] - origin[k]) / d;
                    let b = (hi[k] - origin[k]) / d;
                    s0 = s0.max(a.min(b));
                    s1 = s1.min(a.max(b));
                }
                (s0 <= s1).then_some((s0, s1))
            }
            Domain::Polytope(p) => {
                let mut s0 = f64::NEG_INFINITY;
                let mut s1 = f64::INFINITY;
                for h in &p.planes {
                    let denom = h.normal.dot(dir);
                    let num = h.slack(origin);
                    if denom.abs() < 1e-15 {
                        if num < 0.0 {
                            return None;
                        }
                        continue;
                    }
                    let s = num / denom;
                    if denom > 0.0 {
                        s1 = s1.min(s);
                    } else {
                        s0 = s0.max(s);
                    }
                }
                (s0 <= s1).then_some((s0, s1))
            }
        }
    }

    /// Maximal segment through `r` in direction `v̂`.
    pub fn chord(&self, r: Vec3, v: &Velocity) -> Result<Chord> {
        self.chord_along(r, v.direction())
    }

    pub(crate) fn chord_along(&self, r: Vec3, dir: Vec3) -> Result<Chord> {
        if !self.contains(r) {
            return Err(Error::PointOutsideDomain(r));
        }
        let (s0, s1) = self.line_span(r, dir).ok_or(Error::PointOutsideDomain(r))?;
        let t = (-s0).max(0.0);
        let length = (s1 - s0).max(0.0);
        Ok(Chord {
            ray: Ray {
                origin: r + dir * s0,
                direction: dir,
                length,
            },
            t: t.min(length),
        })
    }

    /// Outward unit normal at (or nearest to) a boundary point.
    pub fn normal_at(&self, r: Vec3) -> Vec3 {
        match self {
            Domain::Ball { center, .. } => (r - *center).normalized().unwrap_or(Vec3::axis(2)),
            Domain::Box { lo, hi } => {
                let mut best = (f64::INFINITY, Vec3::axis(0));
                for k in 0..3 {
                    let dl = (r[k] - lo[k]).abs();
                    let dh = (hi[k] - r[k]).abs();
                    if dl < best.0 {
                        best = (dl, -Vec3::axis(k));
                    }
                    if dh < best.0 {
                        best = (dh, Vec3::axis(k));
                    }
                }
                best.1
            }
            Domain::Polytope(p) => {
                p.planes
                    .iter()
                    .min_by(|a, b| a.slack(r).abs().total_cmp(&b.slack(r).abs()))
                    .map(|h| h.normal)
                    .unwrap_or(Vec3::axis(0))
            }
        }
    }

    pub fn boundary_point(&self, r: Vec3) -> BoundaryPoint {
        BoundaryPoint {
            r,
            n: self.normal_at(r),
        }
    }

    /// Midpoint-type quadrature of the boundary surface. `resolution` is the
    /// sphere partition order for balls, cells per edge on each box face, and
    /// the subdivision depth of each fan triangle on polytope faces.
    pub fn surface_quadrature(&self, resolution: usize) -> Result<Vec<SurfaceNode>> {
        if resolution == 0 {
            return Err(Error::InvalidResolution("boundary resolution must be at least 1".into()));
        }
        let nodes = match self {
            Domain::Ball { center, radius } => {
                let sphere = SpherePartition::new(resolution);
                let area = sphere.cell_area() * radius * radius;
                sphere
                    .directions()
                    .iter()
                    .map(|&u| SurfaceNode {
                        point: BoundaryPoint {
                            r: *center + u * *radius,
                            n: u,
                        },
                        area,
                    })
                    .collect()
            }
            Domain::Box { lo, hi } => {
                let n = resolution;
                let mut out = Vec::with_capacity(6 * n * n);
                for k in 0..3 {
                    let a = (k + 1) % 3;
                    let b = (k + 2) % 3;
                    let da = (hi[a] - lo[a]) / n as f64;
                    let db = (hi[b] - lo[b]) / n as f64;
                    for (plane, sign) in [(lo[k], -1.0), (hi[k], 1.0)] {
                        for i in 0..n {
                            for j in 0..n {
                                let mut p = [0.0; 3];
                                p[k] = plane;
                                p[a] = lo[a] + (i as f64 + 0.5) * da;
                                p[b] = lo[b] + (j as f64 + 0.5) * db;
                                out.push(SurfaceNode {
                                    point: BoundaryPoint {
                                        r: Vec3::from_array(p),
                                        n: Vec3::axis(k) * sign,
                                    },
                                    area: da * db,
                                });
                            }
                        }
                    }
                }
                out
            }
            Domain::Polytope(p) => {
                let n = resolution;
                let mut out = Vec::new();
                for face in &p.faces {
                    let normal = p.planes[face.plane].normal;
                    let c = face.vertices.iter().fold(Vec3::ZERO, |acc, &v| acc + v) / face.vertices.len() as f64;
                    for i in 0..face.vertices.len() {
                        let a = face.vertices[i];
                        let b = face.vertices[(i + 1) % face.vertices.len()];
                        subdivide_triangle(c, a, b, n, |centroid, area| {
                            out.push(SurfaceNode {
                                point: BoundaryPoint { r: centroid, n: normal },
                                area,
                            })
                        });
                    }
                }
                out
            }
        };
        Ok(nodes)
    }
}

/// Splits triangle `(c, a, b)` into `n²` congruent pieces and reports each
/// piece's centroid and area.
fn subdivide_triangle(c: Vec3, a: Vec3, b: Vec3, n: usize, mut emit: impl FnMut(Vec3, f64)) {
    let area = 0.5 * (a - c).cross(b - c).norm() / (n * n) as f64;
    let nf = n as f64;
    let p = |i: usize, j: usize| c + (a - c) * (i as f64 / nf) + (b - c) * (j as f64 / nf);
    for i in 0..n {
        for j in 0..n - i {
            emit((p(i, j) + p(i + 1, j) + p(i, j + 1)) / 3.0, area);
            if i + j + 2 <= n {
                emit((p(i + 1, j) + p(i, j + 1) + p(i + 1, j + 1)) / 3.0, area);
            }
        }
    }
}

/// Γ₋ when `n·v̂ < -tol`, Γ₊ when `n·v̂ > tol`.
pub fn classify_boundary(bp: &BoundaryPoint, v: &Velocity, tol: f64) -> BoundaryClass {
    let c = bp.n.dot(v.direction());
    if c < -tol {
        BoundaryClass::Inflow
    } else if c > tol {
        BoundaryClass::Outflow
    } else {
        BoundaryClass::Tangential
    }
}

/// Boundary-ray quadrature of Γ₋: with these weights,
/// `Σ w · ∫₀^ℓ h(r₋ + t v̂) dt ≈ ∫_{ℛ×𝒱} h`. Tangential pairs are dropped
/// (their weight would be zero).
pub fn inflow_quadrature(domain: &Domain, vq: &VelocityQuadrature, resolution: usize) -> Result<Vec<BoundaryNode>> {
    boundary_quadrature(domain, vq, resolution, BoundarySide::Inflow)
}

/// Same construction on Γ₊; `length` is the distance back to the inflow point.
pub fn outflow_quadrature(domain: &Domain, vq: &VelocityQuadrature, resolution: usize) -> Result<Vec<BoundaryNode>> {
    boundary_quadrature(domain, vq, resolution, BoundarySide::Outflow)
}

fn boundary_quadrature(
    domain: &Domain,
    vq: &VelocityQuadrature,
    resolution: usize,
    side: BoundarySide,
) -> Result<Vec<BoundaryNode>> {
    let surface = domain.surface_quadrature(resolution)?;
    let mut out = Vec::new();
    for node in &surface {
        for (m, v) in vq.nodes().iter().enumerate() {
            let class = classify_boundary(&node.point, v, TANGENTIAL_TOLERANCE);
            let wanted = match side {
                BoundarySide::Inflow => BoundaryClass::Inflow,
                BoundarySide::Outflow => BoundaryClass::Outflow,
            };
            if class != wanted {
                continue;
            }
            let dir = v.direction();
            let cos = node.point.n.dot(dir).abs();
            let length = match domain.line_span(node.point.r, dir) {
                Some((s0, s1)) => match side {
                    BoundarySide::Inflow => s1.max(0.0),
                    BoundarySide::Outflow => (-s0).max(0.0),
                },
                None => 0.0,
            };
            out.push(BoundaryNode {
                point: node.point,
                velocity: m,
                weight: node.area * vq.weights()[m] * cos,
                length,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(x: f64, y: f64, z: f64) -> Velocity {
        Velocity::new(Vec3::new(x, y, z)).unwrap()
    }

    fn unit_cube() -> Domain {
        Domain::cuboid(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0)).unwrap()
    }

    fn cube_as_halfspaces() -> Domain {
        let mut planes = Vec::new();
        for k in 0..3 {
            planes.push(HalfSpace::new(Vec3::axis(k), 1.0).unwrap());
            planes.push(HalfSpace::new(-Vec3::axis(k), 0.0).unwrap());
        }
        Domain::halfspaces(planes).unwrap()
    }

    #[test]
    fn contains_examples() {
        let ball = Domain::unit_ball();
        assert!(ball.contains(Vec3::ZERO));
        assert!(!ball.contains(Vec3::new(2.0, 0.0, 0.0)));
        assert!(unit_cube().contains(Vec3::new(1.0, 1.0, 1.0)));
        assert!(cube_as_halfspaces().contains(Vec3::new(1.0, 1.0, 1.0)));
        assert!(!cube_as_halfspaces().contains(Vec3::new(1.0, 1.0, 1.1)));
    }

    #[test]
    fn chord_examples() {
        let c = Domain::unit_ball().chord(Vec3::ZERO, &v(1.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(c.length(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.t, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!((c.ray.origin - Vec3::new(-1.0, 0.0, 0.0)).norm(), 0.0, epsilon = 1e-15);

        let c = unit_cube().chord(Vec3::new(0.5, 0.5, 0.5), &v(0.0, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(c.length(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.t, 0.5, epsilon = 1e-15);

        let c = cube_as_halfspaces().chord(Vec3::new(0.5, 0.5, 0.5), &v(0.0, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(c.length(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.t, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn chord_off_center_matches_ray_marching_oracle() {
        let ball = Domain::unit_ball();
        let r = Vec3::new(0.0, 0.5, 0.0);
        let dir = Vec3::axis(0);
        // bisection on membership along ±dir
        let exit = |sign: f64| {
            let (mut lo, mut hi) = (0.0, 4.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if ball.contains(r + dir * (sign * mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        let oracle = exit(1.0) + exit(-1.0);
        let c = ball.chord(r, &v(1.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(c.length(), oracle, epsilon = 1e-9);
        assert_abs_diff_eq!(c.length(), 2.0 * 0.75f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.length(), 1.7320508, epsilon = 1e-7);
    }

    #[test]
    fn chord_outside_is_an_error() {
        let err = Domain::unit_ball().chord(Vec3::new(2.0, 0.0, 0.0), &v(1.0, 0.0, 0.0));
        assert!(matches!(err, Err(Error::PointOutsideDomain(_))));
    }

    #[test]
    fn classification_examples() {
        let bp = BoundaryPoint {
            r: Vec3::new(-1.0, 0.0, 0.0),
            n: Vec3::new(-1.0, 0.0, 0.0),
        };
        let tol = TANGENTIAL_TOLERANCE;
        assert_eq!(classify_boundary(&bp, &v(1.0, 0.0, 0.0), tol), BoundaryClass::Inflow);
        assert_eq!(classify_boundary(&bp, &v(-1.0, 0.0, 0.0), tol), BoundaryClass::Outflow);
        assert_eq!(classify_boundary(&bp, &v(0.0, 1.0, 0.0), tol), BoundaryClass::Tangential);
    }

    #[test]
    fn boundary_points_have_consistent_normals() {
        for domain in [Domain::unit_ball(), unit_cube(), cube_as_halfspaces()] {
            for node in domain.surface_quadrature(3).unwrap() {
                let BoundaryPoint { r, n } = node.point;
                assert_abs_diff_eq!(n.norm(), 1.0, epsilon = 1e-12);
                assert!(domain.contains(r - n * 1e-6));
                assert!(!domain.contains(r + n * 1e-6));
            }
        }
    }

    #[test]
    fn surface_areas() {
        let area = |d: &Domain, n| d.surface_quadrature(n).unwrap().iter().map(|s| s.area).sum::<f64>();
        assert_abs_diff_eq!(area(&Domain::unit_ball(), 4), 4.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert_abs_diff_eq!(area(&unit_cube(), 3), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(area(&cube_as_halfspaces(), 3), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn volumes() {
        assert_abs_diff_eq!(cube_as_halfspaces().volume(), 1.0, epsilon = 1e-12);
        let tet = Domain::halfspaces(vec![
            HalfSpace::new(-Vec3::axis(0), 0.0).unwrap(),
            HalfSpace::new(-Vec3::axis(1), 0.0).unwrap(),
            HalfSpace::new(-Vec3::axis(2), 0.0).unwrap(),
            HalfSpace::new(Vec3::new(1.0, 1.0, 1.0), 1.0).unwrap(),
        ])
        .unwrap();
        assert_abs_diff_eq!(tet.volume(), 1.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tet.diameter(), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn invalid_domains_are_rejected() {
        assert!(Domain::ball(Vec3::ZERO, 0.0).is_err());
        assert!(Domain::cuboid(Vec3::ZERO, Vec3::new(1.0, 0.0, 1.0)).is_err());
        // a slab is unbounded
        let slab = vec![
            HalfSpace::new(Vec3::axis(2), 1.0).unwrap(),
            HalfSpace::new(-Vec3::axis(2), 0.0).unwrap(),
            HalfSpace::new(Vec3::axis(0), 1.0).unwrap(),
            HalfSpace::new(-Vec3::axis(0), 0.0).unwrap(),
        ];
        assert!(Domain::halfspaces(slab).is_err());
        // empty
        let empty = vec![
            HalfSpace::new(Vec3::axis(0), -1.0).unwrap(),
            HalfSpace::new(-Vec3::axis(0), 0.0).unwrap(),
            HalfSpace::new(Vec3::axis(1), 1.0).unwrap(),
            HalfSpace::new(-Vec3::axis(1), 0.0).unwrap(),
            HalfSpace::new(Vec3::axis(2), 1.0).unwrap(),
            HalfSpace::new(-Vec3::axis(2), 0.0).unwrap(),
        ];
        assert!(Domain::halfspaces(empty).is_err());
        assert!(Velocity::new(Vec3::ZERO).is_err());
    }
}
