//! Velocity quadrature, the spatial collocation lattice, discrete phase-space
//! fields and the weighted `L^p` norms used by the estimates.

use crate::error::{Error, Result};
use crate::geometry::{BoundaryNode, BoundarySide, Chord, Domain, Vec3, Velocity};
use crate::par;
use crate::sphere::SpherePartition;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// An exponent `p ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p >= 1.0 && p.is_finite() {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    /// `(p-1)/p`, one for `p = ∞`.
    pub fn conjugate_fraction(self) -> f64 {
        1.0 - self.recip()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = t.parse().map_err(|_| Error::InvalidExponent(f64::NAN))?;
        Exponent::new(p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum VelocityRule {
    Sphere { order: usize },
    Shell { order: usize, r_min: f64, r_max: f64, radial: usize },
    Custom,
}

/// Discrete velocity set with positive weights.
#[derive(Clone, Debug)]
pub struct VelocityQuadrature {
    nodes: Vec<Velocity>,
    weights: Vec<f64>,
    antipodes: Option<Vec<usize>>,
    rule: VelocityRule,
}

impl VelocityQuadrature {
    /// Unit sphere S² with `8·order²` equal-weight, antipodally paired nodes.
    pub fn sphere(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidResolution("sphere order must be at least 1".into()));
        }
        let s = SpherePartition::new(order);
        let nodes = s.directions().iter().map(|&d| Velocity::new(d)).collect::<Result<Vec<_>>>()?;
        let antipodes = (0..s.len()).map(|i| s.antipode(i)).collect();
        Ok(Self {
            weights: vec![s.cell_area(); s.len()],
            nodes,
            antipodes: Some(antipodes),
            rule: VelocityRule::Sphere { order },
        })
    }

    /// Shell `r_min < |v| < r_max`: sphere rule times Gauss–Legendre in the
    /// speed with the `|v|²` Jacobian.
    pub fn shell(order: usize, r_min: f64, r_max: f64, radial: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::InvalidResolution(format!("shell radii must satisfy 0 < r_min < r_max, got {r_min}, {r_max}")));
        }
        if order == 0 || radial == 0 {
            return Err(Error::InvalidResolution("shell orders must be at least 1".into()));
        }
        let s = SpherePartition::new(order);
        let (x, w) = gauss_legendre(radial);
        let half = 0.5 * (r_max - r_min);
        let mid = 0.5 * (r_max + r_min);
        let mut nodes = Vec::with_capacity(s.len() * radial);
        let mut weights = Vec::with_capacity(s.len() * radial);
        let mut antipodes = Vec::with_capacity(s.len() * radial);
        for (i, &d) in s.directions().iter().enumerate() {
            for (xr, wr) in x.iter().zip(&w) {
                let speed = mid + half * xr;
                nodes.push(Velocity::new(d * speed)?);
                weights.push(s.cell_area() * wr * half * speed * speed);
            }
            for j in 0..radial {
                antipodes.push(s.antipode(i) * radial + j);
            }
        }
        Ok(Self {
            nodes,
            weights,
            antipodes: Some(antipodes),
            rule: VelocityRule::Shell { order, r_min, r_max, radial },
        })
    }

    /// Arbitrary nodes and positive weights. Antipodal pairs are detected
    /// when the node set is closed under `v ↦ -v`.
    pub fn custom(nodes: Vec<Velocity>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidResolution("custom quadrature needs matching, nonempty nodes and weights".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidResolution("quadrature weights must be positive".into()));
        }
        let antipodes: Option<Vec<usize>> = nodes
            .iter()
            .map(|a| {
                nodes
                    .iter()
                    .position(|b| (a.vector() + b.vector()).norm() <= 1e-12 * a.speed())
            })
            .collect();
        Ok(Self {
            nodes,
            weights,
            antipodes,
            rule: VelocityRule::Custom,
        })
    }

    pub fn nodes(&self) -> &[Velocity] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn rule(&self) -> &VelocityRule {
        &self.rule
    }

    /// Σ weights, the discrete measure of 𝒱.
    pub fn measure(&self) -> f64 {
        par::pairwise_sum(&self.weights)
    }

    /// Index of `-v_m`, if the rule is antipodally closed.
    pub fn antipode(&self, m: usize) -> Option<usize> {
        self.antipodes.as_ref().map(|a| a[m])
    }

    pub fn has_antipodes(&self) -> bool {
        self.antipodes.is_some()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Interpolation stencil: up to eight lattice nodes with convex weights.
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    pub nodes: [u32; 8],
    pub weights: [f64; 8],
    pub len: u8,
}

impl Stencil {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.len as usize).map(|k| (self.nodes[k] as usize, self.weights[k]))
    }
}

const ABSENT: u32 = u32::MAX;

/// Cell centres of a uniform Cartesian lattice over the bounding box that lie
/// strictly inside the domain; each carries its full cell volume.
#[derive(Clone, Debug)]
pub struct SpatialGrid {
    lo: Vec3,
    spacing: [f64; 3],
    dims: [usize; 3],
    points: Vec<Vec3>,
    volumes: Vec<f64>,
    index: Vec<u32>,
}

impl SpatialGrid {
    /// `n` cells along the longest bounding-box edge, proportionally fewer on
    /// the others.
    pub fn lattice(domain: &Domain, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidResolution("lattice resolution must be at least 1".into()));
        }
        let (lo, hi) = domain.bounding_box();
        let ext = hi - lo;
        let longest = ext.x.max(ext.y).max(ext.z);
        let dims = [0, 1, 2].map(|k| ((n as f64 * ext[k] / longest).round() as usize).max(1));
        Self::lattice_with_dims(domain, dims)
    }

    pub fn lattice_with_dims(domain: &Domain, dims: [usize; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidResolution("lattice dimensions must be positive".into()));
        }
        let (lo, hi) = domain.bounding_box();
        let spacing = [0, 1, 2].map(|k| (hi[k] - lo[k]) / dims[k] as f64);
        let margin = 1e-9 * (hi - lo).norm();
        let cell = spacing[0] * spacing[1] * spacing[2];
        let mut points = Vec::new();
        let mut index = vec![ABSENT; dims[0] * dims[1] * dims[2]];
        for ix in 0..dims[0] {
            for iy in 0..dims[1] {
                for iz in 0..dims[2] {
                    let x = Vec3::new(
                        lo.x + (ix as f64 + 0.5) * spacing[0],
                        lo.y + (iy as f64 + 0.5) * spacing[1],
                        lo.z + (iz as f64 + 0.5) * spacing[2],
                    );
                    if domain.inner_distance(x) > margin {
                        index[(ix * dims[1] + iy) * dims[2] + iz] = points.len() as u32;
                        points.push(x);
                    }
                }
            }
        }
        if points.is_empty() {
            return Err(Error::InvalidResolution("lattice has no interior cell centres".into()));
        }
        Ok(Self {
            lo,
            spacing,
            dims,
            volumes: vec![cell; points.len()],
            points,
            index,
        })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn total_volume(&self) -> f64 {
        par::pairwise_sum(&self.volumes)
    }

    fn lookup(&self, c: [usize; 3]) -> u32 {
        self.index[(c[0] * self.dims[1] + c[1]) * self.dims[2] + c[2]]
    }

    /// Multilinear interpolation weights at `x`, restricted to the corners that
    /// belong to the grid and renormalised. Coordinates outside the range of
    /// cell centres are clamped, so values extend constantly to the boundary.
    pub fn stencil(&self, x: Vec3) -> Stencil {
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for k in 0..3 {
            let g = (x[k] - self.lo[k]) / self.spacing[k] - 0.5;
            if self.dims[k] == 1 {
                continue;
            }
            let i0 = (g.floor().max(0.0) as usize).min(self.dims[k] - 2);
            base[k] = i0;
            frac[k] = (g - i0 as f64).clamp(0.0, 1.0);
        }
        let mut st = Stencil {
            nodes: [0; 8],
            weights: [0.0; 8],
            len: 0,
        };
        let mut total = 0.0;
        for corner in 0..8usize {
            let mut c = base;
            let mut w = 1.0;
            for k in 0..3 {
                let bit = (corner >> k) & 1;
                if bit == 1 {
                    if self.dims[k] == 1 {
                        w = 0.0;
                        break;
                    }
                    c[k] += 1;
                    w *= frac[k];
                } else {
                    w *= 1.0 - frac[k];
                }
            }
            if w <= 0.0 {
                continue;
            }
            let id = self.lookup(c);
            if id == ABSENT {
                continue;
            }
            st.nodes[st.len as usize] = id;
            st.weights[st.len as usize] = w;
            st.len += 1;
            total += w;
        }
        if total > 1e-12 {
            for w in &mut st.weights[..st.len as usize] {
                *w /= total;
            }
        } else {
            st.nodes[0] = self.nearest(x) as u32;
            st.weights[0] = 1.0;
            st.len = 1;
        }
        st
    }

    /// Index of the nearest grid point, searching outward in lattice shells.
    pub fn nearest(&self, x: Vec3) -> usize {
        let centre = [0, 1, 2].map(|k| {
            let g = ((x[k] - self.lo[k]) / self.spacing[k] - 0.5).round();
            g.clamp(0.0, (self.dims[k] - 1) as f64) as isize
        });
        let max_r = *self.dims.iter().max().unwrap() as isize;
        let mut best: Option<(f64, usize)> = None;
        for r in 0..=max_r {
            for dx in -r..=r {
                for dy in -r..=r {
                    for dz in -r..=r {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != r {
                            continue;
                        }
                        let c = [centre[0] + dx, centre[1] + dy, centre[2] + dz];
                        if (0..3).any(|k| c[k] < 0 || c[k] >= self.dims[k] as isize) {
                            continue;
                        }
                        let id = self.lookup([c[0] as usize, c[1] as usize, c[2] as usize]);
                        if id == ABSENT {
                            continue;
                        }
                        let d = (self.points[id as usize] - x).norm_squared();
                        if best.is_none_or(|(bd, _)| d < bd) {
                            best = Some((d, id as usize));
                        }
                    }
                }
            }
            // one extra shell guards against a closer point diagonally outward
            if let Some((d, id)) = best {
                let h = self.spacing.iter().cloned().fold(f64::INFINITY, f64::min);
                if d.sqrt() <= r as f64 * h {
                    return id;
                }
            }
        }
        best.map(|(_, id)| id).expect("grid is nonempty")
    }
}

/// Read-only view of one phase-space node.
#[derive(Clone, Copy, Debug)]
pub struct NodeView<'a> {
    pub spatial: usize,
    pub ordinate: usize,
    pub point: Vec3,
    pub velocity: &'a Velocity,
    pub chord: &'a Chord,
    /// Product of cell volume and velocity weight.
    pub measure: f64,
}

impl NodeView<'_> {
    /// Chord length `ℓ(r, v)`.
    pub fn ell(&self) -> f64 {
        self.chord.ray.length
    }

    /// Backward distance to the inflow point.
    pub fn t(&self) -> f64 {
        self.chord.t
    }
}

/// Domain, lattice and velocity rule, with the chord of every node.
#[derive(Debug)]
pub struct PhaseSpace {
    domain: Domain,
    grid: Arc<SpatialGrid>,
    velocities: Arc<VelocityQuadrature>,
    chords: Vec<Chord>,
}

impl PhaseSpace {
    pub fn new(domain: Domain, grid: SpatialGrid, velocities: VelocityQuadrature) -> Result<Arc<Self>> {
        let nv = velocities.len();
        let chords = par::map(grid.len() * nv, |k| {
            let (i, m) = (k / nv, k % nv);
            domain.chord(grid.points()[i], &velocities.nodes()[m])
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(Self {
            domain,
            grid: Arc::new(grid),
            velocities: Arc::new(velocities),
            chords,
        }))
    }

    /// Lattice with `n` cells along the longest edge and the sphere rule of
    /// the given order.
    pub fn uniform(domain: Domain, n: usize, order: usize) -> Result<Arc<Self>> {
        let grid = SpatialGrid::lattice(&domain, n)?;
        Self::new(domain, grid, VelocityQuadrature::sphere(order)?)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn velocities(&self) -> &VelocityQuadrature {
        &self.velocities
    }

    pub fn num_spatial(&self) -> usize {
        self.grid.len()
    }

    pub fn num_velocities(&self) -> usize {
        self.velocities.len()
    }

    /// Total number of phase-space nodes.
    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    pub fn chord(&self, i: usize, m: usize) -> &Chord {
        &self.chords[i * self.velocities.len() + m]
    }

    pub fn node(&self, i: usize, m: usize) -> NodeView<'_> {
        NodeView {
            spatial: i,
            ordinate: m,
            point: self.grid.points()[i],
            velocity: &self.velocities.nodes()[m],
            chord: self.chord(i, m),
            measure: self.grid.volumes()[i] * self.velocities.weights()[m],
        }
    }

    /// Σ cell volumes · Σ velocity weights.
    pub fn total_measure(&self) -> f64 {
        self.grid.total_volume() * self.velocities.measure()
    }

    /// Relative gap between the lattice volume and the exact domain volume.
    pub fn volume_defect(&self) -> f64 {
        let exact = self.domain.volume();
        (self.grid.total_volume() - exact).abs() / exact
    }

    pub fn zeros(self: &Arc<Self>) -> PhaseField {
        PhaseField {
            space: Arc::clone(self),
            values: vec![0.0; self.len()],
        }
    }

    pub fn constant(self: &Arc<Self>, c: f64) -> PhaseField {
        PhaseField {
            space: Arc::clone(self),
            values: vec![c; self.len()],
        }
    }

    pub fn field_from_fn<F>(self: &Arc<Self>, f: F) -> PhaseField
    where
        F: Fn(&NodeView) -> f64 + Sync + Send,
    {
        let nv = self.num_velocities();
        let rows = par::map(self.num_spatial(), |i| (0..nv).map(|m| f(&self.node(i, m))).collect::<Vec<_>>());
        PhaseField {
            space: Arc::clone(self),
            values: rows.concat(),
        }
    }
}

/// Nodal values on a phase space, laid out as `values[i·M + m]`.
#[derive(Clone, Debug)]
pub struct PhaseField {
    space: Arc<PhaseSpace>,
    values: Vec<f64>,
}

impl PhaseField {
    pub fn from_values(space: &Arc<PhaseSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            space: Arc::clone(space),
            values,
        })
    }

    pub fn space(&self) -> &Arc<PhaseSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, m: usize) -> f64 {
        self.values[i * self.space.num_velocities() + m]
    }

    pub fn set(&mut self, i: usize, m: usize, value: f64) {
        let nv = self.space.num_velocities();
        self.values[i * nv + m] = value;
    }

    /// `GridMismatch` unless both fields live on the same phase space.
    pub fn check_compatible(&self, other: &PhaseField) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> PhaseField {
        PhaseField {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &PhaseField, b: f64) -> Result<PhaseField> {
        self.check_compatible(other)?;
        Ok(PhaseField {
            space: Arc::clone(&self.space),
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
        })
    }

    pub fn add(&self, other: &PhaseField) -> Result<PhaseField> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &PhaseField) -> Result<PhaseField> {
        self.combine(1.0, other, -1.0)
    }

    pub fn scale(&self, c: f64) -> PhaseField {
        self.map(|v| c * v)
    }

    /// Nodewise `f(node, value)`.
    pub fn map_nodes<F>(&self, f: F) -> PhaseField
    where
        F: Fn(&NodeView, f64) -> f64 + Sync + Send,
    {
        let space = &self.space;
        let nv = space.num_velocities();
        let rows = par::map(space.num_spatial(), |i| {
            (0..nv).map(|m| f(&space.node(i, m), self.values[i * nv + m])).collect::<Vec<_>>()
        });
        PhaseField {
            space: Arc::clone(space),
            values: rows.concat(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Value at an off-grid point for ordinate `m` by multilinear
    /// interpolation.
    pub fn interpolate(&self, x: Vec3, m: usize) -> f64 {
        let st = self.space.grid.stencil(x);
        let nv = self.space.num_velocities();
        st.iter().map(|(j, w)| w * self.values[j * nv + m]).sum()
    }
}

/// Values on boundary quadrature nodes of one side.
#[derive(Clone, Debug)]
pub struct BoundaryField {
    nodes: Arc<Vec<BoundaryNode>>,
    values: Vec<f64>,
    side: BoundarySide,
}

impl BoundaryField {
    pub fn new(nodes: Arc<Vec<BoundaryNode>>, values: Vec<f64>, side: BoundarySide) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { nodes, values, side })
    }

    pub fn from_fn(nodes: Arc<Vec<BoundaryNode>>, side: BoundarySide, f: impl Fn(&BoundaryNode) -> f64) -> Self {
        let values = nodes.iter().map(f).collect();
        Self { nodes, values, side }
    }

    pub fn nodes(&self) -> &[BoundaryNode] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn side(&self) -> BoundarySide {
        self.side
    }
}

fn reduce<F>(field: &PhaseField, p: Exponent, term: F) -> f64
where
    F: Fn(&NodeView, f64) -> f64 + Sync + Send,
{
    let space = field.space();
    let nv = space.num_velocities();
    let rows = par::map(space.num_spatial(), |i| {
        let mut acc = 0.0;
        for m in 0..nv {
            let x = term(&space.node(i, m), field.values[i * nv + m]);
            acc = if p.is_infinite() { f64::max(acc, x) } else { acc + x };
        }
        acc
    });
    match p {
        Exponent::Infinity => rows.into_iter().fold(0.0, f64::max),
        Exponent::Finite(q) => par::pairwise_sum(&rows).powf(1.0 / q),
    }
}

/// `(Σ vol·w·weight·|φ|^p)^{1/p}`, or `max |φ|` for `p = ∞` (the weight then
/// enters with exponent `1/p = 0`).
pub fn weighted_lp_norm<W>(field: &PhaseField, weight: W, p: Exponent) -> f64
where
    W: Fn(&NodeView) -> f64 + Sync + Send,
{
    match p {
        Exponent::Infinity => reduce(field, p, |_, v| v.abs()),
        Exponent::Finite(q) => reduce(field, p, |n, v| n.measure * weight(n) * v.abs().powf(q)),
    }
}

/// `‖s·φ‖_p` for a pointwise multiplier `s`; unlike [`weighted_lp_norm`]
/// the multiplier survives at `p = ∞`.
pub fn scaled_lp_norm<S>(field: &PhaseField, scale: S, p: Exponent) -> f64
where
    S: Fn(&NodeView) -> f64 + Sync + Send,
{
    match p {
        Exponent::Infinity => reduce(field, p, |n, v| (scale(n) * v).abs()),
        Exponent::Finite(q) => reduce(field, p, |n, v| n.measure * (scale(n) * v).abs().powf(q)),
    }
}

/// `(Σ w·|g|^p)^{1/p}` with weights already carrying `|n·v̂|`.
pub fn boundary_lp_norm(field: &BoundaryField, p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => field
            .nodes
            .iter()
            .zip(&field.values)
            .filter(|(n, _)| n.weight > 0.0)
            .fold(0.0, |a, (_, v)| a.max(v.abs())),
        Exponent::Finite(q) => {
            let terms: Vec<f64> = field
                .nodes
                .iter()
                .zip(&field.values)
                .map(|(n, v)| n.weight * v.abs().powf(q))
                .collect();
            par::pairwise_sum(&terms).powf(1.0 / q)
        }
    }
}

/// `𝒲^p` norm: `(‖ℓ^{-1/p}φ‖^p + ‖ℓ^{1-1/p}dφ‖^p)^{1/p}`, the larger of
/// `‖φ‖_∞` and `‖ℓ dφ‖_∞` for `p = ∞`.
pub fn energy_norm(phi: &PhaseField, dphi: &PhaseField, p: Exponent) -> Result<f64> {
    phi.check_compatible(dphi)?;
    let r = p.recip();
    let a = scaled_lp_norm(phi, |n| n.ell().powf(-r), p);
    let b = scaled_lp_norm(dphi, |n| n.ell().powf(1.0 - r), p);
    Ok(match p {
        Exponent::Infinity => a.max(b),
        Exponent::Finite(q) => (a.powf(q) + b.powf(q)).powf(1.0 / q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Finite(2.0));
        assert!("0.5".parse::<Exponent>().is_err());
        assert!(Exponent::new(0.9).is_err());
        assert_eq!(Exponent::Infinity.recip(), 0.0);
    }

    #[test]
    fn sphere_rule_measure_and_odd_moments() {
        for order in 1..6 {
            let q = VelocityQuadrature::sphere(order).unwrap();
            assert!((q.measure() - 4.0 * PI).abs() < 1e-8);
            let mut first = Vec3::ZERO;
            for (v, w) in q.nodes().iter().zip(q.weights()) {
                first += v.direction() * *w;
            }
            assert!(first.norm() < 1e-10);
        }
    }

    #[test]
    fn shell_rule_measure() {
        let q = VelocityQuadrature::shell(2, 0.5, 2.0, 3).unwrap();
        let exact = 4.0 * PI / 3.0 * (8.0 - 0.125);
        assert!((q.measure() - exact).abs() < 1e-10);
        for m in 0..q.len() {
            let a = q.antipode(m).unwrap();
            assert!((q.nodes()[m].vector() + q.nodes()[a].vector()).norm() < 1e-12);
        }
    }

    #[test]
    fn custom_rule_detects_antipodes() {
        let v = |x, y, z| Velocity::new(Vec3::new(x, y, z)).unwrap();
        let q = VelocityQuadrature::custom(vec![v(0., 0., 1.), v(0., 0., -1.)], vec![1.0, 1.0]).unwrap();
        assert_eq!(q.antipode(0), Some(1));
        let q = VelocityQuadrature::custom(vec![v(0., 0., 1.)], vec![1.0]).unwrap();
        assert!(!q.has_antipodes());
    }

    #[test]
    fn box_lattice_volume_is_exact_and_ball_converges() {
        let cube = Domain::cuboid(Vec3::ZERO, Vec3::new(2.0, 1.0, 1.0)).unwrap();
        let g = SpatialGrid::lattice(&cube, 8).unwrap();
        assert_eq!(g.dims(), [8, 4, 4]);
        assert!((g.total_volume() - 2.0).abs() < 1e-12);
        let ball = Domain::unit_ball();
        let err = |n| (SpatialGrid::lattice(&ball, n).unwrap().total_volume() - ball.volume()).abs();
        assert!(err(40) < 2e-2 * ball.volume());
        for p in SpatialGrid::lattice(&ball, 10).unwrap().points() {
            assert!(ball.contains(*p));
        }
    }

    #[test]
    fn interpolation_reproduces_linear_functions_in_the_interior() {
        let cube = Domain::cuboid(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let space = PhaseSpace::uniform(cube, 6, 1).unwrap();
        let f = space.field_from_fn(|n| 1.0 + 2.0 * n.point.x - n.point.y + 0.5 * n.point.z);
        let x = Vec3::new(0.41, 0.37, 0.66);
        assert!((f.interpolate(x, 3) - (1.0 + 0.82 - 0.37 + 0.33)).abs() < 1e-12);
        let st = space.grid().stencil(Vec3::new(0.01, 0.99, 0.5));
        let s: f64 = st.iter().map(|(_, w)| w).sum();
        assert!((s - 1.0).abs() < 1e-14);
        assert!(st.iter().all(|(_, w)| w >= 0.0));
    }

    #[test]
    fn norm_examples() {
        let cube = Domain::cuboid(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let grid = SpatialGrid::lattice(&cube, 4).unwrap();
        let v = Velocity::new(Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let vq = VelocityQuadrature::custom(vec![v], vec![1.0]).unwrap();
        let space = PhaseSpace::new(cube, grid, vq).unwrap();
        let two = space.constant(2.0);
        assert!((weighted_lp_norm(&two, |_| 1.0, Exponent::Finite(2.0)) - 2.0).abs() < 1e-12);
        assert_eq!(weighted_lp_norm(&space.constant(-3.5), |n| n.ell(), Exponent::Infinity), 3.5);
        let zero = space.zeros();
        assert_eq!(energy_norm(&zero, &zero, Exponent::Finite(1.0)).unwrap(), 0.0);
        let e = energy_norm(&two, &zero, Exponent::Finite(3.0)).unwrap();
        let w = weighted_lp_norm(&two, |n| 1.0 / n.ell(), Exponent::Finite(3.0));
        assert!((e - w).abs() < 1e-14);
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let a = PhaseSpace::uniform(Domain::unit_ball(), 4, 1).unwrap();
        let b = PhaseSpace::uniform(Domain::unit_ball(), 4, 1).unwrap();
        assert!(matches!(a.zeros().add(&b.zeros()), Err(Error::GridMismatch)));
        assert!(matches!(energy_norm(&a.zeros(), &b.zeros(), Exponent::Infinity), Err(Error::GridMismatch)));
    }
}
