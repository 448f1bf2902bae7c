//! Convex polytopes in vertex + halfspace form.
//!
//! Hulls are built by brute-force facet enumeration over affinely
//! independent vertex subsets. That is O(C(m, d) * m) and entirely adequate
//! at desk scale (dozens of points, dimension <= 6), in exchange for exact
//! support, width, and polar computations downstream.

use serde::{Deserialize, Serialize};

use super::GeomError;
use crate::{tol, Matrix, Vector};

/// Halfspace `<normal, x> <= offset` with unit outward normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vector,
    pub offset: f64,
}

/// Bounded convex polytope.
///
/// Vertices are the extreme points; facets describe the same body as a
/// halfspace intersection *within its affine hull*. Bodies of affine
/// dimension below the ambient dimension keep their facet structure in the
/// affine-hull coordinates and expose it mapped back to ambient coordinates.
#[derive(Debug, Clone)]
pub struct Polytope {
    vertices: Vec<Vector>,
    /// Facets in affine-hull coordinates.
    facets: Vec<Facet>,
    affine_origin: Vector,
    /// Orthonormal basis of the affine hull (columns).
    affine_basis: Matrix,
    volume: f64,
    centroid: Vector,
    ambient_dim: usize,
}

impl Polytope {
    /// Convex hull of a finite point set.
    pub fn hull(points: &[Vector]) -> Result<Self, GeomError> {
        if points.is_empty() {
            return Err(GeomError::EmptyInput);
        }
        let ambient_dim = points[0].len();
        if points.iter().any(|p| p.len() != ambient_dim || p.iter().any(|x| !x.is_finite())) {
            return Err(GeomError::NonFinite);
        }
        let scale = points
            .iter()
            .flat_map(|p| p.iter().map(|x| x.abs()))
            .fold(1.0f64, f64::max);

        // Deduplicate.
        let mut pts: Vec<Vector> = Vec::new();
        for p in points {
            if !pts.iter().any(|q| (p - q).norm() <= 1e-12 * scale) {
                pts.push(p.clone());
            }
        }

        let origin = pts[0].clone();
        let basis = affine_basis(&pts, &origin, scale);
        let d = basis.ncols();

        if d == 0 {
            return Ok(Self {
                vertices: vec![origin.clone()],
                facets: Vec::new(),
                affine_origin: origin.clone(),
                affine_basis: basis,
                volume: 0.0,
                centroid: origin,
                ambient_dim,
            });
        }

        // Affine coordinates of every candidate point.
        let coords: Vec<Vector> = pts.iter().map(|p| basis.transpose() * (p - &origin)).collect();
        let facets = enumerate_facets(&coords, d, scale)?;
        let vertex_idx = identify_vertices(&coords, &facets, d, scale);
        let vert_coords: Vec<Vector> = vertex_idx.iter().map(|&i| coords[i].clone()).collect();
        let vertices: Vec<Vector> = vertex_idx.iter().map(|&i| pts[i].clone()).collect();

        let (vol, cen) = volume_centroid(&vert_coords, &facets, d, scale);
        let centroid = &origin + &basis * cen;
        let volume = if d == ambient_dim { vol } else { 0.0 };

        Ok(Self {
            vertices,
            facets,
            affine_origin: origin,
            affine_basis: basis,
            volume,
            centroid,
            ambient_dim,
        })
    }

    /// Hull of the corners of a box.
    pub fn from_box(domain: &crate::grid::BoxDomain) -> Self {
        Self::hull(&domain.corners()).expect("box corners form a valid hull")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_basis.ncols()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim() == self.ambient_dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    /// n-dimensional volume; zero when the affine hull is lower dimensional.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Volume within the affine hull (length of a segment, area of a planar
    /// polygon in 3-space, ...).
    pub fn relative_volume(&self) -> f64 {
        if self.affine_dim() == 0 {
            return 0.0;
        }
        let vert_coords: Vec<Vector> = self.vertices.iter().map(|v| self.to_affine(v)).collect();
        let scale = 1.0 + vert_coords.iter().map(|c| c.norm()).fold(0.0, f64::max);
        volume_centroid(&vert_coords, &self.facets, self.affine_dim(), scale).0
    }

    /// Center of mass of the body (with respect to the volume measure of its
    /// affine hull).
    pub fn centroid(&self) -> &Vector {
        &self.centroid
    }

    pub fn to_affine(&self, p: &Vector) -> Vector {
        self.affine_basis.transpose() * (p - &self.affine_origin)
    }

    pub fn from_affine(&self, y: &Vector) -> Vector {
        &self.affine_origin + &self.affine_basis * y
    }

    /// Facets mapped to ambient coordinates: `(unit normal, offset)`.
    pub fn facets_ambient(&self) -> Vec<(Vector, f64)> {
        self.facets
            .iter()
            .map(|f| {
                let normal = &self.affine_basis * &f.normal;
                let offset = f.offset + normal.dot(&self.affine_origin);
                (normal, offset)
            })
            .collect()
    }

    pub(crate) fn facets_affine(&self) -> &[Facet] {
        &self.facets
    }

    /// Distance from `p` to the affine hull.
    pub fn affine_hull_distance(&self, p: &Vector) -> f64 {
        let rel = p - &self.affine_origin;
        let proj = &self.affine_basis * (self.affine_basis.transpose() * &rel);
        (rel - proj).norm()
    }

    /// Largest constraint violation of `p`, negative strictly inside. For
    /// full-dimensional bodies this is the worst facet excess; degenerate
    /// bodies also account for the distance to their affine hull.
    pub fn violation(&self, p: &Vector) -> f64 {
        if self.affine_dim() == 0 {
            return (p - &self.affine_origin).norm();
        }
        let y = self.to_affine(p);
        let facet_excess = self
            .facets
            .iter()
            .map(|f| f.normal.dot(&y) - f.offset)
            .fold(f64::NEG_INFINITY, f64::max);
        if self.is_full_dimensional() {
            facet_excess
        } else {
            facet_excess.max(self.affine_hull_distance(p))
        }
    }

    pub fn contains(&self, p: &Vector, slack: f64) -> bool {
        self.violation(p) <= slack
    }

    /// Support value `max_{x in A} <v, x>`.
    pub fn support(&self, v: &Vector) -> f64 {
        self.vertices.iter().map(|p| v.dot(p)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// A vertex attaining the support value.
    pub fn support_point(&self, v: &Vector) -> &Vector {
        self.vertices
            .iter()
            .max_by(|a, b| v.dot(a).total_cmp(&v.dot(b)))
            .expect("polytope has at least one vertex")
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                d = d.max((p - q).norm());
            }
        }
        d
    }

    /// Index of the vertex equal to `p` within tolerance.
    pub fn vertex_index(&self, p: &Vector) -> Option<usize> {
        let scale = 1.0 + p.norm();
        self.vertices.iter().position(|v| (v - p).norm() <= 1e-7 * scale)
    }

    /// Facets incident to vertex `idx` (in affine coordinates).
    pub(crate) fn incident_facets(&self, idx: usize) -> Vec<usize> {
        let y = self.to_affine(&self.vertices[idx]);
        let scale = 1.0 + y.norm();
        self.facets
            .iter()
            .enumerate()
            .filter(|(_, f)| (f.normal.dot(&y) - f.offset).abs() <= tol::FACET * scale)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Orthonormal basis of the affine hull via Gram-Schmidt over differences.
fn affine_basis(points: &[Vector], origin: &Vector, scale: f64) -> Matrix {
    let n = origin.len();
    let mut cols: Vec<Vector> = Vec::new();
    for p in points {
        let mut v = p - origin;
        for b in &cols {
            let c = b.dot(&v);
            v -= b * c;
        }
        if v.norm() > 1e-9 * scale {
            cols.push(v.normalize());
        }
        if cols.len() == n {
            break;
        }
    }
    if cols.is_empty() {
        return Matrix::zeros(n, 0);
    }
    Matrix::from_columns(&cols)
}

/// All supporting hyperplanes spanned by d-subsets of the points.
fn enumerate_facets(coords: &[Vector], d: usize, scale: f64) -> Result<Vec<Facet>, GeomError> {
    let m = coords.len();
    let side_tol = tol::FACET * scale.max(1.0);
    let mut facets: Vec<Facet> = Vec::new();

    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        if let Some(normal) = hyperplane_normal(coords, &subset, d, scale) {
            let offset = normal.dot(&coords[subset[0]]);
            let mut above = false;
            let mut below = false;
            for c in coords {
                let s = normal.dot(c) - offset;
                if s > side_tol {
                    above = true;
                } else if s < -side_tol {
                    below = true;
                }
                if above && below {
                    break;
                }
            }
            if !(above && below) {
                let (nrm, off) =
                    if above { (-&normal, -offset) } else { (normal.clone(), offset) };
                let dup = facets.iter().any(|f| {
                    (&f.normal - &nrm).norm() < 1e-7 && (f.offset - off).abs() < 1e-7 * scale.max(1.0)
                });
                if !dup {
                    facets.push(Facet { normal: nrm, offset: off });
                }
            }
        }
        if !advance_subset(&mut subset, m) {
            break;
        }
    }

    if facets.is_empty() {
        // d >= 1 with no facet can only happen through numerical collapse.
        return Err(GeomError::NonFinite);
    }
    Ok(facets)
}

/// Unit normal of the hyperplane through `subset`, or None when the subset
/// is affinely dependent.
fn hyperplane_normal(coords: &[Vector], subset: &[usize], d: usize, scale: f64) -> Option<Vector> {
    if d == 1 {
        return Some(Vector::from_element(1, 1.0));
    }
    let base = &coords[subset[0]];
    // Orthonormalize the d-1 difference vectors spanning the plane.
    let mut basis: Vec<Vector> = Vec::with_capacity(d - 1);
    for &i in &subset[1..] {
        let mut v = &coords[i] - base;
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let n = v.norm();
        if n <= 1e-9 * scale.max(1.0) {
            return None; // affinely dependent subset
        }
        basis.push(v / n);
    }
    // The normal is the orthogonal complement: orthogonalize the coordinate
    // direction with the largest residual.
    let mut best: Option<Vector> = None;
    let mut best_norm = 0.0;
    for k in 0..d {
        let mut e = Vector::zeros(d);
        e[k] = 1.0;
        for b in &basis {
            let c = b.dot(&e);
            e -= b * c;
        }
        let n = e.norm();
        if n > best_norm {
            best_norm = n;
            best = Some(e / n);
        }
    }
    if best_norm < 1e-7 {
        return None;
    }
    best
}

fn advance_subset(subset: &mut [usize], m: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] + (k - i) < m {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// A point is a vertex exactly when its incident facet normals span the
/// (affine-hull) space.
fn identify_vertices(coords: &[Vector], facets: &[Facet], d: usize, scale: f64) -> Vec<usize> {
    let side_tol = tol::FACET * scale.max(1.0);
    let mut out = Vec::new();
    for (i, c) in coords.iter().enumerate() {
        let incident: Vec<&Vector> = facets
            .iter()
            .filter(|f| (f.normal.dot(c) - f.offset).abs() <= side_tol)
            .map(|f| &f.normal)
            .collect();
        if incident.len() < d {
            continue;
        }
        let mat = Matrix::from_columns(&incident.iter().map(|&v| v.clone()).collect::<Vec<_>>());
        if mat.rank(1e-9) == d {
            out.push(i);
        }
    }
    out
}

/// Exact volume and centroid of a full-dimensional polytope in R^d by a fan
/// of cones over its facets.
fn volume_centroid(verts: &[Vector], facets: &[Facet], d: usize, scale: f64) -> (f64, Vector) {
    if d == 1 {
        let lo = verts.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let hi = verts.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        return (hi - lo, Vector::from_element(1, 0.5 * (lo + hi)));
    }
    let apex = verts.iter().sum::<Vector>() / verts.len() as f64;
    let side_tol = tol::FACET * scale.max(1.0);
    let mut total = 0.0;
    let mut weighted = Vector::zeros(d);
    for f in facets {
        let on_facet: Vec<Vector> = verts
            .iter()
            .filter(|v| (f.normal.dot(v) - f.offset).abs() <= side_tol)
            .cloned()
            .collect();
        if on_facet.len() < d {
            continue;
        }
        // Coordinates within the facet hyperplane.
        let base = on_facet[0].clone();
        let plane_basis = affine_basis(&on_facet, &base, scale);
        if plane_basis.ncols() != d - 1 {
            continue; // degenerate facet
        }
        let projected: Vec<Vector> =
            on_facet.iter().map(|v| plane_basis.transpose() * (v - &base)).collect();
        let sub = match Polytope::hull(&projected) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let sub_coords: Vec<Vector> = sub.vertices().to_vec();
        let (face_vol, face_cen_local) =
            volume_centroid(&sub_coords, sub.facets_affine(), d - 1, scale);
        let face_centroid = &base + &plane_basis * face_cen_local;
        let height = f.offset - f.normal.dot(&apex);
        let cone_vol = height.max(0.0) * face_vol / d as f64;
        let cone_centroid = &apex + (&face_centroid - &apex) * (d as f64 / (d as f64 + 1.0));
        total += cone_vol;
        weighted += cone_centroid * cone_vol;
    }
    if total <= 0.0 {
        (0.0, apex)
    } else {
        (total, weighted / total)
    }
}

/// JSON form: vertex list plus ambient dimension.
#[derive(Serialize, Deserialize)]
pub struct PolytopeJson {
    pub vertices: Vec<Vec<f64>>,
    pub dim: usize,
}

impl From<&Polytope> for PolytopeJson {
    fn from(p: &Polytope) -> Self {
        Self {
            vertices: p.vertices.iter().map(|v| v.iter().cloned().collect()).collect(),
            dim: p.ambient_dim,
        }
    }
}

impl TryFrom<PolytopeJson> for Polytope {
    type Error = GeomError;

    fn try_from(j: PolytopeJson) -> Result<Self, Self::Error> {
        let pts: Vec<Vector> = j
            .vertices
            .iter()
            .map(|v| Vector::from_iterator(j.dim, v.iter().cloned()))
            .collect();
        Polytope::hull(&pts)
    }
}

impl Serialize for Polytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolytopeJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PolytopeJson::deserialize(d)?;
        Polytope::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
pub(crate) fn vec2(x: f64, y: f64) -> Vector {
    Vector::from_vec(vec![x, y])
}
