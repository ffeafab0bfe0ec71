//! Ideal-triangle tessellation of the Poincaré disc.
//!
//! The base triangle has vertices `1, i, −1`, the Cayley preimages of the
//! cusps `0, 1, ∞`. Side `k` is opposite vertex `k`. A triangle with word
//! `k₁…k_n` is the image of the base under `R_{k₁}∘…∘R_{k_n}`, where `R_k`
//! is the reflection across base side `k`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, I};
use crate::error::{Error, Result};

/// Enumeration depth guard.
pub const MAX_DEPTH: usize = 12;

/// Vertex positions computed by reflection and from the exact label must
/// agree to this tolerance.
pub const VERTEX_TOLERANCE: f64 = 1e-10;

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(Complex),
    Infinity,
}

impl Extended {
    pub fn finite(self) -> Option<Complex> {
        match self {
            Extended::Finite(z) => Some(z),
            Extended::Infinity => None,
        }
    }
}

/// `τ = i(1 − z)/(1 + z)`, written as `(2 Im z + i(1 − |z|²))/|1 + z|²` so
/// that boundary points land exactly on the real axis.
pub fn cayley(z: Complex) -> Extended {
    let den = (Complex::new(1.0, 0.0) + z).norm_sqr();
    if den == 0.0 {
        return Extended::Infinity;
    }
    Extended::Finite(Complex::new(2.0 * z.im, 1.0 - z.norm_sqr()) / den)
}

/// `z = (i − τ)/(i + τ)`.
pub fn cayley_inv(tau: Complex) -> Complex {
    (I - tau) / (I + tau)
}

pub fn cayley_inv_ext(tau: Extended) -> Complex {
    match tau {
        Extended::Finite(t) => cayley_inv(t),
        Extended::Infinity => Complex::new(-1.0, 0.0),
    }
}

// ---------------------------------------------------------------------------
// Farey labels

/// A reduced fraction `p/q` with `q ≥ 0`; `∞` is `1/0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Farey {
    pub p: i64,
    pub q: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl Farey {
    pub const INFINITY: Farey = Farey { p: 1, q: 0 };

    pub fn new(p: i64, q: i64) -> Self {
        assert!(p != 0 || q != 0, "0/0 is not a cusp");
        let g = gcd(p, q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Farey { p, q }
    }

    pub fn integer(n: i64) -> Self {
        Farey { p: n, q: 1 }
    }

    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }

    pub fn value(&self) -> Option<f64> {
        (self.q != 0).then(|| self.p as f64 / self.q as f64)
    }

    /// The corresponding boundary point of the disc.
    pub fn disc_point(&self) -> Complex {
        match self.value() {
            Some(x) => cayley_inv(Complex::new(x, 0.0)),
            None => Complex::new(-1.0, 0.0),
        }
    }

    /// Reflection of `self` across the geodesic joining cusps `x` and `y`:
    /// writing `self = αx + βy` the image is `αx − βy`.
    pub fn reflect_across(&self, x: Farey, y: Farey) -> Farey {
        let det = x.p * y.q - x.q * y.p;
        debug_assert!(det.abs() == 1, "cusps {x} and {y} are not Farey neighbours");
        let alpha = (self.p * y.q - self.q * y.p) / det;
        let beta = (x.p * self.q - x.q * self.p) / det;
        Farey::new(alpha * x.p - beta * y.p, alpha * x.q - beta * y.q)
    }
}

impl fmt::Display for Farey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 0 {
            write!(f, "inf")
        } else if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

// ---------------------------------------------------------------------------
// Geodesics and Möbius maps

/// A hyperbolic geodesic of the disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geodesic {
    /// Circle orthogonal to the unit circle: `|c|² = R² + 1`.
    Circle { center: Complex, radius: f64 },
    /// Diameter through `±direction`, `|direction| = 1`.
    Diameter { direction: Complex },
}

impl Geodesic {
    /// Geodesic joining two distinct unit-modulus points.
    pub fn through(z1: Complex, z2: Complex) -> Self {
        let s = 1.0 + (z1 * z2.conj()).re;
        if s.abs() < 1e-12 {
            return Geodesic::Diameter { direction: z1 / z1.norm() };
        }
        let center = (z1 + z2) / s;
        let radius = (center.norm_sqr() - 1.0).max(0.0).sqrt();
        Geodesic::Circle { center, radius }
    }

    /// Signed side function; zero on the geodesic.
    pub fn side(&self, z: Complex) -> f64 {
        match *self {
            Geodesic::Circle { center, radius } => (z - center).norm_sqr() - radius * radius,
            Geodesic::Diameter { direction } => (z * direction.conj()).im,
        }
    }

    pub fn reflection(&self) -> MoebiusMap {
        match *self {
            Geodesic::Circle { center, .. } => MoebiusMap::reflecting([
                [center, Complex::new(-1.0, 0.0)],
                [Complex::new(1.0, 0.0), -center.conj()],
            ]),
            Geodesic::Diameter { direction } => MoebiusMap::reflecting([
                [direction * direction, Complex::new(0.0, 0.0)],
                [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
            ]),
        }
    }

    /// Angle made with the unit circle at an endpoint, in radians.
    pub fn boundary_angle(&self) -> f64 {
        match *self {
            Geodesic::Diameter { .. } => std::f64::consts::FRAC_PI_2,
            Geodesic::Circle { center, radius } => {
                // Law of cosines at an intersection point.
                let cos = (1.0 + radius * radius - center.norm_sqr()) / (2.0 * radius);
                cos.clamp(-1.0, 1.0).acos()
            }
        }
    }
}

/// `z ↦ (a ζ + b)/(c ζ + d)` with `ζ = z` or `ζ = z̄` when reflecting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    pub m: [[Complex; 2]; 2],
    pub reflecting: bool,
}

fn mat_mul(a: &[[Complex; 2]; 2], b: &[[Complex; 2]; 2]) -> [[Complex; 2]; 2] {
    let mut out = [[Complex::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_conj(a: &[[Complex; 2]; 2]) -> [[Complex; 2]; 2] {
    [[a[0][0].conj(), a[0][1].conj()], [a[1][0].conj(), a[1][1].conj()]]
}

fn mat_inv(a: &[[Complex; 2]; 2]) -> [[Complex; 2]; 2] {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]
}

/// Cayley transform as a matrix: `τ = K z`.
fn cayley_matrix() -> [[Complex; 2]; 2] {
    [[-I, I], [Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]]
}

impl MoebiusMap {
    pub fn identity() -> Self {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        Self {
            m: [[one, zero], [zero, one]],
            reflecting: false,
        }
    }

    pub fn holomorphic(m: [[Complex; 2]; 2]) -> Self {
        Self { m, reflecting: false }
    }

    pub fn reflecting(m: [[Complex; 2]; 2]) -> Self {
        Self { m, reflecting: true }
    }

    pub fn det(&self) -> Complex {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, z: Complex) -> Complex {
        let w = if self.reflecting { z.conj() } else { z };
        (self.m[0][0] * w + self.m[0][1]) / (self.m[1][0] * w + self.m[1][1])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let b = if self.reflecting { mat_conj(&other.m) } else { other.m };
        let mut m = mat_mul(&self.m, &b);
        // Keep entries of unit scale over long words.
        let scale = self.det().norm().sqrt() * other.det().norm().sqrt();
        if scale > 0.0 && scale.is_finite() {
            for row in &mut m {
                for e in row.iter_mut() {
                    *e /= scale;
                }
            }
        }
        MoebiusMap {
            m,
            reflecting: self.reflecting != other.reflecting,
        }
    }

    pub fn inverse(&self) -> MoebiusMap {
        let inv = mat_inv(&self.m);
        MoebiusMap {
            m: if self.reflecting { mat_conj(&inv) } else { inv },
            reflecting: self.reflecting,
        }
    }

    /// The conjugate map `K f K⁻¹` on the upper half-plane, normalised to a
    /// real matrix of determinant `±1`.
    pub fn to_half_plane(&self) -> [[f64; 2]; 2] {
        let k = cayley_matrix();
        let kinv = mat_inv(&k);
        let right = if self.reflecting { mat_conj(&kinv) } else { kinv };
        let h = mat_mul(&mat_mul(&k, &self.m), &right);
        let mut pivot = h[0][0];
        for row in &h {
            for e in row {
                if e.norm() > pivot.norm() {
                    pivot = *e;
                }
            }
        }
        let phase = pivot / pivot.norm();
        let real = [
            [(h[0][0] / phase).re, (h[0][1] / phase).re],
            [(h[1][0] / phase).re, (h[1][1] / phase).re],
        ];
        let det = real[0][0] * real[1][1] - real[0][1] * real[1][0];
        let s = det.abs().sqrt();
        [[real[0][0] / s, real[0][1] / s], [real[1][0] / s, real[1][1] / s]]
    }
}

/// True when a real matrix rounds to an integer matrix congruent to the
/// identity modulo 2 (up to overall sign, which is harmless mod 2).
pub fn is_level_two(h: &[[f64; 2]; 2], tol: f64) -> bool {
    let mut ints = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let r = h[i][j].round();
            if (h[i][j] - r).abs() > tol {
                return false;
            }
            ints[i][j] = r as i64;
        }
    }
    ints[0][0].rem_euclid(2) == 1
        && ints[1][1].rem_euclid(2) == 1
        && ints[0][1].rem_euclid(2) == 0
        && ints[1][0].rem_euclid(2) == 0
}

// ---------------------------------------------------------------------------
// Triangles

/// An ideal triangle of the tessellation.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealTriangle {
    pub vertices: [Complex; 3],
    pub labels: [Farey; 3],
    /// Side `k` joins the two vertices other than `k`.
    pub sides: [Geodesic; 3],
    /// Reflection letters `'0'`, `'1'`, `'2'`.
    pub word: String,
    pub depth: usize,
}

impl IdealTriangle {
    fn from_labels(labels: [Farey; 3], word: String, depth: usize) -> Self {
        let vertices = labels.map(|l| l.disc_point());
        let sides = [
            Geodesic::through(vertices[1], vertices[2]),
            Geodesic::through(vertices[0], vertices[2]),
            Geodesic::through(vertices[0], vertices[1]),
        ];
        Self {
            vertices,
            labels,
            sides,
            word,
            depth,
        }
    }

    /// Strict interior membership.
    pub fn contains(&self, z: Complex) -> bool {
        self.violated_side(z).is_none() && z.norm() < 1.0
    }

    /// A side whose geodesic separates `z` from the interior, if any.
    pub fn violated_side(&self, z: Complex) -> Option<usize> {
        (0..3).find(|&k| {
            let inside = self.sides[k].side(self.vertices[k]).signum();
            self.sides[k].side(z) * inside <= 0.0
        })
    }

    /// The group element carrying the base triangle onto this one.
    pub fn map(&self) -> MoebiusMap {
        word_map(&self.word)
    }
}

/// The base triangle with vertices `(1, i, −1)`.
pub fn base_triangle() -> IdealTriangle {
    IdealTriangle::from_labels(
        [Farey::integer(0), Farey::integer(1), Farey::INFINITY],
        String::new(),
        0,
    )
}

/// Reflection across side `side` of `t`.
pub fn reflect(t: &IdealTriangle, side: usize) -> Result<IdealTriangle> {
    if side > 2 {
        return Err(Error::Domain(format!("side index {side} must be 0, 1 or 2")));
    }
    let others: Vec<usize> = (0..3).filter(|&k| k != side).collect();
    let mut labels = t.labels;
    labels[side] = t.labels[side].reflect_across(t.labels[others[0]], t.labels[others[1]]);
    let mut word = t.word.clone();
    if word.ends_with(char::from(b'0' + side as u8)) {
        word.pop();
    } else {
        word.push(char::from(b'0' + side as u8));
    }
    Ok(IdealTriangle::from_labels(labels, word.clone(), word.len()))
}

/// `R_{k₁}∘…∘R_{k_n}` for a word over `'0'..'2'`.
pub fn word_map(word: &str) -> MoebiusMap {
    let base = base_triangle();
    word.bytes().fold(MoebiusMap::identity(), |acc, b| {
        let k = (b - b'0') as usize;
        acc.compose(&base.sides[k].reflection())
    })
}

/// A boundary vertex `z_n` with its exact cusp label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryVertex {
    pub z: Complex,
    pub label: Farey,
}

/// Triangles of word length up to a depth, with their vertices.
#[derive(Debug, Clone)]
pub struct Tessellation {
    pub depth: usize,
    pub triangles: Vec<IdealTriangle>,
    pub vertices: Vec<BoundaryVertex>,
    by_word: HashMap<String, usize>,
    by_label: HashMap<Farey, usize>,
}

/// All triangles with reduced words of length `≤ depth`.
pub fn enumerate(depth: usize) -> Result<Tessellation> {
    if depth > MAX_DEPTH {
        return Err(Error::Size {
            requested: depth,
            max: MAX_DEPTH,
        });
    }
    let base = base_triangle();
    let mut triangles = vec![base];
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for &idx in &frontier {
            let last = triangles[idx].word.bytes().last().map(|b| (b - b'0') as usize);
            for side in 0..3 {
                if Some(side) == last {
                    continue;
                }
                let child = reflect(&triangles[idx], side)?;
                next.push(triangles.len());
                triangles.push(child);
            }
        }
        frontier = next;
    }

    let mut vertices = Vec::new();
    let mut by_label = HashMap::new();
    for t in &triangles {
        for k in 0..3 {
            by_label.entry(t.labels[k]).or_insert_with(|| {
                vertices.push(BoundaryVertex {
                    z: t.vertices[k],
                    label: t.labels[k],
                });
                vertices.len() - 1
            });
        }
    }
    let by_word = triangles.iter().enumerate().map(|(i, t)| (t.word.clone(), i)).collect();
    Ok(Tessellation {
        depth,
        triangles,
        vertices,
        by_word,
        by_label,
    })
}

impl Tessellation {
    pub fn triangle_by_word(&self, word: &str) -> Option<&IdealTriangle> {
        self.by_word.get(word).map(|&i| &self.triangles[i])
    }

    pub fn vertex_index(&self, label: Farey) -> Option<usize> {
        self.by_label.get(&label).copied()
    }

    /// Index of the enumerated triangle containing `z`, by walking the dual
    /// tree from the base triangle.
    pub fn locate(&self, z: Complex) -> Option<usize> {
        if z.norm() >= 1.0 {
            return None;
        }
        let mut current = 0usize;
        // Each step removes one separating geodesic, so the walk is bounded.
        for _ in 0..=4 * MAX_DEPTH + 8 {
            let t = &self.triangles[current];
            match t.violated_side(z) {
                None => return Some(current),
                Some(k) => {
                    let mut word = t.word.clone();
                    let letter = char::from(b'0' + k as u8);
                    if word.ends_with(letter) {
                        word.pop();
                    } else {
                        word.push(letter);
                    }
                    current = *self.by_word.get(&word)?;
                }
            }
        }
        None
    }

    /// Largest angular gap between consecutive enumerated boundary vertices.
    pub fn max_boundary_gap(&self) -> f64 {
        let mut angles: Vec<f64> = self.vertices.iter().map(|v| v.z.arg()).collect();
        angles.sort_by(f64::total_cmp);
        let mut gap: f64 = 0.0;
        for w in angles.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        if let (Some(first), Some(last)) = (angles.first(), angles.last()) {
            gap = gap.max(std::f64::consts::TAU - (last - first));
        }
        gap
    }
}

// ---------------------------------------------------------------------------
// Cusp classification

/// Cusp whose Ford horoball reaches deepest towards `z`, with the depth
/// `Im(gτ)` after the reduction `g` moves that cusp to `∞`. A depth `≥ 1`
/// means `z` lies in the cusp's Ford horoball; those horoballs are disjoint.
pub fn nearest_cusp(z: Complex) -> Option<(Farey, f64)> {
    let tau = cayley(z).finite()?;
    if !(tau.im > 0.0) {
        return None;
    }
    // g = [[a, b], [c, d]] with τ' = gτ.
    let (mut a, mut b, mut c, mut d) = (1i64, 0i64, 0i64, 1i64);
    let mut t = tau;
    for _ in 0..10_000 {
        let n = t.re.round();
        if n != 0.0 {
            let n = n as i64;
            t -= n as f64;
            a -= n * c;
            b -= n * d;
        }
        if t.norm_sqr() < 1.0 - 1e-15 {
            t = -1.0 / t;
            (a, b, c, d) = (-c, -d, a, b);
        } else {
            break;
        }
    }
    Some((Farey::new(-d, c), t.im))
}

/// The enumerated vertex whose Ford horoball contains `z`, if any.
pub fn cusp_classify(tess: &Tessellation, z: Complex) -> Option<usize> {
    let (cusp, depth) = nearest_cusp(z)?;
    if depth >= 1.0 {
        tess.vertex_index(cusp)
    } else {
        None
    }
}
