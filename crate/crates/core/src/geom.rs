//! Small fixed-size vector helpers shared by the chart and integration code.

pub type Vec3 = [f64; 3];

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn axpy(a: Vec3, s: f64, b: Vec3) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

pub fn normalize(a: Vec3) -> Vec3 {
    let n = norm(a);
    if n == 0.0 {
        a
    } else {
        scale(a, 1.0 / n)
    }
}

pub fn midpoint(a: Vec3, b: Vec3) -> Vec3 {
    scale(add(a, b), 0.5)
}

pub fn centroid(p: &[Vec3; 3]) -> Vec3 {
    scale(add(add(p[0], p[1]), p[2]), 1.0 / 3.0)
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    dist(p, axpy(a, t, ab))
}

/// Signed doubled area of the planar triangle (xy components only).
#[inline]
pub fn orient2d(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Barycentric coordinates of `p` in a planar triangle.
pub fn barycentric2d(p: Vec3, t: &[Vec3; 3]) -> [f64; 3] {
    let area = orient2d(t[0], t[1], t[2]);
    let l0 = orient2d(p, t[1], t[2]) / area;
    let l1 = orient2d(t[0], p, t[2]) / area;
    [l0, l1, 1.0 - l0 - l1]
}

/// Distance from a planar point to a planar triangle region (zero inside).
pub fn triangle_distance2d(p: Vec3, t: &[Vec3; 3]) -> f64 {
    let b = barycentric2d(p, t);
    if b.iter().all(|&x| x >= 0.0) {
        return 0.0;
    }
    segment_distance(p, t[0], t[1]).min(segment_distance(p, t[1], t[2])).min(segment_distance(p, t[2], t[0]))
}
