//! Small 3-vector helpers on `[f64; 3]`.

pub type Vec3 = [f64; 3];

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

pub fn normalize(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    (n > 1e-12).then(|| scale(a, 1.0 / n))
}

/// Angle at `vertex` between `a` and `b`, in degrees. Zero for degenerate input.
pub fn angle_deg(a: Vec3, vertex: Vec3, b: Vec3) -> f64 {
    let u = sub(a, vertex);
    let v = sub(b, vertex);
    let denom = norm(u) * norm(v);
    if denom < 1e-12 {
        return 0.0;
    }
    (dot(u, v) / denom).clamp(-1.0, 1.0).acos().to_degrees()
}

pub fn centroid(points: &[Vec3]) -> Vec3 {
    let mut c = [0.0; 3];
    for p in points {
        c = add(c, *p);
    }
    scale(c, 1.0 / points.len().max(1) as f64)
}

/// Unit normal of a roughly planar ring: mean of consecutive cross products.
pub fn ring_normal(points: &[Vec3]) -> Option<Vec3> {
    let c = centroid(points);
    let n = points.len();
    let mut acc = [0.0; 3];
    for i in 0..n {
        let a = sub(points[i], c);
        let b = sub(points[(i + 1) % n], c);
        acc = add(acc, cross(a, b));
    }
    normalize(acc)
}

/// Rotation about an arbitrary unit axis (Rodrigues), then translation.
pub fn rigid_transform(p: Vec3, axis: Vec3, angle: f64, shift: Vec3) -> Vec3 {
    let k = normalize(axis).unwrap_or([0.0, 0.0, 1.0]);
    let (s, c) = angle.sin_cos();
    let kxp = cross(k, p);
    let kdp = dot(k, p);
    let rotated = [
        p[0] * c + kxp[0] * s + k[0] * kdp * (1.0 - c),
        p[1] * c + kxp[1] * s + k[1] * kdp * (1.0 - c),
        p[2] * c + kxp[2] * s + k[2] * kdp * (1.0 - c),
    ];
    add(rotated, shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_angle() {
        let a = angle_deg([1.0, 0.0, 0.0], [0.0; 3], [0.0, 1.0, 0.0]);
        assert!((a - 90.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_distance() {
        let p = [1.0, 2.0, 3.0];
        let q = [-0.5, 0.3, 2.0];
        let axis = [0.3, -1.0, 0.2];
        let d0 = dist(p, q);
        let d1 = dist(
            rigid_transform(p, axis, 1.1, [4.0, 0.0, -2.0]),
            rigid_transform(q, axis, 1.1, [4.0, 0.0, -2.0]),
        );
        assert!((d0 - d1).abs() < 1e-12);
    }
}
