//! Fixed-size linear algebra helpers.

pub type Mat2 = [[f64; 2]; 2];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

pub fn mat2_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

/// Frobenius norm.
pub fn mat2_norm(a: &Mat2) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// 2×2 adjugate: `[[a,b],[c,d]] ↦ [[d,−b],[−c,a]]`.
pub fn adj2(a: &Mat2) -> Mat2 {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub fn commutator2(a: &Mat2, b: &Mat2) -> Mat2 {
    mat2_sub(&mat2_mul(a, b), &mat2_mul(b, a))
}

pub fn inv2(a: &Mat2) -> Option<Mat2> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let j = adj2(a);
    Some([[j[0][0] / det, j[0][1] / det], [j[1][0] / det, j[1][1] / det]])
}

/// Eigen-decomposition of a symmetric 2×2 matrix. Eigenvalues are returned in
/// decreasing order; `vectors[k]` is the unit eigenvector of `values[k]`.
pub fn sym2_eigen(a: &Mat2) -> ([f64; 2], [[f64; 2]; 2]) {
    let (p, q, r) = (a[0][0], 0.5 * (a[0][1] + a[1][0]), a[1][1]);
    let mean = 0.5 * (p + r);
    let half = 0.5 * (p - r);
    let rad = half.hypot(q);
    // rotation angle of the principal axis; atan2 keeps this stable when q → 0
    let phi = 0.5 * q.atan2(half);
    let (s, c) = phi.sin_cos();
    ([mean + rad, mean - rad], [[c, s], [-s, c]])
}

/// Flips `v` if it points away from `reference`.
pub fn align_sign<const N: usize>(v: [f64; N], reference: &[f64; N]) -> [f64; N] {
    let d: f64 = v.iter().zip(reference).map(|(a, b)| a * b).sum();
    if d < 0.0 {
        v.map(|c| -c)
    } else {
        v
    }
}

pub fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}
