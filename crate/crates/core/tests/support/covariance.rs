#![allow(dead_code)]

//! Covariance eigendecomposition by cyclic Jacobi rotations, used as an
//! oracle for PCA. Shares no code with the library's SVD route.

/// Eigenpairs of a symmetric matrix, eigenvalues descending, eigenvectors as rows.
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = a.len();
    let mut v: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..d).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-32 * scale {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| a[y][y].total_cmp(&a[x][x]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..d).map(|r| v[r][i]).collect())
        .collect();
    (values, vectors)
}

pub fn flip_to_convention(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub struct Oracle {
    pub variance: Vec<f64>,
    pub coords: Vec<Vec<f64>>,
    pub total_variance: f64,
}

pub fn oracle(rows: &[Vec<f64>], k: usize) -> Oracle {
    let n = rows.len();
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();
    let cov: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| centered.iter().map(|r| r[i] * r[j]).sum::<f64>() / (n as f64 - 1.0))
                .collect()
        })
        .collect();
    let total_variance = (0..d).map(|i| cov[i][i]).sum();
    let (values, mut vectors) = jacobi_eigen(cov);
    vectors.iter_mut().for_each(|v| flip_to_convention(v));
    let coords = centered
        .iter()
        .map(|r| {
            vectors[..k]
                .iter()
                .map(|v| r.iter().zip(v).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    Oracle {
        variance: values[..k].to_vec(),
        coords,
        total_variance,
    }
}
