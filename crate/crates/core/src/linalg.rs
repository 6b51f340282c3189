//! Symmetric tridiagonal eigensolvers plus the small dense helpers used by
//! the design and projection code.
//!
//! Both workhorses of this crate are symmetric tridiagonal: the Fock-space
//! chain Hamiltonian (a few tens of sites) and the finite-difference
//! discretization of the transverse mode operator (thousands of grid
//! points). Full decompositions use the implicit-shift QL iteration; when
//! only the lowest part of the spectrum is wanted (bound modes), Sturm
//! bisection plus inverse iteration is much cheaper.

/// Symmetric tridiagonal matrix: `diag` of length `n`, `offdiag` of length
/// `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty matrix");
        assert_eq!(offdiag.len() + 1, diag.len(), "offdiag must have n-1 entries");
        Self { diag, offdiag }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// y = T x
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.offdiag[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// Full spectral decomposition by implicit-shift QL. Returns the
    /// eigenvalues in ascending order together with the matching
    /// orthonormal eigenvectors (`vectors[k]` belongs to `values[k]`).
    pub fn eigh(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.n();
        let mut d = self.diag.clone();
        let mut e = self.offdiag.clone();
        e.push(0.0);
        // Identity to accumulate rotations into; z[i][k] is component i of vector k.
        let mut z = vec![vec![0.0; n]; n];
        for (i, row) in z.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        ql_implicit(&mut d, &mut e, Some(&mut z));

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        let values: Vec<f64> = order.iter().map(|&k| d[k]).collect();
        let vectors: Vec<Vec<f64>> = order
            .iter()
            .map(|&k| (0..n).map(|i| z[i][k]).collect())
            .collect();
        (values, vectors)
    }

    /// All eigenvalues (ascending) without eigenvectors.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut d = self.diag.clone();
        let mut e = self.offdiag.clone();
        e.push(0.0);
        ql_implicit(&mut d, &mut e, None);
        d.sort_by(f64::total_cmp);
        d
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.n();
        // Keeps the LDL^T pivot recurrence away from exact zero.
        let pivmin = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..n {
            let sub = if i > 0 {
                let e = self.offdiag[i - 1];
                e * e / q
            } else {
                0.0
            };
            q = self.diag[i] - x - sub;
            if q < 0.0 {
                count += 1;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
        }
        count
    }

    /// The `k` smallest eigenvalues (ascending) by bisection on the Sturm
    /// count. Robust for clustered pairs such as supermode doublets.
    pub fn smallest_eigenvalues(&self, k: usize) -> Vec<f64> {
        assert!(k >= 1 && k <= self.n());
        let (mut glo, mut ghi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..self.n() {
            let mut r = 0.0;
            if i > 0 {
                r += self.offdiag[i - 1].abs();
            }
            if i + 1 < self.n() {
                r += self.offdiag[i].abs();
            }
            glo = glo.min(self.diag[i] - r);
            ghi = ghi.max(self.diag[i] + r);
        }
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            // j-th eigenvalue = inf { x : count_below(x) >= j + 1 }
            let (mut lo, mut hi) = (glo, ghi);
            for _ in 0..160 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.count_below(mid) >= j + 1 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        out
    }

    /// Eigenvector for an isolated eigenvalue by inverse iteration,
    /// normalized to unit Euclidean norm. Intended for well-separated
    /// eigenvalues (fundamental bound modes); clustered eigenvalues may mix.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.n();
        let scale = self
            .diag
            .iter()
            .chain(self.offdiag.iter())
            .fold(0.0f64, |m, &v| m.max(v.abs()))
            .max(1.0);
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..4 {
            v = self.solve_shifted(lambda, &v, scale);
            let norm = l2_norm(&v);
            if norm == 0.0 || !norm.is_finite() {
                // Retry direction orthogonal to the all-ones start.
                v = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
                let m = l2_norm(&v);
                v.iter_mut().for_each(|x| *x /= m);
                continue;
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    /// Solve (T - lambda I) x = b by Gaussian elimination with partial
    /// pivoting on the bands; pivoting introduces one fill-in band `a2`.
    fn solve_shifted(&self, lambda: f64, b: &[f64], scale: f64) -> Vec<f64> {
        let n = self.n();
        let eps = f64::EPSILON * scale;
        let guard = |p: f64| if p.abs() < eps { eps.copysign(p) } else { p };

        // Row i carries (a0, a1, a2) at columns (i, i+1, i+2).
        let mut a0: Vec<f64> = self.diag.iter().map(|&d| d - lambda).collect();
        let mut a1 = self.offdiag.clone();
        a1.push(0.0);
        let mut a2 = vec![0.0; n];
        let mut rhs = b.to_vec();

        for i in 0..n - 1 {
            let below = self.offdiag[i];
            if below.abs() > a0[i].abs() {
                // Swap rows i and i+1, then eliminate.
                let (r0, r1, r2, rr) = (a0[i], a1[i], a2[i], rhs[i]);
                a0[i] = below;
                a1[i] = a0[i + 1];
                a2[i] = a1[i + 1];
                rhs[i] = rhs[i + 1];
                let m = r0 / guard(a0[i]);
                a0[i + 1] = r1 - m * a1[i];
                a1[i + 1] = r2 - m * a2[i];
                rhs[i + 1] = rr - m * rhs[i];
            } else {
                let m = below / guard(a0[i]);
                a0[i + 1] -= m * a1[i];
                a1[i + 1] -= m * a2[i];
                rhs[i + 1] -= m * rhs[i];
            }
        }

        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = rhs[i];
            if i + 1 < n {
                v -= a1[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= a2[i] * x[i + 2];
            }
            x[i] = v / guard(a0[i]);
        }
        x
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Implicit-shift QL iteration on (d, e); e has length n with e[n-1] used as
/// workspace. When `z` is given, rotations are accumulated into its columns.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<Vec<f64>>>) {
    let n = d.len();
    if n == 1 {
        return;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible subdiagonal element.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for row in z.iter_mut() {
                        f = row[i + 1];
                        row[i + 1] = s * row[i] + c * f;
                        row[i] = c * row[i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Eigendecomposition of a small dense symmetric matrix by cyclic Jacobi
/// rotations. Returns ascending eigenvalues and matching orthonormal
/// eigenvectors. Used for the overlap matrices in modal projection; sizes
/// there are (N+1) x (N+1).
pub fn jacobi_eigh(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() < 1e-14 * frobenius(&m).max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[x][x].total_cmp(&m[y][y]));
    let values: Vec<f64> = order.iter().map(|&k| m[k][k]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i][k]).collect())
        .collect();
    (values, vectors)
}

fn frobenius(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Solve the dense least-squares problem `A x = b` (rows >= cols) via normal
/// equations with partial-pivot Gaussian elimination. Sizes here are tiny
/// (design refinement systems), where the normal equations are adequate.
pub fn solve_least_squares(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let rows = a.len();
    let cols = a[0].len();
    assert_eq!(rows, b.len());
    let mut ata = vec![vec![0.0; cols]; cols];
    let mut atb = vec![0.0; cols];
    for r in 0..rows {
        for i in 0..cols {
            atb[i] += a[r][i] * b[r];
            for j in 0..cols {
                ata[i][j] += a[r][i] * a[r][j];
            }
        }
    }
    solve_dense(&mut ata, &mut atb);
    atb
}

/// In-place dense solve by Gaussian elimination with partial pivoting.
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        assert!(p.abs() > 0.0, "singular system");
        for row in col + 1..n {
            let m = a[row][col] / p;
            if m == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= m * a[col][k];
            }
            b[row] -= m * b[col];
        }
    }
    for row in (0..n).rev() {
        let mut v = b[row];
        for k in row + 1..n {
            v -= a[row][k] * b[k];
        }
        b[row] = v / a[row][row];
    }
}
