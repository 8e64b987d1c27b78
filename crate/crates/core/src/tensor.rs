//! Small dense rank-3 and rank-4 tensors.
//!
//! Boundary dimensions stay tiny (at most 4 tangent directions plus the
//! dependent axis), so everything is a flat `Vec<f64>` with row-major
//! indexing and no sparsity.

/// Dense rank-3 tensor over a single dimension `n` per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.n + j) * self.n + k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Maximum deviation from full symmetry under index permutation.
    pub fn max_symmetry_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    for &(a, b, c) in &[(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        worst = worst.max((v - self.get(a, b, c)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Replace each entry by the average over all six index permutations,
    /// accumulated in a canonical order so the result is bit-exactly
    /// symmetric.
    pub fn symmetrize(&mut self) {
        let n = self.n;
        let mut out = Tensor3::zeros(n);
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let s = self.get(i, j, k)
                        + self.get(i, k, j)
                        + self.get(j, i, k)
                        + self.get(j, k, i)
                        + self.get(k, i, j)
                        + self.get(k, j, i);
                    let v = s / 6.0;
                    out.set(i, j, k, v);
                    out.set(i, k, j, v);
                    out.set(j, i, k, v);
                    out.set(j, k, i, v);
                    out.set(k, i, j, v);
                    out.set(k, j, i, v);
                }
            }
        }
        *self = out;
    }
}

/// Dense rank-4 tensor over a single dimension `n` per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, i: usize, k: usize) -> f64 {
        self.data[((a * self.n + b) * self.n + i) * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, i: usize, k: usize, v: f64) {
        self.data[((a * self.n + b) * self.n + i) * self.n + k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Sign of the permutation `perm` of `0..n`, or 0 if entries repeat.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return 0;
        }
        seen[p] = true;
    }
    let mut sign = 1i32;
    for i in 0..n {
        for j in (i + 1)..n {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// All permutations of `0..n` with their signs.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    let mut items: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    permute(&mut items, 0, &mut out);
    out
}

fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<(Vec<usize>, i32)>) {
    if k == items.len() {
        let sign = permutation_sign(items);
        out.push((items.clone(), sign));
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}
