//! Dense exact linear algebra over a field, with subspaces stored as row bases.

use crate::arith::scalar::Scalar;

pub type Mat<K> = Vec<Vec<K>>;

/// Reduced row echelon form and pivot columns.
pub fn rref<K: Scalar>(m: &[Vec<K>], ncols: usize) -> (Mat<K>, Vec<usize>) {
    let mut a: Mat<K> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(pr) = (r..a.len()).find(|&i| !a[i][c].vanishes()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = a[r][c].inverse().expect("nonzero pivot over a field");
        for x in a[r].iter_mut() {
            *x = x.times(&inv);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].vanishes() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                *x = x.minus(&f.times(y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank<K: Scalar>(m: &[Vec<K>], ncols: usize) -> usize {
    rref(m, ncols).1.len()
}

/// Basis of `{x : m x = 0}` in `K^ncols`.
pub fn kernel<K: Scalar>(m: &[Vec<K>], ncols: usize, zero: &K) -> Mat<K> {
    let (r, pivots) = rref(m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![zero.zero_like(); ncols];
            v[f] = zero.one_like();
            for (row, &pc) in r.iter().zip(pivots.iter()) {
                v[pc] = row[f].negated();
            }
            v
        })
        .collect()
}

/// Row-reduced basis of the span of `vs`.
pub fn span<K: Scalar>(vs: &[Vec<K>], n: usize) -> Mat<K> {
    rref(vs, n).0
}

pub fn subspace_sum<K: Scalar>(a: &[Vec<K>], b: &[Vec<K>], n: usize) -> Mat<K> {
    let mut all = a.to_vec();
    all.extend(b.iter().cloned());
    span(&all, n)
}

pub fn subspace_intersection<K: Scalar>(a: &[Vec<K>], b: &[Vec<K>], n: usize, zero: &K) -> Mat<K> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // solve sum x_i a_i = sum y_j b_j
    let (ka, kb) = (a.len(), b.len());
    let m: Mat<K> = (0..n)
        .map(|c| {
            let mut row: Vec<K> = a.iter().map(|v| v[c].clone()).collect();
            row.extend(b.iter().map(|v| v[c].negated()));
            row
        })
        .collect();
    let ker = kernel(&m, ka + kb, zero);
    let vs: Mat<K> = ker
        .iter()
        .map(|x| {
            let mut v = vec![zero.zero_like(); n];
            for (xi, ai) in x.iter().take(ka).zip(a.iter()) {
                for (vc, ac) in v.iter_mut().zip(ai.iter()) {
                    *vc = vc.plus(&xi.times(ac));
                }
            }
            v
        })
        .collect();
    span(&vs, n)
}

/// Whether the row bases span the same subspace.
pub fn same_subspace<K: Scalar>(a: &[Vec<K>], b: &[Vec<K>], n: usize) -> bool {
    span(a, n) == span(b, n)
}

pub fn contains<K: Scalar>(basis: &[Vec<K>], v: &[K], n: usize) -> bool {
    let r = rank(basis, n);
    let mut all = basis.to_vec();
    all.push(v.to_vec());
    rank(&all, n) == r
}

pub fn mat_vec<K: Scalar>(m: &[Vec<K>], v: &[K], zero: &K) -> Vec<K> {
    m.iter()
        .map(|row| {
            row.iter().zip(v.iter()).fold(zero.zero_like(), |acc, (a, b)| acc.plus(&a.times(b)))
        })
        .collect()
}

pub fn transpose<K: Scalar>(m: &[Vec<K>], ncols: usize) -> Mat<K> {
    (0..ncols).map(|c| m.iter().map(|row| row[c].clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fp::Fp;

    fn f(p: u64, v: &[i64]) -> Vec<Fp> {
        v.iter().map(|&x| Fp::new(p, x)).collect()
    }

    #[test]
    fn rank_nullity() {
        let m = vec![f(5, &[1, 2, 3]), f(5, &[2, 4, 6])];
        assert_eq!(rank(&m, 3), 1);
        let k = kernel(&m, 3, &Fp::zero(5));
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&m, v, &Fp::zero(5)).iter().all(|x| x.vanishes()));
        }
    }

    #[test]
    fn intersection_of_coordinate_planes() {
        let a = vec![f(3, &[1, 0, 0]), f(3, &[0, 1, 0])];
        let b = vec![f(3, &[0, 1, 0]), f(3, &[0, 0, 1])];
        let i = subspace_intersection(&a, &b, 3, &Fp::zero(3));
        assert_eq!(i, vec![f(3, &[0, 1, 0])]);
        assert_eq!(subspace_sum(&a, &b, 3).len(), 3);
    }
}
