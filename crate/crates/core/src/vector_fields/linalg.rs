//! Exact linear algebra over Q(α) on sparse keyed vectors.

use std::collections::BTreeMap;

use crate::expr::AlphaRatio;

pub type SparseVec<K> = BTreeMap<K, AlphaRatio>;

fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &AlphaRatio, x: &SparseVec<K>) {
    for (k, xv) in x {
        let d = a * xv;
        match y.get_mut(k) {
            Some(yv) => {
                *yv = &*yv + &d;
                if yv.is_zero() {
                    y.remove(k);
                }
            }
            None => {
                if !d.is_zero() {
                    y.insert(k.clone(), d);
                }
            }
        }
    }
}

fn axpy_dense(y: &mut [AlphaRatio], a: &AlphaRatio, x: &[AlphaRatio]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi = &*yi + &(a * xi);
        }
    }
}

struct Row<K> {
    pivot: K,
    vec: SparseVec<K>,
    /// coefficients expressing `vec` in the original vectors
    transform: Vec<AlphaRatio>,
}

/// Fully reduced row-echelon form of a list of vectors, keeping track of
/// how each echelon row combines the inputs.
pub struct SpanSolver<K> {
    len: usize,
    rows: Vec<Row<K>>,
}

impl<K: Ord + Clone> SpanSolver<K> {
    pub fn new(vectors: &[SparseVec<K>]) -> Self {
        let len = vectors.len();
        let mut rows: Vec<Row<K>> = Vec::new();
        for (k, v) in vectors.iter().enumerate() {
            let mut vec = v.clone();
            let mut transform = vec![AlphaRatio::zero(); len];
            transform[k] = AlphaRatio::one();
            for r in &rows {
                if let Some(c) = vec.get(&r.pivot).cloned() {
                    let m = -&c;
                    axpy(&mut vec, &m, &r.vec);
                    axpy_dense(&mut transform, &m, &r.transform);
                }
            }
            let Some((pivot, lead)) = vec.iter().next().map(|(k, v)| (k.clone(), v.clone())) else {
                continue;
            };
            let inv = lead.recip();
            for val in vec.values_mut() {
                *val = &*val * &inv;
            }
            for t in transform.iter_mut() {
                *t = &*t * &inv;
            }
            for r in rows.iter_mut() {
                if let Some(c) = r.vec.get(&pivot).cloned() {
                    let m = -&c;
                    axpy(&mut r.vec, &m, &vec);
                    axpy_dense(&mut r.transform, &m, &transform);
                }
            }
            rows.push(Row {
                pivot,
                vec,
                transform,
            });
        }
        SpanSolver { len, rows }
    }

    /// Echelon basis of the span.
    pub fn echelon_rows(&self) -> Vec<SparseVec<K>> {
        self.rows.iter().map(|r| r.vec.clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Coefficients `λ` with `Σ λ_k v_k = f`, or `None` outside the span.
    /// Dependent inputs get coefficient zero.
    pub fn solve(&self, f: &SparseVec<K>) -> Option<Vec<AlphaRatio>> {
        let mut v = f.clone();
        let mut lambda = vec![AlphaRatio::zero(); self.len];
        for r in &self.rows {
            if let Some(c) = v.get(&r.pivot).cloned() {
                axpy(&mut v, &-&c, &r.vec);
                axpy_dense(&mut lambda, &c, &r.transform);
            }
        }
        v.is_empty().then_some(lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, AlphaPoly};

    fn r(n: i128) -> AlphaRatio {
        AlphaRatio::from_rational(int(n))
    }

    #[test]
    fn solves_and_detects_outside() {
        let v1: SparseVec<u8> = [(0, r(1)), (1, r(1))].into_iter().collect();
        let v2: SparseVec<u8> = [(1, AlphaRatio::from_poly(AlphaPoly::alpha()))].into_iter().collect();
        let s = SpanSolver::new(&[v1.clone(), v2.clone(), v1.clone()]);
        assert_eq!(s.rank(), 2);
        // 2 v1 + 3 v2
        let f: SparseVec<u8> = [
            (0, r(2)),
            (1, &r(2) + &AlphaRatio::from_poly(AlphaPoly::alpha().scale(&int(3)))),
        ]
        .into_iter()
        .collect();
        let lam = s.solve(&f).unwrap();
        assert_eq!(lam, vec![r(2), r(3), r(0)]);
        let g: SparseVec<u8> = [(2, r(1))].into_iter().collect();
        assert!(s.solve(&g).is_none());
    }
}
