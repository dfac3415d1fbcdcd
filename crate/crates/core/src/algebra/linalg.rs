//! Dense linear algebra over a finite field.

use alloc::vec;
use alloc::vec::Vec;

use super::field::FiniteField;

/// Rank of a list of row vectors.
pub fn rank<F: FiniteField>(field: &F, rows: &[Vec<F::Elem>]) -> usize {
    let mut basis = Echelon::new(field);
    rows.iter().filter(|r| basis.insert((*r).clone())).count()
}

/// An incrementally built row-echelon basis.
pub struct Echelon<'a, F: FiniteField> {
    field: &'a F,
    rows: Vec<(usize, Vec<F::Elem>)>,
}

impl<'a, F: FiniteField> Echelon<'a, F> {
    pub fn new(field: &'a F) -> Self {
        Echelon { field, rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Inserts `v`; returns whether it was independent of the basis.
    pub fn insert(&mut self, mut v: Vec<F::Elem>) -> bool {
        let f = self.field;
        for (piv, row) in &self.rows {
            let c = v[*piv].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (x, y) in v.iter_mut().zip(row) {
                *x = f.sub(x, &f.mul(&c, y));
            }
        }
        match v.iter().position(|x| !f.is_zero(x)) {
            None => false,
            Some(piv) => {
                let inv = f.inv(&v[piv]).unwrap();
                v.iter_mut().for_each(|x| *x = f.mul(x, &inv));
                self.rows.push((piv, v));
                true
            }
        }
    }
}

/// Pivot, reduced vector and the combination of inputs producing it.
type ReducedRow<F> = (usize, Vec<<F as FiniteField>::Elem>, Vec<<F as FiniteField>::Elem>);

/// Finds the first linear dependence in a sequence `v_0, v_1, ...` of
/// vectors of length `dim`, returning `c` with `v_k = sum_{i<k} c_i v_i`.
///
/// This is the minimal polynomial `z^k - sum c_i z^i` when `v_i` are the
/// coordinates of successive powers of an algebra element.
pub fn krylov_relation<F: FiniteField>(
    field: &F,
    dim: usize,
    mut next: impl FnMut() -> Vec<F::Elem>,
) -> Vec<F::Elem> {
    // Each stored row carries its reduced vector and the combination of
    // original vectors that produced it.
    let mut rows: Vec<ReducedRow<F>> = Vec::new();
    for k in 0..=dim {
        let mut v = next();
        debug_assert_eq!(v.len(), dim);
        let mut comb = vec![field.zero(); k + 1];
        comb[k] = field.one();
        for (piv, row, rc) in &rows {
            let c = v[*piv].clone();
            if field.is_zero(&c) {
                continue;
            }
            for (x, y) in v.iter_mut().zip(row) {
                *x = field.sub(x, &field.mul(&c, y));
            }
            for (x, y) in comb.iter_mut().zip(rc) {
                *x = field.sub(x, &field.mul(&c, y));
            }
        }
        match v.iter().position(|x| !field.is_zero(x)) {
            None => {
                // sum comb_i v_i = 0 with comb_k = 1.
                comb.pop();
                return comb.iter().map(|c| field.neg(c)).collect();
            }
            Some(piv) => {
                let inv = field.inv(&v[piv]).unwrap();
                v.iter_mut().for_each(|x| *x = field.mul(x, &inv));
                comb.iter_mut().for_each(|x| *x = field.mul(x, &inv));
                rows.push((piv, v, comb));
            }
        }
    }
    unreachable!("dim + 1 vectors in a dim-dimensional space are dependent")
}
