//! Exact sparse row reduction over the session field, with combination
//! tracking so every solve returns a certificate.
//!
//! Vectors are sparse maps from a column index to a scalar. The
//! [`MonomialIndexer`] assigns column indices to canonical monomials so
//! algebra elements become rows; the [`EchelonBasis`] keeps an incrementally
//! built echelon form whose rows remember how they combine the inserted
//! inputs.

use std::collections::BTreeMap;

use crate::element::{Element, Monomial};
use crate::scalar::{FieldSpec, Scalar};

pub type SparseVec = BTreeMap<usize, Scalar>;

/// Assigns stable column indices to monomials in first-seen order.
#[derive(Debug, Default)]
pub struct MonomialIndexer {
    index: BTreeMap<Monomial, usize>,
}

impl MonomialIndexer {
    pub fn new() -> Self {
        Self::default()
    }

    /// An indexer whose columns follow the monomial order of the elements'
    /// joint support — canonical for any spanning family of a subspace.
    pub fn canonical_for<'a>(elements: impl Iterator<Item = &'a Element>) -> Self {
        let support: std::collections::BTreeSet<Monomial> =
            elements.flat_map(|el| el.terms().map(|(m, _)| m.clone())).collect();
        let mut out = Self::new();
        for m in &support {
            out.column(m);
        }
        out
    }

    pub fn column(&mut self, m: &Monomial) -> usize {
        let next = self.index.len();
        *self.index.entry(m.clone()).or_insert(next)
    }

    pub fn vectorize(&mut self, el: &Element) -> SparseVec {
        el.terms().map(|(m, c)| (self.column(m), c.clone())).collect()
    }

    /// Rebuilds an element from a sparse vector (columns must come from this
    /// indexer).
    pub fn elementize(&self, v: &SparseVec, like: &Element) -> Element {
        let mut out = Element::zero(like.graph().clone(), like.field());
        let by_col: BTreeMap<usize, &Monomial> =
            self.index.iter().map(|(m, &c)| (c, m)).collect();
        for (col, coeff) in v {
            let m = by_col[col];
            out = out
                .add(&Element::from_monomial(like.graph().clone(), like.field(), m.clone(), coeff.clone()))
                .expect("same context");
        }
        out
    }
}

fn vec_axpy(target: &mut SparseVec, k: &Scalar, src: &SparseVec) {
    if k.is_zero() {
        return;
    }
    for (col, v) in src {
        let newval = match target.get(col) {
            Some(old) => old.add(&k.mul(v)),
            None => k.mul(v),
        };
        if newval.is_zero() {
            target.remove(col);
        } else {
            target.insert(*col, newval);
        }
    }
}

/// Incremental echelon form with combination tracking: each stored row is a
/// linear combination of the inserted inputs, and reducing a target vector
/// yields the coefficients expressing it over those inputs.
#[derive(Debug)]
pub struct EchelonBasis {
    field: FieldSpec,
    /// Rows in echelon form, pivot coefficient 1, keyed by pivot column.
    rows: BTreeMap<usize, SparseVec>,
    /// For each pivot column, the combination of input indices giving the row.
    combos: BTreeMap<usize, SparseVec>,
    inserted: usize,
}

impl EchelonBasis {
    pub fn new(field: FieldSpec) -> Self {
        EchelonBasis { field, rows: BTreeMap::new(), combos: BTreeMap::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduces `v` against the basis. Returns the remainder and the
    /// combination of inputs subtracted: `v = remainder + sum combo_i * input_i`.
    fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut rem = v.clone();
        let mut combo: SparseVec = SparseVec::new();
        loop {
            let hit = rem.keys().find(|col| self.rows.contains_key(col)).copied();
            let Some(col) = hit else { break };
            let k = rem[&col].clone();
            let row = &self.rows[&col];
            let row_combo = &self.combos[&col];
            vec_axpy(&mut rem, &k.neg(), row);
            vec_axpy(&mut combo, &k, row_combo);
        }
        (rem, combo)
    }

    /// Inserts a vector as input number `inserted()`. Returns true if it
    /// enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let my_index = self.inserted;
        self.inserted += 1;
        let (mut rem, combo) = self.reduce(&v);
        let Some((&pivot, lead)) = rem.iter().next() else {
            return false;
        };
        let inv = lead.inv();
        // row = (v - sum combo_i input_i) / lead
        let mut row = SparseVec::new();
        vec_axpy(&mut row, &inv, &rem);
        let mut row_combo = SparseVec::new();
        row_combo.insert(my_index, inv.clone());
        vec_axpy(&mut row_combo, &inv.neg(), &combo);
        rem.clear();
        self.rows.insert(pivot, row);
        self.combos.insert(pivot, row_combo);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Expresses `v` over the inserted inputs, if it lies in the span.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        let (rem, combo) = self.reduce(v);
        if rem.is_empty() {
            Some(combo)
        } else {
            None
        }
    }

    /// The unique reduced row echelon basis of the span, sorted by pivot.
    pub fn rref_rows(&self) -> Vec<SparseVec> {
        let pivots: Vec<usize> = self.rows.keys().copied().collect();
        let mut out: Vec<SparseVec> = Vec::with_capacity(pivots.len());
        // eliminate later pivots from earlier rows, working bottom-up
        let mut reduced: BTreeMap<usize, SparseVec> = self.rows.clone();
        for &p in pivots.iter().rev() {
            let row = reduced[&p].clone();
            let others: Vec<usize> = pivots.iter().copied().filter(|&q| q < p).collect();
            for q in others {
                let target = reduced.get_mut(&q).unwrap();
                if let Some(k) = target.get(&p).cloned() {
                    vec_axpy(target, &k.neg(), &row);
                }
            }
        }
        for p in pivots {
            out.push(reduced[&p].clone());
        }
        out
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }
}

/// Convenience: builds an echelon basis from elements, sharing an indexer.
pub fn echelon_from_elements(
    indexer: &mut MonomialIndexer,
    field: FieldSpec,
    elements: &[Element],
) -> EchelonBasis {
    let mut basis = EchelonBasis::new(field);
    for el in elements {
        basis.insert(indexer.vectorize(el));
    }
    basis
}

/// Solves `sum c_i columns_i = target` exactly; `Some(coefficients)` is a
/// verified certificate (one coefficient per column, zeros included).
pub fn solve_combination(
    field: FieldSpec,
    columns: &[SparseVec],
    target: &SparseVec,
) -> Option<Vec<Scalar>> {
    let mut basis = EchelonBasis::new(field);
    for col in columns {
        basis.insert(col.clone());
    }
    let combo = basis.express(target)?;
    let mut out = vec![field.zero(); columns.len()];
    for (i, c) in combo {
        out[i] = c;
    }
    // verify the certificate
    let mut acc = SparseVec::new();
    for (c, col) in out.iter().zip(columns) {
        vec_axpy(&mut acc, c, col);
    }
    let mut diff = acc;
    vec_axpy(&mut diff, &field.one().neg(), target);
    assert!(diff.is_empty(), "solver certificate failed verification");
    Some(out)
}

/// True iff the two element families span the same subspace.
pub fn same_span(field: FieldSpec, a: &[Element], b: &[Element]) -> bool {
    let mut indexer = MonomialIndexer::new();
    let va: Vec<SparseVec> = a.iter().map(|el| indexer.vectorize(el)).collect();
    let vb: Vec<SparseVec> = b.iter().map(|el| indexer.vectorize(el)).collect();
    let mut ba = EchelonBasis::new(field);
    let mut bb = EchelonBasis::new(field);
    for v in &va {
        ba.insert(v.clone());
    }
    for v in &vb {
        bb.insert(v.clone());
    }
    va.iter().all(|v| bb.contains(v)) && vb.iter().all(|v| ba.contains(v))
}
