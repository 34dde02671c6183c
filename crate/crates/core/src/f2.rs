//! F2 matrices and reduced row echelon form with transform tracking.
//!
//! The decoder leans on three RREF-derived structures: the reduced check
//! matrix together with the row-operation record `J` (so measured syndromes
//! can be mapped into the reduced basis), and the logical-generator matrix
//! reduced first against the check matrix (recorded in `J_A`) and then
//! against itself (recorded in `J_L`). Elimination order is fixed
//! (leftmost pivot, topmost row) so that coset leaders are reproducible
//! across runs and parallel workers.

use crate::bits::Bits;
use crate::error::{Error, Result};

/// Dense F2 matrix, one packed bit row per matrix row.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Bits>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinaryMatrix {
            rows,
            cols,
            data: vec![Bits::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].set(i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<Bits>) -> Self {
        let cols = rows.first().map_or(0, Bits::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        BinaryMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Rows given as 0/1 slices; test fixture convenience.
    pub fn from_dense(rows: &[&[u8]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| Bits::from_bools(&r.iter().map(|&b| b != 0).collect::<Vec<_>>()))
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &Bits {
        &self.data[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i].set(j, v);
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &Bits> {
        self.data.iter()
    }

    pub fn rank(&self) -> usize {
        rref(self).pivots.len()
    }

    /// XOR of the rows selected by `selector` (length `rows`).
    pub fn combine_rows(&self, selector: &Bits) -> Bits {
        assert_eq!(selector.len(), self.rows);
        let mut out = Bits::zeros(self.cols);
        for i in selector.iter_ones() {
            out.xor_assign(&self.data[i]);
        }
        out
    }

    /// True iff the matrix is in reduced row echelon form.
    pub fn is_rref(&self) -> bool {
        let mut last_pivot: Option<usize> = None;
        let mut seen_zero_row = false;
        for i in 0..self.rows {
            match self.data[i].iter_ones().next() {
                None => seen_zero_row = true,
                Some(p) => {
                    if seen_zero_row || last_pivot.is_some_and(|lp| p <= lp) {
                        return false;
                    }
                    if (0..self.rows).any(|r| r != i && self.get(r, p)) {
                        return false;
                    }
                    last_pivot = Some(p);
                }
            }
        }
        true
    }
}

/// Output of [`rref`]: the reduced matrix, the square transform with
/// `transform * original == rre`, and the pivot columns in increasing order.
#[derive(Clone, Debug)]
pub struct RrefResult {
    pub rre: BinaryMatrix,
    pub transform: BinaryMatrix,
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form by deterministic Gauss-Jordan elimination:
/// columns scanned left to right, pivot taken from the topmost unused row.
pub fn rref(m: &BinaryMatrix) -> RrefResult {
    let mut rre = m.clone();
    let mut transform = BinaryMatrix::identity(m.rows);
    let mut pivots = Vec::new();
    let mut rank = 0;

    for col in 0..m.cols {
        let Some(pivot_row) = (rank..m.rows).find(|&r| rre.get(r, col)) else {
            continue;
        };
        rre.data.swap(rank, pivot_row);
        transform.data.swap(rank, pivot_row);
        for r in 0..m.rows {
            if r != rank && rre.get(r, col) {
                let (src, dst) = split_rows(&mut rre.data, rank, r);
                dst.xor_assign(src);
                let (src, dst) = split_rows(&mut transform.data, rank, r);
                dst.xor_assign(src);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == m.rows {
            break;
        }
    }

    RrefResult { rre, transform, pivots }
}

fn split_rows(data: &mut [Bits], src: usize, dst: usize) -> (&Bits, &mut Bits) {
    assert_ne!(src, dst);
    if src < dst {
        let (a, b) = data.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = data.split_at_mut(src);
        (&b[0], &mut a[dst])
    }
}

/// Result of the two-stage reduction of a lower block against an upper block
/// already in RREF: `lower_rre = j_l * (lower + j_a * upper)` over F2.
#[derive(Clone, Debug)]
pub struct ConstrainedRref {
    pub lower_rre: BinaryMatrix,
    /// Which upper rows were folded into each lower row (lower.rows x upper.rows).
    pub j_a: BinaryMatrix,
    /// Row operations applied among the lower rows (square).
    pub j_l: BinaryMatrix,
    pub pivots: Vec<usize>,
}

/// Reduce `lower` by the rows of `upper` (clearing the upper pivot columns),
/// then bring the result to RREF using only its own rows. `upper` is left
/// untouched: its rows may not be simplified by lower rows, because in the
/// stabilizer setting that would turn stabilizers into logicals.
pub fn constrained_rref(upper: &BinaryMatrix, lower: &BinaryMatrix) -> Result<ConstrainedRref> {
    if upper.cols != lower.cols {
        return Err(Error::Dimension(format!(
            "column mismatch: {} vs {}",
            upper.cols, lower.cols
        )));
    }
    if !upper.is_rref() {
        return Err(Error::Precondition(
            "constrained_rref requires the upper block in RREF".into(),
        ));
    }

    let upper_pivots: Vec<(usize, usize)> = rref(upper)
        .pivots
        .into_iter()
        .enumerate()
        .collect();

    let mut reduced = lower.clone();
    let mut j_a = BinaryMatrix::zeros(lower.rows, upper.rows);
    for i in 0..lower.rows {
        for &(upper_row, col) in &upper_pivots {
            if reduced.get(i, col) {
                reduced.data[i].xor_assign(upper.row(upper_row));
                j_a.set(i, upper_row, true);
            }
        }
    }

    let self_reduced = rref(&reduced);
    Ok(ConstrainedRref {
        lower_rre: self_reduced.rre,
        j_a,
        j_l: self_reduced.transform,
        pivots: self_reduced.pivots,
    })
}

/// F2 matrix-vector product. With `transposed` the result is `v * m^T`
/// (entry i is the dot of `v` with row i); otherwise `v * m` (the XOR of the
/// rows selected by the set bits of `v`).
pub fn matvec(v: &Bits, m: &BinaryMatrix, transposed: bool) -> Result<Bits> {
    if transposed {
        if v.len() != m.cols {
            return Err(Error::Dimension(format!(
                "matvec: vector length {} vs {} columns",
                v.len(),
                m.cols
            )));
        }
        let mut out = Bits::zeros(m.rows);
        for i in 0..m.rows {
            if v.dot(&m.data[i]) {
                out.set(i, true);
            }
        }
        Ok(out)
    } else {
        if v.len() != m.rows {
            return Err(Error::Dimension(format!(
                "matvec: vector length {} vs {} rows",
                v.len(),
                m.rows
            )));
        }
        Ok(m.combine_rows(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> BinaryMatrix {
        let data = (0..rows)
            .map(|_| Bits::from_bools(&(0..cols).map(|_| rng.gen()).collect::<Vec<_>>()))
            .collect();
        BinaryMatrix::from_rows(data)
    }

    /// Textbook forward elimination followed by back substitution; kept
    /// independent of the production single-pass routine.
    fn naive_rref(m: &BinaryMatrix) -> (BinaryMatrix, usize) {
        let mut rows: Vec<Vec<bool>> = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
            .collect();
        let (nr, nc) = (m.rows(), m.cols());
        let mut rank = 0;
        for col in 0..nc {
            if let Some(p) = (rank..nr).find(|&r| rows[r][col]) {
                rows.swap(rank, p);
                for r in rank + 1..nr {
                    if rows[r][col] {
                        let pivot = rows[rank].clone();
                        for (a, b) in rows[r].iter_mut().zip(pivot) {
                            *a ^= b;
                        }
                    }
                }
                rank += 1;
            }
        }
        for r in (0..rank).rev() {
            let col = rows[r].iter().position(|&b| b).unwrap();
            for above in 0..r {
                if rows[above][col] {
                    let pivot = rows[r].clone();
                    for (a, b) in rows[above].iter_mut().zip(pivot) {
                        *a ^= b;
                    }
                }
            }
        }
        let out = BinaryMatrix::from_rows(
            rows.into_iter().map(|r| Bits::from_bools(&r)).collect(),
        );
        (out, rank)
    }

    #[test]
    fn identity_is_its_own_rref() {
        let m = BinaryMatrix::identity(3);
        let r = rref(&m);
        assert_eq!(r.rre, m);
        assert_eq!(r.transform, BinaryMatrix::identity(3));
        assert_eq!(r.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn already_reduced_matrix_is_unchanged() {
        let m = BinaryMatrix::from_dense(&[&[1, 1, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 1]]);
        // Not RREF as a whole (col 1 has two ones); the augmented stabilizer
        // + logical matrix only needs blockwise reduction. Its pure-A block:
        let a = BinaryMatrix::from_dense(&[&[1, 1, 0, 0]]);
        let r = rref(&a);
        assert_eq!(r.rre, a);
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn matches_naive_elimination_on_random_matrices() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 4, 8);
            let fast = rref(&m);
            let (slow, rank) = naive_rref(&m);
            assert_eq!(fast.rre, slow);
            assert_eq!(fast.pivots.len(), rank);
            // transform * original == rre
            for i in 0..m.rows() {
                let combined = m.combine_rows(fast.transform.row(i));
                assert_eq!(&combined, fast.rre.row(i));
            }
        }
    }

    #[test]
    fn rref_idempotent_and_transform_invertible() {
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 5, 7);
            let r = rref(&m);
            let again = rref(&r.rre);
            assert_eq!(again.rre, r.rre);
            assert_eq!(r.transform.rank(), m.rows());
        }
    }

    #[test]
    fn zero_matrix_yields_empty_pivots() {
        let r = rref(&BinaryMatrix::zeros(3, 5));
        assert!(r.pivots.is_empty());
        assert_eq!(r.rre, BinaryMatrix::zeros(3, 5));
    }

    #[test]
    fn constrained_rref_leaves_reduced_lower_unchanged() {
        // The worked two-qubit code: L is already reduced against A.
        let upper = BinaryMatrix::from_dense(&[&[1, 1, 0, 0]]);
        let lower = BinaryMatrix::from_dense(&[&[0, 1, 0, 0], &[0, 0, 1, 1]]);
        let c = constrained_rref(&upper, &lower).unwrap();
        assert_eq!(c.lower_rre, lower);
        assert_eq!(c.j_a, BinaryMatrix::zeros(2, 1));
        assert_eq!(c.j_l, BinaryMatrix::identity(2));
        assert_eq!(c.pivots, vec![1, 2]);
    }

    #[test]
    fn constrained_rref_clears_upper_pivot_columns() {
        let upper = rref(&BinaryMatrix::from_dense(&[
            &[1, 0, 1, 0, 1],
            &[0, 1, 1, 0, 0],
        ]))
        .rre;
        let lower = BinaryMatrix::from_dense(&[&[1, 1, 0, 1, 0], &[1, 0, 1, 1, 1]]);
        let c = constrained_rref(&upper, &lower).unwrap();
        for row in c.lower_rre.iter_rows() {
            assert!(!row.get(0) && !row.get(1));
            assert!(!row.is_zero(), "reduced lower row collapsed to zero");
        }
        // lower_rre == j_l * (lower + j_a * upper)
        for i in 0..lower.rows() {
            let mut folded = lower.row(i).clone();
            for u in c.j_a.row(i).iter_ones() {
                folded.xor_assign(upper.row(u));
            }
            let mut rebuilt = Bits::zeros(lower.cols());
            for li in c.j_l.row(i).iter_ones() {
                let mut term = lower.row(li).clone();
                for u in c.j_a.row(li).iter_ones() {
                    term.xor_assign(upper.row(u));
                }
                rebuilt.xor_assign(&term);
            }
            assert_eq!(&rebuilt, c.lower_rre.row(i));
            let _ = folded;
        }
    }

    #[test]
    fn constrained_rref_rejects_unreduced_upper() {
        let upper = BinaryMatrix::from_dense(&[&[1, 1], &[1, 0]]);
        let lower = BinaryMatrix::from_dense(&[&[0, 1]]);
        assert!(matches!(
            constrained_rref(&upper, &lower),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn matvec_transposed_is_row_dots() {
        let a = BinaryMatrix::from_dense(&[&[1, 1, 0, 0]]);
        // bin(Z1, [Z|X]) paired against [X|Z] rows is the symplectic product.
        let v = Bits::from_bools(&[true, false, false, false]);
        let s = matvec(&v, &a, true).unwrap();
        assert_eq!(format!("{s:?}"), "1");

        let zero = Bits::zeros(4);
        assert!(matvec(&zero, &a, true).unwrap().is_zero());
    }

    #[test]
    fn matvec_dimension_errors() {
        let a = BinaryMatrix::zeros(2, 4);
        assert!(matvec(&Bits::zeros(3), &a, true).is_err());
        assert!(matvec(&Bits::zeros(3), &a, false).is_err());
    }
}
