//! Factored products `A x` and `A^T y` for `A = A_hat + U M^-1 V^T`.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::sparse::{CscMatrix, CsrMatrix};
use crate::sparsify::Sparsification;

/// Scratch space for one product; length `k` of the owning sparsification.
#[derive(Clone, Debug)]
pub struct GradientWorkspace {
    inner: Vec<f64>,
}

impl GradientWorkspace {
    pub fn new(s: &Sparsification) -> Self {
        GradientWorkspace { inner: vec![0.0; s.k()] }
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }
}

/// Solves `M z = y` in place by forward substitution.
pub fn solve_lower_unit_in_place(m: &CscMatrix, y: &mut [f64]) -> Result<()> {
    check_square(m, y.len())?;
    for j in 0..m.ncols() {
        let zj = y[j];
        let mut diag = false;
        for (i, v) in m.col(j) {
            if i > j {
                y[i] -= v * zj;
            } else if i == j && v == 1.0 {
                diag = true;
            } else {
                return Err(Error::Contract(format!("M is not unit lower triangular at ({i}, {j})")));
            }
        }
        if !diag {
            return Err(Error::Contract(format!("M[{j},{j}] is not 1")));
        }
    }
    Ok(())
}

/// Solves `M^T s = t` in place by backward substitution over columns of `M`.
pub fn solve_upper_unit_transpose_in_place(m: &CscMatrix, t: &mut [f64]) -> Result<()> {
    check_square(m, t.len())?;
    for j in (0..m.ncols()).rev() {
        let mut acc = t[j];
        let mut diag = false;
        for (i, v) in m.col(j) {
            if i > j {
                acc -= v * t[i];
            } else if i == j && v == 1.0 {
                diag = true;
            } else {
                return Err(Error::Contract(format!("M is not unit lower triangular at ({i}, {j})")));
            }
        }
        if !diag {
            return Err(Error::Contract(format!("M[{j},{j}] is not 1")));
        }
        t[j] = acc;
    }
    Ok(())
}

fn check_square(m: &CscMatrix, n: usize) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} triangular system with right-hand side of {n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

pub fn solve_lower_unit(m: &CscMatrix, y: &[f64]) -> Result<Vec<f64>> {
    let mut z = y.to_vec();
    solve_lower_unit_in_place(m, &mut z)?;
    Ok(z)
}

/// Multiply-add count of one product: two per stored off-diagonal entry.
pub fn flops_per_product(s: &Sparsification) -> u64 {
    let size = s.size();
    2 * (size.a_hat + size.u + size.v + size.m - s.k()) as u64
}

/// Product operator over a shared sparsification.
///
/// Keeps row-major copies of the transposed factors so both directions
/// run as row dot products, which makes the parallel path deterministic.
#[derive(Debug)]
pub struct Engine<'a> {
    s: &'a Sparsification,
    a_hat_t: CsrMatrix,
    u_t: CscMatrix,
    v_rows: CsrMatrix,
    parallel: bool,
    flops: AtomicU64,
}

impl<'a> Engine<'a> {
    pub fn new(s: &'a Sparsification) -> Self {
        Engine {
            s,
            a_hat_t: s.a_hat().transpose(),
            u_t: s.u().to_csc(),
            v_rows: s.v().to_csr(),
            parallel: false,
            flops: AtomicU64::new(0),
        }
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn sparsification(&self) -> &Sparsification {
        self.s
    }

    pub fn workspace(&self) -> GradientWorkspace {
        GradientWorkspace::new(self.s)
    }

    pub fn flops(&self) -> u64 {
        self.flops.load(Ordering::Relaxed)
    }

    pub fn reset_flops(&self) {
        self.flops.store(0, Ordering::Relaxed);
    }

    fn check(&self, input: usize, expect_in: usize, out: usize, expect_out: usize, ws: &GradientWorkspace) -> Result<()> {
        if input != expect_in || out != expect_out || ws.len() != self.s.k() {
            return Err(Error::DimensionMismatch(format!(
                "product with input {input} (expected {expect_in}), output {out} (expected {expect_out}), workspace {} (expected {})",
                ws.len(),
                self.s.k()
            )));
        }
        Ok(())
    }

    /// `out = A x`.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64], ws: &mut GradientWorkspace) -> Result<()> {
        let s = self.s;
        self.check(x.len(), s.ncols(), out.len(), s.nrows(), ws)?;
        let y = &mut ws.inner;
        y.fill(0.0);
        out.fill(0.0);
        if self.parallel {
            s.v().par_tr_mul_vec_add(x, y)?;
        } else {
            s.v().tr_mul_vec_add(x, y)?;
        }
        if !s.m_is_identity() {
            solve_lower_unit_in_place(s.m(), y)?;
        }
        if self.parallel {
            s.a_hat().par_mul_vec_add(x, out)?;
            s.u().par_mul_vec_add(y, out)?;
        } else {
            s.a_hat().mul_vec_add(x, out)?;
            s.u().mul_vec_add(y, out)?;
        }
        self.flops.fetch_add(flops_per_product(s), Ordering::Relaxed);
        Ok(())
    }

    /// `out = A^T y`.
    pub fn matvec_transpose_into(&self, y: &[f64], out: &mut [f64], ws: &mut GradientWorkspace) -> Result<()> {
        let s = self.s;
        self.check(y.len(), s.nrows(), out.len(), s.ncols(), ws)?;
        let t = &mut ws.inner;
        t.fill(0.0);
        out.fill(0.0);
        if self.parallel {
            self.u_t.par_tr_mul_vec_add(y, t)?;
        } else {
            self.u_t.tr_mul_vec_add(y, t)?;
        }
        if !s.m_is_identity() {
            solve_upper_unit_transpose_in_place(s.m(), t)?;
        }
        if self.parallel {
            self.a_hat_t.par_mul_vec_add(y, out)?;
            self.v_rows.par_mul_vec_add(t, out)?;
        } else {
            self.a_hat_t.mul_vec_add(y, out)?;
            self.v_rows.mul_vec_add(t, out)?;
        }
        self.flops.fetch_add(flops_per_product(s), Ordering::Relaxed);
        Ok(())
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.s.nrows()];
        self.matvec_into(x, &mut out, &mut self.workspace())?;
        Ok(out)
    }

    pub fn matvec_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.s.ncols()];
        self.matvec_transpose_into(y, &mut out, &mut self.workspace())?;
        Ok(out)
    }
}

/// `A x` without a reusable engine.
pub fn matvec(s: &Sparsification, x: &[f64]) -> Result<Vec<f64>> {
    Engine::new(s).matvec(x)
}

/// `A^T y` without a reusable engine.
pub fn matvec_transpose(s: &Sparsification, y: &[f64]) -> Result<Vec<f64>> {
    Engine::new(s).matvec_transpose(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::Triplets;
    use crate::sparsify::difference_matrix;

    #[test]
    fn identity_solve_is_noop() {
        let m = CsrMatrix::identity(4).to_csc();
        let z = solve_lower_unit(&m, &[1.0, -2.0, 3.0, 0.5]).unwrap();
        assert_eq!(z, vec![1.0, -2.0, 3.0, 0.5]);
    }

    #[test]
    fn bidiagonal_solve_gives_prefix_sums() {
        let m = difference_matrix(3).to_csc();
        assert_eq!(solve_lower_unit(&m, &[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn transpose_solve_gives_suffix_sums() {
        let m = difference_matrix(3).to_csc();
        let mut t = vec![1.0, 1.0, 1.0];
        solve_upper_unit_transpose_in_place(&m, &mut t).unwrap();
        assert_eq!(t, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn non_unit_diagonal_is_a_contract_error() {
        let mut t = Triplets::new(2, 2);
        t.push(0, 0, 1.0);
        t.push(1, 1, 2.0);
        let err = solve_lower_unit(&t.to_csc(), &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn upper_entry_is_a_contract_error() {
        let mut t = Triplets::new(2, 2);
        t.push(0, 0, 1.0);
        t.push(1, 1, 1.0);
        t.push(0, 1, 0.5);
        assert!(solve_lower_unit(&t.to_csc(), &[1.0, 1.0]).is_err());
    }

    #[test]
    fn wrong_rhs_length_is_a_dimension_error() {
        let m = CsrMatrix::identity(3).to_csc();
        assert!(matches!(solve_lower_unit(&m, &[1.0]), Err(Error::DimensionMismatch(_))));
    }
}
