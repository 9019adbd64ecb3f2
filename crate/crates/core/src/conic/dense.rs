//! Dense complex kernels backed by faer, on nalgebra storage.

use faer::linalg::matmul::matmul;
use faer::linalg::triangular_inverse::invert_lower_triangular;
use faer::{Accum, MatMut, MatRef, Par, Side};
use nalgebra::DMatrix;

use crate::model::C64;

fn view(m: &DMatrix<C64>) -> MatRef<'_, C64> {
    MatRef::from_column_major_slice(m.as_slice(), m.nrows(), m.ncols())
}

fn view_mut(m: &mut DMatrix<C64>) -> MatMut<'_, C64> {
    let (r, c) = m.shape();
    MatMut::from_column_major_slice_mut(m.as_mut_slice(), r, c)
}

/// `a b`.
pub(crate) fn mul(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(a.nrows(), b.ncols());
    matmul(view_mut(&mut out), Accum::Replace, view(a), view(b), C64::new(1.0, 0.0), Par::Seq);
    out
}

/// `a b c`.
pub(crate) fn mul3(a: &DMatrix<C64>, b: &DMatrix<C64>, c: &DMatrix<C64>) -> DMatrix<C64> {
    mul(&mul(a, b), c)
}

/// `l m lᴴ`.
pub(crate) fn congruence(l: &DMatrix<C64>, m: &DMatrix<C64>) -> DMatrix<C64> {
    let t = mul(l, m);
    let mut out = DMatrix::zeros(l.nrows(), l.nrows());
    matmul(view_mut(&mut out), Accum::Replace, view(&t), view(l).adjoint(), C64::new(1.0, 0.0), Par::Seq);
    out
}

/// Inverse Cholesky factor `L⁻¹` of a Hermitian positive definite matrix.
pub(crate) fn inverse_cholesky_factor(m: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let llt = view(m).llt(Side::Lower).ok()?;
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    invert_lower_triangular(view_mut(&mut out), llt.L(), Par::Seq);
    Some(out)
}

/// `m⁻¹ = L⁻ᴴ L⁻¹` from the inverse factor.
pub(crate) fn inverse_from_factor(li: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(li.nrows(), li.ncols());
    matmul(view_mut(&mut out), Accum::Replace, view(li).adjoint(), view(li), C64::new(1.0, 0.0), Par::Seq);
    out
}
