//! Integral automorphism group of a ternary form.

use super::TernaryForm;

/// An integral isometry `U` with `Uᵀ G U = G`, stored by columns: column `i`
/// is the image of the basis vector `e_i`.
pub type Isometry = [[i64; 3]; 3];

/// Images of `e_i` must have norm `G_ii / 2` and pairwise Gram products
/// `G_ij`; search those candidates exhaustively.
pub(super) fn automorphisms(form: &TernaryForm) -> Vec<Isometry> {
    let g = form.gram();
    let e = form.enumerator();
    let cand: Vec<Vec<[i64; 3]>> =
        (0..3).map(|i| e.vectors_of_norm((g[i][i] / 2) as u64)).collect();
    let mut out = Vec::new();
    for &u0 in &cand[0] {
        for &u1 in &cand[1] {
            if form.gram_product(u0, u1) != g[0][1] {
                continue;
            }
            for &u2 in &cand[2] {
                if form.gram_product(u0, u2) == g[0][2] && form.gram_product(u1, u2) == g[1][2] {
                    out.push([u0, u1, u2]);
                }
            }
        }
    }
    out
}

/// Some `U` with `Uᵀ G_to U = G_from`, i.e. an isometry from `from` onto `to`.
pub(super) fn isometry(from: &TernaryForm, to: &TernaryForm) -> Option<Isometry> {
    if from.gram_determinant() != to.gram_determinant() {
        return None;
    }
    let g = from.gram();
    let e = to.enumerator();
    let cand: Vec<Vec<[i64; 3]>> =
        (0..3).map(|i| e.vectors_of_norm((g[i][i] / 2) as u64)).collect();
    for &u0 in &cand[0] {
        for &u1 in &cand[1] {
            if to.gram_product(u0, u1) != g[0][1] {
                continue;
            }
            for &u2 in &cand[2] {
                if to.gram_product(u0, u2) == g[0][2] && to.gram_product(u1, u2) == g[1][2] {
                    return Some([u0, u1, u2]);
                }
            }
        }
    }
    None
}

/// `U · v` for `U` stored by columns.
pub fn apply(u: &Isometry, v: [i64; 3]) -> [i64; 3] {
    let mut w = [0i64; 3];
    for (i, col) in u.iter().enumerate() {
        for r in 0..3 {
            w[r] += col[r] * v[i];
        }
    }
    w
}

/// `U · V`.
pub fn compose(u: &Isometry, v: &Isometry) -> Isometry {
    [apply(u, v[0]), apply(u, v[1]), apply(u, v[2])]
}
