//! The nine real three-dimensional Lie algebras: structure constants,
//! faithful matrix representations, and a matrix-exponential oracle used
//! for cross-checks of the closed-form group elements.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("matrix_exp: non-finite entry in input")]
    NonFinite,
    #[error("invalid algebra parameter: {0}")]
    Parameter(String),
}

/// The nine classes A3,1..A3,9, in the basis (e1, e2, e3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupId {
    A31,
    A32,
    A33,
    A34,
    A35,
    A36,
    A37,
    A38,
    A39,
}

impl GroupId {
    pub const ALL: [GroupId; 9] = [
        GroupId::A31,
        GroupId::A32,
        GroupId::A33,
        GroupId::A34,
        GroupId::A35,
        GroupId::A36,
        GroupId::A37,
        GroupId::A38,
        GroupId::A39,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GroupId::A31 => "A3_1",
            GroupId::A32 => "A3_2",
            GroupId::A33 => "A3_3",
            GroupId::A34 => "A3_4",
            GroupId::A35 => "A3_5",
            GroupId::A36 => "A3_6",
            GroupId::A37 => "A3_7",
            GroupId::A38 => "A3_8",
            GroupId::A39 => "A3_9",
        }
    }

    pub fn parse(s: &str) -> Option<GroupId> {
        GroupId::ALL.iter().copied().find(|g| g.name() == s)
    }
}

pub type Mat3 = [[f64; 3]; 3];

pub const MAT3_ZERO: Mat3 = [[0.0; 3]; 3];
pub const MAT3_ID: Mat3 = [
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
];

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = MAT3_ZERO;
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                s += a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    }
    c
}

fn mat_add(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = MAT3_ZERO;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][j] + b[i][j];
        }
    }
    c
}

fn mat_scale(a: &Mat3, s: f64) -> Mat3 {
    let mut c = MAT3_ZERO;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][j] * s;
        }
    }
    c
}

pub fn mat_max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

fn mat_inf_norm(a: &Mat3) -> f64 {
    let mut n: f64 = 0.0;
    for row in a {
        n = n.max(row.iter().map(|x| x.abs()).sum());
    }
    n
}

/// Structure constants c\[i]\[j]\[k] with \[e_i, e_j] = sum_k c\[i]\[j]\[k] e_k
/// (indices 0-based internally, (e1,e2,e3) order).
#[derive(Debug, Clone, Copy)]
pub struct StructureConstants {
    pub c: [[[f64; 3]; 3]; 3],
}

impl StructureConstants {
    fn from_brackets(brackets: &[(usize, usize, [f64; 3])]) -> Self {
        let mut c = [[[0.0; 3]; 3]; 3];
        for &(i, j, v) in brackets {
            for k in 0..3 {
                c[i][j][k] = v[k];
                c[j][i][k] = -v[k];
            }
        }
        StructureConstants { c }
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    r = r.max((self.c[i][j][k] + self.c[j][i][k]).abs());
                }
            }
        }
        r
    }

    pub fn jacobi_residual(&self) -> f64 {
        let c = &self.c;
        let mut r: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let mut s = 0.0;
                        for m in 0..3 {
                            s += c[i][j][m] * c[m][k][l]
                                + c[j][k][m] * c[m][i][l]
                                + c[k][i][m] * c[m][j][l];
                        }
                        r = r.max(s.abs());
                    }
                }
            }
        }
        r
    }
}

/// Bracket of two coefficient triples: returns sum_{i,j} a_i b_j c\[i]\[j]\[.].
pub fn algebra_bracket(a: [f64; 3], b: [f64; 3], sc: &StructureConstants) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            if a[i] == 0.0 || b[j] == 0.0 {
                continue;
            }
            for k in 0..3 {
                out[k] += a[i] * b[j] * sc.c[i][j][k];
            }
        }
    }
    out
}

/// Faithful matrix representation.  `dim` is 2 for A3,8 (stored in the
/// top-left block of a 3x3 array) and 3 otherwise.
#[derive(Debug, Clone, Copy)]
pub struct MatrixRep {
    pub mats: [Mat3; 3],
    pub dim: usize,
}

/// Homomorphism residual: rho(e_i)rho(e_j) - rho(e_j)rho(e_i) vs the bracket.
pub fn rep_residual(rep: &MatrixRep, sc: &StructureConstants) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let comm = {
                let ab = mat_mul(&rep.mats[i], &rep.mats[j]);
                let ba = mat_mul(&rep.mats[j], &rep.mats[i]);
                let mut m = MAT3_ZERO;
                for p in 0..3 {
                    for q in 0..3 {
                        m[p][q] = ab[p][q] - ba[p][q];
                    }
                }
                m
            };
            let mut want = MAT3_ZERO;
            for k in 0..3 {
                want = mat_add(&want, &mat_scale(&rep.mats[k], sc.c[i][j][k]));
            }
            r = r.max(mat_max_abs_diff(&comm, &want));
        }
    }
    r
}

/// True iff the homomorphism invariant holds with residual <= 1e-14 per entry.
pub fn check_rep(rep: &MatrixRep, sc: &StructureConstants) -> bool {
    rep_residual(rep, sc) <= 1e-14
}

/// exp(m) by scaling-and-squaring with a truncated series.  Oracle only:
/// production paths use the closed-form group elements.
pub fn matrix_exp(m: &Mat3, tol: f64) -> Result<Mat3, AlgebraError> {
    for row in m {
        for x in row {
            if !x.is_finite() {
                return Err(AlgebraError::NonFinite);
            }
        }
    }
    let norm = mat_inf_norm(m);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let t = mat_scale(m, 0.5f64.powi(s as i32));

    let mut acc = MAT3_ID;
    let mut term = MAT3_ID;
    let mut k = 1.0;
    loop {
        term = mat_scale(&mat_mul(&term, &t), 1.0 / k);
        acc = mat_add(&acc, &term);
        if mat_inf_norm(&term) < tol * 1e-3 || k > 40.0 {
            break;
        }
        k += 1.0;
    }
    for _ in 0..s {
        acc = mat_mul(&acc, &acc);
    }
    Ok(acc)
}

fn e(i: usize, j: usize) -> Mat3 {
    let mut m = MAT3_ZERO;
    m[i][j] = 1.0;
    m
}

fn diag(a: f64, b: f64, c: f64) -> Mat3 {
    let mut m = MAT3_ZERO;
    m[0][0] = a;
    m[1][1] = b;
    m[2][2] = c;
    m
}

/// Structure constants of the algebra.  `rho` is the A3,5 label
/// (0 < |rho| < 1) and `mu` the A3,7 label (mu > 0); both are ignored by
/// the other algebras.
pub fn structure_constants(id: GroupId, rho: f64, mu: f64) -> StructureConstants {
    use GroupId::*;
    match id {
        A31 => StructureConstants::from_brackets(&[(1, 2, [1.0, 0.0, 0.0])]),
        A32 => StructureConstants::from_brackets(&[
            (0, 2, [1.0, 0.0, 0.0]),
            (1, 2, [1.0, 1.0, 0.0]),
        ]),
        A33 => StructureConstants::from_brackets(&[
            (0, 2, [1.0, 0.0, 0.0]),
            (1, 2, [0.0, 1.0, 0.0]),
        ]),
        A34 => StructureConstants::from_brackets(&[
            (0, 2, [1.0, 0.0, 0.0]),
            (1, 2, [0.0, -1.0, 0.0]),
        ]),
        A35 => StructureConstants::from_brackets(&[
            (0, 2, [1.0, 0.0, 0.0]),
            (1, 2, [0.0, rho, 0.0]),
        ]),
        A36 => StructureConstants::from_brackets(&[
            (0, 2, [0.0, -1.0, 0.0]),
            (1, 2, [1.0, 0.0, 0.0]),
        ]),
        A37 => StructureConstants::from_brackets(&[
            (0, 2, [mu, -1.0, 0.0]),
            (1, 2, [1.0, mu, 0.0]),
        ]),
        A38 => StructureConstants::from_brackets(&[
            (0, 2, [0.0, -2.0, 0.0]),
            (0, 1, [1.0, 0.0, 0.0]),
            (1, 2, [0.0, 0.0, 1.0]),
        ]),
        A39 => StructureConstants::from_brackets(&[
            (0, 1, [0.0, 0.0, 1.0]),
            (1, 2, [1.0, 0.0, 0.0]),
            (2, 0, [0.0, 1.0, 0.0]),
        ]),
    }
}

pub fn matrix_rep(id: GroupId, rho: f64, mu: f64) -> MatrixRep {
    use GroupId::*;
    match id {
        A31 => MatrixRep {
            mats: [e(0, 2), e(0, 1), e(1, 2)],
            dim: 3,
        },
        A32 => MatrixRep {
            mats: [
                e(0, 2),
                mat_add(&e(0, 2), &e(1, 2)),
                [[-1.0, -1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]],
            ],
            dim: 3,
        },
        A33 => MatrixRep {
            mats: [e(0, 2), e(1, 2), diag(-1.0, -1.0, 0.0)],
            dim: 3,
        },
        A34 => MatrixRep {
            mats: [e(0, 2), mat_scale(&e(1, 2), -1.0), diag(-1.0, 1.0, 0.0)],
            dim: 3,
        },
        A35 => MatrixRep {
            mats: [e(0, 2), mat_scale(&e(1, 2), rho), diag(-1.0, -rho, 0.0)],
            dim: 3,
        },
        A36 => MatrixRep {
            mats: [
                mat_scale(&e(1, 2), -1.0),
                e(0, 2),
                [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
            ],
            dim: 3,
        },
        A37 => MatrixRep {
            mats: [
                [[0.0, 0.0, mu], [0.0, 0.0, -1.0], [0.0, 0.0, 0.0]],
                [[0.0, 0.0, 1.0], [0.0, 0.0, mu], [0.0, 0.0, 0.0]],
                [[-mu, -1.0, 0.0], [1.0, -mu, 0.0], [0.0, 0.0, 0.0]],
            ],
            dim: 3,
        },
        A38 => MatrixRep {
            mats: [e(1, 0), diag(0.5, -0.5, 0.0), e(0, 1)],
            dim: 2,
        },
        A39 => MatrixRep {
            mats: [
                [[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
                [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
                [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
            ],
            dim: 3,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_nine_algebras_satisfy_antisymmetry_and_jacobi_exactly() {
        for id in GroupId::ALL {
            let sc = structure_constants(id, 0.5, 1.0);
            assert_eq!(sc.antisymmetry_residual(), 0.0, "{}", id.name());
            assert_eq!(sc.jacobi_residual(), 0.0, "{}", id.name());
        }
        // also at non-default labels
        let sc = structure_constants(GroupId::A35, -0.7, 1.0);
        assert_eq!(sc.jacobi_residual(), 0.0);
        let sc = structure_constants(GroupId::A37, 0.5, 2.3);
        assert_eq!(sc.jacobi_residual(), 0.0);
    }

    #[test]
    fn all_nine_reps_pass_check_rep() {
        for id in GroupId::ALL {
            let sc = structure_constants(id, 0.5, 1.0);
            let rep = matrix_rep(id, 0.5, 1.0);
            assert!(check_rep(&rep, &sc), "{}", id.name());
        }
    }

    #[test]
    fn bracket_anchors() {
        // A3,2: [e2, e3] = e1 + e2
        let sc = structure_constants(GroupId::A32, 0.5, 1.0);
        assert_eq!(
            algebra_bracket([0.0, 1.0, 0.0], [0.0, 0.0, 1.0], &sc),
            [1.0, 1.0, 0.0]
        );
        // [e1, e1] = 0 in any algebra
        assert_eq!(
            algebra_bracket([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], &sc),
            [0.0, 0.0, 0.0]
        );
        // A3,9: [e3, e1] = e2
        let sc9 = structure_constants(GroupId::A39, 0.5, 1.0);
        assert_eq!(
            algebra_bracket([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], &sc9),
            [0.0, 1.0, 0.0]
        );
    }

    #[test]
    fn broken_rep_fails_check() {
        let sc = structure_constants(GroupId::A32, 0.5, 1.0);
        let mut rep = matrix_rep(GroupId::A32, 0.5, 1.0);
        rep.mats[2] = MAT3_ZERO;
        assert!(!check_rep(&rep, &sc));
    }

    #[test]
    fn matrix_exp_anchors() {
        // zero -> identity
        let ex = matrix_exp(&MAT3_ZERO, 1e-14).unwrap();
        assert_eq!(mat_max_abs_diff(&ex, &MAT3_ID), 0.0);

        // x * rho(e3) for A3,3 with x = 1 -> diag(1/e, 1/e, 1)
        let rep = matrix_rep(GroupId::A33, 0.5, 1.0);
        let ex = matrix_exp(&rep.mats[2], 1e-14).unwrap();
        let want = diag((-1.0f64).exp(), (-1.0f64).exp(), 1.0);
        assert!(mat_max_abs_diff(&ex, &want) < 1e-14);

        // nilpotent rho(e1) of A3,1 with coefficient 2 -> I + 2 rho(e1) exactly
        let rep = matrix_rep(GroupId::A31, 0.5, 1.0);
        let ex = matrix_exp(&mat_scale(&rep.mats[0], 2.0), 1e-14).unwrap();
        let want = mat_add(&MAT3_ID, &mat_scale(&rep.mats[0], 2.0));
        assert_eq!(mat_max_abs_diff(&ex, &want), 0.0);

        assert!(matrix_exp(&[[f64::NAN; 3]; 3], 1e-12).is_err());
    }
}
