//! Coordinate charts, matrix group elements, multiplication, coproducts and
//! invariant vector fields for the nine groups.
//!
//! Conventions used throughout:
//! * lower coordinates are stored as `[z, y, x]`, the exponential coordinates
//!   of the second kind in `M = exp(z e1) exp(y e2) exp(x e3)`, so that
//!   `lower[i]` is dual to `e_{i+1}`;
//! * "upper" coordinates are the capital-letter coordinate functions of the
//!   chart (3 of them, or 4 plus one constraint for A3,6 / A3,7 / A3,8);
//! * "free" coordinates are an unconstrained 3-parameter chart used for all
//!   differentiation: the upper coordinates themselves when there is no
//!   constraint, `(x, Y, Z)` for A3,6 / A3,7 and `(X, Y, Z)` with
//!   `W = (1 + XZ)/Y` for A3,8.

use crate::algebra::{
    matrix_rep, structure_constants, AlgebraError, GroupId, Mat3, MatrixRep, StructureConstants,
};
use crate::jet::{con, Jet, Real};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("{group}: out of chart: {constraint}")]
    OutOfChart {
        group: &'static str,
        constraint: String,
    },
    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(&'static str, &'static str),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A fixed group with its algebra labels (`rho` for A3,5, `mu` for A3,7)
/// frozen, plus cached structure constants and representation.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub id: GroupId,
    pub rho: f64,
    pub mu: f64,
    pub sc: StructureConstants,
    pub rep: MatrixRep,
}

impl GroupSpec {
    pub fn new(id: GroupId) -> GroupSpec {
        GroupSpec::with_params(id, 0.5, 1.0).expect("default labels are valid")
    }

    pub fn with_params(id: GroupId, rho: f64, mu: f64) -> Result<GroupSpec, AlgebraError> {
        if id == GroupId::A35 && !(rho.abs() > 0.0 && rho.abs() < 1.0) {
            return Err(AlgebraError::Parameter(format!(
                "A3_5 requires 0 < |rho| < 1, got rho = {rho}"
            )));
        }
        if id == GroupId::A37 && !(mu > 0.0) {
            return Err(AlgebraError::Parameter(format!(
                "A3_7 requires mu > 0, got mu = {mu}"
            )));
        }
        Ok(GroupSpec {
            id,
            rho,
            mu,
            sc: structure_constants(id, rho, mu),
            rep: matrix_rep(id, rho, mu),
        })
    }

    pub fn n_upper(&self) -> usize {
        match self.id {
            GroupId::A36 | GroupId::A37 | GroupId::A38 => 4,
            _ => 3,
        }
    }

    pub fn upper_names(&self) -> &'static [&'static str] {
        match self.id {
            GroupId::A36 | GroupId::A37 => &["C", "S", "Y", "Z"],
            GroupId::A38 => &["X", "Y", "Z", "W"],
            GroupId::A39 => &["x", "y", "z"],
            _ => &["X", "Y", "Z"],
        }
    }
}

pub fn mat3_identity_s<S: Real>() -> [[S; 3]; 3] {
    let mut m = [[S::zero(); 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = S::one();
    }
    m
}

pub fn mat3_mul_s<S: Real>(a: &[[S; 3]; 3], b: &[[S; 3]; 3]) -> [[S; 3]; 3] {
    let mut c = [[S::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = S::zero();
            for (k, bk) in b.iter().enumerate() {
                s = s + a[i][k] * bk[j];
            }
            c[i][j] = s;
        }
    }
    c
}

/// Upper coordinates from lower `[z, y, x]`.
pub fn upper_from_lower<S: Real>(spec: &GroupSpec, zyx: [S; 3]) -> Vec<S> {
    let [z, y, x] = zyx;
    match spec.id {
        GroupId::A31 => vec![x, y, x * y + z],
        GroupId::A32 => vec![(-x).exp(), y, y + z],
        GroupId::A33 => vec![(-x).exp(), y, z],
        GroupId::A34 => vec![(-x).exp(), -y, z],
        GroupId::A35 => vec![(-x).exp(), y * con(spec.rho), z],
        GroupId::A36 => vec![x.cos(), x.sin(), y, -z],
        GroupId::A37 => {
            let mu = spec.mu;
            let damp = (-x * con::<S>(mu)).exp();
            vec![damp * x.cos(), damp * x.sin(), y + z * con(mu), y * con::<S>(mu) - z]
        }
        GroupId::A38 => {
            let ey = (y * con::<S>(0.5)).exp();
            vec![x * ey, ey, z * ey, x * z * ey + S::one() / ey]
        }
        GroupId::A39 => vec![x, y, z],
    }
}

/// The matrix group element as a function of the upper coordinates.
/// A3,8 occupies the top-left 2x2 block with a 1 at (3,3).
pub fn matrix_from_upper<S: Real>(spec: &GroupSpec, up: &[S]) -> [[S; 3]; 3] {
    let o = S::zero();
    let l = S::one();
    match spec.id {
        GroupId::A31 => {
            let (x, y, z) = (up[0], up[1], up[2]);
            [[l, y, z], [o, l, x], [o, o, l]]
        }
        GroupId::A32 => {
            let (x, y, z) = (up[0], up[1], up[2]);
            [[x, x * x.ln(), z], [o, x, y], [o, o, l]]
        }
        GroupId::A33 => {
            let (x, y, z) = (up[0], up[1], up[2]);
            [[x, o, z], [o, x, y], [o, o, l]]
        }
        GroupId::A34 => {
            let (x, y, z) = (up[0], up[1], up[2]);
            [[x, o, z], [o, l / x, y], [o, o, l]]
        }
        GroupId::A35 => {
            let (x, y, z) = (up[0], up[1], up[2]);
            [[x, o, z], [o, x.powf(spec.rho), y], [o, o, l]]
        }
        GroupId::A36 | GroupId::A37 => {
            let (c, s, y, z) = (up[0], up[1], up[2], up[3]);
            [[c, -s, y], [s, c, z], [o, o, l]]
        }
        GroupId::A38 => {
            let (x, y, z, w) = (up[0], up[1], up[2], up[3]);
            [[y, x, o], [z, w, o], [o, o, l]]
        }
        GroupId::A39 => {
            let (cx, sx) = (up[0].cos(), up[0].sin());
            let (cy, sy) = (up[1].cos(), up[1].sin());
            let (cz, sz) = (up[2].cos(), up[2].sin());
            [
                [cx * cy, -sx * cy, sy],
                [cx * sy * sz + sx * cz, -sx * sy * sz + cx * cz, -cy * sz],
                [-cx * sy * cz + sx * sz, sx * sy * cz + cx * sz, cy * cz],
            ]
        }
    }
}

/// Chart inverse: upper coordinates read off the matrix.  Domain validity is
/// checked separately at value level by [`check_matrix_in_chart`].
pub fn upper_from_matrix<S: Real>(spec: &GroupSpec, m: &[[S; 3]; 3]) -> Vec<S> {
    match spec.id {
        GroupId::A31 => vec![m[1][2], m[0][1], m[0][2]],
        GroupId::A32 | GroupId::A33 | GroupId::A34 | GroupId::A35 => {
            vec![m[0][0], m[1][2], m[0][2]]
        }
        GroupId::A36 | GroupId::A37 => vec![m[0][0], m[1][0], m[0][2], m[1][2]],
        GroupId::A38 => vec![m[0][1], m[0][0], m[1][0], m[1][1]],
        GroupId::A39 => {
            let y = m[0][2].asin();
            let x = (-m[0][1]).atan2(m[0][0]);
            let z = (-m[1][2]).atan2(m[2][2]);
            vec![x, y, z]
        }
    }
}

/// Value-level chart domain check for a prospective group element matrix.
pub fn check_matrix_in_chart(spec: &GroupSpec, m: &Mat3) -> Result<(), GroupError> {
    let name = spec.id.name();
    let fail = |constraint: String| {
        Err(GroupError::OutOfChart {
            group: name,
            constraint,
        })
    };
    match spec.id {
        GroupId::A32 | GroupId::A33 | GroupId::A34 | GroupId::A35 => {
            if m[0][0] <= 1e-12 {
                return fail(format!("X > 0 violated (X = {})", m[0][0]));
            }
        }
        GroupId::A37 => {
            if m[0][0] <= 1e-12 {
                return fail(format!(
                    "|x| < pi/2 violated (C = {} <= 0, principal arctan branch)",
                    m[0][0]
                ));
            }
        }
        GroupId::A38 => {
            if m[0][0] <= 1e-12 {
                return fail(format!("Y > 0 violated (Y = {})", m[0][0]));
            }
        }
        GroupId::A39 => {
            if m[0][2].abs() >= 1.0 - 1e-12 {
                return fail(format!(
                    "cos(y) = 0 Euler-angle singularity (|sin(y)| = {})",
                    m[0][2].abs()
                ));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Free (unconstrained) coordinates from upper coordinates.
pub fn free_from_upper<S: Real>(spec: &GroupSpec, up: &[S]) -> [S; 3] {
    match spec.id {
        GroupId::A36 | GroupId::A37 => [up[1].atan2(up[0]), up[2], up[3]],
        GroupId::A38 => [up[0], up[1], up[2]],
        _ => [up[0], up[1], up[2]],
    }
}

/// Upper coordinates from free coordinates.
pub fn upper_from_free<S: Real>(spec: &GroupSpec, u: &[S; 3]) -> Vec<S> {
    match spec.id {
        GroupId::A36 => vec![u[0].cos(), u[0].sin(), u[1], u[2]],
        GroupId::A37 => {
            let damp = (-u[0] * con::<S>(spec.mu)).exp();
            vec![damp * u[0].cos(), damp * u[0].sin(), u[1], u[2]]
        }
        GroupId::A38 => vec![u[0], u[1], u[2], (S::one() + u[0] * u[2]) / u[1]],
        _ => vec![u[0], u[1], u[2]],
    }
}

/// Lower `[z, y, x]` from free coordinates.
pub fn lower_from_free<S: Real>(spec: &GroupSpec, u: &[S; 3]) -> [S; 3] {
    match spec.id {
        GroupId::A31 => [u[2] - u[0] * u[1], u[1], u[0]],
        GroupId::A32 => [u[2] - u[1], u[1], -u[0].ln()],
        GroupId::A33 => [u[2], u[1], -u[0].ln()],
        GroupId::A34 => [u[2], -u[1], -u[0].ln()],
        GroupId::A35 => [u[2], u[1] / con(spec.rho), -u[0].ln()],
        GroupId::A36 => [-u[2], u[1], u[0]],
        GroupId::A37 => {
            let mu = spec.mu;
            let den = con::<S>(1.0 + mu * mu);
            [(u[1] * con::<S>(mu) - u[2]) / den, (u[1] + u[2] * con::<S>(mu)) / den, u[0]]
        }
        GroupId::A38 => {
            let lny = u[1].ln();
            [u[2] / u[1], lny + lny, u[0] / u[1]]
        }
        GroupId::A39 => [u[2], u[1], u[0]],
    }
}

/// Free coordinates from lower `[z, y, x]`.
pub fn free_from_lower<S: Real>(spec: &GroupSpec, zyx: [S; 3]) -> [S; 3] {
    let [z, y, x] = zyx;
    match spec.id {
        GroupId::A31 => [x, y, x * y + z],
        GroupId::A32 => [(-x).exp(), y, y + z],
        GroupId::A33 => [(-x).exp(), y, z],
        GroupId::A34 => [(-x).exp(), -y, z],
        GroupId::A35 => [(-x).exp(), y * con(spec.rho), z],
        GroupId::A36 => [x, y, -z],
        GroupId::A37 => [x, y + z * con(spec.mu), y * con::<S>(spec.mu) - z],
        GroupId::A38 => {
            let ey = (y * con::<S>(0.5)).exp();
            [x * ey, ey, z * ey]
        }
        GroupId::A39 => [x, y, z],
    }
}

/// Rows `a` give d(free^a)/d(upper^delta), evaluated at `up`.  Any smooth
/// extension off the constraint surface works because the bracket tensors we
/// contract against are tangent to it.
pub fn dfree_dupper(spec: &GroupSpec, up: &[f64]) -> Vec<Vec<f64>> {
    let n = spec.n_upper();
    let mut rows = vec![vec![0.0; n]; 3];
    match spec.id {
        GroupId::A36 | GroupId::A37 => {
            let (c, s) = (up[0], up[1]);
            let r2 = c * c + s * s;
            rows[0][0] = -s / r2;
            rows[0][1] = c / r2;
            rows[1][2] = 1.0;
            rows[2][3] = 1.0;
        }
        GroupId::A38 => {
            rows[0][0] = 1.0;
            rows[1][1] = 1.0;
            rows[2][2] = 1.0;
        }
        _ => {
            for (a, row) in rows.iter_mut().enumerate() {
                row[a] = 1.0;
            }
        }
    }
    rows
}

pub fn identity_upper(spec: &GroupSpec) -> Vec<f64> {
    match spec.id {
        GroupId::A31 | GroupId::A39 => vec![0.0, 0.0, 0.0],
        GroupId::A36 | GroupId::A37 => vec![1.0, 0.0, 0.0, 0.0],
        GroupId::A38 => vec![0.0, 1.0, 0.0, 1.0],
        _ => vec![1.0, 0.0, 0.0],
    }
}

/// Residual of the chart's constraint surface at `up` (0 when unconstrained).
pub fn constraint_residual(spec: &GroupSpec, up: &[f64]) -> f64 {
    match spec.id {
        GroupId::A36 => (up[0] * up[0] + up[1] * up[1] - 1.0).abs(),
        GroupId::A37 => {
            let theta = (up[1] / up[0]).atan();
            (up[0] * up[0] + up[1] * up[1] - (-2.0 * spec.mu * theta).exp()).abs()
        }
        GroupId::A38 => (up[1] * up[3] - up[0] * up[2] - 1.0).abs(),
        _ => 0.0,
    }
}

/// A point of the group: upper coordinates plus the cached matrix.
#[derive(Debug, Clone)]
pub struct GroupPoint {
    pub upper: Vec<f64>,
    pub matrix: Mat3,
}

impl GroupPoint {
    pub fn coord(&self, alpha: usize) -> f64 {
        self.upper[alpha]
    }
}

pub fn point_from_upper(spec: &GroupSpec, upper: Vec<f64>) -> Result<GroupPoint, GroupError> {
    let cr = constraint_residual(spec, &upper);
    if cr > 1e-8 {
        return Err(GroupError::OutOfChart {
            group: spec.id.name(),
            constraint: format!("constraint surface violated by {cr:.3e}"),
        });
    }
    let matrix = matrix_from_upper(spec, &upper);
    check_matrix_in_chart(spec, &matrix)?;
    Ok(GroupPoint { upper, matrix })
}

pub fn point_from_lower(spec: &GroupSpec, zyx: [f64; 3]) -> GroupPoint {
    let upper = upper_from_lower(spec, zyx);
    let matrix = matrix_from_upper(spec, &upper);
    GroupPoint { upper, matrix }
}

pub fn point_from_free(spec: &GroupSpec, u: [f64; 3]) -> GroupPoint {
    let upper = upper_from_free(spec, &u);
    let matrix = matrix_from_upper(spec, &upper);
    GroupPoint { upper, matrix }
}

pub fn point_from_matrix(spec: &GroupSpec, m: &Mat3) -> Result<GroupPoint, GroupError> {
    check_matrix_in_chart(spec, m)?;
    let upper = upper_from_matrix(spec, m);
    let matrix = matrix_from_upper(spec, &upper);
    Ok(GroupPoint { upper, matrix })
}

pub fn identity_point(spec: &GroupSpec) -> GroupPoint {
    let upper = identity_upper(spec);
    let matrix = matrix_from_upper(spec, &upper);
    GroupPoint { upper, matrix }
}

/// Group multiplication via matrix product and chart inversion.
pub fn multiply(spec: &GroupSpec, p: &GroupPoint, q: &GroupPoint) -> Result<GroupPoint, GroupError> {
    let m = crate::algebra::mat_mul(&p.matrix, &q.matrix);
    point_from_matrix(spec, &m)
}

/// Coproduct of the coordinate function `alpha`: the coordinate of `p * q`.
pub fn coproduct_eval(
    spec: &GroupSpec,
    alpha: usize,
    p: &GroupPoint,
    q: &GroupPoint,
) -> Result<f64, GroupError> {
    Ok(multiply(spec, p, q)?.upper[alpha])
}

/// The closed-form coproducts of each group, evaluated on the pair.
/// For A3,9 these are the restricted-domain expressions (x, z in (0, pi),
/// |y| < pi/2); the caller guarantees the domain.
pub fn coproduct_closed_form(spec: &GroupSpec, alpha: usize, p: &GroupPoint, q: &GroupPoint) -> f64 {
    let a = &p.upper;
    let b = &q.upper;
    match spec.id {
        GroupId::A31 => match alpha {
            0 => a[0] + b[0],
            1 => a[1] + b[1],
            _ => a[2] + b[2] + a[1] * b[0],
        },
        GroupId::A32 => match alpha {
            0 => a[0] * b[0],
            1 => a[0] * b[1] + a[1],
            _ => a[0] * b[2] + a[0] * a[0].ln() * b[1] + a[2],
        },
        GroupId::A33 => match alpha {
            0 => a[0] * b[0],
            1 => a[0] * b[1] + a[1],
            _ => a[0] * b[2] + a[2],
        },
        GroupId::A34 => match alpha {
            0 => a[0] * b[0],
            1 => b[1] / a[0] + a[1],
            _ => a[0] * b[2] + a[2],
        },
        GroupId::A35 => match alpha {
            0 => a[0] * b[0],
            1 => a[0].powf(spec.rho) * b[1] + a[1],
            _ => a[0] * b[2] + a[2],
        },
        GroupId::A36 | GroupId::A37 => match alpha {
            0 => a[0] * b[0] - a[1] * b[1],
            1 => a[1] * b[0] + a[0] * b[1],
            2 => a[0] * b[2] - a[1] * b[3] + a[2],
            _ => a[1] * b[2] + a[0] * b[3] + a[3],
        },
        GroupId::A38 => match alpha {
            0 => a[0] * b[3] + a[1] * b[0],
            1 => a[1] * b[1] + a[0] * b[2],
            2 => a[2] * b[1] + a[3] * b[2],
            _ => a[2] * b[0] + a[3] * b[3],
        },
        GroupId::A39 => {
            let (cx1, sx1) = (a[0].cos(), a[0].sin());
            let (cy1, sy1) = (a[1].cos(), a[1].sin());
            let (cx2, sx2) = (b[0].cos(), b[0].sin());
            let (cy2, sy2) = (b[1].cos(), b[1].sin());
            let (cz2, sz2) = (b[2].cos(), b[2].sin());
            let sin_dy = cx1 * cy1 * sy2 + sx1 * cy1 * cy2 * sz2 + sy1 * cy2 * cz2;
            match alpha {
                1 => sin_dy.asin(),
                0 => {
                    // cos(Delta x) cos(Delta y), normalized by
                    // sqrt(1 - sin^2(Delta y)) = cos(Delta y)
                    let num = -cx1 * cy1 * cx2 * cy2
                        + sx1 * cy1 * cx2 * sy2 * sz2
                        + sx1 * cy1 * sx2 * cz2
                        + sy1 * cx2 * sy2 * cz2
                        - sy1 * sx2 * sz2;
                    let den = (1.0 - sin_dy * sin_dy).sqrt();
                    std::f64::consts::PI - (num / den).acos()
                }
                _ => {
                    let (cz1, sz1) = (a[2].cos(), a[2].sin());
                    let num = cx1 * sy1 * cz1 * sy2 - sx1 * sz1 * sy2
                        + sx1 * sy1 * cz1 * cy2 * sz2
                        + cx1 * sz1 * cy2 * sz2
                        - cy1 * cz1 * cy2 * cz2;
                    let den = (1.0 - sin_dy * sin_dy).sqrt();
                    std::f64::consts::PI - (num / den).acos()
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// d/dt of every upper coordinate of `p . exp(t e_i)` (left) or
/// `exp(t e_i) . p` (right) at t = 0, computed with a one-slot jet; the
/// perturbation is `I + t rho(e_i)`, exact to first order.
pub fn invariant_frame(spec: &GroupSpec, side: Side, i: usize, p: &GroupPoint) -> Vec<f64> {
    let t: Jet<1> = Jet::var(0.0, 0);
    let mut pert = mat3_identity_s::<Jet<1>>();
    for (r, row) in spec.rep.mats[i].iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v != 0.0 {
                pert[r][c] = pert[r][c] + t * Jet::constant(v);
            }
        }
    }
    let mut pm = [[Jet::<1>::constant(0.0); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            pm[r][c] = Jet::constant(p.matrix[r][c]);
        }
    }
    let m = match side {
        Side::Left => mat3_mul_s(&pm, &pert),
        Side::Right => mat3_mul_s(&pert, &pm),
    };
    upper_from_matrix(spec, &m).iter().map(|j| j.d[0]).collect()
}

/// Derivative of `f` (a function of the upper coordinates) along the left or
/// right translation generated by `e_i`, at `p`.
pub fn invariant_field<F>(spec: &GroupSpec, side: Side, i: usize, f: F, p: &GroupPoint) -> f64
where
    F: Fn(&[Jet<1>]) -> Jet<1>,
{
    let frame = invariant_frame(spec, side, i, p);
    let up: Vec<Jet<1>> = p
        .upper
        .iter()
        .zip(frame.iter())
        .map(|(&v, &d)| Jet { v, d: [d] })
        .collect();
    f(&up).d[0]
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

const ANGLE_MARGIN: f64 = 0.1;

fn uniform(rng: &mut impl Rng, a: f64, b: f64) -> f64 {
    a + (b - a) * rng.gen::<f64>()
}

/// A random point of the sampling box, in free coordinates.
pub fn sample_free(spec: &GroupSpec, rng: &mut impl Rng) -> [f64; 3] {
    use std::f64::consts::FRAC_PI_2;
    match spec.id {
        GroupId::A31 => [
            uniform(rng, -2.0, 2.0),
            uniform(rng, -2.0, 2.0),
            uniform(rng, -2.0, 2.0),
        ],
        GroupId::A32 | GroupId::A33 | GroupId::A34 | GroupId::A35 => [
            uniform(rng, 0.2, 5.0),
            uniform(rng, -2.0, 2.0),
            uniform(rng, -2.0, 2.0),
        ],
        GroupId::A36 | GroupId::A37 => [
            uniform(rng, -FRAC_PI_2 + ANGLE_MARGIN, FRAC_PI_2 - ANGLE_MARGIN),
            uniform(rng, -2.0, 2.0),
            uniform(rng, -2.0, 2.0),
        ],
        GroupId::A38 => [
            uniform(rng, -2.0, 2.0),
            uniform(rng, 0.2, 5.0),
            uniform(rng, -2.0, 2.0),
        ],
        GroupId::A39 => [
            uniform(rng, -FRAC_PI_2 + ANGLE_MARGIN, FRAC_PI_2 - ANGLE_MARGIN),
            uniform(rng, -FRAC_PI_2 + ANGLE_MARGIN, FRAC_PI_2 - ANGLE_MARGIN),
            uniform(rng, -FRAC_PI_2 + ANGLE_MARGIN, FRAC_PI_2 - ANGLE_MARGIN),
        ],
    }
}

pub fn sample_point(spec: &GroupSpec, rng: &mut impl Rng) -> GroupPoint {
    point_from_free(spec, sample_free(spec, rng))
}

/// True when `pt` sits comfortably inside the chart for further products and
/// differentiation (margins keep inverse-trig branches and denominators away
/// from their singular loci).
pub fn point_well_inside(spec: &GroupSpec, pt: &GroupPoint) -> bool {
    use std::f64::consts::{FRAC_PI_2, PI};
    match spec.id {
        GroupId::A37 => {
            let x = free_from_upper(spec, &pt.upper)[0];
            x.abs() < FRAC_PI_2 - 0.05
        }
        GroupId::A38 => pt.upper[1] > 0.05,
        GroupId::A39 => {
            pt.upper[1].abs() < FRAC_PI_2 - 0.05
                && pt.upper[0].abs() < PI - ANGLE_MARGIN
                && pt.upper[2].abs() < PI - ANGLE_MARGIN
        }
        GroupId::A36 => {
            let x = free_from_upper(spec, &pt.upper)[0];
            x.abs() < PI - ANGLE_MARGIN
        }
        GroupId::A32 | GroupId::A33 | GroupId::A34 | GroupId::A35 => pt.upper[0] > 0.02,
        _ => true,
    }
}

/// A pair whose product stays well inside the chart.
pub fn sample_pair(spec: &GroupSpec, rng: &mut impl Rng) -> (GroupPoint, GroupPoint, GroupPoint) {
    loop {
        let p = sample_point(spec, rng);
        let q = sample_point(spec, rng);
        if let Ok(pq) = multiply(spec, &p, &q) {
            if point_well_inside(spec, &pq) {
                return (p, q, pq);
            }
        }
    }
}

/// A triple with every partial product well inside the chart.
pub fn sample_triple(
    spec: &GroupSpec,
    rng: &mut impl Rng,
) -> (GroupPoint, GroupPoint, GroupPoint) {
    loop {
        let p = sample_point(spec, rng);
        let q = sample_point(spec, rng);
        let r = sample_point(spec, rng);
        let ok = (|| -> Result<bool, GroupError> {
            let pq = multiply(spec, &p, &q)?;
            let qr = multiply(spec, &q, &r)?;
            let pq_r = multiply(spec, &pq, &r)?;
            let p_qr = multiply(spec, &p, &qr)?;
            Ok(point_well_inside(spec, &pq)
                && point_well_inside(spec, &qr)
                && point_well_inside(spec, &pq_r)
                && point_well_inside(spec, &p_qr))
        })()
        .unwrap_or(false);
        if ok {
            return (p, q, r);
        }
    }
}
