//! Every Poisson-Lie bracket family and Casimir branch of the nine groups,
//! plus the jet-based checks: Jacobiator, multiplicativity residual and
//! Casimir invariance.
//!
//! Brackets are stored as the closed-form bivector in the upper
//! (capital-letter) coordinates.  All differentiation happens in the free
//! coordinates of the chart; for the constrained charts the bivector is
//! pushed down by the fixed chain rule of [`crate::group::dfree_dupper`].

use crate::algebra::GroupId;
use crate::group::{
    self, free_from_upper, multiply, point_from_free, upper_from_free, GroupError, GroupPoint,
    GroupSpec,
};
use crate::jet::{con, CJet, Jet, Real};
use rand::Rng;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PoissonError {
    #[error("{group} family {family}: parameter constraint violated: {predicate}")]
    ParamConstraint {
        group: &'static str,
        family: usize,
        predicate: &'static str,
    },
    #[error("{group} {branch}: branch guard not satisfied")]
    BranchGuard {
        group: &'static str,
        branch: &'static str,
    },
    #[error("{group} {branch}: too close to a singular locus (margin {margin:.3e})")]
    SingularLocus {
        group: &'static str,
        branch: &'static str,
        margin: f64,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Family indices (the subscript of {,}_i in the tables) per group.
pub fn family_indices(id: GroupId) -> &'static [usize] {
    match id {
        GroupId::A31 | GroupId::A35 => &[1, 2, 3],
        GroupId::A34 | GroupId::A36 | GroupId::A37 => &[1, 2],
        _ => &[1],
    }
}

pub fn param_names(id: GroupId, family: usize) -> &'static [&'static str] {
    match (id, family) {
        (GroupId::A31, 1) => &["a1", "b1", "c1", "d1"],
        (GroupId::A31, 2) => &["a2", "b2", "c2", "d2"],
        (GroupId::A31, 3) => &["a3", "b3", "c3"],
        (GroupId::A32, _) => &["a1", "b1", "c1"],
        (GroupId::A33, _) => &["a1", "b1", "c1", "d1", "e1", "f1"],
        (GroupId::A34, 1) => &["a1", "b1", "c1"],
        (GroupId::A34, 2) => &["a2", "b2", "c2"],
        (GroupId::A35, 1) => &["a1", "b1", "c1"],
        (GroupId::A35, 2) => &["a2", "b2"],
        (GroupId::A35, 3) => &["a3", "b3"],
        (GroupId::A36, 1) => &["a1", "b1", "c1"],
        (GroupId::A36, 2) => &["a2", "b2", "c2"],
        (GroupId::A37, 1) => &["a1", "b1", "c1"],
        (GroupId::A37, 2) => &["a2"],
        (GroupId::A38, _) => &["a1", "b1", "c1"],
        (GroupId::A39, _) => &["a1", "b1", "c1"],
        _ => panic!("unknown family"),
    }
}

pub fn param_count(id: GroupId, family: usize) -> usize {
    param_names(id, family).len()
}

/// The nonzero-parameter constraint of a family, if any: (index, predicate).
pub fn family_constraint(id: GroupId, family: usize) -> Option<(usize, &'static str)> {
    match (id, family) {
        (GroupId::A31, 1) => Some((1, "b1 != 0")),
        (GroupId::A31, 3) => Some((0, "a3 != 0")),
        (GroupId::A34, 2) => Some((2, "c2 != 0")),
        (GroupId::A35, 1) => Some((0, "a1 != 0")),
        (GroupId::A35, 3) => Some((0, "a3 != 0")),
        (GroupId::A36, 2) => Some((2, "c2 != 0")),
        (GroupId::A37, 1) => Some((0, "a1 != 0")),
        _ => None,
    }
}

pub fn check_family_params(id: GroupId, family: usize, params: &[f64]) -> Result<(), PoissonError> {
    assert_eq!(params.len(), param_count(id, family), "parameter arity");
    if let Some((idx, predicate)) = family_constraint(id, family) {
        if params[idx] == 0.0 {
            return Err(PoissonError::ParamConstraint {
                group: id.name(),
                family,
                predicate,
            });
        }
    }
    Ok(())
}

/// Uniform draw in [-2,2] per parameter, with |p| >= 0.1 enforced on
/// constrained / denominator parameters.
pub fn sample_family_params(spec: &GroupSpec, family: usize, rng: &mut impl Rng) -> Vec<f64> {
    let n = param_count(spec.id, family);
    let constrained = family_constraint(spec.id, family).map(|(i, _)| i);
    loop {
        let params: Vec<f64> = (0..n).map(|_| -2.0 + 4.0 * rng.gen::<f64>()).collect();
        if let Some(i) = constrained {
            if params[i].abs() < 0.1 {
                continue;
            }
        }
        return params;
    }
}

/// Smooth angle coordinate for the `arccos(C)` terms of A3,6
/// (equal to arccos on the x >= 0 half of the chart).
fn angle<S: Real>(c: S, s: S) -> S {
    s.atan2(c)
}

/// The closed-form bivector of brackets of upper coordinates; entry (alpha, beta)
/// is {X^alpha, X^beta}.  Only the top n_upper x n_upper block is meaningful.
pub fn bivector_upper<S: Real>(
    spec: &GroupSpec,
    family: usize,
    params: &[f64],
    up: &[S],
) -> [[S; 4]; 4] {
    let mut m = [[S::zero(); 4]; 4];
    let set = |mm: &mut [[S; 4]; 4], i: usize, j: usize, v: S| {
        mm[i][j] = v;
        mm[j][i] = -v;
    };
    let l = S::one();
    match (spec.id, family) {
        (GroupId::A31, 1) => {
            let (a, b, c, d) = (params[0], params[1], params[2], params[3]);
            let (x, y, z) = (up[0], up[1], up[2]);
            set(&mut m, 0, 1, x * con(a) + y * con(b));
            set(
                &mut m,
                0,
                2,
                x * x * con::<S>(a / 2.0) + x * con::<S>(c) + y * con::<S>(d) + z * con::<S>(b),
            );
            set(
                &mut m,
                1,
                2,
                -(x * con::<S>(a * a * d / (b * b)))
                    - y * y * con::<S>(b / 2.0)
                    - y * con::<S>((2.0 * a * d - b * c) / b)
                    - z * con::<S>(a),
            );
        }
        (GroupId::A31, 2) => {
            let (a, b, c, d) = (params[0], params[1], params[2], params[3]);
            let (x, y) = (up[0], up[1]);
            set(&mut m, 0, 2, x * con(a) + y * con(b));
            set(&mut m, 1, 2, x * con(c) + y * con(d));
        }
        (GroupId::A31, 3) => {
            let (a, b, c) = (params[0], params[1], params[2]);
            let (x, y, z) = (up[0], up[1], up[2]);
            set(&mut m, 0, 1, x * con(a));
            set(&mut m, 0, 2, x * x * con::<S>(a / 2.0) + x * con::<S>(b));
            set(
                &mut m,
                1,
                2,
                -(x * con::<S>(c)) + y * con::<S>(b) - z * con::<S>(a),
            );
        }
        (GroupId::A32, _) => {
            let (a, b, c) = (params[0], params[1], params[2]);
            let (x, y) = (up[0], up[1]);
            set(
                &mut m,
                0,
                2,
                -(x * x * con::<S>(a)) + x * y * con::<S>(b) + x * con::<S>(a),
            );
            set(
                &mut m,
                1,
                2,
                (l - x * x) * con::<S>(c) + y * y * con::<S>(b / 2.0) + y * con::<S>(a),
            );
        }
        (GroupId::A33, _) => {
            let (a, b, c, d, e, f) = (
                params[0], params[1], params[2], params[3], params[4], params[5],
            );
            let (x, y, z) = (up[0], up[1], up[2]);
            set(
                &mut m,
                0,
                1,
                (x * x - x) * con::<S>(a) - x * y * con::<S>(b) - x * z * con::<S>(2.0 * c),
            );
            set(
                &mut m,
                0,
                2,
                (x * x - x) * con::<S>(d) + x * y * con::<S>(2.0 * e) + x * z * con::<S>(b),
            );
            set(
                &mut m,
                1,
                2,
                (l - x * x) * con::<S>(f) + y * y * con::<S>(e) + y * z * con::<S>(b)
                    - y * con::<S>(d)
                    + z * z * con::<S>(c)
                    + z * con::<S>(a),
            );
        }
        (GroupId::A34, 1) => {
            let (a, b, c) = (params[0], params[1], params[2]);
            let (x, y, z) = (up[0], up[1], up[2]);
            set(&mut m, 0, 1, -(x * y * con::<S>(a)) + (x - l) * con::<S>(b));
            set(&mut m, 0, 2, (x - x * x) * con::<S>(c) - x * z * con::<S>(a));
            set(
                &mut m,
                1,
                2,
                y * z * con::<S>(a) - y * con::<S>(c) - z * con::<S>(b),
            );
        }
        (GroupId::A34, 2) => {
            let (a, b, c) = (params[0], params[1], params[2]);
            let (x, y, z) = (up[0], up[1], up[2]);
            set(&mut m, 0, 1, (l - x) * con::<S>(a));
            set(&mut m, 0, 2, (x * x - x) * con::<S>(b));
            set(
                &mut m,
                1,
                2,
                y * con::<S>(b) + z * con::<S>(a) + x.ln() * con::<S>(c),
            );
        }
        (GroupId::A35, 1) => {
            let rho = spec.rho;
            let (a, b, c) = (params[0], params[1], params[2]);
            let (x, y, z) = (up[0], up[1], up[2]);
            let xrho = x.powf(rho);
            set(
                &mut m,
                0,
                1,
                -(x * y * con::<S>(a)) + x * (xrho - l) * con::<S>(b),
            );
            set(
                &mut m,
                0,
                2,
                (x - x * x) * con::<S>(c) + x * z * con::<S>(a / rho),
            );
            set(
                &mut m,
                1,
                2,
                (l - x.powf(1.0 + rho)) * con::<S>(rho * b * c / a)
                    + y * z * con::<S>(a)
                    + y * con::<S>(rho * c)
                    + z * con::<S>(b),
            );
        }
        (GroupId::A35, 2) => {
            let rho = spec.rho;
            let (a, b) = (params[0], params[1]);
            let (x, y) = (up[0], up[1]);
            set(&mut m, 0, 2, (x - x * x) * con::<S>(a));
            set(
                &mut m,
                1,
                2,
                (l - x.powf(1.0 + rho)) * con::<S>(b) + y * con::<S>(rho * a),
            );
        }
        (GroupId::A35, 3) => {
            let rho = spec.rho;
            let (a, b) = (params[0], params[1]);
            let (x, y, z) = (up[0], up[1], up[2]);
            set(&mut m, 0, 1, x * (x.powf(rho) - l) * con::<S>(a));
            set(
                &mut m,
                1,
                2,
                (l - x.powf(1.0 + rho)) * con::<S>(b) + z * con::<S>(a),
            );
            let _ = y;
        }
        (GroupId::A36, 1) => {
            let (a, b, c) = (params[0], params[1], params[2]);
            let (cc, s, y, z) = (up[0], up[1], up[2], up[3]);
            set(
                &mut m,
                0,
                2,
                (l - cc * cc) * con::<S>(a) + s * (l - cc) * con::<S>(b) - s * y * con::<S>(c),
            );
            set(
                &mut m,
                0,
                3,
                s * (l - cc) * con::<S>(a) + (cc * cc - l) * con::<S>(b) - s * z * con::<S>(c),
            );
            set(
                &mut m,
                1,
                2,
                -(cc * s * con::<S>(a)) + (cc * cc - cc) * con::<S>(b) + cc * y * con::<S>(c),
            );
            set(
                &mut m,
                1,
                3,
                (cc * cc - cc) * con::<S>(a) + cc * s * con::<S>(b) + cc * z * con::<S>(c),
            );
            set(
                &mut m,
                2,
                3,
                z * con::<S>(a) + y * con::<S>(b) - (y * y + z * z) * con::<S>(c / 2.0),
            );
        }
        (GroupId::A36, 2) => {
            let (a, b, c) = (params[0], params[1], params[2]);
            let (cc, s, y, z) = (up[0], up[1], up[2], up[3]);
            set(
                &mut m,
                0,
                2,
                (l - cc * cc) * con::<S>(a) + s * (l - cc) * con::<S>(b),
            );
            set(
                &mut m,
                0,
                3,
                s * (l - cc) * con::<S>(a) + (cc * cc - l) * con::<S>(b),
            );
            set(
                &mut m,
                1,
                2,
                -(cc * s * con::<S>(a)) + (cc * cc - cc) * con::<S>(b),
            );
            set(&mut m, 1, 3, (cc * cc - cc) * con::<S>(a) + cc * s * con::<S>(b));
            set(
                &mut m,
                2,
                3,
                z * con::<S>(a) + y * con::<S>(b) + angle(cc, s) * con::<S>(c),
            );
        }
        (GroupId::A37, 1) => {
            let mu = spec.mu;
            let (a, b, c) = (params[0], params[1], params[2]);
            let (cc, s, y, z) = (up[0], up[1], up[2], up[3]);
            let p = (-y + z * con::<S>(mu)) * con::<S>(c * c * (1.0 + mu * mu))
                + (-(s * con::<S>(2.0 * a)) + (-y + z * con::<S>(mu)) * con::<S>(b)) * con::<S>(b)
                + ((cc + s * con::<S>(mu) - l) * con::<S>(a)
                    + (y - z * con::<S>(mu)) * con::<S>(b * mu))
                    * con::<S>(2.0 * c);
            let q = (y * con::<S>(mu) + z) * con::<S>(b * b)
                - ((cc - l) * con::<S>(a) + (y * con::<S>(mu) + z) * con::<S>(c * mu))
                    * con::<S>(2.0 * b)
                + ((cc - l) * con::<S>(2.0 * a * mu) - s * con::<S>(2.0 * a)
                    + (y * con::<S>(mu) + z) * con::<S>(c * (1.0 + mu * mu)))
                    * con::<S>(c);
            let mc_s = cc * con::<S>(mu) + s;
            let c_ms = cc - s * con::<S>(mu);
            let inv2a = con::<S>(1.0 / (2.0 * a));
            set(&mut m, 0, 2, mc_s * p * inv2a);
            set(&mut m, 0, 3, -(mc_s * q * inv2a));
            set(&mut m, 1, 2, -(c_ms * p * inv2a));
            set(&mut m, 1, 3, c_ms * q * inv2a);
            let yz = -((cc * cc + s * s - l) * con::<S>(-4.0 * a * a)
                + (y * con::<S>(c + mu * b - c * mu * mu) + z * con::<S>(b - 2.0 * c * mu))
                    * con::<S>(4.0 * a)
                + (y * y + z * z)
                    * con::<S>((1.0 + mu * mu) * (c * c + (b - c * mu) * (b - c * mu))))
                * con::<S>(1.0 / (4.0 * a));
            set(&mut m, 2, 3, yz);
        }
        (GroupId::A37, 2) => {
            let mu = spec.mu;
            let a = params[0];
            let (cc, s, y, z) = (up[0], up[1], up[2], up[3]);
            let mc_s = cc * con::<S>(mu) + s;
            let c_ms = cc - s * con::<S>(mu);
            set(&mut m, 0, 2, (y - z * con::<S>(mu)) * mc_s * con::<S>(a / mu));
            set(&mut m, 0, 3, (y * con::<S>(mu) + z) * mc_s * con::<S>(a / mu));
            set(&mut m, 1, 2, -((y - z * con::<S>(mu)) * c_ms * con::<S>(a / mu)));
            set(&mut m, 1, 3, -((y * con::<S>(mu) + z) * c_ms * con::<S>(a / mu)));
            // multiplicativity fixes this sign (4e-15 here; the opposite
            // choice fails at O(1)).
            set(
                &mut m,
                2,
                3,
                (y * y + z * z) * con::<S>(a * (mu * mu + 1.0) / (2.0 * mu)),
            );
        }
        (GroupId::A38, _) => {
            let (a, b, c) = (params[0], params[1], params[2]);
            let (x, y, z, w) = (up[0], up[1], up[2], up[3]);
            set(
                &mut m,
                0,
                1,
                -(x * x * con::<S>(a)) + x * y * con::<S>(b) + (l - y * y) * con::<S>(c),
            );
            set(
                &mut m,
                0,
                2,
                -((x * con::<S>(a) + z * con::<S>(c)) * (y + w)),
            );
            set(
                &mut m,
                0,
                3,
                -(x * x * con::<S>(a)) - x * w * con::<S>(b) + (l - w * w) * con::<S>(c),
            );
            set(
                &mut m,
                1,
                2,
                (l - y * y) * con::<S>(a) - y * z * con::<S>(b) - z * z * con::<S>(c),
            );
            set(
                &mut m,
                1,
                3,
                (l - w * y) * con::<S>(2.0 * b) + (z * con::<S>(c) - x * con::<S>(a)) * (y - w),
            );
            set(
                &mut m,
                2,
                3,
                (w * w - l) * con::<S>(a) - z * w * con::<S>(b) + z * z * con::<S>(c),
            );
        }
        (GroupId::A39, _) => {
            let (a, b, c) = (params[0], params[1], params[2]);
            let (x, y, z) = (up[0], up[1], up[2]);
            let (sx, cx) = (x.sin(), x.cos());
            let (sy, cy) = (y.sin(), y.cos());
            let (sz, cz) = (z.sin(), z.cos());
            set(
                &mut m,
                0,
                1,
                (sy * con::<S>(a) + sx * cy * con::<S>(b) + cx * cy * con::<S>(c) - con::<S>(c))
                    / cy,
            );
            set(
                &mut m,
                0,
                2,
                (sz * con::<S>(a) + cx * con::<S>(b) - cz * con::<S>(b) - sx * con::<S>(c)) / cy,
            );
            set(
                &mut m,
                1,
                2,
                -((cz * cy * con::<S>(a) + sz * cy * con::<S>(b) - con::<S>(a) + sy * con::<S>(c))
                    / cy),
            );
        }
        _ => panic!("unknown family {} for {}", family, spec.id.name()),
    }
    m
}

/// The bivector pushed down to the free coordinates of the chart.
pub fn bivector_free<S: Real>(
    spec: &GroupSpec,
    family: usize,
    params: &[f64],
    u: &[S; 3],
) -> [[S; 3]; 3] {
    let up = upper_from_free(spec, u);
    let b = bivector_upper(spec, family, params, &up);
    match spec.id {
        GroupId::A36 | GroupId::A37 => {
            // x = atan2(S, C): dx = (C dS - S dC) / (C^2 + S^2)
            let (c, s) = (up[0], up[1]);
            let r2 = c * c + s * s;
            let xy = (c * b[1][2] - s * b[0][2]) / r2;
            let xz = (c * b[1][3] - s * b[0][3]) / r2;
            let yz = b[2][3];
            antisym3(xy, xz, yz)
        }
        GroupId::A38 => antisym3(b[0][1], b[0][2], b[1][2]),
        _ => antisym3(b[0][1], b[0][2], b[1][2]),
    }
}

fn antisym3<S: Real>(xy: S, xz: S, yz: S) -> [[S; 3]; 3] {
    let o = S::zero();
    [[o, xy, xz], [-xy, o, yz], [-xz, -yz, o]]
}

/// Value-level bivector evaluation with parameter validation (spec surface).
pub fn bivector_eval(
    spec: &GroupSpec,
    family: usize,
    params: &[f64],
    point: &GroupPoint,
) -> Result<Vec<Vec<f64>>, PoissonError> {
    check_family_params(spec.id, family, params)?;
    let b = bivector_upper(spec, family, params, point.upper.as_slice());
    let n = spec.n_upper();
    Ok((0..n).map(|i| (0..n).map(|j| b[i][j]).collect()).collect())
}

/// Max |bivector| at the group identity (must vanish for a PL structure).
pub fn identity_vanishing(spec: &GroupSpec, family: usize, params: &[f64]) -> f64 {
    let e = group::identity_upper(spec);
    let b = bivector_upper(spec, family, params, e.as_slice());
    let n = spec.n_upper();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            m = m.max(b[i][j].abs());
        }
    }
    m
}

/// Jacobiator of the bracket in free coordinates at the point `u`:
/// max over index triples of |sum_d Pi^{da} d_d Pi^{bc} + cyclic|.
/// Returns (residual, scale); the scale tracks the size of the cancelled terms.
pub fn jacobiator(spec: &GroupSpec, family: usize, params: &[f64], u: [f64; 3]) -> (f64, f64) {
    let uj: [Jet<3>; 3] = [Jet::var(u[0], 0), Jet::var(u[1], 1), Jet::var(u[2], 2)];
    let b = bivector_free(spec, family, params, &uj);
    let mut res: f64 = 0.0;
    let mut max_pi: f64 = 0.0;
    let mut max_dpi: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            max_pi = max_pi.max(b[i][j].v.abs());
            for k in 0..3 {
                max_dpi = max_dpi.max(b[i][j].d[k].abs());
            }
        }
    }
    for a in 0..3 {
        for bb in (a + 1)..3 {
            for c in (bb + 1)..3 {
                let mut s = 0.0;
                for d in 0..3 {
                    s += b[d][a].v * b[bb][c].d[d]
                        + b[d][bb].v * b[c][a].d[d]
                        + b[d][c].v * b[a][bb].d[d];
                }
                res = res.max(s.abs());
            }
        }
    }
    (res, 1.0 + max_pi * max_dpi)
}

/// Multiplicativity residual of the family at the pair (p, q):
/// max over coordinate pairs of |{Delta X^a, Delta X^b}_{GxG} - Delta {X^a, X^b}|.
/// Returns (residual, scale).
pub fn multiplicativity_residual(
    spec: &GroupSpec,
    family: usize,
    params: &[f64],
    p: &GroupPoint,
    q: &GroupPoint,
) -> Result<(f64, f64), PoissonError> {
    let pq = multiply(spec, p, q)?;
    let n = spec.n_upper();

    let up_f = free_from_upper(spec, p.upper.as_slice());
    let uq_f = free_from_upper(spec, q.upper.as_slice());
    let upj: [Jet<6>; 3] = [
        Jet::var(up_f[0], 0),
        Jet::var(up_f[1], 1),
        Jet::var(up_f[2], 2),
    ];
    let uqj: [Jet<6>; 3] = [
        Jet::var(uq_f[0], 3),
        Jet::var(uq_f[1], 4),
        Jet::var(uq_f[2], 5),
    ];
    let upper_p = upper_from_free(spec, &upj);
    let upper_q = upper_from_free(spec, &uqj);
    let mp = group::matrix_from_upper(spec, &upper_p);
    let mq = group::matrix_from_upper(spec, &upper_q);
    let m = group::mat3_mul_s(&mp, &mq);
    let prod_upper = group::upper_from_matrix(spec, &m);

    let pi_p = bivector_free(spec, family, params, &[
        Jet::<3>::constant(up_f[0]),
        Jet::constant(up_f[1]),
        Jet::constant(up_f[2]),
    ]);
    let pi_q = bivector_free(spec, family, params, &[
        Jet::<3>::constant(uq_f[0]),
        Jet::constant(uq_f[1]),
        Jet::constant(uq_f[2]),
    ]);
    let rhs = bivector_upper(spec, family, params, pq.upper.as_slice());

    let mut res: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for alpha in 0..n {
        for beta in (alpha + 1)..n {
            let mut lhs = 0.0;
            let mut mag = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    let tp = prod_upper[alpha].d[a] * pi_p[a][b].v * prod_upper[beta].d[b];
                    let tq =
                        prod_upper[alpha].d[3 + a] * pi_q[a][b].v * prod_upper[beta].d[3 + b];
                    lhs += tp + tq;
                    mag += tp.abs() + tq.abs();
                }
            }
            res = res.max((lhs - rhs[alpha][beta]).abs());
            scale = scale.max(mag + rhs[alpha][beta].abs());
        }
    }
    Ok((res, 1.0 + scale))
}

// ---------------------------------------------------------------------------
// Casimir branches
// ---------------------------------------------------------------------------

/// One branch of a Casimir function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirBranch {
    pub family: usize,
    pub label: &'static str,
}

pub fn casimir_branches(id: GroupId) -> Vec<CasimirBranch> {
    let b = |family, label| CasimirBranch { family, label };
    match id {
        GroupId::A31 => vec![
            b(1, "C1"),
            b(2, "C2_disc_pos"),
            b(2, "C2_disc_neg"),
            b(2, "C2_parabolic"),
            b(2, "C2_b0_d_eq_a"),
            b(2, "C2_c0_a_eq_d"),
            b(2, "C2_a_eq_d_bc0"),
            b(3, "C3_c_nonzero"),
            b(3, "C3_c_zero"),
        ],
        GroupId::A32 => vec![b(1, "C")],
        GroupId::A33 => vec![b(1, "C")],
        GroupId::A34 => vec![b(1, "C1_a_nonzero"), b(1, "C1_a_zero"), b(2, "C2")],
        GroupId::A35 => vec![b(1, "C1"), b(2, "C2"), b(3, "C3")],
        GroupId::A36 => vec![b(1, "C1_c_nonzero"), b(1, "C1_c_zero"), b(2, "C2")],
        GroupId::A37 => vec![b(1, "C1_complex"), b(2, "C2")],
        GroupId::A38 => vec![b(1, "C_generic"), b(1, "C_a0_b0"), b(1, "C_a0_c0")],
        GroupId::A39 => vec![b(1, "C_b0_c0")],
    }
}

fn disc_a31(params: &[f64]) -> f64 {
    let (a, _b, _c, d) = (params[0], params[1], params[2], params[3]);
    (a - d) * (a - d) + 4.0 * params[1] * params[2]
}

/// Branch guard predicate on the parameters (boundaries excluded by 1e-6).
pub fn casimir_guard(id: GroupId, branch: &CasimirBranch, params: &[f64]) -> bool {
    match (id, branch.label) {
        (GroupId::A31, "C1") => params[1] != 0.0,
        // bc = 0 makes alpha = |a - d|, where num or den vanishes
        // identically and the formula degenerates; the guard excludes it
        (GroupId::A31, "C2_disc_pos") => {
            disc_a31(params) > 1e-6 && (params[1] * params[2]).abs() > 1e-9
        }
        (GroupId::A31, "C2_disc_neg") => disc_a31(params) < -1e-6,
        (GroupId::A31, "C2_parabolic") => {
            let (a, b, c, d) = (params[0], params[1], params[2], params[3]);
            c != 0.0 && a != d && (b + (a - d) * (a - d) / (4.0 * c)).abs() < 1e-9
        }
        (GroupId::A31, "C2_b0_d_eq_a") => {
            params[3] == params[0] && params[1] == 0.0 && params[2] != 0.0
        }
        (GroupId::A31, "C2_c0_a_eq_d") => {
            params[0] == params[3] && params[2] == 0.0 && params[1] != 0.0
        }
        (GroupId::A31, "C2_a_eq_d_bc0") => {
            params[0] == params[3] && params[1] == 0.0 && params[2] == 0.0
        }
        (GroupId::A31, "C3_c_nonzero") => params[2] != 0.0,
        (GroupId::A31, "C3_c_zero") => params[2] == 0.0,
        (GroupId::A34, "C1_a_nonzero") => params[0] != 0.0,
        (GroupId::A34, "C1_a_zero") => params[0] == 0.0,
        (GroupId::A34, "C2") => params[2] != 0.0,
        (GroupId::A36, "C1_c_nonzero") => params[2] != 0.0,
        (GroupId::A36, "C1_c_zero") => params[2] == 0.0,
        (GroupId::A36, "C2") => params[2] != 0.0,
        (GroupId::A38, "C_generic") => params[0] != 0.0 || params[2] != 0.0,
        (GroupId::A38, "C_a0_b0") => params[0] == 0.0 && params[1] == 0.0,
        (GroupId::A38, "C_a0_c0") => params[0] == 0.0 && params[2] == 0.0,
        (GroupId::A39, "C_b0_c0") => params[1] == 0.0 && params[2] == 0.0,
        _ => true,
    }
}

/// Draw parameters satisfying the branch guard (constructively for the
/// measure-zero guards).
pub fn sample_casimir_params(
    spec: &GroupSpec,
    branch: &CasimirBranch,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let u = |rng: &mut dyn rand::RngCore, lo: f64, hi: f64| lo + (hi - lo) * rng.gen::<f64>();
    let nz = |rng: &mut dyn rand::RngCore| loop {
        let v = u(rng, -2.0, 2.0);
        if v.abs() >= 0.1 {
            break v;
        }
    };
    match (spec.id, branch.label) {
        (GroupId::A31, "C2_disc_pos") => loop {
            let p = sample_family_params(spec, 2, rng);
            if disc_a31(&p) > 0.1 && (p[1] * p[2]).abs() > 0.01 {
                return p;
            }
        },
        (GroupId::A31, "C2_disc_neg") => loop {
            let p = sample_family_params(spec, 2, rng);
            if disc_a31(&p) < -0.1 {
                return p;
            }
        },
        (GroupId::A31, "C2_parabolic") => loop {
            let a = u(rng, -2.0, 2.0);
            let d = u(rng, -2.0, 2.0);
            if (a - d).abs() < 0.2 {
                continue;
            }
            let c = nz(rng);
            let b = -(a - d) * (a - d) / (4.0 * c);
            return vec![a, b, c, d];
        },
        (GroupId::A31, "C2_b0_d_eq_a") => {
            let a = u(rng, -2.0, 2.0);
            vec![a, 0.0, nz(rng), a]
        }
        (GroupId::A31, "C2_c0_a_eq_d") => {
            let a = u(rng, -2.0, 2.0);
            vec![a, nz(rng), 0.0, a]
        }
        (GroupId::A31, "C2_a_eq_d_bc0") => {
            let a = nz(rng);
            vec![a, 0.0, 0.0, a]
        }
        (GroupId::A31, "C3_c_nonzero") => vec![nz(rng), u(rng, -2.0, 2.0), nz(rng)],
        (GroupId::A31, "C3_c_zero") => vec![nz(rng), u(rng, -2.0, 2.0), 0.0],
        (GroupId::A34, "C1_a_nonzero") => vec![nz(rng), u(rng, -2.0, 2.0), u(rng, -2.0, 2.0)],
        (GroupId::A34, "C1_a_zero") => vec![0.0, nz(rng), nz(rng)],
        (GroupId::A36, "C1_c_nonzero") => vec![u(rng, -2.0, 2.0), u(rng, -2.0, 2.0), nz(rng)],
        (GroupId::A36, "C1_c_zero") => vec![nz(rng), nz(rng), 0.0],
        (GroupId::A38, "C_generic") => loop {
            let p = sample_family_params(spec, 1, rng);
            if p[0] * p[0] + p[2] * p[2] >= 0.04 {
                return p;
            }
        },
        (GroupId::A38, "C_a0_b0") => vec![0.0, 0.0, nz(rng)],
        (GroupId::A38, "C_a0_c0") => vec![0.0, nz(rng), 0.0],
        (GroupId::A39, "C_b0_c0") => vec![nz(rng), 0.0, 0.0],
        _ => sample_family_params(spec, branch.family, rng),
    }
}

/// Minimum margin over the branch's singular loci at the point (denominators
/// by absolute value, log/power arguments by signed value).  Points are
/// accepted when the margin is >= 0.05.
pub fn casimir_margin(spec: &GroupSpec, branch: &CasimirBranch, params: &[f64], up: &[f64]) -> f64 {
    let p = params;
    match (spec.id, branch.label) {
        (GroupId::A31, "C1") => p[0] * up[0] + p[1] * up[1],
        (GroupId::A31, "C2_disc_pos") => {
            let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
            let alpha = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
            let (x, y) = (up[0], up[1]);
            let num = (alpha + a - d) * y - 2.0 * c * x;
            let den = (alpha - a + d) * y + 2.0 * c * x;
            let base2 = (0.5 * (a - d) * y - c * x).powi(2) - 0.25 * alpha * alpha * y * y;
            den.abs().min(num.abs()).min(base2.abs())
        }
        (GroupId::A31, "C2_disc_neg") => up[1].abs(),
        (GroupId::A31, "C2_parabolic") => {
            let (a, _b, c, d) = (p[0], p[1], p[2], p[3]);
            ((d - a) * up[1] + 2.0 * c * up[0]).abs()
        }
        (GroupId::A31, "C2_b0_d_eq_a") => up[0].abs(),
        (GroupId::A31, "C2_c0_a_eq_d") => up[1].abs(),
        (GroupId::A31, "C2_a_eq_d_bc0") => up[1].abs(),
        (GroupId::A31, "C3_c_nonzero") | (GroupId::A31, "C3_c_zero") => up[0].abs(),
        (GroupId::A32, _) => up[0],
        (GroupId::A33, _) => up[0],
        (GroupId::A34, "C1_a_nonzero") => {
            (p[1] * (1.0 - up[0]) + p[0] * up[0] * up[1]).abs()
        }
        (GroupId::A34, "C1_a_zero") => (up[0] - 1.0).abs(),
        (GroupId::A34, "C2") => (up[0] - 1.0).abs(),
        (GroupId::A35, "C1") => spec.rho * p[2] * (up[0] - 1.0) - p[0] * up[2],
        (GroupId::A35, "C2") => 1.0 - 1.0 / up[0],
        (GroupId::A35, "C3") => p[1] * (up[0] - 1.0) - p[0] * up[2],
        (GroupId::A36, "C1_c_nonzero") => {
            let (a, b, c) = (p[0], p[1], p[2]);
            let den = b * (1.0 - up[0]) + a * up[1] - c * up[2];
            den.abs().min(up[1].abs())
        }
        (GroupId::A36, "C1_c_zero") => (up[0] - 1.0).abs(),
        (GroupId::A36, "C2") => 1.0 - up[0],
        (GroupId::A37, "C1_complex") => {
            let mu = spec.mu;
            let (a, b, c) = (p[0], p[1], p[2]);
            // |arg| of the two complex logarithms
            let z1 = cplx_arg1(a, b, c, mu, up);
            let z2 = cplx_arg2(a, b, c, mu, up);
            (z1.0 * z1.0 + z1.1 * z1.1)
                .sqrt()
                .min((z2.0 * z2.0 + z2.1 * z2.1).sqrt())
        }
        (GroupId::A37, "C2") => up[2].abs(),
        (GroupId::A38, "C_generic") => (p[0] * up[0] + p[2] * up[2]).abs(),
        (GroupId::A38, "C_a0_b0") | (GroupId::A38, "C_a0_c0") => up[2].abs(),
        (GroupId::A39, "C_b0_c0") => ((up[1] + up[2]) * 0.5).sin().abs(),
        _ => 1.0,
    }
}

fn cplx_arg1(a: f64, b: f64, c: f64, mu: f64, up: &[f64]) -> (f64, f64) {
    // -2i a (-1 + C - iS) + (i + mu)(ib + c - ic mu)(Y - iZ)
    let (cc, s, y, z) = (up[0], up[1], up[2], up[3]);
    let t1 = (-2.0 * a * s, -2.0 * a * (cc - 1.0));
    let k = mul_c((mu, 1.0), (c, b - c * mu));
    let t2 = mul_c(k, (y, -z));
    (t1.0 + t2.0, t1.1 + t2.1)
}

fn cplx_arg2(a: f64, b: f64, c: f64, mu: f64, up: &[f64]) -> (f64, f64) {
    // 2i a (-1 + C + iS) + (mu - i)(-ib + c + ic mu)(Y + iZ): the conjugate
    // partner of arg1
    let (cc, s, y, z) = (up[0], up[1], up[2], up[3]);
    let t1 = (-2.0 * a * s, 2.0 * a * (cc - 1.0));
    let k = mul_c((mu, -1.0), (c, -(b - c * mu)));
    let t2 = mul_c(k, (y, z));
    (t1.0 + t2.0, t1.1 + t2.1)
}

fn mul_c(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// Real-valued Casimir branches, generic over the scalar.
fn casimir_real<S: Real>(
    spec: &GroupSpec,
    branch: &CasimirBranch,
    p: &[f64],
    up: &[S],
) -> S {
    let l = S::one();
    match (spec.id, branch.label) {
        (GroupId::A31, "C1") => {
            let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
            let (x, y, z) = (up[0], up[1], up[2]);
            let arg = x * con::<S>(a) + y * con::<S>(b);
            (x * con::<S>(2.0 * (b * c - a * d)) + (z + z - x * y) * con::<S>(b * b)
                - arg * arg.ln() * con::<S>(2.0 * d))
                / arg
        }
        (GroupId::A31, "C2_disc_pos") => {
            // base2 = -num*den/4 exactly, so the two power bases cannot
            // both be positive; the powers act on absolute values, which
            // leaves dC . Pi = 0 untouched.
            let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
            let alpha = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
            let (x, y) = (up[0], up[1]);
            let num = y * con::<S>(alpha + a - d) - x * con::<S>(2.0 * c);
            let den = y * con::<S>(alpha - a + d) + x * con::<S>(2.0 * c);
            let half = y * con::<S>(0.5 * (a - d)) - x * con::<S>(c);
            let base2 = half * half - y * y * con::<S>(alpha * alpha / 4.0);
            (num / den).abs().powf(a + d) * base2.abs().powf(alpha)
        }
        (GroupId::A31, "C2_disc_neg") => {
            let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
            let alpha = (-(a - d) * (a - d) - 4.0 * b * c).sqrt();
            let (x, y) = (up[0], up[1]);
            let at = ((x * con::<S>(2.0 * c) - y * con::<S>(a - d)) / (y * con::<S>(alpha))).atan();
            let half = y * con::<S>(0.5 * (a - d)) - x * con::<S>(c);
            let lg = (y * y * con::<S>(alpha * alpha / 4.0) + half * half).ln();
            at * con::<S>(a + d) + lg * con::<S>(alpha / 2.0)
        }
        (GroupId::A31, "C2_parabolic") => {
            let (a, _b, c, d) = (p[0], p[1], p[2], p[3]);
            let (x, y) = (up[0], up[1]);
            let den = (y * con::<S>(d - a) + x * con::<S>(2.0 * c)) * con::<S>(a - d);
            let num = x * con::<S>(2.0 * (a + d) * c);
            (num / den).exp() / (x * con::<S>(2.0 * c) + y * con::<S>(d - a))
        }
        (GroupId::A31, "C2_b0_d_eq_a") => {
            let (a, c) = (p[0], p[2]);
            let (x, y) = (up[0], up[1]);
            x * (-(y * con::<S>(a)) / (x * con::<S>(c))).exp()
        }
        (GroupId::A31, "C2_c0_a_eq_d") => {
            let (a, b) = (p[0], p[1]);
            let (x, y) = (up[0], up[1]);
            y * (-(x * con::<S>(a)) / (y * con::<S>(b))).exp()
        }
        (GroupId::A31, "C2_a_eq_d_bc0") => up[0] / up[1],
        (GroupId::A31, "C3_c_nonzero") => {
            let (a, b, c) = (p[0], p[1], p[2]);
            let (x, y, z) = (up[0], up[1], up[2]);
            x * ((y * con::<S>(2.0 * b) + (x * y - (z + z)) * con::<S>(a))
                / (x * con::<S>(2.0 * c)))
                .exp()
        }
        (GroupId::A31, "C3_c_zero") => {
            let (a, b) = (p[0], p[1]);
            let (x, y, z) = (up[0], up[1], up[2]);
            (y * con::<S>(2.0 * b) + (x * y - (z + z)) * con::<S>(a)) / x
        }
        (GroupId::A32, _) => {
            let (a, b, c) = (p[0], p[1], p[2]);
            let (x, y) = (up[0], up[1]);
            ((l + x * x) * con::<S>(2.0 * c)
                + y * ((x - l) * con::<S>(-2.0 * a) + y * con::<S>(b)))
                / x
        }
        (GroupId::A33, _) => {
            let (a, b, c, d, e, f) = (p[0], p[1], p[2], p[3], p[4], p[5]);
            let (x, y, z) = (up[0], up[1], up[2]);
            ((l + x * x) * con::<S>(f)
                + (x - l) * y * con::<S>(d)
                + y * y * con::<S>(e)
                + z * (l - x) * con::<S>(a)
                + z * (y * con::<S>(b) + z * con::<S>(c)))
                / x
        }
        (GroupId::A34, "C1_a_nonzero") => {
            let (a, b, c) = (p[0], p[1], p[2]);
            let (x, y, z) = (up[0], up[1], up[2]);
            ((x - l) * con::<S>(c) + z * con::<S>(a))
                / ((l - x) * con::<S>(b) + x * y * con::<S>(a))
        }
        (GroupId::A34, "C1_a_zero") => {
            let (b, c) = (p[1], p[2]);
            let (x, y, z) = (up[0], up[1], up[2]);
            (z * con::<S>(b) + x * y * con::<S>(c)) / (x - l)
        }
        (GroupId::A34, "C2") => {
            let (a, b, c) = (p[0], p[1], p[2]);
            let (x, y, z) = (up[0], up[1], up[2]);
            let e1 = ((x * y * con::<S>(b) + z * con::<S>(a)) / ((x - l) * con::<S>(c))).exp();
            // X^{X/(X-1)} written as exp(ln X . X/(X-1))
            e1 * (x.ln() * x / (x - l)).exp() / (x - l)
        }
        (GroupId::A35, "C1") => {
            let rho = spec.rho;
            let (a, b, c) = (p[0], p[1], p[2]);
            let (x, y, z) = (up[0], up[1], up[2]);
            x.powf(-rho)
                * ((l - x.powf(rho)) * con::<S>(b) + y * con::<S>(a))
                * ((x - l) * con::<S>(rho * c) - z * con::<S>(a)).powf(rho)
        }
        (GroupId::A35, "C2") => {
            let rho = spec.rho;
            let (a, b) = (p[0], p[1]);
            let (x, y) = (up[0], up[1]);
            (l - l / x).powf(rho) * ((l - x.powf(rho)) * con::<S>(b) + y * con::<S>(rho * a))
        }
        (GroupId::A35, "C3") => {
            let rho = spec.rho;
            let (a, b) = (p[0], p[1]);
            let (x, _y, z) = (up[0], up[1], up[2]);
            (x.powf(-rho) - l) * ((x - l) * con::<S>(b) - z * con::<S>(a)).powf(rho)
        }
        (GroupId::A36, "C1_c_nonzero") => {
            let (a, b, c) = (p[0], p[1], p[2]);
            let (cc, s, y, z) = (up[0], up[1], up[2], up[3]);
            let num = z * con::<S>(c) - (l - cc) * con::<S>(a) + s * con::<S>(b);
            let den = (l - cc) * con::<S>(b) + s * con::<S>(a) - y * con::<S>(c);
            (num / den).atan() * con::<S>(2.0) - (cc / s).atan()
        }
        (GroupId::A36, "C1_c_zero") => {
            let (a, b) = (p[0], p[1]);
            let (cc, s, y, z) = (up[0], up[1], up[2], up[3]);
            y * con::<S>(a) - z * con::<S>(b)
                + s * (z * con::<S>(a) + y * con::<S>(b)) / (cc - l)
        }
        (GroupId::A36, "C2") => {
            let (a, b, c) = (p[0], p[1], p[2]);
            let (cc, s, y, z) = (up[0], up[1], up[2], up[3]);
            (l - cc).ln() * con::<S>(c) + y * con::<S>(a) - z * con::<S>(b)
                + s * (z * con::<S>(a) + y * con::<S>(b) + angle(cc, s) * con::<S>(c)) / (cc - l)
        }
        (GroupId::A37, "C2") => {
            // the inner sign pairs with the {Y,Z}_2 sign above so that
            // dC . Pi = 0 holds for the multiplicative bracket
            let mu = spec.mu;
            let (cc, s, y, z) = (up[0], up[1], up[2], up[3]);
            (s / cc).atan()
                - ((z / y).atan() - (y * y + z * z).ln() * con::<S>(mu / 2.0))
                    * con::<S>(2.0 / (1.0 + mu * mu))
        }
        (GroupId::A38, "C_generic") => {
            let (a, b, c) = (p[0], p[1], p[2]);
            let (x, y, z, w) = (up[0], up[1], up[2], up[3]);
            ((w - y) * con::<S>(a) - z * con::<S>(b)) / (x * con::<S>(a) + z * con::<S>(c))
        }
        (GroupId::A38, "C_a0_b0") => (up[3] - up[1]) / up[2],
        (GroupId::A38, "C_a0_c0") => up[0] / up[2],
        (GroupId::A39, "C_b0_c0") => {
            let (x, y, z) = (up[0], up[1], up[2]);
            let half = con::<S>(0.5);
            x * half - (((y - z) * half).sin() / ((y + z) * half).sin()).atan()
        }
        _ => panic!("not a real-valued branch: {}", branch.label),
    }
}

/// Gradient (wrt free coordinates) of the complex A3,7 Casimir C1.
/// Constant divisors inside the logarithms only shift the value and blow up
/// at b = c = 0, so they are dropped.
fn casimir_a37_c1(spec: &GroupSpec, p: &[f64], upj: &[Jet<3>]) -> CJet<3> {
    let mu = spec.mu;
    let (a, b, c) = (p[0], p[1], p[2]);
    let (cc, s, y, z) = (upj[0], upj[1], upj[2], upj[3]);
    let one = Jet::constant(1.0);

    let cj = |re: Jet<3>, im: Jet<3>| CJet { re, im };
    let kc = |re: f64, im: f64| CJet::<3>::constant(re, im);

    // arg1 = -2i a (-1 + C - iS) + (i + mu)(ib + c - ic mu)(Y - iZ)
    let arg1 = kc(0.0, -2.0 * a) * cj(cc - one, -s)
        + kc(mu, 1.0) * kc(c, b - c * mu) * cj(y, -z);
    // arg2 is the conjugate partner of arg1: any other coefficient
    // breaks dC . Pi = 0
    let arg2 = kc(0.0, 2.0 * a) * cj(cc - one, s)
        + kc(mu, -1.0) * kc(c, -(b - c * mu)) * cj(y, z);

    let inv1 = kc(1.0, 0.0) / kc(mu, 1.0); // 1/(i + mu)
    let inv2 = kc(1.0, 0.0) / kc(mu, -1.0); // 1/(-i + mu)
    CJet::from_real((s / cc).atan()) + inv1 * arg1.ln() + inv2 * arg2.ln()
}

/// Casimir invariance residual at free coordinates `u`:
/// max_b |sum_a d_a C . Pi_u^{ab}|, with complex C handled per component.
/// Returns (residual, scale).
pub fn casimir_residual(
    spec: &GroupSpec,
    branch: &CasimirBranch,
    params: &[f64],
    u: [f64; 3],
) -> Result<(f64, f64), PoissonError> {
    if !casimir_guard(spec.id, branch, params) {
        return Err(PoissonError::BranchGuard {
            group: spec.id.name(),
            branch: branch.label,
        });
    }
    let up_val = upper_from_free(spec, &u);
    let margin = casimir_margin(spec, branch, params, &up_val);
    if margin < 0.05 {
        return Err(PoissonError::SingularLocus {
            group: spec.id.name(),
            branch: branch.label,
            margin,
        });
    }
    let uj: [Jet<3>; 3] = [Jet::var(u[0], 0), Jet::var(u[1], 1), Jet::var(u[2], 2)];
    let pi = bivector_free(spec, branch.family, params, &uj);
    let upj = upper_from_free(spec, &uj);

    let grads: Vec<[f64; 3]> = if spec.id == GroupId::A37 && branch.label == "C1_complex" {
        let cval = casimir_a37_c1(spec, params, &upj);
        vec![cval.re.d, cval.im.d]
    } else {
        vec![casimir_real(spec, branch, params, &upj).d]
    };

    let mut res: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for g in &grads {
        for b in 0..3 {
            let mut s = 0.0;
            let mut mag = 0.0;
            for a in 0..3 {
                let t = g[a] * pi[a][b].v;
                s += t;
                mag += t.abs();
            }
            res = res.max(s.abs());
            scale = scale.max(mag);
        }
    }
    Ok((res, 1.0 + scale))
}

/// Value of a real Casimir branch at a point (anchor tests).
pub fn casimir_value(
    spec: &GroupSpec,
    branch: &CasimirBranch,
    params: &[f64],
    point: &GroupPoint,
) -> f64 {
    let up: Vec<f64> = point.upper.clone();
    casimir_real(spec, branch, params, &up)
}

/// Rejection-sample a point where the branch is regular.
pub fn sample_casimir_point(
    spec: &GroupSpec,
    branch: &CasimirBranch,
    params: &[f64],
    rng: &mut impl Rng,
) -> Option<[f64; 3]> {
    for _ in 0..2000 {
        let u = group::sample_free(spec, rng);
        let up = upper_from_free(spec, &u);
        if casimir_margin(spec, branch, params, &up) >= 0.05 {
            return Some(u);
        }
    }
    None
}

/// Sampling box used by family-level checks, with the A3,7 pair margin.
pub fn sample_family_point(spec: &GroupSpec, rng: &mut impl Rng) -> GroupPoint {
    let u = group::sample_free(spec, rng);
    point_from_free(spec, u)
}

pub fn angle_free(spec: &GroupSpec, pt: &GroupPoint) -> [f64; 3] {
    free_from_upper(spec, pt.upper.as_slice())
}

/// `true` when the A3,9 pair and product sit inside the restricted domain of
/// the closed-form coproduct (x, z in (0, pi), |y| < pi/2 - 0.1,
/// and away from sin(Delta y) = 1).
pub fn a39_restricted_domain_ok(p: &GroupPoint, q: &GroupPoint, pq: &GroupPoint) -> bool {
    let in_dom = |pt: &GroupPoint| {
        pt.upper[0] > 0.05
            && pt.upper[0] < std::f64::consts::PI - 0.05
            && pt.upper[2] > 0.05
            && pt.upper[2] < std::f64::consts::PI - 0.05
            && pt.upper[1].abs() < FRAC_PI_2 - 0.1
    };
    in_dom(p) && in_dom(q) && in_dom(pq) && (1.0 - pq.upper[1].sin()) > 0.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{identity_point, point_from_upper, sample_pair};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_families() -> Vec<(GroupSpec, usize)> {
        let mut v = Vec::new();
        for id in GroupId::ALL {
            let spec = GroupSpec::new(id);
            for &f in family_indices(id) {
                v.push((spec.clone(), f));
            }
        }
        v
    }

    #[test]
    fn sixteen_families_total() {
        assert_eq!(all_families().len(), 16);
    }

    #[test]
    fn a32_bivector_anchor() {
        // (a,b,c) = (1,1,1) at (X,Y,Z) = (2,1,0): {X,Y}=0, {X,Z}=0, {Y,Z}=-1.5
        let spec = GroupSpec::new(GroupId::A32);
        let pt = point_from_upper(&spec, vec![2.0, 1.0, 0.0]).unwrap();
        let b = bivector_eval(&spec, 1, &[1.0, 1.0, 1.0], &pt).unwrap();
        assert_eq!(b[0][1], 0.0);
        assert!((b[0][2] - 0.0).abs() < 1e-15);
        assert!((b[1][2] - (-1.5)).abs() < 1e-15);
    }

    #[test]
    fn param_constraint_errors() {
        let spec = GroupSpec::new(GroupId::A31);
        let pt = identity_point(&spec);
        let err = bivector_eval(&spec, 1, &[1.0, 0.0, 1.0, 1.0], &pt).unwrap_err();
        assert!(err.to_string().contains("b1 != 0"));
    }

    #[test]
    fn bivectors_vanish_at_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (spec, fam) in all_families() {
            for _ in 0..20 {
                let params = sample_family_params(&spec, fam, &mut rng);
                let v = identity_vanishing(&spec, fam, &params);
                assert!(v <= 1e-12, "{} family {}: {}", spec.id.name(), fam, v);
            }
        }
    }

    #[test]
    fn bivector_upper_is_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for (spec, fam) in all_families() {
            let params = sample_family_params(&spec, fam, &mut rng);
            let pt = sample_family_point(&spec, &mut rng);
            let b = bivector_upper(&spec, fam, &params, pt.upper.as_slice());
            for i in 0..spec.n_upper() {
                for j in 0..spec.n_upper() {
                    assert_eq!(b[i][j], -b[j][i]);
                }
            }
        }
    }

    /// Independent central-difference Jacobiator used to cross-check the
    /// jet-based implementation.
    fn fd_jacobiator(spec: &GroupSpec, fam: usize, params: &[f64], u: [f64; 3]) -> f64 {
        let h = 1e-5;
        let eval = |u: [f64; 3]| {
            let uj = [Jet::<3>::constant(u[0]), Jet::constant(u[1]), Jet::constant(u[2])];
            let b = bivector_free(spec, fam, params, &uj);
            let mut out = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] = b[i][j].v;
                }
            }
            out
        };
        let b0 = eval(u);
        let mut grads = [[[0.0; 3]; 3]; 3]; // [d][i][j]
        for d in 0..3 {
            let mut up = u;
            let mut dn = u;
            up[d] += h;
            dn[d] -= h;
            let (bu, bd) = (eval(up), eval(dn));
            for i in 0..3 {
                for j in 0..3 {
                    grads[d][i][j] = (bu[i][j] - bd[i][j]) / (2.0 * h);
                }
            }
        }
        let mut res: f64 = 0.0;
        for a in 0..3 {
            for b in (a + 1)..3 {
                for c in (b + 1)..3 {
                    let mut s = 0.0;
                    for d in 0..3 {
                        s += b0[d][a] * grads[d][b][c]
                            + b0[d][b] * grads[d][c][a]
                            + b0[d][c] * grads[d][a][b];
                    }
                    res = res.max(s.abs());
                }
            }
        }
        res
    }

    #[test]
    fn jacobiator_anchors() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        // A3,2: Jacobi automatically satisfied
        let spec = GroupSpec::new(GroupId::A32);
        for _ in 0..20 {
            let params = sample_family_params(&spec, 1, &mut rng);
            let pt = sample_family_point(&spec, &mut rng);
            let u = angle_free(&spec, &pt);
            let (res, scale) = jacobiator(&spec, 1, &params, u);
            assert!(res <= 1e-10 * scale);
        }
        // zero bivector (A3,1 family 2 with zero parameters)
        let spec1 = GroupSpec::new(GroupId::A31);
        let (res, _) = jacobiator(&spec1, 2, &[0.0; 4], [0.3, -0.2, 1.1]);
        assert_eq!(res, 0.0);
        // A3,1 family 1 anchor point, against the finite-difference oracle
        let params = [1.0, 2.0, 0.5, -1.0];
        let u = [0.3, 0.7, -0.4];
        let (res, _) = jacobiator(&spec1, 1, &params, u);
        assert!(res <= 1e-10, "jacobiator {res}");
        assert!(fd_jacobiator(&spec1, 1, &params, u) <= 1e-5);
    }

    #[test]
    fn jacobiator_matches_finite_differences_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for (spec, fam) in all_families() {
            for _ in 0..3 {
                let params = sample_family_params(&spec, fam, &mut rng);
                let pt = sample_family_point(&spec, &mut rng);
                let u = angle_free(&spec, &pt);
                let (jet_res, scale) = jacobiator(&spec, fam, &params, u);
                let fd = fd_jacobiator(&spec, fam, &params, u);
                assert!(
                    (jet_res - fd).abs() <= 1e-5 * scale.max(1.0),
                    "{} family {}: jet {} vs fd {}",
                    spec.id.name(),
                    fam,
                    jet_res,
                    fd
                );
            }
        }
    }

    #[test]
    fn all_families_satisfy_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for (spec, fam) in all_families() {
            for _ in 0..10 {
                let params = sample_family_params(&spec, fam, &mut rng);
                for _ in 0..20 {
                    let pt = sample_family_point(&spec, &mut rng);
                    let u = angle_free(&spec, &pt);
                    let (res, scale) = jacobiator(&spec, fam, &params, u);
                    assert!(
                        res <= 1e-9 * scale,
                        "{} family {}: {} vs scale {}",
                        spec.id.name(),
                        fam,
                        res,
                        scale
                    );
                }
            }
        }
    }

    #[test]
    fn multiplicativity_all_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for (spec, fam) in all_families() {
            for _ in 0..5 {
                let params = sample_family_params(&spec, fam, &mut rng);
                for _ in 0..10 {
                    let (p, q, _) = sample_pair(&spec, &mut rng);
                    let (res, scale) =
                        multiplicativity_residual(&spec, fam, &params, &p, &q).unwrap();
                    assert!(
                        res <= 1e-9 * scale,
                        "{} family {}: res {} scale {}",
                        spec.id.name(),
                        fam,
                        res,
                        scale
                    );
                }
            }
        }
    }

    #[test]
    fn multiplicativity_with_identity_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for (spec, fam) in all_families() {
            let params = sample_family_params(&spec, fam, &mut rng);
            let p = sample_family_point(&spec, &mut rng);
            let e = identity_point(&spec);
            let (res, _) = multiplicativity_residual(&spec, fam, &params, &p, &e).unwrap();
            assert!(res <= 1e-12, "{} family {}: {}", spec.id.name(), fam, res);
        }
    }

    #[test]
    fn a32_casimir_anchor() {
        let spec = GroupSpec::new(GroupId::A32);
        let branch = casimir_branches(GroupId::A32)[0];
        let pt = point_from_upper(&spec, vec![2.0, 1.0, 0.0]).unwrap();
        let v = casimir_value(&spec, &branch, &[1.0, 1.0, 1.0], &pt);
        assert!((v - 4.5).abs() < 1e-14);
        let u = angle_free(&spec, &pt);
        let (res, scale) = casimir_residual(&spec, &branch, &[1.0, 1.0, 1.0], u).unwrap();
        assert!(res <= 1e-10 * scale);
    }

    #[test]
    fn a38_branch_casimirs() {
        let spec = GroupSpec::new(GroupId::A38);
        // (a,b,c) = (0,0,1): branch (a=b=0), Casimir (W - Y)/Z
        let branch = CasimirBranch { family: 1, label: "C_a0_b0" };
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..20 {
            let u = sample_casimir_point(&spec, &branch, &[0.0, 0.0, 1.0], &mut rng).unwrap();
            let (res, scale) = casimir_residual(&spec, &branch, &[0.0, 0.0, 1.0], u).unwrap();
            assert!(res <= 1e-10 * scale);
        }
        // wrong branch guard errors out
        assert!(matches!(
            casimir_residual(&spec, &branch, &[1.0, 0.0, 1.0], [0.1, 1.0, 0.2]),
            Err(PoissonError::BranchGuard { .. })
        ));
        // (a,b,c) = (0,1,0) selects the X/Z branch (a = c = 0)
        let xz = CasimirBranch { family: 1, label: "C_a0_c0" };
        assert!(casimir_guard(GroupId::A38, &xz, &[0.0, 1.0, 0.0]));
        for _ in 0..20 {
            let u = sample_casimir_point(&spec, &xz, &[0.0, 1.0, 0.0], &mut rng).unwrap();
            let (res, scale) = casimir_residual(&spec, &xz, &[0.0, 1.0, 0.0], u).unwrap();
            assert!(res <= 1e-10 * scale);
        }
    }

    #[test]
    fn every_casimir_branch_annihilates_its_bracket() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for id in GroupId::ALL {
            let spec = GroupSpec::new(id);
            for branch in casimir_branches(id) {
                for _ in 0..5 {
                    let params = sample_casimir_params(&spec, &branch, &mut rng);
                    assert!(casimir_guard(id, &branch, &params), "{} {}", id.name(), branch.label);
                    let mut done = 0;
                    while done < 10 {
                        let Some(u) = sample_casimir_point(&spec, &branch, &params, &mut rng)
                        else {
                            break;
                        };
                        let (res, scale) = casimir_residual(&spec, &branch, &params, u).unwrap();
                        assert!(
                            res <= 1e-8 * scale,
                            "{} {}: res {} scale {}",
                            id.name(),
                            branch.label,
                            res,
                            scale
                        );
                        done += 1;
                    }
                    assert!(done > 0, "{} {}: no regular points found", id.name(), branch.label);
                }
            }
        }
    }

    #[test]
    fn constant_function_has_zero_casimir_residual() {
        // gradient of a constant vanishes, so sum_a d_a C Pi^{ab} = 0 exactly
        let spec = GroupSpec::new(GroupId::A33);
        let uj: [Jet<3>; 3] = [Jet::var(0.7, 0), Jet::var(0.1, 1), Jet::var(-0.5, 2)];
        let pi = bivector_free(&spec, 1, &[1.0, 0.5, -0.3, 0.2, 1.1, 0.4], &uj);
        let c = Jet::<3>::constant(7.0);
        for b in 0..3 {
            let mut s = 0.0;
            for a in 0..3 {
                s += c.d[a] * pi[a][b].v;
            }
            assert_eq!(s, 0.0);
        }
    }
}

