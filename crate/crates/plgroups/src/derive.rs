//! Numerical re-derivation of the multiplicative quadratic Ansatz: brackets
//! of the matrix-entry coordinate functions are expanded over products of
//! matrix entries, multiplicativity is imposed at sampled pairs as a linear
//! system on the coefficients, and the nullspace is extracted by SVD.
//! A Jacobi filter then probes the quadratic constraints on the span.

use crate::algebra::GroupId;
use crate::group::{
    dfree_dupper, free_from_upper, sample_pair, sample_point, upper_from_free,
    GroupPoint, GroupSpec,
};
use crate::jet::{Jet, Real};
use crate::poisson::{bivector_free, bivector_upper};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DeriveError {
    #[error("nullspace of an empty matrix requested")]
    EmptyMatrix,
}

/// A quadratic monomial in the matrix entries (or the constant function).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monomial {
    One,
    /// Product of the entries at two (row, col) positions.
    Prod((usize, usize), (usize, usize)),
}

/// The fixed Ansatz data of one group: which matrix entries exist, which
/// coordinate functions get bracketed, and a numerically independent
/// monomial basis.
#[derive(Debug, Clone)]
pub struct AnsatzSetup {
    pub entry_positions: Vec<(usize, usize)>,
    pub monomials: Vec<Monomial>,
    pub n_pairfns: usize,
    pub pairs: Vec<(usize, usize)>,
}

/// Structurally nonzero matrix entries of the group's chart.
fn entry_positions(id: GroupId) -> Vec<(usize, usize)> {
    match id {
        GroupId::A31 => vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)],
        GroupId::A32 => vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)],
        GroupId::A33 | GroupId::A34 | GroupId::A35 => {
            vec![(0, 0), (0, 2), (1, 1), (1, 2), (2, 2)]
        }
        GroupId::A36 | GroupId::A37 => {
            vec![(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 2)]
        }
        GroupId::A38 => vec![(0, 0), (0, 1), (1, 0), (1, 1)],
        GroupId::A39 => (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).collect(),
    }
}

/// The coordinate functions whose pairwise brackets carry Ansatz
/// coefficients: the upper coordinates, except for A3,9 where the nine
/// matrix entries are used (the chart there is angular).
pub fn pairfn_values(spec: &GroupSpec, pt: &GroupPoint) -> Vec<f64> {
    if spec.id == GroupId::A39 {
        pt.matrix.iter().flatten().copied().collect()
    } else {
        pt.upper.clone()
    }
}

fn pairfn_from_matrix<S: Real>(spec: &GroupSpec, m: &[[S; 3]; 3]) -> Vec<S> {
    if spec.id == GroupId::A39 {
        m.iter().flatten().copied().collect()
    } else {
        crate::group::upper_from_matrix(spec, m)
    }
}

/// d(free)/d(pair function), any smooth extension off the constraint surface.
fn dfree_dpairfn(spec: &GroupSpec, pt: &GroupPoint) -> Vec<Vec<f64>> {
    if spec.id == GroupId::A39 {
        let m = &pt.matrix;
        let mut g = vec![vec![0.0; 9]; 3];
        // x = atan2(-M01, M00), y = asin(M02), z = atan2(-M12, M22)
        let d01 = m[0][0] * m[0][0] + m[0][1] * m[0][1];
        g[0][0] = m[0][1] / d01;
        g[0][1] = -m[0][0] / d01;
        g[1][2] = 1.0 / (1.0 - m[0][2] * m[0][2]).sqrt();
        let d12 = m[1][2] * m[1][2] + m[2][2] * m[2][2];
        g[2][5] = -m[2][2] / d12;
        g[2][8] = m[1][2] / d12;
        g
    } else {
        dfree_dupper(spec, &pt.upper)
    }
}

fn monomial_value<S: Real>(mono: Monomial, m: &[[S; 3]; 3]) -> S {
    match mono {
        Monomial::One => S::one(),
        Monomial::Prod((a, b), (c, d)) => m[a][b] * m[c][d],
    }
}

/// Build the Ansatz setup, deduplicating monomials that are numerically
/// dependent as functions on the group (chart constraints create many).
pub fn ansatz_setup(spec: &GroupSpec) -> AnsatzSetup {
    let entries = entry_positions(spec.id);
    let mut candidates = vec![Monomial::One];
    for i in 0..entries.len() {
        for j in i..entries.len() {
            candidates.push(Monomial::Prod(entries[i], entries[j]));
        }
    }
    // canonical evaluation sample, independent of user seeds
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0DE + spec.id as u64);
    let pts: Vec<GroupPoint> = (0..60).map(|_| sample_point(spec, &mut rng)).collect();
    let mut cols: Vec<DVector<f64>> = candidates
        .iter()
        .map(|&mono| {
            DVector::from_iterator(pts.len(), pts.iter().map(|p| monomial_value(mono, &p.matrix)))
        })
        .collect();
    // modified Gram-Schmidt column selection
    let mut keep = Vec::new();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for (idx, col) in cols.iter_mut().enumerate() {
        let orig = col.norm();
        for b in &basis {
            let proj = b.dot(col);
            *col -= b * proj;
        }
        if col.norm() > 1e-7 * orig.max(1.0) {
            basis.push(col.normalize());
            keep.push(candidates[idx]);
        }
    }
    let n_pairfns = if spec.id == GroupId::A39 { 9 } else { spec.n_upper() };
    let mut pairs = Vec::new();
    for a in 0..n_pairfns {
        for b in (a + 1)..n_pairfns {
            pairs.push((a, b));
        }
    }
    AnsatzSetup {
        entry_positions: entries,
        monomials: keep,
        n_pairfns,
        pairs,
    }
}

impl AnsatzSetup {
    pub fn n_unknowns(&self) -> usize {
        self.pairs.len() * self.monomials.len()
    }

    fn unknown(&self, pair_idx: usize, mono_idx: usize) -> usize {
        pair_idx * self.monomials.len() + mono_idx
    }
}

/// One multiplicativity constraint row per (sample pair, coordinate pair):
/// the linear functional on the Ansatz coefficients given by LHS - RHS of
/// the Poisson-map identity at that sample.
pub fn multiplicativity_matrix(
    spec: &GroupSpec,
    setup: &AnsatzSetup,
    samples: &[(GroupPoint, GroupPoint, GroupPoint)],
) -> DMatrix<f64> {
    let nf = setup.n_pairfns;
    let n_unknowns = setup.n_unknowns();
    let mut rows = Vec::with_capacity(samples.len() * setup.pairs.len() * n_unknowns);

    for (p, q, pq) in samples {
        // K[alpha][delta] = d F_alpha(pq) / d F_delta(p) (and same for q),
        // through the free coordinates
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
        let mp = crate::group::matrix_from_upper(spec, &upper_from_free(spec, &upj));
        let mq = crate::group::matrix_from_upper(spec, &upper_from_free(spec, &uqj));
        let mprod = crate::group::mat3_mul_s(&mp, &mq);
        let fprod = pairfn_from_matrix(spec, &mprod);
        let gp = dfree_dpairfn(spec, p);
        let gq = dfree_dpairfn(spec, q);
        let mut kp = vec![vec![0.0; nf]; nf];
        let mut kq = vec![vec![0.0; nf]; nf];
        for alpha in 0..nf {
            for delta in 0..nf {
                let mut sp = 0.0;
                let mut sq = 0.0;
                for a in 0..3 {
                    sp += fprod[alpha].d[a] * gp[a][delta];
                    sq += fprod[alpha].d[3 + a] * gq[a][delta];
                }
                kp[alpha][delta] = sp;
                kq[alpha][delta] = sq;
            }
        }
        let mono_p: Vec<f64> = setup.monomials.iter().map(|&m| monomial_value(m, &p.matrix)).collect();
        let mono_q: Vec<f64> = setup.monomials.iter().map(|&m| monomial_value(m, &q.matrix)).collect();
        let mono_pq: Vec<f64> = setup.monomials.iter().map(|&m| monomial_value(m, &pq.matrix)).collect();

        for &(alpha, beta) in &setup.pairs {
            let mut row = vec![0.0; n_unknowns];
            for (pair_idx, &(delta, eps)) in setup.pairs.iter().enumerate() {
                let wp = kp[alpha][delta] * kp[beta][eps] - kp[alpha][eps] * kp[beta][delta];
                let wq = kq[alpha][delta] * kq[beta][eps] - kq[alpha][eps] * kq[beta][delta];
                for m_idx in 0..setup.monomials.len() {
                    let mut v = wp * mono_p[m_idx] + wq * mono_q[m_idx];
                    if (delta, eps) == (alpha, beta) {
                        v -= mono_pq[m_idx];
                    }
                    if v != 0.0 {
                        row[setup.unknown(pair_idx, m_idx)] = v;
                    }
                }
            }
            rows.push(row);
        }
    }
    DMatrix::from_row_iterator(
        rows.len(),
        n_unknowns,
        rows.iter().flat_map(|r| r.iter().copied()),
    )
}

/// Orthonormal basis of the right nullspace: right-singular vectors whose
/// singular value is below `sv_tol` times the largest one.
pub fn nullspace(mat: &DMatrix<f64>, sv_tol: f64) -> Result<Vec<DVector<f64>>, DeriveError> {
    if mat.nrows() == 0 || mat.ncols() == 0 {
        return Err(DeriveError::EmptyMatrix);
    }
    let svd = mat.clone().svd(false, true);
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut basis = Vec::new();
    let k = svd.singular_values.len();
    for i in 0..k {
        if svd.singular_values[i] <= sv_tol * smax.max(1e-300) {
            basis.push(vt.row(i).transpose());
        }
    }
    // columns beyond min(m, n) have singular value exactly zero
    for i in k..mat.ncols() {
        basis.push(vt.row(i).transpose());
    }
    Ok(basis)
}

/// Largest principal angle between two subspaces given by orthonormal bases.
pub fn subspace_angle(b1: &[DVector<f64>], b2: &[DVector<f64>]) -> f64 {
    if b1.is_empty() || b2.is_empty() || b1.len() != b2.len() {
        return std::f64::consts::FRAC_PI_2;
    }
    let m1 = DMatrix::from_columns(&b1.to_vec());
    let m2 = DMatrix::from_columns(&b2.to_vec());
    let prod = m1.transpose() * m2;
    let svd = prod.svd(false, false);
    let smin = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    smin.min(1.0).acos()
}

/// Bracket matrix of the pair functions of a family at a point.
fn family_pairfn_bracket(
    spec: &GroupSpec,
    family: usize,
    params: &[f64],
    pt: &GroupPoint,
) -> Vec<Vec<f64>> {
    if spec.id != GroupId::A39 {
        let b = bivector_upper(spec, family, params, pt.upper.as_slice());
        let n = spec.n_upper();
        return (0..n).map(|i| (0..n).map(|j| b[i][j]).collect()).collect();
    }
    // A3,9: entry brackets {M_ab, M_cd} via the chain rule through the angles
    let u = free_from_upper(spec, pt.upper.as_slice());
    let uj: [Jet<3>; 3] = [Jet::var(u[0], 0), Jet::var(u[1], 1), Jet::var(u[2], 2)];
    let pi = bivector_free(spec, family, params, &uj);
    let m = crate::group::matrix_from_upper(spec, &upper_from_free(spec, &uj));
    let flat: Vec<Jet<3>> = m.iter().flatten().copied().collect();
    let mut out = vec![vec![0.0; 9]; 9];
    for i in 0..9 {
        for j in 0..9 {
            let mut s = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    s += flat[i].d[a] * pi[a][b].v * flat[j].d[b];
                }
            }
            out[i][j] = s;
        }
    }
    out
}

/// Least-squares fit of a family instance onto the Ansatz monomials.
/// Returns (coefficient vector, relative fit residual).
pub fn family_coefficients(
    spec: &GroupSpec,
    setup: &AnsatzSetup,
    family: usize,
    params: &[f64],
    rng: &mut impl Rng,
) -> (DVector<f64>, f64) {
    let n_pts = 3 * setup.monomials.len().max(40);
    let pts: Vec<GroupPoint> = (0..n_pts).map(|_| sample_point(spec, rng)).collect();
    let mono_vals: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| setup.monomials.iter().map(|&m| monomial_value(m, &p.matrix)).collect())
        .collect();
    let brackets: Vec<Vec<Vec<f64>>> = pts
        .iter()
        .map(|p| family_pairfn_bracket(spec, family, params, p))
        .collect();

    let nm = setup.monomials.len();
    let mut coeffs = DVector::zeros(setup.n_unknowns());
    let mut worst_rel = 0.0f64;
    let a = DMatrix::from_row_iterator(
        n_pts,
        nm,
        mono_vals.iter().flat_map(|r| r.iter().copied()),
    );
    let svd = a.clone().svd(true, true);
    for (pair_idx, &(alpha, beta)) in setup.pairs.iter().enumerate() {
        let b = DVector::from_iterator(n_pts, brackets.iter().map(|m| m[alpha][beta]));
        let scale = 1.0 + b.amax();
        let sol = svd.solve(&b, 1e-12).expect("SVD solve");
        let resid = (&a * &sol - &b).amax();
        worst_rel = worst_rel.max(resid / scale);
        for m_idx in 0..nm {
            coeffs[setup.unknown(pair_idx, m_idx)] = sol[m_idx];
        }
    }
    (coeffs, worst_rel)
}

/// Relative distance from `v` to the span of the orthonormal `basis`.
pub fn projection_residual(v: &DVector<f64>, basis: &[DVector<f64>]) -> f64 {
    let norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let mut out = v.clone();
    for b in basis {
        let p = b.dot(v);
        out -= b * p;
    }
    out.norm() / norm
}

/// The Ansatz bracket of a coefficient vector, pushed to free coordinates,
/// on jet scalars (so the Jacobi filter can differentiate it).
fn ansatz_bivector_free(
    spec: &GroupSpec,
    setup: &AnsatzSetup,
    coeffs: &DVector<f64>,
    u: &[Jet<3>; 3],
) -> [[Jet<3>; 3]; 3] {
    let m = crate::group::matrix_from_upper(spec, &upper_from_free(spec, u));
    let fv = pairfn_from_matrix(spec, &m);
    let nf = setup.n_pairfns;
    // d(free)/d(pairfn) on jets
    let mut g = [[Jet::<3>::constant(0.0); 16]; 3];
    match spec.id {
        GroupId::A39 => {
            let d01 = m[0][0] * m[0][0] + m[0][1] * m[0][1];
            g[0][0] = m[0][1] / d01;
            g[0][1] = -(m[0][0] / d01);
            let one = Jet::constant(1.0);
            g[1][2] = one / (one - m[0][2] * m[0][2]).sqrt();
            let d12 = m[1][2] * m[1][2] + m[2][2] * m[2][2];
            g[2][5] = -(m[2][2] / d12);
            g[2][8] = m[1][2] / d12;
        }
        GroupId::A36 | GroupId::A37 => {
            let (c, s) = (fv[0], fv[1]);
            let r2 = c * c + s * s;
            g[0][0] = -(s / r2);
            g[0][1] = c / r2;
            g[1][2] = Jet::constant(1.0);
            g[2][3] = Jet::constant(1.0);
        }
        _ => {
            for a in 0..3 {
                g[a][a] = Jet::constant(1.0);
            }
        }
    }
    let mono: Vec<Jet<3>> = setup.monomials.iter().map(|&mm| monomial_value(mm, &m)).collect();
    let mut pi_pair = vec![Jet::<3>::constant(0.0); setup.pairs.len()];
    for (pair_idx, val) in pi_pair.iter_mut().enumerate() {
        let mut s = Jet::constant(0.0);
        for (m_idx, &mv) in mono.iter().enumerate() {
            let c = coeffs[setup.unknown(pair_idx, m_idx)];
            if c != 0.0 {
                s = s + mv * Jet::constant(c);
            }
        }
        *val = s;
    }
    let mut out = [[Jet::<3>::constant(0.0); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut s = Jet::constant(0.0);
            for (pair_idx, &(delta, eps)) in setup.pairs.iter().enumerate() {
                let w = g[a][delta] * g[b][eps] - g[a][eps] * g[b][delta];
                s = s + w * pi_pair[pair_idx];
            }
            out[a][b] = s;
        }
    }
    let _ = nf;
    out
}

fn jacobiator_of(b: &[[Jet<3>; 3]; 3]) -> (f64, f64) {
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

#[derive(Debug, Clone, Serialize)]
pub struct JacobiFilterSummary {
    /// Whole nullspace span satisfies Jacobi at the sampled rays and points.
    pub full_span_pass: bool,
    /// Max relative Jacobiator over the sampled span.
    pub max_relative_jacobiator: f64,
    /// Estimated number of independent quadratic constraints on the span
    /// (0 when the span passes).
    pub active_constraint_rank: usize,
}

/// Probe the Jacobi identity on the nullspace span: evaluate the Jacobiator
/// of random coefficient combinations; when it does not vanish, estimate the
/// rank of the quadratic constraint system by least-squares fitting the
/// lambda-quadratic form at each sampled point.
pub fn jacobi_filter(
    spec: &GroupSpec,
    setup: &AnsatzSetup,
    basis: &[DVector<f64>],
    n_points: usize,
    rng: &mut impl Rng,
) -> JacobiFilterSummary {
    let d = basis.len();
    if d == 0 {
        return JacobiFilterSummary {
            full_span_pass: true,
            max_relative_jacobiator: 0.0,
            active_constraint_rank: 0,
        };
    }
    let n_lambda = (d * (d + 1)) / 2 + d + 3;
    let lambdas: Vec<DVector<f64>> = (0..n_lambda)
        .map(|_| {
            let v = DVector::from_iterator(d, (0..d).map(|_| -1.0 + 2.0 * rng.gen::<f64>()));
            let n = v.norm();
            v / n
        })
        .collect();
    let pts: Vec<[f64; 3]> = (0..n_points)
        .map(|_| {
            let p = sample_point(spec, rng);
            let f = free_from_upper(spec, p.upper.as_slice());
            [f[0], f[1], f[2]]
        })
        .collect();

    let mut worst_rel = 0.0f64;
    for &u in &pts {
        let uj: [Jet<3>; 3] = [Jet::var(u[0], 0), Jet::var(u[1], 1), Jet::var(u[2], 2)];
        for lam in &lambdas {
            let mut coeffs = DVector::zeros(setup.n_unknowns());
            for (k, b) in basis.iter().enumerate() {
                coeffs += b * lam[k];
            }
            let biv = ansatz_bivector_free(spec, setup, &coeffs, &uj);
            let (res, scale) = jacobiator_of(&biv);
            worst_rel = worst_rel.max(res / scale);
        }
    }
    let full_span_pass = worst_rel <= 1e-8;
    let mut active_constraint_rank = 0;
    if !full_span_pass {
        // fit J(lambda) = lambda^T Q lambda per point (in three free
        // coordinates the Jacobiator has one signed component); the rank of
        // {vec(Q)} over points counts the independent quadratic constraints
        let nq = d * (d + 1) / 2;
        let design = DMatrix::from_row_iterator(
            lambdas.len(),
            nq,
            lambdas.iter().flat_map(|lam| {
                let mut row = Vec::with_capacity(nq);
                for i in 0..d {
                    for j in i..d {
                        let f = if i == j { 1.0 } else { 2.0 };
                        row.push(f * lam[i] * lam[j]);
                    }
                }
                row
            }),
        );
        let svd = design.clone().svd(true, true);
        let mut qmat = DMatrix::zeros(pts.len(), nq);
        for (pi, &u) in pts.iter().enumerate() {
            let b = DVector::from_vec(signed_jacobiator(spec, setup, basis, &lambdas, u));
            let sol = svd.solve(&b, 1e-10).expect("SVD solve");
            qmat.set_row(pi, &sol.transpose());
        }
        let qsvd = qmat.svd(false, false);
        let smax = qsvd.singular_values.iter().cloned().fold(0.0, f64::max);
        active_constraint_rank = qsvd
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-6 * smax.max(1e-300))
            .count();
    }
    JacobiFilterSummary {
        full_span_pass,
        max_relative_jacobiator: worst_rel,
        active_constraint_rank,
    }
}

/// The (single) signed Jacobiator component in the three free coordinates,
/// for every sampled lambda at one point.
fn signed_jacobiator(
    spec: &GroupSpec,
    setup: &AnsatzSetup,
    basis: &[DVector<f64>],
    lambdas: &[DVector<f64>],
    u: [f64; 3],
) -> Vec<f64> {
    let uj: [Jet<3>; 3] = [Jet::var(u[0], 0), Jet::var(u[1], 1), Jet::var(u[2], 2)];
    lambdas
        .iter()
        .map(|lam| {
            let mut coeffs = DVector::zeros(setup.n_unknowns());
            for (k, b) in basis.iter().enumerate() {
                coeffs += b * lam[k];
            }
            let b = ansatz_bivector_free(spec, setup, &coeffs, &uj);
            let mut s = 0.0;
            for d in 0..3 {
                s += b[d][0].v * b[1][2].d[d] + b[d][1].v * b[2][0].d[d] + b[d][2].v * b[0][1].d[d];
            }
            s
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyMembership {
    pub family: usize,
    /// Relative residual of the least-squares fit onto the monomial basis.
    pub fit_residual: f64,
    /// The family is expressible in the quadratic Ansatz.
    pub in_ansatz: bool,
    /// Relative distance of its coefficient vector to the multiplicativity
    /// nullspace (only when in_ansatz).
    pub projection_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeriveReport {
    pub group: String,
    pub n_monomials: usize,
    pub n_pair_functions: usize,
    pub n_unknowns: usize,
    pub rows: usize,
    pub nullspace_dim: usize,
    /// Dimension of the Jacobi subvariety: nullspace_dim minus the rank of
    /// the active quadratic constraints.
    pub jacobi_filtered_dim: usize,
    /// Largest principal angle against a disjoint sample set (radians).
    pub stability_angle: f64,
    pub jacobi: JacobiFilterSummary,
    pub families: Vec<FamilyMembership>,
}

const FIT_THRESHOLD: f64 = 1e-8;

/// Run the whole pipeline for one group.
pub fn derive_group(spec: &GroupSpec, seed: u64, n_pairs: usize) -> DeriveReport {
    let setup = ansatz_setup(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<_> = (0..n_pairs).map(|_| sample_pair(spec, &mut rng)).collect();
    let mat = multiplicativity_matrix(spec, &setup, &samples);
    let basis = nullspace(&mat, 1e-9).expect("nonempty system");

    let samples2: Vec<_> = (0..n_pairs).map(|_| sample_pair(spec, &mut rng)).collect();
    let mat2 = multiplicativity_matrix(spec, &setup, &samples2);
    let basis2 = nullspace(&mat2, 1e-9).expect("nonempty system");
    let stability_angle = subspace_angle(&basis, &basis2);

    let jacobi = jacobi_filter(spec, &setup, &basis, 12, &mut rng);

    let mut families = Vec::new();
    for &fam in crate::poisson::family_indices(spec.id) {
        let params = crate::poisson::sample_family_params(spec, fam, &mut rng);
        let (coeffs, fit_residual) = family_coefficients(spec, &setup, fam, &params, &mut rng);
        let in_ansatz = fit_residual <= FIT_THRESHOLD;
        let projection_residual = if in_ansatz {
            Some(projection_residual(&coeffs, &basis))
        } else {
            None
        };
        families.push(FamilyMembership {
            family: fam,
            fit_residual,
            in_ansatz,
            projection_residual,
        });
    }

    DeriveReport {
        group: spec.id.name().to_string(),
        n_monomials: setup.monomials.len(),
        n_pair_functions: setup.n_pairfns,
        n_unknowns: setup.n_unknowns(),
        rows: mat.nrows(),
        nullspace_dim: basis.len(),
        jacobi_filtered_dim: basis.len() - jacobi.active_constraint_rank.min(basis.len()),
        stability_angle,
        jacobi,
        families,
    }
}
