//! Acceptance suite: the ten exit criteria, one pass/fail line each.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use plgroups::algebra::{
    check_rep, mat_max_abs_diff, mat_mul, matrix_exp, matrix_rep, structure_constants, GroupId,
    Mat3,
};
use plgroups::bialgebra::{
    cocommutator_in_reference_basis, cocommutator_of, cocycle_residual, delta_from_r, reference_basis,
    linearize, mcybe_check, mcybe_residual, params_from_r, sample_r_for_family,
    sklyanin_vs_family, McybeVerdict, RMatrix,
};
use plgroups::classify::{self, instantiate, SymbolValues, VerifyConfig};
use plgroups::derive::derive_group;
use plgroups::group::{
    constraint_residual, coproduct_closed_form, identity_point, lower_from_free, multiply,
    point_from_free, sample_free, sample_pair, sample_point, upper_from_matrix, GroupSpec,
};
use plgroups::poisson::{
    a39_restricted_domain_ok, angle_free, casimir_branches, casimir_residual, family_indices,
    identity_vanishing, jacobiator, multiplicativity_residual, sample_casimir_params,
    sample_casimir_point, sample_family_params,
};
use plgroups::report::to_json;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn specs() -> Vec<GroupSpec> {
    GroupId::ALL.iter().map(|&id| GroupSpec::new(id)).collect()
}

fn conclude(criterion: usize, title: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("[criterion {criterion:2}] PASS  {title}");
    } else {
        println!("[criterion {criterion:2}] FAIL  {title}");
        for f in &failures {
            println!("    {f}");
        }
        panic!("criterion {criterion} failed: {} issue(s)", failures.len());
    }
}

#[test]
fn criterion_01_algebra_validity() {
    let mut failures = Vec::new();
    for spec in specs() {
        let sc = structure_constants(spec.id, spec.rho, spec.mu);
        if sc.antisymmetry_residual() != 0.0 {
            failures.push(format!("{}: antisymmetry not exact", spec.id.name()));
        }
        if sc.jacobi_residual() != 0.0 {
            failures.push(format!("{}: Jacobi not exact", spec.id.name()));
        }
        if !check_rep(&matrix_rep(spec.id, spec.rho, spec.mu), &sc) {
            failures.push(format!("{}: representation residual > 1e-14", spec.id.name()));
        }
    }
    conclude(1, "algebra validity: antisymmetry + Jacobi exact, reps <= 1e-14", failures);
}

#[test]
fn criterion_02_chart_fidelity() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x02);
    let scale = |m: &Mat3, s: f64| -> Mat3 {
        let mut out = *m;
        out.iter_mut().flatten().for_each(|v| *v *= s);
        out
    };
    for spec in specs() {
        let mut worst_exp = 0.0f64;
        let mut worst_rt = 0.0f64;
        for _ in 0..100 {
            let u = sample_free(&spec, &mut rng);
            let pt = point_from_free(&spec, u);
            let zyx = lower_from_free(&spec, &u);
            let m = mat_mul(
                &mat_mul(
                    &matrix_exp(&scale(&spec.rep.mats[0], zyx[0]), 1e-14).unwrap(),
                    &matrix_exp(&scale(&spec.rep.mats[1], zyx[1]), 1e-14).unwrap(),
                ),
                &matrix_exp(&scale(&spec.rep.mats[2], zyx[2]), 1e-14).unwrap(),
            );
            worst_exp = worst_exp.max(mat_max_abs_diff(&m, &pt.matrix));
            let up2 = upper_from_matrix(&spec, &pt.matrix);
            for (a, b) in pt.upper.iter().zip(up2.iter()) {
                worst_rt = worst_rt.max((a - b).abs());
            }
        }
        if worst_exp > 1e-10 {
            failures.push(format!("{}: exp-product mismatch {worst_exp:.3e}", spec.id.name()));
        }
        if worst_rt > 1e-12 {
            failures.push(format!("{}: chart round-trip {worst_rt:.3e}", spec.id.name()));
        }
        // constraints preserved under multiplication
        let mut worst_con = 0.0f64;
        for _ in 0..100 {
            let (_, _, pq) = sample_pair(&spec, &mut rng);
            worst_con = worst_con.max(constraint_residual(&spec, &pq.upper));
        }
        if worst_con > 1e-10 {
            failures.push(format!("{}: product constraint drift {worst_con:.3e}", spec.id.name()));
        }
    }
    conclude(2, "chart fidelity: exp-products, round-trips, product constraints", failures);
}

#[test]
fn criterion_03_coproduct_anchors() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x03);
    for spec in specs() {
        let mut worst = 0.0f64;
        let mut found = 0;
        let mut attempts = 0;
        while found < 100 && attempts < 500_000 {
            attempts += 1;
            let p = sample_point(&spec, &mut rng);
            let q = sample_point(&spec, &mut rng);
            let Ok(pq) = multiply(&spec, &p, &q) else { continue };
            if spec.id == GroupId::A39 && !a39_restricted_domain_ok(&p, &q, &pq) {
                continue;
            }
            if !plgroups::group::point_well_inside(&spec, &pq) {
                continue;
            }
            found += 1;
            for alpha in 0..spec.n_upper() {
                let lhs = coproduct_closed_form(&spec, alpha, &p, &q);
                worst = worst.max((lhs - pq.upper[alpha]).abs());
            }
        }
        if found < 100 {
            failures.push(format!("{}: only {found} usable pairs", spec.id.name()));
        }
        if worst > 1e-12 {
            failures.push(format!("{}: coproduct residual {worst:.3e}", spec.id.name()));
        }
    }
    conclude(3, "closed-form coproducts match multiplication <= 1e-12 (100 pairs/group)", failures);
}

#[test]
fn criterion_04_poisson_lie_core() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x04);
    let mut n_families = 0;
    for spec in specs() {
        for &fam in family_indices(spec.id) {
            n_families += 1;
            let mut worst_idv = 0.0f64;
            let mut worst_jac = 0.0f64;
            let mut worst_mul = 0.0f64;
            for _ in 0..50 {
                let params = sample_family_params(&spec, fam, &mut rng);
                worst_idv = worst_idv.max(identity_vanishing(&spec, fam, &params));
                for _ in 0..200 {
                    let p = sample_point(&spec, &mut rng);
                    let (res, scale) = jacobiator(&spec, fam, &params, angle_free(&spec, &p));
                    worst_jac = worst_jac.max(res / scale);
                }
                for _ in 0..200 {
                    let (p, q, _) = sample_pair(&spec, &mut rng);
                    let (res, scale) =
                        multiplicativity_residual(&spec, fam, &params, &p, &q).unwrap();
                    worst_mul = worst_mul.max(res / scale);
                }
            }
            let name = format!("{} family {fam}", spec.id.name());
            if worst_idv > 1e-12 {
                failures.push(format!("{name}: identity vanishing {worst_idv:.3e}"));
            }
            if worst_jac > 1e-9 {
                failures.push(format!("{name}: jacobiator {worst_jac:.3e}"));
            }
            if worst_mul > 1e-9 {
                failures.push(format!("{name}: multiplicativity {worst_mul:.3e}"));
            }
        }
    }
    assert_eq!(n_families, 16);
    conclude(4, "PL core: 16 families x 50 draws x 200 points (vanish/Jacobi/mult)", failures);
}

#[test]
fn criterion_05_casimirs() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x05);
    let mut n_branches = 0;
    for spec in specs() {
        for branch in casimir_branches(spec.id) {
            n_branches += 1;
            let mut worst = 0.0f64;
            let mut total = 0;
            for _ in 0..2 {
                let params = sample_casimir_params(&spec, &branch, &mut rng);
                let mut got = 0;
                let mut tries = 0;
                while got < 100 && tries < 100 {
                    tries += 1;
                    let Some(u) = sample_casimir_point(&spec, &branch, &params, &mut rng)
                    else {
                        break;
                    };
                    let (res, scale) = casimir_residual(&spec, &branch, &params, u).unwrap();
                    worst = worst.max(res / scale);
                    got += 1;
                }
                total += got;
            }
            if total < 100 {
                failures.push(format!(
                    "{} {}: only {total} in-guard points",
                    spec.id.name(),
                    branch.label
                ));
            }
            if worst > 1e-8 {
                failures.push(format!(
                    "{} {}: residual {worst:.3e}",
                    spec.id.name(),
                    branch.label
                ));
            }
        }
    }
    assert_eq!(n_branches, 26);
    conclude(5, "all 26 Casimir branches annihilate their brackets <= 1e-8", failures);
}

#[test]
fn criterion_06_bialgebra_anchors() {
    let mut failures = Vec::new();
    // linearize(A3,2) reproduces {x,z} = -a x - b y and {y,z} = 2c x + a y
    let spec2 = GroupSpec::new(GroupId::A32);
    let (a, b, c) = (1.3, -0.6, 0.9);
    let f = linearize(&spec2, 1, &[a, b, c]).f;
    let anchors = [
        (f[2][0][2], -a, "f[x][z] -> -a"),
        (f[2][0][1], -b, "f[x][z] -> -b"),
        (f[1][0][2], 2.0 * c, "f[y][z] -> 2c"),
        (f[1][0][1], a, "f[y][z] -> a"),
        (f[2][1][0], 0.0, "{x,y} = 0"),
        (f[2][1][1], 0.0, "{x,y} = 0"),
        (f[2][1][2], 0.0, "{x,y} = 0"),
    ];
    for (got, want, what) in anchors {
        if (got - want).abs() > 1e-12 {
            failures.push(format!("A3_2 linearization {what}: {got} vs {want}"));
        }
    }
    // the cocommutator in the reference basis (e3 = -fe0)
    let d = cocommutator_of(&linearize(&spec2, 1, &[a, b, c]));
    let g = cocommutator_in_reference_basis(&d, &reference_basis(GroupId::A32, false));
    let wedge_anchors = [
        (g.d[0][0][1], -a, "delta(fe0) on fe0^fe1"),
        (g.d[0][1][2], 2.0 * c, "delta(fe0) on fe1^fe2"),
        (g.d[2][1][2], -a, "delta(fe2) on fe1^fe2"),
        (g.d[2][0][1], b, "delta(fe2) on fe0^fe1"),
    ];
    for (got, want, what) in wedge_anchors {
        if (got - want).abs() > 1e-12 {
            failures.push(format!("deltaA32 {what}: {got} vs {want}"));
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            if g.d[1][i][j].abs() > 1e-12 {
                failures.push("deltaA32: delta(fe1) != 0".into());
            }
        }
    }
    // cocycle + co-Jacobi <= 1e-10 for every family (random draws) ...
    let mut rng = ChaCha8Rng::seed_from_u64(0x06);
    for spec in specs() {
        for &fam in family_indices(spec.id) {
            for _ in 0..10 {
                let params = sample_family_params(&spec, fam, &mut rng);
                let f = linearize(&spec, fam, &params);
                let cr = cocycle_residual(&cocommutator_of(&f), &spec.sc);
                let jr = f.cojacobi_residual();
                if cr > 1e-10 || jr > 1e-10 {
                    failures.push(format!(
                        "{} family {fam}: cocycle {cr:.3e} cojacobi {jr:.3e}",
                        spec.id.name()
                    ));
                }
            }
        }
    }
    // ... and for every table row (both omega signs)
    let base = SymbolValues::default();
    for spec in specs() {
        for entry in classify::table(spec.id) {
            for sign in [1.0, -1.0] {
                let mut sym = base;
                sym.omega = sign;
                let (fam, params) = instantiate(entry, &sym, &spec).unwrap();
                let f = linearize(&spec, fam, &params);
                let cr = cocycle_residual(&cocommutator_of(&f), &spec.sc);
                let jr = f.cojacobi_residual();
                if cr > 1e-10 || jr > 1e-10 {
                    failures.push(format!(
                        "{} row {}: cocycle {cr:.3e} cojacobi {jr:.3e}",
                        spec.id.name(),
                        entry.id
                    ));
                }
            }
        }
    }
    conclude(6, "bialgebra anchors: A3,2 linearization + deltaA32; cocycle/co-Jacobi everywhere", failures);
}

#[test]
fn criterion_07_coboundary_anchors() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x07);

    // mCYBE facts
    let s32 = GroupSpec::new(GroupId::A32);
    if mcybe_check(&RMatrix::new(1.1, -0.7, 0.0), &s32.sc) != McybeVerdict::Solution {
        failures.push("A3_2: r23 = 0 should solve the mCYBE".into());
    }
    if mcybe_check(&RMatrix::new(1.1, -0.7, 0.9), &s32.sc) != McybeVerdict::NotSolution {
        failures.push("A3_2: r23 != 0 should fail the mCYBE".into());
    }
    let s37 = GroupSpec::new(GroupId::A37);
    if mcybe_check(&RMatrix::new(1.4, 0.0, 0.0), &s37.sc) != McybeVerdict::Solution {
        failures.push("A3_7: r12 alone should solve the mCYBE".into());
    }
    if mcybe_residual(&RMatrix::new(0.0, 1.0, 0.0), &s37.sc) < 0.1 {
        failures.push("A3_7: r13 should fail the mCYBE by >= 0.1".into());
    }
    for id in [GroupId::A38, GroupId::A39, GroupId::A31, GroupId::A34, GroupId::A36] {
        let spec = GroupSpec::new(id);
        if mcybe_check(&RMatrix::new(1.0, 1.0, 1.0), &spec.sc) != McybeVerdict::Solution {
            failures.push(format!("{}: generic r should pass the mCYBE", id.name()));
        }
    }

    // every coboundary identification: Sklyanin vs family <= 1e-10 at 50 points
    for spec in specs() {
        for &fam in plgroups::bialgebra::coboundary_family(spec.id) {
            for _ in 0..3 {
                let r = sample_r_for_family(&spec, fam, &mut rng);
                let params = params_from_r(&spec, fam, &r).unwrap();
                let points: Vec<_> = (0..50).map(|_| sample_point(&spec, &mut rng)).collect();
                let (res, scale) = sklyanin_vs_family(&spec, fam, &params, &r, &points);
                if res > 1e-10 * scale {
                    failures.push(format!(
                        "{} family {fam}: Sklyanin mismatch {res:.3e} (scale {scale:.1e})",
                        spec.id.name()
                    ));
                }
                // the linearization of the Sklyanin bracket is delta_r
                let d = cocommutator_of(&linearize(&spec, fam, &params));
                let dr = delta_from_r(&r, &spec.sc);
                let diff = plgroups::bialgebra::cocommutator_diff(&d, &dr);
                if diff > 1e-9 * (1.0 + r.norm()) {
                    failures.push(format!(
                        "{} family {fam}: delta_r mismatch {diff:.3e}",
                        spec.id.name()
                    ));
                }
            }
        }
    }
    conclude(7, "coboundary anchors: mCYBE solution sets + all Sklyanin identifications", failures);
}

#[test]
fn criterion_08_classification_suite() {
    let mut failures = Vec::new();
    let suite = classify::full_suite(&SymbolValues::default(), 0, &VerifyConfig::default())
        .expect("suite runs");
    if suite.entries.len() != 38 {
        failures.push(format!("expected 38 rows, got {}", suite.entries.len()));
    }
    let mut n_falsification = 0;
    for e in &suite.entries {
        for c in &e.checks {
            if !c.pass {
                failures.push(format!(
                    "{} row {}: {} residual {:.3e} vs {:.3e}",
                    e.group, e.id, c.name, c.residual, c.tolerance
                ));
            }
            if c.name.starts_with("noncoboundary_falsification") {
                n_falsification += 1;
                if c.residual < 1e-2 {
                    failures.push(format!(
                        "{} row {}: best-fit r got within {:.3e}",
                        e.group, e.id, c.residual
                    ));
                }
            }
        }
    }
    // 24 non-coboundary rows; omega rows run at both signs
    if n_falsification < 24 {
        failures.push(format!("only {n_falsification} falsification searches ran"));
    }
    conclude(8, "classification suite: all 38 rows pass, non-coboundary rows resist best-fit r", failures);
}

#[test]
fn criterion_09_derive() {
    let mut failures = Vec::new();
    for spec in specs() {
        let report = derive_group(&spec, 0, 50);
        if report.stability_angle > 1e-6 {
            failures.push(format!(
                "{}: nullspace unstable (angle {:.3e})",
                spec.id.name(),
                report.stability_angle
            ));
        }
        for fam in &report.families {
            let expect_outside = (spec.id == GroupId::A34 && fam.family == 2)
                || (spec.id == GroupId::A36 && fam.family == 2);
            if expect_outside {
                if fam.in_ansatz {
                    failures.push(format!(
                        "{} family {}: should be outside the quadratic Ansatz",
                        spec.id.name(),
                        fam.family
                    ));
                }
            } else if !fam.in_ansatz {
                failures.push(format!(
                    "{} family {}: fit residual {:.3e}",
                    spec.id.name(),
                    fam.family,
                    fam.fit_residual
                ));
            } else if fam.projection_residual.unwrap() > 1e-8 {
                failures.push(format!(
                    "{} family {}: projection residual {:.3e}",
                    spec.id.name(),
                    fam.family,
                    fam.projection_residual.unwrap()
                ));
            }
        }
        if spec.id == GroupId::A32 && report.jacobi_filtered_dim != 3 {
            failures.push(format!(
                "A3_2: Jacobi-filtered dimension {} != 3",
                report.jacobi_filtered_dim
            ));
        }
    }
    conclude(9, "derive: families in nullspace <= 1e-8; A3,2 filtered dim 3; ln/arccos flagged", failures);
}

#[test]
fn criterion_10_determinism() {
    let mut failures = Vec::new();
    let sym = SymbolValues::default();
    let cfg = VerifyConfig::default();
    let j1 = to_json(&classify::full_suite(&sym, 0, &cfg).unwrap());
    let j2 = to_json(&classify::full_suite(&sym, 0, &cfg).unwrap());
    if j1 != j2 {
        failures.push("full_suite JSON differs between two seed-0 runs".into());
    }
    if j1.is_empty() {
        failures.push("empty report".into());
    }
    conclude(10, "determinism: full_suite(seed 0) JSON byte-identical across runs", failures);
}

#[test]
fn identity_point_sanity() {
    // the acceptance harness itself relies on identity_point: pin it
    for spec in specs() {
        let e = identity_point(&spec);
        let m = e.matrix;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((m[i][j] - want).abs() < 1e-15);
            }
        }
    }
}
