//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sicnum::entanglement::{fano_coefficients, marginals, pseudo_sic, three_tangle};
use sicnum::linalg::{complex_gaussian_matrix, pauli_word, qubit_from_bloch, vector_norm, ComplexMatrix};
use sicnum::mic::{
    bloch_geometry, born_matrix, compare_with_hesse, monte_carlo_phi, orthocross_mic, orthogonality_audit,
    phi_distance, rank_half_povm, sic_parallel_distance, validate_mic, BlochMic, Mic, UpdatePolicy, Verdict,
};
use sicnum::scalar::C;
use sicnum::sic::{
    conjugate_sic, hesse_fiducial_vector, hesse_sic, hoggar_fiducial_vector, hoggar_sic, pauli_orbit, qubit_sic,
    sic_probabilities, state_from_probs, verify_sic, wootters_basis, wootters_coefficients, wootters_fiducial, Sign,
};
use sicnum::symmetry::{
    conjugation_table, det3, eigen_check, equal_up_to_phase, induced_bloch_map, is_linear_mod_d, orbit_of_projector,
    qubit_clifford_group, qutrit_fourier, zauner_unitary,
};
use sicnum::triples::{
    max_cocycle_residual, normalized_triples, obstruction_sweep, qbic_lhs, qbic_target, qubit_qbic_reduced, row_sum,
    sampled_cocycle_residual, structure_coefficients, triple_products,
};
use sicnum::{Matrix, Result, SicEnsemble64, Tolerance64};

const SEED: u64 = 0x51C5_EED5;

/// `‖I − Φ‖²` of the orthocross MIC with parallel updating, fixed by an
/// independent reference computation.
const ORTHOCROSS_DISTANCE: [(usize, f64); 3] =
    [(2, 30.510204081632658), (3, 584.0529300567134), (8, 109012.65328417585)];

/// Whether each rank-half element for d = 3 equals `(I − Π)/6` for a distinct
/// Hesse projector, fixed by an independent reference computation.
const HESSE_COMPLEMENT_VERDICT: Verdict = Verdict::Matched;

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn tol() -> Tolerance64 {
    Tolerance64::default()
}

fn ensembles() -> Result<Vec<(&'static str, SicEnsemble64)>> {
    Ok(vec![
        ("qubit+", qubit_sic(Sign::Plus)?),
        ("qubit-", qubit_sic(Sign::Minus)?),
        ("hesse", hesse_sic()?),
        ("hoggar+", hoggar_sic(Sign::Plus)?),
        ("hoggar-", hoggar_sic(Sign::Minus)?),
    ])
}

fn random_pure(d: usize, rng: &mut ChaCha8Rng) -> Vec<C<f64>> {
    let g: Matrix = complex_gaussian_matrix(d, rng);
    let v = g.column(0);
    let n = vector_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

fn sic_verification() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut all = true;
    for (_, e) in ensembles()? {
        let r = verify_sic(&e, &tol())?;
        worst = worst.max(r.gram_deviation);
        all &= r.pass && r.gram_deviation < 1e-10;
    }
    outcome(all, format!("5 ensembles, max Gram deviation {worst:.2e}"))
}

fn triple_identities() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for e in [qubit_sic(Sign::Plus)?, hesse_sic()?, hoggar_sic(Sign::Plus)?] {
        let t = triple_products(&e, &tol().with_eq(1e-9))?;
        worst = worst.max(t.invariants().max());
        let want = e.dim as f64 / (e.dim as f64 + 1.0);
        for j in 0..t.n {
            for k in (0..t.n).filter(|&k| k != j) {
                worst = worst.max((row_sum(&t, j, k)? - C::from(want)).norm());
            }
        }
    }
    outcome(worst < 1e-9, format!("d = 2, 3, 8: max deviation {worst:.2e}"))
}

fn cocycle() -> Result<Outcome> {
    let h = hesse_sic()?;
    let nt = normalized_triples(&triple_products(&h, &tol())?, &tol())?;
    let (hw, checks) = max_cocycle_residual(&nt);
    let g = hoggar_sic(Sign::Plus)?;
    let ng = normalized_triples(&triple_products(&g, &tol())?, &tol())?;
    let gw = sampled_cocycle_residual(&ng, 100_000, &mut ChaCha8Rng::seed_from_u64(SEED));
    outcome(
        checks == 6561 && hw < 1e-9 && gw < 1e-9,
        format!("Hesse {checks} quadruples max {hw:.2e}; Hoggar 1e5 sampled max {gw:.2e}"),
    )
}

fn obstruction() -> Result<Outcome> {
    let rows = obstruction_sweep(2..=64)?;
    let min = rows.iter().map(|r| r.mismatch).fold(f64::INFINITY, f64::min);
    outcome(
        rows.len() == 126 && min > 1e-3,
        format!("{} rows, smallest mismatch {min:.4}", rows.len()),
    )
}

fn hoggar_entanglement() -> Result<Outcome> {
    let fid = hoggar_fiducial_vector::<f64>(Sign::Plus);
    let tau = three_tangle(&fid, &tol())?;
    let mut spread = 0.0f64;
    for alpha in 0..64 {
        let v = pauli_word::<f64>(alpha, 3).apply(&fid);
        spread = spread.max((three_tangle(&v, &tol())? - tau).abs());
    }
    let e = hoggar_sic(Sign::Plus)?;
    let f = fano_coefficients(&e.fiducial, 3, &tol())?;
    let fano = f.coefficients[1..]
        .iter()
        .map(|c| (c.abs() - 1.0 / 3.0).abs())
        .fold(0.0, f64::max);
    let m = marginals(&e.fiducial, &tol())?;
    let radius = m
        .one_qubit
        .iter()
        .map(|q| (q.radius - 1.0 / 3f64.sqrt()).abs())
        .fold(0.0, f64::max);
    let tau_err = (tau - 2.0 / 9.0).abs();
    outcome(
        tau_err < 1e-10 && spread < 1e-10 && fano < 1e-10 && radius < 1e-10,
        format!("tangle {tau:.12} (orbit spread {spread:.1e}), |c|-1/3 max {fano:.1e}, radius error {radius:.1e}"),
    )
}

fn qubit_mic_geometry() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut centroid = 0.0f64;
    let mut pairs = 0.0f64;
    let mut valid = true;
    let mut last = None;
    for _ in 0..100 {
        let b = BlochMic::new(BlochMic::<f64>::random(&mut rng).vectors, &tol())?;
        let g = bloch_geometry(&b);
        centroid = centroid.max(g.centroid_error);
        pairs = pairs.max(g.disjoint_pair_residual);
        valid &= validate_mic(&b.to_mic(), &tol())?.pass;
        last = Some(b);
    }
    let m = last.expect("100 draws").to_mic();
    let audit = orthogonality_audit(&m, 10_000, &mut rng, &tol())?;
    outcome(
        valid && centroid < 1e-12 && pairs < 1e-12 && audit.pass,
        format!(
            "centroid error {centroid:.1e}, pair residual {pairs:.1e}, min p·p' {:.3e}, max zeros {}",
            audit.min_inner_product, audit.max_zero_count
        ),
    )
}

fn orthocross() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, frozen) in ORTHOCROSS_DISTANCE {
        let m = orthocross_mic::<f64>(d, &tol())?;
        ok &= validate_mic(&m, &tol())?.pass;
        let b = born_matrix(&m.with_policy(UpdatePolicy::Parallel, None)?)?;
        let dist = phi_distance(&b);
        let sic = sic_parallel_distance(d);
        ok &= dist > sic && (dist - frozen).abs() <= 1e-9 * frozen;
        parts.push(format!("d={d}: {dist:.6} vs {sic} (margin {:.6})", dist - sic));
    }
    outcome(ok, parts.join("; "))
}

fn clifford() -> Result<Outcome> {
    let g = qubit_clifford_group::<f64>()?;
    let products = g.verify_closure(1e-10)?;
    let zplus = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
    let stab = orbit_of_projector(&g, &zplus, &tol())?.len();
    let fid = qubit_sic::<f64>(Sign::Plus)?.fiducial;
    let sic = orbit_of_projector(&g, &fid, &tol())?.len();
    outcome(
        g.order() == 24 && products == 576 && stab == 6 && sic == 8,
        format!("order {}, {products} products, orbits {stab} and {sic}", g.order()),
    )
}

fn conjugate_qubit_sic() -> Result<Outcome> {
    let e = qubit_sic::<f64>(Sign::Plus)?;
    let c = conjugate_sic(&e)?;
    let report = verify_sic(&c, &tol())?;
    let rho = qubit_from_bloch([0.2, -0.4, 0.5]);
    let p = sic_probabilities(&e, &rho, &tol())?;
    let flipped: Vec<f64> = p.iter().map(|x| 0.5 - x).collect();
    let back = state_from_probs(&flipped, &c)?;
    let round_trip = back.max_abs_diff(&rho);
    let map = induced_bloch_map(&e, |p| p.iter().map(|x| 0.5 - x).collect())?;
    let det = det3(&map);
    outcome(
        report.pass && round_trip < 1e-12 && (det + 1.0).abs() < 1e-12,
        format!("round trip {round_trip:.1e}, Bloch map determinant {det:.12}"),
    )
}

fn qutrit() -> Result<Outcome> {
    let u = qutrit_fourier::<f64>();
    let ds = sicnum::sic::displacement_set::<f64>(3)?;
    let (x, z) = (ds.get(1, 0), ds.get(0, 1));
    let uxu = &(&u.dagger() * x) * &u;
    let uzu = &(&u.dagger() * z) * &u;
    let conj = equal_up_to_phase(&uxu, &z.pow(2), 1e-12) && equal_up_to_phase(&uzu, x, 1e-12);
    let f = hesse_fiducial_vector::<f64>();
    let lu = eigen_check(&u, &f, 1e-12)?;
    let v = zauner_unitary::<f64>();
    let linear = is_linear_mod_d(&conjugation_table(&v, &ds, 1e-10)?, 3);
    let lv = eigen_check(&v, &f, 1e-12)?;
    outcome(
        conj && (lu - C::new(0.0, 1.0)).norm() < 1e-12 && linear && (lv - C::from(1.0)).norm() < 1e-12,
        format!("DFT eigenvalue {lu:.3}, Zauner table linear: {linear}, Zauner eigenvalue {lv:.3}"),
    )
}

fn qbic() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut reduced = 0.0f64;
    for e in [qubit_sic::<f64>(Sign::Plus)?, hesse_sic()?, hoggar_sic(Sign::Plus)?] {
        let a = structure_coefficients(&e, &triple_products(&e, &tol())?);
        for _ in 0..100 {
            let rho = ComplexMatrix::projector(&random_pure(e.dim, &mut rng));
            let p = sic_probabilities(&e, &rho, &tol())?;
            worst = worst.max((qbic_lhs(&a, &p)? - qbic_target(e.dim)).abs());
            if e.dim == 2 {
                reduced = reduced.max(qubit_qbic_reduced(&a, &p)?.abs());
            }
        }
    }
    outcome(
        worst < 1e-8 && reduced < 1e-8,
        format!("cubic form max error {worst:.1e}; qubit reduced form max {reduced:.1e}"),
    )
}

fn wootters() -> Result<Outcome> {
    let (plus, minus) = wootters_basis::<f64>();
    let (a, b) = wootters_coefficients::<f64>();
    let good = pauli_orbit(&wootters_fiducial(a, b, &plus, &minus, &tol())?, "wootters")?;
    let good = verify_sic(&good, &tol())?;
    let bad = pauli_orbit(&wootters_fiducial(1.0, 0.0, &plus, &minus, &tol())?, "product")?;
    let bad = verify_sic(&bad, &tol())?;
    outcome(
        good.pass && good.max_deviation() < 1e-10 && !bad.pass,
        format!(
            "(a, b) fiducial deviation {:.1e}; (1, 0) deviation {:.3}",
            good.max_deviation(),
            bad.max_deviation()
        ),
    )
}

fn rank_half() -> Result<Outcome> {
    let mut ok = true;
    for d in [3, 5] {
        let m = rank_half_povm::<f64>(d)?;
        ok &= validate_mic(&m, &tol())?.pass;
        for e in &m.elements {
            ok &= sicnum::linalg::rank_of(e, &tol())? == d.div_ceil(2);
            ok &= (e.trace().re - 1.0 / d as f64).abs() < 1e-12;
        }
    }
    let cmp = compare_with_hesse(&rank_half_povm(3)?, &hesse_sic()?, &tol())?;
    ok &= cmp.verdict == HESSE_COMPLEMENT_VERDICT;
    outcome(
        ok,
        format!(
            "d = 3, 5 valid; Hesse complement test {:?} (max deviation {:.1e}, bijection {:?})",
            cmp.verdict, cmp.max_deviation, cmp.bijection
        ),
    )
}

fn pseudo() -> Result<Outcome> {
    let e = hoggar_sic::<f64>(Sign::Plus)?;
    let r = pseudo_sic(&e.fiducial, &tol())?.report(&tol())?;
    outcome(
        r.count == 64
            && r.trace_deviation < 1e-10
            && r.gram_deviation < 1e-10
            && r.sum_deviation < 1e-10
            && r.non_psd == 64,
        format!(
            "Gram deviation {:.1e}, ΣQ − 8I {:.1e}, {} of 64 not PSD",
            r.gram_deviation, r.sum_deviation, r.non_psd
        ),
    )
}

fn born() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for e in [qubit_sic::<f64>(Sign::Plus)?, hesse_sic()?, hoggar_sic(Sign::Plus)?] {
        let b = born_matrix(&Mic::from_sic(&e).with_policy(UpdatePolicy::Parallel, None)?)?;
        let dist = phi_distance(&b);
        ok &= (dist - sic_parallel_distance(e.dim)).abs() < 1e-8 && b.remultiplication_residual() < 1e-9;
        parts.push(format!("{dist:.9}"));
    }
    let qubit = Mic::from_sic(&qubit_sic::<f64>(Sign::Plus)?);
    let anti = born_matrix(&qubit.clone().with_policy(UpdatePolicy::Antipodal, None)?)?;
    let want = sicnum::RealMatrix64::from_fn(4, |i, j| if i == j { -2.0 } else { 1.0 });
    let entry = anti.phi.max_abs_diff(&want);
    let anti_dist = phi_distance(&anti);
    ok &= entry < 1e-10 && (anti_dist - 48.0).abs() < 1e-8;

    let mut reproducible = true;
    let mut self_min = f64::INFINITY;
    for policy in UpdatePolicy::ALL {
        let summary = |r: sicnum::mic::MonteCarloReport| {
            serde_json::to_string(&(r.min, r.mean, r.max, r.used, r.skipped, r.histogram)).expect("serializable")
        };
        let first = monte_carlo_phi(&qubit, policy, 10_000, SEED)?;
        if policy == UpdatePolicy::RandomUnitaryOfSelf {
            self_min = first.min;
        }
        let again = monte_carlo_phi(&qubit, policy, 10_000, SEED)?;
        reproducible &= summary(first) == summary(again);
    }
    ok &= reproducible && self_min >= 12.0 - 1e-8;
    outcome(
        ok,
        format!(
            "SIC parallel {}; antipodal entry error {entry:.1e}, distance {anti_dist:.9}; Monte Carlo reproducible: {reproducible}, self-rotation min {self_min:.6}",
            parts.join("/")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 15] = [
        ("SIC verification", sic_verification),
        ("triple product identities", triple_identities),
        ("cocycle identity", cocycle),
        ("triple transitivity obstruction", obstruction),
        ("Hoggar entanglement", hoggar_entanglement),
        ("unbiased qubit MIC geometry", qubit_mic_geometry),
        ("orthocross MIC", orthocross),
        ("qubit Clifford group", clifford),
        ("conjugate qubit SIC", conjugate_qubit_sic),
        ("qutrit Fourier and Zauner", qutrit),
        ("cubic (QBic) form", qbic),
        ("Wootters fiducial", wootters),
        ("rank-half POVM", rank_half),
        ("pseudo-SIC", pseudo),
        ("Born matrices", born),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] {:>2} {name}: {detail} ({secs:.2}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
