use std::fmt;

use anyhow::{Context as _, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sicnum::entanglement::{
    conjugate_fano_relation, fano_coefficients, marginals, pseudo_sic, sign_flipped_operator, three_tangle,
};
use sicnum::linalg::{complex_gaussian_matrix, pauli_word, qubit_from_bloch, rank_of, vector_norm, ComplexMatrix};
use sicnum::mic::{
    bloch_geometry, born_matrix, compare_with_hesse, monte_carlo_phi, orthocross_mic, orthogonality_audit,
    phi_distance, rank_half_povm, sic_parallel_distance, validate_mic, BlochMic, Mic, UpdatePolicy, Verdict,
};
use sicnum::scalar::C;
use sicnum::sic::{
    conjugate_sic, displacement_set, hesse_fiducial_vector, hesse_sic, hoggar_fiducial_vector, hoggar_sic, pauli_orbit,
    qubit_sic, sic_probabilities, state_from_probs, verify_sic, wootters_basis, wootters_coefficients,
    wootters_fiducial, EnsembleJson, Sign,
};
use sicnum::symmetry::{
    conjugation_table, det3, eigen_check, equal_up_to_phase, find_clifford_mapping, induced_bloch_map, is_linear_mod_d,
    orbit_of_projector, qubit_clifford_group, qutrit_fourier, zauner_unitary,
};
use sicnum::triples::{
    distinct_phase_histogram, max_cocycle_residual, normalized_triples, obstruction_sweep, qbic_lhs, qbic_target,
    qubit_qbic_reduced, reduced_qbic, reduced_qbic_coefficient, row_sum, sampled_cocycle_residual,
    structure_coefficients, triple_products,
};
use sicnum::{Matrix, RealMatrix64, SicEnsemble64, Tolerance64};

use crate::options::{Command, DimRange, EnsembleName, Options};
use crate::report::{Cell, Check, Section, Table};

/// Invalid combination of options; reported with exit status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

const DEFAULT_BORN_SAMPLES: u64 = 10_000;
const DEFAULT_QBIC_SAMPLES: u64 = 100;
const DEFAULT_BLOCH_SAMPLES: u64 = 100;
const DEFAULT_COCYCLE_SAMPLES: u64 = 100_000;
const AUDIT_TRIALS: usize = 10_000;
const DEFAULT_DIMS: DimRange = DimRange { lo: 2, hi: 16 };
const HISTOGRAM_RESOLUTION: f64 = 1e-6;

/// Command-line options with the derived numerical tolerance.
pub struct Ctx<'a> {
    pub opts: &'a Options,
    pub tol: Tolerance64,
}

impl<'a> Ctx<'a> {
    pub fn new(opts: &'a Options) -> Result<Self> {
        let tol = Tolerance64::new(opts.tol, opts.rank_tol).map_err(|e| usage(e.to_string()))?;
        Ok(Self { opts, tol })
    }

    fn samples(&self, default: u64) -> usize {
        self.opts.samples.unwrap_or(default) as usize
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.opts.seed)
    }

    /// `|observed − target| ≤ tol · max(1, |target|)`.
    fn close(&self, name: impl Into<String>, observed: f64, target: f64) -> Check {
        Check::within(name, observed, target, self.opts.tol * target.abs().max(1.0))
    }

    fn small(&self, name: impl Into<String>, observed: f64) -> Check {
        Check::at_most(name, observed, self.opts.tol)
    }

    /// Explicitly selected ensembles, or `fallback` when none is selected.
    fn ensembles(&self, fallback: &[EnsembleName]) -> Result<Vec<EnsembleName>> {
        match (self.opts.ensemble, self.opts.dim) {
            (Some(e), Some(d)) if build_dim(e) != d => Err(usage(format!(
                "--ensemble {} has dimension {}, not {d}",
                e.label(),
                build_dim(e)
            ))),
            (Some(e), _) => Ok(vec![e]),
            (None, Some(d)) => EnsembleName::for_dim(d)
                .map(|e| vec![e])
                .ok_or_else(|| usage(format!("no catalogued SIC in dimension {d} (choose 2, 3 or 8)"))),
            (None, None) => Ok(fallback.to_vec()),
        }
    }

    fn dims(&self, fallback: &[usize]) -> Vec<usize> {
        match (self.opts.dim, self.opts.ensemble) {
            (Some(d), _) => vec![d],
            (None, Some(e)) => vec![build_dim(e)],
            (None, None) => fallback.to_vec(),
        }
    }
}

const PLUS_SICS: [EnsembleName; 3] = [EnsembleName::QubitPlus, EnsembleName::Hesse, EnsembleName::HoggarPlus];

fn build_dim(e: EnsembleName) -> usize {
    match e {
        EnsembleName::QubitPlus | EnsembleName::QubitMinus => 2,
        EnsembleName::Hesse => 3,
        EnsembleName::HoggarPlus | EnsembleName::HoggarMinus => 8,
    }
}

pub fn build(e: EnsembleName) -> Result<SicEnsemble64> {
    Ok(match e {
        EnsembleName::QubitPlus => qubit_sic(Sign::Plus)?,
        EnsembleName::QubitMinus => qubit_sic(Sign::Minus)?,
        EnsembleName::Hesse => hesse_sic()?,
        EnsembleName::HoggarPlus => hoggar_sic(Sign::Plus)?,
        EnsembleName::HoggarMinus => hoggar_sic(Sign::Minus)?,
    })
}

fn random_pure(d: usize, rng: &mut ChaCha8Rng) -> Vec<C<f64>> {
    let g: Matrix = complex_gaussian_matrix(d, rng);
    let v = g.column(0);
    let n = vector_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

fn real_table(name: impl Into<String>, m: &RealMatrix64) -> Table {
    let mut t = Table::new(name, &["i", "j", "value"]);
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            t.push(vec![i.into(), j.into(), m.get(i, j).into()]);
        }
    }
    t
}

pub fn run(cmd: Command, ctx: &Ctx) -> Result<Section> {
    match cmd {
        Command::Verify => verify(ctx),
        Command::Dump => dump(ctx),
        Command::Triples => triples(ctx),
        Command::Obstruction => obstruction(ctx),
        Command::Orthocross => orthocross(ctx),
        Command::Clifford => clifford(ctx),
        Command::Qutrit => qutrit(ctx),
        Command::Qbic => qbic(ctx),
        Command::Wootters => wootters(ctx),
        Command::RankHalf => rank_half(ctx),
        Command::Hoggar => hoggar(ctx),
        Command::Born => born(ctx),
        Command::Bloch => bloch(ctx),
        Command::All => all(ctx),
    }
}

/// Order in which `all` runs the individual checks.
pub const ALL_ORDER: [Command; 12] = [
    Command::Verify,
    Command::Triples,
    Command::Obstruction,
    Command::Hoggar,
    Command::Bloch,
    Command::Orthocross,
    Command::Clifford,
    Command::Qutrit,
    Command::Qbic,
    Command::Wootters,
    Command::RankHalf,
    Command::Born,
];

fn all(ctx: &Ctx) -> Result<Section> {
    let mut s = Section::default();
    for cmd in ALL_ORDER {
        match run(cmd, ctx) {
            Ok(sub) => s.absorb(cmd.name(), sub),
            Err(e) if e.is::<Usage>() => return Err(e),
            Err(e) => s.check(Check::failed(cmd.name(), format!("{e:#}"))),
        }
    }
    Ok(s)
}

fn verify(ctx: &Ctx) -> Result<Section> {
    let mut list: Vec<(String, SicEnsemble64)> = Vec::new();
    if let Some(path) = &ctx.opts.input {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let e = SicEnsemble64::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        list.push((path.display().to_string(), e));
    } else {
        for name in ctx.ensembles(&EnsembleName::ALL)? {
            list.push((name.label().to_string(), build(name)?));
        }
    }
    let mut s = Section::default();
    let mut t = Table::new(
        "ensembles",
        &[
            "ensemble",
            "dim",
            "count",
            "max_rank",
            "projector_deviation",
            "gram_deviation",
            "completeness_deviation",
        ],
    );
    for (label, e) in &list {
        let r = verify_sic(e, &ctx.tol)?;
        t.push(vec![
            label.as_str().into(),
            r.dim.into(),
            r.count.into(),
            r.max_rank.into(),
            r.projector_deviation.into(),
            r.gram_deviation.into(),
            r.completeness_deviation.into(),
        ]);
        s.check(Check::equals(format!("{label}.count"), r.count, r.dim * r.dim));
        s.check(Check::equals(format!("{label}.rank"), r.max_rank, 1));
        s.check(ctx.small(format!("{label}.projector_deviation"), r.projector_deviation));
        s.check(ctx.small(format!("{label}.gram_deviation"), r.gram_deviation));
        s.check(ctx.small(format!("{label}.completeness_deviation"), r.completeness_deviation));
    }
    s.table(t);
    Ok(s)
}

fn dump_ensemble(ctx: &Ctx) -> Result<SicEnsemble64> {
    let names = ctx.ensembles(&[])?;
    match names.as_slice() {
        [one] => build(*one),
        _ => Err(usage("dump needs --ensemble or --dim")),
    }
}

/// JSON that `verify --input` reads back.
pub fn dump_json(ctx: &Ctx) -> Result<String> {
    let e = dump_ensemble(ctx)?;
    let raw = EnsembleJson {
        dim: e.dim,
        projectors: e.projectors,
        convention: e.convention,
    };
    Ok(serde_json::to_string_pretty(&raw)? + "\n")
}

fn dump(ctx: &Ctx) -> Result<Section> {
    let e = dump_ensemble(ctx)?;
    let mut s = Section::default();
    s.scalar("dim", e.dim);
    s.scalar("convention", e.convention.as_str());
    for (j, p) in e.projectors.iter().enumerate() {
        s.table(Table::matrix(format!("projector_{j}"), p));
    }
    Ok(s)
}

fn triples(ctx: &Ctx) -> Result<Section> {
    let mut s = Section::default();
    for name in ctx.ensembles(&PLUS_SICS)? {
        let e = build(name)?;
        let label = name.label();
        let d = e.dim as f64;
        let t = triple_products(&e, &ctx.tol)?;
        let n = t.n;
        let (mut jjj, mut jjk, mut modulus) = (0.0f64, 0.0f64, 0.0f64);
        let distinct = (d + 1.0).powf(-1.5);
        for j in 0..n {
            jjj = jjj.max((t.get(j, j, j) - C::from(1.0)).norm());
            for k in (0..n).filter(|&k| k != j) {
                jjk = jjk.max((t.get(j, j, k) - C::from(1.0 / (d + 1.0))).norm());
                for l in (0..n).filter(|&l| l != j && l != k) {
                    modulus = modulus.max((t.get(j, k, l).norm() - distinct).abs());
                }
            }
        }
        let mut rows = 0.0f64;
        for j in 0..n {
            for k in (0..n).filter(|&k| k != j) {
                rows = rows.max((row_sum(&t, j, k)? - C::from(d / (d + 1.0))).norm());
            }
        }
        let inv = t.invariants();
        s.scalar(format!("{label}.symmetry_residual"), inv.max());
        s.check(ctx.small(format!("{label}.t_jjj"), jjj));
        s.check(ctx.small(format!("{label}.t_jjk"), jjk));
        s.check(ctx.small(format!("{label}.distinct_modulus"), modulus));
        s.check(ctx.small(format!("{label}.row_sum"), rows));

        let nt = normalized_triples(&t, &ctx.tol)?;
        if n <= 9 {
            let (worst, count) = max_cocycle_residual(&nt);
            s.scalar(format!("{label}.cocycle_quadruples"), count);
            s.check(ctx.small(format!("{label}.cocycle"), worst));
        } else {
            let samples = ctx.samples(DEFAULT_COCYCLE_SAMPLES);
            let worst = sampled_cocycle_residual(&nt, samples, &mut ctx.rng());
            s.scalar(format!("{label}.cocycle_samples"), samples);
            s.check(ctx.small(format!("{label}.cocycle"), worst));
        }

        let a = structure_coefficients(&e, &t);
        s.check(ctx.small(
            format!("{label}.structure_reconstruction"),
            a.reconstruction_residual(&e),
        ));

        let mut h = Table::new(format!("{label}.phases"), &["angle_over_pi", "count"]);
        for (angle, count) in distinct_phase_histogram(&nt, HISTOGRAM_RESOLUTION) {
            h.push(vec![angle.into(), count.into()]);
        }
        s.table(h);
    }
    Ok(s)
}

fn obstruction(ctx: &Ctx) -> Result<Section> {
    let range = ctx.opts.dims.unwrap_or(DEFAULT_DIMS);
    let rows = obstruction_sweep(range.lo..=range.hi)?;
    let mut t = Table::new("obstruction", &["d", "tau", "implied_sum", "required_sum", "mismatch"]);
    for r in &rows {
        t.push(vec![
            r.d.into(),
            r.tau.into(),
            r.implied_sum.into(),
            r.required_sum.into(),
            r.mismatch.into(),
        ]);
    }
    let min = rows.iter().map(|r| r.mismatch).fold(f64::INFINITY, f64::min);
    let mut s = Section::default();
    s.scalar("dims", range.to_string());
    s.scalar("min_mismatch", min);
    s.check(Check::equals("rows", rows.len(), 2 * (range.hi - range.lo + 1)));
    s.check(Check::above("min_mismatch", min, ctx.opts.tol));
    s.table(t);
    Ok(s)
}

fn orthocross(ctx: &Ctx) -> Result<Section> {
    let mut s = Section::default();
    let mut t = Table::new("orthocross", &["d", "distance", "sic_distance", "margin", "condition"]);
    for d in ctx.dims(&[2, 3, 8]) {
        let m = orthocross_mic::<f64>(d, &ctx.tol)?;
        let v = validate_mic(&m, &ctx.tol)?;
        s.check(Check::holds(format!("d{d}.valid_mic"), v.pass));
        let b = born_matrix(&m.with_policy(UpdatePolicy::Parallel, None)?)?;
        let dist = phi_distance(&b);
        let sic = sic_parallel_distance(d);
        s.check(Check::above(format!("d{d}.exceeds_sic"), dist, sic));
        t.push(vec![
            d.into(),
            dist.into(),
            sic.into(),
            (dist - sic).into(),
            b.condition.into(),
        ]);
    }
    s.table(t);
    Ok(s)
}

fn clifford(ctx: &Ctx) -> Result<Section> {
    let eq = ctx.tol.eq_tol;
    let g = qubit_clifford_group::<f64>()?;
    let products = g.verify_closure(eq)?;
    let zplus = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
    let stab = orbit_of_projector(&g, &zplus, &ctx.tol)?.len();
    let plus = qubit_sic::<f64>(Sign::Plus)?;
    let minus = qubit_sic::<f64>(Sign::Minus)?;
    let sic = orbit_of_projector(&g, &plus.fiducial, &ctx.tol)?.len();

    let mut s = Section::default();
    s.scalar("order", g.order());
    s.scalar("stabilizer_orbit", stab);
    s.scalar("sic_orbit", sic);
    s.check(Check::equals("order", g.order(), 24));
    s.check(Check::equals("closure_products", products, 576));
    s.check(Check::equals("stabilizer_orbit", stab, 6));
    s.check(Check::equals("sic_orbit", sic, 8));

    let mut labels = Table::new("elements", &["index", "label"]);
    for (i, l) in g.labels.iter().enumerate() {
        labels.push(vec![i.into(), l.as_str().into()]);
    }
    s.table(labels);

    match find_clifford_mapping(&plus, &minus, &g, eq)? {
        Some(map) => {
            s.scalar("plus_to_minus", map.label.as_str());
            let mut t = Table::new("plus_to_minus_permutation", &["from", "to"]);
            for (j, k) in map.permutation.iter().enumerate() {
                t.push(vec![j.into(), (*k).into()]);
            }
            s.table(t);
        }
        None => s.scalar("plus_to_minus", "none"),
    }

    let conj = conjugate_sic(&plus)?;
    let r = verify_sic(&conj, &ctx.tol)?;
    s.check(Check::holds("conjugate.is_sic", r.pass));
    let rho = qubit_from_bloch([0.2, -0.4, 0.5]);
    let p = sic_probabilities(&plus, &rho, &ctx.tol)?;
    let flipped: Vec<f64> = p.iter().map(|x| 0.5 - x).collect();
    let back = state_from_probs(&flipped, &conj)?;
    s.check(ctx.small("conjugate.round_trip", back.max_abs_diff(&rho)));
    let map = induced_bloch_map(&plus, |p| p.iter().map(|x| 0.5 - x).collect())?;
    let det = det3(&map);
    s.scalar("conjugate.bloch_determinant", det);
    s.check(ctx.close("conjugate.bloch_determinant", det, -1.0));
    Ok(s)
}

fn qutrit(ctx: &Ctx) -> Result<Section> {
    let eq = ctx.tol.eq_tol;
    let u = qutrit_fourier::<f64>();
    let ds = displacement_set::<f64>(3)?;
    let (x, z) = (ds.get(1, 0), ds.get(0, 1));
    let uxu = &(&u.dagger() * x) * &u;
    let uzu = &(&u.dagger() * z) * &u;
    let f = hesse_fiducial_vector::<f64>();
    let lu = eigen_check(&u, &f, eq)?;
    let v = zauner_unitary::<f64>();
    let table = conjugation_table(&v, &ds, eq)?;
    let lv = eigen_check(&v, &f, eq)?;

    let mut s = Section::default();
    s.scalar("fourier_eigenvalue_re", lu.re);
    s.scalar("fourier_eigenvalue_im", lu.im);
    s.scalar("zauner_eigenvalue_re", lv.re);
    s.scalar("zauner_eigenvalue_im", lv.im);
    s.check(Check::holds(
        "fourier.x_to_z_squared",
        equal_up_to_phase(&uxu, &z.pow(2), eq),
    ));
    s.check(Check::holds("fourier.z_to_x", equal_up_to_phase(&uzu, x, eq)));
    s.check(ctx.small("fourier.eigenvalue", (lu - C::new(0.0, 1.0)).norm()));
    s.check(Check::holds("zauner.linear", is_linear_mod_d(&table, 3)));
    s.check(ctx.small("zauner.eigenvalue", (lv - C::from(1.0)).norm()));
    let mut t = Table::new(
        "zauner_action",
        &["a", "b", "image_a", "image_b", "phase_re", "phase_im"],
    );
    for act in &table {
        t.push(vec![
            act.source.0.into(),
            act.source.1.into(),
            act.image.0.into(),
            act.image.1.into(),
            act.phase.re.into(),
            act.phase.im.into(),
        ]);
    }
    s.table(t);
    Ok(s)
}

fn qbic(ctx: &Ctx) -> Result<Section> {
    let samples = ctx.samples(DEFAULT_QBIC_SAMPLES);
    let mut rng = ctx.rng();
    let mut s = Section::default();
    let mut t = Table::new(
        "qbic",
        &["d", "target", "max_error", "reduced_coefficient", "reduced_max"],
    );
    s.scalar("samples", samples);
    for name in ctx.ensembles(&PLUS_SICS)? {
        let e = build(name)?;
        let a = structure_coefficients(&e, &triple_products(&e, &ctx.tol)?);
        let target = qbic_target(e.dim);
        let mut worst = 0.0f64;
        let mut reduced = 0.0f64;
        for _ in 0..samples {
            let rho = ComplexMatrix::projector(&random_pure(e.dim, &mut rng));
            let p = sic_probabilities(&e, &rho, &ctx.tol)?;
            worst = worst.max((qbic_lhs(&a, &p)? - target).abs());
            let r = if e.dim == 2 {
                qubit_qbic_reduced(&a, &p)?
            } else {
                reduced_qbic(&a, &p)?
            };
            reduced = reduced.max(r.abs());
        }
        let label = name.label();
        s.check(ctx.small(format!("{label}.cubic"), worst));
        s.check(ctx.small(format!("{label}.reduced"), reduced));
        t.push(vec![
            e.dim.into(),
            target.into(),
            worst.into(),
            reduced_qbic_coefficient(e.dim).into(),
            reduced.into(),
        ]);
    }
    s.table(t);
    Ok(s)
}

fn wootters(ctx: &Ctx) -> Result<Section> {
    let (plus, minus) = wootters_basis::<f64>();
    let (a, b) = wootters_coefficients::<f64>();
    let good = pauli_orbit(&wootters_fiducial(a, b, &plus, &minus, &ctx.tol)?, "wootters")?;
    let good = verify_sic(&good, &ctx.tol)?;
    let bad = pauli_orbit(&wootters_fiducial(1.0, 0.0, &plus, &minus, &ctx.tol)?, "product")?;
    let bad = verify_sic(&bad, &ctx.tol)?;
    let mut s = Section::default();
    s.scalar("a", a);
    s.scalar("b", b);
    s.scalar("product_deviation", bad.max_deviation());
    s.check(ctx.small("fiducial_deviation", good.max_deviation()));
    s.check(Check::holds("fiducial_is_sic", good.pass));
    s.check(Check::holds("product_is_not_sic", !bad.pass));
    Ok(s)
}

fn rank_half(ctx: &Ctx) -> Result<Section> {
    let dims = ctx.dims(&[3, 5]);
    if let Some(d) = dims.iter().find(|&&d| d < 3 || d.is_multiple_of(2)) {
        return Err(usage(format!("rank-half needs an odd dimension >= 3, got {d}")));
    }
    let mut s = Section::default();
    for d in dims {
        let m = rank_half_povm::<f64>(d)?;
        s.check(Check::holds(
            format!("d{d}.valid_mic"),
            validate_mic(&m, &ctx.tol)?.pass,
        ));
        let mut ranks = Vec::with_capacity(m.len());
        let mut trace = 0.0f64;
        for e in &m.elements {
            ranks.push(rank_of(e, &ctx.tol)?);
            trace = trace.max((e.trace().re - 1.0 / d as f64).abs());
        }
        s.check(Check::holds(
            format!("d{d}.rank"),
            ranks.iter().all(|&r| r == d.div_ceil(2)),
        ));
        s.check(ctx.small(format!("d{d}.trace"), trace));
        if d == 3 {
            let cmp = compare_with_hesse(&m, &hesse_sic()?, &ctx.tol)?;
            s.scalar("d3.hesse_max_deviation", cmp.max_deviation);
            s.scalar(
                "d3.hesse_verdict",
                match cmp.verdict {
                    Verdict::Matched => "matched",
                    Verdict::Unmatched => "unmatched",
                },
            );
            s.check(Check::holds("d3.hesse_complements", cmp.verdict == Verdict::Matched));
            if let Some(b) = cmp.bijection {
                let mut t = Table::new("d3.hesse_bijection", &["element", "projector"]);
                for (i, j) in b.into_iter().enumerate() {
                    t.push(vec![i.into(), j.into()]);
                }
                s.table(t);
            }
        }
    }
    Ok(s)
}

fn hoggar(ctx: &Ctx) -> Result<Section> {
    let name = match ctx.opts.ensemble {
        None => EnsembleName::HoggarPlus,
        Some(e @ (EnsembleName::HoggarPlus | EnsembleName::HoggarMinus)) => e,
        Some(e) => return Err(usage(format!("hoggar needs a Hoggar ensemble, got {}", e.label()))),
    };
    let e = build(name)?;
    let sign = match name {
        EnsembleName::HoggarPlus => Sign::Plus,
        _ => Sign::Minus,
    };
    let fid = hoggar_fiducial_vector::<f64>(sign);
    let tau = three_tangle(&fid, &ctx.tol)?;
    let mut spread = 0.0f64;
    for alpha in 0..64 {
        let v = pauli_word::<f64>(alpha, 3).apply(&fid);
        spread = spread.max((three_tangle(&v, &ctx.tol)? - tau).abs());
    }
    let mut s = Section::default();
    s.scalar("ensemble", name.label());
    s.scalar("three_tangle", tau);
    s.check(ctx.close("three_tangle", tau, 2.0 / 9.0));
    s.check(ctx.small("tangle_orbit_spread", spread));

    let f = fano_coefficients(&e.fiducial, 3, &ctx.tol)?;
    let fano = f.coefficients[1..]
        .iter()
        .map(|c| (c.abs() - 1.0 / 3.0).abs())
        .fold(0.0, f64::max);
    s.check(ctx.small("fano_magnitude", fano));
    let mut h = Table::new("fano_magnitudes", &["magnitude", "count"]);
    for (m, c) in f.magnitude_histogram(HISTOGRAM_RESOLUTION) {
        h.push(vec![m.into(), c.into()]);
    }
    s.table(h);

    let m = marginals(&e.fiducial, &ctx.tol)?;
    let mut q = Table::new("marginals", &["qubit", "x", "y", "z", "radius"]);
    let mut radius = 0.0f64;
    for mq in &m.one_qubit {
        q.push(vec![
            mq.qubit.into(),
            mq.bloch[0].into(),
            mq.bloch[1].into(),
            mq.bloch[2].into(),
            mq.radius.into(),
        ]);
        radius = radius.max((mq.radius - 1.0 / 3f64.sqrt()).abs());
    }
    s.table(q);
    s.check(ctx.small("marginal_radius", radius));
    s.check(ctx.small("marginal_routes", m.route_deviation));

    let other = match sign {
        Sign::Plus => Sign::Minus,
        Sign::Minus => Sign::Plus,
    };
    let g = fano_coefficients(&hoggar_sic::<f64>(other)?.fiducial, 3, &ctx.tol)?;
    let rel = conjugate_fano_relation(&f, &g)?;
    s.scalar("conjugate_flipped_words", rel.flipped_words);
    s.check(ctx.small("conjugate_relation", rel.max_violation));
    s.check(Check::equals("conjugate_flipped_words", rel.flipped_words, 28));

    let q = sign_flipped_operator(&e.fiducial, &ctx.tol)?;
    let mut spectrum = Table::new("sign_flipped_spectrum", &["index", "eigenvalue"]);
    for (i, l) in q.spectrum.iter().enumerate() {
        spectrum.push(vec![i.into(), (*l).into()]);
    }
    s.table(spectrum);
    s.scalar("sign_flipped_trace", q.trace);
    s.scalar("sign_flipped_psd", q.psd);
    s.check(ctx.close("sign_flipped_trace", q.trace, 1.0));

    let r = pseudo_sic(&e.fiducial, &ctx.tol)?.report(&ctx.tol)?;
    s.scalar("pseudo_sic_non_psd", r.non_psd);
    s.check(Check::equals("pseudo_sic_count", r.count, 64));
    s.check(ctx.small("pseudo_sic_trace", r.trace_deviation));
    s.check(ctx.small("pseudo_sic_gram", r.gram_deviation));
    s.check(ctx.small("pseudo_sic_sum", r.sum_deviation));
    s.check(Check::equals("pseudo_sic_non_psd", r.non_psd, 64));
    Ok(s)
}

/// Exact `‖I − Φ‖²` for the deterministic policies.
fn expected_distance(policy: UpdatePolicy, d: usize) -> Option<f64> {
    match policy {
        UpdatePolicy::Parallel => Some(sic_parallel_distance(d)),
        UpdatePolicy::Antipodal if d == 2 => Some(48.0),
        _ => None,
    }
}

fn born(ctx: &Ctx) -> Result<Section> {
    let panel: Vec<(EnsembleName, UpdatePolicy)> = match (ctx.opts.policy, ctx.opts.dim, ctx.opts.ensemble) {
        (None, None, None) => {
            let mut v: Vec<_> = PLUS_SICS.iter().map(|&e| (e, UpdatePolicy::Parallel)).collect();
            v.extend(UpdatePolicy::ALL[1..].iter().map(|&p| (EnsembleName::QubitPlus, p)));
            v
        }
        (policy, _, _) => {
            let policy = policy.unwrap_or(UpdatePolicy::Parallel);
            ctx.ensembles(&[EnsembleName::QubitPlus])?
                .into_iter()
                .map(|e| (e, policy))
                .collect()
        }
    };
    let mut s = Section::default();
    for (name, policy) in panel {
        let e = build(name)?;
        if matches!(policy, UpdatePolicy::Antipodal | UpdatePolicy::RandomUnitaryOfAntipodal) && e.dim != 2 {
            return Err(usage(format!("{policy} updating is defined for qubits only")));
        }
        let reference = Mic::from_sic(&e);
        let prefix = format!("{}.{policy}", name.label());
        if policy.is_random() {
            let samples = ctx.samples(DEFAULT_BORN_SAMPLES);
            let r = monte_carlo_phi(&reference, policy, samples, ctx.opts.seed)?;
            s.scalar(format!("{prefix}.samples"), r.samples);
            s.scalar(format!("{prefix}.used"), r.used);
            s.scalar(format!("{prefix}.skipped"), r.skipped);
            s.scalar(format!("{prefix}.min"), r.min);
            s.scalar(format!("{prefix}.mean"), r.mean);
            s.scalar(format!("{prefix}.max"), r.max);
            s.check(Check::above(format!("{prefix}.used"), r.used as f64, 0.0));
            if policy == UpdatePolicy::RandomUnitaryOfSelf {
                let floor = sic_parallel_distance(e.dim);
                let slack = ctx.opts.tol * floor.max(1.0);
                s.check(Check::above(format!("{prefix}.min_vs_parallel"), r.min, floor - slack));
            }
            let mut h = Table::new(format!("{prefix}.histogram"), &["lo", "hi", "count"]);
            for b in &r.histogram {
                h.push(vec![b.lo.into(), b.hi.into(), b.count.into()]);
            }
            s.table(h);
            if ctx.opts.distances {
                let mut t = Table::new(format!("{prefix}.distances"), &["sample", "distance"]);
                for (i, x) in r.distances.iter().enumerate() {
                    t.push(vec![i.into(), (*x).into()]);
                }
                s.table(t);
            }
        } else {
            let b = born_matrix(&reference.with_policy(policy, None)?)?;
            let dist = phi_distance(&b);
            s.scalar(format!("{prefix}.distance"), dist);
            s.scalar(format!("{prefix}.condition"), b.condition);
            if let Some(want) = expected_distance(policy, e.dim) {
                s.check(ctx.close(format!("{prefix}.distance"), dist, want));
            }
            let residual = b.remultiplication_residual();
            s.check(Check::at_most(
                format!("{prefix}.remultiplication"),
                residual,
                ctx.opts.tol * b.condition.max(1.0),
            ));
            s.table(real_table(format!("{prefix}.phi"), &b.phi));
        }
    }
    Ok(s)
}

fn bloch(ctx: &Ctx) -> Result<Section> {
    let samples = ctx.samples(DEFAULT_BLOCH_SAMPLES);
    let mut rng = ctx.rng();
    let (mut centroid, mut pairs, mut valid) = (0.0f64, 0.0f64, true);
    let mut last = None;
    for _ in 0..samples {
        let b = BlochMic::new(BlochMic::<f64>::random(&mut rng).vectors, &ctx.tol)?;
        let g = bloch_geometry(&b);
        centroid = centroid.max(g.centroid_error);
        pairs = pairs.max(g.disjoint_pair_residual);
        valid &= validate_mic(&b.to_mic(), &ctx.tol)?.pass;
        last = Some(b);
    }
    let last = last.expect("at least one sample");
    let audit = orthogonality_audit(&last.to_mic(), AUDIT_TRIALS, &mut rng, &ctx.tol)?;
    let mut s = Section::default();
    s.scalar("samples", samples);
    s.scalar("audit_trials", audit.trials);
    s.scalar("min_inner_product", audit.min_inner_product);
    s.scalar("max_zero_count", audit.max_zero_count);
    s.check(Check::holds("valid_mics", valid));
    s.check(ctx.small("centroid_error", centroid));
    s.check(ctx.small("disjoint_pair_residual", pairs));
    s.check(Check::above("min_inner_product", audit.min_inner_product, 0.0));
    s.check(Check::at_most("max_zero_count", audit.max_zero_count as f64, 1.0));
    let mut t = Table::new("last_vectors", &["vertex", "x", "y", "z"]);
    for (i, v) in last.vectors.iter().enumerate() {
        t.push(vec![i.into(), Cell::from(v[0]), v[1].into(), v[2].into()]);
    }
    s.table(t);
    Ok(s)
}
