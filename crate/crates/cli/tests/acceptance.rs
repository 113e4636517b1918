//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, Vector3};
use qframe_cli::commands::{
    max_z, run_estimate, run_moments, run_orient_sweep, run_qdoc, sweep_trends,
};
use qframe_cli::config::{EstimateConfig, MomentsConfig, OrientSweepConfig, QdocConfig};
use qframe_cli::output::strip_wall_clock;
use qframe_core::coord_frame::{expected_recon_error, mercedes_benz_frame, CoordFrame, NoiseSpec};
use qframe_core::detection::{binomial_se, prob_error, BinaryHypothesis};
use qframe_core::herm_space::pure_state;
use qframe_core::povm::{platonic_povm, PlatonicSpec, Solid};
use qframe_core::sampling_stats::{
    deviation_moments_analytic, empirical_deviation_moments, LnFactorial,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn normal_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

fn random_frame(rng: &mut ChaCha8Rng) -> CoordFrame {
    loop {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(n..=12);
        if let Ok(f) = CoordFrame::from_analysis_matrix(&normal_matrix(rng, m, n)) {
            return f;
        }
    }
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation3<f64> {
    let q = nalgebra::Quaternion::new(
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
    );
    nalgebra::UnitQuaternion::from_quaternion(q).to_rotation_matrix()
}

/// Frame identities: reconstruction through the canonical dual, agreement with an
/// SVD pseudoinverse, and `null(F)` orthogonal to `range(A)`.
fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut recon, mut pinv, mut orth) = (0.0f64, 0.0f64, 0.0f64);
    let mut null_dims_ok = true;
    for _ in 0..100 {
        let f = random_frame(&mut rng);
        let a = f.analysis_matrix();
        let dual = f.canonical_dual().unwrap();
        let v = DVector::from_fn(f.dim(), |_, _| StandardNormal.sample(&mut rng));
        let back = dual.reconstruct(&f.analyze(&v).unwrap()).unwrap();
        recon = recon.max((back - &v).amax());
        let svd_pinv = a.clone().pseudo_inverse(1e-14).unwrap();
        pinv = pinv.max((dual.synthesis_matrix() - svd_pinv).amax());
        let null = f.null_space_basis().unwrap();
        null_dims_ok &= null.ncols() == f.len() - f.dim();
        if null.ncols() > 0 {
            orth = orth.max((null.transpose() * &a).amax());
        }
    }
    outcome(
        recon <= 1e-10 && pinv <= 1e-10 && orth <= 1e-12 && null_dims_ok,
        format!("max recon err {recon:.2e}, |L* - pinv(A)| {pinv:.2e}, |N^T A| {orth:.2e}"),
    )
}

/// The canonical dual is never beaten by a random dual under i.i.d. noise.
fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    let mut oracle_gap = 0.0f64;
    let mut tightest = f64::INFINITY;
    for _ in 0..20 {
        let f = random_frame(&mut rng);
        let var = rng.random_range(0.1..3.0);
        let noise = NoiseSpec::iid(f.len(), var).unwrap();
        let canonical = f.canonical_dual().unwrap();
        let best = expected_recon_error(&f, &canonical, &noise).unwrap();
        // var * tr(S^{-1}) is the closed form for the canonical dual.
        let s_inv = f.frame_operator().try_inverse().unwrap();
        oracle_gap = oracle_gap.max((best - var * s_inv.trace()).abs() / best);
        for _ in 0..200 {
            let dual = f.random_dual(rng.random()).unwrap();
            let e = expected_recon_error(&f, &dual, &noise).unwrap();
            let direct =
                var * (dual.synthesis_matrix() * dual.synthesis_matrix().transpose()).trace();
            oracle_gap = oracle_gap.max((e - direct).abs() / direct);
            if e < best * (1.0 - 1e-12) {
                violations += 1;
            }
            tightest = tightest.min(e - best);
        }
    }
    outcome(
        violations == 0 && oracle_gap <= 1e-10,
        format!("4000 duals, {violations} violations, min excess {tightest:.2e}, closed-form rel gap {oracle_gap:.2e}"),
    )
}

/// Mercedes-Benz frame with unit noise variance: `E* = 4/3`, checked by Monte Carlo.
fn criterion_3() -> Outcome {
    let f = mercedes_benz_frame();
    let dual = f.canonical_dual().unwrap();
    let exact = expected_recon_error(&f, &dual, &NoiseSpec::iid(3, 1.0).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 100_000;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let e = DVector::from_fn(3, |_, _| StandardNormal.sample(&mut rng));
        let err = dual.reconstruct(&e).unwrap().norm_squared();
        sum += err;
        sum_sq += err * err;
    }
    let mean = sum / n as f64;
    let se = ((sum_sq / n as f64 - mean * mean) / (n as f64 - 1.0)).sqrt();
    let z = (mean - 4.0 / 3.0) / se;
    outcome(
        (exact - 4.0 / 3.0).abs() <= 1e-15 && z.abs() <= 3.0,
        format!("E* = {exact:.16}, MC mean {mean:.5} (z = {z:+.2})"),
    )
}

/// Tight IC for every solid under random rotations, with `C = 1/3`, `a^2 = 1/M` and
/// `CN = Ma^2`; the antipodal pair is not IC.
fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut resid, mut cn, mut c_dev, mut a_dev) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut all_tight = true;
    for solid in [
        Solid::Tetrahedron,
        Solid::Octahedron,
        Solid::Cube,
        Solid::Icosahedron,
    ] {
        let m = solid.vertex_count() as f64;
        let mut rotations = vec![Rotation3::identity()];
        rotations.extend((0..25).map(|_| random_rotation(&mut rng)));
        for r in rotations {
            let p = platonic_povm(&PlatonicSpec::new(solid).rotated(r)).unwrap();
            let t = p.tight_ic_check(1e-12).unwrap();
            all_tight &= t.is_tight_ic && p.ic_check().is_ic;
            resid = resid.max(t.residual);
            let e = p.traceless_rep().unwrap().entf_params(1e-12).unwrap();
            cn = cn.max(e.cn_ma2_residual());
            c_dev = c_dev.max((e.c - 1.0 / 3.0).abs());
            a_dev = a_dev.max((e.a * e.a - 1.0 / m).abs());
        }
    }
    let pair = platonic_povm(&PlatonicSpec::new(Solid::AntipodalPair)).unwrap();
    let pair_fails = !pair.ic_check().is_ic;
    outcome(
        all_tight && resid <= 1e-12 && cn <= 1e-12 && c_dev <= 1e-12 && a_dev <= 1e-12 && pair_fails,
        format!(
            "104 POVMs, max tight resid {resid:.2e}, |CN - Ma^2| {cn:.2e}, |C - 1/3| {c_dev:.2e}, |a^2 - 1/M| {a_dev:.2e}, pair not IC: {pair_fails}"
        ),
    )
}

/// `E[d_j d_k]` by summing over all `M^L` ordered outcome sequences.
fn sequence_oracle(p: &[f64], shots: u32) -> DMatrix<f64> {
    let m = p.len();
    let l = shots as f64;
    let mut out = DMatrix::zeros(m, m);
    for code in 0..m.pow(shots) {
        let mut c = code;
        let mut counts = vec![0usize; m];
        let mut prob = 1.0;
        for _ in 0..shots {
            counts[c % m] += 1;
            prob *= p[c % m];
            c /= m;
        }
        let d = DVector::from_fn(m, |k, _| counts[k] as f64 / l - p[k]);
        out += d.clone() * d.transpose() * prob;
    }
    out
}

fn criterion_5() -> Outcome {
    let cases: Vec<Vec<f64>> = vec![
        vec![0.5, 0.5],
        vec![0.3, 0.7],
        vec![1.0, 0.0],
        vec![0.2, 0.3, 0.5],
        vec![0.1, 0.6, 0.3],
        vec![1.0 / 3.0; 3],
    ];
    let mut oracle_dev = 0.0f64;
    let mut worst_z = 0.0f64;
    for p in &cases {
        for l in 1..=4u32 {
            let a = deviation_moments_analytic(p, l as u64).unwrap();
            oracle_dev = oracle_dev.max((a.second - sequence_oracle(p, l)).amax());
        }
        let (emp, se) = empirical_deviation_moments(p, 4, 100_000, 5).unwrap();
        let a = deviation_moments_analytic(p, 4).unwrap();
        for j in 0..p.len() {
            for k in 0..p.len() {
                let d = (emp.second[(j, k)] - a.second[(j, k)]).abs();
                let z = if se[(j, k)] > 0.0 {
                    d / se[(j, k)]
                } else if d > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                };
                worst_z = worst_z.max(z);
            }
        }
    }
    let cfg = MomentsConfig {
        draws: 100_000,
        ..MomentsConfig::default()
    };
    let (_, dev) = run_moments(&cfg).unwrap();
    let report_ok = (dev.stated_vs_analytic - 1.0 / 8.0).abs() <= 1e-15;
    outcome(
        oracle_dev <= 1e-14 && worst_z <= 3.0 && report_ok,
        format!(
            "enumeration gap {oracle_dev:.2e}, empirical max |z| {worst_z:.2} at 1e5 draws; p=(1/2,1/2), L=4 off-diagonal: oracle -1/16, stated formula -3/16 (gap {:.4})",
            dev.stated_vs_analytic
        ),
    )
}

fn criterion_6() -> Outcome {
    let cfg = EstimateConfig {
        trials: 10_000,
        seed: 6,
        ..EstimateConfig::default()
    };
    let (_, grid) = run_estimate(&cfg).unwrap();
    let worst = grid.iter().map(|s| s.z_score().abs()).fold(0.0, f64::max);
    let mut scaling = Vec::new();
    for solid in &cfg.solids {
        let m = solid.vertex_count();
        let at = |l: u64| {
            grid.iter()
                .find(|s| s.m == m && s.shots == l)
                .unwrap()
                .mean_error_sq
                * l as f64
        };
        scaling.push(at(5) / at(50));
    }
    let scaling_ok = scaling.iter().all(|r| (r - 1.0).abs() <= 0.15);
    let ratios: Vec<String> = scaling.iter().map(|r| format!("{r:.3}")).collect();
    outcome(
        grid.len() == 12 && worst <= 3.0 && scaling_ok,
        format!(
            "12 cells x 1e4 trials, max |z| vs exact prediction {worst:.2}; 5*E(L=5) / 50*E(L=50) per M: [{}]",
            ratios.join(", ")
        ),
    )
}

/// Two-sided level of a 3-SE band under the normal approximation.
const THREE_SIGMA_LEVEL: f64 = 0.0026997960632601866;

fn ln_binomial_pmf(t: &LnFactorial, n: usize, k: usize, p: f64) -> f64 {
    let mut v = t.get(n) - t.get(k) - t.get(n - k);
    if k > 0 {
        v += k as f64 * p.ln();
    }
    if n > k {
        v += (n - k) as f64 * (1.0 - p).ln();
    }
    v
}

/// Whether an estimate `phat` from `n` Bernoulli(`p`) draws falls outside the 3-SE band.
/// Where `n p (1 - p) < 10` the normal band is replaced by an exact binomial tail test
/// at the same two-sided level.
fn outside_band(t: &LnFactorial, n: usize, p: f64, phat: f64) -> bool {
    if p <= 0.0 || p >= 1.0 {
        return phat != p;
    }
    if n as f64 * p * (1.0 - p) >= 10.0 {
        return (phat - p).abs() > 3.0 * binomial_se(p, n);
    }
    let x = (phat * n as f64).round() as usize;
    let upper: f64 = (x..=n).map(|j| ln_binomial_pmf(t, n, j, p).exp()).sum();
    let lower: f64 = (0..=x).map(|j| ln_binomial_pmf(t, n, j, p).exp()).sum();
    2.0 * upper.min(lower) < THREE_SIGMA_LEVEL
}

/// Exact operating points vs 1e5-sample Monte Carlo at every grid threshold. Each
/// comparison is a 3-SE test; the family passes unless the number of exceedances is
/// itself significant at the same level under Binomial(K, level).
fn criterion_7() -> Outcome {
    let n = 100_000;
    let cfg = QdocConfig {
        compare_monte_carlo: true,
        monte_carlo_samples: n,
        seed: 7,
        ..QdocConfig::default()
    };
    let (_, cells) = run_qdoc(&cfg).unwrap();
    let table = LnFactorial::new(n);
    let mut worst = 0.0f64;
    let mut all_exact = true;
    let (mut k, mut exceed) = (0usize, 0usize);
    for c in &cells {
        all_exact &= c.primary.method.name() == "exact";
        let (g, m) = (
            c.exact_grid.as_ref().unwrap(),
            c.monte_carlo.as_ref().unwrap(),
        );
        worst = worst.max(max_z(g, m, n));
        for e in &g.points {
            let mc = m.points.iter().find(|x| x.eta == e.eta).unwrap();
            for (p, phat) in [(e.pf, mc.pf), (e.pd, mc.pd)] {
                k += 1;
                exceed += outside_band(&table, n, p, phat) as usize;
            }
        }
    }
    let kt = LnFactorial::new(k);
    let family_p: f64 = (exceed..=k)
        .map(|j| ln_binomial_pmf(&kt, k, j, THREE_SIGMA_LEVEL).exp())
        .sum();
    let mut dominance = Vec::new();
    for solid in [Solid::Tetrahedron, Solid::Octahedron] {
        let get = |l: u64| {
            cells
                .iter()
                .find(|c| c.solid == solid && c.primary.shots == l)
                .unwrap()
        };
        dominance.push(get(20).primary.dominates(&get(5).primary, 1e-12));
    }
    outcome(
        cells.len() == 6 && all_exact && family_p >= THREE_SIGMA_LEVEL && dominance.iter().all(|&d| d),
        format!(
            "6 exact curves; {exceed} of {k} threshold comparisons outside 3 SE (family p = {family_p:.3}; max normal |z| {worst:.2}); L=20 dominates L=5 for M=4,6: {dominance:?}"
        ),
    )
}

/// Every rotation permuting the vertex set, found by mapping one adjacent vertex pair
/// onto every pair at the same angle.
fn symmetry_group(solid: Solid) -> Vec<Rotation3<f64>> {
    let v = solid.vertices();
    let frame = |a: &Vector3<f64>, b: &Vector3<f64>| {
        let e1 = a.normalize();
        let e2 = (b - e1 * e1.dot(b)).normalize();
        Matrix3::from_columns(&[e1, e2, e1.cross(&e2)])
    };
    let j0 = (1..v.len())
        .filter(|&j| v[0].dot(&v[j]) > -1.0 + 1e-9)
        .max_by(|&a, &b| v[0].dot(&v[a]).total_cmp(&v[0].dot(&v[b])))
        .unwrap();
    let base = frame(&v[0], &v[j0]);
    let angle = v[0].dot(&v[j0]);
    let mut out = Vec::new();
    for i in 0..v.len() {
        for j in 0..v.len() {
            if i == j || (v[i].dot(&v[j]) - angle).abs() > 1e-9 {
                continue;
            }
            let r = frame(&v[i], &v[j]) * base.transpose();
            let permutes = v
                .iter()
                .all(|x| v.iter().any(|y| (r * x - y).norm() < 1e-9));
            if permutes {
                out.push(Rotation3::from_matrix_unchecked(r));
            }
        }
    }
    out
}

fn criterion_8() -> Outcome {
    let cfg = OrientSweepConfig::default();
    let (_, summaries) = run_orient_sweep(&cfg).unwrap();
    let (spread_ok, minima_ok) = sweep_trends(&summaries).unwrap();
    let hyp =
        BinaryHypothesis::equal_priors(pure_state(0.0, 0.0), pure_state(2.0 * PI / 3.0, PI / 3.0))
            .unwrap();
    let mut sym_dev = 0.0f64;
    let mut group_sizes = Vec::new();
    for solid in [Solid::Tetrahedron, Solid::Octahedron, Solid::Cube] {
        let canonical = prob_error(
            &hyp,
            &platonic_povm(&PlatonicSpec::new(solid)).unwrap(),
            cfg.shots,
        )
        .unwrap();
        let group = symmetry_group(solid);
        group_sizes.push(group.len());
        for r in group {
            let pe = prob_error(
                &hyp,
                &platonic_povm(&PlatonicSpec::new(solid).rotated(r)).unwrap(),
                cfg.shots,
            )
            .unwrap();
            sym_dev = sym_dev.max((pe - canonical).abs());
        }
    }
    let groups_ok = group_sizes == vec![12, 24, 24];
    let spreads: Vec<String> = summaries
        .iter()
        .map(|s| {
            format!(
                "M={} spread {:.4} min {:.2e}",
                s.solid.vertex_count(),
                s.spread(),
                s.pe_min
            )
        })
        .collect();
    let flag = |b: bool| if b { "pass" } else { "flag" };
    outcome(
        spread_ok && groups_ok && sym_dev <= 1e-12,
        format!(
            "L={}, {} orientations; {}; spread non-increasing: {}, minimum non-decreasing: {}; symmetry groups {group_sizes:?} reproduce canonical P_e to {sym_dev:.1e}",
            cfg.shots,
            summaries[1].count,
            spreads.join("; "),
            flag(spread_ok),
            flag(minima_ok)
        ),
    )
}

fn run_cli(args: &[&str], threads: Option<&str>, dir: &Path) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qframe"));
    cmd.args(args).current_dir(dir);
    match threads {
        Some(t) => cmd.env("QFRAME_THREADS", t),
        None => cmd.env_remove("QFRAME_THREADS"),
    };
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "verify",
            "--solid",
            "cube",
            "--rotate",
            "0.9,0.1,-0.3,0.2",
            "--format",
            "toml",
        ],
        vec!["estimate", "--trials", "200", "--seed", "7"],
        vec![
            "qdoc",
            "--compare-monte-carlo",
            "--monte-carlo-samples",
            "20000",
            "--envelope",
            "--seed",
            "3",
        ],
        vec!["orient-sweep", "--axes", "20", "--angles", "5"],
        vec![
            "moments",
            "--p",
            "0.2,0.3,0.5",
            "--shots",
            "6",
            "--traces",
            "0.5,0.7,0.8",
            "--draws",
            "20000",
            "--seed",
            "9",
        ],
    ];
    let mut mismatches = Vec::new();
    for args in &commands {
        let runs: Vec<(i32, String)> = [Some("1"), Some("4"), None, Some("1")]
            .iter()
            .map(|t| run_cli(args, *t, dir.path()))
            .collect();
        let first = strip_wall_clock(&runs[0].1);
        let ok = runs[0].0 == 0
            && !first.is_empty()
            && runs
                .iter()
                .all(|(code, out)| *code == 0 && strip_wall_clock(out) == first);
        if !ok {
            mismatches.push(args[0]);
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("5 commands x 4 runs (QFRAME_THREADS = 1, 4, unset, 1); differing: {mismatches:?}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 9] = [
        ("frame identities", criterion_1, Duration::from_secs(5)),
        (
            "canonical dual optimality",
            criterion_2,
            Duration::from_secs(10),
        ),
        (
            "Mercedes-Benz closed form",
            criterion_3,
            Duration::from_secs(5),
        ),
        ("Platonic tight IC", criterion_4, Duration::from_secs(5)),
        (
            "deviation moment oracle",
            criterion_5,
            Duration::from_secs(30),
        ),
        (
            "estimation self-consistency",
            criterion_6,
            Duration::from_secs(120),
        ),
        (
            "detection exact vs Monte Carlo",
            criterion_7,
            Duration::from_secs(120),
        ),
        ("orientation sweep", criterion_8, Duration::from_secs(180)),
        ("CLI determinism", criterion_9, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let pass = o.pass && took <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {} [{name}]: {} ({:.2} s, budget {} s) {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
