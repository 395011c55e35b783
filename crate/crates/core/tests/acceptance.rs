//! End-to-end acceptance checks, one test per criterion. Each test prints a
//! single summary line (visible under `--nocapture`) with the measured margin
//! and, where a budget applies, the elapsed time.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use relaxproj::{
    blocks_to_affine, bound_certificate, compose, contraction_factor, fixed_points,
    gaussian_instance, intersect, is_cycle, iterate, iterate_with, kappa_star, least_squares,
    linear_rate, operator_norm, project_onto_fix, segment_cycles, solve, unrolled_tail,
    unrolled_tail_norms, verify_boundedness, AffineSubspace, BlockSystem, LambdaRule,
    LinearSubspace, Matrix, RelaxedProjector, Schedule, ScheduleKind, SubcollectionKappa, Vector,
};
use relaxproj::tol;

fn random_vector(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vector {
    Vector::from_fn(d, |_, _| rng.random_range(-scale..scale))
}

fn random_linear(rng: &mut ChaCha8Rng, d: usize, k: usize) -> LinearSubspace {
    let vs: Vec<Vector> = (0..k).map(|_| random_vector(rng, d, 1.0)).collect();
    LinearSubspace::span(d, &vs, tol::RANK_REL).unwrap()
}

fn random_affine(rng: &mut ChaCha8Rng, d: usize, k: usize) -> AffineSubspace {
    let vs: Vec<Vector> = (0..k).map(|_| random_vector(rng, d, 1.0)).collect();
    let point = random_vector(rng, d, 1.0);
    AffineSubspace::from_point_and_spanning(&point, &vs, tol::RANK_REL).unwrap()
}

/// Identity suite: orthogonal decomposition, the norm-drop identity of the
/// relaxed projector, the sine threshold equivalence, commutation for nested
/// subspaces, and sine monotonicity, on 1000 random triples each.
#[test]
fn criterion_01_projection_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_rel = 0.0f64;
    let mut worst_mono = 0.0f64;

    for _ in 0..1000 {
        let d = rng.random_range(2..=8);
        let k2 = rng.random_range(1..=d);
        let l2 = random_linear(&mut rng, d, k2);
        let k1 = rng.random_range(0..=l2.dim());
        let combos: Vec<Vector> = (0..k1)
            .map(|_| l2.basis() * random_vector(&mut rng, l2.dim(), 1.0))
            .collect();
        let l1 = LinearSubspace::span(d, &combos, tol::RANK_REL).unwrap();
        let x = random_vector(&mut rng, d, 2.0);
        let lambda = rng.random_range(0.05..1.95);
        let scale = x.norm_squared().max(1.0);

        let p = l2.project(&x);
        let residual = &x - &p;
        worst_rel = worst_rel.max(
            (x.norm_squared() - (p.norm_squared() + residual.norm_squared())).abs() / scale,
        );

        let r = l2.relax(lambda, &x);
        let drop = x.norm_squared() - r.norm_squared();
        worst_rel = worst_rel
            .max((drop - lambda * (2.0 - lambda) * residual.norm_squared()).abs() / scale);

        let (sin, _) = l2.sine_cosine(&x);
        let predicted = (1.0 - lambda * (2.0 - lambda) * sin * sin) * x.norm_squared();
        worst_rel = worst_rel.max((r.norm_squared() - predicted).abs() / scale);

        let shrink = |eps: f64| (1.0 - lambda * (2.0 - lambda) * eps * eps).sqrt() * x.norm();
        let eps_lo = 0.9 * sin;
        assert!(sin >= eps_lo);
        assert!(r.norm() <= shrink(eps_lo) + 1e-12 * x.norm());
        let eps_hi = 1.1 * sin + 1e-6;
        if eps_hi < 1.0 {
            assert!(sin < eps_hi);
            assert!(r.norm() > shrink(eps_hi) - 1e-12 * x.norm());
        }

        let p1x = l1.project(&x);
        let commute_scale = 1.0 + x.norm();
        worst_rel = worst_rel.max((l1.project(&p) - &p1x).norm() / commute_scale);
        worst_rel = worst_rel.max((l1.project(&r) - &p1x).norm() / commute_scale);
        worst_rel = worst_rel.max((l2.relax(lambda, &p1x) - &p1x).norm() / commute_scale);

        let (sin_before, _) = l1.sine_cosine(&x);
        let (sin_after, _) = l1.sine_cosine(&r);
        worst_mono = worst_mono.max(sin_after - sin_before);
    }

    let elapsed = start.elapsed();
    assert!(worst_rel <= 1e-9, "worst relative identity error {worst_rel:e}");
    assert!(worst_mono <= 1e-10, "sine monotonicity violated by {worst_mono:e}");
    assert!(elapsed.as_secs_f64() < 10.0, "identity suite took {elapsed:?}");
    println!(
        "criterion 01 projection identities: PASS (worst rel err {worst_rel:.2e}, \
         worst monotonicity slack {worst_mono:.2e}, {elapsed:.2?})"
    );
}

/// Direct iteration equals the word product applied to x0 plus lambda times
/// the accumulated tail, on 200 random instances.
#[test]
fn criterion_02_unrolled_iteration_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_rel = 0.0f64;

    for t in 0..200u64 {
        let d = rng.random_range(2..=6);
        let ell = rng.random_range(1..=4);
        let collection: Vec<AffineSubspace> = (0..ell)
            .map(|_| {
                let k = rng.random_range(1..d);
                random_affine(&mut rng, d, k)
            })
            .collect();
        let lambda = [0.3, 1.0, 1.7][(t % 3) as usize];
        let n = rng.random_range(0..200usize);
        let schedule = match t % 3 {
            0 => Schedule::cyclic(lambda).unwrap(),
            1 => Schedule::random(t, lambda).unwrap(),
            _ => {
                let word = (0..=n).map(|_| rng.random_range(0..ell)).collect();
                Schedule::explicit(word, lambda).unwrap()
            }
        };
        let x0 = random_vector(&mut rng, d, 2.0);

        let trace = iterate(&collection, &schedule, &x0, n + 1).unwrap();
        let mut word_product = x0.clone();
        for j in 0..=n {
            let i = schedule.index_at(j, ell).unwrap();
            word_product = collection[i].direction().relax(lambda, &word_product);
        }
        let tail = unrolled_tail(&collection, &schedule, n).unwrap();
        let reconstructed = word_product + tail * lambda;
        let err = (&reconstructed - &trace.final_iterate).norm()
            / (1.0 + trace.final_iterate.norm());
        worst_rel = worst_rel.max(err);
    }

    assert!(worst_rel <= 1e-9, "worst unrolling error {worst_rel:e}");
    println!("criterion 02 unrolled iteration equivalence: PASS (worst rel err {worst_rel:.2e})");
}

fn certificate_instance(seed: u64) -> (Vec<AffineSubspace>, f64, Vector) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3000 + seed);
    let d = rng.random_range(2..=5);
    let ell = rng.random_range(1..=3usize);
    let collection: Vec<AffineSubspace> = (0..ell)
        .map(|_| {
            let k = rng.random_range(1..d);
            random_affine(&mut rng, d, k)
        })
        .collect();
    let lambda = [0.25, 1.0, 1.75][(seed % 3) as usize];
    let x0 = random_vector(&mut rng, d, 2.0);
    (collection, lambda, x0)
}

fn certificate_for(
    collection: &[AffineSubspace],
    lambda: f64,
    seed: u64,
) -> relaxproj::BoundCertificate {
    let directions: Vec<LinearSubspace> =
        collection.iter().map(|a| a.direction().clone()).collect();
    let mut oracle = SubcollectionKappa::new(directions, 200, seed).unwrap();
    bound_certificate(collection, lambda, |idx| oracle.kappa_star(idx)).unwrap()
}

/// The certificate bound holds over 100 random instances driven by
/// 1e5-step random schedules, for both the iterates and the tail norms.
#[test]
fn criterion_03_boundedness_certificates() {
    let start = Instant::now();
    let mut violations = 0usize;
    let mut min_margin = f64::INFINITY;

    for seed in 0..100u64 {
        let (collection, lambda, x0) = certificate_instance(seed);
        let cert = certificate_for(&collection, lambda, seed);
        let schedule = Schedule::random(seed, lambda).unwrap();
        let trace = iterate_with(&collection, &schedule, &x0, 100_000, false).unwrap();
        let (ok, margin) = verify_boundedness(&trace, &cert, &x0);
        if !ok {
            violations += 1;
        }
        min_margin = min_margin.min(margin);

        let tail_cap = cert.constant + 1e-8 * (1.0 + cert.constant);
        let tails = unrolled_tail_norms(&collection, &schedule, 100_000).unwrap();
        if tails.iter().any(|&t| t > tail_cap) {
            violations += 1;
        }
    }

    let elapsed = start.elapsed();
    assert_eq!(violations, 0, "certificate bound violated on {violations} instances");
    assert!(elapsed.as_secs_f64() < 300.0, "certificate suite took {elapsed:?}");
    println!(
        "criterion 03 boundedness certificates: PASS (0 violations, min margin \
         {min_margin:.3e}, {elapsed:.2?})"
    );
}

/// The same certificates cover runs whose per-step relaxation varies
/// anywhere in [0, lambda].
#[test]
fn criterion_04_varying_relaxation_bound() {
    let mut violations = 0usize;
    let mut min_margin = f64::INFINITY;

    for seed in 0..100u64 {
        let (collection, lambda, x0) = certificate_instance(seed);
        let cert = certificate_for(&collection, lambda, seed);
        let rule = LambdaRule::varying_uniform(lambda, 100_000, seed ^ 0x5eed).unwrap();
        let schedule = Schedule::new(ScheduleKind::RandomUniform { seed }, rule);
        let trace = iterate_with(&collection, &schedule, &x0, 100_000, false).unwrap();
        let (ok, margin) = verify_boundedness(&trace, &cert, &x0);
        if !ok {
            violations += 1;
        }
        min_margin = min_margin.min(margin);
    }

    assert_eq!(violations, 0, "varying-relaxation bound violated on {violations} instances");
    println!(
        "criterion 04 varying relaxation bound: PASS (0 violations, min margin {min_margin:.3e})"
    );
}

fn random_cycle_word(rng: &mut ChaCha8Rng, ell: usize) -> Vec<usize> {
    let mut word: Vec<usize> = (0..ell).collect();
    for i in (1..ell).rev() {
        let j = rng.random_range(0..=i);
        word.swap(i, j);
    }
    let unique = *word.last().unwrap();
    for _ in 0..rng.random_range(0..=4usize) {
        let extra = loop {
            let c = rng.random_range(0..ell);
            if c != unique {
                break c;
            }
        };
        let pos = rng.random_range(0..word.len());
        word.insert(pos, extra);
    }
    word
}

/// One cycle of relaxed projections contracts the component orthogonal to
/// the intersection at least as fast as the validated lattice constant says.
#[test]
fn criterion_05_cycle_contraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let d = 4;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut trials = 0usize;

    for t in 0..54u64 {
        let ell = 2 + (t % 2) as usize;
        let lambda = [0.5, 1.0, 1.5][(t % 3) as usize];
        let directions: Vec<LinearSubspace> = (0..ell)
            .map(|_| {
                let k = rng.random_range(1..d);
                random_linear(&mut rng, d, k)
            })
            .collect();

        let report = kappa_star(&directions, 400, 0x5000 + t).unwrap();
        assert!(
            report.max_violation <= 1e-9,
            "lattice constant failed validation by {:e}",
            report.max_violation
        );
        let factor = contraction_factor(lambda, ell, report.kappa_star).unwrap().value;

        let word = random_cycle_word(&mut rng, ell);
        assert!(is_cycle(&word, ell));
        let mut q = Matrix::identity(d, d);
        for &i in &word {
            let step = Matrix::identity(d, d) * (1.0 - lambda)
                + directions[i].projector_matrix() * lambda;
            q = step * q;
        }
        let perp = intersect(&directions, tol::RANK_REL)
            .unwrap()
            .complement()
            .projector_matrix();
        let norm = operator_norm(&(q * perp), tol::OPERATOR_NORM_REL);

        assert!(
            norm <= factor + 1e-8,
            "cycle word {word:?} contracted at {norm} but the bound was {factor}"
        );
        worst_gap = worst_gap.max(norm - factor);
        trials += 1;
    }

    assert!(trials >= 50);
    println!(
        "criterion 05 cycle contraction: PASS ({trials} cycle words, worst norm-minus-bound \
         {worst_gap:.3e})"
    );
}

fn reference_segments(word: &[usize], ell: usize) -> (Vec<std::ops::Range<usize>>, std::ops::Range<usize>) {
    let covers = |range: &std::ops::Range<usize>| {
        let mut seen = vec![false; ell];
        for &i in &word[range.clone()] {
            seen[i] = true;
        }
        seen.iter().all(|&s| s)
    };
    let mut segments = Vec::new();
    let mut start = 0usize;
    'scan: while start < word.len() {
        for end in start..word.len() {
            let candidate = start..end + 1;
            if covers(&candidate) {
                segments.push(candidate);
                start = end + 1;
                continue 'scan;
            }
        }
        break;
    }
    (segments, start..word.len())
}

/// Greedy segmentation agrees with exhaustive enumeration on 1000 random
/// words: every segment is a cycle and no stretch of the remainder is.
#[test]
fn criterion_06_cycle_segmentation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);

    for _ in 0..1000 {
        let ell = rng.random_range(1..=4);
        let len = rng.random_range(0..=20usize);
        let word: Vec<usize> = (0..len).map(|_| rng.random_range(0..ell)).collect();

        let seg = segment_cycles(&word, ell);
        let (expected_segments, expected_remainder) = reference_segments(&word, ell);
        assert_eq!(seg.segments, expected_segments);
        assert_eq!(seg.remainder, expected_remainder);
        assert_eq!(seg.k, expected_segments.len());

        for range in &seg.segments {
            assert!(is_cycle(&word[range.clone()], ell));
        }
        let rem = &word[seg.remainder.clone()];
        for i in 0..rem.len() {
            for j in i..rem.len() {
                assert!(
                    !is_cycle(&rem[i..=j], ell),
                    "remainder stretch {:?} of word {word:?} is a cycle",
                    &rem[i..=j]
                );
            }
        }

        assert_eq!(seg.boundaries.len(), seg.k + 1);
        assert_eq!(*seg.boundaries.last().unwrap(), word.len());
        assert_eq!(seg.boundaries[0], seg.remainder.len());
    }

    println!("criterion 06 cycle segmentation oracle: PASS (1000 words, exhaustive cross-check)");
}

fn window_sup(norms: &[f64], lo: usize, hi: usize) -> f64 {
    norms[lo..=hi].iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn log_linear_r2(residuals: &[f64]) -> f64 {
    let points: Vec<(f64, f64)> = residuals
        .iter()
        .enumerate()
        .filter(|(_, &r)| r > tol::RATE_FLOOR)
        .map(|(n, &r)| (n as f64, r.ln()))
        .collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    (sxy * sxy) / (sxx * syy)
}

const GAUSSIAN_SEED: u64 = 42;
const SCHEDULE_SEED_BASE: u64 = 7;

/// The 15x10 normalized Gaussian experiment: an inconsistent system whose
/// six (lambda, schedule) traces are bounded with no growth trend, plus a
/// linearly convergent cyclic composition subsequence.
#[test]
fn criterion_07_gaussian_experiment() {
    let start = Instant::now();
    let (m, b) = gaussian_instance(15, 10, GAUSSIAN_SEED);
    let system = BlockSystem::singleton_blocks(m.clone(), b.clone()).unwrap();
    let collection = blocks_to_affine(&system).unwrap();
    let (_, lsq_residual) = least_squares(&m, &b).unwrap();
    assert!(lsq_residual > 1e-6, "instance unexpectedly consistent");

    let x0 = Vector::zeros(10);
    let mut max_window_growth = f64::NEG_INFINITY;
    for (run, &lambda) in [0.5, 1.0, 1.5].iter().enumerate() {
        let schedules = [
            Schedule::random(SCHEDULE_SEED_BASE + run as u64, lambda).unwrap(),
            Schedule::cyclic(lambda).unwrap(),
        ];
        for schedule in schedules {
            let trace = iterate_with(&collection, &schedule, &x0, 3000, false).unwrap();
            assert!(trace.sup_norm.is_finite());
            let early = window_sup(&trace.norms, 1000, 2000);
            let late = window_sup(&trace.norms, 2000, 3000);
            let growth = (late - early) / early;
            assert!(
                growth <= 0.01,
                "lambda {lambda}: late-window sup grew by {:.2}%",
                growth * 100.0
            );
            max_window_growth = max_window_growth.max(growth);
        }
    }

    let projectors: Vec<RelaxedProjector> = collection
        .iter()
        .map(|a| RelaxedProjector::new(a.clone(), 1.0).unwrap())
        .collect();
    let q = compose(&projectors).unwrap();
    let fps = fixed_points(&q, 1e-8).unwrap();
    assert!(fps.consistent, "cyclic composition has no fixed point");
    let x_star = project_onto_fix(&fps, &x0).unwrap();
    let (rate, residuals) = linear_rate(&q, &x0, &x_star, 200).unwrap();
    assert!(rate < 1.0);
    let final_residual = *residuals.last().unwrap();
    assert!(final_residual <= 1e-6, "subsequence residual {final_residual:e} after 200 cycles");
    let r2 = log_linear_r2(&residuals);
    assert!(r2 >= 0.99, "log-residuals fit a line with R^2 = {r2}");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "experiment took {elapsed:?}");
    println!(
        "criterion 07 gaussian experiment: PASS (lsq residual {lsq_residual:.3}, max window \
         growth {:.3}%, subsequence residual {final_residual:.2e}, R^2 {r2:.4}, {elapsed:.2?})",
        max_window_growth * 100.0
    );
}

/// Alternating projections between two lines at angle theta converge at
/// exactly cos^2(theta).
#[test]
fn criterion_08_two_line_rate() {
    let mut worst = 0.0f64;
    for theta in [std::f64::consts::FRAC_PI_6, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_3] {
        let l1 = LinearSubspace::span(2, &[Vector::from_vec(vec![1.0, 0.0])], tol::RANK_REL).unwrap();
        let l2 = LinearSubspace::span(
            2,
            &[Vector::from_vec(vec![theta.cos(), theta.sin()])],
            tol::RANK_REL,
        )
        .unwrap();
        let p1 = RelaxedProjector::new(AffineSubspace::linear(l1), 1.0).unwrap();
        let p2 = RelaxedProjector::new(AffineSubspace::linear(l2), 1.0).unwrap();
        let q = compose(&[p1, p2]).unwrap();
        let x0 = Vector::from_vec(vec![2.0, 1.0]);
        let fps = fixed_points(&q, 1e-8).unwrap();
        let x_star = project_onto_fix(&fps, &x0).unwrap();
        let (rate, _) = linear_rate(&q, &x0, &x_star, 20).unwrap();
        let expected = theta.cos().powi(2);
        worst = worst.max((rate - expected).abs());
    }
    assert!(worst <= 1e-6, "measured rate off by {worst:e}");
    println!("criterion 08 two-line rate: PASS (worst |rate - cos^2| {worst:.2e})");
}

fn grid_kappa(theta: f64, points: usize) -> f64 {
    let l1 = LinearSubspace::span(2, &[Vector::from_vec(vec![1.0, 0.0])], tol::RANK_REL).unwrap();
    let l2 = LinearSubspace::span(
        2,
        &[Vector::from_vec(vec![theta.cos(), theta.sin()])],
        tol::RANK_REL,
    )
    .unwrap();
    let mut best = 0.0f64;
    for i in 0..points {
        let t = 2.0 * std::f64::consts::PI * i as f64 / points as f64;
        let x = Vector::from_vec(vec![t.cos(), t.sin()]);
        let worst = l1.distance(&x).max(l2.distance(&x));
        if worst > 1e-12 {
            best = best.max(1.0 / worst);
        }
    }
    best
}

/// The regularity constant of two lines blows up as the angle closes: grid
/// values are strictly increasing and grow more than fivefold from pi/2 to
/// pi/16.
#[test]
fn criterion_09_kappa_blowup() {
    let thetas = [
        std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_4,
        std::f64::consts::FRAC_PI_8,
        std::f64::consts::PI / 16.0,
    ];
    let kappas: Vec<f64> = thetas.iter().map(|&t| grid_kappa(t, 100_000)).collect();
    for pair in kappas.windows(2) {
        assert!(pair[1] > pair[0], "grid constants not strictly increasing: {kappas:?}");
    }
    for (&theta, &kappa) in thetas.iter().zip(&kappas) {
        let closed_form = 1.0 / (theta / 2.0).sin();
        assert!(
            (kappa - closed_form).abs() <= 1e-3 * closed_form,
            "grid value {kappa} vs closed form {closed_form} at angle {theta}"
        );
    }
    let ratio = kappas[3] / kappas[0];
    assert!(ratio > 5.0, "blow-up ratio only {ratio}");
    println!(
        "criterion 09 kappa blow-up: PASS (grid constants {:?}, ratio {ratio:.2})",
        kappas.iter().map(|k| (k * 1e4).round() / 1e4).collect::<Vec<_>>()
    );
}

/// Block Kaczmarz solves a consistent system to 1e-8 and keeps an
/// inconsistent one bounded with residuals above the least-squares floor.
#[test]
fn criterion_10_kaczmarz() {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let m = Matrix::from_fn(5, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
    let x_true = Vector::from_fn(3, |_, _| rng.sample::<f64, _>(StandardNormal));
    let b = &m * &x_true;
    let system = BlockSystem::singleton_blocks(m, b).unwrap();
    let report = solve(&system, &Schedule::cyclic(1.0).unwrap(), &Vector::zeros(3), 10_000).unwrap();
    assert!(report.consistent);
    let final_residual = *report.residuals.last().unwrap();
    assert!(final_residual <= 1e-8, "consistent solve stalled at {final_residual:e}");

    let (m, b) = gaussian_instance(15, 10, GAUSSIAN_SEED);
    let system = BlockSystem::singleton_blocks(m, b).unwrap();
    let schedule = Schedule::random(GAUSSIAN_SEED, 1.0).unwrap();
    let report = solve(&system, &schedule, &Vector::zeros(10), 3000).unwrap();
    assert!(!report.consistent);
    assert!(report.trace.sup_norm.is_finite());
    let floor = report.lsq_residual - 1e-6;
    let min_residual = report.residuals.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        min_residual >= floor,
        "residual {min_residual} dipped below the least-squares floor {}",
        report.lsq_residual
    );

    println!(
        "criterion 10 kaczmarz: PASS (consistent residual {final_residual:.2e}, inconsistent \
         floor margin {:.3e})",
        min_residual - floor
    );
}
