//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use movprim::canonical::{hopf_radius_closed_form, HopfState};
use movprim::combine::{activation, eval_combination, ActivationSchedule, CombinationNode};
use movprim::contraction::{
    block_eigenvalues, check_contraction, check_transverse_hopf, combined_rate_hierarchical, combined_rate_parallel,
    solve_metric_and_rate, transformation_jacobian, HopfRegion, LinearSystem, Metric, SampleRegion, ThetaThetaRule,
};
use movprim::io::report::transverse_report;
use movprim::io::synth::{synth_demo, Shape};
use movprim::learning::{learn_primitive, solve_weights, Gains, LearnedPrimitive, LearningParams, RegressorPair};
use movprim::numeric::max_eigenvalue_sym;
use movprim::transform::{
    rollout, rollout_primitive, rotation_2d, InputSource, ModulatedPrimitive, Modulation, DEFAULT_DT,
};
use movprim::{Demonstration, Trajectory};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ok<T>(r: movprim::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn fig1_params() -> LearningParams {
    LearningParams {
        gains: Gains::new(100.0, 25.0).unwrap(),
        alpha_s: 1.0,
        n_basis: 50,
    }
}

fn learn(demo: &Demonstration) -> Result<Arc<LearnedPrimitive>, String> {
    Ok(Arc::new(ok(learn_primitive(demo, &fig1_params()))?.primitive))
}

fn minjerk() -> Result<(Demonstration, Arc<LearnedPrimitive>), String> {
    let demo = ok(synth_demo(Shape::MinJerk, 1200, 1.0, 1.0))?;
    let prim = learn(&demo)?;
    Ok((demo, prim))
}

fn leaf(prim: &Arc<LearnedPrimitive>, modulation: Modulation) -> Result<ModulatedPrimitive, String> {
    ok(ModulatedPrimitive::new(Arc::clone(prim), modulation))
}

fn identity(prim: &Arc<LearnedPrimitive>) -> Modulation {
    Modulation::identity(prim.dim())
}

fn run(source: &ModulatedPrimitive, duration: f64) -> Result<Trajectory, String> {
    ok(rollout_primitive(source, duration, DEFAULT_DT))
}

/// Largest pointwise distance between two rollouts sampled on the same grid.
fn max_gap(a: &Trajectory, b: &Trajectory, map_b: impl Fn(&DVector<f64>) -> DVector<f64>) -> f64 {
    a.positions()
        .iter()
        .zip(b.positions())
        .map(|(x, y)| (x - map_b(y)).norm())
        .fold(0.0, f64::max)
}

fn c1_imitation_discrete() -> Outcome {
    let (demo, prim) = minjerk()?;
    let traj = run(&leaf(&prim, identity(&prim))?, demo.duration())?;
    let err = demo
        .times()
        .iter()
        .zip(demo.positions())
        .map(|(&t, y)| (traj.position_at(t) - y).norm())
        .fold(0.0, f64::max);
    let range = demo.coordinate_range();
    ensure(
        err <= 0.01 * range,
        format!("max error {err:.3e} > 1% of range {range}"),
    )?;
    Ok(format!("max error {err:.3e} = {:.4}% of range", 100.0 * err / range))
}

fn c2_imitation_rhythmic() -> Outcome {
    let mut notes = Vec::new();
    for shape in [Shape::Circle, Shape::Lemniscate] {
        let amplitude = 1.0;
        let demo = ok(synth_demo(shape, 1200, TAU, amplitude))?;
        let prim = learn(&demo)?;
        let period = demo.duration();
        let traj = run(&leaf(&prim, identity(&prim))?, 2.0 * period)?;
        let err = demo
            .times()
            .iter()
            .zip(demo.positions())
            .map(|(&t, y)| (traj.position_at(period + t) - y).norm())
            .fold(0.0, f64::max);
        ensure(
            err <= 0.02 * amplitude,
            format!("{shape}: second-period error {err:.3e} > 2% of amplitude"),
        )?;
        notes.push(format!("{shape} {:.3}%", 100.0 * err / amplitude));
    }
    Ok(format!("second-period error: {}", notes.join(", ")))
}

fn c3_spatial_invariance() -> Outcome {
    let (demo, prim) = minjerk()?;
    let duration = 1.5 * demo.duration();
    let reference = run(&leaf(&prim, identity(&prim))?, duration)?;
    let range = reference.coordinate_range();
    let y0 = DVector::from_column_slice(&[0.3, -0.2]);
    let mut worst: f64 = 0.0;
    for kappa in [0.1, 0.2, 0.3, 0.5, 0.8, 1.0, 1.5, 2.0] {
        let m = identity(&prim).with_spatial_scale(kappa).with_start(y0.clone());
        let traj = run(&leaf(&prim, m)?, duration)?;
        let gap = max_gap(&traj, &reference, |y| &y0 + y * kappa);
        let tol = 1e-3 * kappa * range;
        ensure(gap <= tol, format!("kappa_s = {kappa}: error {gap:.3e} > {tol:.3e}"))?;
        worst = worst.max(gap / (kappa * range));
    }
    Ok(format!("worst error / (kappa_s * range) = {worst:.3e}"))
}

fn c4_rotational_invariance() -> Outcome {
    let (demo, prim) = minjerk()?;
    let duration = 1.5 * demo.duration();
    let reference = run(&leaf(&prim, identity(&prim))?, duration)?;
    let range = reference.coordinate_range();
    let mut worst: f64 = 0.0;
    for kappa in [0.5, 1.0] {
        for deg in [0.0, 60.0, 120.0, 180.0, 240.0, 300.0] {
            let r = rotation_2d(deg);
            let m = identity(&prim).with_spatial_scale(kappa).with_rotation(r.clone());
            let traj = run(&leaf(&prim, m)?, duration)?;
            let gap = max_gap(&traj, &reference, |y| &r * y * kappa);
            ensure(
                gap <= 1e-3 * range,
                format!("{deg} deg, kappa_s = {kappa}: error {gap:.3e}"),
            )?;
            worst = worst.max(gap);
        }
    }
    Ok(format!("worst error {worst:.3e} (range {range:.3})"))
}

fn c5_temporal_invariance() -> Outcome {
    let (demo, prim) = minjerk()?;
    let duration = 1.5 * demo.duration();
    let reference = run(&leaf(&prim, identity(&prim))?, duration)?;
    let range = reference.coordinate_range();
    let mut worst: f64 = 0.0;
    for kappa in [0.5, 1.0, 2.0] {
        let traj = run(
            &leaf(&prim, identity(&prim).with_temporal_scale(kappa))?,
            duration / kappa,
        )?;
        let gap = traj
            .times()
            .iter()
            .zip(traj.positions())
            .map(|(&t, y)| (y - reference.position_at((kappa * t).min(duration))).norm())
            .fold(0.0, f64::max);
        ensure(gap <= 1e-3 * range, format!("kappa_t = {kappa}: error {gap:.3e}"))?;
        worst = worst.max(gap);
    }
    Ok(format!("worst error {worst:.3e} (range {range:.3})"))
}

fn c6_hopf() -> Outcome {
    let dt = DEFAULT_DT;
    let mut state = ok(HopfState::new(0.5, 0.0, 1.0, 1.0))?;
    for _ in 0..10_000 {
        state = ok(state.step(dt))?;
    }
    let r = state.radius();
    let exact = hopf_radius_closed_form(10.0, 0.5, 1.0);
    ensure((r - exact).abs() <= 1e-6, format!("r(10) = {r} vs closed form {exact}"))?;
    ensure((r - 1.0).abs() <= 1e-6, format!("|r(10) - 1| = {:e}", (r - 1.0).abs()))?;

    let period = 2.0;
    let mut state = ok(HopfState::with_period(1.0, 0.0, 1.0, period))?;
    let mut crossings = Vec::new();
    let mut prev = ok(state.phase())?;
    let mut t = 0.0;
    while crossings.len() < 3 && t < 10.0 * period {
        state = ok(state.step(dt))?;
        t += dt;
        let phase = ok(state.phase())?;
        if phase < prev {
            // Wrapped past 2π during this step.
            let frac = (TAU - prev) / (TAU - prev + phase);
            crossings.push(t - dt + frac * dt);
        }
        prev = phase;
    }
    ensure(crossings.len() == 3, "phase did not wrap three times")?;
    let measured = crossings[2] - crossings[1];
    ensure(
        (measured - period).abs() <= 1e-4 * period,
        format!("measured period {measured} vs {period}"),
    )?;
    Ok(format!(
        "|r(10) - 1| = {:.2e}, period error {:.2e}",
        (r - 1.0).abs(),
        (measured - period).abs()
    ))
}

struct Zero(usize);

impl InputSource for Zero {
    fn dim(&self) -> usize {
        self.0
    }

    fn input(&self, _t: f64) -> movprim::Result<DVector<f64>> {
        Ok(DVector::zeros(self.0))
    }
}

fn c7_critical_damping() -> Outcome {
    let gains = Gains::new(100.0, 25.0).unwrap();
    let y0 = DVector::from_element(1, 1.0);
    let traj = ok(rollout(&Zero(1), 1.0, gains, 1.0, DEFAULT_DT, &y0))?;
    let err = traj
        .times()
        .iter()
        .zip(traj.positions())
        .map(|(&t, y)| (y[0] - (1.0 + 50.0 * t) * (-50.0 * t).exp()).abs())
        .fold(0.0, f64::max);
    ensure(err <= 1e-6, format!("rollout error {err:e}"))?;
    let j = ok(transformation_jacobian(1.0, 100.0, 25.0, 1))?;
    let spectrum = ok(block_eigenvalues(&j))?;
    ensure(spectrum.len() == 2, "expected two eigenvalues")?;
    for (re, im) in &spectrum {
        ensure(
            (re + 50.0).abs() <= 1e-6 && im.abs() <= 1e-6,
            format!("eigenvalue {re}{im:+}i"),
        )?;
    }
    Ok(format!("rollout error {err:.2e}, eigenvalues {spectrum:?}"))
}

fn c8_lyapunov_certificate() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for tau in [0.5, 1.0, 2.0] {
        for alpha_z in [25.0, 100.0] {
            let j = ok(transformation_jacobian(tau, alpha_z, alpha_z / 4.0, 1))?;
            let (m, rate) = ok(solve_metric_and_rate(&j))?;
            let cert = ok(check_contraction(
                &LinearSystem(j),
                &Metric::Constant(m),
                rate,
                &SampleRegion::point(&[0.0, 0.0]),
            ))?;
            ensure(
                cert.pass && cert.worst_residual <= 1e-9,
                format!("tau = {tau}, alpha_z = {alpha_z}: residual {:e}", cert.worst_residual),
            )?;
            worst = worst.max(cert.worst_residual);
        }
    }

    let j = ok(transformation_jacobian(1.0, 100.0, 25.0, 1))?;
    let lambda = 0.01;
    let cert = ok(check_contraction(
        &LinearSystem(j.clone()),
        &Metric::Constant(DMatrix::identity(2, 2)),
        lambda,
        &SampleRegion::point(&[0.0, 0.0]),
    ))?;
    ensure(!cert.pass, "identity metric unexpectedly certifies")?;
    // λ_max(Jᵀ + J + 2λI) for Jᵀ + J = [[0, −2499], [−2499, −200]], by the
    // quadratic formula.
    let (a, b, d) = (2.0 * lambda, -2499.0, -200.0 + 2.0 * lambda);
    let oracle: f64 = ((a + d) + ((a - d) * (a - d) + 4.0 * b * b).sqrt()) / 2.0;
    ensure(
        (cert.worst_residual - oracle).abs() <= 1e-9 * oracle,
        format!("identity residual {} vs oracle {oracle}", cert.worst_residual),
    )?;
    // Largest eigenvalue of the symmetric part of J alone.
    let half = ok(max_eigenvalue_sym(&((&j + j.transpose()) * 0.5)))?;
    let half_oracle = (-100.0 + (10000.0f64 + 4.0 * 1249.5 * 1249.5).sqrt()) / 2.0;
    ensure(
        (half - half_oracle).abs() <= 1e-9 * half_oracle,
        format!("sym(J) eigenvalue {half}"),
    )?;
    Ok(format!(
        "Lyapunov worst residual {worst:.2e}; identity metric residual {:.4} (FAIL as required; lambda_max(sym J) = {half:.4})",
        cert.worst_residual
    ))
}

fn c9_transverse() -> Outcome {
    let cert = ok(check_transverse_hopf(
        1.0,
        1.0,
        &HopfRegion::new(0.5, 1.0),
        ThetaThetaRule::SquaredGap,
    ))?;
    let c = &cert.certificate;
    ensure(c.rate >= 0.5, format!("certified rate {} < 0.5", c.rate))?;
    ensure(
        cert.max_orthogonality_residual <= 1e-10,
        format!("orthogonality residual {:e}", cert.max_orthogonality_residual),
    )?;
    ensure(cert.min_metric_eigenvalue > 0.0, "metric not positive definite")?;
    ensure(c.pass, "certificate failed")?;
    let report = transverse_report(&cert);
    let claim = report
        .lines()
        .find(|l| l.starts_with("claimed rate 4*eps^2"))
        .ok_or("report lacks the claim line")?;
    Ok(format!("lambda_T = {:.9} over {} samples; {claim}", c.rate, c.samples))
}

fn c10_parallel() -> Outcome {
    let (demo, prim) = minjerk()?;
    let duration = 1.5 * demo.duration();
    let a = leaf(&prim, identity(&prim))?;
    let b = leaf(
        &prim,
        identity(&prim).with_rotation(rotation_2d(90.0)).with_spatial_scale(0.5),
    )?;
    let lone = run(&a, duration)?;
    let node = CombinationNode::parallel(
        vec![CombinationNode::leaf(a.clone()), CombinationNode::leaf(b.clone())],
        vec![1.0, 0.0],
    );
    let combined = ok(node.rollout(duration, DEFAULT_DT, None, None))?;
    let gap = max_gap(&combined, &lone, |y| y.clone());
    ensure(
        gap <= 1e-12,
        format!("weights (1, 0) differ from the lone child by {gap:e}"),
    )?;

    let end_a = lone.last_position().clone();
    let end_b = run(&b, duration)?.last_position().clone();
    let axis = &end_a - &end_b;
    let mut coords = Vec::new();
    for k in 0..=10 {
        let alpha = k as f64 / 10.0;
        let node = CombinationNode::parallel(
            vec![CombinationNode::leaf(a.clone()), CombinationNode::leaf(b.clone())],
            vec![alpha, 1.0 - alpha],
        );
        let end = ok(node.rollout(duration, DEFAULT_DT, None, None))?
            .last_position()
            .clone();
        let rel = &end - &end_b;
        let s = rel.dot(&axis) / axis.norm_squared();
        let off_line = (&rel - &axis * s).norm();
        ensure(
            off_line <= 1e-9,
            format!("alpha = {alpha}: endpoint {off_line:e} off the segment"),
        )?;
        coords.push(s);
    }
    ensure(
        coords.windows(2).all(|w| w[1] > w[0]),
        format!("not monotone: {coords:?}"),
    )?;
    ensure(
        coords[0].abs() <= 1e-9 && (coords[10] - 1.0).abs() <= 1e-9,
        format!("family does not reach the children's endpoints: {coords:?}"),
    )?;
    Ok(format!("(1, 0) gap {gap:.1e}; 11 endpoints monotone along the segment"))
}

fn c11_periodic_forgetting() -> Outcome {
    let demo = ok(synth_demo(Shape::Circle, 1200, TAU, 1.0))?;
    let prim = learn(&demo)?;
    let source = leaf(&prim, identity(&prim))?;
    let tau = source.effective_tau();
    let duration = 12.0 * tau;
    let starts = [DVector::zeros(2), DVector::from_column_slice(&[0.7, -0.4])];
    let runs = starts
        .iter()
        .map(|y0| ok(rollout(&source, tau, prim.gains, duration, DEFAULT_DT, y0)))
        .collect::<Result<Vec<_>, _>>()?;
    let range = demo.coordinate_range();
    let gap = runs[0]
        .times()
        .iter()
        .zip(runs[0].positions().iter().zip(runs[1].positions()))
        .filter(|(&t, _)| t >= 10.0 * tau)
        .map(|(_, (a, b))| (a - b).norm())
        .fold(0.0, f64::max);
    ensure(gap <= 1e-6 * range, format!("gap {gap:e} after 10 tau"))?;
    Ok(format!("max gap for t >= 10 tau: {gap:.2e} (range {range:.3})"))
}

fn c12_sequential() -> Outcome {
    let s = ActivationSchedule::new(1.0, 2.0, 3.0, 5.0).map_err(|e| e.to_string())?;
    let knots = [(1.0, 0.0), (1.5, 0.5), (2.0, 1.0), (3.0, 1.0), (4.0, 0.5), (5.0, 0.0)];
    for (t, want) in knots {
        let got = activation(t, &s);
        ensure(got == want, format!("activation({t}) = {got}, expected {want}"))?;
    }

    let (_, prim) = minjerk()?;
    let offsets = [0.0, 0.969, 1.939];
    let goal = &prim.goal_demo;
    let mut anchor = DVector::zeros(2);
    let mut children = Vec::new();
    for deg in [0.0, 120.0, 240.0] {
        let r = rotation_2d(deg);
        children.push(CombinationNode::leaf(leaf(
            &prim,
            identity(&prim).with_rotation(r.clone()).with_start(anchor.clone()),
        )?));
        anchor += r * goal;
    }
    let node = ok(CombinationNode::sequence(children, offsets.to_vec()))?;
    let fade = 0.1 * prim.tau_demo;
    let mut worst_jump: f64 = 0.0;
    for &off in &offsets[1..] {
        for knot in [off, off + fade] {
            let delta = 1e-12 * knot.max(1.0);
            let h = 1e-6;
            let left = ok(eval_combination(&node, knot - delta))?;
            let right = ok(eval_combination(&node, knot + delta))?;
            let slope =
                (ok(eval_combination(&node, knot + h))? - ok(eval_combination(&node, knot - h))?).norm() / (2.0 * h);
            let jump = (&right - &left).norm();
            let bound = 4.0 * slope * delta + 64.0 * f64::EPSILON * right.norm();
            ensure(
                jump <= bound,
                format!("input jumps by {jump:e} at t = {knot} (bound {bound:e})"),
            )?;
            worst_jump = worst_jump.max(jump);
        }
    }

    let duration = offsets[2] + 1.5 * prim.tau_demo;
    let traj = ok(node.rollout(duration, DEFAULT_DT, None, None))?;
    let acc = traj.accelerations().ok_or("rollout lacks accelerations")?;
    let a_max = acc.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let dv_max = traj
        .velocities()
        .windows(2)
        .map(|w| (&w[1] - &w[0]).norm())
        .fold(0.0, f64::max);
    ensure(
        dv_max <= 1.05 * a_max * DEFAULT_DT,
        format!(
            "velocity jump {dv_max:e} exceeds dt * max|a| = {:e}",
            a_max * DEFAULT_DT
        ),
    )?;
    ensure(
        traj.positions().iter().all(|p| p.iter().all(|x| x.is_finite())),
        "non-finite rollout",
    )?;
    Ok(format!(
        "activation knots exact; worst input jump {worst_jump:.2e}; max |dv| {dv_max:.3e} <= dt*max|a| {:.3e}",
        a_max * DEFAULT_DT
    ))
}

/// Solves `W (A Aᵀ) = B Aᵀ` by Gauss–Jordan elimination with partial pivoting.
fn normal_equations(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let gram = a * a.transpose();
    let rhs = (b * a.transpose()).transpose();
    let mut aug = DMatrix::zeros(n, n + rhs.ncols());
    aug.view_mut((0, 0), (n, n)).copy_from(&gram);
    aug.view_mut((0, n), (n, rhs.ncols())).copy_from(&rhs);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| aug[(i, col)].abs().total_cmp(&aug[(j, col)].abs()))
            .unwrap();
        aug.swap_rows(col, pivot);
        let p = aug[(col, col)];
        for k in 0..aug.ncols() {
            aug[(col, k)] /= p;
        }
        for row in 0..n {
            if row != col {
                let f = aug[(row, col)];
                for k in 0..aug.ncols() {
                    aug[(row, k)] -= f * aug[(col, k)];
                }
            }
        }
    }
    aug.view((0, n), (n, rhs.ncols())).transpose()
}

fn c13_least_squares() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst_oracle: f64 = 0.0;
    let mut worst_planted: f64 = 0.0;
    for _ in 0..50 {
        let dim = rng.gen_range(1..=3);
        let a = DMatrix::from_fn(5, 20, |_, _| rng.gen_range(-1.0..1.0));
        let b = DMatrix::from_fn(dim, 20, |_, _| rng.gen_range(-10.0..10.0));
        let w = ok(solve_weights(&ok(RegressorPair::new(a.clone(), b.clone()))?))?;
        let oracle = normal_equations(&a, &b);
        let diff = (&w - &oracle).amax() / oracle.amax().max(1.0);
        ensure(diff <= 1e-8, format!("differs from normal equations by {diff:e}"))?;
        worst_oracle = worst_oracle.max(diff);

        let planted = DMatrix::from_fn(dim, 5, |_, _| rng.gen_range(-5.0..5.0));
        let w = ok(solve_weights(&ok(RegressorPair::new(a.clone(), &planted * &a))?))?;
        let diff = (&w - &planted).amax();
        ensure(diff <= 1e-8, format!("planted weights recovered to {diff:e}"))?;
        worst_planted = worst_planted.max(diff);
    }
    Ok(format!(
        "50 instances: oracle error {worst_oracle:.1e}, planted error {worst_planted:.1e}"
    ))
}

fn c14_rate_arithmetic() -> Outcome {
    let parallel = ok(combined_rate_parallel(&[1.0, 3.0], &[0.5, 0.5]))?;
    let hierarchical = ok(combined_rate_hierarchical(&[2.0, 5.0]))?;
    ensure(parallel == 2.0, format!("parallel rate {parallel}"))?;
    ensure(hierarchical == 2.0, format!("hierarchical rate {hierarchical}"))?;
    Ok("parallel 2, hierarchical 2".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 14] = [
        ("imitation roundtrip, discrete", c1_imitation_discrete),
        ("imitation roundtrip, rhythmic", c2_imitation_rhythmic),
        ("spatial invariance", c3_spatial_invariance),
        ("rotational invariance", c4_rotational_invariance),
        ("temporal invariance", c5_temporal_invariance),
        ("hopf radius and period", c6_hopf),
        ("critically damped oracle", c7_critical_damping),
        ("lyapunov contraction certificate", c8_lyapunov_certificate),
        ("transverse hopf certificate", c9_transverse),
        ("parallel combination", c10_parallel),
        ("periodic forgetting", c11_periodic_forgetting),
        ("sequential combination", c12_sequential),
        ("least-squares oracle", c13_least_squares),
        ("rate arithmetic", c14_rate_arithmetic),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
