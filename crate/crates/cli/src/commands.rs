use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use fracmix::caputo::{ode_residual, Branch, ResidualGrid};
use fracmix::export::{fmt_real, recovery_report, write_mode_table, write_solution_grid};
use fracmix::forward::{norm_w, ratio_p, DeltaAudit, ForwardSolution, FractionalOrders, ModeState};
use fracmix::inverse::{monotonicity_audit, observe, recover, ObservationMode, ObservationPair, RecoveryOptions};
use fracmix::special::{ml, Family};
use fracmix::spectral::DomainSpec;

use crate::config::ExperimentConfig;
use crate::exit::{Code, Failure};

const RESIDUAL_TOLERANCE: f64 = 1e-4;
const RESIDUAL_STEPS: usize = 4096;

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn spatial_points(domain: DomainSpec, n: usize) -> Vec<Vec<f64>> {
    match domain {
        DomainSpec::Interval { length } => grid(0.0, length, n).into_iter().map(|x| vec![x]).collect(),
        DomainSpec::Rectangle { lx, ly } => {
            let ys = grid(0.0, ly, n);
            grid(0.0, lx, n).into_iter().flat_map(|x| ys.iter().map(move |&y| vec![x, y])).collect()
        }
    }
}

pub fn forward(cfg: &ExperimentConfig, orders: (f64, f64), points: usize, out: &Path) -> Result<(), Failure> {
    let setup = cfg.setup()?;
    let orders = FractionalOrders::new(orders.0, orders.1, cfg.bounds)?;
    let sol = ForwardSolution::new(&setup, orders)?;
    let times = [-cfg.t, -cfg.t2, -1.0, 0.0, 1.0, cfg.t1];
    write_solution_grid(create(out, &cfg.output.solution)?, &sol, &spatial_points(cfg.domain, points.max(2)), &times)?;
    write_mode_table(create(out, &cfg.output.modes)?, sol.modes())?;

    let audit = setup.audit();
    let worst = audit.worst();
    println!("modes = {}", setup.basis().len());
    println!(
        "delta_audit = {} betas at T = {}, min Delta_{} = {} at beta = {} (delta0 = {})",
        audit.rows.len(),
        fmt_real(audit.t),
        worst.k,
        fmt_real(worst.min_delta),
        fmt_real(worst.beta),
        fmt_real(worst.delta0)
    );
    let tail = setup.truncation().tail_bound;
    println!("tail_bound = {}", fmt_real(tail));
    for t in times {
        println!("tail_bound(t = {}) = {}", fmt_real(t), fmt_real(setup.truncation().bound_at(orders.alpha, orders.beta, t)));
    }
    if tail > cfg.truncation_tolerance {
        log::warn!("tail bound {tail:e} exceeds truncation tolerance {:e}", cfg.truncation_tolerance);
    }
    Ok(())
}

pub fn observe_cmd(cfg: &ExperimentConfig, orders: (f64, f64), swapped: bool, out: &Path) -> Result<(), Failure> {
    let setup = cfg.setup()?;
    FractionalOrders::new(orders.0, orders.1, cfg.bounds)?;
    let mode = if swapped { ObservationMode::Swapped } else { ObservationMode::Standard };
    let obs = observe(&setup, orders.0, orders.1, cfg.t1, cfg.t2, cfg.k0(&setup)?, mode)?;
    let text = serde_json::to_string_pretty(&obs).map_err(|e| Failure::io(e.to_string()))?;
    let mut w = create(out, &cfg.output.observation)?;
    std::io::Write::write_all(&mut w, text.as_bytes())?;
    std::io::Write::write_all(&mut w, b"\n")?;
    println!("{text}");
    Ok(())
}

pub fn invert(cfg: &ExperimentConfig, observation: &Path, out: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(observation).map_err(|e| Failure::io(format!("{}: {e}", observation.display())))?;
    let obs: ObservationPair =
        serde_json::from_str(&text).map_err(|e| Failure::io(format!("{}: {e}", observation.display())))?;
    let setup = cfg.setup()?;
    let result = match recover(&setup, &obs, &RecoveryOptions::default()) {
        Err(fracmix::Error::Solvability(v)) => {
            println!("violation = {}", v.code());
            println!("target = {}", fmt_real(v.target));
            println!("bracket = {}, {}", fmt_real(v.lower), fmt_real(v.upper));
            return Err(fracmix::Error::Solvability(v).into());
        }
        other => other?,
    };
    let report = recovery_report(&result);
    print!("{report}");
    let mut w = create(out, &cfg.output.report)?;
    std::io::Write::write_all(&mut w, report.as_bytes())?;
    if !result.residuals_within_tolerance {
        return Err(Failure::new(Code::Tolerance, "a stage residual exceeds its tolerance"));
    }
    Ok(())
}

pub fn ml_eval(rho: f64, mu: f64, x: f64) -> Result<(), Failure> {
    println!("{}", fmt_real(ml(rho, mu, x)?));
    Ok(())
}

struct Check {
    name: String,
    passed: bool,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }

    fn from_result(name: &str, r: Result<(bool, String), Failure>) -> Self {
        match r {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, e.message),
        }
    }
}

fn delta_check(cfg: &ExperimentConfig) -> Result<(bool, String), Failure> {
    let (basis, _) = cfg.data()?;
    let audit = DeltaAudit::evaluate(&basis.eigenvalues(), cfg.t, &cfg.bounds.beta_grid(33))?;
    let w = audit.worst();
    let detail = format!(
        "min Delta_{} = {:.6e} at beta {:.4}, delta0 = {:.6e}, above delta0 everywhere: {}",
        w.k,
        w.min_delta,
        w.beta,
        w.delta0,
        audit.above_floor()
    );
    Ok((w.min_delta > 0.0, detail))
}

/// Monotonicity of one family in its order at fixed `lambda` and `t`, over the
/// orders where `lambda t^order` is above the certified threshold and `t` is
/// large enough for the leading derivative term to carry the expected sign.
fn family_check(family: Family, lo: f64, hi: f64, lambda: f64, t: f64) -> Result<(bool, String), Failure> {
    let expected = if family == Family::WaveDisplacement { 1.0 } else { -1.0 };
    let (mut certified, mut below_threshold, mut small_t) = (Vec::new(), 0, 0);
    for order in grid(lo, hi, 101) {
        let x = lambda * t.powf(order);
        if x < family.certified_threshold(order)? {
            below_threshold += 1;
        } else if family.leading_order_derivative(order, lambda, t)? * expected <= 0.0 {
            small_t += 1;
        } else {
            certified.push(family.evaluate(order, x)?);
        }
    }
    let worst = certified.windows(2).map(|w| (w[1] - w[0]) * expected).fold(f64::INFINITY, f64::min);
    let passed = certified.len() < 2 || worst > 0.0;
    Ok((
        passed,
        format!(
            "{} of 101 orders certified ({below_threshold} below threshold, {small_t} with t below the monotone regime), min signed step {worst:.3e}",
            certified.len()
        ),
    ))
}

fn residual_check(cfg: &ExperimentConfig, orders: (f64, f64)) -> Result<(bool, String), Failure> {
    let setup = cfg.setup()?;
    let orders = FractionalOrders::new(orders.0, orders.1, cfg.bounds)?;
    let k = cfg.k0(&setup)?;
    let lambda = setup.basis().eigenvalue(k);
    let m = ModeState::solve(k, lambda, setup.data().coefficient(k), cfg.t, orders.beta)?;
    let scale = m.w_plus0.abs().max(m.w_prime_minus0.abs()).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (branch, end) in [(Branch::Parabolic, 5.0), (Branch::Hyperbolic, cfg.t.min(5.0))] {
        let g = ResidualGrid { t_end: end, n_steps: RESIDUAL_STEPS, t_min: 0.2 * end };
        let r = ode_residual(&m, &orders, lambda, branch, &g)? / scale;
        worst = worst.max(r);
        parts.push(format!("{branch:?} {r:.3e}"));
    }
    Ok((worst <= RESIDUAL_TOLERANCE, format!("mode {k}, relative residuals {}", parts.join(", "))))
}

fn functional_checks(cfg: &ExperimentConfig, beta: f64) -> Result<Vec<Check>, Failure> {
    let setup = cfg.setup()?;
    let k0 = cfg.k0(&setup)?;
    let b = cfg.bounds;
    let p = monotonicity_audit(|x| ratio_p(&setup, x, cfg.t2, k0), &b.beta_grid(64))?;
    let w = monotonicity_audit(|a| norm_w(&setup, a, beta, cfg.t1), &grid(b.alpha1, 1.0, 64))?;
    let describe = |r: &fracmix::inverse::MonotonicityReport| {
        format!("direction {:?}, min |slope| {:.3e}, offending {:?}", r.direction, r.min_abs_slope, r.offending)
    };
    Ok(vec![
        Check::new("ratio-p-monotone", p.passed(), describe(&p)),
        Check::new("norm-w-monotone", w.passed(), describe(&w)),
    ])
}

pub fn verify(cfg: &ExperimentConfig, orders: (f64, f64)) -> Result<(), Failure> {
    cfg.validate()?;
    let b = cfg.bounds;
    let lambda1 = fracmix::spectral::build_basis(cfg.domain, 1)?.eigenvalue(1);
    let mut checks = vec![
        Check::from_result("delta-positive", delta_check(cfg)),
        Check::from_result("e2-decreasing", family_check(Family::WaveVelocity, b.beta1, b.beta2, lambda1, cfg.t)),
        Check::from_result("e1-increasing", family_check(Family::WaveDisplacement, b.beta1, b.beta2, lambda1, cfg.t)),
        Check::from_result("e3-decreasing", family_check(Family::Diffusion, b.alpha1, 0.99, lambda1, cfg.t1)),
        Check::from_result("caputo-residual", residual_check(cfg, orders)),
    ];
    match functional_checks(cfg, orders.1) {
        Ok(more) => checks.extend(more),
        Err(e) => checks.push(Check::new("functional-monotone", false, e.message)),
    }
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure::new(Code::Verify, format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}
