use fracmix::caputo::*;
use fracmix::forward::{FractionalOrders, ModeState, OrderBox};
use fracmix::special::{gamma, ml};

fn power_derivative(p: f64, order: f64, t: f64) -> f64 {
    gamma(p + 1.0).unwrap() / gamma(p + 1.0 - order).unwrap() * t.powf(p - order)
}

fn max_error(d: &CaputoDerivative, g: &CaputoGrid, exact: impl Fn(f64) -> f64) -> f64 {
    (1..=g.n_steps).map(|i| (d.values[i] - exact(g.node(i))).abs()).fold(0.0, f64::max)
}

fn unit_mode(lambda: f64) -> ModeState {
    ModeState { k: 1, lambda, phi: 0.0, delta_k: 1.0, w_minus0: 1.0, w_prime_minus0: -lambda, w_plus0: 1.0 }
}

#[test]
fn power_table_alpha() {
    for p in [1.0, 2.0, 3.0] {
        for alpha in [0.3, 0.5, 0.8] {
            let g = CaputoGrid::sample(|t| Ok(t.powf(p)), 0.0, 1.0, 1024).unwrap();
            let d = caputo_alpha(&g, alpha).unwrap();
            let err = max_error(&d, &g, |t| power_derivative(p, alpha, t));
            let tol = 5.0 * p * (1.0 / 1024.0f64).powf(2.0 - alpha);
            assert!(err < tol, "p {p} alpha {alpha}: {err:e}");
        }
    }
}

#[test]
fn power_table_beta() {
    for p in [2.0, 3.0] {
        for beta in [1.2, 1.5, 1.8] {
            let g = CaputoGrid::sample(|t| Ok(t.powf(p)), 0.0, 1.0, 1024).unwrap().with_slope(0.0);
            let d = caputo_beta(&g, beta).unwrap();
            let err = max_error(&d, &g, |t| power_derivative(p, beta, t));
            let tol = 5.0 * p * (1.0 / 1024.0f64).powf(3.0 - beta);
            assert!(err < tol, "p {p} beta {beta}: {err:e}");
        }
    }
    let g = CaputoGrid::sample(|t| Ok(t * t), 0.0, 2.0, 512).unwrap();
    let d = caputo_beta(&g, 1.5).unwrap();
    let t = g.node(256);
    assert!((d.values[256] - 2.0 * t.sqrt() / gamma(1.5).unwrap()).abs() < 1e-3);
}

#[test]
fn observed_rates_on_smooth_functions() {
    for alpha in [0.3, 0.6, 0.9] {
        let errs: Vec<f64> = [128, 256, 512, 1024]
            .iter()
            .map(|&n| {
                let g = CaputoGrid::sample(|t| Ok(t * t), 0.0, 1.0, n).unwrap();
                max_error(&caputo_alpha(&g, alpha).unwrap(), &g, |t| power_derivative(2.0, alpha, t))
            })
            .collect();
        let rate = (errs[2] / errs[3]).log2();
        assert!((rate - (2.0 - alpha)).abs() < 0.3, "alpha {alpha}: rate {rate}");
    }
    for beta in [1.3, 1.6, 1.9] {
        let errs: Vec<f64> = [128, 256, 512, 1024]
            .iter()
            .map(|&n| {
                let g = CaputoGrid::sample(|t| Ok(t.powi(3)), 0.0, 1.0, n).unwrap().with_slope(0.0);
                max_error(&caputo_beta(&g, beta).unwrap(), &g, |t| power_derivative(3.0, beta, t))
            })
            .collect();
        let rate = (errs[2] / errs[3]).log2();
        assert!((rate - (3.0 - beta)).abs() < 0.3, "beta {beta}: rate {rate}");
    }
}

#[test]
fn mittag_leffler_eigenrelations() {
    let lambda = 1.3;
    for alpha in [0.5, 0.7] {
        let f = |t: f64| ml(alpha, 1.0, -lambda * t.powf(alpha)).map_err(Into::into);
        let g = CaputoGrid::sample(f, 0.0, 4.0, 2048).unwrap();
        let d = caputo_alpha(&g, alpha).unwrap();
        for i in (512..=2047).step_by(97) {
            assert!((d.values[i] + lambda * g.samples[i]).abs() < 1e-3, "alpha {alpha} node {i}");
        }
    }
    for beta in [1.5, 1.7] {
        let f = |t: f64| ml(beta, 1.0, -lambda * t.powf(beta)).map_err(Into::into);
        let g = CaputoGrid::sample(f, 0.0, 4.0, 2048).unwrap().with_slope(0.0);
        let d = caputo_beta(&g, beta).unwrap();
        for i in (512..=2047).step_by(97) {
            assert!((d.values[i] + lambda * g.samples[i]).abs() < 1e-3, "beta {beta} node {i}");
        }
    }
}

#[test]
fn mode_residuals_shrink_under_refinement() {
    let o = FractionalOrders::new(0.7, 1.5, OrderBox::default()).unwrap();
    let m = unit_mode(1.0);
    for branch in [Branch::Parabolic, Branch::Hyperbolic] {
        let r: Vec<f64> = [512, 1024, 2048]
            .iter()
            .map(|&n| ode_residual(&m, &o, 1.0, branch, &ResidualGrid { t_end: 5.0, n_steps: n, t_min: 1.0 }).unwrap())
            .collect();
        assert!(r[0] > r[1] && r[1] > r[2], "{branch:?}: {r:?}");
    }
}

#[test]
fn zero_mode_has_zero_residual() {
    let o = FractionalOrders::new(0.4, 1.6, OrderBox::default()).unwrap();
    let m = ModeState { k: 2, lambda: 4.0, phi: 0.0, delta_k: 1.0, w_minus0: 0.0, w_prime_minus0: 0.0, w_plus0: 0.0 };
    for branch in [Branch::Parabolic, Branch::Hyperbolic] {
        let g = ResidualGrid { t_end: 3.0, n_steps: 256, t_min: 0.5 };
        assert_eq!(ode_residual(&m, &o, 4.0, branch, &g).unwrap(), 0.0);
    }
}

#[test]
fn richardson_flags_coarse_grids() {
    let g = CaputoGrid::sample(|t| Ok((5.0 * t).sin()), 0.0, 5.0, 32).unwrap();
    assert!(caputo_alpha(&g, 0.5).unwrap().too_coarse);
    let g = CaputoGrid::sample(|t| Ok(t), 0.0, 1.0, 64).unwrap();
    assert!(!caputo_alpha(&g, 0.5).unwrap().too_coarse);
}
