//! CSV and plain-text output.
//!
//! Reals are written in scientific notation with 17 significant digits so
//! that files round-trip exactly and diff cleanly.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::forward::{ForwardSolution, ModeState};
use crate::inverse::{MonotonicityReport, RecoveryResult, StageResult};

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Long-format `x,t,u` rows (`x,y,t,u` on a rectangle) for every point and time.
pub fn write_solution_grid<W: Write>(out: W, solution: &ForwardSolution, points: &[Vec<f64>], times: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let two_d = solution.setup().basis().domain().dimension() == 2;
    if two_d {
        w.write_record(["x", "y", "t", "u"])?;
    } else {
        w.write_record(["x", "t", "u"])?;
    }
    for &t in times {
        let modal = solution.modal_values(t)?;
        for x in points {
            let u = solution.synthesize(&modal, x);
            let mut row: Vec<String> = x.iter().map(|&c| fmt_real(c)).collect();
            row.push(fmt_real(t));
            row.push(fmt_real(u));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_mode_table<W: Write>(out: W, modes: &[ModeState]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "lambda_k", "phi_k", "delta_k", "w_minus0", "w_prime_minus0"])?;
    for m in modes {
        w.write_record([
            m.k.to_string(),
            fmt_real(m.lambda),
            fmt_real(m.phi),
            fmt_real(m.delta_k),
            fmt_real(m.w_minus0),
            fmt_real(m.w_prime_minus0),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn audit_line(out: &mut String, name: &str, a: &MonotonicityReport) {
    let direction = a.direction.map_or("none".to_string(), |d| format!("{d:?}").to_lowercase());
    let _ = writeln!(out, "{name}.audit.points = {}", a.points);
    let _ = writeln!(out, "{name}.audit.direction = {direction}");
    let _ = writeln!(out, "{name}.audit.min_abs_slope = {}", fmt_real(a.min_abs_slope));
    if let Some(n) = a.wronskian_disagreements {
        let _ = writeln!(out, "{name}.audit.wronskian_disagreements = {n}");
    }
}

fn stage_lines(out: &mut String, name: &str, s: &StageResult) {
    let _ = writeln!(out, "{name}.value = {}", fmt_real(s.value));
    let _ = writeln!(out, "{name}.residual = {}", fmt_real(s.residual));
    let _ = writeln!(out, "{name}.target = {}", fmt_real(s.bracket.target));
    let _ = writeln!(out, "{name}.bracket.values = {}, {}", fmt_real(s.bracket.value_lo), fmt_real(s.bracket.value_hi));
    let _ = writeln!(out, "{name}.slope = {}", fmt_real(s.slope));
    let _ = writeln!(out, "{name}.iterations = {}", s.iterations);
    audit_line(out, name, &s.audit);
}

/// `key = value` report of a recovery with its audits.
pub fn recovery_report(r: &RecoveryResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode = {}", format!("{:?}", r.mode).to_lowercase());
    let _ = writeln!(out, "k0 = {}", r.k0);
    let _ = writeln!(out, "alpha_hat = {}", fmt_real(r.alpha_hat));
    let _ = writeln!(out, "beta_hat = {}", fmt_real(r.beta_hat));
    let _ = writeln!(out, "residuals_within_tolerance = {}", r.residuals_within_tolerance);
    stage_lines(&mut out, "beta", &r.beta_stage);
    stage_lines(&mut out, "alpha", &r.alpha_stage);
    let _ = writeln!(out, "sensitivity.beta_shift_per_unit = {}", fmt_real(r.sensitivity.beta_shift_per_unit));
    let _ = writeln!(out, "sensitivity.alpha_shift_per_unit = {}", fmt_real(r.sensitivity.alpha_shift_per_unit));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn mode_table_header() {
        let mut buf = Vec::new();
        let m = ModeState { k: 1, lambda: 1.0, phi: 1.0, delta_k: 2.0, w_minus0: -0.5, w_prime_minus0: 0.5, w_plus0: -0.5 };
        write_mode_table(&mut buf, &[m]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,lambda_k,phi_k,delta_k,w_minus0,w_prime_minus0\n1,"));
    }
}
