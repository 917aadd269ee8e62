//! Growth-rate fits `a_p ~ e^{s p} p^{-alpha}` and the exponent conjecture.
//!
//! Counts stay exact everywhere else in the crate; they become floats here.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest order used when no window is given. Low orders are dominated by
/// corrections the models do not describe.
pub const DEFAULT_MIN_ORDER: usize = 8;

const MIN_POINTS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthModel {
    /// `log a_p = s p - alpha log p + c`
    PurePower,
    /// `log a_p = s p - alpha log p + log(a log p + b)`
    LogCorrected,
}

impl fmt::Display for GrowthModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GrowthModel::PurePower => "pure-power",
            GrowthModel::LogCorrected => "log-corrected",
        })
    }
}

impl FromStr for GrowthModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure-power" | "pure" => Ok(GrowthModel::PurePower),
            "log-corrected" | "log" => Ok(GrowthModel::LogCorrected),
            _ => Err(Error::Parse(format!("unknown model {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub model: GrowthModel,
    /// Inclusive order range actually fitted.
    pub window: (usize, usize),
    pub s_hat: f64,
    pub growth: f64,
    pub alpha: f64,
    /// Log-correction slope; zero for the pure-power model.
    pub a: f64,
    /// Amplitude: `b` of the log correction, or `e^c` for the pure power.
    pub b: f64,
    /// Sum of squared residuals of `log a_p` over the window.
    pub residual: f64,
    /// Leave-two-out standard deviations.
    pub s_hat_spread: f64,
    pub alpha_spread: f64,
    pub a_spread: f64,
    pub b_spread: f64,
}

/// Fits `sequence` (pairs `(p, a_p)`) on `window`, or on
/// `DEFAULT_MIN_ORDER..` when `None` (falling back to all `p >= 1` if that
/// leaves too few points).
pub fn fit_growth(
    sequence: &[(usize, BigInt)],
    model: GrowthModel,
    window: Option<RangeInclusive<usize>>,
) -> Result<AsymptoticFit> {
    let window = match window {
        Some(w) => w,
        None => default_window(sequence),
    };
    let mut points = Vec::new();
    for (p, c) in sequence {
        if !window.contains(p) {
            continue;
        }
        if *p == 0 {
            continue;
        }
        if !c.is_positive() {
            return Err(Error::NonPositiveEntry(*p));
        }
        points.push((*p as f64, ln_big(c)));
    }
    points.sort_by(|x, y| x.0.total_cmp(&y.0));
    let need = match model {
        GrowthModel::PurePower => MIN_POINTS,
        GrowthModel::LogCorrected => MIN_POINTS.max(6),
    };
    if points.len() < need {
        return Err(Error::DegenerateWindow(format!(
            "{}..={} holds {} usable points",
            window.start(),
            window.end(),
            points.len()
        )));
    }
    let lo = points[0].0 as usize;
    let hi = points[points.len() - 1].0 as usize;

    let full = fit_points(&points, model)
        .ok_or_else(|| Error::DegenerateWindow(format!("{lo}..={hi}: no convergent fit")))?;

    let mut samples = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let sub: Vec<(f64, f64)> = points
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i && *k != j)
                .map(|(_, x)| *x)
                .collect();
            if let Some(f) = fit_points(&sub, model) {
                samples.push(f);
            }
        }
    }
    let spread = |f: fn(&Params) -> f64| std_dev(samples.iter().map(f));

    Ok(AsymptoticFit {
        model,
        window: (lo, hi),
        s_hat: full.s,
        growth: full.s.exp(),
        alpha: full.alpha,
        a: full.a,
        b: full.b,
        residual: full.cost,
        s_hat_spread: spread(|p| p.s),
        alpha_spread: spread(|p| p.alpha),
        a_spread: spread(|p| p.a),
        b_spread: spread(|p| p.b),
    })
}

fn default_window(sequence: &[(usize, BigInt)]) -> RangeInclusive<usize> {
    let hi = sequence.iter().map(|(p, _)| *p).max().unwrap_or(0);
    let above = sequence.iter().filter(|(p, _)| *p >= DEFAULT_MIN_ORDER).count();
    if above >= MIN_POINTS + 1 {
        DEFAULT_MIN_ORDER..=hi
    } else {
        1..=hi
    }
}

/// Conjectured exponent `1 + 1/nu` where `n = -2 cos(pi nu)`, `1/2 <= nu <= 1`.
pub fn conjectured_alpha(n: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&n) {
        return Err(Error::OutOfRange(format!("n = {n} (expected 0 <= n <= 2)")));
    }
    let nu = (-n / 2.0).acos() / std::f64::consts::PI;
    Ok(1.0 + 1.0 / nu)
}

/// Parses `p,count` CSV. A header line is skipped, and columns past the
/// second are ignored.
pub fn parse_sequence_csv(text: &str) -> Result<Vec<(usize, BigInt)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with(|c: char| c.is_alphabetic())) {
            continue;
        }
        let bad = || Error::Parse(format!("line {}: {line:?}", i + 1));
        let mut f = line.split(',').map(str::trim);
        let p = f.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let c = f.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        out.push((p, c));
    }
    Ok(out)
}

fn ln_big(c: &BigInt) -> f64 {
    // Keep 60 significant bits and account for the rest with a shift.
    let bits = c.bits();
    if bits <= 60 {
        c.to_f64().unwrap().ln()
    } else {
        let shift = bits - 60;
        let top: BigInt = c >> shift;
        top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn std_dev(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    if v.len() < 2 {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

#[derive(Clone, Copy, Debug)]
struct Params {
    s: f64,
    alpha: f64,
    a: f64,
    b: f64,
    cost: f64,
}

fn fit_points(points: &[(f64, f64)], model: GrowthModel) -> Option<Params> {
    match model {
        GrowthModel::PurePower => fit_pure(points),
        GrowthModel::LogCorrected => fit_log(points),
    }
}

fn fit_pure(points: &[(f64, f64)]) -> Option<Params> {
    let rows: Vec<[f64; 3]> = points.iter().map(|(p, _)| [*p, -p.ln(), 1.0]).collect();
    let y: Vec<f64> = points.iter().map(|(_, y)| *y).collect();
    let x = least_squares(&rows, &y)?;
    Some(Params {
        s: x[0],
        alpha: x[1],
        a: 0.0,
        b: x[2].exp(),
        cost: linear_cost(&rows, &y, &x),
    })
}

fn linear_cost<const K: usize>(rows: &[[f64; K]], y: &[f64], x: &[f64; K]) -> f64 {
    rows.iter()
        .zip(y)
        .map(|(r, y)| (r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - y).powi(2))
        .sum()
}

/// Residuals and Jacobian of the log-corrected model, or `None` when the
/// correction `a log p + b` is not positive somewhere on the window.
fn log_model(points: &[(f64, f64)], x: &[f64; 4]) -> Option<(Vec<f64>, Vec<[f64; 4]>)> {
    let mut r = Vec::with_capacity(points.len());
    let mut jac = Vec::with_capacity(points.len());
    for (p, y) in points {
        let lp = p.ln();
        let corr = x[2] * lp + x[3];
        if corr <= 0.0 {
            return None;
        }
        r.push(x[0] * p - x[1] * lp + corr.ln() - y);
        jac.push([*p, -lp, lp / corr, 1.0 / corr]);
    }
    Some((r, jac))
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn fit_log(points: &[(f64, f64)]) -> Option<Params> {
    // With a log p + b = A (cos t log p + sin t) the model is linear in
    // (s, alpha, log A) for fixed t, so t is profiled on a grid first.
    use std::f64::consts::PI;
    const GRID: usize = 360;
    let step = 2.0 * PI / GRID as f64;
    let cost = |t: f64| profile(points, t).map_or(f64::INFINITY, |p| p.cost);
    let t0 = (0..GRID)
        .map(|i| -PI + step * i as f64)
        .map(|t| (cost(t), t))
        .filter(|(c, _)| c.is_finite())
        .min_by(|x, y| x.0.total_cmp(&y.0))?
        .1;
    let (mut lo, mut hi) = (t0 - step, t0 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if cost(m1) <= cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t = if cost(0.5 * (lo + hi)) <= cost(t0) { 0.5 * (lo + hi) } else { t0 };
    let start = profile(points, t)?;
    match gauss_newton(points, [start.s, start.alpha, start.a, start.b]) {
        Some(p) if p.cost <= start.cost => Some(p),
        _ => Some(start),
    }
}

fn profile(points: &[(f64, f64)], t: f64) -> Option<Params> {
    let (sin, cos) = t.sin_cos();
    let mut rows = Vec::with_capacity(points.len());
    let mut y = Vec::with_capacity(points.len());
    for (p, v) in points {
        let corr = cos * p.ln() + sin;
        if corr <= 0.0 {
            return None;
        }
        rows.push([*p, -p.ln(), 1.0]);
        y.push(v - corr.ln());
    }
    let x = least_squares(&rows, &y)?;
    let amp = x[2].exp();
    Some(Params {
        s: x[0],
        alpha: x[1],
        a: amp * cos,
        b: amp * sin,
        cost: linear_cost(&rows, &y, &x),
    })
}

fn gauss_newton(points: &[(f64, f64)], mut x: [f64; 4]) -> Option<Params> {
    let (mut r, mut jac) = log_model(points, &x)?;
    let mut cost = sum_sq(&r);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let mut jtj = [[0.0; 4]; 4];
        let mut jtr = [0.0; 4];
        for (row, ri) in jac.iter().zip(&r) {
            for i in 0..4 {
                jtr[i] += row[i] * ri;
                for j in 0..4 {
                    jtj[i][j] += row[i] * row[j];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut m = jtj;
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-12);
            }
            let Some(step) = solve(m, jtr.map(|v| -v)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [x[0] + step[0], x[1] + step[1], x[2] + step[2], x[3] + step[3]];
            if let Some((tr, tj)) = log_model(points, &trial) {
                let tc = sum_sq(&tr);
                if tc < cost {
                    let rel = (cost - tc) / cost.max(1e-300);
                    x = trial;
                    r = tr;
                    jac = tj;
                    cost = tc;
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = true;
                    if rel < 1e-14 {
                        return Some(finish(x, cost));
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Some(finish(x, cost))
}

fn finish(x: [f64; 4], cost: f64) -> Params {
    Params {
        s: x[0],
        alpha: x[1],
        a: x[2],
        b: x[3],
        cost,
    }
}

/// Solves the normal equations of an overdetermined system.
fn least_squares<const K: usize>(rows: &[[f64; K]], y: &[f64]) -> Option<[f64; K]> {
    let mut ata = [[0.0; K]; K];
    let mut aty = [0.0; K];
    for (row, yi) in rows.iter().zip(y) {
        for i in 0..K {
            aty[i] += row[i] * yi;
            for j in 0..K {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    solve(ata, aty)
}

/// Gaussian elimination with partial pivoting.
fn solve<const K: usize>(mut m: [[f64; K]; K], mut v: [f64; K]) -> Option<[f64; K]> {
    let scale = m.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for col in 0..K {
        let piv = (col..K).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for row in col + 1..K {
            let f = m[row][col] / m[col][col];
            for k in col..K {
                m[row][k] -= f * m[col][k];
            }
            v[row] -= f * v[col];
        }
    }
    let mut x = [0.0; K];
    for row in (0..K).rev() {
        let tail: f64 = (row + 1..K).map(|k| m[row][k] * x[k]).sum();
        x[row] = (v[row] - tail) / m[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjecture_endpoints() {
        assert!((conjectured_alpha(0.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((conjectured_alpha(1.0).unwrap() - 2.5).abs() < 1e-12);
        assert!((conjectured_alpha(2.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(conjectured_alpha(-0.1).is_err());
        assert!(conjectured_alpha(2.5).is_err());
    }

    #[test]
    fn big_logs() {
        let x: BigInt = "40558226664529024000".parse().unwrap();
        assert!((ln_big(&x) - 40558226664529024000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn constant_sequence() {
        let seq: Vec<_> = (1..=12).map(|p| (p, BigInt::from(1))).collect();
        let f = fit_growth(&seq, GrowthModel::PurePower, None).unwrap();
        assert!(f.s_hat.abs() < 1e-9 && f.alpha.abs() < 1e-9);
    }

    #[test]
    fn short_window_is_degenerate() {
        let seq: Vec<_> = (1..=4).map(|p| (p, BigInt::from(p))).collect();
        assert!(matches!(
            fit_growth(&seq, GrowthModel::PurePower, None),
            Err(Error::DegenerateWindow(_))
        ));
        let seq = vec![(1, BigInt::from(1)), (2, BigInt::from(0))];
        assert!(matches!(
            fit_growth(&seq, GrowthModel::PurePower, Some(1..=2)),
            Err(Error::NonPositiveEntry(2))
        ));
    }
}
