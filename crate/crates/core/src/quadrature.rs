//! Adaptive one-dimensional quadrature (Gauss–Kronrod 7/15 and Simpson) and
//! iterated two-dimensional integration. Integrands are fallible so that
//! evaluation errors (poles, branch failures) surface to the caller.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integral estimate with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadConfig {
    pub fn absolute(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let f1 = f(c - h * x)?;
        let f2 = f(c + h * x)?;
        kronrod += w * (f1 + f2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod quadrature: the segment with the largest
/// error estimate is bisected until the total estimate meets the tolerance.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Quad>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Quad {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (value, error) = gk15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let (mut total, mut total_err) = (value, error);
    for _ in 0..cfg.max_subdivisions {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Path(format!("non-finite integrand on [{a}, {b}]")));
        }
        if total_err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            return Ok(Quad {
                value: total,
                error: total_err,
                evaluations,
            });
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        let (v1, e1) = gk15(&mut f, seg.a, mid)?;
        let (v2, e2) = gk15(&mut f, mid, seg.b)?;
        evaluations += 30;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
    // Re-sum to shed accumulated rounding in the running totals.
    let total_err: f64 = heap.iter().map(|s| s.error).sum();
    if total_err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
        let value = heap.iter().map(|s| s.value).sum();
        return Ok(Quad {
            value,
            error: total_err,
            evaluations,
        });
    }
    Err(Error::Path(format!(
        "quadrature on [{a}, {b}] did not converge: error estimate {total_err:e} after {} subdivisions",
        cfg.max_subdivisions
    )))
}

/// Adaptive Simpson rule on `initial_panels` equal panels, each refined
/// recursively to its share of the absolute tolerance.
pub fn simpson<F>(mut f: F, a: f64, b: f64, abs_tol: f64, initial_panels: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = initial_panels.max(1);
    let width = (b - a) / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let x0 = a + width * k as f64;
        let x1 = if k + 1 == n { b } else { x0 + width };
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0)?, f(xm)?, f(x1)?);
        let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        sum += simpson_rec(&mut f, x0, x1, f0, fm, f1, whole, abs_tol / n as f64, 40)?;
    }
    Ok(sum)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F>(f: &mut F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::Path(format!("non-finite integrand near [{a}, {b}]")));
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Path(format!("Simpson refinement exhausted on [{a}, {b}]")));
    }
    Ok(simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Adaptive Simpson for a pair of integrands sharing one node set, so that
/// pointwise-equal integrands give bitwise-equal integrals. Refinement is
/// driven by the larger of the two local error estimates.
pub fn simpson_pair<F>(mut f: F, a: f64, b: f64, abs_tol: f64, initial_panels: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let n = initial_panels.max(1);
    let width = (b - a) / n as f64;
    let mut sum = (0.0, 0.0);
    for k in 0..n {
        let x0 = a + width * k as f64;
        let x1 = if k + 1 == n { b } else { x0 + width };
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0)?, f(xm)?, f(x1)?);
        let w = (x1 - x0) / 6.0;
        let whole = (w * (f0.0 + 4.0 * fm.0 + f1.0), w * (f0.1 + 4.0 * fm.1 + f1.1));
        let part = pair_rec(&mut f, [x0, x1], [f0, fm, f1], whole, abs_tol / n as f64, 40)?;
        sum.0 += part.0;
        sum.1 += part.1;
    }
    Ok(sum)
}

type Pair = (f64, f64);

fn pair_rec<F>(f: &mut F, ab: [f64; 2], fs: [Pair; 3], whole: Pair, tol: f64, depth: u32) -> Result<Pair>
where
    F: FnMut(f64) -> Result<Pair>,
{
    let [a, b] = ab;
    let [fa, fm, fb] = fs;
    let m = 0.5 * (a + b);
    let (flm, frm) = (f(0.5 * (a + m))?, f(0.5 * (m + b))?);
    let w = (m - a) / 6.0;
    let left = (w * (fa.0 + 4.0 * flm.0 + fm.0), w * (fa.1 + 4.0 * flm.1 + fm.1));
    let right = (w * (fm.0 + 4.0 * frm.0 + fb.0), w * (fm.1 + 4.0 * frm.1 + fb.1));
    let delta = (left.0 + right.0 - whole.0, left.1 + right.1 - whole.1);
    if !(delta.0.is_finite() && delta.1.is_finite()) {
        return Err(Error::Path(format!("non-finite integrand near [{a}, {b}]")));
    }
    if delta.0.abs().max(delta.1.abs()) <= 15.0 * tol {
        return Ok((left.0 + right.0 + delta.0 / 15.0, left.1 + right.1 + delta.1 / 15.0));
    }
    if depth == 0 {
        return Err(Error::Path(format!("Simpson refinement exhausted on [{a}, {b}]")));
    }
    let l = pair_rec(f, [a, m], [fa, flm, fm], left, 0.5 * tol, depth - 1)?;
    let r = pair_rec(f, [m, b], [fm, frm, fb], right, 0.5 * tol, depth - 1)?;
    Ok((l.0 + r.0, l.1 + r.1))
}

/// `∫_{x0}^{x1} ∫_{lo(x)}^{hi(x)} f(x, y) dy dx` by nested adaptive quadrature.
pub fn integrate_2d<F, L, H>(mut f: F, x0: f64, x1: f64, lo: L, hi: H, cfg: &QuadConfig) -> Result<Quad>
where
    F: FnMut(f64, f64) -> Result<f64>,
    L: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    let inner_cfg = QuadConfig {
        abs_tol: cfg.abs_tol * 0.1,
        rel_tol: cfg.rel_tol * 0.1,
        max_subdivisions: cfg.max_subdivisions,
    };
    let mut evaluations = 0;
    let outer = integrate(
        |x| {
            let q = integrate(|y| f(x, y), lo(x), hi(x), &inner_cfg)?;
            evaluations += q.evaluations;
            Ok(q.value)
        },
        x0,
        x1,
        cfg,
    )?;
    Ok(Quad {
        evaluations,
        ..outer
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| Ok(x.powi(5) - 3.0 * x * x), -1.0, 2.0, &QuadConfig::default()).unwrap();
        assert!((q.value - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ ln x dx = −1.
        let q = integrate(|x| Ok(x.ln()), 0.0, 1.0, &QuadConfig::absolute(1e-10)).unwrap();
        assert!((q.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn simpson_smooth() {
        let v = simpson(|x| Ok(x.sin()), 0.0, PI, 1e-10, 16).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn simpson_pair_shares_nodes() {
        let (a, b) = simpson_pair(|x| Ok((x.cos().abs(), x.cos().abs())), 0.0, 7.0, 1e-9, 8).unwrap();
        assert_eq!(a, b);
        assert!((a - (1.0 + 2.0 + 7f64.sin() - (-1.0))).abs() < 1e-6, "{a}");
    }

    #[test]
    fn errors_propagate() {
        let r = integrate(|x| if x > 0.5 { Err(Error::Pole(0.0)) } else { Ok(1.0) }, 0.0, 1.0, &QuadConfig::default());
        assert_eq!(r.unwrap_err(), Error::Pole(0.0));
        let r = integrate(|x| Ok(1.0 / x), 0.0, 1.0, &QuadConfig::default());
        assert!(matches!(r, Err(Error::Path(_))));
    }

    #[test]
    fn disc_area() {
        let q = integrate_2d(
            |_, _| Ok(1.0),
            -1.0,
            1.0,
            |x| -(1.0 - x * x).sqrt(),
            |x| (1.0 - x * x).sqrt(),
            &QuadConfig::absolute(1e-9),
        )
        .unwrap();
        assert!((q.value - PI).abs() < 1e-8);
    }
}
