//! Adaptive Simpson quadrature with Richardson correction.



use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Accumulated error estimate over accepted panels.
    pub error: f64,
    pub evaluations: usize,
}

/// Integrate `f` over `[a, b]` to absolute accuracy `eps`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, eps: f64) -> Result<Quadrature> {
    if !(b > a) || !(eps > 0.0) {
        return Err(Error::InvalidArgument("quadrature needs a < b and eps > 0"));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut q = Quadrature { value: 0.0, error: 0.0, evaluations: 3 };
    let ok = recurse(&f, Panel { a, b, fa, fm, fb, whole }, eps, MAX_DEPTH, &mut q);
    if !ok || !q.value.is_finite() || q.error > eps {
        return Err(Error::Quadrature { estimate: q.value, error: q.error });
    }
    Ok(q)
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn recurse<F: Fn(f64) -> f64>(f: &F, p: Panel, eps: f64, depth: u32, q: &mut Quadrature) -> bool {
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let flm = f(lm);
    let frm = f(rm);
    q.evaluations += 2;
    let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    let delta = left + right - p.whole;
    if delta.abs() <= 15.0 * eps || depth == 0 {
        q.value += left + right + delta / 15.0;
        q.error += delta.abs() / 15.0;
        return depth > 0;
    }
    let l = Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left };
    let r = Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right };
    recurse(f, l, 0.5 * eps, depth - 1, q) && recurse(f, r, 0.5 * eps, depth - 1, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_integral() {
        let q = adaptive_simpson(|x: f64| (-x * x).exp(), 0.0, 10.0, 1e-13).unwrap();
        let exact = 0.5 * core::f64::consts::PI.sqrt();
        assert!((q.value - exact).abs() < 1e-12);
    }

    #[test]
    fn polynomial_is_exact() {
        let q = adaptive_simpson(|x: f64| x * x * x - 2.0 * x, -1.0, 3.0, 1e-12).unwrap();
        assert!((q.value - 12.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(adaptive_simpson(|x: f64| x, 1.0, 1.0, 1e-8).is_err());
    }
}
