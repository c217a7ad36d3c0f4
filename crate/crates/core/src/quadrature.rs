//! Quadrature kernels shared by the Laplace, Mittag-Leffler and rheology code.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Scalar values an integrator can accumulate.
pub(crate) trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    const ZERO: Self;
    fn magnitude(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

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
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// One 7/15-point Gauss-Kronrod panel: (kronrod estimate, |kronrod - gauss|).
pub(crate) fn gk15<T: Scalar>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, &x) in XGK[..7].iter().enumerate() {
        let pair = f(c - r * x) + f(c + r * x);
        kron = kron + pair * WGK[i];
        if i % 2 == 1 {
            gauss = gauss + pair * WG[i / 2];
        }
    }
    let kron = kron * r;
    let gauss = gauss * r;
    (kron, (kron - gauss).magnitude())
}

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol * |total|)`, the estimate
/// reaches the rounding floor, or the panel budget runs out. Returns the
/// integral and the summed error estimate.
pub(crate) fn integrate<T: Scalar>(f: &impl Fn(f64) -> T, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> (T, f64) {
    const MAX_PANELS: usize = 2000;
    if a == b {
        return (T::ZERO, 0.0);
    }
    // (a, b, value, error)
    let mut panels: Vec<(f64, f64, T, f64)> = Vec::new();
    let (v, e) = gk15(f, a, b);
    panels.push((a, b, v, e));
    loop {
        let mut total = T::ZERO;
        let mut err = 0.0;
        let mut gross = 0.0;
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            total = total + p.2;
            err += p.3;
            gross += p.2.magnitude();
            if p.3 > panels[worst].3 {
                worst = i;
            }
        }
        let target = abs_tol.max(rel_tol * total.magnitude()).max(50.0 * f64::EPSILON * gross);
        let (pa, pb, _, _) = panels[worst];
        let m = 0.5 * (pa + pb);
        if err <= target || panels.len() >= MAX_PANELS || m <= pa || m >= pb {
            return (total, err);
        }
        let (lv, le) = gk15(f, pa, m);
        let (rv, re) = gk15(f, m, pb);
        panels[worst] = (pa, m, lv, le);
        panels.push((m, pb, rv, re));
    }
}

/// Double-exponential (tanh-sinh) rule on [a, b].
///
/// Nodes cluster doubly exponentially at both ends, so algebraic endpoint
/// singularities such as t^(beta-1) or (t-s)^(-alpha) are integrated without
/// special treatment. The integrand is never evaluated at a or b; points
/// where it returns a non-finite value are dropped.
pub(crate) fn tanh_sinh<T: Scalar>(f: &impl Fn(f64) -> T, a: f64, b: f64, rel_tol: f64) -> (T, f64) {
    const T_MAX: f64 = 6.0;
    const MAX_LEVEL: u32 = 10;
    let half = 0.5 * (b - a);
    let half_pi = std::f64::consts::FRAC_PI_2;

    // contribution of the node pair at +t and -t
    let pair = |t: f64| -> T {
        let u = half_pi * t.sinh();
        let cosh_u = u.cosh();
        let w = half_pi * t.cosh() / (cosh_u * cosh_u);
        // distance from the nearer endpoint, computed without cancellation
        let d = 2.0 * half / ((2.0 * u).exp() + 1.0);
        let mut acc = T::ZERO;
        if d > 0.0 {
            for x in [b - d, a + d] {
                let v = f(x);
                if v.is_finite_value() {
                    acc = acc + v * w;
                }
            }
        }
        acc
    };

    let mut h = 1.0;
    let mut sum = f(a + half) * half_pi;
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        sum = sum + pair(k as f64 * h);
        k += 1;
    }
    let mut estimate = sum * (h * half);
    let mut err = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= T_MAX {
            sum = sum + pair(k as f64 * h);
            k += 2;
        }
        let next = sum * (h * half);
        err = (next - estimate).magnitude();
        estimate = next;
        if level >= 3 && err <= rel_tol * estimate.magnitude() {
            break;
        }
    }
    (estimate, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_adaptive_on_smooth_integrand() {
        let (v, _) = integrate(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-14, 1e-14);
        assert_relative_eq!(v, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let (v, _) = tanh_sinh(&|x: f64| x.ln(), 0.0, 1.0, 1e-14);
        assert_relative_eq!(v, -1.0, max_relative = 1e-12);
        let (v, _) = tanh_sinh(&|x: f64| x.powf(-0.7), 0.0, 1.0, 1e-14);
        assert_relative_eq!(v, 1.0 / 0.3, max_relative = 1e-9);
    }

    #[test]
    fn complex_integrand() {
        let f = |x: f64| Complex64::new(0.0, x).exp();
        let (v, _) = integrate(&f, 0.0, 1.0, 1e-14, 1e-14);
        assert_relative_eq!(v.re, 1f64.sin(), max_relative = 1e-13);
        assert_relative_eq!(v.im, 1.0 - 1f64.cos(), max_relative = 1e-13);
    }
}
