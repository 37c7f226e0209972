//! One-dimensional quadrature: adaptive Gauss–Kronrod (7/15) with a fixed
//! composite Gauss fallback.

use crate::error::Result;
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Number of panels of the fixed composite rule.
pub const FALLBACK_PANELS: usize = 64;

const MAX_INTERVALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
    /// True when the adaptive budget ran out and the composite fallback
    /// produced `value`.
    pub fallback: bool,
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gauss_kronrod<T, F>(f: &mut F, a: T, b: T) -> Result<(T, T)>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss += pair * T::lit(WG[j / 2]);
        }
    }
    let value = kronrod * half_len;
    let error = ((kronrod - gauss) * half_len).abs();
    Ok((value, error))
}

/// Adaptive integration of `f` on `[a, b]` to absolute tolerance `abs_tol`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below the tolerance. If the panel budget is exhausted the
/// fixed composite rule is used instead and `fallback` is set.
pub fn integrate<T, F>(mut f: F, a: T, b: T, abs_tol: T) -> Result<Quadrature<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if a == b {
        return Ok(Quadrature {
            value: T::zero(),
            error_estimate: T::zero(),
            evaluations: 0,
            fallback: false,
        });
    }
    let (value, error) = gauss_kronrod(&mut f, a, b)?;
    let mut panels = vec![Panel { a, b, value, error }];
    let mut evaluations = 15;
    loop {
        let total_err: T = panels.iter().map(|p| p.error).sum();
        if total_err <= abs_tol {
            let value = panels.iter().map(|p| p.value).sum();
            return Ok(Quadrature {
                value,
                error_estimate: total_err,
                evaluations,
                fallback: false,
            });
        }
        if panels.len() >= MAX_INTERVALS {
            let value = composite_gauss(&mut f, a, b, FALLBACK_PANELS)?;
            return Ok(Quadrature {
                value,
                error_estimate: total_err,
                evaluations: evaluations + FALLBACK_PANELS * 7,
                fallback: true,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let Panel { a: pa, b: pb, .. } = panels.swap_remove(worst);
        let mid = T::lit(0.5) * (pa + pb);
        if mid <= pa || mid >= pb {
            // Panel is at floating-point resolution; it cannot be refined.
            let value = composite_gauss(&mut f, a, b, FALLBACK_PANELS)?;
            return Ok(Quadrature {
                value,
                error_estimate: total_err,
                evaluations: evaluations + FALLBACK_PANELS * 7,
                fallback: true,
            });
        }
        for (lo, hi) in [(pa, mid), (mid, pb)] {
            let (value, error) = gauss_kronrod(&mut f, lo, hi)?;
            panels.push(Panel {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
        evaluations += 30;
    }
}

/// Fixed composite 7-point Gauss–Legendre rule on `panels` equal panels.
pub fn composite_gauss<T, F>(f: &mut F, a: T, b: T, panels: usize) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let panels = panels.max(1);
    let width = (b - a) / T::from_usize_lossy(panels);
    let half_len = T::lit(0.5) * width;
    let mut total = T::zero();
    for k in 0..panels {
        let center = a + width * (T::from_usize_lossy(k) + T::lit(0.5));
        let mut acc = f(center)? * T::lit(WG[3]);
        for (j, &w) in WG.iter().take(3).enumerate() {
            let dx = half_len * T::lit(XGK[2 * j + 1]);
            acc += (f(center - dx)? + f(center + dx)?) * T::lit(w);
        }
        total += acc * half_len;
    }
    Ok(total)
}
