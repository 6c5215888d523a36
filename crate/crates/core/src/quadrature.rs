//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use alloc::vec::Vec;

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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One (7, 15) panel: returns the Kronrod estimate and `|K − G|`.
pub fn gk15<F, E>(f: &F, a: f64, b: f64) -> Result<(f64, f64), E>
where
    F: Fn(f64) -> Result<f64, E>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// `∫_a^b f` by bisecting panels until each local error is below
/// `max(abs_tol, rel_tol·|panel|)` or `max_depth` halvings are used.
pub fn integrate<F, E>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64, E>
where
    F: Fn(f64) -> Result<f64, E>,
{
    const MAX_DEPTH: u32 = 40;
    if a == b {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut stack: Vec<(f64, f64, u32)> = Vec::new();
    stack.push((a, b, 0));
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gk15(f, lo, hi)?;
        let width_share = ((hi - lo) / (b - a)).abs();
        let tol = (abs_tol * width_share).max(rel_tol * value.abs());
        if err <= tol || depth >= MAX_DEPTH {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok(total)
}
