//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

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
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
}

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]`, bisecting the interval with the largest
/// error estimate until the total estimate drops below `rel_tol · |I|` or
/// `max_intervals` is reached.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, max_intervals: usize) -> QuadResult {
    let (v, e) = kronrod(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        if error <= rel_tol * value.abs() || error == 0.0 || intervals.len() >= max_intervals {
            return QuadResult { value, abs_error: error };
        }
        let (worst, _) = intervals.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod(&f, lo, mid);
        let (v2, e2) = kronrod(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}
