use std::f64::consts::PI;

use num_complex::Complex64;

const PI2_6: f64 = PI * PI / 6.0;

/// B_{2k} / (2k+1)!, k = 1..
const BERNOULLI: [f64; 22] = [
    2.777_777_777_777_777_62e-02,
    -2.777_777_777_777_777_78e-04,
    4.724_111_866_969_009_78e-06,
    -9.185_773_074_661_964_08e-08,
    1.897_886_998_897_100_05e-09,
    -4.064_761_645_144_225_60e-11,
    8.921_691_020_456_452_30e-13,
    -1.993_929_586_072_107_44e-14,
    4.518_980_029_619_918_25e-16,
    -1.035_651_761_218_124_72e-17,
    2.395_218_621_026_186_98e-19,
    -5.581_785_874_325_008_98e-21,
    1.309_150_755_418_321_25e-22,
    -3.087_419_802_426_740_29e-24,
    7.315_975_652_702_202_93e-26,
    -1.740_845_657_234_000_88e-27,
    4.157_635_644_613_899_88e-29,
    -9.962_148_488_284_621_68e-31,
    2.394_034_424_896_165_22e-32,
    -5.768_347_355_367_389_70e-34,
    1.393_179_479_647_008_03e-35,
    -3.372_121_965_485_089_43e-37,
];

fn series(z: Complex64) -> Complex64 {
    let mut term = z;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..200 {
        let add = term / (k * k) as f64;
        sum += add;
        if add.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
        term *= z;
    }
    sum
}

/// Li₂ via u = −log(1−z); fast for |z| ≤ 1, Re z ≤ ½.
fn bernoulli_series(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut sum = u - u2 / 4.0;
    let mut p = u;
    for c in BERNOULLI {
        p *= u2;
        let add = p * c;
        sum += add;
        if add.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// Principal-branch dilogarithm Li₂(z) = −∫₀ᶻ log(1−t) dt/t.
pub fn dilog(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if z.re.is_nan() || z.im.is_nan() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    if z == one {
        return Complex64::new(PI2_6, 0.0);
    }
    let r = z.norm();
    if r <= 0.5 {
        return series(z);
    }
    if r > 1.0 {
        // Li₂(z) + Li₂(1/z) = −π²/6 − ½ log²(−z)
        let l = (-z).ln();
        return -PI2_6 - 0.5 * l * l - dilog(one / z);
    }
    if z.re > 0.5 {
        // Li₂(z) + Li₂(1−z) = π²/6 − log z log(1−z)
        let w = one - z;
        let rest = if w.norm() <= 0.5 { series(w) } else { bernoulli_series(w) };
        return PI2_6 - z.ln() * w.ln() - rest;
    }
    bernoulli_series(z)
}

/// Bloch-Wigner function D(z) = Im Li₂(z) + arg(1−z) log|z|.
pub fn bloch_wigner(z: Complex64) -> f64 {
    if z.re.is_nan() || z.im.is_nan() {
        return f64::NAN;
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return 0.0;
    }
    let r = z.norm();
    if r == 0.0 || z == Complex64::new(1.0, 0.0) {
        return 0.0;
    }
    if z.im == 0.0 {
        return 0.0;
    }
    if r > 1.0 {
        return -bloch_wigner(Complex64::new(1.0, 0.0) / z);
    }
    dilog(z).im + (Complex64::new(1.0, 0.0) - z).arg() * r.ln()
}
