//! Dense matrix exponential by scaling and squaring with Padé approximants
//! (degrees 3, 5, 7, 9, 13; Higham 2005 thresholds).

use nalgebra::DMatrix;

use crate::error::DynamicsError;

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Numerator/denominator pieces `(U, V)` of a low-degree Padé approximant.
fn pade_low(a: &DMatrix<f64>, coeffs: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let a2 = a * a;
    let mut power = DMatrix::identity(n, n);
    let mut u_inner = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    for k in (0..coeffs.len()).step_by(2) {
        v += &power * coeffs[k];
        u_inner += &power * coeffs[k + 1];
        power = &power * &a2;
    }
    (a * u_inner, v)
}

fn pade_13(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let b = &B13;
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_hi = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u_inner = &a6 * u_hi + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1];
    let v_hi = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * v_hi + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    (a * u_inner, v)
}

/// `exp(a)` for a square matrix.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>, DynamicsError> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(DynamicsError::ExpmFailure);
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(DynamicsError::ExpmFailure);
    }

    let mut squarings = 0u32;
    let (u, v) = if let Some(&(m, _)) = THETA.iter().find(|&&(_, theta)| norm <= theta) {
        let coeffs: &[f64] = match m {
            3 => &B3,
            5 => &B5,
            7 => &B7,
            _ => &B9,
        };
        pade_low(a, coeffs)
    } else {
        let mut scaled = norm;
        let mut factor = 1.0;
        while scaled > THETA_13 {
            scaled /= 2.0;
            factor /= 2.0;
            squarings += 1;
        }
        pade_13(&(a * factor))
    };

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or(DynamicsError::ExpmFailure)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(DynamicsError::ExpmFailure);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        let e = expm(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e, DMatrix::identity(3, 3));
    }

    #[test]
    fn exp_of_diagonal_across_scales() {
        for &d in &[1e-3, 0.2, 0.9, 2.0, 5.0, 40.0, -40.0] {
            let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![d, -d / 2.0]));
            let e = expm(&a).unwrap();
            let want0 = f64::exp(d);
            let want1 = f64::exp(-d / 2.0);
            assert!(((e[(0, 0)] - want0) / want0).abs() < 1e-13, "d = {d}");
            assert!(((e[(1, 1)] - want1) / want1).abs() < 1e-13, "d = {d}");
        }
    }

    #[test]
    fn exp_of_rotation_generator() {
        let t = 1.3;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a).unwrap();
        let (s, c) = (f64::sin(t), f64::cos(t));
        let want = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        assert!((e - want).amax() < 1e-14);
    }

    #[test]
    fn exp_of_nilpotent_block() {
        // exp([[0, t], [0, 0]]) = [[1, t], [0, 1]]
        for &t in &[0.01, 3.0, 250.0] {
            let a = DMatrix::from_row_slice(2, 2, &[0.0, t, 0.0, 0.0]);
            let e = expm(&a).unwrap();
            assert!((e[(0, 1)] - t).abs() < 1e-12 * t.max(1.0));
            assert!((e[(0, 0)] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let a = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert_eq!(expm(&a), Err(DynamicsError::ExpmFailure));
    }
}
