//! Matrix exponential by scaling and squaring with the degree-13 diagonal
//! Padé approximant.

use super::lu;
use super::matrix::CMatrix;
use crate::error::Result;

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
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

/// exp(scale · m).
pub fn expm(m: &CMatrix, scale: f64) -> Result<CMatrix> {
    let n = m.check_square("expm argument")?;
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let a = m.scale(scale);
    let norm = a.norm_1();
    if norm == 0.0 {
        return Ok(CMatrix::identity(n));
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = a.scale(0.5f64.powi(s));

    let b = &PADE_13;
    let id = CMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let u_inner = &(&(&a6.scale(b[13]) + &a4.scale(b[11])) + &a2.scale(b[9]));
    let u_tail = &(&(&(&a6.scale(b[7]) + &a4.scale(b[5])) + &a2.scale(b[3])) + &id.scale(b[1]));
    let u = a.matmul(&(&a6.matmul(u_inner) + u_tail));

    let v_inner = &(&(&a6.scale(b[12]) + &a4.scale(b[10])) + &a2.scale(b[8]));
    let v_tail = &(&(&(&a6.scale(b[6]) + &a4.scale(b[4])) + &a2.scale(b[2])) + &id.scale(b[0]));
    let v = &a6.matmul(v_inner) + v_tail;

    let mut r = lu::solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}
