use crate::RAW_MAX;

/// Rounds half away from zero and clamps into the 10-bit range.
#[inline]
pub(crate) fn round_to_raw(v: f64) -> u16 {
    v.round().clamp(0.0, RAW_MAX as f64) as u16
}

/// Mirror index into `0..len` without repeating the edge sample
/// (`-1 -> 1`, `len -> len - 2`). Preserves index parity, so Bayer phase
/// survives the padding.
#[inline]
pub(crate) fn reflect(i: isize, len: usize) -> usize {
    let n = len as isize;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - m;
    }
    m as usize
}

/// Median of a small buffer of samples; for an even count the two middle
/// values are averaged and rounded half away from zero.
pub(crate) fn median(values: &mut [u16]) -> u16 {
    debug_assert!(!values.is_empty());
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        let sum = values[n / 2 - 1] as u32 + values[n / 2] as u32;
        sum.div_ceil(2) as u16
    }
}

/// Rounded mean of `sum / count`, half away from zero, for non-negative sums.
#[inline]
pub(crate) fn rounded_mean(sum: u64, count: u64) -> u16 {
    debug_assert!(count > 0);
    ((2 * sum + count) / (2 * count)) as u16
}
