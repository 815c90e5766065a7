//! Binary reflected Gray codes with MSB-first bit positions.

use crate::error::{Error, Result};

pub const MAX_BETA: u32 = 24;

/// The `2^beta` codes of a binary reflected Gray code, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraySeq {
    pub beta: u32,
    pub codes: Vec<u32>,
}

impl GraySeq {
    /// Renders code `alpha` (1-based) as a bit string, MSB first.
    pub fn code_string(&self, alpha: usize) -> String {
        format!("{:0width$b}", self.codes[alpha - 1], width = self.beta as usize)
    }
}

fn check_beta(beta: u32) -> Result<()> {
    if (1..=MAX_BETA).contains(&beta) {
        Ok(())
    } else {
        Err(Error::OutOfRange { what: "Gray code width", value: beta as i64, allowed: format!("1..={MAX_BETA}") })
    }
}

/// `code_α = (α−1) XOR ((α−1) >> 1)` for `α = 1..2^beta`.
pub fn gray_sequence(beta: u32) -> Result<GraySeq> {
    check_beta(beta)?;
    let codes = (0..1u32 << beta).map(|i| i ^ (i >> 1)).collect();
    Ok(GraySeq { beta, codes })
}

/// The 1-based, MSB-first position of the bit in which code `alpha` and
/// its cyclic successor differ.
///
/// ```
/// use mcu_synth::graycode::gamma;
/// let seq: Vec<u32> = (1..=8).map(|a| gamma(a, 3).unwrap()).collect();
/// assert_eq!(seq, [3, 2, 3, 1, 3, 2, 3, 1]);
/// ```
pub fn gamma(alpha: u32, beta: u32) -> Result<u32> {
    check_beta(beta)?;
    let len = 1u64 << beta;
    if alpha == 0 || alpha as u64 > len {
        return Err(Error::OutOfRange { what: "Gray code index", value: alpha as i64, allowed: format!("1..={len}") });
    }
    if alpha as u64 == len {
        // The last code is 10…0, the first is 0…0.
        return Ok(1);
    }
    // Going from i−1 to i flips bit `trailing_zeros(i)`, counted from the LSB.
    Ok(beta - alpha.trailing_zeros())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sequences() {
        assert_eq!(gray_sequence(1).unwrap().codes, [0, 1]);
        assert_eq!(gray_sequence(2).unwrap().codes, [0b00, 0b01, 0b11, 0b10]);
        let s = gray_sequence(3).unwrap();
        let strs: Vec<String> = (1..=8).map(|a| s.code_string(a)).collect();
        assert_eq!(strs, ["000", "001", "011", "010", "110", "111", "101", "100"]);
    }

    #[test]
    fn gamma_sequences() {
        let g = |beta: u32| -> Vec<u32> { (1..=1 << beta).map(|a| gamma(a, beta).unwrap()).collect() };
        assert_eq!(g(1), [1, 1]);
        assert_eq!(g(2), [2, 1, 2, 1]);
    }

    #[test]
    fn bounds() {
        assert!(gray_sequence(0).is_err());
        assert!(gray_sequence(25).is_err());
        assert!(gamma(0, 3).is_err());
        assert!(gamma(9, 3).is_err());
    }
}
