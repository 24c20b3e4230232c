//! Polynomial test functions `f(z) = sum_k a_k z^k`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Coefficients `a_0..a_d`; trailing zeros are trimmed and the remaining
    /// degree must be at least one.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Config("polynomial coefficients must be finite".into()));
        }
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::Config(
                "test function must have degree at least 1 (constants do not fluctuate)".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `a * z^k`.
    pub fn monomial(k: usize, a: f64) -> Result<Self> {
        let mut c = vec![0.0; k + 1];
        c[k] = a;
        Self::real(&c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }

    /// The polynomial with conjugated coefficients, `conj(f(conj z))`.
    pub fn conj_coeffs(&self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    pub fn imag_parts(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.im).collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| if c.im == 0.0 { format!("{}", c.re) } else { format!("{}{:+}i", c.re, c.im) })
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `"c0,c1,...,cd"`. Each coefficient is a real number or a complex
/// literal such as `1.5-2i`.
impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| parse_complex(t.trim()))
            .collect::<Result<Vec<_>>>()?;
        Polynomial::new(coeffs)
    }
}

fn parse_complex(t: &str) -> Result<Complex64> {
    let bad = || Error::Config(format!("cannot parse coefficient '{t}'"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Ok(re) = t.parse::<f64>() {
        return Ok(Complex64::new(re, 0.0));
    }
    let body = t.strip_suffix('i').ok_or_else(bad)?;
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            let im_str = &body[k..];
            let im = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                s => s.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                s => s.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_degree() {
        let f: Polynomial = "0,0,1,0,0,4".parse().unwrap();
        assert_eq!(f.degree(), 5);
        assert!(f.is_real());
        assert_eq!(f.eval(Complex64::new(2.0, 0.0)), Complex64::new(4.0 + 128.0, 0.0));
        let g: Polynomial = "0,1,0,0".parse().unwrap();
        assert_eq!(g.degree(), 1);
    }

    #[test]
    fn complex_literals() {
        let f: Polynomial = "1,2-3i,i,-1.5e-1+2e2i".parse().unwrap();
        assert_eq!(
            f.coeffs(),
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, -3.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-0.15, 200.0)
            ]
        );
        assert!(!f.is_real());
    }

    #[test]
    fn degenerate_rejected() {
        assert!(matches!("3".parse::<Polynomial>(), Err(Error::Config(_))));
        assert!(matches!("3,0,0".parse::<Polynomial>(), Err(Error::Config(_))));
        assert!("1,x".parse::<Polynomial>().is_err());
        assert!("1,,2".parse::<Polynomial>().is_err());
    }
}
