//! Plain-text CSV formats. Reals are written with 17 significant digits so
//! every value round-trips exactly.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::eig::Spectrum;
use crate::fluctuation::HistogramBin;
use crate::matrix::Matrix;
use crate::oracle::ChainExpectation;
use crate::{Error, Result};

pub const TABLE_HEADER: &str = "n,k,l,value,terms";
pub const SPECTRUM_HEADER: &str = "re,im";
pub const HISTOGRAM_HEADER: &str = "bin_left,bin_right,count";

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `n=<n>` followed by one comma-separated line per row.
pub fn write_matrix<W: Write>(out: &mut W, m: &Matrix) -> Result<()> {
    let n = m.order();
    writeln!(out, "n={n}")?;
    let mut line = String::new();
    for i in 0..n {
        line.clear();
        for (j, x) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&fmt17(*x));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_matrix<R: BufRead>(input: R) -> Result<Matrix> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))??;
    let n: usize = header
        .trim()
        .strip_prefix("n=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad matrix header '{header}'")))?;
    let mut data = Vec::with_capacity(n * n);
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let before = data.len();
        for tok in line.split(',') {
            let x = tok
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("row {row}: bad value '{tok}'")))?;
            data.push(x);
        }
        if data.len() - before != n {
            return Err(Error::Parse(format!("row {row} has {} values, expected {n}", data.len() - before)));
        }
    }
    Matrix::from_row_major(n, data).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_spectrum<W: Write>(out: &mut W, spec: &Spectrum) -> Result<()> {
    writeln!(out, "{SPECTRUM_HEADER}")?;
    for z in &spec.values {
        writeln!(out, "{},{}", fmt17(z.re), fmt17(z.im))?;
    }
    Ok(())
}

pub fn read_spectrum<R: BufRead>(input: R) -> Result<Vec<Complex64>> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty spectrum file".into()))??;
    if header.trim() != SPECTRUM_HEADER {
        return Err(Error::Parse(format!("bad spectrum header '{header}'")));
    }
    lines
        .filter(|l| !l.as_ref().is_ok_and(|s| s.trim().is_empty()))
        .map(|line| {
            let line = line?;
            let (re, im) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad spectrum row '{line}'")))?;
            let p = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad value '{s}'")));
            Ok(Complex64::new(p(re)?, p(im)?))
        })
        .collect()
}

pub fn write_table<W: Write>(out: &mut W, rows: &[ChainExpectation]) -> Result<()> {
    writeln!(out, "{TABLE_HEADER}")?;
    for r in rows {
        let l = r.l.map(|l| l.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", r.n, r.k, l, fmt17(r.value), r.terms)?;
    }
    Ok(())
}

pub fn write_histogram<W: Write>(out: &mut W, bins: &[HistogramBin]) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "{HISTOGRAM_HEADER}").unwrap();
    for b in bins {
        writeln!(s, "{},{},{}", fmt17(b.left), fmt17(b.right), b.count).unwrap();
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centro::{sample_centro, EntryDist};
    use crate::oracle::{oracle_double_chain, oracle_single_chain};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn fmt17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }

        #[test]
        fn matrix_round_trips(n in 1usize..7, seed in any::<u64>()) {
            let m = sample_centro(n, EntryDist::Uniform, seed).unwrap();
            let mut buf = Vec::new();
            write_matrix(&mut buf, m.matrix()).unwrap();
            let back = read_matrix(buf.as_slice()).unwrap();
            prop_assert_eq!(&back, m.matrix());
        }
    }

    #[test]
    fn table_format() {
        let rows = vec![oracle_single_chain(3, 2).unwrap(), oracle_double_chain(2, 1, 1).unwrap()];
        let mut buf = Vec::new();
        write_table(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,k,l,value,terms");
        assert!(lines[1].starts_with("3,2,,1.6666666666666667e0,"));
        assert!(lines[1].ends_with(",9"));
        assert_eq!(lines[2], "2,1,1,2.0000000000000000e0,4");
    }

    #[test]
    fn bad_matrix_files() {
        assert!(read_matrix("n=2\n1,2\n3\n".as_bytes()).is_err());
        assert!(read_matrix("rows=2\n".as_bytes()).is_err());
        assert!(read_matrix("n=2\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn spectrum_round_trip() {
        let spec = Spectrum {
            values: vec![Complex64::new(0.1, -0.3), Complex64::new(1.0 / 3.0, 0.0)],
            iterations: 3,
            converged: true,
        };
        let mut buf = Vec::new();
        write_spectrum(&mut buf, &spec).unwrap();
        assert_eq!(read_spectrum(buf.as_slice()).unwrap(), spec.values);
    }
}
