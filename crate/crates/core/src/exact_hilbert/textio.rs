//! Plain-text interchange for operators and states.
//!
//! The first line is the header `<rows> <cols>`; it is followed by `rows`
//! lines of `cols` whitespace-separated `re,im` pairs in row-major order.
//! States are written as a single column. Values use the shortest
//! round-trip decimal representation, so a write/read cycle is lossless.

use super::error::{HilbertError, Result};
use super::state::PureState;
use super::{Operator, StateVector};
use crate::scalar::{Complex, Real};
use std::io::{BufRead, Write};

pub fn write_operator<T: Real, W: Write>(op: &Operator<T>, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", op.nrows(), op.ncols())?;
    for r in 0..op.nrows() {
        let row: Vec<String> = (0..op.ncols())
            .map(|c| {
                let z = op[(r, c)];
                format!("{},{}", z.re.as_f64(), z.im.as_f64())
            })
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn write_state<T: Real, W: Write>(state: &PureState<T>, w: W) -> Result<()> {
    let v = state.amplitudes();
    write_operator(&Operator::from_column_slice(v.len(), 1, v.as_slice()), w)
}

fn parse_err(line: usize, msg: impl Into<String>) -> HilbertError {
    HilbertError::Parse { line, msg: msg.into() }
}

fn parse_pair<T: Real>(tok: &str, line: usize) -> Result<Complex<T>> {
    let (re, im) = tok.split_once(',').ok_or_else(|| parse_err(line, format!("expected re,im but found {tok:?}")))?;
    let re: f64 = re.trim().parse().map_err(|e| parse_err(line, format!("{e}: {re:?}")))?;
    let im: f64 = im.trim().parse().map_err(|e| parse_err(line, format!("{e}: {im:?}")))?;
    Ok(Complex::new(T::lit(re), T::lit(im)))
}

pub fn read_operator<T: Real, R: BufRead>(r: R) -> Result<Operator<T>> {
    let mut lines = r.lines().enumerate().filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let (n0, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let header = header?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(n0 + 1, format!("bad dimension {t:?}"))))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(parse_err(n0 + 1, "header must be `<rows> <cols>`"));
    };
    let mut op = Operator::zeros(rows, cols);
    for r in 0..rows {
        let (n, line) = lines.next().ok_or_else(|| parse_err(n0 + 2 + r, "missing row"))?;
        let line = line?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != cols {
            return Err(parse_err(n + 1, format!("expected {cols} entries, found {}", toks.len())));
        }
        for (c, tok) in toks.into_iter().enumerate() {
            op[(r, c)] = parse_pair(tok, n + 1)?;
        }
    }
    if let Some((n, _)) = lines.next() {
        return Err(parse_err(n + 1, "trailing data"));
    }
    Ok(op)
}

pub fn read_state<T: Real, R: BufRead>(r: R) -> Result<PureState<T>> {
    let op = read_operator::<T, R>(r)?;
    if op.ncols() != 1 {
        return Err(parse_err(1, "a state must have exactly one column"));
    }
    PureState::new(StateVector::from_column_slice(op.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn operator_roundtrip_is_lossless(
            rows in 1usize..5,
            cols in 1usize..5,
            vals in proptest::collection::vec((-1e6f64..1e6, -1e-3f64..1e-3), 16),
        ) {
            let op = Operator::<f64>::from_fn(rows, cols, |r, c| {
                let (re, im) = vals[r * 4 + c];
                Complex::new(re, im)
            });
            let mut buf = Vec::new();
            write_operator(&op, &mut buf).unwrap();
            let back: Operator<f64> = read_operator(&buf[..]).unwrap();
            prop_assert_eq!(back, op);
        }
    }

    #[test]
    fn state_format_is_documented_layout() {
        let psi = PureState::<f64>::basis(2, 1);
        let mut buf = Vec::new();
        write_state(&psi, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "2 1\n0,0\n1,0\n");
        assert_eq!(read_state::<f64, _>(&buf[..]).unwrap(), psi);
    }

    #[test]
    fn malformed_input_reports_line() {
        let err = read_operator::<f64, _>("2 2\n1,0 0,0\n0,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, HilbertError::Parse { line: 3, .. }), "{err}");
        let err = read_operator::<f64, _>("1 1\n1;0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, HilbertError::Parse { line: 2, .. }));
    }
}
