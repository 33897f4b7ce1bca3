//! JSON matrix files: `{"legs": [..], "rows": N, "cols": N, "data": [[re, im], ..]}`
//! with `data` row-major. Entries are written with 17 significant digits so a
//! write/read cycle reproduces every `f64` exactly.

use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::tensor::LeggedMatrix;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    legs: Vec<usize>,
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

pub fn to_matrix_string<T: Real>(m: &LeggedMatrix<T>) -> String {
    let legs: Vec<String> = m.legs().iter().map(|l| l.to_string()).collect();
    let mut out = format!(
        "{{\n  \"legs\": [{}],\n  \"rows\": {},\n  \"cols\": {},\n  \"data\": [",
        legs.join(", "),
        m.order(),
        m.order()
    );
    for (i, z) in m.data().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("\n    [{:.16e}, {:.16e}]", to_f64(z.re), to_f64(z.im)));
    }
    out.push_str("\n  ]\n}\n");
    out
}

pub fn parse_matrix<T: Real>(text: &str) -> Result<LeggedMatrix<T>> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    if file.rows != file.cols {
        return Err(Error::NotSquare {
            rows: file.rows,
            cols: file.cols,
        });
    }
    let product = file
        .legs
        .iter()
        .try_fold(1usize, |acc, &l| acc.checked_mul(l))
        .ok_or_else(|| Error::Malformed("leg product overflows".into()))?;
    if file.legs.is_empty() || product != file.rows {
        return Err(Error::LegMismatch {
            legs: file.legs,
            product,
            order: file.rows,
        });
    }
    let expected = file.rows.checked_mul(file.cols).ok_or_else(|| Error::Malformed("size overflows".into()))?;
    if file.data.len() != expected {
        return Err(Error::Malformed(format!("data has {} entries, expected {expected}", file.data.len())));
    }
    let data = file.data.iter().map(|[re, im]| Complex::new(lit(*re), lit(*im))).collect();
    LeggedMatrix::new(file.legs, data)
}

pub fn read_matrix<T: Real>(path: impl AsRef<Path>) -> Result<LeggedMatrix<T>> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn write_matrix<T: Real>(path: impl AsRef<Path>, m: &LeggedMatrix<T>) -> Result<()> {
    fs::write(path, to_matrix_string(m))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::fourier;
    use crate::random::{haar_unitary, seeded};

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let f2 = fourier::<f64>(2).unwrap();
        write_matrix(&path, &f2).unwrap();
        assert_eq!(read_matrix::<f64>(&path).unwrap(), f2);
        let h = haar_unitary::<f64, _>(4, &mut seeded(1)).with_legs(vec![2, 2]).unwrap();
        write_matrix(&path, &h).unwrap();
        assert_eq!(read_matrix::<f64>(&path).unwrap(), h);
    }

    #[test]
    fn distinct_error_codes() {
        let legs = r#"{"legs":[3],"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[1,0]]}"#;
        assert_eq!(parse_matrix::<f64>(legs).unwrap_err().code(), "leg-mismatch");
        let square = r#"{"legs":[2],"rows":2,"cols":3,"data":[]}"#;
        assert_eq!(parse_matrix::<f64>(square).unwrap_err().code(), "non-square");
        let short = r#"{"legs":[2],"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0]]}"#;
        assert_eq!(parse_matrix::<f64>(short).unwrap_err().code(), "malformed");
        assert_eq!(parse_matrix::<f64>("{\"legs\": [2], \"rows\"").unwrap_err().code(), "malformed");
    }

    #[test]
    fn missing_file_is_io() {
        assert_eq!(read_matrix::<f64>("/nonexistent/m.json").unwrap_err().code(), "io");
    }
}
