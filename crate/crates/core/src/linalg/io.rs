//! Matrix file formats.
//!
//! JSON: `{"dim": n, "re": [[..n..] x n], "im": [[..n..] x n]}`; `im` may be
//! omitted for real matrices. A bare array of rows is accepted as well,
//! each cell a number, a `[re, im]` pair or a complex literal string:
//! `[[1, 0], [0, "2+i"]]`.
//!
//! CSV: one matrix row per line, comma separated, no header. Each cell is a
//! complex literal:
//!
//! ```text
//! cell    := ws? (real | imag | real sign imag) ws?
//! real    := float
//! imag    := float? "i"          e.g. "i", "-i", "2.5i", "1e-3i"
//! sign    := "+" | "-"
//! float   := [+-]? digits ("." digits?)? ([eE] [+-]? digits)?
//! ```
//!
//! so `1`, `-2.5`, `3i`, `1+2i`, `0.5-1e-3i` are all accepted.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, C64};

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonCell {
    Real(f64),
    Pair([f64; 2]),
    Literal(String),
}

impl ComplexMatrix {
    fn to_repr(&self) -> MatrixRepr {
        let n = self.dim();
        let re = (0..n).map(|i| (0..n).map(|j| self[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| self[(i, j)].im).collect()).collect();
        MatrixRepr {
            dim: n,
            re,
            im: Some(im),
        }
    }

    fn from_repr(r: MatrixRepr) -> Result<Self> {
        let n = r.dim;
        let check = |part: &Vec<Vec<f64>>, name: &str| -> Result<()> {
            if part.len() != n {
                return Err(Error::Parse(format!(
                    "\"{name}\" has {} rows, expected {n}",
                    part.len()
                )));
            }
            if let Some((i, row)) = part.iter().enumerate().find(|(_, row)| row.len() != n) {
                return Err(Error::Parse(format!(
                    "\"{name}\" row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            Ok(())
        };
        check(&r.re, "re")?;
        if let Some(im) = &r.im {
            check(im, "im")?;
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let im = r.im.as_ref().map_or(0.0, |m| m[i][j]);
                data.push(C64::new(r.re[i][j], im));
            }
        }
        ComplexMatrix::from_vec(n, data)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if value.is_array() {
            let rows: Vec<Vec<JsonCell>> =
                serde_json::from_value(value).map_err(|e| Error::Parse(format!("matrix rows: {e}")))?;
            let rows = rows
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|cell| match cell {
                            JsonCell::Real(re) => Ok(C64::new(re, 0.0)),
                            JsonCell::Pair([re, im]) => Ok(C64::new(re, im)),
                            JsonCell::Literal(lit) => parse_complex(&lit).map_err(Error::Parse),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            return ComplexMatrix::from_rows(rows);
        }
        let repr: MatrixRepr = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_repr(repr)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_repr()).expect("matrix serializes")
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| parse_complex(cell).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        ComplexMatrix::from_rows(rows)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|z| format_complex(*z)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        ComplexMatrix::from_repr(repr).map_err(D::Error::custom)
    }
}

/// `a+bi` form with full round-trip precision.
pub fn format_complex(z: C64) -> String {
    if z.im.is_sign_negative() {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

/// Parses one complex literal per the grammar in the module docs.
pub fn parse_complex(cell: &str) -> std::result::Result<C64, String> {
    let s: String = cell.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty cell".into());
    }
    let Some(body) = s.strip_suffix('i') else {
        return parse_float(&s).map(|re| C64::new(re, 0.0));
    };
    // split at the last sign that is not the leading one and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() { 0.0 } else { parse_float(re_part)? };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_float(other)?,
    };
    Ok(C64::new(re, im))
}

fn parse_float(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("invalid number {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number {s:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::c64;

    #[test]
    fn complex_literals() {
        let cases = [
            ("1", c64(1.0, 0.0)),
            ("-2.5", c64(-2.5, 0.0)),
            ("3i", c64(0.0, 3.0)),
            ("i", c64(0.0, 1.0)),
            ("-i", c64(0.0, -1.0)),
            ("1+2i", c64(1.0, 2.0)),
            ("0.5-1e-3i", c64(0.5, -1e-3)),
            ("1e-2+1e+2i", c64(1e-2, 1e2)),
            (" 2 - i ", c64(2.0, -1.0)),
            ("-1-i", c64(-1.0, -1.0)),
        ];
        for (s, z) in cases {
            assert_eq!(parse_complex(s).unwrap(), z, "{s}");
        }
        for bad in ["", "abc", "1+2", "1+xi", "inf"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn json_matrix() {
        let m = ComplexMatrix::from_json_str(r#"{"dim":2,"re":[[1,0],[0,2]],"im":[[0,0],[0,1]]}"#).unwrap();
        assert_eq!(m[(1, 1)], c64(2.0, 1.0));
        let real = ComplexMatrix::from_json_str(r#"{"dim":2,"re":[[0,8],[2,0]]}"#).unwrap();
        assert_eq!(real[(0, 1)], c64(8.0, 0.0));
        assert!(ComplexMatrix::from_json_str(r#"{"dim":2,"re":[[1,0]]}"#).is_err());
        let rows = ComplexMatrix::from_json_str(r#"[[1, 0], [[0.5, -1], "2+i"]]"#).unwrap();
        assert_eq!(rows[(1, 0)], c64(0.5, -1.0));
        assert_eq!(rows[(1, 1)], c64(2.0, 1.0));
        assert!(ComplexMatrix::from_json_str(r#"[[1, 0], [0]]"#).is_err());
        assert!(ComplexMatrix::from_json_str(r#"[[1, "x"], [0, 1]]"#).is_err());
        assert!(ComplexMatrix::from_json_str(r#"{"dim":2,"re":[[1,0],[0]]}"#).is_err());
    }

    #[test]
    fn csv_matrix() {
        let m = ComplexMatrix::from_csv_str("# H\n1, 0\n0, 2+i\n").unwrap();
        assert_eq!(m[(1, 1)], c64(2.0, 1.0));
        assert!(ComplexMatrix::from_csv_str("1,2\n3\n").is_err());
    }

    #[test]
    fn text_round_trips() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c64(0.1, -0.2), c64(1.0 / 3.0, 1e-300)],
            vec![c64(-7.0, 0.0), c64(2.0f64.sqrt(), -0.0)],
        ])
        .unwrap();
        assert_eq!(ComplexMatrix::from_json_str(&m.to_json_string()).unwrap(), m);
        assert_eq!(ComplexMatrix::from_csv_str(&m.to_csv_string()).unwrap(), m);
    }
}
