//! Line-oriented algebra files.
//!
//! ```text
//! # comment
//! dim 4
//! milnor 0 0 1 1          # or: bracket <i> <j> <k> <p/q>, repeated
//! sigma 2 3 4 1           # optional, milnor only
//! metric                  # optional, followed by dim rows
//! 1 0 0 0
//! ...
//! ```
//! Indices are 1-based in files and 0-based in the library.

use serde_json::{json, Value};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::geometry::is_positive_definite;
use crate::linalg::Matrix;
use crate::milnor::{build_general, MilnorData};
use crate::scalar::{parse_rational, Rational};

/// Parsed contents of an algebra file.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraFile {
    pub dim: usize,
    pub milnor: Option<MilnorData>,
    /// `((i, j, k), value)`, 0-based, in file order; `c^k_ij += value`.
    pub brackets: Vec<((usize, usize, usize), Rational)>,
    pub metric: Option<Matrix>,
    pub warnings: Vec<String>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_index(tok: &str, dim: usize, line: usize) -> Result<usize> {
    let i: usize = tok
        .parse()
        .map_err(|_| err(line, format!("not a basis index: {tok:?}")))?;
    if i == 0 || i > dim {
        return Err(err(line, format!("index {i} outside 1..{dim}")));
    }
    Ok(i - 1)
}

fn parse_rationals(toks: &[&str], line: usize) -> Result<Vec<Rational>> {
    toks.iter()
        .map(|t| parse_rational(t).map_err(|e| err(line, e.to_string())))
        .collect()
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut lambdas: Option<Vec<Rational>> = None;
        let mut sigma: Option<(usize, Vec<usize>)> = None;
        let mut brackets = Vec::new();
        let mut metric_rows: Option<Vec<Vec<Rational>>> = None;
        let mut metric_line = 0;
        let mut warnings = Vec::new();

        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        while let Some((no, line)) = lines.next() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let keyword = toks[0];
            let args = &toks[1..];
            if keyword != "dim" && dim.is_none() {
                return Err(err(no, format!("`{keyword}` before `dim`")));
            }
            match keyword {
                "dim" => {
                    if dim.is_some() {
                        return Err(err(no, "duplicate `dim`"));
                    }
                    let [n] = args else {
                        return Err(err(no, "`dim` takes one argument"));
                    };
                    let n: usize = n
                        .parse()
                        .map_err(|_| err(no, format!("not a dimension: {n:?}")))?;
                    if n == 0 {
                        return Err(err(no, "dimension must be positive"));
                    }
                    dim = Some(n);
                }
                "milnor" => {
                    let n = dim.unwrap_or_default();
                    if lambdas.is_some() {
                        return Err(err(no, "duplicate `milnor`"));
                    }
                    if !brackets.is_empty() {
                        return Err(err(no, "`milnor` and `bracket` cannot be combined"));
                    }
                    if args.len() != n {
                        return Err(err(
                            no,
                            format!("expected {n} constants, found {}", args.len()),
                        ));
                    }
                    lambdas = Some(parse_rationals(args, no)?);
                }
                "sigma" => {
                    let n = dim.unwrap_or_default();
                    if sigma.is_some() {
                        return Err(err(no, "duplicate `sigma`"));
                    }
                    if args.len() != n {
                        return Err(err(
                            no,
                            format!("expected {n} images, found {}", args.len()),
                        ));
                    }
                    let images = args
                        .iter()
                        .map(|t| parse_index(t, n, no))
                        .collect::<Result<Vec<_>>>()?;
                    sigma = Some((no, images));
                }
                "bracket" => {
                    let n = dim.unwrap_or_default();
                    if lambdas.is_some() {
                        return Err(err(no, "`milnor` and `bracket` cannot be combined"));
                    }
                    let [i, j, k, v] = args else {
                        return Err(err(no, "`bracket` takes i j k value"));
                    };
                    let (i, j, k) = (
                        parse_index(i, n, no)?,
                        parse_index(j, n, no)?,
                        parse_index(k, n, no)?,
                    );
                    if i >= j {
                        return Err(err(
                            no,
                            format!("bracket requires i < j, got {} {}", i + 1, j + 1),
                        ));
                    }
                    let v = parse_rational(v).map_err(|e| err(no, e.to_string()))?;
                    brackets.push(((i, j, k), v));
                }
                "metric" => {
                    let n = dim.unwrap_or_default();
                    if metric_rows.is_some() {
                        return Err(err(no, "duplicate `metric`"));
                    }
                    if !args.is_empty() {
                        return Err(err(no, "`metric` takes no arguments; rows follow"));
                    }
                    metric_line = no;
                    let mut rows = Vec::with_capacity(n);
                    for r in 0..n {
                        let (row_no, row) = lines
                            .next()
                            .ok_or_else(|| err(no, format!("metric ends after {r} of {n} rows")))?;
                        let toks: Vec<&str> = row.split_whitespace().collect();
                        if toks.len() != n {
                            return Err(err(
                                row_no,
                                format!("metric row has {} entries, expected {n}", toks.len()),
                            ));
                        }
                        rows.push(parse_rationals(&toks, row_no)?);
                    }
                    metric_rows = Some(rows);
                }
                other => return Err(err(no, format!("unknown directive `{other}`"))),
            }
        }

        let dim = dim.ok_or_else(|| Error::InvalidArgument("missing `dim`".into()))?;
        if lambdas.is_none() && brackets.is_empty() {
            return Err(Error::InvalidArgument(
                "need a `milnor` line or `bracket` lines".into(),
            ));
        }
        let milnor = match (lambdas, sigma) {
            (Some(l), None) => Some(MilnorData::cyclic(l)?),
            (Some(l), Some((no, s))) => {
                Some(MilnorData::with_sigma(l, s).map_err(|e| err(no, e.to_string()))?)
            }
            (None, Some((no, _))) => return Err(err(no, "`sigma` requires a `milnor` line")),
            (None, None) => None,
        };
        let metric = match metric_rows {
            Some(rows) => {
                let m = Matrix::from_rows(rows).expect("square rows");
                if !m.is_symmetric() {
                    return Err(err(metric_line, "metric is not symmetric"));
                }
                if !is_positive_definite(&m) {
                    warnings.push("metric is not positive definite".to_string());
                }
                Some(m)
            }
            None => None,
        };
        Ok(Self {
            dim,
            milnor,
            brackets,
            metric,
            warnings,
        })
    }

    /// The algebra in the declared basis. No Jacobi check.
    pub fn algebra(&self) -> Result<LieAlgebra> {
        match &self.milnor {
            Some(d) => Ok(build_general(d)?.0),
            None => LieAlgebra::from_structure_constants(self.dim, self.brackets.iter().cloned()),
        }
    }

    /// Input echo for reports, 1-based.
    pub fn echo(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("dim".into(), json!(self.dim));
        if let Some(d) = &self.milnor {
            obj.insert("milnor".into(), json!(rationals(d.lambdas())));
            if let Some(s) = d.sigma() {
                obj.insert(
                    "sigma".into(),
                    json!(s.iter().map(|i| i + 1).collect::<Vec<_>>()),
                );
            }
        } else {
            let entries: Vec<Value> = self
                .brackets
                .iter()
                .map(|((i, j, k), v)| json!([i + 1, j + 1, k + 1, v.to_string()]))
                .collect();
            obj.insert("brackets".into(), Value::Array(entries));
        }
        if let Some(m) = &self.metric {
            obj.insert("metric".into(), matrix_json(m));
        }
        Value::Object(obj)
    }

    /// File text in the input grammar.
    pub fn render(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        let join = |v: &[Rational]| {
            v.iter()
                .map(Rational::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        if let Some(d) = &self.milnor {
            out += &format!("milnor {}\n", join(d.lambdas()));
            if let Some(s) = d.sigma() {
                let s: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
                out += &format!("sigma {}\n", s.join(" "));
            }
        }
        for ((i, j, k), v) in &self.brackets {
            out += &format!("bracket {} {} {} {v}\n", i + 1, j + 1, k + 1);
        }
        if let Some(m) = &self.metric {
            out += "metric\n";
            for r in 0..m.rows() {
                out += &join(m.row(r));
                out.push('\n');
            }
        }
        out
    }
}

pub fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(Rational::to_string).collect()
}

pub fn matrix_json(m: &Matrix) -> Value {
    json!((0..m.rows())
        .map(|r| rationals(m.row(r)))
        .collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn milnor_with_metric() {
        let f = AlgebraFile::parse(
            "# h3\ndim 3\nmilnor 0 0 1\n\nmetric\n1 0 0\n0 1 0 # row two\n0 0 1\n",
        )
        .unwrap();
        assert_eq!(f.dim, 3);
        assert_eq!(f.metric, Some(Matrix::identity(3)));
        assert!(f.warnings.is_empty());
        assert_eq!(*f.algebra().unwrap().structure_constant(0, 1, 2), int(1));
    }

    #[test]
    fn bracket_lines_accumulate() {
        let f = AlgebraFile::parse("dim 2\nbracket 1 2 2 1/2\nbracket 1 2 2 1/2\n").unwrap();
        assert_eq!(f.algebra().unwrap().structure_constant(0, 1, 1), &int(1));
        assert_eq!(f.brackets[0].1, rat(1, 2));
    }

    #[test]
    fn sigma_is_one_based() {
        let f = AlgebraFile::parse("dim 4\nmilnor 0 0 1 0\nsigma 2 3 1 4\n").unwrap();
        assert_eq!(f.milnor.unwrap().sigma(), Some(&[1, 2, 0, 3][..]));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let line = |text: &str| match AlgebraFile::parse(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line("dim 3\ndim 3\n"), 2);
        assert_eq!(line("dim 3\n\nbracket 2 1 3 1\n"), 3);
        assert_eq!(line("dim 2\nbracket 1 2 2 1\nmetric\n1 1\n0 1\n"), 3);
        assert_eq!(line("dim 3\nmilnor 0 x 1\n"), 2);
        assert_eq!(line("milnor 0 0 1\n"), 1);
        assert_eq!(line("dim 3\nmilnor 0 0 1\nbracket 1 2 3 1\n"), 3);
        assert_eq!(line("dim 3\nfoo\n"), 2);
        assert_eq!(line("dim 3\nmilnor 0 0 1\nmetric\n1 0 0\n"), 3);
        assert_eq!(line("dim 3\nmilnor 0 0 1/0\n"), 2);
    }

    #[test]
    fn indefinite_metric_is_a_warning() {
        let f = AlgebraFile::parse("dim 2\nbracket 1 2 2 1\nmetric\n1 2\n2 1\n").unwrap();
        assert_eq!(
            f.warnings,
            vec!["metric is not positive definite".to_string()]
        );
    }

    #[test]
    fn render_round_trips() {
        let text = "dim 4\nmilnor 0 0 1/2 -3\nsigma 2 3 4 1\nmetric\n1 0 0 0\n0 2 1/3 0\n0 1/3 1 0\n0 0 0 1\n";
        let f = AlgebraFile::parse(text).unwrap();
        assert_eq!(f.render(), text);
        assert_eq!(AlgebraFile::parse(&f.render()).unwrap(), f);
    }
}
