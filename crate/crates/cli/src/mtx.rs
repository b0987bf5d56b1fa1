//! Matrix Market files for matrices and one-value-per-line text for
//! vectors. Complex values are written as `re im` pairs; real files are
//! accepted wherever complex ones are.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use structbe::{CMatrix, CVector, Complex64};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

fn parse_err(path: &Path, line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}:{line}: {msg}", path.display()))
}

fn number(path: &Path, line: usize, tok: &str) -> Result<f64, CliError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(path, line, format!("bad number '{tok}'")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

fn value(path: &Path, line: usize, field: Field, toks: &[&str]) -> Result<Complex64, CliError> {
    let want = match field {
        Field::Complex => 2,
        Field::Pattern => 0,
        _ => 1,
    };
    if toks.len() != want {
        return Err(parse_err(
            path,
            line,
            format!("expected {want} value(s), got {}", toks.len()),
        ));
    }
    Ok(match field {
        Field::Pattern => Complex64::new(1.0, 0.0),
        Field::Complex => {
            Complex64::new(number(path, line, toks[0])?, number(path, line, toks[1])?)
        }
        _ => Complex64::new(number(path, line, toks[0])?, 0.0),
    })
}

pub fn read_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let head: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if head.len() != 5 || head[0] != "%%matrixmarket" || head[1] != "matrix" {
        return Err(parse_err(path, 1, "missing '%%MatrixMarket matrix' header"));
    }
    let coordinate = match head[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(parse_err(path, 1, format!("unsupported format '{other}'"))),
    };
    let field = match head[3].as_str() {
        "real" | "double" => Field::Real,
        "complex" => Field::Complex,
        "integer" => Field::Integer,
        "pattern" if coordinate => Field::Pattern,
        other => return Err(parse_err(path, 1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match head[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => {
            return Err(parse_err(
                path,
                1,
                format!("unsupported symmetry '{other}'"),
            ))
        }
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body
        .next()
        .ok_or_else(|| parse_err(path, 2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| parse_err(path, size_line, format!("bad size '{t}'")))
        })
        .collect::<Result<_, _>>()?;
    let (rows, cols) = match (coordinate, dims.as_slice()) {
        (true, [r, c, _]) | (false, [r, c]) => (*r, *c),
        _ => return Err(parse_err(path, size_line, "malformed size line")),
    };
    if symmetry != Symmetry::General && rows != cols {
        return Err(parse_err(
            path,
            size_line,
            "symmetric storage needs a square matrix",
        ));
    }
    let mut mat = CMatrix::zeros(rows, cols);
    let mirror = |mat: &mut CMatrix, i: usize, j: usize, v: Complex64| {
        if i != j {
            mat[(j, i)] = match symmetry {
                Symmetry::General => return,
                Symmetry::Symmetric => v,
                Symmetry::SkewSymmetric => -v,
                Symmetry::Hermitian => v.conj(),
            };
        }
    };

    if coordinate {
        let nnz = dims[2];
        let mut seen = 0;
        for (ln, line) in body {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(parse_err(path, ln, "expected 'row col value'"));
            }
            let idx = |t: &str, bound: usize| -> Result<usize, CliError> {
                match t.parse::<usize>() {
                    Ok(k) if (1..=bound).contains(&k) => Ok(k - 1),
                    _ => Err(parse_err(
                        path,
                        ln,
                        format!("index '{t}' out of range 1..={bound}"),
                    )),
                }
            };
            let (i, j) = (idx(toks[0], rows)?, idx(toks[1], cols)?);
            let v = value(path, ln, field, &toks[2..])?;
            mat[(i, j)] += v;
            mirror(&mut mat, i, j, v);
            seen += 1;
        }
        if seen != nnz {
            return Err(parse_err(
                path,
                size_line,
                format!("declared {nnz} entries, found {seen}"),
            ));
        }
    } else {
        // column-major; symmetric storage lists the lower triangle only
        let slots: Vec<(usize, usize)> = (0..cols)
            .flat_map(|j| (0..rows).map(move |i| (i, j)))
            .filter(|&(i, j)| match symmetry {
                Symmetry::General => true,
                Symmetry::SkewSymmetric => i > j,
                _ => i >= j,
            })
            .collect();
        let mut count = 0;
        for (ln, line) in body {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let &(i, j) = slots
                .get(count)
                .ok_or_else(|| parse_err(path, ln, "too many entries"))?;
            let v = value(path, ln, field, &toks)?;
            mat[(i, j)] = v;
            mirror(&mut mat, i, j, v);
            count += 1;
        }
        if count != slots.len() {
            return Err(parse_err(
                path,
                size_line,
                format!("expected {} entries, found {count}", slots.len()),
            ));
        }
    }
    Ok(mat)
}

fn is_real(values: impl IntoIterator<Item = Complex64>) -> bool {
    values.into_iter().all(|v| v.im == 0.0)
}

/// Coordinate format listing the nonzero entries. Values use the shortest
/// representation that reads back to the same `f64`.
pub fn write_matrix(path: &Path, mat: &CMatrix) -> Result<(), CliError> {
    let real = is_real(mat.iter().copied());
    let mut out = format!(
        "%%MatrixMarket matrix coordinate {} general\n",
        if real { "real" } else { "complex" }
    );
    let nonzeros: Vec<(usize, usize, Complex64)> = (0..mat.ncols())
        .flat_map(|j| (0..mat.nrows()).map(move |i| (i, j)))
        .map(|(i, j)| (i, j, mat[(i, j)]))
        .filter(|(_, _, v)| v.norm() != 0.0)
        .collect();
    writeln!(out, "{} {} {}", mat.nrows(), mat.ncols(), nonzeros.len()).unwrap();
    for (i, j, v) in nonzeros {
        if real {
            writeln!(out, "{} {} {:e}", i + 1, j + 1, v.re).unwrap();
        } else {
            writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im).unwrap();
        }
    }
    fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// One value per line, `re` or `re im`; blank lines and `#` comments are
/// skipped.
pub fn read_vector(path: &Path) -> Result<CVector, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let field = if toks.len() == 2 {
            Field::Complex
        } else {
            Field::Real
        };
        values.push(value(path, i + 1, field, &toks)?);
    }
    Ok(CVector::from_vec(values))
}

pub fn write_vector(path: &Path, v: &CVector) -> Result<(), CliError> {
    let real = is_real(v.iter().copied());
    let mut out = String::new();
    for z in v.iter() {
        if real {
            writeln!(out, "{:e}", z.re).unwrap();
        } else {
            writeln!(out, "{:e} {:e}", z.re, z.im).unwrap();
        }
    }
    fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
