//! SDPA sparse format (`.dat-s`).
//!
//! A program `min <C,X> s.t. <A_i,X> = b_i, X >= 0` is SDPA's dual side, so it
//! is written with `F0 = -C`, `F_i = A_i` and cost vector `b`. Positive block
//! sizes are PSD blocks, negative ones LP blocks.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use super::program::{svec_index, Cone, ConicProgram, SparseMatrix};
use super::ConicError;

/// Writes `p` in SDPA sparse format.
///
/// Free blocks become LP blocks holding a positive and a negative part.
/// Zero, second-order and rotated blocks have no SDPA form and are rejected.
pub fn write_sdpa(p: &ConicProgram) -> Result<String, ConicError> {
    p.validate()?;
    // where each variable lands: (block, i, j, sign), 1-based
    let mut place: Vec<Vec<(usize, usize, usize, f64)>> = vec![Vec::new(); p.num_vars];
    let mut sizes = Vec::new();
    let mut var = 0;
    for cone in &p.cones {
        let blk = sizes.len() + 1;
        match *cone {
            Cone::Psd(side) => {
                for j in 0..side {
                    for i in 0..=j {
                        place[var + svec_index(i, j)].push((blk, i + 1, j + 1, 1.0));
                    }
                }
                sizes.push(side as i64);
            }
            Cone::NonNeg(k) => {
                for t in 0..k {
                    place[var + t].push((blk, t + 1, t + 1, 1.0));
                }
                sizes.push(-(k as i64));
            }
            Cone::Free(k) => {
                for t in 0..k {
                    place[var + t].push((blk, t + 1, t + 1, 1.0));
                    place[var + t].push((blk, k + t + 1, k + t + 1, -1.0));
                }
                sizes.push(-2 * k as i64);
            }
            other => {
                return Err(ConicError::Unsupported(format!("{} cones have no SDPA representation", other.name())))
            }
        }
        var += cone.dim();
    }

    let mut out = String::new();
    writeln!(out, "{}", p.num_rows()).unwrap();
    writeln!(out, "{}", sizes.len()).unwrap();
    let sz: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
    writeln!(out, "{}", sz.join(" ")).unwrap();
    let b: Vec<String> = p.b.iter().map(|v| format!("{v:?}")).collect();
    writeln!(out, "{}", b.join(" ")).unwrap();

    let mut emit = |mat: usize, coeffs: &mut dyn Iterator<Item = (usize, f64)>, sign: f64| {
        for (c, v) in coeffs {
            for &(blk, i, j, s) in &place[c] {
                let entry = if i == j { v } else { v / SQRT_2 };
                writeln!(out, "{mat} {blk} {i} {j} {:?}", sign * s * entry).unwrap();
            }
        }
    };
    let objective = p.objective.iter().copied().enumerate().filter(|&(_, v)| v != 0.0);
    emit(0, &mut objective.into_iter(), -1.0);
    for (r, (cols, vals)) in p.a.rows().enumerate() {
        emit(r + 1, &mut cols.iter().copied().zip(vals.iter().copied()), 1.0);
    }
    Ok(out)
}

/// Parses SDPA sparse format.
///
/// Leading lines starting with `"` or `*` are comments; `,(){}` count as
/// whitespace, and the rest of a line after a non-numeric token (such as
/// `=mdim`) is ignored. Repeated entries are summed.
pub fn read_sdpa(text: &str) -> Result<ConicProgram, ConicError> {
    let mut tokens = Vec::new();
    let mut header = true;
    for (ln, line) in text.lines().enumerate() {
        let t = line.trim_start();
        if header && (t.starts_with('"') || t.starts_with('*')) {
            continue;
        }
        if !t.is_empty() {
            header = false;
        }
        let cleaned: String = line.chars().map(|c| if ",(){}".contains(c) { ' ' } else { c }).collect();
        let numeric = |tok: &&str| tok.starts_with(|c: char| c.is_ascii_digit() || "+-.".contains(c));
        for tok in cleaned.split_whitespace().take_while(numeric) {
            tokens.push((ln + 1, tok.to_string()));
        }
    }
    let mut it = tokens.into_iter().peekable();
    let last_line = text.lines().count();
    let mut next = |what: &str| -> Result<(usize, String), ConicError> {
        it.next().ok_or_else(|| ConicError::Parse { line: last_line, message: format!("missing {what}") })
    };
    fn parse<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ConicError> {
        tok.parse().map_err(|_| ConicError::Parse { line, message: format!("bad {what} '{tok}'") })
    }

    let (l, t) = next("constraint count")?;
    let m: usize = parse(l, &t, "constraint count")?;
    let (l, t) = next("block count")?;
    let nblocks: usize = parse(l, &t, "block count")?;
    let mut cones = Vec::with_capacity(nblocks);
    for _ in 0..nblocks {
        let (l, t) = next("block size")?;
        let size: i64 = parse(l, &t, "block size")?;
        cones.push(match size {
            s if s > 0 => Cone::Psd(s as usize),
            s if s < 0 => Cone::NonNeg((-s) as usize),
            _ => return Err(ConicError::Parse { line: l, message: "block size 0".into() }),
        });
    }
    let mut b = Vec::with_capacity(m);
    for _ in 0..m {
        let (l, t) = next("cost vector entry")?;
        let v: f64 = parse(l, &t, "cost vector entry")?;
        b.push(v);
    }
    let offsets: Vec<usize> = cones
        .iter()
        .scan(0, |acc, c| {
            let o = *acc;
            *acc += c.dim();
            Some(o)
        })
        .collect();
    let num_vars: usize = cones.iter().map(Cone::dim).sum();

    let mut objective = vec![0.0; num_vars];
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); m];
    loop {
        let Ok((l, t)) = next("") else { break };
        let mat: usize = parse(l, &t, "matrix number")?;
        let mut field = |what: &str| -> Result<(usize, String), ConicError> {
            let (l2, t2) = next(what)?;
            if l2 != l {
                return Err(ConicError::Parse { line: l, message: format!("entry line is missing its {what}") });
            }
            Ok((l2, t2))
        };
        let (_, tb) = field("block number")?;
        let (_, ti) = field("row index")?;
        let (_, tj) = field("column index")?;
        let (_, tv) = field("value")?;
        let blk: usize = parse(l, &tb, "block number")?;
        let i: usize = parse(l, &ti, "row index")?;
        let j: usize = parse(l, &tj, "column index")?;
        let v: f64 = parse(l, &tv, "value")?;
        if !v.is_finite() {
            return Err(ConicError::Parse { line: l, message: "non-finite value".into() });
        }
        if mat > m {
            return Err(ConicError::Parse { line: l, message: format!("matrix {mat} beyond {m} constraints") });
        }
        if blk == 0 || blk > nblocks {
            return Err(ConicError::Parse { line: l, message: format!("block {blk} out of range") });
        }
        let cone = cones[blk - 1];
        let (var, coeff) = match cone {
            Cone::Psd(side) => {
                if i == 0 || j == 0 || i > side || j > side {
                    return Err(ConicError::Parse { line: l, message: format!("index ({i},{j}) outside block") });
                }
                let c = if i == j { v } else { v * SQRT_2 };
                (offsets[blk - 1] + svec_index(i - 1, j - 1), c)
            }
            Cone::NonNeg(k) => {
                if i != j || i == 0 || i > k {
                    return Err(ConicError::Parse { line: l, message: format!("LP block entry ({i},{j}) is not diagonal") });
                }
                (offsets[blk - 1] + i - 1, v)
            }
            _ => unreachable!(),
        };
        if mat == 0 {
            objective[var] -= coeff;
        } else {
            *rows[mat - 1].entry(var).or_insert(0.0) += coeff;
        }
    }
    let a = SparseMatrix::from_rows(num_vars, rows.into_iter().map(|r| r.into_iter().collect()).collect())?;
    ConicProgram::new(objective, a, b, cones)
}
