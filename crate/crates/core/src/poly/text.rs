//! Line-oriented polynomial text format.
//!
//! ```text
//! # Motzkin polynomial
//! vars 2 degree 6
//! 1 4 2
//! 1 2 4
//! -3 2 2
//! 1 0 0
//! ```
//!
//! The header `vars n degree 2d` comes first; every other non-comment line is
//! `coefficient e1 ... en`. Coefficients are written in shortest round-trip
//! form, so `parse(write(p)) == p` bit for bit.

use std::fmt::Write as _;

use super::{Exponent, PolyError, Polynomial};

pub fn write_polynomial(p: &Polynomial) -> String {
    let mut out = String::new();
    writeln!(out, "vars {} degree {}", p.n(), p.degree()).unwrap();
    for (e, c) in p.terms() {
        write!(out, "{c:?}").unwrap();
        for a in e.powers() {
            write!(out, " {a}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_polynomial(text: &str) -> Result<Polynomial, PolyError> {
    let mut header: Option<(usize, u32)> = None;
    let mut poly: Option<Polynomial> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| PolyError::Parse { line: line_no, message };
        let fields: Vec<&str> = line.split_whitespace().collect();

        let Some((n, degree)) = header else {
            if fields.len() != 4 || fields[0] != "vars" || fields[2] != "degree" {
                return Err(err(format!("expected header `vars n degree 2d`, found `{line}`")));
            }
            let n: usize = fields[1].parse().map_err(|_| err(format!("bad variable count `{}`", fields[1])))?;
            let degree: u32 = fields[3].parse().map_err(|_| err(format!("bad degree `{}`", fields[3])))?;
            if n == 0 {
                return Err(err("variable count must be positive".into()));
            }
            header = Some((n, degree));
            poly = Some(Polynomial::zero(n));
            continue;
        };

        if fields.len() != n + 1 {
            return Err(err(format!("expected {} fields, found {}", n + 1, fields.len())));
        }
        let coefficient: f64 = fields[0].parse().map_err(|_| err(format!("bad coefficient `{}`", fields[0])))?;
        if !coefficient.is_finite() {
            return Err(err("coefficient must be finite".into()));
        }
        let powers = fields[1..]
            .iter()
            .map(|f| f.parse::<u32>().map_err(|_| err(format!("bad exponent `{f}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let e = Exponent::new(powers);
        if e.degree() > degree {
            return Err(err(format!("term {e} exceeds declared degree {degree}")));
        }
        let p = poly.as_mut().expect("set with header");
        if p.coefficient(&e) != 0.0 {
            return Err(err(format!("duplicate term {e}")));
        }
        p.add_term(e, coefficient);
    }

    poly.ok_or(PolyError::Parse { line: 0, message: "missing `vars n degree 2d` header".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_motzkin() {
        let src = "# Motzkin\nvars 2 degree 6\n1 4 2\n1 2 4\n-3 2 2 # middle\n1 0 0\n";
        let p = parse_polynomial(src).unwrap();
        assert_eq!(p.n(), 2);
        assert_eq!(p.degree(), 6);
        assert_eq!(p.eval(&[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn reports_line_numbers() {
        let src = "vars 2 degree 4\n1 4 0\n1 0\n";
        match parse_polynomial(src) {
            Err(PolyError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_polynomial("1 2 3\n"), Err(PolyError::Parse { line: 1, .. })));
        assert!(matches!(parse_polynomial("vars 1 degree 2\n1 3\n"), Err(PolyError::Parse { line: 2, .. })));
        assert!(matches!(parse_polynomial("vars 1 degree 2\n1 1\n2 1\n"), Err(PolyError::Parse { line: 3, .. })));
        assert!(matches!(parse_polynomial("# nothing\n"), Err(PolyError::Parse { line: 0, .. })));
    }

    proptest! {
        #[test]
        fn write_parse_round_trip_is_bit_exact(
            n in 1usize..4,
            raw in proptest::collection::vec((any::<f64>(), proptest::collection::vec(0u32..4, 3)), 0..12),
        ) {
            let terms = raw.into_iter()
                .filter(|(c, _)| c.is_finite())
                .map(|(c, e)| (Exponent::new(e[..n].to_vec()), c));
            let mut p = Polynomial::zero(n);
            for (e, c) in terms {
                if p.coefficient(&e) == 0.0 {
                    p.add_term(e, c);
                }
            }
            let back = parse_polynomial(&write_polynomial(&p)).unwrap();
            prop_assert_eq!(back.len(), p.len());
            for ((ea, ca), (eb, cb)) in p.terms().zip(back.terms()) {
                prop_assert_eq!(ea, eb);
                prop_assert_eq!(ca.to_bits(), cb.to_bits());
            }
        }
    }
}
