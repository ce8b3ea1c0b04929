//! Text format for truncated q-expansions, version 1.
//!
//! ```text
//! eisencong-qexp 1
//! field Q(zeta9)+
//! poly 1 -3 0 1
//! exponent-ideal 1 | 1 0 0 | 0 1 0 | 0 0 1
//! trace-bound 30
//! weight 2
//! level <9 0 0; 0 9 0; 0 0 9>
//! phi zeta9:units:k2
//! terms 2
//! 1 0 0 = 6
//! 2 -1 1/3 = -12
//! end
//! ```
//!
//! `poly` is the defining polynomial of a monogenic field, low degree
//! first. `exponent-ideal` is the denominator followed by the Hermite rows.
//! Each term lists the exponent's coordinates on the power basis, then its
//! coefficient. Terms are written in the order of the map, so equal
//! expansions serialize identically.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use eisencong_core::arith::{Int, Rat};
use eisencong_core::eisenstein::{ExpansionMeta, QExpansion};
use eisencong_core::nf::FieldOrder;

use crate::CliError;

pub const MAGIC: &str = "eisencong-qexp";
pub const VERSION: u32 = 1;

fn err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Format(format!("q-expansion line {line}: {msg}"))
}

pub fn write(e: &QExpansion, k: &FieldOrder) -> Result<String, CliError> {
    if e.order_id != k.id() {
        return Err(CliError::Format(format!("expansion over {} written with field {}", e.field, k.label())));
    }
    if !k.is_monogenic() {
        return Err(CliError::Format(format!("{} has no power integral basis", k.label())));
    }
    let mut s = String::new();
    let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(" ");
    writeln!(s, "{MAGIC} {VERSION}").unwrap();
    writeln!(s, "field {}", e.field).unwrap();
    writeln!(s, "poly {}", join(&mut k.min_poly().iter().map(|c| c.to_string()))).unwrap();
    let mut ideal = e.exponent_ideal.denom.to_string();
    for r in &e.exponent_ideal.hnf {
        ideal.push_str(" | ");
        ideal.push_str(&join(&mut r.iter().map(|x| x.to_string())));
    }
    writeln!(s, "exponent-ideal {ideal}").unwrap();
    writeln!(s, "trace-bound {}", e.trace_bound).unwrap();
    writeln!(s, "weight {}", e.meta.weight).unwrap();
    writeln!(s, "level {}", e.meta.level).unwrap();
    writeln!(s, "phi {}", e.meta.phi).unwrap();
    writeln!(s, "terms {}", e.coeffs.len()).unwrap();
    for (xi, c) in &e.coeffs {
        writeln!(s, "{} = {c}", join(&mut xi.coords.iter().map(|x| x.to_string()))).unwrap();
    }
    writeln!(s, "end").unwrap();
    Ok(s)
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    no: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str, CliError> {
        for (i, l) in self.it.by_ref() {
            self.no = i + 1;
            let l = l.trim();
            if !l.is_empty() && !l.starts_with('#') {
                return Ok(l);
            }
        }
        Err(err(self.no + 1, "unexpected end of input"))
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str, CliError> {
        let l = self.next()?;
        match l.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest.trim()),
            _ if l == key => Ok(""),
            _ => Err(err(self.no, format!("expected `{key}`"))),
        }
    }
}

fn parse_list<T: FromStr>(s: &str, line: usize) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    s.split_whitespace().map(|w| w.parse::<T>().map_err(|e| err(line, format!("{w}: {e}")))).collect()
}

/// Parses a q-expansion and rebuilds its (monogenic) field.
pub fn read(text: &str) -> Result<(FieldOrder, QExpansion), CliError> {
    let mut ls = Lines { it: text.lines().enumerate(), no: 0 };
    let head = ls.next()?;
    let version = head.strip_prefix(MAGIC).map(str::trim).ok_or_else(|| err(ls.no, "not a q-expansion file"))?;
    if version != VERSION.to_string() {
        return Err(err(ls.no, format!("unsupported version {version}")));
    }
    let field = ls.keyed("field")?.to_string();
    let poly_s = ls.keyed("poly")?;
    let poly: Vec<i64> = parse_list(poly_s, ls.no)?;
    let k = FieldOrder::monogenic(&field, &poly).map_err(|e| err(ls.no, e))?;
    let n = k.degree();

    let ideal_s = ls.keyed("exponent-ideal")?;
    let no = ls.no;
    let mut parts = ideal_s.split('|');
    let denom: Int = parts.next().unwrap_or("").trim().parse().map_err(|e| err(no, format!("denominator: {e}")))?;
    let int_rows: Vec<Vec<Int>> = parts
        .map(|r| {
            let v: Vec<Int> = parse_list(r, no)?;
            if v.len() != n {
                return Err(err(no, format!("ideal row of length {} in degree {n}", v.len())));
            }
            Ok(v)
        })
        .collect::<Result<_, _>>()?;
    if int_rows.len() != n {
        return Err(err(no, format!("{} ideal rows in degree {n}", int_rows.len())));
    }
    let rows: Vec<Vec<Rat>> =
        int_rows.iter().map(|r| r.iter().map(|x| Rat::new(x.clone(), denom.clone())).collect()).collect();
    let ideal = k.ideal_from_rows(&rows).map_err(|e| err(no, e))?;
    if ideal.denom != denom || ideal.hnf != int_rows {
        return Err(err(no, "exponent ideal is not in canonical form"));
    }

    let tb_s = ls.keyed("trace-bound")?;
    let trace_bound: Rat = tb_s.parse().map_err(|e| err(ls.no, format!("{tb_s}: {e}")))?;
    let w_s = ls.keyed("weight")?;
    let weight: u32 = w_s.parse().map_err(|e| err(ls.no, format!("{w_s}: {e}")))?;
    let level = ls.keyed("level")?.to_string();
    let phi = ls.keyed("phi")?.to_string();
    let t_s = ls.keyed("terms")?;
    let count: usize = t_s.parse().map_err(|e| err(ls.no, format!("{t_s}: {e}")))?;

    let mut coeffs = BTreeMap::new();
    for _ in 0..count {
        let l = ls.next()?;
        let (xs, c) = l.split_once('=').ok_or_else(|| err(ls.no, "expected `coords = coefficient`"))?;
        let coords: Vec<Rat> = parse_list(xs, ls.no)?;
        if coords.len() != n {
            return Err(err(ls.no, format!("{} coordinates in degree {n}", coords.len())));
        }
        let c: Int = c.trim().parse().map_err(|e| err(ls.no, format!("coefficient: {e}")))?;
        let xi = k.element(coords);
        if !k.ideal_contains(&ideal, &xi).map_err(|e| err(ls.no, e))? {
            return Err(err(ls.no, "exponent outside the exponent ideal"));
        }
        if coeffs.insert(xi, c).is_some() {
            return Err(err(ls.no, "repeated exponent"));
        }
    }
    if ls.next()? != "end" {
        return Err(err(ls.no, "expected `end`"));
    }
    let meta = ExpansionMeta { weight, level, phi };
    let mut e = QExpansion::empty(&k, ideal, trace_bound, meta);
    e.coeffs = coeffs;
    Ok((k, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (FieldOrder, QExpansion) {
        let k = FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap();
        let meta = ExpansionMeta { weight: 2, level: "<9 0 0; 0 9 0; 0 0 9>".into(), phi: "test".into() };
        let ideal = k.ideal_scale(&k.unit_ideal(), &Rat::new(1.into(), 3.into())).unwrap();
        let mut e = QExpansion::empty(&k, ideal, Rat::from_integer(30.into()), meta);
        e.coeffs.insert(k.element_i64(&[1, 0, 0]), Int::from(6));
        e.coeffs.insert(k.element(vec![Rat::new(2.into(), 3.into()), Rat::from_integer(0.into()), Rat::from_integer(1.into())]), Int::from(-12));
        (k, e)
    }

    #[test]
    fn round_trip() {
        let (k, e) = sample();
        let s = write(&e, &k).unwrap();
        let (k2, e2) = read(&s).unwrap();
        assert_eq!(k2.id(), k.id());
        assert_eq!(e2, e);
        assert_eq!(write(&e2, &k2).unwrap(), s);
    }

    #[test]
    fn rejects_damage() {
        let (k, e) = sample();
        let s = write(&e, &k).unwrap();
        assert!(read(&s.replace("eisencong-qexp 1", "eisencong-qexp 2")).is_err());
        assert!(read(&s.replace("terms 2", "terms 3")).is_err());
        assert!(read(&s.replace("1 0 0 = 6", "1 0 = 6")).is_err());
        assert!(read(&s.replace("1 0 0 = 6", "1/5 0 0 = 6")).is_err());
        assert!(read(&s.replace("\nend", "\n")).is_err());
    }
}
