//! One function per subcommand, each producing a [`Report`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;
use std::rc::Rc;
use std::sync::Arc;

use eisencong_core::arith::{Int, Rat};
use eisencong_core::classgroups::{
    check_main_assumptions, class_group, form_class_number, narrow_class_group, ray_class_minus, Ambient, FinAbGroup,
};
use eisencong_core::congruence::{
    battery, check_congruence, non_invariant_control, orbit_table, CheckOptions, CongruenceReport, Mismatch,
};
use eisencong_core::eisenstein::{expand as expand_series, ExpandOptions, QExpansion};
use eisencong_core::local::chars::{rationals, DirichletChar};
use eisencong_core::local::epsilon::{check_katz_deligne_q, gauss_sum, DeltaNormalization, SignMode};
use eisencong_core::local::euler::verify_euler_identity;
use eisencong_core::local::ramified::{conductor_discriminant, epsilon_inductivity, galois_characters, inductivity_degree_zero};
use eisencong_core::locfun::{Level, LocConstFn, RawFn, SupportFlags};
use eisencong_core::nf::cm::{is_fundamental_discriminant, CMQuadExt};
use eisencong_core::nf::residue::ResidueRing;
use eisencong_core::nf::units::{unit_group, UnitGroupData};
use eisencong_core::nf::FieldOrder;
use eisencong_core::presets::Preset;
use serde_json::{json, Value};

use crate::cli::{
    AssumptionsArgs, CheckArgs, ClassgrpArgs, EulerArgs, ExpandArgs, FrobeniusArgs, GaussArgs, InductivityArgs,
    KatzDeligneArgs, Normalization, OrbitsArgs, RestrictArgs, SelftestArgs, Side, Which,
};
use crate::config::{select_character, Config};
use crate::qexp;
use crate::report::{self, Report, Status};
use crate::CliError;

pub struct Ctx {
    pub config: Config,
    presets: RefCell<BTreeMap<String, Rc<Preset>>>,
}

impl Ctx {
    pub fn new(config: Config) -> Self {
        Ctx { config, presets: RefCell::new(BTreeMap::new()) }
    }

    pub fn preset(&self, name: &str) -> Result<Rc<Preset>, CliError> {
        if let Some(p) = self.presets.borrow().get(name) {
            return Ok(p.clone());
        }
        let d = self.config.preset_data(name)?;
        let p = Rc::new(d.build().map_err(|e| CliError::Config(format!("preset {name}: {e}")))?);
        self.presets.borrow_mut().insert(name.into(), p.clone());
        Ok(p)
    }

    fn cap(&self) -> usize {
        self.config.cap()
    }
}

fn bound_rat(b: u64) -> Rat {
    Rat::from_integer(Int::from(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiSpec {
    Battery,
    Entry(usize),
    Control,
    Constant,
}

pub fn parse_phi(s: &str) -> Result<PhiSpec, CliError> {
    match s {
        "battery" => Ok(PhiSpec::Battery),
        "control" => Ok(PhiSpec::Control),
        "constant" => Ok(PhiSpec::Constant),
        _ => s
            .strip_prefix("battery:")
            .and_then(|n| n.parse().ok())
            .map(PhiSpec::Entry)
            .ok_or_else(|| CliError::Config(format!("unknown phi `{s}`; use battery, battery:N, control or constant"))),
    }
}

/// The test functions on the top field selected by `spec`.
fn top_functions(pr: &Preset, spec: PhiSpec, k: u32) -> Result<Vec<LocConstFn>, CliError> {
    let (t, ut, alpha, f) = (&pr.tower, &pr.top_units, pr.data.alpha, pr.data.level_f);
    match spec {
        PhiSpec::Battery => Ok(battery(t, ut, alpha, f, k)?),
        PhiSpec::Entry(i) => {
            let mut b = battery(t, ut, alpha, f, k)?;
            if i >= b.len() {
                return Err(CliError::Config(format!("battery has {} functions at k = {k}", b.len())));
            }
            Ok(vec![b.swap_remove(i)])
        }
        PhiSpec::Control => Ok(vec![non_invariant_control(t, ut, alpha, f, k)?]),
        PhiSpec::Constant => Err(CliError::Config("the constant function is only for eis expand".into())),
    }
}

fn constant_function(k: &Arc<FieldOrder>, units: &UnitGroupData, p: u64, weight: u32) -> Result<LocConstFn, CliError> {
    let r = Arc::new(ResidueRing::new(k, &k.unit_ideal())?);
    let lv = Level::new(k, p, 0, k.unit_ideal())?;
    Ok(RawFn::constant(k.clone(), r, 1).build(units, weight, SupportFlags::default(), "constant", lv)?)
}

fn field_of(pr: &Preset, id: u64) -> Result<(&Arc<FieldOrder>, Side), CliError> {
    let t = &pr.tower;
    if id == t.top.id() {
        Ok((&t.top, Side::Top))
    } else if id == t.base.id() {
        Ok((&t.base, Side::Base))
    } else {
        Err(CliError::Config(format!("the expansion's field belongs to neither field of preset {}", pr.name())))
    }
}

fn expansion_summary(r: &mut Report, e: &QExpansion) {
    r.set("field", json!(e.field));
    r.set("weight", json!(e.meta.weight));
    r.set("phi", json!(e.meta.phi));
    r.set("trace_bound", report::rat(&e.trace_bound));
    r.set("terms", json!(e.len()));
}

/// Writes the expansion to `out`, or into the report lines without one.
fn emit_expansion(r: &mut Report, e: &QExpansion, k: &FieldOrder, out: Option<&Path>) -> Result<(), CliError> {
    let text = qexp::write(e, k)?;
    match out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|err| CliError::Io(format!("{}: {err}", p.display())))?;
            r.line(format!("{} terms over {} written to {}", e.len(), e.field, p.display()));
        }
        None => r.lines.extend(text.lines().map(String::from)),
    }
    expansion_summary(r, e);
    Ok(())
}

fn read_expansion(p: &Path) -> Result<(FieldOrder, QExpansion), CliError> {
    let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    qexp::read(&text)
}

pub fn expand(ctx: &Ctx, a: &ExpandArgs) -> Result<Report, CliError> {
    let pr = ctx.preset(&a.preset)?;
    let t = &pr.tower;
    let spec = parse_phi(&a.phi)?;
    let (k, units) = match a.side {
        Side::Base => (&t.base, &pr.base_units),
        Side::Top => (&t.top, &pr.top_units),
    };
    let (phi, opts) = match spec {
        PhiSpec::Constant => (constant_function(k, units, t.p, a.k)?, ExpandOptions { sanity: true }),
        PhiSpec::Battery => return Err(CliError::Config("eis expand takes a single function: battery:N".into())),
        _ => {
            let phi = top_functions(&pr, spec, a.k)?.remove(0);
            let phi = if a.side == Side::Base { phi.pullback_ver(t, &pr.base_units)? } else { phi };
            (phi, ExpandOptions::default())
        }
    };
    let o = k.unit_ideal();
    let e = expand_series(k.clone(), &o, &o, &phi, a.k, &bound_rat(a.bound), units, opts)?;
    let mut r = Report::new("eis expand");
    r.set("preset", json!(pr.name()));
    emit_expansion(&mut r, &e, k, a.out.as_deref())?;
    Ok(r)
}

pub fn restrict(ctx: &Ctx, a: &RestrictArgs) -> Result<Report, CliError> {
    let pr = ctx.preset(&a.preset)?;
    let (_, e) = read_expansion(&a.input)?;
    let bound = a.bound.map(bound_rat).unwrap_or_else(|| e.trace_bound.clone());
    let res = eisencong_core::congruence::restrict_diagonal(&e, &pr.tower, &bound)?;
    let mut r = Report::new("eis restrict");
    r.set("preset", json!(pr.name()));
    emit_expansion(&mut r, &res, &pr.tower.base, a.out.as_deref())?;
    Ok(r)
}

pub fn frobenius(ctx: &Ctx, a: &FrobeniusArgs) -> Result<Report, CliError> {
    let pr = ctx.preset(&a.preset)?;
    let (_, e) = read_expansion(&a.input)?;
    let (k, _) = field_of(&pr, e.order_id)?;
    let f = eisencong_core::congruence::frobenius_twist(&e, k, pr.data.p)?;
    let mut r = Report::new("eis frobenius");
    r.set("preset", json!(pr.name()));
    emit_expansion(&mut r, &f, k, a.out.as_deref())?;
    Ok(r)
}

fn mismatch_json(m: &Mismatch) -> Value {
    json!({ "exponent": report::elt(&m.exponent), "lhs": report::int(&m.lhs), "rhs": report::int(&m.rhs) })
}

fn congruence_json(c: &CongruenceReport) -> Value {
    let stats = c.orbit_stats.as_ref().map(|s| {
        json!({
            "exponents": s.exponents, "fixed": s.fixed, "free": s.free,
            "bad_subtotals": s.bad_subtotals, "bad_fixed": s.bad_fixed, "incomplete": s.incomplete,
        })
    });
    json!({
        "phi": c.phi,
        "k": c.k,
        "gamma_invariant": c.gamma_invariant,
        "forced": c.forced,
        "xi_known": c.xi_known,
        "lhs_terms": c.lhs.len(),
        "rhs_terms": c.rhs.len(),
        "mismatches": c.mismatches.iter().map(mismatch_json).collect::<Vec<_>>(),
        "mismatches_p2": c.mismatches_p2.as_ref().map(|v| v.iter().map(mismatch_json).collect::<Vec<_>>()),
        "orbit_stats": stats,
    })
}

/// Runs the congruence for the selected functions; the caller decides
/// what the outcome means.
pub fn run_congruence(
    pr: &Preset,
    spec: PhiSpec,
    ks: &[u32],
    bound: u64,
    opts: CheckOptions,
) -> Result<Vec<CongruenceReport>, CliError> {
    let t = &pr.tower;
    let o = t.base.unit_ideal();
    let mut out = Vec::new();
    for &k in ks {
        for phi in top_functions(pr, spec, k)? {
            out.push(check_congruence(&phi, t, &o, &o, k, &bound_rat(bound), &pr.base_units, &pr.top_units, opts)?);
        }
    }
    Ok(out)
}

pub fn congruence_check(ctx: &Ctx, a: &CheckArgs) -> Result<Report, CliError> {
    let pr = ctx.preset(&a.preset)?;
    if let Some(p) = a.p {
        if p != pr.data.p {
            return Err(CliError::Config(format!("preset {} has p = {}, not {p}", pr.name(), pr.data.p)));
        }
    }
    let spec = parse_phi(&a.phi)?;
    let opts = CheckOptions { forced: a.forced, mod_p2: a.mod_p2 };
    let runs = run_congruence(&pr, spec, &a.k, a.bound, opts)?;
    let mut r = Report::new("congruence check");
    r.line(pr.summary());
    r.set("preset", json!(pr.name()));
    r.set("p", json!(pr.data.p));
    r.set("bound", json!(a.bound));
    for c in &runs {
        let mut line = format!("k = {} {}: {} mismatches mod {} over {} exponents", c.k, c.phi, c.mismatches.len(), c.p, c.lhs.len());
        if !c.mismatches.is_empty() {
            r.flag(Status::Mismatch);
        }
        if let Some(s) = &c.orbit_stats {
            line.push_str(&format!("; orbits: {} fixed, {} free", s.fixed, s.free));
            if !s.ok() {
                line.push_str(&format!(
                    " ({} bad subtotals, {} fixed not descending, {} incomplete)",
                    s.bad_subtotals, s.bad_fixed, s.incomplete
                ));
                r.flag(Status::Mismatch);
            }
        } else {
            line.push_str("; not Galois-invariant");
        }
        if let Some(m2) = &c.mismatches_p2 {
            line.push_str(&format!("; {} differences mod p^2", m2.len()));
        }
        r.line(line);
        for m in c.mismatches.iter().take(5) {
            r.line(format!("  at {}: {} vs {}", m.exponent, m.lhs, m.rhs));
        }
    }
    r.set("runs", Value::Array(runs.iter().map(congruence_json).collect()));
    Ok(r)
}

pub fn congruence_orbits(ctx: &Ctx, a: &OrbitsArgs) -> Result<Report, CliError> {
    let pr = ctx.preset(&a.preset)?;
    let t = &pr.tower;
    let spec = parse_phi(&a.phi)?;
    let o = t.base.unit_ideal();
    let mut r = Report::new("congruence orbits");
    r.set("preset", json!(pr.name()));
    let mut tables = Vec::new();
    for phi in top_functions(&pr, spec, a.k)? {
        let recs = orbit_table(t, &o, &o, &phi, a.k, &bound_rat(a.bound), &pr.top_units)?;
        r.line(format!("{} (k = {}): {} exponents", phi.label, a.k, recs.len()));
        let mut rows = Vec::new();
        for rec in &recs {
            let sizes: Vec<usize> = rec.orbits.iter().map(|o| o.size).collect();
            let bad = rec.orbits.iter().any(|o| {
                (o.size == t.p as usize && !o.subtotal_divisible) || o.fixed_descends == Some(false) || !o.complete
            });
            if bad {
                r.flag(Status::Mismatch);
            }
            r.line(format!("  xi = {}: total {}, orbit sizes {:?}{}", rec.xi, rec.total, sizes, if bad { " BAD" } else { "" }));
            rows.push(json!({
                "xi": report::elt(&rec.xi),
                "total": report::rat(&rec.total),
                "orbits": rec.orbits.iter().map(|o| json!({
                    "size": o.size,
                    "subtotal": report::rat(&o.subtotal),
                    "subtotal_divisible": o.subtotal_divisible,
                    "fixed_descends": o.fixed_descends,
                    "complete": o.complete,
                })).collect::<Vec<_>>(),
            }));
        }
        tables.push(json!({ "phi": phi.label, "records": rows }));
    }
    r.set("tables", Value::Array(tables));
    Ok(r)
}

/// Nontrivial primitive characters mod `m`, with their enumeration index.
fn primitive_characters(m: u64) -> Result<Vec<(usize, DirichletChar)>, CliError> {
    let all = DirichletChar::all_mod(m)?;
    Ok(all.into_iter().filter(|c| c.is_primitive() && !c.is_trivial()).enumerate().collect())
}

pub fn gauss(ctx: &Ctx, a: &GaussArgs) -> Result<Report, CliError> {
    let chars: Vec<(usize, DirichletChar)> = match a.char.as_str() {
        "all" => primitive_characters(a.modulus)?,
        "quadratic" => primitive_characters(a.modulus)?.into_iter().filter(|(_, c)| c.char_order() == 2).collect(),
        s => match s.strip_prefix("index:").and_then(|n| n.parse::<usize>().ok()) {
            Some(i) => vec![(i, select_character(a.modulus, None, i)?)],
            None => {
                let e = ctx.config.characters.get(s).ok_or_else(|| CliError::Config(format!("unknown character {s}")))?;
                if e.modulus != a.modulus {
                    return Err(CliError::Config(format!("character {s} has modulus {}", e.modulus)));
                }
                vec![(e.index, ctx.config.character(s)?)]
            }
        },
    };
    if chars.is_empty() {
        return Err(CliError::Config(format!("no matching primitive character mod {}", a.modulus)));
    }
    let mut r = Report::new("epsilon gauss");
    r.set("modulus", json!(a.modulus));
    let m = Int::from(a.modulus);
    let mut rows = Vec::new();
    for (i, chi) in &chars {
        let g = gauss_sum(chi, SignMode::Minus)?;
        let abs2 = g.abs_squared_integer();
        let ok = abs2.as_ref() == Some(&m);
        if !ok {
            r.flag(Status::Mismatch);
        }
        let sq = (chi.char_order() == 2).then(|| g.mul(&g).as_integer()).flatten();
        let mut line = format!("chi #{i} mod {} (order {}): |G|^2 = {}", a.modulus, chi.char_order(), abs2.as_ref().map(|x| x.to_string()).unwrap_or("?".into()));
        if let Some(s) = &sq {
            line.push_str(&format!(", G^2 = {s}"));
        }
        r.line(line);
        rows.push(json!({
            "index": i,
            "order": chi.char_order(),
            "gauss_sum": report::cyclo(&g),
            "abs_squared": abs2.as_ref().map(report::int),
            "square": sq.as_ref().map(report::int),
            "ok": ok,
        }));
    }
    r.set("characters", Value::Array(rows));
    Ok(r)
}

pub fn katz_deligne(_ctx: &Ctx, a: &KatzDeligneArgs) -> Result<Report, CliError> {
    let delta: Rat = a.delta.parse().map_err(|e| CliError::Config(format!("delta {}: {e}", a.delta)))?;
    let norm = match a.normalization {
        Normalization::Pairing => DeltaNormalization::PairingDenominator,
        Normalization::Literal => DeltaNormalization::Literal,
    };
    let mut r = Report::new("epsilon katz-deligne");
    r.set("max_modulus", json!(a.max_modulus));
    r.set("normalization", json!(format!("{norm:?}")));
    r.set("delta", report::rat(&delta));
    let (mut checked, mut failed, mut skipped) = (0usize, Vec::new(), Vec::new());
    for m in 2..=a.max_modulus {
        for (i, chi) in primitive_characters(m)? {
            match check_katz_deligne_q(&chi, &delta, norm) {
                Ok(rows) => {
                    for row in rows {
                        checked += 1;
                        if !row.holds {
                            failed.push(json!({
                                "modulus": m, "index": i, "q": row.q, "conductor": row.conductor,
                                "lhs": report::cyclo_rat(&row.lhs), "rhs": report::cyclo_rat(&row.rhs),
                            }));
                            r.line(format!(
                                "mod {m} #{i} at {}: {} != {}",
                                row.q,
                                report::cyclo_rat_text(&row.lhs),
                                report::cyclo_rat_text(&row.rhs)
                            ));
                        }
                    }
                }
                Err(eisencong_core::error::Error::Precondition(why)) => skipped.push(json!({ "modulus": m, "index": i, "reason": why })),
                Err(e) => return Err(e.into()),
            }
        }
    }
    r.line(format!("{checked} local comparisons, {} failures, {} characters skipped", failed.len(), skipped.len()));
    if !failed.is_empty() {
        r.flag(Status::Mismatch);
    }
    if !skipped.is_empty() {
        r.flag(Status::Inconclusive);
    }
    r.set("checked", json!(checked));
    r.set("failures", Value::Array(failed));
    r.set("skipped", Value::Array(skipped));
    Ok(r)
}

pub fn inductivity(ctx: &Ctx, a: &InductivityArgs) -> Result<Report, CliError> {
    let pr = ctx.preset(&a.preset)?;
    let t = &pr.tower;
    let chars = galois_characters(t)?;
    let mut r = Report::new("epsilon inductivity");
    r.set("preset", json!(pr.name()));

    let cd = conductor_discriminant(t, &chars)?;
    let conds: Vec<String> = cd.conductors.iter().map(|c| c.to_string()).collect();
    r.line(format!("conductor-discriminant: |disc| = {} = {}", cd.disc, conds.join(" * ")));
    for l in &cd.local {
        r.line(format!(
            "  at {}: n(psi') = {}, sum n(chi) = {}, pulled-back conductors {:?}",
            l.q, l.n_psi_top, l.sum_char_exponents, l.pulled_back
        ));
    }
    if !cd.ok() {
        r.flag(Status::Mismatch);
    }
    r.set("conductor_discriminant", json!({
        "disc": report::int(&cd.disc),
        "conductors": cd.conductors.iter().map(report::int).collect::<Vec<_>>(),
        "ok": cd.ok(),
        "local": cd.local.iter().map(|l| json!({
            "q": l.q, "n_psi_top": l.n_psi_top, "sum_char_exponents": l.sum_char_exponents,
            "pulled_back": l.pulled_back, "ok": l.ok,
        })).collect::<Vec<_>>(),
    }));

    let (mut deg0, mut eps_rows, mut exact_nontrivial, mut tested) = (Vec::new(), Vec::new(), 0usize, 0usize);
    for &m in &a.moduli {
        for (i, phi) in DirichletChar::all_mod(m)?.into_iter().enumerate() {
            tested += 1;
            for row in inductivity_degree_zero(&phi, t, &chars)? {
                if !row.ok {
                    r.flag(Status::Mismatch);
                    r.line(format!("degree zero fails for mod {m} #{i} at {}: {} != {}", row.q, row.lhs, row.rhs));
                }
                deg0.push(json!({ "modulus": m, "index": i, "q": row.q, "lhs": row.lhs, "rhs": row.rhs, "ok": row.ok }));
            }
            for row in epsilon_inductivity(&phi, t, &chars)? {
                if !row.abs_squared_equal || row.exact_equal == Some(false) {
                    r.flag(Status::Mismatch);
                    r.line(format!("epsilon inductivity fails for mod {m} #{i} at {}", row.q));
                }
                if row.exact_equal == Some(true) && !phi.is_trivial() {
                    exact_nontrivial += 1;
                }
                eps_rows.push(json!({
                    "modulus": m, "index": i, "q": row.q,
                    "abs_squared_equal": row.abs_squared_equal, "exact_equal": row.exact_equal,
                }));
            }
        }
    }
    r.line(format!(
        "{tested} characters: {} degree-zero rows, {} epsilon rows, {exact_nontrivial} exact equalities for nontrivial phi",
        deg0.len(),
        eps_rows.len()
    ));
    if exact_nontrivial == 0 {
        r.flag(Status::Inconclusive);
    }
    r.set("degree_zero", Value::Array(deg0));
    r.set("epsilon", Value::Array(eps_rows));
    r.set("exact_nontrivial", json!(exact_nontrivial));
    Ok(r)
}

pub fn euler(_ctx: &Ctx, a: &EulerArgs) -> Result<Report, CliError> {
    let mut r = Report::new("euler identity");
    r.set("truncation", json!(a.truncation));
    let mut rows = Vec::new();
    for e in 0..=a.max_e {
        let rep = verify_euler_identity(e, a.truncation)?;
        if !(rep.holds && rep.telescopes) {
            r.flag(Status::Mismatch);
        }
        r.line(format!("e = {e}: identity {}, telescoping {}", verdict(rep.holds), verdict(rep.telescopes)));
        rows.push(json!({ "e": e, "holds": rep.holds, "telescopes": rep.telescopes }));
    }
    r.set("rows", Value::Array(rows));
    Ok(r)
}

fn verdict(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "FAILS"
    }
}

fn rational_units() -> Result<(Arc<FieldOrder>, UnitGroupData), CliError> {
    let q = rationals();
    let u = unit_group(&q, None, 1)?;
    Ok((q, u))
}

pub fn classgrp(ctx: &Ctx, a: &ClassgrpArgs) -> Result<Report, CliError> {
    let cap = ctx.cap();
    let mut r = Report::new("classgrp compute");
    if let Some(d) = a.disc {
        if d >= 0 || !is_fundamental_discriminant(d) {
            return Err(CliError::Config(format!("{d} is not a negative fundamental discriminant")));
        }
        let (q, u) = rational_units()?;
        let (t, n) = if d.rem_euclid(4) == 0 { (0, -d / 4) } else { (1, (1 - d) / 4) };
        let k = CMQuadExt::new(&format!("Q(sqrt {d})"), q, t, n)?;
        let g = match a.ray {
            Some(j) => ray_class_minus(&k, &u, &k.base().rational_ideal(&bound_rat(j))?, cap)?,
            None => class_group(&Ambient::Cm { k: &k, base_units: &u }, cap)?,
        };
        r.set("field", json!(k.label()));
        finish_group(&mut r, &g);
        if a.ray.is_none() {
            let h = form_class_number(d);
            r.line(format!("reduced forms of discriminant {d}: h = {h}"));
            r.set("form_class_number", json!(h));
            if g.is_exact() && g.order() != h {
                r.flag(Status::Mismatch);
            }
        }
        return Ok(r);
    }
    let name = a.preset.as_deref().ok_or_else(|| CliError::Config("give --preset or --disc".into()))?;
    let pr = ctx.preset(name)?;
    let g = match a.which {
        Which::Base | Which::Top => {
            if a.ray.is_some() {
                return Err(CliError::Config("--ray applies to the CM fields".into()));
            }
            let (k, u) = if a.which == Which::Base { (&pr.tower.base, &pr.base_units) } else { (&pr.tower.top, &pr.top_units) };
            r.set("field", json!(k.label()));
            if a.narrow {
                narrow_class_group(k, u, cap)?
            } else {
                class_group(&Ambient::Real { k, units: u }, cap)?
            }
        }
        Which::K0 | Which::Cm | Which::CmTop => {
            if a.narrow {
                return Err(CliError::Config("--narrow applies to the totally real fields".into()));
            }
            let (_, qu) = rational_units()?;
            let (k, u) = match a.which {
                Which::K0 => (&pr.k0, &qu),
                Which::Cm => (&pr.cm, &pr.base_units),
                _ => (&pr.cm_top, &pr.top_units),
            };
            r.set("field", json!(k.label()));
            match a.ray {
                Some(j) => ray_class_minus(k, u, &k.base().rational_ideal(&bound_rat(j))?, cap)?,
                None => class_group(&Ambient::Cm { k, base_units: u }, cap)?,
            }
        }
    };
    r.set("preset", json!(pr.name()));
    finish_group(&mut r, &g);
    Ok(r)
}

fn finish_group(r: &mut Report, g: &FinAbGroup) {
    r.line(format!("group: {}", report::group_text(g)));
    r.flag(report::group_status(g));
    r.set("group", report::group(g));
}

pub fn assumptions(ctx: &Ctx, a: &AssumptionsArgs) -> Result<Report, CliError> {
    let pr = ctx.preset(&a.preset)?;
    let rep = check_main_assumptions(&pr, ctx.cap())?;
    let mut r = Report::new("assumptions check");
    r.line(pr.summary());
    r.set("preset", json!(pr.name()));
    for (name, h) in [("h1", &rep.h1), ("h2", &rep.h2), ("h3", &rep.h3)] {
        let (s, v, text) = report::hyp(h);
        r.flag(s);
        r.line(format!("{name}: {text}"));
        r.set(name, v);
    }
    r.line(format!("p splits in K0: {}", rep.p_splits_in_k0));
    r.line(format!("ramified primes split in K': {}", rep.ramified_primes_split));
    if !rep.ramified_primes_split {
        r.flag(Status::Mismatch);
    }
    r.line(format!("j = {}", rep.j));
    for (label, g) in [
        ("Cl(F)", &rep.class_base),
        ("Cl(F')", &rep.class_top),
        ("Cl-(K, J)", &rep.minus_k),
        ("Cl-(K', J)", &rep.minus_top),
    ] {
        r.line(format!("{label}: {}", report::group_text(g)));
    }
    if let Some(x) = &rep.xi {
        r.line(format!("xi = {x}"));
    }
    let d = pr.k0.d();
    let (_, qu) = rational_units()?;
    let g0 = class_group(&Ambient::Cm { k: &pr.k0, base_units: &qu }, ctx.cap())?;
    let h = form_class_number(d);
    let agree = !g0.is_exact() || g0.order() == h;
    r.line(format!("Cl(K0): {} against h({d}) = {h} from reduced forms", report::group_text(&g0)));
    if !agree {
        r.flag(Status::Mismatch);
    }
    r.set("side_conditions", json!({
        "p_splits_in_k0": rep.p_splits_in_k0,
        "ramified_primes_split": rep.ramified_primes_split,
        "gamma_fixed_generators": rep.gamma_fixed_generators,
    }));
    r.set("j", json!(rep.j));
    r.set("groups", json!({
        "class_base": report::group(&rep.class_base),
        "class_top": report::group(&rep.class_top),
        "minus_k": report::group(&rep.minus_k),
        "minus_top": report::group(&rep.minus_top),
        "k0": report::group(&g0),
    }));
    r.set("form_class_number", json!({ "discriminant": d, "h": h, "agrees": agree }));
    r.set("xi", rep.xi.as_ref().map(report::elt).unwrap_or(Value::Null));
    Ok(r)
}

/// Merges `sub` into `r` as a named section.
fn absorb(r: &mut Report, sections: &mut Vec<Value>, name: &str, sub: Result<Report, CliError>) {
    match sub {
        Ok(s) => {
            r.flag(s.status);
            r.line(format!("[{name}] {}", serde_json::to_value(s.status).unwrap().as_str().unwrap()));
            sections.push(json!({ "name": name, "status": s.status, "data": s.data }));
        }
        Err(e) => {
            let s = if e.exit_code() == crate::EXIT_INCONCLUSIVE { Status::Inconclusive } else { Status::Mismatch };
            r.flag(s);
            r.line(format!("[{name}] error: {e}"));
            sections.push(json!({ "name": name, "status": s, "error": e.to_string() }));
        }
    }
}

pub fn selftest(ctx: &Ctx, a: &SelftestArgs) -> Result<Report, CliError> {
    let cfg = &ctx.config;
    if cfg.presets.is_empty() {
        return Err(CliError::Config("no presets configured; nothing to test".into()));
    }
    let mut r = Report::new("selftest all");
    let mut sections = Vec::new();
    for name in cfg.preset_names() {
        let batteries: Vec<_> = cfg.batteries.iter().filter(|(_, b)| b.preset == name).collect();
        if batteries.is_empty() {
            let args = CheckArgs {
                preset: name.clone(),
                phi: "battery".into(),
                bound: a.bound,
                p: None,
                k: vec![1, 2],
                forced: false,
                mod_p2: false,
            };
            absorb(&mut r, &mut sections, &format!("{name}: congruence"), congruence_check(ctx, &args));
        }
        for (bname, b) in batteries {
            let sub = (|| {
                let pr = ctx.preset(&name)?;
                let mut rep = Report::new("congruence check");
                for &k in &b.weights {
                    let all = top_functions(&pr, PhiSpec::Battery, k)?;
                    let idx: Vec<usize> = b.select.clone().unwrap_or_else(|| (0..all.len()).collect());
                    for i in idx {
                        let phi = all.get(i).ok_or_else(|| CliError::Config(format!("battery {bname}: no entry {i} at k = {k}")))?;
                        let o = pr.tower.base.unit_ideal();
                        let c = check_congruence(phi, &pr.tower, &o, &o, k, &bound_rat(b.bound), &pr.base_units, &pr.top_units, CheckOptions::default())?;
                        if !c.mismatches.is_empty() || !c.orbit_stats.as_ref().is_some_and(|s| s.ok()) {
                            rep.flag(Status::Mismatch);
                        }
                        rep.lines.push(format!("{}: {} mismatches", c.phi, c.mismatches.len()));
                    }
                }
                Ok(rep)
            })();
            absorb(&mut r, &mut sections, &format!("{name}: battery {bname}"), sub);
        }
        let ind = InductivityArgs { preset: name.clone(), moduli: vec![1, 3, 4, 7, 9] };
        absorb(&mut r, &mut sections, &format!("{name}: inductivity"), inductivity(ctx, &ind));
    }
    absorb(&mut r, &mut sections, "gauss sums to 50", (|| {
        let mut rep = Report::new("epsilon gauss");
        for m in 3..=50 {
            if primitive_characters(m)?.is_empty() {
                continue;
            }
            let g = gauss(ctx, &GaussArgs { modulus: m, char: "all".into() })?;
            rep.flag(g.status);
        }
        Ok(rep)
    })());
    let kd = KatzDeligneArgs { max_modulus: 25, normalization: Normalization::Pairing, delta: "1".into() };
    absorb(&mut r, &mut sections, "katz-deligne to 25", katz_deligne(ctx, &kd));
    absorb(&mut r, &mut sections, "euler identity", euler(ctx, &EulerArgs { max_e: 5, truncation: 30 }));
    r.set("sections", Value::Array(sections));
    Ok(r)
}
