use clap::{Args, Subcommand, ValueEnum};
use serde_json::{json, Value};

use drinfeld::equidist::{haar_log_integral, lattice_count, packet_ball_report};
use drinfeld::field::{parse_elem, parse_poly, parse_ratfunc, poly_factor, Fq, FqConfig, Poly, RatFunc};
use drinfeld::heights::{
    global_canonical_height, local_canonical_height, packet_average_table, HeightTotal, LocalHeight, LocalHeightResult,
    DEFAULT_N_MAX,
};
use drinfeld::integrality::{
    integrality_scan, min_distance_report, packet_integrality_verdict, small_height_sequence, IntegralityVerdict,
};
use drinfeld::newton::{Packet, ValuationProfile};
use drinfeld::places::{Place, PlaceSet};
use drinfeld::{DrinfeldModule, TorsionCertificate};

use crate::report::Report;
use crate::Failure;

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Factor a polynomial over F_q.
    #[command(args_override_self = true)]
    Factor(FactorArgs),
    /// Global canonical height with per-place breakdown.
    #[command(args_override_self = true)]
    Height(PointArgs),
    /// Local canonical height at one place.
    #[command(name = "local-height", args_override_self = true)]
    LocalHeight(LocalHeightArgs),
    /// Torsion certificate for a point.
    #[command(args_override_self = true)]
    Torsion(PointArgs),
    /// Root log-value profile of a packet at one place.
    #[command(name = "packet-profile", args_override_self = true)]
    PacketProfile(PacketProfileArgs),
    /// S-integrality verdict for one packet.
    #[command(args_override_self = true)]
    Integrality(IntegralityArgs),
    /// Verdicts for every monic Q up to a degree.
    #[command(args_override_self = true)]
    Scan(ScanArgs),
    /// Packet-averaged log-distances against local heights.
    #[command(args_override_self = true)]
    Convergence(SeriesArgs),
    /// Haar log-integral on the unit ball, exact and truncated.
    #[command(args_override_self = true)]
    Haar(HaarArgs),
    /// Count torsion parameters with prescribed Laurent digits.
    #[command(args_override_self = true)]
    Count(CountArgs),
    /// Shell statistics of a packet at the infinite place.
    #[command(name = "ball-report", args_override_self = true)]
    BallReport(BallArgs),
    /// Small-height polynomial sequence over F_p.
    #[command(name = "example-ih", args_override_self = true)]
    ExampleIh(ExampleArgs),
    /// Minimum packet log-distances and a linear lower-bound fit.
    #[command(name = "bosser", args_override_self = true)]
    MinDistance(SeriesArgs),
}

#[derive(Args, Debug)]
pub struct ModuleArg {
    /// Module JSON file, inline JSON object, or `carlitz:P`.
    #[arg(long)]
    module: String,
}

#[derive(Args, Debug)]
pub struct FieldArgs {
    /// Characteristic (ignored when --module is given).
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, default_value_t = 1)]
    e: u32,
    /// Modulus coefficients over F_p, lowest degree first, comma separated.
    #[arg(long)]
    modulus: Option<String>,
    #[arg(long)]
    module: Option<String>,
}

#[derive(Args, Debug)]
pub struct FactorArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Polynomial in t.
    #[arg(long)]
    f: String,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[command(flatten)]
    module: ModuleArg,
    #[arg(long)]
    x: String,
    #[arg(long = "n-max")]
    n_max: Option<u32>,
}

#[derive(Args, Debug)]
pub struct LocalHeightArgs {
    #[command(flatten)]
    module: ModuleArg,
    #[arg(long)]
    x: String,
    /// `inf` or a monic irreducible polynomial.
    #[arg(long, default_value = "inf")]
    place: String,
    #[arg(long = "n-max", default_value_t = DEFAULT_N_MAX)]
    n_max: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Distance,
    Size,
}

#[derive(Args, Debug)]
pub struct PacketProfileArgs {
    #[command(flatten)]
    module: ModuleArg,
    #[arg(long)]
    q: String,
    #[arg(long, default_value = "0")]
    beta: String,
    #[arg(long, default_value = "0")]
    alpha: String,
    #[arg(long, default_value = "inf")]
    place: String,
    #[arg(long, value_enum, default_value_t = BranchArg::Distance)]
    branch: BranchArg,
}

#[derive(Args, Debug)]
pub struct IntegralityArgs {
    #[command(flatten)]
    module: ModuleArg,
    #[arg(long)]
    q: String,
    #[arg(long)]
    beta: String,
    #[arg(long, default_value = "0")]
    alpha: String,
    /// Comma-separated places, e.g. `inf,t`.
    #[arg(long = "S", default_value = "inf")]
    s: String,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    module: ModuleArg,
    #[arg(long)]
    beta: String,
    #[arg(long, default_value = "0")]
    alpha: String,
    #[arg(long = "S", default_value = "inf")]
    s: String,
    #[arg(long = "max-deg")]
    max_deg: u32,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    #[command(flatten)]
    module: ModuleArg,
    #[arg(long)]
    beta: String,
    /// Comma-separated list of Q.
    #[arg(long = "q-list", conflicts_with = "n")]
    q_list: Option<String>,
    /// Use Q = t, t^2, ..., t^n.
    #[arg(long)]
    n: Option<u32>,
}

#[derive(Args, Debug)]
pub struct HaarArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    r: u32,
    #[arg(long = "N")]
    n: u32,
    /// Also list every truncated tuple when feasible.
    #[arg(long)]
    brute: bool,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Modulus polynomial Q.
    #[arg(long = "Q")]
    q: String,
    /// Leading Laurent digits of one coordinate, comma separated; repeat per coordinate.
    #[arg(long = "target", required = true, allow_hyphen_values = true)]
    targets: Vec<String>,
    #[arg(long)]
    brute: bool,
    /// Also count monic coordinates only.
    #[arg(long = "monic-only")]
    monic_only: bool,
}

#[derive(Args, Debug)]
pub struct BallArgs {
    #[command(flatten)]
    module: ModuleArg,
    #[arg(long)]
    q: String,
    #[arg(long, default_value = "0")]
    beta: String,
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    /// Odd prime.
    #[arg(long)]
    p: u32,
    /// Comma-separated indices n.
    #[arg(long, default_value = "1,2,3,4,5")]
    n: String,
}

type Out = Result<Report, Failure>;

fn load_module(spec: &str) -> Result<DrinfeldModule, Failure> {
    if let Some(p) = spec.strip_prefix("carlitz:") {
        let p: u32 = p.trim().parse().map_err(|_| Failure::Parse(format!("bad characteristic in `{spec}`")))?;
        return Ok(DrinfeldModule::carlitz(&Fq::prime(p)?));
    }
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| Failure::Other(format!("reading {spec}: {e}")))?
    };
    DrinfeldModule::from_json(&text).map_err(Failure::from)
}

fn load_field(a: &FieldArgs) -> Result<Fq, Failure> {
    if let Some(m) = &a.module {
        return Ok(load_module(m)?.field().clone());
    }
    let p = a.p.ok_or_else(|| Failure::Parse("need --p or --module".into()))?;
    let modulus = match &a.modulus {
        None => None,
        Some(s) => Some(
            s.split(',')
                .map(|c| c.trim().parse::<u32>().map_err(|_| Failure::Parse(format!("bad modulus `{s}`"))))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    Ok(Fq::new(FqConfig { p, e: a.e, modulus })?)
}

fn ratfunc(m: &DrinfeldModule, s: &str) -> Result<RatFunc, Failure> {
    Ok(parse_ratfunc(m.field(), s)?)
}

fn poly(field: &Fq, s: &str) -> Result<Poly, Failure> {
    Ok(parse_poly(field, s)?)
}

fn q_series(m: &DrinfeldModule, a: &SeriesArgs) -> Result<Vec<Poly>, Failure> {
    match (&a.q_list, a.n) {
        (Some(list), _) => list.split(',').map(|s| poly(m.field(), s.trim())).collect(),
        (None, Some(n)) => Ok((1..=n as u64).map(|k| Poly::t(m.field()).pow(k)).collect()),
        (None, None) => Err(Failure::Parse("need --q-list or --n".into())),
    }
}

fn local_value(h: &LocalHeight) -> Value {
    match h {
        LocalHeight::Exact(v) => json!({"value": v.to_string()}),
        LocalHeight::Bounded { lower, upper } => json!({"lower": lower.to_string(), "upper": upper.to_string()}),
    }
}

fn local_json(place: &Place, r: &LocalHeightResult) -> Value {
    let mut v = local_value(&r.value);
    let obj = v.as_object_mut().expect("object");
    obj.insert("place".into(), json!(place.to_string()));
    obj.insert("escape_step".into(), json!(r.escape_step));
    obj.insert("steps".into(), json!(r.steps));
    v
}

fn local_cell(h: &LocalHeight) -> String {
    match h {
        LocalHeight::Exact(v) => v.to_string(),
        LocalHeight::Bounded { lower, upper } => format!("[{lower},{upper}]"),
    }
}

fn profile_json(p: &ValuationProfile) -> Value {
    let rational: Vec<Value> = p
        .rational_roots
        .iter()
        .map(|(g, l)| json!({"point": g.to_string(), "log": l.as_ref().map(|l| l.to_string())}))
        .collect();
    json!({
        "place": p.place.to_string(),
        "entries": p.to_json(),
        "zero_roots": p.zero_roots,
        "rational_roots": rational,
    })
}

fn verdict_json(v: &IntegralityVerdict) -> Value {
    let witnesses: Vec<Value> = v
        .witnesses
        .iter()
        .map(|w| json!({"place": w.place.to_string(), "log": w.log.to_string(), "mult": w.mult}))
        .collect();
    let checks: Vec<Value> = v
        .checks
        .iter()
        .map(|c| {
            json!({
                "place": c.place.to_string(),
                "branch": c.branch.name(),
                "profile": profile_json(&c.profile),
                "violating": c.violating,
            })
        })
        .collect();
    let rational: Vec<Value> =
        v.rational_points.iter().map(|(g, ok)| json!({"point": g.to_string(), "s_integral": ok})).collect();
    json!({
        "verdict": v.kind.to_string(),
        "witnesses": witnesses,
        "checks": checks,
        "rational_points": rational,
    })
}

fn factor(a: &FactorArgs) -> Out {
    let field = load_field(&a.field)?;
    let f = poly(&field, &a.f)?;
    let fac = poly_factor(&f)?;
    let factors: Vec<Value> = fac.factors.iter().map(|(g, e)| json!({"factor": g.to_string(), "exp": e})).collect();
    let rows = fac.factors.iter().map(|(g, e)| vec![g.to_string(), e.to_string()]).collect();
    let unit = Poly::constant(&field, fac.unit).to_string();
    Ok(Report::with_table(json!({"poly": f.to_string(), "unit": unit, "factors": factors}), &["factor", "exp"], rows))
}

fn height(a: &PointArgs) -> Out {
    let m = load_module(&a.module.module)?;
    let x = ratfunc(&m, &a.x)?;
    let b = global_canonical_height(&m, &x, a.n_max.unwrap_or(DEFAULT_N_MAX))?;
    let places: Vec<Value> = b.per_place.iter().map(|(v, r)| local_json(v, r)).collect();
    let rows = b.per_place.iter().map(|(v, r)| vec![v.to_string(), local_cell(&r.value)]).collect();
    let total = match &b.total {
        HeightTotal::Exact(h) => json!(h.to_string()),
        HeightTotal::Interval(lo, hi) => json!({"lower": lo.to_string(), "upper": hi.to_string()}),
    };
    Ok(Report::with_table(json!({"x": x.to_string(), "total": total, "places": places}), &["place", "value"], rows))
}

fn local_height(a: &LocalHeightArgs) -> Out {
    let m = load_module(&a.module.module)?;
    let x = ratfunc(&m, &a.x)?;
    let v = Place::parse(m.field(), &a.place)?;
    let r = local_canonical_height(&m, &x, &v, a.n_max)?;
    Ok(Report::json(local_json(&v, &r)))
}

fn torsion(a: &PointArgs) -> Out {
    let m = load_module(&a.module.module)?;
    let x = ratfunc(&m, &a.x)?;
    let json = match m.torsion_test(&x, a.n_max.unwrap_or(DEFAULT_N_MAX))? {
        TorsionCertificate::Torsion { annihilator } => {
            json!({"verdict": "torsion", "annihilator": annihilator.to_string()})
        }
        TorsionCertificate::NonTorsion { place, step } => {
            json!({"verdict": "non-torsion", "place": place.to_string(), "step": step})
        }
        TorsionCertificate::Undecided { steps } => json!({"verdict": "undecided", "steps": steps}),
    };
    Ok(Report::json(json))
}

fn packet_profile(a: &PacketProfileArgs) -> Out {
    let m = load_module(&a.module.module)?;
    let q = poly(m.field(), &a.q)?;
    let beta = ratfunc(&m, &a.beta)?;
    let alpha = ratfunc(&m, &a.alpha)?;
    let v = Place::parse(m.field(), &a.place)?;
    let packet = Packet::new(&m, &q, &alpha)?;
    // With β in the packet, |β - γ| runs over |γ'| for γ' in the packet shifted by -β,
    // which for β = 0 is the size profile itself.
    let base_in_packet = packet.offset(&m, &beta)?.is_zero();
    let prof = match a.branch {
        BranchArg::Distance if base_in_packet && beta.is_zero() => packet.size_profile(&v)?,
        BranchArg::Distance => packet.distance_profile(&m, &beta, &v)?,
        BranchArg::Size => packet.size_profile(&v)?,
    };
    let rows = prof.entries.iter().map(|(l, k)| vec![l.to_string(), k.to_string()]).collect();
    let mut json = profile_json(&prof);
    let obj = json.as_object_mut().expect("object");
    obj.insert("packet_size".into(), json!(packet.size()));
    obj.insert("base_in_packet".into(), json!(base_in_packet));
    obj.insert("rational_search_complete".into(), json!(packet.rational.complete));
    obj.insert("log_sum".into(), json!(prof.log_sum().to_string()));
    Ok(Report::with_table(json, &["log", "mult"], rows))
}

fn integrality(a: &IntegralityArgs) -> Out {
    let m = load_module(&a.module.module)?;
    let q = poly(m.field(), &a.q)?;
    let beta = ratfunc(&m, &a.beta)?;
    let alpha = ratfunc(&m, &a.alpha)?;
    let s = PlaceSet::parse(m.field(), &a.s)?;
    let v = packet_integrality_verdict(&m, &q, &beta, &s, &alpha)?;
    Ok(Report::json(verdict_json(&v)))
}

fn scan(a: &ScanArgs) -> Out {
    let m = load_module(&a.module.module)?;
    let beta = ratfunc(&m, &a.beta)?;
    let alpha = ratfunc(&m, &a.alpha)?;
    let s = PlaceSet::parse(m.field(), &a.s)?;
    let rep = integrality_scan(&m, &beta, &s, a.max_deg, &alpha)?;
    let mut rows_json = Vec::new();
    let mut rows = Vec::new();
    for row in &rep.rows {
        match &row.verdict {
            Ok(v) => {
                let mut j = verdict_json(v);
                j.as_object_mut().expect("object").insert("q".into(), json!(row.q.to_string()));
                rows_json.push(j);
                rows.push(vec![row.q.to_string(), v.kind.to_string(), v.witnesses.len().to_string()]);
            }
            Err(e) => {
                rows_json.push(json!({"q": row.q.to_string(), "error": e}));
                rows.push(vec![row.q.to_string(), "ERROR".into(), String::new()]);
            }
        }
    }
    let json = json!({
        "beta": beta.to_string(),
        "alpha": alpha.to_string(),
        "S": s.to_string(),
        "rows": rows_json,
        "counts": {"ALL": rep.all, "NONE": rep.none, "INDETERMINATE": rep.indeterminate},
        "candidates": rep.candidates.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
    });
    Ok(Report::with_table(json, &["q", "verdict", "witnesses"], rows))
}

fn convergence(a: &SeriesArgs) -> Out {
    let m = load_module(&a.module.module)?;
    let beta = ratfunc(&m, &a.beta)?;
    let qs = q_series(&m, a)?;
    let table = packet_average_table(&m, &beta, &qs)?;
    let names: Vec<String> = table.places.iter().map(|v| v.to_string()).collect();
    let rows_json: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let cells: Vec<Value> =
                names.iter().zip(&row.cells).map(|(p, c)| json!({"place": p, "value": c.to_string()})).collect();
            json!({"q": row.q.to_string(), "places": cells, "sum": row.sum.to_string()})
        })
        .collect();
    let limits: Vec<Value> = table.places.iter().zip(&table.limits).map(|(v, r)| local_json(v, r)).collect();
    let mut header: Vec<&str> = vec!["q"];
    header.extend(names.iter().map(String::as_str));
    header.push("sum");
    let mut rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| {
            let mut r = vec![row.q.to_string()];
            r.extend(row.cells.iter().map(|c| c.to_string()));
            r.push(row.sum.to_string());
            r
        })
        .collect();
    let mut limit_row = vec!["limit".to_string()];
    limit_row.extend(table.limits.iter().map(|r| local_cell(&r.value)));
    limit_row.push(String::new());
    rows.push(limit_row);
    let json = json!({"beta": beta.to_string(), "rows": rows_json, "limits": limits});
    Ok(Report::with_table(json, &header, rows))
}

fn haar(a: &HaarArgs) -> Out {
    let h = haar_log_integral(a.q, a.r, a.n)?;
    let mut json = json!({
        "q": a.q, "r": a.r, "N": a.n,
        "exact": h.exact.to_string(),
        "brute": h.brute.to_string(),
        "tail_bound": h.tail_bound.to_string(),
    });
    let enumerated = if a.brute { h.enumerated.as_ref().map(|e| e.to_string()) } else { None };
    if a.brute {
        json.as_object_mut().expect("object").insert("enumerated".into(), json!(enumerated));
    }
    let row = vec![
        a.q.to_string(),
        a.r.to_string(),
        a.n.to_string(),
        h.exact.to_string(),
        h.brute.to_string(),
        h.tail_bound.to_string(),
        enumerated.unwrap_or_default(),
    ];
    Ok(Report::with_table(json, &["q", "r", "N", "exact", "brute", "tail_bound", "enumerated"], vec![row]))
}

fn count(a: &CountArgs) -> Out {
    let field = load_field(&a.field)?;
    let q = poly(&field, &a.q)?;
    let targets = a
        .targets
        .iter()
        .map(|t| {
            t.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_elem(&field, s).map_err(Failure::from))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let depths: Vec<usize> = targets.iter().map(Vec::len).collect();
    let c = lattice_count(&q, &targets, &depths, a.brute, a.monic_only)?;
    let opt = |x: &Option<num::BigUint>| x.as_ref().map(|n| n.to_string());
    let json = json!({
        "Q": q.to_string(),
        "depths": depths,
        "formula": c.formula.to_string(),
        "brute": opt(&c.brute),
        "monic_only": opt(&c.monic_only),
    });
    let row = vec![
        q.to_string(),
        c.formula.to_string(),
        opt(&c.brute).unwrap_or_default(),
        opt(&c.monic_only).unwrap_or_default(),
    ];
    Ok(Report::with_table(json, &["Q", "formula", "brute", "monic_only"], vec![row]))
}

fn ball_report(a: &BallArgs) -> Out {
    let m = load_module(&a.module.module)?;
    let q = poly(m.field(), &a.q)?;
    let beta = ratfunc(&m, &a.beta)?;
    let rep = packet_ball_report(&m, &q, &beta)?;
    let opt = |x: &Option<drinfeld::Rational>| x.as_ref().map(|r| r.to_string());
    let rows_json: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| {
            json!({
                "log_radius": r.log_radius.to_string(),
                "count": r.count,
                "cumulative_count": r.cumulative_count,
                "packet_fraction": r.packet_fraction.to_string(),
                "ball_mass": opt(&r.ball_mass),
            })
        })
        .collect();
    let rows = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.log_radius.to_string(),
                r.count.to_string(),
                r.cumulative_count.to_string(),
                r.packet_fraction.to_string(),
                opt(&r.ball_mass).unwrap_or_default(),
            ]
        })
        .collect();
    let json = json!({"packet_size": rep.packet_size, "deflated": rep.deflated, "rows": rows_json});
    Ok(Report::with_table(json, &["log_radius", "count", "cumulative_count", "packet_fraction", "ball_mass"], rows))
}

fn example_ih(a: &ExampleArgs) -> Out {
    let ns =
        a.n.split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| Failure::Parse(format!("bad index list `{}`", a.n))))
            .collect::<Result<Vec<_>, _>>()?;
    let rows = small_height_sequence(a.p, &ns)?;
    let rows_json: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "coefficients": r.f_n.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "avg_h": r.avg_h.to_string(),
                "U_n": r.u_n.to_string(),
                "integrality": r.integral.to_string(),
            })
        })
        .collect();
    let table = rows
        .iter()
        .map(|r| vec![r.n.to_string(), r.avg_h.to_string(), r.u_n.to_string(), r.integral.to_string()])
        .collect();
    Ok(Report::with_table(json!({"p": a.p, "rows": rows_json}), &["n", "avg_h", "U_n", "integrality"], table))
}

fn min_distance(a: &SeriesArgs) -> Out {
    let m = load_module(&a.module.module)?;
    let beta = ratfunc(&m, &a.beta)?;
    let qs = q_series(&m, a)?;
    let fit = min_distance_report(&m, &beta, &qs)?;
    let rows_json: Vec<Value> = fit
        .rows
        .iter()
        .map(|r| json!({"q": r.q.to_string(), "d": r.d, "min_log": r.min_log.to_string(), "fit": fit.predict(r.d)}))
        .collect();
    let rows = fit
        .rows
        .iter()
        .map(|r| vec![r.q.to_string(), r.d.to_string(), r.min_log.to_string(), fit.predict(r.d).to_string()])
        .collect();
    let json = json!({
        "beta": beta.to_string(),
        "rows": rows_json,
        "c0": fit.c0,
        "c1": fit.c1,
        "training_rows": fit.training,
        "violations": fit.violations,
        "lower_bounds_hold": fit.lower_bounds_validation(),
    });
    Ok(Report::with_table(json, &["q", "d", "min_log", "fit"], rows))
}

pub fn run(verb: &Verb) -> Out {
    match verb {
        Verb::Factor(a) => factor(a),
        Verb::Height(a) => height(a),
        Verb::LocalHeight(a) => local_height(a),
        Verb::Torsion(a) => torsion(a),
        Verb::PacketProfile(a) => packet_profile(a),
        Verb::Integrality(a) => integrality(a),
        Verb::Scan(a) => scan(a),
        Verb::Convergence(a) => convergence(a),
        Verb::Haar(a) => haar(a),
        Verb::Count(a) => count(a),
        Verb::BallReport(a) => ball_report(a),
        Verb::ExampleIh(a) => example_ih(a),
        Verb::MinDistance(a) => min_distance(a),
    }
}
