use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use naive_integral::asymptotic::{f_series, j2_asymptotic, j4_asymptotic, Amplitude};
use naive_integral::bigcomplex::{parse_real, pi, real_to_string};
use naive_integral::contour::{eval_components, eval_j0_realline, Components, PathVariant, REALLINE_TAU_MIN};
use naive_integral::perron::AsymptoticResult;
use naive_integral::reference::{
    compare_f, generated_series, printed_series, PrintedValue, SeriesId, J2_ASYMPTOTIC, J4_ASYMPTOTIC, T1000,
    TAU_HUNDREDTH,
};
use naive_integral::saddle::{solve_saddles, verify_localizations, TAU_MAX};
use naive_integral::theta::{psi, psi0, z0_grid, z0_leading, z0_phase_count, z0_sign_changes};
use naive_integral::{BigComplex, Error, Precision, QuadratureResult, Which};
use rug::Float;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "naive", version, about = "High-precision evaluation of the naive integral J0 and its asymptotics")]
struct Cli {
    #[command(flatten)]
    cfg: Config,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Config {
    /// Height t; tau = sqrt(2 pi / t).
    #[arg(long, global = true, conflicts_with = "tau")]
    t: Option<String>,
    /// Expansion parameter tau.
    #[arg(long, global = true)]
    tau: Option<String>,
    /// Working precision in decimal digits.
    #[arg(long, global = true, env = "NAIVE_PREC", default_value_t = 50)]
    prec: u32,
    /// Series truncation in half-steps of tau.
    #[arg(long, global = true, default_value_t = 12)]
    order: usize,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
    /// Where the q2 segment ends.
    #[arg(long, global = true, value_enum, default_value_t = Variant::Quarter)]
    path_variant: Variant,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Quarter,
    Half,
}

impl From<Variant> for PathVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Quarter => PathVariant::Quarter,
            Variant::Half => PathVariant::Half,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Roots of the saddle polynomial with labels and residuals.
    Saddles,
    /// The five contour pieces J1..J5 and their sum J0.
    Integrate {
        /// Also run the real-line quadrature of J0.
        #[arg(long)]
        realline: bool,
    },
    /// Perron expansion of J2 or J4.
    Asymptotic {
        #[arg(long, value_enum)]
        which: Piece,
        /// Number of F terms kept.
        #[arg(long, default_value_t = 3)]
        terms: usize,
        #[arg(long, value_enum, default_value_t = AmplitudeMode::Printed)]
        amplitude: AmplitudeMode,
    },
    /// Contour, expansions and real line side by side.
    Compare {
        #[arg(long, value_enum)]
        skip: Vec<Skip>,
    },
    /// Compare plus pass/fail checks; exit 0 iff every enabled check passes.
    Report {
        #[arg(long, value_enum)]
        skip: Vec<Skip>,
    },
    /// psi(x) from both series, and psi0(x).
    Psi {
        #[arg(long)]
        x: String,
    },
    /// Leading form of Z0 at one t or on a grid.
    Z0 {
        #[arg(long, num_args = 3, value_names = ["A", "B", "N"])]
        grid: Option<Vec<String>>,
    },
    /// Generated series next to the printed truncation.
    Series {
        #[arg(value_enum)]
        selector: Selector,
        #[arg(long, default_value = "q1")]
        saddle: String,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Piece {
    J2,
    J4,
}

#[derive(Clone, Copy, ValueEnum)]
enum AmplitudeMode {
    Printed,
    Full,
}

impl From<AmplitudeMode> for Amplitude {
    fn from(a: AmplitudeMode) -> Self {
        match a {
            AmplitudeMode::Printed => Amplitude::Printed,
            AmplitudeMode::Full => Amplitude::Full,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Skip {
    Realline,
    Asymptotic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Selector {
    #[value(name = "q1")]
    Q1,
    #[value(name = "q2")]
    Q2,
    #[value(name = "q3")]
    Q3,
    #[value(name = "Q1")]
    NormQ1,
    #[value(name = "Q2")]
    NormQ2,
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
    #[value(name = "E")]
    E,
    #[value(name = "F")]
    F,
}

/// Why a command did not succeed, and the exit code to use.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Precision { .. } | Error::Parse(_) => 2,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// What a command produced, in each output form it supports.
struct Output {
    human: String,
    json: Value,
    csv: Option<String>,
    /// Set when a check failed; the output is still printed.
    mismatch: bool,
}

impl Output {
    fn new(human: String, json: Value) -> Self {
        Output { human, json, csv: None, mismatch: false }
    }
}

struct Ctx {
    prec: Precision,
    order: usize,
    variant: PathVariant,
    t: Option<Float>,
    tau: Option<Float>,
}

impl Ctx {
    fn new(cfg: &Config) -> Result<Self, Failure> {
        let prec = Precision::new(cfg.prec)?;
        let work = prec.with_guard(10);
        let bits = work.bits();
        let (t, tau) = match (&cfg.t, &cfg.tau) {
            (Some(t), None) => {
                let t = parse_real(t, work)?;
                if t <= 0 {
                    return Err(usage("t must be positive"));
                }
                let tau = Float::with_val(bits, Float::with_val(bits, pi(work) * 2u32) / &t).sqrt();
                (Some(t), Some(tau))
            }
            (None, Some(s)) => {
                let tau = parse_real(s, work)?;
                if tau <= 0 {
                    return Err(Failure::from(Error::domain("tau must be positive")));
                }
                let t = Float::with_val(bits, Float::with_val(bits, pi(work) * 2u32) / Float::with_val(bits, tau.square_ref()));
                (Some(t), Some(tau))
            }
            _ => (None, None),
        };
        // every evaluation sees the same tau, rounded once to the working precision
        let tau = tau.map(|x| Float::with_val(prec.bits(), x));
        Ok(Ctx {
            prec,
            order: cfg.order,
            variant: cfg.path_variant.into(),
            t,
            tau,
        })
    }

    fn tau(&self) -> Result<&Float, Failure> {
        self.tau.as_ref().ok_or_else(|| usage("this command needs exactly one of --t or --tau"))
    }

    fn t_f64(&self) -> Option<f64> {
        self.t.as_ref().map(Float::to_f64)
    }

    fn digits(&self) -> usize {
        (self.prec.digits() as usize).min(30)
    }
}

/// Replace every JSON number by its decimal string.
fn stringify(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify(v))).collect()),
        other => other,
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn complex_json(z: &BigComplex) -> Value {
    let (re, im) = z.to_decimal_strings();
    json!({ "re": re, "im": im })
}

fn quad_json(r: &QuadratureResult) -> Value {
    json!({
        "value": complex_json(&r.value),
        "error_estimate": real_to_string(&r.error_estimate),
        "evaluations": r.evaluations.to_string(),
    })
}

fn cmd_saddles(ctx: &Ctx) -> Result<Output, Failure> {
    let tau = ctx.tau()?;
    let set = solve_saddles(tau, ctx.prec)?;
    let loc = if *tau <= TAU_MAX { Some(verify_localizations(tau, ctx.prec)?) } else { None };
    let mut h = format!("tau = {}\n", tau.to_string_radix(10, Some(ctx.digits())));
    let mut csv = String::from("label,re,im,residual\n");
    for r in &set.roots {
        let label = r.label.map_or("-".to_string(), |l| l.to_string());
        let (re, im) = r.z.to_decimal_strings();
        writeln!(h, "{label:>3}  {}  residual {}", r.z.to_string_digits(ctx.digits()), sci(r.residual.to_f64())).unwrap();
        writeln!(csv, "{label},{re},{im},{}", real_to_string(&r.residual)).unwrap();
    }
    let mut json = set.to_json(ctx.prec.digits() as usize);
    if let Some(l) = &loc {
        writeln!(
            h,
            "localization: q2 {} (|q2 - i tau/2|/tau = {}), q1 {} (offset {} <= {}), q2- {}",
            pass_word(l.q2_pass),
            sci(l.q2_offset_ratio),
            pass_word(l.q1_pass),
            sci(l.q1_offset),
            sci(l.q1_bound),
            pass_word(l.q2_minus_pass)
        )
        .unwrap();
        json["localization"] = serde_json::to_value(l).unwrap();
    } else {
        h.push_str("tau > 1/4: roots are not labeled\n");
    }
    let mut out = Output::new(h, stringify(json));
    out.csv = Some(csv);
    out.mismatch = loc.is_some_and(|l| !l.all_pass());
    Ok(out)
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn components_text(c: &Components, digits: usize) -> String {
    let mut h = String::new();
    for (k, p) in c.parts.iter().enumerate() {
        writeln!(h, "J{}  {}  err {}", k + 1, p.value.to_string_digits(digits), sci(p.error_estimate.to_f64())).unwrap();
    }
    writeln!(h, "J0  {}  err {}", c.total.value.to_string_digits(digits), sci(c.total.error_estimate.to_f64())).unwrap();
    h
}

fn cmd_integrate(ctx: &Ctx, realline: bool) -> Result<Output, Failure> {
    let tau = ctx.tau()?;
    let c = eval_components(tau, ctx.prec, ctx.variant)?;
    let mut h = format!("tau = {}, path {}\n", tau.to_string_radix(10, Some(ctx.digits())), ctx.variant);
    h.push_str(&components_text(&c, ctx.digits()));
    let mut csv = String::from("name,re,im,error\n");
    let mut parts = Vec::new();
    for (k, p) in c.parts.iter().enumerate() {
        let (re, im) = p.value.to_decimal_strings();
        writeln!(csv, "J{},{re},{im},{}", k + 1, real_to_string(&p.error_estimate)).unwrap();
        parts.push(quad_json(p));
    }
    let (re, im) = c.total.value.to_decimal_strings();
    writeln!(csv, "J0,{re},{im},{}", real_to_string(&c.total.error_estimate)).unwrap();
    let mut json = json!({
        "tau": real_to_string(tau),
        "path_variant": ctx.variant.to_string(),
        "parts": parts,
        "total": quad_json(&c.total),
        "ray_length": real_to_string(&c.path.t_len),
    });
    if realline {
        let r = eval_j0_realline(tau, ctx.prec)?;
        writeln!(h, "J0 (real line)  {}  err {}", r.value.to_string_digits(ctx.digits()), sci(r.error_estimate.to_f64())).unwrap();
        let (re, im) = r.value.to_decimal_strings();
        writeln!(csv, "J0_realline,{re},{im},{}", real_to_string(&r.error_estimate)).unwrap();
        json["realline"] = quad_json(&r);
    }
    let mut out = Output::new(h, json);
    out.csv = Some(csv);
    Ok(out)
}

fn asymptotic_json(r: &AsymptoticResult) -> Value {
    stringify(serde_json::to_value(r).unwrap())
}

fn cmd_asymptotic(ctx: &Ctx, which: Piece, terms: usize, amplitude: AmplitudeMode) -> Result<Output, Failure> {
    let tau = ctx.tau()?;
    let (name, r) = match which {
        Piece::J4 => ("J4", j4_asymptotic(tau, terms, amplitude.into(), ctx.prec)?),
        Piece::J2 => ("J2", j2_asymptotic(tau, terms, ctx.prec)?),
    };
    let mut h = format!("{name} expansion at tau = {}\n", tau.to_string_radix(10, Some(ctx.digits())));
    writeln!(h, "prefactor  {}", r.prefactor.to_string_digits(ctx.digits())).unwrap();
    for (e, c) in &r.terms {
        writeln!(h, "  tau^{e}  {}", c.to_string_digits(ctx.digits())).unwrap();
    }
    writeln!(h, "  + O(tau^{})", r.truncation_exponent).unwrap();
    if let Some(v) = r.value() {
        writeln!(h, "value      {}", v.to_string_digits(ctx.digits())).unwrap();
    }
    writeln!(h, "remainder  {}", sci(r.remainder_estimate.to_f64())).unwrap();
    let mut json = asymptotic_json(&r);
    json["which"] = json!(name);
    Ok(Output::new(h, json))
}

/// One line of the discrepancy table.
struct Row {
    name: String,
    value: String,
    reference: String,
    diff: f64,
    allowance: Option<f64>,
}

impl Row {
    fn pass(&self) -> Option<bool> {
        self.allowance.map(|a| self.diff <= a)
    }
}

fn digits_to_tolerance(reference: &BigComplex, digits: f64) -> f64 {
    reference.abs().to_f64() * 10f64.powf(-digits)
}

fn printed_rows(ctx: &Ctx, c: &Components, rows: &mut Vec<Row>, asym: &[(String, AsymptoticResult)]) -> Result<(), Failure> {
    let prec = ctx.prec;
    let d = ctx.digits();
    let near = |x: Option<f64>, v: f64| x.is_some_and(|x| (x - v).abs() < 1e-12 * v);
    let mut compare = |name: String, got: &BigComplex, p: &PrintedValue, digits: f64| -> Result<(), Failure> {
        let want = p.value(prec)?;
        rows.push(Row {
            name,
            value: got.to_string_digits(d),
            reference: want.to_string_digits(d),
            diff: got.dist(&want).to_f64(),
            allowance: Some(digits_to_tolerance(&want, digits)),
        });
        Ok(())
    };
    if near(ctx.t_f64(), 1000.0) {
        compare("J0 vs printed".into(), &c.total.value, &T1000[0], 15.0)?;
        for k in 0..4 {
            compare(format!("J{} vs printed", k + 1), &c.parts[k].value, &T1000[k + 1], 15.0)?;
        }
    }
    let tau = ctx.tau()?.to_f64();
    if near(Some(tau), 0.01) {
        compare("J2 vs printed".into(), &c.parts[1].value, &TAU_HUNDREDTH[2], 15.0)?;
        compare("J4 vs printed".into(), &c.parts[3].value, &TAU_HUNDREDTH[4], 15.0)?;
        for (name, r) in asym {
            let p = if name == "J4" { &J4_ASYMPTOTIC } else { &J2_ASYMPTOTIC };
            if let Some(v) = r.value() {
                compare(format!("{name} expansion vs printed"), v, p, 20.0)?;
            }
        }
        let l = c.parts[4].value.log10_abs();
        rows.push(Row {
            name: "log10|J5|".into(),
            value: format!("{l:.3}"),
            reference: "-1336.13".into(),
            diff: (l + 1336.13).abs(),
            allowance: Some(0.5),
        });
    }
    Ok(())
}

/// Past this tau the ends of the q1 segment, not the dropped terms, limit
/// the J4 expansion, so its row is shown without a verdict.
const J4_CHECK_TAU_MAX: f64 = 0.125;

fn discrepancies(ctx: &Ctx, skip: &[Skip], checks: bool) -> Result<(Components, Vec<Row>), Failure> {
    let tau = ctx.tau()?;
    let d = ctx.digits();
    let c = eval_components(tau, ctx.prec, ctx.variant)?;
    let mut rows = Vec::new();
    let mut asym = Vec::new();
    if !skip.contains(&Skip::Asymptotic) {
        let j4p = j4_asymptotic(tau, 3, Amplitude::Printed, ctx.prec)?;
        let j4 = j4_asymptotic(tau, 3, Amplitude::Full, ctx.prec)?;
        let j2 = j2_asymptotic(tau, 3, ctx.prec)?;
        let t = tau.to_f64();
        let c4 = &c.parts[3];
        let v4 = j4.value().unwrap();
        rows.push(Row {
            name: "J4 expansion vs contour".into(),
            value: v4.to_string_digits(d),
            reference: c4.value.to_string_digits(d),
            diff: v4.dist(&c4.value).to_f64(),
            allowance: (t <= J4_CHECK_TAU_MAX).then(|| 2.0 * j4.remainder_estimate.to_f64() + c4.error_estimate.to_f64()),
        });
        let c2 = &c.parts[1];
        let v2 = j2.value().unwrap();
        // the segment endpoints add an e^(-1/(4 tau)) effect the expansion does not see
        let endpoint = (-0.25 / t).exp() * c2.value.abs().to_f64();
        rows.push(Row {
            name: "J2 expansion vs contour".into(),
            value: v2.to_string_digits(d),
            reference: c2.value.to_string_digits(d),
            diff: v2.dist(&c2.value).to_f64(),
            allowance: Some(2.0 * j2.remainder_estimate.to_f64() + endpoint + c2.error_estimate.to_f64()),
        });
        asym.push(("J4".to_string(), j4p));
        asym.push(("J2".to_string(), j2));
    }
    if !skip.contains(&Skip::Realline) && tau.to_f64() >= REALLINE_TAU_MIN {
        let r = eval_j0_realline(tau, ctx.prec)?;
        rows.push(Row {
            name: "J0 contour vs real line".into(),
            value: c.total.value.to_string_digits(d),
            reference: r.value.to_string_digits(d),
            diff: c.total.value.dist(&r.value).to_f64(),
            allowance: Some(Float::with_val(64, &c.total.error_estimate + &r.error_estimate).to_f64()),
        });
    }
    if checks {
        printed_rows(ctx, &c, &mut rows, &asym)?;
    }
    Ok((c, rows))
}

fn table(rows: &[Row]) -> String {
    let mut h = String::new();
    for r in rows {
        let status = match r.pass() {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "",
        };
        writeln!(h, "{:<28} {}", r.name, r.value).unwrap();
        writeln!(
            h,
            "{:<28} {}\n{:<28} |diff| {} allowance {} {status}",
            "",
            r.reference,
            "",
            sci(r.diff),
            r.allowance.map_or("-".into(), sci)
        )
        .unwrap();
    }
    h
}

fn rows_json(rows: &[Row]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "value": r.value,
                    "reference": r.reference,
                    "difference": sci(r.diff),
                    "allowance": r.allowance.map(sci),
                    "pass": r.pass(),
                })
            })
            .collect(),
    )
}

fn rows_csv(rows: &[Row]) -> String {
    let mut s = String::from("name,value,reference,difference,allowance,pass\n");
    for r in rows {
        let pass = r.pass().map_or(String::new(), |p| p.to_string());
        writeln!(
            s,
            "{},\"{}\",\"{}\",{},{},{pass}",
            r.name,
            r.value,
            r.reference,
            sci(r.diff),
            r.allowance.map_or(String::new(), sci)
        )
        .unwrap();
    }
    s
}

fn cmd_compare(ctx: &Ctx, skip: &[Skip]) -> Result<Output, Failure> {
    let (c, rows) = discrepancies(ctx, skip, false)?;
    let mut h = components_text(&c, ctx.digits());
    h.push('\n');
    h.push_str(&table(&rows));
    let json = json!({
        "tau": real_to_string(ctx.tau()?),
        "parts": c.parts.iter().map(quad_json).collect::<Vec<_>>(),
        "total": quad_json(&c.total),
        "rows": rows_json(&rows),
    });
    let mut out = Output::new(h, json);
    out.csv = Some(rows_csv(&rows));
    Ok(out)
}

fn cmd_report(ctx: &Ctx, skip: &[Skip]) -> Result<Output, Failure> {
    let tau = ctx.tau()?;
    let set = solve_saddles(tau, ctx.prec)?;
    let loc = verify_localizations(tau, ctx.prec)?;
    let (c, mut rows) = discrepancies(ctx, skip, true)?;
    let residual_cap = 10f64.powi(-(ctx.prec.digits() as i32 - 10));
    rows.insert(
        0,
        Row {
            name: "saddle residual".into(),
            value: sci(set.max_residual().to_f64()),
            reference: "0".into(),
            diff: set.max_residual().to_f64(),
            allowance: Some(residual_cap),
        },
    );
    rows.insert(
        1,
        Row {
            name: "saddle localization".into(),
            value: pass_word(loc.all_pass()).into(),
            reference: "pass".into(),
            diff: if loc.all_pass() { 0.0 } else { 1.0 },
            allowance: Some(0.0),
        },
    );
    let failed = rows.iter().filter(|r| r.pass() == Some(false)).count();
    let mut h = components_text(&c, ctx.digits());
    h.push('\n');
    h.push_str(&table(&rows));
    let checked = rows.iter().filter(|r| r.pass().is_some()).count();
    writeln!(h, "\n{} of {checked} checks pass", checked - failed).unwrap();
    let json = json!({
        "tau": real_to_string(tau),
        "parts": c.parts.iter().map(quad_json).collect::<Vec<_>>(),
        "total": quad_json(&c.total),
        "rows": rows_json(&rows),
        "passed": failed == 0,
    });
    let mut out = Output::new(h, json);
    out.csv = Some(rows_csv(&rows));
    out.mismatch = failed > 0;
    Ok(out)
}

fn cmd_psi(ctx: &Ctx, x: &str) -> Result<Output, Failure> {
    let x = parse_real(x, ctx.prec)?;
    let e = psi(&x, ctx.prec)?;
    let p0 = psi0(&x, ctx.prec)?;
    let d = ctx.digits();
    let ok = e.consistent(ctx.prec);
    let h = format!(
        "x = {}\npsi (theta sum, {} terms)  {}\npsi (dual sum, {} terms)   {}\npsi0                       {}\nsums agree: {}\n",
        x.to_string_radix(10, Some(d)),
        e.terms_used.0,
        e.value_theta.re().to_string_radix(10, Some(d)),
        e.terms_used.1,
        e.value_dual.re().to_string_radix(10, Some(d)),
        p0.re().to_string_radix(10, Some(d)),
        ok
    );
    let json = json!({
        "x": real_to_string(&x),
        "value_theta": real_to_string(e.value_theta.re()),
        "value_dual": real_to_string(e.value_dual.re()),
        "terms_used": [e.terms_used.0.to_string(), e.terms_used.1.to_string()],
        "psi0": real_to_string(p0.re()),
        "consistent": ok,
    });
    let mut out = Output::new(h, json);
    out.csv = Some(format!(
        "x,psi_theta,psi_dual,psi0\n{},{},{},{}\n",
        real_to_string(&x),
        real_to_string(e.value_theta.re()),
        real_to_string(e.value_dual.re()),
        real_to_string(p0.re())
    ));
    out.mismatch = !ok;
    Ok(out)
}

fn parse_f64(s: &str, what: &str) -> Result<f64, Failure> {
    s.parse().map_err(|_| usage(format!("{what}: not a number: {s:?}")))
}

fn cmd_z0(ctx: &Ctx, grid: Option<&[String]>) -> Result<Output, Failure> {
    if let Some(g) = grid {
        let a = parse_f64(&g[0], "grid start")?;
        let b = parse_f64(&g[1], "grid end")?;
        let n: usize = g[2].parse().map_err(|_| usage(format!("grid size: not a count: {:?}", g[2])))?;
        let pts = z0_grid(a, b, n)?;
        let changes = z0_sign_changes(a, b, n)?;
        let predicted = z0_phase_count(a, b)?;
        let mut csv = String::from("t,z0\n");
        for (t, z) in &pts {
            writeln!(csv, "{t},{z}").unwrap();
        }
        let h = format!(
            "{n} samples on [{a}, {b}]: {changes} sign changes, {predicted:.2} predicted by the phase\n"
        );
        let json = json!({
            "grid": pts.iter().map(|(t, z)| json!([t.to_string(), z.to_string()])).collect::<Vec<_>>(),
            "sign_changes": changes.to_string(),
            "phase_count": predicted.to_string(),
        });
        let mut out = Output::new(h, json);
        out.csv = Some(csv);
        return Ok(out);
    }
    let t = ctx.t_f64().ok_or_else(|| usage("z0 needs --t (or --tau) or --grid"))?;
    let z = z0_leading(t)?;
    let mut out = Output::new(format!("z0({t}) = {z}\n"), json!({ "t": t.to_string(), "z0": z.to_string() }));
    out.csv = Some(format!("t,z0\n{t},{z}\n"));
    Ok(out)
}

fn series_id(selector: Selector, saddle: Which, n: Option<usize>) -> Result<Option<SeriesId>, Failure> {
    Ok(Some(match selector {
        Selector::Q1 => SeriesId::Saddle(Which::Q1),
        Selector::Q2 => SeriesId::Saddle(Which::Q2),
        Selector::Q3 => SeriesId::Saddle(Which::Q3),
        Selector::NormQ1 => SeriesId::Normalized(Which::Q1),
        Selector::NormQ2 => SeriesId::Normalized(Which::Q2),
        Selector::A => {
            let n = n.unwrap_or(2);
            if n < 2 {
                return Err(usage("A_n needs n >= 2"));
            }
            SeriesId::A(saddle, n)
        }
        Selector::B => SeriesId::B(n.unwrap_or(0)),
        Selector::E => SeriesId::E(saddle),
        Selector::F => return Ok(None),
    }))
}

/// Printed coefficients differing from the generated ones by more than this are flagged.
const SERIES_TOLERANCE: f64 = 1e-6;

fn cmd_series(ctx: &Ctx, selector: Selector, saddle: &str, n: Option<usize>) -> Result<Output, Failure> {
    let saddle: Which = saddle.parse()?;
    if saddle == Which::Q3 && matches!(selector, Selector::A | Selector::E | Selector::F) {
        return Err(usage("A, E and F are defined at q1 and q2"));
    }
    let d = 15usize;
    let Some(id) = series_id(selector, saddle, n)? else {
        let f = f_series(saddle, 3, ctx.order, ctx.prec)?;
        let tau = ctx.tau.as_ref().map_or(0.05, Float::to_f64);
        let cmp = compare_f(saddle, tau, ctx.order.max(24), ctx.prec.with_guard(0))?;
        let mut h = format!("F({saddle}) from three Perron terms:\n{f:.15}\n");
        writeln!(
            h,
            "at tau = {tau}: generated {:.15e}{:+.15e}i, printed form {:.15e}{:+.15e}i, |diff| {} (first omitted {}) {}",
            cmp.generated.0,
            cmp.generated.1,
            cmp.printed.0,
            cmp.printed.1,
            sci(cmp.difference),
            sci(cmp.omitted_term),
            pass_word(cmp.within_omitted())
        )
        .unwrap();
        let json = json!({ "series": f.to_json(), "comparison": stringify(serde_json::to_value(&cmp).unwrap()) });
        let mut out = Output::new(h, stringify(json));
        out.mismatch = !cmp.within_omitted();
        return Ok(out);
    };
    let printed = printed_series(id).ok();
    // raise the order until every printed term is generated
    let mut order = ctx.order;
    let mut g = generated_series(id, order, ctx.prec)?;
    while let Some(p) = &printed {
        if g.trunc_order() >= p.omitted || order >= ctx.order + 40 {
            break;
        }
        order += 2;
        g = generated_series(id, order, ctx.prec)?;
    }
    let mut h = String::new();
    let mut terms = Vec::new();
    let mut flagged = 0;
    for (e, c) in g.nonzero_terms() {
        let p = printed.as_ref().filter(|p| e < p.omitted).map(|p| p.coeff(e));
        let (re, im) = c.to_f64_pair();
        let diff = p.map(|p| (num_complex::Complex64::new(re, im) - p).norm());
        let flag = diff.is_some_and(|x| x > SERIES_TOLERANCE);
        flagged += flag as usize;
        write!(h, "tau^{e:<5} {}", c.to_string_digits(d)).unwrap();
        if let Some(p) = p {
            write!(h, "   printed {:.15e}{:+.15e}i", p.re, p.im).unwrap();
        }
        if flag {
            write!(h, "   MISMATCH {}", sci(diff.unwrap())).unwrap();
        }
        h.push('\n');
        let (sre, sim) = c.to_decimal_strings();
        terms.push(json!({
            "exponent": e.to_string(),
            "re": sre,
            "im": sim,
            "printed": p.map(|p| json!({ "re": p.re.to_string(), "im": p.im.to_string() })),
            "mismatch": flag,
        }));
    }
    writeln!(h, "+ O(tau^{})", g.trunc_order()).unwrap();
    if let Some(p) = &printed {
        // printed terms the chosen order does not reach
        let beyond: Vec<String> = p.terms.iter().filter(|(e, _)| *e >= g.trunc_order()).map(|(e, _)| e.to_string()).collect();
        if !beyond.is_empty() {
            writeln!(h, "printed terms past the truncation (raise --order): tau^{}", beyond.join(", tau^")).unwrap();
        }
    } else {
        h.push_str("no printed counterpart\n");
    }
    if flagged > 0 {
        writeln!(h, "{flagged} coefficient(s) differ from print by more than {SERIES_TOLERANCE:e}").unwrap();
    }
    let json = json!({
        "terms": terms,
        "trunc_order": g.trunc_order().to_string(),
        "mismatches": flagged.to_string(),
    });
    let mut out = Output::new(h, json);
    out.mismatch = flagged > 0;
    Ok(out)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let ctx = Ctx::new(&cli.cfg)?;
    match &cli.cmd {
        Command::Saddles => cmd_saddles(&ctx),
        Command::Integrate { realline } => cmd_integrate(&ctx, *realline),
        Command::Asymptotic { which, terms, amplitude } => cmd_asymptotic(&ctx, *which, *terms, *amplitude),
        Command::Compare { skip } => cmd_compare(&ctx, skip),
        Command::Report { skip } => cmd_report(&ctx, skip),
        Command::Psi { x } => cmd_psi(&ctx, x),
        Command::Z0 { grid } => cmd_z0(&ctx, grid.as_deref()),
        Command::Series { selector, saddle, n } => cmd_series(&ctx, *selector, saddle, *n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = if cli.cfg.json {
                serde_json::to_string_pretty(&out.json).unwrap() + "\n"
            } else if cli.cfg.csv {
                match out.csv {
                    Some(c) => c,
                    None => {
                        eprintln!("error: csv output is not available for this command");
                        return ExitCode::from(2);
                    }
                }
            } else {
                out.human
            };
            // a closed pipe is not an error worth reporting
            let _ = std::io::stdout().write_all(text.as_bytes());
            if out.mismatch {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
