//! One function per subcommand. Each takes the parsed input document and
//! returns the report body plus the first violated invariant, if any.

use almostperiods_core::eldiv::EldivSeq;
use almostperiods_core::koszul::{full_table, CohomTable};
use almostperiods_core::module::{approx_eq, exact_sequence_check, witness_maps, ModuleMap};
use almostperiods_core::rational::{fmt_q_short, qi};
use almostperiods_core::snf::smith_normal_form;
use almostperiods_core::tower::{frobenius_tower_check, Perturbation};
use almostperiods_core::witt::period::{divide_by_xi, epsilon_root, xi, BdrElem, BdrRing, Division, Truth};
use almostperiods_core::witt::WittRing;
use almostperiods_core::zpm::{self, ZpmMatrix};
use almostperiods_core::{BaseRing, Error, ModelParams, Result, Q};
use serde_json::{json, Map, Value};

use crate::json::*;
use crate::suites::{run_suite, SuiteSizes, SUITES};

/// Settings shared by every command.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub params: Option<ModelParams>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub body: Map<String, Value>,
    /// Name of the first violated invariant; the process then exits with 1.
    pub failed: Option<String>,
}

impl Outcome {
    fn new(body: Value) -> Self {
        match body {
            Value::Object(m) => Self { body: m, failed: None },
            other => {
                let mut m = Map::new();
                m.insert("result".into(), other);
                Self { body: m, failed: None }
            }
        }
    }

    fn check(mut self, ok: bool, invariant: &str) -> Self {
        if !ok && self.failed.is_none() {
            self.failed = Some(invariant.to_string());
        }
        self
    }
}

pub const DEFAULT_CELL_BUDGET: u64 = 1 << 20;

/// `p = 2, s = 1, L = 1, N = 8, m = 2, d = 1` unless given.
pub fn params_or_default(ctx: &Context) -> ModelParams {
    ctx.params.unwrap_or_else(|| ModelParams::new(2, 1, 1, qi(8), 2, 1).expect("valid defaults"))
}

fn field<'a>(input: &'a Value, key: &str) -> Result<&'a Value> {
    input.get(key).ok_or_else(|| bad(&format!("input needs \"{key}\"")))
}

fn opt_q(input: &Value, key: &str) -> Result<Option<Q>> {
    input.get(key).map(parse_q_value).transpose()
}

fn with_params(mut o: Outcome, p: &ModelParams) -> Outcome {
    o.body.insert("params".into(), params_json(p));
    o
}

/// Reruns `f` at `2N, 4N, 8N` after a precision failure without an
/// estimate, and reports the first precision that worked.
fn with_precision_estimate<T>(params: ModelParams, f: impl Fn(ModelParams) -> Result<T>) -> Result<T> {
    match f(params) {
        Err(Error::PrecisionExhausted { needed: None }) => {
            for k in 1..=3 {
                let mut bigger = params;
                bigger.prec = params.prec * Q::from(1 << k);
                if bigger.validate().is_ok() && f(bigger).is_ok() {
                    return Err(Error::PrecisionExhausted { needed: Some(bigger.prec) });
                }
            }
            Err(Error::PrecisionExhausted { needed: None })
        }
        other => other,
    }
}

pub fn eldiv(input: &Value, _ctx: &Context) -> Result<Outcome> {
    let a = eldiv_from_json(input.get("a").unwrap_or(input))?;
    let eps = opt_q(input, "eps")?;
    let summary = |s: &EldivSeq| {
        json!({
            "entries": eldiv_json(s),
            "lambda": q_str(s.lambda()),
            "norm": q_str(s.norm()),
            "almost_zero": s.is_empty(),
        })
    };
    let mut body = json!({ "a": summary(&a) });
    if let Some(e) = eps {
        if e < Q::from(0) {
            return Err(Error::InvalidParams("eps must be nonnegative".into()));
        }
        body["shift_a"] = eldiv_json(&a.shift_eps(e));
    }
    if let Some(bv) = input.get("b") {
        let b = eldiv_from_json(bv)?;
        body["b"] = summary(&b);
        body["linf_dist"] = json!(q_str(a.linf_dist(&b)));
        body["a_majorizes_b"] = json!(a.majorizes(&b));
        body["b_majorizes_a"] = json!(b.majorizes(&a));
        body["indexwise_sum"] = eldiv_json(&a.indexwise_sum(&b));
        body["merge"] = eldiv_json(&a.merge_sorted(&b));
        if let Some(e) = eps {
            body["approx_eq"] = json!(a.linf_dist(&b) <= e);
        }
    }
    Ok(Outcome::new(body))
}

pub fn snf(input: &Value, ctx: &Context) -> Result<Outcome> {
    let params = params_or_default(ctx);
    let a = matrix_from_json(params.base(), input.get("matrix").unwrap_or(input))?;
    let s = smith_normal_form(&a)?;
    let c = s.cokernel();
    let diagonal: Vec<Value> =
        s.diagonal().into_iter().map(|g| g.map_or_else(|| json!("inf"), |g| json!(q_str(g)))).collect();
    let mut body = json!({
        "divisors": eldiv_json(&c.torsion),
        "free_rank": c.free_rank,
        "rank": s.rank(),
        "diagonal": diagonal,
        "normal_form": matrix_json(&s.d),
    });
    let mut det_ok = true;
    if a.rows() == a.cols() && c.free_rank == 0 {
        let v = a.det_valuation()?;
        body["det_valuation"] = json!(q_str(v));
        det_ok = v == c.torsion.lambda();
    }
    let out = Outcome::new(body).check(det_ok, "lambda equals v(det)");
    Ok(with_params(out, &params))
}

fn exactness_body(f: &ModuleMap, g: &ModuleMap) -> Result<Outcome> {
    let r = exact_sequence_check(f, g)?;
    let body = json!({
        "exact": r.exact,
        "injective": r.injective,
        "middle_exact": r.middle_exact,
        "surjective": r.surjective,
        "lambda": {"lhs": q_str(r.lambda_lhs), "rhs": q_str(r.lambda_rhs)},
        "majorization": r.majorization,
        "failing_homology": r.failing_homology.as_ref().map(eldiv_json),
    });
    let position = if !r.injective {
        "exactness at the left term"
    } else if !r.middle_exact {
        "exactness at the middle term"
    } else {
        "exactness at the right term"
    };
    Ok(Outcome::new(body)
        .check(r.exact, position)
        .check(r.lambda_lhs == r.lambda_rhs, "lambda additive on exact sequences")
        .check(r.majorization, "gamma(M) majorized by gamma(M') + gamma(M'')"))
}

pub fn module(input: &Value, ctx: &Context) -> Result<Outcome> {
    let params = params_or_default(ctx);
    let base = params.base();
    let op = input.get("op").and_then(Value::as_str).unwrap_or("exact");
    let o = match op {
        "exact" => {
            let f = map_from_json(base, field(input, "f")?)?;
            let g = map_from_json(base, field(input, "g")?)?;
            exactness_body(&f, &g)?
        }
        "homology" => {
            let f = map_from_json(base, field(input, "f")?)?;
            let g = map_from_json(base, field(input, "g")?)?;
            Outcome::new(json!({"homology": eldiv_json(&ModuleMap::homology(&f, &g)?)}))
        }
        "cokernel" => {
            let f = map_from_json(base, field(input, "f")?)?;
            Outcome::new(json!({"cokernel": module_json(&f.cokernel()?), "image": eldiv_json(&f.image_divisors()?)}))
        }
        "approx" => {
            let m = module_from_json(field(input, "m")?)?;
            let n = module_from_json(field(input, "n")?)?;
            let eps = parse_q_value(field(input, "eps")?)?;
            let decided = approx_eq(&m, &n, eps);
            let witnesses = witness_maps(base, &m, &n, eps)?;
            let mut body = json!({
                "approx_eq": decided,
                "linf_dist": q_str(m.divisors().linf_dist(&n.divisors())),
            });
            let mut ok = decided == witnesses.is_some();
            if let Some((f, g)) = &witnesses {
                body["f"] = map_json(f);
                body["g"] = map_json(g);
                let gf = g.compose(f)?.same_map(&ModuleMap::scalar(base, &m, eps)?);
                let fg = f.compose(g)?.same_map(&ModuleMap::scalar(base, &n, eps)?);
                ok &= gf && fg;
            }
            Outcome::new(body).check(ok, "witness maps compose to t^eps")
        }
        "dual" => {
            let m = module_from_json(field(input, "m")?)?;
            Outcome::new(json!({"dual": module_json(&m.dual())}))
        }
        "divisors" => {
            let m = module_from_json(field(input, "m")?)?;
            let d = m.divisors();
            Outcome::new(json!({
                "divisors": eldiv_json(&d),
                "lambda": q_str(d.lambda()),
                "almost_zero": m.is_almost_zero(),
            }))
        }
        other => return Err(bad(&format!("unknown module op {other:?}"))),
    };
    let mut o = with_params(o, &params);
    o.body.insert("op".into(), json!(op));
    Ok(o)
}

fn perturbation(name: &str) -> Result<Perturbation> {
    match name {
        "none" => Ok(Perturbation::None),
        "wrong-q" | "wrong_q" => Ok(Perturbation::WrongQ),
        "broken-exactness" | "broken_exactness" => Ok(Perturbation::BrokenExactness),
        "broken-phi" | "broken_phi" => Ok(Perturbation::BrokenPhi),
        other => Err(bad(&format!("unknown perturbation {other:?}"))),
    }
}

pub fn tower(input: &Value, ctx: &Context) -> Result<Outcome> {
    let int = |key: &str, default: u64| input.get(key).and_then(Value::as_u64).unwrap_or(default);
    let p = int("p", ctx.params.map_or(2, |x| x.p as u64)) as u32;
    let r = int("r", 2) as usize;
    let kmax = int("kmax", (p * p) as u64) as u32;
    let pert = perturbation(input.get("perturbation").and_then(Value::as_str).unwrap_or("none"))?;
    let rep = frobenius_tower_check(p, r, kmax, pert)?;
    let checks: Vec<Value> =
        rep.checks.iter().map(|(c, k, ok)| json!({"check": c.name(), "k": k, "passed": ok})).collect();
    let mut o = Outcome::new(json!({
        "p": p, "r": r, "kmax": kmax,
        "perturbation": format!("{pert:?}"),
        "all_passed": rep.all_passed(),
        "checks": checks,
    }));
    if let Some((c, k)) = rep.first_failure() {
        o.failed = Some(format!("{} (k = {k})", c.name()));
    }
    Ok(o)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeriodVerb {
    Xi,
    DivXi,
    LogEps,
    BdrEq,
}

fn bdr_from_json(ring: &BdrRing, v: &Value) -> Result<BdrElem> {
    let num = witt_from_json(&ring.witt, v)?;
    let pshift = v.get("pshift").and_then(Value::as_u64).unwrap_or(0) as u32;
    Ok(BdrElem { num, pshift })
}

fn bdr_json(ring: &BdrRing, e: &BdrElem) -> Value {
    let mut v = witt_json(&e.num);
    v["pshift"] = json!(e.pshift);
    v["d"] = json!(ring.d);
    v
}

fn periods_at(verb: PeriodVerb, input: &Value, params: ModelParams) -> Result<Outcome> {
    let w = WittRing::new(params)?;
    let x = xi(&w)?;
    let o = match verb {
        PeriodVerb::Xi => {
            let eps = w.teichmuller(&epsilon_root(&w, 0)?)?;
            let eps_p = w.teichmuller(&epsilon_root(&w, 1)?)?;
            let lhs = w.sub(&eps, &w.one())?;
            let rhs = w.mul(&x, &w.sub(&eps_p, &w.one())?)?;
            let ok = lhs.agrees_with(&rhs);
            Outcome::new(json!({"xi": witt_json(&x), "factorization_holds": ok}))
                .check(ok, "[eps] - 1 = xi ([eps^(1/p)] - 1)")
        }
        PeriodVerb::DivXi => {
            let y = witt_from_json(&w, field(input, "y")?)?;
            match divide_by_xi(&w, &x, &y)? {
                Division::Quotient(qt) => {
                    let back = w.mul(&qt, &x)?;
                    let ok = back.agrees_with(&y);
                    Outcome::new(json!({"divisible": true, "quotient": witt_json(&qt)}))
                        .check(ok, "quotient times xi recovers y")
                }
                Division::Obstruction { index } => {
                    Outcome::new(json!({"divisible": false, "obstruction_index": index}))
                }
            }
        }
        PeriodVerb::LogEps => {
            let r = BdrRing::new(w)?;
            let l = r.log_epsilon()?;
            let (order, _) = r.xi_adic_order(&l.num, r.d)?;
            let want = if r.d >= 2 { 1 } else { r.d };
            Outcome::new(json!({"log_eps": bdr_json(&r, &l), "xi_adic_order": order}))
                .check(order == want, "log[eps] generates Fil^1 / Fil^2")
        }
        PeriodVerb::BdrEq => {
            let r = BdrRing::new(w)?;
            let a = bdr_from_json(&r, field(input, "a")?)?;
            let b = bdr_from_json(&r, field(input, "b")?)?;
            let t = match r.eq(&a, &b) {
                Truth::True => "true",
                Truth::False => "false",
                Truth::Indeterminate => "indeterminate",
            };
            Outcome::new(json!({"equal": t}))
        }
    };
    Ok(o)
}

pub fn periods(verb: PeriodVerb, input: &Value, ctx: &Context) -> Result<Outcome> {
    let params = params_or_default(ctx);
    let o = with_precision_estimate(params, |p| periods_at(verb, input, p))?;
    Ok(with_params(o, &params))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinalgVerb {
    Howell,
    Kernel,
    Cohomology,
}

pub fn linalg(verb: LinalgVerb, input: &Value, _ctx: &Context) -> Result<Outcome> {
    let int = |key: &str| {
        input
            .get(key)
            .and_then(Value::as_u64)
            .map(|x| x as u32)
            .ok_or_else(|| bad(&format!("input needs integer \"{key}\"")))
    };
    let (p, m) = (int("p")?, int("m")?);
    let mat = |key: &str| -> Result<ZpmMatrix> { zpm_from_json(p, m, field(input, key)?) };
    let o = match verb {
        LinalgVerb::Howell => {
            let a = mat("matrix")?;
            let h = zpm::howell_form(&a);
            let ok = h.u.mul(&a)? == h.h;
            Outcome::new(json!({
                "howell": zpm_json(&h.h),
                "transform": zpm_json(&h.u),
                "pivots": h.pivots,
                "span_log": h.span_log(),
            }))
            .check(ok, "H = U A")
        }
        LinalgVerb::Kernel => {
            let a = mat("matrix")?;
            let k = zpm::kernel_basis(&a);
            let ok = a.mul(&k.transpose())?.is_zero();
            Outcome::new(json!({"kernel": zpm_json(&k)})).check(ok, "A K^T = 0")
        }
        LinalgVerb::Cohomology => {
            let t = zpm::cohomology(&mat("d_in")?, &mat("d_out")?)?;
            Outcome::new(module_type_json(&t))
        }
    };
    Ok(o)
}

/// `"a..b"`, `"a-b"`, `"a:b"` or a single degree.
pub fn parse_q_range(s: &str) -> Result<(usize, usize)> {
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad(&format!("bad degree range {s:?}")));
    for sep in ["..=", "..", "-", ":"] {
        if let Some((a, b)) = s.split_once(sep) {
            return Ok((num(a)?, num(b)?));
        }
    }
    let q = num(s)?;
    Ok((q, q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KoszulArgs {
    pub n: usize,
    pub level: u32,
    pub m: u32,
    pub p: u32,
    pub degrees: Option<(usize, usize)>,
}

pub fn table_json(t: &CohomTable) -> Value {
    let mut rows = Vec::new();
    for line in &t.lines {
        for (q, h) in &line.cohomology {
            let r = line_module_json(h);
            rows.push(json!({
                "tuple": line.tuple.iter().map(|&x| fmt_q_short(x)).collect::<Vec<_>>(),
                "q": q,
                "orders": r["orders"],
                "free_rank": r["free_rank"],
            }));
        }
    }
    let s = &t.summary;
    json!({
        "p": t.p, "n": t.n, "L": t.level, "m": t.m,
        "degrees": t.degrees,
        "rows": rows,
        "summary": {
            "integral_ranks_ok": s.integral_ranks_ok,
            "annihilation_ok": s.annihilation_ok,
            "closed_form_ok": s.closed_form_ok,
            "survivors": s.survivors.iter().map(|(e, c)| json!({"eps": q_str(*e), "lines": c})).collect::<Vec<_>>(),
        },
    })
}

pub fn koszul(args: KoszulArgs, ctx: &Context) -> Result<Outcome> {
    let budget = ctx.budget.unwrap_or(DEFAULT_CELL_BUDGET);
    let t = full_table(args.n, args.level, args.m, args.p, args.degrees, budget)?;
    let s = &t.summary;
    Ok(Outcome::new(table_json(&t))
        .check(s.integral_ranks_ok, "integral line has free rank binom(n, q)")
        .check(s.annihilation_ok, "zeta_{p^l} - 1 annihilates each nonintegral line")
        .check(s.closed_form_ok, "matrix cohomology equals the closed form"))
}

pub fn as_solve(input: &Value, ctx: &Context) -> Result<Outcome> {
    let params = params_or_default(ctx);
    let base: BaseRing = params.base();
    let a = series_from_json(base, field(input, "a")?)?;
    let x = a.artin_schreier_solve()?;
    let lhs = x.pow(params.p as u64).sub(&x)?;
    let ok = lhs.agrees_with(&a);
    let o = Outcome::new(json!({
        "a": a.to_string(),
        "x": x.to_string(),
        "guaranteed_precision": q_str(x.prec()),
    }))
    .check(ok, "x^p - x = a");
    Ok(with_params(o, &params))
}

/// Randomized suites need a seed; the deterministic ones run without.
pub fn check(suite: &str, ctx: &Context) -> Result<Outcome> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let randomized = ["snf", "exact", "metric", "shift", "xi", "as"];
    let seed = match ctx.seed {
        Some(s) => s,
        None if names.iter().all(|n| !randomized.contains(n)) => 0,
        None => return Err(bad("--seed is required for randomized suites")),
    };
    let mut results = Vec::new();
    let mut failed = Vec::new();
    for name in names {
        let r = run_suite(name, seed, SuiteSizes::default())?;
        if !r.passed {
            failed.push(format!("{}: {}", r.name, r.invariant));
        }
        results.push(r.to_json());
    }
    let mut o = Outcome::new(json!({"seed": seed, "suite": suite, "passed": failed.is_empty(), "suites": results}));
    if !failed.is_empty() {
        o.failed = Some(failed.join("; "));
    }
    Ok(o)
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParams(_) => "invalid_params",
        Error::ParameterMismatch => "parameter_mismatch",
        Error::LevelOverflow { .. } => "level_overflow",
        Error::PrecisionExhausted { .. } => "precision_exhausted",
        Error::NonPositiveValuation => "non_positive_valuation",
        Error::AllZero => "all_zero",
        Error::NotDivisible => "not_divisible",
        Error::NotAComplex => "not_a_complex",
        Error::IllDefinedMap { .. } => "ill_defined_map",
        Error::ShapeMismatch(_) => "shape_mismatch",
        Error::WittTableTooLarge { .. } => "witt_table_too_large",
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::PshiftOverflow => "pshift_overflow",
        Error::Parse(_) => "malformed_input",
        Error::Unsupported(_) => "unsupported",
    }
}

/// The full report and exit status for a finished job.
pub fn report(command: &str, result: Result<Outcome>) -> (Value, i32) {
    let mut body = Map::new();
    match result {
        Ok(o) => {
            let code = if o.failed.is_some() { 1 } else { 0 };
            body.insert("status".into(), json!(if code == 0 { "ok" } else { "check_failed" }));
            if let Some(f) = &o.failed {
                body.insert("failed_invariant".into(), json!(f));
            }
            body.extend(o.body);
            (envelope(command, body), code)
        }
        Err(e) => {
            let mut err = json!({"kind": error_kind(&e), "message": e.to_string()});
            if let Error::PrecisionExhausted { needed: Some(n) } = e {
                err["needed_N"] = json!(q_str(n));
            }
            body.insert("status".into(), json!("error"));
            body.insert("error".into(), err);
            (envelope(command, body), 2)
        }
    }
}

/// Rejects documents with a foreign `schema_version`.
pub fn check_schema(input: &Value) -> Result<()> {
    match input.get("schema_version") {
        None => Ok(()),
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(bad(&format!("schema_version {v} is not supported (expected {SCHEMA_VERSION})"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_ranges() {
        assert_eq!(parse_q_range("0..2").unwrap(), (0, 2));
        assert_eq!(parse_q_range("1-3").unwrap(), (1, 3));
        assert_eq!(parse_q_range("2").unwrap(), (2, 2));
        assert!(parse_q_range("x").is_err());
    }

    #[test]
    fn schema_versions() {
        assert!(check_schema(&json!({})).is_ok());
        assert!(check_schema(&json!({"schema_version": 1})).is_ok());
        assert!(check_schema(&json!({"schema_version": 2})).is_err());
    }

    #[test]
    fn error_reports_exit_two() {
        let (v, code) = report("snf", Err(Error::PrecisionExhausted { needed: Some(qi(16)) }));
        assert_eq!(code, 2);
        assert_eq!(v["error"]["needed_N"], json!("16"));
        assert_eq!(v["schema_version"], json!(1));
    }

    #[test]
    fn seed_is_required_for_random_suites() {
        assert!(check("snf", &Context::default()).is_err());
        assert!(check("findiff", &Context::default()).unwrap().failed.is_none());
    }

    #[test]
    fn perturbed_tower_names_the_invariant() {
        let o = tower(&json!({"p": 2, "r": 1, "kmax": 2, "perturbation": "wrong-q"}), &Context::default()).unwrap();
        assert!(o.failed.unwrap().starts_with("p_k q_k = t"));
    }

    #[test]
    fn artin_schreier_job() {
        let o = as_solve(&json!({"a": "t^(1/2)"}), &Context::default()).unwrap();
        assert!(o.failed.is_none());
        let e = as_solve(&json!({"a": "1+t"}), &Context::default());
        assert_eq!(e.unwrap_err(), Error::NonPositiveValuation);
    }
}
