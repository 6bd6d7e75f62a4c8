//! The subcommands. Each returns an [`Outcome`]; exit status follows from the report.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use num_traits::{One, Zero};

use wnaforge_core::flows::{check_commute, verify_identity, CommuteStatus, FlowKey, FlowSystem};
use wnaforge_core::jets::{
    composed_ring, elementary, elementary_from_power_sums, hat_operator, linear_solution, phi_solution, residual_deformation,
    residual_disguise, residual_pkp, residual_riccati, residual_sato, residual_sato_k, sandwich_reduce, t_ones_ring,
    tau_and_reduce, weight, xi_product_check, JetError, JetRing, MatrixJet, SatoTable, Star, StarSpec, ThetaParam,
};
use wnaforge_core::linalg::RatMatrix;
use wnaforge_core::ncpoly::{render, render_plain, Format, NcExpr, VarIndex};
use wnaforge_core::wna::{
    derive_composition_equation, derive_theta_equation, eth_operator, h_f_form, t_ones, HTable, SchurOp, WnaError,
};
use wnaforge_core::Q;

use crate::cli::{Cli, Command, DeriveTarget};
use crate::error::Failure;
use crate::fixtures;
use crate::formats::{parse_expr, parse_flow_key, parse_rational, parse_star, CheckFile, FlowFile, SolutionFile, SolutionInput, StarChoice};
use crate::report::{jet_csv, Check, Report};

/// A finished run: the report, a LaTeX rendering when one exists, and files for `--out`.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub latex: Option<String>,
    pub text: Option<String>,
    pub artifacts: Vec<(String, String)>,
}

impl Outcome {
    fn new(report: Report) -> Self {
        Outcome { report, latex: None, text: None, artifacts: Vec::new() }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let mut out = match &cli.command {
        Command::VerifyCommute { system, flows, all } => verify_commute(system, flows, *all, cli.max_iter)?,
        Command::Derive { target, depth } => derive(target, *depth)?,
        Command::Solve => solve(&solution_config(cli)?)?,
        Command::Check { file } => check(file, cli.max_iter)?,
        Command::Tau => tau(&solution_config(cli)?)?,
        Command::XiCheck { k, level, letters } => {
            let k: Vec<Q> = k.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?;
            xi_check(&k, *level, *letters, cli.order.unwrap_or(5))?
        }
        Command::Hat { k } => hat(&solution_config(cli)?, *k)?,
    };
    out.report.wall_time_ms = start.elapsed().as_millis();
    Ok(out)
}

// ---- verify-commute ----

/// Flow variables a deformation flow is built from: `t_m, t_n` for θ_{mn} and t_{mn}.
pub fn base_vars(v: &VarIndex) -> Vec<VarIndex> {
    match v {
        VarIndex::Composition(w) if w.len() == 1 => Vec::new(),
        VarIndex::Composition(w) => w.iter().map(|m| VarIndex::t(*m)).collect(),
        VarIndex::Theta(m, n) => vec![VarIndex::t(*m), VarIndex::t(*n)],
    }
}

/// Auxiliary flows a conditional commutation is expected to need: the base variables of both
/// flows, minus the two flows themselves.
pub fn expected_auxiliary(a: &FlowKey, b: &FlowKey) -> BTreeSet<FlowKey> {
    let mut want: BTreeSet<FlowKey> = base_vars(&a.1).into_iter().chain(base_vars(&b.1)).map(|v| (a.0.clone(), v)).collect();
    want.remove(a);
    want.remove(b);
    want
}

fn key_name(k: &FlowKey) -> String {
    format!("{}:{}", k.0, k.1)
}

fn status_text(s: &CommuteStatus) -> String {
    match s {
        CommuteStatus::Commute => "commute".into(),
        CommuteStatus::Conditional(set) => {
            let names: Vec<String> = set.iter().map(|k| k.1.to_string()).collect();
            format!("conditional on {{{}}}", names.join(", "))
        }
        CommuteStatus::Fail => "fail".into(),
    }
}

pub fn commute_check(a: &FlowKey, b: &FlowKey, sys: &FlowSystem) -> Result<(Check, CommuteStatus), Failure> {
    let r = check_commute(a, b, sys).map_err(|e| Failure::usage(e.to_string()))?;
    let zero = r.status != CommuteStatus::Fail;
    let check = Check::symbolic(format!("{} vs {}", key_name(a), key_name(b)), zero, render_plain(&r.residual))
        .with_detail(format!("{}; {} rule firings", status_text(&r.status), r.rule_firings));
    Ok((check, r.status))
}

fn verify_commute(system: &str, flows: &[String], all: bool, max_iter: Option<usize>) -> Result<Outcome, Failure> {
    let (file, _): (FlowFile, _) = fixtures::load(system)?;
    let sys = file.build(max_iter)?;
    let mut checks = Vec::new();
    if all {
        let keys: Vec<FlowKey> = sys.keys().into_iter().collect();
        for (i, a) in keys.iter().enumerate() {
            for b in &keys[i + 1..] {
                if a.0 != b.0 {
                    continue;
                }
                let (check, status) = commute_check(a, b, &sys)?;
                let want = expected_auxiliary(a, b);
                let ok = match &status {
                    CommuteStatus::Commute => want.is_empty(),
                    CommuteStatus::Conditional(got) => *got == want,
                    CommuteStatus::Fail => false,
                };
                let mut check = check;
                if !ok && check.residual_zero {
                    check.residual_zero = false;
                    let names: Vec<String> = want.iter().map(|k| k.1.to_string()).collect();
                    check.first_nonzero_monomial = Some(format!("expected auxiliary set {{{}}}", names.join(", ")));
                }
                checks.push(check);
            }
        }
    } else {
        let (a, b) = match flows {
            [] => match &file.pair {
                Some([a, b]) => (parse_flow_key(a)?, parse_flow_key(b)?),
                None => return Err(Failure::usage("no flows given and the system file names no pair")),
            },
            [a, b] => (parse_flow_key(a)?, parse_flow_key(b)?),
            _ => return Err(Failure::usage("give exactly two flows")),
        };
        checks.push(commute_check(&a, &b, &sys)?.0);
    }
    Ok(Outcome::new(Report::new("verify-commute", checks)))
}

// ---- derive ----

fn wna_failure(e: WnaError) -> Failure {
    match e {
        WnaError::Irreducible { monomial, reason } => Failure::Irreducible(format!("{} ({})", monomial, reason)),
        other => Failure::usage(other.to_string()),
    }
}

fn derive(target: &DeriveTarget, depth: u32) -> Result<Outcome, Failure> {
    let mut table = HTable::new(depth);
    let mut report = Report::new("derive", Vec::new());
    let (stem, lines) = match target {
        DeriveTarget::Theta { m, n } => {
            if m == n {
                return Err(Failure::usage("theta flows need m != n"));
            }
            if *m == 0 || *n == 0 {
                return Err(Failure::usage("indices must be positive"));
            }
            let (lo, hi) = (*m.min(n), *m.max(n));
            let eq = derive_theta_equation(lo, hi, &mut table).map_err(wna_failure)?;
            // θ_{nm} = −θ_{mn}
            let sign = if m < n { Q::one() } else { -Q::one() };
            let lhs = |sym: &str| format!("D[th{{{},{}}}]({})", m, n, sym);
            let mut lines = vec![
                (format!("{} (h-symbols)", lhs("f")), eq.h_form.scale(&sign)),
                (lhs("f"), eq.f_form.scale(&sign)),
                (lhs("phi"), eq.phi_form.scale(&sign)),
            ];
            for k in 1..=lo + hi {
                lines.push((format!("h{{{}}}", k), h_f_form(k)));
            }
            (format!("theta_{}_{}", m, n), lines)
        }
        DeriveTarget::Word { letters } => {
            let eq = derive_composition_equation(letters, &mut table).map_err(wna_failure)?;
            let var = eq.var();
            report.values.insert("e_monomial".into(), eq.e_monomial.to_string());
            report.values.insert("expanded".into(), eq.expanded.to_string());
            let (f_form, phi_form) = match (eq.f_form, eq.phi_form) {
                (Some(f), Some(p)) => (f, p),
                _ => return Err(Failure::Irreducible(eq.obstruction.unwrap_or_else(|| "bare f".into()))),
            };
            let w: Vec<String> = letters.iter().map(u32::to_string).collect();
            (
                format!("word_{}", w.join("_")),
                vec![(format!("D[{}](f)", var), f_form), (format!("D[{}](phi)", var), phi_form)],
            )
        }
    };
    let mut dsl = String::new();
    let mut tex = String::new();
    for (lhs, rhs) in &lines {
        dsl.push_str(&format!("{} = {}\n", lhs, render(rhs, Format::Plain)));
        tex.push_str(&format!("{} = {} \\\\\n", latex_lhs(lhs), render(rhs, Format::Latex)));
        report.values.insert(lhs.clone(), render(rhs, Format::Plain));
    }
    report.checks.push(Check::symbolic("bare f eliminated", true, String::new()));
    let mut out = Outcome::new(report);
    out.artifacts.push((format!("{}.txt", stem), dsl.clone()));
    out.artifacts.push((format!("{}.tex", stem), tex.clone()));
    out.text = Some(dsl);
    out.latex = Some(tex);
    Ok(out)
}

fn latex_lhs(lhs: &str) -> String {
    // the left-hand sides are single atoms or h-labels; reuse the expression renderer when possible
    match parse_expr(lhs.split(' ').next().unwrap_or(lhs)) {
        Ok(e) if !lhs.contains(' ') => render(&e, Format::Latex),
        _ => format!("\\text{{{}}}", lhs),
    }
}

// ---- check ----

fn check(file: &str, max_iter: Option<usize>) -> Result<Outcome, Failure> {
    let (cf, _): (CheckFile, _) = fixtures::load(file)?;
    let sys = cf.flows.build(max_iter)?;
    let cand = parse_expr(&cf.candidate)?;
    let target = parse_expr(&cf.target)?;
    let constraints: Vec<NcExpr> = cf.constraints.iter().map(|c| parse_expr(c)).collect::<Result<_, _>>()?;
    let r = verify_identity(&cand, &target, &sys, &constraints).map_err(|e| Failure::usage(e.to_string()))?;
    let used: Vec<String> = r.used_flows.iter().map(|k| k.1.to_string()).collect();
    let mut detail = format!("flows used {{{}}}; {} rule firings", used.join(", "), r.rule_firings);
    if !r.certificate.is_empty() {
        detail.push_str(&format!("; {} constraint multiples", r.certificate.len()));
    }
    let c = Check::symbolic("candidate - target", r.zero, render_plain(&r.residual)).with_detail(detail);
    let mut report = Report::new("check", vec![c]);
    report.values.insert("residual".into(), render_plain(&r.residual));
    let mut out = Outcome::new(report);
    out.latex = Some(render(&r.residual, Format::Latex));
    Ok(out)
}

// ---- solution commands ----

/// Resolved settings for `solve`, `tau` and `hat`.
pub struct SolutionConfig {
    pub input: SolutionInput,
    pub order: u32,
    pub star: String,
}

fn solution_config(cli: &Cli) -> Result<SolutionConfig, Failure> {
    let spec = cli.spec.as_deref().ok_or_else(|| Failure::usage("--spec is required"))?;
    let input = load_solution(spec)?;
    let order = cli.order.or(input.order).unwrap_or(5);
    let star = cli.star.clone().or_else(|| input.star.clone()).unwrap_or_else(|| "ordinary".into());
    Ok(SolutionConfig { input, order, star })
}

pub fn load_solution(name_or_path: &str) -> Result<SolutionInput, Failure> {
    let (file, base): (SolutionFile, _) = fixtures::load(name_or_path)?;
    SolutionInput::from_file(file, &base)
}

/// Ring for a solution: the t-variables plus every formal parameter of the product.
pub fn solution_ring(vars: &[u32], star: &StarChoice, order: u32) -> Arc<JetRing> {
    let mut all: Vec<VarIndex> = vars.iter().map(|&n| VarIndex::t(n)).collect();
    if let StarSpec::Moyal(map) = &star.spec {
        all.extend(map.iter().filter(|(_, p)| matches!(p, ThetaParam::Formal)).map(|(&(m, n), _)| VarIndex::Theta(m, n)));
    }
    all.extend(star.words.iter().map(|w| VarIndex::Composition(w.clone())));
    JetRing::new(all, order)
}

fn jet_failure(e: JetError) -> Failure {
    match e {
        JetError::Singular => Failure::Verification("singular data: I + K phi0 (or a star inverse) is not invertible".into()),
        other => Failure::usage(other.to_string()),
    }
}

/// The residual suite for a solution φ in the given ring and product.
pub fn solution_checks(phi: &MatrixJet, input: &SolutionInput, star: &Star) -> Result<(Vec<Check>, Vec<String>), Failure> {
    let ring = star.ring().clone();
    let c = input_constants(input)?;
    let q = c.q.clone();
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    for &n in &input.vars {
        let (r, o) = residual_riccati(phi, n, &c, star);
        checks.push(Check::jet(format!("riccati t{{{}}}", n), &r, o));
    }
    let mut table = SatoTable::new(phi.clone(), input.l.clone(), input.r.clone());
    for n in input.vars.iter().copied().filter(|&n| n <= 2) {
        for i in 0..=2 {
            for j in 0..=2 {
                let (r, o) = residual_sato(&mut table, i, j, n, &q, star);
                checks.push(Check::jet(format!("sato ({},{},{})", i, j, n), &r, o));
                let (r, o) = residual_sato_k(&mut table, i, j, n, &input.k, star);
                checks.push(Check::jet(format!("sato-K ({},{},{})", i, j, n), &r, o));
            }
        }
    }
    for (m, n) in [(1, 2), (1, 3), (2, 3)] {
        match residual_pkp(phi, m, n, &q, star) {
            Ok((r, o)) => checks.push(Check::jet(format!("pkp ({},{})", m, n), &r, o)),
            Err(JetError::UnknownVar(v)) => skipped.push(format!("pkp ({},{}): needs {}", m, n, v)),
            Err(e) => return Err(jet_failure(e)),
        }
    }
    for v in ring.vars().iter().filter(|v| !v.is_ordinary()) {
        let (r, o) = residual_deformation(phi, v, &c, star).map_err(jet_failure)?;
        checks.push(Check::jet(format!("deformation {}", v), &r, o));
    }
    Ok((checks, skipped))
}

fn input_constants(input: &SolutionInput) -> Result<wnaforge_core::jets::Constants, Failure> {
    let ring = JetRing::ordinary(1, 0);
    let s = input.spec(&ring, &[1], StarSpec::Ordinary)?;
    Ok(s.constants())
}

pub fn solve(cfg: &SolutionConfig) -> Result<Outcome, Failure> {
    let choice = parse_star(&cfg.star, &cfg.input.vars)?;
    let spec = choice.spec.clone();
    let ring = solution_ring(&cfg.input.vars, &choice, cfg.order);
    let s = cfg.input.spec(&ring, &cfg.input.vars, spec.clone())?;
    let star = Star::new(&ring, &spec).map_err(jet_failure)?;
    let phi = phi_solution(&s).map_err(jet_failure)?;
    let (checks, skipped) = solution_checks(&phi, &cfg.input, &star)?;
    let mut report = Report::new("solve", checks);
    report.skipped = skipped;
    report.values.insert("star".into(), spec.to_string());
    report.values.insert("order".into(), cfg.order.to_string());
    let mut out = Outcome::new(report);
    out.text = Some(phi.to_string());
    out.artifacts.push(("phi.csv".into(), jet_csv(&phi)));
    Ok(out)
}

/// Rank-one factorization `Q = V Uᵀ` from a nonzero entry.
pub fn rank_one_factors(q: &RatMatrix) -> Option<(RatMatrix, RatMatrix)> {
    let (i, j) = (0..q.rows()).flat_map(|i| (0..q.cols()).map(move |j| (i, j))).find(|&(i, j)| !q.get(i, j).is_zero())?;
    let mut v = RatMatrix::zeros(q.rows(), 1);
    for r in 0..q.rows() {
        v.set(r, 0, q.get(r, j).clone());
    }
    let mut u = RatMatrix::zeros(q.cols(), 1);
    for c in 0..q.cols() {
        u.set(c, 0, q.get(i, c) / q.get(i, j));
    }
    (v.mul(&u.transpose()).ok()? == *q).then_some((u, v))
}

pub fn tau(cfg: &SolutionConfig) -> Result<Outcome, Failure> {
    let spec = parse_star(&cfg.star, &cfg.input.vars)?.spec;
    if !spec.is_ordinary() {
        return Err(Failure::usage(format!("tau functions need the ordinary product, not {}", spec)));
    }
    let ring = JetRing::new(cfg.input.vars.iter().map(|&n| VarIndex::t(n)), cfg.order);
    let s = cfg.input.spec(&ring, &cfg.input.vars, StarSpec::Ordinary)?;
    let q = s.q();
    let (u, v) = rank_one_factors(&q).ok_or_else(|| Failure::usage(format!("Q = RK - KL has rank {}, need 1", q.rank())))?;
    let (x, _) = linear_solution(&s).map_err(jet_failure)?;
    let (tau, phi_hat) = tau_and_reduce(&x, &s.r, &StarSpec::Ordinary).map_err(jet_failure)?;
    let hat_ring = phi_hat.ring().clone();
    let star = Star::new(&hat_ring, &StarSpec::Ordinary).map_err(jet_failure)?;
    let phi_hat = MatrixJet::from_jet(phi_hat);
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    let one = RatMatrix::scalar(Q::one());
    for (m, n) in [(1, 2), (1, 3), (2, 3)] {
        match residual_pkp(&phi_hat, m, n, &one, &star) {
            Ok((r, o)) => checks.push(Check::jet(format!("scalar pkp ({},{})", m, n), &r, o)),
            Err(JetError::UnknownVar(v)) => skipped.push(format!("scalar pkp ({},{}): needs {}", m, n, v)),
            Err(e) => return Err(jet_failure(e)),
        }
    }
    // second route: Uᵀ φ V from the Riccati solution
    let phi = phi_solution(&s).map_err(jet_failure)?;
    let sandwich = sandwich_reduce(&phi, &u, &v).map_err(jet_failure)?;
    let sandwich = sandwich.embed(&hat_ring).map_err(jet_failure)?;
    checks.push(Check::jet("tau route - sandwich route", &phi_hat.sub(&sandwich), i64::from(hat_ring.degree())));
    let mut report = Report::new("tau", checks);
    report.skipped = skipped;
    let mut out = Outcome::new(report);
    out.text = Some(format!("tau = {}\nphi_hat = {}\n", tau, phi_hat.scalar()));
    out.artifacts.push(("tau.csv".into(), jet_csv(&MatrixJet::from_jet(tau))));
    out.artifacts.push(("phi_hat.csv".into(), jet_csv(&phi_hat)));
    Ok(out)
}

pub fn xi_check(k: &[Q], level: u32, letters: u32, order: u32) -> Result<Outcome, Failure> {
    if k.is_empty() || level < 2 || letters == 0 {
        return Err(Failure::usage("need at least one k, level >= 2 and letters >= 1"));
    }
    let ring = composed_ring(level, letters, order);
    let (lhs, rhs) = xi_product_check(k, level, &ring).map_err(jet_failure)?;
    let mut checks = vec![Check::jet(
        format!("xi identity, level {}, N = {}", level, k.len()),
        &MatrixJet::from_jet(&lhs - &rhs),
        i64::from(order),
    )];
    // restriction to t₁ and t_{1^j}: the exponent is Σ t_{1^j} e_j(k)
    let levels = level.max(3);
    let restricted = t_ones_ring(levels, order);
    let (lhs, rhs) = xi_product_check(k, levels, &restricted).map_err(jet_failure)?;
    checks.push(Check::jet(format!("xi identity in t_(1^j), level {}", levels), &MatrixJet::from_jet(&lhs - &rhs), i64::from(order)));
    for n in 1..=3u32 {
        let e = elementary(n, k);
        let via = elementary_from_power_sums(n, k);
        let coeff = lhs.coeff_of(&[(t_ones(n), 1)]);
        let ok = e == via && (coeff == e || order == 0);
        checks.push(
            Check::symbolic(format!("M_(1^{}) = (-1)^{} p_{}(-M~)", n, n, n), ok, format!("{} vs {} vs {}", e, via, coeff))
                .with_detail(format!("M_(1^{}) = {}", n, e)),
        );
    }
    let mut report = Report::new("xi-check", checks);
    report.values.insert("exponent".into(), rhs.to_string());
    Ok(Outcome::new(report))
}

pub fn hat(cfg: &SolutionConfig, k: u32) -> Result<Outcome, Failure> {
    if k < 2 {
        return Err(Failure::usage("hat needs K >= 2"));
    }
    let d = cfg.order;
    let ring = t_ones_ring(k, d);
    let spec = StarSpec::Composed(k);
    let s = cfg.input.spec(&ring, &[1], spec.clone())?;
    let star = Star::new(&ring, &spec).map_err(jet_failure)?;
    let phi = phi_solution(&s).map_err(jet_failure)?;
    let q = s.q();
    let mut checks = Vec::new();
    for m in 1..=2 {
        for n in 1..=2 {
            let (r, o) = residual_disguise(&phi, m, n, &q, &star);
            checks.push(Check::jet(format!("disguised pkp ({},{})", m, n), &r, o));
        }
    }
    for j in 2..=k {
        let (r, o) = residual_deformation(&phi, &t_ones(j), &s.constants(), &star).map_err(jet_failure)?;
        checks.push(Check::jet(format!("deformation {}", t_ones(j)), &r, o));
    }
    let hat = hat_operator(&phi, k).map_err(jet_failure)?;
    let out_ring = hat.ring().clone();
    let xi: Vec<u32> = (1..=k).collect();
    let full = phi_solution(&cfg.input.spec(&out_ring, &xi, StarSpec::Ordinary)?).map_err(jet_failure)?;
    let weights: Vec<u32> = out_ring.vars().iter().map(weight).collect();
    checks.push(
        Check::jet("hat(phi) - ordinary solution", &hat.sub(&full.truncated_weighted(&weights, d)), i64::from(d))
            .with_detail("weighted degree, t_k of weight k"),
    );
    let d1 = VarIndex::t(1);
    let eth2 = SchurOp::monomial(vec![d1.clone(), d1], Q::one()).sub(&SchurOp::monomial(vec![t_ones(2)], Q::from_integer(2.into())));
    checks.push(Check::symbolic("eth_2 = D[t1]^2 - 2 D[t{1,1}]", eth_operator(2) == eth2, eth_operator(2).to_string()));
    let mut report = Report::new("hat", checks);
    report.values.insert("eth_2".into(), eth_operator(2).to_string());
    let mut out = Outcome::new(report);
    out.text = Some(hat.to_string());
    out.artifacts.push(("phi_t1.csv".into(), jet_csv(&phi)));
    out.artifacts.push(("phi_hat.csv".into(), jet_csv(&hat)));
    Ok(out)
}
