use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::ncpoly::{parse, NcExpr, Symbol, VarIndex};

fn p(s: &str) -> NcExpr {
    parse(s).unwrap()
}

/// `H^n` as an explicit 2×2 block product of noncommutative entries, `H = [[R, Q], [S, L]]`.
fn block_power(n: u32, spec: &ConstantSpec) -> [[NcExpr; 2]; 2] {
    let s = if spec.s_zero { NcExpr::zero() } else { p("S") };
    let q = if spec.q_rk_kl { p("R*K - K*L") } else { p("Q") };
    let h = [[p("R"), q], [s, p("L")]];
    let mut acc = h.clone();
    for _ in 1..n {
        let mut next: [[NcExpr; 2]; 2] = Default::default();
        for i in 0..2 {
            for j in 0..2 {
                next[i][j] = &acc[i][0].mul(&h[0][j]) + &acc[i][1].mul(&h[1][j]);
            }
        }
        acc = next;
    }
    acc
}

#[test]
fn lqrs_matches_block_powers() {
    for spec in [ConstantSpec::GENERIC, ConstantSpec::S_ZERO, ConstantSpec::SOLVABLE] {
        for n in 1..=4 {
            let h = block_power(n, &spec);
            assert_eq!(lqrs_expand(Family::R, n, &spec), h[0][0]);
            assert_eq!(lqrs_expand(Family::Q, n, &spec), h[0][1]);
            assert_eq!(lqrs_expand(Family::S, n, &spec), h[1][0]);
            assert_eq!(lqrs_expand(Family::L, n, &spec), h[1][1]);
        }
    }
}

#[test]
fn lqrs_examples() {
    assert_eq!(lqrs_expand(Family::Q, 2, &ConstantSpec::GENERIC), p("R*Q + Q*L"));
    assert_eq!(lqrs_expand(Family::Q, 3, &ConstantSpec::S_ZERO), p("R*R*Q + R*Q*L + Q*L*L"));
    assert_eq!(lqrs_expand(Family::Q, 2, &ConstantSpec::SOLVABLE), p("R*R*K - K*L*L"));
    for n in 1..=5 {
        assert_eq!(lqrs_expand(Family::R, n, &ConstantSpec::S_ZERO), p("R").pow(n));
        assert_eq!(lqrs_expand(Family::L, n, &ConstantSpec::S_ZERO), p("L").pow(n));
        let telescoped = &p("R").pow(n).mul(&p("K")) - &p("K").mul(&p("L").pow(n));
        assert_eq!(lqrs_expand(Family::Q, n, &ConstantSpec::SOLVABLE), telescoped);
    }
}

#[test]
fn riccati_examples() {
    assert_eq!(riccati_rhs(1), p("S + L*phi - phi*R - phi*Q*phi"));
    let r2 = expand_constants(&riccati_rhs(2), &ConstantSpec::S_ZERO);
    let want = &block_power(2, &ConstantSpec::S_ZERO)[1][1].mul(&phi())
        - &(&phi().mul(&block_power(2, &ConstantSpec::S_ZERO)[0][0])
            + &phi().mul(&block_power(2, &ConstantSpec::S_ZERO)[0][1]).mul(&phi()));
    assert_eq!(r2, want);
    assert_eq!(r2, p("L*L*phi - phi*R*R - phi*(Q*L + R*Q)*phi"));
    let at_zero = riccati_rhs(1).substitute(|a| (a.symbol == Symbol::new("phi")).then(NcExpr::zero));
    assert_eq!(at_zero, p("S"));
}

#[test]
fn moyal_forms() {
    assert_eq!(
        moyal_flow_rhs(1, 2, MoyalForm::Derivative),
        p("1/2*(D[t{2}](phi)*(R + Q*phi) - D[t{1}](phi)*(R{2} + Q{2}*phi))")
    );
    assert_eq!(moyal_flow_rhs(2, 1, MoyalForm::Derivative), -moyal_flow_rhs(1, 2, MoyalForm::Derivative));
    // printed ODE form, transcribed with m = 1, n = 2
    let printed = p("1/2*(S{2}*R - S*R{2} + (S{2}*Q - S*Q{2})*phi + L{2}*phi*R - L*phi*R{2} \
         - phi*(R{2}*R - R*R{2}) + L{2}*phi*Q*phi - L*phi*Q{2}*phi - phi*(R{2}*Q - R*Q{2})*phi \
         - phi*Q{2}*phi*R + phi*Q*phi*R{2} - phi*Q{2}*phi*Q*phi + phi*Q*phi*Q{2}*phi)");
    assert_eq!(moyal_flow_rhs(1, 2, MoyalForm::Ode), printed);
    let sys = FlowSystem::riccati(&[1, 2], ConstantSpec::GENERIC);
    let red = sys.reduce(&moyal_flow_rhs(1, 2, MoyalForm::Derivative), None).unwrap();
    assert_eq!(red.expr, expand_constants(&printed, &ConstantSpec::GENERIC));
}

#[test]
fn composition_forms() {
    assert_eq!(composition_flow_rhs(&[1, 2], false), p("-D[t{1}](phi)*(R{2} + Q{2}*phi)"));
    assert_eq!(composition_flow_rhs(&[1, 2, 3], false), p("-D[t{1,2}](phi)*(R{3} + Q{3}*phi)"));
    assert_eq!(composition_flow_rhs(&[1, 1], false), p("-D[t{1}](phi)*(R + Q*phi)"));
    assert_eq!(
        composition_flow_rhs(&[1, 1, 2], true),
        p("(S + L*phi - phi*R - phi*Q*phi)*(R + Q*phi)*(R{2} + Q{2}*phi)")
    );
    // θ_{mn} flow = (t_{mn} flow − t_{nm} flow)/2
    for (m, n) in [(1, 2), (1, 3), (2, 3)] {
        let anti = (composition_flow_rhs(&[m, n], false) - composition_flow_rhs(&[n, m], false)).scale(&crate::ncpoly::rat(1, 2));
        assert_eq!(anti, moyal_flow_rhs(m, n, MoyalForm::Derivative));
    }
}

#[test]
fn nckdv_flows_commute() {
    let sys = FlowSystem::nckdv();
    let a = flow_key("u", VarIndex::t(3));
    let b = flow_key("u", VarIndex::Theta(1, 3));
    let r = check_commute(&a, &b, &sys).unwrap();
    assert_eq!(r.status, CommuteStatus::Commute);
    assert!(r.residual.is_zero());
    let self_check = check_commute(&a, &a, &sys).unwrap();
    assert_eq!(self_check.status, CommuteStatus::Commute);
    assert!(self_check.used_flows.is_empty());
}

#[test]
fn nckdv_with_wrong_sign_fails() {
    let mut sys = FlowSystem::nckdv();
    let wrong = -sys.get(&flow_key("u", VarIndex::Theta(1, 3))).unwrap().clone();
    sys.insert(Symbol::new("u"), VarIndex::Theta(1, 3), wrong);
    let r = check_commute(&flow_key("u", VarIndex::t(3)), &flow_key("u", VarIndex::Theta(1, 3)), &sys).unwrap();
    assert_eq!(r.status, CommuteStatus::Fail);
    assert!(!r.residual.is_zero());
}

#[test]
fn riccati_flows_commute_unconditionally() {
    let sys = FlowSystem::riccati(&[1, 2, 3, 4], ConstantSpec::GENERIC);
    for m in 1..=4 {
        for n in m + 1..=4 {
            let r = check_commute(&flow_key("phi", VarIndex::t(m)), &flow_key("phi", VarIndex::t(n)), &sys).unwrap();
            assert_eq!(r.status, CommuteStatus::Commute, "t{} vs t{}", m, n);
        }
    }
}

#[test]
fn theta_vs_riccati_is_conditional() {
    for form in [MoyalForm::Ode, MoyalForm::Derivative] {
        let mut sys = FlowSystem::riccati(&[1, 2, 3], ConstantSpec::GENERIC);
        sys.add_moyal(1, 2, form).unwrap();
        let r = check_commute(&flow_key("phi", VarIndex::Theta(1, 2)), &flow_key("phi", VarIndex::t(3)), &sys).unwrap();
        let want: BTreeSet<FlowKey> = [flow_key("phi", VarIndex::t(1)), flow_key("phi", VarIndex::t(2))].into_iter().collect();
        assert_eq!(r.status, CommuteStatus::Conditional(want), "{:?}", form);
    }
}

#[test]
fn theta12_elimination_identity() {
    let sys = FlowSystem::riccati(&[1, 2, 3], ConstantSpec::GENERIC);
    let cand = p("1/6*(D[t{3}](phi) - D[t{1},t{1},t{1}](phi)) - D[t{1}](phi)*Q*D[t{1}](phi)");
    let target = moyal_flow_rhs(1, 2, MoyalForm::Derivative);
    let r = verify_identity(&cand, &target, &sys, &[]).unwrap();
    assert!(r.zero, "residual {}", r.residual);
    let bad = p("1/5*(D[t{3}](phi) - D[t{1},t{1},t{1}](phi)) - D[t{1}](phi)*Q*D[t{1}](phi)");
    assert!(!verify_identity(&bad, &target, &sys, &[]).unwrap().zero);
    let same = verify_identity(&cand, &cand, &sys, &[]).unwrap();
    assert!(same.zero && same.used_flows.is_empty());
}

#[test]
fn kdv_from_deformation() {
    let sys = FlowSystem::riccati(&[1], ConstantSpec::GENERIC);
    let cand = p("-1/8*D[t{1},t{1},t{1}](phi) - 3/4*D[t{1}](phi)*Q*D[t{1}](phi)");
    let target = p("-1/2*D[t{1}](phi)*(R{2} + Q{2}*phi)");
    let constraint = p("S{2} + L{2}*phi - phi*R{2} - phi*Q{2}*phi");
    let without = verify_identity(&cand, &target, &sys, &[]).unwrap();
    assert!(!without.zero);
    let r = verify_identity(&cand, &target, &sys, &[constraint.clone()]).unwrap();
    assert!(r.zero);
    let gens = vec![sys.reduce(&constraint, None).unwrap().expr];
    assert_eq!(certificate_value(&r.certificate, &gens), r.reduced);
    let bad = p("-1/8*D[t{1},t{1},t{1}](phi) - 1/2*D[t{1}](phi)*Q*D[t{1}](phi)");
    assert!(!verify_identity(&bad, &target, &sys, &[constraint]).unwrap().zero);
}

/// Flow variables a deformation flow is built from.
fn base_vars(v: &VarIndex) -> Vec<VarIndex> {
    match v {
        VarIndex::Composition(w) if w.len() == 1 => Vec::new(),
        VarIndex::Composition(w) => w.iter().map(|m| VarIndex::t(*m)).collect(),
        VarIndex::Theta(m, n) => vec![VarIndex::t(*m), VarIndex::t(*n)],
    }
}

#[test]
fn composition_flows_conditional_sets() {
    let mut sys = FlowSystem::riccati(&[1, 2, 3], ConstantSpec::GENERIC);
    sys.add_composition(&[1, 2], true).unwrap();
    sys.add_composition(&[2, 1], true).unwrap();
    sys.add_moyal(1, 2, MoyalForm::Ode).unwrap();
    let pairs = [
        (VarIndex::Composition(vec![1, 2]), VarIndex::t(1)),
        (VarIndex::Composition(vec![2, 1]), VarIndex::t(1)),
        (VarIndex::Composition(vec![1, 2]), VarIndex::t(3)),
        (VarIndex::Composition(vec![1, 2]), VarIndex::Composition(vec![2, 1])),
        (VarIndex::Composition(vec![2, 1]), VarIndex::Theta(1, 2)),
    ];
    for (a, b) in pairs {
        let mut want: BTreeSet<FlowKey> = base_vars(&a).into_iter().chain(base_vars(&b)).map(|v| flow_key("phi", v)).collect();
        want.remove(&flow_key("phi", a.clone()));
        want.remove(&flow_key("phi", b.clone()));
        let r = check_commute(&flow_key("phi", a.clone()), &flow_key("phi", b.clone()), &sys).unwrap();
        assert_eq!(r.status, CommuteStatus::Conditional(want), "{} vs {}", a, b);
    }
}

#[test]
fn derivative_form_t21_commutes_with_t1_outright() {
    let mut sys = FlowSystem::riccati(&[1, 2], ConstantSpec::GENERIC);
    sys.add_composition(&[2, 1], false).unwrap();
    let r = check_commute(&flow_key("phi", VarIndex::Composition(vec![2, 1])), &flow_key("phi", VarIndex::t(1)), &sys).unwrap();
    assert_eq!(r.status, CommuteStatus::Commute);
}

#[test]
fn length_three_composition_flows_commute_conditionally() {
    let mut sys = FlowSystem::riccati(&[1, 2], ConstantSpec::GENERIC);
    for w in [&[1u32, 1][..], &[1, 2], &[2, 1], &[1, 1, 1], &[1, 1, 2], &[1, 2, 1], &[2, 1, 1]] {
        sys.add_composition(w, true).unwrap();
    }
    let keys: Vec<FlowKey> = sys.keys().into_iter().collect();
    for a in keys.iter().filter(|k| matches!(&k.1, VarIndex::Composition(w) if w.len() == 3)) {
        for b in &keys {
            if a == b {
                continue;
            }
            let r = check_commute(a, b, &sys).unwrap();
            assert_ne!(r.status, CommuteStatus::Fail, "{} vs {}", a.1, b.1);
        }
    }
}
