use alloc::vec::Vec;

use num_traits::One;
use proptest::prelude::*;

use super::*;
use crate::flows::{composition_flow_rhs, expand_constants, moyal_flow_rhs, verify_identity, ConstantSpec, FlowSystem, MoyalForm};
use crate::ncpoly::{apply_derivative, parse, rat, DerivationRules, NcExpr, VarIndex};
use crate::Q;

fn p(s: &str) -> NcExpr {
    parse(s).unwrap()
}

fn f() -> WnaExpr {
    WnaExpr::f()
}

fn nuc(s: &str) -> WnaExpr {
    WnaExpr::nucleus(&p(s)).unwrap()
}

fn prod(a: &WnaExpr, b: &WnaExpr) -> WnaExpr {
    WnaExpr::prod(1, a, b)
}

fn realized(e: &WnaExpr) -> NcExpr {
    expand_constants(&map_to_matrix_realization(e), &ConstantSpec::GENERIC)
}

/// Equality of two f-form expressions once realized and reduced by the Riccati flows. Different
/// elimination routes may differ by consequences of the hierarchy.
fn same_mod_flows(a: &NcExpr, b: &NcExpr) -> bool {
    let mut atoms = a.atoms();
    atoms.extend(b.atoms());
    let n = atoms
        .iter()
        .flat_map(|x| x.derivs().to_vec())
        .filter_map(|v| match v {
            VarIndex::Composition(w) if w.len() == 1 => Some(w[0]),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    verify_identity(&phi_form(a), &phi_form(b), &riccati_upto(n), &[]).unwrap().zero
}

fn riccati_upto(n: u32) -> FlowSystem {
    let ns: Vec<u32> = (1..=n).collect();
    FlowSystem::riccati(&ns, ConstantSpec::GENERIC)
}

#[test]
fn circ_unfolds_to_grade_one() {
    let ff = prod(&f(), &f());
    assert_eq!(circ(1, &f(), &f()), ff);
    assert_eq!(circ(2, &f(), &f()), prod(&f(), &ff) - prod(&ff, &f()));
    assert_eq!(circ(3, &f(), &f()).max_grade(), 1);
}

#[test]
fn wna_law_flattens_nucleus_middles() {
    let a = nuc("D[t{1}](f)");
    let b = nuc("A");
    let ff = prod(&f(), &f());
    assert_eq!(circ(1, &circ(1, &a, &ff), &b), circ(1, &a, &circ(1, &ff, &b)));
    assert_eq!(circ(1, &a, &b), nuc("D[t{1}](f)*A"));
    assert_ne!(circ(1, &circ(1, &a, &f()), &b), circ(1, &a, &circ(1, &f(), &b)));
}

#[test]
fn h_table_examples() {
    let mut t = HTable::default();
    assert_eq!(t.f_m_fnf(1, 2).unwrap(), p("2*h{3} - D[t{1}](h{2}) + p{1}*p{1}"));
    assert_eq!(t.f_m_fnf(2, 1).unwrap(), p("h{3} - p{1}*p{1}"));
    assert_eq!(t.get(1, 0).unwrap(), p("p{1}"));
    assert_eq!(t.get_f(1, 0).unwrap(), p("D[t{1}](f)"));
    assert_eq!(h_f_form(2), p("1/2*D[t{2}](f) + 1/2*D[t{1},t{1}](f)"));
    assert_eq!(h_f_form(3), p("1/3*D[t{3}](f) + 1/2*D[t{2},t{1}](f) + 1/6*D[t{1},t{1},t{1}](f)"));
    let d = t.f_m_fnf(1, 2).unwrap() - t.f_m_fnf(2, 1).unwrap();
    assert_eq!(d, p("h{3} - D[t{1}](h{2}) + 2*p{1}*p{1}"));
}

#[test]
fn repeated_left_action_matches_table() {
    let mut t = HTable::default();
    for n in 1..=3u32 {
        let mut cur = f_d(&[VarIndex::t(n)]);
        for m in 1..=(5 - n) {
            let want = t.get_f(n, m).unwrap();
            cur = Reducer::new(&mut t).left(&cur).unwrap();
            assert!(same_mod_flows(&cur, &want), "h^({})_{}", n, m);
        }
    }
}

#[test]
fn reducer_matches_table_route() {
    let mut t = HTable::default();
    for m in 1..=3u32 {
        for n in 1..=(4 - m) {
            let want = to_f_form(&t.f_m_fnf(m, n).unwrap(), &DerivationRules::standard()).unwrap();
            let raw = WnaExpr::prod(m, &f(), &WnaExpr::prod(n, &f(), &f()));
            let raw = Reducer::new(&mut t).reduce(&raw).unwrap();
            assert!(same_mod_flows(&raw, &want), "raw {} {}", m, n);
            let normal = Reducer::new(&mut t).reduce(&circ(m, &f(), &circ(n, &f(), &f()))).unwrap();
            assert!(same_mod_flows(&normal, &want), "normal {} {}", m, n);
        }
    }
}

#[test]
fn h_n_is_schur_of_f_in_matrix_realization() {
    for n in 1..=4u32 {
        let mut tree = f();
        for _ in 0..n {
            tree = prod(&f(), &tree);
        }
        let candidate = map_to_matrix_realization(&tree);
        let target = phi_form(&h_f_form(n));
        let r = verify_identity(&candidate, &target, &riccati_upto(n), &[]).unwrap();
        assert!(r.zero, "h_{}: {}", n, r.residual);
    }
}

/// Partitions of n as multiplicity vectors (index k-1 holds the multiplicity of k).
fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return alloc::vec![alloc::vec![0; 0]];
    }
    let mut out = Vec::new();
    for k in (1..=max.min(n)).rev() {
        for mut rest in partitions(n - k, k) {
            if rest.len() < k as usize {
                rest.resize(k as usize, 0);
            }
            rest[(k - 1) as usize] += 1;
            out.push(rest);
        }
    }
    out
}

#[test]
fn schur_operator_matches_exponential_expansion() {
    for n in 0..=6u32 {
        let mut want = SchurOp::zero();
        for mult in partitions(n, n) {
            let mut vars = Vec::new();
            let mut c = Q::one();
            for (i, &a) in mult.iter().enumerate() {
                let k = i as i64 + 1;
                for j in 1..=a as i64 {
                    c = c / Q::from_integer((k * j).into());
                    vars.push(VarIndex::t(k as u32));
                }
            }
            want = want.add(&SchurOp::monomial(vars, c));
        }
        assert_eq!(schur_operator(n), want, "p_{}", n);
    }
    assert_eq!(schur_operator(0), SchurOp::one());
    assert_eq!(schur_operator(1), SchurOp::var(VarIndex::t(1)));
    let two = SchurOp::monomial(alloc::vec![VarIndex::t(2)], rat(1, 2))
        .add(&SchurOp::monomial(alloc::vec![VarIndex::t(1), VarIndex::t(1)], rat(1, 2)));
    assert_eq!(schur_operator(2), two);
}

#[test]
fn eth_operators_invert_the_triangular_system() {
    let d1 = VarIndex::t(1);
    let d11 = t_ones(2);
    let d111 = t_ones(3);
    assert_eq!(eth_operator(1), SchurOp::var(d1.clone()));
    let eth2 = SchurOp::monomial(alloc::vec![d1.clone(), d1.clone()], Q::one())
        .sub(&SchurOp::monomial(alloc::vec![d11.clone()], rat(2, 1)));
    assert_eq!(eth_operator(2), eth2);
    // hand inversion at k = 3
    let eth3 = SchurOp::monomial(alloc::vec![d1.clone(); 3], Q::one())
        .sub(&SchurOp::monomial(alloc::vec![d1, d11], rat(3, 1)))
        .add(&SchurOp::monomial(alloc::vec![d111], rat(3, 1)));
    assert_eq!(eth_operator(3), eth3);
    let eth = eth_operators(5);
    let y: Vec<SchurOp> =
        eth.iter().enumerate().map(|(j, e)| e.scale(&-Q::new(1.into(), (j as i64 + 1).into()))).collect();
    for k in 1..=5u32 {
        let mut back = schur_poly(k as usize, &y);
        if k % 2 == 1 {
            back = back.scale(&-Q::one());
        }
        assert_eq!(back, SchurOp::var(t_ones(k)), "k = {}", k);
    }
}

#[test]
fn theta_12_equation() {
    let mut t = HTable::default();
    let eq = derive_theta_equation(1, 2, &mut t).unwrap();
    assert_eq!(eq.h_form, p("1/2*h{3} - 1/2*D[t{1}](h{2}) + p{1}*p{1}"));
    assert_eq!(eq.f_form, p("1/6*D[t{3}](f) - 1/6*D[t{1},t{1},t{1}](f) + D[t{1}](f)*D[t{1}](f)"));
    assert_eq!(eq.phi_form, p("1/6*D[t{3}](phi) - 1/6*D[t{1},t{1},t{1}](phi) - D[t{1}](phi)*Q*D[t{1}](phi)"));
}

#[test]
fn theta_equations_agree_with_flows() {
    let mut t = HTable::default();
    for (m, n) in [(1, 2), (1, 3), (1, 4), (2, 3)] {
        let eq = derive_theta_equation(m, n, &mut t).unwrap();
        let target = moyal_flow_rhs(m, n, MoyalForm::Derivative);
        let sys = riccati_upto(m + n);
        let r = verify_identity(&eq.phi_form, &target, &sys, &[]).unwrap();
        assert!(r.zero, "theta {} {}: {}", m, n, r.residual);
        if (m, n) == (1, 3) {
            let off = &eq.phi_form + &p("D[t{1}](phi)*Q*D[t{1}](phi)");
            assert!(!verify_identity(&off, &target, &sys, &[]).unwrap().zero);
        }
    }
}

#[test]
fn theta_is_antisymmetrized_composition() {
    let mut t = HTable::default();
    for (m, n) in [(1, 2), (1, 3), (1, 4), (2, 3)] {
        let eq = derive_theta_equation(m, n, &mut t).unwrap();
        let a = derive_composition_equation(&[m, n], &mut t).unwrap().f_form.unwrap();
        let b = derive_composition_equation(&[n, m], &mut t).unwrap().f_form.unwrap();
        assert_eq!(eq.f_form, (a - b).scale(&rat(1, 2)), "{} {}", m, n);
    }
}

#[test]
fn composition_expansions() {
    let mut t = HTable::default();
    let fnf = |a: u32, b: u32| WnaExpr::prod(a, &f(), &WnaExpr::prod(b, &f(), &f()));
    let e = derive_composition_equation(&[2, 3], &mut t).unwrap();
    assert_eq!(e.expanded, fnf(2, 3) - WnaExpr::prod(5, &f(), &f()));
    let e3 = derive_composition_equation(&[1, 2, 1], &mut t).unwrap();
    let nested = |a: u32, b: u32, c: u32| WnaExpr::prod(a, &f(), &fnf(b, c));
    let want = nested(1, 2, 1) - fnf(3, 1) - fnf(1, 3) + WnaExpr::prod(4, &f(), &f());
    assert_eq!(e3.expanded, want);
    for w in [&[1u32, 1][..], &[1, 2], &[2, 1], &[1, 1, 1], &[1, 2, 1], &[2, 1, 1]] {
        let e = derive_composition_equation(w, &mut t).unwrap();
        assert_eq!(realized(&e.e_monomial), realized(&e.expanded), "{:?}", w);
        assert_eq!(e.e_monomial.normal_form(), e.expanded.normal_form(), "{:?}", w);
        let direct = Reducer::new(&mut t).reduce(&e.e_monomial).unwrap();
        assert!(same_mod_flows(&direct, e.f_form.as_ref().unwrap()), "{:?}", w);
    }
}

#[test]
fn composition_equations_agree_with_flows() {
    let mut t = HTable::default();
    let e11 = derive_composition_equation(&[1, 1], &mut t).unwrap();
    assert_eq!(e11.f_form.clone().unwrap(), p("1/2*D[t{1},t{1}](f) - 1/2*D[t{2}](f)"));
    assert_eq!(e11.phi_form.clone().unwrap(), p("1/2*D[t{1},t{1}](phi) - 1/2*D[t{2}](phi)"));
    for w in [&[1u32, 1][..], &[1, 2], &[2, 1], &[1, 1, 1], &[1, 2, 1]] {
        let e = derive_composition_equation(w, &mut t).unwrap();
        let total: u32 = w.iter().sum();
        let target = composition_flow_rhs(w, true);
        let r = verify_identity(e.phi_form.as_ref().unwrap(), &target, &riccati_upto(total), &[]).unwrap();
        assert!(r.zero, "{:?}: {}", w, r.residual);
    }
}

#[test]
fn matrix_realization_examples() {
    assert_eq!(
        map_to_matrix_realization(&prod(&f(), &f())),
        -p("S + L*phi - phi*R - phi*Q*phi")
    );
    let nu = &f() + &nuc("phi");
    assert_eq!(map_to_matrix_realization(&WnaExpr::prod(2, &nu, &nu)), -p("S{2}"));
    assert_eq!(map_to_matrix_realization(&circ(1, &nuc("phi"), &nuc("phi"))), p("phi*Q*phi"));
    assert_eq!(map_to_matrix_realization(&nu), p("nu"));
}

#[test]
fn lemma_expand_examples() {
    let a = nuc("A");
    assert_eq!(lemma_expand(Side::Left, 1, &a), prod(&f(), &a));
    let ff = prod(&f(), &f());
    assert_eq!(lemma_expand(Side::Left, 2, &f()), prod(&f(), &ff) - prod(&ff, &f()));
    assert_eq!(lemma_expand(Side::Right, 2, &f()), prod(&f(), &ff) - prod(&ff, &f()));
    let args = [f(), ff.clone(), nuc("D[t{1}](f)"), a];
    for n in 1..=4u32 {
        for x in &args {
            let left = lemma_expand(Side::Left, n, x);
            assert_eq!(left.normal_form(), circ(n, &f(), x), "left {} {}", n, x);
            assert_eq!(realized(&left), realized(&WnaExpr::prod(n, &f(), x)));
            let right = lemma_expand(Side::Right, n, x);
            assert_eq!(right.normal_form(), circ(n, x, &f()), "right {} {}", n, x);
            assert_eq!(realized(&right), realized(&WnaExpr::prod(n, x, &f())));
        }
    }
}

#[test]
fn irreducible_inputs_are_reported() {
    let mut t = HTable::new(4);
    match derive_theta_equation(2, 3, &mut t) {
        Err(WnaError::Irreducible { monomial, .. }) => assert!(monomial.contains("h^(")),
        other => panic!("{:?}", other),
    }
    assert!(matches!(derive_theta_equation(2, 1, &mut t), Err(WnaError::Invalid(_))));
    let mut t = HTable::default();
    match Reducer::new(&mut t).reduce(&f()) {
        Err(WnaError::Irreducible { monomial, .. }) => assert_eq!(monomial, "f"),
        other => panic!("{:?}", other),
    }
    match Reducer::new(&mut t).reduce(&prod(&nuc("A"), &f())) {
        Err(WnaError::Irreducible { monomial, .. }) => assert!(monomial.starts_with("A")),
        other => panic!("{:?}", other),
    }
    assert!(WnaExpr::nucleus(&p("f")).is_err());
    assert!(WnaExpr::nucleus(&p("1 + A")).is_err());
}

#[test]
fn theta_derivative_of_products_has_moyal_correction() {
    // ∂_θ(a∘b) carries ½(a_{t_m}∘b_{t_n} − a_{t_n}∘b_{t_m}) under the standard rules.
    let e = p("D[t{1}](f)*D[t{2}](f)");
    let d = apply_derivative(&VarIndex::Theta(1, 2), &e, &DerivationRules::standard()).unwrap();
    let want = p("D[th{1,2},t{1}](f)*D[t{2}](f) + D[t{1}](f)*D[th{1,2},t{2}](f) + 1/2*D[t{1},t{1}](f)*D[t{2},t{2}](f) - 1/2*D[t{1},t{2}](f)*D[t{1},t{2}](f)");
    assert_eq!(d, want);
}

fn arb_tree() -> impl Strategy<Value = WnaExpr> {
    let leaf = prop_oneof![
        Just(WnaExpr::f()),
        Just(nuc("D[t{1}](f)")),
        Just(nuc("D[t{2}](f)")),
        Just(nuc("A")),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        (1u32..=2, inner.clone(), inner).prop_map(|(n, a, b)| WnaExpr::prod(n, &a, &b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn grade_additivity(a in arb_tree(), b in arb_tree(), m in 1u32..=2, n in 1u32..=2) {
        let lhs = circ(m + n, &a, &b);
        let rhs = circ(m, &a, &circ(n, &f(), &b)) - circ(n, &circ(m, &a, &f()), &b);
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn table_satisfies_general_recursion() {
    // h^{(r+n)}_m = h^{(n)}_{r+m} + h^{(r)}_{m+n} − ∂_{t_r}h^{(n)}_m + Σ_{k=1}^m h^{(r)}_{k−1}∘h^{(n)}_{m−k}
    //   − Σ_{k=1}^{r−1} h^{(r−k)}_m∘h^{(n)}_{k−1} − Σ_{k=1}^{n−1} h^{(n−k)}_m∘h^{(r)}_{k−1}
    let mut t = HTable::default();
    let rules = DerivationRules::standard();
    for r in 2..=3u32 {
        for n in 1..=2u32 {
            for m in 0..=(5 - r - n) {
                let lhs = t.get_f(r + n, m).unwrap();
                let mut rhs = t.get_f(n, r + m).unwrap() + t.get_f(r, m + n).unwrap();
                rhs = rhs - apply_derivative(&VarIndex::t(r), &t.get_f(n, m).unwrap(), &rules).unwrap();
                for k in 1..=m {
                    rhs = rhs + t.get_f(r, k - 1).unwrap().mul(&t.get_f(n, m - k).unwrap());
                }
                for k in 1..r {
                    rhs = rhs - t.get_f(r - k, m).unwrap().mul(&t.get_f(n, k - 1).unwrap());
                }
                for k in 1..n {
                    rhs = rhs - t.get_f(n - k, m).unwrap().mul(&t.get_f(r, k - 1).unwrap());
                }
                assert!(same_mod_flows(&lhs, &rhs), "r={} n={} m={}", r, n, m);
            }
        }
    }
}
