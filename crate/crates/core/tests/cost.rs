use std::path::PathBuf;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rcbbo_core::cost::{
    bar_mass, beam_quantities, direct_cost, footing_quantities, penalize, Category, ElementKind,
    ElementQuantities, QuantityTakeoff, UnitCosts, SENTINEL_COST,
};
use rcbbo_core::foundation::Footing;
use rcbbo_core::project::read_json;
use rcbbo_core::rc::{bar_area, BarGroup, CheckResult, ReinforcementLayout, Stirrups};

fn costs() -> UnitCosts {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/costs.json");
    read_json(&path).unwrap()
}

fn layout() -> ReinforcementLayout {
    ReinforcementLayout {
        bottom: BarGroup {
            diameter_mm: 16.0,
            count: 4,
        },
        top: BarGroup {
            diameter_mm: 13.0,
            count: 2,
        },
        stirrups: Stirrups {
            diameter_mm: 10.0,
            spacing: 0.2,
            legs: 2,
        },
        fy: 420.0,
    }
}

fn quantities(kind: ElementKind, fc: f64, concrete: f64, formwork: f64, bars: f64, stirrups: f64) -> ElementQuantities {
    ElementQuantities {
        id: "e".into(),
        kind,
        fc,
        concrete,
        formwork,
        bar_mass: bars,
        stirrup_mass: stirrups,
        excavation: 0.0,
        refill: 0.0,
    }
}

#[test]
fn beam_concrete_and_formwork() {
    let q = beam_quantities("b", 0.3, 0.5, 6.0, 25.0, &layout(), 0.04);
    assert_relative_eq!(q.concrete, 0.9, max_relative = 1e-12);
    // two sides and the soffit
    assert_relative_eq!(q.formwork, 7.8, max_relative = 1e-12);
}

#[test]
fn bar_mass_of_four_16s() {
    let m = bar_mass(
        &BarGroup {
            diameter_mm: 16.0,
            count: 4,
        },
        6.0,
    );
    assert_relative_eq!(m, 37.9, epsilon = 0.05);
    assert_relative_eq!(m, 4.0 * std::f64::consts::PI * 0.008 * 0.008 * 6.0 * 7850.0, max_relative = 1e-12);
}

#[test]
fn footing_volumes_and_price() {
    let f = Footing {
        l: 2.0,
        b: 2.0,
        depth: 0.45,
        thickness: 0.45,
        fc: 25.0,
        column: (0.4, 0.4),
        bars_l: BarGroup {
            diameter_mm: 13.0,
            count: 10,
        },
        bars_b: BarGroup {
            diameter_mm: 13.0,
            count: 10,
        },
    };
    let q = footing_quantities("f", &f, 0.075, 0.3);
    assert_relative_eq!(q.concrete, 1.8, max_relative = 1e-12);
    assert_relative_eq!(q.excavation, 2.6 * 2.6 * 0.45, max_relative = 1e-12);
    assert_relative_eq!(q.refill, 2.6 * 2.6 * 0.45 - 1.8, max_relative = 1e-12);
    let bars = 2.0 * 10.0 * bar_area(13.0) * (2.0 - 0.15) * 7850.0;
    assert_relative_eq!(q.bar_mass, bars, max_relative = 1e-12);

    let only_concrete = QuantityTakeoff {
        elements: vec![quantities(ElementKind::Foundation, 25.0, 1.8, 0.0, 0.0, 0.0)],
    };
    let b = direct_cost(&only_concrete, &costs()).unwrap();
    let production: f64 = b
        .terms
        .iter()
        .filter(|t| t.term == "concrete_elaboration_25")
        .map(|t| t.amount)
        .sum();
    assert_relative_eq!(production, 180.0, max_relative = 1e-12);
}

#[test]
fn zero_prices_give_zero_cost() {
    let c = costs().scaled(0.0);
    let t = QuantityTakeoff {
        elements: vec![quantities(ElementKind::Beam, 25.0, 1.0, 5.0, 30.0, 10.0)],
    };
    assert_eq!(direct_cost(&t, &c).unwrap().total, 0.0);
}

#[test]
fn missing_grade_price_is_an_error() {
    let t = QuantityTakeoff {
        elements: vec![quantities(ElementKind::Column, 28.0, 1.0, 5.0, 30.0, 10.0)],
    };
    assert!(direct_cost(&t, &costs()).is_err());
}

#[test]
fn penalty_doubles_a_ten_percent_overrun() {
    let bad = CheckResult::new("x", 1.1, 1.0);
    let ok = CheckResult::new("y", 0.5, 1.0);
    assert_relative_eq!(penalize(1234.0, [&bad, &ok], 10.0), 2468.0, max_relative = 1e-12);
    assert_eq!(penalize(1234.0, [&ok], 10.0), 1234.0);
}

#[test]
fn unbounded_violation_gives_the_sentinel() {
    let zero_capacity = CheckResult::new("x", 1.0, 0.0);
    assert_eq!(penalize(10.0, [&zero_capacity], 10.0), SENTINEL_COST);
    assert_eq!(penalize(f64::NAN, [], 10.0), SENTINEL_COST);
    let huge = CheckResult::new("x", 1e12, 1.0);
    assert_eq!(penalize(1e3, [&huge], 10.0), SENTINEL_COST);
}

fn takeoff() -> impl Strategy<Value = QuantityTakeoff> {
    let element = (0usize..3, prop::sample::select(vec![20.0, 25.0, 30.0, 35.0]), 0.0f64..5.0, 0.0f64..30.0, 0.0f64..300.0, 0.0f64..80.0, 0.0f64..20.0, 0.0f64..10.0)
        .prop_map(|(k, fc, c, f, b, s, ex, re)| ElementQuantities {
            id: "e".into(),
            kind: [ElementKind::Beam, ElementKind::Column, ElementKind::Foundation][k],
            fc,
            concrete: c,
            formwork: f,
            bar_mass: b,
            stirrup_mass: s,
            excavation: if k == 2 { ex } else { 0.0 },
            refill: if k == 2 { re } else { 0.0 },
        });
    prop::collection::vec(element, 0..12).prop_map(|elements| QuantityTakeoff { elements })
}

proptest! {
    #[test]
    fn breakdown_sums_to_the_total(t in takeoff()) {
        let b = direct_cost(&t, &costs()).unwrap();
        let terms: f64 = b.terms.iter().map(|t| t.amount).sum();
        let families = b.family_total("beams") + b.family_total("columns") + b.family_total("foundations");
        let categories: f64 = [Category::Formwork, Category::Steel, Category::Concrete, Category::Earthwork]
            .iter()
            .map(|&c| b.category_total(c))
            .sum();
        let tol = 1e-9 * (1.0 + b.total);
        prop_assert!((terms - b.total).abs() <= tol);
        prop_assert!((families - b.total).abs() <= tol);
        prop_assert!((categories - b.total).abs() <= tol);
        for term in &b.terms {
            prop_assert!((term.amount - term.quantity * term.unit_cost).abs() <= 1e-12 * (1.0 + term.amount));
        }
    }

    #[test]
    fn cost_scales_with_prices(t in takeoff(), f in 0.0f64..5.0) {
        let base = direct_cost(&t, &costs()).unwrap().total;
        let scaled = direct_cost(&t, &costs().scaled(f)).unwrap().total;
        prop_assert!((scaled - f * base).abs() <= 1e-9 * (1.0 + f * base));
    }

    #[test]
    fn more_material_never_costs_less(t in takeoff(), grow in 1.0f64..3.0) {
        let mut bigger = t.clone();
        for e in &mut bigger.elements {
            e.concrete *= grow;
            e.formwork *= grow;
            e.bar_mass *= grow;
            e.stirrup_mass *= grow;
            e.excavation *= grow;
            e.refill *= grow;
        }
        let a = direct_cost(&t, &costs()).unwrap().total;
        let b = direct_cost(&bigger, &costs()).unwrap().total;
        prop_assert!(b >= a - 1e-9);
    }

    #[test]
    fn larger_beams_cost_more(b in 0.2f64..0.6, h in 0.3f64..0.8, db in 0.0f64..0.2, dh in 0.0f64..0.2) {
        let price = |b: f64, h: f64| {
            let q = beam_quantities("b", b, h, 6.0, 25.0, &layout(), 0.04);
            direct_cost(&QuantityTakeoff { elements: vec![q] }, &costs()).unwrap().total
        };
        prop_assert!(price(b + db, h + dh) >= price(b, h) - 1e-9);
    }

    #[test]
    fn penalty_never_lowers_the_cost(cost in 0.0f64..1e6, ratios in prop::collection::vec(0.0f64..3.0, 0..6), factor in 0.0f64..100.0) {
        let checks: Vec<CheckResult> = ratios.iter().map(|&r| CheckResult::new("c", r, 1.0)).collect();
        let p = penalize(cost, &checks, factor);
        prop_assert!(p >= cost);
        let v: f64 = ratios.iter().map(|r| (r - 1.0).max(0.0)).filter(|&x| x > 1e-9).sum();
        prop_assert!((p - (cost * (1.0 + factor * v)).min(SENTINEL_COST)).abs() <= 1e-9 * (1.0 + p));
    }
}

