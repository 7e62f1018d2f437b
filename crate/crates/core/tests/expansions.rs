use levy_atm::asymptotics::{iv_expansion, price_expansion, price_expansion_eval, Regime};
use levy_atm::model::CgmyParams;

fn grid() -> impl Iterator<Item = CgmyParams> {
    [0.1, 0.5, 1.0].into_iter().flat_map(|c| {
        [1.0, 2.0, 5.0].into_iter().flat_map(move |g| {
            [1.5, 3.6, 8.0]
                .into_iter()
                .flat_map(move |m| [1.2, 1.5, 1.8].into_iter().map(move |y| CgmyParams::new(c, g, m, y, 0.0).unwrap()))
        })
    })
}

#[test]
fn mixed_d2_is_positive() {
    for p in grid() {
        for sigma in [0.05, 0.2, 0.8] {
            let e = price_expansion(&p.with_sigma(sigma).unwrap()).unwrap();
            assert_eq!(e.regime, Regime::Mixed);
            assert!(e.d1 > 0.0 && e.d2 > 0.0);
        }
    }
}

#[test]
fn leading_term_dominates_at_tiny_maturity() {
    let t: f64 = 1e-8;
    for p in grid() {
        let e = price_expansion(&p).unwrap();
        assert!(e.d1 > 0.0);
        assert!(e.d1 * t.powf(e.exp1) > (e.d2 * t.powf(e.exp2)).abs());
    }
}

#[test]
fn mixed_iv_scaling_in_sigma() {
    let p = CgmyParams::new(0.5, 2.0, 3.6, 1.5, 0.1).unwrap();
    let a = iv_expansion(&p).unwrap();
    let b = iv_expansion(&p.with_sigma(0.4).unwrap()).unwrap();
    let y = p.y();
    assert!((a.s2 * 0.1f64.powf(y - 1.0) - b.s2 * 0.4f64.powf(y - 1.0)).abs() < 1e-12);
}

#[test]
fn expansion_eval_hand_check() {
    let p = CgmyParams::new(0.5, 2.0, 3.6, 1.5, 0.0).unwrap();
    let e = price_expansion(&p).unwrap();
    let by_hand = 1.2008220666706397515f64 * 0.01f64.powf(1.0 / 1.5) - 2.9575584524447766534 * 0.01;
    assert!((price_expansion_eval(&e, 0.01, 1.0).unwrap() - by_hand).abs() < 1e-12);
    assert!((price_expansion_eval(&e, 0.01, 100.0).unwrap() - 100.0 * by_hand).abs() < 1e-10);
    assert!(price_expansion_eval(&e, 0.0, 1.0).is_err());
    assert!(price_expansion_eval(&e, 1e-300, 1.0).unwrap() < 1e-190);
}
