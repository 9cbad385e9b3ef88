use proptest::prelude::*;

use passagekit::modelstr::{parse_model, render_model};
use passagekit::passage;
use passagekit::saddle::{self, solve_rho};
use passagekit::{Error, Scaled, SubordinatorSpec};

fn cp(rate: f64, eta: f64, b: f64) -> SubordinatorSpec {
    SubordinatorSpec::cp_exp(rate, eta).unwrap().with_drift(b).unwrap()
}

fn model() -> impl Strategy<Value = SubordinatorSpec> {
    prop_oneof![
        (0.05f64..0.95, 0.1f64..10.0, 0.0f64..2.0)
            .prop_map(|(a, s, b)| SubordinatorSpec::stable(a, s).unwrap().with_drift(b).unwrap()),
        (0.1f64..5.0, 0.1f64..5.0, 0.0f64..2.0)
            .prop_map(|(a, th, b)| SubordinatorSpec::gamma(a, th).unwrap().with_drift(b).unwrap()),
        (0.1f64..5.0, 0.1f64..5.0, 0.0f64..2.0).prop_map(|(r, e, b)| cp(r, e, b)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn model_text_round_trips(m in model()) {
        let text = render_model(&m);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(back, m);
        prop_assert_eq!(render_model(&back), text);
    }

    #[test]
    fn saddle_solves_its_equation(m in model(), t in 0.1f64..100.0, frac in 0.05f64..0.95) {
        // target strictly inside (b, mu); mu is infinite for stable
        let b = m.drift();
        let mu = m.mean_mu();
        let xt = if mu.is_finite() { b + frac * (mu - b) } else { b + frac / (1.0 - frac) };
        let sp = solve_rho(&m, t, xt * t).unwrap();
        prop_assert!(sp.rho > 0.0);
        prop_assert!((m.psi_prime(sp.rho) / xt - 1.0).abs() < 1e-9);
        prop_assert!(sp.t_h > 0.0);
    }

    #[test]
    fn creep_share_matches_exponent_ratio(
        rate in 0.1f64..5.0, eta in 0.1f64..5.0, b in 0.05f64..2.0,
        frac in 0.02f64..0.98, t in 0.1f64..200.0, d in 1e-3f64..10.0,
    ) {
        let m = cp(rate, eta, b);
        let xt = b + frac * rate / eta;
        let x = xt * t;
        let rho = (rate * eta / (xt - b)).sqrt() - eta;
        let want = b * rho / (b * rho + rate * rho / (rho + eta));
        let hc = passage::hc_interval(&m, t, x, d).unwrap().value;
        let hj = passage::hj_interval(&m, t, x, d).unwrap().value;
        let got = 1.0 / (1.0 + (hj.ln_value - hc.ln_value).exp());
        prop_assert!((got / want - 1.0).abs() < 1e-12);
        prop_assert!((passage::creep_conditional(&m, t, x).unwrap() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interval_estimate_grows_with_window(m in model(), t in 0.5f64..50.0, frac in 0.1f64..0.9, d in 1e-3f64..5.0) {
        let b = m.drift();
        let mu = m.mean_mu();
        let xt = if mu.is_finite() { b + frac * (mu - b) } else { b + frac / (1.0 - frac) };
        let x = xt * t;
        let a = passage::hj_interval(&m, t, x, d).unwrap().value;
        let c = passage::hj_interval(&m, t, x, 2.0 * d).unwrap().value;
        prop_assert!(c.ln_value >= a.ln_value);
        // and stays below Δ times the density estimate
        let dens = passage::hj_density(&m, t, x).unwrap().value;
        prop_assert!(a.ln_value <= dens.ln_value + d.ln() + 1e-12);
    }

    #[test]
    fn stable_half_density_is_exact(t in 0.05f64..200.0, x in 0.01f64..100.0) {
        let m = SubordinatorSpec::stable_half();
        let est = saddle::density_estimate(&m, t, x, x).unwrap();
        let ln_exact = t.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() - 1.5 * x.ln() - t * t / (2.0 * x);
        prop_assert!((est.ln_value - ln_exact).exp_m1().abs() < 1e-9);
    }

    #[test]
    fn scaled_keeps_logs(l in -1e5f64..700.0, f in 1e-10f64..1e10) {
        let s = Scaled::from_ln(l);
        prop_assert_eq!(s.ln_value, l);
        prop_assert_eq!(s.underflow, l.exp() < f64::MIN_POSITIVE);
        let g = s.scale(f);
        prop_assert!((g.ln_value - l - f.ln()).abs() <= 1e-9 * (1.0 + l.abs()));
        prop_assert!(s.rel_diff(&s) == 0.0);
    }
}

#[test]
fn parse_examples() {
    assert_eq!(parse_model("gamma:a=1,theta=1").unwrap(), SubordinatorSpec::gamma(1.0, 1.0).unwrap());
    assert_eq!(parse_model("cpexp:rate=1,eta=1,b=0.5").unwrap(), cp(1.0, 1.0, 0.5));
    assert_eq!(parse_model("stable_half").unwrap(), parse_model("stable:alpha=0.5,s=1.4142135623730951").unwrap());
    assert!(parse_model("stable:alpha=1.5").is_err());
    assert!(matches!(parse_model("gamma:shape=2"), Err(Error::Parse { .. })));
    assert!(matches!(parse_model("weibull"), Err(Error::Parse { pos: 0, .. })));
}

#[test]
fn out_of_regime_is_rejected() {
    let g = SubordinatorSpec::gamma(1.0, 1.0).unwrap();
    let e = solve_rho(&g, 10.0, 15.0).unwrap_err();
    assert!(matches!(e, Error::OutOfRegime { .. }));
    assert_eq!(e.exit_code(), 2);
    let c = cp(1.0, 1.0, 0.5);
    assert!(solve_rho(&c, 10.0, 4.0).is_err());
}
