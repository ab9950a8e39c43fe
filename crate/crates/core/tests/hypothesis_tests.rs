use crossvar::datasets::dataset;
use crossvar::hypothesis::{crossvar_test, f_variance_test, pooled_t_test, Alpha, Decision, Method};
use crossvar::stats::{NPolicy, Sample};
use crossvar::Error;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn ds(id: &str) -> (Sample, Sample) {
    dataset(id).unwrap().samples().unwrap()
}

fn a(v: f64) -> Alpha {
    Alpha::new(v).unwrap()
}

#[test]
fn alpha_validation() {
    assert!(Alpha::new(0.0).is_err());
    assert!(Alpha::new(1.0).is_err());
    assert!(Alpha::new(f64::NAN).is_err());
    assert_eq!(a(0.05).get(), 0.05);
    let back: Alpha = serde_json::from_str("0.01").unwrap();
    assert_eq!(back.get(), 0.01);
    assert!(serde_json::from_str::<Alpha>("1.5").is_err());
}

#[test]
fn crossvar_examples() {
    let (x, y) = ds("ds1");
    let r = crossvar_test(&x, &y, a(0.01), NPolicy::Max).unwrap();
    assert_eq!(r.method, Method::Crossvar);
    close(r.p_value, 0.411, 5e-4);
    assert_eq!(r.decision, Decision::Accept);
    assert_eq!(r.n_policy_used, None);

    let (x, y) = ds("ds5");
    let r = crossvar_test(&x, &y, a(0.01), NPolicy::Max).unwrap();
    close(r.p_value, 0.001, 5e-4);
    assert_eq!(r.decision, Decision::Reject);

    let (x, y) = ds("ds4");
    let max = crossvar_test(&x, &y, a(0.01), NPolicy::Max).unwrap();
    close(max.p_value, 0.004, 5e-4);
    assert_eq!(max.decision, Decision::Reject);
    assert_eq!(max.n_policy_used, Some(NPolicy::Max));
    let min = crossvar_test(&x, &y, a(0.01), NPolicy::Min).unwrap();
    close(min.p_value, 0.021, 5e-4);
    assert_eq!(min.decision, Decision::Accept);
}

#[test]
fn pooled_t_examples() {
    for (id, p, d) in [
        ("ds1", 0.411, Decision::Accept),
        ("ds9", 0.229, Decision::Accept),
        ("ds4", 0.009, Decision::Reject),
    ] {
        let (x, y) = ds(id);
        let r = pooled_t_test(&x, &y, a(0.01)).unwrap();
        close(r.p_value, p, 5e-4);
        assert_eq!(r.decision, d, "{id}");
    }
}

#[test]
fn pooled_t_matches_textbook_formula() {
    let (x, y) = ds("ds4");
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let sp2 = ((n1 - 1.0) * x.variance() + (n2 - 1.0) * y.variance()) / (n1 + n2 - 2.0);
    let t = (x.mean() - y.mean()) / (sp2 * (1.0 / n1 + 1.0 / n2)).sqrt();
    let df = n1 + n2 - 2.0;
    let p = 2.0 * (1.0 - StudentsT::new(0.0, 1.0, df).unwrap().cdf(t.abs()));
    let r = pooled_t_test(&x, &y, a(0.05)).unwrap();
    close(r.statistic.abs(), t.abs(), 1e-12);
    close(r.p_value, p, 1e-10);
}

#[test]
fn f_test_examples() {
    let (x, y) = ds("ds13");
    assert_eq!(f_variance_test(&x, &y, a(0.05)).unwrap().decision, Decision::Reject);
    let (x, y) = ds("ds1");
    let r = f_variance_test(&x, &y, a(0.05)).unwrap();
    assert_eq!(r.decision, Decision::Accept);
    let oracle = FisherSnedecor::new(7.0, 7.0).unwrap().cdf(r.statistic);
    close(r.p_value, 2.0 * oracle.min(1.0 - oracle), 1e-10);

    let r = f_variance_test(&x, &x, a(0.05)).unwrap();
    close(r.statistic, 1.0, 1e-15);
    close(r.p_value, 1.0, 1e-12);
    assert_eq!(r.decision, Decision::Accept);
}

#[test]
fn strict_rejection_rule() {
    assert_eq!(Decision::from_p(0.01, a(0.01)), Decision::Accept);
    assert_eq!(Decision::from_p(0.0099999, a(0.01)), Decision::Reject);
    let (x, y) = ds("ds8");
    let r = crossvar_test(&x, &y, a(0.01), NPolicy::Max).unwrap();
    assert!(r.p_value >= 0.01);
    assert_eq!(r.decision, Decision::Accept);
}

#[test]
fn degenerate_inputs() {
    let c = Sample::new(vec![1.0, 1.0, 1.0]).unwrap();
    assert!(matches!(crossvar_test(&c, &c, a(0.05), NPolicy::Max), Err(Error::Degenerate(_))));
    assert!(matches!(f_variance_test(&c, &c, a(0.05)), Err(Error::Degenerate(_))));
    // zero pooled variance is degenerate even when the means differ
    let d = Sample::new(vec![4.0, 4.0, 4.0]).unwrap();
    assert!(matches!(crossvar_test(&c, &d, a(0.05), NPolicy::Max), Err(Error::Degenerate(_))));
    assert!(matches!(pooled_t_test(&c, &d, a(0.05)), Err(Error::Degenerate(_))));
    // one constant group is fine
    let e = Sample::new(vec![3.0, 5.0, 4.0]).unwrap();
    assert!(crossvar_test(&c, &e, a(0.05), NPolicy::Max).is_ok());
}

#[test]
fn result_serialises() {
    let (x, y) = ds("ds4");
    let r = crossvar_test(&x, &y, a(0.01), NPolicy::Average).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"CROSSVAR\""));
    assert!(json.contains("\"avg\""));
    let back: crossvar::TestResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

fn group(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, len)
}

proptest! {
    #[test]
    fn equal_sizes_give_identical_p_values(
        (x, y) in (2usize..40).prop_flat_map(|n| (group(n..n + 1), group(n..n + 1))),
    ) {
        let (x, y) = (Sample::new(x).unwrap(), Sample::new(y).unwrap());
        if let (Ok(c), Ok(t)) = (crossvar_test(&x, &y, a(0.05), NPolicy::Max), pooled_t_test(&x, &y, a(0.05))) {
            prop_assert!((c.p_value - t.p_value).abs() <= 1e-9);
            prop_assert_eq!(c.decision, t.decision);
        }
    }

    #[test]
    fn p_values_in_unit_interval(x in group(2..30), y in group(2..30)) {
        let (x, y) = (Sample::new(x).unwrap(), Sample::new(y).unwrap());
        for policy in [NPolicy::Min, NPolicy::Max, NPolicy::Average] {
            if let Ok(r) = crossvar_test(&x, &y, a(0.05), policy) {
                prop_assert!((0.0..=1.0).contains(&r.p_value));
            }
        }
        if let Ok(r) = f_variance_test(&x, &y, a(0.05)) {
            prop_assert!((0.0..=1.0).contains(&r.p_value));
        }
    }

    #[test]
    fn crossvar_invariant_to_location_and_scale(
        x in group(3..20),
        y in group(3..20),
        shift in -1e3f64..1e3,
        scale in 0.01f64..100.0,
    ) {
        let sx = Sample::new(x.clone()).unwrap();
        let sy = Sample::new(y.clone()).unwrap();
        let Ok(base) = crossvar_test(&sx, &sy, a(0.05), NPolicy::Average) else { return Ok(()); };
        let tx = Sample::new(x.iter().map(|v| shift + scale * v).collect()).unwrap();
        let ty = Sample::new(y.iter().map(|v| shift + scale * v).collect()).unwrap();
        let moved = crossvar_test(&tx, &ty, a(0.05), NPolicy::Average).unwrap();
        prop_assert!((base.p_value - moved.p_value).abs() <= 1e-8);
    }
}
