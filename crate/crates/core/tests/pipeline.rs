mod common;

use common::schema;
use junctionlab::model::templates::Template;
use junctionlab::pipeline::{analyze, analyze_loop, AnalysisConfig, LoopConfig, Stage};
use num_complex::Complex;
use serde_json::{json, Value};

fn t(name: &str) -> Template {
    Template::parse(name).unwrap()
}

fn report_json(cfg: &AnalysisConfig) -> String {
    serde_json::to_string_pretty(&analyze(cfg).unwrap_or_else(|e| panic!("{e}")).report).unwrap()
}

fn with_param(t: Template, k: &str, v: f64) -> AnalysisConfig {
    let mut cfg = AnalysisConfig::template(t);
    if let junctionlab::pipeline::Source::Template { params, .. } = &mut cfg.source {
        params.insert(k.to_string(), Complex::new(v, 0.0));
    }
    cfg
}

#[test]
fn i3_and_iv_reports() {
    let an = analyze(&with_param(Template::I(3), "eps", 0.01)).unwrap();
    assert_eq!(an.report.algebra.label, "A2");
    assert_eq!(an.report.junctions.roots_count, 6);
    assert_eq!(an.report.algebra.matches_fiber_type, Some(true));

    let an = analyze(&with_param(Template::IV, "eps", 0.01)).unwrap();
    assert_eq!(an.report.discriminant_points.len(), 4);
    assert_eq!(an.report.junctions.roots_count, 6);
    assert_eq!(an.report.monodromy_trace, -1);
}

#[test]
fn spec_source_uses_unit_radius() {
    let an = analyze(&AnalysisConfig::spec("f = -3; g = 2.01 + s^2")).unwrap();
    assert_eq!(an.radius, 1.0);
    assert_eq!(an.report.model.template, None);
    assert_eq!(an.report.model.fiber_type, None);
    assert_eq!(an.report.algebra.label, "A1");
    assert_eq!(an.report.algebra.matches_fiber_type, None);
    assert_eq!(an.report.total_monodromy, [[1, 0], [-2, 1]]);
}

#[test]
fn failures_name_their_stage() {
    let e = analyze(&AnalysisConfig::spec("f = -3")).err().unwrap();
    assert_eq!((e.stage, e.exit_code()), (Stage::Model, 2));
    assert_eq!(e.to_json()["error"]["kind"], "parse");

    let mut cfg = AnalysisConfig::template(Template::I(2));
    cfg.radius = Some(0.05);
    let e = analyze(&cfg).err().unwrap();
    assert_eq!((e.stage, e.exit_code()), (Stage::Discriminant, 3));
    assert_eq!(e.to_json()["error"]["kind"], "root-count-mismatch");

    let mut cfg = AnalysisConfig::template(t("IIstar"));
    cfg.search_cap = 10;
    let e = analyze(&cfg).err().unwrap();
    assert_eq!((e.stage, e.exit_code()), (Stage::Junctions, 4));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for t in [Template::I(4), Template::IV, t("I1star"), t("IVstar")] {
        let cfg = AnalysisConfig::template(t);
        assert_eq!(report_json(&cfg), report_json(&cfg), "{}", t.name());
    }
    let mut a = AnalysisConfig::template(t("IVstar"));
    let mut b = a.clone();
    a.seed = 2;
    b.seed = 3;
    assert_ne!(report_json(&a), report_json(&b));
}

#[test]
fn reports_and_errors_match_the_schema() {
    let s = schema::load();
    let mut docs: Vec<Value> = ["I2", "III", "IV", "I3star", "IIIstar"]
        .iter()
        .map(|n| serde_json::to_value(&analyze(&AnalysisConfig::template(t(n))).unwrap().report).unwrap())
        .collect();
    docs.push(serde_json::to_value(&analyze(&AnalysisConfig::spec("f = -3; g = 2.01 + s^2")).unwrap().report).unwrap());
    let lp = analyze_loop(&AnalysisConfig::template(Template::I0StarSlice), LoopConfig { steps: 64, radius: None }).unwrap();
    docs.push(serde_json::to_value(&lp.report).unwrap());
    docs.push(analyze(&AnalysisConfig::spec("g = 1")).err().unwrap().to_json());
    for d in &docs {
        let errs = schema::validate(&s, d);
        assert!(errs.is_empty(), "{errs:#?}");
    }
}

#[test]
fn schema_check_catches_broken_reports() {
    let s = schema::load();
    let good = serde_json::to_value(&analyze(&AnalysisConfig::template(Template::I(2))).unwrap().report).unwrap();
    let breakages: [(&str, Value); 5] = [
        ("/version", json!("0.9")),
        ("/monodromy_trace", json!(1.5)),
        ("/paths/0/survivor", json!(4)),
        ("/cycles/0", json!([0, 1, 2])),
        ("/base_fiber/nudges", json!(-1)),
    ];
    for (ptr, bad) in breakages {
        let mut d = good.clone();
        *d.pointer_mut(ptr).unwrap() = bad;
        assert!(!schema::validate(&s, &d).is_empty(), "{ptr}");
    }
    let mut d = good.clone();
    d.as_object_mut().unwrap().remove("algebra");
    assert!(!schema::validate(&s, &d).is_empty());
    let mut d = good;
    d["junctions"]["extra"] = json!(1);
    assert!(!schema::validate(&s, &d).is_empty());
    assert!(!schema::validate(&s, &json!({ "error": { "stage": "nowhere", "kind": "io", "message": "" } })).is_empty());
}
