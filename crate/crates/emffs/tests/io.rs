mod common;

use std::io::Cursor;

use emffs::{arff, formats, nslkdd};
use emffs_core::{
    fit_mdl_discretizer, rank_features, train_tree, Column, Dataset, DiscretizationModel, FeatureKind, FilterMethod,
    Schema, SelectedFeatureSet, SplitCriterion, TreeParams,
};
use proptest::prelude::*;

fn parse(text: &str) -> Result<Dataset, String> {
    nslkdd::parse_csv(text.as_bytes()).map_err(|e| e.to_string())
}

fn same_data(a: &Dataset, b: &Dataset) {
    assert_eq!(a.len(), b.len());
    assert_eq!(a.columns(), b.columns());
    assert_eq!(a.labels(), b.labels());
    assert_eq!(a.label_names(), b.label_names());
}

#[test]
fn parses_rows_and_drops_difficulty() {
    let text = common::synthetic_rows(120, 3);
    let d = parse(&text).unwrap();
    assert_eq!(d.len(), 120);
    assert_eq!(d.columns().len(), 41);
    // Without the trailing difficulty score the data is the same.
    let trimmed: String = text
        .lines()
        .map(|l| format!("{}\n", &l[..l.rfind(',').unwrap()]))
        .collect();
    same_data(&d, &parse(&trimmed).unwrap());
}

#[test]
fn binarized_counts_match_label_scan() {
    let text = common::synthetic_rows(300, 5);
    let normal = text.lines().filter(|l| l.split(',').nth(41) == Some("normal")).count() as u64;
    let d = parse(&text).unwrap().binarize_labels();
    assert_eq!(d.label_names(), ["normal", "anomaly"]);
    assert_eq!(d.class_counts(), vec![normal, 300 - normal]);
}

#[test]
fn errors_name_the_row() {
    let mut lines: Vec<String> = common::synthetic_rows(5, 9).lines().map(String::from).collect();
    lines[2] = lines[2].splitn(3, ',').nth(2).unwrap().to_string();
    let err = parse(&lines.join("\n")).unwrap_err();
    assert!(err.starts_with("row 3:"), "{err}");

    let mut lines: Vec<String> = common::synthetic_rows(5, 9).lines().map(String::from).collect();
    lines[3] = format!("x{}", &lines[3][lines[3].find(',').unwrap()..]);
    let err = parse(&lines.join("\n")).unwrap_err();
    assert!(err.starts_with("row 4:"), "{err}");

    let mut fields: Vec<String> = common::synthetic_rows(1, 9).trim().split(',').map(String::from).collect();
    fields[41] = "17".into();
    let err = parse(&fields.join(",")).unwrap_err();
    assert!(err.starts_with("row 1:") && err.contains("label"), "{err}");
}

#[test]
fn empty_input_has_no_instances() {
    assert_eq!(parse("").unwrap_err(), "no instances");
    assert_eq!(parse("\n\n").unwrap_err(), "no instances");
}

#[test]
fn exported_csv_reads_back() {
    let d = parse(&common::synthetic_rows(80, 21)).unwrap().binarize_labels();
    let mut buf = Vec::new();
    nslkdd::write_csv(&d, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("duration,protocol_type,service,flag,"));
    same_data(&d, &parse(&text).unwrap());
}

#[test]
fn bad_header_is_rejected() {
    let mut buf = Vec::new();
    nslkdd::write_csv(&parse(&common::synthetic_rows(3, 1)).unwrap(), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap().replacen("service", "svc", 1);
    let err = parse(&text).unwrap_err();
    assert!(err.starts_with("row 1:") && err.contains("svc"), "{err}");
}

fn to_arff(d: &Dataset) -> String {
    let schema = Schema::nsl_kdd();
    let mut s = String::from("% synthetic\n@RELATION 'KDDTrain'\n\n");
    for (spec, col) in schema.features().iter().zip(d.columns()) {
        match (spec.kind, col) {
            (FeatureKind::Nominal, Column::Nominal { values, .. }) => {
                let quoted: Vec<String> = values.iter().map(|v| format!("'{v}'")).collect();
                s += &format!("@attribute '{}' {{{}}}\n", spec.name, quoted.join(","));
            }
            _ => s += &format!("@attribute '{}' real\n", spec.name),
        }
    }
    s += &format!("@attribute 'class' {{{}}}\n@data\n", d.label_names().join(","));
    let mut buf = Vec::new();
    nslkdd::write_csv(d, &mut buf).unwrap();
    for line in String::from_utf8(buf).unwrap().lines().skip(1) {
        s += line;
        s.push('\n');
    }
    s
}

#[test]
fn arff_matches_csv() {
    let d = parse(&common::synthetic_rows(150, 8)).unwrap().binarize_labels();
    let a = arff::parse_arff(Cursor::new(to_arff(&d))).unwrap();
    same_data(&d, &a);
}

#[test]
fn arff_errors_carry_line_numbers() {
    let d = parse(&common::synthetic_rows(4, 8)).unwrap().binarize_labels();
    let text = to_arff(&d);
    let header_lines = text.lines().position(|l| l == "@data").unwrap() + 1;
    let broken: Vec<&str> = text
        .lines()
        .enumerate()
        .map(|(i, l)| if i == header_lines + 1 { "1,2,3" } else { l })
        .collect();
    let err = arff::parse_arff(Cursor::new(broken.join("\n"))).unwrap_err().to_string();
    assert!(err.starts_with(&format!("line {}:", header_lines + 2)), "{err}");
}

fn tree_params() -> TreeParams {
    TreeParams {
        criterion: SplitCriterion::GainRatio,
        min_leaf: 2,
        prune_confidence: Some(0.25),
    }
}

#[test]
fn tree_file_round_trip() {
    let d = parse(&common::synthetic_rows(250, 4)).unwrap().binarize_labels();
    let features: Vec<usize> = (1..=41).collect();
    for params in [tree_params(), TreeParams { criterion: SplitCriterion::Gain, min_leaf: 1, prune_confidence: None }] {
        let t = train_tree(&d, &features, &params).unwrap();
        assert!(t.node_count() > 1);
        let mut buf = Vec::new();
        formats::write_tree(&t, &mut buf).unwrap();
        let back = formats::read_tree(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.predict_all(&d), t.predict_all(&d));
    }
}

#[test]
fn discretizer_file_round_trip() {
    let d = parse(&common::synthetic_rows(250, 6)).unwrap().binarize_labels();
    let m = fit_mdl_discretizer(&d).unwrap();
    assert!(m.iter().any(|(_, cuts)| !cuts.is_empty()));
    let mut buf = Vec::new();
    formats::write_discretizer(&m, &mut buf).unwrap();
    let back: DiscretizationModel = formats::read_discretizer(buf.as_slice()).unwrap();
    assert_eq!(back, m);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn csv_export_is_lossless(n in 1usize..60, seed in any::<u64>()) {
        let d = parse(&common::synthetic_rows(n, seed)).unwrap();
        let mut buf = Vec::new();
        nslkdd::write_csv(&d, &mut buf).unwrap();
        let back = parse(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.columns(), d.columns());
        prop_assert_eq!(back.labels(), d.labels());
    }

    #[test]
    fn ranked_file_round_trip(
        scores in prop::collection::vec(prop_oneof![Just(0.0), -1e6f64..1e6, Just(1.0 / 3.0)], 41),
        method in prop::sample::select(FilterMethod::ALL.to_vec()),
    ) {
        let schema = Schema::nsl_kdd();
        let list = rank_features(method, &scores.iter().enumerate().map(|(i, &s)| (i + 1, s)).collect::<Vec<_>>()).unwrap();
        let mut buf = Vec::new();
        formats::write_ranked_csv(&list, &schema, &mut buf).unwrap();
        prop_assert_eq!(formats::read_ranked_csv(buf.as_slice(), &schema).unwrap(), list);
    }

    #[test]
    fn selection_file_round_trip(
        counts in prop::collection::btree_map(1usize..=41, 1usize..=4, 0..41),
        threshold in 1usize..=4,
    ) {
        let schema = Schema::nsl_kdd();
        let sel = SelectedFeatureSet {
            features: counts.iter().filter(|(_, &c)| c >= threshold).map(|(&f, _)| f).collect(),
            counts,
            threshold,
        };
        let mut buf = Vec::new();
        formats::write_selection(&sel, &schema, &mut buf).unwrap();
        prop_assert_eq!(formats::read_selection(buf.as_slice(), &schema).unwrap(), sel);
    }

    #[test]
    fn discretizer_cut_points_survive(cuts in prop::collection::vec(-1e12f64..1e12, 0..12)) {
        let mut cuts = cuts;
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let m = DiscretizationModel::from_cuts(41, [(1usize, cuts.clone()), (5, vec![0.5])].into_iter().collect()).unwrap();
        let mut buf = Vec::new();
        formats::write_discretizer(&m, &mut buf).unwrap();
        let back = formats::read_discretizer(buf.as_slice()).unwrap();
        prop_assert_eq!(back.cuts(1).unwrap(), cuts.as_slice());
    }
}
