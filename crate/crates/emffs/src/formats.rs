//! Text formats for intermediate artifacts. Every writer is deterministic
//! and every reader accepts exactly what the matching writer produces.
//!
//! Floating-point values are written with Rust's shortest round-trip
//! formatting, so reading a file back yields bit-identical numbers.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use emffs_core::classifier::{Node, NodeKind, Test};
use emffs_core::ensemble::split_size;
use emffs_core::{
    DiscretizationModel, FilterMethod, RankedFeatureList, Schema, SelectedFeatureSet, SplitCriterion, TreeModel,
    TreeParams,
};

use crate::{FormatError, FormatResult};

const RANKED_HEADER: [&str; 5] = ["rank", "feature_index", "feature_name", "score", "method"];

/// One row per feature: `rank,feature_index,feature_name,score,method`.
pub fn write_ranked_csv<W: Write>(list: &RankedFeatureList, schema: &Schema, writer: W) -> FormatResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RANKED_HEADER)?;
    for (rank, &(f, score)) in list.entries.iter().enumerate() {
        w.write_record([
            (rank + 1).to_string(),
            f.to_string(),
            schema.name(f)?.to_string(),
            score.to_string(),
            list.method.name().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a ranked list, checking ranks, names against `schema` and that a
/// single method is named throughout.
pub fn read_ranked_csv<R: Read>(reader: R, schema: &Schema) -> FormatResult<RankedFeatureList> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(RANKED_HEADER) {
        return Err(FormatError::Invalid(format!(
            "ranked list header is `{}`, expected `{}`",
            header.iter().collect::<Vec<_>>().join(","),
            RANKED_HEADER.join(",")
        )));
    }
    let mut method: Option<FilterMethod> = None;
    let mut entries = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec.position().map_or(0, |p| p.line());
        let bad = |m: String| FormatError::row(row, m);
        let rank: usize = rec[0].parse().map_err(|_| bad(format!("bad rank `{}`", &rec[0])))?;
        if rank != i + 1 {
            return Err(bad(format!("rank {rank}, expected {}", i + 1)));
        }
        let f: usize = rec[1].parse().map_err(|_| bad(format!("bad feature index `{}`", &rec[1])))?;
        let name = schema.name(f).map_err(|e| bad(e.to_string()))?;
        if !name.eq_ignore_ascii_case(&rec[2]) {
            return Err(bad(format!("feature {f} is `{name}`, file says `{}`", &rec[2])));
        }
        let score: f64 = rec[3].parse().map_err(|_| bad(format!("bad score `{}`", &rec[3])))?;
        let m: FilterMethod = rec[4].parse().map_err(|e: emffs_core::Error| bad(e.to_string()))?;
        if method.is_some_and(|prev| prev != m) {
            return Err(bad("ranked list mixes methods".into()));
        }
        method = Some(m);
        entries.push((f, score));
    }
    let method = method.ok_or_else(|| FormatError::Invalid("ranked list has no rows".into()))?;
    let list = emffs_core::rank_features(method, &entries)?;
    if list.entries != entries {
        return Err(FormatError::Invalid(format!("{method} list is not in rank order")));
    }
    Ok(list)
}

/// The retained head of every ranking side by side: one column of feature
/// indices per method, one row per rank.
pub fn write_top_table<W: Write>(lists: &[RankedFeatureList], n_total: usize, fraction: f64, writer: W) -> FormatResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["rank".to_string()];
    header.extend(lists.iter().map(|l| l.method.name().to_string()));
    w.write_record(&header)?;
    let size = split_size(n_total, fraction);
    for rank in 0..size {
        let mut row = vec![(rank + 1).to_string()];
        row.extend(
            lists
                .iter()
                .map(|l| l.entries.get(rank).map_or(String::new(), |e| e.0.to_string())),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

const SELECTION_HEADER: &str = "feature_index,feature_name,count,selected";

/// Threshold line, then one CSV row per counted feature with its vote
/// count and whether it was selected.
pub fn write_selection<W: Write>(sel: &SelectedFeatureSet, schema: &Schema, mut w: W) -> FormatResult<()> {
    writeln!(w, "# emffs selection")?;
    writeln!(w, "threshold: {}", sel.threshold)?;
    writeln!(w, "selected: {}", sel.len())?;
    writeln!(w, "{SELECTION_HEADER}")?;
    for (&f, &count) in &sel.counts {
        writeln!(w, "{f},{},{count},{}", schema.name(f)?, u8::from(sel.contains(f)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_selection<R: BufRead>(reader: R, schema: &Schema) -> FormatResult<SelectedFeatureSet> {
    let mut threshold = None;
    let mut expected = None;
    let mut in_rows = false;
    let mut counts = BTreeMap::new();
    let mut features = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let bad = |m: String| FormatError::line(line_no, m);
        if !in_rows {
            if text == SELECTION_HEADER {
                in_rows = true;
            } else if let Some(v) = text.strip_prefix("threshold:") {
                threshold = Some(v.trim().parse::<usize>().map_err(|_| bad(format!("bad threshold `{v}`")))?);
            } else if let Some(v) = text.strip_prefix("selected:") {
                expected = Some(v.trim().parse::<usize>().map_err(|_| bad(format!("bad count `{v}`")))?);
            } else {
                return Err(bad(format!("unexpected line `{text}`")));
            }
            continue;
        }
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let [index, name, count, selected] = parts[..] else {
            return Err(bad(format!("expected 4 fields, found {}", parts.len())));
        };
        let f: usize = index.parse().map_err(|_| bad(format!("bad feature index `{index}`")))?;
        let want = schema.name(f).map_err(|e| bad(e.to_string()))?;
        if !want.eq_ignore_ascii_case(name) {
            return Err(bad(format!("feature {f} is `{want}`, file says `{name}`")));
        }
        let count: usize = count.parse().map_err(|_| bad(format!("bad count `{count}`")))?;
        if counts.insert(f, count).is_some() {
            return Err(bad(format!("feature {f} listed twice")));
        }
        match selected {
            "1" => features.push(f),
            "0" => {}
            other => return Err(bad(format!("selected flag must be 0 or 1, found `{other}`"))),
        }
    }
    let threshold = threshold.ok_or_else(|| FormatError::Invalid("selection file has no threshold".into()))?;
    if !in_rows {
        return Err(FormatError::Invalid("selection file has no feature table".into()));
    }
    if let Some(n) = expected {
        if n != features.len() {
            return Err(FormatError::Invalid(format!(
                "selection file announces {n} features but marks {}",
                features.len()
            )));
        }
    }
    Ok(SelectedFeatureSet {
        features,
        counts,
        threshold,
    })
}

/// `n_features` line, then `feature_index cut cut ...` per continuous
/// feature (no cuts means a single interval).
pub fn write_discretizer<W: Write>(m: &DiscretizationModel, mut w: W) -> FormatResult<()> {
    writeln!(w, "# feature_index cut_points...")?;
    writeln!(w, "n_features {}", m.n_features())?;
    for (f, cuts) in m.iter() {
        write!(w, "{f}")?;
        for c in cuts {
            write!(w, " {c}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_discretizer<R: BufRead>(reader: R) -> FormatResult<DiscretizationModel> {
    let mut n_features = None;
    let mut cuts = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let bad = |m: String| FormatError::line(line_no, m);
        let mut parts = text.split_whitespace();
        let head = parts.next().expect("non-empty line");
        if head == "n_features" {
            let v = parts.next().ok_or_else(|| bad("missing feature count".into()))?;
            n_features = Some(v.parse::<usize>().map_err(|_| bad(format!("bad feature count `{v}`")))?);
            continue;
        }
        let f: usize = head.parse().map_err(|_| bad(format!("bad feature index `{head}`")))?;
        let list = parts
            .map(|p| p.parse::<f64>().map_err(|_| bad(format!("bad cut point `{p}`"))))
            .collect::<FormatResult<Vec<f64>>>()?;
        if cuts.insert(f, list).is_some() {
            return Err(bad(format!("feature {f} listed twice")));
        }
    }
    let n = n_features.ok_or_else(|| FormatError::Invalid("discretizer file has no n_features line".into()))?;
    Ok(DiscretizationModel::from_cuts(n, cuts)?)
}

/// Percent-encodes bytes that would break the tree line syntax.
fn escape(token: &str) -> String {
    let mut out = String::with_capacity(token.len());
    for b in token.bytes() {
        if b.is_ascii_graphic() && !matches!(b, b'%' | b',' | b'|' | b'=') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn unescape(s: &str) -> Result<String, String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s.get(i + 1..i + 3).ok_or("truncated escape")?;
            out.push(u8::from_str_radix(hex, 16).map_err(|_| format!("bad escape `%{hex}`"))?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| "escape is not UTF-8".to_string())
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Header lines for the classes and parameters, then one line per node in
/// id order, indented by depth:
///
/// ```text
/// 0 split feature=5 le=0.5 gain=0.25 counts=10,4 children=1,2
///   1 leaf counts=9,0
/// ```
pub fn write_tree<W: Write>(t: &TreeModel, mut w: W) -> FormatResult<()> {
    let p = t.params();
    writeln!(w, "emffs-tree 1")?;
    writeln!(
        w,
        "classes {}",
        t.class_names().iter().map(|c| escape(c)).collect::<Vec<_>>().join(",")
    )?;
    writeln!(w, "criterion {}", p.criterion)?;
    writeln!(w, "min_leaf {}", p.min_leaf)?;
    match p.prune_confidence {
        Some(cf) => writeln!(w, "prune_confidence {cf:?}")?,
        None => writeln!(w, "prune_confidence none")?,
    }
    writeln!(w, "nodes {}", t.node_count())?;

    let mut depth = vec![0usize; t.node_count()];
    for (id, node) in t.nodes().iter().enumerate() {
        write!(w, "{}{id} ", "  ".repeat(depth[id]))?;
        let counts = join(&node.class_counts);
        match &node.kind {
            NodeKind::Leaf => writeln!(w, "leaf counts={counts}")?,
            NodeKind::Split {
                feature,
                test,
                gain,
                children,
            } => {
                for &c in children {
                    depth[c] = depth[id] + 1;
                }
                let test = match test {
                    Test::LessOrEqual(th) => format!("le={th:?}"),
                    Test::Nominal(values) => {
                        format!("in={}", values.iter().map(|v| escape(v)).collect::<Vec<_>>().join("|"))
                    }
                };
                writeln!(
                    w,
                    "split feature={feature} {test} gain={gain:?} counts={counts} children={}",
                    join(children)
                )?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn header_value<'a>(line: Option<(usize, &'a str)>, key: &str) -> FormatResult<(usize, &'a str)> {
    let (no, text) = line.ok_or_else(|| FormatError::Invalid(format!("tree file ends before `{key}`")))?;
    text.strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .map(|v| (no, v.trim()))
        .ok_or_else(|| FormatError::line(no, format!("expected `{key}`")))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|x| x.parse::<T>().map_err(|_| format!("bad list item `{x}`")))
        .collect()
}

pub fn read_tree<R: Read>(mut reader: R) -> FormatResult<TreeModel> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());

    let (no, magic) = lines.next().ok_or_else(|| FormatError::Invalid("empty tree file".into()))?;
    if magic.trim() != "emffs-tree 1" {
        return Err(FormatError::line(no, "not an emffs tree file"));
    }
    let (no, classes) = header_value(lines.next(), "classes")?;
    let class_names = classes
        .split(',')
        .map(unescape)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|m| FormatError::line(no, m))?;
    let (no, criterion) = header_value(lines.next(), "criterion")?;
    let criterion: SplitCriterion = criterion.parse().map_err(|e: emffs_core::Error| FormatError::line(no, e.to_string()))?;
    let (no, min_leaf) = header_value(lines.next(), "min_leaf")?;
    let min_leaf = min_leaf
        .parse()
        .map_err(|_| FormatError::line(no, format!("bad min_leaf `{min_leaf}`")))?;
    let (no, cf) = header_value(lines.next(), "prune_confidence")?;
    let prune_confidence = match cf {
        "none" => None,
        v => Some(v.parse::<f64>().map_err(|_| FormatError::line(no, format!("bad confidence `{v}`")))?),
    };
    let (no, count) = header_value(lines.next(), "nodes")?;
    let count: usize = count
        .parse()
        .map_err(|_| FormatError::line(no, format!("bad node count `{count}`")))?;

    let mut nodes = Vec::with_capacity(count);
    for (no, line) in lines {
        let node = parse_node(line.trim(), nodes.len()).map_err(|m| FormatError::line(no, m))?;
        nodes.push(node);
    }
    if nodes.len() != count {
        return Err(FormatError::Invalid(format!("tree announces {count} nodes, found {}", nodes.len())));
    }
    let params = TreeParams {
        criterion,
        min_leaf,
        prune_confidence,
    };
    Ok(TreeModel::from_parts(nodes, params, class_names)?)
}

fn parse_node(line: &str, expected_id: usize) -> Result<Node, String> {
    let mut parts = line.split_whitespace();
    let id: usize = parts
        .next()
        .and_then(|p| p.parse().ok())
        .ok_or("missing node id")?;
    if id != expected_id {
        return Err(format!("node {id} out of order, expected {expected_id}"));
    }
    let kind = parts.next().ok_or("missing node kind")?;
    let mut fields = BTreeMap::new();
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(|| format!("bad field `{p}`"))?;
        fields.insert(k, v);
    }
    let field = |k: &str| fields.get(k).copied().ok_or_else(|| format!("missing `{k}`"));
    let class_counts = parse_list::<u64>(field("counts")?)?;
    match kind {
        "leaf" => Ok(Node {
            class_counts,
            kind: NodeKind::Leaf,
        }),
        "split" => {
            let feature = field("feature")?.parse().map_err(|_| "bad feature".to_string())?;
            let gain = field("gain")?.parse().map_err(|_| "bad gain".to_string())?;
            let children = parse_list::<usize>(field("children")?)?;
            let test = match (fields.get("le"), fields.get("in")) {
                (Some(v), None) => Test::LessOrEqual(v.parse().map_err(|_| format!("bad threshold `{v}`"))?),
                (None, Some(v)) => Test::Nominal(v.split('|').map(unescape).collect::<Result<_, _>>()?),
                _ => return Err("split needs exactly one of `le` and `in`".into()),
            };
            Ok(Node {
                class_counts,
                kind: NodeKind::Split {
                    feature,
                    test,
                    gain,
                    children,
                },
            })
        }
        other => Err(format!("unknown node kind `{other}`")),
    }
}
