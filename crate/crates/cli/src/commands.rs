use std::fmt::Write as _;
use std::path::Path;

use pgic_core::{
    analyze, asymptotic_ratio, classify, independent_sum_capacity, joint_sum_capacity,
    optimize_inner_bound, rate_quantities, region_bound_values, search_inseparable,
    strong_region_polygon, sweep_plane, tin_sum_rate, AggregateClass, Certificate, ChannelInstance,
    CovarianceMatrix, Error, InnerBoundOptions, SearchOptions, SplitParams, SubchannelFlags,
    SweepRow, SweepSpec, Verdict, VERSION,
};
use serde::Serialize;

use crate::args::{Command, Format, Optimizer};
use crate::input;
use crate::report::{flag, list, num, Document, Table};
use crate::CliError;

pub fn execute(cmd: &Command) -> Result<String, CliError> {
    let format = cmd.output().format;
    match cmd {
        Command::Rates(io) => rates(&load(&io.input)?, format),
        Command::Classify(io) => classify_cmd(&load(&io.input)?, format),
        Command::Sumcap(io) => sumcap(&load(&io.input)?, format),
        Command::Region(io) => region(&load(&io.input)?, format),
        Command::Separable(io) => separable(&load(&io.input)?, format),
        Command::Bounds { io, opt } => bounds(&load(&io.input)?, opt, format),
        Command::Search {
            seed,
            budget,
            subchannels,
            grid,
            tol,
            margin,
            scalar_beta,
            ..
        } => {
            let opts = SearchOptions {
                inner: InnerBoundOptions {
                    grid: *grid,
                    tol: *tol,
                    margin: *margin,
                    per_subchannel: !scalar_beta,
                    ..InnerBoundOptions::default()
                },
                ..SearchOptions::default()
            };
            search(*seed, *budget, *subchannels, &opts, format)
        }
        Command::Sweep(io) => sweep(&input::read(&io.input)?, format),
        Command::Asympt { io, scales } => asympt(&load(&io.input)?, scales, format),
    }
}

fn load(path: &Path) -> Result<ChannelInstance, CliError> {
    input::read(path)
}

fn flag_names(f: &SubchannelFlags) -> String {
    let names: Vec<&str> = [
        (f.strong, "strong"),
        (f.mixed_a, "mixedA"),
        (f.mixed_b, "mixedB"),
        (f.weak, "weak"),
        (f.noisy, "noisy"),
    ]
    .iter()
    .filter(|(on, _)| *on)
    .map(|&(_, name)| name)
    .collect();
    names.join(", ")
}

/// Maps a core error; class mismatches carry the channel's classification.
fn fail(command: &str, ch: &ChannelInstance, e: Error) -> CliError {
    match e {
        Error::ClassMismatch { .. } | Error::SubchannelClassMismatch { .. } => {
            let class = classify(ch);
            let mut msg = format!("{command}: {e}\naggregate class: {}", class.aggregate);
            for (m, f) in class.per_subchannel.iter().enumerate() {
                let _ = write!(msg, "\n  sub-channel {m}: {}", flag_names(f));
            }
            CliError::Class(msg)
        }
        other => CliError::Input(format!("{command}: {other}")),
    }
}

/// Fixed-point text for a gap, without a negative zero.
fn fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn rates(ch: &ChannelInstance, format: Format) -> Result<String, CliError> {
    let rq = rate_quantities(ch);
    Ok(match format {
        Format::Json => Document::new("rates")
            .field("channel", ch)
            .field("rates", &rq.per_subchannel)
            .render(),
        Format::Csv => {
            let mut t = Table::new(&[
                "subchannel",
                "A",
                "B",
                "C",
                "D",
                "E",
                "F",
                "G",
                "H",
                "I",
                "J",
            ]);
            for (m, r) in rq.iter().enumerate() {
                let vals = [r.a, r.b, r.c, r.d, r.e, r.f, r.g, r.h, r.i, r.j];
                t.row(std::iter::once(m.to_string()).chain(vals.iter().map(|&v| num(v))));
            }
            t.render()
        }
        Format::Text => {
            let mut s = String::from("sub");
            for c in ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"] {
                let _ = write!(s, " {c:>10}");
            }
            s.push('\n');
            for (m, r) in rq.iter().enumerate() {
                let _ = write!(s, "{m:>3}");
                for v in [r.a, r.b, r.c, r.d, r.e, r.f, r.g, r.h, r.i, r.j] {
                    let _ = write!(s, " {v:>10.6}");
                }
                s.push('\n');
            }
            s
        }
    })
}

fn classify_cmd(ch: &ChannelInstance, format: Format) -> Result<String, CliError> {
    let class = classify(ch);
    Ok(match format {
        Format::Json => Document::new("classify")
            .field("channel", ch)
            .field("aggregate_class", class.aggregate)
            .field("valid_classes", &class.valid)
            .field("subchannels", &class.per_subchannel)
            .render(),
        Format::Csv => {
            let mut t = Table::new(&[
                "subchannel",
                "strong",
                "mixed_a",
                "mixed_b",
                "weak",
                "noisy",
                "aggregate_class",
            ]);
            for (m, f) in class.per_subchannel.iter().enumerate() {
                t.row([
                    m.to_string(),
                    f.strong.to_string(),
                    f.mixed_a.to_string(),
                    f.mixed_b.to_string(),
                    f.weak.to_string(),
                    f.noisy.to_string(),
                    class.aggregate.to_string(),
                ]);
            }
            t.render()
        }
        Format::Text => {
            let valid: Vec<&str> = class.valid.iter().map(|c| c.name()).collect();
            let mut s = format!("aggregate class: {}\n", class.aggregate);
            let _ = writeln!(
                s,
                "valid classes: {}",
                if valid.is_empty() {
                    "none".into()
                } else {
                    valid.join(", ")
                }
            );
            for (m, f) in class.per_subchannel.iter().enumerate() {
                let _ = writeln!(s, "sub-channel {m}: {}", flag_names(f));
            }
            s
        }
    })
}

#[derive(Serialize)]
struct SumCapacities {
    aggregate_class: AggregateClass,
    joint: f64,
    independent: f64,
    gap: f64,
    tin: f64,
}

fn sumcap(ch: &ChannelInstance, format: Format) -> Result<String, CliError> {
    let joint = joint_sum_capacity(ch).map_err(|e| fail("sumcap", ch, e))?;
    let independent = independent_sum_capacity(ch).map_err(|e| fail("sumcap", ch, e))?;
    let caps = SumCapacities {
        aggregate_class: classify(ch).aggregate,
        joint,
        independent,
        gap: joint - independent,
        tin: tin_sum_rate(ch),
    };
    Ok(match format {
        Format::Json => Document::new("sumcap").field("channel", ch).flatten(&caps).render(),
        Format::Csv => {
            let mut t = Table::new(&["aggregate_class", "joint", "independent", "gap", "tin"]);
            t.row([
                caps.aggregate_class.to_string(),
                num(caps.joint),
                num(caps.independent),
                num(caps.gap),
                num(caps.tin),
            ]);
            t.render()
        }
        Format::Text => format!(
            "aggregate class: {}\njoint        {}\nindependent  {}\ngap          {}\ntin          {}\n",
            caps.aggregate_class,
            fixed(caps.joint),
            fixed(caps.independent),
            fixed(caps.gap),
            fixed(caps.tin)
        ),
    })
}

fn region(ch: &ChannelInstance, format: Format) -> Result<String, CliError> {
    let poly = strong_region_polygon(ch).map_err(|e| fail("region", ch, e))?;
    let p1: Vec<f64> = ch.iter().map(|s| s.p1()).collect();
    let p2: Vec<f64> = ch.iter().map(|s| s.p2()).collect();
    let s1 = CovarianceMatrix::diagonal(&p1).map_err(|e| fail("region", ch, e))?;
    let s2 = CovarianceMatrix::diagonal(&p2).map_err(|e| fail("region", ch, e))?;
    let bounds = region_bound_values(ch, &s1, &s2).map_err(|e| fail("region", ch, e))?;
    Ok(match format {
        Format::Json => Document::new("region")
            .field("channel", ch)
            .field("vertices", &poly.vertices)
            .field("bounds", bounds)
            .render(),
        Format::Csv => {
            let mut t = Table::new(&["vertex", "r1", "r2"]);
            for (k, &(r1, r2)) in poly.vertices.iter().enumerate() {
                t.row([k.to_string(), num(r1), num(r2)]);
            }
            t.render()
        }
        Format::Text => {
            let mut s = format!(
                "R1 <= {}\nR2 <= {}\nR1 + R2 <= {} (receiver 1), {} (receiver 2)\nvertices:\n",
                fixed(bounds.rate1),
                fixed(bounds.rate2),
                fixed(bounds.sum_rx1),
                fixed(bounds.sum_rx2)
            );
            for &(r1, r2) in &poly.vertices {
                let _ = writeln!(s, "  ({}, {})", fixed(r1), fixed(r2));
            }
            s
        }
    })
}

fn separable(ch: &ChannelInstance, format: Format) -> Result<String, CliError> {
    let v = analyze(ch);
    let class = classify(ch).aggregate;
    Ok(match format {
        Format::Json => Document::new("separable")
            .field("channel", ch)
            .field("aggregate_class", class)
            .field("verdict", v.verdict)
            .field("family", v.family)
            .field("gap", v.gap)
            .field("on_boundary", v.on_boundary)
            .field("conditional", v.conditional)
            .field("memberships", &v.memberships)
            .render(),
        Format::Csv => {
            let mut t = Table::new(&[
                "subchannel",
                "in_S1",
                "in_S2",
                "in_S3",
                "in_M1",
                "in_M2",
                "in_N",
                "remark2_unknown",
                "on_boundary",
                "verdict",
                "family",
                "gap",
            ]);
            for (k, m) in v.memberships.iter().enumerate() {
                t.row([
                    k.to_string(),
                    flag(m.in_s1),
                    flag(m.in_s2),
                    flag(m.in_s3),
                    flag(m.in_m1),
                    flag(m.in_m2),
                    m.in_n.to_string(),
                    m.in_remark2_unknown.to_string(),
                    m.on_boundary.to_string(),
                    v.verdict.to_string(),
                    v.family.map(|f| f.to_string()).unwrap_or_default(),
                    v.gap.map(num).unwrap_or_default(),
                ]);
            }
            t.render()
        }
        Format::Text => {
            let mut s = match (v.verdict, v.family, v.gap) {
                (Verdict::Separable, Some(f), Some(g)) => {
                    format!("Separable (family {f}), gap {}", fixed(g))
                }
                (Verdict::Separable, Some(f), None) => format!("Separable (family {f})"),
                (Verdict::Inseparable, _, Some(g)) => format!("Inseparable, gap {}", fixed(g)),
                (verdict, _, _) => format!("{verdict} (aggregate class {class})"),
            };
            s.push('\n');
            if v.conditional {
                s.push_str(
                    "conditional on the noisy-interference power condition, which is not checked\n",
                );
            }
            if v.on_boundary {
                s.push_str(
                    "a sub-channel lies on a set boundary; settled by the rate inequalities\n",
                );
            }
            s
        }
    })
}

fn bounds(ch: &ChannelInstance, opt: &Optimizer, format: Format) -> Result<String, CliError> {
    let opts = InnerBoundOptions {
        grid: opt.grid,
        tol: opt.tol,
        margin: opt.margin,
        per_subchannel: opt.per_subchannel_beta,
        ..InnerBoundOptions::default()
    };
    let r = optimize_inner_bound(ch, &opts).map_err(|e| fail("bounds", ch, e))?;
    let certificate = r.inseparable_certified.then(|| Certificate {
        schema: 1,
        version: VERSION.to_string(),
        channel: ch.clone(),
        split: r.best_split.clone(),
        inner: r.inner_joint,
        outer: r.outer_independent,
        margin: r.margin,
        seed: None,
        draw_index: None,
        distribution: None,
    });
    let (mode, b1, b2) = match &r.best_split {
        SplitParams::Scalar { beta1, beta2 } => ("scalar", vec![*beta1], vec![*beta2]),
        SplitParams::PerSubchannel { beta1, beta2 } => {
            ("per_subchannel", beta1.clone(), beta2.clone())
        }
    };
    Ok(match format {
        Format::Json => Document::new("bounds")
            .field("channel", ch)
            .field("aggregate_class", classify(ch).aggregate)
            .flatten(&r)
            .field("certificate", &certificate)
            .render(),
        Format::Csv => {
            let mut t = Table::new(&[
                "outer_independent", "inner_joint", "gap", "margin", "inseparable_certified", "split_mode", "beta1", "beta2",
            ]);
            t.row([
                num(r.outer_independent),
                num(r.inner_joint),
                num(r.gap),
                num(r.margin),
                r.inseparable_certified.to_string(),
                mode.to_string(),
                list(&b1),
                list(&b2),
            ]);
            t.render()
        }
        Format::Text => format!(
            "outer bound (independent coding)  {}\ninner bound (joint coding)        {}\ngap                               {}\nsplit ({mode})  beta1 {}  beta2 {}\ninseparability certified (margin {}): {}\n",
            fixed(r.outer_independent),
            fixed(r.inner_joint),
            fixed(r.gap),
            list(&b1),
            list(&b2),
            num(r.margin),
            if r.inseparable_certified { "yes" } else { "no" }
        ),
    })
}

fn search(
    seed: u64,
    budget: u64,
    m: usize,
    opts: &SearchOptions,
    format: Format,
) -> Result<String, CliError> {
    let o = search_inseparable(seed, budget, m, opts)
        .map_err(|e| CliError::Input(format!("search: {e}")))?;
    let b = &o.best;
    Ok(match format {
        Format::Json => Document::new("search")
            .field(
                "split_mode",
                if opts.inner.per_subchannel {
                    "per_subchannel"
                } else {
                    "scalar"
                },
            )
            .field("grid", opts.inner.grid)
            .field("margin", opts.inner.margin)
            .flatten(&o)
            .render(),
        Format::Csv => {
            let mut t = Table::new(&[
                "seed",
                "budget",
                "subchannels",
                "evaluated",
                "best_draw_index",
                "best_inner",
                "best_outer",
                "best_gap",
                "certified",
            ]);
            t.row([
                o.seed.to_string(),
                o.budget.to_string(),
                o.subchannels.to_string(),
                o.evaluated.to_string(),
                b.draw_index.to_string(),
                num(b.inner),
                num(b.outer),
                num(b.gap),
                o.certificate.is_some().to_string(),
            ]);
            t.render()
        }
        Format::Text => {
            let mut s = format!(
                "evaluated {} weak channels (seed {}, {} sub-channels)\ndistribution: {}\nbest draw {}: inner {}  outer {}  gap {}\n",
                o.evaluated,
                o.seed,
                o.subchannels,
                o.distribution,
                b.draw_index,
                fixed(b.inner),
                fixed(b.outer),
                fixed(b.gap)
            );
            s.push_str(match o.certificate {
                Some(_) => "certificate emitted: the channel is inseparable (use --format json for the certificate)\n",
                None => "no certificate: best gap is below the margin\n",
            });
            s
        }
    })
}

fn family_cell(row: &SweepRow) -> String {
    if row.tie {
        return "tie".into();
    }
    match (row.verdict, row.family) {
        (Verdict::Separable, Some(f)) => f.to_string(),
        (verdict, _) => verdict.to_string(),
    }
}

fn sweep(spec: &SweepSpec, format: Format) -> Result<String, CliError> {
    let rows = sweep_plane(spec).map_err(|e| CliError::Input(format!("sweep: {e}")))?;
    Ok(match format {
        Format::Json => Document::new("sweep")
            .field("spec", spec)
            .field("rows", &rows)
            .render(),
        Format::Csv => {
            let mut t = Table::new(&[
                "x_ratio",
                "y_ratio",
                "aggregate_class",
                "family",
                "in_S1",
                "in_S2",
                "in_S3",
                "in_M1",
                "in_M2",
                "in_N",
                "remark2_unknown",
            ]);
            for r in &rows {
                t.row([
                    num(r.x_ratio),
                    num(r.y_ratio),
                    r.aggregate.to_string(),
                    family_cell(r),
                    flag(r.in_s1),
                    flag(r.in_s2),
                    flag(r.in_s3),
                    flag(r.in_m1),
                    flag(r.in_m2),
                    r.in_n.to_string(),
                    r.remark2_unknown.to_string(),
                ]);
            }
            t.render()
        }
        Format::Text => {
            let mut s = format!("{:>8} {:>8}  {:<13} family\n", "x", "y", "class");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:>8} {:>8}  {:<13} {}",
                    num(r.x_ratio),
                    num(r.y_ratio),
                    r.aggregate.name(),
                    family_cell(r)
                );
            }
            s
        }
    })
}

fn asympt(ch: &ChannelInstance, scales: &[f64], format: Format) -> Result<String, CliError> {
    let series = asymptotic_ratio(ch, scales).map_err(|e| fail("asympt", ch, e))?;
    Ok(match format {
        Format::Json => Document::new("asympt")
            .field("channel", ch)
            .field("aggregate_class", classify(ch).aggregate)
            .field("points", &series.points)
            .render(),
        Format::Csv => {
            let mut t = Table::new(&["scale", "joint", "independent", "ratio"]);
            for p in &series.points {
                t.row([num(p.scale), num(p.joint), num(p.independent), num(p.ratio)]);
            }
            t.render()
        }
        Format::Text => {
            let mut s = format!(
                "{:>10} {:>14} {:>14} {:>12}\n",
                "scale", "joint", "independent", "ratio"
            );
            for p in &series.points {
                let _ = writeln!(
                    s,
                    "{:>10} {:>14.6e} {:>14.6e} {:>12.9}",
                    num(p.scale),
                    p.joint,
                    p.independent,
                    p.ratio
                );
            }
            s
        }
    })
}
