//! CSV and SVG writers. Output is a pure function of the input data, so
//! artifacts are byte-reproducible.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::engine::Trace;
use crate::evolve::GenerationStats;
use crate::experiments::GeneCountRow;

/// Scientific notation with 17 significant digits (exact `f64` round trip).
pub fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace_csv<W: Write>(trace: &Trace, mut out: W) -> io::Result<()> {
    let n = trace.gene_count();
    let mut header = String::from("cycle");
    for i in 0..n {
        write!(header, ",c_{i}").unwrap();
    }
    for i in 0..n {
        write!(header, ",r_{i}").unwrap();
    }
    writeln!(out, "{header}")?;
    for (t, (conc, rates)) in trace.concentrations.iter().zip(&trace.rates).enumerate() {
        let mut line = t.to_string();
        for v in conc.iter().chain(rates) {
            line.push(',');
            line.push_str(&fmt_value(*v));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn trace_csv(trace: &Trace) -> String {
    let mut buf = Vec::new();
    write_trace_csv(trace, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

pub fn evolution_csv(history: &[GenerationStats]) -> String {
    let mut s = String::from("generation,best,median,q25,q75\n");
    for h in history {
        writeln!(
            s,
            "{},{},{},{},{}",
            h.generation,
            fmt_value(h.best),
            fmt_value(h.median),
            fmt_value(h.q25),
            fmt_value(h.q75)
        )
        .unwrap();
    }
    s
}

pub fn gene_count_csv(rows: &[GeneCountRow]) -> String {
    let mut s = String::from("length,trials,mean,rounded\n");
    for r in rows {
        writeln!(s, "{},{},{},{}", r.length, r.trials, r.mean, r.rounded).unwrap();
    }
    s
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Stable colour for series `i`.
pub fn series_color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

/// Rounds the upper bound of the y axis to a tidy step.
fn axis_max(max: f64) -> f64 {
    if !(max.is_finite() && max > 0.0) {
        return 1.0;
    }
    let magnitude = 10f64.powf(max.log10().floor());
    let step = magnitude / 2.0;
    ((max / step).ceil() * step).max(step)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Fixed-size line chart; x is the sample index.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let points = series.iter().map(|s| s.values.len()).max().unwrap_or(0);
    let x_max = points.saturating_sub(1).max(1) as f64;
    let y_min = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::min);
    let y_top = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let y_max = axis_max(y_top);
    let y_min = if y_min < 0.0 { -axis_max(-y_min) } else { 0.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + x / x_max * plot_w;
    let sy = |y: f64| TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    )
    .unwrap();

    // grid lines and tick labels, five divisions per axis
    for i in 0..=5 {
        let f = f64::from(i) / 5.0;
        let y = y_min + f * (y_max - y_min);
        let py = sy(y);
        writeln!(
            svg,
            r##"<line x1="{LEFT:.1}" y1="{py:.2}" x2="{:.1}" y2="{py:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py + 4.0,
            tick(y)
        )
        .unwrap();
        let x = f * x_max;
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(x),
            TOP + plot_h + 18.0,
            tick(x)
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<rect x="{LEFT:.1}" y="{TOP:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_label)
    )
    .unwrap();

    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(x, &y)| format!("{:.2},{:.2}", sx(x as f64), sy(y)))
            .collect();
        writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            series_color(i),
            pts.join(" ")
        )
        .unwrap();
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="3"/>"#,
            lx + 20.0,
            series_color(i)
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// All protein concentrations of a run, one line per gene.
pub fn dynamics_svg(trace: &Trace) -> String {
    let series: Vec<Series> = (0..trace.gene_count())
        .map(|g| Series {
            label: format!("gene {g}"),
            values: trace.series(g),
        })
        .collect();
    line_chart("Protein concentrations", "cycle", "concentration", &series)
}

/// Protein 1 across several runs, labelled by run.
pub fn overlay_svg(title: &str, runs: &[(String, &Trace)]) -> String {
    let series: Vec<Series> = runs
        .iter()
        .map(|(label, t)| Series {
            label: label.clone(),
            values: t.series(0),
        })
        .collect();
    line_chart(title, "cycle", "protein 1 concentration", &series)
}

pub fn evolution_svg(title: &str, history: &[GenerationStats]) -> String {
    let pick = |f: fn(&GenerationStats) -> f64| history.iter().map(f).collect::<Vec<_>>();
    let series = [
        Series {
            label: "best".into(),
            values: pick(|h| h.best),
        },
        Series {
            label: "median".into(),
            values: pick(|h| h.median),
        },
        Series {
            label: "q25".into(),
            values: pick(|h| h.q25),
        },
        Series {
            label: "q75".into(),
            values: pick(|h| h.q75),
        },
    ];
    line_chart(title, "generation", "fitness", &series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::engine::SimulationConfig;
    use crate::genome::DnaSequence;

    fn small_trace() -> Trace {
        let g: DnaSequence = "CCAGCTTAACCGTAGGTCGACCAGCTGGGGAATTCCTCGAAA"
            .parse()
            .unwrap();
        let cfg = SimulationConfig {
            cycles: 3,
            ..SimulationConfig::default()
        };
        run(&g, &cfg).unwrap()
    }

    #[test]
    fn csv_layout() {
        let t = small_trace();
        let csv = trace_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "cycle,c_0,c_1,r_0,r_1");
        assert_eq!(lines.len(), 5);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[0], "0");
        assert_eq!(first[1], "5.0000000000000000e-1");
        for line in &lines[1..] {
            for field in line.split(',').skip(1) {
                let mantissa = field.split('e').next().unwrap().replace(['.', '-'], "");
                assert!(mantissa.len() >= 12);
                field.parse::<f64>().unwrap();
            }
        }
    }

    #[test]
    fn values_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 0.0, -2.5e10, std::f64::consts::PI] {
            assert_eq!(fmt_value(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn svg_has_one_polyline_per_protein() {
        let t = small_trace();
        let svg = dynamics_svg(&t);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">gene 0<") && svg.contains(">gene 1<"));
        assert!(svg.contains(series_color(1)));
        assert_eq!(svg, dynamics_svg(&t));
    }

    #[test]
    fn axis_rounding() {
        assert_eq!(axis_max(0.0), 1.0);
        assert_eq!(axis_max(1.0), 1.0);
        assert!((axis_max(0.37) - 0.4).abs() < 1e-12);
        assert!((axis_max(0.086) - 0.09).abs() < 1e-12);
        assert_eq!(tick(0.5), "0.5");
        assert_eq!(tick(100.0), "100");
    }

    #[test]
    fn evolution_csv_header() {
        let h = [GenerationStats {
            generation: 0,
            best: 0.5,
            median: 1.0,
            q25: 0.75,
            q75: 1.0,
        }];
        let csv = evolution_csv(&h);
        assert!(csv.starts_with("generation,best,median,q25,q75\n0,5.0000000000000000e-1,"));
    }
}
