//! Static line charts.

use std::fmt::Write;

use crate::reports::PlotInput;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    points: Vec<(f64, f64)>,
}

fn chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (x_min, x_max) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (x_min, x_max) = if x_max > x_min { (x_min, x_max) } else { (x_min - 1.0, x_min + 1.0) };
    let (y_min, y_max) = (0.0, 1.0);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| TOP + (1.0 - (y.clamp(y_min, y_max) - y_min) / (y_max - y_min)) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="18" font-size="14" text-anchor="middle">{title}</text>"#,
        LEFT + plot_w / 2.0
    );
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.1}"/></g>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h,
        TOP + plot_h
    );
    for i in 0..=5 {
        let y = i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{y:.1}</text>"#,
            LEFT - 6.0,
            sy(y) + 3.0
        );
    }
    for i in 0..=4 {
        let x = x_min + (x_max - x_min) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{x:.0}</text>"#,
            sx(x),
            TOP + plot_h + 14.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{x_label}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.1})">{y_label}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    for ser in series {
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            ser.color,
            pts.join(" ")
        );
    }
    let _ = writeln!(s, r#"<g class="legend" font-size="12">"#);
    for (i, ser) in series.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let x = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            x + 20.0,
            ser.color,
            x + 26.0,
            y + 4.0,
            ser.label
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// Predicted against true final accuracy per test record, or the reward trace.
pub fn render(input: &PlotInput) -> String {
    match input {
        PlotInput::Evaluation(rows) => {
            let truth = rows.iter().enumerate().map(|(i, r)| (i as f64 + 1.0, r.1)).collect();
            let pred = rows.iter().enumerate().map(|(i, r)| (i as f64 + 1.0, r.2)).collect();
            chart(
                "Predicted vs. true final accuracy",
                "test record",
                "final accuracy",
                &[
                    Series {
                        label: "ground truth",
                        color: "#1f77b4",
                        points: truth,
                    },
                    Series {
                        label: "predicted",
                        color: "#d62728",
                        points: pred,
                    },
                ],
            )
        }
        PlotInput::History(rows) => chart(
            "Exploration reward",
            "iteration",
            "reward",
            &[Series {
                label: "reward",
                color: "#2ca02c",
                points: rows.iter().map(|&(t, r)| (t as f64, r)).collect(),
            }],
        ),
    }
}
