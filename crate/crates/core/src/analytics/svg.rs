//! Minimal grouped bar charts for eyeballing reports.

use std::fmt::Write;

pub struct Series {
    pub name: String,
    /// One value per category; `None` leaves a gap.
    pub values: Vec<Option<f64>>,
}

const PALETTE: [&str; 6] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn bar_chart(title: &str, categories: &[String], series: &[Series]) -> String {
    let (left, top, plot_h, bar_w, gap) = (60.0, 40.0, 240.0, 12.0, 10.0);
    let group_w = bar_w * series.len().max(1) as f64 + gap;
    let width = left + group_w * categories.len() as f64 + 20.0;
    let height = top + plot_h + 80.0;
    let max = series.iter().flat_map(|s| s.values.iter().flatten()).copied().fold(0.0f64, f64::max);
    let scale = if max > 0.0 { plot_h / max } else { 0.0 };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(out, r#"<text x="{left}" y="20" font-size="14">{}</text>"#, escape(title));
    let base = top + plot_h;
    let _ = writeln!(out, r#"<line x1="{left}" y1="{base}" x2="{:.1}" y2="{base}" stroke="black"/>"#, width - 10.0);
    let _ = writeln!(out, r#"<text x="5" y="{:.1}">{max:.3}</text>"#, top + 4.0);
    for (c, cat) in categories.iter().enumerate() {
        let x0 = left + c as f64 * group_w;
        for (s, ser) in series.iter().enumerate() {
            if let Some(Some(v)) = ser.values.get(c) {
                let h = v * scale;
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.1}" y="{:.1}" width="{bar_w}" height="{h:.1}" fill="{}"><title>{} {}: {v}</title></rect>"#,
                    x0 + s as f64 * bar_w,
                    base - h,
                    PALETTE[s % PALETTE.len()],
                    escape(cat),
                    escape(&ser.name)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" transform="rotate(60 {:.1} {:.1})">{}</text>"#,
            x0 + 2.0,
            base + 12.0,
            x0 + 2.0,
            base + 12.0,
            escape(cat)
        );
    }
    for (s, ser) in series.iter().enumerate() {
        let y = height - 12.0;
        let x = left + s as f64 * 110.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{:.1}" width="10" height="10" fill="{}"/>"#,
            y - 9.0,
            PALETTE[s % PALETTE.len()]
        );
        let _ = writeln!(out, r#"<text x="{:.1}" y="{y:.1}">{}</text>"#, x + 14.0, escape(&ser.name));
    }
    out.push_str("</svg>\n");
    out
}
