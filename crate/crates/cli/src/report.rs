//! Text output for the subcommands.

use std::fmt::Write;
use std::io::IsTerminal;

use mann_core::mann::TrainingSummary;
use mann_core::{Decision, EvaluationReport, Manifest, MannModel, ModelFile, Orientation};

#[derive(Debug, Clone, Copy)]
pub struct Style {
    pub tsv: bool,
    pub color: bool,
}

impl Style {
    /// Colour only for human-readable output on a terminal, and never when
    /// `MANN_NO_COLOR` is set.
    pub fn detect(tsv: bool) -> Self {
        let color =
            !tsv && std::env::var_os("MANN_NO_COLOR").is_none() && std::io::stdout().is_terminal();
        Style { tsv, color }
    }

    fn bold(&self, s: &str) -> String {
        if self.color {
            format!("\x1b[1m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

fn pct(x: f64) -> String {
    format!("{:.1}", 100.0 * x)
}

pub fn loss_summary(model: &MannModel, summary: &TrainingSummary) -> String {
    let mut out = String::new();
    let last = |h: &Vec<f64>| h.last().copied().unwrap_or(f64::NAN);
    let first = |h: &Vec<f64>| h.first().copied().unwrap_or(f64::NAN);
    writeln!(out, "phase 1, local training:").unwrap();
    for (i, (h, basis)) in summary.snn_loss.iter().zip(&model.bases).enumerate() {
        writeln!(
            out,
            "  SNN_{} {:<9} loss {:.5} -> {:.5}",
            i + 1,
            basis.orientation.name(),
            first(h),
            last(h)
        )
        .unwrap();
    }
    writeln!(out, "phase 2, global training:").unwrap();
    for (k, (h, label)) in summary.cnn_loss.iter().zip(&model.labels).enumerate() {
        writeln!(
            out,
            "  CNN_{} {:<9} loss {:.5} -> {:.5}",
            k + 1,
            label,
            first(h),
            last(h)
        )
        .unwrap();
    }
    out
}

/// One row per method: accuracy and macro precision, as percentages.
pub fn accuracy_table(rep: &EvaluationReport, style: Style) -> String {
    let mut out = String::new();
    if style.tsv {
        writeln!(out, "method\taccuracy\tprecision").unwrap();
        for m in &rep.methods {
            writeln!(
                out,
                "{}\t{}\t{}",
                m.name,
                pct(m.accuracy),
                pct(m.macro_precision)
            )
            .unwrap();
        }
        return out;
    }
    writeln!(
        out,
        "{}",
        style.bold(&format!(
            "{:<10} {:>9} {:>10}",
            "method", "accuracy", "precision"
        ))
    )
    .unwrap();
    for m in &rep.methods {
        let line = format!(
            "{:<10} {:>9} {:>10}",
            m.name,
            pct(m.accuracy),
            pct(m.macro_precision)
        );
        if m.name == "MANN" {
            writeln!(out, "{}", style.bold(&line)).unwrap();
        } else {
            writeln!(out, "{line}").unwrap();
        }
    }
    out
}

/// Confusion counts per method; rows are true labels, the last column
/// counts rejects.
pub fn confusion_tables(rep: &EvaluationReport, style: Style) -> String {
    let mut out = String::new();
    let sep = if style.tsv { "\t" } else { " " };
    let width = rep.labels.iter().map(String::len).max().unwrap_or(0).max(6);
    let cell = |s: &str| {
        if style.tsv {
            s.to_string()
        } else {
            format!("{s:>width$}")
        }
    };
    for m in &rep.methods {
        writeln!(out).unwrap();
        if style.tsv {
            writeln!(out, "confusion\t{}", m.name).unwrap();
        } else {
            writeln!(out, "{}", style.bold(&format!("confusion: {}", m.name))).unwrap();
        }
        let mut header = vec![cell("true")];
        header.extend(rep.labels.iter().map(|l| cell(l)));
        header.push(cell("reject"));
        writeln!(out, "{}", header.join(sep)).unwrap();
        for (label, row) in rep.labels.iter().zip(&m.confusion) {
            let mut cells = vec![cell(label)];
            cells.extend(row.iter().map(|c| cell(&c.to_string())));
            writeln!(out, "{}", cells.join(sep)).unwrap();
        }
    }
    out
}

/// Per-image predictions of every method, tab separated, for recounting.
pub fn predictions_tsv(rep: &EvaluationReport, manifest: &Manifest) -> String {
    let mut out = String::new();
    let names: Vec<&str> = rep.methods.iter().map(|m| m.name.as_str()).collect();
    writeln!(out, "path\ttruth\t{}", names.join("\t")).unwrap();
    for (i, record) in manifest.records.iter().enumerate() {
        let preds: Vec<&str> = rep
            .methods
            .iter()
            .map(|m| match m.predictions[i] {
                Decision::Class(k) => rep.labels[k].as_str(),
                Decision::Reject => "REJECT",
            })
            .collect();
        writeln!(
            out,
            "{}\t{}\t{}",
            record.path,
            rep.labels[rep.truth[i]],
            preds.join("\t")
        )
        .unwrap();
    }
    out
}

pub fn describe(file: &ModelFile) -> String {
    let mut out = String::new();
    let cfg = &file.config;
    writeln!(out, "format        {}", file.format_version).unwrap();
    writeln!(out, "m             {}", cfg.m).unwrap();
    writeln!(out, "L             {}", cfg.l).unwrap();
    writeln!(out, "labels        {}", file.labels.join(", ")).unwrap();
    let d: Vec<String> = file
        .bases
        .iter()
        .map(|b| format!("{}={}", b.orientation.name(), b.d()))
        .collect();
    writeln!(out, "d             {}", d.join(" ")).unwrap();
    writeln!(
        out,
        "hidden        snn {}, cnn {}",
        cfg.snn_hidden, cfg.cnn_hidden
    )
    .unwrap();
    writeln!(out, "threshold     {}", cfg.threshold).unwrap();
    writeln!(out, "master seed   {}", file.master_seed).unwrap();
    writeln!(
        out,
        "training      learning rate {}, {} epochs",
        cfg.train.learning_rate, cfg.train.epochs
    )
    .unwrap();
    match file.split {
        Some(s) => writeln!(
            out,
            "split         test fraction {}, seed {}",
            s.test_fraction, s.seed
        ),
        None => writeln!(out, "split         none (trained on the whole manifest)"),
    }
    .unwrap();

    writeln!(out, "\nbases").unwrap();
    for b in &file.bases {
        let (r, c) = b.image_shape();
        let grid = match (b.orientation, b.block_grid) {
            (Orientation::Block, Some(g)) => format!(" grid {g}"),
            _ => String::new(),
        };
        writeln!(
            out,
            "  {:<9} image {r}x{c}{grid}, axes {}x{}, features {}",
            b.orientation.name(),
            b.axes.rows(),
            b.axes.cols(),
            b.feature_len()
        )
        .unwrap();
        let ev: Vec<String> = b.eigenvalues.iter().map(|v| format!("{v:.6e}")).collect();
        writeln!(out, "            eigenvalues {}", ev.join(" ")).unwrap();
    }

    writeln!(out, "\nnetworks").unwrap();
    for (i, (n, b)) in file.snns.iter().zip(&file.bases).enumerate() {
        writeln!(
            out,
            "  SNN_{} {:<9} {}-{}-{}  w1 {}x{}  w2 {}x{}",
            i + 1,
            b.orientation.name(),
            n.n_in,
            n.n_hidden,
            n.n_out,
            n.w1.rows(),
            n.w1.cols(),
            n.w2.rows(),
            n.w2.cols()
        )
        .unwrap();
    }
    for (k, (n, label)) in file.cnns.iter().zip(&file.labels).enumerate() {
        writeln!(
            out,
            "  CNN_{} {:<9} {}-{}-{}  w1 {}x{}  w2 {}x{}",
            k + 1,
            label,
            n.n_in,
            n.n_hidden,
            n.n_out,
            n.w1.rows(),
            n.w1.cols(),
            n.w2.rows(),
            n.w2.cols()
        )
        .unwrap();
    }
    out
}
