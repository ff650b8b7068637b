//! Sweep a reduced figure grid, save the CSV and a matplotlib script.

use azqsl::cli::{emit_plot_script, run_figure, FigurePreset, PlotKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let overrides: Vec<(String, String)> = [("alpha_count", "10"), ("t_count", "10")]
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let data = run_figure(FigurePreset::Fig3, &overrides)?;
    println!("{} rows, columns: {}", data.rows.len(), data.header.join(","));

    let dir = std::env::temp_dir().join("azqsl_figure_sweep");
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("fig3.csv");
    data.save(&csv)?;
    let script = emit_plot_script(&data, PlotKind::Heatmap, "delta_qsl", "fig3.csv")?;
    std::fs::write(dir.join("fig3_delta_qsl.py"), script)?;
    println!("wrote {}", dir.display());
    Ok(())
}
