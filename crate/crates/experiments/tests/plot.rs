//! SVG rendering of datasets read back from CSV.

use qscs_experiments::{emit_plot, run, Dataset, ExperimentConfig, ExperimentError, ExperimentKind, PlotStyle};

fn crb_dataset() -> Dataset {
    let mut c = ExperimentConfig::new(ExperimentKind::CrbVsSnr);
    c.snr_db = Some(vec![-10.0, 0.0, 10.0, 20.0]);
    let out = run(&c).unwrap();
    // plots are always drawn from CSV files, so go through the text form
    let d = out.dataset("crb_vs_snr").unwrap();
    Dataset::from_csv(&d.name, &d.to_csv()).unwrap()
}

#[test]
fn plots_are_deterministic() {
    let data = crb_dataset();
    let style: PlotStyle = "crb:3".parse().unwrap();
    let a = emit_plot(&data, &style).unwrap();
    let b = emit_plot(&data, &style).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
    // one legend entry per quantizer
    for q in ["sign", "lloyd:2", "none"] {
        assert!(a.contains(q), "legend lacks {q}");
    }
}

#[test]
fn wrong_schema_is_an_error() {
    let data = crb_dataset();
    for style in ["lambda", "error_vs_m", "mmv", "dual_poly"] {
        let err = emit_plot(&data, &style.parse().unwrap()).unwrap_err();
        assert!(matches!(err, ExperimentError::Schema { .. }), "{style}: {err}");
    }
    let empty = Dataset::new("crb_vs_snr", &["snr_db", "param_index", "crb_value", "quantizer"]);
    assert!(matches!(emit_plot(&empty, &PlotStyle::Crb { param_index: 0 }), Err(ExperimentError::Schema { .. })));
}

#[test]
fn unknown_styles_are_rejected() {
    assert!("histogram".parse::<PlotStyle>().is_err());
    assert_eq!("crb".parse::<PlotStyle>().unwrap(), PlotStyle::Crb { param_index: 0 });
}
