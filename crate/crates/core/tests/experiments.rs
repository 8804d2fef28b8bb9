mod common;

use common::{wine, Stream};
use pcc_core::encoding::EncodingSpec;
use pcc_core::experiments::{
    benchmark_mnist_full, default_alphas, default_n_es, evaluate, evaluate_split, grid_search,
    grid_search_split, parse_heatmap, prepare, render_heatmap, render_projections, run_multi,
    select_hyperparameters, BenchmarkConfig, InputSetKind, Protocol,
};
use pcc_core::{DenseMatrix, LabeledDataset, PccError, PccModel};

/// Three well-separated blobs in 6 dimensions.
fn blobs(per_class: usize, seed: u64) -> LabeledDataset {
    let mut s = Stream::new(seed);
    let mut cols = Vec::new();
    let mut labels = Vec::new();
    for c in 0..3 {
        for _ in 0..per_class {
            let col: Vec<f64> = (0..6)
                .map(|i| if i % 3 == c { 2.0 } else { 0.5 } + 0.3 * s.uniform())
                .collect();
            cols.push(col);
            labels.push(c);
        }
    }
    LabeledDataset::new("blobs", DenseMatrix::from_columns(&cols).unwrap(), labels, 3).unwrap()
}

#[test]
fn grid_cells_equal_fresh_fits() {
    let data = wine().unwrap_or_else(|| blobs(50, 1));
    let protocol = Protocol::new(40.min(data.class_counts().into_iter().min().unwrap() - 5));
    let split = prepare(&data, &protocol, 11).unwrap();
    let d_z = data.dim() + data.n_classes();
    let grid = grid_search_split(&split, &default_alphas(), &default_n_es(d_z)).unwrap();
    let mut s = Stream::new(12);
    for _ in 0..20 {
        let a = (s.uniform().abs() * grid.alphas.len() as f64) as usize % grid.alphas.len();
        let n = (s.uniform().abs() * d_z as f64) as usize % d_z;
        let spec = EncodingSpec::for_dataset(&split.train, grid.alphas[a]).unwrap();
        let model = PccModel::fit(spec, &split.train, grid.n_es[n]).unwrap();
        let fresh = evaluate_split(&model, &split).unwrap();
        for kind in InputSetKind::ALL {
            assert_eq!(grid.get(kind, a, n), fresh.get(kind), "alpha {} n_e {}", grid.alphas[a], grid.n_es[n]);
        }
    }
}

#[test]
fn one_cell_grid_is_the_evaluate_triple() {
    let data = blobs(20, 2);
    let protocol = Protocol::new(10);
    let grid = grid_search(&data, &protocol, &[0.3], &[4], 5).unwrap();
    let split = prepare(&data, &protocol, 5).unwrap();
    let spec = EncodingSpec::for_dataset(&data, 0.3).unwrap();
    let model = PccModel::fit(spec, &split.train, 4).unwrap();
    for kind in InputSetKind::ALL {
        let want = evaluate(&model, split.set(kind), kind).unwrap();
        assert_eq!(grid.get(kind, 0, 0), want);
    }
    assert_eq!((grid.metadata.n_train, grid.metadata.n_test, grid.metadata.seed), (30, 30, 5));
}

#[test]
fn full_rank_recovers_training_labels() {
    let data = blobs(15, 3);
    let split = prepare(&data, &Protocol::new(10), 0).unwrap();
    for alpha in [0.2, 0.5, 0.9] {
        let spec = EncodingSpec::for_dataset(&data, alpha).unwrap();
        let model = PccModel::fit(spec, &split.train, spec.d_z()).unwrap();
        let acc = evaluate_split(&model, &split).unwrap();
        assert_eq!(acc.get(InputSetKind::WithLabels), 1.0);
        // Empty class block: every score is an exact tie, lowest label wins.
        assert_eq!(acc.get(InputSetKind::TrainNoLabels), 1.0 / 3.0);
    }
}

#[test]
fn grid_rejects_bad_axes() {
    let data = blobs(10, 4);
    let p = Protocol::new(5);
    for (alphas, n_es) in [
        (vec![], vec![1]),
        (vec![0.5, 0.2], vec![1]),
        (vec![0.5], vec![0]),
        (vec![0.5], vec![10]),
        (vec![0.5], vec![2, 2]),
    ] {
        assert!(matches!(grid_search(&data, &p, &alphas, &n_es, 0), Err(PccError::InvalidParameter(_))));
    }
    assert_eq!(default_alphas().len(), 51);
    assert_eq!(default_alphas()[1], 0.02);
    assert_eq!(default_n_es(16), (1..=16).collect::<Vec<_>>());
}

#[test]
fn heatmap_round_trip_and_selection() {
    let data = blobs(12, 5);
    let grid = grid_search(&data, &Protocol::new(6), &[0.0, 0.4, 0.8], &[1, 2, 9], 3).unwrap();
    let text = render_heatmap(&grid);
    assert!(text.starts_with("# pcc heatmap v1\n"));
    for kind in InputSetKind::ALL {
        assert!(text.contains(&format!("[{}]\nalpha,1,2,9\n", kind.tag())));
    }
    let back = parse_heatmap(&text, "mem").unwrap();
    assert_eq!(back.alphas, grid.alphas);
    assert_eq!(back.n_es, grid.n_es);
    assert_eq!(back.metadata, grid.metadata);
    for kind in InputSetKind::ALL {
        for (x, y) in back.surface(kind).iter().zip(grid.surface(kind)) {
            assert!((x - y).abs() <= 5e-7);
        }
    }
    assert_eq!(render_heatmap(&back), text);

    let (alpha, n_e) = select_hyperparameters(&grid, InputSetKind::TestNoLabels);
    let a = grid.alphas.iter().position(|&x| x == alpha).unwrap();
    let n = grid.n_es.iter().position(|&x| x == n_e).unwrap();
    assert!(grid.get(InputSetKind::TestNoLabels, a, n) >= grid.max(InputSetKind::TestNoLabels) - 1e-9);
}

#[test]
fn multirun_statistics() {
    let data = blobs(20, 6);
    let p = Protocol::new(8);
    let one = run_multi(&data, &p, 0.3, 4, 1, 9).unwrap();
    assert_eq!(one.stds.0, [0.0; 3]);
    assert_eq!(one.seeds, vec![9]);
    let five = run_multi(&data, &p, 0.3, 4, 5, 9).unwrap();
    assert_eq!(five.seeds, vec![9, 10, 11, 12, 13]);
    assert_eq!(five.runs[0], one.runs[0]);
    let mean: f64 = five.runs.iter().map(|r| r.0[2]).sum::<f64>() / 5.0;
    assert!((five.means.0[2] - mean).abs() < 1e-15);
    let var: f64 = five.runs.iter().map(|r| (r.0[2] - mean).powi(2)).sum::<f64>() / 4.0;
    assert!((five.stds.0[2] - var.sqrt()).abs() < 1e-15);
    assert!(five.render().contains("test_no_labels\t"));
    assert!(matches!(run_multi(&data, &p, 0.3, 4, 0, 9), Err(PccError::InvalidParameter(_))));
}

#[test]
fn projections_on_leading_components() {
    let data = blobs(5, 7);
    let spec = EncodingSpec::for_dataset(&data, 0.5).unwrap();
    let model = PccModel::fit(spec, &data, 3).unwrap();
    let text = render_projections(&model, &data, &[(1, 1), (2, 3)]).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "component_a,component_b,coord_a,coord_b,label");
    assert_eq!(lines.len(), 1 + 2 * data.len());
    for line in &lines[1..=data.len()] {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[2], f[3]);
    }
    assert!(lines[1].ends_with(",1"));
    assert!(matches!(
        render_projections(&model, &data, &[(1, 4)]),
        Err(PccError::InvalidParameter(_))
    ));
}

#[test]
fn benchmark_report_layout() {
    let data = blobs(10, 8);
    let report = benchmark_mnist_full(&data, &data, &[BenchmarkConfig { alpha: 0.9, n_e: 2 }]).unwrap();
    assert_eq!(report.rows[0].parameters, 2 * 9);
    let text = report.render();
    assert!(text.lines().any(|l| l == "config\taccuracy\tparameters\tfit_seconds\teval_seconds"));
    assert!(text.contains("M2_0.9\t"));
}

#[test]
fn empty_evaluation_set_is_rejected() {
    let data = blobs(4, 9);
    let spec = EncodingSpec::for_dataset(&data, 0.5).unwrap();
    let model = PccModel::fit(spec, &data, 2).unwrap();
    let empty = data.subset(&[]);
    assert!(matches!(evaluate(&model, &empty, InputSetKind::TestNoLabels), Err(PccError::Precondition(_))));
}
