use pcc_core::encoding::{encode_dataset, encode_instance, ClassIndicator, EncodingSpec};
use pcc_core::{DenseMatrix, LabeledDataset, PccError};
use proptest::prelude::*;

#[test]
fn reference_instances() {
    let s = |a| EncodingSpec::new(2, 2, a).unwrap();
    let y2 = ClassIndicator::from_label(2, 2).ok();
    assert_eq!(encode_instance(&s(0.0), &[0.3, 0.7], y2).unwrap(), vec![0.3, 0.7, 0.0, 0.0]);
    assert_eq!(encode_instance(&s(1.0), &[0.3, 0.7], y2).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
    assert_eq!(encode_instance(&s(0.5), &[1.0, 0.0], y2).unwrap(), vec![0.5, 0.0, 0.0, 0.5]);
    // alpha = 1 without a class: the all-zero vector is accepted.
    assert_eq!(encode_instance(&s(1.0), &[0.3, 0.7], None).unwrap(), vec![0.0; 4]);
}

#[test]
fn errors() {
    let s = EncodingSpec::new(3, 2, 0.5).unwrap();
    assert!(matches!(encode_instance(&s, &[1.0, 2.0], None), Err(PccError::Shape(_))));
    assert!(matches!(encode_instance(&s, &[1.0, f64::INFINITY, 0.0], None), Err(PccError::Domain(_))));
    assert!(matches!(ClassIndicator::from_label(3, 2), Err(PccError::Domain(_))));
    let d = LabeledDataset::new("d", DenseMatrix::zeros(2, 2), vec![0, 1], 2).unwrap();
    assert!(matches!(encode_dataset(&s, &d, true), Err(PccError::Shape(_))));
    for bad in [-0.1, 1.1, f64::NAN] {
        assert!(matches!(EncodingSpec::new(3, 2, bad), Err(PccError::InvalidParameter(_))));
    }
}

#[test]
fn indicator_round_trip() {
    let y = ClassIndicator::from_label(3, 4).unwrap();
    assert_eq!(y.index(), 2);
    assert_eq!(y.label(), 3);
    assert_eq!(y.to_vector(), vec![0.0, 0.0, 1.0, 0.0]);
    assert_eq!(ClassIndicator::from_index(2, 4).unwrap(), y);
}

fn dataset(d_x: usize, n_c: usize, values: &[f64], labels: &[usize]) -> LabeledDataset {
    let n = labels.len();
    let x = DenseMatrix::from_col_major(d_x, n, values[..d_x * n].to_vec()).unwrap();
    let labels = labels.iter().map(|l| l % n_c).collect();
    LabeledDataset::new("p", x, labels, n_c).unwrap()
}

proptest! {
    #[test]
    fn blocks_scale_and_norm_identity(
        x in prop::collection::vec(-10.0f64..10.0, 1..12),
        n_c in 2usize..6,
        label in 0usize..6,
        alpha in 0.0f64..=1.0,
    ) {
        let spec = EncodingSpec::new(x.len(), n_c, alpha).unwrap();
        let y = ClassIndicator::from_index(label % n_c, n_c).unwrap();
        let z = encode_instance(&spec, &x, Some(y)).unwrap();
        prop_assert_eq!(z.len(), spec.d_z());
        for (zi, xi) in z.iter().zip(&x) {
            prop_assert_eq!(*zi, (1.0 - alpha) * xi);
        }
        let class = &z[x.len()..];
        for (j, &c) in class.iter().enumerate() {
            prop_assert_eq!(c, if j == label % n_c { alpha } else { 0.0 });
        }
        let norm2: f64 = z.iter().map(|v| v * v).sum();
        let x2: f64 = x.iter().map(|v| v * v).sum();
        let want = (1.0 - alpha).powi(2) * x2 + alpha * alpha;
        prop_assert!((norm2 - want).abs() <= 1e-12 * want.max(1.0));

        let z0 = encode_instance(&spec, &x, None).unwrap();
        prop_assert!(z0[x.len()..].iter().all(|&v| v == 0.0));
        prop_assert_eq!(&z0[..x.len()], &z[..x.len()]);
    }

    #[test]
    fn dataset_columns_match_instances(
        values in prop::collection::vec(-3.0f64..3.0, 40),
        labels in prop::collection::vec(0usize..3, 1..8),
        alpha in 0.0f64..=1.0,
    ) {
        let d = dataset(4, 3, &values, &labels);
        let spec = EncodingSpec::for_dataset(&d, alpha).unwrap();
        let with = encode_dataset(&spec, &d, true).unwrap();
        let without = encode_dataset(&spec, &d, false).unwrap();
        prop_assert_eq!(with.shape(), (7, d.len()));
        for i in 0..d.len() {
            let y = ClassIndicator::from_index(d.labels()[i], 3).unwrap();
            let z = encode_instance(&spec, d.instance(i), Some(y)).unwrap();
            prop_assert_eq!(with.column(i), z.as_slice());
            prop_assert_eq!(&without.column(i)[..4], &with.column(i)[..4]);
            prop_assert!(without.column(i)[4..].iter().all(|&v| v == 0.0));
        }
    }
}
