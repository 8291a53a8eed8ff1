use oped::geometry::circle_directions;
use oped::oped::{oped2d, reconstructor, semi_discrete_expansion, Filter, ReconstructionConfig};
use oped::phantom::{poly_preset, shepp_logan_2d, ComponentSpec, ImageGrid, Phantom};
use oped::radon::{radon_numeric, sample_sinogram, RadonSource, ScanGeometry, ScanType, Sinogram};
use oped::sum::SummationMode;
use oped::svd::TruncatedSvd;
use oped::Error;
use proptest::prelude::*;

#[test]
fn container_round_trip_reconstructs_identically() {
    let dir = tempfile::tempdir().unwrap();
    let phantom = shepp_logan_2d();
    let geometry = ScanGeometry::new(2, ScanType::TypeI, 6).unwrap();
    let sinogram = sample_sinogram(&phantom, &geometry).unwrap();
    let path = dir.path().join("s.sino");
    sinogram.write(&path).unwrap();
    let back = Sinogram::read(&path).unwrap();
    assert_eq!(back, sinogram);
    let config = ReconstructionConfig::new(ScanType::TypeI, 6, 40);
    assert_eq!(oped2d(&back, &config).unwrap(), oped2d(&sinogram, &config).unwrap());

    let grid = oped2d(&back, &config).unwrap();
    let gpath = dir.path().join("g.grid");
    grid.write(&gpath).unwrap();
    let read = ImageGrid::read(&gpath).unwrap();
    assert!(read.max_abs_diff(&grid).unwrap() < 1e-6);
}

#[test]
fn svd_from_sinogram_equals_oped() {
    let phantom = shepp_logan_2d();
    for m in [4, 8] {
        let geometry = ScanGeometry::new(2, ScanType::TypeII, m).unwrap();
        let sinogram = sample_sinogram(&phantom, &geometry).unwrap();
        let svd = TruncatedSvd::from_sinogram(&sinogram, 2 * m).unwrap();
        assert_eq!(svd.warnings.len(), 1);
        let oped = reconstructor(&sinogram, &ReconstructionConfig::new(ScanType::TypeII, m, 64)).unwrap();
        for x in [[0.0, 0.0], [0.31, -0.42], [-0.7, 0.6]] {
            assert!((svd.eval(&x) - oped.eval(&x)).abs() < 1e-9);
        }
        assert!(matches!(
            TruncatedSvd::from_sinogram(&sinogram, 2 * m + 1),
            Err(Error::InsufficientDegree { .. })
        ));
    }
}

#[test]
fn discrete_matches_semi_discrete_on_polynomials() {
    let n = 8;
    let geometry = ScanGeometry::new(2, ScanType::TypeII, 4).unwrap();
    let poly = poly_preset(4, 2).unwrap();
    let exact = semi_discrete_expansion(&poly, &circle_directions(4), n, Filter::None, SummationMode::Pairwise).unwrap();
    let sinogram = sample_sinogram(&poly, &geometry).unwrap();
    let discrete = reconstructor(&sinogram, &ReconstructionConfig::new(ScanType::TypeII, 4, 32)).unwrap();
    for x in [[0.1, 0.2], [-0.6, 0.3]] {
        assert!((exact.eval(&x) - discrete.eval(&x)).abs() < 1e-10);
        assert!((exact.eval(&x) - poly.eval(&x)).abs() < 1e-10);
    }
}

#[test]
fn noise_is_seeded_and_gaussian() {
    let geometry = ScanGeometry::new(2, ScanType::TypeII, 32).unwrap();
    let zero = Sinogram::new(geometry.clone(), vec![0.0; geometry.view_count() * geometry.node_count()]).unwrap();
    let mut a = zero.clone();
    let mut b = zero.clone();
    a.add_noise(0.5, 9).unwrap();
    b.add_noise(0.5, 9).unwrap();
    assert_eq!(a, b);
    let n = a.values.len() as f64;
    let mean = a.values.iter().sum::<f64>() / n;
    let sd = (a.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    assert!(mean.abs() < 0.05 && (sd - 0.5).abs() < 0.05, "{mean} {sd}");
}

fn ellipse() -> impl Strategy<Value = ComponentSpec> {
    (-0.3..0.3f64, -0.3..0.3f64, 0.05..0.6f64, 0.05..0.6f64, 0.0..180.0f64, -2.0..2.0f64).prop_map(
        |(cx, cy, a, b, rot, density)| ComponentSpec {
            center: vec![cx, cy],
            axes: vec![a, b],
            rotation: vec![rot],
            density,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phantom_projections_match_the_oracle(spec in ellipse(), angle in 0.0..std::f64::consts::TAU, t in -0.99..0.99f64) {
        let p = Phantom::new(2, vec![spec]).unwrap();
        let xi = [angle.cos(), angle.sin()];
        let closed = RadonSource::radon(&p, &xi, t).unwrap();
        let numeric = radon_numeric(&|x: &[f64]| p.eval(x), &xi, t, 4).unwrap();
        prop_assert!((closed - numeric).abs() < 1e-6, "{} {}", closed, numeric);
        prop_assert_eq!(closed, RadonSource::radon(&p, &[-xi[0], -xi[1]], -t).unwrap());
    }

    #[test]
    fn reconstruction_is_linear(a in ellipse(), b in ellipse(), alpha in -2.0..2.0f64) {
        let geometry = ScanGeometry::new(2, ScanType::TypeI, 5).unwrap();
        let pa = sample_sinogram(&Phantom::new(2, vec![a]).unwrap(), &geometry).unwrap();
        let pb = sample_sinogram(&Phantom::new(2, vec![b]).unwrap(), &geometry).unwrap();
        let combined = pa.combine(alpha, &pb, 1.0).unwrap();
        let config = ReconstructionConfig::new(ScanType::TypeI, 5, 16);
        let ra = reconstructor(&pa, &config).unwrap();
        let rb = reconstructor(&pb, &config).unwrap();
        let rc = reconstructor(&combined, &config).unwrap();
        for x in [[0.0, 0.0], [0.5, -0.25], [-0.1, 0.9]] {
            prop_assert!((rc.eval(&x) - (alpha * ra.eval(&x) + rb.eval(&x))).abs() < 1e-10);
        }
    }
}
