use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;

use fresnel_tomo::analytic::{gcf_width, GcfParams};
use fresnel_tomo::format::DataFile;
use fresnel_tomo::reconstruct::relative_error_up_to_phase;
use fresnel_tomo::tomography::symplectic_tomogram;
use fresnel_tomo::SampledWavefunction;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_fresnel-tomo")).args(args).env("NO_COLOR", "1").output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn ok(args: &[&str]) -> Run {
    let r = run(args);
    assert_eq!(r.code, 0, "{args:?}\nstdout: {}\nstderr: {}", r.stdout, r.stderr);
    r
}

fn diag(r: &Run, key: &str) -> f64 {
    let prefix = format!("{key}=");
    r.stderr
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in {}", r.stderr))
        .parse()
        .unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[test]
fn gcf_peak_and_width() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["gcf", "--sigma", "1", "--alpha", "0", "--x-min", "-4", "--x-max", "4", "--x-count", "81", "-o", out]);
    let plane = DataFile::read(dir.path().join("fresnel_plane.dat")).unwrap().to_fresnel().unwrap();
    let j0 = plane.grid_nu().node_index(0.0).unwrap();
    let i0 = plane.grid_x().node_index(0.0).unwrap();
    assert!((plane.field().at(i0, j0) - (2.0 / PI).sqrt()).abs() < 1e-12);

    let wide = dir.path().join("a2");
    ok(&["gcf", "--sigma", "1", "--alpha", "2", "--width-map", "-o", wide.to_str().unwrap()]);
    let plane = DataFile::read(wide.join("fresnel_plane.dat")).unwrap().to_fresnel().unwrap();
    let j0 = plane.grid_nu().node_index(0.0).unwrap();
    let i0 = plane.grid_x().node_index(0.0).unwrap();
    let i1 = plane.grid_x().node_index(0.5).unwrap();
    let omega2 = 0.25 / (plane.field().at(i0, j0) / plane.field().at(i1, j0)).ln();
    let expected = gcf_width(GcfParams::new(1.0, 2.0).unwrap(), 1.0, 0.0);
    assert!((omega2.sqrt() - expected).abs() < 1e-12);
    let map = DataFile::read(wide.join("width_map.dat")).unwrap().to_width_map().unwrap();
    assert_eq!(map.grid_x().count(), 81);
}

#[test]
fn gcf_peaks_shrink_with_chirp() {
    let dir = TempDir::new().unwrap();
    let mut peaks = Vec::new();
    for alpha in ["0.5", "1", "2", "3"] {
        let out = dir.path().join(alpha);
        ok(&[
            "gcf",
            "--sigma",
            "1",
            "--alpha",
            alpha,
            "--nu-min",
            "0",
            "--nu-max",
            "1",
            "--nu-count",
            "3",
            "-o",
            out.to_str().unwrap(),
        ]);
        let plane = DataFile::read(out.join("fresnel_plane.dat")).unwrap().to_fresnel().unwrap();
        let j = plane.grid_nu().node_index(0.5).unwrap();
        peaks.push((0..plane.grid_x().count()).map(|i| plane.field().at(i, j)).fold(0.0, f64::max));
    }
    assert!(peaks.windows(2).all(|w| w[1] < w[0]), "{peaks:?}");
}

#[test]
fn invalid_sigma_is_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["gcf", "--sigma", "-1", "-o", dir.path().to_str().unwrap()]).code, 2);
    assert_eq!(run(&["gcf", "--alpha", "1"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn symplectic_plane_of_bundled_sample_matches_golden() {
    let dir = TempDir::new().unwrap();
    let golden = DataFile::read(fixtures().join("plane_sigma1_alpha0_nu1.dat")).unwrap().to_plane().unwrap();
    let out = p(dir.path(), "plane.dat");
    ok(&[
        "tomogram",
        "-i",
        fixtures().join("psi_sigma1_alpha0.dat").to_str().unwrap(),
        "--kind",
        "symplectic",
        "--nu",
        "1",
        "--x-min",
        "-4",
        "--x-max",
        "4",
        "--x-count",
        "81",
        "--mu-min",
        "-2",
        "--mu-max",
        "2",
        "--mu-count",
        "21",
        "-o",
        &out,
    ]);
    let plane = DataFile::read(&out).unwrap().to_plane().unwrap();
    assert_eq!(plane.nu(), 1.0);
    let worst =
        plane.field().values().iter().zip(golden.field().values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn fresnel_and_optical_reduce_to_density() {
    let dir = TempDir::new().unwrap();
    ok(&[
        "gcf",
        "--sigma",
        "0.8",
        "--alpha",
        "1.5",
        "--x-min",
        "-4",
        "--x-max",
        "4",
        "--x-count",
        "161",
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    let psi_path = p(dir.path(), "psi.dat");
    let psi = DataFile::read(&psi_path).unwrap().to_wavefunction().unwrap();

    let fres = p(dir.path(), "fres.dat");
    ok(&[
        "tomogram",
        "-i",
        &psi_path,
        "--kind",
        "fresnel",
        "--nu-min",
        "-1",
        "--nu-max",
        "1",
        "--nu-count",
        "5",
        "-o",
        &fres,
    ]);
    let wf = DataFile::read(&fres).unwrap().to_fresnel().unwrap();
    let j0 = wf.grid_nu().node_index(0.0).unwrap();
    for (i, v) in psi.values().iter().enumerate() {
        assert!((wf.field().at(i, j0) - v.norm_sqr()).abs() < 1e-14);
    }

    let opt = p(dir.path(), "opt.dat");
    ok(&["tomogram", "-i", &psi_path, "--kind", "optical", "--theta", "0", "-o", &opt]);
    let o = DataFile::read(&opt).unwrap().to_optical().unwrap();
    assert_eq!(o.grid_theta().count(), 2);
    for (i, v) in psi.values().iter().enumerate() {
        assert!((o.field().at(i, 0) - v.norm_sqr()).abs() < 1e-14);
        // theta + pi mirrors X
        let mirrored = psi.values()[psi.values().len() - 1 - i].norm_sqr();
        assert!((o.field().at(i, 1) - mirrored).abs() < 1e-12);
    }
}

#[test]
fn psi_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(&[
        "gcf",
        "--sigma",
        "1",
        "--alpha",
        "1",
        "--x-min",
        "-6",
        "--x-max",
        "6",
        "--x-count",
        "481",
        "-o",
        d.to_str().unwrap(),
    ]);
    let cfg = p(d, "cfg.json");
    std::fs::write(&cfg, r#"{"mu_window": 16, "x_window": 32, "mu_step": 0.5, "x_step": 0.5}"#).unwrap();
    let planes = p(d, "planes");
    let psi_path = p(d, "psi.dat");
    // the flag overrides the config file
    ok(&[
        "tomogram",
        "-i",
        &psi_path,
        "--kind",
        "symplectic",
        "--inversion-grid",
        "--config",
        &cfg,
        "--x-step",
        "0.1",
        "--nu-min",
        "-3",
        "--nu-max",
        "3",
        "--nu-count",
        "25",
        "-o",
        &planes,
    ]);
    let first = DataFile::read(Path::new(&planes).join("plane_0000.dat")).unwrap();
    assert!(first.manifest.provenance.contains("\"x_step\":0.1"), "{}", first.manifest.provenance);
    assert_eq!(first.manifest.grids[0].step(), 0.1);

    let out = p(d, "rec.dat");
    let r = ok(&[
        "reconstruct",
        &planes,
        "--target",
        "psi",
        "--config",
        &cfg,
        "--x-step",
        "0.1",
        "--reference",
        &psi_path,
        "-o",
        &out,
    ]);
    assert!((diag(&r, "norm_before") - 1.0).abs() < 1e-2);
    assert!(diag(&r, "relative_error") <= 1e-3, "{}", r.stderr);

    let rec = DataFile::read(&out).unwrap().to_wavefunction().unwrap();
    let truth = DataFile::read(&psi_path).unwrap().to_wavefunction().unwrap();
    let truth = SampledWavefunction::from_fn(*rec.grid(), |x| truth.amplitude_at(x)).normalized();
    assert!(relative_error_up_to_phase(&rec, &truth).unwrap() <= 1e-3);
    assert!(rec.values()[rec.grid().node_index(0.0).unwrap()].im.abs() < 1e-15);
}

#[test]
fn missing_anchor_and_empty_inputs() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(&["gcf", "--sigma", "1", "--x-min", "-4", "--x-max", "4", "--x-count", "41", "-o", d.to_str().unwrap()]);
    let planes = p(d, "planes");
    ok(&[
        "tomogram",
        "-i",
        &p(d, "psi.dat"),
        "--kind",
        "symplectic",
        "--x-count",
        "41",
        "--mu-count",
        "8",
        "--nu-min",
        "0.2",
        "--nu-max",
        "0.8",
        "--nu-count",
        "4",
        "-o",
        &planes,
    ]);
    let r = run(&["reconstruct", &planes, "--target", "psi", "-o", &p(d, "x.dat")]);
    assert_eq!(r.code, 5, "{}", r.stderr);
    assert!(r.stderr.contains("nu = 0"), "{}", r.stderr);

    let empty = d.join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(run(&["reconstruct", "--target", "psi", "-o", &p(d, "x.dat")]).code, 2);
    assert_eq!(run(&["reconstruct", empty.to_str().unwrap(), "--target", "psi", "-o", &p(d, "x.dat")]).code, 2);
}

#[test]
fn degenerate_point_and_bad_files() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(&["gcf", "--sigma", "1", "--x-min", "-4", "--x-max", "4", "--x-count", "41", "-o", d.to_str().unwrap()]);
    // the mu grid contains 0, so (mu, nu) = (0, 0) is requested
    let r = run(&["tomogram", "-i", &p(d, "psi.dat"), "--kind", "symplectic", "--nu", "0", "-o", &p(d, "t.dat")]);
    assert_eq!(r.code, 4, "{}", r.stderr);

    let bad = p(d, "bad.dat");
    std::fs::write(&bad, "not a manifest\n1 2 3\n").unwrap();
    let r = run(&["tomogram", "-i", &bad, "--kind", "fresnel", "-o", &p(d, "t.dat")]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("line 1"), "{}", r.stderr);
    assert_eq!(run(&["tomogram", "-i", &p(d, "nope.dat"), "--kind", "fresnel", "-o", &p(d, "t.dat")]).code, 3);

    // wrong kind for the target
    let r = run(&["reconstruct", &p(d, "psi.dat"), "--target", "rho", "-o", &p(d, "r.dat")]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    let cfg = p(d, "cfg.json");
    std::fs::write(&cfg, r#"{"mu_windo": 3}"#).unwrap();
    assert_eq!(
        run(&["reconstruct", &p(d, "fresnel_plane.dat"), "--target", "rho", "--config", &cfg, "-o", "r"]).code,
        3
    );
}

#[test]
fn wigner_and_rho_from_optical_file() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(&["gcf", "--sigma", "1.4142135623730951", "--alpha", "0", "-o", d.to_str().unwrap()]);
    let opt = p(d, "opt.dat");
    ok(&[
        "tomogram",
        "-i",
        &p(d, "psi.dat"),
        "--kind",
        "optical",
        "--x-min",
        "-12",
        "--x-max",
        "12",
        "--x-count",
        "481",
        "-o",
        &opt,
    ]);
    let out = p(d, "w.dat");
    let r = ok(&[
        "reconstruct",
        &opt,
        "--target",
        "wigner",
        "--mu-window",
        "12",
        "--q-min",
        "-1",
        "--q-max",
        "1",
        "--q-count",
        "3",
        "--p-min",
        "-1",
        "--p-max",
        "1",
        "--p-count",
        "3",
        "-o",
        &out,
    ]);
    assert!(diag(&r, "imaginary_residue") < 1e-10);
    let w = DataFile::read(&out).unwrap().to_wigner().unwrap();
    assert!((w.field().at(1, 1) - 1.0 / PI).abs() < 5e-3, "{}", w.field().at(1, 1));

    let rho_out = p(d, "rho.dat");
    ok(&[
        "reconstruct",
        &opt,
        "--target",
        "rho",
        "--mu-window",
        "12",
        "--x-min",
        "-1",
        "--x-max",
        "1",
        "--x-count",
        "5",
        "-o",
        &rho_out,
    ]);
    let rho = DataFile::read(&rho_out).unwrap().to_density_matrix().unwrap();
    let psi = DataFile::read(p(d, "psi.dat")).unwrap().to_wavefunction().unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let (x, y) = (rho.grid().point(i), rho.grid().point(j));
            let exact = psi.amplitude_at(x) * psi.amplitude_at(y).conj();
            assert!((rho.at(i, j) - exact).norm() < 5e-3, "{i} {j}");
        }
    }
}

#[test]
fn tomogram_nd_of_product() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["gcf", "--sigma", "1", "--alpha", "0.5", "-o", a.to_str().unwrap()]);
    ok(&["gcf", "--sigma", "0.7", "--alpha", "-1", "-o", b.to_str().unwrap()]);
    let (fa, fb) = (a.join("psi.dat"), b.join("psi.dat"));
    let r = ok(&[
        "tomogram-nd",
        "--factor",
        fa.to_str().unwrap(),
        "--factor",
        fb.to_str().unwrap(),
        "--x",
        "0.3,-0.2",
        "--mu",
        "1,-0.5",
        "--nu",
        "0.4,0.9",
    ]);
    let value: f64 = r.stdout.trim().strip_prefix("value=").unwrap().parse().unwrap();
    let pa = DataFile::read(&fa).unwrap().to_wavefunction().unwrap();
    let pb = DataFile::read(&fb).unwrap().to_wavefunction().unwrap();
    let expected =
        symplectic_tomogram(&pa, 0.3, 1.0, 0.4).unwrap() * symplectic_tomogram(&pb, -0.2, -0.5, 0.9).unwrap();
    assert!((value - expected).abs() < 1e-14);
    assert_eq!(
        run(&["tomogram-nd", "--factor", fa.to_str().unwrap(), "--x", "0.3,1", "--mu", "1", "--nu", "1"]).code,
        2
    );
}

#[test]
fn validate_fast_passes() {
    let r = ok(&["validate", "--fast"]);
    assert!(!r.stdout.contains("FAIL"));
    assert!(!r.stdout.contains('\x1b'));
    for key in [
        "closed_form_prefactor=sigma4",
        "width=sigma4",
        "ft_closed_form=as_printed",
        "optical_fresnel_relation=tan_form",
    ] {
        assert!(r.stdout.contains(&format!("RESOLVED {key}")), "{key}");
    }
}
