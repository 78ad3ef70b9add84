use std::ffi::{CStr, CString};
use std::ptr;

use approxlat_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = apx_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn padic_enumeration_round_trip() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(apx_scheme_padic_new(2, c("1").as_ptr(), true, &mut s), ApxStatus::Ok);
        let mut set = ptr::null_mut();
        assert_eq!(apx_enumerate(s, 0, 0, c("3").as_ptr(), 1_000_000, &mut set), ApxStatus::Ok);
        assert_eq!(apx_pointset_len(set), 17);

        let (mut a, mut b) = (0i64, 0i64);
        for i in 0..17 {
            assert_eq!(apx_pointset_coords(set, i, &mut a, &mut b), ApxStatus::Ok);
            let mut inside = false;
            assert_eq!(apx_scheme_contains(s, a, b, &mut inside), ApxStatus::Ok);
            assert!(inside, "{a}/2^{b}");
        }
        assert_eq!(apx_pointset_coords(set, 17, &mut a, &mut b), ApxStatus::OutOfRange);

        let mut csv = ptr::null_mut();
        assert_eq!(apx_pointset_csv(set, &mut csv), ApxStatus::Ok);
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        apx_string_free(csv);
        assert_eq!(text.lines().count(), 18);

        apx_pointset_free(set);
        apx_scheme_free(s);
    }
}

#[test]
fn quadratic_membership() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(apx_scheme_quadratic_new(2, c("1").as_ptr(), true, &mut s), ApxStatus::Ok);
        let mut inside = false;
        // 1 + sqrt 2 has conjugate 1 - sqrt 2, inside [-1, 1]
        assert_eq!(apx_scheme_contains(s, 1, 1, &mut inside), ApxStatus::Ok);
        assert!(inside);
        assert_eq!(apx_scheme_contains(s, 3, 1, &mut inside), ApxStatus::Ok);
        assert!(!inside);

        let mut set = ptr::null_mut();
        assert_eq!(apx_enumerate(s, 0, 0, c("0").as_ptr(), 1000, &mut set), ApxStatus::Ok);
        assert_eq!(apx_pointset_len(set), 1);
        apx_pointset_free(set);
        apx_scheme_free(s);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            apx_scheme_quadratic_new(4, c("1").as_ptr(), true, &mut s),
            ApxStatus::InvalidArgument
        );
        assert!(s.is_null());
        assert!(last_error().contains("square-free"), "{}", last_error());

        assert_eq!(
            apx_scheme_quadratic_new(2, c("0.5").as_ptr(), true, &mut s),
            ApxStatus::InvalidArgument
        );
        assert_eq!(
            apx_scheme_quadratic_new(2, ptr::null(), true, &mut s),
            ApxStatus::NullPointer
        );

        assert_eq!(apx_scheme_quadratic_new(2, c("1").as_ptr(), true, &mut s), ApxStatus::Ok);
        let mut set = ptr::null_mut();
        assert_eq!(
            apx_enumerate(s, 0, 0, c("100000").as_ptr(), 100, &mut set),
            ApxStatus::Capacity
        );
        assert!(set.is_null());
        assert!(last_error().contains("capacity"));
        apx_scheme_free(s);

        assert_eq!(apx_pointset_len(ptr::null()), 0);
        apx_pointset_free(ptr::null_mut());
        apx_scheme_free(ptr::null_mut());
        apx_string_free(ptr::null_mut());
    }
}

#[test]
fn run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = c(dir.path().to_str().unwrap());
    let cfg = c("[scheme]\nkind = \"padic\"\np = 2\nw = 1\n\n[region]\nextent = 3\n");
    unsafe {
        assert_eq!(apx_run(c("generate").as_ptr(), cfg.as_ptr(), out.as_ptr(), false), ApxStatus::Ok);
        assert_eq!(
            apx_run(c("nonsense").as_ptr(), cfg.as_ptr(), out.as_ptr(), false),
            ApxStatus::InvalidArgument
        );
    }
    let csv = std::fs::read_to_string(dir.path().join("points.csv")).unwrap();
    assert_eq!(csv.lines().count(), 18);
    assert!(dir.path().join("manifest_generate.json").exists());
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(apx_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/approxlat.h");
    for f in [
        "apx_last_error",
        "apx_version",
        "apx_string_free",
        "apx_scheme_quadratic_new",
        "apx_scheme_padic_new",
        "apx_scheme_free",
        "apx_scheme_contains",
        "apx_enumerate",
        "apx_pointset_free",
        "apx_pointset_len",
        "apx_pointset_coords",
        "apx_pointset_csv",
        "apx_run",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f}");
    }
    assert!(header.contains("typedef struct ApxScheme ApxScheme;"));
    assert!(header.contains("APX_STATUS_CAPACITY = 3"));
}
