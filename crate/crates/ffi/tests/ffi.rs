use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use intres_ffi::*;

const D4: &str = r#"{"poset": {"elements": ["1","2","3","4"], "relations": [["1","3"],["3","2"],["3","4"]]},
  "dims": {"1": 1, "2": 1, "3": 2, "4": 1},
  "maps": {"1->3": [[1],[1]], "3->2": [[1,0]], "3->4": [[0,1]]}}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = intres_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    intres_string_free(p);
    s
}

#[test]
fn poset_queries() {
    let json = c(r#"{"elements": ["a","b","c","d"], "relations": [["a","c"],["c","b"],["c","d"]]}"#);
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(intres_poset_from_json(json.as_ptr(), &mut p), IntresStatus::Ok);
        let mut n = 0;
        assert_eq!(intres_poset_len(p, &mut n), IntresStatus::Ok);
        assert_eq!(n, 4);
        assert_eq!(intres_poset_interval_count(p, &mut n), IntresStatus::Ok);
        assert_eq!(n, 11);
        assert_eq!(intres_poset_interval_gldim(p, 2, &mut n), IntresStatus::Ok);
        assert_eq!(n, 1);
        assert_eq!(intres_poset_projective_gldim(p, 3, &mut n), IntresStatus::Ok);
        assert_eq!(n, 1);
        let mut accepted = true;
        let mut verdict = ptr::null_mut();
        assert_eq!(intres_poset_classify(p, &mut accepted, &mut verdict), IntresStatus::Ok);
        assert!(!accepted);
        assert!(take_string(verdict).contains("\"accepted\":false"));
        intres_poset_free(p);
    }
}

#[test]
fn module_queries() {
    let json = c(D4);
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(intres_module_from_json(json.as_ptr(), 2, &mut m), IntresStatus::Ok);
        let mut n = 0;
        assert_eq!(intres_module_total_dim(m, &mut n), IntresStatus::Ok);
        assert_eq!(n, 5);
        assert_eq!(intres_module_resdim(m, &mut n), IntresStatus::Ok);
        assert_eq!(n, 1);
        let mut out = ptr::null_mut();
        assert_eq!(intres_module_cover_json(m, &mut out), IntresStatus::Ok);
        let cover: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(cover["summands"].as_object().unwrap().len(), 3);
        assert_eq!(intres_module_resolution_json(m, false, &mut out), IntresStatus::Ok);
        let res: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(res["length"], 1);
        intres_module_free(m);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(intres_poset_from_json(ptr::null(), &mut p), IntresStatus::NullPointer);
        let bad = c("{\"elements\": [");
        assert_eq!(intres_poset_from_json(bad.as_ptr(), &mut p), IntresStatus::Malformed);
        assert!(last_error().contains("JSON"));
        let cyc = c(r#"{"elements": ["x","y"], "relations": [["x","y"],["y","x"]]}"#);
        assert_eq!(intres_poset_from_json(cyc.as_ptr(), &mut p), IntresStatus::Validation);
        assert!(p.is_null());

        let mut m = ptr::null_mut();
        let grid = c(r#"{"poset": {"elements": ["a","b","c","d"], "relations": [["a","b"],["a","c"],["b","d"],["c","d"]]},
            "dims": {"a":1,"b":1,"c":1,"d":1}, "maps": {"a->b":[[1]],"a->c":[[1]],"b->d":[[1]]}}"#);
        assert_eq!(intres_module_from_json(grid.as_ptr(), 2, &mut m), IntresStatus::Validation);
        assert!(last_error().contains("commutative"));
        let json = c(D4);
        assert_eq!(intres_module_from_json(json.as_ptr(), 4, &mut m), IntresStatus::Malformed);
        assert!(last_error().contains('4'));
        let bytes = [0xffu8, 0];
        assert_eq!(
            intres_module_from_json(bytes.as_ptr().cast(), 2, &mut m),
            IntresStatus::InvalidUtf8
        );
        let mut n = 0;
        assert_eq!(intres_module_resdim(ptr::null(), &mut n), IntresStatus::NullPointer);
        intres_string_free(ptr::null_mut());
        intres_poset_free(ptr::null_mut());
        intres_module_free(ptr::null_mut());
    }
}

#[test]
fn cycle_counts() {
    assert_eq!(intres_count_indecomposables(2, 1), 17);
    let v = unsafe { CStr::from_ptr(intres_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/intres.h");
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn header_declares_every_export() {
    let h = header();
    for sym in [
        "intres_last_error",
        "intres_version",
        "intres_string_free",
        "intres_poset_from_json",
        "intres_poset_free",
        "intres_poset_len",
        "intres_poset_interval_count",
        "intres_poset_interval_gldim",
        "intres_poset_projective_gldim",
        "intres_poset_classify",
        "intres_module_from_json",
        "intres_module_free",
        "intres_module_total_dim",
        "intres_module_resdim",
        "intres_module_cover_json",
        "intres_module_resolution_json",
        "intres_count_indecomposables",
        "typedef struct IntresPoset IntresPoset;",
        "typedef struct IntresModule IntresModule;",
        "INTRES_STATUS_VALIDATION = 4",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}

/// Compiles and runs a small C program against the header and the static
/// library, when a C compiler and the archive are available.
#[test]
fn c_program_links() {
    let Ok(exe) = std::env::current_exe() else { return };
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let archive = profile_dir.join("libintres_ffi.a");
    if !archive.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no archive at {} or no cc", archive.display());
        return;
    }
    let dir = std::env::temp_dir().join(format!("intres-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "intres.h"
int main(void) {
    IntresPoset *p = NULL;
    const char *doc = "{\"elements\":[\"1\",\"2\",\"3\"],\"relations\":[[\"1\",\"2\"],[\"2\",\"3\"]]}";
    if (intres_poset_from_json(doc, &p) != INTRES_STATUS_OK) return 1;
    uintptr_t n = 0;
    if (intres_poset_interval_count(p, &n) != INTRES_STATUS_OK || n != 6) return 2;
    if (intres_poset_interval_gldim(p, 2, &n) != INTRES_STATUS_OK || n != 0) return 3;
    intres_poset_free(p);
    if (intres_poset_from_json("[", &p) != INTRES_STATUS_MALFORMED) return 4;
    printf("%s\n", intres_last_error());
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("main");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).contains("JSON"));
    let _ = std::fs::remove_dir_all(&dir);
}
