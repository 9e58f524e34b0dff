//! Generates `include/gbs.h` from the public extern "C" surface.

fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("cargo sets this");
    let config = cbindgen::Config {
        language: cbindgen::Language::C,
        cpp_compat: true,
        include_guard: Some("GBS_H".to_string()),
        documentation: true,
        enumeration: cbindgen::EnumConfig {
            prefix_with_name: true,
            ..cbindgen::EnumConfig::default()
        },
        header: Some(
            "/* C interface to gbs-core: graphs of infinite cyclic groups,\n \
             * deformation moves, words, and accessibility bounds. */"
                .to_string(),
        ),
        ..cbindgen::Config::default()
    };
    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(format!("{crate_dir}/include/gbs.h"));
        }
        Err(cbindgen::Error::ParseSyntaxError { .. }) => {
            // Let rustc report the syntax error with a real diagnostic.
        }
        Err(err) => panic!("failed to generate the C header: {err}"),
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=build.rs");
}
