use std::path::PathBuf;

fn main() {
    let dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    let config = cbindgen::Config {
        language: cbindgen::Language::C,
        include_guard: Some("WREATHCOH_H".into()),
        no_includes: true,
        usize_is_size_t: true,
        sys_includes: vec!["stdint.h".into(), "stddef.h".into()],
        enumeration: cbindgen::EnumConfig {
            rename_variants: cbindgen::RenameRule::ScreamingSnakeCase,
            prefix_with_name: true,
            ..Default::default()
        },
        documentation: true,
        ..Default::default()
    };
    match cbindgen::Builder::new().with_crate(&dir).with_config(config).generate() {
        Ok(b) => {
            b.write_to_file(dir.join("include/wreathcoh.h"));
        }
        Err(e) => println!("cargo:warning=header not regenerated: {}", e),
    }
}
