//! Generates the synthetic datasets, writes one CSV per instance plus a
//! manifest, and reads them back.
//!
//! ```text
//! cargo run --example datagen_export -- [output-dir]
//! ```

use kdiff::datagen::{
    build_field_dataset, build_spherical_dataset, build_univariate_dataset, read_dataset, simulate_ar, write_dataset,
    ARModelSpec, FieldDatasetSpec,
};

fn main() -> kdiff::Result<()> {
    let out = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("kdiff-datasets"));

    let ar = ARModelSpec {
        coefficients: vec![0.6, -0.2],
        noise_sd: 1.0,
        mean: 5.0,
        length: 8,
        burn_in: 100,
    };
    println!("AR(2) sample: {:.3?}", simulate_ar(&ar, 1)?);

    let sets = [
        ("univariate", build_univariate_dataset(1.0, 1)?),
        ("spherical", build_spherical_dataset(1)?),
        ("fields", build_field_dataset(&FieldDatasetSpec::default(), 1)?),
    ];
    for (name, data) in &sets {
        let manifest = write_dataset(data, out.join(name))?;
        let back = read_dataset(&manifest)?;
        let labels: Vec<String> = back.labels().iter().map(|l| l.map_or("-".into(), |l| l.to_string())).collect();
        println!("{name}: {} instances at {}, labels {}", back.len(), manifest.display(), labels.join(""));
        assert_eq!(back.instances, data.instances);
    }
    Ok(())
}
