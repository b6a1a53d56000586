use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use mann_core::dataio::model_file::{read_model_file, save_model_file};
use mann_core::dataio::synth::write_dataset;
use mann_core::mann::{classify_with_threshold, fit};
use mann_core::{
    evaluate, load_manifest, load_pgm, split_dataset, synth_dataset, BlockGrid, Decision,
    EvalOptions, Manifest, Matrix, ModelFile, SplitParams,
};

use crate::config::RunConfig;
use crate::report::{self, Style};
use crate::{
    ConfigArgs, EvalArgs, Failure, InspectArgs, PredictArgs, ResultExt, Subset, SynthArgs,
    TrainArgs,
};

type CmdResult = Result<(), Failure>;

pub fn synth(a: SynthArgs) -> CmdResult {
    let size: BlockGrid = a
        .size
        .parse()
        .map_err(|_| anyhow!("invalid --size '{}', expected ROWSxCOLS", a.size))
        .usage()?;
    let data = synth_dataset(
        a.classes,
        a.per_class,
        (size.rows, size.cols),
        a.seed,
        a.noise,
    )
    .usage()?;
    let manifest = write_dataset(&a.out_dir, &data).runtime()?;
    println!(
        "wrote {} images ({} classes, {}x{}) and {}",
        data.images.len(),
        a.classes,
        size.rows,
        size.cols,
        manifest.display()
    );
    Ok(())
}

fn run_config(args: &ConfigArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        cfg.apply_file_text(&text)
            .with_context(|| format!("config file {}", path.display()))?;
    }
    let overrides = [
        ("master_seed", &args.seed),
        ("d", &args.d),
        ("threshold", &args.threshold),
        ("test_fraction", &args.test_fraction),
        ("epochs", &args.epochs),
        ("learning_rate", &args.learning_rate),
        ("snn_hidden", &args.snn_hidden),
        ("cnn_hidden", &args.cnn_hidden),
        ("block_grid", &args.block_grid),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, v)
                .with_context(|| format!("--{}", key.replace('_', "-")))?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_manifest(path: &Path) -> anyhow::Result<Manifest> {
    load_manifest(path).with_context(|| format!("cannot load manifest {}", path.display()))
}

fn read_images(manifest: &Manifest) -> anyhow::Result<Vec<Matrix>> {
    manifest
        .records
        .iter()
        .map(|r| {
            let path = manifest.resolve(r);
            load_pgm(&path).with_context(|| format!("cannot load image {}", path.display()))
        })
        .collect()
}

fn check_uniform_shape(images: &[Matrix], manifest: &Manifest) -> anyhow::Result<(usize, usize)> {
    let shape = images[0].shape();
    if let Some((i, img)) = images.iter().enumerate().find(|(_, m)| m.shape() != shape) {
        bail!(
            "image {} is {}x{}, expected {}x{} like the first image",
            manifest.records[i].path,
            img.rows(),
            img.cols(),
            shape.0,
            shape.1
        );
    }
    Ok(shape)
}

fn check_out_dir(path: &Path) -> anyhow::Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = parent {
        if !dir.is_dir() {
            bail!("output directory {} does not exist", dir.display());
        }
    }
    Ok(())
}

pub fn train(a: TrainArgs) -> CmdResult {
    let cfg = run_config(&a.config).usage()?;
    if a.jobs == 0 {
        return Err(anyhow!("--jobs must be at least 1")).usage();
    }
    let manifest = read_manifest(&a.manifest).usage()?;
    check_out_dir(&a.out).usage()?;
    let (train_set, held_out, split) = if a.no_split {
        (manifest.clone(), 0, None)
    } else {
        let (train, test) = split_dataset(&manifest, cfg.test_fraction, cfg.master_seed).usage()?;
        let split = SplitParams {
            test_fraction: cfg.test_fraction,
            seed: cfg.master_seed,
        };
        let held_out = test.len();
        (train, held_out, Some(split))
    };
    let images = read_images(&train_set).usage()?;
    let (rows, cols) = check_uniform_shape(&images, &train_set).usage()?;
    let features = cfg.features();
    features.check_shape(rows, cols).usage()?;
    let labels = train_set.label_ids();
    let mann_cfg = cfg.mann(manifest.labels.len());
    mann_cfg.validate().usage()?;

    println!(
        "training on {} images ({} classes, {rows}x{cols}), {held_out} held out",
        images.len(),
        manifest.labels.len()
    );
    let (model, summary) = fit(
        &images,
        &labels,
        manifest.labels.clone(),
        &features,
        &mann_cfg,
        a.jobs,
    )
    .context("training failed")
    .runtime()?;
    print!("{}", report::loss_summary(&model, &summary));
    save_model_file(&ModelFile::new(&model, split), &a.out)
        .with_context(|| format!("cannot write model {}", a.out.display()))
        .runtime()?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn parse_reliability(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|p| {
            let v: f64 = p
                .trim()
                .parse()
                .map_err(|_| anyhow!("invalid reliability coefficient '{}'", p.trim()))?;
            if !v.is_finite() {
                bail!("reliability coefficients must be finite");
            }
            Ok(v)
        })
        .collect()
}

pub fn eval(a: EvalArgs) -> CmdResult {
    let file = read_model_file(&a.model)
        .with_context(|| format!("cannot load model {}", a.model.display()))
        .usage()?;
    let manifest = read_manifest(&a.manifest).usage()?;
    let reliability = a
        .reliability
        .as_deref()
        .map(parse_reliability)
        .transpose()
        .usage()?;

    let subset = a.subset.unwrap_or(if file.split.is_some() {
        Subset::Test
    } else {
        Subset::All
    });
    let selected = match subset {
        Subset::All => manifest.clone(),
        Subset::Test | Subset::Train => {
            let fraction = a
                .test_fraction
                .or(file.split.map(|s| s.test_fraction))
                .unwrap_or(mann_core::dataio::split::DEFAULT_TEST_FRACTION);
            let seed = a
                .seed
                .or(file.split.map(|s| s.seed))
                .unwrap_or(file.master_seed);
            let (train, test) = split_dataset(&manifest, fraction, seed).usage()?;
            if subset == Subset::Test {
                test
            } else {
                train
            }
        }
    };
    if selected.is_empty() {
        return Err(anyhow!(
            "the selected subset of {} is empty",
            a.manifest.display()
        ))
        .usage();
    }

    let model = file.into_model();
    let mut truth = Vec::with_capacity(selected.len());
    for r in &selected.records {
        let id = model
            .labels
            .iter()
            .position(|l| *l == r.label)
            .ok_or_else(|| {
                anyhow!(
                    "configuration error: label '{}' in {} is not one of the model's labels ({})",
                    r.label,
                    a.manifest.display(),
                    model.labels.join(", ")
                )
            });
        truth.push(id.usage()?);
    }
    let images = read_images(&selected).usage()?;
    let expected = model.image_shape();
    for (img, r) in images.iter().zip(&selected.records) {
        if img.shape() != expected {
            return Err(anyhow!(
                "image {} is {}x{}, the model expects {}x{}",
                r.path,
                img.rows(),
                img.cols(),
                expected.0,
                expected.1
            ))
            .usage();
        }
    }
    let opts = EvalOptions {
        reliability,
        threshold: a.threshold,
    };
    let rep = evaluate(&model, &images, &truth, &opts).usage()?;

    let style = Style::detect(a.tsv);
    if !a.tsv {
        println!(
            "evaluated {} images ({} subset) with threshold {}",
            images.len(),
            match subset {
                Subset::Test => "test",
                Subset::Train => "train",
                Subset::All => "full",
            },
            opts.threshold.unwrap_or(model.config.threshold)
        );
    }
    print!("{}", report::accuracy_table(&rep, style));
    if a.confusion {
        print!("{}", report::confusion_tables(&rep, style));
    }
    if let Some(path) = &a.dump_predictions {
        let text = report::predictions_tsv(&rep, &selected);
        write_file(path, text.as_bytes())
            .with_context(|| format!("cannot write {}", path.display()))
            .runtime()?;
    }
    Ok(())
}

pub fn predict(a: PredictArgs) -> CmdResult {
    let model = read_model_file(&a.model)
        .with_context(|| format!("cannot load model {}", a.model.display()))
        .usage()?
        .into_model();
    let image = load_pgm(&a.image)
        .with_context(|| format!("cannot load image {}", a.image.display()))
        .usage()?;
    let expected = model.image_shape();
    if image.shape() != expected {
        return Err(anyhow!(
            "image {} is {}x{}, the model expects {}x{}",
            a.image.display(),
            image.rows(),
            image.cols(),
            expected.0,
            expected.1
        ))
        .usage();
    }
    let threshold = a.threshold.unwrap_or(model.config.threshold);
    let outcome = classify_with_threshold(&model, &image, threshold).usage()?;
    let decision = match outcome.decision {
        Decision::Class(k) => model.labels[k].as_str(),
        Decision::Reject => "REJECT",
    };
    let sum: f64 = outcome.scores.iter().sum();
    if a.tsv {
        println!("decision\t{decision}");
        for (label, s) in model.labels.iter().zip(&outcome.scores) {
            println!("{label}\t{s:.6}");
        }
        println!("sum\t{sum:.6}");
    } else {
        println!("{decision}");
        for (label, s) in model.labels.iter().zip(&outcome.scores) {
            println!("  {label:<12} {s:.6}");
        }
        println!("threshold {threshold}, score sum {sum:.6} (independent scores, not normalised)");
    }
    Ok(())
}

pub fn inspect(a: InspectArgs) -> CmdResult {
    let file = read_model_file(&a.model)
        .with_context(|| format!("cannot load model {}", a.model.display()))
        .usage()?;
    print!("{}", report::describe(&file));
    Ok(())
}

/// Writes through a temp file so a failed write leaves nothing behind.
fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
