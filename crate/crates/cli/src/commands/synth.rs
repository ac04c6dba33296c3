//! `synth`: generate one synthetic corpus shard.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use corpusbias::synthgen::{generate, token_set, BiasSpec};

use super::{file_stem, finish_manifest, sidecar_manifest_path, Ctx};
use crate::opts::resolve_seed;
use crate::{internal, invalid, CliError};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Planted-bias strength in [0, 1].
    #[arg(long)]
    beta: f64,
    /// Number of documents.
    #[arg(long)]
    docs: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Output shard file.
    #[arg(long)]
    out: PathBuf,
    /// Background vocabulary size.
    #[arg(long)]
    vocab: Option<usize>,
    /// Minimum document length in tokens.
    #[arg(long = "doc-len-min")]
    doc_len_min: Option<usize>,
    /// Maximum document length in tokens.
    #[arg(long = "doc-len-max")]
    doc_len_max: Option<usize>,
    /// Marker/term set sizes.
    #[arg(long = "x-markers")]
    x_markers: Option<usize>,
    #[arg(long = "y-markers")]
    y_markers: Option<usize>,
    #[arg(long = "a-terms")]
    a_terms: Option<usize>,
    #[arg(long = "b-terms")]
    b_terms: Option<usize>,
}

pub fn spec_from(args: &Args, ctx: &Ctx) -> Result<BiasSpec, CliError> {
    let d = BiasSpec::default();
    let seed = resolve_seed(args.seed, &ctx.config).map_err(invalid)?;
    let cfg = &ctx.config;
    let spec = BiasSpec {
        x_markers: token_set(
            "xmark",
            cfg.resolve(&args.x_markers, "x-markers", d.x_markers.len())
                .map_err(invalid)?,
        ),
        y_markers: token_set(
            "ymark",
            cfg.resolve(&args.y_markers, "y-markers", d.y_markers.len())
                .map_err(invalid)?,
        ),
        a_terms: token_set(
            "aterm",
            cfg.resolve(&args.a_terms, "a-terms", d.a_terms.len())
                .map_err(invalid)?,
        ),
        b_terms: token_set(
            "bterm",
            cfg.resolve(&args.b_terms, "b-terms", d.b_terms.len())
                .map_err(invalid)?,
        ),
        beta: args.beta,
        background_vocab: cfg
            .resolve(&args.vocab, "vocab", d.background_vocab)
            .map_err(invalid)?,
        documents: args.docs,
        doc_len: (
            cfg.resolve(&args.doc_len_min, "doc-len-min", d.doc_len.0)
                .map_err(invalid)?,
            cfg.resolve(&args.doc_len_max, "doc-len-max", d.doc_len.1)
                .map_err(invalid)?,
        ),
        seed,
    };
    spec.validate().map_err(invalid)?;
    Ok(spec)
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let spec = spec_from(&args, ctx)?;

    let mut manifest = ctx.manifest("synth");
    manifest.seed = Some(spec.seed);
    manifest.set_config("beta", spec.beta);
    manifest.set_config("docs", spec.documents);
    manifest.set_config("vocab", spec.background_vocab);
    manifest.set_config("doc-len-min", spec.doc_len.0);
    manifest.set_config("doc-len-max", spec.doc_len.1);
    manifest.set_config("threads", ctx.threads);

    let started = Instant::now();
    let mut shard = generate(&spec).map_err(invalid)?;
    manifest.record_timing("generate", started.elapsed());

    shard.name = file_stem(&args.out);
    let file = fs::File::create(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))
        .map_err(internal)?;
    let mut writer = std::io::BufWriter::new(file);
    shard.write_to(&mut writer).map_err(internal)?;
    std::io::Write::flush(&mut writer).map_err(internal)?;

    finish_manifest(
        manifest,
        &[],
        &[args.out.as_path()],
        &sidecar_manifest_path(&args.out),
    )?;
    println!(
        "generated {} documents, {} tokens, {} bytes (beta {}, seed {})",
        shard.document_count(),
        shard.token_count(),
        shard.byte_size(),
        spec.beta,
        spec.seed,
    );
    Ok(())
}
