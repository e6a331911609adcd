//! Command-line front end for the `rdh` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{debug, info};

use crate::codec::{self, OrderMode};
use crate::error::{RdhError, Result};
use crate::image::GrayImage;
use crate::io::{bits_to_bytes, bytes_to_bits, random_bits, read_pgm};
use crate::metadata::StegoMetadata;
use crate::metrics::{self, QualityReport};

#[derive(Debug, Parser)]
#[command(name = "rdh", version, about = "Reversible data hiding in 8-bit grayscale PGM images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hide a payload in a cover image.
    Embed(EmbedArgs),
    /// Recover the payload and the original cover.
    Extract(ExtractArgs),
    /// Report gross and net capacity.
    Capacity(CapacityArgs),
    /// Compare two images.
    Stats(StatsArgs),
    /// Embed a range of payload sizes and write one CSV row per run.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub cover: PathBuf,
    /// Payload file, read MSB first.
    #[arg(long, conflicts_with = "random_bits", required_unless_present = "random_bits")]
    pub payload: Option<PathBuf>,
    /// Generate this many pseudo-random bits instead of reading a file.
    #[arg(long)]
    pub random_bits: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "fluctuation")]
    pub order: OrderMode,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub meta: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub stego: PathBuf,
    #[arg(long)]
    pub meta: PathBuf,
    #[arg(long)]
    pub out_payload: PathBuf,
    #[arg(long)]
    pub out_cover: PathBuf,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long)]
    pub cover: PathBuf,
    #[arg(long, default_value = "fluctuation")]
    pub order: OrderMode,
    /// Seed of the probe payload used for the net figure.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub cover: PathBuf,
    #[arg(long)]
    pub stego: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub cover: PathBuf,
    /// Comma-separated payload rates in bits per pixel.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.03,0.04,0.05")]
    pub bpp_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "fluctuation,raster")]
    pub orders: Vec<OrderMode>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn exit_code(err: &RdhError) -> i32 {
    match err {
        RdhError::Bounds { .. } | RdhError::Format(_) => 1,
        RdhError::Capacity(_) => 2,
        RdhError::CorruptStego(_) => 3,
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Embed(a) => cmd_embed(&a, out),
        Command::Extract(a) => cmd_extract(&a, out),
        Command::Capacity(a) => cmd_capacity(&a, out),
        Command::Stats(a) => cmd_stats(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
    }
}

fn stdout_err(e: std::io::Error) -> RdhError {
    RdhError::Format(format!("writing output: {e}"))
}

/// Writes every file to a sibling temporary and renames only once all of
/// them are on disk.
fn write_all_or_nothing(files: &[(&Path, &[u8])]) -> Result<()> {
    let mut staged = Vec::new();
    for &(path, data) in files {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".rdh-tmp");
        let tmp = PathBuf::from(tmp);
        if let Err(e) = fs::write(&tmp, data) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            let _ = fs::remove_file(&tmp);
            return Err(RdhError::Format(format!("{}: {e}", path.display())));
        }
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        fs::rename(&tmp, path).map_err(|e| RdhError::Format(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn read_payload(path: &Path) -> Result<Vec<bool>> {
    let data = fs::read(path).map_err(|e| RdhError::Format(format!("{}: {e}", path.display())))?;
    Ok(bytes_to_bits(&data))
}

fn net_capacity(cover: &GrayImage, mode: OrderMode, seed: u64) -> usize {
    let gross = codec::capacity(cover).map(|c| c.gross()).unwrap_or(0) as usize;
    codec::feasible_payload_len(cover, &random_bits(gross, seed), mode)
}

fn cmd_embed(a: &EmbedArgs, out: &mut dyn Write) -> Result<()> {
    let cover = read_pgm(&a.cover)?;
    let payload = match (&a.payload, a.random_bits) {
        (Some(p), _) => read_payload(p)?,
        (None, Some(n)) => random_bits(n, a.seed),
        (None, None) => return Err(RdhError::Format("no payload given".into())),
    };
    info!("embedding {} bits in {}x{} ({})", payload.len(), cover.width(), cover.height(), a.order);
    let embedding = match codec::embed(&cover, &payload, a.order) {
        Ok(e) => e,
        Err(RdhError::Capacity(msg)) => {
            let net = codec::feasible_payload_len(&cover, &payload, a.order);
            return Err(RdhError::Capacity(format!(
                "{msg}; net capacity for this payload is {net} bits, {} requested",
                payload.len()
            )));
        }
        Err(e) => return Err(e),
    };
    let report = QualityReport::new(&cover, &embedding)?;
    write_all_or_nothing(&[
        (&a.out, &crate::io::encode_pgm(&embedding.stego)),
        (&a.meta, embedding.meta.to_json().as_bytes()),
    ])?;
    write!(out, "{report}").map_err(stdout_err)
}

fn cmd_extract(a: &ExtractArgs, out: &mut dyn Write) -> Result<()> {
    let stego = read_pgm(&a.stego)?;
    let text = fs::read_to_string(&a.meta).map_err(|e| RdhError::Format(format!("{}: {e}", a.meta.display())))?;
    let meta = StegoMetadata::from_json(&text)?;
    let (bits, cover) = codec::extract(&stego, &meta)?;
    debug!("recovered {} bits", bits.len());
    write_all_or_nothing(&[
        (&a.out_payload, &bits_to_bytes(&bits)),
        (&a.out_cover, &crate::io::encode_pgm(&cover)),
    ])?;
    writeln!(out, "payload_bits: {}", bits.len()).map_err(stdout_err)?;
    writeln!(out, "recovered: {}x{}", cover.width(), cover.height()).map_err(stdout_err)
}

fn cmd_capacity(a: &CapacityArgs, out: &mut dyn Write) -> Result<()> {
    let cover = read_pgm(&a.cover)?;
    let report = codec::capacity(&cover)?;
    let net = net_capacity(&cover, a.order, a.seed);
    let n = cover.len() as f64;
    let mut w = || -> std::io::Result<()> {
        writeln!(out, "set_a: {}", report.set_a)?;
        writeln!(out, "set_b_estimate: {}", report.set_b_estimate)?;
        writeln!(out, "gross: {}", report.gross())?;
        writeln!(out, "net: {net}")?;
        writeln!(out, "net_bpp: {:.6}", net as f64 / n)
    };
    w().map_err(stdout_err)
}

fn cmd_stats(a: &StatsArgs, out: &mut dyn Write) -> Result<()> {
    let cover = read_pgm(&a.cover)?;
    let stego = read_pgm(&a.stego)?;
    let mse = metrics::mse(&cover, &stego)?;
    let psnr = metrics::psnr_from_mse(mse);
    let psnr = if psnr.is_infinite() { "inf".to_owned() } else { format!("{psnr:.4}") };
    writeln!(out, "mse: {mse:.8}").map_err(stdout_err)?;
    writeln!(out, "psnr_db: {psnr}").map_err(stdout_err)
}

pub const SWEEP_HEADER: [&str; 6] = ["bpp", "mode", "psnr_db", "isp", "valid", "capacity_bits"];

/// Rows of a sweep. A run that exceeds capacity is kept with `capacity_error`
/// in the PSNR column and empty counts.
pub fn sweep_rows(cover: &GrayImage, bpp_list: &[f64], orders: &[OrderMode], seed: u64) -> Result<Vec<[String; 6]>> {
    let mut rows = Vec::new();
    for &mode in orders {
        let net = net_capacity(cover, mode, seed);
        for &bpp in bpp_list {
            let n = (bpp * cover.len() as f64).round() as usize;
            let payload = random_bits(n, seed);
            let (psnr, isp, valid) = match codec::embed(cover, &payload, mode) {
                Ok(e) => {
                    let psnr = metrics::psnr(cover, &e.stego)?;
                    (format!("{psnr:.4}"), e.stats.isp_count.to_string(), e.stats.valid_shift_count.to_string())
                }
                Err(RdhError::Capacity(msg)) => {
                    info!("bpp {bpp} ({mode}): {msg}");
                    ("capacity_error".to_owned(), String::new(), String::new())
                }
                Err(e) => return Err(e),
            };
            rows.push([bpp.to_string(), mode.to_string(), psnr, isp, valid, net.to_string()]);
        }
    }
    Ok(rows)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let cover = read_pgm(&a.cover)?;
    let rows = sweep_rows(&cover, &a.bpp_list, &a.orders, a.seed)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| RdhError::Format(format!("csv: {e}"));
    wtr.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for row in &rows {
        wtr.write_record(row).map_err(csv_err)?;
    }
    let data = wtr.into_inner().map_err(|e| RdhError::Format(format!("csv: {e}")))?;
    match &a.csv {
        Some(path) => write_all_or_nothing(&[(path, &data)]),
        None => out.write_all(&data).map_err(stdout_err),
    }
}
