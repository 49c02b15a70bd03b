use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;

use num_rational::Rational64;
use rayon::prelude::*;
use tracegrow_core::eval::{checkpoint_gate, consensus_counts, consensus_majority, final_score, iou, ScoreInput};
use tracegrow_core::{encode_mask_png, raster_from_strokes, refine, EvalError, IouReport64, LabelPlane, UNLABELED};
use tracegrow_service::{ServiceConfig, StartupError, SystemClock};

use crate::args::*;
use crate::error::CliError;
use crate::io;

pub fn refine_cmd(a: &RefineArgs) -> Result<(), CliError> {
    let config = a.engine.config();
    config.validate()?;
    let image = io::rgb_image(&a.image)?;
    let trace = io::trace(&a.trace, image.width(), image.height())?;
    let out = refine(&image, &trace, &config)?;
    let palette = io::palette_for(out.mask.labels());
    let png = encode_mask_png(&out.mask, &palette).map_err(|e| CliError::Internal(e.to_string()))?;
    io::write(&a.out, &png)?;
    if let Some(dir) = &a.likelihood_dir {
        let lt = &out.likelihood;
        let iters = lt.iterations();
        let cats = lt.num_categories();
        let width = cats.saturating_sub(1).to_string().len().max(2);
        for c in 0..cats {
            let plane: Vec<u16> = lt
                .counts()
                .iter()
                .skip(c)
                .step_by(cats)
                .map(|&n| ((u32::from(n) * 65535 + iters / 2) / iters) as u16)
                .collect();
            let bytes = io::encode_gray16(lt.width(), lt.height(), plane)?;
            io::write(&dir.join(format!("likelihood_{c:0width$}.png")), &bytes)?;
        }
    }
    Ok(())
}

pub fn rasterize_cmd(a: &RasterizeArgs) -> Result<(), CliError> {
    let (w, h) = match (&a.like, a.width, a.height) {
        (Some(p), _, _) => {
            let img = io::rgb_image(p)?;
            (img.width(), img.height())
        }
        (None, Some(w), Some(h)) => (w, h),
        _ => return Err(CliError::Usage("give either --like or --width and --height".into())),
    };
    let doc = io::strokes(&a.strokes)?;
    let raster = raster_from_strokes(w, h, &doc.strokes).map_err(|e| CliError::input(&a.strokes, e))?;
    let palette = io::palette_for(raster.labels());
    let png = encode_mask_png(&raster, &palette).map_err(|e| CliError::Internal(e.to_string()))?;
    io::write(&a.out, &png)
}

fn fmt_ratio(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn csv_out(out: &Option<std::path::PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| CliError::input(parent, e))?;
            }
            Box::new(std::fs::File::create(p).map_err(|e| CliError::input(p, e))?)
        }
        None => Box::new(std::io::stdout().lock()),
    })
}

/// One table row: image, category (or `mean`), intersection, union, iou, pass.
type Row = [String; 6];

pub fn eval_cmd(a: &EvalArgs) -> Result<(), CliError> {
    let gt_files = io::png_files(&a.gt)?;
    if gt_files.is_empty() {
        return Err(CliError::input(&a.gt, "no PNG masks found"));
    }
    let pairs: Vec<(String, std::path::PathBuf, std::path::PathBuf)> = gt_files
        .into_iter()
        .map(|g| {
            let name = io::file_name(&g);
            let p = a.pred.join(&name);
            if p.is_file() {
                Ok((name, p, g))
            } else {
                Err(CliError::input(&p, "prediction missing for ground-truth mask"))
            }
        })
        .collect::<Result<_, _>>()?;
    let masks: Vec<_> = pairs
        .par_iter()
        .map(|(name, p, g)| {
            let (pm, gm) = (io::mask(p)?, io::mask(g)?);
            if !pm.same_shape(&gm) {
                return Err(CliError::input(p, format!("size differs from ground truth {}", g.display())));
            }
            Ok((name.clone(), pm, gm))
        })
        .collect::<Result<_, CliError>>()?;
    let categories: BTreeSet<u8> = match &a.categories {
        Some(c) => c.iter().copied().collect(),
        None => masks
            .iter()
            .flat_map(|(_, p, g)| p.labels().iter().chain(g.labels()))
            .copied()
            .filter(|&v| v != UNLABELED)
            .collect(),
    };
    if categories.is_empty() {
        return Err(CliError::Data("no categories to evaluate".into()));
    }
    let verdict = |m: f64| a.threshold.map_or(String::new(), |t| if m >= t { "pass".into() } else { "fail".into() });
    let reports: Vec<(String, Result<IouReport64, EvalError>)> =
        masks.par_iter().map(|(name, p, g)| (name.clone(), iou(p, g, &categories))).collect();

    let mut rows: Vec<Row> = Vec::new();
    let mut totals = std::collections::BTreeMap::<u8, (u64, u64)>::new();
    for (name, report) in &reports {
        match report {
            Ok(r) => {
                for (c, ci) in &r.per_category {
                    let t = totals.entry(*c).or_default();
                    t.0 += ci.intersection;
                    t.1 += ci.union;
                    rows.push([name.clone(), c.to_string(), ci.intersection.to_string(), ci.union.to_string(), fmt_ratio(ci.iou), String::new()]);
                }
                rows.push([name.clone(), "mean".into(), String::new(), String::new(), fmt_ratio(r.mean_iou), verdict(r.mean_iou)]);
            }
            Err(EvalError::NothingToEvaluate) => {
                rows.push([name.clone(), "mean".into(), String::new(), String::new(), String::new(), String::new()]);
            }
            Err(e) => return Err(CliError::Data(format!("{name}: {e}"))),
        }
    }
    let mut sum = 0.0;
    for (c, (i, u)) in &totals {
        let v = *i as f64 / *u as f64;
        sum += v;
        rows.push(["ALL".into(), c.to_string(), i.to_string(), u.to_string(), fmt_ratio(v), String::new()]);
    }
    if !totals.is_empty() {
        let m = sum / totals.len() as f64;
        rows.push(["ALL".into(), "mean".into(), String::new(), String::new(), fmt_ratio(m), verdict(m)]);
    }

    let mut w = csv::Writer::from_writer(csv_out(&a.out)?);
    let mut header = vec!["image", "category", "intersection", "union", "iou"];
    if a.threshold.is_some() {
        header.push("checkpoint");
    }
    let cols = header.len();
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(&header).map_err(internal)?;
    for r in &rows {
        w.write_record(&r[..cols]).map_err(internal)?;
    }
    w.flush().map_err(|e| CliError::Internal(e.to_string()))
}

/// Exact value of a plain decimal such as `0.9`, `135` or `-1.25`.
pub fn parse_decimal(s: &str) -> Result<Rational64, CliError> {
    let bad = || CliError::Usage(format!("not a decimal number: {s:?}"));
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
        || int.len() + frac.len() > 17
    {
        return Err(bad());
    }
    let digits: i64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let v = Rational64::new(digits, 10i64.pow(frac.len() as u32));
    Ok(if neg { -v } else { v })
}

fn rational_str(v: Rational64) -> String {
    if v.is_integer() {
        v.to_integer().to_string()
    } else {
        fmt_ratio(*v.numer() as f64 / *v.denom() as f64)
    }
}

pub fn score_cmd(a: &ScoreArgs) -> Result<(), CliError> {
    let mean_iou = parse_decimal(&a.mean_iou)?;
    let elapsed = parse_decimal(&a.elapsed)?;
    let report = final_score(ScoreInput { mean_iou, elapsed, objects: a.objects }).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut header = vec!["mean_iou", "elapsed", "objects", "expected_time", "bonus", "base_score", "final_score"];
    let mut row = vec![
        rational_str(mean_iou),
        rational_str(elapsed),
        a.objects.to_string(),
        rational_str(report.expected_time),
        rational_str(report.bonus),
        report.base_score.to_string(),
        report.final_score.to_string(),
    ];
    if let Some(t) = &a.threshold {
        let t = parse_decimal(t)?;
        let gate = tracegrow_core::IouReport { per_category: Default::default(), mean_iou, categories_evaluated: Default::default() };
        header.push("checkpoint");
        row.push(if checkpoint_gate(&gate, t) { "pass".into() } else { "fail".into() });
    }
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(&header).map_err(internal)?;
    w.write_record(&row).map_err(internal)?;
    w.flush().map_err(|e| CliError::Internal(e.to_string()))
}

pub fn consensus_cmd(a: &ConsensusArgs) -> Result<(), CliError> {
    let files = io::png_files(&a.masks)?;
    if files.is_empty() {
        return Err(CliError::input(&a.masks, "no PNG masks found"));
    }
    let masks = files.iter().map(|p| io::mask(p)).collect::<Result<Vec<_>, _>>()?;
    let counts = consensus_counts(&masks, a.category)?;
    let bytes = if counts.annotator_total <= 255 {
        io::encode_gray8(counts.width, counts.height, counts.counts.iter().map(|&c| c as u8).collect())?
    } else {
        let top = u16::MAX as u32;
        io::encode_gray16(counts.width, counts.height, counts.counts.iter().map(|&c| c.min(top) as u16).collect())?
    };
    io::write(&a.out_counts, &bytes)?;
    let majority = consensus_majority(&masks)?;
    let palette = io::palette_for(majority.labels());
    io::write(&a.out_majority, &encode_mask_png(&majority, &palette).map_err(|e| CliError::Internal(e.to_string()))?)
}

pub fn serve_cmd(a: &ServeArgs) -> Result<(), CliError> {
    let mut config = match &a.config {
        Some(p) => ServiceConfig::from_file(p).map_err(|e| CliError::Data(e.to_string()))?,
        None => ServiceConfig::default(),
    };
    config = config.with_env().map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(p) = a.port {
        config.port = p;
    }
    if let Some(r) = &a.data_root {
        config.data_root = Some(r.clone());
    }
    if let Some(s) = a.rng_seed {
        config.rng_seed = Some(s);
    }
    if let Some(h) = &a.host {
        config.host = h.clone();
    }
    if let Some(f) = a.seed_fraction {
        config.engine.seed_fraction = f;
    }
    if let Some(i) = a.iterations {
        config.engine.mc_iterations = i;
    }
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
    rt.block_on(async move {
        let (listener, state) = tracegrow_service::bind(&config, Arc::new(SystemClock::default())).await.map_err(|e| match e {
            StartupError::Config(_) | StartupError::Store(_) => CliError::Data(e.to_string()),
            StartupError::AddrInUse(_) => CliError::PortInUse(e.to_string()),
            StartupError::Bind { .. } => CliError::Usage(e.to_string()),
            StartupError::Serve(_) => CliError::Internal(e.to_string()),
        })?;
        let addr = listener.local_addr().map_err(|e| CliError::Internal(e.to_string()))?;
        println!("listening on http://{addr}");
        std::io::stdout().flush().ok();
        let shutdown = async {
            tokio::signal::ctrl_c().await.ok();
        };
        tracegrow_service::run(listener, state, shutdown).await.map_err(|e| CliError::Internal(e.to_string()))
    })
}
