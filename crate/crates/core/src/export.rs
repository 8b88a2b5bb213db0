//! CSV serialization of simulation artifacts.
//!
//! Every writer emits a one-line JSON provenance header (prefixed `#`)
//! followed by plain numeric CSV, so the files are both self-describing and
//! trivially loadable. Writers are deterministic: identical inputs produce
//! byte-identical output.

use std::io::{self, Write};

use crate::exponents::ExponentField;
use crate::jumps::JumpSet;
use crate::lacunary::TorusExponentField;
use crate::limsup::ResolutionSet;
use crate::path::PathSample;
use crate::spectrum::SpectrumEstimate;

/// FNV-1a over a canonical serialization; stable across builds.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325_u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Hash of a Lévy model's canonical JSON form.
pub fn model_hash(model: &crate::levy::LevyModel) -> u64 {
    let json = serde_json::to_string(model).expect("model serializes");
    stable_hash(json.as_bytes())
}

pub fn write_jumpset_csv(out: &mut dyn Write, jumps: &JumpSet) -> io::Result<()> {
    writeln!(
        out,
        "# {{\"model_hash\":\"{:016x}\",\"horizon\":{},\"eps_min\":{:e},\"seed\":{},\"dim\":{}}}",
        model_hash(&jumps.model),
        jumps.horizon,
        jumps.eps_min,
        jumps.seed,
        jumps.model.dim
    )?;
    write!(out, "time,size")?;
    for c in 0..jumps.model.dim {
        write!(out, ",dir{c}")?;
    }
    writeln!(out)?;
    for i in 0..jumps.len() {
        write!(out, "{:.17e},{:.17e}", jumps.times()[i], jumps.sizes()[i])?;
        for d in jumps.direction(i) {
            write!(out, ",{d:.17e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_path_csv(out: &mut dyn Write, path: &PathSample) -> io::Result<()> {
    writeln!(
        out,
        "# {{\"horizon\":{},\"dim\":{},\"points\":{}}}",
        path.horizon,
        path.dim,
        path.len()
    )?;
    write!(out, "t")?;
    for c in 0..path.dim {
        write!(out, ",x{c}")?;
    }
    writeln!(out)?;
    for i in 0..path.len() {
        write!(out, "{:.17e}", path.times()[i])?;
        for v in path.value(i) {
            write!(out, ",{v:.17e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_resolution_set_csv(out: &mut dyn Write, set: &ResolutionSet) -> io::Result<()> {
    writeln!(
        out,
        "# {{\"horizon\":{},\"window\":[{},{}],\"provenance\":{}}}",
        set.horizon,
        set.window.0,
        set.window.1,
        serde_json::to_string(&set.provenance).expect("string serializes")
    )?;
    writeln!(out, "left,right")?;
    for (a, b) in set.intervals.items() {
        writeln!(out, "{a:.17e},{b:.17e}")?;
    }
    Ok(())
}

pub fn write_exponent_field_csv(out: &mut dyn Write, field: &ExponentField) -> io::Result<()> {
    writeln!(
        out,
        "# {{\"horizon\":{},\"window\":[{},{}],\"ceiling\":{},\"points\":{}}}",
        field.horizon,
        field.window.0,
        field.window.1,
        field.ceiling,
        field.len()
    )?;
    writeln!(out, "t,alpha_hat,h_hat,flag")?;
    for i in 0..field.len() {
        writeln!(
            out,
            "{:.17e},{:.17e},{:.17e},{}",
            field.grid_time(i),
            field.alpha()[i],
            field.h()[i],
            u8::from(field.flagged()[i])
        )?;
    }
    Ok(())
}

pub fn write_torus_field_csv(out: &mut dyn Write, field: &TorusExponentField) -> io::Result<()> {
    writeln!(
        out,
        "# {{\"dim\":{},\"grid_m\":{},\"h_base\":{},\"h_bar\":{},\"window\":[{},{}]}}",
        field.dim, field.grid_m, field.h_base, field.h_bar, field.window.0, field.window.1
    )?;
    write!(out, "x0")?;
    for a in 1..field.dim {
        write!(out, ",x{a}")?;
    }
    writeln!(out, ",alpha_hat,h_hat,flag")?;
    for i in 0..field.len() {
        let x = field.grid_point(i);
        write!(out, "{:.17e}", x[0])?;
        for a in 1..field.dim as usize {
            write!(out, ",{:.17e}", x[a])?;
        }
        writeln!(
            out,
            ",{:.17e},{:.17e},{}",
            field.alpha()[i],
            field.h()[i],
            u8::from(field.flagged()[i])
        )?;
    }
    Ok(())
}

pub fn write_spectrum_csv(out: &mut dyn Write, spec: &SpectrumEstimate) -> io::Result<()> {
    writeln!(
        out,
        "# {{\"bin_width\":{},\"j_range\":[{},{}]}}",
        spec.bin_width, spec.j_range.0, spec.j_range.1
    )?;
    writeln!(out, "h,dim_hat,dim_raw,r2,n_points")?;
    for row in &spec.rows {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
        writeln!(
            out,
            "{:.6},{},{},{},{}",
            row.h_center,
            fmt(row.dim),
            fmt(row.dim_raw),
            fmt(row.r2),
            row.points
        )?;
    }
    Ok(())
}

/// Optimal net cover as CSV.
pub fn write_cover_csv(out: &mut dyn Write, cover: &crate::netmeasure::DyadicCover) -> io::Result<()> {
    writeln!(out, "# {{\"base\":{},\"depth\":{}}}", cover.base, cover.depth)?;
    writeln!(out, "generation,index,diameter,g_cost")?;
    for c in &cover.cubes {
        writeln!(out, "{},{},{:.17e},{:.17e}", c.generation, c.index, c.diameter, c.cost)?;
    }
    Ok(())
}
