use std::collections::HashMap;
use std::time::Instant;

use super::{decode_emd, hamming, DecodeReport, DecoderKind, DecoderParams, FallbackPolicy, RunStatus, WindowRecord, WindowStatus};
use crate::error::{Error, Result};
use crate::gf2codes::ConvCodeSpec;
use crate::ipmodel::{VarRole, Variant, WindowStructure};
use crate::milp::{solve_bnb_with, WarmStart, INT_TOL};
use crate::windecode::geometry::{StreamingCode, TerminatedCode, WindowPosition, WindowedCode};

/// Checks the window height and the received length against the code.
pub(crate) fn validate(code: &dyn WindowedCode, received: &[u8], w: usize) -> Result<()> {
    if received.len() != code.n_cols() {
        return Err(Error::DimensionMismatch { expected: code.n_cols(), actual: received.len() });
    }
    let g = code.geometry();
    if w < g.m_s {
        return Err(Error::InvalidParameter(format!("window height {w} is below the ribbon width {}", g.m_s)));
    }
    if g.h_s == 0 || g.v_s == 0 {
        return Err(Error::InvalidParameter("window steps must be positive".into()));
    }
    Ok(())
}

/// Window structures keyed by `iteration mod period`.
///
/// Only windows whose rows all lie past the first block row and that are not
/// the final window repeat; everything else is built fresh.
#[derive(Debug, Default)]
pub struct WindowStructureCache {
    entries: HashMap<usize, WindowStructure>,
    pub hits: usize,
}

impl WindowStructureCache {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn get_or_build(
        &mut self,
        code: &dyn WindowedCode,
        pos: &WindowPosition,
        variant: Variant,
        fixed: &[Option<u8>],
    ) -> Result<WindowStructure> {
        let g = code.geometry();
        if pos.is_final || pos.top < g.m {
            return WindowStructure::build(code, pos, variant, fixed);
        }
        let key = pos.iteration % g.period();
        if let Some(s) = self.entries.get(&key) {
            self.hits += 1;
            return Ok(s.clone());
        }
        let s = WindowStructure::build(code, pos, variant, fixed)?;
        self.entries.insert(key, s.clone());
        Ok(s)
    }
}

/// Runs the sliding-window relax-and-fix loop over `code`.
///
/// `params.decoder` picks the width rule (CW or finite) and whether window
/// structures are reused (RW). CC is FW over a [`StreamingCode`].
pub fn decode_sliding(code: &dyn WindowedCode, received: &[u8], params: &DecoderParams) -> Result<DecodeReport> {
    if params.decoder == DecoderKind::EMD {
        return Err(Error::InvalidParameter("EMD is not a sliding-window decoder".into()));
    }
    validate(code, received, params.w)?;
    let start = Instant::now();
    let g = code.geometry();
    let (n_rows, n_cols) = (code.n_rows(), code.n_cols());
    let rule = params.decoder.width_rule();
    let mut fixed: Vec<Option<u8>> = vec![None; n_cols];
    let mut cache = (params.decoder == DecoderKind::RW).then(WindowStructureCache::default);
    let mut previous: Vec<Option<u8>> = vec![None; n_cols];
    let mut records = Vec::new();
    let mut nodes = 0;
    let mut slack = 0.0;

    let mut it = 0;
    loop {
        let pos = WindowPosition::at(it, params.w, g, n_rows, n_cols, rule);
        let leaving = if pos.is_final { pos.width } else { g.h_s.min(pos.width) };
        let structure = match cache.as_mut() {
            Some(c) => c.get_or_build(code, &pos, params.variant, &fixed)?,
            None => WindowStructure::build(code, &pos, params.variant, &fixed)?,
        };
        let mut record =
            WindowRecord { position: pos, status: WindowStatus::NoIncumbent, nodes: 0, objective: None, dual_bound: None, fallback: false };
        let solution = match structure.instantiate(received, &pos, &fixed) {
            Err(Error::InfeasibleFold { .. }) => {
                record.status = WindowStatus::InfeasibleFold;
                None
            }
            Err(e) => return Err(e),
            Ok(model) => {
                let warm = (params.variant == Variant::AllBinary)
                    .then(|| WarmStart { f: model.f_vars.iter().map(|v| previous[v.bit]).collect() });
                let out = if pos.is_final {
                    solve_bnb_with(&model, &params.window_budget, warm.as_ref(), None)?
                } else {
                    let e = flip_penalties(leaving);
                    let penalty: Vec<f64> = model
                        .f_vars
                        .iter()
                        .map(|v| if v.bit < pos.left + leaving { e[v.bit - pos.left] } else { 0.0 })
                        .collect();
                    solve_bnb_with(&model, &params.window_budget, warm.as_ref(), Some(&penalty))?
                };
                nodes += out.nodes;
                record.status = out.status.into();
                record.nodes = out.nodes;
                record.objective = out.objective;
                record.dual_bound = out.dual_bound.is_finite().then_some(out.dual_bound);
                if let (Some(z), Some(b)) = (record.objective, record.dual_bound) {
                    slack += (z - b).max(0.0);
                }
                out.incumbent.map(|a| (model, a))
            }
        };
        previous.iter_mut().for_each(|v| *v = None);
        match solution {
            Some((model, a)) => {
                for (i, v) in model.f_vars.iter().enumerate() {
                    let x = a.f[i];
                    if v.role == VarRole::Binary {
                        previous[v.bit] = Some(u8::from(x > 0.5));
                    }
                    if v.bit < pos.left + leaving {
                        debug_assert!((x - x.round()).abs() <= INT_TOL, "leaving bit {} is fractional: {x}", v.bit);
                        fixed[v.bit] = Some(u8::from(x > 0.5));
                    }
                }
            }
            None => {
                if params.fallback_policy == FallbackPolicy::Abort {
                    return Err(match record.status {
                        WindowStatus::NoIncumbent => Error::WindowNoIncumbent { iteration: it },
                        _ => Error::RelaxAndFixInfeasible { iteration: it },
                    });
                }
                record.fallback = true;
                for bit in pos.left..pos.left + leaving {
                    fixed[bit] = Some(received[bit]);
                }
            }
        }
        records.push(record);
        if pos.is_final {
            break;
        }
        it += 1;
    }

    let decoded: Vec<u8> = fixed.iter().map(|v| v.expect("every bit is fixed by the final window")).collect();
    Ok(finish_report(params.label(), code, received, decoded, records, nodes, Some(slack), start))
}

/// Tie-break among equally near window solutions, applied to the leaving
/// bits only: flipping one costs slightly more the further left it sits, so
/// flips are deferred to later windows whenever the distance allows it. The
/// penalties sum to 1/4.
pub(crate) fn flip_penalties(width: usize) -> Vec<f64> {
    let w = width as f64;
    (0..width).map(|i| 0.5 * (w - i as f64) / (w * (w + 1.0))).collect()
}

pub(crate) fn finish_report(
    label: String,
    code: &dyn WindowedCode,
    received: &[u8],
    decoded: Vec<u8>,
    records: Vec<WindowRecord>,
    nodes: u64,
    slack: Option<f64>,
    start: Instant,
) -> DecodeReport {
    let feasible = (0..code.n_rows()).all(|row| code.row_support(row).iter().map(|&c| decoded[c] as usize).sum::<usize>() % 2 == 0);
    let objective_z = hamming(&decoded, received);
    let fallback_activations = records.iter().filter(|r| r.fallback).count();
    let windows_solved = records.iter().filter(|r| !r.fallback).count();
    let windows_suboptimal = records.iter().filter(|r| r.status == WindowStatus::Feasible).count();
    DecodeReport {
        label,
        decoded,
        objective_z,
        feasible,
        elapsed: start.elapsed(),
        windows_solved,
        windows_suboptimal,
        per_window_status: records,
        fallback_activations,
        status: if fallback_activations == 0 { RunStatus::Solved } else { RunStatus::Fallback },
        dual_bound: slack.map(|s| objective_z as f64 - s),
        nodes,
    }
}

/// Decodes with any decoder kind straight from a code description.
///
/// CC reads the code through its entry function; the other decoders work on
/// the assembled terminated matrix, so `spec.t` must be set for them.
pub fn decode_conv(spec: &ConvCodeSpec, received: &[u8], params: &DecoderParams) -> Result<DecodeReport> {
    if params.decoder == DecoderKind::CC {
        let code = StreamingCode::new(spec, received.len())?;
        return decode_sliding(&code, received, params);
    }
    let t = spec
        .t
        .ok_or_else(|| Error::InvalidParameter(format!("{} needs a terminated code", params.decoder)))?;
    let code = TerminatedCode::new(spec, t)?;
    match params.decoder {
        DecoderKind::EMD => decode_emd(&code.h, received, &params.total_budget.unwrap_or_default()),
        _ => decode_sliding(&code, received, params),
    }
}
