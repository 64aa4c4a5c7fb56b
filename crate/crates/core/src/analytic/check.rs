//! Closed form against direct quadrature for each SER operation.

use super::{direct, ser_rd_cond_uniform, ser_rd_linear_det, ser_rd_linear_uniform, ser_rd_nl_det, ser_rd_nl_uniform, ser_sr_uniform, Provenance};
use crate::channel::{gamma_gamma_sum_params, Link};
use crate::error::{Error, Result};
use crate::geometry::DistanceModel;
use crate::montecarlo::SystemConfig;

/// The six SER operations with an independent oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SerOp {
    SrUniform,
    RdCondUniform,
    RdLinearUniform,
    RdNlUniform,
    RdLinearDet,
    RdNlDet,
}

impl SerOp {
    pub const ALL: [SerOp; 6] =
        [SerOp::SrUniform, SerOp::RdCondUniform, SerOp::RdLinearUniform, SerOp::RdNlUniform, SerOp::RdLinearDet, SerOp::RdNlDet];

    pub fn name(&self) -> &'static str {
        match self {
            SerOp::SrUniform => "sr_uniform",
            SerOp::RdCondUniform => "rd_cond_uniform",
            SerOp::RdLinearUniform => "rd_linear_uniform",
            SerOp::RdNlUniform => "rd_nl_uniform",
            SerOp::RdLinearDet => "rd_linear_det",
            SerOp::RdNlDet => "rd_nl_det",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPathCheck {
    pub op: SerOp,
    pub ps_db: f64,
    pub closed: f64,
    pub direct: f64,
    pub provenance: Provenance,
}

impl DualPathCheck {
    pub fn rel_err(&self) -> f64 {
        if self.direct == 0.0 {
            self.closed.abs()
        } else {
            ((self.closed - self.direct) / self.direct).abs()
        }
    }
}

/// Evaluates `op` both ways for `config` at `ps_db`.
///
/// `config` must use uniform distances on both hops; the fixed-distance
/// operations put both hops at `d_fixed`. The conditional R→D operation is
/// evaluated at the mean harvested power.
pub fn dual_path(config: &SystemConfig, op: SerOp, ps_db: f64, d_fixed: f64) -> Result<DualPathCheck> {
    let c = SystemConfig { ps_db, ..*config };
    c.validate()?;
    let (DistanceModel::Uniform { lo: f, hi: g }, DistanceModel::Uniform { lo: r, hi: p }) = (c.geom_sr.kind, c.geom_rd.kind) else {
        return Err(Error::Config("dual-path checks need uniform distances on both hops".into()));
    };
    let v = c.geom_sr.v;
    let m = &c.modulation;
    let ybar = c.fading.ybar;
    let p_th = c.eh.p_th;
    let th = gamma_gamma_sum_params(Link::SR, c.eh.mode, &c, &c.fading)?;
    let x = gamma_gamma_sum_params(Link::RD, c.eh.mode, &c, &c.fading)?;
    let l = d_fixed.powf(-v);
    let (closed, direct) = match op {
        SerOp::SrUniform => (ser_sr_uniform(m, &th, f, g, v)?, direct::sr_uniform(m.a, m.b, &th, f, g, v)),
        SerOp::RdCondUniform => {
            let u = x.mean_t * 0.5 * (f.powf(-v) + g.powf(-v));
            (ser_rd_cond_uniform(m, ybar, u, r, p, v)?, direct::rd_cond_uniform(m.a, m.b, ybar, u, r, p, v))
        }
        SerOp::RdLinearUniform => (
            ser_rd_linear_uniform(m, ybar, &x, f, g, r, p, v)?,
            direct::rd_linear_uniform(m.a, m.b, ybar, &x, f, g, r, p, v),
        ),
        SerOp::RdNlUniform => (
            ser_rd_nl_uniform(m, ybar, &x, f, g, r, p, v, p_th, c.chi)?,
            direct::rd_nl_uniform(m.a, m.b, ybar, &x, f, g, r, p, v, p_th),
        ),
        SerOp::RdLinearDet => (ser_rd_linear_det(m, ybar, &x, l, l)?, direct::rd_linear_det(m.a, m.b, ybar, &x, l, l)),
        SerOp::RdNlDet => (ser_rd_nl_det(m, ybar, &x, l, l, p_th, c.chi)?, direct::rd_nl_det(m.a, m.b, ybar, &x, l, l, p_th)),
    };
    Ok(DualPathCheck { op, ps_db, closed: closed.value, direct, provenance: closed.provenance })
}
