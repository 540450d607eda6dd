use crate::energy::{
    multi_energy_at_level, multi_gradient_at_level, single_energy_at_level,
    single_gradient_at_level, EnergyConfig,
};
use crate::imaging::{GrayFrame, Patch};
use crate::optimize::{multi_direction_into, Objective};
use crate::{Result, Vec2};

/// One feature's energy on one pyramid level.
pub(super) struct SingleObjective<'a> {
    pub template: &'a Patch,
    pub frame: &'a GrayFrame,
    pub x_gyro: Option<Vec2>,
    pub scale: f64,
    pub cfg: &'a EnergyConfig,
}

impl Objective for SingleObjective<'_> {
    fn energy(&mut self, p: &[f64]) -> Result<f64> {
        single_energy_at_level(self.template, self.frame, Vec2::new(p[0], p[1]), self.x_gyro, self.scale, self.cfg)
    }

    fn gradient(&mut self, p: &[f64], grad: &mut [f64]) -> Result<()> {
        let g = single_gradient_at_level(
            self.template,
            self.frame,
            Vec2::new(p[0], p[1]),
            self.x_gyro,
            self.scale,
            self.cfg,
        )?;
        grad[0] = g.x;
        grad[1] = g.y;
        Ok(())
    }
}

/// Joint energy of all features on one pyramid level, searched along the
/// blended multi-feature direction.
pub(super) struct MultiObjective<'a> {
    pub templates: &'a [Patch],
    pub frame: &'a GrayFrame,
    pub targets: &'a [Option<Vec2>],
    pub scale: f64,
    pub cfg: &'a EnergyConfig,
}

impl Objective for MultiObjective<'_> {
    fn energy(&mut self, p: &[f64]) -> Result<f64> {
        multi_energy_at_level(self.templates, self.frame, p, self.targets, self.scale, self.cfg, None)
    }

    fn gradient(&mut self, p: &[f64], grad: &mut [f64]) -> Result<()> {
        let g = multi_gradient_at_level(self.templates, self.frame, p, self.targets, self.scale, self.cfg, None)?;
        grad.copy_from_slice(&g);
        Ok(())
    }

    fn direction(&self, grad: &[f64], dir: &mut [f64]) -> bool {
        multi_direction_into(grad, dir)
    }
}
