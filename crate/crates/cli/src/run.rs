//! Evaluation of a scenario on its grid and CSV output.

use std::fmt::Write as _;

use modent_core::cavity1d::{self, InitialState};
use modent_core::cavity3d::{self, Cavity3DParams, Regime};
use modent_core::{Error as CoreError, MeasureSet};

use crate::config::{Axis, Measure, Model, ModelParams, ScenarioConfig, StateKind};
use crate::error::CliError;

/// Named columns sampled on a grid; the first column is `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSeries {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl MeasureSeries {
    /// Values of the column called `name`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// RFC 4180 CSV with `\r\n` line ends and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push_str("\r\n");
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v:.16e}").expect("writing to a String cannot fail");
            }
            out.push_str("\r\n");
        }
        out
    }
}

struct Column {
    name: String,
    values: Vec<f64>,
}

fn entanglement_value(m: &MeasureSet, measure: Measure) -> f64 {
    match measure {
        Measure::Y => m.y,
        Measure::Ytilde => m.y_tilde,
        Measure::Y2 => m.y * m.y,
        Measure::Ltilde => m.l_tilde,
        Measure::K2 => m.k2,
        Measure::Z => m.z,
        Measure::Ic => m.i_c,
        Measure::Jc => m.j_c,
        Measure::E1 | Measure::E3 | Measure::Nbar => unreachable!("not an entanglement measure"),
    }
}

fn is_entanglement(m: Measure) -> bool {
    !matches!(m, Measure::E1 | Measure::E3 | Measure::Nbar)
}

fn pair_suffix(pairs: &[(i64, i64)], (r, s): (i64, i64)) -> String {
    if pairs.len() > 1 {
        format!("_{r}_{s}")
    } else {
        String::new()
    }
}

/// Evaluates every configured measure on the grid.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<MeasureSeries, CliError> {
    let grid = cfg.tau_grid.values();
    let taus: Vec<f64> = match cfg.tau_grid.axis {
        Axis::Tau => grid.clone(),
        Axis::Kappa => grid.iter().map(|k| 0.5 * k.atanh()).collect(),
    };
    let context =
        |source: CoreError| CliError::Model { scenario: format!("{} ({})", cfg.scenario, cfg.model.name()), source };
    let columns = match &cfg.params {
        ModelParams::Cavity3D { nu, thetas } => {
            let regime = if cfg.model == Model::Cavity3DSymmetric { Regime::Symmetric } else { Regime::Asymmetric };
            columns_3d(cfg, *nu, thetas, regime, &taus).map_err(context)?
        }
        ModelParams::Cavity1DP2 { pairs } => columns_p2(cfg, pairs, &taus).map_err(context)?,
        ModelParams::Cavity1DP1 { pairs, states } => columns_p1(cfg, pairs, states, &taus).map_err(context)?,
    };

    let mut header = vec!["tau".to_string()];
    if cfg.tau_grid.axis == Axis::Kappa {
        header.push("kappa".into());
    }
    header.extend(columns.iter().map(|c| c.name.clone()));
    let rows = (0..taus.len())
        .map(|i| {
            let mut row = vec![taus[i]];
            if cfg.tau_grid.axis == Axis::Kappa {
                row.push(grid[i]);
            }
            row.extend(columns.iter().map(|c| c.values[i]));
            row
        })
        .collect();
    Ok(MeasureSeries { header, rows })
}

fn columns_3d(
    cfg: &ScenarioConfig,
    nu: f64,
    thetas: &[(f64, f64)],
    regime: Regime,
    taus: &[f64],
) -> Result<Vec<Column>, CoreError> {
    let mut curves = Vec::new();
    for &(t1, t3) in thetas {
        let p = Cavity3DParams::new(nu, t1, t3, regime)?;
        let mut ms = Vec::with_capacity(taus.len());
        let mut es = Vec::with_capacity(taus.len());
        for &tau in taus {
            ms.push(cavity3d::entanglement(&p, tau)?);
            es.push(cavity3d::energies(&p, tau)?);
        }
        let suffix = if thetas.len() > 1 { format!("_theta1_{t1}_theta3_{t3}") } else { String::new() };
        curves.push((suffix, ms, es));
    }
    let mut cols = Vec::new();
    for &m in &cfg.measures {
        for (suffix, ms, es) in &curves {
            let mut push = |name: String, values: Vec<f64>| cols.push(Column { name, values });
            match m {
                Measure::E1 => push(format!("E1{suffix}"), es.iter().map(|e| e.0).collect()),
                Measure::E3 => push(format!("E3{suffix}"), es.iter().map(|e| e.1).collect()),
                Measure::Nbar => {
                    push(format!("nbar_1{suffix}"), es.iter().map(|e| e.0 - 0.5).collect());
                    push(format!("nbar_3{suffix}"), es.iter().map(|e| e.1 - 0.5).collect());
                }
                _ => push(format!("{}{suffix}", m.name()), ms.iter().map(|x| entanglement_value(x, m)).collect()),
            }
        }
    }
    Ok(cols)
}

/// Distinct modes of `pairs` in order of first appearance.
fn modes_of(pairs: &[(i64, i64)]) -> Vec<i64> {
    let mut modes = Vec::new();
    for &(r, s) in pairs {
        for m in [r, s] {
            if !modes.contains(&m) {
                modes.push(m);
            }
        }
    }
    modes
}

fn columns_p2(cfg: &ScenarioConfig, pairs: &[(i64, i64)], taus: &[f64]) -> Result<Vec<Column>, CoreError> {
    let needs_measures = cfg.measures.iter().any(|&m| is_entanglement(m));
    let mut per_pair = Vec::new();
    for &(r, s) in pairs {
        let ms = if needs_measures { cavity1d::p2_entanglement_path(r, s, taus)? } else { Vec::new() };
        per_pair.push(((r, s), ms));
    }
    let photons = |m: i64| -> Result<Vec<f64>, CoreError> {
        let partner = if m == 1 { 3 } else { 1 };
        Ok(cavity1d::p2_moments_path(m, partner, taus)?.iter().map(|pm| pm.moments.n_r).collect())
    };
    let mut cols = Vec::new();
    for &m in &cfg.measures {
        match m {
            Measure::E1 | Measure::E3 => {
                let mode = if m == Measure::E1 { 1 } else { 3 };
                let values = photons(mode)?.into_iter().map(|n| n + 0.5).collect();
                cols.push(Column { name: m.name().into(), values });
            }
            Measure::Nbar => {
                for mode in modes_of(pairs) {
                    cols.push(Column { name: format!("nbar_{mode}"), values: photons(mode)? });
                }
            }
            _ => {
                for (pair, ms) in &per_pair {
                    cols.push(Column {
                        name: format!("{}{}", m.name(), pair_suffix(pairs, *pair)),
                        values: ms.iter().map(|x| entanglement_value(x, m)).collect(),
                    });
                }
            }
        }
    }
    Ok(cols)
}

fn columns_p1(
    cfg: &ScenarioConfig,
    pairs: &[(i64, i64)],
    states: &[(StateKind, f64)],
    taus: &[f64],
) -> Result<Vec<Column>, CoreError> {
    let initial: Vec<(String, InitialState)> = states
        .iter()
        .map(|&(kind, nu1)| {
            let suffix = if states.len() > 1 { format!("_{}_nu1_{nu1}", kind.name()) } else { String::new() };
            let state = kind.with_photons(nu1).map_err(|e| CoreError::Domain { op: "initial state", detail: e })?;
            Ok((suffix, state))
        })
        .collect::<Result<_, CoreError>>()?;
    let needs_measures = cfg.measures.iter().any(|&m| is_entanglement(m));
    let mut entangled = Vec::new();
    for (_, state) in &initial {
        let mut per_pair = Vec::new();
        for &(r, s) in pairs {
            let ms = if needs_measures {
                taus.iter()
                    .map(|&tau| Ok(cavity1d::p1_entanglement(state, r, s, tau)?.measures))
                    .collect::<Result<Vec<_>, CoreError>>()?
            } else {
                Vec::new()
            };
            per_pair.push(ms);
        }
        entangled.push(per_pair);
    }
    let photons = |state: &InitialState, mode: i64| -> Result<Vec<f64>, CoreError> {
        taus.iter().map(|&tau| cavity1d::p1_mean_photons(state, mode, tau)).collect()
    };
    let mut cols = Vec::new();
    for &m in &cfg.measures {
        for (ci, (suffix, state)) in initial.iter().enumerate() {
            match m {
                Measure::E1 | Measure::E3 => {
                    let mode = if m == Measure::E1 { 1 } else { 3 };
                    let values = photons(state, mode)?.into_iter().map(|n| n + 0.5).collect();
                    cols.push(Column { name: format!("{}{suffix}", m.name()), values });
                }
                Measure::Nbar => {
                    for mode in modes_of(pairs) {
                        cols.push(Column { name: format!("nbar_{mode}{suffix}"), values: photons(state, mode)? });
                    }
                }
                _ => {
                    for (pi, &pair) in pairs.iter().enumerate() {
                        cols.push(Column {
                            name: format!("{}{}{suffix}", m.name(), pair_suffix(pairs, pair)),
                            values: entangled[ci][pi].iter().map(|x| entanglement_value(x, m)).collect(),
                        });
                    }
                }
            }
        }
    }
    Ok(cols)
}

/// Runs `cfg` and writes the CSV to `out`, to the configured path, or returns
/// it when neither is set.
pub fn run_to_output(cfg: &ScenarioConfig, out: Option<&str>) -> Result<Option<String>, CliError> {
    let csv = run_scenario(cfg)?.to_csv();
    match out.or(cfg.output_path.as_deref()) {
        Some(path) => {
            std::fs::write(path, csv).map_err(|source| CliError::Io { path: path.to_string(), source })?;
            Ok(None)
        }
        None => Ok(Some(csv)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::validate_config;

    fn run(text: &str) -> MeasureSeries {
        run_scenario(&validate_config(text).unwrap()).unwrap()
    }

    #[test]
    fn csv_uses_crlf_and_round_trips() {
        let s =
            MeasureSeries { header: vec!["tau".into(), "Y".into()], rows: vec![vec![0.0, 0.1], vec![1.0, 1.0 / 3.0]] };
        let csv = s.to_csv();
        assert!(csv.starts_with("tau,Y\r\n0.0000000000000000e0,1.0000000000000001e-1\r\n"));
        let last: f64 = csv.trim_end().rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(last, 1.0 / 3.0);
    }

    #[test]
    fn columns_follow_measure_then_curve_then_pair() {
        let s = run(
            "model = cavity1d-p1\nend = 1\npoints = 3\npairs = 1-2, 1-3\nstate = fock, squeezed\nmeasures = Y, nbar",
        );
        let expect = [
            "tau",
            "Y_1_2_fock_nu1_1",
            "Y_1_3_fock_nu1_1",
            "Y_1_2_squeezed_nu1_1",
            "Y_1_3_squeezed_nu1_1",
            "nbar_1_fock_nu1_1",
            "nbar_2_fock_nu1_1",
            "nbar_3_fock_nu1_1",
            "nbar_1_squeezed_nu1_1",
            "nbar_2_squeezed_nu1_1",
            "nbar_3_squeezed_nu1_1",
        ];
        assert_eq!(s.header, expect);
        assert_eq!(s.rows.len(), 3);
    }

    #[test]
    fn kappa_grid_maps_to_tau() {
        let s = run("model = cavity1d-p2\ngrid = kappa\nend = 0.5\npoints = 2\nmeasures = E1, E3");
        assert_eq!(s.header, ["tau", "kappa", "E1", "E3"]);
        assert_eq!(s.rows[1][0], 0.5 * 0.5f64.atanh());
        assert_eq!(s.rows[0][2..], [0.5, 0.5]);
        assert!(s.rows[1][2] > 0.5 && s.rows[1][3] > 0.5);
    }

    #[test]
    fn three_d_energies_and_photons_agree() {
        let s = run("model = cavity3d-symmetric\nnu = 5\ntheta1 = 1, 3\ntheta3 = 1, 2\nend = 1\npoints = 5\nmeasures = E1, nbar");
        let e1 = s.column("E1_theta1_3_theta3_2").unwrap();
        let n1 = s.column("nbar_1_theta1_3_theta3_2").unwrap();
        assert!(e1.iter().zip(&n1).all(|(e, n)| (e - n - 0.5).abs() < 1e-15));
        assert_eq!(e1[0], 1.5);
    }

    #[test]
    fn model_errors_name_the_scenario() {
        let cfg = validate_config("model = cavity1d-p1\nend = 1\nstate = odd\nnu1 = 1\nmeasures = Y").unwrap();
        assert!(run_scenario(&cfg).is_ok());
        let mut cfg = validate_config("scenario = fig6").unwrap();
        cfg.tau_grid.end = 1.0;
        match run_scenario(&cfg) {
            Err(CliError::Model { scenario, .. }) => assert_eq!(scenario, "fig6 (cavity1d-p2)"),
            other => panic!("{other:?}"),
        }
    }
}
