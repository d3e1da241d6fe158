//! Numeric series for a run and their CSV rendering.

use std::io::{self, Write};

use nhq_core::correlators::{relative_difference, CorrelationKind};
use nhq_core::tls::{Pauli, Probe};
use num_complex::Complex64;

use crate::config::RunConfig;

/// One output column; `None` marks an undefined sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub label: String,
    pub values: Vec<Option<Complex64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub times: Vec<f64>,
    pub columns: Vec<CorrelationSeries>,
}

fn pair_label(xi: Pauli, chi: Pauli) -> String {
    format!("{}{}", xi.letter(), chi.letter())
}

/// Computes every requested series. Notes about direct integration go to
/// `notes`.
pub fn compute(cfg: &RunConfig, notes: &mut dyn Write) -> nhq_core::Result<Table> {
    let (ham, initial) = cfg.scenario.build()?;
    let times = cfg.times();
    let prop = &cfg.propagation;
    let mut columns = Vec::new();

    if cfg.outputs.averages {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let values = Probe::Average(p).evaluate(&times, &initial, &ham, prop)?;
            columns.push(CorrelationSeries {
                label: format!("s{}", p.letter()),
                values,
            });
        }
    }

    let kind = cfg.outputs.kind;
    let need_both = cfg.outputs.delta_c || cfg.outputs.ratio;
    for &(xi, chi) in &cfg.outputs.pairs {
        let tag = pair_label(xi, chi);
        let probe = |kind| Probe::Correlation { kind, xi, chi };
        let nonlinear = if kind.nonlinear() || need_both {
            let inserted = xi.matrix::<f64>().trace_of_product(initial.matrix());
            if (inserted - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
                let _ = writeln!(
                    notes,
                    "note: c_{tag} uses direct RK4 integration at dt = {} (tr(ξρ₀) = {:.6})",
                    prop.dt, inserted
                );
            }
            Some(probe(CorrelationKind::Nonlinear).evaluate(&times, &initial, &ham, prop)?)
        } else {
            None
        };
        let linear = if kind.linear() || need_both {
            Some(probe(CorrelationKind::Linear).evaluate(&times, &initial, &ham, prop)?)
        } else {
            None
        };

        if kind.nonlinear() {
            columns.push(CorrelationSeries {
                label: format!("c_{tag}"),
                values: nonlinear.clone().unwrap(),
            });
        }
        if kind.linear() {
            columns.push(CorrelationSeries {
                label: format!("cl_{tag}"),
                values: linear.clone().unwrap(),
            });
        }
        if let (Some(c), Some(cl)) = (&nonlinear, &linear) {
            if cfg.outputs.delta_c {
                let values = c
                    .iter()
                    .zip(cl)
                    .map(|(a, b)| relative_difference((*a)?, (*b)?))
                    .collect();
                columns.push(CorrelationSeries {
                    label: format!("dc_{tag}"),
                    values,
                });
            }
            if cfg.outputs.ratio {
                let values = c
                    .iter()
                    .zip(cl)
                    .map(|(a, b)| {
                        let (a, b) = ((*a)?, (*b)?);
                        (b.norm() > 1e-14).then(|| a / b)
                    })
                    .collect();
                columns.push(CorrelationSeries {
                    label: format!("r_{tag}"),
                    values,
                });
            }
        }
    }
    Ok(Table { times, columns })
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".to_string()
    }
}

pub fn write_header(w: &mut dyn Write, prefix: Option<&str>, table: &Table) -> io::Result<()> {
    let mut fields: Vec<String> = prefix.map(String::from).into_iter().collect();
    fields.push("t".into());
    for col in &table.columns {
        for part in ["re", "im", "ok"] {
            fields.push(format!("{}.{part}", col.label));
        }
    }
    writeln!(w, "{}", fields.join(","))
}

/// Data rows; `prefix` adds a leading parameter column.
pub fn write_rows(w: &mut dyn Write, prefix: Option<f64>, table: &Table) -> io::Result<()> {
    for (k, &t) in table.times.iter().enumerate() {
        let mut fields: Vec<String> = prefix.map(num).into_iter().collect();
        fields.push(num(t));
        for col in &table.columns {
            match col.values[k] {
                Some(v) if v.re.is_finite() && v.im.is_finite() => {
                    fields.extend([num(v.re), num(v.im), "1".into()]);
                }
                _ => fields.extend(["nan".into(), "nan".into(), "0".into()]),
            }
        }
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_csv(w: &mut dyn Write, table: &Table) -> io::Result<()> {
    write_header(w, None, table)?;
    write_rows(w, None, table)
}
