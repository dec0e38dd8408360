//! MATPOWER case files.
//!
//! Only the `baseMVA`, `bus` and `branch` sections are read. Everything else
//! in the file (generators, costs, comments, cell arrays) is skipped.
//!
//! Column conventions follow MATPOWER:
//!
//! ```text
//! bus:    bus_i type Pd Qd Gs Bs area Vm Va baseKV zone Vmax Vmin
//! branch: fbus tbus r x b rateA rateB rateC ratio angle status angmin angmax
//! ```
//!
//! Trailing columns beyond the ones used here are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BusKind {
    PQ,
    PV,
    Slack,
}

impl BusKind {
    fn from_code(code: i64) -> Option<Self> {
        match code {
            1 => Some(BusKind::PQ),
            2 => Some(BusKind::PV),
            3 => Some(BusKind::Slack),
            _ => None,
        }
    }

    fn code(self) -> i64 {
        match self {
            BusKind::PQ => 1,
            BusKind::PV => 2,
            BusKind::Slack => 3,
        }
    }
}

/// One row of the bus matrix.
///
/// `g_shunt` and `b_shunt` keep the file's units (MW and MVAr consumed at
/// 1 p.u. voltage); [`PowerCase::shunt_pu`] converts them to the system base.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bus {
    pub id: i64,
    pub kind: BusKind,
    pub p_demand: f64,
    pub q_demand: f64,
    pub g_shunt: f64,
    pub b_shunt: f64,
    pub v_mag: f64,
    /// Degrees.
    pub v_ang: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub from_bus: i64,
    pub to_bus: i64,
    pub r: f64,
    pub x: f64,
    pub b_charging: f64,
    /// Off-nominal turns ratio; 0 means unity.
    pub tap: f64,
    /// Phase shift in degrees.
    pub shift: f64,
    pub in_service: bool,
}

impl Branch {
    /// Turns ratio with the MATPOWER "0 means 1" convention applied.
    pub fn ratio(&self) -> f64 {
        if self.tap == 0.0 {
            1.0
        } else {
            self.tap
        }
    }
}

/// A parsed and structurally validated network.
///
/// Buses keep file order; internal indices are positions in `buses()`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerCase {
    name: String,
    base_mva: f64,
    buses: Vec<Bus>,
    branches: Vec<Branch>,
    slack_index: usize,
    #[serde(skip)]
    index: BTreeMap<i64, usize>,
}

impl PowerCase {
    /// Builds a case and checks its structural invariants: at least two buses,
    /// unique bus labels, branch endpoints that exist and differ, exactly one
    /// slack bus, positive voltage magnitudes and at least one in-service
    /// branch.
    pub fn new(
        name: impl Into<String>,
        base_mva: f64,
        buses: Vec<Bus>,
        branches: Vec<Branch>,
    ) -> Result<Self> {
        if base_mva.is_nan() || base_mva <= 0.0 {
            return Err(Error::Validation(format!(
                "baseMVA must be positive, got {base_mva}"
            )));
        }
        if buses.len() < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 buses, got {}",
                buses.len()
            )));
        }
        let mut index = BTreeMap::new();
        for (i, bus) in buses.iter().enumerate() {
            if index.insert(bus.id, i).is_some() {
                return Err(Error::Validation(format!("duplicate bus id {}", bus.id)));
            }
            if bus.v_mag.is_nan() || bus.v_mag <= 0.0 {
                return Err(Error::Validation(format!(
                    "bus {} has non-positive voltage magnitude {}",
                    bus.id, bus.v_mag
                )));
            }
        }
        let slacks: Vec<usize> = buses
            .iter()
            .enumerate()
            .filter(|(_, b)| b.kind == BusKind::Slack)
            .map(|(i, _)| i)
            .collect();
        let slack_index = match slacks.as_slice() {
            [only] => *only,
            [] => return Err(Error::Validation("no slack bus".into())),
            many => {
                let ids: Vec<String> = many.iter().map(|&i| buses[i].id.to_string()).collect();
                return Err(Error::Validation(format!(
                    "multiple slack buses: {}",
                    ids.join(", ")
                )));
            }
        };
        for (k, br) in branches.iter().enumerate() {
            for end in [br.from_bus, br.to_bus] {
                if !index.contains_key(&end) {
                    return Err(Error::Validation(format!(
                        "branch {} references unknown bus {}",
                        k + 1,
                        end
                    )));
                }
            }
            if br.from_bus == br.to_bus {
                return Err(Error::Validation(format!(
                    "branch {} connects bus {} to itself",
                    k + 1,
                    br.from_bus
                )));
            }
        }
        if !branches.iter().any(|b| b.in_service) {
            return Err(Error::Validation("no in-service branches".into()));
        }
        Ok(Self {
            name: name.into(),
            base_mva,
            buses,
            branches,
            slack_index,
            index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base_mva(&self) -> f64 {
        self.base_mva
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn slack_index(&self) -> usize {
        self.slack_index
    }

    /// N.
    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    /// M: in-service branches, parallel branches counted separately.
    pub fn branch_count(&self) -> usize {
        self.in_service_branches().count()
    }

    pub fn in_service_branches(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| b.in_service)
    }

    /// Internal index of an external bus label.
    pub fn bus_index(&self, id: i64) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn bus_label(&self, index: usize) -> i64 {
        self.buses[index].id
    }

    /// Internal (from, to) indices of a branch.
    pub fn endpoints(&self, branch: &Branch) -> (usize, usize) {
        (self.index[&branch.from_bus], self.index[&branch.to_bus])
    }

    /// Bus shunt admittance on the system base.
    pub fn shunt_pu(&self, index: usize) -> (f64, f64) {
        let bus = &self.buses[index];
        (bus.g_shunt / self.base_mva, bus.b_shunt / self.base_mva)
    }

    /// Writes the case back out as MATPOWER text. Columns this crate does not
    /// model are filled with neutral defaults.
    pub fn to_matpower(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "function mpc = {}", self.name);
        let _ = writeln!(out, "mpc.version = '2';");
        let _ = writeln!(out, "mpc.baseMVA = {};", self.base_mva);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "%% bus_i type Pd Qd Gs Bs area Vm Va baseKV zone Vmax Vmin"
        );
        let _ = writeln!(out, "mpc.bus = [");
        for b in &self.buses {
            let _ = writeln!(
                out,
                "\t{}\t{}\t{}\t{}\t{}\t{}\t1\t{}\t{}\t0\t1\t1.1\t0.9;",
                b.id,
                b.kind.code(),
                b.p_demand,
                b.q_demand,
                b.g_shunt,
                b.b_shunt,
                b.v_mag,
                b.v_ang
            );
        }
        let _ = writeln!(out, "];");
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "%% fbus tbus r x b rateA rateB rateC ratio angle status angmin angmax"
        );
        let _ = writeln!(out, "mpc.branch = [");
        for br in &self.branches {
            let _ = writeln!(
                out,
                "\t{}\t{}\t{}\t{}\t{}\t0\t0\t0\t{}\t{}\t{}\t-360\t360;",
                br.from_bus,
                br.to_bus,
                br.r,
                br.x,
                br.b_charging,
                br.tap,
                br.shift,
                u8::from(br.in_service)
            );
        }
        let _ = writeln!(out, "];");
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CaseWarning {
    /// `branch` is the 1-based row in the branch matrix.
    NegativeReactance {
        branch: usize,
        from_bus: i64,
        to_bus: i64,
        x: f64,
    },
    OutOfService {
        count: usize,
    },
    IsolatedBus {
        bus: i64,
    },
}

impl std::fmt::Display for CaseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseWarning::NegativeReactance {
                branch,
                from_bus,
                to_bus,
                x,
            } => write!(
                f,
                "branch {branch} ({from_bus}-{to_bus}) has negative series reactance x = {x}"
            ),
            CaseWarning::OutOfService { count } => {
                write!(
                    f,
                    "{count} out-of-service branch(es) excluded from all matrices"
                )
            }
            CaseWarning::IsolatedBus { bus } => write!(f, "bus {bus} has no in-service branch"),
        }
    }
}

pub fn validate_case(case: &PowerCase) -> Vec<CaseWarning> {
    let mut warnings = Vec::new();
    for (k, br) in case.branches().iter().enumerate() {
        if br.in_service && br.x < 0.0 {
            warnings.push(CaseWarning::NegativeReactance {
                branch: k + 1,
                from_bus: br.from_bus,
                to_bus: br.to_bus,
                x: br.x,
            });
        }
    }
    let out = case.branches().iter().filter(|b| !b.in_service).count();
    if out > 0 {
        warnings.push(CaseWarning::OutOfService { count: out });
    }
    let mut touched = vec![false; case.bus_count()];
    for br in case.in_service_branches() {
        let (f, t) = case.endpoints(br);
        touched[f] = true;
        touched[t] = true;
    }
    for (i, seen) in touched.iter().enumerate() {
        if !seen {
            warnings.push(CaseWarning::IsolatedBus {
                bus: case.bus_label(i),
            });
        }
    }
    warnings
}

struct Matrix {
    rows: Vec<(usize, Vec<f64>)>,
}

enum Section {
    Bus,
    Branch,
    Skip,
}

/// Parses MATPOWER case text. `fallback_name` is used when the text has no
/// `function mpc = <name>` line.
pub fn parse_case_named(text: &str, fallback_name: &str) -> Result<PowerCase> {
    let mut name: Option<String> = None;
    let mut base_mva: Option<f64> = None;
    let mut bus: Option<Matrix> = None;
    let mut branch: Option<Matrix> = None;
    let mut open: Option<(Section, Matrix, usize)> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }

        if let Some((section, mut matrix, start)) = open.take() {
            let (body, closed) = match line.find(']') {
                Some(pos) => (&line[..pos], true),
                None => (line, false),
            };
            if !matches!(section, Section::Skip) {
                push_rows(&mut matrix, body, lineno)?;
            }
            if closed {
                match section {
                    Section::Bus => bus = Some(matrix),
                    Section::Branch => branch = Some(matrix),
                    Section::Skip => {}
                }
            } else {
                open = Some((section, matrix, start));
            }
            continue;
        }

        if name.is_none() {
            if let Some(rest) = line.strip_prefix("function") {
                if let Some((_, n)) = rest.split_once('=') {
                    name = Some(n.trim().trim_end_matches(';').trim().to_string());
                }
                continue;
            }
        }

        let Some((lhs, rhs)) = line.split_once('=') else {
            continue;
        };
        let key = lhs.trim();
        let key = key.strip_prefix("mpc.").unwrap_or(key);
        let rhs = rhs.trim();

        if let Some(body) = rhs.strip_prefix('[') {
            let section = match key {
                "bus" => Section::Bus,
                "branch" => Section::Branch,
                _ => Section::Skip,
            };
            let mut matrix = Matrix { rows: Vec::new() };
            let (body, closed) = match body.find(']') {
                Some(pos) => (&body[..pos], true),
                None => (body, false),
            };
            if !matches!(section, Section::Skip) {
                push_rows(&mut matrix, body, lineno)?;
            }
            if closed {
                match section {
                    Section::Bus => bus = Some(matrix),
                    Section::Branch => branch = Some(matrix),
                    Section::Skip => {}
                }
            } else {
                open = Some((section, matrix, lineno));
            }
        } else if key == "baseMVA" {
            let value = rhs.trim_end_matches(';').trim();
            base_mva = Some(value.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid baseMVA value `{value}`"),
            })?);
        }
    }

    if let Some((_, _, start)) = open {
        return Err(Error::Parse {
            line: start,
            message: "matrix opened here is never closed with `]`".into(),
        });
    }
    let missing = |what: &str| Error::Parse {
        line: last_line,
        message: format!("missing `{what}` section"),
    };
    let base_mva = base_mva.ok_or_else(|| missing("baseMVA"))?;
    let bus = bus.ok_or_else(|| missing("bus"))?;
    let branch = branch.ok_or_else(|| missing("branch"))?;

    let mut buses = Vec::with_capacity(bus.rows.len());
    for (line, row) in &bus.rows {
        buses.push(bus_from_row(row, *line)?);
    }
    let mut branches = Vec::with_capacity(branch.rows.len());
    for (line, row) in &branch.rows {
        let br = branch_from_row(row, *line)?;
        if br.in_service && br.r == 0.0 && br.x == 0.0 {
            return Err(Error::Validation(format!(
                "in-service branch {}-{} at line {} has r = x = 0",
                br.from_bus, br.to_bus, line
            )));
        }
        branches.push(br);
    }

    let name = name.unwrap_or_else(|| fallback_name.to_string());
    PowerCase::new(name, base_mva, buses, branches)
}

pub fn parse_case(text: &str) -> Result<PowerCase> {
    parse_case_named(text, "case")
}

/// Reads and parses a case file; the file stem names the case when the text
/// does not.
pub fn load_case(path: &std::path::Path) -> Result<PowerCase> {
    let text = std::fs::read_to_string(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("case");
    parse_case_named(&text, stem)
}

fn strip_comment(line: &str) -> &str {
    match line.find('%') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn push_rows(matrix: &mut Matrix, body: &str, line: usize) -> Result<()> {
    for chunk in body.split(';') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let row = chunk
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                parse_number(t).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("invalid number `{t}`"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        matrix.rows.push((line, row));
    }
    Ok(())
}

fn parse_number(token: &str) -> Option<f64> {
    match token {
        "Inf" | "inf" => Some(f64::INFINITY),
        "-Inf" | "-inf" => Some(f64::NEG_INFINITY),
        _ => token.parse().ok(),
    }
}

fn integer(value: f64, what: &str, line: usize) -> Result<i64> {
    if value.fract() != 0.0 || !value.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("{what} must be an integer, got {value}"),
        });
    }
    Ok(value as i64)
}

fn need_columns(row: &[f64], n: usize, what: &str, line: usize) -> Result<()> {
    if row.len() < n {
        return Err(Error::Parse {
            line,
            message: format!("{what} row has {} columns, need at least {n}", row.len()),
        });
    }
    Ok(())
}

fn bus_from_row(row: &[f64], line: usize) -> Result<Bus> {
    need_columns(row, 9, "bus", line)?;
    let code = integer(row[1], "bus type", line)?;
    let kind = BusKind::from_code(code).ok_or_else(|| Error::Parse {
        line,
        message: format!("unsupported bus type {code}"),
    })?;
    Ok(Bus {
        id: integer(row[0], "bus id", line)?,
        kind,
        p_demand: row[2],
        q_demand: row[3],
        g_shunt: row[4],
        b_shunt: row[5],
        v_mag: row[7],
        v_ang: row[8],
    })
}

fn branch_from_row(row: &[f64], line: usize) -> Result<Branch> {
    need_columns(row, 11, "branch", line)?;
    Ok(Branch {
        from_bus: integer(row[0], "from bus", line)?,
        to_bus: integer(row[1], "to bus", line)?,
        r: row[2],
        x: row[3],
        b_charging: row[4],
        tap: row[8],
        shift: row[9],
        in_service: row[10] != 0.0,
    })
}
