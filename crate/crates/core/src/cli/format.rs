//! JSON model, query and result documents.

use std::collections::BTreeMap;
use std::io;

use indexmap::IndexMap;
use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::credal::{validate_model, CredalRow, Gamble, ImpreciseMarkovChain, Pmf, StateSpace};
use crate::inference::{
    spec_hitting_probability, spec_hitting_time, spec_product, spec_single_instant, spec_sum, spec_time_average,
    LimitFamily,
};
use crate::recursion::{RecursiveSpec, Step};

/// A credal set as written in model files.
#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowObject {
    Intervals { lower: Vec<f64>, upper: Vec<f64> },
    Vertices(Vec<Vec<f64>>),
    Constraints {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
}

impl RowObject {
    fn to_row(&self) -> CredalRow {
        match self {
            RowObject::Intervals { lower, upper } => CredalRow::Intervals { lower: lower.clone(), upper: upper.clone() },
            RowObject::Vertices(vs) => CredalRow::Vertices(vs.iter().map(|v| Pmf::new_unchecked(v.clone())).collect()),
            RowObject::Constraints { a, b } => CredalRow::Constraints { a: a.clone(), b: b.clone() },
        }
    }

    fn from_row(row: &CredalRow) -> Self {
        match row {
            CredalRow::Intervals { lower, upper } => RowObject::Intervals { lower: lower.clone(), upper: upper.clone() },
            CredalRow::Vertices(vs) => RowObject::Vertices(vs.iter().map(|v| v.probs().to_vec()).collect()),
            CredalRow::Constraints { a, b } => RowObject::Constraints { a: a.clone(), b: b.clone() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub states: Vec<String>,
    pub rows: IndexMap<String, RowObject>,
    pub initial: RowObject,
}

impl ModelFile {
    /// Builds and validates the model; the error lists every problem found.
    pub fn to_model(&self) -> Result<ImpreciseMarkovChain, Vec<String>> {
        let states = StateSpace::new(self.states.iter().cloned()).map_err(|e| vec![e.to_string()])?;
        let mut problems = Vec::new();
        for name in self.rows.keys() {
            if states.index_of(name).is_none() {
                problems.push(format!("rows: unknown state {name:?}"));
            }
        }
        let mut rows = Vec::with_capacity(states.len());
        for name in states.labels() {
            match self.rows.get(name) {
                Some(row) => rows.push(row.to_row()),
                None => problems.push(format!("rows: no row given for state {name:?}")),
            }
        }
        if !problems.is_empty() {
            return Err(problems);
        }
        let model = ImpreciseMarkovChain::new_unchecked(states, self.initial.to_row(), rows);
        let violations = validate_model(&model);
        if violations.is_empty() {
            Ok(model)
        } else {
            Err(violations.iter().map(ToString::to_string).collect())
        }
    }

    pub fn from_model(model: &ImpreciseMarkovChain) -> Self {
        ModelFile {
            states: model.states().labels().to_vec(),
            rows: model
                .states()
                .labels()
                .iter()
                .zip(model.rows())
                .map(|(name, row)| (name.clone(), RowObject::from_row(row)))
                .collect(),
            initial: RowObject::from_row(model.initial()),
        }
    }
}

/// Gamble keyed by state name; states left out take the value 0.
pub type GambleMap = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct StepMap {
    pub h: GambleMap,
    pub g: GambleMap,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Query {
    SingleInstant { f: GambleMap, horizon: usize },
    Sum { fs: Vec<GambleMap> },
    TimeAverage { f: GambleMap, horizon: usize },
    Product { fs: Vec<GambleMap> },
    HittingProbability { target: Vec<String>, horizon: Option<usize> },
    HittingTime { target: Vec<String>, horizon: Option<usize> },
    Custom { g0: GambleMap, steps: Vec<StepMap> },
}

#[derive(Debug, Clone, Default, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSpec {
    pub tol: Option<f64>,
    pub max_horizon: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct QueryFile {
    #[serde(flatten)]
    pub query: Query,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitSpec>,
}

/// What a query asks the engine to do.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Finite { spec: RecursiveSpec, scale: f64 },
    Limit { family: LimitFamily, limit: LimitSpec },
}

fn gamble(states: &StateSpace, map: &GambleMap, what: &str) -> Result<Gamble, String> {
    let mut values = vec![0.0; states.len()];
    for (name, &v) in map {
        let i = states
            .index_of(name)
            .ok_or_else(|| format!("{what}: unknown state {name:?}"))?;
        values[i] = v;
    }
    Gamble::new(values).map_err(|e| format!("{what}: {e}"))
}

fn target(states: &StateSpace, names: &[String]) -> Result<Vec<usize>, String> {
    names
        .iter()
        .map(|n| states.index_of(n).ok_or_else(|| format!("target: unknown state {n:?}")))
        .collect()
}

fn gambles(states: &StateSpace, maps: &[GambleMap]) -> Result<Vec<Gamble>, String> {
    if maps.is_empty() {
        return Err("fs: at least one function is required".into());
    }
    maps.iter()
        .enumerate()
        .map(|(k, m)| gamble(states, m, &format!("fs[{k}]")))
        .collect()
}

fn horizon(h: usize) -> Result<usize, String> {
    if h == 0 {
        Err("horizon must be at least 1".into())
    } else {
        Ok(h)
    }
}

impl QueryFile {
    /// Resolves state names against the model and builds the plan.
    pub fn plan(&self, states: &StateSpace) -> Result<Plan, String> {
        let dim = states.len();
        let finite = |spec: Result<RecursiveSpec, crate::Error>, scale: f64| {
            spec.map(|spec| Plan::Finite { spec, scale }).map_err(|e| e.to_string())
        };
        if self.limit.is_some()
            && !matches!(self.query, Query::HittingProbability { .. } | Query::HittingTime { .. })
        {
            return Err("limit is only supported for hitting_probability and hitting_time queries".into());
        }
        if let (Some(limit), Query::HittingProbability { target: t, .. } | Query::HittingTime { target: t, .. }) =
            (&self.limit, &self.query)
        {
            let a = target(states, t)?;
            let family = match self.query {
                Query::HittingProbability { .. } => LimitFamily::HittingProbability(a),
                _ => LimitFamily::HittingTime(a),
            };
            return Ok(Plan::Limit { family, limit: limit.clone() });
        }
        let need_horizon = |h: &Option<usize>| h.ok_or_else(|| "horizon is required without a limit block".to_string());
        match &self.query {
            Query::SingleInstant { f, horizon: n } => finite(spec_single_instant(&gamble(states, f, "f")?, horizon(*n)?), 1.0),
            Query::Sum { fs } => finite(spec_sum(&gambles(states, fs)?), 1.0),
            Query::TimeAverage { f, horizon: n } => {
                let (spec, scale) = spec_time_average(&gamble(states, f, "f")?, horizon(*n)?).map_err(|e| e.to_string())?;
                Ok(Plan::Finite { spec, scale })
            }
            Query::Product { fs } => finite(spec_product(&gambles(states, fs)?), 1.0),
            Query::HittingProbability { target: t, horizon: n } => {
                let n = horizon(need_horizon(n)?)?;
                finite(spec_hitting_probability(dim, &target(states, t)?, n), 1.0)
            }
            Query::HittingTime { target: t, horizon: n } => {
                let n = horizon(need_horizon(n)?)?;
                finite(spec_hitting_time(dim, &target(states, t)?, n), 1.0)
            }
            Query::Custom { g0, steps } => {
                let g0 = gamble(states, g0, "g0")?;
                let steps = steps
                    .iter()
                    .enumerate()
                    .map(|(k, s)| {
                        Ok(Step {
                            h: gamble(states, &s.h, &format!("steps[{k}].h"))?,
                            g: gamble(states, &s.g, &format!("steps[{k}].g"))?,
                        })
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                finite(RecursiveSpec::new(g0, steps), 1.0)
            }
        }
    }
}

/// Conditional bounds keyed by state: `[lower, upper]`.
pub type ConditionalMap = IndexMap<String, [f64; 2]>;

pub fn conditional_map(states: &StateSpace, upper: &Gamble, lower: &Gamble) -> ConditionalMap {
    states
        .labels()
        .iter()
        .enumerate()
        .map(|(i, name)| (name.clone(), [lower[i], upper[i]]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct InferDocument {
    pub upper: f64,
    pub lower: f64,
    pub conditional: ConditionalMap,
    pub lp_calls: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_reached: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_trace: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_trace: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct BoundsDocument {
    pub upper: f64,
    pub lower: f64,
    pub conditional: ConditionalMap,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct CheckDocument {
    pub horizon: usize,
    pub engine: BoundsDocument,
    pub oracle: BoundsDocument,
    pub max_discrepancy: f64,
    /// Row LPs of the conditional recursion, without the two initial-set LPs.
    pub engine_lp_calls: usize,
    pub oracle_lp_calls: usize,
    pub passed: bool,
}

/// Pretty printing with every float written to 17 significant digits.
struct FixedDigits(PrettyFormatter<'static>);

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes a document with stable key order and fixed float formatting.
pub fn to_document_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}
