use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::agent::{
    best_index, joint_fulfillment, surprise_with, trailing_median, Complexity, ConfigPoint,
    FactorGrids, IgOptions, IgScale, ParamSpace, SloSpec, SurpriseMode,
};
use crate::bayes::{
    parl_update, strl_update_with, BayesNet, DiscreteBatch, Evidence, HillClimbOptions,
    LearnOptions,
};
use crate::error::{invalid, Error, Result};

/// Hyperparameters of the agent loop.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    /// Structure learning runs when surprise exceeds `h` times the trailing median.
    pub h: f64,
    /// Exploration bonus on unvisited key points.
    pub e: f64,
    /// Weight of existing CPTs in parameter learning, capped at the model's sample weight.
    pub prior_weight: f64,
    pub learn: LearnOptions,
    /// Rows of backup data retained for structure learning.
    pub backup_window: usize,
    pub median_window: usize,
    /// Environment variables whose latest observed state is added to pv/ra evidence.
    pub env_evidence: Vec<String>,
    pub ig_scale: IgScale,
    /// Rounds of surprise history behind the ig maximum and mean; `None` uses all.
    pub ig_window: Option<usize>,
    pub complexity: Complexity,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            h: 1.5,
            e: 0.3,
            prior_weight: 20.0,
            learn: LearnOptions {
                hill_climb: HillClimbOptions {
                    max_parents: Some(2),
                    ..HillClimbOptions::default()
                },
                smoothing: 1.0,
            },
            backup_window: 1000,
            median_window: 10,
            env_evidence: vec!["streams".into()],
            ig_scale: IgScale::default(),
            ig_window: None,
            complexity: Complexity::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearningAction {
    None,
    Parl,
    Strl,
}

impl std::fmt::Display for LearningAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LearningAction::None => "none",
            LearningAction::Parl => "parl",
            LearningAction::Strl => "strl",
        })
    }
}

/// Outcome of one agent iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub surprise: f64,
    pub median: f64,
    pub action: LearningAction,
    /// Configuration the batch was produced with.
    pub config: ConfigPoint,
    /// Configuration chosen for the next round.
    pub next: ConfigPoint,
}

/// One device's agent: model, surprise history, backup data and factor grids.
#[derive(Debug, Clone)]
pub struct AgentState {
    pub model: Option<BayesNet>,
    pub surprise_history: Vec<f64>,
    pub backup_data: Option<DiscreteBatch>,
    pub grids: FactorGrids,
    pub current_config: ConfigPoint,
    pub config: AgentConfig,
    slos: Vec<SloSpec>,
    seeded: BTreeSet<usize>,
}

impl AgentState {
    /// A fresh agent without a model, starting at the first key point.
    pub fn new(space: ParamSpace, slos: Vec<SloSpec>, config: AgentConfig) -> Self {
        let start = space.point(space.keys()[0]);
        AgentState {
            model: None,
            surprise_history: Vec::new(),
            backup_data: None,
            grids: FactorGrids::new(space),
            current_config: start,
            config,
            slos,
            seeded: BTreeSet::new(),
        }
    }

    /// An agent seeded with an existing model. `known` lists configurations
    /// the model has evidence for; they are scored immediately and the best
    /// becomes the starting configuration.
    pub fn with_model(
        space: ParamSpace,
        slos: Vec<SloSpec>,
        config: AgentConfig,
        model: BayesNet,
        known: &[ConfigPoint],
        env: &Evidence,
    ) -> Result<Self> {
        let mut agent = AgentState::new(space, slos, config);
        agent.seeded = known
            .iter()
            .filter_map(|c| agent.grids.space().index_of(c))
            .collect();
        agent.model = Some(model);
        let next = agent.refresh_factors(env)?;
        agent.current_config = agent.grids.space().point(next);
        Ok(agent)
    }

    pub fn slos(&self) -> &[SloSpec] {
        &self.slos
    }

    /// Replaces the SLO set; variable names must stay the same.
    pub fn set_slos(&mut self, slos: Vec<SloSpec>) {
        self.slos = slos;
    }

    pub fn replace_slo(&mut self, slo: SloSpec) -> Result<()> {
        let s = self
            .slos
            .iter_mut()
            .find(|s| s.name == slo.name)
            .ok_or_else(|| invalid(format!("no SLO named `{}`", slo.name)))?;
        *s = slo;
        Ok(())
    }

    pub fn space(&self) -> &ParamSpace {
        self.grids.space()
    }

    fn names(&self, pick: impl Fn(&SloSpec) -> bool) -> Vec<String> {
        self.slos
            .iter()
            .filter(|s| pick(s))
            .map(|s| s.name.clone())
            .collect()
    }

    /// Configurations scored directly by the model: visited plus seeded ones.
    pub fn known_configs(&self) -> BTreeSet<usize> {
        self.grids.visited().union(&self.seeded).copied().collect()
    }

    /// One cycle on a batch produced by `current_config`.
    pub fn iterate(&mut self, batch: &DiscreteBatch) -> Result<IterationReport> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let idx = self
            .space()
            .index_of(&self.current_config)
            .ok_or_else(|| invalid("current configuration is not on the grid"))?;
        let mut action = LearningAction::None;
        let mut fresh = false;
        if self.model.is_none() {
            let empty = DiscreteBatch::empty(batch.schema().to_vec())?;
            let (model, data) = strl_update_with(None, batch, &empty, &self.config.learn)?;
            self.model = Some(model);
            self.backup_data = Some(data);
            action = LearningAction::Strl;
            fresh = true;
        }
        let slo_names = self.names(|_| true);
        let slo_refs: Vec<&str> = slo_names.iter().map(String::as_str).collect();
        let model = self.model.as_ref().expect("model present");
        let s = surprise_with(
            model,
            batch,
            &slo_refs,
            SurpriseMode::Blanket,
            self.config.complexity,
        )?;
        self.surprise_history.push(s);
        let m =
            trailing_median(&self.surprise_history, self.config.median_window).expect("non-empty");

        if !fresh {
            let backup = match self.backup_data.take() {
                Some(b) => b,
                None => DiscreteBatch::empty(batch.schema().to_vec())?,
            };
            if s > m * self.config.h {
                let (model, data) =
                    strl_update_with(self.model.as_ref(), batch, &backup, &self.config.learn)?;
                self.model = Some(model);
                self.backup_data = Some(data.tail(self.config.backup_window));
                action = LearningAction::Strl;
            } else {
                if s > m {
                    let model = self.model.as_ref().expect("model present");
                    let w = self.config.prior_weight.min(model.sample_weight());
                    self.model = Some(parl_update(model, batch, w)?);
                    action = LearningAction::Parl;
                }
                self.backup_data = Some(backup.union(batch)?.tail(self.config.backup_window));
            }
        }
        self.grids.record(idx, s);

        let env = self.env_evidence(batch);
        let next = self.refresh_factors(&env)?;
        let next_point = self.space().point(next);
        let used = std::mem::replace(&mut self.current_config, next_point);
        Ok(IterationReport {
            surprise: s,
            median: m,
            action,
            config: used,
            next: self.current_config.clone(),
        })
    }

    /// Most frequent state of each environment variable in the batch.
    fn env_evidence(&self, batch: &DiscreteBatch) -> Evidence {
        let mut ev = Evidence::new();
        for name in &self.config.env_evidence {
            if let Some(col) = batch.column_index(name) {
                let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
                for row in batch.rows() {
                    *counts.entry(row[col]).or_default() += 1;
                }
                if let Some((&state, _)) = counts
                    .iter()
                    .max_by_key(|(s, c)| (**c, std::cmp::Reverse(**s)))
                {
                    ev.insert(name.clone(), batch.schema()[col].states[state].clone());
                }
            }
        }
        ev
    }

    /// Scores known configurations, interpolates, refreshes ig and returns
    /// the best grid index.
    fn refresh_factors(&mut self, env: &Evidence) -> Result<usize> {
        let model = self
            .model
            .as_ref()
            .ok_or_else(|| invalid("agent has no model"))?;
        let qoe = self.names(SloSpec::is_qoe);
        let qos = self.names(SloSpec::is_qos);
        let qoe: Vec<&str> = qoe.iter().map(String::as_str).collect();
        let qos: Vec<&str> = qos.iter().map(String::as_str).collect();
        let mut pv = BTreeMap::new();
        let mut ra = BTreeMap::new();
        for k in self.known_configs() {
            let mut ev = self.space().point(k).evidence();
            for (var, state) in env.iter() {
                if model
                    .index_of(var)
                    .and_then(|i| model.variable(i).state_index(state))
                    .is_some()
                {
                    ev.insert(var, state);
                }
            }
            pv.insert(k, joint_fulfillment(model, &qoe, &ev)?);
            ra.insert(k, joint_fulfillment(model, &qos, &ev)?);
        }
        self.grids.set_known(&pv, &ra);
        self.grids.refresh_ig(&IgOptions {
            e: self.config.e,
            scale: self.config.ig_scale,
            window: self.config.ig_window,
        });
        Ok(best_index(&self.grids))
    }
}

/// Writes the per-round trace: round, surprise, pv, ra, learning_action and
/// one column per configuration axis.
pub struct TraceWriter<W: Write> {
    inner: csv::Writer<W>,
}

/// One trace line; `pv` and `ra` are fulfillment rates measured on the round's rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub round: u32,
    pub surprise: f64,
    pub pv: f64,
    pub ra: f64,
    pub action: LearningAction,
    pub config: ConfigPoint,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(writer: W, space: &ParamSpace) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(writer);
        let mut header = vec!["round", "surprise", "pv", "ra", "learning_action"];
        header.extend(space.axes().iter().map(|a| a.name.as_str()));
        inner.write_record(&header)?;
        Ok(TraceWriter { inner })
    }

    pub fn write(&mut self, row: &TraceRow) -> Result<()> {
        let mut rec = vec![
            row.round.to_string(),
            format!("{:.6}", row.surprise),
            format!("{:.6}", row.pv),
            format!("{:.6}", row.ra),
            row.action.to_string(),
        ];
        rec.extend(row.config.values().map(crate::sim::value_label));
        self.inner.write_record(&rec)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        self.inner
            .into_inner()
            .map_err(|e| Error::Io(e.into_error()))
    }
}
