use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LEDGER_SCHEMA: &str = "arrowmat.ledger/1";

/// Alpha-beta model: a message of `s` words costs `alpha + beta·s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0 }
    }
}

impl CostModel {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cost model needs finite alpha, beta >= 0 (got {alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn time(&self, messages: u64, words: u64) -> f64 {
        self.alpha * messages as f64 + self.beta * words as f64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTraffic {
    pub sent_words: u64,
    pub recv_words: u64,
    pub sent_messages: u64,
    pub recv_messages: u64,
}

/// A chain of dependent messages: how many, and how many words in total.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub messages: u64,
    pub words: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub phase: String,
    pub src: usize,
    pub dst: usize,
    pub words: u64,
}

#[derive(Clone, Debug, PartialEq)]
struct Phase {
    name: String,
    messages: u64,
    words: u64,
    recv: Vec<u64>,
}

/// Per-rank message accounting plus a dependent-chain clock per rank.
///
/// Each rank carries the longest chain of messages that its current state
/// depends on. A send extends the sender's chain by one message, and the
/// sender stays busy until delivery; the receiver then depends on whichever
/// is costlier, its own chain or the arriving one. Counts are integers, so
/// times are exact functions of the recorded chains.
#[derive(Clone, Debug, PartialEq)]
pub struct CommLedger {
    model: CostModel,
    per_rank: Vec<RankTraffic>,
    clocks: Vec<Chain>,
    phases: Vec<Phase>,
    events: Option<Vec<Message>>,
}

impl CommLedger {
    pub fn new(ranks: usize, model: CostModel) -> Self {
        Self {
            model,
            per_rank: vec![RankTraffic::default(); ranks],
            clocks: vec![Chain::default(); ranks],
            phases: Vec::new(),
            events: None,
        }
    }

    /// Keeps every message in an event log.
    pub fn with_event_log(mut self) -> Self {
        self.events = Some(Vec::new());
        self
    }

    pub fn ranks(&self) -> usize {
        self.per_rank.len()
    }

    pub fn model(&self) -> CostModel {
        self.model
    }

    pub fn per_rank(&self) -> &[RankTraffic] {
        &self.per_rank
    }

    pub fn events(&self) -> Option<&[Message]> {
        self.events.as_deref()
    }

    fn later(&self, a: Chain, b: Chain) -> Chain {
        let ta = self.model.time(a.messages, a.words);
        let tb = self.model.time(b.messages, b.words);
        match ta.total_cmp(&tb).then((a.messages, a.words).cmp(&(b.messages, b.words))) {
            std::cmp::Ordering::Less => b,
            _ => a,
        }
    }

    /// Records a point-to-point message. Panics on an out-of-range rank or a
    /// self-send; both are simulator bugs.
    pub fn send(&mut self, phase: &str, src: usize, dst: usize, words: u64) {
        assert!(src < self.ranks() && dst < self.ranks(), "rank out of range");
        assert_ne!(src, dst, "self-send");
        let arrival = Chain { messages: self.clocks[src].messages + 1, words: self.clocks[src].words + words };
        self.clocks[src] = arrival;
        self.clocks[dst] = self.later(self.clocks[dst], arrival);

        let s = &mut self.per_rank[src];
        s.sent_words += words;
        s.sent_messages += 1;
        let d = &mut self.per_rank[dst];
        d.recv_words += words;
        d.recv_messages += 1;

        let ranks = self.ranks();
        let idx = match self.phases.iter().position(|p| p.name == phase) {
            Some(i) => i,
            None => {
                self.phases.push(Phase { name: phase.to_string(), messages: 0, words: 0, recv: vec![0; ranks] });
                self.phases.len() - 1
            }
        };
        let p = &mut self.phases[idx];
        p.messages += 1;
        p.words += words;
        p.recv[dst] += words;

        if let Some(log) = &mut self.events {
            log.push(Message { phase: phase.to_string(), src, dst, words });
        }
    }

    /// Longest dependent chain over all ranks.
    pub fn critical_path(&self) -> Chain {
        self.clocks.iter().fold(Chain::default(), |acc, &c| self.later(acc, c))
    }

    pub fn critical_path_time(&self) -> f64 {
        let c = self.critical_path();
        self.model.time(c.messages, c.words)
    }

    pub fn total_words(&self) -> u64 {
        self.per_rank.iter().map(|r| r.sent_words).sum()
    }

    pub fn total_messages(&self) -> u64 {
        self.per_rank.iter().map(|r| r.sent_messages).sum()
    }

    pub fn max_recv_words(&self) -> u64 {
        self.per_rank.iter().map(|r| r.recv_words).max().unwrap_or(0)
    }

    pub fn max_sent_words(&self) -> u64 {
        self.per_rank.iter().map(|r| r.sent_words).max().unwrap_or(0)
    }

    /// Largest per-rank receive volume within one phase; 0 if absent.
    pub fn phase_max_recv_words(&self, phase: &str) -> u64 {
        self.phases
            .iter()
            .find(|p| p.name == phase)
            .and_then(|p| p.recv.iter().copied().max())
            .unwrap_or(0)
    }

    pub fn phase_words(&self, phase: &str) -> u64 {
        self.phases.iter().find(|p| p.name == phase).map_or(0, |p| p.words)
    }

    pub fn phase_messages(&self, phase: &str) -> u64 {
        self.phases.iter().find(|p| p.name == phase).map_or(0, |p| p.messages)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub ranks: usize,
    pub sent_words: u64,
    pub recv_words: u64,
    pub messages: u64,
    pub max_sent_words: u64,
    pub max_recv_words: u64,
    pub max_sent_messages: u64,
    pub max_recv_messages: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPath {
    pub messages: u64,
    pub words: u64,
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub name: String,
    pub messages: u64,
    pub words: u64,
    pub max_recv_words: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub schema: String,
    pub model: CostModel,
    pub per_rank: Vec<RankTraffic>,
    pub totals: Totals,
    pub critical_path: CriticalPath,
    pub phases: Vec<PhaseSummary>,
}

pub fn ledger_summary(ledger: &CommLedger) -> LedgerSummary {
    let r = &ledger.per_rank;
    let cp = ledger.critical_path();
    LedgerSummary {
        schema: LEDGER_SCHEMA.to_string(),
        model: ledger.model,
        per_rank: r.clone(),
        totals: Totals {
            ranks: r.len(),
            sent_words: r.iter().map(|x| x.sent_words).sum(),
            recv_words: r.iter().map(|x| x.recv_words).sum(),
            messages: r.iter().map(|x| x.sent_messages).sum(),
            max_sent_words: r.iter().map(|x| x.sent_words).max().unwrap_or(0),
            max_recv_words: r.iter().map(|x| x.recv_words).max().unwrap_or(0),
            max_sent_messages: r.iter().map(|x| x.sent_messages).max().unwrap_or(0),
            max_recv_messages: r.iter().map(|x| x.recv_messages).max().unwrap_or(0),
        },
        critical_path: CriticalPath {
            messages: cp.messages,
            words: cp.words,
            time: ledger.model.time(cp.messages, cp.words),
        },
        phases: ledger
            .phases
            .iter()
            .map(|p| PhaseSummary {
                name: p.name.clone(),
                messages: p.messages,
                words: p.words,
                max_recv_words: p.recv.iter().copied().max().unwrap_or(0),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_ledger_is_zero() {
        let s = ledger_summary(&CommLedger::new(0, CostModel::default()));
        assert_eq!(s.totals.messages, 0);
        assert_eq!(s.critical_path.time, 0.0);
        let s = ledger_summary(&CommLedger::new(3, CostModel::default()));
        assert_eq!(s.totals.max_recv_words, 0);
        assert_eq!(s.per_rank.len(), 3);
    }

    #[test]
    fn chains_follow_dependencies() {
        let mut l = CommLedger::new(3, CostModel::new(1.0, 0.5).unwrap());
        l.send("a", 0, 1, 4);
        l.send("a", 1, 2, 2);
        // 2 depends on 0 through 1
        assert_eq!(l.critical_path(), Chain { messages: 2, words: 6 });
        assert_eq!(l.critical_path_time(), 5.0);
        // an independent cheap message does not lengthen the chain
        l.send("b", 0, 2, 0);
        assert_eq!(l.critical_path(), Chain { messages: 2, words: 6 });
        assert_eq!(l.phase_max_recv_words("a"), 4);
        assert_eq!(l.total_words(), 6);
    }

    #[test]
    fn sender_serializes_its_sends() {
        let mut l = CommLedger::new(3, CostModel::new(1.0, 0.0).unwrap());
        l.send("x", 0, 1, 1);
        l.send("x", 0, 2, 1);
        assert_eq!(l.critical_path().messages, 2);
    }

    #[test]
    fn model_validation() {
        assert!(CostModel::new(-1.0, 0.0).is_err());
        assert!(CostModel::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn json_layout_is_stable() {
        let mut l = CommLedger::new(2, CostModel::new(2.0, 1.0).unwrap());
        l.send("p", 0, 1, 3);
        let json = serde_json::to_string(&ledger_summary(&l)).unwrap();
        assert!(json.starts_with(r#"{"schema":"arrowmat.ledger/1","model":{"alpha":2.0,"beta":1.0},"per_rank":["#));
        let back: LedgerSummary = serde_json::from_str(&json).unwrap();
        assert_eq!(back.critical_path.time, 5.0);
    }
}
