//! SWAP bookkeeping: pairwise bandwidth balances, paid settlement for the
//! originator's first hop, time-based amortization, and cheque records.
//!
//! Per delivery, the originator pays the first hop in full (distance-priced)
//! and that debt settles immediately; every other adjacent pair on the path
//! accrues one unsettled accounting unit, the downstream node owing the
//! upstream forwarder, to be forgiven over time rather than paid.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::overlay::{xor_distance, Address};
use crate::routing::Path;

/// How the originator's payment for one chunk is priced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PricingMode {
    /// XOR distance from the first hop to the chunk address (default).
    XorRemaining,
    /// Address width minus the proximity order of first hop and chunk.
    ProximityStep,
    /// A flat price per chunk.
    Constant(u64),
}

impl Default for PricingMode {
    fn default() -> Self {
        PricingMode::XorRemaining
    }
}

impl fmt::Display for PricingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PricingMode::XorRemaining => write!(f, "xor-remaining"),
            PricingMode::ProximityStep => write!(f, "proximity-step"),
            PricingMode::Constant(c) => write!(f, "constant:{c}"),
        }
    }
}

impl FromStr for PricingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xor-remaining" => Ok(PricingMode::XorRemaining),
            "proximity-step" => Ok(PricingMode::ProximityStep),
            _ => {
                if let Some(c) = s.strip_prefix("constant:") {
                    let value = c.parse::<u64>().map_err(|_| {
                        Error::InvalidArgument(format!("bad constant price {c:?}"))
                    })?;
                    Ok(PricingMode::Constant(value))
                } else {
                    Err(Error::InvalidArgument(format!(
                        "unknown pricing mode {s:?} (expected xor-remaining, proximity-step or constant:<c>)"
                    )))
                }
            }
        }
    }
}

/// Accounting units the originator owes its first hop for one chunk.
pub fn price(first_hop: Address, chunk: Address, mode: PricingMode) -> Result<u64> {
    match mode {
        PricingMode::XorRemaining => xor_distance(first_hop, chunk),
        PricingMode::ProximityStep => {
            let po = crate::overlay::proximity_order(first_hop, chunk)?;
            Ok(u64::from(first_hop.bits() - po))
        }
        PricingMode::Constant(c) => Ok(c),
    }
}

/// An originator's payment to its first hop for one chunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaymentEvent {
    pub payer: Address,
    pub payee: Address,
    pub amount: u64,
}

/// Cumulative cheque from an originator to a first-hop beneficiary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChequeRecord {
    pub issuer: u64,
    pub beneficiary: u64,
    /// Total units paid from issuer to beneficiary up to this cheque.
    pub cumulative_amount: u64,
    pub step: u64,
}

/// Ledger behaviour knobs; the measured defaults leave both disabled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LedgerSettings {
    /// Freeze a pair once |balance| reaches this bound, if set.
    pub payment_threshold: Option<u64>,
    /// Units of unsettled debt forgiven per pair per step.
    pub amortization_rate: u64,
}

/// Whether a pair of peers may keep serving each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStatus {
    Ok,
    Frozen,
}

/// Pairwise balances, per-node income/paid totals and cheque records for one
/// simulation run.
#[derive(Debug, Clone, Default)]
pub struct SwapLedger {
    settings: LedgerSettings,
    /// Keyed by (low, high) address value; positive means `high` owes `low`.
    balances: HashMap<(u64, u64), i64>,
    income: HashMap<u64, u64>,
    paid: HashMap<u64, u64>,
    /// Cumulative paid per (payer, payee); feeds cheque issuance.
    pair_paid: HashMap<(u64, u64), u64>,
    /// Cumulative amount of the last cheque per (issuer, beneficiary).
    cheque_cursor: HashMap<(u64, u64), u64>,
    cheques: Vec<ChequeRecord>,
}

impl SwapLedger {
    pub fn new(settings: LedgerSettings) -> Self {
        Self {
            settings,
            ..Self::default()
        }
    }

    pub fn settings(&self) -> LedgerSettings {
        self.settings
    }

    /// Signed balance of the ordered pair: positive means `b` owes `a`.
    pub fn balance(&self, a: Address, b: Address) -> i64 {
        let (ka, kb) = (a.value(), b.value());
        let key = (ka.min(kb), ka.max(kb));
        let stored = self.balances.get(&key).copied().unwrap_or(0);
        if ka <= kb {
            stored
        } else {
            -stored
        }
    }

    fn shift_debt(&mut self, creditor: Address, debtor: Address, amount: i64) {
        let (kc, kd) = (creditor.value(), debtor.value());
        let key = (kc.min(kd), kc.max(kd));
        let delta = if kc <= kd { amount } else { -amount };
        let entry = self.balances.entry(key).or_insert(0);
        *entry += delta;
        if *entry == 0 {
            self.balances.remove(&key);
        }
    }

    pub fn income_of(&self, node: Address) -> u64 {
        self.income.get(&node.value()).copied().unwrap_or(0)
    }

    pub fn paid_of(&self, node: Address) -> u64 {
        self.paid.get(&node.value()).copied().unwrap_or(0)
    }

    pub fn total_income(&self) -> u64 {
        self.income.values().sum()
    }

    pub fn total_paid(&self) -> u64 {
        self.paid.values().sum()
    }

    pub fn cheques(&self) -> &[ChequeRecord] {
        &self.cheques
    }

    /// Nonzero pair balances as `(low, high, amount)`, sorted by pair;
    /// positive amount means `high` owes `low`.
    pub fn nonzero_balances(&self) -> Vec<(u64, u64, i64)> {
        let mut out: Vec<(u64, u64, i64)> = self
            .balances
            .iter()
            .filter(|(_, v)| **v != 0)
            .map(|((a, b), v)| (*a, *b, *v))
            .collect();
        out.sort_unstable();
        out
    }

    /// Posts one delivered chunk: the originator pays the first hop (settled
    /// on the spot), and each following pair accrues one unsettled unit owed
    /// by the downstream node to its upstream forwarder. A single-hop path
    /// (originator stores the chunk) posts nothing.
    pub fn apply_download(
        &mut self,
        path: &Path,
        chunk: Address,
        mode: PricingMode,
    ) -> Result<Option<PaymentEvent>> {
        let hops = path.hops();
        if hops.len() < 2 {
            return Ok(None);
        }
        let payer = hops[0];
        let payee = hops[1];
        let amount = price(payee, chunk, mode)?;
        *self.income.entry(payee.value()).or_insert(0) += amount;
        *self.paid.entry(payer.value()).or_insert(0) += amount;
        *self
            .pair_paid
            .entry((payer.value(), payee.value()))
            .or_insert(0) += amount;
        // The payment both credits and settles the (payer, payee) balance, so
        // the stored balance is untouched.
        for pair in hops[1..].windows(2) {
            self.shift_debt(pair[1], pair[0], 1);
        }
        Ok(Some(PaymentEvent {
            payer,
            payee,
            amount,
        }))
    }

    /// Moves every unsettled balance toward zero by `rate * steps`, clamped.
    /// Forgiven debt is not income; income/paid totals are untouched.
    pub fn amortize(&mut self, steps: u64) {
        let decay = self.settings.amortization_rate.saturating_mul(steps);
        if decay == 0 {
            return;
        }
        let decay = i64::try_from(decay).unwrap_or(i64::MAX);
        self.balances.retain(|_, v| {
            *v -= (*v).signum() * decay.min(v.abs());
            *v != 0
        });
    }

    /// Frozen once |balance| reaches the configured threshold; always ok when
    /// no threshold is set (the measured default).
    pub fn check_threshold(&self, a: Address, b: Address) -> PairStatus {
        match self.settings.payment_threshold {
            None => PairStatus::Ok,
            Some(t) => {
                if self.balance(a, b).unsigned_abs() >= t {
                    PairStatus::Frozen
                } else {
                    PairStatus::Ok
                }
            }
        }
    }

    /// Issues a cumulative cheque covering everything paid from issuer to
    /// beneficiary so far; returns `None` when nothing new is owed. Pure
    /// bookkeeping on top of balances already settled by `apply_download`.
    pub fn issue_cheque(
        &mut self,
        issuer: Address,
        beneficiary: Address,
        step: u64,
    ) -> Option<ChequeRecord> {
        let key = (issuer.value(), beneficiary.value());
        let total = self.pair_paid.get(&key).copied().unwrap_or(0);
        let cursor = self.cheque_cursor.get(&key).copied().unwrap_or(0);
        if total <= cursor {
            return None;
        }
        let record = ChequeRecord {
            issuer: issuer.value(),
            beneficiary: beneficiary.value(),
            cumulative_amount: total,
            step,
        };
        self.cheque_cursor.insert(key, total);
        self.cheques.push(record);
        Some(record)
    }
}
